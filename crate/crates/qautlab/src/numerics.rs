//! Complex linear algebra helpers shared by every machine kind.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

/// Magnitudes below this are treated as rounding noise and printed or reported as zero.
pub const CLAMP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
}

/// Equality threshold for every numeric predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self, NumericsError> {
        if eps > 0.0 && eps.is_finite() {
            Ok(Tolerance { eps })
        } else {
            Err(NumericsError::BadTolerance(eps))
        }
    }

    /// Reads `QAUTLAB_TOL`, falling back to the default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var("QAUTLAB_TOL")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .and_then(|e| Tolerance::new(e).ok())
            .unwrap_or_default()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.eps
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Standard basis column `e_i` of length `n`.
pub fn basis(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Kronecker product, blocks ordered `a`-major.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn tensor_all(mats: &[CMatrix]) -> CMatrix {
    let mut acc = identity(1);
    for m in mats {
        acc = tensor(&acc, m);
    }
    acc
}

/// Row-major flattening: entry `(i, j)` lands at index `i*n + j`.
pub fn vec_map(a: &CMatrix) -> Result<CVector, NumericsError> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(NumericsError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(CVector::from_fn(n * n, |k, _| a[(k / n, k % n)]))
}

/// Inverse of [`vec_map`].
pub fn unvec(v: &CVector) -> Result<CMatrix, NumericsError> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() {
        return Err(NumericsError::Dimension(format!("length {} is not a square", v.len())));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| v[i * n + j]))
}

pub fn is_column_orthonormal(m: &CMatrix, tol: Tolerance) -> bool {
    let g = m.adjoint() * m;
    let n = g.nrows();
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            if (g[(i, j)] - C64::new(want, 0.0)).norm() > tol.eps() {
                return false;
            }
        }
    }
    true
}

/// Σ E†E for a list of operation elements.
pub fn gram_sum(elements: &[CMatrix]) -> Result<CMatrix, NumericsError> {
    let first = elements.first().ok_or_else(|| NumericsError::Dimension("empty element list".into()))?;
    let n = first.ncols();
    let mut acc = zeros(n, n);
    for e in elements {
        if e.nrows() != e.ncols() {
            return Err(NumericsError::NotSquare { rows: e.nrows(), cols: e.ncols() });
        }
        if e.ncols() != n {
            return Err(NumericsError::Dimension(format!("element of size {} among size {}", e.ncols(), n)));
        }
        acc += e.adjoint() * e;
    }
    Ok(acc)
}

pub fn is_superoperator(elements: &[CMatrix], tol: Tolerance) -> Result<bool, NumericsError> {
    let g = gram_sum(elements)?;
    let n = g.nrows();
    Ok((g - identity(n)).iter().all(|z| z.norm() <= tol.eps()))
}

/// Replaces each entry a+bi with the block [[a, b], [-b, a]].
pub fn complex_to_real_block(m: &CMatrix) -> RMatrix {
    RMatrix::from_fn(2 * m.nrows(), 2 * m.ncols(), |r, s| {
        let z = m[(r / 2, s / 2)];
        match (r % 2, s % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => z.im,
            _ => -z.im,
        }
    })
}

/// Snaps rounding noise within [`CLAMP`] outside `[0, 1]` back onto the interval.
/// Small positive values are kept: sums of squared amplitudes can be legitimately tiny.
pub fn clamp_prob(p: f64) -> f64 {
    if p < 0.0 && p > -CLAMP {
        0.0
    } else if p > 1.0 && p - 1.0 < CLAMP {
        1.0
    } else {
        p
    }
}

pub fn norm_sqr(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: [[f64; 2]; 2]) -> CMatrix {
        CMatrix::from_fn(2, 2, |i, j| c(a[i][j], 0.0))
    }

    #[test]
    fn tensor_of_identities() {
        assert_eq!(tensor(&identity(2), &identity(2)), identity(4));
    }

    #[test]
    fn tensor_of_basis_vectors() {
        let e1 = CMatrix::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let e2 = CMatrix::from_column_slice(2, 1, &[c(0.0, 0.0), c(1.0, 0.0)]);
        let t = tensor(&e1, &e2);
        assert_eq!(t.column(0).iter().map(|z| z.re).collect::<Vec<_>>(), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn vec_of_small_matrices() {
        let v = vec_map(&identity(2)).unwrap();
        assert_eq!(v.iter().map(|z| z.re).collect::<Vec<_>>(), vec![1.0, 0.0, 0.0, 1.0]);
        let v = vec_map(&m2([[1.0, 2.0], [3.0, 4.0]])).unwrap();
        assert_eq!(v.iter().map(|z| z.re).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0, 4.0]);
        assert!(vec_map(&zeros(2, 3)).is_err());
        assert_eq!(unvec(&v).unwrap(), m2([[1.0, 2.0], [3.0, 4.0]]));
    }

    #[test]
    fn orthonormal_columns() {
        assert!(is_column_orthonormal(&identity(3), Tolerance::default()));
        assert!(!is_column_orthonormal(&m2([[1.0, 1.0], [0.0, 0.0]]), Tolerance::default()));
        let col = CMatrix::from_column_slice(2, 1, &[c(1.0 / 3.0, 0.0), c(8f64.sqrt() / 3.0, 0.0)]);
        assert!(is_column_orthonormal(&col, Tolerance::default()));
    }

    #[test]
    fn superoperator_checks() {
        let tol = Tolerance::default();
        assert!(is_superoperator(&[identity(2)], tol).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = m2([[0.0, 1.0], [1.0, 0.0]]);
        assert!(is_superoperator(&[identity(2) * c(h, 0.0), x * c(h, 0.0)], tol).unwrap());
        assert!(!is_superoperator(&[identity(2), identity(2)], tol).unwrap());
        assert!(is_superoperator(&[identity(2), identity(3)], tol).is_err());
    }

    #[test]
    fn real_block_of_i() {
        let m = CMatrix::from_element(1, 1, c(0.0, 1.0));
        let b = complex_to_real_block(&m);
        assert_eq!(b, RMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let r = m2([[1.0, 2.0], [3.0, 4.0]]);
        let rb = complex_to_real_block(&r);
        let want = RMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]).kronecker(&RMatrix::identity(2, 2));
        assert_eq!(rb, want);
    }

    #[test]
    fn tolerance_rejects_nonpositive() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
        assert_eq!(Tolerance::default().eps(), 1e-9);
    }
}
