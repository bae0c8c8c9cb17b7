use super::ConstructionError;
use crate::numerics::{CMatrix, C64};

/// Completion blocks that turn a family of square matrices into orthonormal column sets.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    /// Common scale `l`; the columns of `(1/l)·[A; B; C]` are orthonormal.
    pub scale: f64,
    pub b: Vec<CMatrix>,
    /// Diagonal padding blocks, present only for the second template.
    pub c: Option<Vec<CMatrix>>,
}

impl EmbeddingResult {
    /// The scaled stack `(1/l)·[A; B(; C)]` for key `k`.
    pub fn stacked(&self, a: &CMatrix, k: usize) -> CMatrix {
        let m = a.ncols();
        let blocks = if self.c.is_some() { 3 } else { 2 };
        let mut out = CMatrix::zeros(blocks * m, m);
        out.view_mut((0, 0), (m, m)).copy_from(a);
        out.view_mut((m, 0), (m, m)).copy_from(&self.b[k]);
        if let Some(c) = &self.c {
            out.view_mut((2 * m, 0), (m, m)).copy_from(&c[k]);
        }
        out / C64::new(self.scale, 0.0)
    }
}

fn column_norm_sqr(a: &CMatrix, b: &CMatrix, j: usize) -> f64 {
    a.column(j).norm_squared() + b.column(j).norm_squared()
}

fn inner(a: &CMatrix, b: &CMatrix, i: usize, j: usize) -> C64 {
    a.column(i).dotc(&a.column(j)) + b.column(i).dotc(&b.column(j))
}

/// Upper-triangular B with `b_ii = 1`, making the columns of `[A; B]` pairwise orthogonal.
fn orthogonalizer(a: &CMatrix, diag: impl Fn(&CMatrix, &CMatrix, usize) -> f64) -> CMatrix {
    let m = a.ncols();
    let mut b = CMatrix::zeros(m, m);
    for i in 0..m {
        let d = diag(a, &b, i);
        b[(i, i)] = C64::new(d, 0.0);
        for j in i + 1..m {
            // row i of column j is still zero, so the partial product is the whole product
            let p = inner(a, &b, i, j);
            b[(i, j)] = -p / d;
        }
    }
    b
}

/// First template: fixed scale `l = 2m+1`, diagonal of B chosen to bring every column to length `l`.
pub fn extend_to_unitary_i(mats: &[CMatrix], tol: f64) -> Result<EmbeddingResult, ConstructionError> {
    let m = mats.first().map_or(0, |a| a.ncols());
    let l = (2 * m + 1) as f64;
    let mut bs = Vec::with_capacity(mats.len());
    for (k, a) in mats.iter().enumerate() {
        for j in 0..m {
            let norm = a.column(j).norm();
            if norm > 1.0 + tol {
                return Err(ConstructionError::Parameter(format!(
                    "column {j} of matrix {k} has length {norm} > 1"
                )));
            }
        }
        bs.push(orthogonalizer(a, |a, b, i| (l * l - column_norm_sqr(a, b, i)).max(0.0).sqrt()));
    }
    Ok(EmbeddingResult { scale: l, b: bs, c: None })
}

/// Second template: unit diagonal in B, then a common scale and diagonal padding C.
pub fn extend_to_unitary_ii(mats: &[CMatrix]) -> EmbeddingResult {
    let m = mats.first().map_or(0, |a| a.ncols());
    let bs: Vec<CMatrix> = mats.iter().map(|a| orthogonalizer(a, |_, _, _| 1.0)).collect();
    let mut l2: f64 = 0.0;
    for (a, b) in mats.iter().zip(&bs) {
        for j in 0..m {
            l2 = l2.max(column_norm_sqr(a, b, j));
        }
    }
    let cs = mats
        .iter()
        .zip(&bs)
        .map(|(a, b)| {
            let mut c = CMatrix::zeros(m, m);
            for j in 0..m {
                c[(j, j)] = C64::new((l2 - column_norm_sqr(a, b, j)).max(0.0).sqrt(), 0.0);
            }
            c
        })
        .collect();
    EmbeddingResult { scale: l2.sqrt(), b: bs, c: Some(cs) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, is_column_orthonormal, Tolerance};

    fn one(x: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c(x, 0.0))
    }

    #[test]
    fn scalar_first_template() {
        let e = extend_to_unitary_i(&[one(1.0)], 1e-9).unwrap();
        assert_eq!(e.scale, 3.0);
        assert!((e.b[0][(0, 0)].re - 8f64.sqrt()).abs() < 1e-15);
        assert!(is_column_orthonormal(&e.stacked(&one(1.0), 0), Tolerance::default()));
    }

    #[test]
    fn first_template_rejects_long_columns() {
        assert!(extend_to_unitary_i(&[one(1.5)], 1e-9).is_err());
    }

    #[test]
    fn zero_input() {
        let z = CMatrix::zeros(3, 3);
        let e = extend_to_unitary_i(&[z.clone()], 1e-9).unwrap();
        assert!(is_column_orthonormal(&e.stacked(&z, 0), Tolerance::default()));
        let e = extend_to_unitary_ii(&[z.clone()]);
        assert!(is_column_orthonormal(&e.stacked(&z, 0), Tolerance::default()));
    }

    #[test]
    fn second_template_sizes() {
        let e = extend_to_unitary_ii(&[CMatrix::identity(3, 3)]);
        assert!((e.scale - 2f64.sqrt()).abs() < 1e-15);
        let e = extend_to_unitary_ii(&[one(2.0)]);
        assert!((e.scale - 5f64.sqrt()).abs() < 1e-15);
        assert!(is_column_orthonormal(&e.stacked(&one(2.0), 0), Tolerance::default()));
    }

    #[test]
    fn stochastic_pair() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = c(0.3, 0.0);
        a[(1, 0)] = c(0.7, 0.0);
        a[(1, 1)] = c(1.0, 0.0);
        let mut b = CMatrix::zeros(2, 2);
        b[(0, 1)] = c(0.5, 0.0);
        b[(1, 1)] = c(0.5, 0.0);
        b[(0, 0)] = c(1.0, 0.0);
        let e = extend_to_unitary_i(&[a.clone(), b.clone()], 1e-9).unwrap();
        let tight = Tolerance::new(1e-12).unwrap();
        assert!(is_column_orthonormal(&e.stacked(&a, 0), tight));
        assert!(is_column_orthonormal(&e.stacked(&b, 1), tight));
        let e = extend_to_unitary_ii(&[a.clone(), b.clone()]);
        assert!(is_column_orthonormal(&e.stacked(&a, 0), tight));
        assert!(is_column_orthonormal(&e.stacked(&b, 1), tight));
    }
}
