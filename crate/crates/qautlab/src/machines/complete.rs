use std::collections::BTreeMap;

use super::{Alphabet, EntryKey, MachineError, OpTable, Roster};
use crate::numerics::{basis, zeros, CMatrix, CVector, C64};
use crate::textio::{keep_expr, parse_amplitude};

/// Fills every column not flagged in `specified` by Gram–Schmidt over standard basis
/// candidates, taking unspecified columns in index order.
pub fn complete_unitary(m: &CMatrix, specified: &[bool]) -> Result<CMatrix, MachineError> {
    let n = m.nrows();
    if m.ncols() != n || specified.len() != n {
        return Err(MachineError::Completion(format!("{}x{} matrix", m.nrows(), m.ncols())));
    }
    let mut fixed: Vec<CVector> = (0..n).filter(|&j| specified[j]).map(|j| m.column(j).into_owned()).collect();
    let mut out = m.clone();
    for j in (0..n).filter(|&j| !specified[j]) {
        let mut found = false;
        for k in 0..n {
            let mut v = basis(n, k);
            // Two passes of modified Gram–Schmidt keep the residual orthogonal to working precision.
            for _ in 0..2 {
                for f in &fixed {
                    let proj = f.dotc(&v);
                    v -= f * proj;
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                v /= C64::new(norm, 0.0);
                for z in v.iter_mut() {
                    if z.re.abs() < 1e-15 {
                        z.re = 0.0;
                    }
                    if z.im.abs() < 1e-15 {
                        z.im = 0.0;
                    }
                }
                out.set_column(j, &v);
                fixed.push(v);
                found = true;
                break;
            }
        }
        if !found {
            return Err(MachineError::Completion(format!("no direction left for column {j}")));
        }
    }
    Ok(out)
}

/// How a builder treats columns it was never told about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fill {
    /// Gram–Schmidt completion to a unitary.
    Unitary,
    /// Self-loop with weight 1.
    Identity,
}

/// Collects symbolic transition entries by name and produces an [`OpTable`].
#[derive(Debug, Clone)]
pub struct UnitaryBuilder {
    pub alphabet: Alphabet,
    pub roster: Roster,
    entries: Vec<BTreeMap<(usize, usize), (C64, String)>>,
}

impl UnitaryBuilder {
    pub fn new(alphabet: Alphabet, roster: Roster) -> Self {
        let syms = alphabet.tilde_len();
        UnitaryBuilder { alphabet, roster, entries: vec![BTreeMap::new(); syms] }
    }

    fn sym(&self, sym: &str) -> Result<usize, MachineError> {
        self.alphabet.tilde_index(sym).ok_or_else(|| MachineError::UnknownSymbol(sym.to_string()))
    }

    /// Sets the amplitude of `src --sym--> dst`.
    pub fn set(&mut self, sym: &str, src: &str, dst: &str, expr: &str) -> Result<&mut Self, MachineError> {
        let s = self.sym(sym)?;
        let from = self.roster.idx(src)?;
        let to = self.roster.idx(dst)?;
        let value = parse_amplitude(expr).map_err(|e| MachineError::Parameter(format!("`{expr}`: {e}")))?;
        self.entries[s].insert((to, from), (value, expr.to_string()));
        Ok(self)
    }

    /// Sets a whole column: `src --sym--> Σ expr·dst`.
    pub fn col(&mut self, sym: &str, src: &str, targets: &[(&str, &str)]) -> Result<&mut Self, MachineError> {
        for (dst, expr) in targets {
            self.set(sym, src, dst, expr)?;
        }
        Ok(self)
    }

    /// Same column for several symbols.
    pub fn col_on(&mut self, syms: &[&str], src: &str, targets: &[(&str, &str)]) -> Result<&mut Self, MachineError> {
        for s in syms {
            self.col(s, src, targets)?;
        }
        Ok(self)
    }

    pub fn build(self, fill: Fill) -> Result<(Alphabet, Roster, OpTable), MachineError> {
        let n = self.roster.len();
        let mut ops = Vec::with_capacity(self.entries.len());
        let mut exprs = BTreeMap::new();
        for (s, entries) in self.entries.iter().enumerate() {
            let mut m = zeros(n, n);
            let mut specified = vec![false; n];
            for (&(row, col), (value, expr)) in entries {
                m[(row, col)] = *value;
                specified[col] = true;
                if value.norm() > 0.0 {
                    if let Some(e) = keep_expr(expr, *value) {
                        exprs.insert(EntryKey { sym: s, elem: 0, row, col }, e);
                    }
                }
            }
            let m = match fill {
                Fill::Unitary => complete_unitary(&m, &specified)?,
                Fill::Identity => {
                    for j in (0..n).filter(|&j| !specified[j]) {
                        m[(j, j)] = C64::new(1.0, 0.0);
                    }
                    m
                }
            };
            ops.push(vec![m]);
        }
        Ok((self.alphabet, self.roster, OpTable { ops, exprs }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, is_column_orthonormal, Tolerance};

    #[test]
    fn completes_single_column() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = zeros(3, 3);
        m[(0, 0)] = c(h, 0.0);
        m[(1, 0)] = c(h, 0.0);
        let u = complete_unitary(&m, &[true, false, false]).unwrap();
        assert!(is_column_orthonormal(&u, Tolerance::default()));
        assert_eq!(u.column(0), m.column(0));
    }

    #[test]
    fn completion_is_deterministic() {
        let mut m = zeros(4, 4);
        m[(2, 1)] = c(0.6, 0.0);
        m[(3, 1)] = c(0.0, 0.8);
        let spec = [false, true, false, false];
        assert_eq!(complete_unitary(&m, &spec).unwrap(), complete_unitary(&m, &spec).unwrap());
    }

    #[test]
    fn builder_records_expressions() {
        let a = Alphabet::from_chars("a").unwrap();
        let r = Roster::new(["p", "q"], 0);
        let mut b = UnitaryBuilder::new(a, r);
        b.col("a", "p", &[("p", "1/sqrt(2)"), ("q", "1/sqrt(2)")]).unwrap();
        let (_, _, ops) = b.build(Fill::Unitary).unwrap();
        assert!(is_column_orthonormal(ops.mat(1), Tolerance::default()));
        assert_eq!(ops.exprs.len(), 2);
        assert!(is_column_orthonormal(ops.mat(0), Tolerance::default()));
    }
}
