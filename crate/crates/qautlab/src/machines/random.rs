//! Seeded random machines for property checks.

use rand::Rng;

use super::{Alphabet, OpTable, PfaSpec, QfaSpec, Role, Roster};
use crate::numerics::{CMatrix, C64};

fn roster(n: usize, rng: &mut impl Rng) -> Roster {
    let mut r = Roster::new((0..n).map(|i| format!("q{i}")), 0);
    for role in r.roles.iter_mut() {
        if rng.gen_bool(0.5) {
            *role = Role::Accept;
        }
    }
    let pick = rng.gen_range(0..n);
    r.roles[pick] = Role::Accept;
    r
}

/// PFA with `n` states, random column-stochastic matrices and a random accepting set.
pub fn random_pfa(alphabet: &Alphabet, n: usize, rng: &mut impl Rng) -> PfaSpec {
    let mats = (0..alphabet.tilde_len())
        .map(|_| {
            let mut m = CMatrix::zeros(n, n);
            for j in 0..n {
                let col: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
                let total: f64 = col.iter().sum();
                for (i, x) in col.iter().enumerate() {
                    m[(i, j)] = C64::new(x / total, 0.0);
                }
            }
            m
        })
        .collect();
    PfaSpec { alphabet: alphabet.clone(), roster: roster(n, rng), ops: OpTable::single(mats) }
}

/// `r × c` complex matrix with orthonormal columns (`c ≤ r`), from QR of a random matrix.
pub fn random_isometry(r: usize, c: usize, rng: &mut impl Rng) -> CMatrix {
    let m = CMatrix::from_fn(r, c, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.qr().q()
}

/// QFA with `n` states and `elems` Kraus elements per symbol, cut from a random isometry.
pub fn random_qfa(alphabet: &Alphabet, n: usize, elems: usize, rng: &mut impl Rng) -> QfaSpec {
    let ops = (0..alphabet.tilde_len())
        .map(|_| {
            let v = random_isometry(n * elems, n, rng);
            (0..elems).map(|e| v.rows(e * n, n).into_owned()).collect()
        })
        .collect();
    QfaSpec {
        alphabet: alphabet.clone(),
        roster: roster(n, rng),
        ops: OpTable { ops, exprs: Default::default() },
    }
}
