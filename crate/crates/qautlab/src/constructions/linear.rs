use super::templates::{extend_to_unitary_i, EmbeddingResult};
use super::{complete_from_stack, ConstructionError};
use crate::machines::{GfaSpec, KwqfaSpec, OpTable, PfaSpec, QfaSpec, Role, Roster};
use crate::numerics::{complex_to_real_block, tensor, vec_map, CMatrix, C64};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// `diag(A, I_extra)`.
fn pad(a: &CMatrix, extra: usize) -> CMatrix {
    let n = a.ncols();
    let mut out = CMatrix::zeros(n + extra, n + extra);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    for k in 0..extra {
        out[(n + k, n + k)] = one();
    }
    out
}

/// Moves the PFA's final mass onto two counters: accepting states to `n`, the rest to `n+1`.
fn funnel(pfa: &PfaSpec, tail: &[(usize, C64)], extra: usize) -> CMatrix {
    let n = pfa.roster.len();
    let mut t = CMatrix::zeros(n + extra, n + extra);
    for q in 0..n {
        let row = if pfa.roster.roles[q] == Role::Accept { n } else { n + 1 };
        t[(row, q)] = one();
    }
    t[(n, n)] = one();
    t[(n + 1, n + 1)] = one();
    for &(col, v) in tail {
        t[(n, col)] += v;
        t[(n + 1, col)] -= v;
    }
    t
}

fn numbered(prefix: &str, range: std::ops::Range<usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{}", i + 1)).collect()
}

/// Embeds a PFA into a realtime KWQFA with `3n+6` states whose cutpoint-½ decisions agree.
pub fn pfa_to_kwqfa(pfa: &PfaSpec) -> Result<KwqfaSpec, ConstructionError> {
    let n = pfa.roster.len();
    let m = n + 2;
    let dollar = pfa.alphabet.dollar();
    let mats: Vec<CMatrix> = (0..pfa.alphabet.tilde_len())
        .map(|s| {
            let a = pad(pfa.ops.mat(s), 2);
            if s == dollar {
                funnel(pfa, &[], 2) * a
            } else {
                a
            }
        })
        .collect();
    let emb = extend_to_unitary_i(&mats, 1e-9)?;
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut ops = Vec::new();
    for (s, a) in mats.iter().enumerate() {
        let mut stack = CMatrix::zeros(3 * m, m);
        let top = emb.stacked(a, s);
        stack.view_mut((0, 0), (m, m)).copy_from(&top.rows(0, m));
        let b = top.rows(m, m) * h;
        stack.view_mut((m, 0), (m, m)).copy_from(&b);
        stack.view_mut((2 * m, 0), (m, m)).copy_from(&b);
        ops.push(complete_from_stack(&stack)?);
    }
    let mut names = numbered("r", 0..n);
    names.push("acc".into());
    names.push("rej".into());
    names.extend(numbered("ba", 0..m));
    names.extend(numbered("br", 0..m));
    let mut roster = Roster::new(names, pfa.roster.start);
    roster.roles[n] = Role::Accept;
    roster.roles[n + 1] = Role::Reject;
    for k in 0..m {
        roster.roles[m + k] = Role::Accept;
        roster.roles[2 * m + k] = Role::Reject;
    }
    Ok(KwqfaSpec { alphabet: pfa.alphabet.clone(), roster, ops: OpTable::single(ops) })
}

/// Realtime KWQFA that accepts with nonzero probability exactly when the PFA's value differs from ½.
pub fn exclusive_pfa_to_nqfa(pfa: &PfaSpec) -> Result<KwqfaSpec, ConstructionError> {
    let n = pfa.roster.len();
    let m = n + 3;
    let start = pfa.roster.start;
    let dollar = pfa.alphabet.dollar();
    let half = C64::new(0.5, 0.0);
    let mats: Vec<CMatrix> = (0..pfa.alphabet.tilde_len())
        .map(|s| {
            let a = pad(pfa.ops.mat(s), 3);
            if s == 0 {
                let mut c = CMatrix::zeros(m, m);
                for j in 0..m {
                    c[(start, j)] = one();
                }
                for i in 0..n {
                    c[(i, start)] = a[(i, start)] * half;
                }
                c[(n + 2, start)] = half;
                c
            } else if s == dollar {
                funnel(pfa, &[(n + 2, -half)], 3) * a
            } else {
                a
            }
        })
        .collect();
    let emb: EmbeddingResult = extend_to_unitary_i(&mats, 1e-9)?;
    let ops = mats
        .iter()
        .enumerate()
        .map(|(s, a)| complete_from_stack(&emb.stacked(a, s)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut names = numbered("r", 0..n);
    names.extend(["acc".to_string(), "rej".to_string(), "aux".to_string()]);
    names.extend(numbered("b", 0..m));
    let mut roster = Roster::new(names, start);
    roster.roles[n] = Role::Accept;
    roster.roles[n + 1] = Role::Reject;
    for k in 0..m {
        roster.roles[m + k] = Role::Reject;
    }
    Ok(KwqfaSpec { alphabet: pfa.alphabet.clone(), roster, ops: OpTable::single(ops) })
}

/// `Σ_k E_k ⊗ conj(E_k)`, acting on row-major vectorized density matrices.
pub fn linearize(elems: &[CMatrix]) -> CMatrix {
    let n = elems[0].nrows();
    let mut out = CMatrix::zeros(n * n, n * n);
    for e in elems {
        out += tensor(e, &e.map(|z| z.conj()));
    }
    out
}

/// Real generalized automaton with `2n²` states computing the same acceptance value.
pub fn qfa_to_gfa(qfa: &QfaSpec) -> Result<GfaSpec, ConstructionError> {
    let n = qfa.roster.len();
    let lin: Vec<CMatrix> = qfa.ops.ops.iter().map(|e| linearize(e)).collect();
    let mut rho0 = CMatrix::zeros(n, n);
    rho0[(qfa.roster.start, qfa.roster.start)] = one();
    let v = &lin[0] * vec_map(&rho0).map_err(crate::machines::MachineError::from)?;
    let mut pa = CMatrix::zeros(n, n);
    for q in qfa.roster.with_role(Role::Accept) {
        pa[(q, q)] = one();
    }
    let f = vec_map(&pa).map_err(crate::machines::MachineError::from)?.transpose() * &lin[qfa.alphabet.dollar()];
    let v0 = complex_to_real_block(&CMatrix::from_column_slice(n * n, 1, v.as_slice())).column(0).into_owned();
    let f = complex_to_real_block(&CMatrix::from_row_slice(1, n * n, f.as_slice())).row(0).transpose();
    let mats = (1..=qfa.alphabet.len()).map(|s| complex_to_real_block(&lin[s])).collect();
    let names = (0..n * n)
        .flat_map(|k| {
            let (i, j) = (k / n, k % n);
            let (a, b) = (&qfa.roster.names[i], &qfa.roster.names[j]);
            [format!("{a}.{b}.re"), format!("{a}.{b}.im")]
        })
        .collect();
    Ok(GfaSpec { alphabet: qfa.alphabet.clone(), names, mats, v0, f })
}
