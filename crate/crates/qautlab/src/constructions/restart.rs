use std::collections::BTreeMap;

use super::linear::linearize;
use super::templates::{extend_to_unitary_i, extend_to_unitary_ii};
use super::{complete_from_stack, fresh_name, ConstructionError};
use crate::machines::{
    complete_unitary, KwqfaSpec, Measure, OpTable, PfaSpec, PostInner, PostSpec, QfaSpec, RestartInner, RestartSpec,
    Role, Roster,
};
use crate::numerics::{CMatrix, C64};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Adds accumulator rows `n`, `n+1` collecting accept and reject mass at the right end-marker.
fn with_accumulators(a: &[CMatrix], dollar: usize, accept: &[usize], reject: &[usize]) -> Vec<CMatrix> {
    let n = a[0].ncols();
    a.iter()
        .enumerate()
        .map(|(s, m)| {
            let mut p = CMatrix::zeros(n + 2, n + 2);
            p.view_mut((0, 0), (n, n)).copy_from(m);
            p[(n, n)] = one();
            p[(n + 1, n + 1)] = one();
            if s == dollar {
                let mut t = CMatrix::zeros(n + 2, n + 2);
                t[(n, n)] = one();
                t[(n + 1, n + 1)] = one();
                for &q in accept {
                    t[(n, q)] = one();
                }
                for &q in reject {
                    t[(n + 1, q)] = one();
                }
                t * p
            } else {
                p
            }
        })
        .collect()
}

/// Restart machine over a PFA becomes one over a realtime KWQFA with `2n+4` states.
/// Round probabilities are squared and scaled by `(1/l)^{2|w̃|}` with `l = 2n+5`.
pub fn pfa_restart_to_qfa_restart(spec: &RestartSpec) -> Result<RestartSpec, ConstructionError> {
    let RestartInner::Pfa(pfa) = &spec.inner else {
        return Err(ConstructionError::Form("inner machine must be a PFA".into()));
    };
    if !spec.targets.is_empty() {
        return Err(ConstructionError::Form("restart targets other than the start state".into()));
    }
    let n = pfa.roster.len();
    let accept = pfa.roster.with_role(Role::Accept);
    let reject = pfa.roster.with_role(Role::Reject);
    let restart = pfa.roster.with_role(Role::Restart);
    let base: Vec<CMatrix> = pfa
        .ops
        .ops
        .iter()
        .map(|e| {
            let mut m = e[0].clone();
            if spec.measure == Measure::Step {
                // halting is postponed: accept and reject states hold their mass, restart mass is dropped
                for &q in accept.iter().chain(&reject) {
                    m.column_mut(q).fill(C64::new(0.0, 0.0));
                    m[(q, q)] = one();
                }
                for &q in &restart {
                    m.column_mut(q).fill(C64::new(0.0, 0.0));
                }
            }
            m
        })
        .collect();
    let mats = with_accumulators(&base, pfa.alphabet.dollar(), &accept, &reject);
    let emb = extend_to_unitary_i(&mats, 1e-9)?;
    let ops = mats
        .iter()
        .enumerate()
        .map(|(s, a)| complete_from_stack(&emb.stacked(a, s)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut names = pfa.roster.names.clone();
    let qa = fresh_name(&names, "qa");
    names.push(qa);
    let qr = fresh_name(&names, "qr");
    names.push(qr);
    for i in 0..n + 2 {
        let b = fresh_name(&names, &format!("b{}", i + 1));
        names.push(b);
    }
    let mut roster = Roster::new(names, pfa.roster.start);
    roster.roles[n] = Role::Accept;
    roster.roles[n + 1] = Role::Reject;
    for q in n + 2..2 * n + 4 {
        roster.roles[q] = Role::Restart;
    }
    let kw = KwqfaSpec { alphabet: pfa.alphabet.clone(), roster, ops: OpTable::single(ops) };
    Ok(RestartSpec::new(RestartInner::Kwqfa(kw)))
}

/// Error bound after squaring the round probabilities: `ε²/(1−2ε+2ε²)`.
pub fn squared_error_bound(eps: f64) -> f64 {
    eps * eps / (1.0 - 2.0 * eps + 2.0 * eps * eps)
}

/// Restart machine over a general QFA becomes one over a realtime KWQFA with `3n²+6` states.
pub fn gqfa_restart_to_kwqfa_restart(spec: &RestartSpec) -> Result<RestartSpec, ConstructionError> {
    let RestartInner::Qfa(qfa) = &spec.inner else {
        return Err(ConstructionError::Form("inner machine must be a QFA".into()));
    };
    if !spec.targets.is_empty() {
        return Err(ConstructionError::Form("restart targets other than the start state".into()));
    }
    let n = qfa.roster.len();
    let diag = |q: usize| q * n + q;
    let accept: Vec<usize> = qfa.roster.with_role(Role::Accept).into_iter().map(diag).collect();
    let reject: Vec<usize> = qfa.roster.with_role(Role::Reject).into_iter().map(diag).collect();
    let lin: Vec<CMatrix> = qfa.ops.ops.iter().map(|e| linearize(e)).collect();
    let mats = with_accumulators(&lin, qfa.alphabet.dollar(), &accept, &reject);
    let emb = extend_to_unitary_ii(&mats);
    let ops = mats
        .iter()
        .enumerate()
        .map(|(s, a)| complete_from_stack(&emb.stacked(a, s)))
        .collect::<Result<Vec<_>, _>>()?;
    let m = n * n + 2;
    let mut names: Vec<String> = (0..n * n)
        .map(|k| format!("{}.{}", qfa.roster.names[k / n], qfa.roster.names[k % n]))
        .collect();
    names.push("acc".into());
    names.push("rej".into());
    names.extend((0..m).map(|i| format!("b{}", i + 1)));
    names.extend((0..m).map(|i| format!("c{}", i + 1)));
    let mut roster = Roster::new(names, diag(qfa.roster.start));
    roster.roles[n * n] = Role::Accept;
    roster.roles[n * n + 1] = Role::Reject;
    for q in m..3 * m {
        roster.roles[q] = Role::Restart;
    }
    let kw = KwqfaSpec { alphabet: qfa.alphabet.clone(), roster, ops: OpTable::single(ops) };
    Ok(RestartSpec::new(RestartInner::Kwqfa(kw)))
}

/// How the second path of [`kwqfa_to_restart`] spends its rejection weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapMode {
    /// Shrinks by `1/√c` per letter and rejects with amplitude `√(ε·scale)` at the right end-marker;
    /// suited to gaps of at least `scale·c^{-|w|}`.
    Exponential { scale: f64 },
    /// Rejects with probability `ε/(2c)` on the left end-marker; suited to gaps of at least `1/c`.
    Constant,
}

/// Turns a one-sided realtime KWQFA into a restart machine with three more states.
/// Reject states of the input become restart states.
pub fn kwqfa_to_restart(kw: &KwqfaSpec, eps: f64, c: f64, mode: GapMode) -> Result<RestartSpec, ConstructionError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(ConstructionError::Parameter(format!("eps = {eps} is outside (0, 1/2)")));
    }
    if !(c > 1.0) {
        return Err(ConstructionError::Parameter(format!("c = {c} must exceed 1")));
    }
    if let GapMode::Exponential { scale } = mode {
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(ConstructionError::Parameter(format!("scale = {scale} is outside (0, 1]")));
        }
    }
    if kw.one_way() {
        return Err(ConstructionError::Form("input must be a realtime KWQFA".into()));
    }
    let n = kw.roster.len();
    let mut names = kw.roster.names.clone();
    for base in ["t", "S'", "R'"] {
        let name = fresh_name(&names, base);
        names.push(name);
    }
    let (t, s_, r_) = (n, n + 1, n + 2);
    let mut roster = Roster::new(names, kw.roster.start);
    for q in 0..n {
        roster.roles[q] = match kw.roster.roles[q] {
            Role::Reject => Role::Restart,
            r => r,
        };
    }
    roster.roles[s_] = Role::Restart;
    roster.roles[r_] = Role::Reject;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let start = kw.roster.start;
    let dollar = kw.alphabet.dollar();
    let mut ops = Vec::new();
    for sym in 0..kw.alphabet.tilde_len() {
        let u = kw.ops.mat(sym);
        let mut m = CMatrix::zeros(n + 3, n + 3);
        m.view_mut((0, 0), (n, n)).copy_from(u);
        let mut specified = vec![true; n];
        specified.extend([false, false, false]);
        if sym == 0 {
            for i in 0..n {
                m[(i, start)] = u[(i, start)] * h;
            }
            match mode {
                GapMode::Exponential { .. } => m[(t, start)] = C64::new(h, 0.0),
                GapMode::Constant => {
                    m[(r_, start)] = C64::new((eps / (2.0 * c)).sqrt(), 0.0);
                    m[(s_, start)] = C64::new(((1.0 - eps / c) / 2.0).sqrt(), 0.0);
                }
            }
        }
        if let GapMode::Exponential { scale } = mode {
            if sym == dollar {
                let e = eps * scale;
                m[(r_, t)] = C64::new(e.sqrt(), 0.0);
                m[(s_, t)] = C64::new((1.0 - e).sqrt(), 0.0);
                specified[t] = true;
            } else if sym != 0 {
                m[(t, t)] = C64::new(1.0 / c.sqrt(), 0.0);
                m[(s_, t)] = C64::new((1.0 - 1.0 / c).sqrt(), 0.0);
                specified[t] = true;
            }
        }
        ops.push(complete_unitary(&m, &specified)?);
    }
    let kw2 = KwqfaSpec { alphabet: kw.alphabet.clone(), roster, ops: OpTable::single(ops) };
    Ok(RestartSpec::new(RestartInner::Kwqfa(kw2)))
}

fn swap_roles(r: &mut Roster, a: Role, b: Role) {
    for role in r.roles.iter_mut() {
        if *role == a {
            *role = b;
        } else if *role == b {
            *role = a;
        }
    }
}

/// Exchanges accepting and rejecting states.
pub fn swap_accept_reject(spec: &RestartSpec) -> RestartSpec {
    let mut out = spec.clone();
    let roster = match &mut out.inner {
        RestartInner::Pfa(p) => &mut p.roster,
        RestartInner::Kwqfa(k) => &mut k.roster,
        RestartInner::Qfa(q) => &mut q.roster,
    };
    swap_roles(roster, Role::Accept, Role::Reject);
    out
}

fn block_diag(blocks: usize, m: &CMatrix) -> CMatrix {
    let n = m.ncols();
    let mut out = CMatrix::zeros(blocks * n, blocks * n);
    for b in 0..blocks {
        out.view_mut((b * n, b * n), (n, n)).copy_from(m);
    }
    out
}

/// Grid of `(k+1)²` copies: cell (i, j) has seen i accepting and j rejecting rounds.
/// The combined machine accepts once `k+1` accepting rounds occur before `k+1` rejecting ones.
pub fn restart_to_reset_majority(spec: &RestartSpec, k: usize) -> Result<RestartSpec, ConstructionError> {
    if k == 0 {
        return Ok(spec.clone());
    }
    let roster = spec.roster();
    let n = roster.len();
    let side = k + 1;
    let cells = side * side;
    let cell = |i: usize, j: usize| i * side + j;
    let mut names = Vec::with_capacity(cells * n);
    let mut roles = Vec::with_capacity(cells * n);
    let mut targets = BTreeMap::new();
    for i in 0..side {
        for j in 0..side {
            let base = cell(i, j) * n;
            for q in 0..n {
                names.push(format!("{}@{i}.{j}", roster.names[q]));
                let (role, target) = match roster.roles[q] {
                    Role::Accept if i == k => (Role::Accept, None),
                    Role::Accept => (Role::Restart, Some(cell(i + 1, j) * n + roster.start)),
                    Role::Reject if j == k => (Role::Reject, None),
                    Role::Reject => (Role::Restart, Some(cell(i, j + 1) * n + roster.start)),
                    Role::Restart => (Role::Restart, Some(base + spec.target(q))),
                    r => (r, None),
                };
                roles.push(role);
                if let Some(t) = target {
                    if t != roster.start {
                        targets.insert(base + q, t);
                    }
                }
            }
        }
    }
    let mut grid = Roster::new(names, roster.start);
    grid.roles = roles;
    grid.directions = roster.directions.as_ref().map(|d| d.iter().cycle().take(cells * n).copied().collect());
    let expand = |ops: &OpTable| OpTable {
        ops: ops.ops.iter().map(|e| e.iter().map(|m| block_diag(cells, m)).collect()).collect(),
        exprs: BTreeMap::new(),
    };
    let inner = match &spec.inner {
        RestartInner::Pfa(p) => RestartInner::Pfa(PfaSpec { alphabet: p.alphabet.clone(), roster: grid, ops: expand(&p.ops) }),
        RestartInner::Kwqfa(p) => {
            RestartInner::Kwqfa(KwqfaSpec { alphabet: p.alphabet.clone(), roster: grid, ops: expand(&p.ops) })
        }
        RestartInner::Qfa(p) => RestartInner::Qfa(QfaSpec { alphabet: p.alphabet.clone(), roster: grid, ops: expand(&p.ops) }),
    };
    Ok(RestartSpec { inner, measure: spec.measure, targets })
}

/// Reads a restart machine as a postselection machine: accept and reject states become the
/// postselected sets and every other outcome is discarded.
pub fn restart_to_post(spec: &RestartSpec) -> Result<PostSpec, ConstructionError> {
    if !spec.targets.is_empty() {
        return Err(ConstructionError::Form("restart targets other than the start state".into()));
    }
    let relabel = |r: &Roster| {
        let mut r = r.clone();
        for role in r.roles.iter_mut() {
            *role = match *role {
                Role::Accept => Role::PostAccept,
                Role::Reject => Role::PostReject,
                _ => Role::Nonhalting,
            };
        }
        r
    };
    let inner = match &spec.inner {
        RestartInner::Pfa(p) => {
            let mut ops = p.ops.clone();
            if spec.measure == Measure::Step {
                // halting states hold their mass until the end
                let halting = (0..p.roster.len()).filter(|&q| p.roster.roles[q].is_halting());
                for q in halting {
                    for e in ops.ops.iter_mut() {
                        e[0].column_mut(q).fill(C64::new(0.0, 0.0));
                        e[0][(q, q)] = one();
                    }
                }
                ops.exprs.retain(|key, _| !p.roster.roles[key.col].is_halting());
            }
            PostInner::Pfa(PfaSpec { alphabet: p.alphabet.clone(), roster: relabel(&p.roster), ops })
        }
        RestartInner::Qfa(q) => PostInner::Qfa(QfaSpec { alphabet: q.alphabet.clone(), roster: relabel(&q.roster), ops: q.ops.clone() }),
        RestartInner::Kwqfa(_) => {
            return Err(ConstructionError::Form("KWQFA rounds have no postselection reading".into()));
        }
    };
    Ok(PostSpec { inner, latvian: None })
}

/// Reads a postselection machine as a restart machine observed once at the right end-marker.
pub fn post_to_restart(spec: &PostSpec) -> RestartSpec {
    let relabel = |r: &Roster| {
        let mut r = r.clone();
        for role in r.roles.iter_mut() {
            *role = match *role {
                Role::PostAccept => Role::Accept,
                Role::PostReject => Role::Reject,
                _ => Role::Restart,
            };
        }
        r
    };
    let inner = match &spec.inner {
        PostInner::Pfa(p) => RestartInner::Pfa(PfaSpec { alphabet: p.alphabet.clone(), roster: relabel(&p.roster), ops: p.ops.clone() }),
        PostInner::Qfa(q) => RestartInner::Qfa(QfaSpec { alphabet: q.alphabet.clone(), roster: relabel(&q.roster), ops: q.ops.clone() }),
    };
    RestartSpec { inner, measure: Measure::End, targets: BTreeMap::new() }
}
