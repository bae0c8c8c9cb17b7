use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use super::ConstructionError;
use crate::machines::{
    CounterKind, CounterRow, CounterSpec, Role, Roster, StorageAction, WomRow, WomSpec, WomVariant,
};
use crate::numerics::C64;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

struct Registers(Vec<String>);

impl Registers {
    fn get(&mut self, name: String) -> usize {
        match self.0.iter().position(|r| *r == name) {
            Some(i) => i,
            None => {
                self.0.push(name);
                self.0.len() - 1
            }
        }
    }
}

/// One transition of a single blind counter machine, with the register name it will write.
struct PathRow {
    src: usize,
    sym: usize,
    dst: usize,
    inc: i64,
    reg: String,
    amp: C64,
}

fn one_blind_counter(d: &CounterSpec, kind: CounterKind) -> Result<(), ConstructionError> {
    if d.kind != kind {
        return Err(ConstructionError::Form(format!("expected a {} counter machine", kind.name())));
    }
    if d.counters != 1 {
        return Err(ConstructionError::Form(format!("{} counters, expected one", d.counters)));
    }
    if d.rows.iter().any(|r| r.incs[0].abs() > 1) {
        return Err(ConstructionError::Form("counter increments must lie in {-1, 0, 1}".into()));
    }
    Ok(())
}

/// `m` parallel paths; path `j` adds `j` per increment and `m−j+1` per decrement, and a
/// Fourier transform over the paths on entering an accepting state at the right end-marker.
fn ioc_paths(d: &CounterSpec, rows: Vec<PathRow>, m: usize) -> WomSpec {
    let n = d.roster.len();
    let dollar = d.alphabet.dollar();
    let state = |j: usize, q: usize| (j - 1) * n + q;
    let mut names = Vec::with_capacity(m * n);
    let mut roster_roles = Vec::with_capacity(m * n);
    for j in 1..=m {
        for q in 0..n {
            names.push(format!("p{j}.{}", d.roster.names[q]));
            let acc = j == m && d.roster.roles[q] == Role::Accept;
            roster_roles.push(if acc { Role::Accept } else { Role::Nonhalting });
        }
    }
    let mut roster = Roster::new(names, state(1, d.roster.start));
    roster.roles = roster_roles;
    let mut regs = Registers(Vec::new());
    let mut out = Vec::new();
    let split = real(1.0 / (m as f64).sqrt());
    let path_inc = |j: usize, c: i64| match c {
        1 => j as i64,
        -1 => (m - j + 1) as i64,
        _ => 0,
    };
    for r in rows {
        let reg = regs.get(r.reg.clone());
        if r.sym == 0 {
            if r.src != d.roster.start {
                continue;
            }
            for j in 1..=m {
                out.push(WomRow {
                    src: state(1, r.src),
                    sym: 0,
                    dst: state(j, r.dst),
                    action: StorageAction::Inc(path_inc(j, r.inc)),
                    reg,
                    amp: r.amp * split,
                    expr: None,
                });
            }
            continue;
        }
        let fourier = r.sym == dollar && d.roster.roles[r.dst] == Role::Accept;
        for j in 1..=m {
            let action = StorageAction::Inc(path_inc(j, r.inc));
            if fourier {
                for l in 1..=m {
                    let phase = 2.0 * PI * ((j * l) % m) as f64 / m as f64;
                    out.push(WomRow {
                        src: state(j, r.src),
                        sym: r.sym,
                        dst: state(l, r.dst),
                        action,
                        reg,
                        amp: r.amp * split * C64::from_polar(1.0, phase),
                        expr: None,
                    });
                }
            } else {
                out.push(WomRow {
                    src: state(j, r.src),
                    sym: r.sym,
                    dst: state(j, r.dst),
                    action,
                    reg,
                    amp: r.amp,
                    expr: None,
                });
            }
        }
    }
    let mut spec = WomSpec {
        variant: WomVariant::Ioc { max_inc: m as i64 },
        alphabet: d.alphabet.clone(),
        roster,
        tape: vec!["#".into()],
        registers: regs.0,
        rows: out,
    };
    spec.fill_missing();
    spec
}

/// Deterministic one-blind-counter machine to a QFA with an increment-only counter.
/// Members are accepted with probability 1; words that end in an accepting state with a
/// nonzero counter are accepted with probability exactly `1/m`; all others are rejected.
pub fn d1bca_to_qfa_ioc(d: &CounterSpec, m: usize) -> Result<WomSpec, ConstructionError> {
    one_blind_counter(d, CounterKind::Deterministic)?;
    if m < 2 {
        return Err(ConstructionError::Parameter(format!("m = {m} must be at least 2")));
    }
    let rows = d
        .rows
        .iter()
        .map(|r| PathRow {
            src: r.src,
            sym: r.sym,
            dst: r.dst,
            inc: r.incs[0],
            reg: format!("w.{}", d.roster.names[r.src]),
            amp: real(1.0),
        })
        .collect();
    Ok(ioc_paths(d, rows, m))
}

/// Quantum one-blind-counter machine to a QFA with an increment-only counter.
/// In the returned pair, the second entry is the error bound `ε + (1−ε)/m` for an input of error `eps`.
pub fn q1bca_to_qfa_ioc(q: &CounterSpec, m: usize, eps: f64) -> Result<(WomSpec, f64), ConstructionError> {
    if q.kind == CounterKind::Deterministic {
        return Ok((d1bca_to_qfa_ioc(q, m)?, eps + (1.0 - eps) / m as f64));
    }
    one_blind_counter(q, CounterKind::Quantum)?;
    if m < 2 {
        return Err(ConstructionError::Parameter(format!("m = {m} must be at least 2")));
    }
    let rows = q
        .rows
        .iter()
        .map(|r| {
            let base = q.registers.get(r.reg).map_or("w", String::as_str);
            PathRow { src: r.src, sym: r.sym, dst: r.dst, inc: r.incs[0], reg: format!("{base}.{}", r.incs[0]), amp: r.amp }
        })
        .collect();
    Ok((ioc_paths(q, rows, m), eps + (1.0 - eps) / m as f64))
}

/// Per-state counter update of a machine whose increment depends only on the target state.
fn target_updates(d: &CounterSpec) -> Result<Vec<i64>, ConstructionError> {
    let mut upd: Vec<Option<i64>> = vec![None; d.roster.len()];
    for r in d.rows.iter().filter(|r| r.sym > 0 && r.sym < d.alphabet.dollar()) {
        match upd[r.dst] {
            Some(v) if v != r.incs[0] => {
                return Err(ConstructionError::Form(format!(
                    "state {} is entered with different counter updates",
                    d.roster.names[r.dst]
                )));
            }
            _ => upd[r.dst] = Some(r.incs[0]),
        }
    }
    Ok(upd.into_iter().map(|v| v.unwrap_or(0)).collect())
}

/// One-reversal deterministic one-counter machine to a QFA with an increment-only counter and cutpoint ½.
/// Four paths: two count increments and decrements separately, two are spawned at every step
/// where the counter may have returned to zero.
pub fn rev1_d1ca_to_qfa_ioc(d: &CounterSpec) -> Result<WomSpec, ConstructionError> {
    let form = |s: String| Err(ConstructionError::Form(s));
    if d.kind != CounterKind::OneReversal || d.counters != 1 {
        return form("expected a one-reversal machine with one counter".into());
    }
    let n = d.roster.len();
    let start = d.roster.start;
    let dc = target_updates(d)?;
    // Q2: everything reachable from a decrementing state
    let mut q2 = BTreeSet::new();
    let mut stack: Vec<usize> = (0..n).filter(|&q| dc[q] == -1).collect();
    while let Some(q) = stack.pop() {
        if q2.insert(q) {
            stack.extend(d.rows.iter().filter(|r| r.src == q).map(|r| r.dst));
        }
    }
    let cent: Vec<&CounterRow> = d.rows.iter().filter(|r| r.sym == 0 && r.src == start).collect();
    if cent.len() != 1 || cent[0].dst != start || cent[0].incs[0] != 0 {
        return form("the left end-marker must be a counter-neutral self-loop on the start state".into());
    }
    for r in d.rows.iter().filter(|r| r.sym > 0) {
        let name = &d.roster.names[r.src];
        if q2.contains(&r.src) {
            if dc[r.dst] == 1 {
                return form(format!("state {name} increments after the reversal"));
            }
        } else {
            if r.guard.is_some() {
                return form(format!("state {name} reads the counter before the reversal"));
            }
            if q2.contains(&r.dst) && dc[r.dst] != -1 {
                return form(format!("state {name} enters the decrementing phase without a decrement"));
            }
        }
    }
    if d.rows.iter().any(|r| r.sym == d.alphabet.dollar() && r.incs[0] != 0) {
        return form("the right end-marker must not change the counter".into());
    }
    let mut moves: BTreeMap<(usize, usize), (Option<(usize, i64)>, Option<usize>)> = BTreeMap::new();
    for r in d.rows.iter().filter(|r| r.sym > 0) {
        let e = moves.entry((r.src, r.sym)).or_default();
        // (nonzero move with its update, zero move)
        match r.guard {
            None => *e = (Some((r.dst, r.incs[0])), Some(r.dst)),
            Some(false) => e.0 = Some((r.dst, r.incs[0])),
            Some(true) => e.1 = Some(r.dst),
        }
    }
    for q in 0..n {
        for s in 1..d.alphabet.tilde_len() {
            match moves.get(&(q, s)) {
                Some((Some(_), Some(_))) => {}
                _ => {
                    return form(format!(
                        "state {} has no complete move on {}",
                        d.roster.names[q],
                        d.alphabet.tilde_name(s)
                    ))
                }
            }
        }
    }

    let state = |p: usize, q: usize| 1 + (p - 1) * n + q;
    let mut names = vec![super::fresh_name(&d.roster.names, "init")];
    let mut roles = vec![Role::Nonhalting];
    for p in 1..=4 {
        for q in 0..n {
            names.push(format!("p{p}.{}", d.roster.names[q]));
            let acc = d.roster.roles[q] == Role::Accept;
            roles.push(if (p < 4) == acc { Role::Accept } else { Role::Nonhalting });
        }
    }
    let mut roster = Roster::new(names, 0);
    roster.roles = roles;
    let mut regs = Registers(Vec::new());
    let mut rows = Vec::new();
    let mut push = |src, sym, dst, inc, reg, amp: f64| {
        rows.push(WomRow { src, sym, dst, action: StorageAction::Inc(inc), reg, amp: real(amp), expr: None });
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3f64.sqrt();
    let w0 = regs.get(format!("w.{}", d.roster.names[start]));
    push(0, 0, state(1, start), 0, w0, h);
    push(0, 0, state(2, start), 0, w0, h);
    for (&(i, s), &(nonzero, zero)) in &moves {
        let ((j, inc), zero) = (nonzero.unwrap(), zero.unwrap());
        let w = regs.get(format!("w.{}", d.roster.names[i]));
        let w_ = regs.get(format!("w'.{}", d.roster.names[i]));
        if !q2.contains(&i) && !q2.contains(&j) {
            push(state(1, i), s, state(1, j), inc, w, 1.0);
            push(state(2, i), s, state(2, j), 0, w, 1.0);
            continue;
        }
        let c2 = i64::from(inc == -1);
        push(state(1, i), s, state(1, j), 0, w, t);
        push(state(1, i), s, state(3, j), 0, w_, t);
        push(state(1, i), s, state(4, j), 0, w_, t);
        push(state(2, i), s, state(2, j), c2, w, t);
        push(state(2, i), s, state(3, j), c2, w_, t);
        push(state(2, i), s, state(4, j), c2, w_, -t);
        if q2.contains(&i) {
            push(state(3, i), s, state(3, zero), 0, w, 1.0);
            push(state(4, i), s, state(4, zero), 0, w, 1.0);
        }
    }
    let mut spec = WomSpec {
        variant: WomVariant::Ioc { max_inc: 1 },
        alphabet: d.alphabet.clone(),
        roster,
        tape: vec!["#".into()],
        registers: regs.0,
        rows,
    };
    spec.fill_missing();
    Ok(spec)
}

/// Number of random multipliers `R = 2^⌈k/ε⌉`.
pub fn freivalds_r(k: usize, eps: f64) -> Result<u64, ConstructionError> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(ConstructionError::Parameter(format!("eps = {eps} is outside (0, 1/2]")));
    }
    let bits = (k as f64 / eps - 1e-12).ceil();
    if bits > 30.0 {
        return Err(ConstructionError::Parameter(format!("k/eps = {} exceeds 30", k as f64 / eps)));
    }
    Ok(1u64 << bits.max(0.0) as u32)
}

/// Blind multi-counter machine to a probabilistic one-counter machine: a multiplier `r` is drawn
/// uniformly on the left end-marker and the move `(c_1..c_k)` adds `Σ c_i·r^i` to the single counter.
pub fn pkbca_to_p1bca(p: &CounterSpec, eps: f64) -> Result<CounterSpec, ConstructionError> {
    if !matches!(p.kind, CounterKind::Probabilistic | CounterKind::Deterministic) {
        return Err(ConstructionError::Form("expected a probabilistic blind counter machine".into()));
    }
    let k = p.counters;
    let big = freivalds_r(k, eps)?;
    let overflow = || ConstructionError::Parameter("counter increments overflow 64 bits".into());
    let combined = |incs: &[i64], r: u64| -> Result<i64, ConstructionError> {
        let mut total: i64 = 0;
        let mut pow: i64 = 1;
        for &c in incs {
            pow = pow.checked_mul(r as i64).ok_or_else(overflow)?;
            total = total.checked_add(c.checked_mul(pow).ok_or_else(overflow)?).ok_or_else(overflow)?;
        }
        Ok(total)
    };
    let n = p.roster.len();
    let rr = big as usize;
    let state = |q: usize, r: usize| q * rr + (r - 1);
    let mut names = Vec::with_capacity(n * rr);
    let mut roles = Vec::with_capacity(n * rr);
    for q in 0..n {
        for r in 1..=rr {
            names.push(format!("{}.{r}", p.roster.names[q]));
            roles.push(p.roster.roles[q]);
        }
    }
    let mut roster = Roster::new(names, state(p.roster.start, 1));
    roster.roles = roles;
    let mut rows = Vec::new();
    let mut max_inc = 0;
    for row in &p.rows {
        let cent = row.sym == 0;
        if cent && row.src != p.roster.start {
            continue;
        }
        for r in 1..=rr {
            let inc = combined(&row.incs, r as u64)?;
            max_inc = max_inc.max(inc.abs());
            let (src, amp) = if cent { (state(row.src, 1), row.amp / big as f64) } else { (state(row.src, r), row.amp) };
            rows.push(CounterRow {
                src,
                sym: row.sym,
                dst: state(row.dst, r),
                incs: vec![inc],
                guard: None,
                reg: row.reg,
                amp,
                expr: None,
            });
        }
    }
    Ok(CounterSpec {
        kind: CounterKind::Probabilistic,
        alphabet: p.alphabet.clone(),
        roster,
        counters: 1,
        max_inc,
        registers: p.registers.clone(),
        rows,
    })
}

/// Increment bound `m` to bound 1: the counter's residue mod `m` moves into the state.
pub fn ioc_m_to_ioc(spec: &WomSpec) -> Result<WomSpec, ConstructionError> {
    let WomVariant::Ioc { max_inc } = spec.variant else {
        return Err(ConstructionError::Form("expected an increment-only counter machine".into()));
    };
    if max_inc <= 1 {
        return Ok(spec.clone());
    }
    let m = max_inc as usize;
    let n = spec.roster.len();
    let state = |q: usize, j: usize| q * m + j;
    let mut names = Vec::with_capacity(n * m);
    let mut roles = Vec::with_capacity(n * m);
    for q in 0..n {
        for j in 0..m {
            names.push(format!("{}^{j}", spec.roster.names[q]));
            roles.push(spec.roster.roles[q]);
        }
    }
    let mut roster = Roster::new(names, state(spec.roster.start, 0));
    roster.roles = roles;
    let mut rows = Vec::with_capacity(spec.rows.len() * m);
    for row in &spec.rows {
        let StorageAction::Inc(i) = row.action else {
            return Err(ConstructionError::Form("row with a non-counter action".into()));
        };
        let i = i as usize;
        for j in 0..m {
            rows.push(WomRow {
                src: state(row.src, j),
                sym: row.sym,
                dst: state(row.dst, (j + i) % m),
                action: StorageAction::Inc(((j + i) / m) as i64),
                reg: row.reg,
                amp: row.amp,
                expr: None,
            });
        }
    }
    let mut out = WomSpec {
        variant: WomVariant::Ioc { max_inc: 1 },
        alphabet: spec.alphabet.clone(),
        roster,
        tape: spec.tape.clone(),
        registers: spec.registers.clone(),
        rows,
    };
    out.fill_missing();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplier_count() {
        assert_eq!(freivalds_r(2, 0.5).unwrap(), 16);
        assert_eq!(freivalds_r(1, 0.25).unwrap(), 16);
        assert!(freivalds_r(16, 0.5).is_err());
        assert!(freivalds_r(1, 0.0).is_err());
    }
}
