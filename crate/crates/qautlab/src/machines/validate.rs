use std::collections::BTreeMap;
use std::fmt;

use super::{
    Alphabet, CounterKind, CounterSpec, Direction, MachineError, MachineSpec, Measure, OpTable, PostInner,
    RestartInner, RestartSpec, Role, Roster, StorageAction, WomSpec,
};
use crate::numerics::{gram_sum, identity, CMatrix, Tolerance, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationClass {
    Structure,
    Stochastic,
    Unitary,
    Superoperator,
    Counter,
    /// A (state, symbol) amplitude vector is not unit length.
    UnitNorm,
    /// Amplitude vectors of distinct source states overlap.
    Orthogonality,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub class: ViolationClass,
    pub location: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}: {}", self.class, self.location, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn of_class(&self, class: ViolationClass) -> Vec<&Violation> {
        self.violations.iter().filter(|v| v.class == class).collect()
    }

    fn push(&mut self, class: ViolationClass, location: String, detail: String) {
        self.violations.push(Violation { class, location, detail });
    }
}

pub fn validate(spec: &MachineSpec, tol: Tolerance) -> ValidationReport {
    let mut rep = ValidationReport::default();
    match spec {
        MachineSpec::Pfa(p) => {
            check_roster(&p.roster, &mut rep);
            check_shapes(&p.alphabet, &p.roster, &p.ops, true, &mut rep);
            check_stochastic(&p.alphabet, &p.roster, &p.ops, tol, &mut rep);
        }
        MachineSpec::Gfa(g) => {
            let n = g.names.len();
            if g.mats.len() != g.alphabet.len() {
                rep.push(
                    ViolationClass::Structure,
                    "transitions".into(),
                    format!("{} matrices for {} letters", g.mats.len(), g.alphabet.len()),
                );
            }
            for (i, m) in g.mats.iter().enumerate() {
                if m.nrows() != n || m.ncols() != n {
                    rep.push(
                        ViolationClass::Structure,
                        format!("symbol {}", g.alphabet.symbols()[i]),
                        format!("{}x{} matrix, expected {n}x{n}", m.nrows(), m.ncols()),
                    );
                }
            }
            if g.v0.len() != n || g.f.len() != n {
                rep.push(ViolationClass::Structure, "initial/final".into(), "vector length mismatch".into());
            }
        }
        MachineSpec::Qfa(q) => {
            check_roster(&q.roster, &mut rep);
            check_shapes(&q.alphabet, &q.roster, &q.ops, false, &mut rep);
            check_superop(&q.alphabet, &q.roster, &q.ops, tol, &mut rep);
        }
        MachineSpec::Kwqfa(k) => {
            check_roster(&k.roster, &mut rep);
            check_shapes(&k.alphabet, &k.roster, &k.ops, true, &mut rep);
            check_unitary(&k.alphabet, &k.roster, &k.ops, tol, &mut rep);
            if k.roster.roles.get(k.roster.start).is_some_and(|r| r.is_halting()) {
                rep.push(ViolationClass::Structure, "start".into(), "start state is halting".into());
            }
            check_directions(&k.roster, &mut rep);
        }
        MachineSpec::Restart(r) => check_restart(r, tol, &mut rep),
        MachineSpec::Post(p) => match &p.inner {
            PostInner::Pfa(pfa) => {
                check_roster(&pfa.roster, &mut rep);
                check_shapes(&pfa.alphabet, &pfa.roster, &pfa.ops, true, &mut rep);
                check_stochastic(&pfa.alphabet, &pfa.roster, &pfa.ops, tol, &mut rep);
            }
            PostInner::Qfa(q) => {
                check_roster(&q.roster, &mut rep);
                check_shapes(&q.alphabet, &q.roster, &q.ops, false, &mut rep);
                check_superop(&q.alphabet, &q.roster, &q.ops, tol, &mut rep);
            }
        },
        MachineSpec::Counter(c) => check_counter(c, tol, &mut rep),
        MachineSpec::Wom(w) => check_wom(w, tol, &mut rep),
    }
    rep
}

fn check_roster(r: &Roster, rep: &mut ValidationReport) {
    if r.start >= r.len() {
        rep.push(ViolationClass::Structure, "start".into(), format!("index {} out of range", r.start));
    }
    if r.roles.len() != r.len() {
        rep.push(ViolationClass::Structure, "roles".into(), "one role per state required".into());
    }
    let mut seen = BTreeMap::new();
    for (i, n) in r.names.iter().enumerate() {
        if let Some(j) = seen.insert(n.as_str(), i) {
            rep.push(ViolationClass::Structure, format!("state {n}"), format!("declared twice ({j}, {i})"));
        }
    }
}

fn check_directions(r: &Roster, rep: &mut ValidationReport) {
    if let Some(d) = &r.directions {
        for (i, dir) in d.iter().enumerate() {
            if *dir == Direction::Left {
                rep.push(
                    ViolationClass::Structure,
                    format!("state {}", r.names[i]),
                    "one-way machines cannot move left".into(),
                );
            }
        }
    }
}

fn check_shapes(a: &Alphabet, r: &Roster, ops: &OpTable, single: bool, rep: &mut ValidationReport) {
    if ops.ops.len() != a.tilde_len() {
        rep.push(
            ViolationClass::Structure,
            "transitions".into(),
            format!("{} symbol tables for {} tape symbols", ops.ops.len(), a.tilde_len()),
        );
        return;
    }
    let n = r.len();
    for (s, elems) in ops.ops.iter().enumerate() {
        if elems.is_empty() || (single && elems.len() != 1) {
            rep.push(
                ViolationClass::Structure,
                format!("symbol {}", a.tilde_name(s)),
                format!("{} operation elements", elems.len()),
            );
        }
        for (k, m) in elems.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                rep.push(
                    ViolationClass::Structure,
                    format!("symbol {} element {k}", a.tilde_name(s)),
                    format!("{}x{} matrix, expected {n}x{n}", m.nrows(), m.ncols()),
                );
            }
        }
    }
}

fn shapes_ok(rep: &ValidationReport) -> bool {
    rep.of_class(ViolationClass::Structure).is_empty()
}

fn check_stochastic(a: &Alphabet, r: &Roster, ops: &OpTable, tol: Tolerance, rep: &mut ValidationReport) {
    if !shapes_ok(rep) {
        return;
    }
    for (s, elems) in ops.ops.iter().enumerate() {
        let m = &elems[0];
        for j in 0..m.ncols() {
            let mut sum = 0.0;
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if z.im.abs() > tol.eps() || z.re < -tol.eps() || z.re > 1.0 + tol.eps() {
                    rep.push(
                        ViolationClass::Stochastic,
                        format!("symbol {}, column {}, row {}", a.tilde_name(s), r.names[j], r.names[i]),
                        format!("entry {z} is not a probability"),
                    );
                }
                sum += z.re;
            }
            if (sum - 1.0).abs() > tol.eps() {
                rep.push(
                    ViolationClass::Stochastic,
                    format!("symbol {}, column {}", a.tilde_name(s), r.names[j]),
                    format!("column sums to {sum}"),
                );
            }
        }
    }
}

fn check_gram(
    a: &Alphabet,
    r: &Roster,
    s: usize,
    g: &CMatrix,
    class: ViolationClass,
    tol: Tolerance,
    rep: &mut ValidationReport,
) {
    let d = g - identity(g.nrows());
    for i in 0..d.nrows() {
        for j in i..d.ncols() {
            let e = d[(i, j)].norm();
            if e > tol.eps() {
                let loc = if i == j {
                    format!("symbol {}, column {}", a.tilde_name(s), r.names[i])
                } else {
                    format!("symbol {}, columns ({}, {})", a.tilde_name(s), r.names[i], r.names[j])
                };
                rep.push(class, loc, format!("deviation {e:.3e} from the identity"));
            }
        }
    }
}

fn check_unitary(a: &Alphabet, r: &Roster, ops: &OpTable, tol: Tolerance, rep: &mut ValidationReport) {
    if !shapes_ok(rep) {
        return;
    }
    for (s, elems) in ops.ops.iter().enumerate() {
        let u = &elems[0];
        check_gram(a, r, s, &(u.adjoint() * u), ViolationClass::Unitary, tol, rep);
    }
}

fn check_superop(a: &Alphabet, r: &Roster, ops: &OpTable, tol: Tolerance, rep: &mut ValidationReport) {
    if !shapes_ok(rep) {
        return;
    }
    for (s, elems) in ops.ops.iter().enumerate() {
        match gram_sum(elems) {
            Ok(g) => check_gram(a, r, s, &g, ViolationClass::Superoperator, tol, rep),
            Err(e) => rep.push(ViolationClass::Structure, format!("symbol {}", a.tilde_name(s)), e.to_string()),
        }
    }
}

fn check_restart(spec: &RestartSpec, tol: Tolerance, rep: &mut ValidationReport) {
    match &spec.inner {
        RestartInner::Pfa(p) => {
            check_roster(&p.roster, rep);
            check_shapes(&p.alphabet, &p.roster, &p.ops, true, rep);
            check_stochastic(&p.alphabet, &p.roster, &p.ops, tol, rep);
        }
        RestartInner::Kwqfa(k) => {
            check_roster(&k.roster, rep);
            check_shapes(&k.alphabet, &k.roster, &k.ops, true, rep);
            check_unitary(&k.alphabet, &k.roster, &k.ops, tol, rep);
            check_directions(&k.roster, rep);
        }
        RestartInner::Qfa(q) => {
            check_roster(&q.roster, rep);
            check_shapes(&q.alphabet, &q.roster, &q.ops, false, rep);
            check_superop(&q.alphabet, &q.roster, &q.ops, tol, rep);
            if spec.measure != Measure::End {
                rep.push(
                    ViolationClass::Structure,
                    "measure".into(),
                    "superoperator restart machines measure at the end only".into(),
                );
            }
        }
    }
    let roster = spec.roster();
    if roster.roles.get(roster.start).is_some_and(|r| r.is_halting()) && spec.measure == Measure::Step {
        rep.push(ViolationClass::Structure, "start".into(), "start state is halting".into());
    }
    for (&from, &to) in &spec.targets {
        if from >= roster.len() || to >= roster.len() {
            rep.push(ViolationClass::Structure, "restart_to".into(), "state index out of range".into());
        } else {
            if roster.roles[from] != Role::Restart {
                rep.push(
                    ViolationClass::Structure,
                    format!("restart_to {}", roster.names[from]),
                    "source is not a restart state".into(),
                );
            }
            if roster.roles[to].is_halting() && spec.measure == Measure::Step {
                rep.push(
                    ViolationClass::Structure,
                    format!("restart_to {}", roster.names[from]),
                    "target is a halting state".into(),
                );
            }
        }
    }
}

fn sym_in_range(a: &Alphabet, s: usize) -> bool {
    s < a.tilde_len()
}

fn check_counter(c: &CounterSpec, tol: Tolerance, rep: &mut ValidationReport) {
    check_roster(&c.roster, rep);
    let a = &c.alphabet;
    let r = &c.roster;
    for (i, row) in c.rows.iter().enumerate() {
        let loc = format!("row {i}");
        if row.src >= r.len() || row.dst >= r.len() || !sym_in_range(a, row.sym) {
            rep.push(ViolationClass::Structure, loc, "index out of range".into());
            continue;
        }
        if row.incs.len() != c.counters {
            rep.push(
                ViolationClass::Counter,
                loc.clone(),
                format!("{} increments for {} counters", row.incs.len(), c.counters),
            );
        }
        if row.incs.iter().any(|v| v.abs() > c.max_inc) {
            rep.push(ViolationClass::Counter, loc.clone(), format!("increment beyond ±{}", c.max_inc));
        }
        if c.kind.blind() && row.guard.is_some() {
            rep.push(ViolationClass::Counter, loc.clone(), "blind counters cannot be read".into());
        }
        if row.reg >= c.registers.len().max(1) {
            rep.push(ViolationClass::Structure, loc, "register symbol out of range".into());
        }
    }
    if c.kind == CounterKind::OneReversal && c.counters != 1 {
        rep.push(ViolationClass::Counter, "counters".into(), "one-reversal machines have one counter".into());
    }
    // group rows by (src, sym, guard)
    let mut groups: BTreeMap<(usize, usize, Option<bool>), Vec<usize>> = BTreeMap::new();
    for (i, row) in c.rows.iter().enumerate() {
        groups.entry((row.src, row.sym, row.guard)).or_default().push(i);
    }
    for (&(src, sym, guard), idx) in &groups {
        if src >= r.len() || !sym_in_range(a, sym) {
            continue;
        }
        let loc = format!(
            "state {}, symbol {}{}",
            r.names[src],
            a.tilde_name(sym),
            match guard {
                Some(true) => ", counter zero",
                Some(false) => ", counter nonzero",
                None => "",
            }
        );
        match c.kind {
            CounterKind::Deterministic | CounterKind::OneReversal => {
                if idx.len() != 1 {
                    rep.push(ViolationClass::Counter, loc, format!("{} rows for a deterministic move", idx.len()));
                } else if (c.rows[idx[0]].amp - C64::new(1.0, 0.0)).norm() > tol.eps() {
                    rep.push(ViolationClass::Counter, loc, "deterministic row weight must be 1".into());
                }
            }
            CounterKind::Probabilistic => {
                let mut sum = 0.0;
                for &i in idx {
                    let z = c.rows[i].amp;
                    if z.im.abs() > tol.eps() || z.re < -tol.eps() {
                        rep.push(ViolationClass::Stochastic, loc.clone(), format!("weight {z} is not a probability"));
                    }
                    sum += z.re;
                }
                if (sum - 1.0).abs() > tol.eps() {
                    rep.push(ViolationClass::Stochastic, loc, format!("weights sum to {sum}"));
                }
            }
            CounterKind::Quantum => {
                let norm: f64 = idx.iter().map(|&i| c.rows[i].amp.norm_sqr()).sum();
                if (norm - 1.0).abs() > tol.eps() {
                    rep.push(ViolationClass::UnitNorm, loc, format!("squared norm {norm}"));
                }
            }
        }
    }
    if c.kind == CounterKind::Quantum {
        let keyed: Vec<(usize, usize, (usize, Vec<i64>, usize), C64)> =
            c.rows.iter().map(|r| (r.sym, r.src, (r.dst, r.incs.clone(), r.reg), r.amp)).collect();
        check_orthogonality(a, r, keyed, tol, rep);
    }
}

/// Pairwise orthogonality of per-source amplitude vectors, symbol by symbol.
fn check_orthogonality<K: Ord + Clone>(
    a: &Alphabet,
    r: &Roster,
    rows: Vec<(usize, usize, K, C64)>,
    tol: Tolerance,
    rep: &mut ValidationReport,
) {
    let mut by_sym: BTreeMap<usize, BTreeMap<usize, BTreeMap<K, C64>>> = BTreeMap::new();
    for (sym, src, key, amp) in rows {
        *by_sym.entry(sym).or_default().entry(src).or_default().entry(key).or_insert(C64::new(0.0, 0.0)) += amp;
    }
    for (sym, srcs) in &by_sym {
        let list: Vec<_> = srcs.iter().collect();
        for x in 0..list.len() {
            for y in x + 1..list.len() {
                let (p, vp) = list[x];
                let (q, vq) = list[y];
                let mut ip = C64::new(0.0, 0.0);
                for (k, a1) in vp.iter() {
                    if let Some(a2) = vq.get(k) {
                        ip += a1.conj() * a2;
                    }
                }
                if ip.norm() > tol.eps() {
                    rep.push(
                        ViolationClass::Orthogonality,
                        format!("symbol {}, states ({}, {})", a.tilde_name(*sym), r.names[*p], r.names[*q]),
                        format!("inner product {:.3e}", ip.norm()),
                    );
                }
            }
        }
    }
}

fn check_wom(w: &WomSpec, tol: Tolerance, rep: &mut ValidationReport) {
    check_roster(&w.roster, rep);
    let a = &w.alphabet;
    let r = &w.roster;
    let mut norms: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut seen = BTreeMap::new();
    for (i, row) in w.rows.iter().enumerate() {
        let loc = format!("row {i}");
        if row.src >= r.len() || row.dst >= r.len() || !sym_in_range(a, row.sym) || row.reg >= w.registers.len() {
            rep.push(ViolationClass::Structure, loc, "index out of range".into());
            continue;
        }
        let action_ok = match (w.variant, row.action) {
            (super::WomVariant::Ioc { max_inc }, StorageAction::Inc(k)) => (0..=max_inc).contains(&k),
            (super::WomVariant::Pos, StorageAction::Push(g)) => g.is_none_or(|g| g > 0 && g < w.tape.len()),
            (super::WomVariant::Wom, StorageAction::Write(g, _)) => g.is_none_or(|g| g > 0 && g < w.tape.len()),
            _ => false,
        };
        if !action_ok {
            rep.push(ViolationClass::Structure, loc, format!("storage action {:?} not allowed", row.action));
        }
        if seen.insert((row.src, row.sym, row.dst, row.action, row.reg), i).is_some() {
            rep.push(ViolationClass::Structure, format!("row {i}"), "duplicate transition row".into());
        }
        *norms.entry((row.src, row.sym)).or_insert(0.0) += row.amp.norm_sqr();
    }
    for q in 0..r.len() {
        for s in 1..a.tilde_len() {
            check_norm(a, r, q, s, norms.get(&(q, s)).copied().unwrap_or(0.0), tol, rep);
        }
    }
    if r.start < r.len() {
        check_norm(a, r, r.start, 0, norms.get(&(r.start, 0)).copied().unwrap_or(0.0), tol, rep);
    }
    let keyed: Vec<(usize, usize, (usize, StorageAction, usize), C64)> =
        w.rows.iter().map(|r| (r.sym, r.src, (r.dst, r.action, r.reg), r.amp)).collect();
    check_orthogonality(a, r, keyed, tol, rep);
}

fn check_norm(a: &Alphabet, r: &Roster, q: usize, s: usize, norm: f64, tol: Tolerance, rep: &mut ValidationReport) {
    if (norm - 1.0).abs() > tol.eps() {
        rep.push(
            ViolationClass::UnitNorm,
            format!("state {}, symbol {}", r.names[q], a.tilde_name(s)),
            format!("squared norm {norm}"),
        );
    }
}

/// Elements of the composed operator for a tape-symbol word; the empty word gives {I}.
pub fn compose_operator(ops: &OpTable, word: &[usize]) -> Result<Vec<CMatrix>, MachineError> {
    let n = ops.dim();
    let mut acc = vec![identity(n)];
    for &s in word {
        let elems = ops.ops.get(s).ok_or_else(|| MachineError::UnknownSymbol(format!("#{s}")))?;
        let mut next = Vec::with_capacity(acc.len() * elems.len());
        for prev in &acc {
            for e in elems {
                next.push(e * prev);
            }
        }
        acc = next;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{KwqfaSpec, PfaSpec, QfaSpec};
    use crate::numerics::{c, is_superoperator};

    fn pfa() -> PfaSpec {
        let a = Alphabet::from_chars("a").unwrap();
        let mut r = Roster::new(["p", "q"], 0);
        r.roles[1] = Role::Accept;
        let mut flip = crate::numerics::zeros(2, 2);
        flip[(1, 0)] = c(1.0, 0.0);
        flip[(0, 1)] = c(1.0, 0.0);
        PfaSpec { alphabet: a, roster: r, ops: OpTable::single(vec![identity(2), flip, identity(2)]) }
    }

    #[test]
    fn pfa_column_sum_violation() {
        let mut p = pfa();
        assert!(validate(&MachineSpec::Pfa(p.clone()), Tolerance::default()).is_ok());
        p.ops.ops[1][0][(1, 0)] = c(0.9, 0.0);
        let rep = validate(&MachineSpec::Pfa(p), Tolerance::default());
        assert_eq!(rep.violations.len(), 1);
        assert!(rep.violations[0].location.contains("symbol a, column p"));
    }

    #[test]
    fn perturbed_unitary_is_flagged() {
        let p = pfa();
        let mut k = KwqfaSpec { alphabet: p.alphabet, roster: p.roster, ops: p.ops };
        assert!(validate(&MachineSpec::Kwqfa(k.clone()), Tolerance::default()).is_ok());
        k.ops.ops[1][0][(1, 0)] += c(1e-3, 0.0);
        assert!(!validate(&MachineSpec::Kwqfa(k), Tolerance::default()).is_ok());
    }

    #[test]
    fn composition_counts_elements() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = pfa();
        let flip = p.ops.ops[1][0].clone();
        let ops = OpTable {
            ops: vec![vec![identity(2)], vec![identity(2) * c(h, 0.0), flip * c(h, 0.0)], vec![identity(2)]],
            exprs: Default::default(),
        };
        let q = QfaSpec { alphabet: p.alphabet, roster: p.roster, ops };
        assert_eq!(compose_operator(&q.ops, &[]).unwrap(), vec![identity(2)]);
        assert_eq!(compose_operator(&q.ops, &[1]).unwrap(), q.ops.ops[1]);
        let two = compose_operator(&q.ops, &[1, 1]).unwrap();
        assert_eq!(two.len(), 4);
        assert!(is_superoperator(&two, Tolerance::default()).unwrap());
    }
}
