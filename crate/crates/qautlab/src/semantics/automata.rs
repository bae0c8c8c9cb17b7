use std::collections::BTreeMap;

use super::post::CompiledPost;
use super::restart::CompiledRestart;
use super::{check_word, RunOptions, RunReport, SemanticsError, Sparse};
use crate::machines::{
    Direction, GfaSpec, KwqfaSpec, MachineSpec, Measure, OpTable, PfaSpec, QfaSpec, Role, Roster,
};
use crate::numerics::{CMatrix, RVector, C64};

/// Where a state's mass goes when it is observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Class {
    Live,
    Halt(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Harvest {
    pub mass: Vec<f64>,
    pub residual: f64,
    pub steps: usize,
}

/// Linear evolution of a realtime or one-way machine.
#[derive(Debug, Clone)]
pub(crate) enum Engine {
    /// Probability vector.
    Pfa { n: usize, ops: Vec<Sparse> },
    /// Amplitude vector over states, or over (state, head) when directions are present.
    Kw { n: usize, ops: Vec<Sparse>, dirs: Option<Vec<Direction>> },
    /// Density matrix.
    Qfa { n: usize, ops: Vec<Vec<CMatrix>> },
}

fn sparse_ops(ops: &OpTable) -> Vec<Sparse> {
    ops.ops.iter().map(|e| Sparse::new(&e[0])).collect()
}

impl Engine {
    pub fn pfa(ops: &OpTable) -> Self {
        Engine::Pfa { n: ops.dim(), ops: sparse_ops(ops) }
    }

    pub fn kw(roster: &Roster, ops: &OpTable) -> Self {
        Engine::Kw { n: ops.dim(), ops: sparse_ops(ops), dirs: roster.directions.clone() }
    }

    pub fn qfa(ops: &OpTable) -> Self {
        Engine::Qfa { n: ops.dim(), ops: ops.ops.clone() }
    }

    /// Runs one pass over `tape` from `start`, moving observed mass into `slots` buckets.
    pub fn round(
        &self,
        start: usize,
        tape: &[usize],
        classes: &[Class],
        slots: usize,
        measure: Measure,
        cap: Option<usize>,
    ) -> Harvest {
        let mut mass = vec![0.0; slots];
        match self {
            Engine::Pfa { n, ops } => {
                let mut v = vec![C64::new(0.0, 0.0); *n];
                let mut w = v.clone();
                v[start] = C64::new(1.0, 0.0);
                for (t, &s) in tape.iter().enumerate() {
                    ops[s].apply(&v, &mut w);
                    std::mem::swap(&mut v, &mut w);
                    if measure == Measure::Step || t + 1 == tape.len() {
                        collect(&mut v, classes, &mut mass, |z| z.re);
                    }
                }
                let residual = v.iter().map(|z| z.re).sum();
                Harvest { mass, residual, steps: tape.len() }
            }
            Engine::Kw { n, ops, dirs: None } => {
                let mut v = vec![C64::new(0.0, 0.0); *n];
                let mut w = v.clone();
                v[start] = C64::new(1.0, 0.0);
                for (t, &s) in tape.iter().enumerate() {
                    ops[s].apply(&v, &mut w);
                    std::mem::swap(&mut v, &mut w);
                    if measure == Measure::Step || t + 1 == tape.len() {
                        collect(&mut v, classes, &mut mass, |z| z.norm_sqr());
                    }
                }
                let residual = v.iter().map(|z| z.norm_sqr()).sum();
                Harvest { mass, residual, steps: tape.len() }
            }
            Engine::Kw { n, ops, dirs: Some(dirs) } => {
                let (h, _) = one_way(*n, ops, dirs, start, tape, classes, slots, cap, false);
                h
            }
            Engine::Qfa { n, ops } => {
                let mut rho = CMatrix::zeros(*n, *n);
                rho[(start, start)] = C64::new(1.0, 0.0);
                for &s in tape {
                    rho = evolve(&ops[s], &rho);
                }
                for q in 0..*n {
                    if let Class::Halt(slot) = classes[q] {
                        mass[slot] += rho[(q, q)].re;
                    }
                }
                let residual = (0..*n).filter(|&q| classes[q] == Class::Live).map(|q| rho[(q, q)].re).sum();
                Harvest { mass, residual, steps: tape.len() }
            }
        }
    }
}

fn collect(v: &mut [C64], classes: &[Class], mass: &mut [f64], weight: impl Fn(&C64) -> f64) {
    for (q, z) in v.iter_mut().enumerate() {
        if let Class::Halt(slot) = classes[q] {
            mass[slot] += weight(z);
            *z = C64::new(0.0, 0.0);
        }
    }
}

fn evolve(elems: &[CMatrix], rho: &CMatrix) -> CMatrix {
    let n = rho.nrows();
    let mut out = CMatrix::zeros(n, n);
    for e in elems {
        out += e * rho * e.adjoint();
    }
    out
}

/// Pre-measurement amplitude on a halting configuration: net value and the sum of
/// magnitudes of its contributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaltTrace {
    pub step: usize,
    pub state: usize,
    pub pos: usize,
    pub net: C64,
    pub gross: f64,
}

#[allow(clippy::too_many_arguments)]
fn one_way(
    n: usize,
    ops: &[Sparse],
    dirs: &[Direction],
    start: usize,
    tape: &[usize],
    classes: &[Class],
    slots: usize,
    cap: Option<usize>,
    trace: bool,
) -> (Harvest, Vec<HaltTrace>) {
    let len = tape.len();
    let cap = cap.unwrap_or(4 * (len + 1));
    let size = (len + 1) * n;
    let mut v = vec![C64::new(0.0, 0.0); size];
    let mut w = v.clone();
    let mut gross = if trace { vec![0.0; size] } else { Vec::new() };
    let mut traces = Vec::new();
    v[start] = C64::new(1.0, 0.0);
    let mut mass = vec![0.0; slots];
    let mut residual = 0.0;
    let mut steps = 0;
    let mut live: Vec<usize> = vec![start];
    while !live.is_empty() && steps < cap {
        let mut touched = Vec::new();
        for &idx in &live {
            let amp = v[idx];
            v[idx] = C64::new(0.0, 0.0);
            let (q, p) = (idx % n, idx / n);
            for &(q2, b) in &ops[tape[p]].cols[q] {
                let p2 = (p as i64 + dirs[q2].delta()).max(0) as usize;
                let j = p2 * n + q2;
                if w[j] == C64::new(0.0, 0.0) {
                    touched.push(j);
                }
                w[j] += b * amp;
                if trace {
                    if gross[j] == 0.0 {
                        touched.push(j);
                    }
                    gross[j] += (b * amp).norm();
                }
            }
        }
        steps += 1;
        touched.sort_unstable();
        touched.dedup();
        live.clear();
        for j in touched {
            let z = w[j];
            w[j] = C64::new(0.0, 0.0);
            let (q, p) = (j % n, j / n);
            match classes[q] {
                Class::Halt(slot) => {
                    if trace {
                        traces.push(HaltTrace { step: steps, state: q, pos: p, net: z, gross: gross[j] });
                    }
                    mass[slot] += z.norm_sqr();
                }
                Class::Live if p >= len => residual += z.norm_sqr(),
                Class::Live => {
                    if z.norm_sqr() > 0.0 {
                        v[j] = z;
                        live.push(j);
                    }
                }
            }
            if trace {
                gross[j] = 0.0;
            }
        }
    }
    residual += live.iter().map(|&j| v[j].norm_sqr()).sum::<f64>();
    (Harvest { mass, residual, steps }, traces)
}

pub(crate) fn classes_for(roster: &Roster, map: impl Fn(Role) -> Class) -> Vec<Class> {
    roster.roles.iter().map(|&r| map(r)).collect()
}

fn accept_reject(r: Role) -> Class {
    match r {
        Role::Accept => Class::Halt(0),
        Role::Reject => Class::Halt(1),
        _ => Class::Live,
    }
}

fn accept_else(r: Role) -> Class {
    match r {
        Role::Accept => Class::Halt(0),
        _ => Class::Halt(1),
    }
}

/// Acceptance probability of a realtime PFA on ¢w$.
pub fn pfa_accept(spec: &PfaSpec, w: &[usize]) -> Result<f64, SemanticsError> {
    check_word(spec.alphabet.len(), w)?;
    let e = Engine::pfa(&spec.ops);
    let h = e.round(spec.roster.start, &spec.alphabet.tilde(w), &classes_for(&spec.roster, accept_else), 2, Measure::End, None);
    Ok(crate::numerics::clamp_prob(h.mass[0]))
}

/// f·A_{w_n}···A_{w_1}·v0 over letters only.
pub fn gfa_value(spec: &GfaSpec, w: &[usize]) -> Result<f64, SemanticsError> {
    check_word(spec.alphabet.len(), w)?;
    let mut v: RVector = spec.v0.clone();
    for &s in w {
        v = &spec.mats[s] * v;
    }
    Ok(spec.f.dot(&v))
}

/// Density matrix after reading a tape-symbol sequence from the start state.
pub fn qfa_density(spec: &QfaSpec, tape: &[usize]) -> Result<CMatrix, SemanticsError> {
    let n = spec.roster.len();
    let mut rho = CMatrix::zeros(n, n);
    rho[(spec.roster.start, spec.roster.start)] = C64::new(1.0, 0.0);
    for &s in tape {
        let elems = spec.ops.ops.get(s).ok_or(SemanticsError::ForeignSymbol(s))?;
        rho = evolve(elems, &rho);
    }
    Ok(rho)
}

/// tr(P_a ρ) after ¢w$.
pub fn qfa_accept(spec: &QfaSpec, w: &[usize]) -> Result<f64, SemanticsError> {
    check_word(spec.alphabet.len(), w)?;
    let rho = qfa_density(spec, &spec.alphabet.tilde(w))?;
    let p: f64 = spec.roster.with_role(Role::Accept).iter().map(|&q| rho[(q, q)].re).sum();
    Ok(crate::numerics::clamp_prob(p))
}

/// Measure-many run; `step_cap` only matters for one-way machines.
pub fn kwqfa_run(spec: &KwqfaSpec, w: &[usize], step_cap: Option<usize>) -> Result<RunReport, SemanticsError> {
    check_word(spec.alphabet.len(), w)?;
    let e = Engine::kw(&spec.roster, &spec.ops);
    let h = e.round(
        spec.roster.start,
        &spec.alphabet.tilde(w),
        &classes_for(&spec.roster, accept_reject),
        2,
        Measure::Step,
        step_cap,
    );
    Ok(RunReport::simple(h.mass[0], h.mass[1], h.residual, h.steps))
}

/// Halting-configuration amplitudes before each measurement of a one-way run.
pub fn kwqfa_halt_trace(spec: &KwqfaSpec, w: &[usize]) -> Result<Vec<HaltTrace>, SemanticsError> {
    check_word(spec.alphabet.len(), w)?;
    let dirs = spec
        .roster
        .directions
        .clone()
        .unwrap_or_else(|| vec![Direction::Right; spec.roster.len()]);
    let ops = sparse_ops(&spec.ops);
    let classes = classes_for(&spec.roster, accept_reject);
    let (_, t) = one_way(spec.roster.len(), &ops, &dirs, spec.roster.start, &spec.alphabet.tilde(w), &classes, 2, None, true);
    Ok(t)
}

/// Accept minus reject mass, differenced within each measurement step before summing.
/// Mirrored accept/reject halts then cancel exactly, so a gap far below the rounding
/// unit of ½ stays visible.
pub fn kwqfa_margin(spec: &KwqfaSpec, w: &[usize]) -> Result<f64, SemanticsError> {
    let trace = kwqfa_halt_trace(spec, w)?;
    let mut steps: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    for t in &trace {
        let e = steps.entry(t.step).or_default();
        match spec.roster.roles[t.state] {
            Role::Accept => e.0 += t.net.norm_sqr(),
            _ => e.1 += t.net.norm_sqr(),
        }
    }
    Ok(steps.values().map(|(a, r)| a - r).sum())
}

pub(crate) enum Compiled {
    Pfa { engine: Engine, start: usize, classes: Vec<Class> },
    Qfa { engine: Engine, start: usize, classes: Vec<Class> },
    Kw { engine: Engine, start: usize, classes: Vec<Class> },
    Restart(CompiledRestart),
    Post(CompiledPost),
}

impl Compiled {
    pub fn new(spec: &MachineSpec) -> Option<Self> {
        Some(match spec {
            MachineSpec::Pfa(p) => Compiled::Pfa {
                engine: Engine::pfa(&p.ops),
                start: p.roster.start,
                classes: classes_for(&p.roster, accept_else),
            },
            MachineSpec::Qfa(q) => Compiled::Qfa {
                engine: Engine::qfa(&q.ops),
                start: q.roster.start,
                classes: classes_for(&q.roster, accept_else),
            },
            MachineSpec::Kwqfa(k) => Compiled::Kw {
                engine: Engine::kw(&k.roster, &k.ops),
                start: k.roster.start,
                classes: classes_for(&k.roster, accept_reject),
            },
            MachineSpec::Restart(r) => Compiled::Restart(CompiledRestart::new(r)),
            MachineSpec::Post(p) => Compiled::Post(CompiledPost::new(p)),
            _ => return None,
        })
    }

    pub fn run(&self, w: &[usize], opts: &RunOptions) -> Result<RunReport, SemanticsError> {
        match self {
            Compiled::Pfa { engine, start, classes } | Compiled::Qfa { engine, start, classes } => {
                let tape = tape_of(w);
                let h = engine.round(*start, &tape(engine), classes, 2, Measure::End, None);
                Ok(RunReport::simple(h.mass[0], h.mass[1], h.residual, h.steps))
            }
            Compiled::Kw { engine, start, classes } => {
                let tape = tape_of(w);
                let h = engine.round(*start, &tape(engine), classes, 2, Measure::Step, opts.step_cap);
                Ok(RunReport::simple(h.mass[0], h.mass[1], h.residual, h.steps))
            }
            Compiled::Restart(r) => r.run(w, opts),
            Compiled::Post(p) => p.run(w),
        }
    }
}

/// Builds ¢w$ from the engine's symbol count.
pub(crate) fn tape_of(w: &[usize]) -> impl Fn(&Engine) -> Vec<usize> + '_ {
    move |e: &Engine| {
        let syms = match e {
            Engine::Pfa { ops, .. } | Engine::Kw { ops, .. } => ops.len(),
            Engine::Qfa { ops, .. } => ops.len(),
        };
        let mut t = Vec::with_capacity(w.len() + 2);
        t.push(0);
        t.extend(w.iter().map(|&s| s + 1));
        t.push(syms - 1);
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{Alphabet, OpTable};
    use crate::numerics::{c, identity, zeros};

    fn parity() -> PfaSpec {
        let a = Alphabet::from_chars("a").unwrap();
        let mut r = Roster::new(["even", "odd"], 0);
        r.roles[0] = Role::Accept;
        let mut flip = zeros(2, 2);
        flip[(1, 0)] = c(1.0, 0.0);
        flip[(0, 1)] = c(1.0, 0.0);
        PfaSpec { alphabet: a, roster: r, ops: OpTable::single(vec![identity(2), flip, identity(2)]) }
    }

    #[test]
    fn parity_pfa() {
        let p = parity();
        assert_eq!(pfa_accept(&p, &[0]).unwrap(), 0.0);
        assert_eq!(pfa_accept(&p, &[0, 0]).unwrap(), 1.0);
        assert!(pfa_accept(&p, &[1]).is_err());
    }

    #[test]
    fn identity_pfa_accepts_everything() {
        let a = Alphabet::from_chars("ab").unwrap();
        let mut r = Roster::new(["q"], 0);
        r.roles[0] = Role::Accept;
        let p = PfaSpec { alphabet: a, roster: r, ops: OpTable::identity(4, 1) };
        for w in p.alphabet.words_up_to(3) {
            assert_eq!(pfa_accept(&p, &w).unwrap(), 1.0);
        }
    }

    #[test]
    fn hadamard_qfa_on_a() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = Alphabet::from_chars("a").unwrap();
        let mut r = Roster::new(["q0", "q1"], 0);
        r.roles[1] = Role::Accept;
        let had = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
        let q = QfaSpec { alphabet: a, roster: r, ops: OpTable::single(vec![identity(2), had, identity(2)]) };
        assert!((qfa_accept(&q, &[0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(qfa_accept(&q, &[0, 0]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn gfa_empty_word() {
        let a = Alphabet::from_chars("a").unwrap();
        let g = GfaSpec {
            alphabet: a,
            names: vec!["x".into(), "y".into()],
            mats: vec![crate::numerics::RMatrix::from_row_slice(2, 2, &[0.0, 2.0, 1.0, 0.0])],
            v0: RVector::from_vec(vec![1.0, 3.0]),
            f: RVector::from_vec(vec![0.5, -1.0]),
        };
        assert_eq!(gfa_value(&g, &[]).unwrap(), 0.5 - 3.0);
        // A·v0 = (6, 1)
        assert_eq!(gfa_value(&g, &[0]).unwrap(), 3.0 - 1.0);
    }
}
