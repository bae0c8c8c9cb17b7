use std::collections::BTreeMap;

use super::storage::{branch_run, Branching};
use super::{check_word, RunReport, SemanticsError};
use crate::machines::{CounterKind, CounterRow, CounterSpec, Role};
use crate::numerics::C64;

fn index(spec: &CounterSpec) -> BTreeMap<(usize, usize), Vec<&CounterRow>> {
    let mut m: BTreeMap<(usize, usize), Vec<&CounterRow>> = BTreeMap::new();
    for r in &spec.rows {
        m.entry((r.src, r.sym)).or_default().push(r);
    }
    m
}

fn fires(r: &CounterRow, counters: &[i64]) -> bool {
    match r.guard {
        None => true,
        Some(zero) => (counters[0] == 0) == zero,
    }
}

fn accepts(spec: &CounterSpec, q: usize, counters: &[i64]) -> bool {
    spec.roster.roles[q] == Role::Accept && (!spec.kind.blind() || counters.iter().all(|&c| c == 0))
}

fn apply(counters: &[i64], incs: &[i64]) -> Vec<i64> {
    counters.iter().zip(incs).map(|(c, d)| c + d).collect()
}

/// Executes a counter machine; deterministic kinds report probability 0 or 1.
pub fn counter_run(spec: &CounterSpec, w: &[usize]) -> Result<RunReport, SemanticsError> {
    check_word(spec.alphabet.len(), w)?;
    let tape = spec.alphabet.tilde(w);
    let rows = index(spec);
    let k = spec.counters;
    match spec.kind {
        CounterKind::Deterministic | CounterKind::OneReversal => {
            let mut q = spec.roster.start;
            let mut counters = vec![0i64; k];
            for &s in &tape {
                let next = rows.get(&(q, s)).and_then(|rs| rs.iter().find(|r| fires(r, &counters)));
                match next {
                    Some(r) => {
                        counters = apply(&counters, &r.incs);
                        q = r.dst;
                    }
                    None => return Ok(RunReport::simple(0.0, 1.0, 0.0, tape.len())),
                }
            }
            let acc = accepts(spec, q, &counters);
            Ok(RunReport::simple(acc as u8 as f64, (!acc) as u8 as f64, 0.0, tape.len()))
        }
        CounterKind::Probabilistic => {
            let mut dist: BTreeMap<(usize, Vec<i64>), f64> = BTreeMap::new();
            dist.insert((spec.roster.start, vec![0; k]), 1.0);
            let mut lost = 0.0;
            for &s in &tape {
                let mut next: BTreeMap<(usize, Vec<i64>), f64> = BTreeMap::new();
                for ((q, cs), p) in dist {
                    let mut out = 0.0;
                    if let Some(rs) = rows.get(&(q, s)) {
                        for r in rs {
                            let pr = r.amp.re * p;
                            out += pr;
                            *next.entry((r.dst, apply(&cs, &r.incs))).or_insert(0.0) += pr;
                        }
                    }
                    lost += p - out;
                }
                dist = next;
            }
            let acc: f64 = dist.iter().filter(|((q, cs), _)| accepts(spec, *q, cs)).map(|(_, p)| p).sum();
            let total: f64 = dist.values().sum();
            Ok(RunReport::simple(acc, total - acc + lost.max(0.0), 0.0, tape.len()))
        }
        CounterKind::Quantum => {
            let step = |q: usize, s: usize, cs: &Vec<i64>| -> Vec<(usize, usize, C64, Vec<i64>)> {
                rows.get(&(q, s))
                    .map(|rs| rs.iter().map(|r| (r.dst, r.reg, r.amp, apply(cs, &r.incs))).collect())
                    .unwrap_or_default()
            };
            let out = branch_run(
                Branching { start: (spec.roster.start, vec![0i64; k]), tape: &tape, cap: 4096 },
                step,
                |q, cs| accepts(spec, q, cs),
            )?;
            let mut rep = RunReport::simple(out.accept, out.total - out.accept, out.lost, tape.len());
            rep.branches = out.max_branches;
            Ok(rep)
        }
    }
}
