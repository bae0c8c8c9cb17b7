use std::collections::BTreeMap;

use super::{check_word, RunReport, SemanticsError};
use crate::machines::{Role, StorageAction, WomRow, WomSpec};
use crate::numerics::C64;

const PRUNE: f64 = 1e-28;

pub(crate) struct Branching<'a, S> {
    pub start: (usize, S),
    pub tape: &'a [usize],
    pub cap: usize,
}

pub(crate) struct BranchOutcome {
    pub accept: f64,
    pub total: f64,
    pub lost: f64,
    pub max_branches: usize,
}

type Branch<S> = BTreeMap<(usize, S), C64>;

/// Kraus-unraveled evolution: every step splits each branch by the register symbol written.
pub(crate) fn branch_run<S, F, A>(b: Branching<'_, S>, step: F, accepts: A) -> Result<BranchOutcome, SemanticsError>
where
    S: Ord + Clone,
    F: Fn(usize, usize, &S) -> Vec<(usize, usize, C64, S)>,
    A: Fn(usize, &S) -> bool,
{
    let mut branches: Vec<Branch<S>> = vec![BTreeMap::from([(b.start, C64::new(1.0, 0.0))])];
    let mut lost = 0.0;
    let mut max_branches = 1;
    for (t, &sym) in b.tape.iter().enumerate() {
        let mut next = Vec::new();
        for br in &branches {
            let mut split: BTreeMap<usize, Branch<S>> = BTreeMap::new();
            for ((q, s), &amp) in br {
                let moves = step(*q, sym, s);
                if moves.is_empty() {
                    lost += amp.norm_sqr();
                    continue;
                }
                for (dst, reg, a, s2) in moves {
                    *split.entry(reg).or_default().entry((dst, s2)).or_insert(C64::new(0.0, 0.0)) += a * amp;
                }
            }
            for (_, mut m) in split {
                m.retain(|_, z| z.norm_sqr() > PRUNE);
                if !m.is_empty() {
                    next.push(m);
                }
            }
        }
        if next.len() > b.cap {
            return Err(SemanticsError::BranchCap { cap: b.cap, step: t });
        }
        max_branches = max_branches.max(next.len());
        branches = next;
    }
    let mut accept = 0.0;
    let mut total = 0.0;
    for br in &branches {
        for ((q, s), z) in br {
            let p = z.norm_sqr();
            total += p;
            if accepts(*q, s) {
                accept += p;
            }
        }
    }
    Ok(BranchOutcome { accept, total, lost, max_branches })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Storage {
    Ioc(i64),
    Pos(Vec<usize>),
    Wom(BTreeMap<i64, usize>, i64),
}

fn act(s: &Storage, a: &StorageAction) -> Storage {
    match (s, a) {
        (Storage::Ioc(c), StorageAction::Inc(d)) => Storage::Ioc(c + d),
        (Storage::Pos(v), StorageAction::Push(g)) => {
            let mut v = v.clone();
            v.extend(*g);
            Storage::Pos(v)
        }
        (Storage::Wom(cells, h), StorageAction::Write(g, d)) => {
            let mut cells = cells.clone();
            if let Some(g) = g {
                cells.insert(*h, *g);
            }
            Storage::Wom(cells, h + d.delta())
        }
        _ => s.clone(),
    }
}

/// Executes an IOC, POS or WOM machine over ¢w$.
pub fn wom_run(spec: &WomSpec, w: &[usize], branch_cap: usize) -> Result<RunReport, SemanticsError> {
    check_word(spec.alphabet.len(), w)?;
    let tape = spec.alphabet.tilde(w);
    let mut rows: BTreeMap<(usize, usize), Vec<&WomRow>> = BTreeMap::new();
    for r in &spec.rows {
        rows.entry((r.src, r.sym)).or_default().push(r);
    }
    let init = match spec.variant {
        crate::machines::WomVariant::Ioc { .. } => Storage::Ioc(0),
        crate::machines::WomVariant::Pos => Storage::Pos(Vec::new()),
        crate::machines::WomVariant::Wom => Storage::Wom(BTreeMap::new(), 0),
    };
    let step = |q: usize, sym: usize, s: &Storage| -> Vec<(usize, usize, C64, Storage)> {
        rows.get(&(q, sym))
            .map(|rs| rs.iter().map(|r| (r.dst, r.reg, r.amp, act(s, &r.action))).collect())
            .unwrap_or_default()
    };
    let out = branch_run(
        Branching { start: (spec.roster.start, init), tape: &tape, cap: branch_cap },
        step,
        |q, _| spec.roster.roles[q] == Role::Accept,
    )?;
    let mut rep = RunReport::simple(out.accept, out.total - out.accept, out.lost, tape.len());
    rep.branches = out.max_branches;
    Ok(rep)
}
