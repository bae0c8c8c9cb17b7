//! Exact execution of every machine kind.

mod automata;
mod counter;
mod post;
mod restart;
mod storage;

use thiserror::Error;

use crate::machines::{MachineError, MachineSpec, Word};
use crate::numerics::{clamp_prob, CMatrix, Tolerance, C64};

pub use automata::{gfa_value, kwqfa_halt_trace, kwqfa_margin, kwqfa_run, pfa_accept, qfa_accept, qfa_density, HaltTrace};
pub use counter::counter_run;
pub use post::{post_accept, post_masses};
pub use restart::{restart_accept, restart_mc, restart_round, restart_run, McReport, RoundStats};
pub use storage::wom_run;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemanticsError {
    #[error("symbol index {0} is not part of the alphabet")]
    ForeignSymbol(usize),
    #[error("machine never halts: {0}")]
    NonHalting(String),
    #[error("postselected mass is zero and no fallback verdict is configured")]
    ZeroPostMass,
    #[error("branch ensemble exceeded {cap} branches at step {step}")]
    BranchCap { cap: usize, step: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Knobs shared by all run functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub tol: Tolerance,
    /// Step cap for one-way machines; `None` means 4·(|w̃|+1).
    pub step_cap: Option<usize>,
    pub branch_cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { tol: Tolerance::default(), step_cap: None, branch_cap: 4096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Runtime {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub p_accept: f64,
    pub p_reject: f64,
    pub residual: f64,
    pub steps_used: usize,
    /// First-round statistics for restart machines, raw postselection masses for postselection machines.
    pub rounds: Option<RoundStats>,
    pub expected_runtime: Option<Runtime>,
    /// Largest branch count reached by the storage-machine ensemble.
    pub branches: usize,
}

impl RunReport {
    pub(crate) fn simple(p_accept: f64, p_reject: f64, residual: f64, steps: usize) -> Self {
        RunReport {
            p_accept: clamp_prob(p_accept),
            p_reject: clamp_prob(p_reject),
            residual: clamp_prob(residual),
            steps_used: steps,
            rounds: None,
            expected_runtime: None,
            branches: 0,
        }
    }
}

/// Column-sparse view of a square matrix.
#[derive(Debug, Clone)]
pub(crate) struct Sparse {
    pub cols: Vec<Vec<(usize, C64)>>,
}

impl Sparse {
    pub fn new(m: &CMatrix) -> Self {
        let cols = (0..m.ncols())
            .map(|j| (0..m.nrows()).filter_map(|i| (m[(i, j)].norm() != 0.0).then(|| (i, m[(i, j)]))).collect())
            .collect();
        Sparse { cols }
    }

    pub fn apply(&self, v: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (j, &x) in v.iter().enumerate() {
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for &(i, a) in &self.cols[j] {
                out[i] += a * x;
            }
        }
    }
}

pub(crate) fn check_word(k: usize, w: &[usize]) -> Result<(), SemanticsError> {
    match w.iter().find(|&&s| s >= k) {
        Some(&s) => Err(SemanticsError::ForeignSymbol(s)),
        None => Ok(()),
    }
}

/// Precompiled machine for repeated evaluation over many words.
pub struct Evaluator {
    spec: MachineSpec,
    opts: RunOptions,
    compiled: Option<automata::Compiled>,
}

impl Evaluator {
    pub fn new(spec: &MachineSpec, opts: RunOptions) -> Self {
        let compiled = automata::Compiled::new(spec);
        Evaluator { spec: spec.clone(), opts, compiled }
    }

    pub fn spec(&self) -> &MachineSpec {
        &self.spec
    }

    pub fn run(&self, w: &Word) -> Result<RunReport, SemanticsError> {
        check_word(self.spec.alphabet().len(), w)?;
        match (&self.spec, &self.compiled) {
            (MachineSpec::Gfa(g), _) => {
                let v = gfa_value(g, w)?;
                Ok(RunReport { p_accept: v, p_reject: 1.0 - v, ..RunReport::simple(0.0, 0.0, 0.0, w.len()) })
            }
            (MachineSpec::Counter(c), _) => counter_run(c, w),
            (MachineSpec::Wom(s), _) => wom_run(s, w, self.opts.branch_cap),
            (_, Some(c)) => c.run(w, &self.opts),
            _ => Err(SemanticsError::Unsupported("machine kind".into())),
        }
    }
}

/// One-shot evaluation of any machine kind.
pub fn evaluate(spec: &MachineSpec, w: &Word, opts: RunOptions) -> Result<RunReport, SemanticsError> {
    Evaluator::new(spec, opts).run(w)
}
