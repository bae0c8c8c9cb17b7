use qautlab::machines::{MachineSpec, Word};
use qautlab::semantics::{kwqfa_margin, Evaluator, RunOptions, RunReport, SemanticsError};
use qautlab::zoo::CutpointMode;

/// Signed distance `f(w) − λ`.
///
/// KWQFAs are scored from the accept/reject margin taken per measurement step, which
/// keeps gaps far below the rounding unit of ½ (as produced by the PFA embedding).
pub fn gap(spec: &MachineSpec, report: &RunReport, w: &[usize], lambda: f64) -> Result<f64, SemanticsError> {
    match spec {
        MachineSpec::Kwqfa(k) => {
            let margin = kwqfa_margin(k, w)?;
            Ok(((1.0 - report.residual - 2.0 * lambda) + margin) / 2.0)
        }
        _ => Ok(report.p_accept - lambda),
    }
}

/// Compiled machine plus cutpoint verdicts.
pub struct Decider {
    ev: Evaluator,
}

impl Decider {
    pub fn new(spec: &MachineSpec, opts: RunOptions) -> Self {
        Decider { ev: Evaluator::new(spec, opts) }
    }

    pub fn spec(&self) -> &MachineSpec {
        self.ev.spec()
    }

    pub fn report(&self, w: &Word) -> Result<RunReport, SemanticsError> {
        self.ev.run(w)
    }

    pub fn gap(&self, report: &RunReport, w: &[usize], lambda: f64) -> Result<f64, SemanticsError> {
        gap(self.ev.spec(), report, w, lambda)
    }

    pub fn verdict(&self, report: &RunReport, w: &[usize], lambda: f64, mode: CutpointMode, tol: f64) -> Result<bool, SemanticsError> {
        Ok(mode.accepts(self.gap(report, w, lambda)?, 0.0, tol))
    }
}
