use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::automata::{Class, Engine, Harvest};
use super::{check_word, RunOptions, RunReport, Runtime, SemanticsError};
use crate::machines::{RestartInner, RestartSpec, Role};
use crate::numerics::clamp_prob;

/// Outcome probabilities of a single round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundStats {
    pub p_a: f64,
    pub p_r: f64,
    pub p_restart: f64,
    pub residual: f64,
}

impl RoundStats {
    pub fn p_halt(&self) -> f64 {
        self.p_a + self.p_r
    }
}

/// Overall acceptance of a machine that repeats a round with outcomes (p_a, p_r, restart).
pub fn restart_accept(p_a: f64, p_r: f64) -> Result<f64, SemanticsError> {
    if p_a + p_r <= 0.0 {
        return Err(SemanticsError::NonHalting("both halting probabilities are zero".into()));
    }
    if p_a == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (1.0 + p_r / p_a))
}

pub(crate) struct CompiledRestart {
    engine: Engine,
    /// Distinct round entry states; index 0 is the start state.
    starts: Vec<usize>,
    classes: Vec<Class>,
    spec: RestartSpec,
}

impl CompiledRestart {
    pub fn new(spec: &RestartSpec) -> Self {
        let roster = spec.roster();
        let mut starts = vec![roster.start];
        for q in roster.with_role(Role::Restart) {
            let t = spec.target(q);
            if !starts.contains(&t) {
                starts.push(t);
            }
        }
        let classes = roster
            .roles
            .iter()
            .enumerate()
            .map(|(q, r)| match r {
                Role::Accept => Class::Halt(0),
                Role::Reject => Class::Halt(1),
                Role::Restart => Class::Halt(2 + starts.iter().position(|&s| s == spec.target(q)).unwrap_or(0)),
                _ => Class::Live,
            })
            .collect();
        let engine = match &spec.inner {
            RestartInner::Pfa(p) => Engine::pfa(&p.ops),
            RestartInner::Kwqfa(k) => Engine::kw(&k.roster, &k.ops),
            RestartInner::Qfa(q) => Engine::qfa(&q.ops),
        };
        CompiledRestart { engine, starts, classes, spec: spec.clone() }
    }

    fn outcomes(&self, w: &[usize], cap: Option<usize>) -> Result<Vec<Harvest>, SemanticsError> {
        let a = self.spec.alphabet();
        check_word(a.len(), w)?;
        let tape = a.tilde(w);
        let slots = 2 + self.starts.len();
        Ok(self
            .starts
            .iter()
            .map(|&s| self.engine.round(s, &tape, &self.classes, slots, self.spec.measure, cap))
            .collect())
    }

    fn stats(h: &Harvest) -> RoundStats {
        RoundStats {
            p_a: clamp_prob(h.mass[0]),
            p_r: clamp_prob(h.mass[1]),
            p_restart: clamp_prob(h.mass[2..].iter().sum()),
            residual: clamp_prob(h.residual),
        }
    }

    pub fn first_round(&self, w: &[usize]) -> Result<RoundStats, SemanticsError> {
        let hs = self.outcomes(w, None)?;
        Ok(Self::stats(&hs[0]))
    }

    pub fn run(&self, w: &[usize], opts: &RunOptions) -> Result<RunReport, SemanticsError> {
        let hs = self.outcomes(w, opts.step_cap)?;
        let first = Self::stats(&hs[0]);
        let m = self.starts.len();
        // Only exact zeros are fatal: tiny halting masses still give a well-defined ratio.
        if m == 1 && first.p_halt() + first.residual <= 0.0 {
            return Err(SemanticsError::NonHalting("the round never halts".into()));
        }
        let mut lhs = DMatrix::<f64>::zeros(m, m);
        let mut rhs = DMatrix::<f64>::zeros(m, 4);
        for (i, h) in hs.iter().enumerate() {
            // diagonal as outflow mass rather than 1 − self-restart, which cancels catastrophically
            lhs[(i, i)] = h.mass[0] + h.mass[1] + h.residual;
            for j in 0..m {
                if j != i {
                    lhs[(i, j)] -= h.mass[2 + j];
                    lhs[(i, i)] += h.mass[2 + j];
                }
            }
            rhs[(i, 0)] = h.mass[0];
            rhs[(i, 1)] = h.mass[1];
            rhs[(i, 2)] = h.residual;
            rhs[(i, 3)] = h.steps as f64;
        }
        let lu = lhs.lu();
        let pivot = (0..m).map(|i| lu.u()[(i, i)].abs()).fold(f64::INFINITY, f64::min);
        if !(pivot > 0.0) {
            return Err(SemanticsError::NonHalting("restart system is singular".into()));
        }
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| SemanticsError::NonHalting("restart system is singular".into()))?;
        let (pa, pr) = (sol[(0, 0)], sol[(0, 1)]);
        if !(pa + pr > 0.0) {
            return Err(SemanticsError::NonHalting("overall halting probability is zero".into()));
        }
        Ok(RunReport {
            p_accept: clamp_prob(pa),
            p_reject: clamp_prob(pr),
            residual: clamp_prob(sol[(0, 2)]),
            steps_used: hs[0].steps,
            rounds: Some(first),
            expected_runtime: Some(Runtime::Finite(sol[(0, 3)])),
            branches: 0,
        })
    }

    /// Per entry state: (accept, reject, lost, restart mass per entry state).
    fn table(&self, w: &[usize]) -> Result<Vec<(f64, f64, f64, Vec<f64>)>, SemanticsError> {
        Ok(self
            .outcomes(w, None)?
            .into_iter()
            .map(|h| (h.mass[0].max(0.0), h.mass[1].max(0.0), h.residual.max(0.0), h.mass[2..].iter().map(|x| x.max(0.0)).collect()))
            .collect())
    }
}

/// First-round outcome probabilities from the start state.
pub fn restart_round(spec: &RestartSpec, w: &[usize]) -> Result<RoundStats, SemanticsError> {
    CompiledRestart::new(spec).first_round(w)
}

/// Analytic overall acceptance, solving the absorbing chain over round entry states.
pub fn restart_run(spec: &RestartSpec, w: &[usize], opts: RunOptions) -> Result<RunReport, SemanticsError> {
    CompiledRestart::new(spec).run(w, &opts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub trials: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub lost: usize,
    /// Trials that needed more than the round budget.
    pub aborted: usize,
    pub mean_rounds: f64,
}

impl McReport {
    /// Fraction of completed trials that accepted.
    pub fn estimate(&self) -> f64 {
        let done = self.accepted + self.rejected + self.lost;
        if done == 0 {
            0.0
        } else {
            self.accepted as f64 / done as f64
        }
    }
}

const ROUND_BUDGET: u64 = 1_000_000_000_000;

/// Seeded simulation of whole runs, sampling one round outcome at a time.
pub fn restart_mc(spec: &RestartSpec, w: &[usize], trials: usize, seed: u64) -> Result<McReport, SemanticsError> {
    let c = CompiledRestart::new(spec);
    let table = c.table(w)?;
    if table[0].0 + table[0].1 + table[0].2 <= 0.0 && table[0].3.iter().enumerate().all(|(j, &x)| j == 0 || x <= 0.0) {
        return Err(SemanticsError::NonHalting("the first round never halts".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = McReport { trials, accepted: 0, rejected: 0, lost: 0, aborted: 0, mean_rounds: 0.0 };
    let mut total_rounds: u64 = 0;
    for _ in 0..trials {
        let mut cur = 0usize;
        let mut rounds: u64 = 0;
        loop {
            let (a, r, l, res) = (table[cur].0, table[cur].1, table[cur].2, &table[cur].3);
            let stay = res[cur];
            let leave = a + r + l + res.iter().enumerate().filter(|&(j, _)| j != cur).map(|(_, x)| x).sum::<f64>();
            if leave <= 0.0 {
                rep.aborted += 1;
                break;
            }
            if stay > 0.0 {
                // number of self-restarts before leaving is geometric
                let u: f64 = 1.0 - rng.gen::<f64>();
                let p_leave = leave / (leave + stay);
                let k = if p_leave >= 1.0 { 0.0 } else { (u.ln() / (1.0 - p_leave).ln()).floor() };
                rounds = rounds.saturating_add(if k.is_finite() { k as u64 } else { ROUND_BUDGET + 1 });
            }
            rounds += 1;
            if rounds > ROUND_BUDGET {
                rep.aborted += 1;
                break;
            }
            let mut x = rng.gen::<f64>() * leave;
            if x < a {
                rep.accepted += 1;
                break;
            }
            x -= a;
            if x < r {
                rep.rejected += 1;
                break;
            }
            x -= r;
            if x < l {
                rep.lost += 1;
                break;
            }
            x -= l;
            let mut next = None;
            for (j, &p) in res.iter().enumerate() {
                if j == cur {
                    continue;
                }
                if x < p {
                    next = Some(j);
                    break;
                }
                x -= p;
            }
            cur = next.unwrap_or_else(|| (0..res.len()).rev().find(|&j| j != cur && res[j] > 0.0).unwrap_or(cur));
        }
        total_rounds += rounds;
    }
    rep.mean_rounds = total_rounds as f64 / trials.max(1) as f64;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceptance_formula() {
        assert!((restart_accept(0.2, 0.3).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(restart_accept(0.3, 0.0).unwrap(), 1.0);
        assert_eq!(restart_accept(0.0, 0.3).unwrap(), 0.0);
        assert!(restart_accept(0.0, 0.0).is_err());
        for p in [1e-6, 0.1, 0.5] {
            assert!((restart_accept(p, p).unwrap() - 0.5).abs() < 1e-15);
        }
    }
}
