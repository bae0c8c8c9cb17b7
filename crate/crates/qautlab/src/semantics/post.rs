use super::automata::{classes_for, Class, Engine};
use super::restart::RoundStats;
use super::{check_word, RunReport, SemanticsError};
use crate::machines::{Measure, PostInner, PostSpec, Role};
use crate::numerics::clamp_prob;

pub(crate) struct CompiledPost {
    engine: Engine,
    start: usize,
    classes: Vec<Class>,
    latvian: Option<bool>,
    letters: usize,
}

impl CompiledPost {
    pub fn new(spec: &PostSpec) -> Self {
        let roster = spec.roster();
        let classes = classes_for(roster, |r| match r {
            Role::PostAccept => Class::Halt(0),
            Role::PostReject => Class::Halt(1),
            _ => Class::Live,
        });
        let engine = match &spec.inner {
            PostInner::Pfa(p) => Engine::pfa(&p.ops),
            PostInner::Qfa(q) => Engine::qfa(&q.ops),
        };
        CompiledPost { engine, start: roster.start, classes, latvian: spec.latvian, letters: spec.alphabet().len() }
    }

    pub fn masses(&self, w: &[usize]) -> Result<(f64, f64), SemanticsError> {
        check_word(self.letters, w)?;
        let mut tape = vec![0];
        tape.extend(w.iter().map(|&s| s + 1));
        tape.push(self.letters + 1);
        let h = self.engine.round(self.start, &tape, &self.classes, 2, Measure::End, None);
        Ok((h.mass[0].max(0.0), h.mass[1].max(0.0)))
    }

    pub fn run(&self, w: &[usize]) -> Result<RunReport, SemanticsError> {
        let (pa, pr) = self.masses(w)?;
        let f = normalize(pa, pr, self.latvian)?;
        let mut rep = RunReport::simple(f, 1.0 - f, 0.0, w.len() + 2);
        rep.rounds = Some(RoundStats { p_a: pa, p_r: pr, p_restart: clamp_prob(1.0 - pa - pr), residual: 0.0 });
        Ok(rep)
    }
}

fn normalize(pa: f64, pr: f64, latvian: Option<bool>) -> Result<f64, SemanticsError> {
    // exact zero only; tiny but positive masses still carry a well-defined ratio
    if pa + pr <= 0.0 {
        return match latvian {
            Some(true) => Ok(1.0),
            Some(false) => Ok(0.0),
            None => Err(SemanticsError::ZeroPostMass),
        };
    }
    Ok(pa / (pa + pr))
}

/// Raw post-accept and post-reject masses.
pub fn post_masses(spec: &PostSpec, w: &[usize]) -> Result<(f64, f64), SemanticsError> {
    CompiledPost::new(spec).masses(w)
}

/// p_a / (p_a + p_r), or the fallback verdict when that mass vanishes.
pub fn post_accept(spec: &PostSpec, w: &[usize]) -> Result<f64, SemanticsError> {
    let (pa, pr) = post_masses(spec, w)?;
    normalize(pa, pr, spec.latvian)
}
