use std::fmt::Write as _;
use std::io::Write;

use clap::Args;
use rayon::prelude::*;

use qautlab::constructions::*;
use qautlab::machines::{validate, MachineSpec, Word};
use qautlab::semantics::{restart_mc, RunOptions, RunReport, Runtime};
use qautlab::textio::serialize_machine;
use qautlab::zoo::{build, CutpointMode, ErrorModel, LanguageId, ZooParams, BUILDERS};
use qautlab::Tolerance;

use crate::decide::Decider;
use crate::{load, usage, write_file, Command, CutpointArgs, Failure};

/// Longest word length a sweep or verification will enumerate.
pub const MAX_SWEEP_LEN: usize = 14;

const SHOWN_COUNTEREXAMPLES: usize = 20;

const ALL_MODES: [CutpointMode; 4] =
    [CutpointMode::Strict, CutpointMode::Nonstrict, CutpointMode::Exclusive, CutpointMode::OneSided];

fn tol() -> Tolerance {
    Tolerance::from_env()
}

fn io(e: std::io::Error) -> Failure {
    usage(e)
}

pub(crate) fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Check { file } => check(&file, out),
        Command::Run { file, word, cut, step_cap, seed, mc, word_sep } => {
            run_word(&file, &word, &cut, step_cap, seed, mc, word_sep.as_deref(), out)
        }
        Command::Sweep { file, max_len, alphabet, oracle, cut, csv, word_sep } => {
            let spec = load(&file)?;
            let opts = SweepOptions {
                max_len,
                letters: alphabet.map(|a| letters(&spec, &a)).transpose()?,
                oracle: oracle.map(|o| oracle_for(&spec, &o)).transpose()?,
                cutpoint: cutpoint(&cut, CutpointMode::Strict),
                word_sep,
            };
            let text = sweep_csv(&spec, &opts)?;
            match csv {
                Some(path) => write_file(&path, &text),
                None => out.write_all(text.as_bytes()).map_err(io),
            }
        }
        Command::Convert { rule, input, output, params } => {
            let spec = load(&input)?;
            let conv = convert(&rule, &spec, &params)?;
            emit(&conv, &output, out)
        }
        Command::Zoo { name, output, m, k, eps, list } => zoo_cmd(name, output, ZooParams { m, k, eps }, list, out),
        Command::Amplify { input, eps, target_eps, output } => {
            let spec = load(&input)?;
            let (amp, reached) = amplify(&spec, eps, target_eps)?;
            emit(&amp, &output, out)?;
            writeln!(out, "certified error {reached}").map_err(io)
        }
        Command::Verify { input, oracle, against, max_len, bound, members_exact, cut, word_sep } => {
            let spec = load(&input)?;
            let v = VerifyPlan::new(&spec, oracle, against, bound, members_exact, &cut)?;
            verify(&spec, &v, max_len, word_sep.as_deref(), out)
        }
    }
}

fn check(file: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let spec = load(file)?;
    let rep = validate(&spec, tol());
    if rep.is_ok() {
        writeln!(out, "ok: {} machine with {} states", spec.kind_name(), spec.state_count()).map_err(io)
    } else {
        for v in &rep.violations {
            writeln!(out, "{v}").map_err(io)?;
        }
        Err(Failure::Contract(format!("{} violation(s)", rep.violations.len())))
    }
}

fn cutpoint(cut: &CutpointArgs, default: CutpointMode) -> Option<(f64, CutpointMode)> {
    cut.cutpoint.map(|l| (l, cut.mode.unwrap_or(default)))
}

fn parse_word(spec: &MachineSpec, text: &str, sep: Option<&str>) -> Result<Word, Failure> {
    spec.alphabet().parse_word(text, sep).map_err(usage)
}

fn render(spec: &MachineSpec, w: &[usize], sep: Option<&str>) -> String {
    let a = spec.alphabet();
    match sep {
        Some(sep) => w.iter().map(|&i| a.symbols()[i].as_str()).collect::<Vec<_>>().join(sep),
        None => a.render(w),
    }
}

fn verdict_name(accept: bool) -> &'static str {
    if accept {
        "ACCEPT"
    } else {
        "REJECT"
    }
}

#[allow(clippy::too_many_arguments)]
fn run_word(
    file: &str,
    word: &str,
    cut: &CutpointArgs,
    step_cap: Option<usize>,
    seed: u64,
    mc: Option<usize>,
    sep: Option<&str>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let spec = load(file)?;
    let w = parse_word(&spec, word, sep)?;
    let opts = RunOptions { tol: tol(), step_cap, ..RunOptions::default() };
    let d = Decider::new(&spec, opts);
    let r = d.report(&w).map_err(|e| Failure::Contract(e.to_string()))?;
    let mut s = String::new();
    let _ = writeln!(s, "p_accept  {}", r.p_accept);
    let _ = writeln!(s, "p_reject  {}", r.p_reject);
    let _ = writeln!(s, "residual  {}", r.residual);
    if let Some(st) = &r.rounds {
        let _ = writeln!(s, "round     p_a = {}, p_r = {}, p_restart = {}", st.p_a, st.p_r, st.p_restart);
    }
    match r.expected_runtime {
        Some(Runtime::Finite(t)) => {
            let _ = writeln!(s, "runtime   {t}");
        }
        Some(Runtime::Infinite) => {
            let _ = writeln!(s, "runtime   infinite");
        }
        None => {}
    }
    if r.branches > 0 {
        let _ = writeln!(s, "branches  {}", r.branches);
    }
    if let Some(lambda) = cut.cutpoint {
        let modes: Vec<CutpointMode> = match cut.mode {
            Some(m) => vec![m],
            None => ALL_MODES.to_vec(),
        };
        for m in modes {
            let v = d.verdict(&r, &w, lambda, m, tol().eps()).map_err(|e| Failure::Contract(e.to_string()))?;
            let _ = writeln!(s, "verdict   {} ({}, λ = {lambda})", verdict_name(v), m.name());
        }
    }
    if let Some(trials) = mc {
        let MachineSpec::Restart(rs) = &spec else {
            return Err(usage("--mc applies to restart machines only"));
        };
        let rep = restart_mc(rs, &w, trials, seed).map_err(|e| Failure::Contract(e.to_string()))?;
        let _ = writeln!(
            s,
            "mc        {} of {} accepted (estimate {}, mean rounds {}, aborted {})",
            rep.accepted,
            rep.trials,
            rep.estimate(),
            rep.mean_rounds,
            rep.aborted
        );
    }
    out.write_all(s.as_bytes()).map_err(io)
}

/// Letter indices named in a comma-separated list, in machine order.
fn letters(spec: &MachineSpec, list: &str) -> Result<Vec<usize>, Failure> {
    let a = spec.alphabet();
    let mut idx = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        idx.push(a.letter(name).ok_or_else(|| usage(format!("`{name}` is not a letter of the machine")))?);
    }
    if idx.is_empty() {
        return Err(usage("the alphabet override is empty"));
    }
    idx.sort_unstable();
    idx.dedup();
    Ok(idx)
}

fn oracle_for(spec: &MachineSpec, name: &str) -> Result<LanguageId, Failure> {
    let lang: LanguageId = name.parse().map_err(usage)?;
    if lang.alphabet() != *spec.alphabet() {
        return Err(usage(format!("oracle {lang} is over a different alphabet than the machine")));
    }
    Ok(lang)
}

fn words_over(letters: &[usize], max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        let next: Vec<Word> = layer
            .iter()
            .flat_map(|w| letters.iter().map(move |&s| [w.as_slice(), &[s]].concat()))
            .collect();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    pub max_len: usize,
    /// Letters to enumerate; all of them when `None`.
    pub letters: Option<Vec<usize>>,
    pub oracle: Option<LanguageId>,
    pub cutpoint: Option<(f64, CutpointMode)>,
    pub word_sep: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub word: String,
    pub len: usize,
    pub p_accept: f64,
    pub p_reject: f64,
    pub residual: f64,
    pub oracle_member: Option<bool>,
    pub verdict: Option<bool>,
}

pub fn sweep_rows(spec: &MachineSpec, opts: &SweepOptions) -> Result<Vec<SweepRow>, Failure> {
    if opts.max_len > MAX_SWEEP_LEN {
        return Err(usage(format!("--max-len {} exceeds {MAX_SWEEP_LEN}", opts.max_len)));
    }
    let all: Vec<usize> = (0..spec.alphabet().len()).collect();
    let words = words_over(opts.letters.as_deref().unwrap_or(&all), opts.max_len);
    let d = Decider::new(spec, RunOptions { tol: tol(), ..RunOptions::default() });
    let eps = tol().eps();
    words
        .par_iter()
        .map(|w| {
            let fail = |e: &dyn std::fmt::Display| Failure::Contract(format!("{}: {e}", render(spec, w, opts.word_sep.as_deref())));
            let r: RunReport = d.report(w).map_err(|e| fail(&e))?;
            let oracle_member = opts.oracle.map(|l| l.member(w)).transpose().map_err(|e| fail(&e))?;
            let verdict = opts
                .cutpoint
                .map(|(l, m)| d.verdict(&r, w, l, m, eps))
                .transpose()
                .map_err(|e| fail(&e))?;
            Ok(SweepRow {
                word: render(spec, w, opts.word_sep.as_deref()),
                len: w.len(),
                p_accept: r.p_accept,
                p_reject: r.p_reject,
                residual: r.residual,
                oracle_member,
                verdict,
            })
        })
        .collect()
}

/// Sweep table as CSV; identical inputs give byte-identical output.
pub fn sweep_csv(spec: &MachineSpec, opts: &SweepOptions) -> Result<String, Failure> {
    let rows = sweep_rows(spec, opts)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["word", "len", "p_accept", "p_reject", "residual", "oracle_member", "verdict"]).map_err(usage)?;
    for r in &rows {
        w.write_record([
            r.word.clone(),
            r.len.to_string(),
            r.p_accept.to_string(),
            r.p_reject.to_string(),
            r.residual.to_string(),
            r.oracle_member.map(|b| b.to_string()).unwrap_or_default(),
            r.verdict.map(|b| verdict_name(b).to_string()).unwrap_or_default(),
        ])
        .map_err(usage)?;
    }
    let bytes = w.into_inner().map_err(usage)?;
    String::from_utf8(bytes).map_err(usage)
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConvertParams {
    /// Error parameter of the rule.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Gap constant for `kwqfa-to-restart`.
    #[arg(long)]
    pub c: Option<f64>,
    /// `exponential` or `constant` for `kwqfa-to-restart`.
    #[arg(long, default_value = "exponential")]
    pub gap: String,
    /// Scale of the exponential-gap rejection amplitude.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Grid side minus one for `reset-majority`.
    #[arg(long)]
    pub k: Option<usize>,
    /// QFT width or increment bound.
    #[arg(long)]
    pub m: Option<usize>,
    /// Second operand for `post-union` and `post-intersection`.
    #[arg(long)]
    pub with: Option<String>,
}

/// Rule names understood by `convert`.
pub const RULES: [&str; 18] = [
    "pfa-to-kwqfa",
    "exclusive-pfa-to-nqfa",
    "qfa-to-gfa",
    "kwqfa-to-restart",
    "swap-accept-reject",
    "pfa-restart-to-qfa-restart",
    "gqfa-restart-to-kwqfa-restart",
    "reset-majority",
    "restart-to-post",
    "post-to-restart",
    "post-amplify",
    "post-complement",
    "post-union",
    "post-intersection",
    "d1bca-to-qfa-ioc",
    "q1bca-to-qfa-ioc",
    "rev1-d1ca-to-qfa-ioc",
    "pkbca-to-p1bca",
];

fn need<T: Copy>(v: Option<T>, flag: &str, rule: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("rule {rule} needs --{flag}")))
}

fn wrong_kind(rule: &str, spec: &MachineSpec) -> Failure {
    usage(format!("rule {rule} does not apply to a {} machine", spec.kind_name()))
}

fn contract(e: ConstructionError) -> Failure {
    match e {
        ConstructionError::Parameter(_) => usage(e),
        _ => Failure::Contract(e.to_string()),
    }
}

pub fn convert(rule: &str, spec: &MachineSpec, p: &ConvertParams) -> Result<MachineSpec, Failure> {
    use MachineSpec as M;
    let bad = || wrong_kind(rule, spec);
    let out = match (rule, spec) {
        ("pfa-to-kwqfa", M::Pfa(x)) => M::Kwqfa(pfa_to_kwqfa(x).map_err(contract)?),
        ("exclusive-pfa-to-nqfa", M::Pfa(x)) => M::Kwqfa(exclusive_pfa_to_nqfa(x).map_err(contract)?),
        ("qfa-to-gfa", M::Qfa(x)) => M::Gfa(qfa_to_gfa(x).map_err(contract)?),
        ("kwqfa-to-restart", M::Kwqfa(x)) => {
            let mode = match p.gap.as_str() {
                "exponential" => GapMode::Exponential { scale: p.scale },
                "constant" => GapMode::Constant,
                g => return Err(usage(format!("unknown gap mode `{g}`"))),
            };
            M::Restart(kwqfa_to_restart(x, need(p.eps, "eps", rule)?, need(p.c, "c", rule)?, mode).map_err(contract)?)
        }
        ("swap-accept-reject", M::Restart(x)) => M::Restart(swap_accept_reject(x)),
        ("pfa-restart-to-qfa-restart", M::Restart(x)) => M::Restart(pfa_restart_to_qfa_restart(x).map_err(contract)?),
        ("gqfa-restart-to-kwqfa-restart", M::Restart(x)) => {
            M::Restart(gqfa_restart_to_kwqfa_restart(x).map_err(contract)?)
        }
        ("reset-majority", M::Restart(x)) => M::Restart(restart_to_reset_majority(x, need(p.k, "k", rule)?).map_err(contract)?),
        ("restart-to-post", M::Restart(x)) => M::Post(restart_to_post(x).map_err(contract)?),
        ("post-to-restart", M::Post(x)) => M::Restart(post_to_restart(x)),
        ("post-amplify", M::Post(x)) => M::Post(post_tensor_amplify(x, need(p.eps, "eps", rule)?).map_err(contract)?),
        ("post-complement", M::Post(x)) => M::Post(post_combine(x, None, CombineOp::Complement).map_err(contract)?),
        ("post-union" | "post-intersection", M::Post(x)) => {
            let path = p.with.as_deref().ok_or_else(|| usage(format!("rule {rule} needs --with")))?;
            let M::Post(y) = load(path)? else {
                return Err(usage(format!("{path} is not a postselection machine")));
            };
            let op = if rule == "post-union" { CombineOp::Union } else { CombineOp::Intersection };
            M::Post(post_combine(x, Some(&y), op).map_err(contract)?)
        }
        ("d1bca-to-qfa-ioc", M::Counter(x)) => M::Wom(d1bca_to_qfa_ioc(x, need(p.m, "m", rule)?).map_err(contract)?),
        ("q1bca-to-qfa-ioc", M::Counter(x)) => {
            M::Wom(q1bca_to_qfa_ioc(x, need(p.m, "m", rule)?, p.eps.unwrap_or(0.0)).map_err(contract)?.0)
        }
        ("rev1-d1ca-to-qfa-ioc", M::Counter(x)) => M::Wom(rev1_d1ca_to_qfa_ioc(x).map_err(contract)?),
        ("pkbca-to-p1bca", M::Counter(x)) => M::Counter(pkbca_to_p1bca(x, need(p.eps, "eps", rule)?).map_err(contract)?),
        ("ioc-m-to-ioc", M::Wom(x)) => M::Wom(ioc_m_to_ioc(x).map_err(contract)?),
        (r, _) if RULES.contains(&r) || r == "ioc-m-to-ioc" => return Err(bad()),
        (r, _) => return Err(usage(format!("unknown rule `{r}`; known: {}, ioc-m-to-ioc", RULES.join(", ")))),
    };
    Ok(out)
}

/// Writes `spec` after checking it validates.
fn emit(spec: &MachineSpec, path: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let rep = validate(spec, tol());
    if !rep.is_ok() {
        for v in &rep.violations {
            writeln!(out, "{v}").map_err(io)?;
        }
        return Err(Failure::Contract("output machine does not validate".into()));
    }
    write_file(path, &serialize_machine(spec))?;
    writeln!(out, "wrote {path}: {} machine with {} states", spec.kind_name(), spec.state_count()).map_err(io)
}

fn describe(model: &ErrorModel) -> String {
    match *model {
        ErrorModel::Bounded { eps } => format!("bounded error {eps}"),
        ErrorModel::MembersExact { eps } => format!("members accepted with certainty, nonmembers at most {eps}"),
        ErrorModel::Cutpoint { lambda, mode } => format!("{} cutpoint {lambda}", mode.name()),
    }
}

fn zoo_cmd(name: Option<String>, output: Option<String>, p: ZooParams, list: bool, out: &mut dyn Write) -> Result<(), Failure> {
    if list {
        for b in BUILDERS {
            writeln!(out, "{b}").map_err(io)?;
        }
        return Ok(());
    }
    let name = name.ok_or_else(|| usage("a builder name is required (or --list)"))?;
    let output = output.ok_or_else(|| usage("an output path is required"))?;
    let z = build(&name, &p).map_err(usage)?;
    emit(&z.machine, &output, out)?;
    writeln!(out, "{}: {}, {}", z.name, z.language, describe(&z.certified)).map_err(io)
}

/// Error of the first-to-`k+1` race when each round errs with probability `e`.
pub fn race_error(e: f64, k: usize) -> f64 {
    // Σ_{i≤k} C(k+i, i) e^{k+1} (1−e)^i
    let mut total = 0.0;
    let mut binom = 1.0;
    for i in 0..=k {
        if i > 0 {
            binom *= (k + i) as f64 / i as f64;
        }
        total += binom * e.powi(k as i32 + 1) * (1.0 - e).powi(i as i32);
    }
    total
}

const AMPLIFY_STATE_LIMIT: usize = 20_000;

/// Amplified machine and its certified error.
pub fn amplify(spec: &MachineSpec, eps: f64, target: f64) -> Result<(MachineSpec, f64), Failure> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(usage(format!("--eps {eps} is outside (0, 1/2)")));
    }
    if !(target > 0.0) {
        return Err(usage("--target-eps must be positive"));
    }
    match spec {
        MachineSpec::Post(p) => {
            let (mut cur, mut e) = (p.clone(), eps);
            while e > target {
                let k = amplification_k(e).map_err(usage)?;
                if cur.roster().len().saturating_pow(k as u32) > AMPLIFY_STATE_LIMIT {
                    return Err(Failure::Contract(format!("reaching {target} needs more than {AMPLIFY_STATE_LIMIT} states")));
                }
                cur = post_tensor_amplify(&cur, e).map_err(contract)?;
                e *= e;
            }
            Ok((MachineSpec::Post(cur), e))
        }
        MachineSpec::Restart(r) => {
            let n = r.roster().len();
            let mut k = 0;
            while race_error(eps, k) > target {
                k += 1;
                if (k + 1) * (k + 1) * n > AMPLIFY_STATE_LIMIT {
                    return Err(Failure::Contract(format!("reaching {target} needs more than {AMPLIFY_STATE_LIMIT} states")));
                }
            }
            Ok((MachineSpec::Restart(restart_to_reset_majority(r, k).map_err(contract)?), race_error(eps, k)))
        }
        _ => Err(usage(format!("amplify applies to restart and postselection machines, not {}", spec.kind_name()))),
    }
}

pub(crate) struct VerifyPlan {
    reference: Reference,
    model: ErrorModel,
}

enum Reference {
    Oracle(LanguageId),
    /// Membership is the reference machine's verdict at the cutpoint.
    Machine(Box<Decider>),
}

impl VerifyPlan {
    fn new(
        spec: &MachineSpec,
        oracle: Option<String>,
        against: Option<String>,
        bound: Option<f64>,
        members_exact: bool,
        cut: &CutpointArgs,
    ) -> Result<Self, Failure> {
        let model = match (cutpoint(cut, CutpointMode::Strict), bound) {
            (Some(_), Some(_)) => return Err(usage("give either --cutpoint or --bound, not both")),
            (Some((lambda, mode)), None) => ErrorModel::Cutpoint { lambda, mode },
            (None, Some(eps)) if members_exact => ErrorModel::MembersExact { eps },
            (None, Some(eps)) => ErrorModel::Bounded { eps },
            (None, None) => return Err(usage("a --cutpoint or a --bound is required")),
        };
        let reference = match (oracle, against) {
            (Some(o), None) => Reference::Oracle(oracle_for(spec, &o)?),
            (None, Some(path)) => {
                if !matches!(model, ErrorModel::Cutpoint { .. }) {
                    return Err(usage("--against compares cutpoint verdicts and needs --cutpoint"));
                }
                let r = load(&path)?;
                if r.alphabet() != spec.alphabet() {
                    return Err(usage(format!("{path} is over a different alphabet")));
                }
                Reference::Machine(Box::new(Decider::new(&r, RunOptions { tol: tol(), ..RunOptions::default() })))
            }
            _ => return Err(usage("give exactly one of --oracle and --against")),
        };
        Ok(VerifyPlan { reference, model })
    }
}

fn verify(spec: &MachineSpec, plan: &VerifyPlan, max_len: usize, sep: Option<&str>, out: &mut dyn Write) -> Result<(), Failure> {
    if max_len > MAX_SWEEP_LEN {
        return Err(usage(format!("--max-len {max_len} exceeds {MAX_SWEEP_LEN}")));
    }
    let eps = tol().eps();
    let d = Decider::new(spec, RunOptions { tol: tol(), ..RunOptions::default() });
    let words = spec.alphabet().words_up_to(max_len);
    let results: Vec<Result<Option<String>, Failure>> = words
        .par_iter()
        .map(|w| {
            let shown = render(spec, w, sep);
            let fail = |e: &dyn std::fmt::Display| Failure::Contract(format!("{shown}: {e}"));
            let r = d.report(w).map_err(|e| fail(&e))?;
            let ok = match (&plan.reference, plan.model) {
                (Reference::Oracle(l), ErrorModel::Cutpoint { lambda, mode }) => {
                    let member = l.member(w).map_err(|e| fail(&e))?;
                    mode.agrees(member, d.gap(&r, w, lambda).map_err(|e| fail(&e))?, 0.0, eps)
                }
                (Reference::Oracle(l), m) => m.holds(l.member(w).map_err(|e| fail(&e))?, r.p_accept, eps),
                (Reference::Machine(refd), ErrorModel::Cutpoint { lambda, mode }) => {
                    let rr = refd.report(w).map_err(|e| fail(&e))?;
                    let want = refd.verdict(&rr, w, lambda, mode, eps).map_err(|e| fail(&e))?;
                    d.verdict(&r, w, lambda, mode, eps).map_err(|e| fail(&e))? == want
                }
                (Reference::Machine(_), _) => unreachable!("checked when the plan was built"),
            };
            Ok((!ok).then(|| format!("{shown:?} p_accept={} p_reject={}", r.p_accept, r.p_reject)))
        })
        .collect();
    let mut bad = Vec::new();
    for r in results {
        if let Some(line) = r? {
            bad.push(line);
        }
    }
    if bad.is_empty() {
        writeln!(out, "ok: {} words up to length {max_len}", words.len()).map_err(io)
    } else {
        for line in bad.iter().take(SHOWN_COUNTEREXAMPLES) {
            writeln!(out, "counterexample {line}").map_err(io)?;
        }
        if bad.len() > SHOWN_COUNTEREXAMPLES {
            writeln!(out, "... and {} more", bad.len() - SHOWN_COUNTEREXAMPLES).map_err(io)?;
        }
        Err(Failure::Contract(format!("{} of {} words violate the relation", bad.len(), words.len())))
    }
}
