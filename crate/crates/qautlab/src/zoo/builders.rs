use super::{ErrorModel, LanguageId, ZooError, ZooMachine};
use crate::constructions::{kwqfa_to_restart, swap_accept_reject, GapMode};
use crate::machines::{
    Alphabet, CounterKind, CounterRow, CounterSpec, Direction, Fill, KwqfaSpec, MachineSpec, PfaSpec, QfaSpec,
    RestartInner, RestartSpec, Role, Roster, StorageAction, UnitaryBuilder, WomRow, WomSpec, WomVariant,
};
use crate::numerics::C64;
use crate::textio::format_amplitude;
use super::CutpointMode;

const H: &str = "1/sqrt(2)";
const NH: &str = "-1/sqrt(2)";
const Q: &str = "1/2";
const NQ: &str = "-1/2";

/// Parameters accepted by [`build`]; each builder reads the ones it needs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZooParams {
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub eps: Option<f64>,
}

/// Builder names understood by [`build`].
pub const BUILDERS: [&str; 13] = [
    "lnh_kwqfa1",
    "mcqfa_lm",
    "leq_pfa_restart",
    "am_restart",
    "bm_restart",
    "cm_restart",
    "upal_restart",
    "pal_restart",
    "ltwin_pos",
    "lrev_wom",
    "leq_d1bca",
    "leqk_dkbca",
    "lnh_rev1_d1ca",
];

pub fn build(name: &str, p: &ZooParams) -> Result<ZooMachine, ZooError> {
    let m = || p.m.ok_or_else(|| ZooError::Parameter(format!("{name} needs m")));
    let eps = || p.eps.ok_or_else(|| ZooError::Parameter(format!("{name} needs eps")));
    match name {
        "lnh_kwqfa1" => lnh_kwqfa1(),
        "mcqfa_lm" => mcqfa_lm(m()?),
        "leq_pfa_restart" => leq_pfa_restart(eps()?),
        "am_restart" => am_restart(m()?, eps()?),
        "bm_restart" => bm_restart(m()?, eps()?),
        "cm_restart" => cm_restart(m()?, eps()?),
        "upal_restart" => upal_restart(eps()?),
        "pal_restart" => pal_restart(eps()?),
        "ltwin_pos" => ltwin_pos(),
        "lrev_wom" => lrev_wom(),
        "leq_d1bca" => leq_d1bca(),
        "leqk_dkbca" => leqk_dkbca(p.k.ok_or_else(|| ZooError::Parameter(format!("{name} needs k")))?),
        "lnh_rev1_d1ca" => lnh_rev1_d1ca(),
        _ => Err(ZooError::UnknownName(name.to_string())),
    }
}

fn zoo(name: &str, machine: MachineSpec, language: LanguageId, certified: ErrorModel) -> ZooMachine {
    ZooMachine { name: name.to_string(), machine, language, certified }
}

fn check_eps(eps: f64) -> Result<(), ZooError> {
    if eps > 0.0 && eps < 0.5 {
        Ok(())
    } else {
        Err(ZooError::Parameter(format!("eps = {eps} is outside (0, 1/2)")))
    }
}

fn check_pos(what: &str, v: usize) -> Result<(), ZooError> {
    if v == 0 {
        Err(ZooError::Parameter(format!("{what} must be positive")))
    } else {
        Ok(())
    }
}

fn num(x: f64) -> String {
    format_amplitude(C64::new(x, 0.0))
}

fn roster(names: &[String], start: &str, accept: &[&str], reject: &[&str], restart: &[&str]) -> Result<Roster, ZooError> {
    let mut r = Roster::new(names.iter().cloned(), 0);
    r.start = r.idx(start)?;
    for (set, role) in [(accept, Role::Accept), (reject, Role::Reject), (restart, Role::Restart)] {
        for q in set {
            r.set_role(q, role)?;
        }
    }
    Ok(r)
}

fn names(list: &str) -> Vec<String> {
    list.split_whitespace().map(str::to_string).collect()
}

type Column<'a> = (&'a str, &'a str, Vec<(&'a str, &'a str)>);

fn fill_columns(b: &mut UnitaryBuilder, cols: &[Column]) -> Result<(), ZooError> {
    for (sym, src, targets) in cols {
        b.col(sym, src, targets)?;
    }
    Ok(())
}

fn unitary_kw(alphabet: Alphabet, roster: Roster, cols: &[Column]) -> Result<KwqfaSpec, ZooError> {
    let mut b = UnitaryBuilder::new(alphabet, roster);
    fill_columns(&mut b, cols)?;
    let (alphabet, roster, ops) = b.build(Fill::Unitary)?;
    Ok(KwqfaSpec { alphabet, roster, ops })
}

/// One-way KWQFA for L_NH: value exactly ½ on nonmembers and above ½ on members.
pub fn lnh_kwqfa1() -> Result<ZooMachine, ZooError> {
    let mut list = vec!["q0".to_string()];
    for fam in ["q", "p"] {
        list.extend((1..=6).map(|i| format!("{fam}{i}")));
    }
    for fam in ["a", "r"] {
        list.extend((1..=4).map(|i| format!("{fam}{i}")));
    }
    list.extend((1..=6).map(|i| format!("w{i}")));
    let acc: Vec<String> = (1..=18).map(|i| format!("A{i}")).collect();
    let rej: Vec<String> = (1..=18).map(|i| format!("R{i}")).collect();
    list.extend(acc.iter().cloned());
    list.extend(rej.iter().cloned());
    let acc_ref: Vec<&str> = acc.iter().map(String::as_str).collect();
    let rej_ref: Vec<&str> = rej.iter().map(String::as_str).collect();
    let mut r = roster(&list, "q0", &acc_ref, &rej_ref, &[])?;
    r.directions = Some(
        list.iter()
            .map(|n| if n.starts_with(['w', 'A', 'R']) { Direction::Stay } else { Direction::Right })
            .collect(),
    );
    let e = "1/(2*sqrt(2))";
    let ne = "-1/(2*sqrt(2))";
    let split = |next: &'static str, k: &'static str, sign: bool| -> Vec<(&'static str, &'static str)> {
        let (a, rr) = halt_pair(k);
        let c = if sign { Q } else { NQ };
        vec![(next, H), (a, c), (rr, c)]
    };
    let halt = |k: &'static str| -> Vec<(&'static str, &'static str)> {
        let (a, rr) = halt_pair(k);
        vec![(a, H), (rr, H)]
    };
    let mut cols: Vec<Column> = vec![("cent", "q0", vec![("q1", H), ("p1", H)])];
    let a_moves: [(&str, Vec<(&str, &str)>); 26] = [
        ("q1", split("q2", "1", true)),
        ("q2", split("q2", "1", false)),
        ("p1", vec![("w1", "1")]),
        ("w1", split("p2", "2", true)),
        ("p2", vec![("w2", "1")]),
        ("w2", split("p2", "2", false)),
        ("q3", vec![("w3", "1")]),
        ("w3", split("q4", "3", true)),
        ("q4", vec![("w4", "1")]),
        ("w4", split("q4", "3", false)),
        ("p3", split("p4", "4", true)),
        ("p4", split("p4", "4", false)),
        ("q5", vec![("w5", "1")]),
        ("w5", split("q6", "5", true)),
        ("q6", vec![("w6", "1")]),
        ("w6", split("q6", "5", false)),
        ("p5", split("p6", "6", true)),
        ("p6", split("p6", "6", false)),
        ("a1", split("a2", "7", true)),
        ("a2", split("a2", "7", false)),
        ("a3", split("a4", "8", true)),
        ("a4", split("a4", "8", false)),
        ("r1", split("r2", "9", true)),
        ("r2", split("r2", "9", false)),
        ("r3", split("r4", "10", true)),
        ("r4", split("r4", "10", false)),
    ];
    for (src, t) in a_moves {
        cols.push(("a", src, t));
    }
    let b_moves: [(&str, Vec<(&str, &str)>); 20] = [
        ("q1", halt("1")),
        ("q2", vec![("q3", "1")]),
        ("q3", halt("2")),
        ("p1", halt("3")),
        ("p2", vec![("p3", "1")]),
        ("p3", halt("4")),
        ("q4", vec![("q5", Q), ("a1", e), ("r1", e), ("A11", Q), ("R11", Q)]),
        ("q5", halt("5")),
        ("p4", vec![("p5", Q), ("a1", e), ("r1", ne), ("A12", Q), ("R12", Q)]),
        ("p5", halt("6")),
        ("q6", vec![("q5", Q), ("a1", e), ("r1", e), ("A11", NQ), ("R11", NQ)]),
        ("p6", vec![("p5", Q), ("a1", e), ("r1", ne), ("A12", NQ), ("R12", NQ)]),
        ("a2", split("a3", "13", true)),
        ("a1", halt("7")),
        ("a4", split("a3", "13", false)),
        ("a3", halt("8")),
        ("r2", split("r3", "14", true)),
        ("r1", halt("9")),
        ("r4", split("r3", "14", false)),
        ("r3", halt("10")),
    ];
    for (src, t) in b_moves {
        cols.push(("b", src, t));
    }
    let ends = ["q1", "q2", "q3", "p1", "p2", "p3", "q4", "q5", "p4", "p5", "q6", "p6"];
    const K: [&str; 12] = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11", "12"];
    for (src, k) in ends.iter().zip(K) {
        cols.push(("dollar", src, halt(k)));
    }
    cols.push(("dollar", "a1", vec![("A17", "1")]));
    cols.push(("dollar", "a3", vec![("A18", "1")]));
    cols.push(("dollar", "a2", halt("13")));
    cols.push(("dollar", "a4", halt("14")));
    cols.push(("dollar", "r1", vec![("R17", "1")]));
    cols.push(("dollar", "r3", vec![("R18", "1")]));
    cols.push(("dollar", "r2", halt("15")));
    cols.push(("dollar", "r4", halt("16")));
    let kw = unitary_kw(Alphabet::from_chars("ab")?, r, &cols)?;
    Ok(zoo(
        "lnh_kwqfa1",
        MachineSpec::Kwqfa(kw),
        LanguageId::Lnh,
        ErrorModel::Cutpoint { lambda: 0.5, mode: CutpointMode::OneSided },
    ))
}

/// Static names `A{k}` and `R{k}`.
fn halt_pair(k: &'static str) -> (&'static str, &'static str) {
    const A: [&str; 18] = [
        "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "A11", "A12", "A13", "A14", "A15", "A16", "A17",
        "A18",
    ];
    const R: [&str; 18] = [
        "R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9", "R10", "R11", "R12", "R13", "R14", "R15", "R16", "R17",
        "R18",
    ];
    let i: usize = k.parse::<usize>().expect("numeric index") - 1;
    (A[i], R[i])
}

/// Two-state rotation by π/m; acceptance `sin²(iπ/m)` on `a^i`.
pub fn mcqfa_lm(m: usize) -> Result<ZooMachine, ZooError> {
    check_pos("m", m)?;
    let r = roster(&names("q0 q1"), "q0", &["q1"], &[], &[])?;
    let (c, s, ns) = (format!("cos(pi/{m})"), format!("sin(pi/{m})"), format!("-sin(pi/{m})"));
    let mut b = UnitaryBuilder::new(Alphabet::from_chars("a")?, r);
    b.col("a", "q0", &[("q0", &c), ("q1", &s)])?;
    b.col("a", "q1", &[("q0", &ns), ("q1", &c)])?;
    let (alphabet, roster, ops) = b.build(Fill::Unitary)?;
    Ok(zoo(
        "mcqfa_lm",
        MachineSpec::Qfa(QfaSpec { alphabet, roster, ops }),
        LanguageId::Lm(m),
        ErrorModel::Cutpoint { lambda: 0.0, mode: CutpointMode::OneSided },
    ))
}

/// Restart PFA for L_eq with three equiprobable paths and `x = ε²/2`.
pub fn leq_pfa_restart(eps: f64) -> Result<ZooMachine, ZooError> {
    check_eps(eps)?;
    let x = eps * eps / 2.0;
    let list = names("s0 P1a P1b P2a P2b P3a P3b Acc Rej Restart");
    let r = roster(&list, "s0", &["Acc"], &["Rej"], &["Restart"])?;
    let (xs, ys) = (num(x), num(1.0 - x));
    let (x2, y2) = (num(x * x), num(1.0 - x * x));
    let (e2, f2) = (num(eps / 2.0), num(1.0 - eps / 2.0));
    let third = "1/3";
    let mut b = UnitaryBuilder::new(Alphabet::from_chars("ab")?, r);
    b.col("cent", "s0", &[("P1a", third), ("P2a", third), ("P3a", third)])?;
    b.col("a", "P1a", &[("P1a", &xs), ("Restart", &ys)])?;
    b.col("b", "P1a", &[("P1b", &xs), ("Restart", &ys)])?;
    b.col("b", "P1b", &[("P1b", &xs), ("Restart", &ys)])?;
    b.col("a", "P2a", &[("P2a", &x2), ("Restart", &y2)])?;
    b.col("b", "P2a", &[("P2b", "1")])?;
    b.col("b", "P2b", &[("P2b", "1")])?;
    b.col("a", "P3a", &[("P3a", "1")])?;
    b.col("b", "P3a", &[("P3b", &x2), ("Restart", &y2)])?;
    b.col("b", "P3b", &[("P3b", &x2), ("Restart", &y2)])?;
    for q in ["P1b", "P2b", "P3b"] {
        b.col("a", q, &[("Rej", "1")])?;
    }
    for q in ["P1a", "P1b"] {
        b.col("dollar", q, &[("Acc", "1")])?;
    }
    for q in ["P2a", "P2b", "P3a", "P3b"] {
        b.col("dollar", q, &[("Rej", &e2), ("Restart", &f2)])?;
    }
    let (alphabet, roster, ops) = b.build(Fill::Identity)?;
    let spec = RestartSpec::new(RestartInner::Pfa(PfaSpec { alphabet, roster, ops }));
    Ok(zoo("leq_pfa_restart", MachineSpec::Restart(spec), LanguageId::Leq, ErrorModel::Bounded { eps }))
}

/// Six-state restart KWQFA for A_m: `p_a = ε^{2|w|+2}` on words ending in a, `p_r ≥ ε^{2m+5}`.
pub fn am_restart(m: usize, eps: f64) -> Result<ZooMachine, ZooError> {
    check_pos("m", m)?;
    check_eps(eps)?;
    let r = roster(&names("q0 q1 A R I1 I2"), "q0", &["A"], &["R"], &["I1", "I2"])?;
    let e = num(eps);
    let tail = eps.powi(2 * m as i32 + 5);
    let (rr, i1) = (num(tail.sqrt()), num((1.0 - eps * eps - tail).sqrt()));
    let side = num((0.5 - eps * eps).sqrt());
    let mut b = UnitaryBuilder::new(Alphabet::from_chars("ab")?, r);
    b.col("cent", "q0", &[("q1", &e), ("R", &rr), ("I1", &i1)])?;
    for (sym, dst) in [("a", "q0"), ("b", "q1")] {
        b.col(sym, "q0", &[(dst, &e), ("I1", &side), ("I2", H)])?;
        b.col(sym, "q1", &[(dst, &e), ("I1", &side), ("I2", NH)])?;
    }
    b.col("dollar", "q0", &[("A", "1")])?;
    b.col("dollar", "q1", &[("R", "1")])?;
    let (alphabet, roster, ops) = b.build(Fill::Unitary)?;
    let spec = RestartSpec::new(RestartInner::Kwqfa(KwqfaSpec { alphabet, roster, ops }));
    Ok(zoo("am_restart", MachineSpec::Restart(spec), LanguageId::Am(m), ErrorModel::Bounded { eps }))
}

/// Constant-gap reduction followed by the accept/reject swap.
fn constant_gap(kw: &KwqfaSpec, eps: f64, c: f64) -> Result<RestartSpec, ZooError> {
    Ok(swap_accept_reject(&kw_to_restart(kw, eps, c, GapMode::Constant)?))
}

fn kw_to_restart(kw: &KwqfaSpec, eps: f64, c: f64, mode: GapMode) -> Result<RestartSpec, ZooError> {
    Ok(kwqfa_to_restart(kw, eps, c, mode)?)
}

/// Seven-state restart KWQFA for B_m from the rotation by π/m.
pub fn bm_restart(m: usize, eps: f64) -> Result<ZooMachine, ZooError> {
    check_pos("m", m)?;
    check_eps(eps)?;
    let r = roster(&names("q0 q1 A R"), "q0", &["A"], &["R"], &[])?;
    let (c, s, ns) = (format!("cos(pi/{m})"), format!("sin(pi/{m})"), format!("-sin(pi/{m})"));
    let cols: Vec<Column> = vec![
        ("a", "q0", vec![("q0", &c), ("q1", &s)]),
        ("a", "q1", vec![("q0", &ns), ("q1", &c)]),
        ("dollar", "q0", vec![("R", "1")]),
        ("dollar", "q1", vec![("A", "1")]),
    ];
    let kw = unitary_kw(Alphabet::from_chars("a")?, r, &cols)?;
    let gap = (std::f64::consts::PI / m as f64).sin().powi(2);
    let cc = if gap > 1e-12 && 1.0 / gap > 1.0 { 1.0 / gap } else { 2.0 };
    let spec = constant_gap(&kw, eps, cc)?;
    Ok(zoo("bm_restart", MachineSpec::Restart(spec), LanguageId::Bm(m), ErrorModel::MembersExact { eps }))
}

/// Seven-state restart KWQFA for C_m from a length-encoding amplitude `(1/√2)^{m+1}`.
pub fn cm_restart(m: usize, eps: f64) -> Result<ZooMachine, ZooError> {
    check_pos("m", m)?;
    check_eps(eps)?;
    let r = roster(&names("q0 q1 A R"), "q0", &["A"], &["R"], &[])?;
    let lead = 0.5f64.powi(m as i32 + 1);
    let (amp, rest) = (num(lead.sqrt()), num((0.5 - lead).sqrt()));
    let mut cols: Vec<Column> = vec![
        ("cent", "q0", vec![("q0", H), ("q1", &amp), ("R", &rest)]),
        ("dollar", "q0", vec![("A", H), ("R", H)]),
        ("dollar", "q1", vec![("A", NH), ("R", H)]),
    ];
    for sym in ["a", "b"] {
        cols.push((sym, "q0", vec![("q0", H), ("R", H)]));
        cols.push((sym, "q1", vec![("q1", "1")]));
    }
    let kw = unitary_kw(Alphabet::from_chars("ab")?, r, &cols)?;
    let spec = constant_gap(&kw, eps, 2f64.powi(m as i32 + 6))?;
    Ok(zoo("cm_restart", MachineSpec::Restart(spec), LanguageId::Cm(m), ErrorModel::MembersExact { eps }))
}

/// Fifteen-state restart machine for L_upal: exponential-gap reduction of a 12-state KWQFA
/// that accepts exactly the nonmembers with positive probability.
pub fn upal_restart(eps: f64) -> Result<ZooMachine, ZooError> {
    check_eps(eps)?;
    let r = roster(&names("p0 p1 p2 q0 q1 q2 A1 A2 A3 R1 R2 R3"), "q0", &["A1", "A2", "A3"], &["R1", "R2", "R3"], &[])?;
    let cols: Vec<Column> = vec![
        ("cent", "q0", vec![("p0", H), ("q0", H)]),
        ("a", "p0", vec![("p1", Q), ("R1", Q), ("R2", H)]),
        ("a", "p1", vec![("p1", Q), ("R1", Q), ("R2", NH)]),
        ("a", "p2", vec![("A1", "1")]),
        ("a", "q0", vec![("q1", H), ("R3", H)]),
        ("a", "q1", vec![("q1", H), ("R3", NH)]),
        ("a", "q2", vec![("A2", "1")]),
        ("b", "p0", vec![("A1", "1")]),
        ("b", "p1", vec![("p2", H), ("R1", H)]),
        ("b", "p2", vec![("p2", H), ("R1", NH)]),
        ("b", "q0", vec![("A2", "1")]),
        ("b", "q1", vec![("q2", Q), ("R2", Q), ("R3", H)]),
        ("b", "q2", vec![("q2", Q), ("R2", Q), ("R3", NH)]),
        ("dollar", "p0", vec![("R1", "1")]),
        ("dollar", "p1", vec![("A1", "1")]),
        ("dollar", "p2", vec![("R2", H), ("A2", H)]),
        ("dollar", "q0", vec![("R3", "1")]),
        ("dollar", "q1", vec![("A3", "1")]),
        ("dollar", "q2", vec![("R2", H), ("A2", NH)]),
    ];
    let kw = unitary_kw(Alphabet::from_chars("ab")?, r, &cols)?;
    let spec = kw_to_restart(&kw, eps, 2f64.powf(1.5), GapMode::Exponential { scale: 2f64.powi(-6) })?;
    Ok(zoo(
        "upal_restart",
        MachineSpec::Restart(swap_accept_reject(&spec)),
        LanguageId::Lupal,
        ErrorModel::MembersExact { eps },
    ))
}

/// Fifteen-state restart machine for L_pal built the same way.
pub fn pal_restart(eps: f64) -> Result<ZooMachine, ZooError> {
    check_eps(eps)?;
    let r = roster(
        &names("p1 p2 q0 q1 q2 q3 A R1 R2 R3 R4 R5"),
        "q0",
        &["A"],
        &["R1", "R2", "R3", "R4", "R5"],
        &[],
    )?;
    let (big, small) = ("sqrt(2/3)", "1/sqrt(6)");
    let (t, nt) = ("1/sqrt(3)", "-1/sqrt(3)");
    let cols: Vec<Column> = vec![
        ("cent", "q0", vec![("p1", H), ("q1", H)]),
        ("a", "p1", vec![("p1", big), ("R1", nt)]),
        ("a", "p2", vec![("p1", small), ("p2", small), ("R1", t), ("R2", t)]),
        ("a", "q1", vec![("q1", small), ("q3", small), ("R3", nt), ("R4", t)]),
        ("a", "q2", vec![("q2", big), ("R5", t)]),
        ("a", "q3", vec![("q3", big), ("R3", t)]),
        ("b", "p1", vec![("p1", small), ("p2", small), ("R1", t), ("R2", t)]),
        ("b", "p2", vec![("p2", big), ("R1", nt)]),
        ("b", "q1", vec![("q1", small), ("q2", small), ("R3", nt), ("R4", t)]),
        ("b", "q2", vec![("q2", big), ("R3", t)]),
        ("b", "q3", vec![("q3", big), ("R5", t)]),
        ("dollar", "p1", vec![("R1", "1")]),
        ("dollar", "p2", vec![("A", H), ("R2", H)]),
        ("dollar", "q1", vec![("R3", "1")]),
        ("dollar", "q2", vec![("A", NH), ("R2", H)]),
        ("dollar", "q3", vec![("R4", "1")]),
    ];
    let kw = unitary_kw(Alphabet::from_chars("ab")?, r, &cols)?;
    let spec = kw_to_restart(&kw, eps, 3.0, GapMode::Exponential { scale: 1.0 / 16.0 })?;
    Ok(zoo(
        "pal_restart",
        MachineSpec::Restart(swap_accept_reject(&spec)),
        LanguageId::Lpal,
        ErrorModel::MembersExact { eps },
    ))
}

struct WomTable {
    spec: WomSpec,
}

impl WomTable {
    fn new(variant: WomVariant, alphabet: &str, states: &str, start: &str, accept: &[&str]) -> Result<Self, ZooError> {
        let r = roster(&names(states), start, accept, &[], &[])?;
        Ok(WomTable {
            spec: WomSpec {
                variant,
                alphabet: Alphabet::from_chars(alphabet)?,
                roster: r,
                tape: names("# a b"),
                registers: names("w1 w2"),
                rows: Vec::new(),
            },
        })
    }

    fn row(&mut self, syms: &[&str], src: &str, dst: &str, action: StorageAction, reg: usize, amp: f64) -> Result<(), ZooError> {
        for sym in syms {
            let s = self.spec.alphabet.tilde_index(sym).ok_or_else(|| ZooError::UnknownName(sym.to_string()))?;
            self.spec.rows.push(WomRow {
                src: self.spec.roster.idx(src)?,
                sym: s,
                dst: self.spec.roster.idx(dst)?,
                action,
                reg,
                amp: C64::new(amp, 0.0),
                expr: None,
            });
        }
        Ok(())
    }

    fn finish(mut self) -> WomSpec {
        self.spec.fill_missing();
        self.spec
    }
}

/// Push-only-stack QFA for `w c w`: two paths push the halves and interfere at the end.
pub fn ltwin_pos() -> Result<ZooMachine, ZooError> {
    let mut t = WomTable::new(WomVariant::Pos, "abc", "q1 q2 q3 p1 p2 p3", "q1", &["q2"])?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let none = StorageAction::Push(None);
    let (pa, pb) = (StorageAction::Push(Some(1)), StorageAction::Push(Some(2)));
    t.row(&["cent"], "q1", "q1", none, 0, h)?;
    t.row(&["cent"], "q1", "p1", none, 0, h)?;
    t.row(&["a"], "q1", "q1", pa, 0, 1.0)?;
    t.row(&["b"], "q1", "q1", pb, 0, 1.0)?;
    t.row(&["c"], "q1", "q2", none, 0, 1.0)?;
    t.row(&["a", "b"], "q2", "q2", none, 0, 1.0)?;
    t.row(&["c"], "q2", "q3", none, 0, 1.0)?;
    t.row(&["a", "b", "c"], "q3", "q3", none, 1, 1.0)?;
    t.row(&["a", "b"], "p1", "p1", none, 0, 1.0)?;
    t.row(&["c"], "p1", "p2", none, 0, 1.0)?;
    t.row(&["a"], "p2", "p2", pa, 0, 1.0)?;
    t.row(&["b"], "p2", "p2", pb, 0, 1.0)?;
    t.row(&["c"], "p2", "p3", none, 0, 1.0)?;
    t.row(&["a", "b", "c"], "p3", "p3", none, 1, 1.0)?;
    t.row(&["dollar"], "q1", "q1", none, 0, 1.0)?;
    t.row(&["dollar"], "p1", "p1", none, 0, 1.0)?;
    t.row(&["dollar"], "q2", "q2", none, 0, h)?;
    t.row(&["dollar"], "q2", "q3", none, 1, h)?;
    t.row(&["dollar"], "p2", "q2", none, 0, h)?;
    t.row(&["dollar"], "p2", "q3", none, 1, -h)?;
    t.row(&["dollar"], "q3", "q3", none, 0, 1.0)?;
    t.row(&["dollar"], "p3", "p3", none, 0, 1.0)?;
    Ok(zoo("ltwin_pos", MachineSpec::Wom(t.finish()), LanguageId::Ltwin, ErrorModel::MembersExact { eps: 0.5 }))
}

/// Write-only-tape QFA for `w c wᴿ`: one path writes `w` moving right, the other writes the
/// suffix moving left, and the tapes coincide exactly on members.
pub fn lrev_wom() -> Result<ZooMachine, ZooError> {
    let mut t = WomTable::new(WomVariant::Wom, "abc", "q1 s1 s2 s3 t1 t2 t3 acc rej", "q1", &["acc"])?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let w = |g: Option<usize>, d| StorageAction::Write(g, d);
    let stay = w(None, Direction::Stay);
    t.row(&["cent"], "q1", "s1", stay, 0, h)?;
    t.row(&["cent"], "q1", "t1", stay, 0, h)?;
    for (sym, g) in [("a", 1), ("b", 2)] {
        t.row(&[sym], "s1", "s1", w(Some(g), Direction::Right), 0, 1.0)?;
        t.row(&[sym], "t1", "t1", w(None, Direction::Right), 0, 1.0)?;
        t.row(&[sym], "s2", "s2", w(None, Direction::Left), 0, 1.0)?;
        t.row(&[sym], "t2", "t2", w(Some(g), Direction::Left), 0, 1.0)?;
    }
    t.row(&["c"], "s1", "s2", w(None, Direction::Left), 0, 1.0)?;
    t.row(&["c"], "t1", "t2", w(None, Direction::Left), 0, 1.0)?;
    t.row(&["c"], "s2", "s3", stay, 0, 1.0)?;
    t.row(&["c"], "t2", "t3", stay, 0, 1.0)?;
    for q in ["s3", "t3"] {
        t.row(&["a", "b", "c", "dollar"], q, q, stay, 1, 1.0)?;
    }
    t.row(&["dollar"], "s2", "acc", stay, 0, h)?;
    t.row(&["dollar"], "s2", "rej", stay, 1, h)?;
    t.row(&["dollar"], "t2", "acc", stay, 0, h)?;
    t.row(&["dollar"], "t2", "rej", stay, 1, -h)?;
    for q in ["s1", "t1"] {
        t.row(&["dollar"], q, q, stay, 0, 1.0)?;
    }
    Ok(zoo("lrev_wom", MachineSpec::Wom(t.finish()), LanguageId::Lrev, ErrorModel::MembersExact { eps: 0.5 }))
}

struct CounterTable {
    spec: CounterSpec,
}

impl CounterTable {
    fn new(kind: CounterKind, alphabet: Alphabet, states: &str, start: &str, accept: &[&str], counters: usize) -> Result<Self, ZooError> {
        let r = roster(&names(states), start, accept, &[], &[])?;
        Ok(CounterTable {
            spec: CounterSpec { kind, alphabet, roster: r, counters, max_inc: 1, registers: names("w1"), rows: Vec::new() },
        })
    }

    fn row(&mut self, syms: &[&str], src: &str, dst: &str, incs: &[i64], guard: Option<bool>) -> Result<(), ZooError> {
        for sym in syms {
            let s = self.spec.alphabet.tilde_index(sym).ok_or_else(|| ZooError::UnknownName(sym.to_string()))?;
            self.spec.rows.push(CounterRow {
                src: self.spec.roster.idx(src)?,
                sym: s,
                dst: self.spec.roster.idx(dst)?,
                incs: incs.to_vec(),
                guard,
                reg: 0,
                amp: C64::new(1.0, 0.0),
                expr: None,
            });
        }
        Ok(())
    }

    fn finish(mut self) -> CounterSpec {
        self.spec.rows.sort_by_key(|r| (r.sym, r.src));
        self.spec
    }
}

/// Deterministic one-blind-counter machine for L_eq.
pub fn leq_d1bca() -> Result<ZooMachine, ZooError> {
    let mut t = CounterTable::new(CounterKind::Deterministic, Alphabet::from_chars("ab")?, "q1 q2 q3", "q1", &["q1", "q2"], 1)?;
    t.row(&["cent"], "q1", "q1", &[0], None)?;
    t.row(&["a"], "q1", "q1", &[1], None)?;
    t.row(&["b"], "q1", "q2", &[-1], None)?;
    t.row(&["a"], "q2", "q3", &[0], None)?;
    t.row(&["b"], "q2", "q2", &[-1], None)?;
    t.row(&["a", "b"], "q3", "q3", &[0], None)?;
    for q in ["q1", "q2", "q3"] {
        t.row(&["dollar"], q, q, &[0], None)?;
    }
    Ok(zoo("leq_d1bca", MachineSpec::Counter(t.finish()), LanguageId::Leq, ErrorModel::Bounded { eps: 0.0 }))
}

/// Deterministic `k`-blind-counter machine for L_eq-k with one state.
pub fn leqk_dkbca(k: usize) -> Result<ZooMachine, ZooError> {
    check_pos("k", k)?;
    let lang = LanguageId::LeqK(k);
    let mut t = CounterTable::new(CounterKind::Deterministic, lang.alphabet(), "q", "q", &["q"], k)?;
    t.row(&["cent", "dollar"], "q", "q", &vec![0; k], None)?;
    for i in 0..k {
        let mut inc = vec![0; k];
        inc[i] = 1;
        t.row(&[&format!("a{}", i + 1)], "q", "q", &inc, None)?;
        inc[i] = -1;
        t.row(&[&format!("b{}", i + 1)], "q", "q", &inc, None)?;
    }
    Ok(zoo("leqk_dkbca", MachineSpec::Counter(t.finish()), lang, ErrorModel::Bounded { eps: 0.0 }))
}

/// One-reversal deterministic one-counter machine for L_NH: counts `x`, then counts down
/// through the following blocks and accepts once the counter is seen at zero on a b.
pub fn lnh_rev1_d1ca() -> Result<ZooMachine, ZooError> {
    let states = "q1 q_inc q_b1 dead1 q_dec q_sep2 q_found q_fa dead2";
    let mut t = CounterTable::new(CounterKind::OneReversal, Alphabet::from_chars("ab")?, states, "q1", &["q_found"], 1)?;
    let any = None;
    t.row(&["cent"], "q1", "q1", &[0], any)?;
    t.row(&["a"], "q1", "q_inc", &[1], any)?;
    t.row(&["b"], "q1", "dead1", &[0], any)?;
    t.row(&["a"], "q_inc", "q_inc", &[1], any)?;
    t.row(&["b"], "q_inc", "q_b1", &[0], any)?;
    t.row(&["a"], "q_b1", "q_dec", &[-1], any)?;
    t.row(&["b"], "q_b1", "dead1", &[0], any)?;
    t.row(&["a"], "q_dec", "q_dec", &[-1], Some(false))?;
    t.row(&["a"], "q_dec", "dead2", &[0], Some(true))?;
    t.row(&["b"], "q_dec", "q_found", &[0], Some(true))?;
    t.row(&["b"], "q_dec", "q_sep2", &[0], Some(false))?;
    t.row(&["a"], "q_sep2", "q_dec", &[-1], Some(false))?;
    t.row(&["a"], "q_sep2", "dead2", &[0], Some(true))?;
    t.row(&["b"], "q_sep2", "dead2", &[0], any)?;
    t.row(&["a"], "q_found", "q_fa", &[0], any)?;
    t.row(&["b"], "q_found", "dead2", &[0], any)?;
    t.row(&["a"], "q_fa", "q_fa", &[0], any)?;
    t.row(&["b"], "q_fa", "q_found", &[0], any)?;
    t.row(&["a", "b"], "dead1", "dead1", &[0], any)?;
    t.row(&["a", "b"], "dead2", "dead2", &[0], any)?;
    for q in names(states) {
        t.row(&["dollar"], &q, &q, &[0], any)?;
    }
    Ok(zoo("lnh_rev1_d1ca", MachineSpec::Counter(t.finish()), LanguageId::Lnh, ErrorModel::Bounded { eps: 0.0 }))
}

/// Every builder at the parameters used by the test suites.
pub fn sample_machines() -> Result<Vec<ZooMachine>, ZooError> {
    Ok(vec![
        lnh_kwqfa1()?,
        mcqfa_lm(3)?,
        leq_pfa_restart(0.1)?,
        am_restart(2, 0.25)?,
        bm_restart(3, 0.25)?,
        cm_restart(2, 0.25)?,
        upal_restart(0.2)?,
        pal_restart(0.2)?,
        ltwin_pos()?,
        lrev_wom()?,
        leq_d1bca()?,
        leqk_dkbca(2)?,
        lnh_rev1_d1ca()?,
    ])
}
