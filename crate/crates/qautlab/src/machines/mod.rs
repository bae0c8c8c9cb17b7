//! Data model for every supported machine kind.

mod complete;
mod validate;
pub mod random;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::numerics::{identity, CMatrix, NumericsError, RMatrix, RVector, C64};

pub use complete::{complete_unitary, Fill, UnitaryBuilder};
pub use validate::{compose_operator, validate, ValidationReport, Violation, ViolationClass};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MachineError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("invalid alphabet: {0}")]
    Alphabet(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("cannot complete to a unitary: {0}")]
    Completion(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Names accepted for the left end-marker.
pub const CENT_NAMES: [&str; 2] = ["cent", "¢"];
/// Names accepted for the right end-marker.
pub const DOLLAR_NAMES: [&str; 2] = ["dollar", "$"];

/// A word as a sequence of letter indices (0-based, end-markers excluded).
pub type Word = Vec<usize>;

/// Input alphabet. The tape alphabet adds `cent` at index 0 and `dollar` at index `len()+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, MachineError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(MachineError::Alphabet("alphabet is empty".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(|ch| ch.is_whitespace() || ",#.;:=[]".contains(ch)) {
                return Err(MachineError::Alphabet(format!("bad symbol `{s}`")));
            }
            if CENT_NAMES.contains(&s.as_str()) || DOLLAR_NAMES.contains(&s.as_str()) {
                return Err(MachineError::Alphabet(format!("`{s}` is reserved for an end-marker")));
            }
            if symbols[..i].contains(s) {
                return Err(MachineError::Alphabet(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// One symbol per character of `chars`.
    pub fn from_chars(chars: &str) -> Result<Self, MachineError> {
        Alphabet::new(chars.chars().map(|ch| ch.to_string()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn tilde_len(&self) -> usize {
        self.symbols.len() + 2
    }

    pub fn dollar(&self) -> usize {
        self.symbols.len() + 1
    }

    /// Name of a tape symbol, with end-markers spelled `cent` and `dollar`.
    pub fn tilde_name(&self, t: usize) -> &str {
        if t == 0 {
            "cent"
        } else if t == self.dollar() {
            "dollar"
        } else {
            &self.symbols[t - 1]
        }
    }

    pub fn tilde_index(&self, name: &str) -> Option<usize> {
        if CENT_NAMES.contains(&name) {
            Some(0)
        } else if DOLLAR_NAMES.contains(&name) {
            Some(self.dollar())
        } else {
            self.letter(name).map(|i| i + 1)
        }
    }

    pub fn letter(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    fn single_glyph(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Splits text into letters: per character for single-glyph alphabets, otherwise on `sep`.
    pub fn parse_word(&self, text: &str, sep: Option<&str>) -> Result<Word, MachineError> {
        let parts: Vec<String> = match sep {
            Some(sep) if !sep.is_empty() => {
                if text.is_empty() {
                    Vec::new()
                } else {
                    text.split(sep).map(str::to_string).collect()
                }
            }
            _ => {
                if !self.single_glyph() {
                    return Err(MachineError::Alphabet(
                        "alphabet has multi-glyph symbols; a word separator is required".into(),
                    ));
                }
                text.chars().map(|ch| ch.to_string()).collect()
            }
        };
        parts
            .iter()
            .map(|p| self.letter(p).ok_or_else(|| MachineError::UnknownSymbol(p.clone())))
            .collect()
    }

    pub fn render(&self, w: &[usize]) -> String {
        let sep = if self.single_glyph() { "" } else { "," };
        w.iter().map(|&i| self.symbols[i].as_str()).collect::<Vec<_>>().join(sep)
    }

    /// Tape image ¢w$ as tape-symbol indices.
    pub fn tilde(&self, w: &[usize]) -> Vec<usize> {
        let mut t = Vec::with_capacity(w.len() + 2);
        t.push(0);
        t.extend(w.iter().map(|&i| i + 1));
        t.push(self.dollar());
        t
    }

    /// All words of length at most `max_len`, shortest first, then lexicographic in declared order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let k = self.len();
        let mut out = vec![Vec::new()];
        let mut layer: Vec<Word> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * k);
            for w in &layer {
                for s in 0..k {
                    let mut v = w.clone();
                    v.push(s);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Nonhalting,
    Accept,
    Reject,
    Restart,
    PostAccept,
    PostReject,
}

impl Role {
    pub fn is_halting(self) -> bool {
        matches!(self, Role::Accept | Role::Reject | Role::Restart)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Left,
    Stay,
    Right,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Stay => "stay",
            Direction::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "left" | "L" | "-1" => Some(Direction::Left),
            "stay" | "S" | "0" => Some(Direction::Stay),
            "right" | "R" | "+1" | "1" => Some(Direction::Right),
            _ => None,
        }
    }

    pub fn delta(self) -> i64 {
        match self {
            Direction::Left => -1,
            Direction::Stay => 0,
            Direction::Right => 1,
        }
    }
}

/// State names, start state, one role per state and optional head directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roster {
    pub names: Vec<String>,
    pub start: usize,
    pub roles: Vec<Role>,
    pub directions: Option<Vec<Direction>>,
}

impl Roster {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>, start: usize) -> Self {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let roles = vec![Role::Nonhalting; names.len()];
        Roster { names, start, roles, directions: None }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn idx(&self, name: &str) -> Result<usize, MachineError> {
        self.index(name).ok_or_else(|| MachineError::UnknownState(name.to_string()))
    }

    pub fn with_role(&self, role: Role) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.roles[i] == role).collect()
    }

    pub fn set_role(&mut self, name: &str, role: Role) -> Result<(), MachineError> {
        let i = self.idx(name)?;
        self.roles[i] = role;
        Ok(())
    }

    pub fn direction(&self, q: usize) -> Direction {
        self.directions.as_ref().map_or(Direction::Right, |d| d[q])
    }
}

/// Position of one matrix entry: tape symbol, operation element, row, column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntryKey {
    pub sym: usize,
    pub elem: usize,
    pub row: usize,
    pub col: usize,
}

/// Per tape symbol, a list of operation elements (one for PFA and KWQFA kinds).
/// Entry `[dst, src]` is the amplitude or probability of moving from `src` to `dst`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpTable {
    pub ops: Vec<Vec<CMatrix>>,
    /// Source expressions for entries that were written symbolically.
    pub exprs: BTreeMap<EntryKey, String>,
}

impl OpTable {
    pub fn single(mats: Vec<CMatrix>) -> Self {
        OpTable { ops: mats.into_iter().map(|m| vec![m]).collect(), exprs: BTreeMap::new() }
    }

    pub fn identity(syms: usize, n: usize) -> Self {
        OpTable::single(vec![identity(n); syms])
    }

    pub fn mat(&self, sym: usize) -> &CMatrix {
        &self.ops[sym][0]
    }

    pub fn dim(&self) -> usize {
        self.ops.first().and_then(|e| e.first()).map_or(0, |m| m.ncols())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfaSpec {
    pub alphabet: Alphabet,
    pub roster: Roster,
    pub ops: OpTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GfaSpec {
    pub alphabet: Alphabet,
    pub names: Vec<String>,
    /// One matrix per letter (no end-markers).
    pub mats: Vec<RMatrix>,
    pub v0: RVector,
    pub f: RVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfaSpec {
    pub alphabet: Alphabet,
    pub roster: Roster,
    pub ops: OpTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KwqfaSpec {
    pub alphabet: Alphabet,
    pub roster: Roster,
    pub ops: OpTable,
}

impl KwqfaSpec {
    pub fn one_way(&self) -> bool {
        self.roster.directions.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Halting states are observed after every symbol.
    Step,
    /// Halting states are observed once, after the right end-marker.
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RestartInner {
    Pfa(PfaSpec),
    Kwqfa(KwqfaSpec),
    Qfa(QfaSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartSpec {
    pub inner: RestartInner,
    pub measure: Measure,
    /// Restart states that re-enter somewhere other than the start state.
    pub targets: BTreeMap<usize, usize>,
}

impl RestartSpec {
    pub fn new(inner: RestartInner) -> Self {
        let measure = match inner {
            RestartInner::Qfa(_) => Measure::End,
            _ => Measure::Step,
        };
        RestartSpec { inner, measure, targets: BTreeMap::new() }
    }

    pub fn roster(&self) -> &Roster {
        match &self.inner {
            RestartInner::Pfa(p) => &p.roster,
            RestartInner::Kwqfa(k) => &k.roster,
            RestartInner::Qfa(q) => &q.roster,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match &self.inner {
            RestartInner::Pfa(p) => &p.alphabet,
            RestartInner::Kwqfa(k) => &k.alphabet,
            RestartInner::Qfa(q) => &q.alphabet,
        }
    }

    pub fn target(&self, q: usize) -> usize {
        self.targets.get(&q).copied().unwrap_or(self.roster().start)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PostInner {
    Pfa(PfaSpec),
    Qfa(QfaSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostSpec {
    pub inner: PostInner,
    /// Verdict when the postselected mass vanishes: `Some(true)` accepts.
    pub latvian: Option<bool>,
}

impl PostSpec {
    pub fn roster(&self) -> &Roster {
        match &self.inner {
            PostInner::Pfa(p) => &p.roster,
            PostInner::Qfa(q) => &q.roster,
        }
    }

    pub fn roster_mut(&mut self) -> &mut Roster {
        match &mut self.inner {
            PostInner::Pfa(p) => &mut p.roster,
            PostInner::Qfa(q) => &mut q.roster,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match &self.inner {
            PostInner::Pfa(p) => &p.alphabet,
            PostInner::Qfa(q) => &q.alphabet,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterKind {
    /// Deterministic blind counters.
    Deterministic,
    /// Probabilistic blind counters.
    Probabilistic,
    /// One deterministic counter whose zero status is readable, reversing at most once.
    OneReversal,
    /// Quantum blind counter.
    Quantum,
}

impl CounterKind {
    pub fn name(self) -> &'static str {
        match self {
            CounterKind::Deterministic => "deterministic",
            CounterKind::Probabilistic => "probabilistic",
            CounterKind::OneReversal => "one-reversal",
            CounterKind::Quantum => "quantum",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "deterministic" => Some(CounterKind::Deterministic),
            "probabilistic" => Some(CounterKind::Probabilistic),
            "one-reversal" => Some(CounterKind::OneReversal),
            "quantum" => Some(CounterKind::Quantum),
            _ => None,
        }
    }

    pub fn blind(self) -> bool {
        !matches!(self, CounterKind::OneReversal)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterRow {
    pub src: usize,
    /// Tape-symbol index.
    pub sym: usize,
    pub dst: usize,
    pub incs: Vec<i64>,
    /// For readable counters: `Some(true)` fires only when the counter is zero.
    pub guard: Option<bool>,
    pub reg: usize,
    pub amp: C64,
    pub expr: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterSpec {
    pub kind: CounterKind,
    pub alphabet: Alphabet,
    pub roster: Roster,
    pub counters: usize,
    /// Largest admissible |increment|.
    pub max_inc: i64,
    pub registers: Vec<String>,
    pub rows: Vec<CounterRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WomVariant {
    /// Increment-only counter with increments in `0..=max_inc`.
    Ioc { max_inc: i64 },
    /// Push-only stack.
    Pos,
    /// Two-way write-only tape.
    Wom,
}

/// What a transition does to the storage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StorageAction {
    Inc(i64),
    /// `None` leaves the stack untouched.
    Push(Option<usize>),
    /// Optional written tape symbol, then a head move.
    Write(Option<usize>, Direction),
}

impl StorageAction {
    pub fn noop(variant: WomVariant) -> Self {
        match variant {
            WomVariant::Ioc { .. } => StorageAction::Inc(0),
            WomVariant::Pos => StorageAction::Push(None),
            WomVariant::Wom => StorageAction::Write(None, Direction::Stay),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WomRow {
    pub src: usize,
    pub sym: usize,
    pub dst: usize,
    pub action: StorageAction,
    pub reg: usize,
    pub amp: C64,
    pub expr: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WomSpec {
    pub variant: WomVariant,
    pub alphabet: Alphabet,
    pub roster: Roster,
    /// Storage alphabet; index 0 is the blank `#`.
    pub tape: Vec<String>,
    pub registers: Vec<String>,
    pub rows: Vec<WomRow>,
}

impl WomSpec {
    /// Adds a self-loop with no storage effect, writing a dedicated register symbol,
    /// for every (state, symbol) pair that has no rows yet.
    pub fn fill_missing(&mut self) {
        let mut have = std::collections::BTreeSet::new();
        for r in &self.rows {
            have.insert((r.src, r.sym));
        }
        let fill_reg = match self.registers.iter().position(|r| r == "wfill") {
            Some(i) => i,
            None => {
                self.registers.push("wfill".into());
                self.registers.len() - 1
            }
        };
        let noop = StorageAction::noop(self.variant);
        for q in 0..self.roster.len() {
            for s in 0..self.alphabet.tilde_len() {
                if !have.contains(&(q, s)) {
                    self.rows.push(WomRow {
                        src: q,
                        sym: s,
                        dst: q,
                        action: noop,
                        reg: fill_reg,
                        amp: C64::new(1.0, 0.0),
                        expr: None,
                    });
                }
            }
        }
        self.rows.sort_by_key(|r| (r.sym, r.src));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MachineSpec {
    Pfa(PfaSpec),
    Gfa(GfaSpec),
    Qfa(QfaSpec),
    Kwqfa(KwqfaSpec),
    Restart(RestartSpec),
    Post(PostSpec),
    Counter(CounterSpec),
    Wom(WomSpec),
}

impl MachineSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            MachineSpec::Pfa(_) => "pfa",
            MachineSpec::Gfa(_) => "gfa",
            MachineSpec::Qfa(_) => "qfa",
            MachineSpec::Kwqfa(_) => "kwqfa",
            MachineSpec::Restart(_) => "restart",
            MachineSpec::Post(_) => "post",
            MachineSpec::Counter(_) => "counter",
            MachineSpec::Wom(_) => "wom",
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            MachineSpec::Pfa(p) => &p.alphabet,
            MachineSpec::Gfa(g) => &g.alphabet,
            MachineSpec::Qfa(q) => &q.alphabet,
            MachineSpec::Kwqfa(k) => &k.alphabet,
            MachineSpec::Restart(r) => r.alphabet(),
            MachineSpec::Post(p) => p.alphabet(),
            MachineSpec::Counter(c) => &c.alphabet,
            MachineSpec::Wom(w) => &w.alphabet,
        }
    }

    /// Number of internal states.
    pub fn state_count(&self) -> usize {
        match self {
            MachineSpec::Pfa(p) => p.roster.len(),
            MachineSpec::Gfa(g) => g.names.len(),
            MachineSpec::Qfa(q) => q.roster.len(),
            MachineSpec::Kwqfa(k) => k.roster.len(),
            MachineSpec::Restart(r) => r.roster().len(),
            MachineSpec::Post(p) => p.roster().len(),
            MachineSpec::Counter(c) => c.roster.len(),
            MachineSpec::Wom(w) => w.roster.len(),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Nonhalting => "nonhalting",
            Role::Accept => "accept",
            Role::Reject => "reject",
            Role::Restart => "restart",
            Role::PostAccept => "post-accept",
            Role::PostReject => "post-reject",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_reserved_and_duplicates() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a", "cent"]).is_err());
        assert!(Alphabet::new(["$"]).is_err());
    }

    #[test]
    fn tilde_layout() {
        let a = Alphabet::from_chars("ab").unwrap();
        assert_eq!(a.tilde(&[1, 0]), vec![0, 2, 1, 3]);
        assert_eq!(a.tilde_name(0), "cent");
        assert_eq!(a.tilde_name(3), "dollar");
        assert_eq!(a.tilde_index("$"), Some(3));
    }

    #[test]
    fn shortlex_enumeration() {
        let a = Alphabet::from_chars("ab").unwrap();
        let ws: Vec<String> = a.words_up_to(2).iter().map(|w| a.render(w)).collect();
        assert_eq!(ws, ["", "a", "b", "aa", "ab", "ba", "bb"]);
        assert_eq!(a.words_up_to(10).len(), 2047);
    }

    #[test]
    fn word_parsing() {
        let a = Alphabet::from_chars("ab").unwrap();
        assert_eq!(a.parse_word("abba", None).unwrap(), vec![0, 1, 1, 0]);
        assert!(a.parse_word("abc", None).is_err());
        let m = Alphabet::new(["a1", "b1"]).unwrap();
        assert!(m.parse_word("a1b1", None).is_err());
        assert_eq!(m.parse_word("a1,b1", Some(",")).unwrap(), vec![0, 1]);
        assert_eq!(m.render(&[0, 1]), "a1,b1");
        assert_eq!(m.parse_word("", Some(",")).unwrap(), Vec::<usize>::new());
    }
}
