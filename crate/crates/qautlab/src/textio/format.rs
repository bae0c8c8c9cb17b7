use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use super::expr::{format_amplitude, keep_expr, parse_amplitude};
use crate::machines::{
    Alphabet, CounterKind, CounterRow, CounterSpec, Direction, EntryKey, GfaSpec, KwqfaSpec, MachineSpec, Measure,
    OpTable, PfaSpec, PostInner, PostSpec, QfaSpec, RestartInner, RestartSpec, Role, Roster, StorageAction,
    WomRow, WomSpec, WomVariant,
};
use crate::numerics::{identity, zeros, CMatrix, RMatrix, RVector, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

fn perr<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, col, message: message.into() })
}

/// Header keys that every document of the given kind must carry.
pub const REQUIRED_KEYS: &[(&str, &[&str])] = &[
    ("pfa", &["kind", "format", "alphabet", "states", "start"]),
    ("gfa", &["kind", "format", "alphabet", "states"]),
    ("qfa", &["kind", "format", "alphabet", "states", "start"]),
    ("kwqfa", &["kind", "format", "alphabet", "states", "start"]),
    ("restart", &["kind", "format", "alphabet", "states", "start", "inner"]),
    ("post", &["kind", "format", "alphabet", "states", "start", "inner"]),
    ("counter", &["kind", "format", "alphabet", "states", "start", "variant", "counters"]),
    ("wom", &["kind", "format", "alphabet", "states", "start", "variant", "register"]),
];

struct Section<'a> {
    name: String,
    line: usize,
    rows: Vec<(usize, usize, &'a str)>,
}

struct Doc<'a> {
    machine_line: usize,
    header: BTreeMap<String, (String, usize, usize)>,
    sections: Vec<Section<'a>>,
}

impl<'a> Doc<'a> {
    fn split(src: &'a str) -> Result<Self, ParseError> {
        let mut doc = Doc { machine_line: 0, header: BTreeMap::new(), sections: Vec::new() };
        let mut in_machine = false;
        for (i, raw) in src.lines().enumerate() {
            let no = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let text = body.trim();
            if text.is_empty() {
                continue;
            }
            let col = body.len() - body.trim_start().len() + 1;
            if let Some(inner) = text.strip_prefix('[') {
                let Some(name) = inner.strip_suffix(']') else {
                    return perr(no, col, "unterminated section header");
                };
                let name = name.trim().to_string();
                if name == "machine" {
                    if doc.machine_line != 0 {
                        return perr(no, col, "duplicate [machine] section");
                    }
                    doc.machine_line = no;
                    in_machine = true;
                } else {
                    if doc.machine_line == 0 {
                        return perr(no, col, "the [machine] section must come first");
                    }
                    in_machine = false;
                    doc.sections.push(Section { name, line: no, rows: Vec::new() });
                }
                continue;
            }
            if in_machine {
                let Some((k, v)) = text.split_once('=') else {
                    return perr(no, col, "expected `key = value`");
                };
                let key = k.trim().to_string();
                if doc.header.contains_key(&key) {
                    return perr(no, col, format!("duplicate header key `{key}`"));
                }
                let vcol = col + text.find('=').unwrap_or(0) + 1;
                doc.header.insert(key, (v.trim().to_string(), no, vcol));
            } else if let Some(sec) = doc.sections.last_mut() {
                sec.rows.push((no, col, text));
            } else {
                return perr(no, col, "content outside any section");
            }
        }
        if doc.machine_line == 0 {
            return perr(1, 1, "missing [machine] section");
        }
        Ok(doc)
    }

    fn get(&self, key: &str) -> Option<(&str, usize, usize)> {
        self.header.get(key).map(|(v, l, c)| (v.as_str(), *l, *c))
    }

    fn req(&self, key: &str) -> Result<(&str, usize, usize), ParseError> {
        self.get(key)
            .ok_or_else(|| ParseError { line: self.machine_line, col: 1, message: format!("missing header key `{key}`") })
    }

    fn list(&self, key: &str) -> Vec<String> {
        self.get(key).map(|(v, _, _)| v.split_whitespace().map(str::to_string).collect()).unwrap_or_default()
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), ParseError> {
        for (k, (_, l, _)) in &self.header {
            if !allowed.contains(&k.as_str()) {
                return perr(*l, 1, format!("unknown header key `{k}`"));
            }
        }
        Ok(())
    }
}

struct RawRow {
    line: usize,
    src: (String, usize),
    dst: (String, usize),
    expr: (String, usize),
    opts: Vec<(String, String, usize)>,
}

fn parse_row(line: usize, col: usize, text: &str, arrow: bool) -> Result<RawRow, ParseError> {
    let (src, rest, rest_off) = if arrow {
        let Some(p) = text.find("->") else {
            return perr(line, col, "expected `src -> dst : amplitude`");
        };
        (text[..p].trim(), &text[p + 2..], p + 2)
    } else {
        ("", text, 0)
    };
    let Some(q) = rest.find(':') else {
        return perr(line, col + rest_off, "expected `:` before the amplitude");
    };
    let dst = rest[..q].trim();
    let after = &rest[q + 1..];
    let expr_off = rest_off + q + 1;
    let mut parts = after.split(';');
    let expr_text = parts.next().unwrap_or("");
    let mut opts = Vec::new();
    let mut off = expr_off + expr_text.len() + 1;
    for p in parts {
        let Some((k, v)) = p.split_once('=') else {
            return perr(line, col + off, format!("option `{}` needs `key=value`", p.trim()));
        };
        opts.push((k.trim().to_string(), v.trim().to_string(), col + off));
        off += p.len() + 1;
    }
    if arrow && src.is_empty() {
        return perr(line, col, "missing source state");
    }
    if dst.is_empty() {
        return perr(line, col + rest_off, "missing state");
    }
    let lead = expr_text.len() - expr_text.trim_start().len();
    Ok(RawRow {
        line,
        src: (src.to_string(), col),
        dst: (dst.to_string(), col + rest_off),
        expr: (expr_text.trim().to_string(), col + expr_off + lead),
        opts,
    })
}

fn amp(row: &RawRow) -> Result<(C64, Option<String>), ParseError> {
    let (text, col) = &row.expr;
    let v = parse_amplitude(text).map_err(|e| ParseError {
        line: row.line,
        col: col + e.offset,
        message: format!("bad amplitude: {}", e.message),
    })?;
    Ok((v, keep_expr(text, v)))
}

fn state(roster: &Roster, name: &(String, usize), line: usize) -> Result<usize, ParseError> {
    roster.index(&name.0).ok_or_else(|| ParseError {
        line,
        col: name.1,
        message: format!("undeclared state `{}`", name.0),
    })
}

fn valid_state_name(n: &str) -> bool {
    !n.is_empty() && !n.contains("->") && !n.chars().any(|ch| ch.is_whitespace() || ",;:=[]#".contains(ch))
}

fn alphabet(doc: &Doc) -> Result<Alphabet, ParseError> {
    let (_, l, c) = doc.req("alphabet")?;
    Alphabet::new(doc.list("alphabet")).map_err(|e| ParseError { line: l, col: c, message: e.to_string() })
}

fn names(doc: &Doc) -> Result<Vec<String>, ParseError> {
    let (_, l, c) = doc.req("states")?;
    let names = doc.list("states");
    if names.is_empty() {
        return perr(l, c, "no states declared");
    }
    let mut seen = BTreeSet::new();
    for n in &names {
        if !valid_state_name(n) {
            return perr(l, c, format!("bad state name `{n}`"));
        }
        if !seen.insert(n.as_str()) {
            return perr(l, c, format!("state `{n}` declared twice"));
        }
    }
    Ok(names)
}

const ROLE_KEYS: [(&str, Role); 5] = [
    ("accept", Role::Accept),
    ("reject", Role::Reject),
    ("restart", Role::Restart),
    ("post_accept", Role::PostAccept),
    ("post_reject", Role::PostReject),
];

fn roster(doc: &Doc, role_keys: &[&str]) -> Result<Roster, ParseError> {
    let names = names(doc)?;
    let (start, l, c) = doc.req("start")?;
    let Some(s) = names.iter().position(|n| n == start) else {
        return perr(l, c, format!("start state `{start}` is not declared"));
    };
    let mut r = Roster::new(names, s);
    for (key, role) in ROLE_KEYS {
        if !role_keys.contains(&key) {
            continue;
        }
        let Some((_, l, c)) = doc.get(key) else { continue };
        for n in doc.list(key) {
            let Some(i) = r.index(&n) else {
                return perr(l, c, format!("`{key}` names undeclared state `{n}`"));
            };
            if r.roles[i] != Role::Nonhalting {
                return perr(l, c, format!("state `{n}` has two roles ({} and {key})", r.roles[i]));
            }
            r.roles[i] = role;
        }
    }
    if let Some((_, l, c)) = doc.get("directions") {
        let mut dirs = vec![Direction::Right; r.len()];
        let mut seen = BTreeSet::new();
        for item in doc.list("directions") {
            let Some((n, d)) = item.split_once(':') else {
                return perr(l, c, format!("direction `{item}` should read `state:dir`"));
            };
            let Some(i) = r.index(n) else {
                return perr(l, c, format!("`directions` names undeclared state `{n}`"));
            };
            let Some(d) = Direction::parse(d) else {
                return perr(l, c, format!("unknown direction `{d}`"));
            };
            if !seen.insert(i) {
                return perr(l, c, format!("direction for `{n}` given twice"));
            }
            dirs[i] = d;
        }
        r.directions = Some(dirs);
    }
    Ok(r)
}

/// Symbol index and optional element index of a `transitions.<sym>[.<k>]` section.
fn section_target(a: &Alphabet, sec: &Section, letters_only: bool) -> Result<(usize, Option<usize>), ParseError> {
    let Some(rest) = sec.name.strip_prefix("transitions.") else {
        return perr(sec.line, 1, format!("unknown section `[{}]`", sec.name));
    };
    let (sym, k) = match rest.rsplit_once('.') {
        Some((s, k)) if k.chars().all(|ch| ch.is_ascii_digit()) && !k.is_empty() => {
            (s, Some(k.parse::<usize>().map_err(|_| ParseError { line: sec.line, col: 1, message: "bad index".into() })?))
        }
        _ => (rest, None),
    };
    let Some(t) = a.tilde_index(sym) else {
        return perr(sec.line, 1, format!("unknown symbol `{sym}` in section name"));
    };
    if letters_only && (t == 0 || t == a.dollar()) {
        return perr(sec.line, 1, "end-marker sections are not allowed here");
    }
    Ok((t, k))
}

fn no_opts(row: &RawRow) -> Result<(), ParseError> {
    match row.opts.first() {
        Some((k, _, c)) => perr(row.line, *c, format!("option `{k}` is not allowed for this kind")),
        None => Ok(()),
    }
}

fn ops(doc: &Doc, a: &Alphabet, r: &Roster, multi: bool) -> Result<OpTable, ParseError> {
    let n = r.len();
    let mut tables: Vec<BTreeMap<usize, CMatrix>> = vec![BTreeMap::new(); a.tilde_len()];
    let mut exprs = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for sec in &doc.sections {
        let (s, k) = section_target(a, sec, false)?;
        if k.is_some() && !multi {
            return perr(sec.line, 1, "operation-element index given for a single-operator kind");
        }
        let k = k.unwrap_or(0);
        let m = tables[s].entry(k).or_insert_with(|| zeros(n, n));
        for &(line, col, text) in &sec.rows {
            let row = parse_row(line, col, text, true)?;
            no_opts(&row)?;
            let src = state(r, &row.src, line)?;
            let dst = state(r, &row.dst, line)?;
            if !seen.insert((s, k, src, dst)) {
                return perr(line, col, "duplicate transition row");
            }
            let (v, e) = amp(&row)?;
            m[(dst, src)] = v;
            if let Some(e) = e {
                if v.norm() > 0.0 {
                    exprs.insert(EntryKey { sym: s, elem: k, row: dst, col: src }, e);
                }
            }
        }
    }
    let ops = tables
        .into_iter()
        .map(|t| {
            if t.is_empty() {
                vec![identity(n)]
            } else {
                let count = t.keys().max().map_or(0, |m| m + 1);
                (0..count).map(|k| t.get(&k).cloned().unwrap_or_else(|| zeros(n, n))).collect()
            }
        })
        .collect();
    Ok(OpTable { ops, exprs })
}

fn real(row: &RawRow) -> Result<f64, ParseError> {
    let (v, _) = amp(row)?;
    if v.im != 0.0 {
        return perr(row.line, row.expr.1, "generalized automata take real entries");
    }
    Ok(v.re)
}

fn parse_gfa(doc: &Doc) -> Result<GfaSpec, ParseError> {
    doc.check_keys(&["kind", "format", "alphabet", "states"])?;
    let a = alphabet(doc)?;
    let names = names(doc)?;
    let r = Roster::new(names.clone(), 0);
    let n = names.len();
    let mut mats = vec![RMatrix::identity(n, n); a.len()];
    let mut touched = vec![false; a.len()];
    let mut v0 = RVector::zeros(n);
    let mut f = RVector::zeros(n);
    let mut seen = BTreeSet::new();
    for sec in &doc.sections {
        if sec.name == "initial" || sec.name == "final" {
            for &(line, col, text) in &sec.rows {
                let row = parse_row(line, col, text, false)?;
                no_opts(&row)?;
                let q = state(&r, &row.dst, line)?;
                if !seen.insert((sec.name.clone(), q, 0)) {
                    return perr(line, col, "duplicate row");
                }
                let v = real(&row)?;
                if sec.name == "initial" {
                    v0[q] = v;
                } else {
                    f[q] = v;
                }
            }
            continue;
        }
        let (s, k) = section_target(&a, sec, true)?;
        if k.is_some() {
            return perr(sec.line, 1, "operation-element index given for a generalized automaton");
        }
        let l = s - 1;
        if !touched[l] {
            mats[l] = RMatrix::zeros(n, n);
            touched[l] = true;
        }
        for &(line, col, text) in &sec.rows {
            let row = parse_row(line, col, text, true)?;
            no_opts(&row)?;
            let src = state(&r, &row.src, line)?;
            let dst = state(&r, &row.dst, line)?;
            if !seen.insert((sec.name.clone(), src, dst + 1)) {
                return perr(line, col, "duplicate transition row");
            }
            mats[l][(dst, src)] = real(&row)?;
        }
    }
    Ok(GfaSpec { alphabet: a, names, mats, v0, f })
}

fn parse_int(v: &str, l: usize, c: usize, what: &str) -> Result<i64, ParseError> {
    v.trim().parse::<i64>().map_err(|_| ParseError { line: l, col: c, message: format!("`{what}` must be an integer") })
}

fn registers(doc: &Doc) -> Result<Vec<String>, ParseError> {
    let regs = doc.list("register");
    if let Some((_, l, c)) = doc.get("register") {
        let mut seen = BTreeSet::new();
        for g in &regs {
            if !seen.insert(g) {
                return perr(l, c, format!("register symbol `{g}` declared twice"));
            }
        }
        if regs.is_empty() {
            return perr(l, c, "empty register alphabet");
        }
        Ok(regs)
    } else {
        Ok(vec!["w1".to_string()])
    }
}

fn reg_index(regs: &[String], v: &str, line: usize, col: usize) -> Result<usize, ParseError> {
    regs.iter()
        .position(|g| g == v)
        .ok_or_else(|| ParseError { line, col, message: format!("undeclared register symbol `{v}`") })
}

fn parse_counter(doc: &Doc) -> Result<CounterSpec, ParseError> {
    doc.check_keys(&[
        "kind", "format", "alphabet", "states", "start", "accept", "reject", "variant", "counters", "increments",
        "register",
    ])?;
    let a = alphabet(doc)?;
    let r = roster(doc, &["accept", "reject"])?;
    let (v, l, c) = doc.req("variant")?;
    let Some(kind) = CounterKind::parse(v) else {
        return perr(l, c, format!("unknown counter variant `{v}`"));
    };
    let (v, l, c) = doc.req("counters")?;
    let k = parse_int(v, l, c, "counters")?;
    if k < 1 {
        return perr(l, c, "at least one counter is required");
    }
    let max_inc = match doc.get("increments") {
        Some((v, l, c)) => parse_int(v, l, c, "increments")?,
        None => 1,
    };
    let regs = registers(doc)?;
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for sec in &doc.sections {
        let (s, e) = section_target(&a, sec, false)?;
        if e.is_some() {
            return perr(sec.line, 1, "operation-element index given for a counter machine");
        }
        for &(line, col, text) in &sec.rows {
            let raw = parse_row(line, col, text, true)?;
            let src = state(&r, &raw.src, line)?;
            let dst = state(&r, &raw.dst, line)?;
            let (amp, expr) = amp(&raw)?;
            let mut incs = vec![0i64; k as usize];
            let mut guard = None;
            let mut reg = 0;
            for (key, val, oc) in &raw.opts {
                match key.as_str() {
                    "inc" => {
                        let parts: Result<Vec<i64>, _> = val.split(',').map(|x| x.trim().parse::<i64>()).collect();
                        match parts {
                            Ok(p) if p.len() == k as usize => incs = p,
                            _ => return perr(line, *oc, format!("`inc` needs {k} comma-separated integers")),
                        }
                    }
                    "if" => {
                        guard = Some(match val.as_str() {
                            "zero" => true,
                            "nonzero" => false,
                            _ => return perr(line, *oc, "`if` takes zero or nonzero"),
                        })
                    }
                    "reg" => reg = reg_index(&regs, val, line, *oc)?,
                    _ => return perr(line, *oc, format!("unknown option `{key}`")),
                }
            }
            if !seen.insert((s, src, dst, incs.clone(), guard, reg)) {
                return perr(line, col, "duplicate transition row");
            }
            rows.push(CounterRow { src, sym: s, dst, incs, guard, reg, amp, expr });
        }
    }
    Ok(CounterSpec { kind, alphabet: a, roster: r, counters: k as usize, max_inc, registers: regs, rows })
}

fn parse_wom(doc: &Doc) -> Result<WomSpec, ParseError> {
    doc.check_keys(&[
        "kind", "format", "alphabet", "states", "start", "accept", "reject", "variant", "increments", "tape",
        "register",
    ])?;
    let a = alphabet(doc)?;
    let r = roster(doc, &["accept", "reject"])?;
    let (v, l, c) = doc.req("variant")?;
    let variant = match v {
        "ioc" => {
            let m = match doc.get("increments") {
                Some((v, l, c)) => parse_int(v, l, c, "increments")?,
                None => 1,
            };
            if m < 1 {
                return perr(l, c, "`increments` must be positive");
            }
            WomVariant::Ioc { max_inc: m }
        }
        "pos" => WomVariant::Pos,
        "wom" => WomVariant::Wom,
        _ => return perr(l, c, format!("unknown storage variant `{v}`")),
    };
    let mut tape = vec!["#".to_string()];
    if let Some((_, l, c)) = doc.get("tape") {
        for g in doc.list("tape") {
            if tape.contains(&g) || g == "eps" {
                return perr(l, c, format!("bad tape symbol `{g}`"));
            }
            tape.push(g);
        }
    }
    let regs = registers(doc)?;
    let tape_index = |g: &str, line: usize, col: usize| -> Result<Option<usize>, ParseError> {
        if g == "eps" {
            return Ok(None);
        }
        match tape.iter().position(|t| t == g) {
            Some(i) if i > 0 => Ok(Some(i)),
            _ => perr(line, col, format!("undeclared tape symbol `{g}`")),
        }
    };
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for sec in &doc.sections {
        let (s, e) = section_target(&a, sec, false)?;
        if e.is_some() {
            return perr(sec.line, 1, "operation-element index given for a storage machine");
        }
        for &(line, col, text) in &sec.rows {
            let raw = parse_row(line, col, text, true)?;
            let src = state(&r, &raw.src, line)?;
            let dst = state(&r, &raw.dst, line)?;
            let (amp, expr) = amp(&raw)?;
            let mut action = StorageAction::noop(variant);
            let mut reg = 0;
            for (key, val, oc) in &raw.opts {
                match (key.as_str(), variant) {
                    ("inc", WomVariant::Ioc { .. }) => action = StorageAction::Inc(parse_int(val, line, *oc, "inc")?),
                    ("push", WomVariant::Pos) => action = StorageAction::Push(tape_index(val, line, *oc)?),
                    ("write", WomVariant::Wom) => {
                        let StorageAction::Write(_, d) = action else { unreachable!() };
                        action = StorageAction::Write(tape_index(val, line, *oc)?, d);
                    }
                    ("move", WomVariant::Wom) => {
                        let StorageAction::Write(g, _) = action else { unreachable!() };
                        let Some(d) = Direction::parse(val) else {
                            return perr(line, *oc, format!("unknown direction `{val}`"));
                        };
                        action = StorageAction::Write(g, d);
                    }
                    ("reg", _) => reg = reg_index(&regs, val, line, *oc)?,
                    _ => return perr(line, *oc, format!("option `{key}` is not allowed for this variant")),
                }
            }
            if !seen.insert((s, src, dst, action, reg)) {
                return perr(line, col, "duplicate transition row");
            }
            rows.push(WomRow { src, sym: s, dst, action, reg, amp, expr });
        }
    }
    Ok(WomSpec { variant, alphabet: a, roster: r, tape, registers: regs, rows })
}

pub fn parse_machine(src: &str) -> Result<MachineSpec, ParseError> {
    let doc = Doc::split(src)?;
    let (kind, kl, kc) = doc.req("kind")?;
    let Some((_, required)) = REQUIRED_KEYS.iter().find(|(k, _)| *k == kind) else {
        return perr(kl, kc, format!("unknown machine kind `{kind}`"));
    };
    for key in required.iter() {
        doc.req(key)?;
    }
    let (fmt_v, fl, fc) = doc.req("format")?;
    if fmt_v != "1" {
        return perr(fl, fc, format!("unsupported format `{fmt_v}`"));
    }
    let base = ["kind", "format", "alphabet", "states", "start"];
    let with = |extra: &[&'static str]| -> Vec<&'static str> { base.iter().chain(extra.iter()).copied().collect() };
    Ok(match kind {
        "pfa" => {
            doc.check_keys(&with(&["accept", "reject"]))?;
            let a = alphabet(&doc)?;
            let r = roster(&doc, &["accept", "reject"])?;
            let o = ops(&doc, &a, &r, false)?;
            MachineSpec::Pfa(PfaSpec { alphabet: a, roster: r, ops: o })
        }
        "qfa" => {
            doc.check_keys(&with(&["accept", "reject"]))?;
            let a = alphabet(&doc)?;
            let r = roster(&doc, &["accept", "reject"])?;
            let o = ops(&doc, &a, &r, true)?;
            MachineSpec::Qfa(QfaSpec { alphabet: a, roster: r, ops: o })
        }
        "kwqfa" => {
            doc.check_keys(&with(&["accept", "reject", "directions"]))?;
            let a = alphabet(&doc)?;
            let r = roster(&doc, &["accept", "reject"])?;
            let o = ops(&doc, &a, &r, false)?;
            MachineSpec::Kwqfa(KwqfaSpec { alphabet: a, roster: r, ops: o })
        }
        "gfa" => MachineSpec::Gfa(parse_gfa(&doc)?),
        "restart" => {
            doc.check_keys(&with(&["accept", "reject", "restart", "directions", "inner", "measure", "restart_to"]))?;
            let a = alphabet(&doc)?;
            let r = roster(&doc, &["accept", "reject", "restart"])?;
            let (inner, il, ic) = doc.req("inner")?;
            let inner = match inner {
                "pfa" => RestartInner::Pfa(PfaSpec { ops: ops(&doc, &a, &r, false)?, alphabet: a, roster: r }),
                "kwqfa" => RestartInner::Kwqfa(KwqfaSpec { ops: ops(&doc, &a, &r, false)?, alphabet: a, roster: r }),
                "qfa" => RestartInner::Qfa(QfaSpec { ops: ops(&doc, &a, &r, true)?, alphabet: a, roster: r }),
                _ => return perr(il, ic, format!("unknown inner kind `{inner}`")),
            };
            let mut spec = RestartSpec::new(inner);
            if let Some((m, l, c)) = doc.get("measure") {
                spec.measure = match m {
                    "step" => Measure::Step,
                    "end" => Measure::End,
                    _ => return perr(l, c, format!("unknown measure `{m}`")),
                };
            }
            if let Some((_, l, c)) = doc.get("restart_to") {
                let roster = spec.roster().clone();
                for item in doc.list("restart_to") {
                    let Some((x, y)) = item.split_once(':') else {
                        return perr(l, c, format!("`{item}` should read `state:state`"));
                    };
                    let (Some(x), Some(y)) = (roster.index(x), roster.index(y)) else {
                        return perr(l, c, format!("`restart_to` entry `{item}` names an undeclared state"));
                    };
                    spec.targets.insert(x, y);
                }
            }
            MachineSpec::Restart(spec)
        }
        "post" => {
            doc.check_keys(&with(&["post_accept", "post_reject", "inner", "latvian"]))?;
            let a = alphabet(&doc)?;
            let r = roster(&doc, &["post_accept", "post_reject"])?;
            let (inner, il, ic) = doc.req("inner")?;
            let inner = match inner {
                "pfa" => PostInner::Pfa(PfaSpec { ops: ops(&doc, &a, &r, false)?, alphabet: a, roster: r }),
                "qfa" => PostInner::Qfa(QfaSpec { ops: ops(&doc, &a, &r, true)?, alphabet: a, roster: r }),
                _ => return perr(il, ic, format!("unknown inner kind `{inner}`")),
            };
            let latvian = match doc.get("latvian") {
                None => None,
                Some(("accept", _, _)) => Some(true),
                Some(("reject", _, _)) => Some(false),
                Some((v, l, c)) => return perr(l, c, format!("`latvian` takes accept or reject, got `{v}`")),
            };
            MachineSpec::Post(PostSpec { inner, latvian })
        }
        "counter" => MachineSpec::Counter(parse_counter(&doc)?),
        "wom" => MachineSpec::Wom(parse_wom(&doc)?),
        _ => unreachable!(),
    })
}

fn header(out: &mut String, key: &str, value: &str) {
    let _ = writeln!(out, "{key} = {value}");
}

fn roles_header(out: &mut String, r: &Roster, keys: &[&str]) {
    for (key, role) in ROLE_KEYS {
        if !keys.contains(&key) {
            continue;
        }
        let list: Vec<&str> = r.with_role(role).iter().map(|&i| r.names[i].as_str()).collect();
        if !list.is_empty() {
            header(out, key, &list.join(" "));
        }
    }
    if let Some(d) = &r.directions {
        let items: Vec<String> = d.iter().enumerate().map(|(i, d)| format!("{}:{}", r.names[i], d.name())).collect();
        header(out, "directions", &items.join(" "));
    }
}

fn common_header(out: &mut String, kind: &str, a: &Alphabet, r: &Roster) {
    header(out, "kind", kind);
    header(out, "format", "1");
    header(out, "alphabet", &a.symbols().join(" "));
    header(out, "states", &r.names.join(" "));
    header(out, "start", &r.names[r.start]);
}

fn entry_text(exprs: &BTreeMap<EntryKey, String>, key: EntryKey, v: C64) -> String {
    exprs.get(&key).cloned().unwrap_or_else(|| format_amplitude(v))
}

fn write_ops(out: &mut String, a: &Alphabet, r: &Roster, ops: &OpTable, multi: bool) {
    for (s, elems) in ops.ops.iter().enumerate() {
        for (k, m) in elems.iter().enumerate() {
            let _ = writeln!(out);
            if multi {
                let _ = writeln!(out, "[transitions.{}.{k}]", a.tilde_name(s));
            } else {
                let _ = writeln!(out, "[transitions.{}]", a.tilde_name(s));
            }
            for src in 0..m.ncols() {
                for dst in 0..m.nrows() {
                    let v = m[(dst, src)];
                    if v.norm() == 0.0 {
                        continue;
                    }
                    let t = entry_text(&ops.exprs, EntryKey { sym: s, elem: k, row: dst, col: src }, v);
                    let _ = writeln!(out, "{} -> {} : {t}", r.names[src], r.names[dst]);
                }
            }
        }
    }
}

fn row_amp(amp: C64, expr: &Option<String>) -> String {
    expr.clone().unwrap_or_else(|| format_amplitude(amp))
}

/// Canonical text: header first, then one section per tape symbol in the order ¢, Σ, $.
pub fn serialize_machine(spec: &MachineSpec) -> String {
    let mut out = String::new();
    out.push_str("[machine]\n");
    match spec {
        MachineSpec::Pfa(p) => {
            common_header(&mut out, "pfa", &p.alphabet, &p.roster);
            roles_header(&mut out, &p.roster, &["accept", "reject"]);
            write_ops(&mut out, &p.alphabet, &p.roster, &p.ops, false);
        }
        MachineSpec::Qfa(q) => {
            common_header(&mut out, "qfa", &q.alphabet, &q.roster);
            roles_header(&mut out, &q.roster, &["accept", "reject"]);
            write_ops(&mut out, &q.alphabet, &q.roster, &q.ops, true);
        }
        MachineSpec::Kwqfa(k) => {
            common_header(&mut out, "kwqfa", &k.alphabet, &k.roster);
            roles_header(&mut out, &k.roster, &["accept", "reject"]);
            write_ops(&mut out, &k.alphabet, &k.roster, &k.ops, false);
        }
        MachineSpec::Gfa(g) => {
            header(&mut out, "kind", "gfa");
            header(&mut out, "format", "1");
            header(&mut out, "alphabet", &g.alphabet.symbols().join(" "));
            header(&mut out, "states", &g.names.join(" "));
            for (name, v) in [("initial", &g.v0), ("final", &g.f)] {
                let _ = writeln!(out, "\n[{name}]");
                for (i, x) in v.iter().enumerate() {
                    if *x != 0.0 {
                        let _ = writeln!(out, "{} : {x:?}", g.names[i]);
                    }
                }
            }
            for (l, m) in g.mats.iter().enumerate() {
                let _ = writeln!(out, "\n[transitions.{}]", g.alphabet.symbols()[l]);
                for src in 0..m.ncols() {
                    for dst in 0..m.nrows() {
                        let x = m[(dst, src)];
                        if x != 0.0 {
                            let _ = writeln!(out, "{} -> {} : {x:?}", g.names[src], g.names[dst]);
                        }
                    }
                }
            }
        }
        MachineSpec::Restart(rs) => {
            let (inner, a, r) = match &rs.inner {
                RestartInner::Pfa(p) => ("pfa", &p.alphabet, &p.roster),
                RestartInner::Kwqfa(k) => ("kwqfa", &k.alphabet, &k.roster),
                RestartInner::Qfa(q) => ("qfa", &q.alphabet, &q.roster),
            };
            common_header(&mut out, "restart", a, r);
            header(&mut out, "inner", inner);
            header(&mut out, "measure", if rs.measure == Measure::Step { "step" } else { "end" });
            roles_header(&mut out, r, &["accept", "reject", "restart"]);
            if !rs.targets.is_empty() {
                let items: Vec<String> =
                    rs.targets.iter().map(|(x, y)| format!("{}:{}", r.names[*x], r.names[*y])).collect();
                header(&mut out, "restart_to", &items.join(" "));
            }
            match &rs.inner {
                RestartInner::Pfa(p) => write_ops(&mut out, a, r, &p.ops, false),
                RestartInner::Kwqfa(k) => write_ops(&mut out, a, r, &k.ops, false),
                RestartInner::Qfa(q) => write_ops(&mut out, a, r, &q.ops, true),
            }
        }
        MachineSpec::Post(ps) => {
            let (inner, a, r) = match &ps.inner {
                PostInner::Pfa(p) => ("pfa", &p.alphabet, &p.roster),
                PostInner::Qfa(q) => ("qfa", &q.alphabet, &q.roster),
            };
            common_header(&mut out, "post", a, r);
            header(&mut out, "inner", inner);
            roles_header(&mut out, r, &["post_accept", "post_reject"]);
            if let Some(l) = ps.latvian {
                header(&mut out, "latvian", if l { "accept" } else { "reject" });
            }
            match &ps.inner {
                PostInner::Pfa(p) => write_ops(&mut out, a, r, &p.ops, false),
                PostInner::Qfa(q) => write_ops(&mut out, a, r, &q.ops, true),
            }
        }
        MachineSpec::Counter(c) => {
            common_header(&mut out, "counter", &c.alphabet, &c.roster);
            header(&mut out, "variant", c.kind.name());
            header(&mut out, "counters", &c.counters.to_string());
            header(&mut out, "increments", &c.max_inc.to_string());
            header(&mut out, "register", &c.registers.join(" "));
            roles_header(&mut out, &c.roster, &["accept", "reject"]);
            for s in 0..c.alphabet.tilde_len() {
                let rows: Vec<&CounterRow> = c.rows.iter().filter(|r| r.sym == s).collect();
                if rows.is_empty() {
                    continue;
                }
                let _ = writeln!(out, "\n[transitions.{}]", c.alphabet.tilde_name(s));
                for r in rows {
                    let incs: Vec<String> = r.incs.iter().map(|v| v.to_string()).collect();
                    let _ = write!(
                        out,
                        "{} -> {} : {} ; inc={}",
                        c.roster.names[r.src],
                        c.roster.names[r.dst],
                        row_amp(r.amp, &r.expr),
                        incs.join(",")
                    );
                    if let Some(g) = r.guard {
                        let _ = write!(out, " ; if={}", if g { "zero" } else { "nonzero" });
                    }
                    let _ = writeln!(out, " ; reg={}", c.registers[r.reg]);
                }
            }
        }
        MachineSpec::Wom(w) => {
            common_header(&mut out, "wom", &w.alphabet, &w.roster);
            match w.variant {
                WomVariant::Ioc { max_inc } => {
                    header(&mut out, "variant", "ioc");
                    header(&mut out, "increments", &max_inc.to_string());
                }
                WomVariant::Pos => header(&mut out, "variant", "pos"),
                WomVariant::Wom => header(&mut out, "variant", "wom"),
            }
            if w.tape.len() > 1 {
                header(&mut out, "tape", &w.tape[1..].join(" "));
            }
            header(&mut out, "register", &w.registers.join(" "));
            roles_header(&mut out, &w.roster, &["accept", "reject"]);
            let tape = |g: Option<usize>| g.map_or("eps".to_string(), |g| w.tape[g].clone());
            for s in 0..w.alphabet.tilde_len() {
                let rows: Vec<&WomRow> = w.rows.iter().filter(|r| r.sym == s).collect();
                if rows.is_empty() {
                    continue;
                }
                let _ = writeln!(out, "\n[transitions.{}]", w.alphabet.tilde_name(s));
                for r in rows {
                    let _ = write!(
                        out,
                        "{} -> {} : {}",
                        w.roster.names[r.src],
                        w.roster.names[r.dst],
                        row_amp(r.amp, &r.expr)
                    );
                    match r.action {
                        StorageAction::Inc(k) => {
                            let _ = write!(out, " ; inc={k}");
                        }
                        StorageAction::Push(g) => {
                            if g.is_some() {
                                let _ = write!(out, " ; push={}", tape(g));
                            }
                        }
                        StorageAction::Write(g, d) => {
                            let _ = write!(out, " ; write={} ; move={}", tape(g), d.name());
                        }
                    }
                    let _ = writeln!(out, " ; reg={}", w.registers[r.reg]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# two-state machine
[machine]
kind = kwqfa
format = 1
alphabet = a
states = q0 q1 A R
start = q0
accept = A
reject = R

[transitions.a]
q0 -> q1 : 1/sqrt(2)
q0 -> R : 1/sqrt(2)
q1 -> q0 : 1
";

    #[test]
    fn parses_sample() {
        let spec = parse_machine(SAMPLE).unwrap();
        let MachineSpec::Kwqfa(k) = &spec else { panic!() };
        assert_eq!(k.roster.len(), 4);
        assert_eq!(k.ops.ops.len(), 3);
        assert_eq!(k.ops.mat(0), &identity(4));
        assert_eq!(k.ops.exprs.len(), 3);
    }

    #[test]
    fn missing_start_names_the_key() {
        let src = SAMPLE.replace("start = q0\n", "");
        let e = parse_machine(&src).unwrap_err();
        assert!(e.message.contains("`start`"), "{e}");
    }

    #[test]
    fn undeclared_state_has_line() {
        let src = SAMPLE.replace("q1 -> q0 : 1", "q1 -> q9 : 1");
        let e = parse_machine(&src).unwrap_err();
        assert_eq!(e.line, 14);
        assert!(e.message.contains("q9"));
    }

    #[test]
    fn duplicate_rows_rejected() {
        let src = format!("{SAMPLE}q1 -> q0 : 1\n");
        let e = parse_machine(&src).unwrap_err();
        assert!(e.message.contains("duplicate"));
    }

    #[test]
    fn round_trip_is_stable() {
        let spec = parse_machine(SAMPLE).unwrap();
        let text = serialize_machine(&spec);
        assert!(text.starts_with("[machine]\nkind = kwqfa\n"));
        let again = parse_machine(&text).unwrap();
        assert_eq!(again, spec);
        assert_eq!(serialize_machine(&again), text);
    }

    #[test]
    fn bad_amplitude_points_into_the_line() {
        let src = SAMPLE.replace("q1 -> q0 : 1", "q1 -> q0 : 1/(2-2)");
        let e = parse_machine(&src).unwrap_err();
        assert_eq!(e.line, 14);
        assert!(e.col > 10);
    }
}
