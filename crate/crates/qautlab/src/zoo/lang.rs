use std::fmt;
use std::str::FromStr;

use super::ZooError;
use crate::machines::{Alphabet, Word};

/// Languages with brute-force membership oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LanguageId {
    /// `a^x b a^{y_1} b … a^{y_t} b` with all exponents positive and some prefix sum of the `y_i` equal to `x`.
    Lnh,
    /// `aⁿbⁿ`, `n ≥ 0`.
    Leq,
    /// Words with unequally many a's and b's.
    Lneq,
    /// `aⁿbⁿ`, `n ≥ 0`, as the unary-pair language of the restart section.
    Lupal,
    Lpal,
    /// `w c w`.
    Ltwin,
    /// `w c wᴿ`.
    Lrev,
    /// `a^i` with `m ∤ i`.
    Lm(usize),
    /// `u a` with `|u| ≤ m`.
    Am(usize),
    /// `a^i` with `m | i`.
    Bm(usize),
    /// Words of length exactly `m` over {a, b}.
    Cm(usize),
    /// Over `a1..ak, b1..bk`: equally many `a_i` and `b_i` for each `i`.
    LeqK(usize),
}

impl LanguageId {
    pub fn alphabet(&self) -> Alphabet {
        let chars = match self {
            LanguageId::Ltwin | LanguageId::Lrev => "abc",
            LanguageId::Lm(_) | LanguageId::Bm(_) => "a",
            LanguageId::LeqK(k) => {
                let names: Vec<String> =
                    (1..=*k).map(|i| format!("a{i}")).chain((1..=*k).map(|i| format!("b{i}"))).collect();
                return Alphabet::new(names).expect("indexed symbols are valid");
            }
            _ => "ab",
        };
        Alphabet::from_chars(chars).expect("letters are valid")
    }

    fn parameter(&self) -> Option<usize> {
        match *self {
            LanguageId::Lm(m) | LanguageId::Am(m) | LanguageId::Bm(m) | LanguageId::Cm(m) | LanguageId::LeqK(m) => Some(m),
            _ => None,
        }
    }

    pub fn member(&self, w: &[usize]) -> Result<bool, ZooError> {
        let k = self.alphabet().len();
        if let Some(&s) = w.iter().find(|&&s| s >= k) {
            return Err(ZooError::ForeignSymbol(s));
        }
        if self.parameter() == Some(0) {
            return Err(ZooError::Parameter("language parameter must be positive".into()));
        }
        let count = |x: usize| w.iter().filter(|&&s| s == x).count();
        Ok(match *self {
            LanguageId::Lnh => lnh(w),
            LanguageId::Leq | LanguageId::Lupal => {
                let n = count(0);
                w.len() == 2 * n && w[..n].iter().all(|&s| s == 0)
            }
            LanguageId::Lneq => count(0) != count(1),
            LanguageId::Lpal => w.iter().eq(w.iter().rev()),
            LanguageId::Ltwin | LanguageId::Lrev => {
                let Some(mid) = w.iter().position(|&s| s == 2) else { return Ok(false) };
                let (l, r) = (&w[..mid], &w[mid + 1..]);
                if r.contains(&2) || l.len() != r.len() {
                    false
                } else if *self == LanguageId::Ltwin {
                    l == r
                } else {
                    l.iter().eq(r.iter().rev())
                }
            }
            LanguageId::Lm(m) => w.len() % m != 0,
            LanguageId::Am(m) => w.last() == Some(&0) && w.len() <= m + 1,
            LanguageId::Bm(m) => w.len() % m == 0,
            LanguageId::Cm(m) => w.len() == m,
            LanguageId::LeqK(k) => (0..k).all(|i| count(i) == count(k + i)),
        })
    }

    /// Oracle on a textual word, split per character or by `sep`.
    pub fn member_str(&self, text: &str, sep: Option<&str>) -> Result<bool, ZooError> {
        let w: Word = self.alphabet().parse_word(text, sep)?;
        self.member(&w)
    }
}

fn lnh(w: &[usize]) -> bool {
    // block lengths of a's, each block closed by a b
    let mut blocks = Vec::new();
    let mut run = 0usize;
    for &s in w {
        if s == 0 {
            run += 1;
        } else {
            if run == 0 {
                return false;
            }
            blocks.push(run);
            run = 0;
        }
    }
    if run != 0 || blocks.len() < 2 {
        return false;
    }
    let x = blocks[0];
    let mut sum = 0;
    for &y in &blocks[1..] {
        sum += y;
        if sum == x {
            return true;
        }
    }
    false
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LanguageId::Lnh => f.write_str("L_NH"),
            LanguageId::Leq => f.write_str("L_eq"),
            LanguageId::Lneq => f.write_str("L_neq"),
            LanguageId::Lupal => f.write_str("L_upal"),
            LanguageId::Lpal => f.write_str("L_pal"),
            LanguageId::Ltwin => f.write_str("L_twin"),
            LanguageId::Lrev => f.write_str("L_rev"),
            LanguageId::Lm(m) => write!(f, "L_m({m})"),
            LanguageId::Am(m) => write!(f, "A_m({m})"),
            LanguageId::Bm(m) => write!(f, "B_m({m})"),
            LanguageId::Cm(m) => write!(f, "C_m({m})"),
            LanguageId::LeqK(k) => write!(f, "L_eq-k({k})"),
        }
    }
}

impl FromStr for LanguageId {
    type Err = ZooError;

    /// Accepts the display names, e.g. `L_NH`, `A_m(3)` or `L_eq-k(2)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ZooError::UnknownName(s.to_string());
        let (head, arg) = match s.find('(') {
            Some(i) if s.ends_with(')') => {
                let v: usize = s[i + 1..s.len() - 1].trim().parse().map_err(|_| bad())?;
                if v == 0 {
                    return Err(ZooError::Parameter(format!("`{s}`: parameter must be positive")));
                }
                (&s[..i], Some(v))
            }
            Some(_) => return Err(bad()),
            None => (s, None),
        };
        let id = match (head, arg) {
            ("L_NH", None) => LanguageId::Lnh,
            ("L_eq", None) => LanguageId::Leq,
            ("L_neq", None) => LanguageId::Lneq,
            ("L_upal", None) => LanguageId::Lupal,
            ("L_pal", None) => LanguageId::Lpal,
            ("L_twin", None) => LanguageId::Ltwin,
            ("L_rev", None) => LanguageId::Lrev,
            ("L_m", Some(m)) => LanguageId::Lm(m),
            ("A_m", Some(m)) => LanguageId::Am(m),
            ("B_m", Some(m)) => LanguageId::Bm(m),
            ("C_m", Some(m)) => LanguageId::Cm(m),
            ("L_eq-k", Some(k)) => LanguageId::LeqK(k),
            _ => return Err(bad()),
        };
        Ok(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(l: LanguageId, w: &str) -> bool {
        l.member_str(w, None).unwrap()
    }

    #[test]
    fn definitions() {
        assert!(m(LanguageId::Lnh, "abab"));
        assert!(m(LanguageId::Lnh, "aababab"));
        assert!(!m(LanguageId::Lnh, "aabab"));
        assert!(!m(LanguageId::Lnh, "ab"));
        assert!(m(LanguageId::Lpal, "aba"));
        assert!(!m(LanguageId::Lpal, "ab"));
        assert!(m(LanguageId::Am(3), "bba"));
        assert!(!m(LanguageId::Am(3), "bbbba"));
        assert!(m(LanguageId::Leq, ""));
        assert!(m(LanguageId::Leq, "aabb"));
        assert!(!m(LanguageId::Leq, "abab"));
        assert!(m(LanguageId::Ltwin, "c"));
        assert!(m(LanguageId::Ltwin, "abcab"));
        assert!(m(LanguageId::Lrev, "abcba"));
        assert!(!m(LanguageId::Lrev, "abcab"));
        assert!(m(LanguageId::Lm(3), "aa"));
        assert!(!m(LanguageId::Lm(3), "aaa"));
        let k = LanguageId::LeqK(2);
        assert!(k.member_str("a1,b2,b1,a2", Some(",")).unwrap());
        assert!(!k.member_str("a1,b2", Some(",")).unwrap());
    }

    #[test]
    fn foreign_symbols() {
        assert!(matches!(LanguageId::Lm(2).member(&[1]), Err(ZooError::ForeignSymbol(1))));
    }

    #[test]
    fn names_round_trip() {
        for l in [LanguageId::Lnh, LanguageId::Am(3), LanguageId::LeqK(2), LanguageId::Lupal] {
            assert_eq!(l.to_string().parse::<LanguageId>().unwrap(), l);
        }
        assert!("A_m(0)".parse::<LanguageId>().is_err());
        assert!("L_xyz".parse::<LanguageId>().is_err());
    }
}
