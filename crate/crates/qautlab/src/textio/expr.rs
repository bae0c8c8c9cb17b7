//! Amplitude expressions such as `1/sqrt(2)` or `-1/2 + 1/2*i`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := number | 'i' | 'pi' | func '(' expr ')' | '(' expr ')' | ('-' | '+') factor
//! func   := 'sqrt' | 'exp' | 'cos' | 'sin'
//! ```

use std::fmt;

use thiserror::Error;

use crate::numerics::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.message, self.offset)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError { offset, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<C64, ExprError> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            if op == b'+' {
                acc += rhs;
            } else {
                acc -= rhs;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<C64, ExprError> {
        let mut acc = self.factor()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.factor()?;
            if op == b'*' {
                acc *= rhs;
            } else {
                if rhs.norm() == 0.0 {
                    return self.err(at, "division by zero");
                }
                acc /= rhs;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<C64, ExprError> {
        let Some(ch) = self.peek() else {
            return self.err(self.pos, "unexpected end of expression");
        };
        match ch {
            b'-' => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            b'+' => {
                self.pos += 1;
                self.factor()
            }
            b'(' => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            b'0'..=b'9' | b'.' => self.number(),
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match word {
                    "i" => Ok(C64::new(0.0, 1.0)),
                    "pi" => Ok(C64::new(std::f64::consts::PI, 0.0)),
                    "sqrt" | "exp" | "cos" | "sin" => {
                        self.expect(b'(')?;
                        let v = self.expr()?;
                        self.expect(b')')?;
                        Ok(match word {
                            "sqrt" => {
                                if v.im == 0.0 && v.re >= 0.0 {
                                    C64::new(v.re.sqrt(), 0.0)
                                } else {
                                    v.sqrt()
                                }
                            }
                            "exp" => v.exp(),
                            "cos" => v.cos(),
                            _ => v.sin(),
                        })
                    }
                    _ => self.err(start, format!("unknown name `{word}`")),
                }
            }
            _ => self.err(self.pos, format!("unexpected character `{}`", ch as char)),
        }
    }

    fn number(&mut self) -> Result<C64, ExprError> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            let b = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > b
        };
        let mut p = self.pos;
        let int = digits(&mut p);
        let mut frac = false;
        if p < s.len() && s[p] == b'.' {
            p += 1;
            frac = digits(&mut p);
        }
        if !int && !frac {
            return self.err(start, "malformed number");
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) {
                p = q;
            }
        }
        self.pos = p;
        let text = std::str::from_utf8(&s[start..p]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) => Ok(C64::new(v, 0.0)),
            Err(_) => self.err(start, format!("malformed number `{text}`")),
        }
    }

    fn expect(&mut self, want: u8) -> Result<(), ExprError> {
        match self.peek() {
            Some(ch) if ch == want => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(self.pos, format!("expected `{}`", want as char)),
        }
    }
}

pub fn parse_amplitude(src: &str) -> Result<C64, ExprError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    if p.peek().is_none() {
        return p.err(0, "empty expression");
    }
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.err(p.pos, "trailing input");
    }
    if !v.re.is_finite() || !v.im.is_finite() {
        return p.err(0, "value is not finite");
    }
    Ok(v)
}

/// Shortest decimal rendering that parses back to the identical value.
pub fn format_amplitude(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else if z.re == 0.0 {
        format!("{:?}*i", z.im)
    } else if z.im < 0.0 {
        format!("{:?} - {:?}*i", z.re, -z.im)
    } else {
        format!("{:?} + {:?}*i", z.re, z.im)
    }
}

/// The expression worth remembering for `value`, if its text differs from the plain rendering.
pub fn keep_expr(text: &str, value: C64) -> Option<String> {
    let t = text.trim();
    (t != format_amplitude(value)).then(|| t.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((parse_amplitude("1/sqrt(2)").unwrap() - C64::new(h, 0.0)).norm() < 1e-15);
        assert_eq!(parse_amplitude("-1/2 + 1/2*i").unwrap(), C64::new(-0.5, 0.5));
        let v = parse_amplitude("sqrt(2)/2 * i * i").unwrap();
        assert!((v - C64::new(-(2f64.sqrt()) / 2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_amplitude("1/(1-1)").unwrap_err();
        assert_eq!(e.message, "division by zero");
        assert_eq!(e.offset, 1);
        let e = parse_amplitude("1 + foo").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(parse_amplitude("").is_err());
        assert!(parse_amplitude("(1").is_err());
        assert!(parse_amplitude("1 2").is_err());
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(parse_amplitude(" 3 * ( 1 + i ) ").unwrap(), parse_amplitude("3*(1+i)").unwrap());
    }

    #[test]
    fn formatting_round_trips() {
        for z in [
            C64::new(0.1, 0.0),
            C64::new(-0.0, 0.0),
            C64::new(1e-300, -2.5),
            C64::new(0.0, -1.0 / 3.0),
            C64::new(1.0 / 7.0, 1e20),
        ] {
            assert_eq!(parse_amplitude(&format_amplitude(z)).unwrap(), z, "{}", format_amplitude(z));
        }
    }
}
