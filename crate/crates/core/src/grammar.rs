//! Text grammar for polynomials, shared by the CLI and the JSON schemas.
//!
//! Variables: `X` (theta) and `t1`..`t16`. Integer literals are reduced mod p.
//! Operators `+ - * ^` with the usual precedence, parentheses allowed.
//! Field constants in extensions (m > 1) are written as coordinate vectors
//! `[c0,...,c_{m-1}]` over F_q, each coordinate the canonical scalar index.
//! Example: `(t1-X)*(t2-X)`.

use crate::apoly::APoly;
use crate::error::{Error, Result};
use crate::field::{FFElem, FieldDesc};
use crate::poly::FPoly;
use crate::tpoly::{unpack_exps, TPoly};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Var(usize), // 0 = X (theta), i >= 1 = t_i
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Vector(Vec<i64>),
}

fn lex(input: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            '[' => {
                let mut j = i + 1;
                let mut cur = String::new();
                let mut entries = Vec::new();
                loop {
                    if j >= chars.len() {
                        return Err(Error::Parse("unterminated coordinate vector".into()));
                    }
                    match chars[j] {
                        ']' => {
                            if !cur.trim().is_empty() {
                                entries.push(
                                    cur.trim()
                                        .parse::<i64>()
                                        .map_err(|e| Error::Parse(e.to_string()))?,
                                );
                            }
                            break;
                        }
                        ',' => {
                            entries.push(
                                cur.trim().parse::<i64>().map_err(|e| Error::Parse(e.to_string()))?,
                            );
                            cur.clear();
                        }
                        ch => cur.push(ch),
                    }
                    j += 1;
                }
                toks.push(Tok::Vector(entries));
                i = j + 1;
            }
            '0'..='9' => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let n: i64 = chars[i..j]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|e: std::num::ParseIntError| Error::Parse(e.to_string()))?;
                toks.push(Tok::Int(n));
                i = j;
            }
            'X' => {
                toks.push(Tok::Var(0));
                i += 1;
            }
            't' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(Error::Parse("variable name must be X or t<index>".into()));
                }
                let idx: usize = chars[i + 1..j]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|e: std::num::ParseIntError| Error::Parse(e.to_string()))?;
                if idx == 0 || idx > 16 {
                    return Err(Error::Parse(format!("variable t{} out of range t1..t16", idx)));
                }
                toks.push(Tok::Var(idx));
                i = j;
            }
            other => return Err(Error::Parse(format!("unexpected character '{}'", other))),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    fd: &'a Arc<FieldDesc>,
    s: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<APoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.add(&rhs, self.fd);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.sub(&rhs, self.fd);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<APoly> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            let rhs = self.unary()?;
            acc = acc.mul(&rhs, self.fd);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<APoly> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(self.unary()?.neg(self.fd));
        }
        self.power()
    }

    fn power(&mut self) -> Result<APoly> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            match self.bump() {
                Some(Tok::Int(n)) if n >= 0 => Ok(base.pow(n as u64, self.fd)),
                _ => Err(Error::Parse("exponent must be a nonnegative integer".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<APoly> {
        match self.bump() {
            Some(Tok::Int(n)) => {
                Ok(APoly::constant(TPoly::from_int(n, self.s, self.fd)))
            }
            Some(Tok::Vector(coords)) => {
                if coords.len() != self.fd.m as usize {
                    return Err(Error::Parse(format!(
                        "coordinate vector length {} != extension degree {}",
                        coords.len(),
                        self.fd.m
                    )));
                }
                let mut x = self.fd.zero();
                for (i, &c) in coords.iter().enumerate() {
                    if c < 0 || c as u64 >= self.fd.q {
                        return Err(Error::Parse(format!("coordinate {} out of range 0..q", c)));
                    }
                    x.coords[i] = c as u16;
                }
                Ok(APoly::constant(TPoly::constant(x, self.s, self.fd)))
            }
            Some(Tok::Var(0)) => Ok(APoly::theta(self.s, self.fd)),
            Some(Tok::Var(i)) => {
                if i > self.s {
                    return Err(Error::Parse(format!(
                        "variable t{} exceeds the declared variable count s = {}",
                        i, self.s
                    )));
                }
                Ok(APoly::constant(TPoly::var(i - 1, self.s, self.fd)?))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse("expected ')'".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {:?}", other))),
        }
    }
}

/// Parse a polynomial in theta (X) and t1..ts over the given field.
pub fn parse_apoly(input: &str, fd: &Arc<FieldDesc>, s: usize) -> Result<APoly> {
    let toks = lex(input)?;
    let mut p = Parser { toks, pos: 0, fd, s };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse("trailing input".into()));
    }
    Ok(out)
}

/// Parse a plain theta-polynomial (no t variables).
pub fn parse_fpoly(input: &str, fd: &Arc<FieldDesc>) -> Result<FPoly> {
    let a = parse_apoly(input, fd, 0)?;
    a.to_fpoly(fd).ok_or_else(|| Error::Parse("t variables not allowed here".into()))
}

/// Parse a t-polynomial (theta not allowed).
pub fn parse_tpoly(input: &str, fd: &Arc<FieldDesc>, s: usize) -> Result<TPoly> {
    let a = parse_apoly(input, fd, s)?;
    if a.is_zero() {
        return Ok(TPoly::zero(s));
    }
    if a.deg_theta() != Some(0) {
        return Err(Error::Parse("X not allowed here".into()));
    }
    Ok(a.coeff(0))
}

pub fn ffelem_to_string(c: &FFElem, fd: &FieldDesc) -> String {
    if fd.m == 1 {
        format!("{}", c.coords[0])
    } else {
        let inner: Vec<String> = c.coords.iter().map(|x| x.to_string()).collect();
        format!("[{}]", inner.join(","))
    }
}

pub fn tpoly_to_string(t: &TPoly) -> String {
    if t.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (key, coeff) in &t.terms {
        let exps = unpack_exps(*key, t.s);
        let mut factors = Vec::new();
        let coeff_str = if coeff.coords.len() == 1 {
            coeff.coords[0].to_string()
        } else {
            let inner: Vec<String> = coeff.coords.iter().map(|x| x.to_string()).collect();
            format!("[{}]", inner.join(","))
        };
        let all_zero = exps.iter().all(|&e| e == 0);
        if coeff_str != "1" || all_zero {
            factors.push(coeff_str);
        }
        for (i, &e) in exps.iter().enumerate() {
            if e == 1 {
                factors.push(format!("t{}", i + 1));
            } else if e > 1 {
                factors.push(format!("t{}^{}", i + 1, e));
            }
        }
        parts.push(factors.join("*"));
    }
    parts.join("+")
}

pub fn apoly_to_string(a: &APoly) -> String {
    if a.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (j, c) in a.coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let cs = tpoly_to_string(c);
        let needs_parens = cs.contains('+') || (cs.contains('-') && !cs.starts_with('-'));
        let cpart = if needs_parens { format!("({})", cs) } else { cs };
        let part = match j {
            0 => cpart,
            1 => {
                if cpart == "1" {
                    "X".to_string()
                } else {
                    format!("{}*X", cpart)
                }
            }
            _ => {
                if cpart == "1" {
                    format!("X^{}", j)
                } else {
                    format!("{}*X^{}", cpart, j)
                }
            }
        };
        parts.push(part);
    }
    parts.join("+")
}

pub fn fpoly_to_string(f: &FPoly, fd: &FieldDesc) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (j, c) in f.coeffs.iter().enumerate().rev() {
        if fd.is_zero(c) {
            continue;
        }
        let cs = ffelem_to_string(c, fd);
        let part = match j {
            0 => cs,
            1 => {
                if cs == "1" {
                    "X".to_string()
                } else {
                    format!("{}*X", cs)
                }
            }
            _ => {
                if cs == "1" {
                    format!("X^{}", j)
                } else {
                    format!("{}*X^{}", cs, j)
                }
            }
        };
        parts.push(part);
    }
    parts.join("+")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDesc;

    #[test]
    fn parse_examples() {
        let fd = FieldDesc::base(3, 1).unwrap();
        let a = parse_apoly("(t1-X)*(t2-X)", &fd, 2).unwrap();
        assert_eq!(a.deg_theta(), Some(2));
        // leading coefficient (-1)^2 = 1
        assert!(a.leading().unwrap().is_one(&fd));
        // constant term t1*t2
        let t1 = TPoly::var(0, 2, &fd).unwrap();
        let t2 = TPoly::var(1, 2, &fd).unwrap();
        assert_eq!(a.coeff(0), t1.mul(&t2, &fd));
        // integers reduce mod p
        let b = parse_apoly("4*X + 7", &fd, 0).unwrap();
        assert_eq!(apoly_to_string(&b), "X+1");
        // powers and unary minus
        let c = parse_apoly("-X^2+2", &fd, 0).unwrap();
        assert_eq!(apoly_to_string(&c), "2*X^2+2");
    }

    #[test]
    fn roundtrip_through_strings() {
        let fd = FieldDesc::base(3, 1).unwrap();
        for src in ["X^2+1", "(t1-X)*(t2-X)", "2*t1^2*X+t2+1", "0"] {
            let a = parse_apoly(src, &fd, 2).unwrap();
            let printed = apoly_to_string(&a);
            let b = parse_apoly(&printed, &fd, 2).unwrap();
            assert_eq!(a, b, "{} -> {}", src, printed);
        }
    }

    #[test]
    fn extension_coordinate_vectors() {
        let f9 = FieldDesc::new(3, 1, 2).unwrap();
        let a = parse_apoly("[0,1]*X + [2,0]", &f9, 0).unwrap();
        assert_eq!(a.deg_theta(), Some(1));
        let printed = apoly_to_string(&a);
        let b = parse_apoly(&printed, &f9, 0).unwrap();
        assert_eq!(a, b);
    }
}
