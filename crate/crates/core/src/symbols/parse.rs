use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::expr::OperatorExpr;
use super::pc::PCSymbol;
use crate::error::{Error, Result};

/// Symbol table for user names.
pub type Bindings = BTreeMap<String, Arc<PCSymbol>>;

pub const RESERVED: [&str; 6] = ["S", "I", "P", "Q", "K", "i"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Complex64),
    Name(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push((start, Tok::Plus));
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push((start, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((start, Tok::Star));
                i += 1;
            }
            '(' => {
                out.push((start, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((start, Tok::RParen));
                i += 1;
            }
            '[' => {
                i += 1;
                let (re, next) = lex_signed(&chars, i)?;
                i = skip_ws(&chars, next);
                if chars.get(i) != Some(&',') {
                    return Err(err(i, "expected ',' in complex literal"));
                }
                let (im, next) = lex_signed(&chars, i + 1)?;
                i = skip_ws(&chars, next);
                if chars.get(i) != Some(&']') {
                    return Err(err(i, "expected ']' in complex literal"));
                }
                i += 1;
                out.push((start, Tok::Num(Complex64::new(re, im))));
            }
            c if c.is_ascii_digit() || c == '.' => {
                let (v, next) = lex_number(&chars, i)?;
                i = next;
                if chars.get(i) == Some(&'i') && !chars.get(i + 1).is_some_and(|c| is_name_char(*c)) {
                    i += 1;
                    out.push((start, Tok::Num(Complex64::new(0.0, v))));
                } else {
                    out.push((start, Tok::Num(Complex64::new(v, 0.0))));
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && is_name_char(chars[i]) {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                if name == "i" {
                    out.push((start, Tok::Num(Complex64::new(0.0, 1.0))));
                } else {
                    out.push((start, Tok::Name(name)));
                }
            }
            other => return Err(err(start, format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn skip_ws(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() && chars[i].is_whitespace() {
        i += 1;
    }
    i
}

fn lex_signed(chars: &[char], i: usize) -> Result<(f64, usize)> {
    let mut i = skip_ws(chars, i);
    let neg = matches!(chars.get(i), Some('-') | Some('\u{2212}'));
    if neg || chars.get(i) == Some(&'+') {
        i += 1;
    }
    let (v, next) = lex_number(chars, i)?;
    Ok((if neg { -v } else { v }, next))
}

fn lex_number(chars: &[char], start: usize) -> Result<(f64, usize)> {
    let mut i = start;
    while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
        i += 1;
    }
    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
        let mut j = i + 1;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            j += 1;
        }
        if j < chars.len() && chars[j].is_ascii_digit() {
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    let s: String = chars[start..i].iter().collect();
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok((v, i)),
        _ => Err(err(start, format!("invalid number '{s}'"))),
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    bindings: &'a Bindings,
    size: Option<usize>,
}

enum Factor {
    Literal(Complex64),
    Other(OperatorExpr),
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn expr(&mut self) -> Result<OperatorExpr> {
        let mut terms = Vec::new();
        let neg = self.peek() == Some(&Tok::Minus);
        if neg {
            self.pos += 1;
        }
        let first = self.term()?;
        terms.push(if neg { negate(first) } else { first });
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    terms.push(negate(t));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().expect("one term") } else { OperatorExpr::Sum(terms) })
    }

    fn term(&mut self) -> Result<OperatorExpr> {
        let mut factors = vec![self.factor()?];
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            factors.push(self.factor()?);
        }
        Ok(build_term(factors))
    }

    fn factor(&mut self) -> Result<Factor> {
        let at = self.here();
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Num(c)) => {
                self.pos += 1;
                Ok(Factor::Literal(c))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(err(self.here(), "expected ')'"));
                }
                self.pos += 1;
                Ok(Factor::Other(e))
            }
            Some(Tok::Name(name)) => {
                self.pos += 1;
                Ok(Factor::Other(self.resolve(&name, at)?))
            }
            Some(_) => Err(err(at, "expected a literal, a name or '('")),
            None => Err(err(at, "unexpected end of input")),
        }
    }

    fn resolve(&mut self, name: &str, at: usize) -> Result<OperatorExpr> {
        Ok(match name {
            "S" => OperatorExpr::S,
            "I" => OperatorExpr::identity(),
            "P" => OperatorExpr::p(),
            "Q" => OperatorExpr::q(),
            "K" => OperatorExpr::Compact,
            _ => {
                let sym = self.bindings.get(name).ok_or_else(|| err(at, format!("unbound name '{name}'")))?;
                match self.size {
                    None => self.size = Some(sym.size()),
                    Some(n) if n != sym.size() => {
                        return Err(err(at, format!("size mismatch: '{name}' is {0}x{0}, expected {n}x{n}", sym.size())))
                    }
                    _ => {}
                }
                OperatorExpr::Mul { name: name.to_string(), symbol: Arc::clone(sym) }
            }
        })
    }
}

fn negate(e: OperatorExpr) -> OperatorExpr {
    OperatorExpr::Scale(Complex64::new(-1.0, 0.0), Box::new(e))
}

fn build_term(mut factors: Vec<Factor>) -> OperatorExpr {
    let unwrap = |f: Factor| match f {
        Factor::Literal(c) => OperatorExpr::Scalar(c),
        Factor::Other(e) => e,
    };
    if factors.len() == 1 {
        return unwrap(factors.pop().expect("one factor"));
    }
    if let Factor::Literal(c) = factors[0] {
        let rest = factors.split_off(1);
        return OperatorExpr::Scale(c, Box::new(build_term(rest)));
    }
    OperatorExpr::Product(factors.into_iter().map(unwrap).collect())
}

/// Parses an operator expression. Errors carry the character position.
pub fn parse_expr(text: &str, bindings: &Bindings) -> Result<OperatorExpr> {
    if text.trim().is_empty() {
        return Err(err(0, "empty expression"));
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.chars().count(), bindings, size: None };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err(p.here(), "unexpected trailing input"));
    }
    Ok(e)
}
