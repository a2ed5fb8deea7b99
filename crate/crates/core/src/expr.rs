//! Text format for polynomials and plane maps.
//!
//! Grammar (recursive descent, no implicit multiplication):
//!
//! ```text
//! expr     := '-'? term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := atom ('^' '-'? integer)?
//! atom     := rational | variable | '(' expr ')'
//! rational := integer ('/' positive-integer)?
//! variable := 'X' | 'Y' | 'Z' | 'u' nonneg-integer
//! ```
//!
//! Negative exponents are permitted only on Laurent-flagged variables.
//! Formatting is canonical: terms in graded-lex descending order, rationals in
//! lowest terms, so `parse(format(p)) == p`.

use std::fmt;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{Integer, MultiPoly, Rational, Var, VarTable};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Int(Integer),
    Var(Var),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            chars: src.char_indices().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(&(i, ch)) = self.chars.peek() {
            let (line, col) = (self.line, self.col);
            match ch {
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '\n' => {
                    self.bump();
                    self.line += 1;
                    self.col = 1;
                }
                '+' => {
                    self.bump();
                    out.push((Tok::Plus, line, col));
                }
                '-' => {
                    self.bump();
                    out.push((Tok::Minus, line, col));
                }
                '*' => {
                    self.bump();
                    out.push((Tok::Star, line, col));
                }
                '/' => {
                    self.bump();
                    out.push((Tok::Slash, line, col));
                }
                '^' => {
                    self.bump();
                    out.push((Tok::Caret, line, col));
                }
                '(' => {
                    self.bump();
                    out.push((Tok::LParen, line, col));
                }
                ')' => {
                    self.bump();
                    out.push((Tok::RParen, line, col));
                }
                '0'..='9' => {
                    let start = i;
                    let mut end = i;
                    while let Some(&(j, c)) = self.chars.peek() {
                        if c.is_ascii_digit() {
                            end = j;
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let text = &self.src[start..=end];
                    let n: Integer = text.parse().expect("digits");
                    out.push((Tok::Int(n), line, col));
                }
                'X' => {
                    self.bump();
                    out.push((Tok::Var(Var::X), line, col));
                }
                'Y' => {
                    self.bump();
                    out.push((Tok::Var(Var::Y), line, col));
                }
                'Z' => {
                    self.bump();
                    out.push((Tok::Var(Var::Z), line, col));
                }
                'u' => {
                    self.bump();
                    let mut digits = String::new();
                    while let Some(&(_, c)) = self.chars.peek() {
                        if c.is_ascii_digit() {
                            digits.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if digits.is_empty() {
                        return Err(ParseError::new(line, col, "expected index after 'u'"));
                    }
                    let j: u32 = digits
                        .parse()
                        .map_err(|_| ParseError::new(line, col, "u-index out of range"))?;
                    out.push((Tok::Var(Var::U(j)), line, col));
                }
                other => {
                    return Err(ParseError::new(
                        line,
                        col,
                        format!("unexpected character '{other}'"),
                    ));
                }
            }
        }
        Ok(out)
    }

    fn bump(&mut self) {
        self.chars.next();
        self.col += 1;
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    table: &'a VarTable,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn span(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|&(_, l, c)| (l, c))
            .unwrap_or((1, 1))
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (l, c) = self.span();
        ParseError::new(l, c, msg)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let negate = self.eat(&Tok::Minus);
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            if self.eat(&Tok::Plus) {
                let t = self.term()?;
                acc = &acc + &t;
            } else if self.eat(&Tok::Minus) {
                let t = self.term()?;
                acc = &acc - &t;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(&Tok::Star) {
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn integer(&mut self) -> Result<Integer, ParseError> {
        let neg = self.eat(&Tok::Minus);
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.err("expected integer")),
        }
    }

    fn exponent(&mut self) -> Result<Option<i64>, ParseError> {
        if !self.eat(&Tok::Caret) {
            return Ok(None);
        }
        let n = self.integer()?;
        let e = i64::try_from(n).map_err(|_| self.err("exponent out of range"))?;
        Ok(Some(e))
    }

    fn factor(&mut self) -> Result<MultiPoly, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let mut q = Rational::from(n);
                if self.eat(&Tok::Slash) {
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            self.pos += 1;
                            q /= Rational::from(d);
                        }
                        _ => return Err(self.err("expected positive denominator")),
                    }
                }
                let base = MultiPoly::constant(self.table, q);
                match self.exponent()? {
                    None => Ok(base),
                    Some(e) if e >= 0 => Ok(base.pow(e as u64)),
                    Some(_) => Err(self.err("negative exponent on a constant")),
                }
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                if let Var::U(j) = v {
                    if j > self.table.a() {
                        return Err(self.err(format!(
                            "unknown variable u{j} (ring has a = {})",
                            self.table.a()
                        )));
                    }
                }
                let e = self.exponent()?.unwrap_or(1);
                if e < 0 && !self.table.is_laurent(v) {
                    return Err(self.err(format!("negative exponent on non-Laurent variable {v}")));
                }
                MultiPoly::monomial(self.table, &[(v, e)], Rational::one())
                    .map_err(|e| self.err(e.to_string()))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.err("expected ')'"));
                }
                match self.exponent()? {
                    None => Ok(inner),
                    Some(e) if e >= 0 => Ok(inner.pow(e as u64)),
                    Some(_) => Err(self.err("negative exponent on a parenthesized expression")),
                }
            }
            _ => Err(self.err("expected rational, variable or '('")),
        }
    }
}

pub fn parse_poly(src: &str, table: &VarTable) -> Result<MultiPoly, ParseError> {
    let toks = Lexer::new(src).tokens()?;
    if toks.is_empty() {
        return Err(ParseError::new(1, 1, "empty expression"));
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        table,
    };
    let p = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.err("trailing input"));
    }
    Ok(p)
}

fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn format_poly(p: &MultiPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let table = p.table();
    let a = table.a();
    // Within a term: u_a .. u_0, then X, Y, Z.
    let print_order: Vec<Var> = (0..=a)
        .rev()
        .map(Var::U)
        .chain([Var::X, Var::Y, Var::Z])
        .collect();
    let mut out = String::new();
    let terms: Vec<_> = p.terms().collect();
    for (i, (mono, coeff)) in terms.iter().rev().enumerate() {
        let neg = coeff.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mag = coeff.abs();
        let mut parts: Vec<String> = Vec::new();
        for &v in &print_order {
            let e = mono.0[table.slot(v)];
            if e == 1 {
                parts.push(v.to_string());
            } else if e != 0 {
                parts.push(format!("{v}^{e}"));
            }
        }
        if parts.is_empty() {
            out.push_str(&format_rational(&mag));
        } else {
            if !mag.is_one() {
                out.push_str(&format_rational(&mag));
                out.push('*');
            }
            out.push_str(&parts.join("*"));
        }
    }
    out
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(self))
    }
}

/// Parsed automorphism file: `A: <int>` plus optional `F:`/`G:` expressions.
#[derive(Clone, Debug)]
pub struct MapFile {
    pub a: u32,
    pub f: Option<MultiPoly>,
    pub g: Option<MultiPoly>,
}

pub fn parse_map_file(text: &str) -> Result<MapFile, ParseError> {
    let mut a: Option<u32> = None;
    // First pass: the ring declaration.
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if let Some(rest) = line.strip_prefix("A:") {
            let val: u32 = rest.trim().parse().map_err(|_| {
                ParseError::new(lineno + 1, 1, "invalid integer after 'A:'")
            })?;
            if a.replace(val).is_some() {
                return Err(ParseError::new(lineno + 1, 1, "duplicate 'A:' line"));
            }
        }
    }
    let a = a.ok_or_else(|| ParseError::new(1, 1, "missing 'A:' line"))?;
    if a < 1 {
        return Err(ParseError::new(1, 1, "'A:' must be >= 1"));
    }
    let table = VarTable::new(a);
    let mut f = None;
    let mut g = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() || line.starts_with("A:") {
            continue;
        }
        if let Some(rest) = line.strip_prefix("F:") {
            let p = parse_poly(rest.trim(), &table)
                .map_err(|e| ParseError::new(lineno + 1, e.col, e.msg))?;
            if f.replace(p).is_some() {
                return Err(ParseError::new(lineno + 1, 1, "duplicate 'F:' line"));
            }
        } else if let Some(rest) = line.strip_prefix("G:") {
            let p = parse_poly(rest.trim(), &table)
                .map_err(|e| ParseError::new(lineno + 1, e.col, e.msg))?;
            if g.replace(p).is_some() {
                return Err(ParseError::new(lineno + 1, 1, "duplicate 'G:' line"));
            }
        } else {
            return Err(ParseError::new(lineno + 1, 1, "unrecognized line"));
        }
    }
    Ok(MapFile { a, f, g })
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn parse_u_polynomial() {
        let t = VarTable::new(2);
        let u = parse_poly("u0 + u1*Y + u2*Y^2", &t).unwrap();
        assert_eq!(u, MultiPoly::u_generic(&t));
    }

    #[test]
    fn parse_rational_coefficients() {
        let t = VarTable::new(2);
        let p = parse_poly("1/2*Y^2 - 3", &t).unwrap();
        assert_eq!(p.coeff_rat(&[(Var::Y, 2)]), rat(1, 2));
        assert_eq!(p.coeff_rat(&[]), rat(-3, 1));
    }

    #[test]
    fn laurent_z_gated_by_table() {
        let plain = VarTable::new(2);
        let lz = VarTable::new(2).with_laurent_z();
        assert!(parse_poly("Z^-1*X", &lz).is_ok());
        assert!(parse_poly("Z^-1*X", &plain).is_err());
    }

    #[test]
    fn implicit_multiplication_rejected() {
        let t = VarTable::new(2);
        assert!(parse_poly("2Y", &t).is_err());
    }

    #[test]
    fn unknown_variable_rejected() {
        let t = VarTable::new(2);
        assert!(parse_poly("u3", &t).is_err());
    }

    #[test]
    fn format_canonical() {
        let t = VarTable::new(2);
        let u = MultiPoly::u_generic(&t);
        assert_eq!(format_poly(&u), "u2*Y^2 + u1*Y + u0");
        assert_eq!(format_poly(&MultiPoly::zero(&t)), "0");
        let e = parse_poly("-1 - 4*Y - 7*Y^2", &t).unwrap();
        assert_eq!(format_poly(&e), "-7*Y^2 - 4*Y - 1");
    }

    #[test]
    fn round_trip_examples() {
        let t = VarTable::new(3).with_laurent_z();
        for src in [
            "u3^-2*X*Y + 5",
            "-1/3*Z^-4 + X^2*Y^3",
            "u0*u1*u2*u3 - Y",
            "0",
        ] {
            let p = parse_poly(src, &t).unwrap();
            assert_eq!(parse_poly(&format_poly(&p), &t).unwrap(), p);
        }
    }

    #[test]
    fn map_file_basic() {
        let mf = parse_map_file("# a comment\nA: 2\nF: X + Y^3\n\nG: Y\n").unwrap();
        assert_eq!(mf.a, 2);
        let t = VarTable::new(2);
        assert_eq!(mf.f.unwrap(), parse_poly("X + Y^3", &t).unwrap());
        assert_eq!(mf.g.unwrap(), parse_poly("Y", &t).unwrap());
    }

    #[test]
    fn map_file_missing_a() {
        assert!(parse_map_file("F: X\n").is_err());
    }
}
