//! Text format for polynomials.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' digits)?
//! atom   := integer ('/' integer)? | variable | '(' expr ')'
//! ```
//!
//! Juxtaposition (`2x0`) is rejected.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ExponentVector, GradedOrdering, Polynomial};
use crate::{Error, Result};

/// Names for the variables of a polynomial ring: `{prefix}{offset + i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSpace {
    pub count: usize,
    pub offset: usize,
    pub prefix: String,
}

impl VarSpace {
    /// `x0, ..., x{count-1}`.
    pub fn new(count: usize) -> Self {
        VarSpace { count, offset: 0, prefix: "x".into() }
    }

    /// Affine coordinates `x1, ..., x{count}`; `x0` is kept for homogenization.
    pub fn affine(count: usize) -> Self {
        VarSpace { count, offset: 1, prefix: "x".into() }
    }

    pub fn with_prefix(mut self, prefix: &str) -> Self {
        self.prefix = prefix.into();
        self
    }

    pub fn name(&self, i: usize) -> String {
        format!("{}{}", self.prefix, i + self.offset)
    }

    pub fn lookup(&self, ident: &str) -> Option<usize> {
        let digits = ident.strip_prefix(self.prefix.as_str())?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if digits.len() > 1 && digits.starts_with('0') {
            return None;
        }
        let k: usize = digits.parse().ok()?;
        let i = k.checked_sub(self.offset)?;
        (i < self.count).then_some(i)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    line: usize,
    tokens: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str, line: usize) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, line, tokens: Vec::new() };
        lx.scan()?;
        Ok(lx.tokens)
    }

    fn err(&self, col: usize, msg: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, column: col + 1, message: msg.into() }
    }

    fn scan(&mut self) -> Result<()> {
        let bytes = self.src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            let start = i;
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    i += 1;
                    continue;
                }
                '+' => self.tokens.push((Tok::Plus, start)),
                '-' => self.tokens.push((Tok::Minus, start)),
                '*' => self.tokens.push((Tok::Star, start)),
                '^' => self.tokens.push((Tok::Caret, start)),
                '/' => self.tokens.push((Tok::Slash, start)),
                '(' => self.tokens.push((Tok::LParen, start)),
                ')' => self.tokens.push((Tok::RParen, start)),
                '0'..='9' => {
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let n: BigInt = self.src[start..i].parse().expect("digits");
                    self.tokens.push((Tok::Int(n), start));
                    continue;
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    self.tokens.push((Tok::Ident(self.src[start..i].to_string()), start));
                    continue;
                }
                other => return Err(self.err(start, format!("unexpected character '{other}'"))),
            }
            i += 1;
        }
        Ok(())
    }
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    vars: &'a VarSpace,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.tokens.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, column: self.col() + 1, message: msg.into() }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    return Err(self.err("implicit multiplication is not allowed; use '*'"));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            match self.bump() {
                Some(Tok::Int(k)) => {
                    let k: u32 = k.try_into().map_err(|_| {
                        self.pos -= 1;
                        self.err("exponent too large")
                    })?;
                    return Ok(base.pow(k));
                }
                Some(Tok::Minus) => {
                    self.pos -= 1;
                    return Err(self.err("negative exponent"));
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.err("expected a nonnegative integer exponent"));
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let n = self.vars.count;
        match self.bump() {
            Some(Tok::Int(a)) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    match self.bump() {
                        Some(Tok::Int(b)) if !b.is_zero() => {
                            Ok(Polynomial::constant(n, BigRational::new(a, b)))
                        }
                        Some(Tok::Int(_)) => {
                            self.pos -= 1;
                            Err(self.err("zero denominator"))
                        }
                        _ => {
                            self.pos -= 1;
                            Err(self.err("expected an integer denominator"))
                        }
                    }
                } else {
                    Ok(Polynomial::constant(n, BigRational::from_integer(a)))
                }
            }
            Some(Tok::Ident(name)) => match self.vars.lookup(&name) {
                Some(i) => Ok(Polynomial::var(n, i)),
                None => {
                    self.pos -= 1;
                    Err(self.err(format!("unknown variable '{name}'")))
                }
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => {
                        self.pos -= 1;
                        Err(self.err("expected ')'"))
                    }
                }
            }
            Some(_) => {
                self.pos -= 1;
                Err(self.err("expected a number, variable or '('"))
            }
            None => Err(self.err("unexpected end of input")),
        }
    }
}

impl Polynomial {
    /// Parses one polynomial.
    pub fn parse(text: &str, vars: &VarSpace) -> Result<Polynomial> {
        Polynomial::parse_line(text, vars, 1)
    }

    /// Parses one polynomial, reporting errors against line number `line`.
    pub fn parse_line(text: &str, vars: &VarSpace, line: usize) -> Result<Polynomial> {
        let tokens = Lexer::run(text, line)?;
        if tokens.is_empty() {
            return Err(Error::Syntax { line, column: 1, message: "empty polynomial".into() });
        }
        let mut p = Parser { tokens, pos: 0, line, end_col: text.len(), vars };
        let out = p.expr()?;
        if p.pos < p.tokens.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }

    /// Formats with terms in descending order under `ord`.
    pub fn format(&self, vars: &VarSpace, ord: GradedOrdering) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.sorted_terms(ord).into_iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let abs = c.abs();
            let mono = monomial_text(e, vars);
            if mono.is_empty() {
                out.push_str(&rational_text(&abs));
            } else {
                if !abs.is_one() {
                    out.push_str(&rational_text(&abs));
                    out.push('*');
                }
                out.push_str(&mono);
            }
        }
        out
    }
}

fn rational_text(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn monomial_text(e: &ExponentVector, vars: &VarSpace) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.entries().iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(vars.name(i)),
            k => parts.push(format!("{}^{}", vars.name(i), k)),
        }
    }
    parts.join("*")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use proptest::prelude::*;

    fn vs(n: usize) -> VarSpace {
        VarSpace::new(n)
    }

    #[test]
    fn parses_conic() {
        let f = Polynomial::parse("x0*x2 - x1^2", &vs(3)).unwrap();
        assert_eq!(f.num_terms(), 2);
        assert_eq!(f.coefficient(&ExponentVector::new(vec![1, 0, 1])), rat(1));
        assert_eq!(f.coefficient(&ExponentVector::new(vec![0, 2, 0])), rat(-1));
    }

    #[test]
    fn parses_constant() {
        assert_eq!(Polynomial::parse("3", &vs(2)).unwrap(), Polynomial::constant(2, rat(3)));
        assert_eq!(
            Polynomial::parse(" -1/2 ", &vs(1)).unwrap(),
            Polynomial::constant(1, BigRational::new((-1).into(), 2.into()))
        );
    }

    #[test]
    fn parentheses_and_powers() {
        let f = Polynomial::parse("(x0 + x1)^2 - 2*x0*x1", &vs(2)).unwrap();
        assert_eq!(f, Polynomial::parse("x0^2 + x1^2", &vs(2)).unwrap());
    }

    #[test]
    fn negative_exponent_rejected() {
        match Polynomial::parse("x0^-1", &vs(1)) {
            Err(Error::Syntax { line: 1, column: 4, message }) => assert!(message.contains("negative")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn implicit_multiplication_rejected() {
        assert!(matches!(Polynomial::parse("2x0", &vs(1)), Err(Error::Syntax { .. })));
        assert!(matches!(Polynomial::parse("x0 x1", &vs(2)), Err(Error::Syntax { .. })));
    }

    #[test]
    fn unknown_variable_rejected() {
        match Polynomial::parse("x0 + x7", &vs(3)) {
            Err(Error::Syntax { column: 6, message, .. }) => assert!(message.contains("x7")),
            other => panic!("unexpected {other:?}"),
        }
        // x0 is reserved in an affine space
        assert!(Polynomial::parse("x0 + x1", &VarSpace::affine(2)).is_err());
        assert!(Polynomial::parse("y0", &vs(1)).is_err());
    }

    #[test]
    fn other_syntax_errors() {
        for bad in ["", "x0 +", "(x0", "x0 ^ x1", "1/0", "x0 # c", "x01"] {
            assert!(Polynomial::parse(bad, &vs(2)).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn format_descending() {
        let f = Polynomial::parse("x0*x2 - x1^2 + 3/2*x0^2", &vs(3)).unwrap();
        // grlex-left: x1^2 > x0*x2 > x0^2
        assert_eq!(f.format(&vs(3), GradedOrdering::GrlexLeft), "-x1^2 + x0*x2 + 3/2*x0^2");
        assert_eq!(Polynomial::zero(2).format(&vs(2), GradedOrdering::GrlexLeft), "0");
        let g = Polynomial::parse("x2 - x1^2", &VarSpace::affine(2)).unwrap();
        assert_eq!(g.format(&VarSpace::affine(2), GradedOrdering::GrlexLeft), "-x1^2 + x2");
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(ts in prop::collection::vec((prop::collection::vec(0u32..4, 3), -9i64..10, 1i64..5), 0..7)) {
            let f = Polynomial::from_terms(
                3,
                ts.into_iter().map(|(e, a, b)| (ExponentVector::new(e), BigRational::new(a.into(), b.into()))),
            ).unwrap();
            for ord in GradedOrdering::ALL {
                let text = f.format(&vs(3), ord);
                prop_assert_eq!(Polynomial::parse(&text, &vs(3)).unwrap(), f.clone());
            }
        }
    }
}
