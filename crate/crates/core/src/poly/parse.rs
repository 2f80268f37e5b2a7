//! Recursive-descent parser for the polynomial text grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' INT)?
//! atom   := INT ('/' INT)? | IDENT | '(' expr ')'
//! ```
//!
//! Implicit multiplication is rejected.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Exponent, Poly};
use crate::error::{Error, Result};
use crate::rational::Q;

pub const DEFAULT_EXPONENT_CAP: u32 = 1 << 16;

#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    /// Largest exponent allowed per variable in the expanded result.
    pub exponent_cap: u32,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { exponent_cap: DEFAULT_EXPONENT_CAP }
    }
}

pub fn parse(text: &str, vars: &[String]) -> Result<Poly> {
    parse_with(text, vars, ParseOptions::default())
}

pub fn parse_with(text: &str, vars: &[String], opts: ParseOptions) -> Result<Poly> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, vars, opts, end: text.len() };
    let out = p.expr()?;
    if let Some(tok) = p.peek() {
        return Err(Error::syntax(tok.offset, format!("unexpected {}", tok.kind.describe())));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Int(BigInt),
    Ratio(BigInt, BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Int(n) => format!("number `{n}`"),
            Kind::Ratio(n, d) => format!("number `{n}/{d}`"),
            Kind::Ident(s) => format!("identifier `{s}`"),
            Kind::Plus => "`+`".into(),
            Kind::Minus => "`-`".into(),
            Kind::Star => "`*`".into(),
            Kind::Caret => "`^`".into(),
            Kind::LParen => "`(`".into(),
            Kind::RParen => "`)`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Kind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '+' => {
                chars.next();
                out.push(Token { kind: Kind::Plus, offset: i });
            }
            '-' | '\u{2212}' => {
                chars.next();
                out.push(Token { kind: Kind::Minus, offset: i });
            }
            '*' => {
                chars.next();
                out.push(Token { kind: Kind::Star, offset: i });
            }
            '^' => {
                chars.next();
                out.push(Token { kind: Kind::Caret, offset: i });
            }
            '(' => {
                chars.next();
                out.push(Token { kind: Kind::LParen, offset: i });
            }
            ')' => {
                chars.next();
                out.push(Token { kind: Kind::RParen, offset: i });
            }
            '0'..='9' => {
                let num = take_digits(&mut chars);
                let n: BigInt = num.parse().expect("digits");
                let mut kind = Kind::Int(n.clone());
                let mut look = chars.clone();
                while matches!(look.peek(), Some((_, w)) if w.is_whitespace()) {
                    look.next();
                }
                if let Some(&(j, '/')) = look.peek() {
                    look.next();
                    while matches!(look.peek(), Some((_, w)) if w.is_whitespace()) {
                        look.next();
                    }
                    match look.peek() {
                        Some(&(_, '0'..='9')) => {
                            chars = look;
                            let den = take_digits(&mut chars);
                            let d: BigInt = den.parse().expect("digits");
                            if d.is_zero() {
                                return Err(Error::syntax(j, "zero denominator"));
                            }
                            kind = Kind::Ratio(n, d);
                        }
                        _ => return Err(Error::syntax(j, "`/` must be followed by an integer denominator")),
                    }
                }
                out.push(Token { kind, offset: i });
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token { kind: Kind::Ident(s), offset: i });
            }
            '/' => return Err(Error::syntax(i, "division is only allowed inside rational literals")),
            other => return Err(Error::syntax(i, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

fn take_digits(chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>) -> String {
    let mut s = String::new();
    while let Some(&(_, c)) = chars.peek() {
        if c.is_ascii_digit() {
            s.push(c);
            chars.next();
        } else {
            break;
        }
    }
    s
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [String],
    opts: ParseOptions,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn offset(&self) -> usize {
        self.peek().map(|t| t.offset).unwrap_or(self.end)
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(Kind::Plus) => {
                    self.next();
                    acc = acc + self.term()?;
                }
                Some(Kind::Minus) => {
                    self.next();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(Kind::Star) => {
                    let at = self.offset();
                    self.next();
                    let rhs = self.unary()?;
                    acc = &acc * &rhs;
                    self.check_cap(&acc, at)?;
                }
                Some(Kind::Int(_) | Kind::Ratio(..) | Kind::Ident(_) | Kind::LParen) => {
                    return Err(Error::syntax(self.offset(), "implicit multiplication is not allowed; use `*`"));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek().map(|t| &t.kind) {
            Some(Kind::Minus) => {
                self.next();
                Ok(-self.unary()?)
            }
            Some(Kind::Plus) => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if matches!(self.peek().map(|t| &t.kind), Some(Kind::Caret)) {
            self.next();
            let at = self.offset();
            let exp = match self.next() {
                Some(Token { kind: Kind::Int(n), .. }) => n,
                Some(t) => return Err(Error::syntax(t.offset, format!("expected an integer exponent, found {}", t.kind.describe()))),
                None => return Err(Error::syntax(self.end, "expected an integer exponent")),
            };
            let cap = self.opts.exponent_cap;
            let k: u32 = u32::try_from(&exp).ok().filter(|k| *k <= cap).ok_or(Error::ExponentOverflow { offset: at, cap })?;
            if let Some(d) = base.terms.keys().map(|e| e.0.iter().copied().max().unwrap_or(0)).max() {
                if u64::from(d) * u64::from(k) > u64::from(cap) {
                    return Err(Error::ExponentOverflow { offset: at, cap });
                }
            }
            if matches!(self.peek().map(|t| &t.kind), Some(Kind::Caret)) {
                return Err(Error::syntax(self.offset(), "chained `^` is ambiguous; add parentheses"));
            }
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        let n = self.nvars();
        match self.next() {
            Some(Token { kind: Kind::Int(v), .. }) => Ok(Poly::constant(n, Q::from_integer(v))),
            Some(Token { kind: Kind::Ratio(a, b), .. }) => Ok(Poly::constant(n, Q::new(a, b))),
            Some(Token { kind: Kind::Ident(name), offset }) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => Ok(Poly::monomial(n, Exponent::unit(n, i), Q::from_integer(1.into()))),
                None => Err(Error::UnknownVariable { name, offset }),
            },
            Some(Token { kind: Kind::LParen, offset }) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token { kind: Kind::RParen, .. }) => Ok(inner),
                    _ => Err(Error::syntax(offset, "unbalanced `(`")),
                }
            }
            Some(t) => Err(Error::syntax(t.offset, format!("unexpected {}", t.kind.describe()))),
            None => Err(Error::syntax(self.end, "unexpected end of input")),
        }
    }

    fn check_cap(&self, p: &Poly, at: usize) -> Result<()> {
        let cap = self.opts.exponent_cap;
        if p.terms.keys().any(|e| e.0.iter().any(|&a| a > cap)) {
            return Err(Error::ExponentOverflow { offset: at, cap });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn expands_binomial() {
        let v = vars(&["x", "y", "z"]);
        let p = parse("x*y + x^4*y^3 + (z+y)^3", &v).unwrap();
        let expect = [
            ([1, 1, 0], 1),
            ([4, 3, 0], 1),
            ([0, 0, 3], 1),
            ([0, 1, 2], 3),
            ([0, 2, 1], 3),
            ([0, 3, 0], 1),
        ];
        assert_eq!(p.num_terms(), expect.len());
        for (e, c) in expect {
            assert_eq!(p.coeff(&Exponent(e.to_vec())), qi(c));
        }
    }

    #[test]
    fn zero_and_cancellation() {
        let v = vars(&["x"]);
        assert!(parse("0", &v).unwrap().is_zero());
        assert!(parse("x^2 - x^2", &v).unwrap().is_zero());
    }

    #[test]
    fn precedence_and_unary_minus() {
        let v = vars(&["x", "y"]);
        assert_eq!(parse("-x^2", &v).unwrap(), -parse("x^2", &v).unwrap());
        assert_eq!(parse("2*x + 3*y*x", &v).unwrap(), parse("x*(2 + 3*y)", &v).unwrap());
        let p = parse("1/2*x - 3 / 4", &v).unwrap();
        assert_eq!(p.coeff(&Exponent(vec![1, 0])), q(1, 2));
        assert_eq!(p.constant_term(), q(-3, 4));
        assert_eq!(parse("x \u{2212} y", &v).unwrap(), parse("x - y", &v).unwrap());
    }

    #[test]
    fn errors_carry_offsets() {
        let v = vars(&["x", "y"]);
        assert!(matches!(parse("x + w", &v), Err(Error::UnknownVariable { offset: 4, .. })));
        assert!(matches!(parse("x + * y", &v), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse("2x", &v), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse("(x + y", &v), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("x / y", &v), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x^99999999", &v), Err(Error::ExponentOverflow { offset: 2, .. })));
        let opts = ParseOptions { exponent_cap: 8 };
        assert!(matches!(parse_with("(x^3)^3", &v, opts), Err(Error::ExponentOverflow { .. })));
        assert!(matches!(parse_with("x^5*x^5", &v, opts), Err(Error::ExponentOverflow { .. })));
        assert!(parse_with("x^8", &v, opts).is_ok());
    }
}
