//! Reader for the polynomial input grammar.
//!
//! ```text
//! poly   := term (("+" | "-") term)*
//! term   := coeff ("*"? factor)* | factor ("*"? factor)*
//! factor := var ("^" uint)?
//! coeff  := int | int "/" uint
//! ```
//!
//! Whitespace is ignored and a leading sign on the first term is accepted.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Jet, MultiIndex, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '/' => Token::Slash,
            '^' => Token::Caret,
            '(' => Token::LParen,
            ')' => Token::RParen,
            ',' => Token::Comma,
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Token::Int(text[start..i].parse().unwrap())));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            other => return Err(Error::syntax(start, format!("unexpected character '{other}'"))),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

pub(crate) struct Cursor<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(tokens: &'a [(usize, Token)], text_len: usize) -> Self {
        Cursor {
            tokens,
            pos: 0,
            end: text_len,
        }
    }

    pub(crate) fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    pub(crate) fn bump(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t);
        self.pos += 1;
        t
    }

    pub(crate) fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Token, what: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(Error::syntax(self.offset(), format!("expected {what}")))
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub(crate) fn uint(&mut self) -> Result<BigInt> {
        match self.peek() {
            Some(Token::Int(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(Error::syntax(self.offset(), "expected unsigned integer")),
        }
    }

    /// `int` or `int "/" uint`, unsigned.
    pub(crate) fn unsigned_rational(&mut self) -> Result<Rational> {
        let numer = self.uint()?;
        if self.eat(&Token::Slash) {
            let at = self.offset();
            let denom = self.uint()?;
            if denom.is_zero() {
                return Err(Error::syntax(at, "zero denominator"));
            }
            Ok(Rational::new(numer, denom))
        } else {
            Ok(Rational::from_integer(numer))
        }
    }

    /// Optionally signed rational.
    pub(crate) fn rational(&mut self) -> Result<Rational> {
        let negative = self.eat(&Token::Minus);
        if !negative {
            self.eat(&Token::Plus);
        }
        let q = self.unsigned_rational()?;
        Ok(if negative { -q } else { q })
    }

    /// Optionally signed machine integer.
    pub(crate) fn small_int(&mut self) -> Result<i64> {
        let negative = self.eat(&Token::Minus);
        let at = self.offset();
        let n = self.uint()?;
        let n: i64 = i64::try_from(n).map_err(|_| Error::syntax(at, "integer out of range"))?;
        Ok(if negative { -n } else { n })
    }
}

/// Parses `p/q` or an integer, with optional sign.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor::new(&tokens, text.len());
    let q = cur.rational()?;
    if !cur.at_end() {
        return Err(Error::syntax(cur.offset(), "trailing input after rational"));
    }
    Ok(q)
}

/// Parses a polynomial into combined `(exponents, coefficient)` pairs with
/// nonzero coefficients, sorted by exponent vector. No degree bound applies.
pub fn parse_sparse_polynomial(text: &str, variables: &[String]) -> Result<Vec<(Vec<u32>, Rational)>> {
    let raw = parse_terms(text, variables)?;
    let mut combined: std::collections::BTreeMap<Vec<u32>, Rational> = Default::default();
    for (_, e, c) in raw {
        *combined.entry(e).or_insert_with(Rational::zero) += c;
    }
    Ok(combined.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

// Returns (position, exponents, coefficient) for each written term.
fn parse_terms(text: &str, variables: &[String]) -> Result<Vec<(usize, Vec<u32>, Rational)>> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor::new(&tokens, text.len());
    if cur.at_end() {
        return Err(Error::syntax(0, "empty polynomial"));
    }
    let mut terms = Vec::new();
    let mut negative = if cur.eat(&Token::Minus) {
        true
    } else {
        cur.eat(&Token::Plus);
        false
    };
    loop {
        let at = cur.offset();
        let (exps, coeff) = parse_term(&mut cur, variables)?;
        terms.push((at, exps, if negative { -coeff } else { coeff }));
        if cur.eat(&Token::Plus) {
            negative = false;
        } else if cur.eat(&Token::Minus) {
            negative = true;
        } else if cur.at_end() {
            break;
        } else {
            return Err(Error::syntax(cur.offset(), "expected '+', '-' or end of input"));
        }
    }
    Ok(terms)
}

fn parse_term(cur: &mut Cursor<'_>, variables: &[String]) -> Result<(Vec<u32>, Rational)> {
    let mut exps = vec![0u32; variables.len()];
    let mut coeff = Rational::one();
    let mut seen_any = false;
    if let Some(Token::Int(_)) = cur.peek() {
        coeff = cur.unsigned_rational()?;
        seen_any = true;
    }
    loop {
        let had_star = seen_any && cur.eat(&Token::Star);
        match cur.peek() {
            Some(Token::Ident(name)) => {
                let at = cur.offset();
                cur.bump();
                let idx = variables
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                let power = if cur.eat(&Token::Caret) {
                    let n = cur.uint()?;
                    u32::try_from(n).map_err(|_| Error::syntax(at, "exponent out of range"))?
                } else {
                    1
                };
                exps[idx] += power;
                seen_any = true;
            }
            _ if had_star => return Err(Error::syntax(cur.offset(), "expected variable after '*'")),
            _ => break,
        }
    }
    if !seen_any {
        return Err(Error::syntax(cur.offset(), "expected coefficient or variable"));
    }
    Ok((exps, coeff))
}

/// Parses a polynomial in the declared variables as a jet of order `order`.
///
/// Terms of degree above `order` are rejected rather than truncated.
pub fn parse_polynomial(text: &str, variables: &[String], order: u32) -> Result<Jet> {
    let dim = variables.len();
    let mut jet = Jet::zero(dim, order);
    for (_, exps, c) in parse_terms(text, variables)? {
        let degree: u32 = exps.iter().sum();
        if degree > order {
            return Err(Error::DegreeOverflow { degree, order });
        }
        jet.add_term(MultiIndex::new(exps), &c);
    }
    Ok(jet)
}
