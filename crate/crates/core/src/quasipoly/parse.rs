//! Reader for rendered quasipolynomials.
//!
//! ```text
//! qp     := term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := "(" poly ")" | base "^" var | "exp(" (rational "*")? var ")"
//! base   := uint | "(" rational ")"
//! ```
//!
//! `poly` is the polynomial grammar over the time variable names.

use num_traits::One;

use super::qp::{Quasipolynomial, TimeKind, TimeVars};
use crate::error::{Error, Result};
use crate::ring::parse::{tokenize, Cursor, Token};
use crate::ring::{parse_rational, parse_sparse_polynomial, Rational};

pub(crate) fn parse_quasipolynomial(text: &str, vars: &TimeVars) -> Result<Quasipolynomial> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor::new(&tokens, text.len());
    if cur.at_end() {
        return Err(Error::syntax(0, "empty quasipolynomial"));
    }
    let mut out = Quasipolynomial::default();
    let mut negative = cur.eat(&Token::Minus);
    loop {
        let term = parse_term(&mut cur, text, vars)?;
        if negative {
            out -= &term;
        } else {
            out += &term;
        }
        if cur.eat(&Token::Plus) {
            negative = false;
        } else if cur.eat(&Token::Minus) {
            negative = true;
        } else if cur.at_end() {
            return Ok(out);
        } else {
            return Err(Error::syntax(cur.offset(), "expected '+', '-' or end of input"));
        }
    }
}

fn parse_term(cur: &mut Cursor<'_>, text: &str, vars: &TimeVars) -> Result<Quasipolynomial> {
    let mut acc = Quasipolynomial::one();
    loop {
        let factor = parse_factor(cur, text, vars)?;
        acc = acc.try_mul(&factor)?;
        if !cur.eat(&Token::Star) {
            return Ok(acc);
        }
    }
}

fn var_index(name: &str, vars: &TimeVars, kind: Option<TimeKind>, at: usize) -> Result<usize> {
    let i = vars.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
    if let Some(k) = kind {
        if vars.kind(i) != k {
            return Err(Error::syntax(at, format!("time variable \"{name}\" has the wrong kind here")));
        }
    }
    Ok(i)
}

fn parse_factor(cur: &mut Cursor<'_>, text: &str, vars: &TimeVars) -> Result<Quasipolynomial> {
    let at = cur.offset();
    match cur.peek() {
        Some(Token::LParen) => {
            let inner = matching_paren(cur, text)?;
            if cur.eat(&Token::Caret) {
                let mu = parse_rational(inner)?;
                let var = expect_var(cur, vars, Some(TimeKind::Discrete))?;
                return Ok(Quasipolynomial::discrete_exp(var, mu));
            }
            let names = vars.names();
            let mut q = Quasipolynomial::default();
            for (exps, c) in parse_sparse_polynomial(inner, &names)? {
                let mono = exps.iter().enumerate().map(|(v, e)| (v, *e)).collect();
                q.add_term(Vec::new(), mono, c);
            }
            Ok(q)
        }
        Some(Token::Int(_)) => {
            let mu = Rational::from_integer(cur.uint()?);
            cur.expect(&Token::Caret, "'^' after base")?;
            let var = expect_var(cur, vars, Some(TimeKind::Discrete))?;
            Ok(Quasipolynomial::discrete_exp(var, mu))
        }
        Some(Token::Ident(name)) if name == "exp" => {
            cur.bump();
            cur.expect(&Token::LParen, "'(' after exp")?;
            let lambda = if matches!(cur.peek(), Some(Token::Ident(_))) {
                Rational::one()
            } else {
                let l = cur.rational()?;
                cur.expect(&Token::Star, "'*' between rate and variable")?;
                l
            };
            let var = expect_var(cur, vars, Some(TimeKind::Continuous))?;
            cur.expect(&Token::RParen, "')'")?;
            Ok(Quasipolynomial::continuous_exp(var, lambda))
        }
        _ => Err(Error::syntax(at, "expected '(', a base or exp(...)")),
    }
}

fn expect_var(cur: &mut Cursor<'_>, vars: &TimeVars, kind: Option<TimeKind>) -> Result<usize> {
    let at = cur.offset();
    match cur.bump() {
        Some(Token::Ident(name)) => var_index(name, vars, kind, at),
        _ => Err(Error::syntax(at, "expected time variable")),
    }
}

// Consumes a parenthesized group and returns its inner text.
fn matching_paren<'t>(cur: &mut Cursor<'_>, text: &'t str) -> Result<&'t str> {
    let open = cur.offset();
    cur.bump();
    let mut depth = 1usize;
    loop {
        let at = cur.offset();
        match cur.bump() {
            Some(Token::LParen) => depth += 1,
            Some(Token::RParen) => {
                depth -= 1;
                if depth == 0 {
                    return Ok(&text[open + 1..at]);
                }
            }
            Some(_) => {}
            None => return Err(Error::syntax(open, "unbalanced '('")),
        }
    }
}
