//! Exact division in multivariate Laurent polynomial rings over the rationals.
//!
//! Both extended coefficient domains reduce to this ring: their exponentials
//! are rewritten as monomials in independent units (a pairwise coprime base for
//! discrete bases, a common denominator for rational exponents), after which
//! divisibility is decided by ordinary multivariate division.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rational;

#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct LaurentPoly {
    pub terms: BTreeMap<Vec<i64>, Rational>,
}

impl LaurentPoly {
    pub fn add_term(&mut self, exps: Vec<i64>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    fn min_exponents(&self, nvars: usize) -> Vec<i64> {
        let mut mins = vec![i64::MAX; nvars];
        for k in self.terms.keys() {
            for (m, e) in mins.iter_mut().zip(k) {
                *m = (*m).min(*e);
            }
        }
        mins
    }

    fn shifted(&self, by: &[i64]) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.iter().zip(by).map(|(a, b)| a - b).collect(), v.clone()))
                .collect(),
        }
    }

    /// Exact quotient `a / b` in the Laurent ring, additionally requiring
    /// nonnegative exponents in the variables flagged in `polynomial_vars`.
    pub fn div_exact(a: &LaurentPoly, b: &LaurentPoly, polynomial_vars: &[bool]) -> Option<LaurentPoly> {
        if b.terms.is_empty() {
            return None;
        }
        if a.terms.is_empty() {
            return Some(LaurentPoly::default());
        }
        let nvars = polynomial_vars.len();
        let min_a = a.min_exponents(nvars);
        let min_b = b.min_exponents(nvars);
        let mut rem = a.shifted(&min_a);
        let divisor = b.shifted(&min_b);
        let (lead_b, lead_cb) = divisor.terms.iter().next_back().map(|(k, v)| (k.clone(), v.clone()))?;
        let mut quotient = LaurentPoly::default();
        // lex-leading term is the largest key; remainder terms must all be
        // divisible or the division fails
        while let Some((lead_a, lead_ca)) = rem.terms.iter().next_back().map(|(k, v)| (k.clone(), v.clone())) {
            if lead_a.iter().zip(&lead_b).any(|(x, y)| x < y) {
                return None;
            }
            let mono: Vec<i64> = lead_a.iter().zip(&lead_b).map(|(x, y)| x - y).collect();
            let c = &lead_ca / &lead_cb;
            for (k, v) in &divisor.terms {
                let key: Vec<i64> = k.iter().zip(&mono).map(|(x, y)| x + y).collect();
                rem.add_term(key, -(v * &c));
            }
            quotient.add_term(mono, c);
        }
        let offset: Vec<i64> = min_a.iter().zip(&min_b).map(|(x, y)| x - y).collect();
        let neg_offset: Vec<i64> = offset.iter().map(|x| -x).collect();
        let q = quotient.shifted(&neg_offset);
        for k in q.terms.keys() {
            for (e, poly) in k.iter().zip(polynomial_vars) {
                if *poly && *e < 0 {
                    return None;
                }
            }
        }
        Some(q)
    }
}

/// Refines positive integers into a pairwise coprime base such that each
/// input is a product of powers of base elements.
pub(crate) fn coprime_base(inputs: impl IntoIterator<Item = BigUint>) -> Vec<BigUint> {
    let mut base: Vec<BigUint> = inputs.into_iter().filter(|n| n > &BigUint::one()).collect();
    base.sort();
    base.dedup();
    'outer: loop {
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = base[i].gcd(&base[j]);
                if g > BigUint::one() {
                    let a = &base[i] / &g;
                    let b = &base[j] / &g;
                    base.remove(j);
                    base.remove(i);
                    for n in [g, a, b] {
                        if n > BigUint::one() {
                            base.push(n);
                        }
                    }
                    base.sort();
                    base.dedup();
                    continue 'outer;
                }
            }
        }
        return base;
    }
}

/// Exponents of `n` over a pairwise coprime base, or `None` if `n` does not
/// factor over it.
pub(crate) fn factor_over(n: &BigUint, base: &[BigUint]) -> Option<Vec<i64>> {
    let mut rest = n.clone();
    let mut exps = vec![0i64; base.len()];
    for (e, p) in exps.iter_mut().zip(base) {
        while (&rest % p).is_zero() {
            rest /= p;
            *e += 1;
        }
    }
    if rest.is_one() {
        Some(exps)
    } else {
        None
    }
}
