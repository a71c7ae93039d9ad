use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::laurent::LaurentPoly;
use super::{Coefficient, Rational};

/// Finite sums `Σ c_q e^q` with rational coefficients and rational exponents.
///
/// This is the group ring of `(ℚ, +)` over `ℚ`. Distinct exponentials `e^q`
/// are linearly independent over the algebraic numbers (Lindemann–Weierstrass),
/// so the canonical term map is an exact normal form and the zero test is
/// emptiness. Values of flows with nonzero rational eigenvalues at rational
/// times live here.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExpRational {
    terms: BTreeMap<Rational, Rational>,
}

impl ExpRational {
    /// `c e^q`.
    pub fn exp_term(c: Rational, q: Rational) -> Self {
        let mut out = ExpRational::default();
        out.add_term(q, c);
        out
    }

    /// `e^q`.
    pub fn exp(q: Rational) -> Self {
        Self::exp_term(Rational::one(), q)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, q: Rational, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(q.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&q);
        }
    }

    fn common_denominator(a: &Self, b: &Self) -> BigInt {
        a.terms
            .keys()
            .chain(b.terms.keys())
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
    }

    fn to_laurent(&self, denom: &BigInt) -> Option<LaurentPoly> {
        let mut p = LaurentPoly::default();
        for (q, c) in &self.terms {
            let k = (q * Rational::from_integer(denom.clone())).to_integer();
            p.add_term(vec![i64::try_from(k).ok()?], c.clone());
        }
        Some(p)
    }
}

impl Zero for ExpRational {
    fn zero() -> Self {
        ExpRational::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ExpRational {
    fn one() -> Self {
        ExpRational::exp_term(Rational::one(), Rational::zero())
    }
}

impl<'a> AddAssign<&'a ExpRational> for ExpRational {
    fn add_assign(&mut self, rhs: &'a ExpRational) {
        for (q, c) in &rhs.terms {
            self.add_term(q.clone(), c.clone());
        }
    }
}

impl<'a> SubAssign<&'a ExpRational> for ExpRational {
    fn sub_assign(&mut self, rhs: &'a ExpRational) {
        for (q, c) in &rhs.terms {
            self.add_term(q.clone(), -c.clone());
        }
    }
}

impl Add for ExpRational {
    type Output = ExpRational;

    fn add(mut self, rhs: ExpRational) -> ExpRational {
        self += &rhs;
        self
    }
}

impl Sub for ExpRational {
    type Output = ExpRational;

    fn sub(mut self, rhs: ExpRational) -> ExpRational {
        self -= &rhs;
        self
    }
}

impl Mul for ExpRational {
    type Output = ExpRational;

    fn mul(self, rhs: ExpRational) -> ExpRational {
        self.mul_ref(&rhs)
    }
}

impl Neg for ExpRational {
    type Output = ExpRational;

    fn neg(self) -> ExpRational {
        ExpRational {
            terms: self.terms.into_iter().map(|(q, c)| (q, -c)).collect(),
        }
    }
}

impl Coefficient for ExpRational {
    fn mul_ref(&self, rhs: &Self) -> Self {
        let mut out = ExpRational::default();
        for (qa, ca) in &self.terms {
            for (qb, cb) in &rhs.terms {
                out.add_term(qa + qb, ca * cb);
            }
        }
        out
    }

    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        let denom = Self::common_denominator(self, rhs);
        let a = self.to_laurent(&denom)?;
        let b = rhs.to_laurent(&denom)?;
        let q = LaurentPoly::div_exact(&a, &b, &[false])?;
        let d = Rational::from_integer(denom);
        let mut out = ExpRational::default();
        for (k, c) in q.terms {
            out.add_term(Rational::from_integer(k[0].into()) / &d, c);
        }
        Some(out)
    }

    fn from_rational(q: &Rational) -> Self {
        ExpRational::exp_term(q.clone(), Rational::zero())
    }

    fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Rational::zero()).cloned(),
            _ => None,
        }
    }
}

impl fmt::Display for ExpRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (q, c)) in self.terms.iter().enumerate() {
            let negative = c < &Rational::zero();
            let abs = if negative { -c.clone() } else { c.clone() };
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if q.is_zero() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "e^({q})")?;
            } else {
                write!(f, "{abs}*e^({q})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExpRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExpRational({self})")
    }
}
