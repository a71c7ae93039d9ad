//! Exact scalars, multi-indices and truncated multivariate series.
//!
//! Everything in the engine is generic over [`Coefficient`], an exact
//! integral domain. Three instances ship with the crate:
//!
//! * [`Rational`], arbitrary precision rationals (a field);
//! * [`ExpRational`], rational combinations of `e^q` for rational `q`, used
//!   when a flow with nonzero eigenvalues is evaluated at a fixed time;
//! * [`crate::quasipoly::Quasipolynomial`], used for symbolic group times.
//!
//! There is no tolerance parameter anywhere: zero tests are exact.

mod exp_rational;
mod jet;
pub(crate) mod laurent;
mod multi_index;
pub(crate) mod parse;

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, Neg, SubAssign};

use num_traits::{One, Zero};

pub use exp_rational::ExpRational;
pub use jet::{default_names, Jet};
pub use multi_index::{deglex_compare, monomial_basis, monomial_count, MultiIndex};
pub use parse::{parse_polynomial, parse_rational, parse_sparse_polynomial};

/// Arbitrary precision rational numbers.
pub type Rational = num_rational::BigRational;

/// Builds a rational from a numerator and a denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

/// Builds an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// An exact integral domain.
///
/// Implementors provide exact addition, negation and multiplication, an exact
/// zero test, division when the divisor divides exactly, and an embedding of
/// the rationals.
pub trait Coefficient:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    /// Whether every nonzero element is invertible.
    const IS_FIELD: bool = false;

    fn mul_ref(&self, rhs: &Self) -> Self;

    /// `Some(q)` with `q * rhs == self` when `rhs` divides `self` exactly.
    fn div_exact(&self, rhs: &Self) -> Option<Self>;

    fn from_rational(q: &Rational) -> Self;

    /// Multiplicative inverse; only meaningful when [`Coefficient::IS_FIELD`].
    fn inverse(&self) -> Option<Self> {
        Self::one().div_exact(self)
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&int(n))
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out += rhs;
        out
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out -= rhs;
        out
    }

    /// `Some(q)` when the element is the image of a rational.
    fn as_rational(&self) -> Option<Rational>;
}

impl Coefficient for Rational {
    const IS_FIELD: bool = true;

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

/// Binomial coefficient as an exact rational.
pub(crate) fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut acc = num_bigint::BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    Rational::from_integer(acc)
}

/// Integral power of a rational, negative exponents allowed for nonzero bases.
pub(crate) fn rational_pow(base: &Rational, exp: i64) -> Rational {
    use num_traits::Pow;
    if exp >= 0 {
        Pow::pow(base, exp as u64)
    } else {
        Pow::pow(&base.recip(), exp.unsigned_abs())
    }
}
