use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{Coefficient, MultiIndex, Rational};
use crate::error::{Error, Result};

/// A truncated formal series in `dim` variables: an element of the algebra of
/// polynomials modulo all monomials of degree `> order`.
///
/// Terms are stored sparsely and canonically: no stored coefficient is zero
/// and every stored index has degree `<= order`. Iteration follows the deg-lex
/// order of [`MultiIndex`].
#[derive(Clone, PartialEq)]
pub struct Jet<C = Rational> {
    dim: usize,
    order: u32,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: Coefficient> Jet<C> {
    pub fn zero(dim: usize, order: u32) -> Self {
        Jet {
            dim,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, order: u32, c: C) -> Self {
        Self::monomial(dim, order, MultiIndex::zero(dim), c)
    }

    pub fn one(dim: usize, order: u32) -> Self {
        Self::constant(dim, order, C::one())
    }

    /// The coordinate function `x_i`.
    pub fn variable(dim: usize, order: u32, i: usize) -> Self {
        Self::monomial(dim, order, MultiIndex::unit(dim, i), C::one())
    }

    /// `c x^α`, or zero when `|α| > order`.
    pub fn monomial(dim: usize, order: u32, index: MultiIndex, c: C) -> Self {
        let mut jet = Self::zero(dim, order);
        jet.set(index, c);
        jet
    }

    /// Builds a jet from arbitrary terms: repeated indices are summed, zero
    /// coefficients dropped and terms above `order` silently discarded.
    pub fn from_terms(dim: usize, order: u32, terms: impl IntoIterator<Item = (MultiIndex, C)>) -> Self {
        let mut jet = Self::zero(dim, order);
        for (index, c) in terms {
            assert_eq!(index.dim(), dim, "multi-index dimension");
            jet.add_term(index, &c);
        }
        jet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn get(&self, index: &MultiIndex) -> Option<&C> {
        self.terms.get(index)
    }

    pub fn coeff(&self, index: &MultiIndex) -> C {
        self.terms.get(index).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// Lowest degree of a nonzero term; `None` for the zero jet.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().next().map(MultiIndex::degree)
    }

    pub fn set(&mut self, index: MultiIndex, c: C) {
        if index.degree() > self.order {
            return;
        }
        if c.is_zero() {
            self.terms.remove(&index);
        } else {
            self.terms.insert(index, c);
        }
    }

    pub fn add_term(&mut self, index: MultiIndex, c: &C) {
        if index.degree() > self.order || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&index) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&index);
                }
            }
            None => {
                self.terms.insert(index, c.clone());
            }
        }
    }

    /// Same terms viewed at another truncation order. Lowering the order drops
    /// terms; raising it treats the jet as an exact polynomial.
    pub fn with_order(&self, order: u32) -> Self {
        Jet {
            dim: self.dim,
            order,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.degree() <= order)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.order != other.order {
            return Err(Error::ShapeMismatch {
                d1: self.dim,
                m1: self.order,
                d2: other.dim,
                m2: other.order,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Product truncated at `order`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<MultiIndex, C> = BTreeMap::new();
        for (a, ca) in &self.terms {
            let budget = self.order - a.degree();
            // terms iterate by ascending degree, so stop at the first overflow
            for (b, cb) in other.terms.iter().take_while(|(b, _)| b.degree() <= budget) {
                let prod = ca.mul_ref(cb);
                let key = a + b;
                match acc.get_mut(&key) {
                    Some(slot) => *slot += &prod,
                    None => {
                        acc.insert(key, prod);
                    }
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Jet {
            dim: self.dim,
            order: self.order,
            terms: acc,
        }
    }

    pub fn neg(&self) -> Self {
        Jet {
            dim: self.dim,
            order: self.order,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim, self.order);
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (k.clone(), v.mul_ref(c)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Jet {
            dim: self.dim,
            order: self.order,
            terms,
        }
    }

    /// Multiplies by the monomial `x^β`, truncating.
    pub fn shift(&self, by: &MultiIndex) -> Self {
        let budget = match self.order.checked_sub(by.degree()) {
            Some(b) => b,
            None => return Self::zero(self.dim, self.order),
        };
        Jet {
            dim: self.dim,
            order: self.order,
            terms: self
                .terms
                .iter()
                .take_while(|(k, _)| k.degree() <= budget)
                .map(|(k, v)| (k + by, v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.dim, self.order);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Formal partial derivative in `x_i`, kept at the same truncation order.
    ///
    /// The top-degree part of the result is not determined by the jet; callers
    /// multiply it by an element of the maximal ideal before relying on it.
    pub(crate) fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim, self.order);
        for (k, v) in &self.terms {
            let e = k.get(i);
            if let Some(lower) = k.lower(i) {
                out.add_term(lower, &v.mul_ref(&C::from_i64(e as i64)));
            }
        }
        out
    }

    /// Substitutes `args[i]` for `x_i`. The arguments must lie in the maximal
    /// ideal and share this jet's shape, so every retained coefficient is exact.
    pub fn compose(&self, args: &[Jet<C>]) -> Result<Self> {
        if args.len() != self.dim {
            return Err(Error::ComponentCount {
                what: "substitution",
                expected: self.dim,
                found: args.len(),
            });
        }
        let (dim, order) = match args.first() {
            Some(a) => (a.dim, a.order),
            None => (0, self.order),
        };
        for a in args {
            if a.dim != dim || a.order != order {
                return Err(Error::ShapeMismatch {
                    d1: dim,
                    m1: order,
                    d2: a.dim,
                    m2: a.order,
                });
            }
            debug_assert!(a.constant_term().is_zero(), "substituted series must vanish at 0");
        }
        if self.dim == 0 {
            return Ok(Jet::constant(dim, order, self.constant_term()));
        }
        let mut powers = PowerCache::new(args);
        let mut out = Jet::zero(dim, order);
        for (alpha, c) in &self.terms {
            if alpha.degree() > order {
                break;
            }
            let Some(term) = powers.monomial(alpha) else {
                continue;
            };
            for (k, v) in term.terms() {
                out.add_term(k.clone(), &v.mul_ref(c));
            }
        }
        Ok(out)
    }

    pub fn map_coeffs<D: Coefficient>(&self, mut f: impl FnMut(&C) -> D) -> Jet<D> {
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (k.clone(), f(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Jet {
            dim: self.dim,
            order: self.order,
            terms,
        }
    }

    /// Renders with the given variable names in the polynomial grammar.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (k, c) in &self.terms {
            let monomial = render_monomial(k, names);
            let (negative, body) = render_coeff_factor(c, monomial.is_empty());
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&body);
            if !monomial.is_empty() {
                if !body.is_empty() {
                    out.push('*');
                }
                out.push_str(&monomial);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

// Returns (is_negative, text) for a coefficient; the text is empty for a unit
// coefficient in front of a nonconstant monomial.
fn render_coeff_factor<C: Coefficient>(c: &C, bare: bool) -> (bool, String) {
    if let Some(q) = c.as_rational() {
        let negative = q < Rational::zero();
        let abs = if negative { -q } else { q };
        if abs.is_one() && !bare {
            return (negative, String::new());
        }
        return (negative, abs.to_string());
    }
    (false, format!("({c})"))
}

fn render_monomial(k: &MultiIndex, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in k.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

/// Default variable names: `x, y, z` for up to three variables, `x1..xd` otherwise.
pub fn default_names(dim: usize) -> Vec<String> {
    if dim <= 3 {
        ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=dim).map(|i| format!("x{i}")).collect()
    }
}

impl<C: Coefficient> fmt::Display for Jet<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&default_names(self.dim)))
    }
}

impl<C: Coefficient> fmt::Debug for Jet<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(d={}, m={}; {})", self.dim, self.order, self)
    }
}

// Lazily computed powers `args[i]^k` used by substitution.
struct PowerCache<'a, C> {
    args: &'a [Jet<C>],
    powers: Vec<Vec<Jet<C>>>,
}

impl<'a, C: Coefficient> PowerCache<'a, C> {
    fn new(args: &'a [Jet<C>]) -> Self {
        let powers = args
            .iter()
            .map(|a| vec![Jet::one(a.dim, a.order)])
            .collect();
        PowerCache { args, powers }
    }

    fn power(&mut self, i: usize, k: u32) -> &Jet<C> {
        let k = k as usize;
        while self.powers[i].len() <= k {
            let next = self.powers[i].last().unwrap().mul_unchecked(&self.args[i]);
            self.powers[i].push(next);
        }
        &self.powers[i][k]
    }

    fn monomial(&mut self, alpha: &MultiIndex) -> Option<Jet<C>> {
        let mut acc: Option<Jet<C>> = None;
        for (i, &e) in alpha.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = self.power(i, e).clone();
            if p.is_zero() {
                return None;
            }
            acc = Some(match acc {
                None => p,
                Some(a) => a.mul_unchecked(&p),
            });
        }
        match acc {
            None => {
                let a = &self.args[0];
                Some(Jet::one(a.dim, a.order))
            }
            Some(j) if j.is_zero() => None,
            Some(j) => Some(j),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{parse_polynomial, rat};

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn p(text: &str, m: u32) -> Jet {
        parse_polynomial(text, &names(), m).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(p("x + y", 2).try_add(&p("x - y", 2)).unwrap(), p("2*x", 2));
        let f = p("x^2 - 3*y", 2);
        assert_eq!(f.try_add(&Jet::zero(2, 2)).unwrap(), f);
        assert_eq!(p("1/2*x", 2).try_add(&p("1/3*x", 2)).unwrap(), p("5/6*x", 2));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(p("x + y", 2).try_mul(&p("x - y", 2)).unwrap(), p("x^2 - y^2", 2));
        assert_eq!(p("x + y^2", 2).try_mul(&p("y", 2)).unwrap(), p("x*y", 2));
        assert_eq!(p("1/2*x", 2).try_mul(&p("2/3*y", 2)).unwrap(), p("1/3*x*y", 2));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        assert!(matches!(
            p("x", 2).try_add(&p("x", 3)),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(p("x", 2).try_mul(&Jet::zero(3, 2)).is_err());
    }

    #[test]
    fn render_forms() {
        assert_eq!(p("x + 2*y^2 - 1/3", 3).to_string(), "-1/3 + x + 2*y^2");
        assert_eq!(p("-x*y", 3).to_string(), "-x*y");
        assert_eq!(Jet::<Rational>::zero(2, 1).to_string(), "0");
    }

    #[test]
    fn compose_substitutes() {
        // (x + y^2) at (x, y + x^2), order 3
        let f = p("x + y^2", 3);
        let g = [p("x", 3), p("y + x^2", 3)];
        assert_eq!(f.compose(&g).unwrap(), p("x + y^2 + 2*x^2*y", 3));
    }

    #[test]
    fn shift_and_pow() {
        let f = p("x + y", 3);
        assert_eq!(f.shift(&MultiIndex::new(vec![1, 1])), p("x^2*y + x*y^2", 3));
        assert_eq!(f.pow(3), p("x^3 + 3*x^2*y + 3*x*y^2 + y^3", 3));
        assert_eq!(f.pow(4), Jet::zero(2, 3));
        assert_eq!(f.valuation(), Some(1));
        assert_eq!(f.scale(&rat(1, 2)), p("1/2*x + 1/2*y", 3));
    }
}
