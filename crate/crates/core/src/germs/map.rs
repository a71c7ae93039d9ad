use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{determinant, Matrix};
use crate::ring::{default_names, Coefficient, Jet, MultiIndex, Rational};

/// A formal self-map `x ↦ F(x)` fixing the origin, as a `d`-tuple of jets of
/// a common truncation order.
#[derive(Clone, PartialEq)]
pub struct FormalMap<C = Rational> {
    components: Vec<Jet<C>>,
    linear: Matrix<C>,
}

pub(crate) fn check_components<C: Coefficient>(what: &'static str, components: &[Jet<C>]) -> Result<()> {
    let Some(first) = components.first() else {
        return Err(Error::ComponentCount {
            what,
            expected: 1,
            found: 0,
        });
    };
    let (dim, order) = (first.dim(), first.order());
    if components.len() != dim {
        return Err(Error::ComponentCount {
            what,
            expected: dim,
            found: components.len(),
        });
    }
    for (i, c) in components.iter().enumerate() {
        if c.dim() != dim || c.order() != order {
            return Err(Error::ShapeMismatch {
                d1: dim,
                m1: order,
                d2: c.dim(),
                m2: c.order(),
            });
        }
        if !c.constant_term().is_zero() {
            return Err(Error::ConstantTerm { index: i });
        }
    }
    Ok(())
}

pub(crate) fn linear_part<C: Coefficient>(components: &[Jet<C>]) -> Matrix<C> {
    let dim = components.len();
    components
        .iter()
        .map(|c| (0..dim).map(|j| c.coeff(&MultiIndex::unit(dim, j))).collect())
        .collect()
}

impl<C: Coefficient> FormalMap<C> {
    /// Builds a map from its components, which must share `(d, m)`, number
    /// exactly `d` and vanish at the origin.
    pub fn new(components: Vec<Jet<C>>) -> Result<Self> {
        check_components("map", &components)?;
        let linear = linear_part(&components);
        Ok(FormalMap { components, linear })
    }

    pub fn identity(dim: usize, order: u32) -> Self {
        let components = (0..dim).map(|i| Jet::variable(dim, order, i)).collect::<Vec<_>>();
        let linear = linear_part(&components);
        FormalMap { components, linear }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn order(&self) -> u32 {
        self.components[0].order()
    }

    pub fn components(&self) -> &[Jet<C>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Jet<C> {
        &self.components[i]
    }

    /// Matrix of degree-one coefficients; entry `(i, j)` is the coefficient of
    /// `x_j` in component `i`.
    pub fn linear_part(&self) -> &Matrix<C> {
        &self.linear
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim(), self.order())
    }

    /// Exact invertibility test on the linear part.
    pub fn is_invertible(&self) -> bool {
        !determinant(&self.linear).is_zero()
    }

    /// `self ∘ other`, truncated.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let components = self
            .components
            .iter()
            .map(|c| c.compose(&other.components))
            .collect::<Result<Vec<_>>>()?;
        let linear = linear_part(&components);
        Ok(FormalMap { components, linear })
    }

    /// `f ∘ self`, the pullback of `f`.
    pub fn pullback(&self, f: &Jet<C>) -> Result<Jet<C>> {
        if f.dim() != self.dim() || f.order() != self.order() {
            return Err(Error::ShapeMismatch {
                d1: self.dim(),
                m1: self.order(),
                d2: f.dim(),
                m2: f.order(),
            });
        }
        f.compose(&self.components)
    }

    /// `self^n` for `n ≥ 0`.
    pub fn power(&self, n: u32) -> Self {
        let mut acc = Self::identity(self.dim(), self.order());
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base).expect("equal shapes");
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base).expect("equal shapes");
            }
        }
        acc
    }

    /// The same map at another truncation order (see [`Jet::with_order`]).
    pub fn with_order(&self, order: u32) -> Self {
        let components: Vec<_> = self.components.iter().map(|c| c.with_order(order)).collect();
        let linear = linear_part(&components);
        FormalMap { components, linear }
    }

    pub fn map_coeffs<D: Coefficient>(&self, mut f: impl FnMut(&C) -> D) -> FormalMap<D> {
        let components: Vec<_> = self.components.iter().map(|c| c.map_coeffs(&mut f)).collect();
        let linear = linear_part(&components);
        FormalMap { components, linear }
    }

    pub fn render(&self, names: &[String]) -> Vec<String> {
        self.components.iter().map(|c| c.render(names)).collect()
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() || self.order() != other.order() {
            return Err(Error::ShapeMismatch {
                d1: self.dim(),
                m1: self.order(),
                d2: other.dim(),
                m2: other.order(),
            });
        }
        Ok(())
    }
}

impl FormalMap<Rational> {
    /// Compositional inverse up to the truncation order.
    pub fn invert(&self) -> Result<Self> {
        let dim = self.dim();
        let order = self.order();
        let inv = invert_matrix(&self.linear).ok_or(Error::NotInvertible)?;
        // F = L x + N(x); the inverse solves G = L⁻¹ (x − N(G)), and each
        // fixed-point step fixes one more degree.
        let nonlinear: Vec<Jet> = self
            .components
            .iter()
            .map(|c| {
                let mut n = c.clone();
                for j in 0..dim {
                    n.set(MultiIndex::unit(dim, j), Rational::zero());
                }
                n
            })
            .collect();
        let apply_inverse = |rhs: &[Jet]| -> Vec<Jet> {
            (0..dim)
                .map(|i| {
                    let mut acc = Jet::zero(dim, order);
                    for (j, r) in rhs.iter().enumerate() {
                        if !inv[i][j].is_zero() {
                            acc = acc.try_add(&r.scale(&inv[i][j])).expect("equal shapes");
                        }
                    }
                    acc
                })
                .collect()
        };
        let ident: Vec<Jet> = (0..dim).map(|i| Jet::variable(dim, order, i)).collect();
        let mut g = apply_inverse(&ident);
        for _ in 1..order {
            let rhs: Vec<Jet> = ident
                .iter()
                .zip(&nonlinear)
                .map(|(x, n)| x.try_sub(&n.compose(&g)?))
                .collect::<Result<_>>()?;
            let next = apply_inverse(&rhs);
            if next == g {
                break;
            }
            g = next;
        }
        FormalMap::new(g)
    }

    /// `self^n` for any integer `n`; negative powers need an invertible map.
    pub fn power_signed(&self, n: i64) -> Result<Self> {
        let k = u32::try_from(n.unsigned_abs()).map_err(|_| Error::Unsupported(format!("power {n} is too large")))?;
        if n >= 0 {
            Ok(self.power(k))
        } else {
            Ok(self.invert()?.power(k))
        }
    }

    /// The commutator `a ∘ b ∘ a⁻¹ ∘ b⁻¹`.
    pub fn commutator(a: &Self, b: &Self) -> Result<Self> {
        a.compose(b)?.compose(&a.invert()?)?.compose(&b.invert()?)
    }
}

/// Inverse of a square rational matrix by Gauss–Jordan elimination.
pub(crate) fn invert_matrix(m: &Matrix<Rational>) -> Option<Matrix<Rational>> {
    let n = m.len();
    let mut a: Matrix<Rational> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot) {
                *v -= &f * p;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

impl<C: Coefficient> fmt::Display for FormalMap<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.render(&default_names(self.dim())).join(", "))
    }
}

impl<C: Coefficient> fmt::Debug for FormalMap<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalMap(d={}, m={}; {})", self.dim(), self.order(), self)
    }
}
