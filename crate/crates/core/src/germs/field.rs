use std::fmt;

use num_traits::Zero;

use super::map::{check_components, linear_part, FormalMap};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ring::{default_names, Coefficient, Jet, Rational};

/// A formal vector field vanishing at the origin, acting on jets as the
/// derivation `V f = Σ ∂f/∂x_j · v_j`.
#[derive(Clone, PartialEq)]
pub struct FormalVectorField<C = Rational> {
    components: Vec<Jet<C>>,
    linear: Matrix<C>,
}

impl<C: Coefficient> FormalVectorField<C> {
    pub fn new(components: Vec<Jet<C>>) -> Result<Self> {
        check_components("vector field", &components)?;
        let linear = linear_part(&components);
        Ok(FormalVectorField { components, linear })
    }

    pub fn zero(dim: usize, order: u32) -> Self {
        let components: Vec<_> = (0..dim).map(|_| Jet::zero(dim, order)).collect();
        let linear = linear_part(&components);
        FormalVectorField { components, linear }
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

    /// The linearization `H`; entry `(i, j)` is the coefficient of `x_j` in `v_i`.
    pub fn linear_part(&self) -> &Matrix<C> {
        &self.linear
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Jet::is_zero)
    }

    /// `V f`, truncated. Exact because every `v_j` lies in the maximal ideal.
    pub fn derive(&self, f: &Jet<C>) -> Result<Jet<C>> {
        if f.dim() != self.dim() || f.order() != self.order() {
            return Err(Error::ShapeMismatch {
                d1: self.dim(),
                m1: self.order(),
                d2: f.dim(),
                m2: f.order(),
            });
        }
        let mut out = Jet::zero(self.dim(), self.order());
        for (j, v) in self.components.iter().enumerate() {
            let p = f.partial(j);
            if p.is_zero() || v.is_zero() {
                continue;
            }
            out = out.try_add(&p.mul_unchecked(v))?;
        }
        Ok(out)
    }

    /// `[v, w]` with components `V(w_i) − W(v_i)`.
    pub fn lie_bracket(&self, other: &Self) -> Result<Self> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(vi, wi)| self.derive(wi)?.try_sub(&other.derive(vi)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }

    pub fn scale(&self, c: &C) -> Self {
        let components: Vec<_> = self.components.iter().map(|j| j.scale(c)).collect();
        let linear = linear_part(&components);
        FormalVectorField { components, linear }
    }

    pub fn with_order(&self, order: u32) -> Self {
        let components: Vec<_> = self.components.iter().map(|c| c.with_order(order)).collect();
        let linear = linear_part(&components);
        FormalVectorField { components, linear }
    }

    pub fn map_coeffs<D: Coefficient>(&self, mut f: impl FnMut(&C) -> D) -> FormalVectorField<D> {
        let components: Vec<_> = self.components.iter().map(|c| c.map_coeffs(&mut f)).collect();
        let linear = linear_part(&components);
        FormalVectorField { components, linear }
    }

    pub fn render(&self, names: &[String]) -> Vec<String> {
        self.components.iter().map(|c| c.render(names)).collect()
    }
}

impl FormalVectorField<Rational> {
    /// `F_* v`, the field `DF(F⁻¹(x)) · v(F⁻¹(x))`.
    pub fn pushforward(&self, map: &FormalMap<Rational>) -> Result<Self> {
        if map.dim() != self.dim() || map.order() != self.order() {
            return Err(Error::ShapeMismatch {
                d1: map.dim(),
                m1: map.order(),
                d2: self.dim(),
                m2: self.order(),
            });
        }
        let inv = map.invert()?;
        let moved: Vec<Jet> = self
            .components
            .iter()
            .map(|v| inv.pullback(v))
            .collect::<Result<_>>()?;
        let dim = self.dim();
        let mut components = Vec::with_capacity(dim);
        for fi in map.components() {
            let mut acc = Jet::zero(dim, self.order());
            for (j, vj) in moved.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                // the top-degree error of the partial dies after multiplying by vj
                let dfij = fi.partial(j).compose(inv.components())?;
                if dfij.is_zero() {
                    continue;
                }
                acc = acc.try_add(&dfij.mul_unchecked(vj))?;
            }
            components.push(acc);
        }
        Self::new(components)
    }

    /// True when the linear part is nilpotent. Then `V` is nilpotent on every
    /// truncated algebra and the flow is polynomial in time.
    pub fn is_nilpotent(&self) -> bool {
        let d = self.dim();
        let h = &self.linear;
        let mut p = h.clone();
        for _ in 1..d {
            p = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| (0..d).fold(Rational::zero(), |acc, k| acc + &p[i][k] * &h[k][j]))
                        .collect()
                })
                .collect();
        }
        p.iter().all(|row| row.iter().all(Zero::is_zero))
    }
}

impl<C: Coefficient> fmt::Display for FormalVectorField<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.render(&default_names(self.dim())).join(", "))
    }
}

impl<C: Coefficient> fmt::Debug for FormalVectorField<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalVectorField(d={}, m={}; {})", self.dim(), self.order(), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_polynomial;

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn jet(text: &str, m: u32) -> Jet {
        parse_polynomial(text, &xy(), m).unwrap()
    }

    fn field(parts: &[&str], m: u32) -> FormalVectorField {
        FormalVectorField::new(parts.iter().map(|p| jet(p, m)).collect()).unwrap()
    }

    fn map(parts: &[&str], m: u32) -> FormalMap {
        FormalMap::new(parts.iter().map(|p| jet(p, m)).collect()).unwrap()
    }

    #[test]
    fn derive_examples() {
        assert_eq!(field(&["y", "0"], 3).derive(&jet("x^2", 3)).unwrap(), jet("2x*y", 3));
        assert!(field(&["x", "-y"], 3).derive(&jet("x*y", 3)).unwrap().is_zero());
        assert_eq!(field(&["x", "-y"], 3).derive(&jet("x^2", 3)).unwrap(), jet("2x^2", 3));
    }

    #[test]
    fn bracket_examples() {
        let v = field(&["y", "0"], 3);
        assert!(v.lie_bracket(&v).unwrap().is_zero());
        assert!(field(&["x", "0"], 3).lie_bracket(&field(&["0", "y"], 3)).unwrap().is_zero());
        assert_eq!(v.lie_bracket(&field(&["0", "x"], 3)).unwrap(), field(&["-x", "y"], 3));
    }

    #[test]
    fn pushforward_examples() {
        let names = vec!["x".to_string()];
        let f1 = FormalMap::new(vec![parse_polynomial("2x", &names, 3).unwrap()]).unwrap();
        let v1 = FormalVectorField::new(vec![parse_polynomial("x", &names, 3).unwrap()]).unwrap();
        assert_eq!(v1.pushforward(&f1).unwrap(), v1);
        assert_eq!(
            field(&["y", "0"], 3).pushforward(&map(&["2x", "2y"], 3)).unwrap(),
            field(&["y", "0"], 3)
        );
        assert_eq!(field(&["y", "0"], 3).pushforward(&map(&["x^2", "y"], 3)), Err(Error::NotInvertible));
        assert_eq!(
            field(&["0", "x"], 3).pushforward(&map(&["2x", "1/2 y"], 3)).unwrap(),
            field(&["0", "1/4 x"], 3)
        );
    }

    #[test]
    fn nilpotency() {
        assert!(field(&["y", "0"], 2).is_nilpotent());
        assert!(field(&["0", "x + y^2"], 2).is_nilpotent());
        assert!(!field(&["x", "0"], 2).is_nilpotent());
        assert!(!field(&["y", "x"], 2).is_nilpotent());
    }
}
