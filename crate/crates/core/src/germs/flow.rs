use num_traits::{One, Zero};

use super::{FormalMap, FormalVectorField, WordMap};
use crate::error::Result;
use crate::quasipoly::{Generator, OrbitSolver, Quasipolynomial, TimeKind, TimeVars};
use crate::ring::{monomial_count, Coefficient, ExpRational, Jet, Rational};

// Σ_k t^k/k! V^k x_i over the domain of `t`; terminates because V is
// nilpotent on the truncated algebra.
fn nilpotent_series<C: Coefficient>(v: &FormalVectorField, t: &C) -> Result<FormalMap<C>> {
    let dim = v.dim();
    let order = v.order();
    let limit = monomial_count(dim, order) + 1;
    let mut components = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut term: Jet = Jet::variable(dim, order, i);
        let mut acc: Jet<C> = Jet::zero(dim, order);
        let mut weight = C::one();
        for k in 0..=limit {
            if term.is_zero() {
                break;
            }
            let lifted = term.map_coeffs(C::from_rational);
            acc = acc.try_add(&lifted.scale(&weight))?;
            term = v.derive(&term)?;
            weight = weight
                .mul_ref(t)
                .mul_ref(&C::from_rational(&Rational::new(1.into(), ((k + 1) as i64).into())));
        }
        components.push(acc);
    }
    FormalMap::new(components)
}

/// The flow `e^{tV}` with coefficients quasipolynomial in the continuous time
/// variable `var`.
///
/// Nilpotent linear parts give polynomials in time by summing the exponential
/// series. Otherwise the linear part must be lower-triangular and the
/// coefficients come from the triangular ODE system.
pub fn flow_symbolic(v: &FormalVectorField, var: usize) -> Result<FormalMap<Quasipolynomial>> {
    if v.is_nilpotent() {
        return nilpotent_series(v, &Quasipolynomial::variable(var));
    }
    let solver = OrbitSolver::new(&Generator::Field(v.clone()), var, v.order())?;
    let components = (0..v.dim())
        .map(|i| solver.orbit(&Jet::variable(v.dim(), v.order(), i)))
        .collect::<Result<Vec<_>>>()?;
    FormalMap::new(components)
}

/// The flow `e^{tV}` at a rational time.
///
/// Rational coefficients when the linear part is nilpotent or the time is
/// zero; otherwise coefficients are exact sums of `e^q`.
pub fn flow_at(v: &FormalVectorField, t: &Rational) -> Result<WordMap> {
    if t.is_zero() {
        return Ok(WordMap::Rational(FormalMap::identity(v.dim(), v.order())));
    }
    if v.is_nilpotent() {
        return Ok(WordMap::Rational(nilpotent_series(v, t)?));
    }
    let symbolic = flow_symbolic(v, 0)?;
    let vars = TimeVars::single("t", TimeKind::Continuous);
    let mut components: Vec<Jet<ExpRational>> = Vec::with_capacity(v.dim());
    for c in symbolic.components() {
        let mut out = Jet::zero(v.dim(), v.order());
        for (k, q) in c.terms() {
            out.set(k.clone(), q.eval(std::slice::from_ref(t), &vars)?);
        }
        components.push(out);
    }
    let extended = FormalMap::new(components)?;
    let all_rational = extended
        .components()
        .iter()
        .all(|c| c.terms().all(|(_, q)| q.as_rational().is_some()));
    if all_rational {
        Ok(WordMap::Rational(extended.map_coeffs(|q| q.as_rational().unwrap_or_else(Rational::one))))
    } else {
        Ok(WordMap::Extended(extended))
    }
}
