use std::collections::HashSet;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use super::orbit::{group_time_vars, Generator, GroupOrbit};
use super::qp::{Quasipolynomial, TimeVars};
use crate::error::{Error, Result};
use crate::germs::{check_commutative, Generators};
use crate::linalg::determinant;
use crate::multiplicity::{truncation_vectors, truncated_codim_of, ExtendedNat, IdealPresentation};
use crate::ring::{monomial_basis, monomial_count, Jet};

/// Default bound on the number of minors [`exceptional_conditions`] may visit.
pub const DEFAULT_MINOR_LIMIT: u128 = 200_000;

/// Multiplicity of `g_t*(pulled)` against the fixed varieties for symbolic
/// group times `t`, valid off a proper exceptional set.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericMultiplicity {
    pub value: ExtendedNat,
    /// Truncation order at which the stopping rule fired; `None` for `AtLeast`.
    pub stopping_order: Option<u32>,
    /// Time variables, one per generator in `generator_names` order.
    pub time_vars: TimeVars,
    pub generator_names: Vec<String>,
}

/// Quasipolynomial minors whose common vanishing is necessary for
/// `μ(t) >= m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExceptionalConditions {
    /// Distinct nonzero minors. Empty when `μ(t) >= m` holds for every `t`
    /// at this truncation.
    pub conditions: Vec<Quasipolynomial>,
    pub minor_size: usize,
    pub time_vars: TimeVars,
    pub generator_names: Vec<String>,
}

// Maps first, then fields, each in declaration order. Validates the spectrum
// and commutativity up front.
fn group_of(generators: &Generators) -> Result<(Vec<String>, Vec<Generator>)> {
    let mut names = Vec::new();
    let mut gens = Vec::new();
    for (name, map) in generators.maps() {
        let g = Generator::Map(map.clone());
        for mu in g.diagonal()? {
            if mu.is_zero() {
                return Err(Error::ZeroMultiplier);
            }
            if mu.is_negative() {
                return Err(Error::UnsupportedSpectrum(format!(
                    "map \"{name}\" has negative multiplier {mu}; only positive multipliers are supported"
                )));
            }
        }
        names.push(name.clone());
        gens.push(g);
    }
    for (name, field) in generators.fields() {
        let g = Generator::Field(field.clone());
        g.diagonal()?;
        names.push(name.clone());
        gens.push(g);
    }
    if gens.len() > 1 {
        let cert = check_commutative(generators)?;
        let bad = cert.failures().next().map(|bad| Error::NonCommuting {
            condition: bad.condition.to_string(),
            left: bad.left.clone(),
            right: bad.right.clone(),
        });
        if let Some(e) = bad {
            return Err(e);
        }
    }
    Ok((names, gens))
}

fn check_dims(dim: Option<usize>, pulled: &IdealPresentation, fixed: &[&IdealPresentation]) -> Result<()> {
    let d = pulled.dim();
    for other in dim.into_iter().chain(fixed.iter().map(|f| f.dim())) {
        if other != d {
            return Err(Error::DimensionMismatch { left: d, right: other });
        }
    }
    Ok(())
}

// Generators of g_t*(pulled) + fixed at order m, quasipolynomial in t.
fn symbolic_generators(
    group: &[Generator],
    pulled: &IdealPresentation,
    fixed: &[&IdealPresentation],
    m: u32,
) -> Result<Vec<Jet<Quasipolynomial>>> {
    let mut orbit = GroupOrbit::new(group, pulled.dim(), m)?;
    let mut out = pulled
        .generators()
        .iter()
        .map(|f| orbit.pullback(f))
        .collect::<Result<Vec<_>>>()?;
    for f in fixed {
        for g in f.generators() {
            out.push(g.with_order(m).map_coeffs(|c| Quasipolynomial::constant(c.clone())));
        }
    }
    Ok(out)
}

/// Generic multiplicity over the group `G_1^{t_1} ∘ … ∘ G_r^{t_r}`.
///
/// Runs the codimension stopping rule with ranks taken over the
/// quasipolynomial domain. Map multipliers must be positive rationals and
/// the generators must commute up to their truncation order.
pub fn generic_multiplicity(
    generators: &Generators,
    pulled: &IdealPresentation,
    fixed: &[&IdealPresentation],
    cap: u32,
) -> Result<GenericMultiplicity> {
    check_dims(generators.dim(), pulled, fixed)?;
    let (generator_names, group) = group_of(generators)?;
    let time_vars = group_time_vars(&group);
    let dim = pulled.dim();
    let result = |value, stopping_order| GenericMultiplicity {
        value,
        stopping_order,
        time_vars: time_vars.clone(),
        generator_names: generator_names.clone(),
    };
    // The group fixes the origin, so constant terms are unaffected by g_t.
    let has_unit = pulled
        .generators()
        .iter()
        .chain(fixed.iter().flat_map(|f| f.generators()))
        .any(|g| !g.constant_term().is_zero());
    if has_unit {
        return Ok(result(ExtendedNat::Finite(0), Some(0)));
    }
    for m in 1..=cap {
        let gens = symbolic_generators(&group, pulled, fixed, m)?;
        let c = truncated_codim_of(dim, &gens, m);
        if (c as u64) < m as u64 {
            return Ok(result(ExtendedNat::Finite(c as u64), Some(m)));
        }
    }
    Ok(result(ExtendedNat::AtLeast(cap), None))
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Nonzero minors of size `N − m + 1` of the order-`m` spanning matrix,
/// `N` the number of monomials of degree `<= m`.
///
/// `μ(t) >= m` forces the truncated codimension to be at least `m`, hence
/// every such minor to vanish at `t`. Zero rows and columns and repeated
/// rows and columns are removed before enumeration; more than `limit`
/// minors is an error.
pub fn exceptional_conditions(
    generators: &Generators,
    pulled: &IdealPresentation,
    fixed: &[&IdealPresentation],
    m: u32,
    limit: u128,
) -> Result<ExceptionalConditions> {
    check_dims(generators.dim(), pulled, fixed)?;
    let (generator_names, group) = group_of(generators)?;
    let time_vars = group_time_vars(&group);
    let dim = pulled.dim();
    let n = monomial_count(dim, m);
    let k = (n + 1).saturating_sub(m as usize);
    let done = |conditions| ExceptionalConditions {
        conditions,
        minor_size: k,
        time_vars: time_vars.clone(),
        generator_names: generator_names.clone(),
    };
    if k == 0 {
        return Ok(done(vec![Quasipolynomial::one()]));
    }

    let gens = symbolic_generators(&group, pulled, fixed, m)?;
    let basis = monomial_basis(dim, m);
    let mut rows: Vec<Vec<Quasipolynomial>> = Vec::new();
    for v in truncation_vectors(dim, &gens, m) {
        let row: Vec<Quasipolynomial> = basis.iter().map(|b| v.coeff(b)).collect();
        if !rows.contains(&row) {
            rows.push(row);
        }
    }
    // keep the first copy of each nonzero column
    let mut cols: Vec<usize> = Vec::new();
    for j in 0..basis.len() {
        let col: Vec<&Quasipolynomial> = rows.iter().map(|r| &r[j]).collect();
        if col.iter().all(|q| q.is_zero()) {
            continue;
        }
        let dup = cols.iter().any(|&c| rows.iter().all(|r| r[c] == r[j]));
        if !dup {
            cols.push(j);
        }
    }
    if k > rows.len().min(cols.len()) {
        return Ok(done(Vec::new()));
    }
    let count = binomial_u128(rows.len(), k).saturating_mul(binomial_u128(cols.len(), k));
    if count > limit {
        return Err(Error::SizeLimitExceeded { count, limit });
    }

    let mut seen = HashSet::new();
    let mut conditions = Vec::new();
    for rs in (0..rows.len()).combinations(k) {
        for cs in cols.iter().copied().combinations(k) {
            let minor: Vec<Vec<Quasipolynomial>> =
                rs.iter().map(|&r| cs.iter().map(|&c| rows[r][c].clone()).collect()).collect();
            let det = determinant(&minor);
            if !det.is_zero() && seen.insert(det.clone()) {
                conditions.push(det);
            }
        }
    }
    Ok(done(conditions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germs::{FormalMap, GroupWord};
    use crate::multiplicity::mu_of_word;
    use crate::ring::{int, parse_polynomial, ExpRational};

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn ideal(name: &str, gens: &[&str]) -> IdealPresentation {
        IdealPresentation::new(name, gens.iter().map(|g| parse_polynomial(g, &xy(), 8).unwrap()).collect()).unwrap()
    }

    fn one_map(parts: [&str; 2]) -> Generators {
        let mut g = Generators::new();
        let comps = parts.iter().map(|p| parse_polynomial(p, &xy(), 8).unwrap()).collect();
        g.add_map("F", FormalMap::new(comps).unwrap()).unwrap();
        g
    }

    #[test]
    fn generic_examples() {
        let x = ideal("X", &["x"]);
        let shear = one_map(["x + y^2", "y"]);
        let r = generic_multiplicity(&shear, &x, &[&x], 16).unwrap();
        assert_eq!(r.value, ExtendedNat::Finite(2));
        assert_eq!(r.stopping_order, Some(3));

        let hyp = one_map(["2x", "1/2 y"]);
        let r = generic_multiplicity(&hyp, &ideal("X", &["y - x"]), &[&ideal("Y", &["y + x"])], 16).unwrap();
        assert_eq!(r.value, ExtendedNat::Finite(1));

        let trivial = Generators::new();
        let r = generic_multiplicity(&trivial, &ideal("X", &["y - x^2"]), &[&ideal("Y", &["y"])], 16).unwrap();
        assert_eq!(r.value, ExtendedNat::Finite(2));
        assert!(r.time_vars.is_empty());
    }

    #[test]
    fn spectrum_restrictions() {
        let x = ideal("X", &["x"]);
        let neg = one_map(["-x", "y"]);
        assert!(matches!(
            generic_multiplicity(&neg, &x, &[&x], 8),
            Err(Error::UnsupportedSpectrum(_))
        ));
        let zero = one_map(["y^2", "y"]);
        assert_eq!(generic_multiplicity(&zero, &x, &[&x], 8), Err(Error::ZeroMultiplier));
    }

    #[test]
    fn non_commuting_generators_are_rejected() {
        let mut g = one_map(["x + y^2", "y"]);
        let comps = ["2x", "y + x^2"].iter().map(|p| parse_polynomial(p, &xy(), 8).unwrap()).collect();
        g.add_map("G", FormalMap::new(comps).unwrap()).unwrap();
        let x = ideal("X", &["x"]);
        assert!(matches!(
            generic_multiplicity(&g, &x, &[&x], 8),
            Err(Error::NonCommuting { .. })
        ));
    }

    #[test]
    fn shear_conditions_vanish_only_at_zero() {
        let x = ideal("X", &["x"]);
        let shear = one_map(["x + y^2", "y"]);
        let ex = exceptional_conditions(&shear, &x, &[&x], 3, DEFAULT_MINOR_LIMIT).unwrap();
        assert!(!ex.conditions.is_empty());
        let at = |q: &Quasipolynomial, t: i64| q.eval(&[int(t)], &ex.time_vars).unwrap();
        assert!(ex.conditions.iter().all(|q| at(q, 0) == ExpRational::zero()));
        assert!(ex.conditions.iter().any(|q| at(q, 1) != ExpRational::zero()));
        // some condition is c·t^k
        assert!(ex.conditions.iter().any(|q| {
            q.len() == 1 && q.terms().all(|(key, poly)| key.is_empty() && poly.len() == 1)
        }));
        // at m = 2 the rank never reaches N − 1, so there is nothing to test
        let ex2 = exceptional_conditions(&shear, &x, &[&x], 2, DEFAULT_MINOR_LIMIT).unwrap();
        assert!(ex2.conditions.is_empty());
    }

    #[test]
    fn transversal_conditions_have_no_integer_zeros() {
        let hyp = one_map(["2x", "1/2 y"]);
        let ex = exceptional_conditions(&hyp, &ideal("X", &["y - x"]), &[&ideal("Y", &["y + x"])], 2, DEFAULT_MINOR_LIMIT)
            .unwrap();
        for t in -5..=5 {
            assert!(ex
                .conditions
                .iter()
                .any(|q| q.eval(&[int(t)], &ex.time_vars).unwrap() != ExpRational::zero()));
        }
    }

    #[test]
    fn trivial_group_conditions_are_constants() {
        let trivial = Generators::new();
        let ex = exceptional_conditions(&trivial, &ideal("X", &["1 + x"]), &[&ideal("Y", &["y"])], 1, 1000).unwrap();
        assert!(!ex.conditions.is_empty());
        assert!(ex.conditions.iter().all(|q| q.variables().is_empty()));
        let ex = exceptional_conditions(&trivial, &ideal("X", &["x"]), &[&ideal("Y", &["y"])], 1, 1000).unwrap();
        assert!(ex.conditions.is_empty());
    }

    #[test]
    fn size_limit() {
        let x = ideal("X", &["x"]);
        let shear = one_map(["x + y^2", "y"]);
        assert!(matches!(
            exceptional_conditions(&shear, &x, &[&x], 4, 10),
            Err(Error::SizeLimitExceeded { limit: 10, .. })
        ));
    }

    #[test]
    fn pointwise_agrees_off_exceptional_set() {
        let x = ideal("X", &["x"]);
        let shear = one_map(["x + y^2", "y"]);
        let gen = generic_multiplicity(&shear, &x, &[&x], 16).unwrap();
        let m = gen.stopping_order.unwrap();
        let ex = exceptional_conditions(&shear, &x, &[&x], m, DEFAULT_MINOR_LIMIT).unwrap();
        for t in -4..=4i64 {
            let exceptional = ex.conditions.iter().all(|q| q.eval(&[int(t)], &ex.time_vars).unwrap().is_zero());
            let w = GroupWord::parse(&format!("F^{t}")).unwrap();
            let mu = mu_of_word(&w, &shear, &x, &[&x], 16).unwrap();
            if !exceptional {
                assert_eq!(mu.value, gen.value, "t = {t}");
            }
        }
    }
}
