//! Codimension of ideals in the local algebra and intersection multiplicities.
//!
//! For generators `f_1, …, f_n` the truncated codimension at order `m` is
//! `c_m = dim C_m[x] − rank`, the rank taken over the span of all `x^β f_i`
//! truncated at `m`. The sequence `c_m` is nondecreasing and bounded by the
//! true codimension. Once `c_m < m`, the ideal plus `𝔪^{m+1}` has codimension
//! below `m`, so it contains `𝔪^m`; Nakayama's lemma then puts `𝔪^m` in the
//! ideal itself and `c_m` is exact. [`codim`] iterates `m` until this fires or
//! a cap is reached.

use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::germs::{word_to_map, FormalMap, Generators, GroupWord, WordMap};
use crate::linalg::{exact_rank, SparseEchelon};
use crate::ring::{monomial_basis, monomial_count, Coefficient, ExpRational, Jet, MultiIndex};

/// Default truncation cap.
pub const DEFAULT_CAP: u32 = 32;

/// A named, finitely generated ideal of the local algebra in `d` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealPresentation {
    name: String,
    dim: usize,
    generators: Vec<Jet>,
}

impl IdealPresentation {
    /// Generators must be nonempty and share the dimension; their truncation
    /// orders may differ.
    pub fn new(name: impl Into<String>, generators: Vec<Jet>) -> Result<Self> {
        let first = generators.first().ok_or(Error::ComponentCount {
            what: "ideal",
            expected: 1,
            found: 0,
        })?;
        let dim = first.dim();
        for g in &generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: g.dim(),
                });
            }
        }
        Ok(IdealPresentation {
            name: name.into(),
            dim,
            generators,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Jet] {
        &self.generators
    }

    /// Sum of ideals: the concatenated generator lists.
    pub fn sum(parts: &[&IdealPresentation]) -> Result<Self> {
        let name = parts.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join("+");
        let gens = parts.iter().flat_map(|p| p.generators.iter().cloned()).collect();
        Self::new(name, gens)
    }
}

/// A natural number or "at least the cap", the engine's stand-in for
/// possibly infinite values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedNat {
    Finite(u64),
    /// No finite certificate up to this truncation cap; presumed infinite.
    AtLeast(u32),
}

impl ExtendedNat {
    pub fn finite(&self) -> Option<u64> {
        match self {
            ExtendedNat::Finite(n) => Some(*n),
            ExtendedNat::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for ExtendedNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedNat::Finite(n) => write!(f, "{n}"),
            ExtendedNat::AtLeast(cap) => write!(f, ">={cap}"),
        }
    }
}

/// A codimension with the order at which the stopping rule certified it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Codim {
    pub value: ExtendedNat,
    /// `Some(m)` for finite values: the first `m` with `c_m < m`, or 0 when a
    /// generator is a unit. `None` for `AtLeast`.
    pub certificate_order: Option<u32>,
}

impl Codim {
    fn finite(value: u64, order: u32) -> Self {
        Codim {
            value: ExtendedNat::Finite(value),
            certificate_order: Some(order),
        }
    }

    fn at_least(cap: u32) -> Self {
        Codim {
            value: ExtendedNat::AtLeast(cap),
            certificate_order: None,
        }
    }
}

/// The spanning vectors `x^β f_i` of the ideal truncated at `m`, skipping
/// those that vanish.
pub(crate) fn truncation_vectors<C: Coefficient>(dim: usize, generators: &[Jet<C>], m: u32) -> Vec<Jet<C>> {
    let mut out = Vec::new();
    for g in generators {
        let g = g.with_order(m);
        let Some(v) = g.valuation() else { continue };
        for beta in monomial_basis(dim, m - v) {
            let s = g.shift(&beta);
            if !s.is_zero() {
                out.push(s);
            }
        }
    }
    out
}

/// Truncated codimension `c_m` of the ideal spanned by `generators`.
///
/// Over a field the rank comes from sparse elimination; otherwise from
/// fraction-free elimination on the dense matrix.
pub fn truncated_codim_of<C: Coefficient>(dim: usize, generators: &[Jet<C>], m: u32) -> usize {
    let vectors = truncation_vectors(dim, generators, m);
    let n = monomial_count(dim, m);
    let rank = if C::IS_FIELD {
        let mut e: SparseEchelon<MultiIndex, C> = SparseEchelon::new();
        for v in &vectors {
            e.insert(v.terms().map(|(k, c)| (k.clone(), c.clone())));
            if e.rank() == n {
                break;
            }
        }
        e.rank()
    } else {
        let basis = monomial_basis(dim, m);
        let rows: Vec<Vec<C>> = vectors
            .iter()
            .map(|v| basis.iter().map(|b| v.coeff(b)).collect())
            .collect();
        exact_rank(&rows)
    };
    n - rank
}

pub fn truncated_codim(ideal: &IdealPresentation, m: u32) -> usize {
    truncated_codim_of(ideal.dim, &ideal.generators, m)
}

/// Codimension by the stopping rule, over any coefficient domain.
pub fn codim_of<C: Coefficient>(dim: usize, generators: &[Jet<C>], cap: u32) -> Codim {
    if generators.iter().any(|g| !g.constant_term().is_zero()) {
        return Codim::finite(0, 0);
    }
    for m in 1..=cap {
        let c = truncated_codim_of(dim, generators, m);
        if (c as u64) < m as u64 {
            return Codim::finite(c as u64, m);
        }
    }
    Codim::at_least(cap)
}

pub fn codim(ideal: &IdealPresentation, cap: u32) -> Codim {
    codim_of(ideal.dim, &ideal.generators, cap)
}

/// Codimension of the sum of the given ideals.
pub fn intersection_multiplicity(varieties: &[&IdealPresentation], cap: u32) -> Result<Codim> {
    let sum = IdealPresentation::sum(varieties)?;
    Ok(codim(&sum, cap))
}

/// Multiplicity of `g*(pulled)` against the fixed varieties, where `g` is the
/// word evaluated at working order `cap`.
///
/// Map letters with nonnegative powers need not be invertible. Words with
/// symbolic times are rejected; see
/// [`generic_multiplicity`](crate::quasipoly::generic_multiplicity).
pub fn mu_of_word(
    word: &GroupWord,
    generators: &Generators,
    pulled: &IdealPresentation,
    fixed: &[&IdealPresentation],
    cap: u32,
) -> Result<Codim> {
    if word.is_symbolic() {
        return Err(Error::Unsupported(format!(
            "word \"{word}\" has a symbolic time; multiplicities need concrete group elements"
        )));
    }
    let dim = pulled.dim();
    if let Some(d) = generators.dim() {
        if d != dim {
            return Err(Error::DimensionMismatch { left: d, right: dim });
        }
    }
    for f in fixed {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: f.dim(),
            });
        }
    }
    let g = word_to_map(word, generators, cap)?;
    let fixed_gens = fixed.iter().flat_map(|f| f.generators().iter().map(|j| j.with_order(cap)));
    match g {
        WordMap::Rational(map) => {
            let mut gens = pulled
                .generators()
                .iter()
                .map(|f| map.pullback(&f.with_order(cap)))
                .collect::<Result<Vec<_>>>()?;
            gens.extend(fixed_gens);
            Ok(codim_of(dim, &gens, cap))
        }
        WordMap::Extended(map) => {
            let lift = |j: &Jet| j.with_order(cap).map_coeffs(ExpRational::from_rational);
            let mut gens = pulled
                .generators()
                .iter()
                .map(|f| map.pullback(&lift(f)))
                .collect::<Result<Vec<_>>>()?;
            gens.extend(fixed_gens.map(|j| j.map_coeffs(ExpRational::from_rational)));
            Ok(codim_of(dim, &gens, cap))
        }
        WordMap::Symbolic { .. } => unreachable!("symbolic words rejected above"),
    }
}

/// One table of multiplicities over an integer range.
#[derive(Clone, Debug, PartialEq)]
pub struct MuSequence {
    /// `(n, result)` in input order.
    pub entries: Vec<(i64, Result<Codim>)>,
    /// Largest finite value, if any.
    pub max_finite: Option<u64>,
    /// Indices whose value is `AtLeast(cap)`.
    pub at_least: Vec<i64>,
}

/// Replaces the standalone identifier `n` in a word template.
pub fn instantiate_template(template: &str, n: i64) -> String {
    let chars: Vec<char> = template.chars().collect();
    let is_ident = |c: char| c.is_ascii_alphanumeric() || c == '_';
    let mut out = String::with_capacity(template.len() + 4);
    for (i, &c) in chars.iter().enumerate() {
        let standalone = c == 'n'
            && (i == 0 || !is_ident(chars[i - 1]))
            && (i + 1 == chars.len() || !is_ident(chars[i + 1]));
        if standalone {
            out.push_str(&n.to_string());
        } else {
            out.push(c);
        }
    }
    out
}

/// [`mu_of_word`] for every `n` in `range`, computed in parallel. A failing
/// entry records its error; the others are still computed.
pub fn mu_sequence(
    template: &str,
    range: RangeInclusive<i64>,
    generators: &Generators,
    pulled: &IdealPresentation,
    fixed: &[&IdealPresentation],
    cap: u32,
) -> MuSequence {
    let ns: Vec<i64> = range.collect();
    let entries: Vec<(i64, Result<Codim>)> = ns
        .par_iter()
        .map(|&n| {
            let r = GroupWord::parse(&instantiate_template(template, n))
                .and_then(|w| mu_of_word(&w, generators, pulled, fixed, cap));
            (n, r)
        })
        .collect();
    let max_finite = entries
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok().and_then(|c| c.value.finite()))
        .max();
    let at_least = entries
        .iter()
        .filter(|(_, r)| matches!(r, Ok(Codim { value: ExtendedNat::AtLeast(_), .. })))
        .map(|(n, _)| *n)
        .collect();
    MuSequence {
        entries,
        max_finite,
        at_least,
    }
}

/// Codimension of the ideal generated by the components of `F^n(x) − x`.
///
/// `F` is treated as a polynomial map and evaluated at working order `cap`.
pub fn fixed_point_multiplicity(map: &FormalMap, n: u32, cap: u32) -> Codim {
    let f = map.with_order(cap).power(n);
    let dim = f.dim();
    let gens: Vec<Jet> = f
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| c.try_sub(&Jet::variable(dim, cap, i)).expect("equal shapes"))
        .collect();
    codim_of(dim, &gens, cap)
}

/// Fixed-point multiplicity of a concrete group element: the codimension of
/// the ideal generated by the components of `g(x) − x`, at working order `cap`.
pub fn fixed_point_multiplicity_of_word(word: &GroupWord, generators: &Generators, cap: u32) -> Result<Codim> {
    fn displacement<C: Coefficient>(map: &FormalMap<C>) -> Vec<Jet<C>> {
        let dim = map.dim();
        map.components()
            .iter()
            .enumerate()
            .map(|(i, c)| c.try_sub(&Jet::variable(dim, c.order(), i)).expect("equal shapes"))
            .collect()
    }
    if word.is_symbolic() {
        return Err(Error::Unsupported(format!(
            "word \"{word}\" has a symbolic time; fixed points need a concrete group element"
        )));
    }
    let dim = generators.dim().unwrap_or(0);
    Ok(match word_to_map(word, generators, cap)? {
        WordMap::Rational(m) => codim_of(dim, &displacement(&m), cap),
        WordMap::Extended(m) => codim_of(dim, &displacement(&m), cap),
        WordMap::Symbolic { .. } => unreachable!("symbolic words rejected above"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_polynomial;

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn ideal(name: &str, gens: &[&str]) -> IdealPresentation {
        IdealPresentation::new(name, gens.iter().map(|g| parse_polynomial(g, &xy(), 8).unwrap()).collect()).unwrap()
    }

    fn generators(maps: &[(&str, [&str; 2])]) -> Generators {
        let mut g = Generators::new();
        for (n, parts) in maps {
            let comps = parts.iter().map(|p| parse_polynomial(p, &xy(), 8).unwrap()).collect();
            g.add_map(n, FormalMap::new(comps).unwrap()).unwrap();
        }
        g
    }

    #[test]
    fn truncated_examples() {
        assert_eq!(truncated_codim(&ideal("I", &["x", "y"]), 2), 1);
        assert_eq!(truncated_codim(&ideal("I", &["x^2", "y"]), 3), 2);
        assert_eq!(truncated_codim(&ideal("I", &["y - x", "y^4"]), 3), 4);
    }

    #[test]
    fn codim_examples() {
        assert_eq!(codim(&ideal("I", &["x - y", "x + y"]), 32).value, ExtendedNat::Finite(1));
        assert_eq!(codim(&ideal("I", &["x"]), 16), Codim::at_least(16));
        assert_eq!(codim(&ideal("I", &["y^4", "y - x"]), 32), Codim::finite(4, 5));
        assert_eq!(codim(&ideal("I", &["1 + x", "y"]), 32), Codim::finite(0, 0));
    }

    #[test]
    fn intersection_examples() {
        let lines = [ideal("X", &["y - x"]), ideal("Y", &["y"])];
        assert_eq!(intersection_multiplicity(&[&lines[0], &lines[1]], 32).unwrap().value, ExtendedNat::Finite(1));
        let parabola = ideal("X", &["y - x^2"]);
        assert_eq!(intersection_multiplicity(&[&parabola, &lines[1]], 32).unwrap().value, ExtendedNat::Finite(2));
        let x = ideal("X", &["x"]);
        assert_eq!(intersection_multiplicity(&[&x, &x], 20).unwrap().value, ExtendedNat::AtLeast(20));
    }

    #[test]
    fn word_multiplicities() {
        let g = generators(&[("F", ["x", "y^2"]), ("G", ["x + y^2", "y"])]);
        let y = ideal("Y", &["y"]);
        let diag = ideal("X", &["y - x"]);
        let w = GroupWord::parse("F^2").unwrap();
        assert_eq!(mu_of_word(&w, &g, &y, &[&diag], 32).unwrap().value, ExtendedNat::Finite(4));
        let x = ideal("X", &["x"]);
        let w3 = GroupWord::parse("G^3").unwrap();
        assert_eq!(mu_of_word(&w3, &g, &x, &[&x], 32).unwrap().value, ExtendedNat::Finite(2));
        let w0 = GroupWord::parse("G^0").unwrap();
        assert_eq!(mu_of_word(&w0, &g, &x, &[&x], 12).unwrap().value, ExtendedNat::AtLeast(12));
    }

    #[test]
    fn sequences() {
        let g = generators(&[("F", ["x", "y^2"]), ("G", ["x + y^2", "y"]), ("H", ["2x", "1/2 y"])]);
        let y = ideal("Y", &["y"]);
        let diag = ideal("X", &["y - x"]);
        let s = mu_sequence("F^n", 0..=3, &g, &y, &[&diag], 32);
        let vals: Vec<_> = s.entries.iter().map(|(_, r)| r.as_ref().unwrap().value).collect();
        assert_eq!(vals, [1, 2, 4, 8].map(ExtendedNat::Finite));
        let x = ideal("X", &["x"]);
        let s = mu_sequence("G^n", -5..=5, &g, &x, &[&x], 16);
        assert_eq!(s.max_finite, Some(2));
        assert_eq!(s.at_least, vec![0]);
        let a = ideal("A", &["y - x"]);
        let b = ideal("B", &["y + x"]);
        let s = mu_sequence("H^n", 0..=10, &g, &a, &[&b], 16);
        assert!(s.entries.iter().all(|(_, r)| r.as_ref().unwrap().value == ExtendedNat::Finite(1)));
        let bad = mu_sequence("K^n", 0..=1, &g, &a, &[&b], 16);
        assert!(bad.entries.iter().all(|(_, r)| r.is_err()));
    }

    #[test]
    fn template_substitution() {
        assert_eq!(instantiate_template("F^n", -3), "F^-3");
        assert_eq!(instantiate_template("Fn^n * n_G", 2), "Fn^2 * n_G");
    }

    #[test]
    fn fixed_points() {
        let n1 = vec!["x".to_string()];
        let f = FormalMap::new(vec![parse_polynomial("2x", &n1, 4).unwrap()]).unwrap();
        assert_eq!(fixed_point_multiplicity(&f, 1, 32).value, ExtendedNat::Finite(1));
        let id = FormalMap::identity(1, 4);
        assert_eq!(fixed_point_multiplicity(&id, 1, 12).value, ExtendedNat::AtLeast(12));
        let g = FormalMap::new(vec![parse_polynomial("x + x^2", &n1, 4).unwrap()]).unwrap();
        assert_eq!(fixed_point_multiplicity(&g, 3, 32).value, ExtendedNat::Finite(2));
        let mut gens = Generators::new();
        gens.add_map("G", g).unwrap();
        let w = GroupWord::parse("G^-2").unwrap();
        assert_eq!(fixed_point_multiplicity_of_word(&w, &gens, 32).unwrap().value, ExtendedNat::Finite(2));
    }
}
