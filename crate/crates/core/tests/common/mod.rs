//! Random generators and property suites shared by the `properties` and
//! `acceptance` test targets.

#![allow(dead_code)]

use std::cmp::Ordering;

use germlab_core::germs::{flow_at, flow_symbolic, FormalMap, FormalVectorField, WordMap};
use germlab_core::linalg::{exact_rank, SparseEchelon};
use germlab_core::multiplicity::{codim_of, truncated_codim_of, ExtendedNat};
use germlab_core::quasipoly::{solve_discrete_recurrence, solve_linear_ode, TimeKind, TimeVars};
use germlab_core::ring::{deglex_compare, int, monomial_basis, rat};
use germlab_core::{Coefficient, ExpRational, Jet, MultiIndex, Quasipolynomial, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const CASES: u32 = 128;

/// Runs `test` on `cases` deterministic samples of `strategy`.
pub fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

// ---- strategies ----

pub fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |q| !q.is_zero())
}

pub fn multi_index(dim: usize, max_exp: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_exp, dim).prop_map(MultiIndex::new)
}

/// A jet with up to `terms` random terms of degree between `min_deg` and `m`.
pub fn jet(dim: usize, m: u32, min_deg: u32, terms: usize) -> impl Strategy<Value = Jet> {
    let basis: Vec<MultiIndex> = monomial_basis(dim, m).into_iter().filter(|b| b.degree() >= min_deg).collect();
    let n = basis.len();
    prop::collection::vec((0..n.max(1), rational()), 0..=terms).prop_map(move |ts| {
        Jet::from_terms(
            dim,
            m,
            ts.into_iter().filter(|_| n > 0).map(|(i, c)| (basis[i].clone(), c)),
        )
    })
}

/// Components without constant terms.
pub fn germ_components(dim: usize, m: u32) -> impl Strategy<Value = Vec<Jet>> {
    prop::collection::vec(jet(dim, m, 1, 4), dim)
}

pub fn formal_map(dim: usize, m: u32) -> impl Strategy<Value = FormalMap> {
    germ_components(dim, m).prop_map(|c| FormalMap::new(c).unwrap())
}

/// An invertible map: lower-triangular linear part with nonzero diagonal,
/// a random upper entry, and random higher-order terms.
pub fn invertible_map(dim: usize, m: u32) -> impl Strategy<Value = FormalMap> {
    (
        prop::collection::vec(nonzero_rational(), dim),
        prop::collection::vec(rational(), dim * dim),
        prop::collection::vec(jet(dim, m, 2, 3), dim),
    )
        .prop_map(move |(diag, off, higher)| {
            let comps = (0..dim)
                .map(|i| {
                    let mut c = higher[i].clone();
                    for j in 0..dim {
                        let a = if i == j { diag[i].clone() } else if j < i { off[i * dim + j].clone() } else { Rational::zero() };
                        c.add_term(MultiIndex::unit(dim, j), &a);
                    }
                    c
                })
                .collect();
            FormalMap::new(comps).unwrap()
        })
}

pub fn field(dim: usize, m: u32) -> impl Strategy<Value = FormalVectorField> {
    germ_components(dim, m).prop_map(|c| FormalVectorField::new(c).unwrap())
}

/// A field whose linear part is strictly lower-triangular plus a random
/// diagonal when `diagonal` is set, zero diagonal otherwise.
pub fn triangular_field(dim: usize, m: u32, diagonal: bool) -> impl Strategy<Value = FormalVectorField> {
    (
        prop::collection::vec(rational(), dim),
        prop::collection::vec(rational(), dim * dim),
        prop::collection::vec(jet(dim, m, 2, 3), dim),
    )
        .prop_map(move |(diag, off, higher)| {
            let comps = (0..dim)
                .map(|i| {
                    let mut c = higher[i].clone();
                    for j in 0..dim {
                        let a = if i == j && diagonal {
                            diag[i].clone()
                        } else if j < i {
                            off[i * dim + j].clone()
                        } else {
                            Rational::zero()
                        };
                        c.add_term(MultiIndex::unit(dim, j), &a);
                    }
                    c
                })
                .collect();
            FormalVectorField::new(comps).unwrap()
        })
}

/// Shape `(dim, order)` with `dim ∈ 1..=3`, `order ∈ 1..=max_order`.
pub fn shape(max_order: u32) -> impl Strategy<Value = (usize, u32)> {
    (1usize..=3, 1u32..=max_order)
}

// Positive so that exact division over quasipolynomials applies.
fn discrete_base() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![int(1), int(2), int(3), rat(1, 2), rat(2, 3)])
}

fn multiplier() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![int(1), int(2), int(3), rat(1, 2), rat(2, 3), int(-2), int(-1)])
}

fn continuous_rate() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![int(0), int(1), int(-1), rat(1, 2), int(2)])
}

/// A quasipolynomial in variable 0 with up to three exponential terms and
/// polynomial parts of degree at most two.
pub fn quasipolynomial(kind: TimeKind) -> impl Strategy<Value = Quasipolynomial> {
    let base = match kind {
        TimeKind::Discrete => discrete_base().boxed(),
        TimeKind::Continuous => continuous_rate().boxed(),
    };
    prop::collection::vec((base, prop::collection::vec(rational(), 1..=3)), 0..=3).prop_map(move |terms| {
        let mut q = Quasipolynomial::zero();
        for (b, coeffs) in terms {
            let e = match kind {
                TimeKind::Discrete => Quasipolynomial::discrete_exp(0, b),
                TimeKind::Continuous => Quasipolynomial::continuous_exp(0, b),
            };
            let mut poly = Quasipolynomial::zero();
            let mut power = Quasipolynomial::one();
            for c in coeffs {
                poly += &power.scale(&c);
                power = power * Quasipolynomial::variable(0);
            }
            q += &(e * poly);
        }
        q
    })
}

fn ext(q: &Rational) -> ExpRational {
    ExpRational::from_rational(q)
}

fn unwrap_rational(w: WordMap) -> FormalMap {
    match w {
        WordMap::Rational(m) => m,
        other => panic!("expected a rational map, got {other:?}"),
    }
}

fn ext_le(a: ExtendedNat, b: ExtendedNat) -> bool {
    match (a, b) {
        (_, ExtendedNat::AtLeast(_)) => true,
        (ExtendedNat::AtLeast(_), ExtendedNat::Finite(_)) => false,
        (ExtendedNat::Finite(x), ExtendedNat::Finite(y)) => x <= y,
    }
}

/// Number of monomials outside a monomial ideal, or `None` when infinite.
pub fn staircase_count(dim: usize, generators: &[MultiIndex]) -> Option<u64> {
    // finite iff every variable has a pure power among the generators
    let mut bound = vec![0u32; dim];
    for (i, b) in bound.iter_mut().enumerate() {
        let pure = generators
            .iter()
            .filter(|g| (0..dim).all(|j| j == i || g.get(j) == 0))
            .map(|g| g.get(i))
            .min()?;
        *b = pure;
    }
    let mut count = 0u64;
    let mut e = vec![0u32; dim];
    loop {
        let mono = MultiIndex::new(e.clone());
        if !generators.iter().any(|g| g.divides(&mono)) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == dim {
                return Some(count);
            }
            e[i] += 1;
            if e[i] < bound[i] {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

/// Random monomial ideal: dimension `1..=3`, `1..=5` generators, exponents
/// at most 4.
pub fn monomial_ideal() -> impl Strategy<Value = (usize, Vec<MultiIndex>)> {
    (1usize..=3).prop_flat_map(|d| (Just(d), prop::collection::vec(multi_index(d, 4), 1..=5)))
}

pub fn monomial_jets(dim: usize, gens: &[MultiIndex]) -> Vec<Jet> {
    gens.iter()
        .map(|g| Jet::monomial(dim, g.degree(), g.clone(), Rational::one()))
        .collect()
}

// ---- suites ----

pub fn deglex_order_laws() -> Result<(), String> {
    let s = (1usize..=4).prop_flat_map(|d| (multi_index(d, 5), multi_index(d, 5), multi_index(d, 5), multi_index(d, 3)));
    check(CASES, s, |(a, b, c, shift)| {
        let ab = deglex_compare(&a, &b).unwrap();
        prop_assert_eq!(ab, a.cmp(&b));
        prop_assert_eq!(ab.reverse(), deglex_compare(&b, &a).unwrap());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        if a.degree() != b.degree() {
            prop_assert_eq!(ab, a.degree().cmp(&b.degree()));
        }
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        let add = |x: &MultiIndex| {
            MultiIndex::new(x.exponents().iter().zip(shift.exponents()).map(|(p, q)| p + q).collect::<Vec<_>>())
        };
        prop_assert_eq!(add(&a).cmp(&add(&b)), ab);
        Ok(())
    })
}

pub fn jet_ring_laws() -> Result<(), String> {
    let s = shape(4).prop_flat_map(|(d, m)| (jet(d, m, 0, 5), jet(d, m, 0, 5), jet(d, m, 0, 5)));
    check(CASES, s, |(a, b, c)| {
        let (d, m) = (a.dim(), a.order());
        let ab = a.try_mul(&b).unwrap();
        prop_assert_eq!(&ab, &b.try_mul(&a).unwrap());
        prop_assert_eq!(ab.try_mul(&c).unwrap(), a.try_mul(&b.try_mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.try_mul(&b.try_add(&c).unwrap()).unwrap(),
            ab.try_add(&a.try_mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.try_add(&b).unwrap(), b.try_add(&a).unwrap());
        prop_assert_eq!(a.try_mul(&Jet::one(d, m)).unwrap(), a.clone());
        prop_assert!(a.try_mul(&Jet::zero(d, m)).unwrap().is_zero());
        prop_assert!(a.try_add(&a.neg()).unwrap().is_zero());
        Ok(())
    })
}

pub fn pullback_homomorphism() -> Result<(), String> {
    let s = shape(4).prop_flat_map(|(d, m)| (formal_map(d, m), formal_map(d, m), jet(d, m, 0, 5), jet(d, m, 0, 5)));
    check(CASES, s, |(f, g, a, b)| {
        let pa = f.pullback(&a).unwrap();
        let pb = f.pullback(&b).unwrap();
        prop_assert_eq!(f.pullback(&a.try_mul(&b).unwrap()).unwrap(), pa.try_mul(&pb).unwrap());
        prop_assert_eq!(f.pullback(&a.try_add(&b).unwrap()).unwrap(), pa.try_add(&pb).unwrap());
        // (F∘G)* = G* F*
        let fg = f.compose(&g).unwrap();
        prop_assert_eq!(fg.pullback(&a).unwrap(), g.pullback(&pa).unwrap());
        Ok(())
    })
}

pub fn leibniz_rule() -> Result<(), String> {
    let s = shape(4).prop_flat_map(|(d, m)| (field(d, m), jet(d, m, 0, 5), jet(d, m, 0, 5)));
    check(CASES, s, |(v, a, b)| {
        let lhs = v.derive(&a.try_mul(&b).unwrap()).unwrap();
        let rhs = v
            .derive(&a)
            .unwrap()
            .try_mul(&b)
            .unwrap()
            .try_add(&a.try_mul(&v.derive(&b).unwrap()).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

pub fn bracket_laws() -> Result<(), String> {
    let s = shape(4).prop_flat_map(|(d, m)| (field(d, m), field(d, m), field(d, m)));
    check(CASES, s, |(u, v, w)| {
        let uv = u.lie_bracket(&v).unwrap();
        let vu = v.lie_bracket(&u).unwrap();
        prop_assert_eq!(uv.clone(), vu.scale(&int(-1)));
        let j1 = u.lie_bracket(&v.lie_bracket(&w).unwrap()).unwrap();
        let j2 = v.lie_bracket(&w.lie_bracket(&u).unwrap()).unwrap();
        let j3 = w.lie_bracket(&uv).unwrap();
        for i in 0..u.dim() {
            let sum = j1.components()[i]
                .try_add(&j2.components()[i])
                .unwrap()
                .try_add(&j3.components()[i])
                .unwrap();
            prop_assert!(sum.is_zero());
        }
        Ok(())
    })
}

pub fn flow_group_law() -> Result<(), String> {
    let s = shape(4).prop_flat_map(|(d, m)| (triangular_field(d, m, false), rational(), rational()));
    check(CASES, s, |(v, s, t)| {
        let fs = unwrap_rational(flow_at(&v, &s).unwrap());
        let ft = unwrap_rational(flow_at(&v, &t).unwrap());
        let fst = unwrap_rational(flow_at(&v, &(&s + &t)).unwrap());
        prop_assert_eq!(fs.compose(&ft).unwrap(), fst);
        Ok(())
    })
}

/// The time derivative of the symbolic flow at `t = 0` is the field itself.
pub fn flow_generator_recovery() -> Result<(), String> {
    let s = (1usize..=2, 1u32..=3, any::<bool>()).prop_flat_map(|(d, m, diag)| triangular_field(d, m, diag));
    check(CASES, s, |v| {
        let flow = flow_symbolic(&v, 0).unwrap();
        let vars = TimeVars::single("t", TimeKind::Continuous);
        for (i, (c, vi)) in flow.components().iter().zip(v.components()).enumerate() {
            for alpha in monomial_basis(v.dim(), v.order()) {
                let q = c.coeff(&alpha);
                let dq = q.derivative(0).unwrap();
                prop_assert_eq!(dq.eval(&[int(0)], &vars).unwrap(), ext(&vi.coeff(&alpha)));
                // the flow starts at the identity
                let delta = if alpha == MultiIndex::unit(v.dim(), i) { int(1) } else { int(0) };
                prop_assert_eq!(q.eval(&[int(0)], &vars).unwrap(), ext(&delta));
            }
        }
        Ok(())
    })
}

pub fn codim_monotonicity() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| (prop::collection::vec(jet(d, 3, 1, 3), 1..=3), jet(d, 3, 1, 3)));
    check(CASES, s, |(gens, extra)| {
        let d = extra.dim();
        let cap = 8;
        let base = codim_of(d, &gens, cap);
        let mut more = gens.clone();
        more.push(extra);
        let bigger = codim_of(d, &more, cap);
        prop_assert!(ext_le(bigger.value, base.value), "{:?} vs {:?}", bigger, base);
        let mut prev = 0;
        for m in 1..=5 {
            let c = truncated_codim_of(d, &gens, m);
            prop_assert!(c >= prev);
            prev = c;
        }
        Ok(())
    })
}

pub fn codim_generator_invariance() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| {
        (
            prop::collection::vec(jet(d, 3, 1, 3), 2..=3),
            prop::collection::vec(nonzero_rational(), 3),
            rational(),
            multi_index(d, 1),
            any::<prop::sample::Index>(),
        )
    });
    check(CASES, s, |(gens, scales, r, beta, idx)| {
        let d = gens[0].dim();
        let cap = 8;
        let base = codim_of(d, &gens, cap);
        let mut perm = gens.clone();
        perm.rotate_left(idx.index(gens.len()));
        prop_assert_eq!(codim_of(d, &perm, cap).value, base.value);
        let scaled: Vec<Jet> = gens.iter().zip(&scales).map(|(g, c)| g.scale(c)).collect();
        prop_assert_eq!(codim_of(d, &scaled, cap).value, base.value);
        // g_0 += r x^β g_1, as exact polynomials
        let top = 3 + beta.degree();
        let mut comb: Vec<Jet> = gens.iter().map(|g| g.with_order(top)).collect();
        comb[0] = comb[0].try_add(&comb[1].shift(&beta).scale(&r)).unwrap();
        prop_assert_eq!(codim_of(d, &comb, cap).value, base.value);
        Ok(())
    })
}

pub fn codim_coordinate_invariance() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| (prop::collection::vec(jet(d, 3, 1, 3), 1..=3), invertible_map(d, 2)));
    check(CASES, s, |(gens, phi)| {
        let d = phi.dim();
        let cap = 8;
        let base = codim_of(d, &gens, cap);
        // exact polynomial pullback: degree 3 generators, degree 2 map
        let phi = phi.with_order(6);
        let moved: Vec<Jet> = gens.iter().map(|g| phi.pullback(&g.with_order(6)).unwrap()).collect();
        prop_assert_eq!(codim_of(d, &moved, cap).value, base.value);
        Ok(())
    })
}

pub fn codim_staircase_oracle() -> Result<(), String> {
    check(CASES, monomial_ideal(), |(d, gens)| {
        let cap = 24;
        let got = codim_of(d, &monomial_jets(d, &gens), cap);
        match staircase_count(d, &gens) {
            Some(n) if n < cap as u64 => prop_assert_eq!(got.value, ExtendedNat::Finite(n)),
            _ => prop_assert_eq!(got.value, ExtendedNat::AtLeast(cap)),
        }
        Ok(())
    })
}

/// Once the rule fires at `m`, later truncations agree.
pub fn stopping_rule_soundness() -> Result<(), String> {
    let s = (1usize..=2).prop_flat_map(|d| prop::collection::vec(jet(d, 3, 1, 3), 1..=3));
    check(CASES, s, |gens| {
        let d = gens[0].dim();
        let c = codim_of(d, &gens, 8);
        if let (ExtendedNat::Finite(v), Some(m)) = (c.value, c.certificate_order) {
            for k in m..m + 3 {
                prop_assert_eq!(truncated_codim_of(d, &gens, k) as u64, v);
            }
        }
        Ok(())
    })
}

pub fn quasipolynomial_eval_homomorphism() -> Result<(), String> {
    let s = prop_oneof![Just(TimeKind::Discrete), Just(TimeKind::Continuous)]
        .prop_flat_map(|k| (Just(k), quasipolynomial(k), quasipolynomial(k), -5i64..=5));
    check(CASES, s, |(kind, a, b, t)| {
        let vars = TimeVars::single("t", kind);
        let at = |q: &Quasipolynomial| q.eval(&[int(t)], &vars).unwrap();
        prop_assert_eq!(at(&(a.clone() * b.clone())), at(&a) * at(&b));
        prop_assert_eq!(at(&(a.clone() + b.clone())), at(&a) + at(&b));
        prop_assert_eq!(at(&(a.clone() - b.clone())), at(&a) - at(&b));
        Ok(())
    })
}

pub fn recurrence_residuals() -> Result<(), String> {
    let s = (multiplier(), quasipolynomial(TimeKind::Discrete), rational());
    check(CASES, s, |(mu, forcing, init)| {
        let vars = TimeVars::single("t", TimeKind::Discrete);
        let q = solve_discrete_recurrence(&mu, &forcing, &init, 0).unwrap();
        let at = |p: &Quasipolynomial, t: i64| p.eval(&[int(t)], &vars).unwrap();
        prop_assert_eq!(at(&q, 0), ext(&init));
        for t in 0..=12 {
            prop_assert_eq!(at(&q, t + 1), ext(&mu) * at(&q, t) + at(&forcing, t));
        }
        Ok(())
    })
}

pub fn ode_residuals() -> Result<(), String> {
    let s = (continuous_rate(), quasipolynomial(TimeKind::Continuous), rational());
    check(CASES, s, |(lambda, forcing, init)| {
        let vars = TimeVars::single("t", TimeKind::Continuous);
        let q = solve_linear_ode(&lambda, &forcing, &init, 0).unwrap();
        let dq = q.derivative(0).unwrap();
        prop_assert_eq!(dq.clone(), q.scale(&lambda) + forcing.clone());
        let at = |p: &Quasipolynomial, t: i64| p.eval(&[int(t)], &vars).unwrap();
        prop_assert_eq!(at(&q, 0), ext(&init));
        for t in 0..=12 {
            prop_assert_eq!(at(&dq, t), ext(&lambda) * at(&q, t) + at(&forcing, t));
        }
        Ok(())
    })
}

/// Rank of an evaluated quasipolynomial matrix never exceeds the generic
/// rank, and reaches it at some sampled integer.
pub fn rank_semicontinuity() -> Result<(), String> {
    let s = (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(quasipolynomial(TimeKind::Discrete), c), r)
    });
    check(CASES, s, |rows: Vec<Vec<Quasipolynomial>>| {
        let vars = TimeVars::single("t", TimeKind::Discrete);
        let generic = exact_rank(&rows);
        let mut reached = false;
        for t in -40i64..=40 {
            let ev: Vec<Vec<Rational>> = rows
                .iter()
                .map(|r| r.iter().map(|q| q.eval_rational(&[int(t)], &vars).unwrap()).collect())
                .collect();
            let k = exact_rank(&ev);
            prop_assert!(k <= generic);
            reached |= k == generic;
        }
        prop_assert!(reached);
        Ok(())
    })
}

pub fn sparse_dense_rank_agreement() -> Result<(), String> {
    let sparse_entry = prop_oneof![3 => Just(Rational::zero()), 2 => rational()];
    let s = (0usize..=6, 0usize..=6)
        .prop_flat_map(move |(r, c)| prop::collection::vec(prop::collection::vec(sparse_entry.clone(), c), r));
    check(CASES, s, |rows: Vec<Vec<Rational>>| {
        let mut e: SparseEchelon<usize, Rational> = SparseEchelon::new();
        for r in &rows {
            e.insert(r.iter().cloned().enumerate());
        }
        prop_assert_eq!(e.rank(), exact_rank(&rows));
        Ok(())
    })
}

pub type Suite = (&'static str, fn() -> Result<(), String>);

pub const SUITES: &[Suite] = &[
    ("deg-lex total order", deglex_order_laws),
    ("jet ring laws", jet_ring_laws),
    ("pullback homomorphism and composition reversal", pullback_homomorphism),
    ("Leibniz rule", leibniz_rule),
    ("bracket antisymmetry and Jacobi", bracket_laws),
    ("nilpotent flow group law", flow_group_law),
    ("flow generator recovery", flow_generator_recovery),
    ("codim monotonicity", codim_monotonicity),
    ("codim permutation, scaling, combination invariance", codim_generator_invariance),
    ("codim coordinate-change invariance", codim_coordinate_invariance),
    ("codim staircase oracle", codim_staircase_oracle),
    ("stopping rule soundness", stopping_rule_soundness),
    ("quasipolynomial evaluation homomorphism", quasipolynomial_eval_homomorphism),
    ("recurrence residuals t=0..12", recurrence_residuals),
    ("ODE residuals t=0..12", ode_residuals),
    ("rank semicontinuity", rank_semicontinuity),
    ("sparse vs dense rank", sparse_dense_rank_agreement),
];
