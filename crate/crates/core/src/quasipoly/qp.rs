use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ring::laurent::{coprime_base, factor_over, LaurentPoly};
use crate::ring::{rational_pow, Coefficient, ExpRational, Jet, Rational};

/// Whether a time variable ranges over the integers or over a continuum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeKind {
    /// Integer powers of a map; exponentials are written `μ^t`.
    Discrete,
    /// Flow times; exponentials are written `exp(λ t)`.
    Continuous,
}

/// Names and kinds of the time variables a family of quasipolynomials uses.
///
/// Quasipolynomials refer to variables by index; this table supplies the
/// names for rendering and parsing and the kinds for evaluation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TimeVars {
    vars: Vec<(String, TimeKind)>,
}

impl TimeVars {
    pub fn new() -> Self {
        Self::default()
    }

    /// A single variable table.
    pub fn single(name: &str, kind: TimeKind) -> Self {
        let mut v = Self::new();
        v.vars.push((name.to_string(), kind));
        v
    }

    /// Index of `name`, adding it if new. Reusing a name with the other kind
    /// is an error.
    pub fn get_or_insert(&mut self, name: &str, kind: TimeKind) -> Result<usize> {
        if let Some(i) = self.index_of(name) {
            if self.vars[i].1 != kind {
                return Err(Error::VariableMismatch(format!(
                    "time variable \"{name}\" used as both discrete and continuous"
                )));
            }
            return Ok(i);
        }
        self.vars.push((name.to_string(), kind));
        Ok(self.vars.len() - 1)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].0
    }

    pub fn kind(&self, i: usize) -> TimeKind {
        self.vars[i].1
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|(n, _)| n.clone()).collect()
    }
}

/// Exponential data of one variable in one term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    /// Contributes `μ^t`; `μ` is nonzero.
    Discrete(Rational),
    /// Contributes `e^{λ t}`.
    Continuous(Rational),
}

impl Base {
    fn is_trivial(&self) -> bool {
        match self {
            Base::Discrete(mu) => mu.is_one(),
            Base::Continuous(l) => l.is_zero(),
        }
    }

    fn kind(&self) -> TimeKind {
        match self {
            Base::Discrete(_) => TimeKind::Discrete,
            Base::Continuous(_) => TimeKind::Continuous,
        }
    }

    fn combine(&self, other: &Base) -> Option<Base> {
        match (self, other) {
            (Base::Discrete(a), Base::Discrete(b)) => Some(Base::Discrete(a * b)),
            (Base::Continuous(a), Base::Continuous(b)) => Some(Base::Continuous(a + b)),
            _ => None,
        }
    }
}

/// Sorted `(variable, base)` pairs with trivial bases omitted.
pub type ExpKey = Vec<(usize, Base)>;
/// Sorted `(variable, exponent)` pairs with zero exponents omitted.
pub type TimeMonomial = Vec<(usize, u32)>;
/// A polynomial in the time variables.
pub type TimePoly = BTreeMap<TimeMonomial, Rational>;

/// A finite sum `Σ (Π base_k^{t_k}) · p(t)` over distinct exponential keys.
///
/// Canonical: keys are distinct and no polynomial is zero, so equality is
/// structural and the zero test is emptiness. Distinct exponentials with
/// rational data are linearly independent over the polynomials, which makes
/// this a normal form.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Quasipolynomial {
    terms: BTreeMap<ExpKey, TimePoly>,
}

fn mono_mul(a: &TimeMonomial, b: &TimeMonomial) -> TimeMonomial {
    let mut out: BTreeMap<usize, u32> = a.iter().cloned().collect();
    for (v, e) in b {
        *out.entry(*v).or_insert(0) += e;
    }
    out.into_iter().collect()
}

fn poly_add_term(p: &mut TimePoly, m: TimeMonomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    let slot = p.entry(m.clone()).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        p.remove(&m);
    }
}

fn key_mul(a: &ExpKey, b: &ExpKey) -> Option<ExpKey> {
    let mut out: BTreeMap<usize, Base> = a.iter().cloned().collect();
    for (v, base) in b {
        match out.get(v) {
            Some(existing) => {
                let c = existing.combine(base)?;
                out.insert(*v, c);
            }
            None => {
                out.insert(*v, base.clone());
            }
        }
    }
    Some(out.into_iter().filter(|(_, b)| !b.is_trivial()).collect())
}

impl Quasipolynomial {
    pub fn constant(c: Rational) -> Self {
        let mut q = Self::default();
        q.add_term(Vec::new(), Vec::new(), c);
        q
    }

    /// The time variable `t_var` itself.
    pub fn variable(var: usize) -> Self {
        let mut q = Self::default();
        q.add_term(Vec::new(), vec![(var, 1)], Rational::one());
        q
    }

    /// `μ^t` in a discrete variable.
    pub fn discrete_exp(var: usize, mu: Rational) -> Self {
        Self::exp_monomial(var, Base::Discrete(mu))
    }

    /// `e^{λ t}` in a continuous variable.
    pub fn continuous_exp(var: usize, lambda: Rational) -> Self {
        Self::exp_monomial(var, Base::Continuous(lambda))
    }

    fn exp_monomial(var: usize, base: Base) -> Self {
        let key = if base.is_trivial() { Vec::new() } else { vec![(var, base)] };
        let mut q = Self::default();
        q.add_term(key, Vec::new(), Rational::one());
        q
    }

    /// `c · key · t^mono`, accumulated.
    pub fn add_term(&mut self, key: ExpKey, mono: TimeMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key: ExpKey = key.into_iter().filter(|(_, b)| !b.is_trivial()).collect();
        let mono: TimeMonomial = mono.into_iter().filter(|(_, e)| *e > 0).collect();
        let poly = self.terms.entry(key.clone()).or_default();
        poly_add_term(poly, mono, c);
        if poly.is_empty() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpKey, &TimePoly)> {
        self.terms.iter()
    }

    /// Number of exponential terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Variables that occur, in exponentials or polynomial parts.
    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (k, p) in &self.terms {
            out.extend(k.iter().map(|(v, _)| *v));
            for m in p.keys() {
                out.extend(m.iter().map(|(v, _)| *v));
            }
        }
        out
    }

    /// Nontrivial bases attached to `var`, in canonical order.
    pub fn bases_of(&self, var: usize) -> Vec<Base> {
        let set: BTreeSet<Base> = self
            .terms
            .keys()
            .flat_map(|k| k.iter().filter(|(v, _)| *v == var).map(|(_, b)| b.clone()))
            .collect();
        set.into_iter().collect()
    }

    /// Product, failing when a variable carries discrete data in one factor
    /// and continuous data in the other.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::default();
        for (ka, pa) in &self.terms {
            for (kb, pb) in &other.terms {
                let key = key_mul(ka, kb).ok_or_else(|| {
                    Error::VariableMismatch("a time variable is discrete in one factor and continuous in the other".into())
                })?;
                for (ma, ca) in pa {
                    for (mb, cb) in pb {
                        out.add_term(key.clone(), mono_mul(ma, mb), ca * cb);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::default();
        }
        Quasipolynomial {
            terms: self
                .terms
                .iter()
                .map(|(k, p)| (k.clone(), p.iter().map(|(m, v)| (m.clone(), v * c)).collect()))
                .collect(),
        }
    }

    /// Exact value at a point. `values[i]` is assigned to variable `i`;
    /// discrete variables need integer values.
    pub fn eval(&self, values: &[Rational], vars: &TimeVars) -> Result<ExpRational> {
        for v in self.variables() {
            if v >= values.len() || v >= vars.len() {
                return Err(Error::VariableMismatch(format!("no value for time variable {v}")));
            }
        }
        for (i, val) in values.iter().enumerate().take(vars.len()) {
            if vars.kind(i) == TimeKind::Discrete && !val.is_integer() {
                return Err(Error::NonIntegerDiscrete(vars.name(i).to_string()));
            }
        }
        let mut out = ExpRational::zero();
        for (key, poly) in &self.terms {
            let mut scalar = Rational::one();
            let mut exponent = Rational::zero();
            for (v, base) in key {
                match base {
                    Base::Discrete(mu) => {
                        let n = i64::try_from(values[*v].to_integer())
                            .map_err(|_| Error::Unsupported("time value out of range".into()))?;
                        if mu.is_zero() && n < 0 {
                            return Err(Error::ZeroMultiplier);
                        }
                        scalar *= rational_pow(mu, n);
                    }
                    Base::Continuous(l) => exponent += l * &values[*v],
                }
            }
            let mut pv = Rational::zero();
            for (m, c) in poly {
                let mut term = c.clone();
                for (v, e) in m {
                    term *= rational_pow(&values[*v], *e as i64);
                }
                pv += term;
            }
            out += &ExpRational::exp_term(scalar * pv, exponent);
        }
        Ok(out)
    }

    /// Value at a point when it is rational (always the case when all
    /// variables are discrete).
    pub fn eval_rational(&self, values: &[Rational], vars: &TimeVars) -> Result<Rational> {
        let v = self.eval(values, vars)?;
        v.as_rational()
            .ok_or_else(|| Error::Unsupported(format!("value {v} is not rational")))
    }

    /// Formal derivative in a continuous variable.
    pub fn derivative(&self, var: usize) -> Result<Self> {
        let mut out = Self::default();
        for (key, poly) in &self.terms {
            let mut lambda = Rational::zero();
            for (v, base) in key {
                if *v == var {
                    match base {
                        Base::Continuous(l) => lambda = l.clone(),
                        Base::Discrete(_) => {
                            return Err(Error::VariableMismatch(
                                "derivative in a variable with discrete bases".into(),
                            ))
                        }
                    }
                }
            }
            for (m, c) in poly {
                out.add_term(key.clone(), m.clone(), c * &lambda);
                if let Some(pos) = m.iter().position(|(v, _)| *v == var) {
                    let e = m[pos].1;
                    let mut lower = m.clone();
                    lower[pos].1 -= 1;
                    out.add_term(key.clone(), lower, c * Rational::from_integer(e.into()));
                }
            }
        }
        Ok(out)
    }

    /// `q(t + by)` in a discrete variable.
    pub fn shift(&self, var: usize, by: i64) -> Result<Self> {
        let mut out = Self::default();
        for (key, poly) in &self.terms {
            let mut factor = Rational::one();
            for (v, base) in key {
                if *v == var {
                    match base {
                        Base::Discrete(mu) => factor = rational_pow(mu, by),
                        Base::Continuous(_) => {
                            return Err(Error::VariableMismatch("integer shift of a continuous variable".into()))
                        }
                    }
                }
            }
            let shift = Quasipolynomial::variable(var) + Quasipolynomial::constant(Rational::from_integer(by.into()));
            for (m, c) in poly {
                let mut term = Quasipolynomial::constant(c * &factor);
                let mut rest: TimeMonomial = Vec::new();
                for (v, e) in m {
                    if *v == var {
                        for _ in 0..*e {
                            term = term.try_mul(&shift)?;
                        }
                    } else {
                        rest.push((*v, *e));
                    }
                }
                for (tm, tp) in term.terms {
                    for (mm, cc) in tp {
                        out.add_term(key.clone(), mono_mul(&mm, &rest), cc);
                    }
                    debug_assert!(tm.is_empty());
                }
            }
        }
        Ok(out)
    }

    /// Renders as `base^t*(poly) + exp(λ*t)*(poly) + (poly)`.
    pub fn render(&self, vars: &TimeVars) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let names = vars.names();
        let mut parts = Vec::new();
        for (key, poly) in &self.terms {
            let mut factors = Vec::new();
            for (v, base) in key {
                let name = &names[*v];
                factors.push(match base {
                    Base::Discrete(mu) => {
                        if mu.is_integer() && mu.is_positive() {
                            format!("{mu}^{name}")
                        } else {
                            format!("({mu})^{name}")
                        }
                    }
                    Base::Continuous(l) => {
                        if l.is_one() {
                            format!("exp({name})")
                        } else {
                            format!("exp({l}*{name})")
                        }
                    }
                });
            }
            factors.push(format!("({})", render_time_poly(poly, &names)));
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }

    /// Inverse of [`Quasipolynomial::render`].
    pub fn parse(text: &str, vars: &TimeVars) -> Result<Self> {
        super::parse::parse_quasipolynomial(text, vars)
    }

    // Laurent image: one unit per prime of a coprime base for each discrete
    // variable, one unit per continuous variable, one polynomial variable per
    // time variable. None when a discrete base is negative.
    fn laurent_layout(a: &Self, b: &Self) -> Option<LaurentLayout> {
        let mut vars: BTreeSet<usize> = a.variables();
        vars.extend(b.variables());
        let mut slots = Vec::new();
        for &v in &vars {
            let mut discrete = Vec::new();
            let mut continuous_denom = BigInt::one();
            let mut kinds = BTreeSet::new();
            for base in a.bases_of(v).into_iter().chain(b.bases_of(v)) {
                kinds.insert(base.kind());
                match base {
                    Base::Discrete(mu) => {
                        if !mu.is_positive() {
                            return None;
                        }
                        discrete.push(mu.numer().to_biguint()?);
                        discrete.push(mu.denom().to_biguint()?);
                    }
                    Base::Continuous(l) => continuous_denom = continuous_denom.lcm(l.denom()),
                }
            }
            if kinds.len() > 1 {
                return None;
            }
            for p in coprime_base(discrete) {
                slots.push(Slot::Prime(v, p));
            }
            if kinds.contains(&TimeKind::Continuous) {
                slots.push(Slot::Continuous(v, continuous_denom));
            }
            slots.push(Slot::Time(v));
        }
        Some(LaurentLayout { slots })
    }
}

#[derive(Debug)]
enum Slot {
    Prime(usize, BigUint),
    Continuous(usize, BigInt),
    Time(usize),
}

struct LaurentLayout {
    slots: Vec<Slot>,
}

impl LaurentLayout {
    fn polynomial_flags(&self) -> Vec<bool> {
        self.slots.iter().map(|s| matches!(s, Slot::Time(_))).collect()
    }

    fn encode(&self, q: &Quasipolynomial) -> Option<LaurentPoly> {
        let mut out = LaurentPoly::default();
        for (key, poly) in &q.terms {
            let mut base_exps = vec![0i64; self.slots.len()];
            for (v, base) in key {
                match base {
                    Base::Discrete(mu) => {
                        let idx: Vec<usize> = (0..self.slots.len())
                            .filter(|&i| matches!(&self.slots[i], Slot::Prime(w, _) if w == v))
                            .collect();
                        let primes: Vec<BigUint> = idx
                            .iter()
                            .map(|&i| match &self.slots[i] {
                                Slot::Prime(_, p) => p.clone(),
                                _ => unreachable!(),
                            })
                            .collect();
                        let num = factor_over(&mu.numer().to_biguint()?, &primes)?;
                        let den = factor_over(&mu.denom().to_biguint()?, &primes)?;
                        for (k, &i) in idx.iter().enumerate() {
                            base_exps[i] += num[k] - den[k];
                        }
                    }
                    Base::Continuous(l) => {
                        let i = self
                            .slots
                            .iter()
                            .position(|s| matches!(s, Slot::Continuous(w, _) if w == v))?;
                        let Slot::Continuous(_, d) = &self.slots[i] else { unreachable!() };
                        let k = (l * Rational::from_integer(d.clone())).to_integer();
                        base_exps[i] += i64::try_from(k).ok()?;
                    }
                }
            }
            for (m, c) in poly {
                let mut exps = base_exps.clone();
                for (v, e) in m {
                    let i = self.slots.iter().position(|s| matches!(s, Slot::Time(w) if w == v))?;
                    exps[i] += *e as i64;
                }
                out.add_term(exps, c.clone());
            }
        }
        Some(out)
    }

    fn decode(&self, p: &LaurentPoly) -> Quasipolynomial {
        let mut out = Quasipolynomial::default();
        for (exps, c) in &p.terms {
            let mut key: BTreeMap<usize, Base> = BTreeMap::new();
            let mut mono = Vec::new();
            for (slot, &e) in self.slots.iter().zip(exps) {
                match slot {
                    Slot::Prime(v, prime) => {
                        let factor = rational_pow(&Rational::from_integer(BigInt::from_biguint(Sign::Plus, prime.clone())), e);
                        let entry = key.entry(*v).or_insert_with(|| Base::Discrete(Rational::one()));
                        if let Base::Discrete(mu) = entry {
                            *mu *= factor;
                        }
                    }
                    Slot::Continuous(v, d) => {
                        key.insert(*v, Base::Continuous(Rational::new(e.into(), d.clone())));
                    }
                    Slot::Time(v) => {
                        if e > 0 {
                            mono.push((*v, e as u32));
                        }
                    }
                }
            }
            out.add_term(key.into_iter().collect(), mono, c.clone());
        }
        out
    }
}

fn render_time_poly(poly: &TimePoly, names: &[String]) -> String {
    let mut out = String::new();
    // ascending total degree reads naturally
    let mut entries: Vec<(&TimeMonomial, &Rational)> = poly.iter().collect();
    entries.sort_by(|a, b| {
        let da: u32 = a.0.iter().map(|(_, e)| e).sum();
        let db: u32 = b.0.iter().map(|(_, e)| e).sum();
        da.cmp(&db).then_with(|| a.0.cmp(b.0))
    });
    for (m, c) in entries {
        let negative = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mono: Vec<String> = m
            .iter()
            .map(|(v, e)| if *e == 1 { names[*v].clone() } else { format!("{}^{}", names[*v], e) })
            .collect();
        if mono.is_empty() {
            out.push_str(&abs.to_string());
        } else {
            if !abs.is_one() {
                out.push_str(&abs.to_string());
                out.push('*');
            }
            out.push_str(&mono.join("*"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Renders a jet with quasipolynomial coefficients as `[q]*x^a*y^b + …`.
pub fn render_jet(jet: &Jet<Quasipolynomial>, names: &[String], vars: &TimeVars) -> String {
    let parts: Vec<String> = jet
        .terms()
        .map(|(k, q)| {
            let mono: Vec<String> = k
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(i, e)| if *e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
                .collect();
            let mono = if mono.is_empty() { "1".to_string() } else { mono.join("*") };
            format!("[{}]*{}", q.render(vars), mono)
        })
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

impl Zero for Quasipolynomial {
    fn zero() -> Self {
        Self::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Quasipolynomial {
    fn one() -> Self {
        Self::constant(Rational::one())
    }
}

impl<'a> AddAssign<&'a Quasipolynomial> for Quasipolynomial {
    fn add_assign(&mut self, rhs: &'a Quasipolynomial) {
        for (k, p) in &rhs.terms {
            for (m, c) in p {
                self.add_term(k.clone(), m.clone(), c.clone());
            }
        }
    }
}

impl<'a> SubAssign<&'a Quasipolynomial> for Quasipolynomial {
    fn sub_assign(&mut self, rhs: &'a Quasipolynomial) {
        for (k, p) in &rhs.terms {
            for (m, c) in p {
                self.add_term(k.clone(), m.clone(), -c.clone());
            }
        }
    }
}

impl Add for Quasipolynomial {
    type Output = Quasipolynomial;

    fn add(mut self, rhs: Quasipolynomial) -> Quasipolynomial {
        self += &rhs;
        self
    }
}

impl Sub for Quasipolynomial {
    type Output = Quasipolynomial;

    fn sub(mut self, rhs: Quasipolynomial) -> Quasipolynomial {
        self -= &rhs;
        self
    }
}

/// # Panics
/// On mixed discrete/continuous data for one variable; use
/// [`Quasipolynomial::try_mul`] to get an error instead.
impl Mul for Quasipolynomial {
    type Output = Quasipolynomial;

    fn mul(self, rhs: Quasipolynomial) -> Quasipolynomial {
        self.mul_ref(&rhs)
    }
}

impl Neg for Quasipolynomial {
    type Output = Quasipolynomial;

    fn neg(self) -> Quasipolynomial {
        self.scale(&-Rational::one())
    }
}

impl Coefficient for Quasipolynomial {
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("quasipolynomial factors disagree on a variable's kind")
    }

    /// Exact division in the Laurent image. Negative discrete bases make the
    /// ring non-reduced (`(1 + (-1)^t)(1 - (-1)^t) = 0`) and are not handled.
    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some(c) = rhs.as_rational() {
            return Some(self.scale(&c.recip()));
        }
        let layout = Self::laurent_layout(self, rhs)?;
        let a = layout.encode(self)?;
        let b = layout.encode(rhs)?;
        let q = LaurentPoly::div_exact(&a, &b, &layout.polynomial_flags())?;
        Some(layout.decode(&q))
    }

    fn from_rational(q: &Rational) -> Self {
        Self::constant(q.clone())
    }

    fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let poly = self.terms.get(&Vec::new())?;
                if poly.len() == 1 {
                    poly.get(&Vec::new()).cloned()
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

impl fmt::Display for Quasipolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut vars = TimeVars::new();
        let n = self.variables().last().map(|v| v + 1).unwrap_or(0);
        for i in 0..n {
            let name = if n == 1 { "t".to_string() } else { format!("t{}", i + 1) };
            let kind = self
                .terms
                .keys()
                .flat_map(|k| k.iter())
                .find(|(v, _)| *v == i)
                .map(|(_, b)| b.kind())
                .unwrap_or(TimeKind::Discrete);
            vars.vars.push((name, kind));
        }
        f.write_str(&self.render(&vars))
    }
}

impl fmt::Debug for Quasipolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quasipolynomial({self})")
    }
}
