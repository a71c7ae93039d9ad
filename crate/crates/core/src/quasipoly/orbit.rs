use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::qp::{Base, Quasipolynomial, TimeKind, TimeVars};
use super::solve::{solve_discrete_recurrence, solve_linear_ode};
use crate::error::{Error, Result};
use crate::germs::{FormalMap, FormalVectorField};
use crate::linalg::Matrix;
use crate::ring::{monomial_basis, rational_pow, Jet, MultiIndex, Rational};

/// A group generator: a map acting by integer powers or a field acting by
/// its flow.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Map(FormalMap),
    Field(FormalVectorField),
}

impl Generator {
    pub fn dim(&self) -> usize {
        match self {
            Generator::Map(f) => f.dim(),
            Generator::Field(v) => v.dim(),
        }
    }

    /// Discrete for maps, continuous for fields.
    pub fn time_kind(&self) -> TimeKind {
        match self {
            Generator::Map(_) => TimeKind::Discrete,
            Generator::Field(_) => TimeKind::Continuous,
        }
    }

    pub fn linear_part(&self) -> &Matrix<Rational> {
        match self {
            Generator::Map(f) => f.linear_part(),
            Generator::Field(v) => v.linear_part(),
        }
    }

    /// Checks that the linear part is lower-triangular and returns its diagonal.
    pub fn diagonal(&self) -> Result<Vec<Rational>> {
        let h = self.linear_part();
        for (i, row) in h.iter().enumerate() {
            for (j, c) in row.iter().enumerate().skip(i + 1) {
                if !c.is_zero() {
                    return Err(Error::NonTriangularLinearPart { row: i, col: j });
                }
            }
        }
        Ok(h.iter().enumerate().map(|(i, row)| row[i].clone()).collect())
    }

    // Image of x^β under F* or V, at order m.
    fn images(&self, m: u32) -> BTreeMap<MultiIndex, Jet> {
        let dim = self.dim();
        let basis = monomial_basis(dim, m);
        let mut out: BTreeMap<MultiIndex, Jet> = BTreeMap::new();
        match self {
            Generator::Map(f) => {
                let f = f.with_order(m);
                for beta in basis {
                    let image = match (0..dim).find(|&i| beta.get(i) > 0) {
                        None => Jet::one(dim, m),
                        Some(i) => {
                            let lower = beta.lower(i).expect("positive exponent");
                            out[&lower].mul_unchecked(f.component(i))
                        }
                    };
                    out.insert(beta, image);
                }
            }
            Generator::Field(v) => {
                let v = v.with_order(m);
                for beta in basis {
                    let image = v.derive(&Jet::monomial(dim, m, beta.clone(), Rational::one())).expect("equal shapes");
                    out.insert(beta, image);
                }
            }
        }
        out
    }
}

/// All multi-indices of degree `<= m` in the order along which a generator
/// with lower-triangular linear part acts triangularly: degree ascending,
/// and within one degree, descending deg-lex.
///
/// A lower-triangular linear part moves exponent from `x_j` to some `x_k`
/// with `k < j`, which lands on a deg-lex smaller monomial of the same degree;
/// nonlinear terms raise the degree. Every image of `x^β` therefore sits at or
/// after `β` in this order.
pub fn solve_order(dim: usize, m: u32) -> Vec<MultiIndex> {
    let mut basis = monomial_basis(dim, m);
    let mut start = 0;
    while start < basis.len() {
        let deg = basis[start].degree();
        let end = basis[start..].iter().position(|b| b.degree() != deg).map_or(basis.len(), |p| start + p);
        basis[start..end].reverse();
        start = end;
    }
    basis
}

/// Matrix of `F*` or `V` on the truncated algebra, rows and columns indexed by
/// [`ActionMatrix::basis`] (ascending deg-lex); column `β` holds the image of `x^β`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionMatrix {
    pub basis: Vec<MultiIndex>,
    pub entries: Matrix<Rational>,
}

/// The action matrix, after checking that it is triangular along
/// [`solve_order`] with diagonal `μ^α` (maps) or `⟨λ, α⟩` (fields).
pub fn action_matrix(generator: &Generator, m: u32) -> Result<ActionMatrix> {
    let diag = generator.diagonal()?;
    let dim = generator.dim();
    let basis = monomial_basis(dim, m);
    let pos: HashMap<&MultiIndex, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let images = generator.images(m);
    let n = basis.len();
    let mut entries = vec![vec![Rational::zero(); n]; n];
    for (beta, image) in &images {
        let col = pos[beta];
        for (alpha, c) in image.terms() {
            entries[pos[alpha]][col] = c.clone();
        }
    }
    let order = solve_order(dim, m);
    let rank: HashMap<&MultiIndex, usize> = order.iter().enumerate().map(|(i, b)| (b, i)).collect();
    for (beta, image) in &images {
        for (alpha, _) in image.terms() {
            if rank[alpha] < rank[beta] {
                let row = (0..dim).find(|&i| alpha.get(i) > beta.get(i)).unwrap_or(0);
                let col = (0..dim).find(|&i| beta.get(i) > alpha.get(i)).unwrap_or(0);
                return Err(Error::NonTriangularLinearPart { row, col });
            }
        }
        let expected = diagonal_entry(generator, &diag, beta);
        if entries[pos[beta]][pos[beta]] != expected {
            return Err(Error::NonTriangularLinearPart { row: 0, col: 0 });
        }
    }
    Ok(ActionMatrix { basis, entries })
}

fn diagonal_entry(generator: &Generator, diag: &[Rational], alpha: &MultiIndex) -> Rational {
    match generator {
        Generator::Map(_) => diag
            .iter()
            .zip(alpha.exponents())
            .fold(Rational::one(), |acc, (mu, &e)| acc * rational_pow(mu, e as i64)),
        Generator::Field(_) => diag
            .iter()
            .zip(alpha.exponents())
            .fold(Rational::zero(), |acc, (l, &e)| acc + l * Rational::from_integer(e.into())),
    }
}

/// Per-generator orbit solver at a fixed truncation order.
///
/// Holds the rows of the action matrix so that orbits of many initial jets
/// can be solved without recomputing images.
pub struct OrbitSolver {
    generator: Generator,
    var: usize,
    m: u32,
    diag: Vec<Rational>,
    order: Vec<MultiIndex>,
    // row α: off-diagonal (β, M_αβ)
    rows: HashMap<MultiIndex, Vec<(MultiIndex, Rational)>>,
    columns: HashMap<MultiIndex, Jet<Quasipolynomial>>,
}

impl OrbitSolver {
    /// Orbit solver for `generator` in time variable `var` at order `m`.
    pub fn new(generator: &Generator, var: usize, m: u32) -> Result<Self> {
        let diag = generator.diagonal()?;
        if let Generator::Map(_) = generator {
            if diag.iter().any(Zero::is_zero) {
                return Err(Error::ZeroMultiplier);
            }
        }
        let dim = generator.dim();
        let order = solve_order(dim, m);
        let rank: HashMap<&MultiIndex, usize> = order.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut rows: HashMap<MultiIndex, Vec<(MultiIndex, Rational)>> = HashMap::new();
        for (beta, image) in generator.images(m) {
            for (alpha, c) in image.terms() {
                if *alpha == beta {
                    continue;
                }
                if rank[alpha] < rank[&beta] {
                    let row = (0..dim).find(|&i| alpha.get(i) > beta.get(i)).unwrap_or(0);
                    let col = (0..dim).find(|&i| beta.get(i) > alpha.get(i)).unwrap_or(0);
                    return Err(Error::NonTriangularLinearPart { row, col });
                }
                rows.entry(alpha.clone()).or_default().push((beta.clone(), c.clone()));
            }
        }
        Ok(OrbitSolver {
            generator: generator.clone(),
            var,
            m,
            diag,
            order,
            rows,
            columns: HashMap::new(),
        })
    }

    /// `(G^t)* f` with coefficients quasipolynomial in the solver's variable.
    pub fn orbit(&self, f: &Jet) -> Result<Jet<Quasipolynomial>> {
        let dim = self.generator.dim();
        let f = f.with_order(self.m);
        let mut out: Jet<Quasipolynomial> = Jet::zero(dim, self.m);
        let start = self.order.iter().position(|a| !f.coeff(a).is_zero());
        let Some(start) = start else {
            return Ok(out);
        };
        for alpha in &self.order[start..] {
            let mut forcing = Quasipolynomial::zero();
            if let Some(row) = self.rows.get(alpha) {
                for (beta, c) in row {
                    if let Some(cb) = out.get(beta) {
                        forcing += &cb.scale(c);
                    }
                }
            }
            let init = f.coeff(alpha);
            if forcing.is_zero() && init.is_zero() {
                continue;
            }
            let d = diagonal_entry(&self.generator, &self.diag, alpha);
            let value = match self.generator {
                Generator::Map(_) => solve_discrete_recurrence(&d, &forcing, &init, self.var)?,
                Generator::Field(_) => solve_linear_ode(&d, &forcing, &init, self.var)?,
            };
            out.set(alpha.clone(), value);
        }
        Ok(out)
    }

    /// Orbit of the monomial `x^β`, cached.
    pub fn column(&mut self, beta: &MultiIndex) -> Result<Jet<Quasipolynomial>> {
        if let Some(c) = self.columns.get(beta) {
            return Ok(c.clone());
        }
        let dim = self.generator.dim();
        let c = self.orbit(&Jet::monomial(dim, self.m, beta.clone(), Rational::one()))?;
        self.columns.insert(beta.clone(), c.clone());
        Ok(c)
    }

    /// Applies the generator's orbit to a jet whose coefficients are already
    /// quasipolynomials in other variables.
    pub fn apply(&mut self, h: &Jet<Quasipolynomial>) -> Result<Jet<Quasipolynomial>> {
        let dim = self.generator.dim();
        let mut out: Jet<Quasipolynomial> = Jet::zero(dim, self.m);
        for (beta, c) in h.with_order(self.m).terms() {
            let col = self.column(beta)?;
            for (alpha, v) in col.terms() {
                out.add_term(alpha.clone(), &c.try_mul(v)?);
            }
        }
        Ok(out)
    }
}

/// Coefficient of `x^α` in `(G^t)* f` as a quasipolynomial in variable 0.
pub fn orbit_coefficient(generator: &Generator, f: &Jet, alpha: &MultiIndex, m: u32) -> Result<Quasipolynomial> {
    let solver = OrbitSolver::new(generator, 0, m)?;
    Ok(solver.orbit(f)?.coeff(alpha))
}

/// The matrix of `(G^t)*` on the truncated algebra, indexed like
/// [`action_matrix`], with quasipolynomial entries in variable 0.
pub fn orbit_matrix(generator: &Generator, m: u32) -> Result<Matrix<Quasipolynomial>> {
    let mut solver = OrbitSolver::new(generator, 0, m)?;
    let basis = monomial_basis(generator.dim(), m);
    let n = basis.len();
    let mut out = vec![vec![Quasipolynomial::zero(); n]; n];
    for (j, beta) in basis.iter().enumerate() {
        let col = solver.column(beta)?;
        for (i, alpha) in basis.iter().enumerate() {
            out[i][j] = col.coeff(alpha);
        }
    }
    Ok(out)
}

/// Time variables for a list of generators: `t` for a single one, else
/// `t1, t2, …`.
pub fn group_time_vars(generators: &[Generator]) -> TimeVars {
    let mut vars = TimeVars::new();
    for (i, g) in generators.iter().enumerate() {
        let name = if generators.len() == 1 { "t".to_string() } else { format!("t{}", i + 1) };
        vars.get_or_insert(&name, g.time_kind()).expect("fresh names");
    }
    vars
}

/// Pullback of jets by `G_1^{t_1} ∘ … ∘ G_r^{t_r}` at order `m`, with one time
/// variable per generator.
pub struct GroupOrbit {
    solvers: Vec<OrbitSolver>,
    dim: usize,
    m: u32,
}

impl GroupOrbit {
    pub fn new(generators: &[Generator], dim: usize, m: u32) -> Result<Self> {
        let solvers = generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                if g.dim() != dim {
                    return Err(Error::DimensionMismatch { left: dim, right: g.dim() });
                }
                OrbitSolver::new(g, i, m)
            })
            .collect::<Result<_>>()?;
        Ok(GroupOrbit { solvers, dim, m })
    }

    pub fn pullback(&mut self, f: &Jet) -> Result<Jet<Quasipolynomial>> {
        // (f ∘ G_1 ∘ … ∘ G_r) applies G_1* first
        let mut h: Jet<Quasipolynomial> = f.with_order(self.m).map_coeffs(|c| Quasipolynomial::constant(c.clone()));
        if h.dim() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: h.dim() });
        }
        for s in &mut self.solvers {
            h = s.apply(&h)?;
        }
        Ok(h)
    }
}

/// Diagonal data of each generator's linear part.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumLattice {
    /// Per generator, its time kind and the distinct diagonal entries in
    /// order of first appearance.
    pub generators: Vec<(TimeKind, Vec<Rational>)>,
}

impl SpectrumLattice {
    /// Whether `base` is `Π μ_i^{α_i}` (maps) or `Σ α_i λ_i` (fields) for
    /// generator `g` with `α ≥ 0` and `|α| <= max_degree`.
    pub fn contains(&self, g: usize, base: &Base, max_degree: u32) -> bool {
        let (kind, gens) = &self.generators[g];
        let mut reachable: Vec<Rational> = vec![match kind {
            TimeKind::Discrete => Rational::one(),
            TimeKind::Continuous => Rational::zero(),
        }];
        let target = match (kind, base) {
            (TimeKind::Discrete, Base::Discrete(mu)) => mu,
            (TimeKind::Continuous, Base::Continuous(l)) => l,
            _ => return false,
        };
        let mut frontier = reachable.clone();
        for _ in 0..max_degree {
            let mut next = Vec::new();
            for r in &frontier {
                for g in gens {
                    let v = match kind {
                        TimeKind::Discrete => r * g,
                        TimeKind::Continuous => r + g,
                    };
                    if !reachable.contains(&v) {
                        reachable.push(v.clone());
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        reachable.contains(target)
    }
}

pub fn spectrum_of_group(generators: &[Generator]) -> Result<SpectrumLattice> {
    let mut out = Vec::new();
    for g in generators {
        let mut distinct: Vec<Rational> = Vec::new();
        for d in g.diagonal()? {
            if !distinct.contains(&d) {
                distinct.push(d);
            }
        }
        out.push((g.time_kind(), distinct));
    }
    Ok(SpectrumLattice { generators: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{int, parse_polynomial, rat};

    fn names(d: usize) -> Vec<String> {
        ["x", "y", "z"][..d].iter().map(|s| s.to_string()).collect()
    }

    fn map(parts: &[&str], m: u32) -> Generator {
        let n = names(parts.len());
        Generator::Map(FormalMap::new(parts.iter().map(|p| parse_polynomial(p, &n, m).unwrap()).collect()).unwrap())
    }

    fn field(parts: &[&str], m: u32) -> Generator {
        let n = names(parts.len());
        Generator::Field(
            FormalVectorField::new(parts.iter().map(|p| parse_polynomial(p, &n, m).unwrap()).collect()).unwrap(),
        )
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn solve_order_reverses_ties() {
        let o = solve_order(2, 2);
        assert_eq!(o, vec![mi(&[0, 0]), mi(&[0, 1]), mi(&[1, 0]), mi(&[0, 2]), mi(&[1, 1]), mi(&[2, 0])]);
    }

    #[test]
    fn action_matrix_examples() {
        let a = action_matrix(&map(&["2x"], 2), 2).unwrap();
        assert_eq!(a.entries, vec![vec![int(1), int(0), int(0)], vec![int(0), int(2), int(0)], vec![int(0), int(0), int(4)]]);
        let b = action_matrix(&field(&["x"], 2), 2).unwrap();
        assert_eq!(b.entries, vec![vec![int(0), int(0), int(0)], vec![int(0), int(1), int(0)], vec![int(0), int(0), int(2)]]);
        let c = action_matrix(&map(&["2x", "1/2 y + x^2"], 2), 2).unwrap();
        let y = c.basis.iter().position(|b| *b == mi(&[0, 1])).unwrap();
        let x2 = c.basis.iter().position(|b| *b == mi(&[2, 0])).unwrap();
        assert_eq!(c.entries[y][y], rat(1, 2));
        assert_eq!(c.entries[x2][y], int(1));
        let nonzero: usize = (0..c.basis.len()).filter(|&i| !c.entries[i][y].is_zero()).count();
        assert_eq!(nonzero, 2);
        assert!(matches!(
            action_matrix(&map(&["x + y", "y"], 2), 2),
            Err(Error::NonTriangularLinearPart { row: 0, col: 1 })
        ));
    }

    #[test]
    fn orbit_coefficient_examples() {
        let x = |m| parse_polynomial("x", &names(1), m).unwrap();
        assert_eq!(
            orbit_coefficient(&map(&["2x"], 2), &x(2), &mi(&[1]), 2).unwrap(),
            Quasipolynomial::discrete_exp(0, int(2))
        );
        let y = parse_polynomial("y", &names(2), 2).unwrap();
        let q = orbit_coefficient(&map(&["2x", "1/2 y + x^2"], 2), &y, &mi(&[2, 0]), 2).unwrap();
        let expect = Quasipolynomial::discrete_exp(0, int(4)).scale(&rat(2, 7))
            - Quasipolynomial::discrete_exp(0, rat(1, 2)).scale(&rat(2, 7));
        assert_eq!(q, expect);
        let y3 = parse_polynomial("y", &names(2), 3).unwrap();
        let r = orbit_coefficient(&field(&["x", "x + y"], 3), &y3, &mi(&[1, 0]), 3).unwrap();
        assert_eq!(r, Quasipolynomial::variable(0) * Quasipolynomial::continuous_exp(0, int(1)));
    }

    #[test]
    fn spectra() {
        let s = spectrum_of_group(&[map(&["2x", "1/2 y + x^2"], 2)]).unwrap();
        assert_eq!(s.generators, vec![(TimeKind::Discrete, vec![int(2), rat(1, 2)])]);
        let v = spectrum_of_group(&[field(&["x", "-y"], 2)]).unwrap();
        assert_eq!(v.generators, vec![(TimeKind::Continuous, vec![int(1), int(-1)])]);
        let id = spectrum_of_group(&[map(&["x", "y"], 2)]).unwrap();
        assert_eq!(id.generators, vec![(TimeKind::Discrete, vec![int(1)])]);
        assert!(s.contains(0, &Base::Discrete(int(4)), 2));
        assert!(!s.contains(0, &Base::Discrete(int(3)), 4));
    }
}
