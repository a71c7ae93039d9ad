//! Quasipolynomials in group times and the orbit computations built on them.
//!
//! A quasipolynomial is a finite sum of exponentials times polynomials in
//! time variables. Discrete variables (integer powers of a map) carry rational
//! multiplicative bases `μ^t`; continuous variables (flow times) carry
//! rational rates `e^{λ t}`. Storing discrete bases multiplicatively avoids
//! any choice of logarithm.
//!
//! For a generator whose linear part is lower-triangular with rational
//! diagonal, the action on the truncated algebra is triangular along
//! [`solve_order`], so every orbit coefficient solves a scalar first-order
//! recurrence (or ODE) forced by earlier coefficients. [`OrbitSolver`] solves
//! those in closed form.

mod generic;
mod orbit;
mod parse;
mod qp;
mod solve;

pub use generic::{
    exceptional_conditions, generic_multiplicity, ExceptionalConditions, GenericMultiplicity, DEFAULT_MINOR_LIMIT,
};
pub use orbit::{
    action_matrix, group_time_vars, orbit_coefficient, orbit_matrix, solve_order, spectrum_of_group, ActionMatrix,
    Generator, GroupOrbit, OrbitSolver, SpectrumLattice,
};
pub use qp::{render_jet, Base, ExpKey, Quasipolynomial, TimeKind, TimeMonomial, TimePoly, TimeVars};
pub use solve::{solve_discrete_recurrence, solve_linear_ode};
