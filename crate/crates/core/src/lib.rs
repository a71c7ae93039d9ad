//! Exact local dynamics at a fixed point.
//!
//! The crate computes intersection multiplicities of subvariety germs dragged
//! by finitely generated groups of formal self-maps and flows, and the
//! quasipolynomial dependence of orbit coefficients on the group times.
//!
//! * [`ring`]: multi-indices, deg-lex order, truncated series over exact
//!   coefficient domains.
//! * [`germs`]: formal maps and vector fields, composition, flows, group words.
//! * [`multiplicity`]: ideal codimension with an exact stopping rule.
//! * [`quasipoly`]: quasipolynomials, closed-form recurrences, generic
//!   multiplicity over symbolic group times.

pub mod error;
pub mod germs;
pub mod linalg;
pub mod multiplicity;
pub mod quasipoly;
pub mod ring;

pub use error::{Error, Result};
pub use germs::{FormalMap, FormalVectorField, Generators, GroupWord, WordMap};
pub use multiplicity::{Codim, ExtendedNat, IdealPresentation};
pub use quasipoly::{Quasipolynomial, TimeKind, TimeVars};
pub use ring::{Coefficient, ExpRational, Jet, MultiIndex, Rational};
