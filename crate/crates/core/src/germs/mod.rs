//! Formal self-maps and vector fields at the origin.
//!
//! Maps compose and invert degree by degree; fields act as derivations and
//! generate flows. [`GroupWord`] names an element of the group the generators
//! span, and [`word_to_map`] evaluates it exactly.

mod commute;
mod field;
mod flow;
mod map;
mod word;

pub use commute::{check_commutative, CommutativityCertificate, Condition, PairCheck};
pub use field::FormalVectorField;
pub use flow::{flow_at, flow_symbolic};
pub use map::FormalMap;
pub use word::{word_to_map, FlowTime, Generators, GroupWord, Letter, WordMap};
