use std::fmt;

use super::Generators;
use crate::error::{Error, Result};

/// The three pairwise commutation conditions for a group generated by maps
/// and fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `F_i ∘ F_j = F_j ∘ F_i`.
    MapsCommute,
    /// `[v_i, v_j] = 0`.
    FieldsCommute,
    /// `(F_i)_* v_j = v_j`.
    FieldInvariant,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::MapsCommute => "maps-commute",
            Condition::FieldsCommute => "fields-commute",
            Condition::FieldInvariant => "field-invariant",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCheck {
    pub condition: Condition,
    pub left: String,
    pub right: String,
    pub holds: bool,
}

/// Outcome of [`check_commutative`]. A pass certifies commutation only up to
/// the truncation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutativityCertificate {
    pub order: u32,
    pub checks: Vec<PairCheck>,
}

impl CommutativityCertificate {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PairCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Checks every pair of generators up to their common truncation order.
pub fn check_commutative(generators: &Generators) -> Result<CommutativityCertificate> {
    let maps = generators.maps();
    let fields = generators.fields();
    let orders: Vec<u32> = maps
        .iter()
        .map(|(_, m)| m.order())
        .chain(fields.iter().map(|(_, f)| f.order()))
        .collect();
    let order = orders.first().copied().unwrap_or(0);
    if let Some(&other) = orders.iter().find(|&&o| o != order) {
        let d = generators.dim().unwrap_or(0);
        return Err(Error::ShapeMismatch {
            d1: d,
            m1: order,
            d2: d,
            m2: other,
        });
    }
    let mut checks = Vec::new();
    for (i, (a, fa)) in maps.iter().enumerate() {
        for (b, fb) in &maps[i + 1..] {
            checks.push(PairCheck {
                condition: Condition::MapsCommute,
                left: a.clone(),
                right: b.clone(),
                holds: fa.compose(fb)? == fb.compose(fa)?,
            });
        }
    }
    for (i, (a, va)) in fields.iter().enumerate() {
        for (b, vb) in &fields[i + 1..] {
            checks.push(PairCheck {
                condition: Condition::FieldsCommute,
                left: a.clone(),
                right: b.clone(),
                holds: va.lie_bracket(vb)?.is_zero(),
            });
        }
    }
    for (a, fa) in maps {
        for (b, vb) in fields {
            checks.push(PairCheck {
                condition: Condition::FieldInvariant,
                left: a.clone(),
                right: b.clone(),
                holds: vb.pushforward(fa)? == *vb,
            });
        }
    }
    Ok(CommutativityCertificate { order, checks })
}
