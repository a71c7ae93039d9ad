use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};

/// Exponent vector of a monomial `x^α`.
///
/// The `Ord` impl is the deg-lex order: total degree first, then among equal
/// degrees the index with the larger exponent at the first differing variable
/// comes first, so `x₁ < x₂ < … < x_d` in degree one. Indices of different
/// dimensions are ordered by dimension first; use [`deglex_compare`] when a
/// mismatch should be an error.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Box<[u32]>);

impl MultiIndex {
    pub fn new(exponents: impl Into<Box<[u32]>>) -> Self {
        MultiIndex(exponents.into())
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim].into())
    }

    /// The index of the coordinate function `x_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        MultiIndex(e.into())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// `self` divides `other` as monomials.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `self - e_i`, or `None` when the exponent of `x_i` is zero.
    pub fn lower(&self, i: usize) -> Option<MultiIndex> {
        if self.0[i] == 0 {
            return None;
        }
        let mut e = self.0.to_vec();
        e[i] -= 1;
        Some(MultiIndex(e.into()))
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), rhs.dim());
        MultiIndex(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

fn deglex_unchecked(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b.iter()) {
            if x != y {
                // larger exponent at the first difference comes first
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| deglex_unchecked(&self.0, &other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Deg-lex comparison, rejecting indices of different dimension.
pub fn deglex_compare(a: &MultiIndex, b: &MultiIndex) -> Result<Ordering> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(deglex_unchecked(&a.0, &b.0))
}

/// Number of monomials of degree at most `order` in `dim` variables,
/// `C(order + dim, dim)`.
pub fn monomial_count(dim: usize, order: u32) -> usize {
    let mut acc: u128 = 1;
    for i in 1..=dim as u128 {
        acc = acc * (order as u128 + i) / i;
    }
    acc as usize
}

/// All multi-indices of degree `<= order`, ascending in deg-lex order.
pub fn monomial_basis(dim: usize, order: u32) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(monomial_count(dim, order));
    let mut buf = vec![0u32; dim];
    for degree in 0..=order {
        if dim == 0 {
            if degree == 0 {
                out.push(MultiIndex::zero(0));
            }
            continue;
        }
        fill_degree(&mut buf, 0, degree, &mut out);
    }
    out
}

// Emits exponent vectors of exactly `remaining` total degree in deg-lex order:
// the first free variable takes the largest exponent first.
fn fill_degree(buf: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex::new(buf.to_vec()));
        return;
    }
    for e in (0..=remaining).rev() {
        buf[pos] = e;
        fill_degree(buf, pos + 1, remaining - e, out);
    }
    buf[pos] = 0;
}
