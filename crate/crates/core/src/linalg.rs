//! Exact rank and determinants over integral domains.
//!
//! [`exact_rank`] and [`determinant`] use fraction-free (Bareiss) elimination,
//! so every intermediate entry stays in the domain and every division is exact.
//! Pivots are chosen deterministically: the first row, in index order, holding
//! a nonzero entry in the current column.

use std::collections::BTreeMap;


use crate::ring::Coefficient;

/// A dense matrix stored as a list of rows.
pub type Matrix<C> = Vec<Vec<C>>;

/// Rank over the fraction field of the entries' domain.
///
/// Rows may have different lengths; missing entries count as zero.
pub fn exact_rank<C: Coefficient>(matrix: &[Vec<C>]) -> usize {
    let cols = matrix.iter().map(Vec::len).max().unwrap_or(0);
    let mut a: Matrix<C> = matrix
        .iter()
        .filter(|row| row.iter().any(|c| !c.is_zero()))
        .map(|row| {
            let mut r = row.clone();
            r.resize(cols, C::zero());
            r
        })
        .collect();
    bareiss(&mut a, cols).0
}

/// Determinant of a square matrix.
///
/// # Panics
/// If the matrix is not square.
pub fn determinant<C: Coefficient>(matrix: &[Vec<C>]) -> C {
    let n = matrix.len();
    assert!(matrix.iter().all(|r| r.len() == n), "determinant needs a square matrix");
    if n == 0 {
        return C::one();
    }
    let mut a = matrix.to_vec();
    let (rank, negate) = bareiss(&mut a, n);
    if rank < n {
        return C::zero();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

// Row-echelon form in place. Returns the rank and whether an odd number of
// row swaps happened. After the call, the last pivot of a full-rank square
// matrix is its determinant up to that sign.
fn bareiss<C: Coefficient>(a: &mut Matrix<C>, cols: usize) -> (usize, bool) {
    let rows = a.len();
    let mut rank = 0;
    let mut prev = C::one();
    let mut negate = false;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            negate = !negate;
        }
        let (top, bottom) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[col].clone();
        for row in bottom.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..cols {
                let mut v = pivot.mul_ref(&row[j]);
                if !factor.is_zero() {
                    v -= &factor.mul_ref(&pivot_row[j]);
                }
                row[j] = v
                    .div_exact(&prev)
                    .expect("fraction-free elimination divides exactly in an integral domain");
            }
            row[col] = C::zero();
        }
        prev = pivot;
        rank += 1;
    }
    (rank, negate)
}

/// Incremental row echelon basis over a field, for sparse vectors keyed by an
/// ordered index.
///
/// Vectors are reduced only at their leading key, which is enough to decide
/// linear independence. Used where the coefficient domain is a field and the
/// vectors are much sparser than the ambient dimension.
#[derive(Debug, Clone)]
pub struct SparseEchelon<K: Ord + Clone, C: Coefficient> {
    pivots: BTreeMap<K, BTreeMap<K, C>>,
}

impl<K: Ord + Clone, C: Coefficient> Default for SparseEchelon<K, C> {
    fn default() -> Self {
        SparseEchelon {
            pivots: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone, C: Coefficient> SparseEchelon<K, C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Adds a vector; returns whether it increased the rank.
    ///
    /// # Panics
    /// If `C` is not a field.
    pub fn insert(&mut self, vector: impl IntoIterator<Item = (K, C)>) -> bool {
        assert!(C::IS_FIELD, "sparse echelon needs a field");
        let mut v: BTreeMap<K, C> = vector.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        loop {
            let Some((lead, lc)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
                return false;
            };
            match self.pivots.get(&lead) {
                Some(pivot) => {
                    // pivots are monic, so subtract lc times the pivot
                    for (k, c) in pivot {
                        let delta = lc.mul_ref(c);
                        match v.get_mut(k) {
                            Some(slot) => {
                                *slot -= &delta;
                                if slot.is_zero() {
                                    v.remove(k);
                                }
                            }
                            None => {
                                v.insert(k.clone(), -delta);
                            }
                        }
                    }
                }
                None => {
                    let inv = lc.inverse().expect("nonzero field element is invertible");
                    for c in v.values_mut() {
                        *c = c.mul_ref(&inv);
                    }
                    self.pivots.insert(lead, v);
                    return true;
                }
            }
        }
    }
}
