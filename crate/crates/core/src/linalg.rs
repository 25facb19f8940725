//! Exact sparse Gaussian elimination over the rationals.
//!
//! Rows are inserted one at a time and the pivot rows are kept in reduced
//! row echelon form. The pivot of a new row is always its smallest nonzero
//! column, so the resulting kernel basis depends only on the column order.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

pub type SparseRow = BTreeMap<usize, Scalar>;

#[derive(Debug, Clone, Default)]
pub struct RowReducer {
    columns: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

fn axpy(target: &mut SparseRow, row: &SparseRow, by: &Scalar) {
    for (col, c) in row {
        let slot = target.entry(*col).or_default();
        *slot += &(c * by);
        if slot.is_zero() {
            target.remove(col);
        }
    }
}

impl RowReducer {
    pub fn new(columns: usize) -> Self {
        RowReducer {
            columns,
            pivots: BTreeMap::new(),
        }
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Adds a row; returns `true` if it increased the rank.
    pub fn insert(&mut self, row: &SparseRow) -> bool {
        let mut r: SparseRow = row.iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (*k, c.clone())).collect();
        debug_assert!(r.keys().all(|&k| k < self.columns));
        let hits: Vec<(usize, Scalar)> = r
            .iter()
            .filter(|(col, _)| self.pivots.contains_key(col))
            .map(|(col, c)| (*col, c.clone()))
            .collect();
        for (col, c) in hits {
            axpy(&mut r, &self.pivots[&col], &-c);
        }
        let Some((&lead, lead_val)) = r.iter().next() else {
            return false;
        };
        let inv = lead_val.recip().expect("nonzero lead");
        for c in r.values_mut() {
            *c *= &inv;
        }
        for other in self.pivots.values_mut() {
            if let Some(c) = other.get(&lead).cloned() {
                axpy(other, &r, &-c);
            }
        }
        self.pivots.insert(lead, r);
        true
    }

    /// Kernel basis, one vector per free column in increasing column order.
    /// Each vector has a 1 at its free column and 0 at the other free columns.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        (0..self.columns)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|free| {
                let mut v = vec![Scalar::zero(); self.columns];
                v[free] = Scalar::one();
                for (p, row) in &self.pivots {
                    if let Some(c) = row.get(&free) {
                        v[*p] = -c;
                    }
                }
                v
            })
            .collect()
    }
}

/// Kernel of the matrix with the given rows.
pub fn nullspace(rows: &[SparseRow], columns: usize) -> Vec<Vec<Scalar>> {
    let mut red = RowReducer::new(columns);
    for row in rows {
        red.insert(row);
    }
    red.kernel()
}

pub fn row_dot(row: &SparseRow, v: &[Scalar]) -> Scalar {
    row.iter().map(|(k, c)| c * &v[*k]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qr};
    use proptest::prelude::*;

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|&(k, c)| (k, q(c))).filter(|(_, c)| !c.is_zero()).collect()
    }

    #[test]
    fn small_kernel() {
        // x0 + x1 + x2 = 0, x1 - x2 = 0
        let rows = vec![row(&[(0, 1), (1, 1), (2, 1)]), row(&[(1, 1), (2, -1)])];
        let k = nullspace(&rows, 3);
        assert_eq!(k, vec![vec![q(-2), q(1), q(1)]]);
    }

    #[test]
    fn rational_entries() {
        let mut r = SparseRow::new();
        r.insert(0, qr(1, 3));
        r.insert(1, qr(-1, 2));
        let k = nullspace(&[r], 2);
        assert_eq!(k, vec![vec![qr(3, 2), q(1)]]);
    }

    #[test]
    fn empty_and_full_rank() {
        assert_eq!(nullspace(&[], 2).len(), 2);
        let rows = vec![row(&[(0, 1)]), row(&[(1, 2)])];
        assert!(nullspace(&rows, 2).is_empty());
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(
            entries in proptest::collection::vec(
                proptest::collection::vec((0usize..6, -4i64..5), 0..5), 0..6)
        ) {
            let rows: Vec<SparseRow> = entries.iter().map(|r| {
                let mut out = SparseRow::new();
                for &(k, c) in r {
                    out.insert(k, q(c));
                }
                out.retain(|_, c| !c.is_zero());
                out
            }).collect();
            let mut red = RowReducer::new(6);
            for r in &rows {
                red.insert(r);
            }
            let k = red.kernel();
            prop_assert_eq!(k.len() + red.rank(), 6);
            for v in &k {
                for r in &rows {
                    prop_assert!(row_dot(r, v).is_zero());
                }
            }
        }
    }
}
