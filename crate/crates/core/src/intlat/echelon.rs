//! Incremental fraction-free row echelon form over the integers.
//!
//! Rows are kept with strictly increasing leading columns and positive
//! leading entries. [`Echelon::finish`] reduces every entry sitting in a
//! pivot column of a later row into `[0, pivot)`, which makes the result the
//! unique Hermite normal form of the row span.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::sparse::SparseVec;

#[derive(Clone, Debug, Default)]
pub(crate) struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon {
            rows: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, mut v: SparseVec) {
        loop {
            let (p, a) = match v.lead() {
                None => return,
                Some((p, a)) => (p, a.clone()),
            };
            let row = match self.rows.get_mut(&p) {
                None => {
                    if a.is_negative() {
                        v = v.neg();
                    }
                    self.size_reduce(&mut v, p);
                    self.rows.insert(p, v);
                    return;
                }
                Some(row) => row,
            };
            let b = row.lead().expect("stored rows are nonzero").1.clone();
            if a.is_multiple_of(&b) {
                let q = -(&a / &b);
                v.add_scaled(&q, row);
                continue;
            }
            // Unimodular 2x2 step: the row takes the gcd as pivot and `v`
            // loses its entry in column `p`.
            let eg = b.extended_gcd(&a);
            let g = eg.gcd;
            let new_row = SparseVec::combine(&eg.x, row, &eg.y, &v);
            let new_v = SparseVec::combine(&(&b / &g), &v, &-(&a / &g), row);
            let mut new_row = if new_row.lead().is_some_and(|(_, l)| l.is_negative()) {
                new_row.neg()
            } else {
                new_row
            };
            self.size_reduce(&mut new_row, p);
            self.rows.insert(p, new_row);
            v = new_v;
        }
    }

    /// Reduces the entries of `v` right of column `p` that sit in pivot
    /// columns into `[0, pivot)`. Keeps coefficients from growing while
    /// rows are inserted.
    fn size_reduce(&self, v: &mut SparseVec, p: usize) {
        let mut from = p + 1;
        loop {
            let next = v.entries().iter().find(|(c, x)| {
                *c >= from
                    && self.rows.get(c).is_some_and(|r| {
                        let l = r.lead().expect("stored rows are nonzero").1;
                        x.is_negative() || x >= l
                    })
            });
            let Some((c, x)) = next.map(|(c, x)| (*c, x.clone())) else {
                return;
            };
            let row = &self.rows[&c];
            let q = x.div_floor(row.lead().expect("stored rows are nonzero").1);
            v.add_scaled(&-q, row);
            from = c + 1;
        }
    }

    /// Hermite-reduced rows sorted by pivot column.
    pub fn finish(self) -> Vec<SparseVec> {
        let mut rows: Vec<SparseVec> = self.rows.into_values().collect();
        hermite_reduce(&mut rows);
        rows
    }
}

/// Reduces, for every row `j`, the entries of earlier rows in column
/// `pivot(j)` into `[0, lead(j))`. Rows must already be in echelon form.
pub(crate) fn hermite_reduce(rows: &mut [SparseVec]) {
    let n = rows.len();
    for j in 1..n {
        let (pj, lead) = {
            let (p, l) = rows[j].lead().expect("nonzero row");
            (p, l.clone())
        };
        let (head, tail) = rows.split_at_mut(j);
        let pivot_row = &tail[0];
        for row in head.iter_mut() {
            let e = row.get(pj);
            if e.is_zero() {
                continue;
            }
            let q = e.div_floor(&lead);
            if !q.is_zero() {
                row.add_scaled(&-q, pivot_row);
            }
        }
    }
}

/// Row-echelonizes `gens` and returns the Hermite-reduced basis.
pub(crate) fn hnf_rows<I>(gens: I) -> Vec<SparseVec>
where
    I: IntoIterator<Item = SparseVec>,
{
    let mut e = Echelon::new();
    for g in gens {
        e.insert(g);
    }
    e.finish()
}

/// Splits an echelon basis of vectors in `Z^(primary + aux)` into the rows
/// leading in the primary block and the rows supported only on the auxiliary
/// block. The latter are returned shifted into `Z^aux`.
pub(crate) fn split_rows(rows: Vec<SparseVec>, primary: usize) -> (Vec<SparseVec>, Vec<SparseVec>) {
    let mut head = Vec::new();
    let mut tail = Vec::new();
    for r in rows {
        if r.lead().is_some_and(|(p, _)| p < primary) {
            head.push(r);
        } else {
            tail.push(r.window(primary, usize::MAX));
        }
    }
    (head, tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_step_produces_positive_pivot() {
        let rows = hnf_rows([SparseVec::from_i64(&[4, 0]), SparseVec::from_i64(&[6, 2])]);
        assert_eq!(
            rows,
            vec![SparseVec::from_i64(&[2, 2]), SparseVec::from_i64(&[0, 4])]
        );
    }

    #[test]
    fn negative_input_is_normalized() {
        let rows = hnf_rows([SparseVec::from_i64(&[-3, 1])]);
        assert_eq!(rows, vec![SparseVec::from_i64(&[3, -1])]);
    }
}
