use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Sparse integer vector with entries sorted by index and no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVec {
    entries: Vec<(usize, BigInt)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec {
            entries: Vec::new(),
        }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec {
            entries: vec![(i, BigInt::one())],
        }
    }

    /// Builds a vector from arbitrary `(index, value)` pairs, summing duplicates.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, BigInt)>,
    {
        let mut raw: Vec<(usize, BigInt)> = pairs.into_iter().collect();
        raw.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, BigInt)> = Vec::with_capacity(raw.len());
        for (i, v) in raw {
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w += v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        SparseVec { entries }
    }

    pub fn from_dense(values: &[BigInt]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn from_i64(values: &[i64]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0)
                .map(|(i, v)| (i, BigInt::from(*v)))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn entries(&self) -> &[(usize, BigInt)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, BigInt)> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn lead(&self) -> Option<(usize, &BigInt)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn get(&self, i: usize) -> BigInt {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * k)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, -v)).collect(),
        }
    }

    /// `a*x + b*y`.
    pub fn combine(a: &BigInt, x: &SparseVec, b: &BigInt, y: &SparseVec) -> SparseVec {
        let mut entries = Vec::with_capacity(x.entries.len() + y.entries.len());
        let (mut p, mut q) = (0, 0);
        let xs = &x.entries;
        let ys = &y.entries;
        while p < xs.len() || q < ys.len() {
            let take_x = q >= ys.len() || (p < xs.len() && xs[p].0 < ys[q].0);
            let take_y = p >= xs.len() || (q < ys.len() && ys[q].0 < xs[p].0);
            if take_x {
                if !a.is_zero() {
                    entries.push((xs[p].0, a * &xs[p].1));
                }
                p += 1;
            } else if take_y {
                if !b.is_zero() {
                    entries.push((ys[q].0, b * &ys[q].1));
                }
                q += 1;
            } else {
                let v = a * &xs[p].1 + b * &ys[q].1;
                if !v.is_zero() {
                    entries.push((xs[p].0, v));
                }
                p += 1;
                q += 1;
            }
        }
        SparseVec { entries }
    }

    /// `self += k * other`.
    pub fn add_scaled(&mut self, k: &BigInt, other: &SparseVec) {
        if k.is_zero() || other.is_zero() {
            return;
        }
        *self = SparseVec::combine(&BigInt::one(), self, k, other);
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        SparseVec::combine(&BigInt::one(), self, &BigInt::one(), other)
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        SparseVec::combine(&BigInt::one(), self, &-BigInt::one(), other)
    }

    /// Keeps the entries with index in `[lo, hi)` and shifts them down by `lo`.
    pub fn window(&self, lo: usize, hi: usize) -> SparseVec {
        SparseVec {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| *i >= lo && *i < hi)
                .map(|(i, v)| (i - lo, v.clone()))
                .collect(),
        }
    }

    /// Shifts every index up by `by`.
    pub fn shifted(&self, by: usize) -> SparseVec {
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(i, v)| (i + by, v.clone()))
                .collect(),
        }
    }

    /// Concatenation `(self, other)` where `self` occupies `[0, width)`.
    pub fn concat(&self, width: usize, other: &SparseVec) -> SparseVec {
        debug_assert!(self.max_index().is_none_or(|i| i < width));
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|(i, v)| (i + width, v.clone())));
        SparseVec { entries }
    }

    pub fn max_abs(&self) -> BigInt {
        self.entries
            .iter()
            .map(|(_, v)| v.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl fmt::Display for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (i, v)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}: {v}")?;
        }
        write!(f, "}}")
    }
}
