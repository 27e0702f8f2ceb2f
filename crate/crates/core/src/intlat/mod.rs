//! Exact integer linear algebra: Hermite and Smith normal forms, lattice
//! membership, sums, intersections, preimages, saturation and the abelian
//! invariants of lattice quotients.
//!
//! A [`Lattice`] is a subgroup of `Z^N` stored as its Hermite normal form:
//! basis vectors are kept as rows in echelon form with positive pivots, and
//! entries above each pivot are reduced into `[0, pivot)`. Two lattices are
//! equal exactly when their stored bases are identical, so `==` is lattice
//! equality.

mod echelon;
mod snf;
mod sparse;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use snf::{snf, SnfResult};
pub use sparse::SparseVec;

use echelon::{hnf_rows, split_rows};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("ambient rank mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("sublattice is not contained in the lattice (basis vector {index} fails)")]
    NotSubset { index: usize },
}

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let mut m = IntMat::zeros(rows.len(), cols);
        for (i, r) in rows.into_iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, v) in r.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
            cols,
        )
    }

    /// Matrix whose columns are the given sparse vectors of `Z^rows`.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = IntMat::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, v) in c.entries() {
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    /// Matrix whose rows are the given sparse vectors of `Z^cols`.
    pub fn from_sparse_rows(cols: usize, rows: &[SparseVec]) -> Self {
        let mut m = IntMat::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.entries() {
                m.set(i, *j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> SparseVec {
        SparseVec::from_dense(&self.data[i * self.cols..(i + 1) * self.cols])
    }

    pub fn column(&self, j: usize) -> SparseVec {
        SparseVec::from_pairs((0..self.rows).map(|i| (i, self.get(i, j).clone())))
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// `M * v` for a column vector `v` of `Z^cols`.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        SparseVec::from_pairs((0..self.rows).map(|i| {
            let mut acc = BigInt::zero();
            for (j, x) in v.entries() {
                acc += self.get(i, *j) * x;
            }
            (i, acc)
        }))
    }

    /// Row vector times matrix: `v * M` for `v` in `Z^rows`.
    pub fn apply_left(&self, v: &SparseVec) -> SparseVec {
        let mut acc = vec![BigInt::zero(); self.cols];
        for (i, x) in v.entries() {
            for (j, a) in acc.iter_mut().enumerate() {
                let m = self.get(*i, j);
                if !m.is_zero() {
                    *a += x * m;
                }
            }
        }
        SparseVec::from_dense(&acc)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub(crate) fn add_row_multiple(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let add = s * f;
                self.data[dst * self.cols + j] += add;
            }
        }
    }

    pub(crate) fn add_col_multiple(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let add = s * f;
                self.data[i * self.cols + dst] += add;
            }
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = -v;
        }
    }
}

/// Hermite normal form of the column span of a matrix, with the
/// certificate expressing each basis vector in terms of the input columns.
#[derive(Clone, Debug)]
pub struct HnfResult {
    pub lattice: Lattice,
    /// `transform[i]` holds coefficients `c` with `basis[i] = sum_j c_j * column_j`.
    pub transform: Vec<SparseVec>,
    /// Integer kernel of the matrix (relations among the columns).
    pub kernel: Lattice,
}

/// Subgroup of `Z^N` in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    ambient: usize,
    basis: Vec<SparseVec>,
}

impl Lattice {
    pub fn zero(ambient: usize) -> Self {
        Lattice {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Lattice {
            ambient,
            basis: (0..ambient).map(SparseVec::unit).collect(),
        }
    }

    /// Lattice spanned by the coordinate vectors `e_i` for `i` in `indices`.
    pub fn coordinate(ambient: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        Lattice::from_generators(ambient, indices.into_iter().map(SparseVec::unit))
    }

    pub fn from_generators<I>(ambient: usize, gens: I) -> Self
    where
        I: IntoIterator<Item = SparseVec>,
    {
        let basis = hnf_rows(gens.into_iter().inspect(|g| {
            assert!(
                g.max_index().is_none_or(|i| i < ambient),
                "generator outside ambient rank {ambient}"
            )
        }));
        Lattice { ambient, basis }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.basis.iter().map(|b| b.lead().unwrap().0)
    }

    /// Basis as dense rows.
    pub fn basis_matrix(&self) -> IntMat {
        IntMat::from_sparse_rows(self.ambient, &self.basis)
    }

    /// Index of `self` in `Z^N` when full rank (product of pivots), else `None`.
    pub fn index_in_ambient(&self) -> Option<BigInt> {
        if self.rank() != self.ambient {
            return None;
        }
        Some(
            self.basis
                .iter()
                .map(|b| b.lead().unwrap().1.clone())
                .product(),
        )
    }

    /// Coordinates of `v` in the stored basis, or `None` when `v` is not in
    /// the lattice.
    pub fn member(&self, v: &SparseVec) -> Option<Vec<BigInt>> {
        if v.max_index().is_some_and(|i| i >= self.ambient) {
            return None;
        }
        let mut coords = vec![BigInt::zero(); self.rank()];
        let mut v = v.clone();
        while let Some((p, a)) = v.lead() {
            let idx = self
                .basis
                .binary_search_by_key(&p, |b| b.lead().unwrap().0)
                .ok()?;
            let row = &self.basis[idx];
            let lead = row.lead().unwrap().1;
            if !a.is_multiple_of(lead) {
                return None;
            }
            let c = a / lead;
            v.add_scaled(&-&c, row);
            coords[idx] = c;
        }
        Some(coords)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.member(v).is_some()
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    /// Canonical coset representative of `v` modulo the lattice.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        for row in &self.basis {
            let (p, lead) = row.lead().unwrap();
            let e = v.get(p);
            if e.is_zero() {
                continue;
            }
            let q = e.div_floor(lead);
            if !q.is_zero() {
                v.add_scaled(&-q, row);
            }
        }
        v
    }

    pub fn scale(&self, k: &BigInt) -> Lattice {
        Lattice::from_generators(self.ambient, self.basis.iter().map(|b| b.scale(k)))
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice, LatticeError> {
        self.check_ambient(other)?;
        Ok(Lattice::from_generators(
            self.ambient,
            self.basis.iter().chain(other.basis.iter()).cloned(),
        ))
    }

    /// `self + span(gens)`.
    pub fn extended<I>(&self, gens: I) -> Lattice
    where
        I: IntoIterator<Item = SparseVec>,
    {
        Lattice::from_generators(self.ambient, self.basis.iter().cloned().chain(gens))
    }

    pub fn intersect(&self, other: &Lattice) -> Result<Lattice, LatticeError> {
        self.check_ambient(other)?;
        let n = self.ambient;
        let gens = self
            .basis
            .iter()
            .map(|a| a.concat(n, a))
            .chain(other.basis.iter().cloned());
        let (_, kernel) = split_rows(hnf_rows(gens), n);
        Ok(Lattice::from_generators(n, kernel))
    }

    /// `{v : n*v in self for some n != 0}`.
    pub fn saturate(&self) -> Lattice {
        let orth = kernel(&self.basis_matrix());
        kernel(&orth.basis_matrix())
    }

    pub fn is_saturated(&self) -> bool {
        self.saturate() == *self
    }

    fn check_ambient(&self, other: &Lattice) -> Result<(), LatticeError> {
        if self.ambient != other.ambient {
            return Err(LatticeError::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lattice of rank {} in Z^{}", self.rank(), self.ambient)?;
        for b in &self.basis {
            writeln!(f, "  {b}")?;
        }
        Ok(())
    }
}

/// Hermite normal form of the column span of `m`.
pub fn hnf(m: &IntMat) -> HnfResult {
    let n = m.rows();
    let k = m.cols();
    let gens = (0..k).map(|j| m.column(j).concat(n, &SparseVec::unit(j)));
    let (head, tail) = split_rows(hnf_rows(gens), n);
    let mut basis = Vec::with_capacity(head.len());
    let mut transform = Vec::with_capacity(head.len());
    for row in head {
        basis.push(row.window(0, n));
        transform.push(row.window(n, n + k));
    }
    HnfResult {
        lattice: Lattice { ambient: n, basis },
        transform,
        kernel: Lattice::from_generators(k, tail),
    }
}

/// `{v in Z^cols : m * v = 0}`.
pub fn kernel(m: &IntMat) -> Lattice {
    let n = m.rows();
    let gens = (0..m.cols()).map(|j| m.column(j).concat(n, &SparseVec::unit(j)));
    let (_, tail) = split_rows(hnf_rows(gens), n);
    Lattice::from_generators(m.cols(), tail)
}

/// `{v in Z^k : m * v in target}` for `m : Z^k -> Z^N`.
pub fn preimage(m: &IntMat, target: &Lattice) -> Result<Lattice, LatticeError> {
    if m.rows() != target.ambient_rank() {
        return Err(LatticeError::AmbientMismatch {
            left: m.rows(),
            right: target.ambient_rank(),
        });
    }
    Ok(preimage_of_columns(
        target.ambient_rank(),
        m.cols(),
        |j| m.column(j),
        target,
    ))
}

/// Preimage for a map given by its columns; avoids materializing a dense
/// matrix when the columns are sparse.
pub fn preimage_of_columns<F>(n: usize, k: usize, column: F, target: &Lattice) -> Lattice
where
    F: Fn(usize) -> SparseVec,
{
    assert_eq!(n, target.ambient_rank());
    let gens = (0..k)
        .map(|j| column(j).concat(n, &SparseVec::unit(j)))
        .chain(target.basis.iter().cloned());
    let (_, tail) = split_rows(hnf_rows(gens), n);
    Lattice::from_generators(k, tail)
}

/// Image of a lattice under a linear map given column-wise.
pub fn image_of<F>(n: usize, source: &Lattice, map: F) -> Lattice
where
    F: Fn(&SparseVec) -> SparseVec,
{
    Lattice::from_generators(n, source.basis.iter().map(map))
}

/// Finitely generated abelian group `Z^free_rank + Z/d_1 + ... + Z/d_k`
/// with `d_1 | d_2 | ... | d_k` and every `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AbelianInvariants {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    pub fn trivial() -> Self {
        AbelianInvariants::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianInvariants {
            torsion: Vec::new(),
            free_rank: rank,
        }
    }

    /// Builds invariants from the diagonal of a Smith form, dropping units
    /// and turning zeros into free summands.
    pub fn from_divisors<'a, I>(divisors: I, extra_free: usize) -> Self
    where
        I: IntoIterator<Item = &'a BigInt>,
    {
        let mut torsion = Vec::new();
        let mut free_rank = extra_free;
        for d in divisors {
            if d.is_zero() {
                free_rank += 1;
            } else if !d.abs().is_one() {
                torsion.push(d.abs());
            }
        }
        torsion.sort();
        AbelianInvariants { torsion, free_rank }
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Number of cyclic summands.
    pub fn summands(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    /// Group order, `None` if infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    /// Least common exponent of the torsion part.
    pub fn exponent(&self) -> BigInt {
        self.torsion.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn is_divisibility_chain(&self) -> bool {
        self.torsion.iter().all(|d| *d >= BigInt::from(2))
            && self.torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]))
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = self.torsion.len();
        while i > 0 {
            let d = &self.torsion[i - 1];
            let mut j = i - 1;
            while j > 0 && self.torsion[j - 1] == *d {
                j -= 1;
            }
            let mult = i - j;
            if mult == 1 {
                parts.push(format!("Z/{d}"));
            } else {
                parts.push(format!("(Z/{d})^{mult}"));
            }
            i = j;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Presentation of `A/B` for lattices `B <= A`, with explicit generators
/// and a coordinate map.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub invariants: AbelianInvariants,
    /// Order of each retained generator; zero marks a free generator.
    pub orders: Vec<BigInt>,
    /// Retained generators of `A/B` as vectors in the ambient space.
    pub generators: Vec<SparseVec>,
    outer: Lattice,
    q: IntMat,
    keep: Vec<usize>,
}

impl QuotientMap {
    pub fn new(outer: &Lattice, inner: &Lattice) -> Result<Self, LatticeError> {
        outer.check_ambient(inner)?;
        let ra = outer.rank();
        let mut coord_rows = Vec::with_capacity(inner.rank());
        for (index, b) in inner.basis.iter().enumerate() {
            let c = outer.member(b).ok_or(LatticeError::NotSubset { index })?;
            coord_rows.push(c);
        }
        let c = IntMat::from_rows(coord_rows, ra);
        let s = snf(&c);
        let mut orders = Vec::new();
        let mut keep = Vec::new();
        let mut generators = Vec::new();
        for i in 0..ra {
            let d = s.divisors.get(i).cloned().unwrap_or_else(BigInt::zero);
            if d.is_one() {
                continue;
            }
            let row = s.q_inv.row(i);
            let mut g = SparseVec::new();
            for (j, x) in row.entries() {
                g.add_scaled(x, &outer.basis[*j]);
            }
            keep.push(i);
            orders.push(d);
            generators.push(g);
        }
        let invariants = AbelianInvariants::from_divisors(orders.iter(), 0);
        Ok(QuotientMap {
            invariants,
            orders,
            generators,
            outer: outer.clone(),
            q: s.q,
            keep,
        })
    }

    /// Coordinates of the class of `v` with respect to [`Self::generators`];
    /// torsion coordinates are reduced into `[0, order)`. `None` when `v`
    /// is outside the outer lattice.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<BigInt>> {
        let a = self.outer.member(v)?;
        let y = self.q.apply_left(&SparseVec::from_dense(&a));
        Some(
            self.keep
                .iter()
                .zip(&self.orders)
                .map(|(&i, d)| {
                    let x = y.get(i);
                    if d.is_zero() {
                        x
                    } else {
                        x.mod_floor(d)
                    }
                })
                .collect(),
        )
    }

    pub fn is_zero(&self, v: &SparseVec) -> Option<bool> {
        self.coordinates(v).map(|c| c.iter().all(|x| x.is_zero()))
    }
}

/// Abelian invariants of `outer / inner`.
pub fn quotient_invariants(
    outer: &Lattice,
    inner: &Lattice,
) -> Result<AbelianInvariants, LatticeError> {
    QuotientMap::new(outer, inner).map(|q| q.invariants)
}
