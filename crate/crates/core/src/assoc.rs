//! Truncated free associative ring `Z<x_1..x_m> / varpi^(D+1)`.
//!
//! Since the enveloping algebra of a free Lie ring is the free associative
//! ring, this is where `U(F)`, powers of the augmentation ideal `varpi` and
//! two-sided ideals live. Coordinates are the nonempty words of length at
//! most `D`, enumerated by length and then lexicographically; the unit is not
//! a coordinate.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::hall::{FreeLieContext, LieVec, Shape};
use crate::intlat::{Lattice, SparseVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssocError {
    #[error("generator count mismatch: Lie ring has {lie}, associative ring has {assoc}")]
    GeneratorMismatch { lie: usize, assoc: usize },
    #[error("Lie cap {lie} exceeds associative cap {assoc}")]
    CapTooSmall { lie: usize, assoc: usize },
    #[error("omega power {n} outside 1..={max}")]
    BadPower { n: usize, max: usize },
}

/// Word as 0-based letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

/// Element of the truncated associative ring, keyed by word index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AssocVec {
    cap: usize,
    coeffs: BTreeMap<usize, BigInt>,
}

impl AssocVec {
    pub fn zero(cap: usize) -> Self {
        AssocVec {
            cap,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn coeff(&self, idx: usize) -> BigInt {
        self.coeffs.get(&idx).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, idx: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(idx).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&idx);
        }
    }

    pub fn add_scaled(&mut self, k: &BigInt, other: &AssocVec) {
        for (i, c) in &other.coeffs {
            self.add_term(*i, &(k * c));
        }
    }

    pub fn sub(&self, other: &AssocVec) -> AssocVec {
        let mut out = self.clone();
        out.add_scaled(&-BigInt::one(), other);
        out
    }

    pub fn to_sparse(&self) -> SparseVec {
        SparseVec::from_pairs(self.coeffs.iter().map(|(i, c)| (*i, c.clone())))
    }
}

#[derive(Clone, Debug)]
pub struct AssocContext {
    m: usize,
    cap: usize,
    /// `offsets[d]` is the index of the first word of length `d`, for
    /// `d in 1..=cap+1`; `offsets[0]` is unused.
    offsets: Vec<usize>,
    /// `powers[k] = m^k`.
    powers: Vec<usize>,
}

impl AssocContext {
    pub fn new(m: usize, cap: usize) -> Self {
        assert!(
            m >= 1 && cap >= 1,
            "associative context needs m >= 1 and cap >= 1"
        );
        let mut powers = vec![1usize];
        for _ in 0..=cap {
            powers.push(powers.last().unwrap() * m);
        }
        let mut offsets = vec![0, 0];
        for d in 1..=cap {
            offsets.push(offsets[d] + powers[d]);
        }
        AssocContext {
            m,
            cap,
            offsets,
            powers,
        }
    }

    pub fn num_generators(&self) -> usize {
        self.m
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Number of word coordinates (all words of length `1..=cap`).
    pub fn dim(&self) -> usize {
        self.offsets[self.cap + 1]
    }

    pub fn words_of_degree(&self, d: usize) -> usize {
        self.powers[d]
    }

    pub fn degree_of(&self, idx: usize) -> usize {
        (1..=self.cap)
            .find(|&d| idx < self.offsets[d + 1])
            .expect("word index in range")
    }

    fn split(&self, idx: usize) -> (usize, usize) {
        let d = self.degree_of(idx);
        (d, idx - self.offsets[d])
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        let d = w.degree();
        if d == 0 || d > self.cap || w.0.iter().any(|&l| l >= self.m) {
            return None;
        }
        let code = w.0.iter().fold(0, |acc, &l| acc * self.m + l);
        Some(self.offsets[d] + code)
    }

    pub fn word(&self, idx: usize) -> Word {
        let (d, mut code) = self.split(idx);
        let mut letters = vec![0; d];
        for slot in letters.iter_mut().rev() {
            *slot = code % self.m;
            code /= self.m;
        }
        Word(letters)
    }

    pub fn zero(&self) -> AssocVec {
        AssocVec::zero(self.cap)
    }

    pub fn letter(&self, i: usize) -> AssocVec {
        self.monomial(&Word(vec![i]))
    }

    pub fn monomial(&self, w: &Word) -> AssocVec {
        let mut v = self.zero();
        if let Some(i) = self.index_of(w) {
            v.add_term(i, &BigInt::one());
        }
        v
    }

    pub fn from_sparse(&self, v: &SparseVec) -> AssocVec {
        AssocVec {
            cap: self.cap,
            coeffs: v.entries().iter().cloned().collect(),
        }
    }

    /// Index of the concatenation of two words given as (degree, code),
    /// or `None` when it exceeds the cap. Degree 0 is the empty word.
    fn concat(&self, a: (usize, usize), b: (usize, usize)) -> Option<usize> {
        let d = a.0 + b.0;
        if d == 0 || d > self.cap {
            return None;
        }
        Some(self.offsets[d] + a.1 * self.powers[b.0] + b.1)
    }

    /// Concatenation product, truncated above the cap.
    pub fn mul(&self, a: &AssocVec, b: &AssocVec) -> AssocVec {
        let mut out = self.zero();
        for (i, ca) in &a.coeffs {
            let wa = self.split(*i);
            for (j, cb) in &b.coeffs {
                let wb = self.split(*j);
                if let Some(k) = self.concat(wa, wb) {
                    out.add_term(k, &(ca * cb));
                }
            }
        }
        out
    }

    /// `u * g * v` for words `u`, `v` given as (degree, code).
    fn sandwich(&self, u: (usize, usize), g: &AssocVec, v: (usize, usize)) -> SparseVec {
        SparseVec::from_pairs(g.coeffs.iter().filter_map(|(i, c)| {
            let w = self.split(*i);
            let uw = (u.0 + w.0, u.1 * self.powers[w.0] + w.1);
            self.concat(uw, v).map(|k| (k, c.clone()))
        }))
    }

    /// The natural map from the free Lie ring: generators go to letters and
    /// `[u, v]` goes to `uv - vu`.
    pub fn iota(&self, a: &LieVec, lie: &FreeLieContext) -> Result<AssocVec, AssocError> {
        let table = self.iota_basis(lie)?;
        let mut out = self.zero();
        for (id, c) in a.terms() {
            out.add_scaled(c, &table[id]);
        }
        Ok(out)
    }

    /// Images of every Hall basis element under `iota`, indexed by id.
    pub fn iota_basis(&self, lie: &FreeLieContext) -> Result<Vec<AssocVec>, AssocError> {
        if lie.num_generators() != self.m {
            return Err(AssocError::GeneratorMismatch {
                lie: lie.num_generators(),
                assoc: self.m,
            });
        }
        if lie.cap() > self.cap {
            return Err(AssocError::CapTooSmall {
                lie: lie.cap(),
                assoc: self.cap,
            });
        }
        self.iota_basis_truncated(lie)
    }

    /// Like [`Self::iota_basis`] but with no cap restriction: images of
    /// Hall elements longer than the associative cap are zero.
    pub fn iota_basis_truncated(&self, lie: &FreeLieContext) -> Result<Vec<AssocVec>, AssocError> {
        if lie.num_generators() != self.m {
            return Err(AssocError::GeneratorMismatch {
                lie: lie.num_generators(),
                assoc: self.m,
            });
        }
        let mut table: Vec<AssocVec> = Vec::with_capacity(lie.rank());
        for h in lie.basis() {
            let v = match h.shape {
                Shape::Leaf(i) => self.letter(i),
                Shape::Node(u, w) => {
                    let a = &table[u];
                    let b = &table[w];
                    self.mul(a, b).sub(&self.mul(b, a))
                }
            };
            table.push(v);
        }
        Ok(table)
    }

    /// Lattice spanned by all words of length `>= n`, i.e. `varpi^n` modulo
    /// `varpi^(cap+1)`.
    pub fn omega_power_lattice(&self, n: usize) -> Result<Lattice, AssocError> {
        if n == 0 || n > self.cap + 1 {
            return Err(AssocError::BadPower {
                n,
                max: self.cap + 1,
            });
        }
        Ok(Lattice::coordinate(self.dim(), self.offsets[n]..self.dim()))
    }

    /// Two-sided ideal generated by `gens`, modulo `varpi^(cap+1)`.
    pub fn ideal_span(&self, gens: &[AssocVec]) -> Lattice {
        self.ideal_span_from(gens, 0)
    }

    /// Span of `u * g * v` over words `u` of length `>= left_min` and all
    /// words `v` (the empty word included).
    pub fn ideal_span_from(&self, gens: &[AssocVec], left_min: usize) -> Lattice {
        let mut products = Vec::new();
        for g in gens {
            let Some(dmin) = g.coeffs.keys().next().map(|&i| self.degree_of(i)) else {
                continue;
            };
            if dmin + left_min > self.cap {
                continue;
            }
            let room = self.cap - dmin;
            for du in left_min..=room {
                for cu in 0..self.powers[du] {
                    for dv in 0..=(room - du) {
                        for cv in 0..self.powers[dv] {
                            let p = self.sandwich((du, cu), g, (dv, cv));
                            if !p.is_zero() {
                                products.push(p);
                            }
                        }
                    }
                }
            }
        }
        Lattice::from_generators(self.dim(), products)
    }

    /// `varpi * J + J * varpi` for a two-sided ideal `J` given by its
    /// lattice.
    pub fn omega_sides(&self, ideal: &Lattice) -> Lattice {
        let mut products = Vec::new();
        for b in ideal.basis() {
            let bv = self.from_sparse(b);
            for i in 0..self.m {
                let x = self.letter(i);
                for p in [self.mul(&x, &bv), self.mul(&bv, &x)] {
                    if !p.is_zero() {
                        products.push(p.to_sparse());
                    }
                }
            }
        }
        Lattice::from_generators(self.dim(), products)
    }

    /// `r(0) = U(F) R U(F)`, `r(k+1) = varpi r(k) + r(k) varpi`.
    pub fn r_n_lattice(&self, gens: &[AssocVec], n: usize) -> Lattice {
        let mut r = self.ideal_span(gens);
        for _ in 0..n {
            if r.is_zero() {
                break;
            }
            r = self.omega_sides(&r);
        }
        r
    }

    pub fn format(&self, v: &AssocVec, names: &[String]) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (i, c)) in v.coeffs.iter().enumerate() {
            let w = self.word(*i);
            let body: Vec<&str> = w.0.iter().map(|&l| names[l].as_str()).collect();
            let body = body.join("*");
            if k > 0 {
                s.push_str(if c.is_negative() { " - " } else { " + " });
            } else if c.is_negative() {
                s.push('-');
            }
            if c.abs().is_one() {
                s.push_str(&body);
            } else {
                s.push_str(&format!("{}*{}", c.abs(), body));
            }
        }
        s
    }
}

impl fmt::Display for AssocContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "free associative ring on {} letters mod words of length > {}",
            self.m, self.cap
        )
    }
}
