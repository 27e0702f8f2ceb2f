//! Free Lie rings over the integers, truncated at a degree cap, in a Hall
//! basis.
//!
//! Basis elements are ordered by degree and then recursively: leaves by
//! generator index, nodes `[u, v]` lexicographically by `(u, v)`. With that
//! order a node `[u, v]` is a basis element when `u > v` and, if
//! `u = [u1, u2]`, also `u2 <= v`. Dense ids follow the order, so comparing
//! ids compares basis elements.
//!
//! Everything is computed modulo `gamma_{cap+1}`: brackets whose degree
//! exceeds the cap vanish.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::intlat::SparseVec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HallError {
    #[error("a free Lie ring needs at least one generator")]
    NoGenerators,
    #[error("degree cap must be at least 1")]
    ZeroCap,
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("element built for cap {found} used in a context with cap {expected}")]
    ContextMismatch { expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    /// 1-based.
    pub index: usize,
    pub name: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// 0-based generator index.
    Leaf(usize),
    /// Ids of the left and right factors.
    Node(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallElement {
    pub id: usize,
    pub degree: usize,
    pub shape: Shape,
}

/// Integer combination of Hall basis elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieVec {
    cap: usize,
    coeffs: BTreeMap<usize, BigInt>,
}

impl LieVec {
    pub fn zero(cap: usize) -> Self {
        LieVec {
            cap,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(cap: usize, id: usize) -> Self {
        let mut v = LieVec::zero(cap);
        v.coeffs.insert(id, BigInt::one());
        v
    }

    pub fn from_sparse(cap: usize, v: &SparseVec) -> Self {
        LieVec {
            cap,
            coeffs: v.entries().iter().cloned().collect(),
        }
    }

    pub fn to_sparse(&self) -> SparseVec {
        SparseVec::from_pairs(self.coeffs.iter().map(|(i, c)| (*i, c.clone())))
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, id: usize) -> BigInt {
        self.coeffs.get(&id).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    /// Number of nonzero coefficients.
    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add_term(&mut self, id: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(id).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&id);
        }
    }

    /// `self += k * other`
    pub fn add_scaled(&mut self, k: &BigInt, other: &LieVec) {
        debug_assert_eq!(self.cap, other.cap);
        if k.is_zero() {
            return;
        }
        for (id, c) in &other.coeffs {
            self.add_term(*id, &(k * c));
        }
    }

    pub fn scale(&self, k: &BigInt) -> LieVec {
        let mut out = LieVec::zero(self.cap);
        out.add_scaled(k, self);
        out
    }

    pub fn neg(&self) -> LieVec {
        self.scale(&-BigInt::one())
    }

    pub fn add(&self, other: &LieVec) -> LieVec {
        let mut out = self.clone();
        out.add_scaled(&BigInt::one(), other);
        out
    }

    pub fn sub(&self, other: &LieVec) -> LieVec {
        let mut out = self.clone();
        out.add_scaled(&-BigInt::one(), other);
        out
    }
}

type Memo = HashMap<(usize, usize), Arc<LieVec>>;

/// Free Lie ring on `m` generators modulo `gamma_{cap+1}`.
#[derive(Debug)]
pub struct FreeLieContext {
    generators: Vec<Generator>,
    cap: usize,
    basis: Vec<HallElement>,
    node_ids: HashMap<(usize, usize), usize>,
    degree_start: Vec<usize>,
    memo: RwLock<Memo>,
}

impl FreeLieContext {
    /// Hall basis on generators named `x1..xm`.
    pub fn new(m: usize, cap: usize) -> Result<Self, HallError> {
        let names = (1..=m).map(|i| format!("x{i}")).collect();
        FreeLieContext::with_names(names, cap)
    }

    pub fn with_names(names: Vec<String>, cap: usize) -> Result<Self, HallError> {
        if names.is_empty() {
            return Err(HallError::NoGenerators);
        }
        if cap == 0 {
            return Err(HallError::ZeroCap);
        }
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n.clone()) {
                return Err(HallError::DuplicateName(n.clone()));
            }
        }
        let m = names.len();
        let generators: Vec<Generator> = names
            .into_iter()
            .enumerate()
            .map(|(i, name)| Generator { index: i + 1, name })
            .collect();

        let mut basis: Vec<HallElement> = (0..m)
            .map(|i| HallElement {
                id: i,
                degree: 1,
                shape: Shape::Leaf(i),
            })
            .collect();
        let mut degree_start = vec![0, 0, m];
        let mut node_ids = HashMap::new();
        for d in 2..=cap {
            let mut cands: Vec<(usize, usize)> = Vec::new();
            for du in 1..d {
                let dv = d - du;
                for u in degree_start[du]..degree_start[du + 1] {
                    for v in degree_start[dv]..degree_start[dv + 1] {
                        if u <= v {
                            continue;
                        }
                        if let Shape::Node(_, u2) = basis[u].shape {
                            if u2 > v {
                                continue;
                            }
                        }
                        cands.push((u, v));
                    }
                }
            }
            cands.sort();
            for (u, v) in cands {
                let id = basis.len();
                basis.push(HallElement {
                    id,
                    degree: d,
                    shape: Shape::Node(u, v),
                });
                node_ids.insert((u, v), id);
            }
            degree_start.push(basis.len());
        }

        Ok(FreeLieContext {
            generators,
            cap,
            basis,
            node_ids,
            degree_start,
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Total number of basis elements of degree `<= cap`.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[HallElement] {
        &self.basis
    }

    pub fn element(&self, id: usize) -> &HallElement {
        &self.basis[id]
    }

    pub fn degree(&self, id: usize) -> usize {
        self.basis[id].degree
    }

    /// Ids of the basis elements of degree `d` (empty above the cap).
    pub fn degree_range(&self, d: usize) -> Range<usize> {
        if d == 0 || d > self.cap {
            return self.basis.len()..self.basis.len();
        }
        self.degree_start[d]..self.degree_start[d + 1]
    }

    /// Ids of the basis elements of degree `>= d`.
    pub fn degree_at_least(&self, d: usize) -> Range<usize> {
        let start = if d <= 1 {
            0
        } else {
            self.degree_range(d).start
        };
        start..self.basis.len()
    }

    /// Number of basis elements per degree `1..=cap`.
    pub fn degree_sizes(&self) -> Vec<usize> {
        (1..=self.cap).map(|d| self.degree_range(d).len()).collect()
    }

    pub fn zero(&self) -> LieVec {
        LieVec::zero(self.cap)
    }

    /// The `i`-th generator, 0-based.
    pub fn generator(&self, i: usize) -> LieVec {
        LieVec::basis(self.cap, i)
    }

    pub fn basis_vec(&self, id: usize) -> LieVec {
        LieVec::basis(self.cap, id)
    }

    pub fn from_sparse(&self, v: &SparseVec) -> LieVec {
        LieVec::from_sparse(self.cap, v)
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Id of the node `[u, v]` when it is a basis element.
    pub fn node_id(&self, u: usize, v: usize) -> Option<usize> {
        self.node_ids.get(&(u, v)).copied()
    }

    fn check(&self, v: &LieVec) -> Result<(), HallError> {
        if v.cap != self.cap {
            return Err(HallError::ContextMismatch {
                expected: self.cap,
                found: v.cap,
            });
        }
        Ok(())
    }

    /// Normalized `[a, b]`; components above the cap are dropped.
    pub fn bracket(&self, a: &LieVec, b: &LieVec) -> Result<LieVec, HallError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.bracket_vecs(a, b))
    }

    pub(crate) fn bracket_vecs(&self, a: &LieVec, b: &LieVec) -> LieVec {
        let mut out = self.zero();
        for (i, ca) in &a.coeffs {
            for (j, cb) in &b.coeffs {
                if self.degree(*i) + self.degree(*j) > self.cap {
                    continue;
                }
                let prod = self.bracket_ids(*i, *j);
                out.add_scaled(&(ca * cb), &prod);
            }
        }
        out
    }

    /// `[a, basis(j)]`.
    fn bracket_vec_id(&self, a: &LieVec, j: usize) -> LieVec {
        let mut out = self.zero();
        for (i, ca) in &a.coeffs {
            if self.degree(*i) + self.degree(j) > self.cap {
                continue;
            }
            out.add_scaled(ca, &self.bracket_ids(*i, j));
        }
        out
    }

    /// Normal form of the bracket of two basis elements.
    pub fn bracket_ids(&self, a: usize, b: usize) -> Arc<LieVec> {
        if let Some(v) = self.memo.read().expect("memo lock").get(&(a, b)) {
            return Arc::clone(v);
        }
        let v = Arc::new(self.compute_bracket(a, b));
        self.memo
            .write()
            .expect("memo lock")
            .insert((a, b), Arc::clone(&v));
        v
    }

    fn compute_bracket(&self, a: usize, b: usize) -> LieVec {
        if a == b || self.degree(a) + self.degree(b) > self.cap {
            return self.zero();
        }
        if a < b {
            return self.bracket_ids(b, a).neg();
        }
        match self.basis[a].shape {
            Shape::Node(_, a2) if a2 > b => {
                let Shape::Node(a1, _) = self.basis[a].shape else {
                    unreachable!()
                };
                // [[a1,a2],b] = [[a1,b],a2] - [[a2,b],a1]
                let left = self.bracket_vec_id(&self.bracket_ids(a1, b), a2);
                let right = self.bracket_vec_id(&self.bracket_ids(a2, b), a1);
                left.sub(&right)
            }
            _ => {
                let id = self
                    .node_id(a, b)
                    .expect("Hall node of admissible degree is in the basis");
                self.basis_vec(id)
            }
        }
    }

    /// Left-normed bracket `[x_{i1}, x_{i2}, ..., x_{ir}] = [[x_{i1}, x_{i2}], ...]`
    /// of 0-based generator indices.
    pub fn left_normed(&self, gens: &[usize]) -> LieVec {
        let mut it = gens.iter();
        let Some(&first) = it.next() else {
            return self.zero();
        };
        let mut acc = self.generator(first);
        for &g in it {
            acc = self.bracket_vec_id(&acc, g);
        }
        acc
    }

    /// Image of `v` under the Lie ring endomorphism sending generator `i` to
    /// `images[i]`.
    pub fn substitute(&self, v: &LieVec, images: &[LieVec]) -> LieVec {
        assert_eq!(images.len(), self.num_generators());
        let mut cache: HashMap<usize, LieVec> = HashMap::new();
        let mut out = self.zero();
        for (id, c) in &v.coeffs {
            let img = self.substitute_basis(*id, images, &mut cache);
            out.add_scaled(c, &img);
        }
        out
    }

    fn substitute_basis(
        &self,
        id: usize,
        images: &[LieVec],
        cache: &mut HashMap<usize, LieVec>,
    ) -> LieVec {
        if let Some(v) = cache.get(&id) {
            return v.clone();
        }
        let v = match self.basis[id].shape {
            Shape::Leaf(i) => images[i].clone(),
            Shape::Node(u, w) => {
                let a = self.substitute_basis(u, images, cache);
                let b = self.substitute_basis(w, images, cache);
                self.bracket_vecs(&a, &b)
            }
        };
        cache.insert(id, v.clone());
        v
    }

    /// Degree-`d` homogeneous component.
    pub fn homogeneous_part(&self, v: &LieVec, d: usize) -> LieVec {
        let r = self.degree_range(d);
        LieVec {
            cap: self.cap,
            coeffs: v.coeffs.range(r).map(|(i, c)| (*i, c.clone())).collect(),
        }
    }

    pub fn min_degree(&self, v: &LieVec) -> Option<usize> {
        v.coeffs.keys().next().map(|&i| self.degree(i))
    }

    pub fn max_degree(&self, v: &LieVec) -> Option<usize> {
        v.coeffs.keys().next_back().map(|&i| self.degree(i))
    }

    /// Nested-bracket rendering of a basis element.
    pub fn element_string(&self, id: usize) -> String {
        match self.basis[id].shape {
            Shape::Leaf(i) => self.generators[i].name.clone(),
            Shape::Node(u, v) => format!("[{},{}]", self.element_string(u), self.element_string(v)),
        }
    }

    /// Renders `v` as an integer combination of nested brackets, in the
    /// syntax accepted by the presentation parser.
    pub fn format(&self, v: &LieVec) -> String {
        if v.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (id, c)) in v.coeffs.iter().enumerate() {
            let body = self.element_string(*id);
            let mag = c.abs();
            if k == 0 {
                if c.is_negative() {
                    s.push('-');
                }
            } else if c.is_negative() {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            if mag.is_one() {
                s.push_str(&body);
            } else {
                s.push_str(&format!("{mag}*{body}"));
            }
        }
        s
    }

    /// Pre-populates the bracket table for every pair of basis elements
    /// whose degrees add up to at most the cap.
    pub fn warm_up(&self) {
        for a in 0..self.rank() {
            for b in 0..self.rank() {
                if self.degree(a) + self.degree(b) <= self.cap {
                    self.bracket_ids(a, b);
                }
            }
        }
    }
}

impl fmt::Display for FreeLieContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "free Lie ring on {} generators, cap {}, basis sizes {:?}",
            self.num_generators(),
            self.cap,
            self.degree_sizes()
        )
    }
}

fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Rank of the degree-`n` component of the free Lie ring on `m` generators:
/// `(1/n) * sum_{d | n} mu(d) * m^(n/d)`.
pub fn witt_rank(m: u64, n: u64) -> BigInt {
    assert!(m >= 1 && n >= 1, "witt_rank needs m >= 1 and n >= 1");
    let mut total = BigInt::zero();
    for d in 1..=n {
        if n.is_multiple_of(d) {
            let mu = mobius(d);
            if mu != 0 {
                total += BigInt::from(mu) * num_traits::pow(BigInt::from(m), (n / d) as usize);
            }
        }
    }
    total / BigInt::from(n)
}
