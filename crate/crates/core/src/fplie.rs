//! Finitely presented Lie rings over the integers.
//!
//! A [`Presentation`] always carries a class cap `c`: the ring it describes
//! is `F / (R + gamma_{c+1}(F))`. All subgroups of the ring are handled via
//! their full preimages in Hall coordinates of the truncated free Lie ring,
//! so every lattice returned here contains the relator ideal.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::hall::{FreeLieContext, HallError, LieVec};
use crate::intlat::{
    quotient_invariants, snf, AbelianInvariants, IntMat, Lattice, LatticeError, QuotientMap,
    SparseVec,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpLieError {
    #[error(transparent)]
    Hall(#[from] HallError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("relator {0} is zero")]
    ZeroRelator(usize),
    #[error("class cap {class} must be between 1 and the degree cap {cap}")]
    ClassCap { class: usize, cap: usize },
    #[error("lower central term {n} outside 1..={max}")]
    GammaIndex { n: usize, max: usize },
    #[error("graded presentation disagrees with the source in degree {0}")]
    GradedMismatch(usize),
}

/// Lie ideal of the truncated free Lie ring generated by `gens`, obtained by
/// bracketing basis vectors with generators until the lattice is stable.
pub fn lie_ideal_closure(
    ctx: &FreeLieContext,
    gens: impl IntoIterator<Item = SparseVec>,
) -> Lattice {
    let n = ctx.rank();
    let m = ctx.num_generators();
    let mut lat = Lattice::from_generators(n, gens);
    loop {
        let mut new = Vec::new();
        for b in lat.basis() {
            let v = ctx.from_sparse(b);
            for g in 0..m {
                let w = ctx.bracket_vecs(&v, &ctx.generator(g));
                if !w.is_zero() {
                    new.push(w.to_sparse());
                }
            }
        }
        let next = lat.extended(new);
        if next == lat {
            return lat;
        }
        lat = next;
    }
}

/// `gamma_n(F)`: the span of Hall elements of degree `>= n`.
pub fn free_gamma(ctx: &FreeLieContext, n: usize) -> Lattice {
    Lattice::coordinate(ctx.rank(), ctx.degree_at_least(n.max(1)))
}

/// `F'' = [[F,F],[F,F]]`: brackets of pairs of Hall elements of degree `>= 2`.
pub fn free_second_derived(ctx: &FreeLieContext) -> Lattice {
    let ids = ctx.degree_at_least(2);
    let mut gens = Vec::new();
    for a in ids.clone() {
        for b in ids.start..a {
            if ctx.degree(a) + ctx.degree(b) > ctx.cap() {
                continue;
            }
            let v = ctx.bracket_ids(a, b);
            if !v.is_zero() {
                gens.push(v.to_sparse());
            }
        }
    }
    Lattice::from_generators(ctx.rank(), gens)
}

/// `[A, B]` for lattices of the free Lie ring: the span of brackets of
/// basis vectors.
pub fn bracket_lattices(ctx: &FreeLieContext, a: &Lattice, b: &Lattice) -> Lattice {
    let mut gens = Vec::new();
    for x in a.basis() {
        let xv = ctx.from_sparse(x);
        for y in b.basis() {
            let w = ctx.bracket_vecs(&xv, &ctx.from_sparse(y));
            if !w.is_zero() {
                gens.push(w.to_sparse());
            }
        }
    }
    Lattice::from_generators(ctx.rank(), gens)
}

/// `[A, F]` for an ideal `A`: brackets of basis vectors with generators.
pub fn bracket_with_generators(ctx: &FreeLieContext, a: &Lattice) -> Lattice {
    let mut gens = Vec::new();
    for x in a.basis() {
        let xv = ctx.from_sparse(x);
        for g in 0..ctx.num_generators() {
            let w = ctx.bracket_vecs(&xv, &ctx.generator(g));
            if !w.is_zero() {
                gens.push(w.to_sparse());
            }
        }
    }
    Lattice::from_generators(ctx.rank(), gens)
}

#[derive(Clone, Debug)]
pub struct Presentation {
    ctx: Arc<FreeLieContext>,
    relators: Vec<LieVec>,
    class_cap: usize,
    rel_lattice: OnceLock<Lattice>,
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.generators() == other.ctx.generators()
            && self.ctx.cap() == other.ctx.cap()
            && self.relators == other.relators
            && self.class_cap == other.class_cap
    }
}

impl Presentation {
    pub fn new(
        ctx: Arc<FreeLieContext>,
        relators: Vec<LieVec>,
        class_cap: usize,
    ) -> Result<Self, FpLieError> {
        if class_cap == 0 || class_cap > ctx.cap() {
            return Err(FpLieError::ClassCap {
                class: class_cap,
                cap: ctx.cap(),
            });
        }
        for (i, r) in relators.iter().enumerate() {
            if r.cap() != ctx.cap() {
                return Err(HallError::ContextMismatch {
                    expected: ctx.cap(),
                    found: r.cap(),
                }
                .into());
            }
            if r.is_zero() {
                return Err(FpLieError::ZeroRelator(i));
            }
        }
        Ok(Presentation {
            ctx,
            relators,
            class_cap,
            rel_lattice: OnceLock::new(),
        })
    }

    pub fn free(ctx: Arc<FreeLieContext>, class_cap: usize) -> Result<Self, FpLieError> {
        Presentation::new(ctx, Vec::new(), class_cap)
    }

    pub fn ctx(&self) -> &Arc<FreeLieContext> {
        &self.ctx
    }

    pub fn relators(&self) -> &[LieVec] {
        &self.relators
    }

    pub fn class_cap(&self) -> usize {
        self.class_cap
    }

    pub fn num_generators(&self) -> usize {
        self.ctx.num_generators()
    }

    /// Hall coordinates of the truncated free Lie ring.
    pub fn ambient(&self) -> Lattice {
        Lattice::full(self.ctx.rank())
    }

    /// Image of `R + gamma_{c+1}(F)`.
    pub fn relator_ideal_lattice(&self) -> &Lattice {
        self.rel_lattice.get_or_init(|| {
            let gamma = self
                .ctx
                .degree_at_least(self.class_cap + 1)
                .map(SparseVec::unit);
            let rels = self.relators.iter().map(|r| r.to_sparse());
            lie_ideal_closure(&self.ctx, rels.chain(gamma))
        })
    }

    /// Preimage of `gamma_n(L)`: `gamma_n(F) + R`.
    pub fn gamma_lattice(&self, n: usize) -> Result<Lattice, FpLieError> {
        let max = self.class_cap + 1;
        if n == 0 || n > max {
            return Err(FpLieError::GammaIndex { n, max });
        }
        Ok(free_gamma(&self.ctx, n).sum(self.relator_ideal_lattice())?)
    }

    /// Preimage of `L''`, i.e. `F'' + R` (or `F''` alone).
    pub fn second_derived_lattice(&self, with_relators: bool) -> Lattice {
        let d = free_second_derived(&self.ctx);
        if with_relators {
            d.sum(self.relator_ideal_lattice()).expect("same ambient")
        } else {
            d
        }
    }

    /// Preimage of the derived series term `L^(k)`, with `L^(0) = L`.
    pub fn derived_series_lattice(&self, k: usize) -> Lattice {
        let mut cur = self.ambient();
        for _ in 0..k {
            cur = bracket_lattices(&self.ctx, &cur, &cur);
        }
        cur.sum(self.relator_ideal_lattice()).expect("same ambient")
    }

    pub fn nilpotent_quotient(&self) -> Result<NilpotentQuotient, FpLieError> {
        NilpotentQuotient::new(self.clone())
    }

    /// Same relators with a different class cap.
    pub fn with_class_cap(&self, class_cap: usize) -> Result<Presentation, FpLieError> {
        Presentation::new(self.ctx.clone(), self.relators.clone(), class_cap)
    }

    /// Whether bracketing the relator ideal with each generator stays inside it.
    pub fn is_ideal_closed(&self) -> bool {
        let rel = self.relator_ideal_lattice();
        bracket_with_generators(&self.ctx, rel).is_subset_of(rel)
    }

    /// Text in the presentation file format; parsing it back yields an
    /// identical presentation.
    pub fn to_source(&self) -> String {
        let names: Vec<&str> = self
            .ctx
            .generators()
            .iter()
            .map(|g| g.name.as_str())
            .collect();
        let mut s = format!("gens: {};\nclass: {};\n", names.join(" "), self.class_cap);
        if self.ctx.cap() != self.class_cap {
            s.push_str(&format!("cap: {};\n", self.ctx.cap()));
        }
        for r in &self.relators {
            s.push_str(&format!("rel: {};\n", self.ctx.format(r)));
        }
        s
    }
}

/// `L / gamma_{c+1}(L)` with its additive structure and coordinates.
#[derive(Clone, Debug)]
pub struct NilpotentQuotient {
    pres: Presentation,
    rel_lattice: Lattice,
    map: QuotientMap,
}

impl NilpotentQuotient {
    pub fn new(pres: Presentation) -> Result<Self, FpLieError> {
        let rel_lattice = pres.relator_ideal_lattice().clone();
        let map = QuotientMap::new(&pres.ambient(), &rel_lattice)?;
        Ok(NilpotentQuotient {
            pres,
            rel_lattice,
            map,
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn rel_lattice(&self) -> &Lattice {
        &self.rel_lattice
    }

    pub fn invariants(&self) -> &AbelianInvariants {
        &self.map.invariants
    }

    /// Cyclic generators of the quotient as elements of `F`.
    pub fn generators(&self) -> Vec<LieVec> {
        self.map
            .generators
            .iter()
            .map(|g| self.pres.ctx.from_sparse(g))
            .collect()
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.map.orders
    }

    /// Coordinates of the image of `v` with respect to [`Self::generators`].
    pub fn coordinates(&self, v: &LieVec) -> Vec<BigInt> {
        self.map
            .coordinates(&v.to_sparse())
            .expect("ambient is the full lattice")
    }

    pub fn is_zero(&self, v: &LieVec) -> bool {
        self.rel_lattice.contains(&v.to_sparse())
    }

    /// Bracket of quotient elements given by representatives in `F`,
    /// reduced to the canonical representative.
    pub fn bracket(&self, a: &LieVec, b: &LieVec) -> LieVec {
        let w = self.pres.ctx.bracket_vecs(a, b);
        self.reduce(&w)
    }

    pub fn reduce(&self, v: &LieVec) -> LieVec {
        self.pres
            .ctx
            .from_sparse(&self.rel_lattice.reduce(&v.to_sparse()))
    }

    /// Invariants of `gamma_n(L)/gamma_{n+1}(L)` for `n = 1..=c`.
    pub fn graded_invariants(&self) -> Result<Vec<AbelianInvariants>, FpLieError> {
        graded_invariants(&self.pres)
    }
}

pub fn graded_invariants(pres: &Presentation) -> Result<Vec<AbelianInvariants>, FpLieError> {
    let mut out = Vec::with_capacity(pres.class_cap());
    let mut upper = pres.gamma_lattice(1)?;
    for n in 1..=pres.class_cap() {
        let lower = pres.gamma_lattice(n + 1)?;
        out.push(quotient_invariants(&upper, &lower)?);
        upper = lower;
    }
    Ok(out)
}

/// A presentation rewritten as `e_i y_i + xi_i` (with `xi_i` in
/// `gamma_2(F)`) plus trailing relators in `gamma_2(F)`, where
/// `e_1 | e_2 | ... | e_m` are the elementary divisors of `L/[L,L]`.
#[derive(Clone, Debug)]
pub struct PreabelianData {
    /// `e_i >= 0`; zeros come last.
    pub divisors: Vec<BigInt>,
    /// `xi_i`, one per generator (zero when absent).
    pub xi: Vec<LieVec>,
    pub trailing: Vec<LieVec>,
    /// `x = Q y`: column `k` of `generator_change` holds the coefficients of
    /// the new generator `y_k` in each old generator.
    pub generator_change: IntMat,
    /// `y = Q^-1 x`.
    pub generator_change_inv: IntMat,
    pub presentation: Presentation,
}

impl PreabelianData {
    /// The relator attached to generator `i`: `e_i y_i + xi_i`.
    pub fn leading_relator(&self, i: usize) -> LieVec {
        let ctx = self.presentation.ctx();
        ctx.generator(i).scale(&self.divisors[i]).add(&self.xi[i])
    }

    /// Whether `e_i` divides `a` under the convention that `0 | a` means `a = 0`.
    pub fn divides(&self, i: usize, a: &BigInt) -> bool {
        divides(&self.divisors[i], a)
    }
}

pub(crate) fn divides(e: &BigInt, a: &BigInt) -> bool {
    if e.is_zero() {
        a.is_zero()
    } else {
        (a % e).is_zero()
    }
}

/// Rewrites the presentation in preabelian form via the Smith form of the
/// degree-one coefficient matrix of the relators.
pub fn preabelianize(pres: &Presentation) -> Result<PreabelianData, FpLieError> {
    let ctx = pres.ctx();
    let m = ctx.num_generators();
    let r = pres.relators().len();
    let mut a = IntMat::zeros(r, m);
    for (i, rel) in pres.relators().iter().enumerate() {
        for j in 0..m {
            a.set(i, j, rel.coeff(j));
        }
    }
    let s = snf(&a);

    // old generator x_j = sum_k Q[j][k] y_k
    let images: Vec<LieVec> = (0..m)
        .map(|j| {
            let mut v = ctx.zero();
            for k in 0..m {
                v.add_term(k, s.q.get(j, k));
            }
            v
        })
        .collect();
    let substituted: Vec<LieVec> = pres
        .relators()
        .iter()
        .map(|rel| ctx.substitute(rel, &images))
        .collect();
    let mut transformed: Vec<LieVec> = (0..r)
        .map(|i| {
            let mut v = ctx.zero();
            for (l, rel) in substituted.iter().enumerate() {
                v.add_scaled(s.p.get(i, l), rel);
            }
            v
        })
        .collect();

    let mut divisors = vec![BigInt::zero(); m];
    let mut xi = vec![ctx.zero(); m];
    for i in 0..r.min(m) {
        let d = s.divisors[i].clone();
        if transformed[i].coeff(i).is_negative() {
            transformed[i] = transformed[i].neg();
        }
        debug_assert_eq!(transformed[i].coeff(i), d.abs());
        let mut rest = transformed[i].clone();
        rest.add_term(i, &-d.abs());
        debug_assert!(ctx.homogeneous_part(&rest, 1).is_zero());
        divisors[i] = d.abs();
        xi[i] = rest;
    }
    let trailing: Vec<LieVec> = transformed
        .into_iter()
        .skip(m)
        .filter(|v| !v.is_zero())
        .collect();

    let mut relators = Vec::new();
    for i in 0..m {
        let rel = ctx.generator(i).scale(&divisors[i]).add(&xi[i]);
        if !rel.is_zero() {
            relators.push(rel);
        }
    }
    relators.extend(trailing.iter().cloned());
    let presentation = Presentation::new(ctx.clone(), relators, pres.class_cap())?;
    Ok(PreabelianData {
        divisors,
        xi,
        trailing,
        generator_change: s.q,
        generator_change_inv: s.q_inv,
        presentation,
    })
}

/// Presentation of the associated graded ring `gr(L) = (+)_n gamma_n/gamma_{n+1}`
/// on the same generators in degree one, with homogeneous relators.
///
/// The degree-`n` relators are the degree-`n` parts of the elements of
/// `R' = R + gamma_{c+1}` lying in `gamma_n(F)`. Because Hall coordinates
/// are ordered by degree, those are read off the echelon basis of `R'`: the
/// rows whose pivot has degree `n`, truncated to degree `n`.
pub fn associated_graded(nq: &NilpotentQuotient) -> Result<Presentation, FpLieError> {
    let pres = nq.presentation();
    let ctx = pres.ctx();
    let mut relators = Vec::new();
    for row in nq.rel_lattice().basis() {
        let (p, _) = row.lead().expect("nonzero basis row");
        let d = ctx.degree(p);
        if d > pres.class_cap() {
            continue;
        }
        let r = ctx.degree_range(d);
        let part = ctx.from_sparse(&row.window(0, r.end));
        relators.push(part);
    }
    let graded = Presentation::new(ctx.clone(), relators, pres.class_cap())?;
    let expected = nq.graded_invariants()?;
    let got = graded_invariants(&graded)?;
    if let Some(d) = expected.iter().zip(&got).position(|(a, b)| a != b) {
        return Err(FpLieError::GradedMismatch(d + 1));
    }
    Ok(graded)
}

/// Left-normed combination helper: `sum c_k [x_{w_k}]`.
pub fn left_normed_sum(ctx: &FreeLieContext, terms: &[(i64, &[usize])]) -> LieVec {
    let mut v = ctx.zero();
    for (c, w) in terms {
        v.add_scaled(&BigInt::from(*c), &ctx.left_normed(w));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(m: usize, cap: usize) -> Arc<FreeLieContext> {
        Arc::new(FreeLieContext::new(m, cap).unwrap())
    }

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn free_relator_ideal_is_gamma_c_plus_one() {
        let c = ctx(2, 4);
        let p = Presentation::free(c.clone(), 2).unwrap();
        assert_eq!(*p.relator_ideal_lattice(), free_gamma(&c, 3));
    }

    #[test]
    fn closure_of_x1() {
        let c = ctx(2, 3);
        let p = Presentation::new(c.clone(), vec![c.generator(0)], 2).unwrap();
        let expected = Lattice::coordinate(c.rank(), [0, 2])
            .sum(&free_gamma(&c, 3))
            .unwrap();
        assert_eq!(*p.relator_ideal_lattice(), expected);

        let p2 = Presentation::new(c.clone(), vec![c.generator(0).scale(&b(2))], 2).unwrap();
        let expected2 = Lattice::from_generators(
            c.rank(),
            [
                SparseVec::unit(0).scale(&b(2)),
                SparseVec::unit(2).scale(&b(2)),
            ],
        )
        .sum(&free_gamma(&c, 3))
        .unwrap();
        assert_eq!(*p2.relator_ideal_lattice(), expected2);
    }

    #[test]
    fn rejects_bad_presentations() {
        let c = ctx(2, 3);
        assert!(matches!(
            Presentation::free(c.clone(), 4),
            Err(FpLieError::ClassCap { .. })
        ));
        assert!(matches!(
            Presentation::free(c.clone(), 0),
            Err(FpLieError::ClassCap { .. })
        ));
        assert_eq!(
            Presentation::new(c.clone(), vec![c.zero()], 2).unwrap_err(),
            FpLieError::ZeroRelator(0)
        );
    }

    #[test]
    fn gamma_examples() {
        let c = ctx(2, 3);
        let p = Presentation::free(c.clone(), 3).unwrap();
        assert_eq!(p.gamma_lattice(1).unwrap(), p.ambient());
        assert_eq!(
            p.gamma_lattice(2).unwrap(),
            Lattice::coordinate(c.rank(), 2..5)
        );
        assert_eq!(p.gamma_lattice(4).unwrap(), *p.relator_ideal_lattice());
        assert!(p.gamma_lattice(5).is_err());
    }

    #[test]
    fn nilpotent_quotient_examples() {
        let c = ctx(2, 1);
        let nq = Presentation::free(c, 1)
            .unwrap()
            .nilpotent_quotient()
            .unwrap();
        assert_eq!(*nq.invariants(), AbelianInvariants::free(2));

        let c = Arc::new(FreeLieContext::with_names(vec!["x".into()], 1).unwrap());
        let p = Presentation::new(c.clone(), vec![c.generator(0).scale(&b(4))], 1).unwrap();
        let nq = p.nilpotent_quotient().unwrap();
        assert_eq!(nq.invariants().torsion, vec![b(4)]);
        assert!(!nq.is_zero(&c.generator(0)));
        assert_eq!(nq.coordinates(&c.generator(0).scale(&b(5))).len(), 1);
    }

    #[test]
    fn free_graded_pieces_have_witt_rank() {
        let c = ctx(3, 4);
        let p = Presentation::free(c, 4).unwrap();
        let g = graded_invariants(&p).unwrap();
        let ranks: Vec<usize> = g.iter().map(|a| a.free_rank).collect();
        assert_eq!(ranks, vec![3, 3, 8, 18]);
        assert!(g.iter().all(|a| a.torsion.is_empty()));
    }

    #[test]
    fn preabelian_examples() {
        let c = ctx(2, 3);
        let p = Presentation::new(c.clone(), vec![c.generator(0).scale(&b(2))], 2).unwrap();
        let pd = preabelianize(&p).unwrap();
        assert_eq!(pd.divisors, vec![b(2), b(0)]);
        assert!(pd.xi.iter().all(|x| x.is_zero()));

        let p = Presentation::new(c.clone(), vec![c.generator(0).add(&c.generator(1))], 2).unwrap();
        let pd = preabelianize(&p).unwrap();
        assert_eq!(pd.divisors, vec![b(1), b(0)]);
        assert_eq!(
            pd.presentation.nilpotent_quotient().unwrap().invariants(),
            p.nilpotent_quotient().unwrap().invariants()
        );
    }

    #[test]
    fn second_derived_examples() {
        assert!(free_second_derived(&ctx(2, 3)).is_zero());
        // only one degree-2 basis element, and [c,c] = 0
        assert!(free_second_derived(&ctx(2, 4)).is_zero());
        assert_eq!(free_second_derived(&ctx(2, 5)).rank(), 2);
        assert_eq!(free_second_derived(&ctx(3, 4)).rank(), 3);
    }

    #[test]
    fn graded_of_abelian_and_free() {
        let c = ctx(2, 1);
        let p = Presentation::free(c, 1).unwrap();
        let g = associated_graded(&p.nilpotent_quotient().unwrap()).unwrap();
        assert_eq!(g, p);
        let c = ctx(2, 3);
        let p = Presentation::free(c, 3).unwrap();
        let g = associated_graded(&p.nilpotent_quotient().unwrap()).unwrap();
        assert_eq!(g, p);
    }
}
