//! Lie dimension subrings `delta_n(L) = L ∩ varpi^n(L)` and related
//! intersections in the enveloping algebra.
//!
//! Since `U(L) = U(F)/r` with `r = U(F) R U(F)`, the preimage of
//! `delta_n(L)` in `F` is `{f : iota(f) in varpi^n + r}`. For a presentation
//! with class cap `c`, `R` is replaced by `R + gamma_{c+1}(F)` and `r` by the
//! two-sided ideal it generates, which the degree `c+1` Hall elements already
//! generate together with the relators.
//!
//! Everything is computed modulo `varpi^(D+1)` where `D` is the associative
//! cap. When `D >= n - 1` this loses nothing, because `varpi^(D+1)` is then
//! contained in `varpi^n`; and `D >= c` makes every Hall element that is not
//! already in the relator ideal visible in the associative ring.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::assoc::{AssocContext, AssocError, AssocVec};
use crate::fplie::{
    bracket_lattices, bracket_with_generators, free_gamma, free_second_derived, left_normed_sum,
    lie_ideal_closure, FpLieError, PreabelianData, Presentation,
};
use crate::hall::{FreeLieContext, LieVec};
use crate::intlat::{
    preimage_of_columns, AbelianInvariants, Lattice, LatticeError, QuotientMap, SparseVec,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimError {
    #[error("dimension index must be at least {min}, got {n}")]
    BadIndex { n: usize, min: usize },
    #[error("associative cap {cap_a} is below the safe bound {required}")]
    CapTooSmall { cap_a: usize, required: usize },
    #[error("Lie cap {cap} must be at least {required}")]
    LieCapTooSmall { cap: usize, required: usize },
    #[error(transparent)]
    FpLie(#[from] FpLieError),
    #[error(transparent)]
    Assoc(#[from] AssocError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Debug)]
pub struct DimQuery {
    pub pres: Presentation,
    pub n: usize,
    pub cap_a: usize,
}

impl DimQuery {
    /// Query with the default associative cap `max(n, class_cap)`.
    pub fn new(pres: Presentation, n: usize) -> Result<Self, DimError> {
        let cap_a = n.max(pres.class_cap());
        DimQuery::with_cap_a(pres, n, cap_a)
    }

    pub fn with_cap_a(pres: Presentation, n: usize, cap_a: usize) -> Result<Self, DimError> {
        if n == 0 {
            return Err(DimError::BadIndex { n, min: 1 });
        }
        let required = (n - 1).max(pres.class_cap()).max(1);
        if cap_a < required {
            return Err(DimError::CapTooSmall { cap_a, required });
        }
        Ok(DimQuery { pres, n, cap_a })
    }
}

/// `delta_n / gamma_n` with coset representatives of its cyclic generators.
#[derive(Clone, Debug)]
pub struct DimReport {
    pub n: usize,
    pub cap_a: usize,
    pub delta_lattice: Lattice,
    pub gamma_lattice: Lattice,
    pub quotient: AbelianInvariants,
    /// One representative per cyclic summand, reduced modulo `gamma_lattice`.
    pub witnesses: Vec<LieVec>,
    pub witness_orders: Vec<BigInt>,
}

/// Preimage of `gamma_n(L)`; for `n` beyond the class cap this is just the
/// relator ideal.
pub fn gamma_preimage(pres: &Presentation, n: usize) -> Result<Lattice, FpLieError> {
    if n > pres.class_cap() + 1 {
        Ok(pres.relator_ideal_lattice().clone())
    } else {
        pres.gamma_lattice(n)
    }
}

fn iota_of(table: &[AssocVec], a: &AssocContext, v: &LieVec) -> AssocVec {
    let mut out = a.zero();
    for (id, c) in v.terms() {
        out.add_scaled(c, &table[id]);
    }
    out
}

/// Preimage of `delta_n(L)` in `F`.
///
/// The target `varpi^n + r` contains every word of length `>= n`, so the
/// computation runs in `U(F)/varpi^n` directly; for any valid associative
/// cap this gives the same lattice as [`delta_lattice_full`].
pub fn delta_lattice(q: &DimQuery) -> Result<Lattice, DimError> {
    if q.n == 1 {
        return Ok(q.pres.ambient());
    }
    delta_lattice_at(&q.pres, q.n, q.n - 1)
}

/// Same lattice, computed literally modulo `varpi^(cap_a+1)` with the
/// `varpi^n` coordinates kept. Slower; used to cross-check truncation.
pub fn delta_lattice_full(q: &DimQuery) -> Result<Lattice, DimError> {
    delta_lattice_at(&q.pres, q.n, q.cap_a)
}

fn delta_lattice_at(pres: &Presentation, n: usize, cap_a: usize) -> Result<Lattice, DimError> {
    let ctx = pres.ctx();
    let c = pres.class_cap();
    let assoc = AssocContext::new(ctx.num_generators(), cap_a);
    let table = assoc.iota_basis_truncated(ctx)?;

    let mut gens: Vec<AssocVec> = pres
        .relators()
        .iter()
        .map(|r| iota_of(&table, &assoc, r))
        .collect();
    if c < ctx.cap() && c < cap_a {
        gens.extend(ctx.degree_range(c + 1).map(|id| table[id].clone()));
    }
    let mut target = assoc.ideal_span(&gens);
    if n <= cap_a {
        target = target.sum(&assoc.omega_power_lattice(n)?)?;
    }

    let k = ctx.degree_at_least(c + 1).start;
    let pre = preimage_of_columns(assoc.dim(), k, |j| table[j].to_sparse(), &target);
    let lifted = Lattice::from_generators(ctx.rank(), pre.basis().iter().cloned());
    Ok(lifted.sum(pres.relator_ideal_lattice())?)
}

pub fn dimension_quotient(q: &DimQuery) -> Result<DimReport, DimError> {
    let delta = delta_lattice(q)?;
    let gamma = gamma_preimage(&q.pres, q.n)?;
    let map = QuotientMap::new(&delta, &gamma)?;
    let ctx = q.pres.ctx();
    let witnesses = map
        .generators
        .iter()
        .map(|g| ctx.from_sparse(&gamma.reduce(g)))
        .collect();
    Ok(DimReport {
        n: q.n,
        cap_a: q.cap_a,
        delta_lattice: delta,
        gamma_lattice: gamma,
        quotient: map.invariants.clone(),
        witnesses,
        witness_orders: map.orders.clone(),
    })
}

/// Integer vectors `(a_ij)_{i>j}` with `e_i | a_ij` and
/// `W_i = sum_{j<i} a_ij X_j - sum_{j>i} a_ji X_j` in `e_i gamma_2 + gamma_3 + R`
/// for every `i`.
#[derive(Clone, Debug)]
pub struct Delta4Solution {
    /// Coordinate order of the solution vectors: pairs `(i, j)` with `i > j`.
    pub pairs: Vec<(usize, usize)>,
    pub lattice: Lattice,
}

impl Delta4Solution {
    /// `sum a_ij [X_i, X_j]` for a solution vector.
    pub fn element(&self, ctx: &FreeLieContext, a: &SparseVec) -> LieVec {
        let mut v = ctx.zero();
        for (p, c) in a.entries() {
            let (i, j) = self.pairs[*p];
            v.add_scaled(c, &ctx.left_normed(&[i, j]));
        }
        v
    }

    /// Image of the solution set in `F`, plus `gamma_4 + R`.
    pub fn image(&self, pres: &Presentation) -> Result<Lattice, DimError> {
        let ctx = pres.ctx();
        let gens = self
            .lattice
            .basis()
            .iter()
            .map(|a| self.element(ctx, a).to_sparse());
        Ok(gamma_preimage(pres, 4)?.extended(gens))
    }
}

pub fn delta4_solution_set(pd: &PreabelianData) -> Result<Delta4Solution, DimError> {
    let pres = &pd.presentation;
    let ctx = pres.ctx();
    let m = ctx.num_generators();
    let nf = ctx.rank();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    let np = pairs.len();
    let rel = pres.relator_ideal_lattice();
    let g2 = free_gamma(ctx, 2);
    let g3 = free_gamma(ctx, 3).sum(rel)?;

    let divisibility = Lattice::from_generators(
        np,
        pairs
            .iter()
            .enumerate()
            .map(|(p, &(i, _))| SparseVec::unit(p).scale(&pd.divisors[i])),
    );
    let mut sol = divisibility;
    for i in 0..m {
        let target = g2.scale(&pd.divisors[i]).sum(&g3)?;
        let column = |p: usize| {
            let (k, l) = pairs[p];
            if k == i {
                SparseVec::unit(l)
            } else if l == i {
                SparseVec::unit(k).neg()
            } else {
                SparseVec::new()
            }
        };
        let pre = preimage_of_columns(nf, np, column, &target);
        sol = sol.intersect(&pre)?;
    }
    Ok(Delta4Solution {
        pairs,
        lattice: sol,
    })
}

#[derive(Clone, Debug)]
pub struct DeltanCheck {
    pub passed: bool,
    /// A basis vector of `delta_n` outside the allowed span, when the check fails.
    pub counterexample: Option<LieVec>,
}

/// Checks that every element of `delta_n(L)` is, modulo
/// `gamma_n(L) + L''`, a combination `sum a_k c_k` of left-normed
/// commutators `c_k = [X_{i1}, ..., X_{ir}]` of degree `2..n-1` with
/// `e_{i1} | a_k`.
pub fn deltan_divisibility_check(pd: &PreabelianData, n: usize) -> Result<DeltanCheck, DimError> {
    if n < 2 {
        return Err(DimError::BadIndex { n, min: 2 });
    }
    let pres = &pd.presentation;
    let ctx = pres.ctx();
    let m = ctx.num_generators();
    let delta = delta_lattice(&DimQuery::new(pres.clone(), n)?)?;

    let mut gens = Vec::new();
    for len in 2..n.min(ctx.cap() + 1) {
        let mut seq = vec![0usize; len];
        loop {
            let e = &pd.divisors[seq[0]];
            if !e.is_zero() {
                let c = ctx.left_normed(&seq);
                if !c.is_zero() {
                    gens.push(c.scale(e).to_sparse());
                }
            }
            if !next_sequence(&mut seq, m) {
                break;
            }
        }
    }
    let allowed = gamma_preimage(pres, n)?
        .sum(&free_second_derived(ctx))?
        .extended(gens);
    let counterexample = delta
        .basis()
        .iter()
        .find(|b| !allowed.contains(b))
        .map(|b| ctx.from_sparse(b));
    Ok(DeltanCheck {
        passed: counterexample.is_none(),
        counterexample,
    })
}

/// `F ∩ (varpi^n + varpi gamma_2(F))`, computed in `U(F)/varpi^n`.
/// Equals `gamma_n(F) + F''` below the degree cap.
pub fn free_omega_gamma2(ctx: &FreeLieContext, n: usize) -> Result<Lattice, DimError> {
    if n < 2 {
        return Err(DimError::BadIndex { n, min: 2 });
    }
    let assoc = AssocContext::new(ctx.num_generators(), n - 1);
    let table = assoc.iota_basis_truncated(ctx)?;
    let mut products = Vec::new();
    for id in ctx.degree_at_least(2) {
        let d = ctx.degree(id);
        if d + 1 > n - 1 {
            break;
        }
        for w in (0..assoc.dim()).filter(|&w| assoc.degree_of(w) + d < n) {
            let p = assoc.mul(&assoc.monomial(&assoc.word(w)), &table[id]);
            if !p.is_zero() {
                products.push(p.to_sparse());
            }
        }
    }
    let target = Lattice::from_generators(assoc.dim(), products);
    Ok(preimage_of_columns(
        assoc.dim(),
        ctx.rank(),
        |j| table[j].to_sparse(),
        &target,
    ))
}

/// Whether `[delta_4(L), L]` lies in `gamma_5(L) + L''`.
pub fn delta4_centrality_check(pres: &Presentation) -> Result<bool, DimError> {
    let ctx = pres.ctx();
    let delta = delta_lattice(&DimQuery::new(pres.clone(), 4)?)?;
    let allowed = gamma_preimage(pres, 5)?.sum(&free_second_derived(ctx))?;
    Ok(bracket_with_generators(ctx, &delta).is_subset_of(&allowed))
}

fn next_sequence(seq: &mut [usize], m: usize) -> bool {
    for s in seq.iter_mut().rev() {
        *s += 1;
        if *s < m {
            return true;
        }
        *s = 0;
    }
    false
}

fn iota_relators(
    ctx: &FreeLieContext,
    assoc: &AssocContext,
    relators: &[LieVec],
) -> Result<(Vec<AssocVec>, Vec<AssocVec>), DimError> {
    let table = assoc.iota_basis(ctx)?;
    let gens = relators.iter().map(|r| iota_of(&table, assoc, r)).collect();
    Ok((table, gens))
}

/// `F ∩ varpi^n r`, where `r` is the two-sided ideal of `U(F)` generated by
/// the relators; computed modulo `varpi^(cap+1)`.
pub fn fox_intersection(
    ctx: &Arc<FreeLieContext>,
    relators: &[LieVec],
    n: usize,
) -> Result<Lattice, DimError> {
    let assoc = AssocContext::new(ctx.num_generators(), ctx.cap());
    let (table, gens) = iota_relators(ctx, &assoc, relators)?;
    let target = assoc.ideal_span_from(&gens, n);
    Ok(preimage_of_columns(
        assoc.dim(),
        ctx.rank(),
        |j| table[j].to_sparse(),
        &target,
    ))
}

/// `R(0) = R`, `R(k+1) = [R(k), F]`.
pub fn lie_series_term(ctx: &FreeLieContext, relators: &[LieVec], k: usize) -> Lattice {
    let mut r = lie_ideal_closure(ctx, relators.iter().map(|v| v.to_sparse()));
    for _ in 0..k {
        r = bracket_with_generators(ctx, &r);
    }
    r
}

#[derive(Clone, Debug)]
pub struct SjogrenReport {
    /// `F ∩ (varpi^(n+1) + r(n-1))`.
    pub lhs: Lattice,
    /// `gamma_(n+1)(F) + R(n-1)`.
    pub rhs: Lattice,
    pub equal: bool,
}

pub fn sjogren_equality_check(
    ctx: &Arc<FreeLieContext>,
    relators: &[LieVec],
    n: usize,
) -> Result<SjogrenReport, DimError> {
    if n == 0 {
        return Err(DimError::BadIndex { n, min: 1 });
    }
    if ctx.cap() < n + 1 {
        return Err(DimError::LieCapTooSmall {
            cap: ctx.cap(),
            required: n + 1,
        });
    }
    let assoc = AssocContext::new(ctx.num_generators(), ctx.cap());
    let (table, gens) = iota_relators(ctx, &assoc, relators)?;
    let target = assoc
        .r_n_lattice(&gens, n - 1)
        .sum(&assoc.omega_power_lattice(n + 1)?)?;
    let lhs = preimage_of_columns(assoc.dim(), ctx.rank(), |j| table[j].to_sparse(), &target);
    let rhs = free_gamma(ctx, n + 1).sum(&lie_series_term(ctx, relators, n - 1))?;
    let equal = lhs == rhs;
    Ok(SjogrenReport { lhs, rhs, equal })
}

#[derive(Clone, Debug)]
pub struct SandwichReport {
    /// `[R, R]`.
    pub rr: Lattice,
    /// `F ∩ varpi r`.
    pub fox: Lattice,
    /// `sqrt[R, R]`: elements of `R` with a nonzero multiple in `[R, R]`.
    pub root: Lattice,
    pub r: Lattice,
    /// The three inclusions `[R,R] <= fox <= root <= R`.
    pub inclusions: [bool; 3],
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.inclusions.iter().all(|&b| b)
    }
}

pub fn sandwich_check(
    ctx: &Arc<FreeLieContext>,
    relators: &[LieVec],
) -> Result<SandwichReport, DimError> {
    let r = lie_series_term(ctx, relators, 0);
    let rr = bracket_lattices(ctx, &r, &r);
    let fox = fox_intersection(ctx, relators, 1)?;
    let root = rr.saturate().intersect(&r)?;
    let inclusions = [
        rr.is_subset_of(&fox),
        fox.is_subset_of(&root),
        root.is_subset_of(&r),
    ];
    Ok(SandwichReport {
        rr,
        fox,
        root,
        r,
        inclusions,
    })
}

/// The four-generator counterexample with `delta_4 != gamma_4`, truncated
/// at class `class_cap` (at least 4 to keep `gamma_4` visible).
pub fn counterexample_presentation(class_cap: usize) -> Presentation {
    let ctx = Arc::new(FreeLieContext::new(4, class_cap).expect("four generators"));
    let relators = counterexample_relators(&ctx);
    Presentation::new(ctx, relators, class_cap).expect("valid counterexample")
}

fn counterexample_relators(ctx: &FreeLieContext) -> Vec<LieVec> {
    vec![
        left_normed_sum(ctx, &[(4, &[0]), (2, &[3, 2]), (1, &[3, 1])]),
        left_normed_sum(ctx, &[(16, &[1]), (4, &[3, 2]), (-1, &[3, 0])]),
        left_normed_sum(ctx, &[(64, &[2]), (-4, &[3, 1]), (-2, &[3, 0])]),
    ]
}

/// `a = 32[x1,x2] + 64[x1,x3] + 128[x2,x3]`.
pub fn counterexample_element(ctx: &FreeLieContext) -> LieVec {
    left_normed_sum(ctx, &[(32, &[0, 1]), (64, &[0, 2]), (128, &[1, 2])])
}

/// Class-3 quotient of the counterexample in which the image of `a` is
/// visibly nonzero: every degree-3 Hall element other than `[x4,xi,xi]`
/// is killed, and `4[x4,x1,x1]`, `4[x4,x2,x2] - [x4,x1,x1]`,
/// `4[x4,x3,x3] - [x4,x2,x2]` are added.
pub fn counterexample_auxiliary() -> Presentation {
    let ctx = Arc::new(FreeLieContext::new(4, 3).expect("four generators"));
    let mut relators = counterexample_relators(&ctx);
    let keep: Vec<usize> = (0..3)
        .map(|i| {
            let v = ctx.left_normed(&[3, i, i]);
            let (id, _) = v.terms().next().expect("Hall element");
            id
        })
        .collect();
    for id in ctx.degree_range(3) {
        if !keep.contains(&id) {
            relators.push(ctx.basis_vec(id));
        }
    }
    relators.push(left_normed_sum(&ctx, &[(4, &[3, 0, 0])]));
    relators.push(left_normed_sum(&ctx, &[(4, &[3, 1, 1]), (-1, &[3, 0, 0])]));
    relators.push(left_normed_sum(&ctx, &[(4, &[3, 2, 2]), (-1, &[3, 1, 1])]));
    Presentation::new(ctx, relators, 3).expect("valid auxiliary presentation")
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
    fn free_delta_is_gamma() {
        let c = ctx(2, 4);
        let p = Presentation::free(c, 4).unwrap();
        for n in 1..=4 {
            let q = DimQuery::new(p.clone(), n).unwrap();
            assert_eq!(
                delta_lattice(&q).unwrap(),
                p.gamma_lattice(n).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn projection_matches_full_truncation() {
        let c = ctx(2, 4);
        let p = Presentation::new(
            c.clone(),
            vec![c.generator(0).scale(&b(4)).add(&c.left_normed(&[1, 0, 0]))],
            4,
        )
        .unwrap();
        for n in 2..=4 {
            let q = DimQuery::new(p.clone(), n).unwrap();
            let fast = delta_lattice(&q).unwrap();
            assert_eq!(fast, delta_lattice_full(&q).unwrap());
            let wider = DimQuery::with_cap_a(p.clone(), n, q.cap_a + 1).unwrap();
            assert_eq!(fast, delta_lattice_full(&wider).unwrap());
        }
    }

    #[test]
    fn abelian_delta2() {
        let p = Presentation::free(ctx(2, 1), 1).unwrap();
        let r = dimension_quotient(&DimQuery::new(p.clone(), 2).unwrap()).unwrap();
        assert_eq!(r.delta_lattice, *p.relator_ideal_lattice());
        assert!(r.quotient.is_trivial());
    }

    #[test]
    fn rejects_small_cap() {
        let p = Presentation::free(ctx(2, 3), 3).unwrap();
        assert!(matches!(
            DimQuery::with_cap_a(p.clone(), 2, 2),
            Err(DimError::CapTooSmall { .. })
        ));
        assert!(matches!(
            DimQuery::new(p, 0),
            Err(DimError::BadIndex { .. })
        ));
    }

    #[test]
    fn single_generator_has_no_pairs() {
        let c = ctx(1, 4);
        let p = Presentation::new(c.clone(), vec![c.generator(0).scale(&b(4))], 4).unwrap();
        let pd = crate::fplie::preabelianize(&p).unwrap();
        let s = delta4_solution_set(&pd).unwrap();
        assert!(s.pairs.is_empty());
        assert!(s.lattice.is_zero());
    }

    #[test]
    fn zero_divisors_force_zero_solutions() {
        let c = ctx(3, 4);
        let p = Presentation::free(c, 4).unwrap();
        let pd = crate::fplie::preabelianize(&p).unwrap();
        assert!(delta4_solution_set(&pd).unwrap().lattice.is_zero());
    }

    #[test]
    fn deltan_small_cases() {
        let c = ctx(2, 3);
        let p = Presentation::free(c.clone(), 3).unwrap();
        let pd = crate::fplie::preabelianize(&p).unwrap();
        assert!(deltan_divisibility_check(&pd, 3).unwrap().passed);
        let p = Presentation::new(c.clone(), vec![c.generator(0).scale(&b(2))], 3).unwrap();
        let pd = crate::fplie::preabelianize(&p).unwrap();
        assert!(deltan_divisibility_check(&pd, 3).unwrap().passed);
    }

    #[test]
    fn fox_example() {
        for p in [2i64, 3] {
            let c = ctx(2, 3);
            let rels: Vec<LieVec> = (0..2).map(|i| c.generator(i).scale(&b(p))).collect();
            let fox = fox_intersection(&c, &rels, 1).unwrap();
            assert_eq!(fox, free_gamma(&c, 2).scale(&b(p)));
            let fox0 = fox_intersection(&c, &rels, 0).unwrap();
            assert_eq!(fox0, lie_series_term(&c, &rels, 0));
        }
    }

    #[test]
    fn sjogren_small() {
        let c = ctx(2, 3);
        assert!(sjogren_equality_check(&c, &[], 2).unwrap().equal);
        let rels: Vec<LieVec> = (0..2).map(|i| c.generator(i).scale(&b(2))).collect();
        assert!(sjogren_equality_check(&c, &rels, 2).unwrap().equal);
        assert!(matches!(
            sjogren_equality_check(&c, &rels, 3),
            Err(DimError::LieCapTooSmall { .. })
        ));
    }

    #[test]
    fn sandwich_small() {
        let c = ctx(2, 4);
        assert!(sandwich_check(&c, &[]).unwrap().holds());
        let rels: Vec<LieVec> = (0..2).map(|i| c.generator(i).scale(&b(2))).collect();
        let s = sandwich_check(&c, &rels).unwrap();
        assert!(s.holds());
        assert_ne!(s.fox, s.rr);
    }

    #[test]
    fn omega_gamma2_is_gamma_plus_second_derived() {
        for (m, cap) in [(2, 6), (3, 5)] {
            let c = ctx(m, cap);
            for n in 2..=cap {
                let expected = free_gamma(&c, n).sum(&free_second_derived(&c)).unwrap();
                assert_eq!(
                    free_omega_gamma2(&c, n).unwrap(),
                    expected,
                    "m = {m}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn counterexample_delta4_is_central_mod_second_derived() {
        assert!(delta4_centrality_check(&counterexample_presentation(5)).unwrap());
    }
}
