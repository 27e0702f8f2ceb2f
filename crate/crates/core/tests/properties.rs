use std::sync::Arc;

use liedim::dimsub::{delta_lattice, gamma_preimage, DimQuery};
use liedim::intlat::{kernel, quotient_invariants, snf};
use liedim::random::{random_element, random_presentation};
use liedim::{AssocContext, FreeLieContext, IntMat, Lattice, SparseVec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn det_i128(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, x)| *x)
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det_i128(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// gcd of all `k x k` minors.
fn determinantal_divisor(a: &[Vec<i64>], k: usize) -> i128 {
    let (r, c) = (a.len(), a[0].len());
    let mut g = 0i128;
    for rows in subsets(r, k) {
        for cols in subsets(c, k) {
            let m: Vec<Vec<i128>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| a[i][j] as i128).collect())
                .collect();
            g = g.gcd(&det_i128(&m));
        }
    }
    g
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, cols), rows)
}

fn to_intmat(a: &[Vec<i64>]) -> IntMat {
    let rows: Vec<&[i64]> = a.iter().map(|r| r.as_slice()).collect();
    IntMat::from_i64(&rows)
}

fn lattice(a: &[Vec<i64>]) -> Lattice {
    Lattice::from_generators(a[0].len(), a.iter().map(|r| SparseVec::from_i64(r)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_divisors_match_minors(a in matrix(3, 3)) {
        let s = snf(&to_intmat(&a));
        let mut prefix = BigInt::from(1);
        for k in 1..=3 {
            prefix *= &s.divisors[k - 1];
            prop_assert_eq!(prefix.clone(), BigInt::from(determinantal_divisor(&a, k)));
        }
    }

    #[test]
    fn smith_transform_is_valid(a in matrix(3, 4)) {
        let m = to_intmat(&a);
        let s = snf(&m);
        let d = s.p.mul(&m).mul(&s.q);
        for i in 0..3 {
            for j in 0..4 {
                let expect = if i == j { s.divisors[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(d.get(i, j).clone(), expect);
            }
        }
        prop_assert_eq!(s.q.mul(&s.q_inv), IntMat::identity(4));
    }

    #[test]
    fn hnf_is_invariant_under_unimodular_moves(a in matrix(3, 4), f in -5i64..=5, i in 0usize..3, j in 0usize..3) {
        let mut b = a.clone();
        if i != j {
            for c in 0..4 {
                b[i][c] += f * a[j][c];
            }
        }
        b.swap(0, 2);
        b[1].iter_mut().for_each(|x| *x = -*x);
        prop_assert_eq!(lattice(&a), lattice(&b));
    }

    #[test]
    fn full_rank_index_is_abs_det(a in matrix(3, 3)) {
        let d = det_i128(&a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect::<Vec<_>>());
        let l = lattice(&a);
        match l.index_in_ambient() {
            Some(idx) => prop_assert_eq!(idx, BigInt::from(d.abs())),
            None => prop_assert_eq!(d, 0),
        }
        if d != 0 {
            let q = quotient_invariants(&Lattice::full(3), &l).unwrap();
            prop_assert_eq!(q.order().unwrap(), BigInt::from(d.abs()));
        }
    }

    #[test]
    fn membership_of_combinations(a in matrix(3, 4), c in prop::collection::vec(-9i64..=9, 3)) {
        let l = lattice(&a);
        let v: Vec<i64> = (0..4).map(|k| (0..3).map(|i| c[i] * a[i][k]).sum()).collect();
        let sv = SparseVec::from_i64(&v);
        prop_assert!(l.contains(&sv));
        let coords = l.member(&sv).unwrap();
        let mut back = SparseVec::new();
        for (x, b) in coords.iter().zip(l.basis()) {
            back.add_scaled(x, b);
        }
        prop_assert_eq!(back, sv);
    }

    #[test]
    fn intersection_and_sum(a in matrix(2, 3), b in matrix(2, 3), v in prop::collection::vec(-12i64..=12, 3)) {
        let la = lattice(&a);
        let lb = lattice(&b);
        let meet = la.intersect(&lb).unwrap();
        let join = la.sum(&lb).unwrap();
        prop_assert!(meet.is_subset_of(&la) && meet.is_subset_of(&lb));
        prop_assert!(la.is_subset_of(&join) && lb.is_subset_of(&join));
        let sv = SparseVec::from_i64(&v);
        prop_assert_eq!(meet.contains(&sv), la.contains(&sv) && lb.contains(&sv));
    }

    #[test]
    fn saturation_properties(a in matrix(2, 3), k in 1i64..=6) {
        let l = lattice(&a);
        let s = l.saturate();
        prop_assert!(l.is_subset_of(&s));
        prop_assert_eq!(s.rank(), l.rank());
        prop_assert!(s.is_saturated());
        let index = quotient_invariants(&s, &l).unwrap().order().unwrap();
        for b in s.basis() {
            prop_assert!(l.contains(&b.scale(&index)));
        }
        let scaled = l.scale(&BigInt::from(k)).saturate();
        prop_assert_eq!(scaled, s);
    }

    #[test]
    fn kernel_vectors_are_annihilated(a in matrix(2, 4)) {
        let m = to_intmat(&a);
        let k = kernel(&m);
        let rank = lattice(&a).rank();
        prop_assert_eq!(k.rank() + rank, 4);
        for v in k.basis() {
            prop_assert!(m.apply(v).is_zero());
        }
    }

    #[test]
    fn bracket_laws(seed in any::<u64>(), m in 2usize..=3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let ctx = FreeLieContext::new(m, 5).unwrap();
        let x = random_element(&mut r, &ctx, 3, 5);
        let y = random_element(&mut r, &ctx, 3, 5);
        let z = random_element(&mut r, &ctx, 3, 5);
        let br = |u: &liedim::LieVec, v: &liedim::LieVec| ctx.bracket(u, v).unwrap();
        prop_assert_eq!(br(&x, &y), br(&y, &x).neg());
        prop_assert!(br(&x, &x).is_zero());
        prop_assert_eq!(br(&x.add(&z), &y), br(&x, &y).add(&br(&z, &y)));
        let jacobi = br(&br(&x, &y), &z).add(&br(&br(&y, &z), &x)).add(&br(&br(&z, &x), &y));
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn iota_is_a_lie_homomorphism(seed in any::<u64>(), m in 2usize..=3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let ctx = FreeLieContext::new(m, 5).unwrap();
        let assoc = AssocContext::new(m, 5);
        let x = random_element(&mut r, &ctx, 3, 5);
        let y = random_element(&mut r, &ctx, 3, 5);
        let ix = assoc.iota(&x, &ctx).unwrap();
        let iy = assoc.iota(&y, &ctx).unwrap();
        let lhs = assoc.iota(&ctx.bracket(&x, &y).unwrap(), &ctx).unwrap();
        prop_assert_eq!(lhs, assoc.mul(&ix, &iy).sub(&assoc.mul(&iy, &ix)));
    }

    #[test]
    fn low_dimension_subrings(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let p = random_presentation(&mut r, 3, 3, 4, 3);
        for n in 1..=4 {
            let d = delta_lattice(&DimQuery::new(p.clone(), n).unwrap()).unwrap();
            let g = gamma_preimage(&p, n).unwrap();
            prop_assert!(g.is_subset_of(&d));
            if n <= 3 {
                prop_assert_eq!(d, g);
            }
        }
    }
}

#[test]
fn iota_is_injective_per_degree() {
    for m in 2..=3 {
        let ctx = Arc::new(FreeLieContext::new(m, 5).unwrap());
        let assoc = AssocContext::new(m, 5);
        let table = assoc.iota_basis(&ctx).unwrap();
        for d in 1..=5 {
            let ids = ctx.degree_range(d);
            let images =
                Lattice::from_generators(assoc.dim(), ids.clone().map(|id| table[id].to_sparse()));
            assert_eq!(images.rank(), ids.len(), "m = {m}, degree {d}");
        }
    }
}

#[test]
fn snf_signs_are_nonnegative() {
    let s = snf(&IntMat::from_i64(&[&[-3, 0], &[0, -5]]));
    assert!(s.divisors.iter().all(|d| !d.is_negative()));
}
