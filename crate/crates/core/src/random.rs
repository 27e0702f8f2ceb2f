//! Seeded generators of random presentations for property suites.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::fplie::Presentation;
use crate::hall::{FreeLieContext, LieVec};

/// Random element with `1..=max_terms` terms, each a coefficient in
/// `[-coeff, coeff]` times a generator, a bracket of two generators, or a
/// bracket of depth two (either nesting). May be zero.
pub fn random_element<R: Rng>(
    rng: &mut R,
    ctx: &FreeLieContext,
    max_terms: usize,
    coeff: i64,
) -> LieVec {
    let m = ctx.num_generators();
    let mut v = ctx.zero();
    for _ in 0..rng.gen_range(1..=max_terms) {
        let c = BigInt::from(rng.gen_range(-coeff..=coeff));
        let g = |rng: &mut R| ctx.generator(rng.gen_range(0..m));
        let term = match rng.gen_range(0..4) {
            0 => g(rng),
            1 => ctx.bracket_vecs(&g(rng), &g(rng)),
            2 => {
                let inner = ctx.bracket_vecs(&g(rng), &g(rng));
                ctx.bracket_vecs(&inner, &g(rng))
            }
            _ => {
                let inner = ctx.bracket_vecs(&g(rng), &g(rng));
                ctx.bracket_vecs(&g(rng), &inner)
            }
        };
        v.add_scaled(&c, &term);
    }
    v
}

/// Random combination of Hall basis elements whose degrees lie in `degrees`.
pub fn random_homogeneous<R: Rng>(
    rng: &mut R,
    ctx: &FreeLieContext,
    degrees: std::ops::RangeInclusive<usize>,
    max_terms: usize,
    coeff: i64,
) -> LieVec {
    let ids: Vec<usize> = degrees.flat_map(|d| ctx.degree_range(d)).collect();
    let mut v = ctx.zero();
    if ids.is_empty() {
        return v;
    }
    for _ in 0..rng.gen_range(1..=max_terms) {
        let id = *ids.choose(rng).expect("nonempty");
        v.add_term(id, &BigInt::from(rng.gen_range(-coeff..=coeff)));
    }
    v
}

/// Nonzero relators drawn with [`random_element`].
pub fn random_relators<R: Rng>(
    rng: &mut R,
    ctx: &FreeLieContext,
    max_relators: usize,
    coeff: i64,
) -> Vec<LieVec> {
    (0..rng.gen_range(0..=max_relators))
        .map(|_| random_element(rng, ctx, 3, coeff))
        .filter(|r| !r.is_zero())
        .collect()
}

/// `1..=max_gens` generators, up to `max_relators` relators with
/// coefficients in `[-coeff, coeff]` and bracket depth at most two, class
/// cap `class_cap`.
pub fn random_presentation<R: Rng>(
    rng: &mut R,
    max_gens: usize,
    max_relators: usize,
    coeff: i64,
    class_cap: usize,
) -> Presentation {
    let m = rng.gen_range(1..=max_gens);
    let ctx = Arc::new(FreeLieContext::new(m, class_cap).expect("valid context"));
    let relators = random_relators(rng, &ctx, max_relators, coeff);
    Presentation::new(ctx, relators, class_cap).expect("nonzero relators")
}

/// Relators `e_i x_i + xi_i` with `e_1 | e_2 | ...` drawn from
/// `{0, 2, 4, 8, 16}` (zeros last) and `xi_i` of degree 2 and 3.
pub fn random_preabelian<R: Rng>(
    rng: &mut R,
    min_gens: usize,
    max_gens: usize,
    class_cap: usize,
) -> Presentation {
    let m = rng.gen_range(min_gens..=max_gens);
    let ctx = Arc::new(FreeLieContext::new(m, class_cap).expect("valid context"));
    let mut divisors: Vec<u32> = (0..m)
        .map(|_| *[0u32, 2, 4, 8, 16].choose(rng).expect("nonempty"))
        .collect();
    divisors.sort_by_key(|&d| if d == 0 { u32::MAX } else { d });
    let mut relators = Vec::new();
    for (i, &e) in divisors.iter().enumerate() {
        let xi = random_homogeneous(rng, &ctx, 2..=3.min(class_cap), 3, 4);
        let r = ctx.generator(i).scale(&BigInt::from(e)).add(&xi);
        if !r.is_zero() {
            relators.push(r);
        }
    }
    Presentation::new(ctx, relators, class_cap).expect("nonzero relators")
}

/// Perturbations of the four-generator counterexample: divisors
/// `(4, 16, 64)` or `(8, 32, 128)`, random signs on the degree-two parts
/// and random degree-three tails. Most of them have `delta_4 != gamma_4`.
pub fn random_counterexample_variant<R: Rng>(rng: &mut R) -> Presentation {
    let ctx = Arc::new(FreeLieContext::new(4, 4).expect("valid context"));
    let scale = if rng.gen_bool(0.5) { 1 } else { 2 };
    let divisors = [4 * scale, 16 * scale, 64 * scale];
    let parts: [[(i64, usize); 2]; 3] = [[(2, 2), (1, 1)], [(4, 2), (-1, 0)], [(-4, 1), (-2, 0)]];
    let relators = (0..3)
        .map(|i| {
            let mut v = ctx.generator(i).scale(&BigInt::from(divisors[i]));
            for &(c, j) in &parts[i] {
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                v.add_scaled(&BigInt::from(sign * c), &ctx.left_normed(&[3, j]));
            }
            v.add(&random_homogeneous(rng, &ctx, 3..=3, 3, 4))
        })
        .collect();
    Presentation::new(ctx, relators, 4).expect("nonzero relators")
}
