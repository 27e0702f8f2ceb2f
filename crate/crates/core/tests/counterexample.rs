use std::time::Instant;

use liedim::dimsub::{
    counterexample_auxiliary, counterexample_element, counterexample_presentation, delta_lattice,
    dimension_quotient, DimQuery,
};
use liedim::AbelianInvariants;
use num_bigint::BigInt;

#[test]
fn auxiliary_quotient_invariants() {
    let aux = counterexample_auxiliary();
    let nq = aux.nilpotent_quotient().unwrap();
    let divisors: Vec<BigInt> = [2, 4, 8, 16, 16, 256, 256, 256]
        .iter()
        .map(|&d| BigInt::from(d))
        .collect();
    assert_eq!(
        *nq.invariants(),
        AbelianInvariants::from_divisors(divisors.iter(), 1)
    );
    let a = counterexample_element(aux.ctx());
    assert!(!nq.is_zero(&a));
}

#[test]
fn delta4_contains_a() {
    let t = Instant::now();
    let pres = counterexample_presentation(4);
    let a = counterexample_element(pres.ctx()).to_sparse();
    let q = DimQuery::new(pres.clone(), 4).unwrap();
    let delta = delta_lattice(&q).unwrap();
    let gamma = pres.gamma_lattice(4).unwrap();
    assert!(delta.contains(&a));
    assert!(!gamma.contains(&a));
    assert!(gamma.contains(&a.scale(&BigInt::from(2))));
    let r = dimension_quotient(&q).unwrap();
    println!("delta4/gamma4 = {} in {:?}", r.quotient, t.elapsed());
    assert!(r.quotient.exponent() == BigInt::from(2));
}
