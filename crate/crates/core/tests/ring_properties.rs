//! Ring axioms, units versus radical, and the residue homomorphism on random
//! elements of every concrete ring.

use chevkit_core::pipeline::{ring_axiom_failures, AXIOM_RINGS};
use chevkit_core::Ring;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LOCAL_RINGS: [&str; 8] = ["Z/4", "Z/8", "Z/9", "Z/5", "dual(Z/2)", "Zodd", "omega(Z/4)", "dual(residue(Z/2))"];

#[test]
fn axioms_hold_on_200_triples() {
    for spec in AXIOM_RINGS.iter().chain(["Z", "Z/6", "omega(Z/2)"].iter()) {
        let ring = Ring::parse(spec).unwrap();
        let failures = ring_axiom_failures(&ring, 200, 11);
        assert!(failures.is_empty(), "{spec}: {failures:?}");
    }
}

#[test]
fn rings_without_half_have_invertible_three() {
    for spec in ["Z/4", "Z/8", "dual(Z/2)", "Zodd", "omega(Z/4)", "dual(residue(Z/2))"] {
        let ring = Ring::parse(spec).unwrap();
        assert!(ring.is_local_without_half(), "{spec}");
        assert!(ring.in_radical(&ring.from_i64(2)).unwrap(), "{spec}");
        assert!(ring.is_unit(&ring.from_i64(3)), "{spec}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unit_xor_radical(ring_idx in 0..LOCAL_RINGS.len(), seed in any::<u64>()) {
        let ring = Ring::parse(LOCAL_RINGS[ring_idx]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ring.random_elem(&mut rng);
        prop_assert!(ring.is_unit(&a) != ring.in_radical(&a).unwrap());
    }

    #[test]
    fn residue_map_is_a_ring_homomorphism(ring_idx in 0..LOCAL_RINGS.len(), seed in any::<u64>()) {
        let ring = Ring::parse(LOCAL_RINGS[ring_idx]).unwrap();
        let k = ring.residue_field().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (ring.random_elem(&mut rng), ring.random_elem(&mut rng));
        let (ra, rb) = (ring.residue_map(&a).unwrap(), ring.residue_map(&b).unwrap());
        prop_assert_eq!(ring.residue_map(&ring.mul(&a, &b)).unwrap(), k.mul(&ra, &rb));
        prop_assert_eq!(ring.residue_map(&ring.add(&a, &b)).unwrap(), k.add(&ra, &rb));
        prop_assert!(k.is_one(&ring.residue_map(&ring.one()).unwrap()));
    }

    #[test]
    fn unit_inverses_are_exact(ring_idx in 0..LOCAL_RINGS.len(), seed in any::<u64>()) {
        let ring = Ring::parse(LOCAL_RINGS[ring_idx]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = ring.random_unit(&mut rng);
        let inv = ring.invert(&u).unwrap();
        prop_assert!(ring.is_one(&ring.mul(&u, &inv)));
    }

    #[test]
    fn element_text_round_trips(ring_idx in 0..LOCAL_RINGS.len(), seed in any::<u64>()) {
        let ring = Ring::parse(LOCAL_RINGS[ring_idx]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ring.random_elem(&mut rng);
        prop_assert_eq!(ring.parse_elem(&ring.format(&a)).unwrap(), a.clone());
        prop_assert_eq!(ring.from_json(&ring.to_json(&a)).unwrap(), a);
    }
}
