//! Root-system invariants: sums versus pairings, reflection closure and
//! orthogonal-sequence connectors.

use chevkit_core::rootsys::RootSystem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SYSTEMS: [&str; 11] = ["A2", "A3", "A4", "A5", "A7", "D4", "D5", "D6", "E6", "E7", "E8"];

#[test]
fn sums_exist_exactly_for_pairing_minus_one() {
    for name in SYSTEMS {
        let rs = RootSystem::parse(name).unwrap();
        for a in 0..rs.num_roots() {
            for b in 0..rs.num_roots() {
                let expected = b != rs.negate(a) && rs.pairing(a, b) == -1;
                assert_eq!(rs.root_sum(a, b).is_some(), expected, "{name}: {} + {}", rs.format_root(a), rs.format_root(b));
                if let Some(c) = rs.root_sum(a, b) {
                    let sum: Vec<i32> = rs.coords2(a).iter().zip(rs.coords2(b)).map(|(x, y)| x + y).collect();
                    assert_eq!(rs.coords2(c), &sum);
                }
            }
        }
    }
}

fn reflection_closed(rs: &RootSystem, a: usize, b: usize) -> bool {
    rs.root_index(&rs.reflect(a, b)).is_some()
}

#[test]
fn reflections_preserve_the_roots() {
    for name in ["A3", "A4", "A5", "D4", "E6"] {
        let rs = RootSystem::parse(name).unwrap();
        for a in 0..rs.num_roots() {
            for b in 0..rs.num_roots() {
                assert!(reflection_closed(&rs, a, b), "{name}");
            }
        }
    }
    let e8 = RootSystem::parse("E8").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5000 {
        let (a, b) = (rng.gen_range(0..e8.num_roots()), rng.gen_range(0..e8.num_roots()));
        assert!(reflection_closed(&e8, a, b));
    }
}

#[test]
fn orthogonal_sequences_have_valid_connectors() {
    for name in SYSTEMS {
        let rs = RootSystem::parse(name).unwrap();
        let seq = rs.orthogonal_sequence();
        for (i, &gi) in seq.gammas.iter().enumerate() {
            for (j, &gj) in seq.gammas.iter().enumerate() {
                if i == j {
                    continue;
                }
                assert_eq!(rs.pairing(gi, gj), 0, "{name}: γ{} ⟂ γ{}", i + 1, j + 1);
                let c = seq.connector(i, j);
                assert_eq!((rs.pairing(gi, c), rs.pairing(gj, c)), (-1, -1), "{name}: connector ({i}, {j})");
            }
        }
    }
}

#[test]
fn json_description_lists_everything() {
    let rs = RootSystem::parse("D4").unwrap();
    let v = rs.to_json();
    assert_eq!(v["roots"].as_array().unwrap().len(), 24);
    assert_eq!(v["simples"].as_array().unwrap().len(), 4);
    assert_eq!(v["basis_order"].as_array().unwrap().len(), 28);
}
