//! `P Q_α P⁻¹ = D` for every simple root of every supported system, with
//! equal `ξ` and `ξ²` multiplicities.

use chevkit_core::chevalley::Adjoint;
use chevkit_core::spectral::{diagonalize_q, eigen_multiplicities};
use chevkit_core::Ring;
use rayon::prelude::*;

fn check(system: &str, ring: &Ring) {
    let adj = Adjoint::parse(system).unwrap();
    let rs = adj.system();
    (1..=rs.rank()).into_par_iter().for_each(|i| {
        let alpha = rs.simple(i);
        let (p, d) = diagonalize_q(&adj, ring, alpha).unwrap();
        let q = adj.q_elem(ring, alpha).unwrap();
        assert_eq!(p.mul(&q), d.mul(&p), "{system} α{i} over {}", ring.spec());
        assert!(d.is_diagonal());
        let [_, xi, xi2] = eigen_multiplicities(ring, &d).unwrap();
        assert_eq!(xi, xi2, "{system} α{i}");
    });
}

#[test]
fn every_simple_root_over_omega_z4() {
    let ring = Ring::parse("omega(Z/4)").unwrap();
    for system in ["A2", "A3", "A4", "A5", "A7", "D4", "D5", "D6", "E6", "E7", "E8"] {
        check(system, &ring);
    }
}

#[test]
fn residue_chains_over_two() {
    for spec in ["omega(Z/2)", "omega(Z/8)", "omega(dual(Z/2))"] {
        let ring = Ring::parse(spec).unwrap();
        for system in ["A3", "A5", "D4", "E6"] {
            check(system, &ring);
        }
    }
}
