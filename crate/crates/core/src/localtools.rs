//! Order-3 idempotent decompositions over local rings with 3 invertible.
//!
//! For `a³ = 1` the element `e = (1 + a + a²)/3` is an idempotent projecting
//! onto the submodule on which `a` acts identically; `1 − e` projects onto
//! the complement, where `a` acts by blocks `[[0, −1], [1, −1]]`. Over a local
//! ring both images are free, of ranks read off the residue matrices.

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::linalg::rank;
use crate::matrix::RingMatrix;
use crate::rings::Ring;

/// The decomposition defined by an order-3 matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdempotentSplit {
    /// `e = (1 + a + a²)/3`, the projection onto the `a`-fixed part.
    pub e: RingMatrix,
    /// Rank of the residue of `e`: the rank of the part where `a` acts as 1.
    pub rank0: usize,
    /// Rank of the residue of `1 − e`: the rank of the part without fixed
    /// vectors (always even).
    pub rank1: usize,
}

fn check_local_with_three(ring: &Ring) -> Result<()> {
    if !ring.is_local() {
        return Err(Error::NotLocal(ring.spec()));
    }
    let three = ring.from_i64(3);
    if !ring.is_unit(&three) {
        return Err(Error::NonUnit { ring: ring.spec(), value: ring.format(&three) });
    }
    Ok(())
}

/// Rank of a matrix over a local ring: the rank of its residue matrix.
pub fn residue_rank(m: &RingMatrix) -> Result<usize> {
    let residue = m.residue()?;
    let field = FiniteField::new(residue.ring())?;
    Ok(rank(&field, &residue.encode(&field), m.n()))
}

/// `(1 + a + a²)/3` without any checks on `a`.
pub fn order3_idempotent(a: &RingMatrix) -> Result<RingMatrix> {
    let ring = a.ring();
    let third = ring.invert(&ring.from_i64(3))?;
    let id = RingMatrix::identity(ring, a.n());
    Ok(id.add(a).add(&a.mul(a)).scale(&third))
}

/// Splits the free module along `a` with `a³ = 1`.
pub fn order3_split(a: &RingMatrix) -> Result<IdempotentSplit> {
    let ring = a.ring();
    check_local_with_three(ring)?;
    if !a.pow(3).is_identity() {
        return Err(Error::Order3Violation);
    }
    let e = order3_idempotent(a)?;
    let complement = RingMatrix::identity(ring, a.n()).sub(&e);
    Ok(IdempotentSplit { rank0: residue_rank(&e)?, rank1: residue_rank(&complement)?, e })
}

/// A matrix `T` with `T a T⁻¹ = b` for order-3 matrices congruent modulo the
/// radical.
///
/// `T = (1 + b a⁻¹ + b² a⁻²)/3` satisfies `T a = b T` because `a³ = b³ = 1`,
/// and `T ≡ 1` modulo the radical because `b a⁻¹ ≡ 1`; hence `T` is a unit.
/// It maps the `a`-fixed part onto the `b`-fixed part, lifting the common
/// residue decomposition.
pub fn conjugacy_witness(a: &RingMatrix, b: &RingMatrix) -> Result<RingMatrix> {
    let ring = a.ring();
    if b.ring() != ring || b.n() != a.n() {
        return Err(Error::DimensionMismatch("conjugacy_witness needs matrices of one shape and ring".into()));
    }
    check_local_with_three(ring)?;
    if !a.pow(3).is_identity() || !b.pow(3).is_identity() {
        return Err(Error::Order3Violation);
    }
    if a.residue()? != b.residue()? {
        return Err(Error::NotCongruent);
    }
    // a⁻¹ = a², a⁻² = a.
    let ratio = b.mul(&a.mul(a));
    let third = ring.invert(&ring.from_i64(3))?;
    let t = RingMatrix::identity(ring, a.n()).add(&ratio).add(&b.mul(b).mul(a)).scale(&third);
    let t_inv = t.inverse()?;
    if t.mul(a).mul(&t_inv) != *b {
        return Err(Error::Assertion("averaged intertwiner does not conjugate a to b".into()));
    }
    Ok(t)
}

/// The order-3 block `[[0, −1], [1, −1]]`.
pub fn rotation_block(ring: &Ring) -> RingMatrix {
    RingMatrix::from_i64_rows(ring, &[vec![0, -1], vec![1, -1]])
}

/// A random invertible matrix: a product of random elementary matrices and a
/// random unit diagonal.
pub fn random_unimodular<G: rand::Rng + ?Sized>(ring: &Ring, n: usize, rng: &mut G) -> RingMatrix {
    let mut m = RingMatrix::diagonal(ring, &(0..n).map(|_| ring.random_unit(rng)).collect::<Vec<_>>());
    if n < 2 {
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let mut el = RingMatrix::identity(ring, n);
        el.set(i, j, ring.random_elem(rng));
        m = m.mul(&el);
    }
    m
}

/// A random order-3 matrix: `k` rotation blocks and `n − 2k` ones on the
/// diagonal, conjugated by a random unimodular matrix.
pub fn random_order3<G: rand::Rng + ?Sized>(ring: &Ring, n: usize, rng: &mut G) -> RingMatrix {
    let blocks = rng.gen_range(0..=n / 2);
    let rot = rotation_block(ring);
    let mut d = RingMatrix::identity(ring, n);
    for k in 0..blocks {
        for i in 0..2 {
            for j in 0..2 {
                d.set(2 * k + i, 2 * k + j, rot.get(i, j).clone());
            }
        }
    }
    let p = random_unimodular(ring, n, rng);
    let p_inv = p.inverse().expect("unimodular by construction");
    p.mul(&d).mul(&p_inv)
}

/// A random matrix with entries in the radical of a finite local ring.
pub fn random_radical<G: rand::Rng + ?Sized>(ring: &Ring, n: usize, rng: &mut G) -> RingMatrix {
    let radical: Vec<_> = ring
        .elements()
        .expect("finite ring")
        .into_iter()
        .filter(|x| ring.in_radical(x).unwrap_or(false))
        .collect();
    RingMatrix::from_fn(ring, n, |_, _| radical[rng.gen_range(0..radical.len())].clone())
}
