//! Chevalley basis of the adjoint representation and the elementary matrices
//! `x_α(t)`, `w_α(t)`, `h_α(t)`, `Q_α` and `w_{i,j}` over any ring.
//!
//! Conventions (column `j` is the image of basis vector `v_j`):
//!
//! * `ad x_α : x_β ↦ N_{α,β} x_{α+β}`, `x_{−α} ↦ h_α = Σ c_i h_i` where
//!   `α = Σ c_i α_i`, and `h_i ↦ −⟨α, α_i⟩ x_α`;
//! * `x_α(t) = Σ_k t^k (ad x_α)^k / k!`;
//! * `w_α(t) = x_α(t) x_{−α}(−t⁻¹) x_α(t)`, `h_α(t) = w_α(t) w_α(1)⁻¹`,
//!   `Q_α = w_α(1) x_α(1)`.
//!
//! Structure constants are fixed by the extraspecial-pair recursion over the
//! height-ordered positive roots with every extraspecial sign equal to `+1`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::RingMatrix;
use crate::rings::{Elem, Ring};
use crate::rootsys::{OrthogonalSequence, RootSystem};

/// Signs `N_{α,β}` for all pairs of roots whose sum is a root.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    table: HashMap<(usize, usize), i32>,
}

impl StructureConstants {
    /// `N_{α,β}`, or `None` when `α + β` is not a root.
    pub fn get(&self, alpha: usize, beta: usize) -> Option<i32> {
        self.table.get(&(alpha, beta)).copied()
    }

    /// All entries `((α, β), N_{α,β})`.
    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &i32)> {
        self.table.iter()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Computes the structure constants by the extraspecial-pair recursion.
///
/// A bracket with integer structure constants is first obtained from the
/// Frenkel–Kac sign cocycle `ε`; then, walking the positive roots by height,
/// each root vector `x_ξ` is rescaled by `±1` so that its extraspecial pair
/// `(α, ξ − α)` (α minimal in basis order) has `N_{α, ξ−α} = +1`, and
/// `x_{−ξ}` is rescaled alongside so that `[x_ξ, x_{−ξ}] = h_ξ` is kept.
/// Since the extraspecial signs determine all others, this is the table the
/// recursion produces.
pub fn structure_constants(rs: &RootSystem) -> StructureConstants {
    let l = rs.rank();
    let nroots = rs.num_roots();
    // Bimultiplicative cocycle on simple roots: ε(α_i, α_j) = −1 iff i = j or
    // (i < j and ⟨α_i, α_j⟩ = −1).
    let eps = |a: usize, b: usize| -> i32 {
        let (ca, cb) = (rs.simple_coords(a), rs.simple_coords(b));
        let mut exp = 0i64;
        for i in 0..l {
            for j in 0..l {
                let flip = i == j || (i < j && rs.pairing(rs.simple(i + 1), rs.simple(j + 1)) == -1);
                if flip {
                    exp += (ca[i] * cb[j]) as i64;
                }
            }
        }
        if exp.rem_euclid(2) == 0 { 1 } else { -1 }
    };
    // Frenkel–Kac basis E_α: [E_α, E_β] = ε(α,β) E_{α+β}, [E_α, E_{−α}] = ε(α,−α) α^∨.
    // Chevalley normalization x_α = E_α (α > 0), x_{−α} = ε(α,−α) E_{−α}, so
    // [x_α, x_{−α}] = h_α. Scale factor s(β) with x_β = s(β) E_β:
    let mut scale: Vec<i32> = (0..nroots).map(|r| if rs.is_positive(r) { 1 } else { eps(r ^ 1, r) }).collect();
    let raw = |scale: &[i32], a: usize, b: usize| -> Option<i32> {
        let s = rs.root_sum(a, b)?;
        // [x_a, x_b] = s_a s_b ε(a,b) E_{a+b} = s_a s_b ε(a,b) s_{a+b}⁻¹ x_{a+b}.
        Some(scale[a] * scale[b] * eps(a, b) * scale[s])
    };
    // Extraspecial normalization, by increasing height.
    for xi in (0..nroots).filter(|&r| rs.is_positive(r) && rs.height(r) >= 2) {
        let alpha = (0..nroots)
            .filter(|&a| rs.is_positive(a))
            .find(|&a| rs.root_sum(xi, a ^ 1).is_some_and(|b| rs.is_positive(b)))
            .expect("every non-simple positive root has an extraspecial pair");
        let beta = rs.root_sum(xi, alpha ^ 1).expect("difference is a root");
        if raw(&scale, alpha, beta) == Some(-1) {
            scale[xi] = -scale[xi];
            scale[xi ^ 1] = -scale[xi ^ 1];
        }
    }
    let mut table = HashMap::new();
    for a in 0..nroots {
        for b in 0..nroots {
            if let Some(n) = raw(&scale, a, b) {
                table.insert((a, b), n);
            }
        }
    }
    StructureConstants { table }
}

/// A sparse integer matrix (column-indexed images).
#[derive(Clone, Debug, PartialEq, Eq)]
struct SparseInt {
    n: usize,
    /// `(row, col, value)` with nonzero values.
    entries: Vec<(usize, usize, BigInt)>,
}

/// Nonzero entries `(i, j, c)` of `(ad x_α)^k / k!`, one list per `k ≥ 1`.
type SparsePowers = Arc<Vec<Vec<(usize, usize, i64)>>>;

/// The adjoint representation of a root system, with cached integral data.
#[derive(Clone, Debug)]
pub struct Adjoint {
    rs: Arc<RootSystem>,
    sc: Arc<StructureConstants>,
    powers: Arc<Mutex<HashMap<usize, SparsePowers>>>,
}

impl Adjoint {
    pub fn new(rs: RootSystem) -> Adjoint {
        let sc = structure_constants(&rs);
        Adjoint { rs: Arc::new(rs), sc: Arc::new(sc), powers: Arc::default() }
    }

    /// Convenience constructor from a system name such as `"A3"`.
    pub fn parse(name: &str) -> Result<Adjoint> {
        Ok(Adjoint::new(RootSystem::parse(name)?))
    }

    pub fn system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.sc
    }

    /// Dimension `n = l + 2m`.
    pub fn dim(&self) -> usize {
        self.rs.dim()
    }

    /// `[x_α, v_j]` as a sparse column: list of `(row, coefficient)`.
    fn ad_column(&self, alpha: usize, j: usize) -> Vec<(usize, i64)> {
        let rs = &self.rs;
        let nroots = rs.num_roots();
        if j >= nroots {
            let i = j - nroots + 1;
            let c = -rs.pairing(alpha, rs.simple(i));
            return if c == 0 { vec![] } else { vec![(alpha, c as i64)] };
        }
        if j == alpha ^ 1 {
            return rs
                .simple_coords(alpha)
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (nroots + i, c as i64))
                .collect();
        }
        match (rs.root_sum(alpha, j), self.sc.get(alpha, j)) {
            (Some(s), Some(n)) => vec![(s, n as i64)],
            _ => vec![],
        }
    }

    /// Bracket of basis vectors `[v_a, v_b]` as a sparse vector, for any pair
    /// of basis indices (roots or Cartan elements).
    pub fn bracket_basis(&self, a: usize, b: usize) -> Vec<(usize, i64)> {
        let nroots = self.rs.num_roots();
        match (a < nroots, b < nroots) {
            (true, _) => self.ad_column(a, b),
            (false, true) => self.ad_column(b, a).into_iter().map(|(r, c)| (r, -c)).collect(),
            (false, false) => vec![],
        }
    }

    /// Bracket of two vectors given as dense integer coordinates.
    pub fn bracket(&self, u: &[i64], v: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.dim()];
        for (a, &ua) in u.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (b, &vb) in v.iter().enumerate().filter(|(_, x)| **x != 0) {
                for (r, c) in self.bracket_basis(a, b) {
                    out[r] += ua * vb * c;
                }
            }
        }
        out
    }

    fn ad_sparse(&self, alpha: usize) -> SparseInt {
        let n = self.dim();
        let mut entries = Vec::new();
        for j in 0..n {
            for (i, c) in self.ad_column(alpha, j) {
                entries.push((i, j, BigInt::from(c)));
            }
        }
        SparseInt { n, entries }
    }

    /// The integer matrix of `ad x_α` on the Chevalley basis.
    pub fn ad_matrix(&self, alpha: usize) -> RingMatrix {
        let z = Ring::integers();
        let mut m = RingMatrix::zero(&z, self.dim());
        for (i, j, v) in self.ad_sparse(alpha).entries {
            m.set(i, j, Elem::Int(v));
        }
        m
    }

    /// Integer matrices `(ad x_α)^k / k!` for `k = 0, 1, 2, …` up to nilpotency.
    pub fn divided_powers(&self, alpha: usize) -> Result<Vec<RingMatrix>> {
        let ad = self.ad_matrix(alpha);
        let mut out = vec![RingMatrix::identity(&Ring::integers(), self.dim())];
        let mut power = ad.clone();
        let mut k = 1;
        while !power.is_zero() {
            out.push(divided_power_of(&power, k)?);
            power = power.mul(&ad);
            k += 1;
        }
        Ok(out)
    }

    fn cached_divided_powers(&self, alpha: usize) -> Result<SparsePowers> {
        if let Some(p) = self.powers.lock().expect("cache lock").get(&alpha) {
            return Ok(p.clone());
        }
        let sparse: Vec<Vec<(usize, usize, i64)>> = self
            .divided_powers(alpha)?
            .iter()
            .skip(1)
            .map(|p| {
                p.support()
                    .into_iter()
                    .map(|(i, j)| match p.get(i, j) {
                        Elem::Int(c) => (i, j, c.to_i64().expect("adjoint divided powers have small entries")),
                        other => unreachable!("integer matrix holds {other:?}"),
                    })
                    .collect()
            })
            .collect();
        let p = Arc::new(sparse);
        self.powers.lock().expect("cache lock").insert(alpha, p.clone());
        Ok(p)
    }

    /// `x_α(t) = Σ_k t^k (ad x_α)^k / k!` over `ring`.
    pub fn x_elem(&self, ring: &Ring, alpha: usize, t: &Elem) -> Result<RingMatrix> {
        let powers = self.cached_divided_powers(alpha)?;
        let mut acc = RingMatrix::identity(ring, self.dim());
        let mut tk = ring.one();
        for entries in powers.iter() {
            tk = ring.mul(&tk, t);
            if ring.is_zero(&tk) {
                break;
            }
            for &(i, j, c) in entries {
                let v = ring.add(acc.get(i, j), &ring.mul(&ring.from_i64(c), &tk));
                acc.set(i, j, v);
            }
        }
        Ok(acc)
    }

    /// `w_α(t) = x_α(t) x_{−α}(−t⁻¹) x_α(t)`; `t` must be a unit.
    pub fn w_elem(&self, ring: &Ring, alpha: usize, t: &Elem) -> Result<RingMatrix> {
        let tinv = ring.invert(t)?;
        let x = self.x_elem(ring, alpha, t)?;
        let y = self.x_elem(ring, alpha ^ 1, &ring.neg(&tinv))?;
        Ok(x.mul(&y).mul(&x))
    }

    /// `h_α(t) = w_α(t) w_α(1)⁻¹`, computed from the product formula and
    /// checked to be diagonal.
    pub fn h_elem(&self, ring: &Ring, alpha: usize, t: &Elem) -> Result<RingMatrix> {
        let w = self.w_elem(ring, alpha, t)?;
        // w_α(1)⁻¹ = w_α(−1).
        let w1_inv = self.w_elem(ring, alpha, &ring.neg(&ring.one()))?;
        let h = w.mul(&w1_inv);
        if !h.is_diagonal() {
            return Err(Error::Assertion(format!("h_α(t) is not diagonal for root {alpha}")));
        }
        Ok(h)
    }

    /// The diagonal closed form of `h_α(t)`: `t^{⟨β,α⟩}` on `x_β`, 1 on `h_i`.
    pub fn h_diagonal(&self, ring: &Ring, alpha: usize, t: &Elem) -> Result<RingMatrix> {
        let rs = &self.rs;
        let mut diag = Vec::with_capacity(self.dim());
        for b in 0..rs.num_roots() {
            diag.push(ring.pow_signed(t, rs.pairing(b, alpha) as i64)?);
        }
        diag.extend((0..rs.rank()).map(|_| ring.one()));
        Ok(RingMatrix::diagonal(ring, &diag))
    }

    /// `Q_α = w_α(1) x_α(1)`, an element of order 3.
    pub fn q_elem(&self, ring: &Ring, alpha: usize) -> Result<RingMatrix> {
        let one = ring.one();
        Ok(self.w_elem(ring, alpha, &one)?.mul(&self.x_elem(ring, alpha, &one)?))
    }

    /// `w_{i,j} = w_{γ_{i,j}}(1) w_{γ_i}(1) w_{γ_j}(1) w_{γ_{i,j}}(1)` for
    /// 0-based sequence positions `i ≠ j`.
    pub fn wij_elem(&self, ring: &Ring, seq: &OrthogonalSequence, i: usize, j: usize) -> Result<RingMatrix> {
        if i == j {
            return Err(Error::Assertion("w_{i,j} needs i ≠ j".into()));
        }
        let one = ring.one();
        let c = self.w_elem(ring, seq.connector(i, j), &one)?;
        let wi = self.w_elem(ring, seq.gammas[i], &one)?;
        let wj = self.w_elem(ring, seq.gammas[j], &one)?;
        Ok(c.mul(&wi).mul(&wj).mul(&c))
    }
}

/// `M^k / k!` for an integer matrix `M^k`, signalling `DivisibilityViolation`
/// when an entry is not divisible.
fn divided_power_of(mk: &RingMatrix, k: usize) -> Result<RingMatrix> {
    let fact: BigInt = (1..=k).map(BigInt::from).product();
    let mut out = mk.clone();
    for i in 0..mk.n() {
        for j in 0..mk.n() {
            if let Elem::Int(v) = mk.get(i, j) {
                if !v.is_zero() {
                    let (q, r) = v.div_rem(&fact);
                    if !r.is_zero() {
                        return Err(Error::DivisibilityViolation { k, row: i, col: j });
                    }
                    out.set(i, j, Elem::Int(q));
                }
            }
        }
    }
    Ok(out)
}

/// `M^k / k!` for an integer matrix `M`.
pub fn divided_power(m: &RingMatrix, k: usize) -> Result<RingMatrix> {
    if k == 0 {
        return Ok(RingMatrix::identity(m.ring(), m.n()));
    }
    let _ = BigInt::one();
    divided_power_of(&m.pow(k as u64), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int;

    #[test]
    fn structure_constants_are_signs() {
        for name in ["A3", "D4", "E6"] {
            let adj = Adjoint::parse(name).unwrap();
            let rs = adj.system();
            let sc = adj.structure_constants();
            for (&(a, b), &n) in sc.iter() {
                assert!(n == 1 || n == -1);
                assert_eq!(sc.get(b, a), Some(-n), "antisymmetry in {name}");
                assert_eq!(sc.get(a ^ 1, b ^ 1), Some(-n), "N_{{-a,-b}} = -N_{{a,b}} in {name}");
            }
            let pairs = (0..rs.num_roots())
                .flat_map(|a| (0..rs.num_roots()).map(move |b| (a, b)))
                .filter(|&(a, b)| rs.pairing(a, b) == -1)
                .count();
            assert_eq!(sc.len(), pairs);
        }
    }

    #[test]
    fn jacobi_identity_a3_exhaustive() {
        let adj = Adjoint::parse("A3").unwrap();
        let n = adj.dim();
        let unit = |i: usize| -> Vec<i64> { (0..n).map(|k| (k == i) as i64).collect() };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (ua, ub, uc) = (unit(a), unit(b), unit(c));
                    let t1 = adj.bracket(&ua, &adj.bracket(&ub, &uc));
                    let t2 = adj.bracket(&ub, &adj.bracket(&uc, &ua));
                    let t3 = adj.bracket(&uc, &adj.bracket(&ua, &ub));
                    assert!(t1.iter().zip(&t2).zip(&t3).all(|((x, y), z)| x + y + z == 0));
                }
            }
        }
    }

    #[test]
    fn ad_matrix_examples() {
        let adj = Adjoint::parse("A3").unwrap();
        let rs = adj.system();
        let a1 = rs.simple(1);
        let ad = adj.ad_matrix(a1);
        // x_{−α1} ↦ h_1.
        assert_eq!(ad.get(rs.h_index(1), a1 ^ 1), &int(1));
        // (ad x_α)^4 = 0 and (ad x_α)^2/2 at (x_α1, x_{−α1}) is −1.
        assert!(ad.pow(4).is_zero());
        let half_sq = divided_power(&ad, 2).unwrap();
        assert_eq!(half_sq.get(a1, a1 ^ 1), &int(-1));
        assert_eq!(divided_power(&ad, 0).unwrap(), RingMatrix::identity(&Ring::integers(), 15));
        assert_eq!(divided_power(&ad, 1).unwrap(), ad);
    }

    #[test]
    fn q_has_order_three_and_wij_relations() {
        let adj = Adjoint::parse("A5").unwrap();
        let z4 = Ring::parse("Z/4").unwrap();
        for &r in adj.system().simples() {
            assert!(adj.q_elem(&z4, r).unwrap().pow(3).is_identity());
        }
        let seq = adj.system().orthogonal_sequence();
        let w13 = adj.wij_elem(&z4, &seq, 0, 1).unwrap();
        let w35 = adj.wij_elem(&z4, &seq, 1, 2).unwrap();
        assert!(w13.mul(&w13).is_identity());
        let q1 = adj.q_elem(&z4, seq.gammas[0]).unwrap();
        let q3 = adj.q_elem(&z4, seq.gammas[1]).unwrap();
        assert_eq!(w13.mul(&q1).mul(&w13), q3);
        assert!(w13.mul(&w35).pow(3).is_identity());
    }

    #[test]
    fn torus_element_matches_closed_form() {
        let adj = Adjoint::parse("A3").unwrap();
        let zodd = Ring::parse("Zodd").unwrap();
        let t = zodd.parse_elem("3/5").unwrap();
        for r in 0..adj.system().num_roots() {
            assert_eq!(adj.h_elem(&zodd, r, &t).unwrap(), adj.h_diagonal(&zodd, r, &t).unwrap());
        }
        assert!(adj.w_elem(&zodd, 0, &zodd.from_i64(2)).is_err());
    }
}
