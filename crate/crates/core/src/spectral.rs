//! ξ-diagonalization of the order-3 elements `Q_γ` and the invariant block
//! decompositions obtained from commutant supports.
//!
//! Over `omega(R)` with `3` a unit, commuting elements `Q_{γ_1}, …, Q_{γ_k}`
//! are simultaneously diagonalized by spectral projectors
//! `E_λ(Q) = (1 + λ⁻¹Q + λ⁻²Q²)/3`: row `β` of the transition matrix `P` is
//! `e_βᵀ Π_k E_{λ_k}(Q_{γ_k})` with `λ_k = ξ^{⟨β,γ_k⟩}` on root lines and
//! `λ_k = 1` on Cartan lines, so that `P Q_{γ_k} P⁻¹ = h_{γ_k}(ξ)`.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::chevalley::Adjoint;
use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::linalg::Echelon;
use crate::matrix::RingMatrix;
use crate::rings::{Elem, Ring, RingKind};
use crate::rootsys::{Coords2, Family, RootSystem};

/// A simultaneous diagonalization `P Q_{γ_k} P⁻¹ = D_k`.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub transition: RingMatrix,
    pub diagonals: Vec<RingMatrix>,
}

/// Diagonalizes `Q_α` over `ring = omega(base)`; returns `(P, D)`.
pub fn diagonalize_q(adj: &Adjoint, ring: &Ring, alpha: usize) -> Result<(RingMatrix, RingMatrix)> {
    let mut d = diagonalize_commuting(adj, ring, &[alpha])?;
    Ok((d.transition, d.diagonals.remove(0)))
}

/// Simultaneously diagonalizes `Q_γ` for mutually orthogonal roots `gammas`.
pub fn diagonalize_commuting(adj: &Adjoint, ring: &Ring, gammas: &[usize]) -> Result<Diagonalization> {
    let RingKind::OmegaExtension(base) = ring.kind() else {
        return Err(Error::MalformedSpec(format!("{ring} is not an omega extension")));
    };
    let three = base.from_i64(3);
    if !base.is_unit(&three) {
        return Err(Error::NonUnit { ring: base.spec(), value: "3".into() });
    }
    let one_minus_xi = ring.sub(&ring.one(), &ring.xi()?);
    if !ring.is_unit(&one_minus_xi) {
        return Err(Error::NonUnit { ring: ring.spec(), value: "1-ξ".into() });
    }
    let rs = adj.system();
    for (i, &a) in gammas.iter().enumerate() {
        if gammas[..i].iter().any(|&b| rs.pairing(a, b) != 0) {
            return Err(Error::Assertion("diagonalized roots must be mutually orthogonal".into()));
        }
    }
    let n = adj.dim();
    let inv3 = ring.invert(&ring.from_i64(3))?;
    let xi = ring.xi()?;
    let powers = [ring.one(), xi.clone(), ring.mul(&xi, &xi)];
    // projectors[k][p] = E_{ξ^p}(Q_{γ_k}).
    let mut projectors = Vec::with_capacity(gammas.len());
    for &g in gammas {
        let q = adj.q_elem(ring, g)?;
        let q2 = q.mul(&q);
        let id = RingMatrix::identity(ring, n);
        let proj: Vec<RingMatrix> = (0..3)
            .map(|p| {
                let lam_inv = &powers[(3 - p) % 3];
                let lam_inv2 = ring.mul(lam_inv, lam_inv);
                id.add(&q.scale(lam_inv)).add(&q2.scale(&lam_inv2)).scale(&inv3)
            })
            .collect();
        projectors.push(proj);
    }
    let exponent = |b: usize, g: usize| -> usize {
        if b < rs.num_roots() { rs.pairing(b, g).rem_euclid(3) as usize } else { 0 }
    };
    let mut p = RingMatrix::zero(ring, n);
    for b in 0..n {
        let mut row: Vec<Elem> = (0..n).map(|j| if j == b { ring.one() } else { ring.zero() }).collect();
        for (k, &g) in gammas.iter().enumerate() {
            row = row_times(ring, &row, &projectors[k][exponent(b, g)]);
        }
        for (j, v) in row.into_iter().enumerate() {
            p.set(b, j, v);
        }
    }
    let p_inv = p.inverse().map_err(|_| Error::SingularTransition)?;
    let mut diagonals = Vec::with_capacity(gammas.len());
    for (k, &g) in gammas.iter().enumerate() {
        let d = adj.h_diagonal(ring, g, &xi)?;
        let q = adj.q_elem(ring, g)?;
        if p.mul(&q).mul(&p_inv) != d {
            return Err(Error::Assertion(format!("transition does not diagonalize Q for position {k}")));
        }
        diagonals.push(d);
    }
    Ok(Diagonalization { transition: p, diagonals })
}

fn row_times(ring: &Ring, row: &[Elem], m: &RingMatrix) -> Vec<Elem> {
    let n = m.n();
    let mut out = vec![ring.zero(); n];
    for (k, v) in row.iter().enumerate() {
        if ring.is_zero(v) {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            let e = m.get(k, j);
            if !ring.is_zero(e) {
                *o = ring.add(o, &ring.mul(v, e));
            }
        }
    }
    out
}

/// Multiplicities of `(1, ξ, ξ²)` on the diagonal of `d`.
pub fn eigen_multiplicities(ring: &Ring, d: &RingMatrix) -> Result<[usize; 3]> {
    let xi = ring.xi()?;
    let xi2 = ring.mul(&xi, &xi);
    let mut m = [0; 3];
    for i in 0..d.n() {
        let e = d.get(i, i);
        if ring.is_one(e) {
            m[0] += 1;
        } else if *e == xi {
            m[1] += 1;
        } else if *e == xi2 {
            m[2] += 1;
        } else {
            return Err(Error::Assertion(format!("diagonal entry {} is not a cube root of 1", ring.format(e))));
        }
    }
    Ok(m)
}

/// Positions `(i, j)` where some matrix commuting with every known matrix
/// can be nonzero. The knowns must be matrices over a finite field.
///
/// The commutation system decouples along the connected components of the
/// knowns' support graph: unknowns `M_{ab}` with `a ∈ A`, `b ∈ B` only meet
/// equations at positions in `A × B`. Each block is solved separately and the
/// supports of a full nullspace basis are collected.
pub fn centralizer_pattern(knowns: &[RingMatrix]) -> Result<BTreeSet<(usize, usize)>> {
    let Some(first) = knowns.first() else {
        return Err(Error::Assertion("centralizer pattern needs at least one known matrix".into()));
    };
    let n = first.n();
    let field = FiniteField::new(first.ring())?;
    if knowns.iter().any(|k| k.n() != n) {
        return Err(Error::DimensionMismatch("known matrices differ in size".into()));
    }
    let encoded: Vec<Vec<Vec<Fe>>> = knowns.iter().map(|k| k.encode(&field)).collect();
    let mut uf = UnionFind::new(n);
    for k in &encoded {
        for (i, row) in k.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    uf.union(i, j);
                }
            }
        }
    }
    let comps = uf.components();
    let pairs: Vec<(usize, usize)> =
        (0..comps.len()).flat_map(|a| (0..comps.len()).map(move |b| (a, b))).collect();
    let supports: Vec<Vec<(usize, usize)>> = pairs
        .par_iter()
        .map(|&(a, b)| commutant_block(&field, &encoded, &comps[a], &comps[b]))
        .collect();
    Ok(supports.into_iter().flatten().collect())
}

/// Support of the commutant restricted to rows `rows` and columns `cols`.
fn commutant_block(field: &FiniteField, knowns: &[Vec<Vec<Fe>>], rows: &[usize], cols: &[usize]) -> Vec<(usize, usize)> {
    let (nr, nc) = (rows.len(), cols.len());
    let var = |r: usize, c: usize| r * nc + c;
    let mut ech = Echelon::new(field, nr * nc);
    for k in knowns {
        for (ri, &i) in rows.iter().enumerate() {
            for (ci, &j) in cols.iter().enumerate() {
                // (M K − K M)_{ij} = Σ_{c} M_{i c} K_{c j} − Σ_{r} K_{i r} M_{r j}.
                let mut eq = vec![0; nr * nc];
                for (cc, &c) in cols.iter().enumerate() {
                    let v = k[c][j];
                    if v != 0 {
                        eq[var(ri, cc)] = field.add(eq[var(ri, cc)], v);
                    }
                }
                for (rr, &r) in rows.iter().enumerate() {
                    let v = k[i][r];
                    if v != 0 {
                        eq[var(rr, ci)] = field.sub(eq[var(rr, ci)], v);
                    }
                }
                if eq.iter().any(|&x| x != 0) {
                    ech.insert(eq);
                }
            }
        }
    }
    let mut support = BTreeSet::new();
    for v in ech.nullspace() {
        for (idx, &x) in v.iter().enumerate() {
            if x != 0 {
                support.insert((rows[idx / nc], cols[idx % nc]));
            }
        }
    }
    support.into_iter().collect()
}

/// A partition of the Chevalley basis into invariant parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    /// Sorted parts, ordered by their smallest index.
    pub parts: Vec<Vec<usize>>,
}

impl BlockPartition {
    /// Builds a normalized partition from arbitrary parts.
    pub fn new(mut parts: Vec<Vec<usize>>) -> BlockPartition {
        for p in &mut parts {
            p.sort_unstable();
            p.dedup();
        }
        parts.retain(|p| !p.is_empty());
        parts.sort();
        BlockPartition { parts }
    }

    /// Whether the parts are disjoint and cover `0..n`.
    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for &i in self.parts.iter().flatten() {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// Index of the part containing basis vector `i`.
    pub fn part_of(&self, i: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.binary_search(&i).is_ok())
    }

    /// The parts as a set of sets, independent of ordering.
    pub fn as_set(&self) -> BTreeSet<Vec<usize>> {
        self.parts.iter().cloned().collect()
    }

    /// Labels every part with the basis labels of `rs`.
    pub fn labels(&self, rs: &RootSystem) -> Vec<Vec<String>> {
        self.parts.iter().map(|p| p.iter().map(|&i| rs.basis_label(i)).collect()).collect()
    }
}

/// Connected components of the symmetric closure of a support pattern on
/// `0..n`.
pub fn block_partition(n: usize, pattern: &BTreeSet<(usize, usize)>) -> BlockPartition {
    let mut uf = UnionFind::new(n);
    for &(i, j) in pattern {
        uf.union(i, j);
    }
    BlockPartition::new(uf.components())
}

/// [`block_partition`] followed by merging every root line with its negative.
pub fn block_partition_signed(rs: &RootSystem, pattern: &BTreeSet<(usize, usize)>) -> BlockPartition {
    let mut uf = UnionFind::new(rs.dim());
    for &(i, j) in pattern {
        uf.union(i, j);
    }
    for r in 0..rs.num_roots() {
        uf.union(r, rs.negate(r));
    }
    BlockPartition::new(uf.components())
}

/// Which unknown the block decomposition is computed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// The image of `x_{α_1}(1)`: commutes with `Q_{γ_j}`, `j ≥ 2`.
    X1,
    /// The image of `x_{α_2}(1)`: commutes with `Q_{γ_j}`, `j ≥ 3`.
    X2,
}

impl std::str::FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Target> {
        match s {
            "x1" => Ok(Target::X1),
            "x2" => Ok(Target::X2),
            other => Err(Error::MalformedSpec(format!("unknown target {other:?} (expected x1 or x2)"))),
        }
    }
}

impl Target {
    /// Number of leading sequence roots the target does not commute with.
    fn skipped(self) -> usize {
        match self {
            Target::X1 => 1,
            Target::X2 => 2,
        }
    }
}

/// The diagonal forms `h_{γ_j}(ξ)` over `F_4` of the known `Q_{γ_j}` for a
/// target.
pub fn known_diagonals(adj: &Adjoint, target: Target) -> Result<Vec<RingMatrix>> {
    let f4 = FiniteField::f4();
    let ring = f4.ring().clone();
    let xi = ring.xi()?;
    let seq = adj.system().orthogonal_sequence();
    seq.gammas.iter().skip(target.skipped()).map(|&g| adj.h_diagonal(&ring, g, &xi)).collect()
}

/// The invariant block decomposition for a target: connected components of
/// the `F_4` commutant support of the known diagonal forms, closed under
/// negation.
pub fn computed_partition(adj: &Adjoint, target: Target) -> Result<BlockPartition> {
    let knowns = known_diagonals(adj, target)?;
    let rs = adj.system();
    if knowns.is_empty() {
        return Ok(BlockPartition::new(vec![(0..rs.dim()).collect()]));
    }
    Ok(block_partition_signed(rs, &centralizer_pattern(&knowns)?))
}

/// The hand-derived partition lists (as printed for type `A` with odd rank,
/// type `D`, and the `E_8` template restricted to the smaller `E` systems).
/// Returns `None` for system/target pairs without such a list.
pub fn printed_partition(rs: &RootSystem, target: Target) -> Option<BlockPartition> {
    let dim = rs.ambient_dim();
    let e = |terms: &[(i32, usize)]| -> Coords2 { crate::rootsys::e_combo(dim, terms) };
    let mut parts: Vec<Vec<Coords2>> = Vec::new();
    let cartan: Vec<usize> = (1..=rs.rank()).map(|i| rs.h_index(i)).collect();
    let mut first_extra: Vec<Coords2> = Vec::new();
    match (rs.family(), target) {
        (Family::A, Target::X1) if rs.rank() % 2 == 1 => {
            let d = rs.rank() + 1;
            first_extra.push(e(&[(1, 1), (-1, 2)]));
            for i in (3..=d).step_by(2) {
                parts.push(vec![
                    e(&[(1, 1), (-1, i)]),
                    e(&[(1, 2), (-1, i)]),
                    e(&[(1, 1), (-1, i + 1)]),
                    e(&[(1, 2), (-1, i + 1)]),
                    e(&[(1, i), (-1, i + 1)]),
                ]);
            }
            for i in (3..=d).step_by(2) {
                for j in (i + 2..=d).step_by(2) {
                    parts.push(vec![
                        e(&[(1, i), (-1, j)]),
                        e(&[(1, i), (-1, j + 1)]),
                        e(&[(1, i + 1), (-1, j)]),
                        e(&[(1, i + 1), (-1, j + 1)]),
                    ]);
                }
            }
        }
        (Family::A, Target::X2) if rs.rank() % 2 == 1 && rs.rank() >= 3 => {
            let d = rs.rank() + 1;
            for a in 1..=4 {
                for b in a + 1..=4 {
                    first_extra.push(e(&[(1, a), (-1, b)]));
                }
            }
            for i in (5..=d).step_by(2) {
                parts.push(
                    (1..=4).flat_map(|a| [e(&[(1, a), (-1, i)]), e(&[(1, a), (-1, i + 1)])]).collect(),
                );
                parts.push(vec![e(&[(1, i), (-1, i + 1)])]);
            }
            for i in (5..=d).step_by(2) {
                for j in (i + 2..=d).step_by(2) {
                    parts.push(vec![
                        e(&[(1, i), (-1, j)]),
                        e(&[(1, i), (-1, j + 1)]),
                        e(&[(1, i + 1), (-1, j)]),
                        e(&[(1, i + 1), (-1, j + 1)]),
                    ]);
                }
            }
        }
        (Family::D, Target::X1) | (Family::E, Target::X1) => {
            let top = if rs.family() == Family::D { dim } else { 8 };
            first_extra.push(e(&[(1, 1), (-1, 2)]));
            parts.push(vec![e(&[(1, 1), (1, 2)])]);
            for i in 3..=top {
                parts.push(vec![e(&[(1, 1), (-1, i)]), e(&[(1, 2), (-1, i)])]);
                parts.push(vec![e(&[(1, 1), (1, i)]), e(&[(1, 2), (1, i)])]);
            }
            for i in 3..=top {
                for j in i + 1..=top {
                    parts.push(vec![e(&[(1, i), (-1, j)])]);
                    parts.push(vec![e(&[(1, i), (1, j)])]);
                }
            }
            if rs.family() == Family::E {
                let halves = |same: bool| -> Vec<Coords2> {
                    rs.roots().iter().filter(|v| v[0].abs() == 1 && (v[0] == v[1]) == same).cloned().collect()
                };
                parts.push(halves(false));
                parts.push(halves(true));
            }
        }
        _ => return None,
    }
    // Resolve to basis indices, closing each listed root under negation and
    // dropping roots outside the system (for restricted templates).
    let resolve = |roots: &[Coords2]| -> Vec<usize> {
        roots
            .iter()
            .filter_map(|v| rs.root_index(v))
            .flat_map(|r| [r, rs.negate(r)])
            .collect()
    };
    let mut out: Vec<Vec<usize>> = parts.iter().map(|p| resolve(p)).collect();
    let mut first = resolve(&first_extra);
    first.extend(cartan);
    out.push(first);
    Some(BlockPartition::new(out))
}

/// Minimal union–find over `0..n`.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn components(&mut self) -> Vec<Vec<usize>> {
        let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..self.parent.len() {
            let r = self.find(i);
            map.entry(r).or_default().push(i);
        }
        let mut comps: Vec<Vec<usize>> = map.into_values().collect();
        comps.sort();
        comps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalization_over_omega_z4() {
        let ring = Ring::parse("omega(Z/4)").unwrap();
        for name in ["A3", "A5", "D4"] {
            let adj = Adjoint::parse(name).unwrap();
            let a1 = adj.system().simple(1);
            let (_, d) = diagonalize_q(&adj, &ring, a1).unwrap();
            let m = eigen_multiplicities(&ring, &d).unwrap();
            assert_eq!(m[1], m[2], "{name}");
            assert!(m[1] > 0);
        }
        let adj = Adjoint::parse("A5").unwrap();
        let seq = adj.system().orthogonal_sequence();
        assert_eq!(diagonalize_commuting(&adj, &ring, &seq.gammas).unwrap().diagonals.len(), 3);
    }

    #[test]
    fn diagonalization_needs_invertible_three() {
        let adj = Adjoint::parse("A3").unwrap();
        let ring = Ring::parse("omega(Z/3)").unwrap();
        assert!(matches!(diagonalize_q(&adj, &ring, 0), Err(Error::NonUnit { .. })));
        assert!(diagonalize_q(&adj, &Ring::parse("Z/4").unwrap(), 0).is_err());
    }

    #[test]
    fn pattern_of_identity_is_everything() {
        let f4 = FiniteField::f4();
        let id = RingMatrix::identity(f4.ring(), 5);
        assert_eq!(centralizer_pattern(&[id]).unwrap().len(), 25);
    }

    #[test]
    fn pattern_shrinks_with_more_knowns() {
        let adj = Adjoint::parse("A3").unwrap();
        let f2 = Ring::parse("Z/2").unwrap();
        let q1 = adj.q_elem(&f2, adj.system().simple(1)).unwrap();
        let q3 = adj.q_elem(&f2, adj.system().simple(3)).unwrap();
        let p1 = centralizer_pattern(&[q1.clone()]).unwrap();
        let p13 = centralizer_pattern(&[q1, q3]).unwrap();
        assert!(p13.is_subset(&p1));
        assert!(p13.len() < p1.len());
    }

    #[test]
    fn a5_pattern_excludes_cross_positions() {
        let adj = Adjoint::parse("A5").unwrap();
        let rs = adj.system();
        let f4 = FiniteField::f4();
        let ring = f4.ring().clone();
        let seq = rs.orthogonal_sequence();
        let qs: Vec<RingMatrix> = seq.gammas.iter().map(|&g| adj.q_elem(&ring, g).unwrap()).collect();
        let pattern = centralizer_pattern(&qs).unwrap();
        let a = rs.expect_root(&crate::rootsys::e_combo(6, &[(1, 1), (-1, 2)]));
        let b = rs.expect_root(&crate::rootsys::e_combo(6, &[(1, 3), (-1, 5)]));
        assert!(!pattern.contains(&(a, b)));
    }

    #[test]
    fn computed_partitions_are_partitions() {
        for name in ["A3", "A5", "D4", "D5", "E6"] {
            let adj = Adjoint::parse(name).unwrap();
            for t in [Target::X1, Target::X2] {
                let p = computed_partition(&adj, t).unwrap();
                assert!(p.is_partition_of(adj.dim()), "{name}");
            }
        }
    }

    #[test]
    fn printed_lists_are_partitions() {
        for (name, t) in [("A5", Target::X1), ("A5", Target::X2), ("A7", Target::X2), ("D4", Target::X1), ("D5", Target::X1), ("E6", Target::X1), ("E8", Target::X1)] {
            let rs = RootSystem::parse(name).unwrap();
            let p = printed_partition(&rs, t).unwrap();
            assert!(p.is_partition_of(rs.dim()), "{name}");
        }
    }

    #[test]
    fn d4_matches_printed_list() {
        let adj = Adjoint::parse("D4").unwrap();
        let computed = computed_partition(&adj, Target::X1).unwrap();
        let printed = printed_partition(adj.system(), Target::X1).unwrap();
        assert_eq!(computed.as_set(), printed.as_set());
    }
}
