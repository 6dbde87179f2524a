//! Simply-laced root systems `A_l`, `D_l`, `E_6`, `E_7`, `E_8`.
//!
//! Roots are stored in doubled Euclidean coordinates (`coords2`) so that the
//! half-integer roots of the E-series stay integral; every root has
//! `Σ coords2_i² = 8`.
//!
//! The Chevalley basis order used throughout the toolkit is: positive roots by
//! height, ties broken by descending lexicographic order of `coords2`, each
//! immediately followed by its negative; then `h_1, …, h_l`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Cartan type of a simply-laced system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    A,
    D,
    E,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::D => "D",
            Family::E => "E",
        };
        f.write_str(s)
    }
}

/// A root in doubled coordinates.
pub type Coords2 = Vec<i32>;

/// A simply-laced root system with a fixed Chevalley basis order.
#[derive(Clone, Debug)]
pub struct RootSystem {
    family: Family,
    rank: usize,
    /// Roots in basis order: `β_1, −β_1, β_2, −β_2, …` with `β_i` positive.
    roots: Vec<Coords2>,
    index: HashMap<Coords2, usize>,
    /// Root indices of the simple roots `α_1, …, α_l`.
    simples: Vec<usize>,
    /// Coefficients of each root in the simple roots.
    simple_coords: Vec<Vec<i32>>,
}

/// Dot product of doubled coordinates, rescaled to the Euclidean pairing.
pub fn dot(a: &[i32], b: &[i32]) -> i32 {
    let s: i32 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    debug_assert_eq!(s % 4, 0);
    s / 4
}

fn unit_pair(dim: usize, i: usize, si: i32, j: usize, sj: i32) -> Coords2 {
    let mut v = vec![0; dim];
    v[i] += 2 * si;
    v[j] += 2 * sj;
    v
}

/// Builds `Σ s_k e_{i_k}` (1-based indices) in doubled coordinates.
pub fn e_combo(dim: usize, terms: &[(i32, usize)]) -> Coords2 {
    let mut v = vec![0; dim];
    for &(s, i) in terms {
        v[i - 1] += 2 * s;
    }
    v
}

/// Builds `½ Σ s_k e_k` from a full sign vector, in doubled coordinates.
pub fn half_combo(signs: &[i32]) -> Coords2 {
    signs.to_vec()
}

impl RootSystem {
    /// Builds the root system of the given type and rank.
    pub fn new(family: Family, rank: usize) -> Result<RootSystem> {
        let unsupported = || Error::UnsupportedSystem(format!("{family}{rank}"));
        let (all, simples): (Vec<Coords2>, Vec<Coords2>) = match family {
            Family::A if rank >= 2 => {
                let d = rank + 1;
                let all = (0..d)
                    .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| unit_pair(d, i, 1, j, -1)))
                    .collect();
                let simples = (0..rank).map(|i| unit_pair(d, i, 1, i + 1, -1)).collect();
                (all, simples)
            }
            Family::D if rank >= 4 => {
                let d = rank;
                let mut all = Vec::new();
                for i in 0..d {
                    for j in i + 1..d {
                        for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                            all.push(unit_pair(d, i, si, j, sj));
                        }
                    }
                }
                let mut simples: Vec<Coords2> = (0..rank - 1).map(|i| unit_pair(d, i, 1, i + 1, -1)).collect();
                simples.push(unit_pair(d, rank - 2, 1, rank - 1, 1));
                (all, simples)
            }
            Family::E if (6..=8).contains(&rank) => {
                let mut e8 = Vec::new();
                for i in 0..8 {
                    for j in i + 1..8 {
                        for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                            e8.push(unit_pair(8, i, si, j, sj));
                        }
                    }
                }
                for mask in 0u32..256 {
                    if mask.count_ones() % 2 == 0 {
                        e8.push((0..8).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect());
                    }
                }
                // E_7: x7 = −x8; E_6: additionally x6 = −x8 (Bourbaki realization).
                let all = e8
                    .into_iter()
                    .filter(|r| rank == 8 || (r[6] == -r[7] && (rank == 7 || r[5] == -r[7])))
                    .collect();
                let mut simples = vec![
                    vec![1, -1, -1, -1, -1, -1, -1, 1],
                    unit_pair(8, 0, 1, 1, 1),
                    unit_pair(8, 0, -1, 1, 1),
                ];
                for i in 1..6 {
                    simples.push(unit_pair(8, i, -1, i + 1, 1));
                }
                simples.truncate(rank);
                (all, simples)
            }
            _ => return Err(unsupported()),
        };
        Ok(RootSystem::from_roots(family, rank, all, simples))
    }

    /// Parses names such as `A3`, `D4`, `E8`.
    pub fn parse(name: &str) -> Result<RootSystem> {
        let s = name.trim();
        let bad = || Error::UnsupportedSystem(name.to_string());
        let (f, r) = s.split_at(1.min(s.len()));
        let family = match f {
            "A" | "a" => Family::A,
            "D" | "d" => Family::D,
            "E" | "e" => Family::E,
            _ => return Err(bad()),
        };
        let rank: usize = r.parse().map_err(|_| bad())?;
        RootSystem::new(family, rank)
    }

    fn from_roots(family: Family, rank: usize, all: Vec<Coords2>, simple_vecs: Vec<Coords2>) -> RootSystem {
        // Positive roots with their simple-root coefficients, grown from the
        // simple roots by adding simple roots with pairing −1.
        let set: std::collections::HashSet<Coords2> = all.iter().cloned().collect();
        let mut coeffs: HashMap<Coords2, Vec<i32>> = HashMap::new();
        let mut frontier: Vec<Coords2> = Vec::new();
        for (i, s) in simple_vecs.iter().enumerate() {
            let mut c = vec![0; rank];
            c[i] = 1;
            coeffs.insert(s.clone(), c);
            frontier.push(s.clone());
        }
        while let Some(r) = frontier.pop() {
            for (i, s) in simple_vecs.iter().enumerate() {
                if dot(&r, s) == -1 {
                    let sum: Coords2 = r.iter().zip(s).map(|(a, b)| a + b).collect();
                    if set.contains(&sum) && !coeffs.contains_key(&sum) {
                        let mut c = coeffs[&r].clone();
                        c[i] += 1;
                        coeffs.insert(sum.clone(), c);
                        frontier.push(sum);
                    }
                }
            }
        }
        assert_eq!(coeffs.len() * 2, all.len(), "positive roots are half of all roots");
        let mut positives: Vec<(Coords2, Vec<i32>)> = coeffs.into_iter().collect();
        positives.sort_by(|(a, ca), (b, cb)| {
            let (ha, hb): (i32, i32) = (ca.iter().sum(), cb.iter().sum());
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let mut roots = Vec::with_capacity(all.len());
        let mut simple_coords = Vec::with_capacity(all.len());
        for (r, c) in positives {
            let neg_r = r.iter().map(|x| -x).collect();
            let neg_c = c.iter().map(|x| -x).collect();
            roots.push(r);
            roots.push(neg_r);
            simple_coords.push(c);
            simple_coords.push(neg_c);
        }
        let index: HashMap<Coords2, usize> = roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let simples = simple_vecs.iter().map(|s| index[s]).collect();
        RootSystem { family, rank, roots, index, simples, simple_coords }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.family, self.rank)
    }

    /// Number of roots.
    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    /// Number of positive roots `m`.
    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    /// Dimension `n = l + 2m` of the adjoint representation.
    pub fn dim(&self) -> usize {
        self.roots.len() + self.rank
    }

    /// Ambient dimension of the coordinate space.
    pub fn ambient_dim(&self) -> usize {
        self.roots[0].len()
    }

    pub fn coords2(&self, r: usize) -> &Coords2 {
        &self.roots[r]
    }

    /// All roots in basis order.
    pub fn roots(&self) -> &[Coords2] {
        &self.roots
    }

    /// Root index of a vector, if it is a root.
    pub fn root_index(&self, v: &[i32]) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Root index of a vector that must be a root.
    pub fn expect_root(&self, v: &[i32]) -> usize {
        self.root_index(v).unwrap_or_else(|| panic!("{v:?} is not a root of {}", self.name()))
    }

    /// Root indices of the simple roots.
    pub fn simples(&self) -> &[usize] {
        &self.simples
    }

    /// Root index of the simple root `α_i` (1-based).
    pub fn simple(&self, i: usize) -> usize {
        self.simples[i - 1]
    }

    pub fn is_positive(&self, r: usize) -> bool {
        r % 2 == 0
    }

    pub fn negate(&self, r: usize) -> usize {
        r ^ 1
    }

    pub fn height(&self, r: usize) -> i32 {
        self.simple_coords[r].iter().sum()
    }

    /// Coefficients of a root in the simple roots.
    pub fn simple_coords(&self, r: usize) -> &[i32] {
        &self.simple_coords[r]
    }

    /// `⟨β, α⟩ = (β, α)` since all roots have squared length 2.
    pub fn pairing(&self, beta: usize, alpha: usize) -> i32 {
        dot(&self.roots[beta], &self.roots[alpha])
    }

    /// The root `α + β`, if it is a root.
    pub fn root_sum(&self, alpha: usize, beta: usize) -> Option<usize> {
        let s: Coords2 = self.roots[alpha].iter().zip(&self.roots[beta]).map(|(a, b)| a + b).collect();
        self.root_index(&s)
    }

    /// The reflection `σ_α(β) = β − ⟨β, α⟩ α`, as a vector.
    pub fn reflect(&self, alpha: usize, beta: usize) -> Coords2 {
        let c = self.pairing(beta, alpha);
        self.roots[beta].iter().zip(&self.roots[alpha]).map(|(b, a)| b - c * a).collect()
    }

    /// Basis index of the Cartan element `h_i` (1-based).
    pub fn h_index(&self, i: usize) -> usize {
        self.roots.len() + i - 1
    }

    /// Basis index of a root (roots come first in the basis).
    pub fn basis_index(&self, r: usize) -> usize {
        r
    }

    /// Human-readable label of a basis vector, e.g. `x[e1-e2]` or `h2`.
    pub fn basis_label(&self, b: usize) -> String {
        if b >= self.roots.len() {
            return format!("h{}", b - self.roots.len() + 1);
        }
        format!("x[{}]", self.format_root(b))
    }

    /// Renders a root in `e_i` notation, e.g. `e1-e2` or `1/2(+1+1-1…)`.
    pub fn format_root(&self, r: usize) -> String {
        let v = &self.roots[r];
        if v.iter().any(|x| x.abs() == 1) {
            let signs: String = v.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect();
            return format!("1/2({signs})");
        }
        let mut s = String::new();
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                if x < 0 {
                    s.push('-');
                } else if !s.is_empty() {
                    s.push('+');
                }
                s.push_str(&format!("e{}", i + 1));
            }
        }
        s
    }

    /// The toolkit's maximal sequence of mutually orthogonal roots.
    pub fn orthogonal_sequence(&self) -> OrthogonalSequence {
        let d = self.ambient_dim();
        let vectors: Vec<Coords2> = match (self.family, self.rank) {
            (Family::A, l) => (1..=l).step_by(2).map(|i| e_combo(d, &[(1, i), (-1, i + 1)])).collect(),
            (Family::D, l) => {
                let pairs: Vec<usize> = (1..=l / 2).collect();
                let minus = pairs.iter().map(|&i| e_combo(d, &[(1, 2 * i - 1), (-1, 2 * i)]));
                let plus = pairs.iter().map(|&i| e_combo(d, &[(1, 2 * i - 1), (1, 2 * i)]));
                minus.chain(plus).collect()
            }
            (Family::E, 8) => vec![
                e_combo(8, &[(1, 1), (-1, 2)]),
                e_combo(8, &[(1, 3), (-1, 4)]),
                e_combo(8, &[(1, 5), (-1, 6)]),
                e_combo(8, &[(1, 7), (-1, 8)]),
                // Half-roots constant on the pairs {1,2}, {3,4}, {5,6}, {7,8}
                // whose pair-sign vectors form a Hadamard matrix, so the
                // eight roots are mutually orthogonal.
                half_combo(&[1, 1, -1, -1, -1, -1, 1, 1]),
                half_combo(&[1, 1, 1, 1, -1, -1, -1, -1]),
                half_combo(&[1, 1, -1, -1, 1, 1, -1, -1]),
                half_combo(&[1, 1, 1, 1, 1, 1, 1, 1]),
            ],
            // The E_8 list meets E_7 in e1−e2, e3−e4, e5−e6, e7−e8; padded to a
            // maximal orthogonal set with e1+e2, e3+e4, e5+e6.
            (Family::E, 7) => vec![
                e_combo(8, &[(1, 1), (-1, 2)]),
                e_combo(8, &[(1, 3), (-1, 4)]),
                e_combo(8, &[(1, 5), (-1, 6)]),
                e_combo(8, &[(1, 7), (-1, 8)]),
                e_combo(8, &[(1, 1), (1, 2)]),
                e_combo(8, &[(1, 3), (1, 4)]),
                e_combo(8, &[(1, 5), (1, 6)]),
            ],
            // The E_8 list meets E_6 in e1−e2, e3−e4; padded to a maximal
            // orthogonal set with e1+e2, e3+e4.
            (Family::E, _) => vec![
                e_combo(8, &[(1, 1), (-1, 2)]),
                e_combo(8, &[(1, 3), (-1, 4)]),
                e_combo(8, &[(1, 1), (1, 2)]),
                e_combo(8, &[(1, 3), (1, 4)]),
            ],
        };
        let gammas: Vec<usize> = vectors.iter().map(|v| self.expect_root(v)).collect();
        let mut connectors = BTreeMap::new();
        for i in 0..gammas.len() {
            for j in i + 1..gammas.len() {
                connectors.insert((i, j), self.connector(gammas[i], gammas[j]));
            }
        }
        OrthogonalSequence { gammas, connectors }
    }

    /// A root `c` with `⟨a, c⟩ = ⟨b, c⟩ = −1` for orthogonal roots `a`, `b`.
    /// The classical choices for `D`-shaped pairs are tried first; otherwise
    /// the first such root in basis order is used.
    pub fn connector(&self, a: usize, b: usize) -> usize {
        let ok = |c: usize| self.pairing(a, c) == -1 && self.pairing(b, c) == -1;
        for (x, y) in [(a, b), (b, a)] {
            for cand in self.classical_connectors(x, y) {
                if let Some(c) = self.root_index(&cand) {
                    if ok(c) {
                        return c;
                    }
                }
            }
        }
        (0..self.num_roots()).find(|&c| ok(c)).expect("orthogonal roots in an irreducible system have a connector")
    }

    /// Candidate connectors for pairs `e_p ± e_{p+1}`, `e_q ± e_{q+1}`.
    fn classical_connectors(&self, x: usize, y: usize) -> Vec<Coords2> {
        let d = self.ambient_dim();
        let shape = |r: usize| -> Option<(usize, i32, usize, i32)> {
            let nz: Vec<(usize, i32)> =
                self.roots[r].iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, v)| (i + 1, v / 2)).collect();
            match nz.as_slice() {
                [(p, sp), (q, sq)] if nz.iter().all(|(_, v)| v.abs() == 1) => Some((*p, *sp, *q, *sq)),
                _ => None,
            }
        };
        let (Some((p, sp, p1, sp1)), Some((q, _, _, _))) = (shape(x), shape(y)) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        if sp == 1 && sp1 == -1 && p != q {
            out.push(e_combo(d, &[(1, p1), (-1, q)]));
        }
        if sp == 1 && sp1 == 1 && p != q {
            out.push(e_combo(d, &[(-1, p1), (-1, q)]));
        }
        if p == q {
            for r in 1..=d {
                if r != p && r != p1 {
                    out.push(e_combo(d, &[(-1, p), (1, r)]));
                }
            }
        }
        out
    }

    /// JSON description `{family, rank, roots, simples, basis_order}`.
    pub fn to_json(&self) -> Value {
        let basis: Vec<String> = (0..self.dim()).map(|b| self.basis_label(b)).collect();
        json!({
            "family": self.family.to_string(),
            "rank": self.rank,
            "roots": self.roots,
            "simples": self.simples.iter().map(|&s| &self.roots[s]).collect::<Vec<_>>(),
            "basis_order": basis,
        })
    }
}

/// Mutually orthogonal roots `γ_1, …, γ_k` with connectors `γ_{i,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalSequence {
    /// Root indices of `γ_1, …, γ_k`.
    pub gammas: Vec<usize>,
    /// Connector root index for each pair `(i, j)`, `i < j` (0-based positions).
    pub connectors: BTreeMap<(usize, usize), usize>,
}

impl OrthogonalSequence {
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// Connector for positions `i ≠ j` (0-based, either order).
    pub fn connector(&self, i: usize, j: usize) -> usize {
        self.connectors[&(i.min(j), i.max(j))]
    }

    /// Position of a root in the sequence.
    pub fn position(&self, root: usize) -> Option<usize> {
        self.gammas.iter().position(|&g| g == root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_counts() {
        for (f, l, count) in [
            (Family::A, 3, 12),
            (Family::A, 5, 30),
            (Family::D, 4, 24),
            (Family::D, 5, 40),
            (Family::E, 6, 72),
            (Family::E, 7, 126),
            (Family::E, 8, 240),
        ] {
            let rs = RootSystem::new(f, l).unwrap();
            assert_eq!(rs.num_roots(), count, "{f}{l}");
            assert_eq!(rs.dim(), l + count);
            assert!(rs.roots().iter().all(|r| r.iter().map(|x| x * x).sum::<i32>() == 8));
        }
        assert!(RootSystem::new(Family::D, 3).is_err());
        assert!(RootSystem::new(Family::E, 5).is_err());
    }

    #[test]
    fn a3_basis_order() {
        let rs = RootSystem::parse("A3").unwrap();
        let labels: Vec<String> = (0..rs.dim()).map(|b| rs.basis_label(b)).collect();
        assert_eq!(
            labels,
            [
                "x[e1-e2]", "x[-e1+e2]", "x[e2-e3]", "x[-e2+e3]", "x[e3-e4]", "x[-e3+e4]", "x[e1-e3]",
                "x[-e1+e3]", "x[e2-e4]", "x[-e2+e4]", "x[e1-e4]", "x[-e1+e4]", "h1", "h2", "h3"
            ]
        );
    }

    #[test]
    fn pairings_and_sums() {
        let rs = RootSystem::parse("A3").unwrap();
        let (a1, a2, a3) = (rs.simple(1), rs.simple(2), rs.simple(3));
        assert_eq!(rs.pairing(a1, a2), -1);
        assert_eq!(rs.pairing(a1, a1), 2);
        assert_eq!(rs.pairing(a1, a3), 0);
        assert_eq!(rs.root_sum(a1, a2), rs.root_index(&e_combo(4, &[(1, 1), (-1, 3)])));
        assert_eq!(rs.root_sum(a1, a3), None);
        assert_eq!(rs.root_sum(a1, rs.negate(a1)), None);
    }

    #[test]
    fn orthogonal_sequences() {
        let a5 = RootSystem::parse("A5").unwrap();
        let seq = a5.orthogonal_sequence();
        let got: Vec<String> = seq.gammas.iter().map(|&g| a5.format_root(g)).collect();
        assert_eq!(got, ["e1-e2", "e3-e4", "e5-e6"]);
        assert_eq!(a5.format_root(seq.connector(0, 1)), "e2-e3");
        let d4 = RootSystem::parse("D4").unwrap();
        let got: Vec<String> = d4.orthogonal_sequence().gammas.iter().map(|&g| d4.format_root(g)).collect();
        assert_eq!(got, ["e1-e2", "e3-e4", "e1+e2", "e3+e4"]);
        for name in ["A3", "A4", "A5", "A7", "D4", "D5", "D6", "E6", "E7", "E8"] {
            let rs = RootSystem::parse(name).unwrap();
            let seq = rs.orthogonal_sequence();
            for i in 0..seq.len() {
                for j in 0..seq.len() {
                    if i != j {
                        assert_eq!(rs.pairing(seq.gammas[i], seq.gammas[j]), 0, "{name}");
                        let c = seq.connector(i, j);
                        assert_eq!(rs.pairing(seq.gammas[i], c), -1, "{name}");
                        assert_eq!(rs.pairing(seq.gammas[j], c), -1, "{name}");
                    }
                }
            }
        }
    }
}
