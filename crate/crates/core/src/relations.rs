//! Seeded relation sweeps: Steinberg relations, torus conjugation, orders of
//! `Q_α`, the `w_{i,j}` identities and the Jacobi identity, each checked
//! exactly on concrete matrices.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chevalley::Adjoint;
use crate::error::{Error, Result};
use crate::matrix::RingMatrix;
use crate::rings::{Elem, Ring};

/// A family of relations that can be swept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `x_α(t) x_α(s) = x_α(t + s)`.
    Additivity,
    /// `[x_α(t), x_β(s)] = x_{α+β}(N_{α,β} t s)` for summable pairs and `1`
    /// for non-opposite pairs whose sum is not a root.
    Commutator,
    /// `h_α(u) x_β(t) h_α(u)⁻¹ = x_β(u^{⟨β,α⟩} t)`, with `h_α(u)` from the
    /// product formula equal to its diagonal closed form.
    TorusConjugation,
    /// `x_{α+β}(t) = [x_α(t), x_β(1)]` for pairs with `N_{α,β} = 1`.
    CommutatorIdentity,
    /// `Q_α³ = 1` for every root (simple roots only in `E_7`, `E_8`).
    QOrder,
    /// `w_{i,j}² = 1`, `w_{i,j} Q_{γ_i} w_{i,j} = Q_{γ_j}` over the orthogonal
    /// sequence, and `(w_{1,2} w_{2,3})³ = 1` when the sequence has three roots.
    Wij,
    /// The Jacobi identity on random basis triples.
    Jacobi,
}

impl Relation {
    pub const ALL: [Relation; 7] = [
        Relation::Additivity,
        Relation::Commutator,
        Relation::TorusConjugation,
        Relation::CommutatorIdentity,
        Relation::QOrder,
        Relation::Wij,
        Relation::Jacobi,
    ];

    /// The four Steinberg-type sweeps.
    pub const STEINBERG: [Relation; 4] =
        [Relation::Additivity, Relation::Commutator, Relation::TorusConjugation, Relation::CommutatorIdentity];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Additivity => "additivity",
            Relation::Commutator => "commutator",
            Relation::TorusConjugation => "torus-conjugation",
            Relation::CommutatorIdentity => "commutator-identity",
            Relation::QOrder => "qorder",
            Relation::Wij => "wij",
            Relation::Jacobi => "jacobi",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Names accepted on the command line, mapping to one or more relations.
pub fn parse_relation_set(name: &str) -> Result<Vec<Relation>> {
    match name {
        "steinberg" => Ok(Relation::STEINBERG.to_vec()),
        "all" => Ok(Relation::ALL.to_vec()),
        other => Ok(vec![other.parse()?]),
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Relation> {
        Relation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::UnknownRelation(s.to_string()))
    }
}

/// Outcome of one sweep.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RelationCheck {
    pub relation: Relation,
    pub system: String,
    pub ring: String,
    pub checked: usize,
    /// Descriptions of failing instances (empty on success).
    pub failures: Vec<String>,
}

impl RelationCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Group commutator `g h g⁻¹ h⁻¹`.
pub fn group_commutator(g: &RingMatrix, h: &RingMatrix) -> Result<RingMatrix> {
    Ok(g.mul(h).mul(&g.inverse()?).mul(&h.inverse()?))
}

struct Sweeper<'a> {
    adj: &'a Adjoint,
    ring: &'a Ring,
    rng: ChaCha8Rng,
    failures: Vec<String>,
    checked: usize,
}

impl Sweeper<'_> {
    fn record(&mut self, ok: bool, what: impl FnOnce(&Self) -> String) {
        self.checked += 1;
        if !ok {
            let message = what(self);
            self.failures.push(message);
        }
    }

    fn root(&mut self) -> usize {
        self.rng.gen_range(0..self.adj.system().num_roots())
    }

    fn elem(&mut self) -> Elem {
        self.ring.random_elem(&mut self.rng)
    }

    fn label(&self, r: usize) -> String {
        self.adj.system().format_root(r)
    }

    fn additivity(&mut self, samples: usize) -> Result<()> {
        for _ in 0..samples {
            let (a, t, s) = (self.root(), self.elem(), self.elem());
            let lhs = self.adj.x_elem(self.ring, a, &t)?.mul(&self.adj.x_elem(self.ring, a, &s)?);
            let rhs = self.adj.x_elem(self.ring, a, &self.ring.add(&t, &s))?;
            let ring = self.ring.clone();
            self.record(lhs == rhs, |me: &Self| format!("x_{}({}) x({}) ≠ x({})", me.label(a), ring.format(&t), ring.format(&s), ring.format(&ring.add(&t, &s))));
        }
        Ok(())
    }

    fn pairs(&self, summable: bool) -> Vec<(usize, usize)> {
        let rs = self.adj.system();
        let m = rs.num_roots();
        (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && rs.negate(a) != b && rs.root_sum(a, b).is_some() == summable)
            .collect()
    }

    fn commutator(&mut self, samples: usize) -> Result<()> {
        let summable = self.pairs(true);
        let orthogonal = self.pairs(false);
        for k in 0..samples {
            let (t, s) = (self.elem(), self.elem());
            let pool = if k % 4 == 3 && !orthogonal.is_empty() { &orthogonal } else { &summable };
            let &(a, b) = pool.choose(&mut self.rng).expect("non-empty pair pool");
            let c = group_commutator(&self.adj.x_elem(self.ring, a, &t)?, &self.adj.x_elem(self.ring, b, &s)?)?;
            let expected = match self.adj.system().root_sum(a, b) {
                Some(sum) => {
                    let n = self.adj.structure_constants().get(a, b).expect("summable pair") as i64;
                    let coeff = self.ring.mul(&self.ring.from_i64(n), &self.ring.mul(&t, &s));
                    self.adj.x_elem(self.ring, sum, &coeff)?
                }
                None => RingMatrix::identity(self.ring, self.adj.dim()),
            };
            self.record(c == expected, |me: &Self| format!("[x_{}, x_{}] mismatch", me.label(a), me.label(b)));
        }
        Ok(())
    }

    fn torus(&mut self, samples: usize) -> Result<()> {
        for _ in 0..samples {
            let (a, b, t) = (self.root(), self.root(), self.elem());
            let u = self.ring.random_unit(&mut self.rng);
            let h = self.adj.h_elem(self.ring, a, &u)?;
            let closed = self.adj.h_diagonal(self.ring, a, &u)?;
            self.record(h == closed, |me: &Self| format!("h_{} product formula ≠ diagonal form", me.label(a)));
            let lhs = h.mul(&self.adj.x_elem(self.ring, b, &t)?).mul(&h.inverse()?);
            let scale = self.ring.pow_signed(&u, self.adj.system().pairing(b, a) as i64)?;
            let rhs = self.adj.x_elem(self.ring, b, &self.ring.mul(&scale, &t))?;
            self.record(lhs == rhs, |me: &Self| format!("h_{} x_{} h⁻¹ mismatch", me.label(a), me.label(b)));
        }
        Ok(())
    }

    fn commutator_identity(&mut self, samples: usize) -> Result<()> {
        let pairs: Vec<(usize, usize)> = self
            .pairs(true)
            .into_iter()
            .filter(|&(a, b)| self.adj.structure_constants().get(a, b) == Some(1))
            .collect();
        let one = self.ring.one();
        for _ in 0..samples {
            let t = self.elem();
            let &(a, b) = pairs.choose(&mut self.rng).expect("pairs with N = 1 exist");
            let sum = self.adj.system().root_sum(a, b).expect("summable");
            let lhs = self.adj.x_elem(self.ring, sum, &t)?;
            let rhs = group_commutator(&self.adj.x_elem(self.ring, a, &t)?, &self.adj.x_elem(self.ring, b, &one)?)?;
            self.record(lhs == rhs, |me: &Self| format!("x_{}(t) ≠ [x_{}(t), x_{}(1)]", me.label(sum), me.label(a), me.label(b)));
        }
        Ok(())
    }

    fn q_order(&mut self) -> Result<()> {
        let rs = self.adj.system();
        let roots: Vec<usize> = if rs.rank() > 6 { rs.simples().to_vec() } else { (0..rs.num_roots()).collect() };
        for a in roots {
            let q = self.adj.q_elem(self.ring, a)?;
            let ok = q.mul(&q).mul(&q).is_identity();
            self.record(ok, |me: &Self| format!("Q_{}³ ≠ 1", me.label(a)));
        }
        Ok(())
    }

    fn wij(&mut self) -> Result<()> {
        let seq = self.adj.system().orthogonal_sequence();
        let k = seq.len();
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let w = self.adj.wij_elem(self.ring, &seq, i, j)?;
                self.record(w.mul(&w).is_identity(), |_: &Self| format!("w_{{{},{}}}² ≠ 1", i + 1, j + 1));
                let qi = self.adj.q_elem(self.ring, seq.gammas[i])?;
                let qj = self.adj.q_elem(self.ring, seq.gammas[j])?;
                self.record(w.mul(&qi).mul(&w) == qj, |_: &Self| format!("w_{{{0},{1}}} Q_{0} w_{{{0},{1}}} ≠ Q_{1}", i + 1, j + 1));
            }
        }
        if k >= 3 {
            let p = self.adj.wij_elem(self.ring, &seq, 0, 1)?.mul(&self.adj.wij_elem(self.ring, &seq, 1, 2)?);
            self.record(p.pow(3).is_identity(), |_: &Self| "(w_{1,2} w_{2,3})³ ≠ 1".into());
        }
        Ok(())
    }

    fn jacobi(&mut self, samples: usize) -> Result<()> {
        let n = self.adj.dim();
        for _ in 0..samples {
            let idx: Vec<usize> = (0..3).map(|_| self.rng.gen_range(0..n)).collect();
            let unit = |k: usize| -> Vec<i64> { (0..n).map(|j| (j == k) as i64).collect() };
            let (a, b, c) = (unit(idx[0]), unit(idx[1]), unit(idx[2]));
            let br = |u: &[i64], v: &[i64]| self.adj.bracket(u, v);
            let terms = [br(&a, &br(&b, &c)), br(&b, &br(&c, &a)), br(&c, &br(&a, &b))];
            let ok = (0..n).all(|r| terms.iter().map(|t| t[r]).sum::<i64>() == 0);
            self.record(ok, |_: &Self| format!("Jacobi fails on basis triple {idx:?}"));
        }
        Ok(())
    }
}

/// Runs one relation sweep with `samples` seeded random instances (ignored
/// for the exhaustive sweeps `qorder` and `wij`). The ring must be local.
pub fn sweep(adj: &Adjoint, ring: &Ring, relation: Relation, samples: usize, seed: u64) -> Result<RelationCheck> {
    if !ring.is_local() {
        return Err(Error::NotLocal(ring.spec()));
    }
    let mut s = Sweeper { adj, ring, rng: ChaCha8Rng::seed_from_u64(seed), failures: Vec::new(), checked: 0 };
    match relation {
        Relation::Additivity => s.additivity(samples)?,
        Relation::Commutator => s.commutator(samples)?,
        Relation::TorusConjugation => s.torus(samples)?,
        Relation::CommutatorIdentity => s.commutator_identity(samples)?,
        Relation::QOrder => s.q_order()?,
        Relation::Wij => s.wij()?,
        Relation::Jacobi => s.jacobi(samples)?,
    }
    Ok(RelationCheck {
        relation,
        system: adj.system().name(),
        ring: ring.spec(),
        checked: s.checked,
        failures: s.failures,
    })
}
