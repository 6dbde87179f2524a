//! Transcribed reference matrices and their comparison with generated ones.
//!
//! Each fixture is a JSON document
//! `{"id", "source", "element", "ring", "system", "basis", "n", "entries"}`
//! where `basis` lists the Chevalley-basis labels of the rows/columns (this
//! fixes the basis permutation) and `source` quotes the lead-in phrase of the
//! transcribed matrix. Fixtures are embedded in the library; setting
//! `CHEVKIT_FIXTURE_DIR` loads `<dir>/<id>.json` instead.

use std::collections::HashMap;

use serde::Serialize;
use serde_json::Value;

use crate::chevalley::Adjoint;
use crate::error::{Error, Result};
use crate::matrix::RingMatrix;
use crate::rings::Ring;
use crate::rootsys::RootSystem;
use crate::spectral::diagonalize_commuting;

/// Identifiers of all shipped fixtures, in report order.
pub const FIXTURE_IDS: [&str; 11] = [
    "a3-w1",
    "a3-w2",
    "a3-x1",
    "a3-w13",
    "second16-qi",
    "second16-q1",
    "second16-w13",
    "second16-w1",
    "second16-w2",
    "first4-q1",
    "diag8-transition",
];

const EMBEDDED: [(&str, &str); 11] = [
    ("a3-w1", include_str!("../fixtures/a3-w1.json")),
    ("a3-w2", include_str!("../fixtures/a3-w2.json")),
    ("a3-x1", include_str!("../fixtures/a3-x1.json")),
    ("a3-w13", include_str!("../fixtures/a3-w13.json")),
    ("second16-qi", include_str!("../fixtures/second16-qi.json")),
    ("second16-q1", include_str!("../fixtures/second16-q1.json")),
    ("second16-w13", include_str!("../fixtures/second16-w13.json")),
    ("second16-w1", include_str!("../fixtures/second16-w1.json")),
    ("second16-w2", include_str!("../fixtures/second16-w2.json")),
    ("first4-q1", include_str!("../fixtures/first4-q1.json")),
    ("diag8-transition", include_str!("../fixtures/diag8-transition.json")),
];

/// Environment variable overriding the fixture directory.
pub const FIXTURE_DIR_VAR: &str = "CHEVKIT_FIXTURE_DIR";

/// A transcribed reference matrix.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub id: String,
    pub source: String,
    pub element: String,
    pub system: RootSystem,
    /// Basis indices (in `system`) of the fixture's rows/columns.
    pub basis: Vec<usize>,
    pub matrix: RingMatrix,
}

impl Fixture {
    /// Loads a fixture by id from the override directory or the embedded set.
    pub fn load(id: &str) -> Result<Fixture> {
        let text = match std::env::var_os(FIXTURE_DIR_VAR) {
            Some(dir) => {
                let path = std::path::Path::new(&dir).join(format!("{id}.json"));
                std::fs::read_to_string(&path).map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?
            }
            None => EMBEDDED
                .iter()
                .find(|(k, _)| *k == id)
                .map(|(_, t)| t.to_string())
                .ok_or_else(|| Error::UnknownFixture(id.to_string()))?,
        };
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::Fixture(format!("{id}: {e}")))?;
        Fixture::from_json(&v)
    }

    /// Parses a fixture document.
    pub fn from_json(v: &Value) -> Result<Fixture> {
        let field = |k: &str| -> Result<&Value> { v.get(k).ok_or_else(|| Error::Fixture(format!("missing field {k:?}"))) };
        let string = |k: &str| -> Result<String> {
            field(k)?.as_str().map(str::to_string).ok_or_else(|| Error::Fixture(format!("field {k:?} is not a string")))
        };
        let id = string("id")?;
        let system = RootSystem::parse(&string("system")?)?;
        let labels: HashMap<String, usize> = (0..system.dim()).map(|b| (system.basis_label(b), b)).collect();
        let basis = field("basis")?
            .as_array()
            .ok_or_else(|| Error::Fixture("basis is not a list".into()))?
            .iter()
            .map(|l| {
                l.as_str()
                    .and_then(|s| labels.get(s).copied())
                    .ok_or_else(|| Error::Fixture(format!("{id}: unknown basis label {l}")))
            })
            .collect::<Result<Vec<usize>>>()?;
        let matrix = RingMatrix::from_json(v)?;
        if matrix.n() != basis.len() {
            return Err(Error::Fixture(format!("{id}: basis has {} labels for n = {}", basis.len(), matrix.n())));
        }
        Ok(Fixture { id, source: string("source")?, element: string("element")?, system, basis, matrix })
    }

    /// The toolkit's version of the fixture matrix, restricted to the
    /// fixture's basis lines.
    pub fn generate(&self) -> Result<RingMatrix> {
        let ring = self.matrix.ring().clone();
        let adj = Adjoint::new(self.system.clone());
        let rs = adj.system();
        let seq = rs.orthogonal_sequence();
        let one = ring.one();
        let full = match self.id.as_str() {
            "a3-w1" | "second16-w1" => adj.w_elem(&ring, rs.simple(1), &one)?,
            "a3-w2" | "second16-w2" => adj.w_elem(&ring, rs.simple(2), &one)?,
            "a3-x1" => adj.x_elem(&ring, rs.simple(1), &one)?,
            "a3-w13" | "second16-w13" => adj.wij_elem(&ring, &seq, 0, 1)?,
            "second16-qi" => adj.q_elem(&ring, rs.simple(5))?,
            "second16-q1" | "first4-q1" => adj.q_elem(&ring, rs.simple(1))?,
            "diag8-transition" => diagonalize_commuting(&adj, &ring, &seq.gammas)?.transition,
            other => return Err(Error::UnknownFixture(other.to_string())),
        };
        if !full.preserves(&self.basis) && self.id != "diag8-transition" {
            return Err(Error::Fixture(format!("{}: basis part is not invariant", self.id)));
        }
        Ok(full.restrict(&self.basis))
    }

    /// A diagnostic alternative for `Q`-type fixtures: the reversed product
    /// `x_α(1) w_α(1)`, restricted to the fixture's basis lines.
    pub fn reversed_q(&self) -> Result<Option<RingMatrix>> {
        let root = match self.id.as_str() {
            "second16-q1" | "first4-q1" => 1,
            "second16-qi" => 5,
            _ => return Ok(None),
        };
        let ring = self.matrix.ring().clone();
        let adj = Adjoint::new(self.system.clone());
        let alpha = adj.system().simple(root);
        let one = ring.one();
        let xw = adj.x_elem(&ring, alpha, &one)?.mul(&adj.w_elem(&ring, alpha, &one)?);
        Ok(Some(xw.restrict(&self.basis)))
    }
}

/// Outcome of comparing a fixture with the generated matrix.
#[derive(Clone, Debug, Serialize)]
pub struct FixtureComparison {
    pub id: String,
    pub element: String,
    pub matched: bool,
    /// Basis labels whose sign is flipped by the gauge `D` with
    /// `D · fixture · D⁻¹ = generated` (empty for the identity gauge).
    pub gauge_flips: Vec<String>,
    pub detail: String,
}

/// Finds `d ∈ {±1}^n` with `d_i a_{ij} d_j = b_{ij}` for all `i, j`.
pub fn find_sign_gauge(a: &RingMatrix, b: &RingMatrix) -> Option<Vec<i8>> {
    let ring = a.ring();
    let n = a.n();
    if b.n() != n {
        return None;
    }
    let relation = |i: usize, j: usize| -> Option<Option<i8>> {
        // Some(Some(s)): forced relative sign; Some(None): unconstrained; None: impossible.
        let (x, y) = (a.get(i, j), b.get(i, j));
        let plus = x == y;
        let minus = ring.neg(x) == *y;
        match (plus, minus) {
            (true, true) => Some(None),
            (true, false) => Some(Some(1)),
            (false, true) => Some(Some(-1)),
            (false, false) => None,
        }
    };
    for i in 0..n {
        if a.get(i, i) != b.get(i, i) {
            return None;
        }
    }
    let mut sign = vec![0i8; n];
    for start in 0..n {
        if sign[start] != 0 {
            continue;
        }
        sign[start] = 1;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for (p, q) in [(i, j), (j, i)] {
                    match relation(p, q)? {
                        None => {}
                        Some(s) => {
                            let want = sign[i] * s;
                            if sign[j] == 0 {
                                sign[j] = want;
                                stack.push(j);
                            } else if sign[j] != want {
                                return None;
                            }
                        }
                    }
                }
            }
        }
    }
    // Final exact check.
    let ok = (0..n).all(|i| {
        (0..n).all(|j| {
            let x = a.get(i, j);
            let v = if sign[i] * sign[j] == 1 { x.clone() } else { ring.neg(x) };
            v == *b.get(i, j)
        })
    });
    ok.then_some(sign)
}

/// Compares one fixture with the toolkit output.
pub fn compare_fixture(id: &str) -> Result<FixtureComparison> {
    let fx = Fixture::load(id)?;
    let generated = fx.generate()?;
    let (matched, gauge_flips, detail) = match find_sign_gauge(&fx.matrix, &generated) {
        Some(signs) => {
            let flips: Vec<String> = signs
                .iter()
                .zip(&fx.basis)
                .filter(|(s, _)| **s < 0)
                .map(|(_, &b)| fx.system.basis_label(b))
                .collect();
            let detail = if flips.is_empty() { "identity gauge".to_string() } else { format!("gauge flips {} lines", flips.len()) };
            (true, flips, detail)
        }
        None => {
            let differing = (0..generated.n())
                .flat_map(|i| (0..generated.n()).map(move |j| (i, j)))
                .filter(|&(i, j)| {
                    let (x, y) = (fx.matrix.get(i, j), generated.get(i, j));
                    x != y && fx.matrix.ring().neg(x) != *y
                })
                .count();
            let mut detail = format!("no ±1 diagonal gauge; {differing} entries differ beyond sign");
            if let Some(alt) = fx.reversed_q()? {
                if find_sign_gauge(&fx.matrix, &alt).is_some() {
                    detail.push_str("; the transcribed matrix equals x_α(1)·w_α(1) up to gauge, not w_α(1)·x_α(1)");
                }
            }
            (false, vec![], detail)
        }
    };
    Ok(FixtureComparison { id: fx.id, element: fx.element, matched, gauge_flips, detail })
}

/// Parses the ring of a fixture document without loading the rest.
pub fn fixture_ring(id: &str) -> Result<Ring> {
    Ok(Fixture::load(id)?.matrix.ring().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int;

    #[test]
    fn all_fixtures_load() {
        for id in FIXTURE_IDS {
            let fx = Fixture::load(id).unwrap();
            assert_eq!(fx.id, id);
            assert_eq!(fx.basis.len(), fx.matrix.n());
        }
        assert!(matches!(Fixture::load("nope"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn gauge_search_recovers_signs() {
        let z = Ring::integers();
        let a = RingMatrix::from_i64_rows(&z, &[vec![1, 2, 0], vec![3, 4, 5], vec![0, 6, 7]]);
        let d = RingMatrix::diagonal(&z, &[int(1), int(-1), int(-1)]);
        let b = d.mul(&a).mul(&d);
        let signs = find_sign_gauge(&a, &b).unwrap();
        assert_eq!(signs[1] * signs[0], -1);
        assert_eq!(signs[1], signs[2]);
        let c = RingMatrix::from_i64_rows(&z, &[vec![1, 2, 0], vec![-3, 4, 5], vec![0, 6, 7]]);
        assert!(find_sign_gauge(&a, &c).is_none());
    }

    #[test]
    fn transcribed_generators_match_up_to_gauge() {
        for id in ["a3-w1", "a3-w2", "a3-x1", "a3-w13", "second16-qi", "second16-w13", "second16-w1", "second16-w2", "first4-q1"] {
            let c = compare_fixture(id).unwrap();
            assert!(c.matched, "{id}: {}", c.detail);
        }
        let q1 = compare_fixture("second16-q1").unwrap();
        assert!(!q1.matched && q1.detail.contains("x_α(1)·w_α(1)"), "{}", q1.detail);
    }
}
