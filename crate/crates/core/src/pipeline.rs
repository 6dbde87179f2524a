//! The end-to-end verification pipeline: every construction and claim of the
//! toolkit run in order, with a deterministic JSON report.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::chevalley::Adjoint;
use crate::error::{Error, Result};
use crate::fixtures::{compare_fixture, FIXTURE_IDS};
use crate::localtools::{conjugacy_witness, order3_split, random_order3, random_radical};
use crate::matrix::RingMatrix;
use crate::relations::{sweep, Relation};
use crate::rigidity::{matrix_unit_extract, rigidity_check, unipotent_centralizer, SETUPS};
use crate::rings::Ring;
use crate::rootsys::RootSystem;
use crate::spectral::{computed_partition, diagonalize_q, eigen_multiplicities, printed_partition, Target};

/// The pipeline stages, in execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    RingAxioms,
    RootSystems,
    Steinberg,
    OrderIdentities,
    Diagonalization,
    BlockPartitions,
    Fixtures,
    Rigidity,
    Centralizer,
    MatrixUnit,
    IdempotentSplit,
}

impl Stage {
    pub const ALL: [Stage; 11] = [
        Stage::RingAxioms,
        Stage::RootSystems,
        Stage::Steinberg,
        Stage::OrderIdentities,
        Stage::Diagonalization,
        Stage::BlockPartitions,
        Stage::Fixtures,
        Stage::Rigidity,
        Stage::Centralizer,
        Stage::MatrixUnit,
        Stage::IdempotentSplit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::RingAxioms => "ring-axioms",
            Stage::RootSystems => "root-systems",
            Stage::Steinberg => "steinberg",
            Stage::OrderIdentities => "order-identities",
            Stage::Diagonalization => "diagonalization",
            Stage::BlockPartitions => "block-partitions",
            Stage::Fixtures => "fixtures",
            Stage::Rigidity => "rigidity",
            Stage::Centralizer => "centralizer",
            Stage::MatrixUnit => "matrix-unit",
            Stage::IdempotentSplit => "idempotent-split",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stage> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::UnknownStage(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// The outcome of one stage.
#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub name: String,
    pub status: Status,
    pub details: Value,
}

/// The outcome of a pipeline run.
#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub seed: u64,
    pub samples: usize,
    pub stages: Vec<StageReport>,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.status != Status::Fail)
    }

    pub fn stage(&self, stage: Stage) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.name == stage.name())
    }

    /// Pretty JSON; byte-identical for identical configurations.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Pipeline configuration.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Random samples per relation sweep.
    pub samples: usize,
    /// Run only these stages (all when empty).
    pub only: Vec<Stage>,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig { seed: 7, samples: 200, only: Vec::new() }
    }
}

/// Runs the configured stages in order.
pub fn run_pipeline(config: &PipelineConfig) -> PipelineReport {
    let stages = Stage::ALL
        .into_iter()
        .filter(|s| config.only.is_empty() || config.only.contains(s))
        .map(|stage| {
            let (status, details) = match run_stage(stage, config) {
                Ok((ok, details)) => (if ok { Status::Pass } else { Status::Fail }, details),
                Err(e) => (Status::Fail, json!({ "error": e.to_string() })),
            };
            StageReport { name: stage.name().to_string(), status, details }
        })
        .collect();
    PipelineReport { seed: config.seed, samples: config.samples, stages }
}

/// Runs one relation sweep per relation on `system` over `ring`, one stage
/// each. Invalid specifications and non-local rings are errors, not failures.
pub fn verify_relations(
    system: &str,
    ring: &str,
    relations: &[Relation],
    samples: usize,
    seed: u64,
) -> Result<PipelineReport> {
    let adj = Adjoint::parse(system)?;
    let ring = Ring::parse(ring)?;
    if !ring.is_local() {
        return Err(Error::NotLocal(ring.spec()));
    }
    let stages = relations
        .iter()
        .map(|&rel| {
            let check = sweep(&adj, &ring, rel, samples, seed)?;
            Ok(StageReport {
                name: rel.name().to_string(),
                status: if check.passed() { Status::Pass } else { Status::Fail },
                details: serde_json::to_value(&check).expect("serializable"),
            })
        })
        .collect::<Result<_>>()?;
    Ok(PipelineReport { seed, samples, stages })
}

/// Runs a single stage, returning whether it passed and its details.
pub fn run_stage(stage: Stage, config: &PipelineConfig) -> Result<(bool, Value)> {
    match stage {
        Stage::RingAxioms => ring_axioms_stage(config),
        Stage::RootSystems => root_systems_stage(),
        Stage::Steinberg => steinberg_stage(config),
        Stage::OrderIdentities => order_identities_stage(),
        Stage::Diagonalization => diagonalization_stage(),
        Stage::BlockPartitions => block_partitions_stage(),
        Stage::Fixtures => fixtures_stage(),
        Stage::Rigidity => rigidity_stage(),
        Stage::Centralizer => centralizer_stage(),
        Stage::MatrixUnit => matrix_unit_stage(),
        Stage::IdempotentSplit => idempotent_split_stage(config),
    }
}

/// Rings exercised by the ring-axiom stage.
pub const AXIOM_RINGS: [&str; 7] = ["Z/4", "Z/8", "Z/9", "dual(Z/2)", "Zodd", "omega(Z/4)", "dual(residue(Z/2))"];

/// Checks the commutative-ring axioms, unit inverses and the residue
/// homomorphism on seeded random triples; returns failure descriptions.
pub fn ring_axiom_failures(ring: &Ring, samples: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let residue = ring.residue_field().ok();
    for _ in 0..samples {
        let (a, b, c) = (ring.random_elem(&mut rng), ring.random_elem(&mut rng), ring.random_elem(&mut rng));
        let mut check = |ok: bool, what: &str| {
            if !ok {
                failures.push(format!("{what} fails for ({}, {}, {})", ring.format(&a), ring.format(&b), ring.format(&c)));
            }
        };
        check(ring.add(&ring.add(&a, &b), &c) == ring.add(&a, &ring.add(&b, &c)), "additive associativity");
        check(ring.mul(&ring.mul(&a, &b), &c) == ring.mul(&a, &ring.mul(&b, &c)), "multiplicative associativity");
        check(ring.add(&a, &b) == ring.add(&b, &a), "additive commutativity");
        check(ring.mul(&a, &b) == ring.mul(&b, &a), "multiplicative commutativity");
        check(
            ring.mul(&a, &ring.add(&b, &c)) == ring.add(&ring.mul(&a, &b), &ring.mul(&a, &c)),
            "distributivity",
        );
        check(ring.add(&a, &ring.zero()) == a && ring.mul(&a, &ring.one()) == a, "identities");
        check(ring.is_zero(&ring.add(&a, &ring.neg(&a))), "additive inverse");
        if ring.is_unit(&a) {
            check(ring.invert(&a).map(|i| ring.is_one(&ring.mul(&a, &i))).unwrap_or(false), "unit inverse");
        }
        if let Some(k) = &residue {
            let (ra, rb) = (ring.residue_map(&a), ring.residue_map(&b));
            if let (Ok(ra), Ok(rb)) = (ra, rb) {
                check(ring.residue_map(&ring.add(&a, &b)).ok() == Some(k.add(&ra, &rb)), "residue additivity");
                check(ring.residue_map(&ring.mul(&a, &b)).ok() == Some(k.mul(&ra, &rb)), "residue multiplicativity");
                check(ring.in_radical(&a).ok() == Some(k.is_zero(&ra)), "radical = kernel of residue");
            } else {
                check(false, "residue map");
            }
        }
    }
    failures
}

fn ring_axioms_stage(config: &PipelineConfig) -> Result<(bool, Value)> {
    let mut details = serde_json::Map::new();
    let mut ok = true;
    for spec in AXIOM_RINGS {
        let ring = Ring::parse(spec)?;
        let failures = ring_axiom_failures(&ring, config.samples, config.seed);
        ok &= failures.is_empty();
        details.insert(spec.into(), json!({ "samples": config.samples, "failures": failures }));
    }
    Ok((ok, Value::Object(details)))
}

/// `(system, number of roots)` for every supported system checked.
pub const ROOT_COUNTS: [(&str, usize); 10] = [
    ("A2", 6),
    ("A3", 12),
    ("A5", 30),
    ("A7", 56),
    ("D4", 24),
    ("D5", 40),
    ("D6", 60),
    ("E6", 72),
    ("E7", 126),
    ("E8", 240),
];

/// Structural checks of a root system: norms, negation, simple-root
/// expansions, and the extraspecial structure-constant count.
pub fn root_system_failures(rs: &RootSystem, expected_roots: usize) -> Vec<String> {
    let mut failures = Vec::new();
    let m = rs.num_roots();
    if m != expected_roots {
        failures.push(format!("{} roots, expected {expected_roots}", m));
    }
    for r in 0..m {
        if rs.pairing(r, r) != 2 {
            failures.push(format!("⟨{0},{0}⟩ ≠ 2", rs.format_root(r)));
        }
        if rs.negate(rs.negate(r)) != r || rs.is_positive(r) == rs.is_positive(rs.negate(r)) {
            failures.push(format!("negation of {} is inconsistent", rs.format_root(r)));
        }
        let coords = rs.simple_coords(r);
        let sign = if rs.is_positive(r) { 1 } else { -1 };
        if coords.iter().any(|&c| c * sign < 0) || coords.iter().sum::<i32>() != rs.height(r) || rs.height(r) * sign <= 0 {
            failures.push(format!("simple-root expansion of {} is not sign-coherent", rs.format_root(r)));
        }
    }
    let summable = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).filter(|&(a, b)| rs.pairing(a, b) == -1).count();
    let adj = Adjoint::new(rs.clone());
    if adj.structure_constants().len() != summable {
        failures.push(format!("{} structure constants for {summable} summable pairs", adj.structure_constants().len()));
    }
    failures
}

fn root_systems_stage() -> Result<(bool, Value)> {
    let mut details = serde_json::Map::new();
    let mut ok = true;
    for (name, count) in ROOT_COUNTS {
        let failures = root_system_failures(&RootSystem::parse(name)?, count);
        ok &= failures.is_empty();
        details.insert(name.into(), json!({ "roots": count, "failures": failures }));
    }
    Ok((ok, Value::Object(details)))
}

/// Systems and rings of the Steinberg sweep.
pub const STEINBERG_SYSTEMS: [&str; 3] = ["A3", "A5", "D4"];
pub const STEINBERG_RINGS: [&str; 4] = ["Z/4", "Z/8", "dual(Z/2)", "Zodd"];

fn steinberg_stage(config: &PipelineConfig) -> Result<(bool, Value)> {
    let jobs: Vec<(&str, &str, Relation)> = STEINBERG_SYSTEMS
        .iter()
        .flat_map(|s| STEINBERG_RINGS.iter().flat_map(move |r| Relation::STEINBERG.into_iter().map(move |rel| (*s, *r, rel))))
        .collect();
    let adjs: Vec<(&str, Adjoint)> =
        STEINBERG_SYSTEMS.iter().map(|s| Ok((*s, Adjoint::parse(s)?))).collect::<Result<_>>()?;
    let results: Vec<Result<_>> = jobs
        .par_iter()
        .map(|&(system, spec, rel)| {
            let adj = &adjs.iter().find(|(s, _)| *s == system).expect("system").1;
            sweep(adj, &Ring::parse(spec)?, rel, config.samples, config.seed)
        })
        .collect();
    let mut ok = true;
    let mut rows = Vec::new();
    for r in results {
        let r = r?;
        ok &= r.passed();
        rows.push(serde_json::to_value(&r).expect("serializable"));
    }
    Ok((ok, Value::Array(rows)))
}

/// Systems whose `Q_α³ = 1` is checked (all roots up to rank 6, simple roots
/// for `E_7`, `E_8`).
pub const QORDER_SYSTEMS: [&str; 11] = ["A2", "A3", "A4", "A5", "A6", "D4", "D5", "D6", "E6", "E7", "E8"];

fn order_identities_stage() -> Result<(bool, Value)> {
    let z4 = Ring::parse("Z/4")?;
    let results: Vec<Result<_>> = QORDER_SYSTEMS
        .par_iter()
        .map(|s| sweep(&Adjoint::parse(s)?, &z4, Relation::QOrder, 0, 0))
        .collect();
    let mut ok = true;
    let mut rows = Vec::new();
    for r in results {
        let r = r?;
        ok &= r.passed();
        rows.push(serde_json::to_value(&r).expect("serializable"));
    }
    let wij = sweep(&Adjoint::parse("A5")?, &z4, Relation::Wij, 0, 0)?;
    ok &= wij.passed();
    rows.push(serde_json::to_value(&wij).expect("serializable"));
    Ok((ok, Value::Array(rows)))
}

/// Systems of the diagonalization stage.
pub const DIAGONAL_SYSTEMS: [&str; 4] = ["A3", "A5", "D4", "E6"];

/// Checks `P Q_{α_1} P⁻¹ = D` with `D` diagonal over `{1, ξ, ξ²}` and equal
/// `ξ`, `ξ²` multiplicities; returns `(passed, multiplicities)`.
pub fn check_diagonalization(system: &str) -> Result<(bool, [usize; 3])> {
    let adj = Adjoint::parse(system)?;
    let ring = Ring::parse("omega(Z/4)")?;
    let alpha = adj.system().simple(1);
    let (p, d) = diagonalize_q(&adj, &ring, alpha)?;
    let q = adj.q_elem(&ring, alpha)?;
    let conj = p.mul(&q).mul(&p.inverse()?);
    let mult = eigen_multiplicities(&ring, &d)?;
    let ok = conj == d && d.is_diagonal() && mult[1] == mult[2] && mult.iter().sum::<usize>() == adj.dim();
    Ok((ok, mult))
}

fn diagonalization_stage() -> Result<(bool, Value)> {
    let mut ok = true;
    let mut details = serde_json::Map::new();
    for s in DIAGONAL_SYSTEMS {
        let (pass, [one, xi, xi2]) = check_diagonalization(s)?;
        ok &= pass;
        details.insert(s.into(), json!({ "pass": pass, "multiplicities": { "1": one, "xi": xi, "xi2": xi2 } }));
    }
    Ok((ok, Value::Object(details)))
}

/// `(system, target)` pairs compared against the printed partition lists.
pub const PARTITION_CASES: [(&str, Target); 5] =
    [("A5", Target::X1), ("A5", Target::X2), ("D4", Target::X1), ("D5", Target::X1), ("E6", Target::X1)];

/// Compares the computed and printed partitions as unordered root sets.
pub fn compare_partitions(system: &str, target: Target) -> Result<(bool, Value)> {
    let adj = Adjoint::parse(system)?;
    let rs = adj.system();
    let computed = computed_partition(&adj, target)?;
    let printed = printed_partition(rs, target)
        .ok_or_else(|| Error::UnsupportedSystem(format!("no printed partition for {system}")))?;
    let c = computed.as_set();
    let p = printed.as_set();
    let label = |part: &Vec<usize>| -> Vec<String> { part.iter().map(|&b| rs.basis_label(b)).collect() };
    let only_computed: Vec<Vec<String>> = c.difference(&p).map(label).collect();
    let only_printed: Vec<Vec<String>> = p.difference(&c).map(label).collect();
    let ok = c == p;
    Ok((
        ok,
        json!({
            "computed_parts": c.len(),
            "printed_parts": p.len(),
            "only_computed": only_computed,
            "only_printed": only_printed,
        }),
    ))
}

fn block_partitions_stage() -> Result<(bool, Value)> {
    let mut ok = true;
    let mut details = serde_json::Map::new();
    for (system, target) in PARTITION_CASES {
        let (pass, d) = compare_partitions(system, target)?;
        ok &= pass;
        let key = format!("{system}/{}", if target == Target::X1 { "x1" } else { "x2" });
        details.insert(key, json!({ "pass": pass, "detail": d }));
    }
    Ok((ok, Value::Object(details)))
}

fn fixtures_stage() -> Result<(bool, Value)> {
    let results: Vec<_> = FIXTURE_IDS.iter().map(|id| compare_fixture(id)).collect::<Result<_>>()?;
    let ok = results.iter().all(|r| r.matched);
    Ok((ok, serde_json::to_value(&results).expect("serializable")))
}

fn rigidity_stage() -> Result<(bool, Value)> {
    let reports: Vec<_> = SETUPS.iter().map(|s| rigidity_check(s, "F2")).collect::<Result<_>>()?;
    let ok = reports.iter().all(|r| match r.setup.as_str() {
        "fourth" | "third" => r.solution_dim == 0,
        _ => r.contained,
    } && r.gauge_solves);
    Ok((ok, serde_json::to_value(&reports).expect("serializable")))
}

fn centralizer_stage() -> Result<(bool, Value)> {
    let report = unipotent_centralizer(&Ring::parse("Z/4")?, "second")?;
    Ok((report.collapses_to_root_elements, serde_json::to_value(&report).expect("serializable")))
}

fn matrix_unit_stage() -> Result<(bool, Value)> {
    let z = Ring::integers();
    let unit = matrix_unit_extract(&z)?;
    let rs = RootSystem::parse("A3")?;
    Ok((
        true,
        json!({
            "row": rs.basis_label(unit.row),
            "col": rs.basis_label(unit.col),
            "scalar": z.format(&unit.scalar),
        }),
    ))
}

/// Random order-3 splits and constructed conjugate pairs over `ring`;
/// returns failure descriptions.
pub fn idempotent_failures(ring: &Ring, splits: usize, pairs: usize, seed: u64) -> Result<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for k in 0..splits {
        let n = rng.gen_range(2..=6);
        let a = random_order3(ring, n, &mut rng);
        let s = order3_split(&a)?;
        if s.e.mul(&s.e) != s.e || s.rank0 + s.rank1 != n {
            failures.push(format!("split {k} (n = {n}) violates e² = e or rank0 + rank1 = n"));
        }
    }
    for k in 0..pairs {
        let n = rng.gen_range(2..=6);
        let a = random_order3(ring, n, &mut rng);
        let u = RingMatrix::identity(ring, n).add(&random_radical(ring, n, &mut rng));
        let b = u.mul(&a).mul(&u.inverse()?);
        let t = conjugacy_witness(&a, &b)?;
        if t.mul(&a).mul(&t.inverse()?) != b {
            failures.push(format!("pair {k}: witness does not conjugate"));
        }
    }
    Ok(failures)
}

fn idempotent_split_stage(config: &PipelineConfig) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut details = serde_json::Map::new();
    for spec in ["Z/4", "dual(Z/2)"] {
        let failures = idempotent_failures(&Ring::parse(spec)?, 50, 20, config.seed)?;
        ok &= failures.is_empty();
        details.insert(spec.into(), json!({ "splits": 50, "pairs": 20, "failures": failures }));
    }
    Ok((ok, Value::Object(details)))
}
