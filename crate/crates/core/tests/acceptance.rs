//! Acceptance criteria. Each criterion prints a single
//! `criterion N … PASS|FAIL` line and then asserts; the runner executes all
//! nine in order and fails if any of them fails.

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chevkit_core::chevalley::Adjoint;
use chevkit_core::fixtures::{compare_fixture, find_sign_gauge, FIXTURE_IDS};
use chevkit_core::localtools::{conjugacy_witness, order3_split, random_order3, random_radical, residue_rank};
use chevkit_core::matrix::RingMatrix;
use chevkit_core::pipeline::{compare_partitions, PARTITION_CASES};
use chevkit_core::relations::{sweep, Relation};
use chevkit_core::rigidity::{matrix_unit_extract, rigidity_check, unipotent_centralizer, SETUPS};
use chevkit_core::spectral::diagonalize_q;
use chevkit_core::Ring;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEED: u64 = 7;

fn report(n: u32, title: &str, ok: bool, detail: &str) {
    println!("criterion {n} ({title}): {} — {detail}", if ok { "PASS" } else { "FAIL" });
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn criterion_1_steinberg_relations() {
    let start = Instant::now();
    let jobs: Vec<(&str, &str, Relation)> = ["A3", "A5", "D4"]
        .into_iter()
        .flat_map(|s| {
            ["Z/4", "Z/8", "dual(Z/2)", "Zodd"]
                .into_iter()
                .flat_map(move |r| Relation::STEINBERG.into_iter().map(move |rel| (s, r, rel)))
        })
        .collect();
    let failures: Vec<String> = jobs
        .par_iter()
        .map(|&(system, ring, rel)| {
            let check = sweep(&Adjoint::parse(system).unwrap(), &Ring::parse(ring).unwrap(), rel, 200, SEED).unwrap();
            assert!(check.checked >= 200 || rel == Relation::TorusConjugation, "{system}/{ring}/{rel}: too few checks");
            check.failures.iter().map(|f| format!("{system}/{ring}/{rel}: {f}")).collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && within(elapsed, Duration::from_secs(30));
    report(1, "Steinberg relations", ok, &format!("{} sweeps, {} failures, {:.1?}", jobs.len(), failures.len(), elapsed));
    assert!(ok, "{failures:?}");
}

fn criterion_2_order_identities() {
    let start = Instant::now();
    let z4 = Ring::parse("Z/4").unwrap();
    let systems = ["A2", "A3", "A4", "A5", "A6", "D4", "D5", "D6", "E6", "E7", "E8"];
    let mut results: Vec<_> = systems
        .par_iter()
        .map(|s| sweep(&Adjoint::parse(s).unwrap(), &z4, Relation::QOrder, 0, SEED).unwrap())
        .collect();
    results.push(sweep(&Adjoint::parse("A5").unwrap(), &z4, Relation::Wij, 0, SEED).unwrap());
    let elapsed = start.elapsed();
    let checked: usize = results.iter().map(|r| r.checked).sum();
    let failures: Vec<String> = results.iter().flat_map(|r| r.failures.clone()).collect();
    let ok = failures.is_empty() && within(elapsed, Duration::from_secs(60));
    report(2, "Q³ = E and w_{i,j} identities", ok, &format!("{checked} identities, {} failures, {elapsed:.1?}", failures.len()));
    assert!(ok, "{failures:?}");
}

fn criterion_3_fixture_reproduction() {
    let results: Vec<_> = FIXTURE_IDS.iter().map(|id| compare_fixture(id).unwrap()).collect();
    let mismatched: Vec<String> =
        results.iter().filter(|r| !r.matched).map(|r| format!("{}: {}", r.id, r.detail)).collect();
    let ok = mismatched.is_empty();
    report(3, "fixture reproduction", ok, &format!("{}/{} fixtures match up to gauge", results.len() - mismatched.len(), results.len()));
    assert!(ok, "{mismatched:#?}");
}

fn criterion_4_diagonalization() {
    let ring = Ring::parse("omega(Z/4)").unwrap();
    let xi = ring.xi().unwrap();
    let eigen = [ring.one(), xi.clone(), ring.mul(&xi, &xi)];
    let mut details = Vec::new();
    let mut ok = true;
    for system in ["A3", "A5", "D4", "E6"] {
        let adj = Adjoint::parse(system).unwrap();
        let alpha = adj.system().simple(1);
        let (p, _) = diagonalize_q(&adj, &ring, alpha).unwrap();
        let q = adj.q_elem(&ring, alpha).unwrap();
        let d = p.mul(&q).mul(&p.inverse().unwrap());
        let mut counts = [0usize; 3];
        let mut entries_ok = d.is_diagonal();
        for i in 0..d.n() {
            match eigen.iter().position(|e| e == d.get(i, i)) {
                Some(k) => counts[k] += 1,
                None => entries_ok = false,
            }
        }
        let pass = entries_ok && counts[1] == counts[2];
        ok &= pass;
        details.push(format!("{system} {counts:?}"));
    }
    report(4, "diagonalization over omega(Z/4)", ok, &details.join(", "));
    assert!(ok);
}

fn criterion_5_block_partitions() {
    let mut ok = true;
    let mut details = Vec::new();
    for (system, target) in PARTITION_CASES {
        let (pass, _) = compare_partitions(system, target).unwrap();
        ok &= pass;
        details.push(format!("{system}/{target:?} {}", if pass { "equal" } else { "differs" }));
    }
    report(5, "block partitions", ok, &details.join(", "));
    assert!(ok, "{details:?}");
}

fn criterion_6_rigidity() {
    let start = Instant::now();
    let reports: Vec<_> = SETUPS.iter().map(|s| rigidity_check(s, "F2").unwrap()).collect();
    let elapsed = start.elapsed();
    let mut ok = within(elapsed, Duration::from_secs(120));
    let mut details = Vec::new();
    for r in &reports {
        let pass = match r.setup.as_str() {
            "fourth" | "third" => r.solution_dim == 0,
            _ => r.contained,
        };
        ok &= pass;
        details.push(format!("{} dim {} gauge {} contained {}", r.setup, r.solution_dim, r.gauge_dim, r.contained));
    }
    report(6, "rigidity over F2", ok, &format!("{}; {elapsed:.1?}", details.join(", ")));
    assert!(ok, "{details:?}");
}

fn criterion_7_centralizer_collapse() {
    let start = Instant::now();
    let r = unipotent_centralizer(&Ring::parse("Z/4").unwrap(), "second").unwrap();
    let elapsed = start.elapsed();
    let ok = r.family_size == 4096
        && r.survivors.len() == 4
        && r.survivors.iter().all(|s| s.root_element.is_some())
        && within(elapsed, Duration::from_secs(120));
    report(
        7,
        "centralizer collapse over Z/4",
        ok,
        &format!("family {}, {} survivors, {elapsed:.1?}", r.family_size, r.survivors.len()),
    );
    assert!(ok, "{:?}", r.survivors);
}

/// Independent model of `sl_4`: matrix units `E_ij` for roots `e_i − e_j`,
/// `E_kk − E_{k+1,k+1}` for `h_k`; `x_α(1)` acts by conjugation with `1 + E_α`.
mod sl4 {
    pub type M4 = [[i64; 4]; 4];

    pub fn unit(i: usize, j: usize) -> M4 {
        let mut m = [[0; 4]; 4];
        m[i][j] = 1;
        m
    }

    pub fn mul(a: &M4, b: &M4) -> M4 {
        let mut c = [[0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        c
    }

    pub fn sub(a: &M4, b: &M4) -> M4 {
        let mut c = *a;
        for i in 0..4 {
            for j in 0..4 {
                c[i][j] -= b[i][j];
            }
        }
        c
    }

    /// `(1 + E) M (1 − E) − M` for nilpotent `E` with `E² = 0`.
    pub fn conj_minus_id(e: &M4, m: &M4) -> M4 {
        let em = mul(e, m);
        let me = mul(m, e);
        let eme = mul(&em, e);
        sub(&sub(&em, &me), &eme)
    }
}

fn criterion_8_matrix_unit_extraction() {
    let z = Ring::integers();
    let unit = matrix_unit_extract(&z).unwrap();
    let adj = Adjoint::parse("A3").unwrap();
    let rs = adj.system();
    let n = adj.dim();

    // Basis vector b as a 4×4 matrix.
    let model = |b: usize| -> sl4::M4 {
        if b < rs.num_roots() {
            let c = rs.coords2(b);
            let i = c.iter().position(|&v| v == 2).unwrap();
            let j = c.iter().position(|&v| v == -2).unwrap();
            sl4::unit(i, j)
        } else {
            let k = b - rs.num_roots();
            sl4::sub(&sl4::unit(k, k), &sl4::unit(k + 1, k + 1))
        }
    };
    // Coordinates of a traceless 4×4 matrix in the basis.
    let coords = |m: &sl4::M4| -> Vec<i64> {
        let mut v = vec![0; n];
        for (r, slot) in v.iter_mut().enumerate().take(rs.num_roots()) {
            let c = rs.coords2(r);
            let i = c.iter().position(|&x| x == 2).unwrap();
            let j = c.iter().position(|&x| x == -2).unwrap();
            *slot = m[i][j];
        }
        let mut partial = 0;
        for k in 0..3 {
            partial += m[k][k];
            v[rs.h_index(k + 1)] = partial;
        }
        v
    };
    let e1 = model(rs.simple(1));
    let e2 = model(rs.simple(2));
    let columns: Vec<Vec<i64>> = (0..n)
        .map(|b| {
            let mut m = model(b);
            for _ in 0..2 {
                m = sl4::conj_minus_id(&e2, &m);
                m = sl4::conj_minus_id(&e1, &m);
            }
            coords(&m)
        })
        .collect();
    let oracle_rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| columns[j][i]).collect()).collect();
    let oracle = RingMatrix::from_i64_rows(&z, &oracle_rows);
    let support = oracle.support();
    assert_eq!(support.len(), 1, "oracle is a matrix unit");
    let gauge = find_sign_gauge(&unit.matrix, &oracle);
    let expected = oracle.get(unit.row, unit.col).clone();
    let gauged_scalar = match &gauge {
        Some(g) if g[unit.row] * g[unit.col] == -1 => z.neg(&unit.scalar),
        _ => unit.scalar.clone(),
    };
    let ok = unit.matrix.support().len() == 1 && support[0] == (unit.row, unit.col) && gauged_scalar == expected;
    report(
        8,
        "matrix-unit extraction over Z",
        ok,
        &format!(
            "single entry at ({}, {}) = {}, oracle {}",
            rs.basis_label(unit.row),
            rs.basis_label(unit.col),
            z.format(&unit.scalar),
            z.format(&expected)
        ),
    );
    assert!(ok);
}

fn criterion_9_idempotent_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    for spec in ["Z/4", "dual(Z/2)"] {
        let ring = Ring::parse(spec).unwrap();
        for k in 0..50 {
            let n = rng.gen_range(2..=6);
            let a = random_order3(&ring, n, &mut rng);
            let s = order3_split(&a).unwrap();
            let complement = RingMatrix::identity(&ring, n).sub(&s.e);
            // e is idempotent, a acts trivially on its image, and the two
            // ranks add up.
            if s.e.mul(&s.e) != s.e
                || a.mul(&s.e) != s.e
                || s.rank0 + s.rank1 != n
                || residue_rank(&complement).unwrap() != s.rank1
            {
                failures.push(format!("{spec} split {k}"));
            }
        }
        for k in 0..20 {
            let n = rng.gen_range(2..=6);
            let a = random_order3(&ring, n, &mut rng);
            let u = RingMatrix::identity(&ring, n).add(&random_radical(&ring, n, &mut rng));
            let b = u.mul(&a).mul(&u.inverse().unwrap());
            let t = conjugacy_witness(&a, &b).unwrap();
            if t.mul(&a) != b.mul(&t) || t.inverse().is_err() {
                failures.push(format!("{spec} pair {k}"));
            }
        }
    }
    let ok = failures.is_empty();
    report(9, "order-3 idempotent split", ok, &format!("100 splits, 40 pairs, {} failures", failures.len()));
    assert!(ok, "{failures:?}");
}

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 9] = [
        ("criterion_1_steinberg_relations", criterion_1_steinberg_relations),
        ("criterion_2_order_identities", criterion_2_order_identities),
        ("criterion_3_fixture_reproduction", criterion_3_fixture_reproduction),
        ("criterion_4_diagonalization", criterion_4_diagonalization),
        ("criterion_5_block_partitions", criterion_5_block_partitions),
        ("criterion_6_rigidity", criterion_6_rigidity),
        ("criterion_7_centralizer_collapse", criterion_7_centralizer_collapse),
        ("criterion_8_matrix_unit_extraction", criterion_8_matrix_unit_extraction),
        ("criterion_9_idempotent_split", criterion_9_idempotent_split),
    ];
    // `cargo test <filter>` passes the filter through; honour it by name.
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        if panic::catch_unwind(run).is_err() {
            failed.push(name);
        }
    }
    println!("acceptance: {}/{ran} criteria pass", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
