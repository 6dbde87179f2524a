//! `chevkit`: generator matrices, relation sweeps, fixture comparisons and the
//! end-to-end verification pipeline for Chevalley groups over local rings.
//!
//! Exit status: 0 when every reported check passes, 1 when a check fails,
//! 2 on usage errors (bad arguments, unsupported systems, non-local rings).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chevkit_core::chevalley::Adjoint;
use chevkit_core::fixtures::{compare_fixture, FIXTURE_IDS};
use chevkit_core::localtools::order3_split;
use chevkit_core::matrix::RingMatrix;
use chevkit_core::pipeline::{run_pipeline, verify_relations, PipelineConfig, PipelineReport, Stage, Status};
use chevkit_core::relations::parse_relation_set;
use chevkit_core::rigidity::{rigidity_check, unipotent_centralizer};
use chevkit_core::rootsys::RootSystem;
use chevkit_core::spectral::{computed_partition, diagonalize_q, printed_partition, Target};
use chevkit_core::{Error, Ring};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "chevkit", version, about = "Chevalley groups over local rings: generators, relations, rigidity checks")]
struct Cli {
    /// Ring specification, e.g. Z/4, dual(Z/2), omega(Z/4), Zodd.
    #[arg(long, global = true)]
    ring: Option<String>,
    /// Root system, e.g. A3, D4, E6.
    #[arg(long, global = true)]
    system: Option<String>,
    /// Seed of the deterministic sampler.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Emit machine-readable JSON instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Restrict the pipeline to these stages (comma-separated or repeated).
    #[arg(long, global = true, value_delimiter = ',')]
    only: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ElemKind {
    X,
    W,
    H,
    Q,
    Wij,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    X1,
    X2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the roots, simple roots and basis order of a root system.
    Roots {
        /// System name such as A3 (defaults to --system).
        name: Option<String>,
    },
    /// Emit a generator matrix as JSON.
    Gen {
        #[arg(long, value_enum)]
        elem: ElemKind,
        /// Root index (0-based in the basis root order; x, w, h, q).
        #[arg(long, default_value_t = 0)]
        root: usize,
        /// Parameter t (x, w, h).
        #[arg(long, default_value = "1")]
        t: String,
        /// Positions i, j in the orthogonal sequence (1-based; wij).
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
    },
    /// Sweep relations on seeded random samples.
    Verify {
        /// System (defaults to --system).
        system: Option<String>,
        /// Ring (defaults to --ring).
        ring_spec: Option<String>,
        /// Relation set: steinberg, all, or a single relation name.
        #[arg(default_value = "steinberg")]
        relations: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Block partition of the adjoint basis for a known-set.
    Blocks {
        #[arg(long, value_enum, default_value = "x1")]
        target: TargetArg,
    },
    /// Diagonalize Q for a root over omega(R).
    Diag {
        #[arg(long, default_value_t = 0)]
        root: usize,
    },
    /// Linearized rigidity check of a block fixture.
    Rigidity {
        #[arg(long)]
        fixture: String,
        #[arg(long, default_value = "F2")]
        field: String,
    },
    /// Enumerate the unipotent centralizer family of the second-type block.
    Centralizer6,
    /// Rank split of an order-3 matrix read from a JSON matrix file.
    Split3 {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Compare generated matrices with the transcribed fixtures.
    Fixtures {
        /// Fixture id (all when omitted).
        id: Option<String>,
    },
    /// Run the end-to-end verification pipeline.
    Pipeline {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

/// Why a command did not succeed.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::MalformedSpec(_)
            | Error::MalformedElement { .. }
            | Error::NotLocal(_)
            | Error::UnsupportedSystem(_)
            | Error::UnknownFixture(_)
            | Error::UnknownRelation(_)
            | Error::UnknownStage(_)
            | Error::NotAField(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

/// Command output: a JSON value, a human summary and a verdict.
struct Outcome {
    value: Value,
    summary: Option<String>,
    passed: bool,
}

impl Outcome {
    fn data(value: Value) -> Outcome {
        Outcome { value, summary: None, passed: true }
    }

    fn report(report: &PipelineReport) -> Outcome {
        let summary = report
            .stages
            .iter()
            .map(|s| {
                let status = match s.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Skipped => "skipped",
                };
                format!("{:<20} {status}", s.name)
            })
            .collect::<Vec<_>>()
            .join("\n");
        Outcome {
            value: serde_json::to_value(report).expect("serializable"),
            summary: Some(summary),
            passed: report.passed(),
        }
    }
}

fn required(value: Option<String>, what: &str) -> Result<String, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("missing {what}")))
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let ring = || -> Result<Ring, Failure> { Ok(Ring::parse(&required(cli.ring.clone(), "--ring")?)?) };
    let adjoint = || -> Result<Adjoint, Failure> { Ok(Adjoint::parse(&required(cli.system.clone(), "--system")?)?) };
    match cli.command {
        Command::Roots { name } => {
            let name = required(name.or(cli.system.clone()), "root system")?;
            Ok(Outcome::data(RootSystem::parse(&name)?.to_json()))
        }
        Command::Gen { elem, root, t, i, j } => {
            let (adj, ring) = (adjoint()?, ring()?);
            let rs = adj.system();
            if root >= rs.num_roots() {
                return Err(Failure::Usage(format!("root index {root} out of range (< {})", rs.num_roots())));
            }
            let t = ring.parse_elem(&t)?;
            let m = match elem {
                ElemKind::X => adj.x_elem(&ring, root, &t)?,
                ElemKind::W => adj.w_elem(&ring, root, &t)?,
                ElemKind::H => adj.h_elem(&ring, root, &t)?,
                ElemKind::Q => adj.q_elem(&ring, root)?,
                ElemKind::Wij => {
                    let seq = rs.orthogonal_sequence();
                    let k = seq.len();
                    if i == 0 || j == 0 || i > k || j > k || i == j {
                        return Err(Failure::Usage(format!("need distinct positions 1..={k}")));
                    }
                    adj.wij_elem(&ring, &seq, i - 1, j - 1)?
                }
            };
            Ok(Outcome::data(m.to_json()))
        }
        Command::Verify { system, ring_spec, relations, samples } => {
            let system = required(system.or(cli.system.clone()), "root system")?;
            let ring_spec = required(ring_spec.or(cli.ring.clone()), "ring")?;
            let relations = parse_relation_set(&relations)?;
            Ok(Outcome::report(&verify_relations(&system, &ring_spec, &relations, samples, cli.seed)?))
        }
        Command::Blocks { target } => {
            let adj = adjoint()?;
            let target = match target {
                TargetArg::X1 => Target::X1,
                TargetArg::X2 => Target::X2,
            };
            let rs = adj.system();
            let computed = computed_partition(&adj, target)?;
            let printed = printed_partition(rs, target);
            let matches = printed.as_ref().map(|p| p.as_set() == computed.as_set());
            Ok(Outcome::data(json!({
                "system": rs.name(),
                "parts": computed.labels(rs),
                "matches_printed": matches,
            })))
        }
        Command::Diag { root } => {
            let (adj, ring) = (adjoint()?, ring()?);
            if root >= adj.system().num_roots() {
                return Err(Failure::Usage(format!("root index {root} out of range")));
            }
            let (p, d) = diagonalize_q(&adj, &ring, root)?;
            Ok(Outcome::data(json!({ "P": p.to_json(), "D": d.to_json() })))
        }
        Command::Rigidity { fixture, field } => {
            let report = rigidity_check(&fixture, &field)?;
            let passed = match fixture.as_str() {
                "fourth" | "third" => report.solution_dim == 0,
                _ => report.contained,
            };
            let summary = format!(
                "{fixture} over {field}: solution_dim {} gauge_dim {} contained {}",
                report.solution_dim, report.gauge_dim, report.contained
            );
            Ok(Outcome { value: serde_json::to_value(&report).expect("serializable"), summary: Some(summary), passed })
        }
        Command::Centralizer6 => {
            let ring = match cli.ring.clone() {
                Some(spec) => Ring::parse(&spec)?,
                None => Ring::parse("Z/4")?,
            };
            let report = unipotent_centralizer(&ring, "second")?;
            let summary = format!(
                "{} family members, {} invertible, {} survivors, collapses to root elements: {}",
                report.family_size,
                report.invertible,
                report.survivors.len(),
                report.collapses_to_root_elements
            );
            Ok(Outcome {
                value: serde_json::to_value(&report).expect("serializable"),
                summary: Some(summary),
                passed: report.collapses_to_root_elements,
            })
        }
        Command::Split3 { matrix } => {
            let text = std::fs::read_to_string(&matrix)
                .map_err(|e| Failure::Usage(format!("{}: {e}", matrix.display())))?;
            let value: Value =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", matrix.display())))?;
            let a = RingMatrix::from_json(&value)?;
            if let Some(spec) = &cli.ring {
                if Ring::parse(spec)? != *a.ring() {
                    return Err(Failure::Usage(format!("matrix is over {}, not {spec}", a.ring().spec())));
                }
            }
            let split = order3_split(&a)?;
            Ok(Outcome::data(json!({ "rank0": split.rank0, "rank1": split.rank1 })))
        }
        Command::Fixtures { id } => {
            let ids: Vec<&str> = match &id {
                Some(id) => vec![id.as_str()],
                None => FIXTURE_IDS.to_vec(),
            };
            let results = ids.iter().map(|id| compare_fixture(id)).collect::<Result<Vec<_>, _>>()?;
            let summary = results
                .iter()
                .map(|r| format!("{:<20} {}", r.id, if r.matched { "pass" } else { "FAIL" }))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome {
                passed: results.iter().all(|r| r.matched),
                value: serde_json::to_value(&results).expect("serializable"),
                summary: Some(summary),
            })
        }
        Command::Pipeline { samples } => {
            let only = cli.only.iter().map(|s| s.parse::<Stage>()).collect::<Result<Vec<_>, _>>()?;
            let report = run_pipeline(&PipelineConfig { seed: cli.seed, samples, only });
            Ok(Outcome::report(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(outcome) => {
            let text = match (&outcome.summary, json) {
                (Some(summary), false) => summary.clone(),
                _ => serde_json::to_string_pretty(&outcome.value).expect("serializable"),
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
