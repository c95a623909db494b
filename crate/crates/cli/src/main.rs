//! `lcstoric`: JSON cone-spec ingestion, subcommand dispatch, and canonical
//! JSON report emission.
//!
//! Exit codes: 0 affirmative verdict (good / equal / certified / computed),
//! 1 negative verdict (not good / not equal / none), 2 usage or validation
//! error.

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use lcs_toric::cone::Cone;
use lcs_toric::goodness::check_good;
use lcs_toric::invariant::{
    deck_reduce, gl_equivalent, make_invariant, moment_slice, orbit_summary, InvariantError,
    LcsInvariant, DEFAULT_SEARCH_BUDGET,
};
use lcs_toric::lattice::RatVector;
use lcs_toric::potential::{
    build_lp, certify_positivity, solve_feasibility, Feasibility, PotentialError,
};

use lcs_toric_cli::report::*;
use lcs_toric_cli::spec::{parse_cone_file, parse_rational, CliError, ConeSpec};

#[derive(Parser)]
#[command(
    name = "lcstoric",
    about = "Exact classification data for compact toric LCS manifolds of LCK type",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Human-readable summary on stderr.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether the cone is good, with per-face certificates.
    CheckGood {
        spec: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// Enumerate the full face lattice.
    Faces {
        spec: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// Enumerate the extreme rays (V-representation).
    Rays {
        spec: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// The moment polytope slice against the spec's lee_vector.
    Slice {
        spec: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// Validate the classification pair (C, a) with scale lambda.
    Invariant {
        spec: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// Search for a unimodular equivalence between two cone specs.
    Equiv {
        spec1: PathBuf,
        spec2: PathBuf,
        #[arg(long)]
        normalize: bool,
        #[arg(long, value_name = "B")]
        search_budget: Option<u64>,
    },
    /// Reduce a point into the deck-action fundamental slab.
    DeckReduce {
        spec: PathBuf,
        #[arg(long)]
        normalize: bool,
        /// Comma-separated rational coordinates, e.g. "4,0" or "1/3,1/3".
        #[arg(long, value_name = "COORDS")]
        point: String,
        /// Overrides the spec's lambda.
        #[arg(long, value_name = "p/q")]
        lambda: Option<String>,
    },
    /// Per-face subtorus lattice data for a good cone.
    OrbitSummary {
        spec: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// LP-certified check of the discrete positivity lemma.
    PotentialCheck {
        #[arg(long, value_name = "p/q")]
        lambda: String,
        #[arg(long, value_name = "N")]
        grid: usize,
        #[arg(long, value_name = "p/q")]
        eps: String,
        /// Solve the single anchored LP instead of the full campaign.
        #[arg(long, value_name = "k")]
        anchor: Option<usize>,
    },
}

fn main() {
    let cli = Cli::parse();
    let command = command_name(&cli.cmd);
    let mut digest = String::new();
    let out = run(&cli, &mut digest);
    let code = match out {
        Ok((result, warnings, code)) => {
            println!("{}", envelope(command, &digest, result, &warnings));
            code
        }
        Err(e) => {
            let result = error_result(e.kind(), e.message());
            println!("{}", envelope(command, &digest, result, &[]));
            if cli.verbose {
                eprintln!("{}: error: {}: {}", command, e.kind(), e.message());
            }
            2
        }
    };
    std::process::exit(code);
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::CheckGood { .. } => "check-good",
        Cmd::Faces { .. } => "faces",
        Cmd::Rays { .. } => "rays",
        Cmd::Slice { .. } => "slice",
        Cmd::Invariant { .. } => "invariant",
        Cmd::Equiv { .. } => "equiv",
        Cmd::DeckReduce { .. } => "deck-reduce",
        Cmd::OrbitSummary { .. } => "orbit-summary",
        Cmd::PotentialCheck { .. } => "potential-check",
    }
}

type Outcome = (Value, Vec<String>, i32);

fn run(cli: &Cli, digest: &mut String) -> Result<Outcome, CliError> {
    match &cli.cmd {
        Cmd::CheckGood { spec, normalize } => {
            let (s, bytes) = load(spec)?;
            *digest = hex_digest(&[&bytes]);
            let (cone, warnings) = build(&s, *normalize)?;
            let report = check_good(&cone);
            if cli.verbose {
                eprintln!(
                    "check-good: {} ({} facets, {} certificates)",
                    if report.good { "good" } else { "not good" },
                    cone.num_facets(),
                    report.certificates.len()
                );
            }
            let code = if report.good { 0 } else { 1 };
            Ok((goodness_value(&report), warnings, code))
        }
        Cmd::Faces { spec, normalize } => {
            let (s, bytes) = load(spec)?;
            *digest = hex_digest(&[&bytes]);
            let (cone, warnings) = build(&s, *normalize)?;
            let faces = cone.face_lattice();
            if cli.verbose {
                eprintln!("faces: {} faces", faces.len());
            }
            let mut o = Map::new();
            o.insert("faces".into(), faces_value(&faces));
            Ok((Value::Object(o), warnings, 0))
        }
        Cmd::Rays { spec, normalize } => {
            let (s, bytes) = load(spec)?;
            *digest = hex_digest(&[&bytes]);
            let (cone, warnings) = build(&s, *normalize)?;
            let rays = cone.rays();
            if cli.verbose {
                eprintln!("rays: {} extreme rays", rays.len());
            }
            let mut o = Map::new();
            o.insert("rays".into(), rays_value(&rays));
            Ok((Value::Object(o), warnings, 0))
        }
        Cmd::Slice { spec, normalize } => {
            let (s, bytes) = load(spec)?;
            *digest = hex_digest(&[&bytes]);
            let lee = s
                .lee_vector
                .clone()
                .ok_or_else(|| CliError::MissingField("lee_vector".into()))?;
            let (cone, warnings) = build(&s, *normalize)?;
            let p = moment_slice(&cone, &lee).map_err(validation)?;
            if cli.verbose {
                eprintln!("slice: {} vertices", p.vertices.len());
            }
            Ok((polytope_value(&p), warnings, 0))
        }
        Cmd::Invariant { spec, normalize } => {
            let (s, bytes) = load(spec)?;
            *digest = hex_digest(&[&bytes]);
            let (a_label, a) = require_a(&s)?;
            let lambda = require_lambda(&s)?;
            let (cone, warnings) = build(&s, *normalize)?;
            match make_invariant(cone, a, lambda.clone()) {
                Ok(inv) => {
                    if cli.verbose {
                        eprintln!("invariant: valid pair, a={a_label}");
                    }
                    let mut o = Map::new();
                    o.insert("valid".into(), Value::Bool(true));
                    o.insert("period_a".into(), Value::String(a_label));
                    o.insert("scale_lambda".into(), rat_value(&lambda));
                    o.insert("dim".into(), Value::from(inv.cone.dim() as u64));
                    o.insert(
                        "normals".into(),
                        Value::Array(inv.cone.normals().iter().map(ivec_value).collect()),
                    );
                    Ok((Value::Object(o), warnings, 0))
                }
                Err(InvariantError::NotGood(report)) => {
                    if cli.verbose {
                        eprintln!("invariant: cone is not good");
                    }
                    let mut o = Map::new();
                    o.insert("valid".into(), Value::Bool(false));
                    o.insert("goodness".into(), goodness_value(&report));
                    Ok((Value::Object(o), warnings, 1))
                }
                Err(e) => Err(validation(e)),
            }
        }
        Cmd::Equiv {
            spec1,
            spec2,
            normalize,
            search_budget,
        } => {
            let (s1, b1) = load(spec1)?;
            let (s2, b2) = load(spec2)?;
            *digest = hex_digest(&[&b1, &b2]);
            let i1 = invariant_of(&s1, *normalize)?;
            let i2 = invariant_of(&s2, *normalize)?;
            let budget = search_budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
            match gl_equivalent(&i1.0, &i2.0, budget).map_err(validation)? {
                Some(w) => {
                    if cli.verbose {
                        eprintln!("equiv: witness found");
                    }
                    let mut o = Map::new();
                    o.insert("equivalent".into(), Value::Bool(true));
                    o.insert("witness".into(), witness_value(&w));
                    let warnings = [i1.1, i2.1].concat();
                    Ok((Value::Object(o), warnings, 0))
                }
                None => {
                    if cli.verbose {
                        eprintln!("equiv: no witness");
                    }
                    let mut o = Map::new();
                    o.insert("equivalent".into(), Value::Bool(false));
                    o.insert("witness".into(), Value::Null);
                    let warnings = [i1.1, i2.1].concat();
                    Ok((Value::Object(o), warnings, 1))
                }
            }
        }
        Cmd::DeckReduce {
            spec,
            normalize,
            point,
            lambda,
        } => {
            let (s, bytes) = load(spec)?;
            *digest = hex_digest(&[&bytes, point.as_bytes()]);
            let lee = s
                .lee_vector
                .clone()
                .ok_or_else(|| CliError::MissingField("lee_vector".into()))?;
            let lam = match lambda {
                Some(l) => parse_rational(l)?,
                None => require_lambda(&s)?,
            };
            let l = parse_point(point)?;
            let (cone, warnings) = build(&s, *normalize)?;
            let (rep, m) = deck_reduce(&l, &lee, &lam, &cone).map_err(validation)?;
            if cli.verbose {
                eprintln!("deck-reduce: m={m}");
            }
            let mut o = Map::new();
            o.insert("rep".into(), rvec_value(&rep));
            o.insert("m".into(), Value::from(m));
            Ok((Value::Object(o), warnings, 0))
        }
        Cmd::OrbitSummary { spec, normalize } => {
            let (s, bytes) = load(spec)?;
            *digest = hex_digest(&[&bytes]);
            let (cone, warnings) = build(&s, *normalize)?;
            match orbit_summary(&cone) {
                Ok(table) => {
                    if cli.verbose {
                        eprintln!("orbit-summary: {} rows", table.rows.len());
                    }
                    Ok((subtorus_value(&table), warnings, 0))
                }
                Err(InvariantError::NotGood(report)) => {
                    if cli.verbose {
                        eprintln!("orbit-summary: cone is not good");
                    }
                    let mut o = Map::new();
                    o.insert("good".into(), Value::Bool(false));
                    o.insert("goodness".into(), goodness_value(&report));
                    Ok((Value::Object(o), warnings, 1))
                }
                Err(e) => Err(validation(e)),
            }
        }
        Cmd::PotentialCheck {
            lambda,
            grid,
            eps,
            anchor,
        } => {
            let label = format!(
                "lambda={lambda};grid={grid};eps={eps};anchor={}",
                anchor.map_or("-".to_string(), |k| k.to_string())
            );
            *digest = hex_digest(&[label.as_bytes()]);
            let lam = parse_rational(lambda)?;
            let e = parse_rational(eps)?;
            match anchor {
                Some(k0) => {
                    let lp = build_lp(&lam, *grid, &e, Some(*k0)).map_err(validation)?;
                    match solve_feasibility(&lp).map_err(validation)? {
                        Feasibility::Infeasible(cert) => {
                            if cli.verbose {
                                eprintln!("potential-check: anchor {k0} infeasible");
                            }
                            let mut o = Map::new();
                            o.insert("verdict".into(), Value::String("Infeasible".into()));
                            o.insert("anchor".into(), Value::from(*k0 as u64));
                            o.insert("certificate".into(), farkas_value(&cert));
                            Ok((Value::Object(o), Vec::new(), 0))
                        }
                        Feasibility::Feasible(w) => {
                            if cli.verbose {
                                eprintln!("potential-check: anchor {k0} feasible");
                            }
                            let mut o = Map::new();
                            o.insert("verdict".into(), Value::String("Feasible".into()));
                            o.insert("anchor".into(), Value::from(*k0 as u64));
                            o.insert("witness".into(), rvec_value(&w));
                            Ok((Value::Object(o), Vec::new(), 1))
                        }
                    }
                }
                None => match certify_positivity(&lam, *grid, &e) {
                    Ok(v) => {
                        if cli.verbose {
                            eprintln!(
                                "potential-check: {} ({} anchors)",
                                if v.certified { "Certified" } else { "NotCertified" },
                                v.certificates.len()
                            );
                        }
                        let code = if v.certified { 0 } else { 1 };
                        Ok((verdict_value(&v), Vec::new(), code))
                    }
                    Err(PotentialError::RefutationFound { anchor, witness }) => {
                        if cli.verbose {
                            eprintln!("potential-check: refuted at anchor {anchor}");
                        }
                        let mut o = Map::new();
                        o.insert("verdict".into(), Value::String("Refuted".into()));
                        o.insert("anchor".into(), Value::from(anchor as u64));
                        o.insert("witness".into(), rvec_value(&witness));
                        Ok((Value::Object(o), Vec::new(), 1))
                    }
                    Err(e) => Err(validation(e)),
                },
            }
        }
    }
}

fn load(path: &Path) -> Result<(ConeSpec, Vec<u8>), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let spec = parse_cone_file(&bytes)?;
    Ok((spec, bytes))
}

fn build(s: &ConeSpec, normalize_flag: bool) -> Result<(Cone, Vec<String>), CliError> {
    Cone::build(s.dim, s.normals.clone(), s.normalize || normalize_flag).map_err(validation)
}

fn invariant_of(
    s: &ConeSpec,
    normalize_flag: bool,
) -> Result<(LcsInvariant, Vec<String>), CliError> {
    let (_, a) = require_a(s)?;
    let lambda = require_lambda(s)?;
    let (cone, warnings) = build(s, normalize_flag)?;
    let inv = make_invariant(cone, a, lambda).map_err(validation)?;
    Ok((inv, warnings))
}

fn require_a(s: &ConeSpec) -> Result<(String, BigRational), CliError> {
    s.a.clone().ok_or_else(|| CliError::MissingField("a".into()))
}

fn require_lambda(s: &ConeSpec) -> Result<BigRational, CliError> {
    s.lambda
        .clone()
        .ok_or_else(|| CliError::MissingField("lambda".into()))
}

fn parse_point(s: &str) -> Result<RatVector, CliError> {
    let entries = s
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::BadArgument(format!("--point: {}", e.message())))?;
    if entries.is_empty() {
        return Err(CliError::BadArgument("--point: empty".into()));
    }
    Ok(RatVector::new(entries))
}

fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::ValidationFailed(e.to_string())
}

fn hex_digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}
