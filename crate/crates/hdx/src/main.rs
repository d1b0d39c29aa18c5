//! Command-line interface: generate complexes, analyze them, and emit
//! certificate reports.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hdx::cert::{CertStatus, Certificate, Report};
use hdx::error::{HdxError, Result};
use hdx::gen::{complete_multipartite, complete_skeleton, flag_random};
use hdx::report::{run_full_report, unknown_stages, ReportOptions};
use hdx::WeightedComplex;

#[derive(Parser)]
#[command(
    name = "hdx",
    about = "Weighted simplicial complexes, link spectra, and numerical certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a complex and write it in the text (or JSON) format.
    Generate(GenerateArgs),
    /// Summarize a complex: levels, weights, connectivity.
    Analyze(AnalyzeArgs),
    /// Spectral profile of the links and the descent certificates.
    Spectra(InputArgs),
    /// Run the full certificate suite.
    Verify(VerifyArgs),
    /// Combined Cheeger constant at one level.
    Cheeger(CheegerArgs),
    /// Mixing inequalities at one level.
    Mixing(MixingArgs),
    /// Geometric overlap of an embedding.
    Overlap(OverlapArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Vertex count (complete, flag).
    #[arg(long)]
    vertices: Option<usize>,
    /// Complex dimension (complete, flag).
    #[arg(long)]
    dim: Option<usize>,
    /// Side sizes, comma separated (multipartite).
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Edge probability (flag).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the JSON mirror instead of the text format.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Complete,
    Multipartite,
    Flag,
}

#[derive(Args)]
struct InputArgs {
    /// Complex file (text, or JSON with a .json extension).
    complex: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    complex: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    complex: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random trials per identity.
    #[arg(long, default_value_t = 64)]
    trials: usize,
    /// Restrict to stages (comma separated).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Embedding file for the overlap stage.
    #[arg(long)]
    embedding: Option<PathBuf>,
    /// Grid resolution for overlap above dimension 2.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args)]
struct CheegerArgs {
    complex: PathBuf,
    /// Level of the constant.
    #[arg(long)]
    k: isize,
    /// Exhaustive enumeration (default).
    #[arg(long, conflicts_with = "sample")]
    exhaustive: bool,
    /// Sample this many random tuples instead.
    #[arg(long)]
    sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report h_inner and h_out of one family instead: classes separated by
    /// ';', vertices by ',' (e.g. "0,1;2").
    #[arg(long)]
    family: Option<String>,
}

#[derive(Args)]
struct MixingArgs {
    complex: PathBuf,
    /// Number of classes minus one.
    #[arg(long)]
    l: usize,
    /// Check the side-respecting (partite) inequalities instead.
    #[arg(long)]
    partite: bool,
    /// Exhaustive family enumeration (default when it fits the budget).
    #[arg(long, conflicts_with = "trials")]
    exhaustive: bool,
    /// Random families to sample otherwise.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OverlapArgs {
    complex: PathBuf,
    /// Embedding file: one line per vertex, `v x_0 ... x_{n-1}`.
    #[arg(long)]
    embedding: PathBuf,
    /// Grid resolution; forces sampling mode.
    #[arg(long)]
    grid: Option<usize>,
    /// Heavy-vertex constant for the overlap threshold (with --c).
    #[arg(long)]
    omega: Option<f64>,
    /// Density constant for the overlap threshold (with --omega).
    #[arg(long)]
    c: Option<f64>,
}

fn load(path: &PathBuf) -> Result<WeightedComplex> {
    hdx::io::read_complex_any(path)
}

fn emit<T: serde::Serialize>(value: &T) -> Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    println!("{json}");
    Ok(())
}

fn report_exit(report: &Report) -> ExitCode {
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate(args) => {
            let x = match args.kind {
                GenKind::Complete => complete_skeleton(
                    args.vertices.ok_or_else(|| missing("--vertices"))?,
                    args.dim.ok_or_else(|| missing("--dim"))?,
                )?,
                GenKind::Multipartite => complete_multipartite(&args.sizes)?,
                GenKind::Flag => {
                    let out = flag_random(
                        args.vertices.ok_or_else(|| missing("--vertices"))?,
                        args.p.ok_or_else(|| missing("--p"))?,
                        args.dim.ok_or_else(|| missing("--dim"))?,
                        args.seed,
                    )?;
                    if out.pruned_vertices > 0 {
                        eprintln!(
                            "warning: pruned {} vertices outside the pure part",
                            out.pruned_vertices
                        );
                    }
                    out.complex
                }
            };
            let mut buf: Vec<u8> = Vec::new();
            if args.json {
                serde_json::to_writer_pretty(&mut buf, &hdx::io::complex_to_json(&x))?;
                buf.push(b'\n');
            } else {
                hdx::io::write_complex_text(&x, &mut buf)?;
            }
            match args.out {
                Some(path) => std::fs::write(path, buf)?,
                None => std::io::stdout().write_all(&buf)?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze(args) => {
            let x = load(&args.complex)?;
            let counts: Vec<usize> = (-1..=x.dim() as isize)
                .map(|k| x.num_simplices(k))
                .collect();
            let report = serde_json::json!({
                "dim": x.dim(),
                "vertices": x.num_vertices(),
                "simplices_per_level": counts,
                "total_weight": x.empty_weight(),
                "homogeneous": x.is_homogeneous(),
                "partite": x.partition().is_some(),
                "connectivity": x.connectivity_report(),
            });
            emit(&report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectra(args) => {
            let x = load(&args.complex)?;
            let (certs, profile) = hdx::spectra::verify_descent(&x)?;
            let out = serde_json::json!({
                "profile": profile,
                "certificates": certs,
            });
            emit(&out)?;
            Ok(certs_exit(&certs))
        }
        Command::Verify(args) => {
            let x = load(&args.complex)?;
            let unknown = unknown_stages(&args.only);
            if !unknown.is_empty() {
                return Err(HdxError::InvalidParameter(format!(
                    "unknown stages {unknown:?}; known: {:?}",
                    hdx::report::STAGES
                )));
            }
            let embedding = match args.embedding {
                Some(path) => Some(hdx::io::parse_embedding(
                    std::fs::File::open(path)?,
                    x.num_vertices(),
                )?),
                None => None,
            };
            let opts = ReportOptions {
                seed: args.seed,
                trials: args.trials,
                only: args.only,
                embedding,
                grid: args.grid,
                ..Default::default()
            };
            let report = run_full_report(&x, args.complex.display().to_string(), &opts)?;
            println!("{}", hdx::report::report_to_json(&report)?);
            Ok(report_exit(&report))
        }
        Command::Cheeger(args) => {
            let x = load(&args.complex)?;
            if let Some(spec) = &args.family {
                let family = parse_family(spec)?;
                let (h_out, degenerate) = hdx::cheeger::h_out(&x, &family);
                let h_inner = hdx::walks::h_inner(&x, &family)?;
                emit(&serde_json::json!({
                    "family": family.sets(),
                    "h_inner": h_inner,
                    "h_out": h_out,
                    "spans_no_simplex": degenerate,
                }))?;
                return Ok(ExitCode::SUCCESS);
            }
            let report = match args.sample {
                Some(samples) => hdx::cheeger::h_k_sampled(&x, args.k, samples, args.seed)?,
                None => hdx::cheeger::h_k_exhaustive(&x, args.k, hdx::enumeration_budget())?,
            };
            emit(&report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Mixing(args) => {
            let x = load(&args.complex)?;
            let budget = hdx::enumeration_budget();
            let certs = if args.partite {
                let fams = hdx::mixing::exhaustive_partite_families(&x, args.l, budget)?;
                hdx::mixing::verify_mixing_partite(&x, args.l, &fams)?
            } else {
                let fams = match args.trials {
                    Some(t) => hdx::mixing::random_families(&x, args.l, t, args.seed),
                    None => hdx::mixing::exhaustive_families(&x, args.l, budget)?,
                };
                hdx::mixing::verify_mixing_general(&x, args.l, &fams)?
            };
            emit(&certs)?;
            Ok(certs_exit(&certs))
        }
        Command::Overlap(args) => {
            let x = load(&args.complex)?;
            let embedding =
                hdx::io::parse_embedding(std::fs::File::open(&args.embedding)?, x.num_vertices())?;
            let result = match args.grid {
                Some(r) => hdx::overlap::overlap_grid(&x, &embedding, r)?,
                None if x.dim() <= 2 => hdx::overlap::overlap_bruteforce(&x, &embedding)?,
                None => hdx::overlap::overlap_grid(&x, &embedding, 32)?,
            };
            let threshold = match (args.omega, args.c) {
                (Some(omega), Some(c)) => {
                    Some(overlap_threshold_from_measured(&x, omega, c)?)
                }
                (None, None) => None,
                _ => {
                    return Err(HdxError::InvalidParameter(
                        "--omega and --c must be given together".into(),
                    ))
                }
            };
            emit(&serde_json::json!({
                "overlap": result,
                "threshold": threshold,
            }))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Threshold from the measured expansion: partite complexes use the
/// one-sided constants, others the two-sided ones, both at level l = n.
fn overlap_threshold_from_measured(
    x: &WeightedComplex,
    omega: f64,
    c: f64,
) -> Result<serde_json::Value> {
    let n = x.dim();
    let (lam, kap) = hdx::spectra::local_expansion(x)?;
    let (lam, kap) = match (lam, kap) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Ok(serde_json::json!({"applicable": false, "reason": "no measured interval"}))
        }
    };
    if x.partition().is_some() {
        let consts = hdx::mixing::MixingConstants::partite(n, n, lam)?;
        let t = hdx::overlap::partite_overlap_threshold(n, consts.e_l, omega, c);
        Ok(serde_json::json!({"constants": consts, "threshold": t, "partite": true}))
    } else {
        let consts = hdx::mixing::MixingConstants::general(n, n, lam, kap)?;
        let t = hdx::overlap::overlap_threshold(n, consts.a_l, consts.e_l, omega, c);
        Ok(serde_json::json!({"constants": consts, "threshold": t, "partite": false}))
    }
}

/// Parses "0,1;2,3" into a family of disjoint vertex sets.
fn parse_family(spec: &str) -> Result<hdx::SubsetFamily> {
    let mut sets = Vec::new();
    for class in spec.split(';') {
        let mut set = std::collections::BTreeSet::new();
        for tok in class.split(',').filter(|t| !t.trim().is_empty()) {
            let v: usize = tok.trim().parse().map_err(|_| {
                HdxError::Parse(format!("bad vertex id {tok:?} in --family"))
            })?;
            set.insert(v);
        }
        sets.push(set);
    }
    hdx::SubsetFamily::new(sets)
}

fn certs_exit(certs: &[Certificate]) -> ExitCode {
    if certs.iter().all(|c| c.status != CertStatus::Fail) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn missing(flag: &str) -> HdxError {
    HdxError::InvalidParameter(format!("{flag} is required for this generator"))
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
