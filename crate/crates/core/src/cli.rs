//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 I/O, 2 parse, 3 dimension or invalid problem,
//! 4 rank deficiency, 5 invalid spec.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::baseline::direct_pseudo_solve;
use crate::bench::{run_bench_with, BenchSpec, Method, PlantedPolicy};
use crate::error::{Error, Result};
use crate::generator::{generate_with, Family, GeneratorConfig};
use crate::io::{bits_to_csv, matrix_to_csv, read_matrix, read_vector, vector_to_csv};
use crate::linalg::Tolerances;
use crate::oracle::{exhaustive_solve, DEFAULT_MAX_N};
use crate::solver::{dpbb_solve, Problem};
use crate::trace::TraceDocument;

#[derive(Debug, Parser)]
#[command(name = "dpbb", version, about = "Binary solutions of overdetermined linear systems")]
pub struct Cli {
    /// Relative pivot cutoff for full-column-rank checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub rank_threshold: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a test problem and write it as CSV files.
    Generate(GenerateArgs),
    /// Solve A x = b over binary x.
    Solve(SolveArgs),
    /// Compare methods over seeded noisy trials.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// TOML file with generator settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    /// Number of samples (rows).
    #[arg(long)]
    pub m: Option<usize>,
    /// Period T in seconds.
    #[arg(long)]
    pub period: Option<f64>,
    /// Sampling interval dT in seconds.
    #[arg(long)]
    pub sample_step: Option<f64>,
    /// Keep raw sample values instead of scaling columns to unit max-abs.
    #[arg(long)]
    pub no_normalize: bool,
    /// Planted binary solution, e.g. 1,0,1.
    #[arg(long, value_delimiter = ',')]
    pub planted: Option<Vec<u8>>,
    /// Noise fraction in [0, 1].
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Existing directory to write matrix.csv, b.csv, b_noisy.csv, x_planted.csv and spec.json.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    Dpbb,
    Oracle,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub rhs: PathBuf,
    #[arg(long, value_enum, default_value_t = SolveMethod::Dpbb)]
    pub method: SolveMethod,
    /// Include the per-stage trace (dpbb only).
    #[arg(long)]
    pub trace: bool,
    #[arg(long, value_enum, default_value_t = TraceFormat::Json)]
    pub format: TraceFormat,
    /// Largest n the oracle will enumerate.
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    pub max_n: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML file holding a bench spec; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    /// Comma-separated noise fractions.
    #[arg(long, value_delimiter = ',')]
    pub noise: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated subset of dpbb, baseline, oracle.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub methods: Option<Vec<Method>>,
    /// `default`, `random`, or a comma-separated bit vector.
    #[arg(long, value_parser = parse_planted)]
    pub planted: Option<PlantedPolicy>,
    #[arg(long)]
    pub oracle_max_n: Option<usize>,
    /// Output prefix; writes PREFIX.json and PREFIX.csv.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_planted(s: &str) -> std::result::Result<PlantedPolicy, String> {
    match s {
        "default" => Ok(PlantedPolicy::Default),
        "random" => Ok(PlantedPolicy::Random),
        bits => bits
            .split(',')
            .map(|b| match b.trim() {
                "0" => Ok(0),
                "1" => Ok(1),
                other => Err(format!("bad bit {other:?}")),
            })
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map(PlantedPolicy::Fixed),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse {
        source_name: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    toml::from_str(&read_text(path)?).map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))
}

fn require_dir(dir: &Path) -> Result<()> {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("output directory {} does not exist", dir.display()),
        )))
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

pub fn run_generate(args: &GenerateArgs, tol: &Tolerances) -> Result<Vec<PathBuf>> {
    let from_file = match &args.config {
        Some(path) => parse_toml::<GeneratorConfig>(path)?,
        None => GeneratorConfig::default(),
    };
    let from_flags = GeneratorConfig {
        family: args.family,
        m: args.m,
        period: args.period,
        sample_step: args.sample_step,
        normalize: args.no_normalize.then_some(false),
        planted_x: args.planted.clone(),
        noise_fraction: args.noise,
        seed: args.seed,
    };
    let spec = from_file.merge(from_flags).resolve()?;
    let generated = generate_with(&spec, tol)?;

    require_dir(&args.out_dir)?;
    let files = [
        ("matrix.csv", matrix_to_csv(generated.problem.a())),
        ("b.csv", vector_to_csv(generated.problem.b().as_slice())),
        ("b_noisy.csv", vector_to_csv(generated.noisy_b.as_slice())),
        ("x_planted.csv", bits_to_csv(&spec.planted_x)),
        ("spec.json", to_json(&spec)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = args.out_dir.join(name);
        fs::write(&path, contents)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    method: &'static str,
    x: Vec<u8>,
    final_sse: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    real_x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidates_evaluated: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<TraceDocument>,
}

/// Runs `solve` and returns what it prints on standard output.
pub fn run_solve(args: &SolveArgs, tol: &Tolerances) -> Result<String> {
    let a = read_matrix_input(&args.matrix)?;
    let b = read_vector_input(&args.rhs)?;
    let problem = Problem::new(a, b, tol)?;

    let out = match args.method {
        SolveMethod::Dpbb => {
            let r = dpbb_solve(&problem, tol)?;
            let trace = args.trace.then(|| {
                TraceDocument::new(
                    &problem,
                    &r,
                    Some(args.matrix.display().to_string()),
                    Some(args.rhs.display().to_string()),
                )
            });
            if let (Some(t), TraceFormat::Text) = (&trace, args.format) {
                return Ok(t.render_text(4));
            }
            SolveOutput {
                method: "dpbb",
                x: r.x,
                final_sse: r.final_sse,
                real_x: None,
                candidates_evaluated: None,
                trace,
            }
        }
        SolveMethod::Oracle => {
            let r = exhaustive_solve(&problem, args.max_n)?;
            SolveOutput {
                method: "oracle",
                x: r.x,
                final_sse: r.sse,
                real_x: None,
                candidates_evaluated: Some(r.candidates_evaluated),
                trace: None,
            }
        }
        SolveMethod::Baseline => {
            let r = direct_pseudo_solve(&problem, tol)?;
            SolveOutput {
                method: "baseline",
                x: r.rounded_x,
                final_sse: r.sse_of_rounded,
                real_x: Some(r.real_x.into_vec()),
                candidates_evaluated: None,
                trace: None,
            }
        }
    };
    Ok(to_json(&out))
}

fn io_as_parse(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(io) => Error::Parse {
            source_name: path.display().to_string(),
            message: io.to_string(),
        },
        other => other,
    }
}

fn read_matrix_input(path: &Path) -> Result<crate::linalg::Matrix> {
    read_matrix(path).map_err(|e| io_as_parse(path, e))
}

fn read_vector_input(path: &Path) -> Result<crate::linalg::Vector> {
    read_vector(path).map_err(|e| io_as_parse(path, e))
}

/// Runs `bench`, writes both report files and returns the warnings.
pub fn run_bench_cmd(args: &BenchArgs, tol: &Tolerances) -> Result<Vec<String>> {
    let mut spec = match &args.config {
        Some(path) => parse_toml::<BenchSpec>(path)?,
        None => {
            let family = args
                .family
                .ok_or_else(|| Error::InvalidSpec("--family or --config is required".into()))?;
            let noise = args
                .noise
                .clone()
                .ok_or_else(|| Error::InvalidSpec("--noise or --config is required".into()))?;
            BenchSpec::new(family, noise, 100, 0)
        }
    };
    if let Some(f) = args.family {
        spec.family = f;
    }
    if let Some(noise) = &args.noise {
        spec.noise_fractions = noise.clone();
    }
    if let Some(t) = args.trials {
        spec.trials_per_point = t;
    }
    if let Some(s) = args.seed {
        spec.base_seed = s;
    }
    if let Some(m) = &args.methods {
        spec.methods = m.clone();
    }
    if let Some(p) = &args.planted {
        spec.planted = p.clone();
    }
    if let Some(cap) = args.oracle_max_n {
        spec.oracle_max_n = cap;
    }

    let report = run_bench_with(&spec, tol)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        require_dir(dir)?;
    }
    let json_path = args.out.with_extension("json");
    let csv_path = args.out.with_extension("csv");
    fs::write(&json_path, report.to_json())?;
    fs::write(&csv_path, report.to_csv())?;
    Ok(report.warnings)
}

/// Parses `argv`, runs the command, and returns the process exit code.
pub fn main_with_args<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    let result = Tolerances::new(cli.rank_threshold, Tolerances::default().solve_tolerance).and_then(|tol| {
        match &cli.command {
            Command::Generate(args) => run_generate(args, &tol).map(|paths| {
                for p in paths {
                    let _ = writeln!(stderr, "wrote {}", p.display());
                }
            }),
            Command::Solve(args) => run_solve(args, &tol).map(|text| {
                let _ = stdout.write_all(text.as_bytes());
            }),
            Command::Bench(args) => run_bench_cmd(args, &tol).map(|warnings| {
                for w in warnings {
                    let _ = writeln!(stderr, "warning: {w}");
                }
            }),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}
