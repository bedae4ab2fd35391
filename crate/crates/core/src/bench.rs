//! Seeded Monte Carlo comparison of the solvers on generated problems.
//!
//! Every (noise level, trial) pair gets its own seed,
//! `mix(mix(mix(base_seed) ^ level_index) ^ trial)` with `mix` the
//! SplitMix64 finalizer, so levels and trials never share a random stream.
//! All methods at one (level, trial) see the same generated problem.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::direct_pseudo_solve;
use crate::error::{Error, Result};
use crate::generator::{generate_with, validate_fraction, validate_planted, Family, GeneratorSpec};
use crate::linalg::Tolerances;
use crate::oracle::{exhaustive_solve, DEFAULT_MAX_N};
use crate::solver::{dpbb_solve, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dpbb,
    Baseline,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Dpbb, Method::Baseline, Method::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dpbb => "dpbb",
            Method::Baseline => "baseline",
            Method::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dpbb" => Ok(Method::Dpbb),
            "baseline" => Ok(Method::Baseline),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::InvalidSpec(format!("unknown method {other:?}"))),
        }
    }
}

/// Which binary vector is planted in each trial.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlantedPolicy {
    /// The family's published solution.
    #[default]
    Default,
    /// Fresh uniform bits per trial, derived from the trial seed.
    Random,
    Fixed(Vec<u8>),
}

fn default_trials() -> usize {
    100
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_max_n() -> usize {
    DEFAULT_MAX_N
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub family: Family,
    pub noise_fractions: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials_per_point: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub planted: PlantedPolicy,
    #[serde(default = "default_max_n")]
    pub oracle_max_n: usize,
    /// Row count override; family default when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Sampling interval override; family default when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_step: Option<f64>,
}

impl BenchSpec {
    pub fn new(family: Family, noise_fractions: Vec<f64>, trials_per_point: usize, base_seed: u64) -> Self {
        BenchSpec {
            family,
            noise_fractions,
            trials_per_point,
            base_seed,
            methods: default_methods(),
            planted: PlantedPolicy::Default,
            oracle_max_n: DEFAULT_MAX_N,
            m: None,
            sample_step: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials_per_point == 0 {
            return Err(Error::InvalidSpec("trials_per_point must be at least 1".into()));
        }
        if self.noise_fractions.is_empty() {
            return Err(Error::InvalidSpec("noise_fractions is empty".into()));
        }
        for &f in &self.noise_fractions {
            validate_fraction(f)?;
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidSpec("no methods selected".into()));
        }
        if let PlantedPolicy::Fixed(x) = &self.planted {
            validate_planted(x, self.family.n())?;
        }
        self.generator_spec(0.0, 0, self.family.default_planted()).validate()
    }

    fn generator_spec(&self, noise_fraction: f64, seed: u64, planted_x: Vec<u8>) -> GeneratorSpec {
        let base = GeneratorSpec::preset(self.family);
        GeneratorSpec {
            m: self.m.unwrap_or(base.m),
            sample_step: self.sample_step.unwrap_or(base.sample_step),
            planted_x,
            noise_fraction,
            seed,
            ..base
        }
    }

    fn unique_methods(&self) -> Vec<Method> {
        let mut methods = self.methods.clone();
        methods.sort();
        methods.dedup();
        methods
    }
}

/// SplitMix64 output function.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_seed(base_seed: u64, level_index: usize, trial: usize) -> u64 {
    mix(mix(mix(base_seed) ^ level_index as u64) ^ trial as u64)
}

const PLANT_SALT: u64 = 0x706c_616e_7465_6421;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum MethodOutcome {
    Solved { x: Vec<u8>, sse: f64 },
    Failed { error: String },
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub level_index: usize,
    pub noise_fraction: f64,
    pub trial: usize,
    pub seed: u64,
    pub planted_x: Vec<u8>,
    pub outcomes: BTreeMap<Method, MethodOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: Method,
    pub noise_fraction: f64,
    pub trials: usize,
    pub completed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub exact_matches: usize,
    /// `exact_matches / trials`; `None` when the method was skipped entirely.
    pub recovery_rate: Option<f64>,
    pub mean_final_sse: Option<f64>,
    pub bit_error_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub spec: BenchSpec,
    pub rows: Vec<SummaryRow>,
    pub trials: Vec<TrialRecord>,
    pub warnings: Vec<String>,
}

impl BenchReport {
    pub fn row(&self, method: Method, level_index: usize) -> Option<&SummaryRow> {
        let f = *self.spec.noise_fractions.get(level_index)?;
        self.rows
            .iter()
            .find(|r| r.method == method && r.noise_fraction == f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One line per (method, noise level); empty cells for undefined values.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from(
            "method,noise_fraction,trials,completed,failed,skipped,exact_matches,recovery_rate,mean_final_sse,bit_error_rate\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.method.name(),
                r.noise_fraction,
                r.trials,
                r.completed,
                r.failed,
                r.skipped,
                r.exact_matches,
                opt(r.recovery_rate),
                opt(r.mean_final_sse),
                opt(r.bit_error_rate),
            );
        }
        out
    }
}

fn planted_for(spec: &BenchSpec, seed: u64) -> Vec<u8> {
    match &spec.planted {
        PlantedPolicy::Default => spec.family.default_planted(),
        PlantedPolicy::Fixed(x) => x.clone(),
        PlantedPolicy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ PLANT_SALT));
            (0..spec.family.n()).map(|_| u8::from(rng.random::<bool>())).collect()
        }
    }
}

fn run_method(method: Method, p: &Problem, spec: &BenchSpec, tol: &Tolerances) -> MethodOutcome {
    let solved = match method {
        Method::Dpbb => dpbb_solve(p, tol).map(|r| (r.x, r.final_sse)),
        Method::Baseline => direct_pseudo_solve(p, tol).map(|r| (r.rounded_x, r.sse_of_rounded)),
        Method::Oracle => {
            if p.n() > spec.oracle_max_n {
                return MethodOutcome::Skipped {
                    reason: Error::TooLarge {
                        n: p.n(),
                        cap: spec.oracle_max_n,
                    }
                    .to_string(),
                };
            }
            exhaustive_solve(p, spec.oracle_max_n).map(|r| (r.x, r.sse))
        }
    };
    match solved {
        Ok((x, sse)) => MethodOutcome::Solved { x, sse },
        Err(e) => MethodOutcome::Failed { error: e.to_string() },
    }
}

fn run_trial(spec: &BenchSpec, methods: &[Method], level_index: usize, trial: usize, tol: &Tolerances) -> TrialRecord {
    let noise_fraction = spec.noise_fractions[level_index];
    let seed = trial_seed(spec.base_seed, level_index, trial);
    let planted_x = planted_for(spec, seed);
    let problem = generate_with(&spec.generator_spec(noise_fraction, seed, planted_x.clone()), tol)
        .and_then(|g| g.noisy_problem());
    let outcomes = methods
        .iter()
        .map(|&m| {
            let outcome = match &problem {
                Ok(p) => run_method(m, p, spec, tol),
                Err(e) => MethodOutcome::Failed { error: e.to_string() },
            };
            (m, outcome)
        })
        .collect();
    TrialRecord {
        level_index,
        noise_fraction,
        trial,
        seed,
        planted_x,
        outcomes,
    }
}

fn summarize(method: Method, noise_fraction: f64, records: &[TrialRecord]) -> SummaryRow {
    let mut row = SummaryRow {
        method,
        noise_fraction,
        trials: records.len(),
        completed: 0,
        failed: 0,
        skipped: 0,
        exact_matches: 0,
        recovery_rate: None,
        mean_final_sse: None,
        bit_error_rate: None,
    };
    let mut sse_sum = 0.0;
    let mut bit_errors = 0usize;
    let mut bits = 0usize;
    for rec in records {
        match &rec.outcomes[&method] {
            MethodOutcome::Solved { x, sse } => {
                row.completed += 1;
                sse_sum += sse;
                let wrong = x.iter().zip(&rec.planted_x).filter(|(a, b)| a != b).count();
                bit_errors += wrong;
                bits += x.len();
                if wrong == 0 {
                    row.exact_matches += 1;
                }
            }
            MethodOutcome::Failed { .. } => row.failed += 1,
            MethodOutcome::Skipped { .. } => row.skipped += 1,
        }
    }
    if row.skipped < row.trials {
        row.recovery_rate = Some(row.exact_matches as f64 / row.trials as f64);
    }
    if row.completed > 0 {
        row.mean_final_sse = Some(sse_sum / row.completed as f64);
        row.bit_error_rate = Some(bit_errors as f64 / bits as f64);
    }
    row
}

pub fn run_bench(spec: &BenchSpec) -> Result<BenchReport> {
    run_bench_with(spec, &Tolerances::default())
}

pub fn run_bench_with(spec: &BenchSpec, tol: &Tolerances) -> Result<BenchReport> {
    spec.validate()?;
    let methods = spec.unique_methods();
    let levels = spec.noise_fractions.len();
    let per = spec.trials_per_point;

    let trials: Vec<TrialRecord> = (0..levels * per)
        .into_par_iter()
        .map(|k| run_trial(spec, &methods, k / per, k % per, tol))
        .collect();

    let mut warnings = Vec::new();
    if methods.contains(&Method::Oracle) && spec.family.n() > spec.oracle_max_n {
        warnings.push(format!(
            "oracle skipped: {} has {} unknowns, cap is {}",
            spec.family.name(),
            spec.family.n(),
            spec.oracle_max_n
        ));
    }

    let mut rows = Vec::with_capacity(levels * methods.len());
    for (level, chunk) in trials.chunks(per).enumerate() {
        for &m in &methods {
            rows.push(summarize(m, spec.noise_fractions[level], chunk));
        }
    }

    Ok(BenchReport {
        spec: spec.clone(),
        rows,
        trials,
        warnings,
    })
}
