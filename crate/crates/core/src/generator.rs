//! Test problems built from sampled sinusoid and exponential families.
//!
//! Column `j` of the matrix holds `f_j(k·dT)` for `k = 1..=m`. With
//! normalization on, each column is divided by its largest absolute
//! sample. The right-hand side is `A·x` for a planted binary `x`, and the
//! noisy copy adds `fraction · u_k` with `u_k` uniform on `[0, 1)` drawn from
//! a ChaCha8 stream seeded by `seed_from_u64(seed)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{matvec, Matrix, Tolerances, Vector};
use crate::solver::Problem;

pub const DEFAULT_PERIOD: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Three shifted sinusoids: `sin(ωt)+1`, `cos(ωt)+1`, `cos(2ωt)+1`.
    Paper1,
    /// Eight sinusoids and a rising/decaying exponential pair.
    Paper2,
}

impl Family {
    pub fn n(self) -> usize {
        match self {
            Family::Paper1 => 3,
            Family::Paper2 => 10,
        }
    }

    pub fn default_rows(self) -> usize {
        match self {
            Family::Paper1 => 10,
            Family::Paper2 => 20,
        }
    }

    /// `dT = T / divisor`. The published second example's digits fit 21, not 20.
    pub fn default_step_divisor(self) -> f64 {
        match self {
            Family::Paper1 => 10.0,
            Family::Paper2 => 21.0,
        }
    }

    pub fn default_planted(self) -> Vec<u8> {
        match self {
            Family::Paper1 => vec![1, 0, 1],
            Family::Paper2 => vec![1, 0, 1, 1, 1, 0, 1, 1, 1, 0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Paper1 => "paper1",
            Family::Paper2 => "paper2",
        }
    }

    /// Samples every column function at time `t` for fundamental `f0`.
    fn sample(self, t: f64, f0: f64) -> Vec<f64> {
        let w = 2.0 * PI * f0 * t;
        match self {
            Family::Paper1 => vec![w.sin() + 1.0, w.cos() + 1.0, (2.0 * w).cos() + 1.0],
            Family::Paper2 => {
                let decay = (-3000.0 * t).exp();
                vec![
                    w.sin(),
                    w.cos(),
                    (2.0 * w).cos(),
                    (2.0 * w).sin(),
                    (0.5 * w).sin(),
                    (0.5 * w).cos(),
                    (3.0 * w).cos(),
                    (3.0 * w).sin(),
                    1.0 - decay,
                    decay,
                ]
            }
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper1" => Ok(Family::Paper1),
            "paper2" => Ok(Family::Paper2),
            other => Err(Error::InvalidSpec(format!(
                "unknown family {other:?} (expected paper1 or paper2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    /// Number of samples (rows).
    pub m: usize,
    /// Period `T` in seconds; the fundamental is `1/T`.
    pub period: f64,
    /// Sampling interval `dT` in seconds; the first sample is at `t = dT`.
    pub sample_step: f64,
    pub normalize: bool,
    pub planted_x: Vec<u8>,
    pub noise_fraction: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Defaults that reproduce the published instance of `family`.
    pub fn preset(family: Family) -> Self {
        GeneratorSpec {
            family,
            m: family.default_rows(),
            period: DEFAULT_PERIOD,
            sample_step: DEFAULT_PERIOD / family.default_step_divisor(),
            normalize: true,
            planted_x: family.default_planted(),
            noise_fraction: 0.0,
            seed: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.m <= n {
            return Err(Error::InvalidSpec(format!(
                "{} needs more than {n} rows, got {}",
                self.family.name(),
                self.m
            )));
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::InvalidSpec(format!("period must be positive, got {}", self.period)));
        }
        if !(self.sample_step > 0.0 && self.sample_step.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "sample_step must be positive, got {}",
                self.sample_step
            )));
        }
        validate_planted(&self.planted_x, n)?;
        validate_fraction(self.noise_fraction)
    }
}

/// Partially specified generator settings, as read from a config file or
/// command-line flags. Unset fields take the family defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub family: Option<Family>,
    pub m: Option<usize>,
    pub period: Option<f64>,
    pub sample_step: Option<f64>,
    pub normalize: Option<bool>,
    pub planted_x: Option<Vec<u8>>,
    pub noise_fraction: Option<f64>,
    pub seed: Option<u64>,
}

impl GeneratorConfig {
    /// Fields set in `other` win.
    pub fn merge(self, other: GeneratorConfig) -> GeneratorConfig {
        GeneratorConfig {
            family: other.family.or(self.family),
            m: other.m.or(self.m),
            period: other.period.or(self.period),
            sample_step: other.sample_step.or(self.sample_step),
            normalize: other.normalize.or(self.normalize),
            planted_x: other.planted_x.or(self.planted_x),
            noise_fraction: other.noise_fraction.or(self.noise_fraction),
            seed: other.seed.or(self.seed),
        }
    }

    pub fn resolve(self) -> Result<GeneratorSpec> {
        let family = self
            .family
            .ok_or_else(|| Error::InvalidSpec("family is required".into()))?;
        let base = GeneratorSpec::preset(family);
        let period = self.period.unwrap_or(base.period);
        let spec = GeneratorSpec {
            family,
            m: self.m.unwrap_or(base.m),
            period,
            // default step scales with a user-supplied period
            sample_step: self
                .sample_step
                .unwrap_or(period / family.default_step_divisor()),
            normalize: self.normalize.unwrap_or(base.normalize),
            planted_x: self.planted_x.unwrap_or(base.planted_x),
            noise_fraction: self.noise_fraction.unwrap_or(base.noise_fraction),
            seed: self.seed.unwrap_or(base.seed),
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub(crate) fn validate_planted(x: &[u8], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::InvalidSpec(format!(
            "planted_x must have {n} entries, got {}",
            x.len()
        )));
    }
    if let Some(v) = x.iter().find(|&&v| v > 1) {
        return Err(Error::InvalidSpec(format!("planted_x entries must be 0 or 1, got {v}")));
    }
    Ok(())
}

pub(crate) fn validate_fraction(f: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidSpec(format!("noise fraction must be in [0, 1], got {f}")));
    }
    Ok(())
}

/// Divides each column by its largest absolute entry.
pub fn normalize_columns(columns: &mut [Vec<f64>]) -> Result<()> {
    for (j, col) in columns.iter_mut().enumerate() {
        let scale = col.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return Err(Error::DegenerateColumn { column: j + 1 });
        }
        col.iter_mut().for_each(|v| *v /= scale);
    }
    Ok(())
}

pub fn build_matrix(spec: &GeneratorSpec) -> Result<Matrix> {
    spec.validate()?;
    let f0 = 1.0 / spec.period;
    let samples: Vec<Vec<f64>> = (1..=spec.m)
        .map(|k| spec.family.sample(k as f64 * spec.sample_step, f0))
        .collect();
    let mut columns: Vec<Vec<f64>> = (0..spec.n())
        .map(|j| samples.iter().map(|row| row[j]).collect())
        .collect();
    if let Some(j) = columns.iter().position(|c| c.iter().all(|&v| v == 0.0)) {
        return Err(Error::DegenerateColumn { column: j + 1 });
    }
    if spec.normalize {
        normalize_columns(&mut columns)?;
    }
    let columns = columns
        .into_iter()
        .map(Vector::new)
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_columns(&columns)
}

/// `A · x` for a binary `x`.
pub fn plant_rhs(a: &Matrix, planted_x: &[u8]) -> Result<Vector> {
    validate_planted(planted_x, a.cols())?;
    let x = Vector::new(planted_x.iter().map(|&v| f64::from(v)).collect())?;
    matvec(a, &x)
}

/// Returns `(b + w, w)` with `w_k = fraction · u_k`, `u_k ~ U[0, 1)`.
pub fn add_noise(b: &Vector, noise_fraction: f64, seed: u64) -> Result<(Vector, Vector)> {
    validate_fraction(noise_fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..b.len())
        .map(|_| noise_fraction * rng.random::<f64>())
        .collect();
    let noisy = b.iter().zip(&w).map(|(bi, wi)| bi + wi).collect();
    Ok((Vector::new(noisy)?, Vector::new(w)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratedProblem {
    /// System with the clean right-hand side `A · planted_x`.
    pub problem: Problem,
    pub noisy_b: Vector,
    pub noise: Vector,
    pub spec: GeneratorSpec,
}

impl GeneratedProblem {
    /// The same system with `b + w` on the right.
    pub fn noisy_problem(&self) -> Result<Problem> {
        self.problem.with_rhs(self.noisy_b.clone())
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<GeneratedProblem> {
    generate_with(spec, &Tolerances::default())
}

pub fn generate_with(spec: &GeneratorSpec, tol: &Tolerances) -> Result<GeneratedProblem> {
    let a = build_matrix(spec)?;
    let b = plant_rhs(&a, &spec.planted_x)?;
    let (noisy_b, noise) = add_noise(&b, spec.noise_fraction, spec.seed)?;
    let problem = Problem::new(a, b, tol)?;
    Ok(GeneratedProblem {
        problem,
        noisy_b,
        noise,
        spec: spec.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::check_full_column_rank;
    use crate::solver::dpbb_solve;
    use approx::assert_abs_diff_eq;

    #[test]
    fn paper1_leading_entries() {
        let a = build_matrix(&GeneratorSpec::preset(Family::Paper1)).unwrap();
        assert_eq!((a.rows(), a.cols()), (10, 3));
        assert_abs_diff_eq!(a.get(0, 0), 0.81381, epsilon = 5e-6);
        assert_abs_diff_eq!(a.get(0, 1), 0.90451, epsilon = 5e-6);
        assert_abs_diff_eq!(a.get(0, 2), 0.65451, epsilon = 5e-6);
        assert_eq!(a.get(4, 1), 0.0);
    }

    #[test]
    fn paper2_leading_entries() {
        let a = build_matrix(&GeneratorSpec::preset(Family::Paper2)).unwrap();
        assert_eq!((a.rows(), a.cols()), (20, 10));
        assert_abs_diff_eq!(a.get(0, 0), 0.2955, epsilon = 1e-4);
        assert_eq!(a.get(0, 9), 1.0);
        assert_abs_diff_eq!(a.get(1, 9), 0.8668, epsilon = 1e-4);
        assert_abs_diff_eq!(a.get(19, 8), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn normalized_columns_peak_at_one() {
        for family in [Family::Paper1, Family::Paper2] {
            let a = build_matrix(&GeneratorSpec::preset(family)).unwrap();
            for c in 0..a.cols() {
                assert_eq!(a.column(c).max_abs(), 1.0);
            }
        }
    }

    #[test]
    fn constant_column_normalizes_to_ones() {
        let mut cols = vec![vec![2.5; 4]];
        normalize_columns(&mut cols).unwrap();
        assert_eq!(cols[0], vec![1.0; 4]);
        let mut zero = vec![vec![1.0, 2.0], vec![0.0, 0.0]];
        assert!(matches!(
            normalize_columns(&mut zero),
            Err(Error::DegenerateColumn { column: 2 })
        ));
    }

    #[test]
    fn unnormalized_paper1_keeps_raw_range() {
        let spec = GeneratorSpec {
            normalize: false,
            ..GeneratorSpec::preset(Family::Paper1)
        };
        let a = build_matrix(&spec).unwrap();
        assert_abs_diff_eq!(a.get(0, 0), 1.0 + (0.2 * PI).sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(a.get(9, 2), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn plant_rhs_cases() {
        let a = build_matrix(&GeneratorSpec::preset(Family::Paper1)).unwrap();
        assert_eq!(plant_rhs(&a, &[0, 0, 0]).unwrap(), Vector::zeros(10));
        assert_abs_diff_eq!(plant_rhs(&a, &[1, 0, 1]).unwrap()[0], 1.4683, epsilon = 5e-5);
        assert!(plant_rhs(&a, &[1, 0]).is_err());
        assert!(plant_rhs(&a, &[1, 0, 2]).is_err());

        let a2 = build_matrix(&GeneratorSpec::preset(Family::Paper2)).unwrap();
        let b2 = plant_rhs(&a2, &Family::Paper2.default_planted()).unwrap();
        assert_abs_diff_eq!(b2[0], 3.4122, epsilon = 5e-4);
    }

    #[test]
    fn noise_cases() {
        let b = Vector::new(vec![1.0, -2.0, 3.0, 0.5]).unwrap();
        let (noisy, w) = add_noise(&b, 0.0, 99).unwrap();
        assert_eq!(noisy, b);
        assert!(w.iter().all(|&v| v == 0.0));

        let long = Vector::zeros(500);
        for seed in [0, 1, 7, u64::MAX] {
            let (noisy, w) = add_noise(&long, 0.2, seed).unwrap();
            assert!(w.iter().all(|&v| (0.0..0.2).contains(&v)));
            assert_eq!(noisy, w);
        }
        assert_eq!(add_noise(&b, 0.2, 7).unwrap(), add_noise(&b, 0.2, 7).unwrap());
        assert_ne!(add_noise(&b, 0.2, 7).unwrap().1, add_noise(&b, 0.2, 8).unwrap().1);
        assert!(add_noise(&b, 1.5, 0).is_err());
        assert!(add_noise(&b, -0.1, 0).is_err());
    }

    #[test]
    fn paper1_generate_solves_to_planted() {
        let g = generate(&GeneratorSpec::preset(Family::Paper1)).unwrap();
        assert_eq!(g.noisy_b, *g.problem.b());
        assert_eq!(dpbb_solve(&g.problem, &Tolerances::default()).unwrap().x, vec![1, 0, 1]);
    }

    #[test]
    fn paper2_generate_full_rank_and_deterministic() {
        let g = generate(&GeneratorSpec::preset(Family::Paper2)).unwrap();
        assert!(check_full_column_rank(g.problem.a(), &Tolerances::default()));
        let spec = GeneratorSpec {
            noise_fraction: 0.2,
            seed: 7,
            ..GeneratorSpec::preset(Family::Paper2)
        };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let noisy = generate(&spec).unwrap();
        assert!(noisy.noise.iter().all(|&w| (0.0..0.2).contains(&w)));
    }

    #[test]
    fn twentieth_period_step_also_runs() {
        let spec = GeneratorSpec {
            sample_step: DEFAULT_PERIOD / 20.0,
            ..GeneratorSpec::preset(Family::Paper2)
        };
        let g = generate(&spec).unwrap();
        assert_eq!(g.problem.m(), 20);
    }

    #[test]
    fn spec_validation() {
        let base = GeneratorSpec::preset(Family::Paper1);
        for bad in [
            GeneratorSpec { m: 3, ..base.clone() },
            GeneratorSpec { sample_step: 0.0, ..base.clone() },
            GeneratorSpec { period: -1.0, ..base.clone() },
            GeneratorSpec { planted_x: vec![1, 1], ..base.clone() },
            GeneratorSpec { noise_fraction: 2.0, ..base.clone() },
        ] {
            assert!(matches!(generate(&bad), Err(Error::InvalidSpec(_))), "{bad:?}");
        }
    }

    #[test]
    fn config_resolution() {
        let cfg: GeneratorConfig = toml::from_str("family = \"paper2\"\nnoise_fraction = 0.2\nseed = 5\n").unwrap();
        let spec = cfg.clone().resolve().unwrap();
        assert_eq!(spec.m, 20);
        assert_abs_diff_eq!(spec.sample_step, DEFAULT_PERIOD / 21.0, epsilon = 1e-18);
        assert_eq!(spec.seed, 5);

        let merged = cfg
            .merge(GeneratorConfig {
                seed: Some(9),
                ..Default::default()
            })
            .resolve()
            .unwrap();
        assert_eq!(merged.seed, 9);
        assert_eq!(merged.noise_fraction, 0.2);

        assert!(GeneratorConfig::default().resolve().is_err());
        assert!(toml::from_str::<GeneratorConfig>("family = \"paper3\"").is_err());
        assert!(toml::from_str::<GeneratorConfig>("family = \"paper1\"\nbogus = 1").is_err());
    }
}
