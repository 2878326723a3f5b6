//! Run configuration: defaults mirroring the running example
//! (alpha = 1/sqrt(10), beta = 3/sqrt(10), kappa = 1), overridden first
//! by an optional flat key=value file and then by command-line flags.

use std::path::{Path, PathBuf};

use cavres::reservoir::ReservoirSpec;
use cavres::states::EffectiveParams;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// Unresolved option set: every field optional so that defaults, file
/// values and flags can be layered.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub kappa: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_steps: Option<usize>,
    pub gamma_min: Option<f64>,
    pub gamma_max: Option<f64>,
    pub gamma_steps: Option<usize>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub n_modes: Option<usize>,
    pub bandwidth_over_kappa: Option<f64>,
}

impl Overrides {
    /// Fill unset fields from `other` (lower precedence).
    fn or(self, other: Overrides) -> Overrides {
        Overrides {
            alpha: self.alpha.or(other.alpha),
            beta: self.beta.or(other.beta),
            gamma: self.gamma.or(other.gamma),
            kappa: self.kappa.or(other.kappa),
            t_min: self.t_min.or(other.t_min),
            t_max: self.t_max.or(other.t_max),
            t_steps: self.t_steps.or(other.t_steps),
            gamma_min: self.gamma_min.or(other.gamma_min),
            gamma_max: self.gamma_max.or(other.gamma_max),
            gamma_steps: self.gamma_steps.or(other.gamma_steps),
            format: self.format.or(other.format),
            out: self.out.or(other.out),
            seed: self.seed.or(other.seed),
            samples: self.samples.or(other.samples),
            n_modes: self.n_modes.or(other.n_modes),
            bandwidth_over_kappa: self.bandwidth_over_kappa.or(other.bandwidth_over_kappa),
        }
    }

    /// Parse a flat `key = value` file; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Overrides, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| {
                CliError::usage(format!("config line {}: {key}: {e}", lineno + 1))
            };
            match key {
                "alpha" => o.alpha = Some(value.parse().map_err(|e| bad(&e))?),
                "beta" => o.beta = Some(value.parse().map_err(|e| bad(&e))?),
                "gamma" => o.gamma = Some(value.parse().map_err(|e| bad(&e))?),
                "kappa" => o.kappa = Some(value.parse().map_err(|e| bad(&e))?),
                "t_min" => o.t_min = Some(value.parse().map_err(|e| bad(&e))?),
                "t_max" => o.t_max = Some(value.parse().map_err(|e| bad(&e))?),
                "t_steps" => o.t_steps = Some(value.parse().map_err(|e| bad(&e))?),
                "gamma_min" => o.gamma_min = Some(value.parse().map_err(|e| bad(&e))?),
                "gamma_max" => o.gamma_max = Some(value.parse().map_err(|e| bad(&e))?),
                "gamma_steps" => o.gamma_steps = Some(value.parse().map_err(|e| bad(&e))?),
                "format" => o.format = Some(value.parse().map_err(|e: String| bad(&e))?),
                "out" => o.out = Some(PathBuf::from(value)),
                "seed" => o.seed = Some(value.parse().map_err(|e| bad(&e))?),
                "samples" => o.samples = Some(value.parse().map_err(|e| bad(&e))?),
                "n_modes" => o.n_modes = Some(value.parse().map_err(|e| bad(&e))?),
                "bandwidth_over_kappa" => {
                    o.bandwidth_over_kappa = Some(value.parse().map_err(|e| bad(&e))?)
                }
                other => {
                    return Err(CliError::usage(format!(
                        "config line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(o)
    }
}

/// Fully resolved, validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: EffectiveParams,
    pub t_min: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_steps: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub samples: usize,
    pub n_modes: usize,
    pub bandwidth_over_kappa: f64,
}

impl RunConfig {
    /// Resolve flags over an optional config file over defaults.
    pub fn resolve(flags: Overrides, config_file: Option<&Path>) -> Result<RunConfig, CliError> {
        let merged = match config_file {
            Some(path) => flags.or(Overrides::from_file(path)?),
            None => flags,
        };

        // When only one amplitude is given the other follows from
        // normalization.
        let (alpha, beta) = match (merged.alpha, merged.beta) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => {
                if !(0.0..=1.0).contains(&a) {
                    return Err(CliError::usage(format!("alpha = {a} outside [0, 1]")));
                }
                (a, (1.0 - a * a).sqrt())
            }
            (None, Some(b)) => {
                if !(0.0..=1.0).contains(&b) {
                    return Err(CliError::usage(format!("beta = {b} outside [0, 1]")));
                }
                ((1.0 - b * b).sqrt(), b)
            }
            (None, None) => (1.0 / 10f64.sqrt(), 3.0 / 10f64.sqrt()),
        };
        let gamma = merged.gamma.unwrap_or(0.0);
        let kappa = merged.kappa.unwrap_or(1.0);
        let params =
            EffectiveParams::new(alpha, beta, gamma, kappa).map_err(CliError::usage_from)?;

        let n_modes = merged.n_modes.unwrap_or(ReservoirSpec::DEFAULT_N_MODES);
        let config = RunConfig {
            params,
            t_min: merged.t_min.unwrap_or(0.0),
            t_max: merged.t_max.unwrap_or(6.0),
            t_steps: merged.t_steps.unwrap_or(601),
            gamma_min: merged.gamma_min.unwrap_or(gamma),
            gamma_max: merged
                .gamma_max
                .unwrap_or(merged.gamma_min.unwrap_or(gamma)),
            gamma_steps: merged.gamma_steps.unwrap_or(1),
            format: merged.format.unwrap_or(OutputFormat::Csv),
            out: merged.out,
            seed: merged.seed.unwrap_or(42),
            samples: merged.samples.unwrap_or(1000),
            n_modes,
            // Bandwidth follows the default mode spacing unless pinned.
            bandwidth_over_kappa: merged
                .bandwidth_over_kappa
                .unwrap_or(ReservoirSpec::DEFAULT_SPACING * n_modes as f64),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.t_steps == 0 || self.gamma_steps == 0 {
            return Err(CliError::usage("grids must have at least one step"));
        }
        if self.t_min < 0.0 || !self.t_min.is_finite() || !self.t_max.is_finite() {
            return Err(CliError::usage(format!(
                "time grid [{}, {}] invalid: times must be finite and nonnegative",
                self.t_min, self.t_max
            )));
        }
        if self.t_max < self.t_min {
            return Err(CliError::usage(format!(
                "t_max = {} below t_min = {}",
                self.t_max, self.t_min
            )));
        }
        if self.t_steps == 1 && self.t_max != self.t_min {
            return Err(CliError::usage("t_steps = 1 requires t_min = t_max"));
        }
        let pi = std::f64::consts::PI;
        if !(0.0..=pi).contains(&self.gamma_min) || !(0.0..=pi).contains(&self.gamma_max) {
            return Err(CliError::usage(format!(
                "gamma grid [{}, {}] outside [0, pi]",
                self.gamma_min, self.gamma_max
            )));
        }
        if self.gamma_max < self.gamma_min {
            return Err(CliError::usage(format!(
                "gamma_max = {} below gamma_min = {}",
                self.gamma_max, self.gamma_min
            )));
        }
        if self.gamma_steps == 1 && self.gamma_max != self.gamma_min {
            return Err(CliError::usage(
                "gamma_steps = 1 requires gamma_min = gamma_max",
            ));
        }
        if self.samples == 0 {
            return Err(CliError::usage("samples must be at least 1"));
        }
        if self.n_modes < 2 {
            return Err(CliError::usage("n_modes must be at least 2"));
        }
        if self.bandwidth_over_kappa <= 0.0 || self.bandwidth_over_kappa.is_nan() {
            return Err(CliError::usage("bandwidth_over_kappa must be positive"));
        }
        Ok(())
    }

    /// Inclusive linspace over the time grid.
    pub fn t_grid(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.t_steps)
    }

    /// Inclusive linspace over the gamma grid.
    pub fn gamma_grid(&self) -> Vec<f64> {
        linspace(self.gamma_min, self.gamma_max, self.gamma_steps)
    }
}

/// `steps` evenly spaced points from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![min];
    }
    (0..steps)
        .map(|k| min + (max - min) * k as f64 / (steps - 1) as f64)
        .collect()
}
