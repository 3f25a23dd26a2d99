//! Run configuration: defaults, TOML file values and command-line flags,
//! resolved in that order of increasing precedence.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use normcell::ensemble::SamplerKind;
use normcell::spectral::DENSE_ORACLE_BOUND;
use normcell::{AssemblyConfig, FrequencyLaw, TauGrid};

use crate::CliError;

pub const WORKERS_ENV: &str = "NORMCELL_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    AcfTime,
    AcfPhase,
    Limit,
    Ensemble,
    NormalCell,
    VarianceScaling,
    OracleCheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::AcfTime => "acf-time",
            Experiment::AcfPhase => "acf-phase",
            Experiment::Limit => "limit",
            Experiment::Ensemble => "ensemble",
            Experiment::NormalCell => "normal-cell",
            Experiment::VarianceScaling => "variance-scaling",
            Experiment::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    Shell,
    Maxwell,
}

impl From<Sampler> for SamplerKind {
    fn from(s: Sampler) -> Self {
        match s {
            Sampler::Shell => SamplerKind::Shell,
            Sampler::Maxwell => SamplerKind::MaxwellBoltzmann,
        }
    }
}

const AFTER_HELP: &str = "\
Defaults: N=100, mass=1, kT=1, tangent frequency law, no cutoff, seed=0,
  format=csv, output to stdout, tau grid [0,5] step 0.1, samples=200,
  sampler=shell, epsilon=0.05, window K=5, mesh width=epsilon/2,
  horizon T=100*tau_max, time step = largest admissible, tau=1,
  half sizes 250,500,1000,2000, workers from NORMCELL_WORKERS or all cores.

CSV columns per experiment (numbers written with 17 significant digits):
  spectrum          k,omega
  acf-time          tau,closed_form,unit,numeric
  acf-phase         tau,raw,unit,limit
  limit             tau,raw,unit
  ensemble          tau,mean,variance,std_error,analytic,z
  normal-cell       tau,target,limit,deviations,limit_deviations
  variance-scaling  half_size,size,variance,scaled_variance
  oracle-check      check,value,threshold,pass
Lines starting with '#' carry the generation time, the resolved config and
any summary report as JSON. JSON output holds the same content.";

#[derive(Debug, Parser)]
#[command(name = "normcell", version, about = "Coupled-oscillator chain laboratory", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mode frequencies of the assembly.
    Spectrum(Flags),
    /// Time autocorrelation of one sampled trajectory, closed form and numeric.
    AcfTime(Flags),
    /// Analytic phase autocorrelation of p0.
    AcfPhase(Flags),
    /// The exponential limit curve.
    Limit(Flags),
    /// Ensemble mean and variance of time autocorrelations with Khintchine z-scores.
    Ensemble(Flags),
    /// Fraction of trajectories outside the epsilon band on [0, K].
    NormalCell(Flags),
    /// Variance of phi(tau) against chain size.
    VarianceScaling(Flags),
    /// Spectral machinery against dense linear algebra.
    OracleCheck(Flags),
}

impl Command {
    pub fn split(self) -> (Experiment, Flags) {
        match self {
            Command::Spectrum(f) => (Experiment::Spectrum, f),
            Command::AcfTime(f) => (Experiment::AcfTime, f),
            Command::AcfPhase(f) => (Experiment::AcfPhase, f),
            Command::Limit(f) => (Experiment::Limit, f),
            Command::Ensemble(f) => (Experiment::Ensemble, f),
            Command::NormalCell(f) => (Experiment::NormalCell, f),
            Command::VarianceScaling(f) => (Experiment::VarianceScaling, f),
            Command::OracleCheck(f) => (Experiment::OracleCheck, f),
        }
    }
}

/// Values that may come from a config file or from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Half size N (the chain has 2N+1 particles).
    #[arg(long = "N")]
    pub half_size: Option<usize>,
    #[arg(long)]
    pub mass: Option<f64>,
    /// Temperature kT.
    #[arg(long = "kT")]
    pub temperature: Option<f64>,
    /// Explicit symmetric frequency list for k=-N..N (replaces the tangent law).
    #[arg(long, value_delimiter = ',')]
    pub frequencies: Option<Vec<f64>>,
    #[arg(long)]
    pub cutoff_cap: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tau_step: Option<f64>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    /// Ensemble size M.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub sampler: Option<Sampler>,
    /// Shell energy (default (2N+1)kT).
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Window K of the normal-cell experiment.
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long)]
    pub mesh_width: Option<f64>,
    /// Horizon T of the numeric time average.
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub time_step: Option<f64>,
    /// Half sizes for variance scaling.
    #[arg(long, value_delimiter = ',')]
    pub half_sizes: Option<Vec<usize>>,
    /// Fixed lag for variance scaling.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// TOML file with any of the settings below (snake_case keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

impl Settings {
    /// Fields set here win over `base`.
    fn over(self, base: Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: self.$f.or(base.$f)),* } };
        }
        pick!(
            half_size, mass, temperature, frequencies, cutoff_cap, seed, tau_step, tau_max, samples, sampler,
            energy, epsilon, window, mesh_width, horizon, time_step, half_sizes, tau, format, out, workers
        )
    }
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub assembly: AssemblyConfig,
    pub tau_step: f64,
    pub tau_max: f64,
    pub samples: usize,
    pub sampler: Sampler,
    pub energy: f64,
    pub epsilon: f64,
    pub window: f64,
    pub mesh_width: f64,
    pub horizon: f64,
    pub time_step: Option<f64>,
    pub half_sizes: Vec<usize>,
    pub tau: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Worker count does not affect results and is left out of the echo.
    #[serde(skip)]
    pub workers: usize,
}

pub fn read_settings(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(one_line(&e.to_string())))
}

fn one_line(message: &str) -> String {
    message.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn resolve(experiment: Experiment, flags: Flags) -> Result<RunConfig, CliError> {
    let file = match &flags.config {
        Some(path) => read_settings(path)?,
        None => Settings::default(),
    };
    let s = flags.settings.over(file);
    let half_size = match (&s.half_size, &s.frequencies) {
        (Some(n), _) => *n,
        (None, Some(list)) => list.len() / 2,
        (None, None) => 100,
    };
    let temperature = s.temperature.unwrap_or(1.0);
    let assembly = AssemblyConfig {
        half_size,
        mass: s.mass.unwrap_or(1.0),
        temperature,
        frequency_law: match s.frequencies {
            Some(list) => FrequencyLaw::Explicit(list),
            None => FrequencyLaw::Tangent,
        },
        cutoff_cap: s.cutoff_cap,
        rng_seed: s.seed.unwrap_or(0),
    };
    let tau_max = s.tau_max.unwrap_or(5.0);
    let epsilon = s.epsilon.unwrap_or(0.05);
    let config = RunConfig {
        experiment,
        tau_step: s.tau_step.unwrap_or(0.1),
        tau_max,
        samples: s.samples.unwrap_or(200),
        sampler: s.sampler.unwrap_or(Sampler::Shell),
        energy: s.energy.unwrap_or((2 * half_size + 1) as f64 * temperature),
        epsilon,
        window: s.window.unwrap_or(5.0),
        mesh_width: s.mesh_width.unwrap_or(epsilon / 2.0),
        horizon: s.horizon.unwrap_or(100.0 * tau_max),
        time_step: s.time_step,
        half_sizes: s.half_sizes.unwrap_or_else(|| vec![250, 500, 1000, 2000]),
        tau: s.tau.unwrap_or(1.0),
        format: s.format.unwrap_or(Format::Csv),
        out: s.out,
        workers: s
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        assembly,
    };
    config.validate()?;
    Ok(config)
}

fn positive(name: &str, value: f64) -> Result<(), CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {value}")))
    }
}

impl RunConfig {
    pub fn grid(&self) -> Result<TauGrid, CliError> {
        TauGrid::covering(self.tau_max, self.tau_step).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Checks every parameter the chosen experiment uses against the
    /// library's preconditions.
    pub fn validate(&self) -> Result<(), CliError> {
        self.assembly.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        positive("tau_step", self.tau_step)?;
        if !(self.tau_max >= 0.0 && self.tau_max.is_finite()) {
            return Err(CliError::Config(format!("tau_max must be nonnegative, got {}", self.tau_max)));
        }
        let grid = self.grid()?;
        match self.experiment {
            Experiment::Spectrum | Experiment::AcfPhase | Experiment::Limit => {}
            Experiment::AcfTime => {
                positive("energy", self.energy)?;
                positive("horizon", self.horizon)?;
                if self.horizon < 100.0 * grid.max() {
                    return Err(CliError::Config(format!(
                        "horizon {} must be at least 100 x tau_max = {}",
                        self.horizon,
                        100.0 * grid.max()
                    )));
                }
                if let Some(dt) = self.time_step {
                    positive("time_step", dt)?;
                }
            }
            Experiment::Ensemble => {
                positive("energy", self.energy)?;
                if self.samples < 2 {
                    return Err(CliError::Config(format!("samples must be at least 2, got {}", self.samples)));
                }
            }
            Experiment::NormalCell => {
                positive("energy", self.energy)?;
                positive("epsilon", self.epsilon)?;
                positive("window", self.window)?;
                positive("mesh_width", self.mesh_width)?;
                if self.mesh_width > self.epsilon / 2.0 {
                    return Err(CliError::Config(format!(
                        "mesh_width {} must be at most epsilon/2 = {}",
                        self.mesh_width,
                        self.epsilon / 2.0
                    )));
                }
                if self.samples == 0 {
                    return Err(CliError::Config("samples must be at least 1".into()));
                }
            }
            Experiment::VarianceScaling => {
                positive("tau", self.tau)?;
                if self.half_sizes.len() < 3 || self.half_sizes.iter().any(|&n| n < 100) {
                    return Err(CliError::Config("half_sizes needs at least 3 values, each >= 100".into()));
                }
                if self.samples < 2 {
                    return Err(CliError::Config(format!("samples must be at least 2, got {}", self.samples)));
                }
                if matches!(self.assembly.frequency_law, FrequencyLaw::Explicit(_)) {
                    return Err(CliError::Config("variance scaling needs the tangent law".into()));
                }
            }
            Experiment::OracleCheck => {
                if self.assembly.half_size > DENSE_ORACLE_BOUND {
                    return Err(CliError::Config(format!(
                        "oracle-check needs N <= {DENSE_ORACLE_BOUND}, got {}",
                        self.assembly.half_size
                    )));
                }
            }
        }
        Ok(())
    }
}
