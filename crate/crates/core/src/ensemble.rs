//! Monte Carlo drivers: spread of the time autocorrelation across an
//! energy shell, the Khintchine expectation identity, variance decay with
//! chain size, and normal-cell fractions.
//!
//! Members are drawn from independent per-index generator streams and
//! collected in index order before any reduction, so every result is
//! independent of the worker count and schedule.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acf::{phase_acf_analytic, time_acf_closed_form, ou_limit_curve, AcfCurve, Normalization, TauGrid};
use crate::dynamics::{momentum_trajectory_coefficients, ModeAmplitudes};
use crate::error::{Error, Result};
use crate::sampling::{energy_shell_modes, maxwell_boltzmann_modes, member_rng, ShellSpec};
use crate::spectral::{build_spectrum, AssemblyConfig, FrequencyLaw, Spectrum};
use crate::stats::{least_squares, mean, variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Shell,
    MaxwellBoltzmann,
}

/// A validated configuration with its spectrum and energy level.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub config: AssemblyConfig,
    pub spectrum: Spectrum,
    pub shell: ShellSpec,
}

impl Assembly {
    /// Shell at the most probable energy `(2N+1)·kT`.
    pub fn new(config: AssemblyConfig) -> Result<Self> {
        let shell = ShellSpec::most_probable(config.half_size, config.temperature)?;
        Self::with_shell(config, shell)
    }

    pub fn with_shell(config: AssemblyConfig, shell: ShellSpec) -> Result<Self> {
        let spectrum = build_spectrum(&config)?;
        Ok(Assembly { config, spectrum, shell })
    }

    pub fn descriptor(&self, sampler: SamplerKind) -> AssemblyDescriptor {
        AssemblyDescriptor {
            half_size: self.config.half_size,
            law: match self.config.frequency_law {
                FrequencyLaw::Tangent => "tangent".into(),
                FrequencyLaw::Explicit(_) => "explicit".into(),
            },
            temperature: self.config.temperature,
            energy: self.shell.energy(),
            sampler,
        }
    }

    fn sample_modes(&self, sampler: SamplerKind, seed: u64, index: u64) -> Result<ModeAmplitudes> {
        let mut rng = member_rng(seed, index);
        match sampler {
            SamplerKind::Shell => energy_shell_modes(&self.spectrum, &self.shell, &mut rng),
            SamplerKind::MaxwellBoltzmann => maxwell_boltzmann_modes(&self.spectrum, self.config.temperature, &mut rng),
        }
    }

    /// Raw closed-form time autocorrelation of ensemble member `index`.
    pub fn member_acf(&self, sampler: SamplerKind, seed: u64, index: u64, grid: TauGrid) -> Result<AcfCurve> {
        let state = self.sample_modes(sampler, seed, index)?.to_state()?;
        let series = momentum_trajectory_coefficients(&state, &self.spectrum)?;
        Ok(time_acf_closed_form(&series, grid))
    }

    fn member_curves(&self, sampler: SamplerKind, count: usize, grid: TauGrid, seed: u64) -> Result<Vec<AcfCurve>> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.member_acf(sampler, seed, i, grid))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyDescriptor {
    pub half_size: usize,
    pub law: String,
    pub temperature: f64,
    pub energy: f64,
    pub sampler: SamplerKind,
}

/// Per-lag mean and unbiased variance of member autocorrelations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub grid: TauGrid,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub sample_count: usize,
    pub seed: u64,
    pub assembly: AssemblyDescriptor,
}

impl EnsembleStats {
    pub fn from_curves(curves: &[AcfCurve], seed: u64, assembly: AssemblyDescriptor) -> Result<Self> {
        if curves.len() < 2 {
            return Err(Error::parameter(format!(
                "ensemble needs at least 2 members, got {}",
                curves.len()
            )));
        }
        let grid = curves[0].grid;
        for c in curves {
            Error::check_len(grid.count(), c.values.len())?;
        }
        let mut column = vec![0.0; curves.len()];
        let mut means = Vec::with_capacity(grid.count());
        let mut variances = Vec::with_capacity(grid.count());
        for i in 0..grid.count() {
            for (slot, c) in column.iter_mut().zip(curves) {
                *slot = c.values[i];
            }
            means.push(mean(&column));
            variances.push(variance(&column));
        }
        Ok(EnsembleStats {
            grid,
            mean: means,
            variance: variances,
            sample_count: curves.len(),
            seed,
            assembly,
        })
    }

    pub fn std_error(&self, i: usize) -> f64 {
        (self.variance[i] / self.sample_count as f64).sqrt()
    }
}

pub fn ensemble_acf(
    assembly: &Assembly,
    sampler: SamplerKind,
    sample_count: usize,
    grid: TauGrid,
    seed: u64,
) -> Result<EnsembleStats> {
    if sample_count < 2 {
        return Err(Error::parameter(format!(
            "ensemble needs at least 2 members, got {sample_count}"
        )));
    }
    let curves = assembly.member_curves(sampler, sample_count, grid, seed)?;
    EnsembleStats::from_curves(&curves, seed, assembly.descriptor(sampler))
}

/// `(mean(τ) − R(τ)) / (sd(τ)/√M)` per lag.
pub fn khintchine_identity_check(stats: &EnsembleStats, analytic: &AcfCurve) -> Result<Vec<f64>> {
    if stats.grid != analytic.grid {
        return Err(Error::Dimension {
            expected: stats.grid.count(),
            actual: analytic.grid.count(),
        });
    }
    Ok((0..stats.grid.count())
        .map(|i| {
            let diff = stats.mean[i] - analytic.values[i];
            let se = stats.std_error(i);
            if se > 0.0 {
                diff / se
            } else if diff == 0.0 {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            }
        })
        .collect())
}

/// Variance of `φ_N(τ)` against `2N+1`, with the log–log least-squares fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceScaling {
    pub tau: f64,
    pub half_sizes: Vec<usize>,
    pub variances: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub sample_count: usize,
    pub seed: u64,
}

impl VarianceScaling {
    /// Fits `log Var = slope·log(2N+1) + intercept`.
    pub fn fit(tau: f64, half_sizes: Vec<usize>, variances: Vec<f64>, sample_count: usize, seed: u64) -> Result<Self> {
        Error::check_len(half_sizes.len(), variances.len())?;
        if half_sizes.len() < 2 || variances.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::parameter("fit needs at least two positive variances"));
        }
        let x: Vec<f64> = half_sizes.iter().map(|&n| ((2 * n + 1) as f64).ln()).collect();
        let y: Vec<f64> = variances.iter().map(|v| v.ln()).collect();
        let (slope, intercept) = least_squares(&x, &y);
        Ok(VarianceScaling {
            tau,
            half_sizes,
            variances,
            slope,
            intercept,
            sample_count,
            seed,
        })
    }

    /// `C = Var·(2N+1)` at the smallest size.
    pub fn reference_constant(&self) -> f64 {
        self.variances[0] * (2 * self.half_sizes[0] + 1) as f64
    }
}

/// Raw `φ_N(τ)` variance over `sample_count` shell samples for each size in
/// `half_sizes`; every other field of `base` is shared.
pub fn variance_scaling(
    base: &AssemblyConfig,
    half_sizes: &[usize],
    tau: f64,
    sample_count: usize,
    seed: u64,
) -> Result<VarianceScaling> {
    if half_sizes.len() < 3 || half_sizes.iter().any(|&n| n < 100) {
        return Err(Error::parameter("variance scaling needs at least 3 sizes, each N >= 100"));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::parameter(format!("tau must be positive, got {tau}")));
    }
    let grid = TauGrid::new(tau, 2)?;
    let mut sizes: Vec<usize> = half_sizes.to_vec();
    sizes.sort_unstable();
    let mut variances = Vec::with_capacity(sizes.len());
    for &n in &sizes {
        let assembly = Assembly::new(AssemblyConfig {
            half_size: n,
            ..base.clone()
        })?;
        let stats = ensemble_acf(&assembly, SamplerKind::Shell, sample_count, grid, seed)?;
        variances.push(stats.variance[1]);
    }
    VarianceScaling::fit(tau, sizes, variances, sample_count, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalCellReport {
    pub half_size: usize,
    pub epsilon: f64,
    pub window: f64,
    pub mesh_width: f64,
    pub mesh_points: usize,
    pub sample_count: usize,
    pub seed: u64,
    /// Fraction of members whose unit-normalized φ leaves the ε-band around
    /// the finite-N phase autocorrelation somewhere on the mesh.
    pub deviating_fraction: f64,
    /// Same, against the limit `e^{-τ}`.
    pub limit_deviating_fraction: f64,
    /// Union bound `K/(n·ε·Δx)` with `n = 2N`. Reference only: it treats
    /// the per-lag events as independent.
    pub chebyshev_bound: f64,
    pub per_tau_deviations: Vec<usize>,
    pub per_tau_limit_deviations: Vec<usize>,
    /// `sup_τ |R_N(τ)/R_N(0) − e^{-τ}|` on the mesh.
    pub target_limit_gap: f64,
}

fn sup_deviation(values: &[f64], target: &[f64]) -> f64 {
    values
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

pub fn normal_cell_fraction(
    assembly: &Assembly,
    epsilon: f64,
    window: f64,
    mesh_width: f64,
    sample_count: usize,
    seed: u64,
) -> Result<NormalCellReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::parameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::parameter(format!("window must be positive, got {window}")));
    }
    if !(mesh_width > 0.0) || mesh_width > epsilon / 2.0 {
        return Err(Error::parameter(format!(
            "mesh width {mesh_width} must be positive and at most epsilon/2 = {}",
            epsilon / 2.0
        )));
    }
    if sample_count == 0 {
        return Err(Error::parameter("normal-cell experiment needs at least one sample"));
    }
    let mesh = TauGrid::covering(window, mesh_width)?;
    let target = phase_acf_analytic(&assembly.spectrum, assembly.config.temperature, mesh)?.unit_at_zero();
    let limit = ou_limit_curve(mesh, Normalization::UnitAtZero);

    let flags: Vec<(Vec<bool>, Vec<bool>)> = (0..sample_count as u64)
        .into_par_iter()
        .map(|i| {
            let phi = assembly.member_acf(SamplerKind::Shell, seed, i, mesh)?.unit_at_zero();
            let near = |t: &[f64]| phi.values.iter().zip(t).map(|(a, b)| (a - b).abs() > epsilon).collect();
            Ok((near(&target.values), near(&limit.values)))
        })
        .collect::<Result<_>>()?;

    let mut per_tau = vec![0usize; mesh.count()];
    let mut per_tau_limit = vec![0usize; mesh.count()];
    let (mut deviating, mut limit_deviating) = (0usize, 0usize);
    for (finite, lim) in &flags {
        for (count, &f) in per_tau.iter_mut().zip(finite) {
            *count += f as usize;
        }
        for (count, &f) in per_tau_limit.iter_mut().zip(lim) {
            *count += f as usize;
        }
        deviating += finite.iter().any(|&f| f) as usize;
        limit_deviating += lim.iter().any(|&f| f) as usize;
    }
    let n = (2 * assembly.config.half_size) as f64;
    Ok(NormalCellReport {
        half_size: assembly.config.half_size,
        epsilon,
        window,
        mesh_width,
        mesh_points: mesh.count(),
        sample_count,
        seed,
        deviating_fraction: deviating as f64 / sample_count as f64,
        limit_deviating_fraction: limit_deviating as f64 / sample_count as f64,
        chebyshev_bound: window / (n * epsilon * mesh_width),
        per_tau_deviations: per_tau,
        per_tau_limit_deviations: per_tau_limit,
        target_limit_gap: sup_deviation(&target.values, &limit.values),
    })
}
