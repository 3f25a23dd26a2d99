//! Autocorrelation curves: time averages along one trajectory, the
//! ensemble (phase) autocorrelation, and the exponential limit.

use serde::{Deserialize, Serialize};

use crate::dynamics::TrigSeries;
use crate::error::{Error, Result};
use crate::spectral::Spectrum;

/// Uniform lag grid `τ_i = i·step`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    step: f64,
    count: usize,
}

impl TauGrid {
    pub fn new(step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::parameter(format!("tau step must be positive, got {step}")));
        }
        if count == 0 {
            return Err(Error::parameter("tau grid needs at least one point"));
        }
        Ok(TauGrid { step, count })
    }

    /// Smallest grid of the given step whose last point reaches `end`.
    pub fn covering(end: f64, step: f64) -> Result<Self> {
        if !(end >= 0.0 && end.is_finite()) {
            return Err(Error::parameter(format!("grid end must be nonnegative, got {end}")));
        }
        let intervals = (end / step - 1e-9).ceil().max(0.0) as usize;
        Self::new(step, intervals + 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.point(i))
    }

    pub fn max(&self) -> f64 {
        self.point(self.count - 1)
    }
}

impl Default for TauGrid {
    /// `[0, 5]` in steps of `0.1`.
    fn default() -> Self {
        TauGrid { step: 0.1, count: 51 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AcfKind {
    TimeClosedForm,
    TimeNumeric,
    PhaseAnalytic,
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Raw,
    UnitAtZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfCurve {
    pub grid: TauGrid,
    pub values: Vec<f64>,
    pub kind: AcfKind,
    pub normalization: Normalization,
}

impl AcfCurve {
    fn raw(grid: TauGrid, values: Vec<f64>, kind: AcfKind) -> Self {
        AcfCurve {
            grid,
            values,
            kind,
            normalization: Normalization::Raw,
        }
    }

    /// Divides by the value at `τ = 0`. A curve with nonpositive value at
    /// zero is returned unchanged apart from the tag.
    pub fn unit_at_zero(&self) -> AcfCurve {
        let origin = self.values[0];
        let values = if origin > 0.0 {
            self.values.iter().map(|v| v / origin).collect()
        } else {
            self.values.clone()
        };
        AcfCurve {
            grid: self.grid,
            values,
            kind: self.kind,
            normalization: Normalization::UnitAtZero,
        }
    }

    pub fn normalized(&self, normalization: Normalization) -> AcfCurve {
        match normalization {
            Normalization::Raw => self.clone(),
            Normalization::UnitAtZero => self.unit_at_zero(),
        }
    }

    pub fn max_abs_diff(&self, other: &AcfCurve) -> Result<f64> {
        Error::check_len(self.values.len(), other.values.len())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `φ(0) ≥ 0` and `|φ(τ)| ≤ φ(0)` up to `tol`.
    pub fn is_positive_definite(&self, tol: f64) -> bool {
        let origin = self.values[0];
        origin >= -tol && self.values.iter().all(|v| v.abs() <= origin + tol)
    }
}

/// Time autocorrelation of a trigonometric sum:
/// `φ(τ) = a₀² + Σ_{ω>0} ½(a² + b²) cos(ωτ)`.
///
/// A zero-frequency term is a constant and keeps full weight.
pub fn time_acf_closed_form(series: &TrigSeries, grid: TauGrid) -> AcfCurve {
    let weights: Vec<(f64, f64)> = series
        .terms()
        .iter()
        .map(|t| {
            let power = if t.frequency == 0.0 {
                t.cos_coeff * t.cos_coeff
            } else {
                0.5 * (t.cos_coeff * t.cos_coeff + t.sin_coeff * t.sin_coeff)
            };
            (t.frequency, power)
        })
        .collect();
    let values = grid
        .points()
        .map(|tau| weights.iter().map(|(w, c)| c * (w * tau).cos()).sum())
        .collect();
    AcfCurve::raw(grid, values, AcfKind::TimeClosedForm)
}

/// Finite-horizon estimate `(1/T)∫₀ᵀ f(t) f(t+τ) dt` by the composite
/// trapezoid rule on samples of the exact trigonometric sum.
///
/// The sample step is refined below `max_step` so that every lag falls on
/// the sampling lattice; the horizon is rounded to a whole number of steps.
pub fn time_acf_numeric(series: &TrigSeries, grid: TauGrid, horizon: f64, max_step: f64) -> Result<AcfCurve> {
    if !(horizon > 0.0 && horizon.is_finite()) || horizon < 100.0 * grid.max() {
        return Err(Error::parameter(format!(
            "horizon {horizon} must be positive and at least 100 × max lag {}",
            grid.max()
        )));
    }
    let fastest = series.max_frequency();
    let resolve = if fastest > 0.0 {
        std::f64::consts::PI / (4.0 * fastest)
    } else {
        f64::INFINITY
    };
    let limit = resolve.min(grid.step() / 2.0);
    if !(max_step > 0.0) || max_step > limit {
        return Err(Error::parameter(format!(
            "time step {max_step} must be positive and at most {limit}"
        )));
    }
    let per_lag = (grid.step() / max_step).ceil() as usize;
    let h = grid.step() / per_lag as f64;
    let intervals = (horizon / h).round().max(1.0) as usize;
    let max_shift = (grid.count() - 1) * per_lag;
    let samples: Vec<f64> = (0..=intervals + max_shift)
        .map(|j| series.evaluate(j as f64 * h))
        .collect();
    let values = (0..grid.count())
        .map(|i| {
            let shift = i * per_lag;
            let inner: f64 = (1..intervals).map(|j| samples[j] * samples[j + shift]).sum();
            let ends = 0.5 * (samples[0] * samples[shift] + samples[intervals] * samples[intervals + shift]);
            (inner + ends) / intervals as f64
        })
        .collect();
    Ok(AcfCurve::raw(grid, values, AcfKind::TimeNumeric))
}

/// Phase autocorrelation of `p₀` under Maxwell–Boltzmann:
/// `R(τ) = kT·(cos A^{1/2}τ)₀₀ = (kT/(2N+1)) Σ_k cos(ω_k τ)`.
pub fn phase_acf_analytic(spectrum: &Spectrum, temperature: f64, grid: TauGrid) -> Result<AcfCurve> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::parameter(format!("temperature must be positive, got {temperature}")));
    }
    let scale = temperature / spectrum.len() as f64;
    let values = grid
        .points()
        .map(|tau| scale * spectrum.frequencies().iter().map(|w| (w * tau).cos()).sum::<f64>())
        .collect();
    Ok(AcfCurve::raw(grid, values, AcfKind::PhaseAnalytic))
}

/// The limit `∫ cos(τu)/(1+u²) du = π e^{-|τ|}`; `UnitAtZero` gives `e^{-|τ|}`.
pub fn ou_limit_curve(grid: TauGrid, normalization: Normalization) -> AcfCurve {
    let prefactor = match normalization {
        Normalization::Raw => std::f64::consts::PI,
        Normalization::UnitAtZero => 1.0,
    };
    AcfCurve {
        grid,
        values: grid.points().map(|tau| prefactor * (-tau.abs()).exp()).collect(),
        kind: AcfKind::Limit,
        normalization,
    }
}
