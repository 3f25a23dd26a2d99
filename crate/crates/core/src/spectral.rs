//! Mode spectrum and cyclic-matrix machinery.
//!
//! All vectors indexed by a site or mode label `k ∈ -N..=N` are stored with
//! offset `N`, so slot `j` holds label `j - N`.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `N` accepted by the dense `O(n³)` helpers.
pub const DENSE_ORACLE_BOUND: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyLaw {
    /// `ω_k = |tan(πk/(2N+1))|`.
    Tangent,
    /// One frequency per mode label, ordered `k = -N..=N`.
    Explicit(Vec<f64>),
}

/// Parameters of one finite assembly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyConfig {
    pub half_size: usize,
    pub mass: f64,
    pub temperature: f64,
    pub frequency_law: FrequencyLaw,
    pub cutoff_cap: Option<f64>,
    pub rng_seed: u64,
}

impl AssemblyConfig {
    pub fn tangent(half_size: usize) -> Self {
        AssemblyConfig {
            half_size,
            mass: 1.0,
            temperature: 1.0,
            frequency_law: FrequencyLaw::Tangent,
            cutoff_cap: None,
            rng_seed: 0,
        }
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Number of particles, `2N+1`.
    pub fn size(&self) -> usize {
        2 * self.half_size + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.half_size < 1 {
            return Err(Error::config("half_size must be at least 1"));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::config(format!("mass must be positive, got {}", self.mass)));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::config(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if let Some(cap) = self.cutoff_cap {
            if !(cap > 0.0 && cap.is_finite()) {
                return Err(Error::config(format!("cutoff_cap must be positive, got {cap}")));
            }
        }
        if let FrequencyLaw::Explicit(list) = &self.frequency_law {
            check_explicit(list, self.size())?;
        }
        Ok(())
    }
}

fn check_explicit(list: &[f64], size: usize) -> Result<()> {
    if list.len() != size {
        return Err(Error::config(format!(
            "explicit frequency list has {} entries, expected {size}",
            list.len()
        )));
    }
    if let Some(w) = list.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
        return Err(Error::config(format!("frequencies must be finite and nonnegative, got {w}")));
    }
    let n = list.len();
    for j in 0..n / 2 {
        if list[j] != list[n - 1 - j] {
            return Err(Error::config(format!(
                "frequency list is not symmetric: ω[{}] = {} but ω[{}] = {}",
                j as isize - (n / 2) as isize,
                list[j],
                (n / 2 - j),
                list[n - 1 - j]
            )));
        }
    }
    Ok(())
}

/// The `2N+1` mode frequencies `ω_k`, stored for `k = -N..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    frequencies: Vec<f64>,
}

impl Spectrum {
    /// Builds a spectrum from an explicit symmetric list of nonnegative
    /// frequencies ordered `k = -N..=N`.
    pub fn from_frequencies(frequencies: Vec<f64>) -> Result<Self> {
        if frequencies.len() < 3 || frequencies.len() % 2 == 0 {
            return Err(Error::config(format!(
                "frequency list length must be odd and at least 3, got {}",
                frequencies.len()
            )));
        }
        check_explicit(&frequencies, frequencies.len())?;
        Ok(Spectrum { frequencies })
    }

    /// Every mode at the same frequency.
    pub fn constant(half_size: usize, frequency: f64) -> Result<Self> {
        Self::from_frequencies(vec![frequency; 2 * half_size + 1])
    }

    pub fn half_size(&self) -> usize {
        self.frequencies.len() / 2
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// The order of the root of unity `ζ = e^{2πi/(2N+1)}`.
    pub fn root_of_unity_order(&self) -> usize {
        self.frequencies.len()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Frequency of mode label `k`, interpreted cyclically.
    pub fn frequency(&self, k: isize) -> f64 {
        self.frequencies[self.slot(k)]
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequencies.iter().copied().fold(0.0, f64::max)
    }

    pub(crate) fn slot(&self, k: isize) -> usize {
        let n = self.len() as isize;
        (k + self.half_size() as isize).rem_euclid(n) as usize
    }
}

pub fn build_spectrum(config: &AssemblyConfig) -> Result<Spectrum> {
    config.validate()?;
    let n = config.half_size;
    let size = config.size();
    let mut frequencies = match &config.frequency_law {
        FrequencyLaw::Tangent => {
            let mut w = vec![0.0; size];
            for k in 1..=n {
                let value = (PI * k as f64 / size as f64).tan();
                w[n + k] = value;
                w[n - k] = value;
            }
            w
        }
        FrequencyLaw::Explicit(list) => list.clone(),
    };
    if let Some(cap) = config.cutoff_cap {
        for w in &mut frequencies {
            *w = w.min(cap);
        }
    }
    if config.mass != 1.0 {
        let scale = config.mass.sqrt().recip();
        for w in &mut frequencies {
            *w *= scale;
        }
    }
    Ok(Spectrum { frequencies })
}

/// Real cosine of the phase `2π·r/n`, reducing `r` modulo `n` first.
fn unit_cos(r: isize, n: usize) -> f64 {
    let r = r.rem_euclid(n as isize) as f64;
    (2.0 * PI * r / n as f64).cos()
}

fn check_dense(spectrum: &Spectrum) -> Result<()> {
    if spectrum.half_size() > DENSE_ORACLE_BOUND {
        return Err(Error::OracleBound {
            half_size: spectrum.half_size(),
            bound: DENSE_ORACLE_BOUND,
        });
    }
    Ok(())
}

/// Dense cyclic coupling matrix `A_{ml} = (1/(2N+1)) Σ_i ω_i² ζ^{i(m-l)}`.
///
/// Test-scale only; refuses `N > DENSE_ORACLE_BOUND`.
pub fn coupling_matrix(spectrum: &Spectrum) -> Result<DMatrix<f64>> {
    spectrum_function_matrix(spectrum, |w| w * w)
}

/// Full matrix `g(A^{1/2})` assembled from the spectral sum, for any `g`.
fn spectrum_function_matrix(spectrum: &Spectrum, g: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    check_dense(spectrum)?;
    let size = spectrum.len();
    let first_row = cyclic_row(spectrum, g);
    Ok(DMatrix::from_fn(size, size, |m, l| {
        first_row[(l as isize - m as isize).rem_euclid(size as isize) as usize]
    }))
}

/// Entries `c_d = (1/(2N+1)) Σ_i g(ω_i) cos(2π i d/(2N+1))` for `d = 0..2N`.
fn cyclic_row(spectrum: &Spectrum, g: impl Fn(f64) -> f64) -> Vec<f64> {
    let size = spectrum.len();
    let n = spectrum.half_size() as isize;
    let weights: Vec<f64> = spectrum.frequencies.iter().map(|&w| g(w)).collect();
    (0..size as isize)
        .map(|d| {
            let sum: f64 = weights
                .iter()
                .enumerate()
                .map(|(j, w)| w * unit_cos((j as isize - n) * d, size))
                .sum();
            sum / size as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Inverse,
}

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn plan(len: usize, direction: Direction) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER.lock().unwrap_or_else(|e| e.into_inner());
    match direction {
        Direction::Forward => planner.plan_fft_forward(len),
        Direction::Inverse => planner.plan_fft_inverse(len),
    }
}

/// Mode transform on a vector indexed `-N..=N`.
///
/// `Forward`: `v̂(k) = Σ_i ζ^{-ik} v_i`. `Inverse`: `v_i = (1/(2N+1)) Σ_k ζ^{ik} v̂(k)`.
pub fn mode_transform(v: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
    if v.len() % 2 == 0 {
        return Err(Error::Dimension {
            expected: v.len() + 1,
            actual: v.len(),
        });
    }
    let len = v.len();
    let half = len / 2;
    // Labels -N..=N map onto FFT slots by reduction modulo 2N+1.
    let mut buffer = v.to_vec();
    buffer.rotate_left(half);
    plan(len, direction).process(&mut buffer);
    buffer.rotate_right(half);
    if direction == Direction::Inverse {
        let scale = 1.0 / len as f64;
        for z in &mut buffer {
            *z *= scale;
        }
    }
    Ok(buffer)
}

/// Forward transform of a real vector.
pub fn forward_real(v: &[f64]) -> Result<Vec<Complex64>> {
    let complex: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    mode_transform(&complex, Direction::Forward)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropagatorKind {
    /// `cos(A^{1/2} t)`
    Cos,
    /// `A^{1/2} sin(A^{1/2} t)`
    OmegaSin,
}

impl PropagatorKind {
    fn apply(self, w: f64, t: f64) -> f64 {
        match self {
            PropagatorKind::Cos => (w * t).cos(),
            PropagatorKind::OmegaSin => w * (w * t).sin(),
        }
    }
}

/// Entry `(m, l)` of `cos(A^{1/2}t)` or `A^{1/2} sin(A^{1/2}t)`, from the
/// spectral sum. Site labels are read cyclically.
pub fn propagator_entry(spectrum: &Spectrum, kind: PropagatorKind, m: isize, l: isize, t: f64) -> f64 {
    let size = spectrum.len();
    let n = spectrum.half_size() as isize;
    let sum: f64 = spectrum
        .frequencies
        .iter()
        .enumerate()
        .map(|(j, &w)| kind.apply(w, t) * unit_cos((j as isize - n) * (m - l), size))
        .sum();
    sum / size as f64
}

/// The whole propagator matrix via the spectral sum. Test-scale only.
pub fn propagator_matrix(spectrum: &Spectrum, kind: PropagatorKind, t: f64) -> Result<DMatrix<f64>> {
    spectrum_function_matrix(spectrum, |w| kind.apply(w, t))
}

/// Independent route: eigendecompose the dense coupling matrix and apply the
/// propagator function to its eigenvalues.
pub fn dense_propagator(coupling: &DMatrix<f64>, kind: PropagatorKind, t: f64) -> Result<DMatrix<f64>> {
    if !coupling.is_square() {
        return Err(Error::Dimension {
            expected: coupling.nrows(),
            actual: coupling.ncols(),
        });
    }
    if coupling.nrows() > 2 * DENSE_ORACLE_BOUND + 1 {
        return Err(Error::OracleBound {
            half_size: coupling.nrows() / 2,
            bound: DENSE_ORACLE_BOUND,
        });
    }
    let eigen = SymmetricEigen::new(coupling.clone());
    // Round-off can push zero eigenvalues slightly negative.
    let values = eigen
        .eigenvalues
        .map(|lambda| kind.apply(lambda.max(0.0).sqrt(), t));
    let vectors = &eigen.eigenvectors;
    Ok(vectors * DMatrix::from_diagonal(&values) * vectors.transpose())
}

/// Eigenvalues of a dense symmetric matrix, sorted ascending.
pub fn dense_eigenvalues(matrix: &DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(matrix.clone()).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}
