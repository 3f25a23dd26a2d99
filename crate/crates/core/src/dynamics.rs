//! Exact flow of the chain and the trigonometric-sum form of `p₀(t)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{forward_real, mode_transform, Direction, Spectrum};

/// One point of phase space. Slot `j` holds site label `j - N`; the
/// distinguished particle is the middle slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl PhaseState {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        Error::check_len(p.len(), q.len())?;
        if p.len() % 2 == 0 {
            return Err(Error::Dimension {
                expected: p.len() + 1,
                actual: p.len(),
            });
        }
        Ok(PhaseState { p, q })
    }

    pub fn zeros(half_size: usize) -> Self {
        let size = 2 * half_size + 1;
        PhaseState {
            p: vec![0.0; size],
            q: vec![0.0; size],
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Momentum of the distinguished particle.
    pub fn p0(&self) -> f64 {
        self.p[self.p.len() / 2]
    }

    fn check(&self, spectrum: &Spectrum) -> Result<()> {
        Error::check_len(spectrum.len(), self.p.len())?;
        Error::check_len(spectrum.len(), self.q.len())
    }
}

/// Mode amplitudes `p̂(k)`, `q̂(k)` for `k = -N..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    pub p_hat: Vec<Complex64>,
    pub q_hat: Vec<Complex64>,
}

impl ModeAmplitudes {
    pub fn from_state(state: &PhaseState) -> Result<Self> {
        Ok(ModeAmplitudes {
            p_hat: forward_real(&state.p)?,
            q_hat: forward_real(&state.q)?,
        })
    }

    /// Back to site coordinates, keeping real parts. Exact when the
    /// amplitudes are Hermitian-symmetric.
    pub fn to_state(&self) -> Result<PhaseState> {
        let p = mode_transform(&self.p_hat, Direction::Inverse)?;
        let q = mode_transform(&self.q_hat, Direction::Inverse)?;
        PhaseState::new(p.iter().map(|z| z.re).collect(), q.iter().map(|z| z.re).collect())
    }

    /// `H = (1/(2(2N+1))) (Σ|p̂(k)|² + Σ ω_k²|q̂(k)|²)`.
    pub fn energy(&self, spectrum: &Spectrum) -> Result<f64> {
        Error::check_len(spectrum.len(), self.p_hat.len())?;
        Error::check_len(spectrum.len(), self.q_hat.len())?;
        let kinetic: f64 = self.p_hat.iter().map(|z| z.norm_sqr()).sum();
        let potential: f64 = self
            .q_hat
            .iter()
            .zip(spectrum.frequencies())
            .map(|(z, w)| w * w * z.norm_sqr())
            .sum();
        Ok((kinetic + potential) / (2.0 * spectrum.len() as f64))
    }

    /// Each mode advances as an independent oscillator; a zero-frequency
    /// mode drifts freely.
    pub fn evolve(&self, spectrum: &Spectrum, t: f64) -> Result<Self> {
        Error::check_len(spectrum.len(), self.p_hat.len())?;
        Error::check_len(spectrum.len(), self.q_hat.len())?;
        let mut p_hat = Vec::with_capacity(self.p_hat.len());
        let mut q_hat = Vec::with_capacity(self.q_hat.len());
        for ((&p, &q), &w) in self.p_hat.iter().zip(&self.q_hat).zip(spectrum.frequencies()) {
            if w == 0.0 {
                p_hat.push(p);
                q_hat.push(q + p * t);
            } else {
                let (s, c) = (w * t).sin_cos();
                p_hat.push(p * c - q * (w * s));
                q_hat.push(q * c + p * (s / w));
            }
        }
        Ok(ModeAmplitudes { p_hat, q_hat })
    }
}

/// `H = Σp²/2 + qᵀAq/2`, with the potential evaluated in mode space.
pub fn energy(state: &PhaseState, spectrum: &Spectrum) -> Result<f64> {
    state.check(spectrum)?;
    let kinetic: f64 = state.p.iter().map(|x| x * x).sum::<f64>() / 2.0;
    let q_hat = forward_real(&state.q)?;
    let potential: f64 = q_hat
        .iter()
        .zip(spectrum.frequencies())
        .map(|(z, w)| w * w * z.norm_sqr())
        .sum();
    Ok(kinetic + potential / (2.0 * spectrum.len() as f64))
}

pub fn evolve(state: &PhaseState, spectrum: &Spectrum, t: f64) -> Result<PhaseState> {
    state.check(spectrum)?;
    ModeAmplitudes::from_state(state)?.evolve(spectrum, t)?.to_state()
}

/// One term `a cos(ωt) + b sin(ωt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub frequency: f64,
    pub cos_coeff: f64,
    pub sin_coeff: f64,
}

impl TrigTerm {
    pub fn new(frequency: f64, cos_coeff: f64, sin_coeff: f64) -> Self {
        TrigTerm {
            frequency,
            cos_coeff,
            sin_coeff,
        }
    }
}

/// A finite trigonometric sum with strictly distinct, nonnegative
/// frequencies, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigSeries {
    terms: Vec<TrigTerm>,
}

impl TrigSeries {
    /// Rejects repeated frequencies; callers merge degenerate terms first
    /// (see [`TrigSeries::merged`]).
    pub fn new(mut terms: Vec<TrigTerm>) -> Result<Self> {
        for term in &terms {
            if !(term.frequency >= 0.0 && term.frequency.is_finite()) {
                return Err(Error::Contract(format!(
                    "frequencies must be finite and nonnegative, got {}",
                    term.frequency
                )));
            }
            if term.frequency == 0.0 && term.sin_coeff != 0.0 {
                return Err(Error::Contract("sine coefficient at zero frequency must vanish".into()));
            }
        }
        terms.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        if let Some(pair) = terms.windows(2).find(|w| w[0].frequency == w[1].frequency) {
            return Err(Error::Contract(format!(
                "repeated frequency {} in trigonometric sum",
                pair[0].frequency
            )));
        }
        Ok(TrigSeries { terms })
    }

    /// Sums coefficients of equal frequencies.
    pub fn merged(mut terms: Vec<TrigTerm>) -> Result<Self> {
        terms.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        let mut out: Vec<TrigTerm> = Vec::with_capacity(terms.len());
        for term in terms {
            match out.last_mut() {
                Some(last) if last.frequency == term.frequency => {
                    last.cos_coeff += term.cos_coeff;
                    last.sin_coeff += term.sin_coeff;
                }
                _ => out.push(term),
            }
        }
        for term in &mut out {
            if term.frequency == 0.0 {
                term.sin_coeff = 0.0;
            }
        }
        Self::new(out)
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.last().map_or(0.0, |t| t.frequency)
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                let (s, c) = (term.frequency * t).sin_cos();
                term.cos_coeff * c + term.sin_coeff * s
            })
            .sum()
    }
}

/// `p₀(t) = (1/(2N+1)) Σ_k [p̂(k) cos(ω_k t) − ω_k q̂(k) sin(ω_k t)]` as a
/// merged real trigonometric sum.
pub fn momentum_trajectory_coefficients(state: &PhaseState, spectrum: &Spectrum) -> Result<TrigSeries> {
    state.check(spectrum)?;
    momentum_series_from_modes(&ModeAmplitudes::from_state(state)?, spectrum)
}

pub fn momentum_series_from_modes(modes: &ModeAmplitudes, spectrum: &Spectrum) -> Result<TrigSeries> {
    Error::check_len(spectrum.len(), modes.p_hat.len())?;
    Error::check_len(spectrum.len(), modes.q_hat.len())?;
    let scale = 1.0 / spectrum.len() as f64;
    // Imaginary parts cancel between k and -k for real states.
    let terms = spectrum
        .frequencies()
        .iter()
        .zip(modes.p_hat.iter().zip(&modes.q_hat))
        .map(|(&w, (p, q))| TrigTerm::new(w, p.re * scale, -w * q.re * scale))
        .collect();
    TrigSeries::merged(terms)
}
