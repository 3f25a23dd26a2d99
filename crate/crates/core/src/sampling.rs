//! Initial conditions from the Maxwell–Boltzmann distribution and from the
//! flow-invariant measure on an energy shell.
//!
//! Both samplers work in the real orthonormal coordinates `y` in which
//! `H = |y|²/2`: the kinetic part `(p̂(0), √2·Re p̂(k), √2·Im p̂(k))/√(2N+1)`
//! for `k = 1..=N`, followed by the matching potential part `ω_k q̂(k)` for
//! every mode with `ω_k > 0`. Zero-frequency position directions are flat
//! (no restoring force), carry no weight and are held at zero; they never
//! enter `p₀`. The flow rotates each `(p-part, q-part)` pair, so the uniform
//! measure on the sphere `|y|² = 2E` is invariant.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ModeAmplitudes, PhaseState};
use crate::error::{Error, Result};
use crate::spectral::Spectrum;
use crate::stats::ks_distance_normal;

/// Minimum sample count accepted by [`mehler_marginal_statistic`].
pub const MEHLER_MIN_SAMPLES: usize = 1000;

/// Generator for ensemble member `index` under `seed`: the key comes from
/// the seed, the ChaCha stream from the index.
pub fn member_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// An energy level `H = E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    energy: f64,
}

impl ShellSpec {
    pub fn new(energy: f64) -> Result<Self> {
        if !(energy > 0.0 && energy.is_finite()) {
            return Err(Error::parameter(format!("shell energy must be positive, got {energy}")));
        }
        Ok(ShellSpec { energy })
    }

    /// `E = (2N+1)·kT`.
    pub fn most_probable(half_size: usize, temperature: f64) -> Result<Self> {
        Self::new((2 * half_size + 1) as f64 * temperature)
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Variance of a single unit-projection coordinate, `2E/D`.
    pub fn coordinate_variance(&self, spectrum: &Spectrum) -> f64 {
        2.0 * self.energy / sphere_dimension(spectrum) as f64
    }
}

/// Number of weighted coordinates: `2N+1` kinetic plus one per nonzero
/// frequency. `4N+1` for the tangent law.
pub fn sphere_dimension(spectrum: &Spectrum) -> usize {
    spectrum.len() + spectrum.frequencies().iter().filter(|&&w| w > 0.0).count()
}

/// Maps orthonormal coordinates `y` to mode amplitudes.
pub fn modes_from_coordinates(spectrum: &Spectrum, y: &[f64]) -> Result<ModeAmplitudes> {
    Error::check_len(sphere_dimension(spectrum), y.len())?;
    let size = spectrum.len();
    let n = spectrum.half_size();
    let root = (size as f64).sqrt();
    let half_root = (size as f64 / 2.0).sqrt();
    let zero = Complex64::new(0.0, 0.0);
    let mut p_hat = vec![zero; size];
    let mut q_hat = vec![zero; size];

    let (kinetic, potential) = y.split_at(size);
    p_hat[n] = Complex64::new(root * kinetic[0], 0.0);
    for k in 1..=n {
        let z = Complex64::new(kinetic[2 * k - 1], kinetic[2 * k]) * half_root;
        p_hat[n + k] = z;
        p_hat[n - k] = z.conj();
    }

    let mut next = potential.iter();
    let w0 = spectrum.frequency(0);
    if w0 > 0.0 {
        q_hat[n] = Complex64::new(root * next.next().unwrap() / w0, 0.0);
    }
    for k in 1..=n {
        let w = spectrum.frequency(k as isize);
        if w > 0.0 {
            let re = *next.next().unwrap();
            let im = *next.next().unwrap();
            let z = Complex64::new(re, im) * (half_root / w);
            q_hat[n + k] = z;
            q_hat[n - k] = z.conj();
        }
    }
    Ok(ModeAmplitudes { p_hat, q_hat })
}

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, sd: f64) -> Vec<f64> {
    (0..len)
        .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

pub fn maxwell_boltzmann_modes<R: Rng + ?Sized>(
    spectrum: &Spectrum,
    temperature: f64,
    rng: &mut R,
) -> Result<ModeAmplitudes> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::parameter(format!("temperature must be positive, got {temperature}")));
    }
    let y = gaussian_vector(rng, sphere_dimension(spectrum), temperature.sqrt());
    modes_from_coordinates(spectrum, &y)
}

pub fn energy_shell_modes<R: Rng + ?Sized>(
    spectrum: &Spectrum,
    shell: &ShellSpec,
    rng: &mut R,
) -> Result<ModeAmplitudes> {
    let mut y = gaussian_vector(rng, sphere_dimension(spectrum), 1.0);
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let radius = (2.0 * shell.energy()).sqrt();
    for v in &mut y {
        *v *= radius / norm;
    }
    modes_from_coordinates(spectrum, &y)
}

/// Momenta i.i.d. `N(0, kT)`; each nonzero mode's `ω_k q̂(k)` part i.i.d.
/// with the same variance; zero-frequency positions fixed at zero.
pub fn sample_maxwell_boltzmann(spectrum: &Spectrum, temperature: f64, seed: u64) -> Result<PhaseState> {
    maxwell_boltzmann_modes(spectrum, temperature, &mut member_rng(seed, 0))?.to_state()
}

/// Uniform point of the energy shell `H = E` under the invariant measure.
pub fn sample_energy_shell(spectrum: &Spectrum, shell: &ShellSpec, seed: u64) -> Result<PhaseState> {
    energy_shell_modes(spectrum, shell, &mut member_rng(seed, 0))?.to_state()
}

/// KS distance between the empirical law of momentum `p_site` over
/// `samples` and the centred Gaussian of variance `2E/D`
/// (`E/(2N+½)` for the tangent law).
pub fn mehler_marginal_statistic(
    samples: &[PhaseState],
    spectrum: &Spectrum,
    shell: &ShellSpec,
    site: isize,
) -> Result<f64> {
    if samples.len() < MEHLER_MIN_SAMPLES {
        return Err(Error::parameter(format!(
            "marginal test needs at least {MEHLER_MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let slot = spectrum.slot(site);
    let values = samples
        .iter()
        .map(|s| {
            Error::check_len(spectrum.len(), s.len())?;
            Ok(s.p[slot])
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ks_distance_normal(&values, shell.coordinate_variance(spectrum).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{energy, evolve};
    use crate::spectral::{build_spectrum, AssemblyConfig};
    use approx::assert_abs_diff_eq;

    fn tangent(n: usize) -> Spectrum {
        build_spectrum(&AssemblyConfig::tangent(n)).unwrap()
    }

    #[test]
    fn dimension_counts_nonzero_frequencies() {
        assert_eq!(sphere_dimension(&tangent(10)), 41);
        assert_eq!(sphere_dimension(&Spectrum::constant(3, 1.0).unwrap()), 14);
        assert_eq!(ShellSpec::most_probable(10, 2.0).unwrap().energy(), 42.0);
        assert!(ShellSpec::new(0.0).is_err());
    }

    #[test]
    fn coordinates_preserve_energy_and_reality() {
        let s = tangent(6);
        let y: Vec<f64> = (0..25).map(|i| (i as f64 * 0.37).sin()).collect();
        let modes = modes_from_coordinates(&s, &y).unwrap();
        let half_norm = 0.5 * y.iter().map(|v| v * v).sum::<f64>();
        assert_abs_diff_eq!(modes.energy(&s).unwrap(), half_norm, epsilon = 1e-12);
        let state = modes.to_state().unwrap();
        assert_abs_diff_eq!(energy(&state, &s).unwrap(), half_norm, epsilon = 1e-12);
        // the round trip through site space must not lose an imaginary part
        let back = ModeAmplitudes::from_state(&state).unwrap();
        for (a, b) in back.p_hat.iter().zip(&modes.p_hat) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn shell_samples_sit_on_the_shell() {
        let s = tangent(40);
        let shell = ShellSpec::most_probable(40, 1.5).unwrap();
        for seed in 0..20 {
            let state = sample_energy_shell(&s, &shell, seed).unwrap();
            let e = energy(&state, &s).unwrap();
            assert!((e - shell.energy()).abs() / shell.energy() < 1e-10);
            let later = evolve(&state, &s, 5.0).unwrap();
            assert!((energy(&later, &s).unwrap() - shell.energy()).abs() / shell.energy() < 1e-10);
        }
    }

    #[test]
    fn samplers_are_reproducible() {
        let s = tangent(15);
        let shell = ShellSpec::new(10.0).unwrap();
        assert_eq!(sample_energy_shell(&s, &shell, 9).unwrap(), sample_energy_shell(&s, &shell, 9).unwrap());
        assert_ne!(sample_energy_shell(&s, &shell, 9).unwrap(), sample_energy_shell(&s, &shell, 10).unwrap());
        assert_eq!(
            sample_maxwell_boltzmann(&s, 1.0, 3).unwrap(),
            sample_maxwell_boltzmann(&s, 1.0, 3).unwrap()
        );
    }

    #[test]
    fn zero_mode_position_is_frozen() {
        let s = tangent(5);
        let state = sample_maxwell_boltzmann(&s, 1.0, 1).unwrap();
        let modes = ModeAmplitudes::from_state(&state).unwrap();
        assert!(modes.q_hat[5].norm() < 1e-12);
    }

    #[test]
    fn mehler_requires_enough_samples() {
        let s = tangent(3);
        let shell = ShellSpec::new(7.0).unwrap();
        let few = vec![PhaseState::zeros(3); 10];
        assert!(matches!(
            mehler_marginal_statistic(&few, &s, &shell, 0),
            Err(Error::Parameter(_))
        ));
    }
}
