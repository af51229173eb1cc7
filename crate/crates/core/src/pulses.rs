//! Pulse envelope functions for single photons and coherent states:
//! construction, normalization, pointwise evaluation, and mode spectra.
//!
//! Conventions: the single-photon width σ is the unit of length; Gaussian
//! envelopes use the L²-normalized form (2πσ²)^(−1/4) exp(−(z−z₀)²/(4σ²))
//! per axis; every Gaussian integral is truncated at ±8σ (tail mass below
//! 1e−14); coherent envelopes are α(x) = √n̄ · f(x) with f unit-normalized.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

/// Relative tolerance for normalization checks (construction-time).
pub const NORM_TOL: f64 = 1e-8;

/// Support truncation for Gaussian profiles, in units of σ.
pub const SUPPORT_SIGMAS: f64 = 8.0;

/// Maximum allowed edge amplitude of a tabulated profile, relative to its
/// peak amplitude (so the edge *intensity* is below 1e−12 of the peak).
pub const EDGE_DECAY: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
enum ProfileKind {
    /// Isotropic Gaussian; for dimension 2 the same center and width apply
    /// to both axes.
    Gaussian { center: f64, sigma: f64 },
    /// Uniform 1-D grid with linear interpolation; zero outside the grid.
    Tabulated {
        start: f64,
        step: f64,
        samples: Vec<Complex64>,
    },
}

/// A pulse envelope (single-photon `f` or coherent `α`).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseProfile {
    kind: ProfileKind,
    dimension: u8,
    /// √n̄ for coherent profiles, 1 for single-photon profiles.
    amplitude_scale: Complex64,
}

/// Unit-normalized Gaussian profile centered at `center` with width `sigma`.
pub fn gaussian_profile(center: f64, sigma: f64, dimension: u8) -> Result<PulseProfile> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!(
            "gaussian_profile requires sigma > 0, got {sigma}"
        )));
    }
    if dimension != 1 && dimension != 2 {
        return Err(Error::invalid(format!(
            "gaussian_profile supports dimension 1 or 2, got {dimension}"
        )));
    }
    Ok(PulseProfile {
        kind: ProfileKind::Gaussian { center, sigma },
        dimension,
        amplitude_scale: Complex64::new(1.0, 0.0),
    })
}

/// 1-D tabulated profile on a uniform grid starting at `start` with spacing
/// `step`.  Samples must decay below [`EDGE_DECAY`] of the peak amplitude at
/// both grid edges so the implicit zero-extension is continuous in practice.
/// The profile is then rescaled to unit L² norm.
pub fn tabulated_profile(start: f64, step: f64, samples: Vec<Complex64>) -> Result<PulseProfile> {
    if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
        return Err(Error::invalid(format!(
            "tabulated_profile requires a finite grid with step > 0, got start={start}, step={step}"
        )));
    }
    if samples.len() < 3 {
        return Err(Error::invalid(
            "tabulated_profile requires at least 3 samples".to_string(),
        ));
    }
    let peak = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::invalid(
            "tabulated_profile requires a nonzero sample".to_string(),
        ));
    }
    let first = samples.first().unwrap().norm();
    let last = samples.last().unwrap().norm();
    if first > EDGE_DECAY * peak || last > EDGE_DECAY * peak {
        return Err(Error::invalid(format!(
            "tabulated samples must decay below {EDGE_DECAY:e} of the peak at the grid edges \
             (got {:.3e} and {:.3e} of peak)",
            first / peak,
            last / peak
        )));
    }
    let mut p = PulseProfile {
        kind: ProfileKind::Tabulated {
            start,
            step,
            samples,
        },
        dimension: 1,
        amplitude_scale: Complex64::new(1.0, 0.0),
    };
    let norm = p.mean_photon_number();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::invalid(
            "tabulated profile has non-normalizable L² mass".to_string(),
        ));
    }
    p.amplitude_scale = Complex64::new(1.0 / norm.sqrt(), 0.0);
    Ok(p)
}

/// Coherent envelope α(x) = √n̄ · f_base(x).
pub fn coherent_profile(base: &PulseProfile, nbar: f64) -> Result<PulseProfile> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::invalid(format!(
            "coherent_profile requires nbar ≥ 0, got {nbar}"
        )));
    }
    let base_norm = base.mean_photon_number();
    if (base_norm - 1.0).abs() > NORM_TOL {
        return Err(Error::invalid(format!(
            "coherent_profile requires a unit-normalized base (∫|f|² = {base_norm})"
        )));
    }
    let mut p = base.clone();
    p.amplitude_scale = base.amplitude_scale * nbar.sqrt();
    Ok(p)
}

impl PulseProfile {
    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    /// Gaussian width, when the profile is of Gaussian kind.
    pub fn sigma(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::Gaussian { sigma, .. } => Some(sigma),
            ProfileKind::Tabulated { .. } => None,
        }
    }

    /// Gaussian center, when the profile is of Gaussian kind.
    pub fn center(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::Gaussian { center, .. } => Some(center),
            ProfileKind::Tabulated { .. } => None,
        }
    }

    /// Complex amplitude at a 1-D position.
    ///
    /// For 2-D profiles use [`PulseProfile::intensity_2d`]; 1-D evaluation of
    /// a 2-D profile is a caller bug and panics in debug builds.
    pub fn amplitude(&self, z: f64) -> Complex64 {
        debug_assert_eq!(self.dimension, 1, "amplitude() is 1-D only");
        match &self.kind {
            ProfileKind::Gaussian { center, sigma } => {
                let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
                let arg = -((z - center) * (z - center)) / (4.0 * sigma * sigma);
                self.amplitude_scale * norm * arg.exp()
            }
            ProfileKind::Tabulated {
                start,
                step,
                samples,
            } => {
                let pos = (z - start) / step;
                if pos < 0.0 || pos > (samples.len() - 1) as f64 {
                    return Complex64::new(0.0, 0.0);
                }
                let i = (pos.floor() as usize).min(samples.len() - 2);
                let frac = pos - i as f64;
                self.amplitude_scale * (samples[i] * (1.0 - frac) + samples[i + 1] * frac)
            }
        }
    }

    /// |amplitude|² at a 1-D position.
    pub fn intensity(&self, z: f64) -> f64 {
        self.amplitude(z).norm_sqr()
    }

    /// |amplitude|² at a 2-D position (2-D Gaussian profiles only).
    pub fn intensity_2d(&self, x: f64, y: f64) -> f64 {
        debug_assert_eq!(self.dimension, 2, "intensity_2d() is 2-D only");
        match &self.kind {
            ProfileKind::Gaussian { center, sigma } => {
                let s2 = sigma * sigma;
                let r2 = (x - center) * (x - center) + (y - center) * (y - center);
                self.amplitude_scale.norm_sqr() / (2.0 * std::f64::consts::PI * s2)
                    * (-r2 / (2.0 * s2)).exp()
            }
            ProfileKind::Tabulated { .. } => unreachable!("tabulated profiles are 1-D"),
        }
    }

    /// Effective support interval (per axis for 2-D Gaussians).
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            ProfileKind::Gaussian { center, sigma } => (
                center - SUPPORT_SIGMAS * sigma,
                center + SUPPORT_SIGMAS * sigma,
            ),
            ProfileKind::Tabulated {
                start,
                step,
                samples,
            } => (*start, start + step * (samples.len() - 1) as f64),
        }
    }

    /// ∫|p|² dᵈx — exact for Gaussian kind (the base is analytically
    /// normalized), composite-Simpson on the stored samples for tabulated
    /// kind.
    pub fn mean_photon_number(&self) -> f64 {
        match &self.kind {
            ProfileKind::Gaussian { .. } => self.amplitude_scale.norm_sqr(),
            ProfileKind::Tabulated { step, samples, .. } => {
                let g: Vec<f64> = samples.iter().map(|s| s.norm_sqr()).collect();
                self.amplitude_scale.norm_sqr() * simpson_uniform(&g, *step)
            }
        }
    }

    /// d²/dz² of the 1-D intensity (used by the co-propagating spike path).
    /// Analytic for Gaussian kind, central finite differences for tabulated.
    pub(crate) fn intensity_second_derivative(&self, z: f64) -> f64 {
        match &self.kind {
            ProfileKind::Gaussian { center, sigma } => {
                let s2 = sigma * sigma;
                let d = z - center;
                self.intensity(z) * (d * d / (s2 * s2) - 1.0 / s2)
            }
            ProfileKind::Tabulated { step, .. } => {
                let h = 2.0 * step;
                (self.intensity(z + h) - 2.0 * self.intensity(z) + self.intensity(z - h)) / (h * h)
            }
        }
    }

    /// Mode amplitudes α_k = (2π)^(−1/2) ∫ p(z) e^(−ikz) dz on the grid.
    ///
    /// Gaussian profiles use adaptive quadrature over the truncated support;
    /// tabulated profiles integrate their linear interpolant segment-by-
    /// segment in closed form (exact up to roundoff).  2-D spectra are not
    /// provided.
    pub fn mode_spectrum(&self, k_grid: &[f64]) -> Result<Vec<Complex64>> {
        if self.dimension != 1 {
            return Err(Error::unsupported(
                "mode_spectrum is implemented for 1-D profiles only".to_string(),
            ));
        }
        let pref = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        match &self.kind {
            ProfileKind::Gaussian { center, sigma } => {
                // Amplitude-level integral: the integrand decays as the
                // square root of the intensity, so the ±8σ intensity
                // truncation is widened to ±12σ (amplitude tail < 3e−16).
                let (lo, hi) = (center - 12.0 * sigma, center + 12.0 * sigma);
                let mut out = Vec::with_capacity(k_grid.len());
                for &k in k_grid {
                    let q = quad::integrate_complex(
                        |z| self.amplitude(z) * Complex64::new(0.0, -k * z).exp(),
                        lo,
                        hi,
                        &[],
                        1e-12,
                    );
                    if !q.converged {
                        return Err(Error::NumericFailure {
                            message: format!("mode_spectrum quadrature did not converge at k={k}"),
                            residual: q.error_estimate,
                        });
                    }
                    out.push(pref * q.value);
                }
                Ok(out)
            }
            ProfileKind::Tabulated {
                start,
                step,
                samples,
            } => {
                let mut out = Vec::with_capacity(k_grid.len());
                for &k in k_grid {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..samples.len() - 1 {
                        let z0 = start + step * i as f64;
                        acc += segment_fourier(
                            self.amplitude_scale * samples[i],
                            self.amplitude_scale * samples[i + 1],
                            z0,
                            *step,
                            k,
                        );
                    }
                    out.push(pref * acc);
                }
                Ok(out)
            }
        }
    }
}

/// ∫_{z0}^{z0+h} [s0 + (s1−s0)(z−z0)/h] e^(−ikz) dz in closed form, with a
/// series branch for small |k·h| where the closed form loses precision.
fn segment_fourier(s0: Complex64, s1: Complex64, z0: f64, h: f64, k: f64) -> Complex64 {
    let kh = k * h;
    let phase0 = Complex64::new(0.0, -k * z0).exp();
    if kh.abs() < 1e-4 {
        // ∫ (linear) e^{-ik(z0+u)} du, u∈[0,h], expanded to O((kh)²).
        let m0 = h * (1.0 - Complex64::new(0.0, kh) / 2.0 - kh * kh / 6.0);
        let m1 = h * (0.5 - Complex64::new(0.0, kh) / 3.0 - kh * kh / 8.0);
        phase0 * (s0 * (m0 - m1) + s1 * m1)
    } else {
        // With u = z−z0: ∫ e^{-iku} du and ∫ (u/h) e^{-iku} du.
        let e = Complex64::new(0.0, -kh).exp();
        let ik = Complex64::new(0.0, k);
        let i0 = (Complex64::new(1.0, 0.0) - e) / ik;
        let i1 = (i0 - h * e) / (ik * h);
        phase0 * (s0 * (i0 - i1) + s1 * i1)
    }
}

/// Composite Simpson on uniformly spaced samples (trapezoid closing rule for
/// an even sample count).
fn simpson_uniform(g: &[f64], step: f64) -> f64 {
    let n = g.len();
    debug_assert!(n >= 3);
    let (simpson_end, trapezoid_tail) = if n % 2 == 1 {
        (n - 1, 0.0)
    } else {
        (n - 2, 0.5 * (g[n - 2] + g[n - 1]) * step)
    };
    let mut acc = g[0] + g[simpson_end];
    let mut i = 1;
    while i < simpson_end {
        acc += 4.0 * g[i];
        if i + 1 < simpson_end {
            acc += 2.0 * g[i + 1];
        }
        i += 2;
    }
    acc * step / 3.0 + trapezoid_tail
}
