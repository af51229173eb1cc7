//! Stable overlap engine for co-propagating pulses, where the phase is a
//! delta-like spike φ(z,z′) = χt·g_ε(z−z′) that an outer quadrature grid
//! could never resolve for small ε.
//!
//! The inner integral is taken in the substituted variable u = (z−z′)/(2√ε),
//! where the spike has unit width regardless of ε, and is evaluated in the
//! regime-appropriate way described in [`super::spike`].  ε down to 10⁻²⁰
//! (and beyond) costs the same as ε = 1.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulses::PulseProfile;
use crate::quad;

use super::spike::{
    i_half_asymptotic, j_moment, spike_phase_factor, ASYMPTOTIC_RESIDUAL, DIRECT_MAX_PHI0,
    MOMENT_MAX_PHI0, U_MAX,
};
use super::{check_exponent_bound, integrate_outer, InnerExponent, OverlapResult, NORM_TOL};

/// Blanket relative allowance for the envelope moments dropped beyond the
/// curvature term (their weight is suppressed by a further factor ε²).
const MOMENT_TAIL_FRAC: f64 = 1e-10;

enum Regime {
    /// |φ₀| ≤ 50: resolve the envelope across the spike directly.
    Direct,
    /// 50 < |φ₀| ≤ 8000: envelope factored out to second order; J₀ and J₂
    /// are the spike moments, shared across every outer node.
    Moments {
        j0: Complex64,
        j2: Complex64,
        err: f64,
        converged: bool,
    },
    /// |φ₀| > 8000: stationary-phase asymptotics for the spike integral.
    Asymptotic { i_half: Complex64 },
}

pub struct CopropagatingEngine<'a> {
    alpha: &'a PulseProfile,
    f: &'a PulseProfile,
    nbar: f64,
    eps: f64,
    phi0: f64,
    phase_offset: f64,
    regime: Regime,
    inner_tol: f64,
    cache: RefCell<HashMap<u64, InnerExponent>>,
}

impl<'a> CopropagatingEngine<'a> {
    /// `chi_t` is the accumulated coupling χ·t and `eps` the square width of
    /// the Gaussian regularization of the delta kernel (must be positive).
    pub fn new(
        alpha: &'a PulseProfile,
        f: &'a PulseProfile,
        chi_t: f64,
        eps: f64,
        phase_offset: f64,
    ) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::invalid(format!(
                "spike regularization width must be positive and finite (got {eps})"
            )));
        }
        if !chi_t.is_finite() {
            return Err(Error::invalid("coupling χt must be finite"));
        }
        if alpha.dimension() != 1 || f.dimension() != 1 {
            return Err(Error::unsupported(
                "co-propagating spike engine requires one-dimensional profiles",
            ));
        }
        let photon_norm = f.mean_photon_number();
        if (photon_norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "photon profile must be unit-normalized (got ∫|f|² = {photon_norm})"
            )));
        }
        let nbar = alpha.mean_photon_number();
        let phi0 = chi_t / (2.0 * (std::f64::consts::PI * eps).sqrt());
        let regime = if phi0.abs() <= DIRECT_MAX_PHI0 {
            Regime::Direct
        } else if phi0.abs() <= MOMENT_MAX_PHI0 {
            let j0 = j_moment(phi0, 0);
            let j2 = j_moment(phi0, 2);
            Regime::Moments {
                j0: j0.value,
                j2: j2.value,
                err: j0.error_estimate + j2.error_estimate,
                converged: j0.converged && j2.converged,
            }
        } else {
            Regime::Asymptotic {
                i_half: i_half_asymptotic(phi0),
            }
        };
        Ok(CopropagatingEngine {
            alpha,
            f,
            nbar,
            eps,
            phi0,
            phase_offset,
            regime,
            inner_tol: 1e-12 * (1.0 + nbar),
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.nbar
    }

    fn k_direct(&self, y: f64) -> quad::Quadrature {
        let w = 2.0 * self.eps.sqrt();
        quad::integrate_complex(
            |u| w * self.alpha.intensity(y + w * u) * spike_phase_factor(self.phi0, u),
            -U_MAX,
            U_MAX,
            &[0.0],
            self.inner_tol,
        )
    }

    fn k_moments(&self, y: f64, j0: Complex64, j2: Complex64, jerr: f64) -> (Complex64, f64) {
        let w = 2.0 * self.eps.sqrt();
        let a = self.alpha.intensity(y);
        let a2 = self.alpha.intensity_second_derivative(y);
        // (z−y) = w·u, so the quadratic envelope term carries (w²/2)u² = 2ε u².
        let k = w * (a * j0 + 2.0 * self.eps * a2 * j2);
        let err = w * (a * jerr + 2.0 * self.eps * a2.abs() * jerr) + MOMENT_TAIL_FRAC * k.norm();
        (k, err)
    }

    fn k_asymptotic(&self, y: f64, i_half: Complex64) -> (Complex64, f64) {
        let w = 2.0 * self.eps.sqrt();
        let a = self.alpha.intensity(y);
        // Spike integral is symmetric: ∫_{−∞}^{∞} = 2 ∫_0^{∞}.  The envelope
        // curvature correction is suppressed by a further ε and dropped.
        let k = 2.0 * w * a * i_half;
        let err = 2.0 * w * a * ASYMPTOTIC_RESIDUAL;
        (k, err)
    }

    fn inner_at(&self, y: f64) -> Result<InnerExponent> {
        if let Some(hit) = self.cache.borrow().get(&y.to_bits()) {
            return Ok(*hit);
        }
        let (k_spike, err, converged) = match &self.regime {
            Regime::Direct => {
                let q = self.k_direct(y);
                (q.value, q.error_estimate, q.converged)
            }
            Regime::Moments {
                j0,
                j2,
                err,
                converged,
            } => {
                let (k, e) = self.k_moments(y, *j0, *j2, *err);
                (k, e, *converged)
            }
            Regime::Asymptotic { i_half } => {
                let (k, e) = self.k_asymptotic(y, *i_half);
                (k, e, true)
            }
        };
        // A constant offset c on the phase maps the inner exponent exactly:
        // n̄ + K ↦ e^{−ic}(n̄ + K).
        let k = if self.phase_offset == 0.0 {
            k_spike
        } else {
            Complex64::from_polar(1.0, -self.phase_offset) * (self.nbar + k_spike) - self.nbar
        };
        let entry = InnerExponent {
            k,
            err,
            converged,
            degenerate: false,
        };
        check_exponent_bound(self.nbar, &entry, y)?;
        self.cache.borrow_mut().insert(y.to_bits(), entry);
        Ok(entry)
    }

    /// Overlap with the ideal phase-rotated target at rotation θ.
    pub fn evaluate(&self, theta: f64) -> Result<OverlapResult> {
        integrate_outer(
            &|y| self.f.intensity(y),
            self.f.support(),
            self.nbar,
            theta,
            &|y| self.inner_at(y),
        )
    }

    /// Evaluate K(y) through a forced regime, bypassing the |φ₀| dispatch.
    /// Used by the regime-handover consistency tests only.
    #[cfg(test)]
    fn k_via(&self, y: f64, which: &str) -> Complex64 {
        match which {
            "direct" => self.k_direct(y).value,
            "moments" => {
                let j0 = j_moment(self.phi0, 0).value;
                let j2 = j_moment(self.phi0, 2).value;
                self.k_moments(y, j0, j2, 0.0).0
            }
            "asymptotic" => self.k_asymptotic(y, i_half_asymptotic(self.phi0)).0,
            _ => unreachable!(),
        }
    }
}

/// One-shot evaluation; build a [`CopropagatingEngine`] directly for sweeps.
pub fn copropagating_overlap(
    alpha: &PulseProfile,
    f: &PulseProfile,
    chi_t: f64,
    eps: f64,
    theta: f64,
) -> Result<OverlapResult> {
    CopropagatingEngine::new(alpha, f, chi_t, eps, 0.0)?.evaluate(theta)
}
