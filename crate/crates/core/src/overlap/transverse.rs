//! Radial overlap engine for a transverse (beam-cross-section) interaction:
//! the pulses pass longitudinally through each other, every longitudinal
//! slice fully traverses the other pulse, and the accumulated phase depends
//! only on the transverse distance r between points,
//!
//!   φ(r) = φ₀ e^{−r²/4ε_T},   φ₀ = (χ/v)/(4πε_T).
//!
//! Both pulses are isotropic 2-D Gaussians about a common axis, so the
//! problem is radially symmetric: the inner exponent for a photon point at
//! radius ρ is
//!
//!   K_T(ρ) = ∫_0^∞ 4ε_T s (e^{−iφ₀e^{−s²}} − 1) Ā(ρ, 2√ε_T s) ds,
//!
//! with Ā(ρ, r) = ∫_0^{2π} |α|²(ρ + r e^{iψ}) dψ the angular average of the
//! coherent intensity over the circle of radius r (uniform trapezoid nodes —
//! spectrally exact for a periodic analytic integrand), and the outer
//! integral runs over 2πρ|f(ρ)|² dρ.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::{Geometry, PhaseField};
use crate::pulses::PulseProfile;
use crate::quad;

use super::spike::spike_phase_factor;
use super::{check_exponent_bound, integrate_outer, InnerExponent, OverlapResult, NORM_TOL};

/// Node count of the angular trapezoid rule.  For the Gaussian ring
/// integrands in scope the periodic trapezoid error is below 1e−20 already
/// at 64 nodes; 96 adds margin at negligible cost.
const ANGULAR_NODES: usize = 96;

/// Radial truncation of the spike variable: |e^{−iφ₀e^{−s²}} − 1| ≤
/// |φ₀|e^{−49} beyond s = 7, and the remaining envelope mass is ≤ n̄.
const S_MAX: f64 = 7.0;

pub struct TransverseEngine<'a> {
    alpha: &'a PulseProfile,
    f: &'a PulseProfile,
    nbar: f64,
    /// Peak phase φ₀ = (χ/v)/(4πε_T).
    phi0: f64,
    eps: f64,
    phase_offset: f64,
    center: f64,
    inner_tol: f64,
    cache: RefCell<HashMap<u64, InnerExponent>>,
}

impl<'a> TransverseEngine<'a> {
    pub fn new(
        alpha: &'a PulseProfile,
        f: &'a PulseProfile,
        field: &'a PhaseField,
    ) -> Result<Self> {
        if field.geometry() != Geometry::Transverse {
            return Err(Error::unsupported(
                "radial overlap engine requires a transverse phase field",
            ));
        }
        if alpha.dimension() != 2 || f.dimension() != 2 {
            return Err(Error::unsupported(
                "transverse overlap engine requires two-dimensional profiles",
            ));
        }
        let (ca, cf) = match (alpha.center(), f.center()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::unsupported(
                    "transverse overlap engine requires Gaussian profiles",
                ))
            }
        };
        if ca != cf {
            return Err(Error::unsupported(
                "transverse overlap engine requires concentric beams",
            ));
        }
        let photon_norm = f.mean_photon_number();
        if (photon_norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "photon profile must be unit-normalized (got ∫|f|² = {photon_norm})"
            )));
        }
        let nbar = alpha.mean_photon_number();
        let phi0 = field.kernel().evaluate(0.0)?;
        Ok(TransverseEngine {
            alpha,
            f,
            nbar,
            phi0,
            eps: field.kernel().epsilon(),
            phase_offset: field.phase_offset(),
            center: ca,
            inner_tol: 1e-12 * (1.0 + nbar),
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.nbar
    }

    /// Ā(ρ, r): coherent intensity integrated over the circle of radius `r`
    /// around a point at radius `ρ` from the beam axis.
    fn ring_average(&self, rho: f64, r: f64) -> f64 {
        let step = 2.0 * std::f64::consts::PI / ANGULAR_NODES as f64;
        let mut acc = 0.0;
        for j in 0..ANGULAR_NODES {
            let psi = step * j as f64;
            let x = self.center + rho + r * psi.cos();
            let y = self.center + r * psi.sin();
            acc += self.alpha.intensity_2d(x, y);
        }
        acc * step
    }

    fn inner_at(&self, rho: f64) -> Result<InnerExponent> {
        if let Some(hit) = self.cache.borrow().get(&rho.to_bits()) {
            return Ok(*hit);
        }
        let w = 2.0 * self.eps.sqrt();
        let q = quad::integrate_complex(
            |s| {
                4.0 * self.eps
                    * s
                    * spike_phase_factor(self.phi0, s)
                    * self.ring_average(rho, w * s)
            },
            0.0,
            S_MAX,
            &[],
            self.inner_tol,
        );
        let k = if self.phase_offset == 0.0 {
            q.value
        } else {
            // Constant offset c maps the inner exponent exactly:
            // n̄ + K ↦ e^{−ic}(n̄ + K).
            Complex64::from_polar(1.0, -self.phase_offset) * (self.nbar + q.value) - self.nbar
        };
        let entry = InnerExponent {
            k,
            err: q.error_estimate,
            converged: q.converged,
            degenerate: false,
        };
        check_exponent_bound(self.nbar, &entry, rho)?;
        self.cache.borrow_mut().insert(rho.to_bits(), entry);
        Ok(entry)
    }

    /// Overlap with the ideal phase-rotated target at rotation θ.
    pub fn evaluate(&self, theta: f64) -> Result<OverlapResult> {
        let (_, hi) = self.f.support();
        let rho_max = hi - self.center;
        integrate_outer(
            &|rho| {
                2.0 * std::f64::consts::PI
                    * rho
                    * self.f.intensity_2d(self.center + rho, self.center)
            },
            (0.0, rho_max),
            self.nbar,
            theta,
            &|rho| self.inner_at(rho),
        )
    }
}
