//! Generic nested-quadrature engine for the coherent-pulse × single-photon
//! overlap with an arbitrary longitudinal phase field.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::{Geometry, PhaseField};
use crate::potentials::KernelKind;
use crate::pulses::PulseProfile;
use crate::quad;

use super::{check_exponent_bound, integrate_outer, InnerExponent, OverlapResult, NORM_TOL};

/// θ-sweepable overlap engine.  The θ-independent inner integrals K(y) are
/// cached per outer quadrature node, so a fidelity curve or a conditional-
/// phase search costs little more than a single evaluation.
pub struct CoherentEngine<'a> {
    alpha: &'a PulseProfile,
    f: &'a PulseProfile,
    field: &'a PhaseField,
    nbar: f64,
    inner_tol: f64,
    cache: RefCell<HashMap<u64, InnerExponent>>,
}

impl<'a> CoherentEngine<'a> {
    pub fn new(
        alpha: &'a PulseProfile,
        f: &'a PulseProfile,
        field: &'a PhaseField,
    ) -> Result<Self> {
        if alpha.dimension() != 1 || f.dimension() != 1 {
            return Err(Error::unsupported(
                "longitudinal overlap engine requires one-dimensional profiles",
            ));
        }
        if field.geometry() != Geometry::Longitudinal {
            return Err(Error::unsupported(
                "transverse phase fields need the radial overlap engine",
            ));
        }
        if field.relative_velocity() == 0.0 && field.kernel().kind() == KernelKind::Contact {
            return Err(Error::unsupported(
                "contact kernel with zero relative velocity; regularize the kernel \
                 and use the co-propagating spike engine",
            ));
        }
        let photon_norm = f.mean_photon_number();
        if (photon_norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "photon profile must be unit-normalized (got ∫|f|² = {photon_norm})"
            )));
        }
        let nbar = alpha.mean_photon_number();
        if !nbar.is_finite() {
            return Err(Error::invalid("coherent profile has non-finite photon number"));
        }
        Ok(CoherentEngine {
            alpha,
            f,
            field,
            nbar,
            // K scales with n̄, so its tolerance is relative to the pulse
            // strength; the resulting absolute error on the overlap value
            // stays near this level because |∂ exp(z)/∂z| ≤ 1 in Re z ≤ 0.
            inner_tol: 1e-12 * (1.0 + nbar),
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.nbar
    }

    fn inner_at(&self, y: f64) -> Result<InnerExponent> {
        if let Some(hit) = self.cache.borrow().get(&y.to_bits()) {
            return Ok(*hit);
        }
        let (lo, hi) = self.alpha.support();
        let breaks = self.field.phase_breakpoints(y);
        let degenerate = Cell::new(false);
        let poison: RefCell<Option<Error>> = RefCell::new(None);
        let q = quad::integrate_complex(
            |x| {
                let weight = self.alpha.intensity(x);
                if weight == 0.0 || poison.borrow().is_some() {
                    return Complex64::new(0.0, 0.0);
                }
                match self.field.phi_checked(x, y) {
                    Ok((phi, deg)) => {
                        if deg {
                            degenerate.set(true);
                        }
                        weight * (Complex64::new(0.0, -phi).exp() - 1.0)
                    }
                    Err(e) => {
                        *poison.borrow_mut() = Some(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
            lo,
            hi,
            &breaks,
            self.inner_tol,
        );
        if let Some(e) = poison.into_inner() {
            return Err(e);
        }
        let entry = InnerExponent {
            k: q.value,
            err: q.error_estimate,
            converged: q.converged,
            degenerate: degenerate.get(),
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
}

/// One-shot evaluation; build a [`CoherentEngine`] directly for θ-sweeps.
pub fn coherent_photon_overlap(
    alpha: &PulseProfile,
    f: &PulseProfile,
    field: &PhaseField,
    theta: f64,
) -> Result<OverlapResult> {
    CoherentEngine::new(alpha, f, field)?.evaluate(theta)
}
