//! Accumulated interaction phase φ(x, y) between a point x of pulse 1 and a
//! point y of pulse 2, plus the pass-through diagnostic.
//!
//! For longitudinal geometry with relative velocity v = v₁−v₂ ≠ 0 the time
//! integral of the kernel along the sweep reduces exactly to the kernel
//! primitive over [x−y, x−y+vt] divided by |v|; for v = 0 the phase is
//! t·Δ(x−y), which requires a regularized kernel.  Transverse geometry keeps
//! only the 2-D regularized contact evaluated at the transverse distance
//! (its strength already bundles the longitudinal pass-through factor).
//! An optional constant `phase_offset` is added to every φ value; it exists
//! to exercise the exact phase-shift covariance of the overlap integrals.

use crate::error::{Error, Result};
use crate::potentials::{InteractionKernel, KernelKind};
use crate::pulses::PulseProfile;
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Longitudinal,
    Transverse,
}

/// Immutable description of the interaction geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseField {
    kernel: InteractionKernel,
    v1: f64,
    v2: f64,
    t: f64,
    geometry: Geometry,
    phase_offset: f64,
}

impl PhaseField {
    /// 1-D geometry: group velocities v₁, v₂ and elapsed interaction time t.
    pub fn longitudinal(kernel: InteractionKernel, v1: f64, v2: f64, t: f64) -> Result<Self> {
        if kernel.kind() == KernelKind::TransverseContact {
            return Err(Error::invalid(
                "longitudinal geometry requires a 1-D kernel".to_string(),
            ));
        }
        if !v1.is_finite() || !v2.is_finite() || !(t >= 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!(
                "longitudinal field requires finite velocities and t ≥ 0 (got v1={v1}, v2={v2}, t={t})"
            )));
        }
        Ok(Self {
            kernel,
            v1,
            v2,
            t,
            geometry: Geometry::Longitudinal,
            phase_offset: 0.0,
        })
    }

    /// Transverse geometry; pass-through along the propagation axis is
    /// already assumed complete and folded into the kernel strength.
    pub fn transverse(kernel: InteractionKernel) -> Result<Self> {
        if kernel.kind() != KernelKind::TransverseContact {
            return Err(Error::invalid(
                "transverse geometry requires the transverse_contact kernel".to_string(),
            ));
        }
        Ok(Self {
            kernel,
            v1: 0.0,
            v2: 0.0,
            t: 0.0,
            geometry: Geometry::Transverse,
            phase_offset: 0.0,
        })
    }

    /// Add a constant to every phase value.
    pub fn with_phase_offset(mut self, c: f64) -> Self {
        self.phase_offset += c;
        self
    }

    pub fn kernel(&self) -> &InteractionKernel {
        &self.kernel
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn phase_offset(&self) -> f64 {
        self.phase_offset
    }

    pub fn elapsed_time(&self) -> f64 {
        self.t
    }

    /// Relative velocity v = v₁ − v₂ (longitudinal geometry).
    pub fn relative_velocity(&self) -> f64 {
        self.v1 - self.v2
    }

    /// φ(x, y) for longitudinal geometry, with the boundary-degeneracy flag
    /// from the kernel primitive (a contact delta sitting exactly on the
    /// swept-interval edge).
    pub fn phi_checked(&self, x: f64, y: f64) -> Result<(f64, bool)> {
        if self.geometry != Geometry::Longitudinal {
            return Err(Error::unsupported(
                "phi(x, y) with scalar points applies to longitudinal geometry; use phi_transverse".to_string(),
            ));
        }
        let v = self.relative_velocity();
        let u = x - y;
        if v == 0.0 {
            let density = self.kernel.evaluate(u).map_err(|_| {
                Error::unsupported(
                    "v = 0 with the exact contact kernel: use the co-propagating overlap path \
                     or a regularized kernel"
                        .to_string(),
                )
            })?;
            return Ok((self.t * density + self.phase_offset, false));
        }
        let shifted = u + v * self.t;
        let (lo, hi) = if shifted >= u { (u, shifted) } else { (shifted, u) };
        let (mass, degenerate) = self.kernel.integrated(lo, hi)?;
        Ok((mass / v.abs() + self.phase_offset, degenerate))
    }

    /// φ(x, y) for longitudinal geometry.
    pub fn phi(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.phi_checked(x, y)?.0)
    }

    /// φ for transverse geometry as a function of the transverse distance.
    pub fn phi_transverse(&self, r: f64) -> Result<f64> {
        if self.geometry != Geometry::Transverse {
            return Err(Error::unsupported(
                "phi_transverse applies to transverse geometry only".to_string(),
            ));
        }
        Ok(self.kernel.evaluate(r)? + self.phase_offset)
    }

    /// φ for transverse geometry between two 2-D points.
    pub fn phi_2d(&self, x: (f64, f64), y: (f64, f64)) -> Result<f64> {
        let (dx, dy) = (x.0 - y.0, x.1 - y.1);
        self.phi_transverse((dx * dx + dy * dy).sqrt())
    }

    /// Constant plateau value χ/|v| (+ offset) reached by a full contact-limit
    /// traversal; defined for longitudinal geometry with v ≠ 0.
    pub fn plateau_phase(&self) -> Result<f64> {
        let v = self.relative_velocity();
        if self.geometry != Geometry::Longitudinal || v == 0.0 {
            return Err(Error::unsupported(
                "the χ/|v| plateau exists for longitudinal geometry with v ≠ 0".to_string(),
            ));
        }
        Ok(self.kernel.chi() / v.abs() + self.phase_offset)
    }

    /// x-positions (for fixed y) where φ(·, y) is discontinuous or has a
    /// steep internal layer; used to split quadrature segments.
    pub(crate) fn phase_breakpoints(&self, y: f64) -> Vec<f64> {
        if self.geometry != Geometry::Longitudinal {
            return Vec::new();
        }
        let v = self.relative_velocity();
        match self.kernel.kind() {
            KernelKind::Contact | KernelKind::GaussianRegularized => {
                if v == 0.0 {
                    vec![y]
                } else {
                    vec![y, y - v * self.t]
                }
            }
            KernelKind::TopHat => {
                let r = self.kernel.range();
                if v == 0.0 {
                    vec![y - r, y + r]
                } else {
                    vec![y - r, y + r, y - v * self.t - r, y - v * self.t + r]
                }
            }
            KernelKind::TransverseContact => Vec::new(),
        }
    }

    /// Probability mass of the joint density |α(z)|²|f(z′)|²/n̄ over the
    /// region where the contact-limit phase attains its plateau χ/|v|
    /// (z−z′ strictly inside the swept interval).  The same swept-interval
    /// geometry is used for every 1-D kernel kind; transverse geometry
    /// returns 1 because its longitudinal traversal is assumed complete.
    pub fn pass_through_fraction(&self, alpha: &PulseProfile, f: &PulseProfile) -> Result<f64> {
        if self.geometry == Geometry::Transverse {
            return Ok(1.0);
        }
        let v = self.relative_velocity();
        if v == 0.0 {
            return Err(Error::invalid(
                "pass_through_fraction requires v ≠ 0".to_string(),
            ));
        }
        if self.t == 0.0 {
            return Ok(0.0);
        }
        let nbar = alpha.mean_photon_number();
        if nbar == 0.0 {
            return Ok(1.0); // vacuum envelope: vacuously complete traversal
        }
        let (alo, ahi) = alpha.support();
        let (flo, fhi) = f.support();
        // For v>0 the plateau needs z−z′ ∈ (−vt, 0); for v<0, (0, |v|t).
        let (rel_lo, rel_hi) = if v > 0.0 {
            (-v * self.t, 0.0)
        } else {
            (0.0, -v * self.t)
        };
        let outer = quad::integrate_real(
            |zp| {
                let lo = (zp + rel_lo).max(alo);
                let hi = (zp + rel_hi).min(ahi);
                if lo >= hi {
                    return 0.0;
                }
                let inner = quad::integrate_real(|z| alpha.intensity(z), lo, hi, &[], 1e-12);
                f.intensity(zp) * inner.value.re
            },
            flo,
            fhi,
            &[],
            1e-11,
        );
        Ok((outer.value.re / nbar).clamp(0.0, 1.0))
    }
}
