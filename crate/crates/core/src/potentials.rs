//! Two-body interaction kernels Δ(x−x′): exact contact form, Gaussian-
//! regularized contact, top-hat, and the transverse 2-D regularized contact.
//!
//! The Gaussian regularization follows Δ_ε(u) = χ (2√(πε))^(−1) exp(−u²/(4ε))
//! (variance 2ε), which integrates to χ and tends to χδ(u) as ε → 0.  The
//! transverse kind is a 2-D isotropic analogue, χ (4πε)^(−1) exp(−r²/(4ε));
//! its strength bundles the longitudinal pass-through factor, because an
//! exact 2-D contact produces an identically vanishing conditional phase and
//! is therefore only meaningful as a regularized limit.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Exact 1-D contact potential χδ(u); not pointwise-evaluable.
    Contact,
    /// Sharp Gaussian of variance 2ε integrating to χ.
    GaussianRegularized,
    /// Uniform density χ/(2r) on |u| ≤ r.
    TopHat,
    /// 2-D isotropic Gaussian-regularized contact of width parameter ε_T.
    TransverseContact,
}

/// Immutable kernel descriptor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionKernel {
    kind: KernelKind,
    /// Strength χ (for `TransverseContact` this is the bundled χ/v factor).
    chi: f64,
    /// Width parameter ε (Gaussian-regularized and transverse kinds).
    epsilon: f64,
    /// Half-range r (top-hat kind).
    range: f64,
}

impl InteractionKernel {
    pub fn contact(chi: f64) -> Result<Self> {
        require_real(chi)?;
        Ok(Self {
            kind: KernelKind::Contact,
            chi,
            epsilon: 0.0,
            range: 0.0,
        })
    }

    pub fn gaussian_regularized(chi: f64, epsilon: f64) -> Result<Self> {
        require_real(chi)?;
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::invalid(format!(
                "gaussian_regularized requires ε > 0, got {epsilon}"
            )));
        }
        Ok(Self {
            kind: KernelKind::GaussianRegularized,
            chi,
            epsilon,
            range: 0.0,
        })
    }

    pub fn top_hat(chi: f64, range: f64) -> Result<Self> {
        require_real(chi)?;
        if !(range > 0.0) || !range.is_finite() {
            return Err(Error::invalid(format!(
                "top_hat requires range > 0, got {range}"
            )));
        }
        Ok(Self {
            kind: KernelKind::TopHat,
            chi,
            epsilon: 0.0,
            range,
        })
    }

    /// 2-D regularized contact; `chi` here is the product of the interaction
    /// strength with the longitudinal pass-through factor 1/v.
    pub fn transverse_contact(chi: f64, epsilon_t: f64) -> Result<Self> {
        require_real(chi)?;
        if !(epsilon_t > 0.0) || !epsilon_t.is_finite() {
            return Err(Error::invalid(format!(
                "transverse_contact requires ε_T > 0, got {epsilon_t}"
            )));
        }
        Ok(Self {
            kind: KernelKind::TransverseContact,
            chi,
            epsilon: epsilon_t,
            range: 0.0,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    /// Pointwise kernel value at separation `u` (radial distance for the
    /// transverse kind).  The exact contact kind has no pointwise value;
    /// callers must use [`InteractionKernel::integrated`] instead.
    pub fn evaluate(&self, u: f64) -> Result<f64> {
        match self.kind {
            KernelKind::Contact => Err(Error::unsupported(
                "pointwise evaluation of the exact contact kernel; use integrated forms"
                    .to_string(),
            )),
            KernelKind::GaussianRegularized => {
                let s = 2.0 * (std::f64::consts::PI * self.epsilon).sqrt();
                Ok(self.chi / s * (-u * u / (4.0 * self.epsilon)).exp())
            }
            KernelKind::TopHat => Ok(if u.abs() <= self.range {
                self.chi / (2.0 * self.range)
            } else {
                0.0
            }),
            KernelKind::TransverseContact => {
                Ok(self.chi / (4.0 * std::f64::consts::PI * self.epsilon)
                    * (-u * u / (4.0 * self.epsilon)).exp())
            }
        }
    }

    /// ∫ₐᵇ Δ(u) du together with a boundary-degeneracy flag.
    ///
    /// Contact convention: if the delta sits exactly on `a` or `b` (and the
    /// interval is non-degenerate) half of χ is counted and the flag is set;
    /// this symmetric Riemann convention preserves interval additivity.
    pub fn integrated(&self, a: f64, b: f64) -> Result<(f64, bool)> {
        if !(a <= b) {
            return Err(Error::invalid(format!(
                "integrated kernel requires a ≤ b, got ({a}, {b})"
            )));
        }
        match self.kind {
            KernelKind::Contact => {
                if a == b {
                    return Ok((0.0, a == 0.0));
                }
                if a < 0.0 && b > 0.0 {
                    Ok((self.chi, false))
                } else if a == 0.0 || b == 0.0 {
                    Ok((0.5 * self.chi, true))
                } else {
                    Ok((0.0, false))
                }
            }
            KernelKind::GaussianRegularized => {
                let s = 2.0 * self.epsilon.sqrt();
                Ok((
                    0.5 * self.chi * (libm::erf(b / s) - libm::erf(a / s)),
                    false,
                ))
            }
            KernelKind::TopHat => {
                let lo = a.max(-self.range);
                let hi = b.min(self.range);
                Ok((self.chi / (2.0 * self.range) * (hi - lo).max(0.0), false))
            }
            KernelKind::TransverseContact => Err(Error::unsupported(
                "the transverse 2-D kernel has no 1-D primitive; evaluate it radially"
                    .to_string(),
            )),
        }
    }
}

fn require_real(chi: f64) -> Result<()> {
    if !chi.is_finite() {
        return Err(Error::invalid(format!("kernel strength must be finite, got {chi}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn contact_delta_inside_interval() {
        let k = InteractionKernel::contact(0.5).unwrap();
        assert_eq!(k.integrated(-1.0, 1.0).unwrap(), (0.5, false));
    }

    #[test]
    fn contact_delta_outside_interval() {
        let k = InteractionKernel::contact(0.5).unwrap();
        assert_eq!(k.integrated(1.0, 2.0).unwrap(), (0.0, false));
    }

    #[test]
    fn contact_boundary_half_count() {
        let k = InteractionKernel::contact(1.0).unwrap();
        assert_eq!(k.integrated(0.0, 2.0).unwrap(), (0.5, true));
        assert_eq!(k.integrated(-3.0, 0.0).unwrap(), (0.5, true));
    }

    #[test]
    fn contact_pointwise_evaluation_is_unsupported() {
        let k = InteractionKernel::contact(1.0).unwrap();
        assert!(matches!(k.evaluate(0.0), Err(Error::UnsupportedOperation(_))));
    }

    #[test]
    fn gaussian_integrated_over_unit_interval() {
        let k = InteractionKernel::gaussian_regularized(1.0, 0.01).unwrap();
        let (v, flag) = k.integrated(-1.0, 1.0).unwrap();
        assert!(!flag);
        // erf(5)
        assert_abs_diff_eq!(v, 0.9999999999984625, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_peak_value_at_extreme_regularization() {
        let k = InteractionKernel::gaussian_regularized(1.0, 1e-20).unwrap();
        let v = k.evaluate(0.0).unwrap();
        assert!((v - 2.8209479177387814e9).abs() / v < 1e-12);
    }

    #[test]
    fn gaussian_integrated_matches_quadrature_of_pointwise_values() {
        let k = InteractionKernel::gaussian_regularized(0.7, 0.01).unwrap();
        let (a, b) = (-0.35, 0.6);
        let q = quad::integrate_real(|u| k.evaluate(u).unwrap(), a, b, &[], 1e-12);
        assert_abs_diff_eq!(k.integrated(a, b).unwrap().0, q.value.re, epsilon = 1e-10);
    }

    #[test]
    fn regularized_kinds_integrate_to_chi() {
        for k in [
            InteractionKernel::gaussian_regularized(0.37, 0.01).unwrap(),
            InteractionKernel::gaussian_regularized(0.37, 1e-6).unwrap(),
            InteractionKernel::top_hat(0.37, 2.5).unwrap(),
        ] {
            let span = 12.0 * (k.epsilon().sqrt() + k.range() + 1.0);
            let (v, _) = k.integrated(-span, span).unwrap();
            assert!((v - 0.37).abs() / 0.37 < 1e-10, "total mass {v}");
        }
    }

    #[test]
    fn top_hat_outside_range_is_zero() {
        let k = InteractionKernel::top_hat(1.0, 1.0).unwrap();
        assert_eq!(k.evaluate(2.0).unwrap(), 0.0);
        assert_eq!(k.integrated(1.5, 3.0).unwrap().0, 0.0);
    }

    #[test]
    fn top_hat_partial_overlap() {
        let k = InteractionKernel::top_hat(2.0, 1.0).unwrap();
        // [0.5, 3] ∩ [−1, 1] has length 0.5; density is χ/(2r) = 1.
        assert_abs_diff_eq!(k.integrated(0.5, 3.0).unwrap().0, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn contact_limit_of_gaussian_regularization() {
        let (a, b) = (-0.3, 0.5);
        let contact = InteractionKernel::contact(1.0).unwrap().integrated(a, b).unwrap().0;
        let mut prev_err = f64::INFINITY;
        for eps in [1e-4, 1e-6, 1e-8] {
            let k = InteractionKernel::gaussian_regularized(1.0, eps).unwrap();
            let err = (k.integrated(a, b).unwrap().0 - contact).abs();
            let bound = libm::erfc(a.abs().min(b.abs()) / (2.0 * eps.sqrt()));
            assert!(err < prev_err || err == 0.0, "error not decreasing: {err} vs {prev_err}");
            assert!(err <= bound, "error {err} exceeds erfc bound {bound}");
            prev_err = err;
        }
    }

    #[test]
    fn transverse_kernel_has_no_1d_primitive() {
        let k = InteractionKernel::transverse_contact(0.01, 0.1).unwrap();
        assert!(matches!(k.integrated(-1.0, 1.0), Err(Error::UnsupportedOperation(_))));
    }

    #[test]
    fn transverse_radial_mass_is_chi() {
        let k = InteractionKernel::transverse_contact(0.42, 0.03).unwrap();
        let q = quad::integrate_real(
            |r| 2.0 * std::f64::consts::PI * r * k.evaluate(r).unwrap(),
            0.0,
            12.0 * 0.03f64.sqrt(),
            &[],
            1e-13,
        );
        assert_abs_diff_eq!(q.value.re, 0.42, epsilon = 1e-10);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(InteractionKernel::gaussian_regularized(1.0, 0.0).is_err());
        assert!(InteractionKernel::top_hat(1.0, -1.0).is_err());
        assert!(InteractionKernel::transverse_contact(1.0, f64::NAN).is_err());
        assert!(InteractionKernel::contact(f64::INFINITY).is_err());
        let k = InteractionKernel::contact(1.0).unwrap();
        assert!(k.integrated(1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn gaussian_kernel_is_even(u in -3.0..3.0f64) {
            let k = InteractionKernel::gaussian_regularized(1.3, 0.05).unwrap();
            prop_assert_eq!(k.evaluate(u).unwrap(), k.evaluate(-u).unwrap());
        }

        #[test]
        fn integrated_kernel_is_additive(
            mut pts in proptest::collection::vec(-2.0..2.0f64, 3),
            zero_mid in proptest::bool::ANY,
        ) {
            pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
            let (a, mut b, c) = (pts[0], pts[1], pts[2]);
            if zero_mid && a < 0.0 && c > 0.0 {
                b = 0.0; // exercise the half-count convention
            }
            for k in [
                InteractionKernel::contact(0.9).unwrap(),
                InteractionKernel::gaussian_regularized(0.9, 0.02).unwrap(),
                InteractionKernel::top_hat(0.9, 0.7).unwrap(),
            ] {
                let whole = k.integrated(a, c).unwrap().0;
                let parts = k.integrated(a, b).unwrap().0 + k.integrated(b, c).unwrap().0;
                prop_assert!((whole - parts).abs() < 1e-12, "{whole} vs {parts}");
            }
        }
    }
}
