//! Building blocks for the co-propagating spike kernel.
//!
//! With φ(z,z′) = χt·g_ε(z−z′) and the substitution u = (z−z′)/(2√ε), every
//! inner integral reduces to moments of w(u) = e^{−iφ₀ exp(−u²)} − 1 with
//! peak phase φ₀ = χt/(2√(πε)).  Three evaluation regimes cover ε down to
//! 10⁻²⁰ and beyond:
//!
//! * |φ₀| ≤ 50 — the envelope varies across the spike; integrate w(u)
//!   against the envelope directly (few oscillations, plain quadrature).
//! * 50 < |φ₀| ≤ 8000 — the spike is far narrower than any envelope scale;
//!   factor the envelope out as A(y) + ½A″(y)(2√ε u)² and use the u-moments
//!   J₀, J₂ of w, still computable by dense quadrature.
//! * |φ₀| > 8000 — J₀ by asymptotics: split the half-line at u_Λ where the
//!   phase has decayed to Λ; the oscillatory inner part is a stationary-phase
//!   half-Fresnel plus an integration-by-parts boundary term at u_Λ, and the
//!   outer part (≤ Λ/2π oscillations) is integrated numerically.  The J₂
//!   correction carries an extra factor ε and is dropped (≲ 1e−16 of K for
//!   every reachable parameter set).
//!
//! Negative φ₀ is handled by conjugation symmetry w(u; −φ₀) = conj w(u; φ₀).

use num_complex::Complex64;

use crate::quad;

/// Upper |φ₀| bound of the direct (envelope-resolving) regime.
pub(crate) const DIRECT_MAX_PHI0: f64 = 50.0;

/// Upper |φ₀| bound of the moment regime (dense quadrature of J₀, J₂).
pub(crate) const MOMENT_MAX_PHI0: f64 = 8000.0;

/// Phase level Λ at which the asymptotic split is placed.
const LAMBDA: f64 = 200.0;

/// Truncation of the u-integrals: |w(u)| ≤ |φ₀| e^{−u²} < 2e−9 |φ₀|·e^{−28}
/// beyond |u| = 6 for the regimes that use it.
pub(crate) const U_MAX: f64 = 6.0;

/// Absolute accuracy of the asymptotic half-line integral (measured against
/// brute-force resolution of the oscillations): ≈ 3.6e−5 right at the
/// φ₀ = 8000 handover, decaying to ≈ 6e−6 by φ₀ = 10⁵ with Λ = 200.
pub(crate) const ASYMPTOTIC_RESIDUAL: f64 = 8e-5;

/// w(u) = e^{−iφ₀ exp(−u²)} − 1, evaluated stably for tiny phases.
#[inline]
pub(crate) fn spike_phase_factor(phi0: f64, u: f64) -> Complex64 {
    let g = phi0 * (-u * u).exp();
    // e^{−ig} − 1 = −2 sin²(g/2) − i sin g  (no cancellation at small g).
    let s = (0.5 * g).sin();
    Complex64::new(-2.0 * s * s, -g.sin())
}

/// J_m(φ₀) = ∫_{−U_MAX}^{U_MAX} uᵐ w(u) du for even m, by dense quadrature.
/// Valid (converges under the panel cap) for |φ₀| ≤ [`MOMENT_MAX_PHI0`].
pub(crate) fn j_moment(phi0: f64, m: u32) -> quad::Quadrature {
    if phi0 < 0.0 {
        let mut q = j_moment(-phi0, m);
        q.value = q.value.conj();
        return q;
    }
    quad::integrate_complex(
        |u| u.powi(m as i32) * spike_phase_factor(phi0, u),
        -U_MAX,
        U_MAX,
        &[0.0],
        1e-12,
    )
}

/// Asymptotic evaluation of I(φ₀) = ∫_0^∞ w(u) du for large φ₀ (> Λ e).
///
/// I = −u_Λ + F + B_Λ + S with u_Λ = √ln(φ₀/Λ) and
///   F   = ½√(π/φ₀) e^{i(π/4 − φ₀)} − (3√π/16) e^{i(5π/4 − φ₀)} i / φ₀
///         (stationary-phase contribution of the peak, two orders),
///   B_Λ = −i e^{−iΛ} / (2 u_Λ Λ)  (boundary term of the oscillatory part),
///   S   = ∫_{u_Λ}^{12} w(u) du    (≤ Λ/2π oscillations; plain quadrature).
pub(crate) fn i_half_asymptotic(phi0: f64) -> Complex64 {
    if phi0 < 0.0 {
        return i_half_asymptotic(-phi0).conj();
    }
    debug_assert!(phi0 > LAMBDA * std::f64::consts::E);
    let u_lam = (phi0 / LAMBDA).ln().sqrt();
    let pi = std::f64::consts::PI;
    let fresnel = 0.5 * (pi / phi0).sqrt() * Complex64::new(0.0, 0.25 * pi - phi0).exp()
        - Complex64::new(0.0, 1.0) * (3.0 * pi.sqrt() / 16.0) / phi0
            * Complex64::new(0.0, 1.25 * pi - phi0).exp();
    let boundary =
        -Complex64::new(0.0, 1.0) * Complex64::new(0.0, -LAMBDA).exp() / (2.0 * u_lam * LAMBDA);
    let tail = quad::integrate_complex(
        |u| spike_phase_factor(phi0, u),
        u_lam,
        12.0,
        &[],
        1e-12,
    );
    -u_lam + fresnel + boundary + tail.value
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Brute-force I(φ₀) = ∫_0^∞ w(u) du resolving every oscillation
    /// (composite Simpson with ≥ 4 samples per radian of peak phase slope).
    fn i_half_brute(phi0: f64) -> Complex64 {
        let h = 0.25 / (0.858 * phi0);
        let mut n = (6.0 / h).ceil() as usize;
        if n % 2 == 1 {
            n += 1;
        }
        let step = 6.0 / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * spike_phase_factor(phi0, i as f64 * step);
        }
        acc * step / 3.0
    }

    #[test]
    fn small_phase_moments_match_series() {
        // Im J₀ = −φ₀√π + (φ₀³/6)√(π/3) + O(φ₀⁵),
        // Re J₀ = −(φ₀²/2)√(π/2) + O(φ₀⁴) for small φ₀.
        let phi0 = 1e-3;
        let j0 = j_moment(phi0, 0).value;
        let pi = std::f64::consts::PI;
        let im = -phi0 * pi.sqrt() + phi0.powi(3) / 6.0 * (pi / 3.0).sqrt();
        assert_abs_diff_eq!(j0.im, im, epsilon = 1e-12);
        assert_abs_diff_eq!(j0.re, -0.5 * phi0 * phi0 * (pi / 2.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn moment_regime_converges_at_its_upper_bound() {
        let q = j_moment(MOMENT_MAX_PHI0, 0);
        assert!(q.converged, "J₀ quadrature capped at φ₀ = 8000");
        let brute = 2.0 * i_half_brute(MOMENT_MAX_PHI0);
        assert!((q.value - brute).norm() < 1e-9, "J₀ vs brute: {:?} vs {:?}", q.value, brute);
    }

    #[test]
    fn asymptotic_matches_brute_force_at_1e5() {
        let a = i_half_asymptotic(1e5);
        let b = i_half_brute(1e5);
        assert!(
            (a - b).norm() < 2e-5,
            "asymptotic {a:?} vs brute {b:?}"
        );
    }

    #[test]
    fn asymptotic_matches_moment_quadrature_at_handover() {
        let a = 2.0 * i_half_asymptotic(MOMENT_MAX_PHI0);
        let q = j_moment(MOMENT_MAX_PHI0, 0).value;
        assert!(
            (a - q).norm() < 2.0 * ASYMPTOTIC_RESIDUAL,
            "handover mismatch: {a:?} vs {q:?}"
        );
    }

    #[test]
    fn negative_phase_is_conjugate() {
        let p = j_moment(7.0, 0).value;
        let n = j_moment(-7.0, 0).value;
        assert_abs_diff_eq!(p.re, n.re, epsilon = 1e-14);
        assert_abs_diff_eq!(p.im, -n.im, epsilon = 1e-14);
        let pa = i_half_asymptotic(1e5);
        let na = i_half_asymptotic(-1e5);
        assert_abs_diff_eq!(pa.re, na.re, epsilon = 1e-14);
        assert_abs_diff_eq!(pa.im, -na.im, epsilon = 1e-14);
    }

    #[test]
    fn stable_phase_factor_at_tiny_argument() {
        let w = spike_phase_factor(1e-9, 0.0);
        assert_abs_diff_eq!(w.im, -1e-9, epsilon = 1e-22);
        assert_abs_diff_eq!(w.re, -0.5e-18, epsilon = 1e-30);
    }
}
