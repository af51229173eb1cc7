//! Conditional-phase extraction: θ_c = argmax_θ F(θ) over [−π, π) by a
//! coarse equispaced scan followed by golden-section refinement (wrapping
//! across ±π, treating F as 2π-periodic, which every overlap engine is).

use crate::error::{Error, Result};

/// Default number of coarse-scan points; the fidelity features in scope are
/// O(10⁻²) rad wide, which 256 points cannot miss.
pub const DEFAULT_COARSE_POINTS: usize = 256;

/// Default refinement tolerance on the bracket width, in radians.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Spread below which the coarse scan is declared flat.
const FLATNESS_SPREAD: f64 = 1e-14;

/// Inverse golden ratio (the section kept per refinement step).
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy)]
pub struct CondPhaseResult {
    /// Argmax of the fidelity, reported at the final bracket midpoint,
    /// wrapped into [−π, π).
    pub theta_c: f64,
    /// Largest fidelity seen during the search.
    pub f_max: f64,
    /// Width of the final refinement bracket (0 for a flat function).
    pub bracket_width: f64,
    /// Number of fidelity evaluations performed.
    pub evaluations: usize,
    /// The fidelity was constant over the coarse grid (spread < 1e−14);
    /// θ_c = 0 by convention in that case.
    pub flat: bool,
}

/// Wrap a phase into [−π, π).
pub fn wrap_phase(theta: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let wrapped = (theta + std::f64::consts::PI).rem_euclid(tau) - std::f64::consts::PI;
    // rem_euclid can return exactly τ when the argument is a tiny negative
    // number, which would map to +π; fold that back.
    if wrapped >= std::f64::consts::PI {
        wrapped - tau
    } else {
        wrapped
    }
}

/// Maximize a fidelity function over [−π, π).
///
/// `evaluate_f` is called at coarse-grid points first (ties broken toward
/// the smallest |θ|), then inside a shrinking golden-section bracket around
/// the best coarse point until the bracket is no wider than `tol`.
pub fn conditional_phase<F>(
    mut evaluate_f: F,
    coarse_points: usize,
    tol: f64,
) -> Result<CondPhaseResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if coarse_points < 8 {
        return Err(Error::invalid(format!(
            "coarse scan needs at least 8 points (got {coarse_points})"
        )));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::invalid(format!(
            "refinement tolerance must be positive and finite (got {tol})"
        )));
    }
    let mut evaluations = 0usize;
    let mut eval = |theta: f64| -> Result<f64> {
        evaluations += 1;
        evaluate_f(wrap_phase(theta))
    };

    let step = 2.0 * std::f64::consts::PI / coarse_points as f64;
    let mut best_theta = 0.0f64;
    let mut best_f = f64::NEG_INFINITY;
    let mut coarse_min = f64::INFINITY;
    for i in 0..coarse_points {
        let theta = -std::f64::consts::PI + step * i as f64;
        let f = eval(theta)?;
        coarse_min = coarse_min.min(f);
        if f > best_f || (f == best_f && theta.abs() < best_theta.abs()) {
            best_f = f;
            best_theta = theta;
        }
    }
    if best_f - coarse_min < FLATNESS_SPREAD {
        return Ok(CondPhaseResult {
            theta_c: 0.0,
            f_max: best_f,
            bracket_width: 0.0,
            evaluations,
            flat: true,
        });
    }

    // Golden-section maximization on the unwrapped bracket around the best
    // coarse point; evaluations wrap, so crossing ±π is transparent.
    let mut a = best_theta - step;
    let mut b = best_theta + step;
    let mut f_max = best_f;
    let mut x1 = b - (b - a) * INV_PHI;
    let mut x2 = a + (b - a) * INV_PHI;
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > tol {
        f_max = f_max.max(f1).max(f2);
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * INV_PHI;
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * INV_PHI;
            f2 = eval(x2)?;
        }
    }
    f_max = f_max.max(f1).max(f2);
    Ok(CondPhaseResult {
        theta_c: wrap_phase(0.5 * (a + b)),
        f_max,
        bracket_width: b - a,
        evaluations,
        flat: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn stub(center: f64) -> impl Fn(f64) -> Result<f64> {
        move |theta: f64| Ok(((theta - center).cos() - 1.0).exp())
    }

    #[test]
    fn analytic_stub_peak_is_recovered() {
        let r = conditional_phase(stub(0.3), DEFAULT_COARSE_POINTS, DEFAULT_TOL).unwrap();
        assert!(!r.flat);
        assert_abs_diff_eq!(r.theta_c, 0.3, epsilon = DEFAULT_TOL);
        assert!(r.bracket_width <= DEFAULT_TOL);
        assert!((r.f_max - 1.0).abs() < 1e-10);
        assert!(r.evaluations >= DEFAULT_COARSE_POINTS);
    }

    #[test]
    fn argmax_covariance_under_phase_shift() {
        let base = conditional_phase(stub(0.3), 256, 1e-7).unwrap();
        let shifted =
            conditional_phase(|t| (stub(0.3))(t - 0.5), 256, 1e-7).unwrap();
        let delta = wrap_phase(shifted.theta_c - base.theta_c);
        assert!((delta - 0.5).abs() <= 2e-7, "shift = {delta}");
        assert!((shifted.f_max - base.f_max).abs() < 1e-12);
    }

    #[test]
    fn wrapping_bracket_crosses_pi() {
        let peak = std::f64::consts::PI - 0.01;
        let r = conditional_phase(stub(peak), 256, 1e-8).unwrap();
        assert_abs_diff_eq!(r.theta_c, peak, epsilon = 1e-7);
        assert!(r.theta_c < std::f64::consts::PI);
    }

    #[test]
    fn flat_function_returns_zero_with_flag() {
        let r = conditional_phase(|_| Ok(0.42), 64, 1e-6).unwrap();
        assert!(r.flat);
        assert_eq!(r.theta_c, 0.0);
        assert_eq!(r.f_max, 0.42);
        assert_eq!(r.bracket_width, 0.0);
    }

    #[test]
    fn equal_maxima_tie_breaks_toward_zero() {
        // cos(2θ) peaks at both θ = 0 and θ = ±π, with the coarse grid
        // hitting both exactly; the tie must resolve to the origin.
        let r = conditional_phase(
            |t| Ok(((2.0 * t).cos() - 1.0).exp()),
            256,
            1e-6,
        )
        .unwrap();
        assert!(r.theta_c.abs() < 1e-6, "θ_c = {}", r.theta_c);
    }

    #[test]
    fn halving_tolerance_barely_moves_the_answer() {
        let coarse = conditional_phase(stub(-1.234), 256, 1e-4).unwrap();
        let fine = conditional_phase(stub(-1.234), 256, 5e-5).unwrap();
        assert!((coarse.theta_c - fine.theta_c).abs() < 1e-4);
        assert!(fine.f_max >= coarse.f_max - 1e-13);
    }

    #[test]
    fn rejects_bad_parameters_and_propagates_failures() {
        assert!(conditional_phase(|_| Ok(1.0), 4, 1e-6).is_err());
        assert!(conditional_phase(|_| Ok(1.0), 64, 0.0).is_err());
        let failing =
            conditional_phase(|_| Err(crate::error::Error::invalid("boom")), 64, 1e-6);
        assert!(failing.is_err());
    }

    #[test]
    fn narrow_feature_is_still_found() {
        // A 0.01-wide Gaussian bump riding on a broad background; 256 coarse
        // points sample every 0.0245 rad, enough to land inside the bump.
        let f = |t: f64| {
            Ok(0.5 * ((t.cos() - 1.0) * 0.1).exp()
                + 0.5 * (-(t - 0.01) * (t - 0.01) / (2.0 * 0.01 * 0.01)).exp())
        };
        let r = conditional_phase(f, 256, 1e-6).unwrap();
        assert!((r.theta_c - 0.01).abs() < 1e-3, "θ_c = {}", r.theta_c);
    }
}
