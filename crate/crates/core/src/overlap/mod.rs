//! Exact output-state overlap between a coherent pulse (or a single photon)
//! and a single photon after a cross-phase-modulation interaction.
//!
//! The central quantity is the overlap of the interaction output with the
//! ideal phase-rotated target state,
//!
//!   value(θ) = ∫ dy |f(y)|² exp{ e^{iθ}(n̄ + K(y)) − n̄ },
//!   K(y)     = ∫ dx |α(x)|² (e^{−iφ(x,y)} − 1),
//!
//! and the fidelity F(θ) = |value(θ)|².  K is independent of θ, so a θ-sweep
//! caches it per outer quadrature node.  Folding the e^{n̄(e^{iθ}−1)} prefactor
//! into the integrand keeps every exponent's real part ≤ 0 (|n̄ + K| ≤ n̄
//! analytically), which is what makes mean photon numbers up to 10⁶ stable.

mod coherent;
mod copropagating;
mod photon_pair;
mod spike;
mod transverse;

pub use coherent::{coherent_photon_overlap, CoherentEngine};
pub use copropagating::{copropagating_overlap, CopropagatingEngine};
pub use photon_pair::photon_photon_overlap;
pub use transverse::TransverseEngine;

use std::cell::{Cell, RefCell};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::{Geometry, PhaseField};
use crate::potentials::KernelKind;
use crate::pulses::PulseProfile;
use crate::quad;

/// Relative slack allowed on the analytic bound |n̄ + K(y)| ≤ n̄ before the
/// computation is declared numerically invalid.
pub(crate) const STABILITY_SLACK: f64 = 1e-12;

/// Absolute tolerance of the outer (photon-coordinate) quadrature shared by
/// the longitudinal engines.  Every exponent has non-positive real part, so
/// the outer integrand is bounded by |f|² and an absolute tolerance doubles
/// as a relative one.
pub(crate) const OUTER_TOL: f64 = 1e-11;

/// Tolerance on the unit-norm requirement for photon profiles.
pub(crate) const NORM_TOL: f64 = 1e-8;

/// One evaluated inner exponent K(y) = ∫ dx |α(x)|² (e^{−iφ(x,y)} − 1).
#[derive(Clone, Copy)]
pub(crate) struct InnerExponent {
    pub k: Complex64,
    pub err: f64,
    pub converged: bool,
    pub degenerate: bool,
}

/// Shared outer integral ∫ w(y) exp{e^{iθ}(n̄ + K(y)) − n̄} dy over
/// `interval`, where `weight` is the photon density in the chosen outer
/// coordinate (|f(y)|² longitudinally, 2πρ|f(ρ)|² radially) and K is
/// supplied per node by the caller.
pub(crate) fn integrate_outer(
    weight: &dyn Fn(f64) -> f64,
    interval: (f64, f64),
    nbar: f64,
    theta: f64,
    inner: &dyn Fn(f64) -> Result<InnerExponent>,
) -> Result<OverlapResult> {
    let eith = Complex64::from_polar(1.0, theta);
    let (lo, hi) = interval;
    let degenerate = Cell::new(false);
    let inner_err = Cell::new(0.0f64);
    let inner_converged = Cell::new(true);
    let poison: RefCell<Option<Error>> = RefCell::new(None);
    let outer = quad::integrate_complex(
        |y| {
            let weight = weight(y);
            if weight == 0.0 || poison.borrow().is_some() {
                return Complex64::new(0.0, 0.0);
            }
            match inner(y) {
                Ok(entry) => {
                    if entry.degenerate {
                        degenerate.set(true);
                    }
                    if !entry.converged {
                        inner_converged.set(false);
                    }
                    inner_err.set(inner_err.get().max(entry.err));
                    // Folding e^{n̄(e^{iθ}−1)} into the integrand keeps
                    // Re(exponent) ≤ 0, stable up to n̄ ~ 10⁶ and beyond.
                    let exponent = eith * (nbar + entry.k) - nbar;
                    weight * exponent.exp()
                }
                Err(e) => {
                    *poison.borrow_mut() = Some(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        lo,
        hi,
        &[],
        OUTER_TOL,
    );
    if let Some(e) = poison.into_inner() {
        return Err(e);
    }
    let flags = ResultFlags {
        boundary_degenerate: degenerate.get(),
        low_pass_through: false,
        not_converged: !outer.converged || !inner_converged.get(),
    };
    Ok(OverlapResult::from_value(
        outer.value,
        outer.error_estimate + inner_err.get(),
        flags,
    ))
}

/// Guard the analytic bound |n̄ + K| ≤ n̄ (violations beyond quadrature
/// slack mean the inner computation cannot be trusted).
pub(crate) fn check_exponent_bound(nbar: f64, entry: &InnerExponent, y: f64) -> Result<()> {
    let shifted = (nbar + entry.k).norm();
    let slack = entry.err + STABILITY_SLACK * (nbar + 1.0);
    if shifted > nbar + slack {
        return Err(Error::invariant(format!(
            "inner overlap exponent exceeds its analytic bound: |n̄ + K| − n̄ = {:e} at y = {y}",
            shifted - nbar
        )));
    }
    Ok(())
}

/// Quality indicators attached to a computed overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResultFlags {
    /// Some inner phase evaluation hit the contact kernel's half-count
    /// convention exactly at an integration boundary.
    pub boundary_degenerate: bool,
    /// The traversal was incomplete for the requested geometry (set by the
    /// scenario runner from the pass-through fraction, not by the engines).
    pub low_pass_through: bool,
    /// Some quadrature hit its panel cap before reaching its tolerance.
    pub not_converged: bool,
}

impl ResultFlags {
    pub fn is_clean(&self) -> bool {
        !(self.boundary_degenerate || self.low_pass_through || self.not_converged)
    }

    /// Semicolon-joined flag tokens, empty string when clean.
    pub fn tokens(&self) -> String {
        let mut parts = Vec::new();
        if self.boundary_degenerate {
            parts.push("boundary_degenerate");
        }
        if self.low_pass_through {
            parts.push("low_pass_through");
        }
        if self.not_converged {
            parts.push("not_converged");
        }
        parts.join(";")
    }
}

impl std::fmt::Display for ResultFlags {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        out.write_str(&self.tokens())
    }
}

/// One computed overlap point.
#[derive(Debug, Clone, Copy)]
pub struct OverlapResult {
    /// Complex overlap with the ideal phase-rotated target state.
    pub value: Complex64,
    /// Fidelity |value|².
    pub fidelity: f64,
    /// Conservative absolute error estimate on |value|.
    pub error_estimate: f64,
    pub flags: ResultFlags,
}

impl OverlapResult {
    pub(crate) fn from_value(value: Complex64, error_estimate: f64, flags: ResultFlags) -> Self {
        OverlapResult {
            value,
            fidelity: value.norm_sqr(),
            error_estimate,
            flags,
        }
    }
}

/// A θ-sweepable overlap engine for one configured interaction.
pub enum CurveEngine<'a> {
    Coherent(CoherentEngine<'a>),
    Copropagating(CopropagatingEngine<'a>),
    Transverse(TransverseEngine<'a>),
    /// Photon–photon output: overlap(θ) = e^{iθ}·O₀ with a θ-independent
    /// base overlap, so only the phase rotates along the curve.
    PhotonPair(OverlapResult),
}

impl<'a> CurveEngine<'a> {
    pub fn evaluate(&self, theta: f64) -> Result<OverlapResult> {
        match self {
            CurveEngine::Coherent(engine) => engine.evaluate(theta),
            CurveEngine::Copropagating(engine) => engine.evaluate(theta),
            CurveEngine::Transverse(engine) => engine.evaluate(theta),
            CurveEngine::PhotonPair(base) => {
                let rotated = Complex64::new(0.0, theta).exp() * base.value;
                Ok(OverlapResult::from_value(
                    rotated,
                    base.error_estimate,
                    base.flags,
                ))
            }
        }
    }
}

/// Build the appropriate engine for a coherent-pulse × single-photon
/// interaction: transverse fields get the radial engine, co-moving pulses
/// (zero relative velocity) with a regularized kernel get the spike engine,
/// everything else the generic one.
pub fn make_curve_engine<'a>(
    alpha: &'a PulseProfile,
    f: &'a PulseProfile,
    field: &'a PhaseField,
) -> Result<CurveEngine<'a>> {
    if field.geometry() == Geometry::Transverse {
        return Ok(CurveEngine::Transverse(TransverseEngine::new(
            alpha, f, field,
        )?));
    }
    if field.relative_velocity() == 0.0 {
        if field.kernel().kind() == KernelKind::GaussianRegularized {
            let chi_t = field.kernel().chi() * field.elapsed_time();
            return Ok(CurveEngine::Copropagating(CopropagatingEngine::new(
                alpha,
                f,
                chi_t,
                field.kernel().epsilon(),
                field.phase_offset(),
            )?));
        }
        // Remaining zero-velocity kinds either work in the generic engine
        // (top-hat) or are rejected by it (contact).
    }
    Ok(CurveEngine::Coherent(CoherentEngine::new(alpha, f, field)?))
}

/// Sweep an engine over a θ grid.  Per-point failures are recorded in place
/// and do not abort the remaining points.
pub fn fidelity_curve(
    engine: &CurveEngine<'_>,
    thetas: &[f64],
) -> Vec<(f64, Result<OverlapResult>)> {
    thetas
        .iter()
        .map(|&theta| (theta, engine.evaluate(theta)))
        .collect()
}

/// Evenly spaced θ grid with `steps` points including both endpoints.
pub fn theta_grid(theta_min: f64, theta_max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![theta_min];
    }
    let h = (theta_max - theta_min) / (steps - 1) as f64;
    (0..steps).map(|i| theta_min + h * i as f64).collect()
}
