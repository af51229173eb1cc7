//! Scenario → engine wiring plus the front-end operations: CSV curve
//! sweeps, conditional-phase summaries, oracle cross-checks and the two
//! built-in reference scenarios.

use std::fmt::Write as _;

use xpm_core::condphase::{conditional_phase, wrap_phase, CondPhaseResult};
use xpm_core::error::{Error, Result};
use xpm_core::oracle::{discrete_mode_curve, truncated_series_curve, DiscreteModeGrid};
use xpm_core::overlap::{
    fidelity_curve, make_curve_engine, photon_photon_overlap, theta_grid, CurveEngine,
    ResultFlags,
};
use xpm_core::phase::PhaseField;
use xpm_core::potentials::{InteractionKernel, KernelKind};
use xpm_core::pulses::{coherent_profile, gaussian_profile, PulseProfile};

use crate::scenario::{parse_scenario, Scenario, ScenarioKind};

/// Pass-through fraction below which curve rows and summaries carry the
/// `low_pass_through` flag: the sweep ends before the pulses fully clear
/// each other, so plateau-based interpretations of θ_c degrade.
pub const PASS_THROUGH_WARN: f64 = 0.999;

/// Absolute engine-vs-oracle tolerance for the discrete-mode cross-check
/// at the reference resolution of 4096 bins.
pub const DISCRETE_ORACLE_TOL: f64 = 1e-6;

/// Absolute engine-vs-oracle tolerance for the truncated-series
/// cross-check at 40 number states.
pub const SERIES_ORACLE_TOL: f64 = 1e-10;

/// Number states kept by the series oracle.
pub const SERIES_TERMS: usize = 40;

/// Mean photon number beyond which the 40-term series truncation is no
/// longer meaningful and the series oracle refuses to run.
pub const SERIES_NBAR_MAX: f64 = 30.0;

/// Owned pulses and field built from a scenario; engines borrow from it.
pub struct ScenarioSetup {
    /// Coherent pulse (first photon for photon_photon).
    pub first: PulseProfile,
    /// Single photon (second photon for photon_photon).
    pub second: PulseProfile,
    pub field: PhaseField,
    pub kind: ScenarioKind,
    /// Fraction of the pair density that completes the traversal; `None`
    /// when the notion does not apply (co-propagating and transverse).
    pub pass_through: Option<f64>,
}

/// Build profiles and the interaction field for a validated scenario.
///
/// Conventions: the coherent pulse (or first photon) is centered at 0; in
/// moving geometries it travels at velocity 1 past a stationary partner
/// placed at `separation·sigma_s`, so the swept window covers the partner
/// when `vt` exceeds the separation.  Co-propagating pulses are concentric
/// and share velocity 1 for unit time, making `chi_t` the accumulated
/// phase.  Transverse beams are concentric two-dimensional Gaussians.
pub fn build_setup(s: &Scenario) -> Result<ScenarioSetup> {
    let schema = |key: &str| -> Error {
        Error::invalid(format!(
            "scenario kind {} is missing validated key {key}; construct scenarios \
             through parse_scenario",
            s.kind.name()
        ))
    };
    let need = |slot: Option<f64>, key: &str| slot.ok_or_else(|| schema(key));

    match s.kind {
        ScenarioKind::CounterPropagating => {
            let nbar = need(s.nbar, "nbar")?;
            let chi_over_v = need(s.chi_over_v, "chi_over_v")?;
            let separation = need(s.separation, "separation")?;
            let vt = need(s.vt, "vt")?;
            let base = gaussian_profile(0.0, s.sigma_c, 1)?;
            let first = coherent_profile(&base, nbar)?;
            let second = gaussian_profile(separation * s.sigma_s, s.sigma_s, 1)?;
            let kernel = match s.epsilon {
                Some(eps) => InteractionKernel::gaussian_regularized(chi_over_v, eps)?,
                None => InteractionKernel::contact(chi_over_v)?,
            };
            let field = PhaseField::longitudinal(kernel, 1.0, 0.0, vt)?;
            let pass_through = Some(field.pass_through_fraction(&first, &second)?);
            Ok(ScenarioSetup {
                first,
                second,
                field,
                kind: s.kind,
                pass_through,
            })
        }
        ScenarioKind::CoPropagating => {
            let nbar = need(s.nbar, "nbar")?;
            let chi_t = need(s.chi_t, "chi_t")?;
            let epsilon = need(s.epsilon, "epsilon")?;
            let base = gaussian_profile(0.0, s.sigma_c, 1)?;
            let first = coherent_profile(&base, nbar)?;
            let second = gaussian_profile(0.0, s.sigma_s, 1)?;
            // Shared velocity 1 for unit time: kernel χ equals χ·t.
            let kernel = InteractionKernel::gaussian_regularized(chi_t, epsilon)?;
            let field = PhaseField::longitudinal(kernel, 1.0, 1.0, 1.0)?;
            Ok(ScenarioSetup {
                first,
                second,
                field,
                kind: s.kind,
                pass_through: None,
            })
        }
        ScenarioKind::Transverse => {
            let nbar = need(s.nbar, "nbar")?;
            let chi_over_v = need(s.chi_over_v, "chi_over_v")?;
            let epsilon_t = need(s.epsilon_t, "epsilon_t")?;
            let base = gaussian_profile(0.0, s.sigma_c, 2)?;
            let first = coherent_profile(&base, nbar)?;
            let second = gaussian_profile(0.0, s.sigma_s, 2)?;
            let kernel = InteractionKernel::transverse_contact(chi_over_v, epsilon_t)?;
            let field = PhaseField::transverse(kernel)?;
            Ok(ScenarioSetup {
                first,
                second,
                field,
                kind: s.kind,
                pass_through: None,
            })
        }
        ScenarioKind::PhotonPhoton => {
            let chi_over_v = need(s.chi_over_v, "chi_over_v")?;
            let separation = need(s.separation, "separation")?;
            let vt = need(s.vt, "vt")?;
            let first = gaussian_profile(0.0, s.sigma_c, 1)?;
            let second = gaussian_profile(separation * s.sigma_s, s.sigma_s, 1)?;
            let kernel = match s.epsilon {
                Some(eps) => InteractionKernel::gaussian_regularized(chi_over_v, eps)?,
                None => InteractionKernel::contact(chi_over_v)?,
            };
            let field = PhaseField::longitudinal(kernel, 1.0, 0.0, vt)?;
            let pass_through = Some(field.pass_through_fraction(&first, &second)?);
            Ok(ScenarioSetup {
                first,
                second,
                field,
                kind: s.kind,
                pass_through,
            })
        }
    }
}

impl ScenarioSetup {
    /// Construct the θ-sweepable engine for this setup.
    pub fn engine(&self) -> Result<CurveEngine<'_>> {
        match self.kind {
            ScenarioKind::PhotonPhoton => Ok(CurveEngine::PhotonPair(photon_photon_overlap(
                &self.first,
                &self.second,
                &self.field,
            )?)),
            _ => make_curve_engine(&self.first, &self.second, &self.field),
        }
    }

    /// Whether curve rows should carry the low-pass-through warning.
    pub fn low_pass_through(&self) -> bool {
        self.pass_through
            .is_some_and(|fraction| fraction < PASS_THROUGH_WARN)
    }
}

/// CSV column header for curve output.
pub const CSV_HEADER: &str = "theta,fidelity,overlap_re,overlap_im,error_estimate,flags";

pub struct CurveOutput {
    /// Full CSV document, header plus one row per θ-grid point.
    pub csv: String,
    /// Number of rows whose evaluation failed (flagged `failed` in place).
    pub failed_points: usize,
}

/// Sweep the scenario's θ grid and render the CSV document.  Per-point
/// failures are flagged in their rows and counted, never dropped, so a
/// partial curve is still written.
pub fn run_curve(s: &Scenario) -> Result<CurveOutput> {
    let setup = build_setup(s)?;
    let engine = setup.engine()?;
    let low_pass = setup.low_pass_through();
    let thetas = theta_grid(s.theta_min, s.theta_max, s.theta_steps);

    let mut csv = String::with_capacity(96 * (thetas.len() + 1));
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    let mut failed_points = 0usize;
    for (theta, point) in fidelity_curve(&engine, &thetas) {
        match point {
            Ok(mut result) => {
                result.flags.low_pass_through |= low_pass;
                writeln!(
                    csv,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                    theta,
                    result.fidelity,
                    result.value.re,
                    result.value.im,
                    result.error_estimate,
                    result.flags.tokens()
                )
                .expect("string formatting cannot fail");
            }
            Err(_) => {
                failed_points += 1;
                writeln!(csv, "{theta:.16e},nan,nan,nan,nan,failed")
                    .expect("string formatting cannot fail");
            }
        }
    }
    Ok(CurveOutput { csv, failed_points })
}

pub struct CondSummary {
    pub result: CondPhaseResult,
    /// Union of engine flags over all evaluations plus `flat` when the
    /// coarse scan saw a constant fidelity; semicolon-joined, empty when
    /// clean.
    pub flags: String,
}

impl CondSummary {
    /// Single-line machine-parsable record.
    pub fn line(&self) -> String {
        format!(
            "theta_c={:.16e} f_max={:.16e} evaluations={} flags={}",
            self.result.theta_c, self.result.f_max, self.result.evaluations, self.flags
        )
    }
}

fn summary_flags(flags: ResultFlags, flat: bool) -> String {
    let mut tokens = flags.tokens();
    if flat {
        if !tokens.is_empty() {
            tokens.push(';');
        }
        tokens.push_str("flat");
    }
    tokens
}

/// Locate the conditional phase θ_c = argmax F(θ) for a scenario.
///
/// Photon–photon scenarios have a θ-independent fidelity, so the argmax
/// definition degenerates; their conditional phase is instead read off
/// exactly as −arg of the overlap (the rotation that aligns the output
/// with the target), with a single evaluation.
pub fn run_condphase(s: &Scenario) -> Result<CondSummary> {
    let setup = build_setup(s)?;
    let engine = setup.engine()?;
    let mut seen = ResultFlags::default();
    seen.low_pass_through = setup.low_pass_through();

    if s.kind == ScenarioKind::PhotonPhoton {
        let base = engine.evaluate(0.0)?;
        seen.boundary_degenerate |= base.flags.boundary_degenerate;
        seen.not_converged |= base.flags.not_converged;
        let result = CondPhaseResult {
            theta_c: wrap_phase(-base.value.arg()),
            f_max: base.fidelity,
            bracket_width: 0.0,
            evaluations: 1,
            flat: false,
        };
        return Ok(CondSummary {
            result,
            flags: summary_flags(seen, false),
        });
    }

    let result = conditional_phase(
        |theta| {
            let point = engine.evaluate(theta)?;
            seen.boundary_degenerate |= point.flags.boundary_degenerate;
            seen.not_converged |= point.flags.not_converged;
            Ok(point.fidelity)
        },
        s.coarse_points,
        s.tol,
    )?;
    let flags = summary_flags(seen, result.flat);
    Ok(CondSummary { result, flags })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// Discrete-mode evaluation on a shared midpoint grid.
    Discrete,
    /// Photon-number series truncated at [`SERIES_TERMS`] states.
    Series,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Discrete => "discrete",
            OracleKind::Series => "series",
        }
    }
}

#[derive(Debug)]
pub struct OracleReport {
    pub oracle: OracleKind,
    pub resolution: usize,
    pub points: usize,
    /// max_θ |engine(θ) − oracle(θ)| over the scenario's θ grid.
    pub max_deviation: f64,
    pub tolerance: f64,
    /// Series only: the analytic truncation-tail bound exceeded 1e−8, so a
    /// deviation failure may reflect truncation rather than an engine bug.
    pub tail_warning: bool,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.max_deviation <= self.tolerance
    }

    /// Single-line machine-parsable record.
    pub fn line(&self) -> String {
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        let tail = if self.tail_warning { " tail_warning" } else { "" };
        format!(
            "oracle={} resolution={} points={} max_deviation={:.6e} tolerance={:.1e} verdict={verdict}{tail}",
            self.oracle.name(),
            self.resolution,
            self.points,
            self.max_deviation,
            self.tolerance,
        )
    }
}

/// Cross-check the scenario's engine against an independent oracle over
/// the scenario's θ grid.
///
/// Applicability: both oracles address the one-dimensional coherent-pulse
/// overlap, so `transverse` and `photon_photon` scenarios are rejected;
/// the series oracle additionally requires nbar ≤ [`SERIES_NBAR_MAX`] and a
/// regularized kernel (a zero-width contact kernel can never be resolved at
/// the series tolerance).  `resolution` is the bin count of the oracle's
/// midpoint discretization; the reported deviation includes the oracle's own
/// O(Δz²) discretization error, so sharp kernels need resolutions scaled to
/// their width before a FAIL verdict says anything about the engine.
pub fn run_oracle_check(s: &Scenario, oracle: OracleKind, resolution: usize) -> Result<OracleReport> {
    if !matches!(
        s.kind,
        ScenarioKind::CounterPropagating | ScenarioKind::CoPropagating
    ) {
        return Err(Error::unsupported(format!(
            "oracle-check applies to one-dimensional coherent-pulse scenarios \
             (counter_propagating, co_propagating), not kind {}",
            s.kind.name()
        )));
    }
    let setup = build_setup(s)?;
    let engine = setup.engine()?;
    let thetas = theta_grid(s.theta_min, s.theta_max, s.theta_steps);

    let mut max_deviation = 0.0f64;
    let mut tail_warning = false;
    match oracle {
        OracleKind::Discrete => {
            let grid = DiscreteModeGrid::new(&setup.first, &setup.second, resolution)?;
            let phi = grid.phi_matrix(&setup.field)?;
            let oracle_values = discrete_mode_curve(&grid, &phi, &thetas)?;
            for (&theta, oracle_value) in thetas.iter().zip(&oracle_values) {
                let engine_value = engine.evaluate(theta)?.value;
                max_deviation = max_deviation.max((engine_value - oracle_value).norm());
            }
        }
        OracleKind::Series => {
            let nbar = setup.first.mean_photon_number();
            if nbar > SERIES_NBAR_MAX {
                return Err(Error::unsupported(format!(
                    "series oracle truncates at {SERIES_TERMS} number states and is \
                     only meaningful for nbar ≤ {SERIES_NBAR_MAX} (got {nbar})"
                )));
            }
            if setup.field.kernel().kind() == KernelKind::Contact {
                return Err(Error::unsupported(
                    "the series oracle samples the field on a midpoint grid, which \
                     cannot resolve an exact contact kernel at the oracle's 1e-10 \
                     tolerance; add an epsilon key to regularize the scenario"
                        .to_string(),
                ));
            }
            let series_values = truncated_series_curve(
                &setup.first,
                &setup.second,
                &setup.field,
                &thetas,
                SERIES_TERMS,
                resolution,
            )?;
            for (&theta, series) in thetas.iter().zip(&series_values) {
                tail_warning |= series.tail_warning;
                let engine_value = engine.evaluate(theta)?.value;
                max_deviation = max_deviation.max((engine_value - series.value).norm());
            }
        }
    }

    Ok(OracleReport {
        oracle,
        resolution,
        points: thetas.len(),
        max_deviation,
        tolerance: match oracle {
            OracleKind::Discrete => DISCRETE_ORACLE_TOL,
            OracleKind::Series => SERIES_ORACLE_TOL,
        },
        tail_warning,
    })
}

/// Built-in reference scenario 1: a coherent pulse (n̄ = 10³) sweeping
/// through a single photon placed 5σ ahead, contact kernel χ/v = 0.01,
/// sweep length 10σ; θ grid on [0, 0.02] where the fidelity peaks.
pub const FIG1_CONFIG: &str = "\
[scenario]
kind = counter_propagating
nbar = 1000
sigma_c = 1
sigma_s = 1
chi_over_v = 0.01
separation = 5
vt = 10
theta_min = 0
theta_max = 0.02
theta_steps = 201
";

/// Built-in reference scenario 2: concentric co-propagating pulses
/// (n̄ = 10³) with accumulated phase χt = 0.01 at regularization width
/// ε = 10⁻²⁰, the effectively-unregularized spike regime whose fidelity
/// peaks at θ = 0.
pub const FIG2_CONFIG: &str = "\
[scenario]
kind = co_propagating
nbar = 1000
sigma_c = 1
sigma_s = 1
chi_t = 0.01
epsilon = 1e-20
theta_min = -0.01
theta_max = 0.01
theta_steps = 201
";

/// One asserted reference-scenario property.
pub struct Check {
    pub label: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub struct ReproReport {
    pub curve: CurveOutput,
    pub summary: CondSummary,
    pub checks: Vec<Check>,
}

impl ReproReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|check| check.pass) && self.curve.failed_points == 0
    }
}

/// Run reference scenario 1 and assert its documented acceptance values.
pub fn reproduce_fig1() -> Result<ReproReport> {
    let s = parse_scenario(FIG1_CONFIG)?;
    let curve = run_curve(&s)?;
    let summary = run_condphase(&s)?;
    let theta_c = summary.result.theta_c;
    let f_max = summary.result.f_max;
    let checks = vec![
        Check {
            label: "theta_c = 0.01 ± 1e-4",
            pass: (theta_c - 0.01).abs() <= 1e-4,
            detail: format!("theta_c={theta_c:.12e}"),
        },
        Check {
            label: "f_max >= 0.999",
            pass: f_max >= 0.999,
            detail: format!("f_max={f_max:.12e}"),
        },
    ];
    Ok(ReproReport {
        curve,
        summary,
        checks,
    })
}

/// Run reference scenario 2 and assert its documented acceptance values.
pub fn reproduce_fig2() -> Result<ReproReport> {
    let s = parse_scenario(FIG2_CONFIG)?;
    let curve = run_curve(&s)?;
    let summary = run_condphase(&s)?;
    let setup = build_setup(&s)?;
    let fidelity_at_zero = setup.engine()?.evaluate(0.0)?.fidelity;
    let theta_c = summary.result.theta_c;
    let checks = vec![
        Check {
            label: "theta_c = 0 ± 1e-4",
            pass: theta_c.abs() <= 1e-4,
            detail: format!("theta_c={theta_c:.12e}"),
        },
        Check {
            label: "fidelity(0) >= 1 - 1e-4",
            pass: fidelity_at_zero >= 1.0 - 1e-4,
            detail: format!("fidelity(0)={fidelity_at_zero:.12e}"),
        },
    ];
    Ok(ReproReport {
        curve,
        summary,
        checks,
    })
}
