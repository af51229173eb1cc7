//! Acceptance suite: one test per shipped guarantee, each printing a single
//! `acceptance NN: PASS/FAIL (...)` line with its measured values.  Tests
//! serialize on a shared lock so the two runtime-capped checks time a quiet
//! machine (the harness otherwise interleaves threads on one core).
//!
//! Tolerances are pinned as literals inside each test on purpose: they are
//! the contract, not tunables.

use std::sync::Mutex;
use std::time::Instant;

use num_complex::Complex64;

use xpm_cli::runner::{self, FIG1_CONFIG, FIG2_CONFIG};
use xpm_cli::scenario::parse_scenario;
use xpm_core::condphase::{conditional_phase, DEFAULT_COARSE_POINTS, DEFAULT_TOL};
use xpm_core::oracle::{discrete_mode_curve, truncated_series_curve, DiscreteModeGrid};
use xpm_core::overlap::{
    coherent_photon_overlap, photon_photon_overlap, theta_grid, CoherentEngine,
};
use xpm_core::phase::PhaseField;
use xpm_core::potentials::InteractionKernel;
use xpm_core::pulses::{coherent_profile, gaussian_profile, PulseProfile};

static LOCK: Mutex<()> = Mutex::new(());

fn serialize() -> std::sync::MutexGuard<'static, ()> {
    // A deliberately failing acceptance test poisons the lock; later tests
    // still need it.
    LOCK.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn report(number: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    eprintln!("acceptance {number}: {verdict} ({detail})");
    assert!(pass, "acceptance {number} failed: {detail}");
}

/// Coherent pulse of mean photon number n̄ at the origin (width 1) and a
/// unit-width single photon `separation` away on the traversed side.
fn sweep_pair(nbar: f64, separation: f64) -> (PulseProfile, PulseProfile) {
    let base = gaussian_profile(0.0, 1.0, 1).unwrap();
    let alpha = coherent_profile(&base, nbar).unwrap();
    let f = gaussian_profile(separation, 1.0, 1).unwrap();
    (alpha, f)
}

#[test]
fn acceptance_01_counter_sweep_phase_and_peak_fidelity() {
    let _guard = serialize();
    let start = Instant::now();
    let scenario = parse_scenario(FIG1_CONFIG).unwrap();
    let summary = runner::run_condphase(&scenario).unwrap();
    let runtime = start.elapsed().as_secs_f64();

    let theta_c = summary.result.theta_c;
    let f_max = summary.result.f_max;
    // The peak fidelity of this exact geometry is 0.998960: the 10σ sweep
    // starting 5σ away leaves ≈4.1e-4 of the pair density untraversed,
    // which costs ≈1.04e-3 of fidelity at the plateau phase.  The value is
    // confirmed independently by the discrete-mode and truncated-series
    // oracles, so the 0.999 bound below is not attainable for this
    // geometry; the assertion is intentionally kept strict rather than
    // weakened, and this check is expected to FAIL.
    let pass = (theta_c - 0.01).abs() <= 1e-4 && f_max >= 0.999 && runtime <= 10.0;
    report(
        "01",
        pass,
        &format!("theta_c={theta_c:.10e} f_max={f_max:.10e} runtime={runtime:.2}s"),
    );
}

#[test]
fn acceptance_02_copropagating_spike_phase_and_fidelity() {
    let _guard = serialize();
    let start = Instant::now();
    let scenario = parse_scenario(FIG2_CONFIG).unwrap();
    let summary = runner::run_condphase(&scenario).unwrap();
    let setup = runner::build_setup(&scenario).unwrap();
    let fidelity_at_zero = setup.engine().unwrap().evaluate(0.0).unwrap().fidelity;
    let runtime = start.elapsed().as_secs_f64();

    let theta_c = summary.result.theta_c;
    let pass = theta_c.abs() <= 1e-4 && fidelity_at_zero >= 1.0 - 1e-4 && runtime <= 10.0;
    report(
        "02",
        pass,
        &format!(
            "theta_c={theta_c:.10e} fidelity(0)={fidelity_at_zero:.10e} runtime={runtime:.2}s"
        ),
    );
}

#[test]
fn acceptance_03_transverse_width_drives_phase_to_zero() {
    let _guard = serialize();
    // Width ratios epsilon_t/sigma² of 1e-1, 1e-2, 1e-3 at sigma = 0.1.
    let epsilons = [1e-3, 1e-4, 1e-5];
    let mut phases = Vec::new();
    let mut fidelity_at_zero = 0.0;
    for &epsilon_t in &epsilons {
        let scenario = parse_scenario(&format!(
            "kind = transverse\nnbar = 0.5\nsigma_c = 0.1\nsigma_s = 0.1\nchi_over_v = 0.01\nepsilon_t = {epsilon_t}\n"
        ))
        .unwrap();
        let summary = runner::run_condphase(&scenario).unwrap();
        phases.push(summary.result.theta_c);
        let setup = runner::build_setup(&scenario).unwrap();
        fidelity_at_zero = setup.engine().unwrap().evaluate(0.0).unwrap().fidelity;
    }
    let monotone_to_zero =
        phases[0] > phases[1] && phases[1] > phases[2] && phases[2] > 0.0;
    let pass = monotone_to_zero && fidelity_at_zero >= 0.99;
    report(
        "03",
        pass,
        &format!(
            "theta_c={:.4e},{:.4e},{:.4e} fidelity(0)@smallest={fidelity_at_zero:.6}",
            phases[0], phases[1], phases[2]
        ),
    );
}

#[test]
fn acceptance_04_zero_coupling_overlap_is_unity() {
    let _guard = serialize();
    let kernel = InteractionKernel::contact(0.0).unwrap();
    let field = PhaseField::longitudinal(kernel, 1.0, 0.0, 10.0).unwrap();
    let mut worst = 0.0f64;
    for &nbar in &[0.0, 1.0, 1000.0] {
        let (alpha, f) = sweep_pair(nbar, 5.0);
        let result = coherent_photon_overlap(&alpha, &f, &field, 0.0).unwrap();
        worst = worst.max((result.value - Complex64::new(1.0, 0.0)).norm());
    }
    report("04", worst <= 1e-9, &format!("max |value-1|={worst:.3e}"));
}

#[test]
fn acceptance_05_constant_plateau_matches_closed_form() {
    let _guard = serialize();
    // Photon fully inside the swept window: x−y ∈ [−25, −9] ⊂ (−34, 0),
    // so φ ≡ χ/v = 0.3 over both supports.
    let phi0 = 0.3;
    let kernel = InteractionKernel::contact(phi0).unwrap();
    let field = PhaseField::longitudinal(kernel, 1.0, 0.0, 34.0).unwrap();
    let thetas = theta_grid(-std::f64::consts::PI, std::f64::consts::PI, 64);
    let mut worst = 0.0f64;
    for &nbar in &[1.0, 100.0] {
        let (alpha, f) = sweep_pair(nbar, 17.0);
        let engine = CoherentEngine::new(&alpha, &f, &field).unwrap();
        for &theta in &thetas {
            let value = engine.evaluate(theta).unwrap().value;
            let analytic =
                (nbar * (Complex64::new(0.0, theta - phi0).exp() - 1.0)).exp();
            worst = worst.max((value - analytic).norm());
        }
    }
    report("05", worst <= 1e-9, &format!("max deviation={worst:.3e} over 64 θ × 2 n̄"));
}

#[test]
fn acceptance_06_discrete_mode_oracle_agreement() {
    let _guard = serialize();
    let (alpha, f) = sweep_pair(2.0, 5.0);
    let kernel = InteractionKernel::contact(0.01).unwrap();
    let field = PhaseField::longitudinal(kernel, 1.0, 0.0, 10.0).unwrap();
    let engine = CoherentEngine::new(&alpha, &f, &field).unwrap();

    let grid = DiscreteModeGrid::new(&alpha, &f, 4096).unwrap();
    let phi = grid.phi_matrix(&field).unwrap();
    let thetas = theta_grid(-std::f64::consts::PI, std::f64::consts::PI, 33);
    let oracle = discrete_mode_curve(&grid, &phi, &thetas).unwrap();

    let mut worst = 0.0f64;
    for (&theta, oracle_value) in thetas.iter().zip(&oracle) {
        let engine_value = engine.evaluate(theta).unwrap().value;
        worst = worst.max((engine_value - oracle_value).norm());
    }
    report(
        "06",
        worst <= 1e-6,
        &format!("max deviation={worst:.3e} at 4096 bins over 33 θ"),
    );
}

#[test]
fn acceptance_07_truncated_series_oracle_agreement() {
    let _guard = serialize();
    // A smooth regularized kernel keeps the oracle's own midpoint
    // discretization error far below the comparison tolerance.
    let kernel = InteractionKernel::gaussian_regularized(0.01, 0.01).unwrap();
    let field = PhaseField::longitudinal(kernel, 1.0, 0.0, 10.0).unwrap();
    let thetas = theta_grid(-std::f64::consts::PI, std::f64::consts::PI, 33);
    let mut worst = 0.0f64;
    for &nbar in &[1.0, 5.0] {
        let (alpha, f) = sweep_pair(nbar, 5.0);
        let engine = CoherentEngine::new(&alpha, &f, &field).unwrap();
        let series = truncated_series_curve(&alpha, &f, &field, &thetas, 40, 4096).unwrap();
        for (&theta, series_point) in thetas.iter().zip(&series) {
            assert!(
                !series_point.tail_warning,
                "series truncation too aggressive for n̄={nbar}"
            );
            let engine_value = engine.evaluate(theta).unwrap().value;
            let relative =
                (engine_value - series_point.value).norm() / series_point.value.norm();
            worst = worst.max(relative);
        }
    }
    report(
        "07",
        worst <= 1e-10,
        &format!("max relative deviation={worst:.3e} at 40 terms over 33 θ × 2 n̄"),
    );
}

#[test]
fn acceptance_08_photon_pair_plateau_gate() {
    let _guard = serialize();
    // Both photon supports stay strictly inside the swept window:
    // x−y ∈ [−21, −13] ⊂ (−34, 0), so the pair phase is exactly χ/v.
    let chi_over_v = 0.3;
    let f1 = gaussian_profile(0.0, 0.5, 1).unwrap();
    let f2 = gaussian_profile(17.0, 0.5, 1).unwrap();
    let kernel = InteractionKernel::contact(chi_over_v).unwrap();
    let field = PhaseField::longitudinal(kernel, 1.0, 0.0, 34.0).unwrap();
    let result = photon_photon_overlap(&f1, &f2, &field).unwrap();
    let theta_c = -result.value.arg();
    let pass =
        (result.fidelity - 1.0).abs() <= 1e-9 && (theta_c - chi_over_v).abs() <= 1e-9;
    report(
        "08",
        pass,
        &format!("fidelity={:.12} theta_c={theta_c:.12}", result.fidelity),
    );
}

#[test]
fn acceptance_09_phase_offset_shifts_conditional_phase() {
    let _guard = serialize();
    let offset = 0.3;
    let (alpha, f) = sweep_pair(2.0, 5.0);
    let kernel = InteractionKernel::contact(0.01).unwrap();
    let base_field = PhaseField::longitudinal(kernel, 1.0, 0.0, 10.0).unwrap();
    let shifted_field = base_field.clone().with_phase_offset(offset);

    let solve = |field: &PhaseField| {
        let engine = CoherentEngine::new(&alpha, &f, field).unwrap();
        conditional_phase(
            |theta| Ok(engine.evaluate(theta)?.fidelity),
            DEFAULT_COARSE_POINTS,
            DEFAULT_TOL,
        )
        .unwrap()
    };
    let base = solve(&base_field);
    let shifted = solve(&shifted_field);

    let shift = shifted.theta_c - base.theta_c;
    let f_max_change = (shifted.f_max - base.f_max).abs();
    let pass = (shift - offset).abs() <= 2e-6 && f_max_change < 1e-9;
    report(
        "09",
        pass,
        &format!("theta_c shift={shift:.10} f_max change={f_max_change:.3e}"),
    );
}

#[test]
fn acceptance_10_reference_runs_are_byte_identical() {
    let _guard = serialize();
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        // Exit status is ignored on purpose: the run carries a deliberately
        // failing fidelity check, while this criterion is about bytes.
        std::process::Command::new(env!("CARGO_BIN_EXE_xpm"))
            .args(["reproduce-fig1", "--out"])
            .arg(&path)
            .output()
            .expect("binary runs");
        std::fs::read(&path).expect("CSV written")
    };
    let first = run("first.csv");
    let second = run("second.csv");
    let pass = !first.is_empty() && first == second;
    report(
        "10",
        pass,
        &format!("{} bytes per run, identical={}", first.len(), first == second),
    );
}
