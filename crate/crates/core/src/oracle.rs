//! Independent brute-force cross-checks for the overlap engines.
//!
//! Two oracles, sharing no quadrature code with the engines (plain midpoint
//! sums only):
//!
//! * a discrete-mode model — both pulses are binned onto one shared grid and
//!   the overlap follows from exact single-mode coherent-state algebra;
//! * the truncated photon-number series of the closed-form overlap, with an
//!   analytic factorial tail bound.
//!
//! They live in the shipped library (not test code) so the command-line
//! `oracle-check` subcommand can run them against the engines.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::PhaseField;
use crate::pulses::PulseProfile;

/// Both pulses sampled onto one shared midpoint grid over the union of
/// their supports.
pub struct DiscreteModeGrid {
    bin_width: f64,
    centers: Vec<f64>,
    /// β_i = α(z_i)·√Δz: per-bin coherent amplitude.
    betas: Vec<Complex64>,
    /// w_j = |f(z_j)|²·Δz: per-bin photon weight.
    weights: Vec<f64>,
}

impl DiscreteModeGrid {
    pub fn new(alpha: &PulseProfile, f: &PulseProfile, bin_count: usize) -> Result<Self> {
        if alpha.dimension() != 1 || f.dimension() != 1 {
            return Err(Error::unsupported(
                "discrete-mode grid requires one-dimensional profiles",
            ));
        }
        if bin_count < 2 {
            return Err(Error::invalid(format!(
                "discrete-mode grid needs at least 2 bins (got {bin_count})"
            )));
        }
        let (a_lo, a_hi) = alpha.support();
        let (f_lo, f_hi) = f.support();
        let lo = a_lo.min(f_lo);
        let hi = a_hi.max(f_hi);
        let bin_width = (hi - lo) / bin_count as f64;
        let sqrt_dz = bin_width.sqrt();
        let mut centers = Vec::with_capacity(bin_count);
        let mut betas = Vec::with_capacity(bin_count);
        let mut weights = Vec::with_capacity(bin_count);
        for i in 0..bin_count {
            let z = lo + (i as f64 + 0.5) * bin_width;
            centers.push(z);
            betas.push(alpha.amplitude(z) * sqrt_dz);
            weights.push(f.intensity(z) * bin_width);
        }
        Ok(DiscreteModeGrid {
            bin_width,
            centers,
            betas,
            weights,
        })
    }

    pub fn bin_count(&self) -> usize {
        self.centers.len()
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Σ_i |β_i|² — converges to n̄ as the grid refines.
    pub fn coherent_mass(&self) -> f64 {
        self.betas.iter().map(|b| b.norm_sqr()).sum()
    }

    /// Σ_j w_j — converges to 1 as the grid refines.
    pub fn photon_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Row-major M×M matrix of phases φ(z_i, z_j) for this grid.
    pub fn phi_matrix(&self, field: &PhaseField) -> Result<Vec<f64>> {
        let m = self.centers.len();
        let mut out = Vec::with_capacity(m * m);
        for &x in &self.centers {
            for &y in &self.centers {
                out.push(field.phi(x, y)?);
            }
        }
        Ok(out)
    }
}

/// Exact finite-M overlap from single-mode coherent-state algebra:
/// value = Σ_j w_j exp{Σ_i |β_i|²(e^{i(θ−φ_ij)} − 1)}, evaluated literally.
pub fn discrete_mode_overlap(
    grid: &DiscreteModeGrid,
    phi_matrix: &[f64],
    theta: f64,
) -> Result<Complex64> {
    let m = grid.centers.len();
    if phi_matrix.len() != m * m {
        return Err(Error::invalid(format!(
            "phase matrix has {} entries, expected {}×{}",
            phi_matrix.len(),
            m,
            m
        )));
    }
    let mut value = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let w = grid.weights[j];
        if w == 0.0 {
            continue;
        }
        let mut exponent = Complex64::new(0.0, 0.0);
        for i in 0..m {
            let b2 = grid.betas[i].norm_sqr();
            if b2 == 0.0 {
                continue;
            }
            exponent += b2 * (Complex64::from_polar(1.0, theta - phi_matrix[i * m + j]) - 1.0);
        }
        value += w * exponent.exp();
    }
    Ok(value)
}

/// θ-sweep of [`discrete_mode_overlap`]: the θ-independent row sums
/// R_j = Σ_i |β_i|² e^{−iφ_ij} are computed once, after which each θ costs
/// O(M).  Algebraically identical to the literal evaluation.
pub fn discrete_mode_curve(
    grid: &DiscreteModeGrid,
    phi_matrix: &[f64],
    thetas: &[f64],
) -> Result<Vec<Complex64>> {
    let m = grid.centers.len();
    if phi_matrix.len() != m * m {
        return Err(Error::invalid(format!(
            "phase matrix has {} entries, expected {}×{}",
            phi_matrix.len(),
            m,
            m
        )));
    }
    let nbar_d = grid.coherent_mass();
    let mut rows = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..m {
        let b2 = grid.betas[i].norm_sqr();
        if b2 == 0.0 {
            continue;
        }
        for (j, row) in rows.iter_mut().enumerate() {
            *row += b2 * Complex64::from_polar(1.0, -phi_matrix[i * m + j]);
        }
    }
    let mut out = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let eith = Complex64::from_polar(1.0, theta);
        let mut value = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let w = grid.weights[j];
            if w == 0.0 {
                continue;
            }
            value += w * (eith * rows[j] - nbar_d).exp();
        }
        out.push(value);
    }
    Ok(out)
}

/// Result of the truncated photon-number series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct SeriesOverlap {
    pub value: Complex64,
    /// Analytic bound n̄^{N+1}/(N+1)! on the dropped tail (with a geometric
    /// safety factor when it applies).
    pub tail_bound: f64,
    /// Tail bound exceeds 1e−8: N is too small for this n̄.
    pub tail_warning: bool,
}

/// Truncated photon-number expansion of the closed-form overlap over a θ
/// grid: e^{−n̄} Σ_j w_j Σ_{n≤N} I_θ(y_j)ⁿ/n! with
/// I_θ(y) = Σ_i |α(x_i)|² e^{i(θ−φ)}Δx, everything on plain midpoint grids
/// of `bins` points per support — deliberately independent of the engine
/// quadrature.  The inner sums factor as e^{iθ}·C(y_j) with θ-independent
/// C, so the O(bins²) phase pass runs once for the whole grid.
pub fn truncated_series_curve(
    alpha: &PulseProfile,
    f: &PulseProfile,
    field: &PhaseField,
    thetas: &[f64],
    n_max: usize,
    bins: usize,
) -> Result<Vec<SeriesOverlap>> {
    if alpha.dimension() != 1 || f.dimension() != 1 {
        return Err(Error::unsupported(
            "series oracle requires one-dimensional profiles",
        ));
    }
    if bins < 2 {
        return Err(Error::invalid(format!(
            "series oracle needs at least 2 bins (got {bins})"
        )));
    }
    let nbar = alpha.mean_photon_number();
    let (x_lo, x_hi) = alpha.support();
    let (y_lo, y_hi) = f.support();
    let dx = (x_hi - x_lo) / bins as f64;
    let dy = (y_hi - y_lo) / bins as f64;

    let x_nodes: Vec<(f64, f64)> = (0..bins)
        .map(|i| {
            let x = x_lo + (i as f64 + 0.5) * dx;
            (x, alpha.intensity(x) * dx)
        })
        .collect();

    // θ-independent inner sums C(y_j) = Σ_i |α(x_i)|² e^{−iφ(x_i,y_j)}Δx
    // and photon weights w_j.
    let mut y_nodes: Vec<(f64, Complex64)> = Vec::with_capacity(bins);
    for j in 0..bins {
        let y = y_lo + (j as f64 + 0.5) * dy;
        let w = f.intensity(y) * dy;
        if w == 0.0 {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for &(x, ax) in &x_nodes {
            if ax == 0.0 {
                continue;
            }
            inner += ax * Complex64::from_polar(1.0, -field.phi(x, y)?);
        }
        y_nodes.push((w, inner));
    }

    let tail_bound = if nbar == 0.0 {
        0.0
    } else {
        // log-space to survive large N; geometric safety factor when the
        // ratio n̄/(N+2) < 1 makes it valid.
        let log_lead = (n_max as f64 + 1.0) * nbar.ln() - libm::lgamma(n_max as f64 + 2.0);
        let ratio = nbar / (n_max as f64 + 2.0);
        let factor = if ratio < 1.0 { 1.0 / (1.0 - ratio) } else { f64::INFINITY };
        log_lead.exp() * factor
    };

    let damping = (-nbar).exp();
    let mut out = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let eith = Complex64::from_polar(1.0, theta);
        let mut value = Complex64::new(0.0, 0.0);
        for &(w, c) in &y_nodes {
            let inner = eith * c;
            // Σ_{n≤N} innerⁿ/n! by stable term recursion.
            let mut term = Complex64::new(1.0, 0.0);
            let mut series = Complex64::new(1.0, 0.0);
            for n in 1..=n_max {
                term *= inner / n as f64;
                series += term;
            }
            value += w * series;
        }
        out.push(SeriesOverlap {
            value: value * damping,
            tail_bound,
            tail_warning: tail_bound > 1e-8,
        });
    }
    Ok(out)
}

/// Single-θ convenience wrapper around [`truncated_series_curve`].
pub fn truncated_series_overlap(
    alpha: &PulseProfile,
    f: &PulseProfile,
    field: &PhaseField,
    theta: f64,
    n_max: usize,
    bins: usize,
) -> Result<SeriesOverlap> {
    Ok(truncated_series_curve(alpha, f, field, &[theta], n_max, bins)?
        .pop()
        .expect("one θ in, one result out"))
}
