//! Flat `key = value` scenario-configuration parsing.
//!
//! Grammar (one statement per line):
//!   - `# …` starts a comment (full-line or trailing); text after `#` is
//!     ignored, so values themselves cannot contain `#`.
//!   - `[scenario]` is the only accepted section header and is optional.
//!   - everything else must be `key = value`.
//!
//! Every scenario kind has an exact key schema: missing required keys,
//! extraneous keys (valid for another kind but not this one) and unknown
//! keys are all rejected with the key name and line number.  Errors that
//! concern the document as a whole (e.g. a required key that never
//! appears) are reported at line 0.

use std::collections::HashMap;

use xpm_core::condphase::{DEFAULT_COARSE_POINTS, DEFAULT_TOL};
use xpm_core::error::{Error, Result};

/// Default number of θ-grid points for curve output.
pub const DEFAULT_THETA_STEPS: usize = 201;

/// Which pulse/field arrangement a scenario describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Coherent pulse and single photon moving through each other
    /// (relative velocity 1, sweep length `vt`).
    CounterPropagating,
    /// Coherent pulse and single photon at rest relative to each other,
    /// accumulating the regularized spike phase `chi_t` at width `epsilon`.
    CoPropagating,
    /// Concentric two-dimensional beams coupled through a transverse
    /// contact kernel of cross-section `epsilon_t`.
    Transverse,
    /// Two single photons moving through each other.
    PhotonPhoton,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::CounterPropagating => "counter_propagating",
            ScenarioKind::CoPropagating => "co_propagating",
            ScenarioKind::Transverse => "transverse",
            ScenarioKind::PhotonPhoton => "photon_photon",
        }
    }
}

/// A fully validated experiment description.
///
/// Optional fields are `Some` exactly when the kind's schema uses them;
/// accessors on the runner side may rely on that.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Mean photon number of the coherent pulse (absent for photon_photon).
    pub nbar: Option<f64>,
    /// Width of the coherent pulse (first photon for photon_photon).
    pub sigma_c: f64,
    /// Width of the single photon (second photon for photon_photon).
    pub sigma_s: f64,
    /// Initial center distance in units of sigma_s; the second pulse starts
    /// ahead of the first (positive coordinate side) so a positive sweep
    /// traverses it.
    pub separation: Option<f64>,
    /// Plateau phase χ/v for moving geometries and the transverse gate.
    pub chi_over_v: Option<f64>,
    /// Accumulated phase χ·t for the co-propagating geometry.
    pub chi_t: Option<f64>,
    /// Sweep length v·t for moving geometries.
    pub vt: Option<f64>,
    /// Longitudinal kernel regularization width (required for
    /// co_propagating; optional elsewhere, contact kernel when absent).
    pub epsilon: Option<f64>,
    /// Transverse kernel cross-section.
    pub epsilon_t: Option<f64>,
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_steps: usize,
    /// Coarse-scan resolution for conditional-phase search.
    pub coarse_points: usize,
    /// Bracket tolerance for conditional-phase search.
    pub tol: f64,
    /// Optional output path recorded in the config (CLI --out overrides).
    pub out: Option<String>,
}

/// Keys that may appear in any scenario.
const COMMON_OPTIONAL: &[&str] = &[
    "sigma_c",
    "sigma_s",
    "theta_min",
    "theta_max",
    "theta_steps",
    "coarse_points",
    "tol",
    "out",
];

/// Full key vocabulary across all kinds; anything else is "unknown" rather
/// than "extraneous".
const VOCABULARY: &[&str] = &[
    "kind",
    "nbar",
    "sigma_c",
    "sigma_s",
    "separation",
    "chi_over_v",
    "chi_t",
    "vt",
    "epsilon",
    "epsilon_t",
    "theta_min",
    "theta_max",
    "theta_steps",
    "coarse_points",
    "tol",
    "out",
];

fn kind_schema(kind: ScenarioKind) -> (&'static [&'static str], &'static [&'static str]) {
    match kind {
        ScenarioKind::CounterPropagating => {
            (&["nbar", "chi_over_v", "separation", "vt"], &["epsilon"])
        }
        ScenarioKind::CoPropagating => (&["nbar", "chi_t", "epsilon"], &[]),
        ScenarioKind::Transverse => (&["nbar", "chi_over_v", "epsilon_t"], &[]),
        ScenarioKind::PhotonPhoton => (&["chi_over_v", "separation", "vt"], &["epsilon"]),
    }
}

struct RawEntry {
    value: String,
    line: usize,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Collect `key = value` pairs, rejecting malformed lines and duplicates.
fn collect_entries(text: &str) -> Result<HashMap<String, RawEntry>> {
    let mut entries: HashMap<String, RawEntry> = HashMap::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            if content == "[scenario]" {
                continue;
            }
            return Err(parse_err(
                line,
                format!("unknown section header: {content} (only [scenario] is accepted)"),
            ));
        }
        let Some((key_part, value_part)) = content.split_once('=') else {
            return Err(parse_err(
                line,
                format!("expected `key = value`, got: {content}"),
            ));
        };
        let key = key_part.trim();
        let value = value_part.trim();
        if key.is_empty() {
            return Err(parse_err(line, "empty key before `=`"));
        }
        if value.is_empty() {
            return Err(parse_err(line, format!("empty value for key: {key}")));
        }
        if entries.contains_key(key) {
            return Err(parse_err(line, format!("duplicate key: {key}")));
        }
        entries.insert(
            key.to_string(),
            RawEntry {
                value: value.to_string(),
                line,
            },
        );
    }
    Ok(entries)
}

fn take_f64(entries: &mut HashMap<String, RawEntry>, key: &str) -> Result<Option<(f64, usize)>> {
    match entries.remove(key) {
        None => Ok(None),
        Some(entry) => match entry.value.parse::<f64>() {
            Ok(parsed) if parsed.is_finite() => Ok(Some((parsed, entry.line))),
            Ok(_) => Err(parse_err(
                entry.line,
                format!("non-finite value for key {key}: {}", entry.value),
            )),
            Err(_) => Err(parse_err(
                entry.line,
                format!("non-numeric value for key {key}: {}", entry.value),
            )),
        },
    }
}

fn take_usize(entries: &mut HashMap<String, RawEntry>, key: &str) -> Result<Option<(usize, usize)>> {
    match entries.remove(key) {
        None => Ok(None),
        Some(entry) => match entry.value.parse::<usize>() {
            Ok(parsed) => Ok(Some((parsed, entry.line))),
            Err(_) => Err(parse_err(
                entry.line,
                format!("non-numeric value for key {key}: {}", entry.value),
            )),
        },
    }
}

fn require_f64(entries: &mut HashMap<String, RawEntry>, key: &str) -> Result<(f64, usize)> {
    take_f64(entries, key)?.ok_or_else(|| parse_err(0, format!("missing key: {key}")))
}

/// A positive quantity that enters a normalized profile or kernel; zero or
/// negative values make the scenario physically meaningless.
fn require_positive(key: &str, value: f64, line: usize) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(parse_err(
            line,
            format!("normalization-impossible value for key {key}: must be > 0 (got {value})"),
        ))
    }
}

fn require_non_negative(key: &str, value: f64, line: usize) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(parse_err(
            line,
            format!("normalization-impossible value for key {key}: must be ≥ 0 (got {value})"),
        ))
    }
}

/// Parse and validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut entries = collect_entries(text)?;

    let kind_entry = entries
        .remove("kind")
        .ok_or_else(|| parse_err(0, "missing key: kind"))?;
    let kind = match kind_entry.value.as_str() {
        "counter_propagating" => ScenarioKind::CounterPropagating,
        "co_propagating" => ScenarioKind::CoPropagating,
        "transverse" => ScenarioKind::Transverse,
        "photon_photon" => ScenarioKind::PhotonPhoton,
        other => {
            return Err(parse_err(
                kind_entry.line,
                format!(
                    "unknown scenario kind: {other} (expected counter_propagating, \
                     co_propagating, transverse or photon_photon)"
                ),
            ))
        }
    };
    let (required, kind_optional) = kind_schema(kind);

    // Reject keys outside this kind's schema before reading values, so the
    // error names the offending key even when required keys are also absent.
    let allowed: Vec<&str> = required
        .iter()
        .chain(kind_optional.iter())
        .chain(COMMON_OPTIONAL.iter())
        .copied()
        .collect();
    let mut stray: Option<(usize, String)> = None;
    for (key, entry) in &entries {
        if allowed.contains(&key.as_str()) {
            continue;
        }
        let message = if VOCABULARY.contains(&key.as_str()) {
            format!("extraneous key: {key} (not used by kind {})", kind.name())
        } else {
            format!("unknown key: {key}")
        };
        // Report the earliest offending line for determinism.
        if stray.as_ref().is_none_or(|(line, _)| entry.line < *line) {
            stray = Some((entry.line, message));
        }
    }
    if let Some((line, message)) = stray {
        return Err(parse_err(line, message));
    }

    let nbar = match kind {
        ScenarioKind::PhotonPhoton => None,
        _ => {
            let (value, line) = require_f64(&mut entries, "nbar")?;
            Some(require_non_negative("nbar", value, line)?)
        }
    };
    let sigma_c = match take_f64(&mut entries, "sigma_c")? {
        Some((value, line)) => require_positive("sigma_c", value, line)?,
        None => 1.0,
    };
    let sigma_s = match take_f64(&mut entries, "sigma_s")? {
        Some((value, line)) => require_positive("sigma_s", value, line)?,
        None => 1.0,
    };

    let mut separation = None;
    let mut chi_over_v = None;
    let mut chi_t = None;
    let mut vt = None;
    let mut epsilon = None;
    let mut epsilon_t = None;
    for &key in required.iter().chain(kind_optional.iter()) {
        let slot = match key {
            "nbar" => continue, // handled above
            "separation" => &mut separation,
            "chi_over_v" => &mut chi_over_v,
            "chi_t" => &mut chi_t,
            "vt" => &mut vt,
            "epsilon" => &mut epsilon,
            "epsilon_t" => &mut epsilon_t,
            _ => unreachable!("schema key {key} has no slot"),
        };
        let is_required = required.contains(&key);
        let entry = if is_required {
            Some(require_f64(&mut entries, key)?)
        } else {
            take_f64(&mut entries, key)?
        };
        if let Some((value, line)) = entry {
            let checked = match key {
                "separation" | "vt" => require_non_negative(key, value, line)?,
                "epsilon" | "epsilon_t" => require_positive(key, value, line)?,
                _ => value, // couplings may take either sign
            };
            *slot = Some(checked);
        }
    }

    let theta_min = take_f64(&mut entries, "theta_min")?
        .map(|(value, _)| value)
        .unwrap_or(-std::f64::consts::PI);
    let theta_max = take_f64(&mut entries, "theta_max")?
        .map(|(value, _)| value)
        .unwrap_or(std::f64::consts::PI);
    let theta_steps = match take_usize(&mut entries, "theta_steps")? {
        Some((value, line)) => {
            if value == 0 {
                return Err(parse_err(line, "theta_steps must be ≥ 1 (got 0)"));
            }
            value
        }
        None => DEFAULT_THETA_STEPS,
    };
    if theta_steps > 1 && !(theta_min < theta_max) {
        return Err(parse_err(
            0,
            format!(
                "theta grid needs theta_min < theta_max for theta_steps > 1 \
                 (got [{theta_min}, {theta_max}] with {theta_steps} steps)"
            ),
        ));
    }
    let coarse_points = match take_usize(&mut entries, "coarse_points")? {
        Some((value, line)) => {
            if value < 8 {
                return Err(parse_err(
                    line,
                    format!("coarse_points must be ≥ 8 (got {value})"),
                ));
            }
            value
        }
        None => DEFAULT_COARSE_POINTS,
    };
    let tol = match take_f64(&mut entries, "tol")? {
        Some((value, line)) => require_positive("tol", value, line)?,
        None => DEFAULT_TOL,
    };
    let out = entries.remove("out").map(|entry| entry.value);

    debug_assert!(entries.is_empty(), "all schema keys should be consumed");

    Ok(Scenario {
        kind,
        nbar,
        sigma_c,
        sigma_s,
        separation,
        chi_over_v,
        chi_t,
        vt,
        epsilon,
        epsilon_t,
        theta_min,
        theta_max,
        theta_steps,
        coarse_points,
        tol,
        out,
    })
}
