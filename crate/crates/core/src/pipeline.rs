//! Catalog listing, single runs and the catalog-wide sweep.

use crate::holonomy::{classify, RunSettings};
use crate::report::{AggregateReport, Classification, Dims, HolDims, Tolerances, VerificationReport};
use crate::submanifold::{family_jet, orbit_jet, parse_jet_file, veronese_sphere_jet, JetError, JetFileError, TwoJet};
use crate::symspace::{find_admissible, model_by_name, SymSpaceError, MODEL_NAMES};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

/// Pseudo-model name selecting the Veronese surface in the 4-sphere.
pub const VERONESE: &str = "veronese";

/// Errors caused by the request rather than by the computation.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("unknown model '{0}' (see `holocalc list`)")]
    UnknownModel(String),
    #[error("invalid {name}: {value} (must be positive and finite)")]
    InvalidNumber { name: &'static str, value: f64 },
    #[error("invalid c: {0}")]
    InvalidC(f64),
    #[error("jet file: {0}")]
    JetFile(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: String,
    pub c: f64,
    pub settings: RunSettings,
    /// Contents of a jet file; overrides `model` and `c`.
    pub jet_file: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { model: String::new(), c: 1.0, settings: RunSettings::default(), jet_file: None }
    }
}

pub fn validate(t: &Tolerances) -> Result<(), InputError> {
    for (name, value) in [("tol", t.tol), ("ode-step", t.ode_step)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(InputError::InvalidNumber { name, value });
        }
    }
    Ok(())
}

/// One line per catalog model: name, sign or `flat`, `dim g/k/p`, Hermitian flag.
pub fn cmd_list(tol: f64) -> String {
    let mut out = String::new();
    for name in MODEL_NAMES {
        match model_by_name(name, tol) {
            Ok(m) => {
                let kind = match (m.is_flat(), m.epsilon() < 0.0) {
                    (true, _) => "flat",
                    (false, true) => "ε=−1",
                    (false, false) => "ε=+1",
                };
                out.push_str(&format!(
                    "{} | {} | {}/{}/{} | hermitian={}\n",
                    name,
                    kind,
                    m.dim_g(),
                    m.dim_k(),
                    m.dim_p(),
                    m.is_hermitian()
                ));
            }
            Err(e) => out.push_str(&format!("{name} | error: {e}\n")),
        }
    }
    out
}

/// Report for a run that failed before a jet existed.
pub fn failed_report(model: &str, jet: &str, c: f64, settings: &RunSettings, msg: String) -> VerificationReport {
    VerificationReport {
        model: model.to_string(),
        jet: jet.to_string(),
        epsilon: 0.0,
        c,
        dims: Dims::default(),
        hol: HolDims::default(),
        hermitian: false,
        checks: BTreeMap::new(),
        classification: Classification { case: "error".into(), ..Default::default() },
        diagnostics: BTreeMap::new(),
        tolerances: settings.tolerances,
        seed: settings.seed,
        error: Some(msg),
    }
}

fn catalog_jet(model: &str, c: f64, tol: f64) -> Result<TwoJet, JetError> {
    if model == VERONESE {
        return veronese_sphere_jet(tol);
    }
    let m = Arc::new(model_by_name(model, tol)?);
    let x = find_admissible(&m)?;
    if m.is_flat() {
        orbit_jet(m, &x)
    } else {
        family_jet(m, &x, c)
    }
}

fn jet_label(model: &str, tol: f64) -> &'static str {
    if model == VERONESE {
        "veronese"
    } else if model_by_name(model, tol).map(|m| m.is_flat()).unwrap_or(false) {
        "orbit"
    } else {
        "family"
    }
}

/// Builds the jet named by `config` and classifies it. Flat models give
/// the orbit jet, curved ones the family jet with scale `c`.
pub fn compute(config: &RunConfig) -> Result<VerificationReport, InputError> {
    let s = &config.settings;
    validate(&s.tolerances)?;
    let tol = s.tolerances.tol;
    if let Some(text) = &config.jet_file {
        let file = parse_jet_file(text, tol).map_err(|e| match e {
            JetFileError::Jet(JetError::SymSpace(SymSpaceError::UnknownModel(m))) => InputError::UnknownModel(m),
            other => InputError::JetFile(other.to_string()),
        })?;
        let (model, c) = (file.model.clone(), file.c);
        return Ok(match file.into_jet(tol) {
            Ok(jet) => classify(&jet, s),
            Err(JetFileError::Jet(e)) => failed_report(&model, "custom", c, s, e.to_string()),
            Err(e) => return Err(InputError::JetFile(e.to_string())),
        });
    }
    if !config.c.is_finite() {
        return Err(InputError::InvalidC(config.c));
    }
    if config.model != VERONESE && !MODEL_NAMES.contains(&config.model.as_str()) {
        return Err(InputError::UnknownModel(config.model.clone()));
    }
    let c = if config.model == VERONESE { 1.0 } else { config.c };
    Ok(match catalog_jet(&config.model, c, tol) {
        Ok(jet) => classify(&jet, s),
        Err(e) => failed_report(&config.model, jet_label(&config.model, tol), c, s, e.to_string()),
    })
}

/// Every run of the sweep: curved models at `c = 1` and `c = -0.5`, the
/// flat orbit jets and the Veronese jet.
pub fn sweep_configs(settings: &RunSettings) -> Vec<RunConfig> {
    let mut out = Vec::new();
    for name in MODEL_NAMES {
        let flat = name.starts_with("euclid_");
        let cs: &[f64] = if flat { &[1.0] } else { &[1.0, -0.5] };
        for &c in cs {
            out.push(RunConfig { model: name.to_string(), c, settings: *settings, jet_file: None });
        }
    }
    out.push(RunConfig { model: VERONESE.into(), c: 1.0, settings: *settings, jet_file: None });
    out
}

/// Runs the sweep on worker threads; the output order depends only on the
/// report labels.
pub fn verify_all(settings: &RunSettings) -> Result<AggregateReport, InputError> {
    validate(&settings.tolerances)?;
    let configs = sweep_configs(settings);
    let reports: Vec<VerificationReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs.iter().map(|cfg| scope.spawn(move || compute(cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect::<Result<_, _>>()
    })?;
    Ok(AggregateReport::new(reports, settings.tolerances, settings.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_rows() {
        let text = cmd_list(1e-9);
        assert!(text.contains("su3_so3 | ε=−1 | 8/3/5 | hermitian=false"));
        assert!(text.contains("quadric3 | ε=−1 | 10/4/6 | hermitian=true"));
        assert!(text.contains("sl3_so3 | ε=+1 | 8/3/5 | hermitian=false"));
        assert!(text.contains("euclid_su3_so3 | flat |"));
        assert_eq!(text.lines().count(), MODEL_NAMES.len());
    }

    #[test]
    fn input_errors() {
        let cfg = RunConfig { model: "nowhere".into(), ..Default::default() };
        assert!(matches!(compute(&cfg), Err(InputError::UnknownModel(_))));
        let mut cfg = RunConfig { model: "quadric3".into(), ..Default::default() };
        cfg.settings.tolerances.tol = -1.0;
        assert!(matches!(compute(&cfg), Err(InputError::InvalidNumber { name: "tol", .. })));
        let cfg = RunConfig { jet_file: Some("model sphere4\nfoo\n".into()), ..Default::default() };
        assert!(matches!(compute(&cfg), Err(InputError::JetFile(_))));
    }

    #[test]
    fn sweep_covers_catalog() {
        let configs = sweep_configs(&RunSettings::default());
        assert_eq!(configs.len(), 2 * 7 + 1 + 1);
    }
}
