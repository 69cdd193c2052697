//! Verification reports and their JSON form.
//!
//! Floats are written as decimals with 17 significant digits, so a report
//! survives a JSON round trip bit for bit. Non-finite values become `null`
//! and read back as `+inf`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

mod real {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::value::RawValue;

    pub fn text(x: f64) -> Option<String> {
        x.is_finite().then(|| format!("{x:.16e}"))
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        match text(*x) {
            Some(t) => RawValue::from_string(t).map_err(serde::ser::Error::custom)?.serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }

    #[derive(Serialize, Deserialize)]
    #[serde(transparent)]
    pub struct Real(#[serde(with = "self")] pub f64);

    pub mod map {
        use super::Real;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};
        use std::collections::BTreeMap;

        pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
            m.iter().map(|(k, v)| (k, Real(*v))).collect::<BTreeMap<_, _>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
            Ok(BTreeMap::<String, Real>::deserialize(d)?.into_iter().map(|(k, v)| (k, v.0)).collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    #[serde(with = "real")]
    pub residual: f64,
}

impl Check {
    /// Passes iff `residual <= threshold`.
    pub fn at_most(residual: f64, threshold: f64) -> Self {
        Check { pass: residual <= threshold, residual }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Dims {
    pub g: usize,
    pub k: usize,
    pub p: usize,
    pub tangent: usize,
    pub normal: usize,
    pub first_normal: usize,
    pub osculating: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HolDims {
    pub ambient: usize,
    pub plus: usize,
    pub minus: usize,
    pub extrinsic: usize,
    pub codim: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(with = "real")]
    pub tol: f64,
    #[serde(with = "real")]
    pub ode_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tol: crate::linalg::DEFAULT_TOL, ode_step: 1e-3 }
    }
}

impl Tolerances {
    /// Bound for algebraic identities: `10 tol`.
    pub fn identity(&self) -> f64 {
        10.0 * self.tol
    }

    /// Bound for invariance and Hermitian checks: `tol`.
    pub fn tight(&self) -> f64 {
        self.tol
    }

    /// Bound for exact structural identities: `tol / 10`.
    pub fn exact(&self) -> f64 {
        0.1 * self.tol
    }

    /// Bound for integrated quantities: `1000 tol`.
    pub fn transport(&self) -> f64 {
        1000.0 * self.tol
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Classification {
    pub case: String,
    pub expected_codim: Option<i64>,
    pub accepted_extrinsic_dims: Vec<usize>,
    pub computed_extrinsic_dim: usize,
    pub computed_codim: i64,
    pub pass: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub model: String,
    pub jet: String,
    #[serde(with = "real")]
    pub epsilon: f64,
    #[serde(with = "real")]
    pub c: f64,
    pub dims: Dims,
    pub hol: HolDims,
    pub hermitian: bool,
    pub checks: BTreeMap<String, Check>,
    pub classification: Classification,
    /// Computed values that carry no pass/fail verdict.
    #[serde(with = "real::map")]
    pub diagnostics: BTreeMap<String, f64>,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub error: Option<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.classification.pass && self.checks.values().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, c)| !c.pass).map(|(k, _)| k.as_str()).collect()
    }

    /// Sort key for merged output.
    pub fn label(&self) -> String {
        match self.jet.as_str() {
            "family" => format!("{} c={}", self.model, self.c),
            other => format!("{} {}", self.model, other),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Short multi-line text summary.
    pub fn summary(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let d = &self.dims;
        let h = &self.hol;
        let _ = writeln!(s, "{} [{} jet, c={}, eps={:+}]", self.model, self.jet, self.c, self.epsilon);
        let _ = writeln!(
            s,
            "  dims g/k/p={}/{}/{} tangent={} normal={} first_normal={} osculating={}",
            d.g, d.k, d.p, d.tangent, d.normal, d.first_normal, d.osculating
        );
        let _ = writeln!(
            s,
            "  hol ambient={} plus={} minus={} extrinsic={} codim={} hermitian={}",
            h.ambient, h.plus, h.minus, h.extrinsic, h.codim, self.hermitian
        );
        let cl = &self.classification;
        let expect = match (cl.expected_codim, cl.accepted_extrinsic_dims.is_empty()) {
            (Some(c), _) => format!("expected codim {c}"),
            (None, false) => format!("accepted dims {:?}", cl.accepted_extrinsic_dims),
            (None, true) => "no expectation".to_string(),
        };
        let _ = writeln!(s, "  case {}: {expect}, {} [{}]", cl.case, cl.note, if cl.pass { "ok" } else { "MISMATCH" });
        for (name, c) in &self.checks {
            let _ = writeln!(s, "  {:<5} {name:<36} {:.3e}", if c.pass { "ok" } else { "FAIL" }, c.residual);
        }
        for (name, v) in &self.diagnostics {
            let _ = writeln!(s, "  info  {name:<36} {v:.6e}");
        }
        if let Some(e) = &self.error {
            let _ = writeln!(s, "  error: {e}");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub pass: bool,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub reports: Vec<VerificationReport>,
}

impl AggregateReport {
    pub fn new(mut reports: Vec<VerificationReport>, tolerances: Tolerances, seed: u64) -> Self {
        reports.sort_by_key(|r| r.label());
        AggregateReport { pass: reports.iter().all(|r| r.passed()), tolerances, seed, reports }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
