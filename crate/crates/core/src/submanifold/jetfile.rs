//! Plain-text jet files.
//!
//! ```text
//! # comment
//! model sphere4
//! metric_scale 1.0        (optional)
//! c 1.0                   (optional)
//! tangent 2
//! 1 0 0 0
//! 0 1 0 0
//! h 0
//! <dim_p rows of dim_p numbers>
//! h 1
//! <dim_p rows of dim_p numbers>
//! ```
//!
//! Vectors are p-vector coordinates of the named catalog model; matrices
//! are row-major. A tangent basis that is not orthonormal is replaced by
//! its QR orthonormalization, and the operators are transformed to match.

use super::{JetError, JetKind, TwoJet};
use crate::linalg::{Matrix, Vector};
use crate::symspace::model_by_name;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JetFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("jet file is missing '{0}'")]
    Missing(&'static str),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Parsed contents of a jet file.
#[derive(Debug, Clone, PartialEq)]
pub struct JetFile {
    pub model: String,
    pub metric_scale: f64,
    pub c: f64,
    pub tangent: Vec<Vector>,
    pub h_ops: Vec<Matrix>,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let text = raw.split('#').next().unwrap_or("").trim();
            if !text.is_empty() {
                self.last = i + 1;
                return Some((i + 1, text.split_whitespace().collect()));
            }
        }
        None
    }

    fn numbers(&mut self, n: usize) -> Result<Vec<f64>, JetFileError> {
        let (line, toks) = self.next().ok_or(JetFileError::Syntax { line: self.last + 1, msg: "unexpected end of file".into() })?;
        if toks.len() != n {
            return Err(JetFileError::Syntax { line, msg: format!("expected {n} numbers, found {}", toks.len()) });
        }
        toks.iter()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| JetFileError::Syntax { line, msg: format!("invalid number '{t}'") })
            })
            .collect()
    }
}

fn scalar(line: usize, toks: &[&str]) -> Result<f64, JetFileError> {
    match toks {
        [_, v] => v
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| JetFileError::Syntax { line, msg: format!("invalid number '{v}'") }),
        _ => Err(JetFileError::Syntax { line, msg: format!("'{}' takes one value", toks[0]) }),
    }
}

pub fn parse_jet_file(text: &str, tol: f64) -> Result<JetFile, JetFileError> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let mut model: Option<String> = None;
    let mut metric_scale = 1.0;
    let mut c = 1.0;
    let mut tangent: Option<Vec<Vector>> = None;
    let mut h_ops: Vec<Option<Matrix>> = Vec::new();
    while let Some((line, toks)) = lines.next() {
        match toks[0] {
            "model" if toks.len() == 2 => model = Some(toks[1].to_string()),
            "metric_scale" => metric_scale = scalar(line, &toks)?,
            "c" => c = scalar(line, &toks)?,
            "tangent" | "h" => {
                let name = model.as_deref().ok_or(JetFileError::Missing("model"))?;
                let d = model_by_name(name, tol).map_err(JetError::from)?.dim_p();
                let idx = match toks.as_slice() {
                    [_, n] => n.parse::<usize>().ok(),
                    _ => None,
                }
                .ok_or_else(|| JetFileError::Syntax { line, msg: format!("'{}' takes one integer", toks[0]) })?;
                if toks[0] == "tangent" {
                    let mut vs = Vec::with_capacity(idx);
                    for _ in 0..idx {
                        vs.push(Vector::from_vec(lines.numbers(d)?));
                    }
                    h_ops = vec![None; idx];
                    tangent = Some(vs);
                } else {
                    if idx >= h_ops.len() {
                        return Err(JetFileError::Syntax { line, msg: format!("operator index {idx} out of range") });
                    }
                    let mut rows = Vec::with_capacity(d * d);
                    for _ in 0..d {
                        rows.extend(lines.numbers(d)?);
                    }
                    h_ops[idx] = Some(Matrix::from_row_slice(d, d, &rows));
                }
            }
            other => return Err(JetFileError::Syntax { line, msg: format!("unknown keyword '{other}'") }),
        }
    }
    let model = model.ok_or(JetFileError::Missing("model"))?;
    let tangent = tangent.ok_or(JetFileError::Missing("tangent"))?;
    let h_ops = h_ops.into_iter().collect::<Option<Vec<_>>>().ok_or(JetFileError::Missing("h"))?;
    if metric_scale.is_nan() || metric_scale <= 0.0 {
        return Err(JetFileError::Syntax { line: 0, msg: "metric_scale must be positive".into() });
    }
    Ok(JetFile { model, metric_scale, c, tangent, h_ops })
}

impl JetFile {
    /// Builds the jet, orthonormalizing the tangent basis when needed.
    pub fn into_jet(self, tol: f64) -> Result<TwoJet, JetFileError> {
        let model = model_by_name(&self.model, tol).map_err(JetError::from)?;
        let model = Arc::new(if self.metric_scale == 1.0 { model } else { model.with_metric_scale(self.metric_scale) });
        let d = model.dim_p();
        let m = self.tangent.len();
        if m == 0 {
            return Ok(TwoJet::new(model, vec![], vec![], self.c, JetKind::Custom)?);
        }
        let b = Matrix::from_columns(&self.tangent);
        if (b.transpose() * &b - Matrix::identity(m, m)).norm() <= 1e-12 {
            return Ok(TwoJet::new(model, self.tangent, self.h_ops, self.c, JetKind::Custom)?);
        }
        let qr = b.clone().qr();
        let (q, r) = (qr.q(), qr.r());
        let rinv = r.clone().try_inverse().filter(|_| r.diagonal().iter().all(|x| x.abs() > tol)).ok_or(
            JetError::Invariant { what: "tangent vectors are linearly dependent", residual: 0.0 },
        )?;
        let mut tangent = Vec::with_capacity(m);
        let mut h_ops = Vec::with_capacity(m);
        for j in 0..m {
            tangent.push(q.column(j).clone_owned());
            // q_j = sum_i b_i (R^-1)_{ij}
            let h = (0..m).fold(Matrix::zeros(d, d), |acc, i| acc + &self.h_ops[i] * rinv[(i, j)]);
            h_ops.push(h);
        }
        Ok(TwoJet::new(model, tangent, h_ops, self.c, JetKind::Custom)?)
    }
}

/// Serializes a jet with 17 significant digits per entry.
pub fn write_jet_file(jet: &TwoJet) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let num = |x: f64| format!("{x:.16e}");
    let _ = writeln!(s, "model {}", jet.model().name());
    let _ = writeln!(s, "metric_scale {}", num(jet.model().metric_scale()));
    let _ = writeln!(s, "c {}", num(jet.c()));
    let _ = writeln!(s, "tangent {}", jet.tangent().dim());
    for t in jet.tangent().basis() {
        let _ = writeln!(s, "{}", t.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" "));
    }
    for (i, h) in jet.h_ops().iter().enumerate() {
        let _ = writeln!(s, "h {i}");
        for r in 0..h.nrows() {
            let _ = writeln!(s, "{}", h.row(r).iter().map(|x| num(*x)).collect::<Vec<_>>().join(" "));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submanifold::{family_jet, veronese_sphere_jet};
    use crate::symspace::find_admissible;

    const TOL: f64 = 1e-9;

    #[test]
    fn round_trip_preserves_jet() {
        let m = Arc::new(model_by_name("quadric3", TOL).unwrap());
        let x = find_admissible(&m).unwrap();
        let jet = family_jet(m, &x, 1.0).unwrap();
        let text = write_jet_file(&jet);
        let back = parse_jet_file(&text, TOL).unwrap().into_jet(TOL).unwrap();
        assert_eq!(back.kind(), JetKind::Custom);
        for (a, b) in jet.h_ops().iter().zip(back.h_ops()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(jet.tangent().equal(back.tangent()).unwrap().0);
    }

    #[test]
    fn metric_scale_survives_round_trip() {
        let jet = veronese_sphere_jet(TOL).unwrap();
        let back = parse_jet_file(&write_jet_file(&jet), TOL).unwrap();
        assert_eq!(back.metric_scale, jet.model().metric_scale());
    }

    #[test]
    fn skewed_tangent_basis_is_orthonormalized() {
        // sphere4 great 2-sphere: h = 0 on span{e1, e1 + e2}
        let text = "model sphere4\ntangent 2\n1 0 0 0\n1 1 0 0\nh 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\nh 1\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n";
        let jet = parse_jet_file(text, TOL).unwrap().into_jet(TOL).unwrap();
        assert_eq!(jet.tangent().dim(), 2);
        assert!(jet.tangent().contains(&Vector::from_vec(vec![0.0, 1.0, 0.0, 0.0])).unwrap().0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_jet_file("model sphere4\ntangent 1\n1 0 0\n", TOL).unwrap_err();
        assert!(matches!(err, JetFileError::Syntax { line: 3, .. }), "{err}");
        let err = parse_jet_file("bogus 1\n", TOL).unwrap_err();
        assert!(matches!(err, JetFileError::Syntax { line: 1, .. }));
        assert!(matches!(parse_jet_file("model sphere4\n", TOL), Err(JetFileError::Missing("tangent"))));
        assert!(parse_jet_file("model nowhere\ntangent 1\n", TOL).is_err());
    }
}
