//! Holonomy algebras of the ambient space and of the restricted tangent
//! bundle along a symmetric submanifold, computed at one point.
//!
//! Operators on the osculating space `O` are kept at full size as
//! `P_O A P_O`, after checking that `A` preserves `O`.

mod classify;
mod transport;

pub use classify::{classify, RunSettings};
pub use transport::{
    mu_pair_residual, mu_single_residual, transport_mu, transport_stability, TransportResiduals,
};

use crate::liealg::{close_subspace, closure_residual, LieError, MatrixLieAlgebra};
use crate::linalg::{flatten, least_squares_solve, unflatten, LinalgError, Matrix, Subspace, Vector};
use crate::submanifold::{GradedSplit, JetError, TwoJet};
use crate::symspace::{SymSpaceError, SymmetricSpaceModel};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HolonomyError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    SymSpace(#[from] SymSpaceError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("curvature generator does not preserve the osculating space (residual {0:e}); the jet is not parallel")]
    OsculatingInvariance(f64),
    #[error("step size {step} is too small for duration {duration}")]
    StepTooSmall { step: f64, duration: f64 },
    #[error("transported frame became singular")]
    SingularTransport,
    #[error("transport direction is not tangent (residual {0:e})")]
    NotTangent(f64),
}

pub type Result<T> = std::result::Result<T, HolonomyError>;

/// Certificate residuals of a computed extrinsic holonomy algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificates {
    /// `dim plus + dim minus - dim extrinsic`.
    pub dim_defect: usize,
    /// Largest odd part of `hol_plus` or even part of `hol_minus`.
    pub graded: f64,
    pub closure: f64,
    pub stability: f64,
    pub sigma: f64,
    /// Largest part of an element acting outside `O`.
    pub outside_osculating: f64,
}

#[derive(Debug, Clone)]
pub struct HolonomyResult {
    pub ambient: Subspace,
    pub plus: Subspace,
    pub minus: Subspace,
    pub extrinsic: Subspace,
    pub codim: i64,
    pub certificates: Certificates,
}

fn op_basis(s: &Subspace, n: usize) -> Vec<Matrix> {
    s.basis().iter().map(|b| unflatten(b, n)).collect()
}

/// Bracket-closed span of the curvature operators `R(b_i, b_j)`.
pub fn hol_ambient(model: &SymmetricSpaceModel) -> Result<Subspace> {
    let d = model.dim_p();
    let tol = model.tol();
    if model.is_flat() {
        return Ok(Subspace::zero(d * d, tol));
    }
    let e = |i: usize| Vector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 });
    let mut gens = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            gens.push(flatten(&model.curvature_op(&e(i), &e(j))?));
        }
    }
    Ok(close_subspace(Subspace::span(d * d, &gens, tol)?, d)?)
}

/// Span of `[A, B]` over ONB elements of `s`.
pub fn commutator_of(s: &Subspace, n: usize) -> Result<Subspace> {
    let ops = op_basis(s, n);
    let mut gens = Vec::new();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            gens.push(flatten(&(&ops[i] * &ops[j] - &ops[j] * &ops[i])));
        }
    }
    Ok(Subspace::span(n * n, &gens, s.tol())?)
}

/// Isotropy image of `[p, p]`.
pub fn isotropy_of_pp(model: &SymmetricSpaceModel) -> Result<Subspace> {
    let d = model.dim_p();
    let e = |i: usize| Vector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 });
    let mut gens = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let w = model.g().bracket_coords(&model.p_to_g(&e(i)), &model.p_to_g(&e(j)));
            gens.push(flatten(&model.isotropy_op(&w)?));
        }
    }
    Ok(Subspace::span(d * d, &gens, model.tol())?)
}

fn restrict_to_osculating(a: &Matrix, po: &Matrix, limit: f64) -> Result<Matrix> {
    let n = po.nrows();
    let leak = ((Matrix::identity(n, n) - po) * a * po).norm();
    if leak > limit {
        return Err(HolonomyError::OsculatingInvariance(leak));
    }
    Ok(po * a * po)
}

/// Span of the osculating restrictions of `R(x,y)` for tangent `x, y` and
/// of `R(xi, eta)` for first-normal `xi, eta`.
pub fn hol_plus(jet: &TwoJet) -> Result<Subspace> {
    let d = jet.dim_p();
    let tol = jet.tangent().tol();
    let po = jet.second_osculating().projector();
    let limit = 10.0 * tol;
    let mut gens = Vec::new();
    for s in [jet.tangent().clone(), jet.first_normal()] {
        let b = s.basis();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                let r = jet.model().curvature_op(&b[i], &b[j])?;
                gens.push(flatten(&restrict_to_osculating(&r, &po, limit)?));
            }
        }
    }
    Ok(Subspace::span(d * d, &gens, tol)?)
}

/// Span of `[h(x), A]` over tangent ONB `x` and ONB `A` of `plus`.
pub fn hol_minus(jet: &TwoJet, plus: &Subspace) -> Result<Subspace> {
    let d = jet.dim_p();
    let mut gens = Vec::new();
    for a in op_basis(plus, d) {
        for h in jet.h_ops() {
            gens.push(flatten(&(h * &a - &a * h)));
        }
    }
    Ok(Subspace::span(d * d, &gens, jet.tangent().tol())?)
}

/// Reflection that is `+1` on the normal space and `-1` on the tangent space.
pub fn sigma_perp(jet: &TwoJet) -> Matrix {
    jet.normal().projector() - jet.tangent().projector()
}

pub fn extrinsic_hol(jet: &TwoJet) -> Result<HolonomyResult> {
    let d = jet.dim_p();
    let ambient = hol_ambient(jet.model())?;
    let plus = hol_plus(jet)?;
    let minus = hol_minus(jet, &plus)?;
    let extrinsic = plus.sum(&minus)?;
    let split = GradedSplit::new(jet.tangent());
    let mut graded: f64 = 0.0;
    for a in op_basis(&plus, d) {
        graded = graded.max(split.minus(&a).norm());
    }
    for a in op_basis(&minus, d) {
        graded = graded.max(split.plus(&a).norm());
    }
    let ops = op_basis(&extrinsic, d);
    let mut stability: f64 = 0.0;
    for h in jet.h_ops() {
        for a in &ops {
            stability = stability.max(extrinsic.residual(&flatten(&(h * a - a * h)))?);
        }
    }
    let sigma = sigma_perp(jet);
    let mut sig: f64 = 0.0;
    for a in &ops {
        sig = sig.max(extrinsic.residual(&flatten(&(&sigma * a * &sigma)))?);
    }
    for a in op_basis(&plus, d) {
        sig = sig.max((&sigma * &a * &sigma - &a).norm());
    }
    for a in op_basis(&minus, d) {
        sig = sig.max((&sigma * &a * &sigma + &a).norm());
    }
    let po = jet.second_osculating().projector();
    let outside = ops.iter().map(|a| (a - &po * a * &po).norm()).fold(0.0, f64::max);
    let certificates = Certificates {
        dim_defect: plus.dim() + minus.dim() - extrinsic.dim(),
        graded,
        closure: closure_residual(&extrinsic, d)?,
        stability,
        sigma: sig,
        outside_osculating: outside,
    };
    Ok(HolonomyResult {
        codim: ambient.dim() as i64 - extrinsic.dim() as i64,
        ambient,
        plus,
        minus,
        extrinsic,
        certificates,
    })
}

/// `max(‖P_T j t‖, ‖P_N j xi‖)` over ONB vectors; infinite when the
/// tangent and normal dimensions differ.
pub fn lagrangian_residual(jet: &TwoJet, j: &Matrix) -> f64 {
    if jet.tangent().dim() != jet.normal().dim() {
        return f64::INFINITY;
    }
    let pt = jet.tangent().projector();
    let pn = jet.normal().projector();
    let a = jet.tangent().basis().iter().map(|t| (&pt * j * t).norm());
    let b = jet.normal().basis().iter().map(|n| (&pn * j * n).norm());
    a.chain(b).fold(0.0, f64::max)
}

/// Least-squares solution of `h(x) = j`, with `x` in tangent ONB
/// coordinates, and its residual.
pub fn solve_h_equals_j(jet: &TwoJet, j: &Matrix) -> Result<(Vector, f64)> {
    let d = jet.dim_p();
    let cols: Vec<Vector> = jet.h_ops().iter().map(flatten).collect();
    let map = if cols.is_empty() { Matrix::zeros(d * d, 0) } else { Matrix::from_columns(&cols) };
    Ok(least_squares_solve(&map, &flatten(j))?)
}

/// `max |trace(j A)|` over ONB elements `A` of `hol`.
pub fn j_orthogonality(hol: &Subspace, j: &Matrix) -> f64 {
    let n = j.nrows();
    op_basis(hol, n).iter().map(|a| (j * a).trace().abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CentralizerDiagnostic {
    /// Dimension of the centralizer of `hol(N)+` in `so(p)`, intersected with `hol(N)-`.
    pub dim: usize,
    pub tangent_dim: usize,
    /// `dim < m` implies a nonzero `hol_minus`.
    pub implication_holds: bool,
}

pub fn centralizer_diagnostic(jet: &TwoJet, hol: &HolonomyResult) -> Result<CentralizerDiagnostic> {
    let d = jet.dim_p();
    let split = GradedSplit::new(jet.tangent());
    let amb_plus = hol.ambient.intersection(&split.so_plus())?;
    let amb_minus = hol.ambient.intersection(&split.so_minus())?;
    let so = MatrixLieAlgebra::so(d, jet.tangent().tol())?;
    let c = so.centralizer_in(&amb_plus)?;
    let dim = c.intersection(&amb_minus)?.dim();
    let m = jet.tangent().dim();
    Ok(CentralizerDiagnostic { dim, tangent_dim: m, implication_holds: dim >= m || hol.minus.dim() > 0 })
}
