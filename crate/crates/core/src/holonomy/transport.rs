use super::{HolonomyError, HolonomyResult, Result};
use crate::linalg::{expm, flatten, unflatten, Matrix, Subspace, Vector};
use crate::submanifold::TwoJet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const MAX_STEPS: f64 = 1e7;

/// Integrates `mu' = mu h(c'(t))`, `mu(0) = I`, along a broken geodesic
/// whose segments have constant tangent direction and the given duration.
pub fn transport_mu(jet: &TwoJet, segments: &[(Vector, f64)], step: f64) -> Result<Matrix> {
    let d = jet.dim_p();
    let tol = jet.tangent().tol();
    let mut mu = Matrix::identity(d, d);
    for (x, duration) in segments {
        let ratio = duration / step;
        if step.is_nan() || step <= 0.0 || !ratio.is_finite() || ratio > MAX_STEPS {
            return Err(HolonomyError::StepTooSmall { step, duration: *duration });
        }
        let off = jet.tangent().residual(x)?;
        if off > 10.0 * tol * x.norm().max(1.0) {
            return Err(HolonomyError::NotTangent(off));
        }
        let n = ratio.ceil().max(1.0) as usize;
        let a = jet.h(x) * (duration / n as f64);
        // one RK4 step of a linear autonomous system is its quartic Taylor polynomial
        let a2 = &a * &a;
        let a3 = &a2 * &a;
        let a4 = &a3 * &a;
        let stepper = Matrix::identity(d, d) + &a + a2 / 2.0 + a3 / 6.0 + a4 / 24.0;
        for _ in 0..n {
            mu = &mu * &stepper;
        }
    }
    Ok(mu)
}

fn random_unit(s: &Subspace, rng: &mut ChaCha8Rng) -> Vector {
    loop {
        let v = s
            .basis()
            .iter()
            .fold(Vector::zeros(s.ambient_dim()), |acc, b| acc + b * rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 {
            return v / n;
        }
    }
}

/// `‖mu - expm(t h(x))‖` on random single segments.
pub fn mu_single_residual(jet: &TwoJet, rng: &mut ChaCha8Rng, step: f64, samples: usize) -> Result<f64> {
    if jet.tangent().dim() == 0 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_unit(jet.tangent(), rng);
        let t = rng.gen_range(0.1..1.0);
        let mu = transport_mu(jet, &[(x.clone(), t)], step)?;
        worst = worst.max((mu - expm(&(jet.h(&x) * t))?).norm());
    }
    Ok(worst)
}

/// `‖mu - expm(h(x)) expm(h(y))‖` on random two-segment paths.
pub fn mu_pair_residual(jet: &TwoJet, rng: &mut ChaCha8Rng, step: f64, samples: usize) -> Result<f64> {
    if jet.tangent().dim() == 0 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_unit(jet.tangent(), rng);
        let y = random_unit(jet.tangent(), rng);
        let mu = transport_mu(jet, &[(x.clone(), 1.0), (y.clone(), 1.0)], step)?;
        let exact = expm(&jet.h(&x))? * expm(&jet.h(&y))?;
        worst = worst.max((mu - exact).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransportResiduals {
    /// Largest distance of `mu A mu^-1` from the extrinsic holonomy algebra.
    pub ad_stability: f64,
    /// `R(mu y1, mu y2) - mu R(y1, y2) mu^-1` on the osculating space.
    pub curvature: f64,
    pub orthogonality: f64,
    pub preserves_osculating: f64,
}

/// Transports along `paths` random broken geodesics with one to three
/// segments each.
pub fn transport_stability(
    jet: &TwoJet,
    hol: &HolonomyResult,
    rng: &mut ChaCha8Rng,
    paths: usize,
    step: f64,
) -> Result<TransportResiduals> {
    let d = jet.dim_p();
    let mut out = TransportResiduals::default();
    if jet.tangent().dim() == 0 {
        return Ok(out);
    }
    let osc = jet.second_osculating();
    let po = osc.projector();
    let qo = Matrix::identity(d, d) - &po;
    let ops: Vec<Matrix> = hol.extrinsic.basis().iter().map(|b| unflatten(b, d)).collect();
    for _ in 0..paths {
        let segs: Vec<(Vector, f64)> = (0..rng.gen_range(1..=3))
            .map(|_| (random_unit(jet.tangent(), rng), rng.gen_range(0.1..1.0)))
            .collect();
        let mu = transport_mu(jet, &segs, step)?;
        let mu_inv = mu.clone().try_inverse().ok_or(HolonomyError::SingularTransport)?;
        out.orthogonality = out.orthogonality.max((mu.transpose() * &mu - Matrix::identity(d, d)).norm());
        out.preserves_osculating = out.preserves_osculating.max((&qo * &mu * &po).norm());
        for a in &ops {
            let conj = &mu * a * &mu_inv;
            out.ad_stability = out.ad_stability.max(hol.extrinsic.residual(&flatten(&conj))?);
        }
        if osc.dim() > 0 {
            let y1 = random_unit(&osc, rng);
            let y2 = random_unit(&osc, rng);
            let model = jet.model();
            let lhs = model.curvature_op(&(&mu * &y1), &(&mu * &y2))?;
            let rhs = &mu * model.curvature_op(&y1, &y2)? * &mu_inv;
            out.curvature = out.curvature.max(((lhs - rhs) * &po).norm());
        }
    }
    Ok(out)
}
