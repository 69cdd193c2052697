use super::{GradedSplit, Result, TwoJet};
use crate::linalg::{flatten, Matrix, Subspace, Vector};
use crate::symspace::SymmetricSpaceModel;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn bracket(a: &Matrix, b: &Matrix) -> Matrix {
    a * b - b * a
}

fn random_in(s: &Subspace, rng: &mut ChaCha8Rng) -> Vector {
    s.basis()
        .iter()
        .fold(Vector::zeros(s.ambient_dim()), |acc, b| acc + b * rng.gen_range(-1.0..1.0))
}

fn curvature(jet: &TwoJet, x: &Vector, y: &Vector) -> Result<Matrix> {
    Ok(jet.model().curvature_op(x, y)?)
}

/// `h(R^M(x,y)z) = [R^N(x,y) - [h(x),h(y)], h(z)]` over tangent ONB
/// triples, with `R^M` the tangent block of `R^N - [h,h]`.
pub fn check_semiparallel(jet: &TwoJet) -> Result<f64> {
    let t = jet.tangent().basis();
    let pt = jet.tangent().projector();
    let h = jet.h_ops();
    let mut worst: f64 = 0.0;
    for i in 0..t.len() {
        for j in 0..t.len() {
            let c = curvature(jet, &t[i], &t[j])? - bracket(&h[i], &h[j]);
            for k in 0..t.len() {
                let rm = &pt * &c * &t[k];
                let lhs = jet.h(&rm);
                let rhs = bracket(&c, &h[k]);
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    Ok(worst)
}

/// Largest component of `R(u,v)w` leaving `s`, over ONB triples of `s`.
pub fn check_curvature_invariance(model: &SymmetricSpaceModel, s: &Subspace) -> Result<f64> {
    let q = Matrix::identity(s.ambient_dim(), s.ambient_dim()) - s.projector();
    let b = s.basis();
    let mut worst: f64 = 0.0;
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            let r = model.curvature_op(&b[i], &b[j])?;
            for w in b {
                worst = worst.max((&q * &r * w).norm());
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalResiduals {
    /// The quadratic identity for `R(h(x,x), h(y,y))` on the osculating space.
    pub identity: f64,
    /// `R(xi, eta)` preserves the osculating space.
    pub preserves_osculating: f64,
    /// The restriction of `R(xi, eta)` is block diagonal.
    pub even_on_osculating: f64,
}

impl FundamentalResiduals {
    pub fn max(&self) -> f64 {
        self.identity.max(self.preserves_osculating).max(self.even_on_osculating)
    }
}

pub fn check_fundamental(jet: &TwoJet) -> Result<FundamentalResiduals> {
    let d = jet.dim_p();
    let osc = jet.second_osculating();
    let po = osc.projector();
    let qo = Matrix::identity(d, d) - &po;
    let t = jet.tangent().basis();
    let h = jet.h_ops();
    let mut identity: f64 = 0.0;
    for i in 0..t.len() {
        for j in 0..t.len() {
            let (x, y) = (&t[i], &t[j]);
            let lhs = curvature(jet, &(&h[i] * x), &(&h[j] * y))?;
            let hxhy = &h[i] * &h[j];
            let rhs = bracket(&h[i], &bracket(&h[j], &curvature(jet, x, y)?))
                - curvature(jet, &(&hxhy * x), y)?
                - curvature(jet, x, &(&hxhy * y))?;
            identity = identity.max(((lhs - rhs) * &po).norm());
        }
    }
    let split = GradedSplit::new(jet.tangent());
    let n1 = jet.first_normal();
    let nb = n1.basis();
    let (mut preserves, mut even): (f64, f64) = (0.0, 0.0);
    for a in 0..nb.len() {
        for b in a + 1..nb.len() {
            let r = curvature(jet, &nb[a], &nb[b])?;
            preserves = preserves.max((&qo * &r * &po).norm());
            even = even.max(split.minus(&(&po * &r * &po)).norm());
        }
    }
    Ok(FundamentalResiduals { identity, preserves_osculating: preserves, even_on_osculating: even })
}

/// Returns whether the first normal space is the whole normal space, with
/// the largest residual of the normal basis against it.
pub fn check_one_full(jet: &TwoJet) -> Result<(bool, f64)> {
    let n1 = jet.first_normal();
    let r = n1.containment_residual(jet.normal())?;
    Ok((n1.dim() == jet.normal().dim() && r <= jet.tangent().tol(), r))
}

/// Returns whether `x -> h(x)` is injective, with its smallest singular value.
pub fn check_nondegenerate(jet: &TwoJet) -> Result<(bool, f64)> {
    let m = jet.h_ops().len();
    if m == 0 {
        return Ok((true, f64::INFINITY));
    }
    let cols: Vec<Vector> = jet.h_ops().iter().map(flatten).collect();
    let a = Matrix::from_columns(&cols);
    let sv = a.singular_values();
    let smin = sv.min();
    let smax = sv.max();
    Ok((smin > jet.tangent().tol() * smax.max(1.0), smin))
}

/// Returns whether every `h(x)` lies in the isotropy image, with the
/// largest residual.
pub fn check_eschenburg(jet: &TwoJet) -> Result<(bool, f64)> {
    let iso = jet.model().isotropy_image()?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for h in jet.h_ops() {
        worst = worst.max(iso.residual(&flatten(h))?);
        scale = scale.max(h.norm());
    }
    Ok((worst <= jet.tangent().tol() * scale, worst))
}

/// Largest operator norm of `h`.
pub fn check_totally_geodesic(jet: &TwoJet) -> f64 {
    jet.h_ops().iter().map(|h| h.norm()).fold(0.0, f64::max)
}

fn r_flat(jet: &TwoJet, v: [&Vector; 4]) -> Result<f64> {
    Ok((curvature(jet, v[0], v[1])? * v[2]).dot(v[3]))
}

/// `h(x)` acts as a derivation killing the curvature tensor on the
/// osculating space, sampled on random tuples.
pub fn check_fetth3(jet: &TwoJet, rng: &mut ChaCha8Rng, samples: usize) -> Result<f64> {
    let osc = jet.second_osculating();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_in(jet.tangent(), rng);
        let hx = jet.h(&x);
        let v: Vec<Vector> = (0..4).map(|_| random_in(&osc, rng)).collect();
        let mut total = 0.0;
        for i in 0..4 {
            let mut w: Vec<Vector> = v.clone();
            w[i] = &hx * &v[i];
            total += r_flat(jet, [&w[0], &w[1], &w[2], &w[3]])?;
        }
        worst = worst.max(total.abs());
    }
    Ok(worst)
}

/// `[h(x), R(y1,y2)] v = R(h(x)y1, y2) v + R(y1, h(x)y2) v` for tangent
/// ONB vectors and `v` in the osculating space.
pub fn check_parallel1(jet: &TwoJet) -> Result<f64> {
    let po = jet.second_osculating().projector();
    let t = jet.tangent().basis();
    let mut worst: f64 = 0.0;
    for hx in jet.h_ops() {
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                let lhs = bracket(hx, &curvature(jet, &t[i], &t[j])?);
                let rhs = curvature(jet, &(hx * &t[i]), &t[j])? + curvature(jet, &t[i], &(hx * &t[j]))?;
                worst = worst.max(((lhs - rhs) * &po).norm());
            }
        }
    }
    Ok(worst)
}

/// Graded bracket rules `[+,+], [-,-] in +` and `[+,-] in -` on random
/// skew operators.
pub fn check_graded_rules(jet: &TwoJet, rng: &mut ChaCha8Rng, samples: usize) -> f64 {
    let d = jet.dim_p();
    let split = GradedSplit::new(jet.tangent());
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut skew = || {
            let a = Matrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
            &a - a.transpose()
        };
        let (a, b) = (skew(), skew());
        let (ap, am, bp, bm) = (split.plus(&a), split.minus(&a), split.plus(&b), split.minus(&b));
        worst = worst
            .max(split.minus(&bracket(&ap, &bp)).norm())
            .max(split.minus(&bracket(&am, &bm)).norm())
            .max(split.plus(&bracket(&ap, &bm)).norm());
    }
    worst
}

/// `<h(x,y), xi> = <y, S_xi x>` on random triples.
pub fn check_shape_adjoint(jet: &TwoJet, rng: &mut ChaCha8Rng, samples: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_in(jet.tangent(), rng);
        let y = random_in(jet.tangent(), rng);
        let xi = random_in(jet.normal(), rng);
        let lhs = jet.h_bilinear(&x, &y).dot(&xi);
        let rhs = y.dot(&jet.shape(&xi, &x));
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

/// Largest component of any `h(x)` in the block-diagonal part.
pub fn check_h_odd(jet: &TwoJet) -> f64 {
    let split = GradedSplit::new(jet.tangent());
    jet.h_ops().iter().map(|h| split.plus(h).norm()).fold(0.0, f64::max)
}
