use super::{Result, SymSpaceError, SymmetricSpaceModel};
use crate::linalg::{null_space, sym_eig, Matrix, Subspace, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed for the root search, fixed so catalog results are reproducible.
const SEARCH_SEED: u64 = 0x5_eed0_fa11;

/// `X` in `p` with `ad(X)^3 = eps ad(X)`.
#[derive(Debug, Clone)]
pub struct AdmissibleElement {
    /// g coordinates.
    pub x: Vector,
    /// p-vector coordinates.
    pub x_p: Vector,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct Eigensplit {
    pub x: Vector,
    /// g coordinates.
    pub k0: Subspace,
    pub k_eps: Subspace,
    /// p-vector coordinates.
    pub p0: Subspace,
    pub p_eps: Subspace,
    /// `-eps ad(X)` on g coordinates.
    pub j: Matrix,
}

impl Eigensplit {
    /// `J y` in g coordinates for a p-vector `y`.
    pub fn j_of_p(&self, model: &SymmetricSpaceModel, y: &Vector) -> Vector {
        &self.j * model.p_to_g(y)
    }
}

/// `ad(X)` in the orthonormal g frame.
fn ad_orthonormal(model: &SymmetricSpaceModel, x: &Vector) -> Matrix {
    let (f, finv) = model.g_frame();
    finv * model.ad_g(x) * f
}

pub fn admissibility_residual(model: &SymmetricSpaceModel, x: &Vector) -> f64 {
    let a = ad_orthonormal(model, x);
    (&a * &a * &a - &a * model.epsilon()).norm()
}

/// Rescales `d` so that the nonzero eigenvalues of `ad(d)^2` equal eps.
/// Returns `None` when those eigenvalues do not form a single cluster.
fn rescale(model: &SymmetricSpaceModel, d: &Vector) -> Option<Vector> {
    let a = ad_orthonormal(model, d);
    let a2 = &a * &a;
    let sym = (&a2 + a2.transpose()) * 0.5;
    let (vals, _) = sym_eig(&sym, 1.0).ok()?;
    let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        return None;
    }
    let nonzero: Vec<f64> = vals.into_iter().filter(|v| v.abs() > 1e-6 * top).collect();
    let mu = nonzero[0];
    if nonzero.iter().any(|v| (v - mu).abs() > 1e-8 * top) {
        return None;
    }
    let ratio = model.epsilon() / mu;
    (ratio > 0.0).then(|| d * ratio.sqrt())
}

fn accept(model: &SymmetricSpaceModel, x: Vector) -> Option<AdmissibleElement> {
    let residual = admissibility_residual(model, &x);
    if x.norm() == 0.0 || residual > 10.0 * model.tol() {
        return None;
    }
    let x_p = model.g_to_p(&x).ok()?;
    Some(AdmissibleElement { x, x_p, residual })
}

/// Closed-form candidates first, then a restricted-root search.
pub fn find_admissible(model: &SymmetricSpaceModel) -> Result<AdmissibleElement> {
    for c in model.candidates() {
        if let Some(x) = rescale(model, c).and_then(|x| accept(model, x)) {
            return Ok(x);
        }
    }
    for d in root_search_directions(model)? {
        if let Some(x) = rescale(model, &d).and_then(|x| accept(model, x)) {
            return Ok(x);
        }
    }
    Err(SymSpaceError::NoAdmissible(model.name().to_string()))
}

/// Greedy maximal abelian subspace of `p`, as p-vectors.
pub(crate) fn maximal_abelian(model: &SymmetricSpaceModel, rng: &mut ChaCha8Rng) -> Result<Subspace> {
    let dp = model.dim_p();
    let dg = model.dim_g();
    let tol = model.tol();
    let random = |rng: &mut ChaCha8Rng| Vector::from_fn(dp, |_, _| rng.gen_range(-1.0..1.0));
    let mut a = Subspace::span(dp, &[random(rng)], tol)?;
    loop {
        // commutant: Y in p with [Y, H] = 0 for all H in a
        let mut m = Matrix::zeros(dg * a.dim(), dp);
        for (i, h) in a.basis().iter().enumerate() {
            let ad = model.ad_g(&model.p_to_g(h));
            for c in 0..dp {
                let e = Vector::from_fn(dp, |j, _| if j == c { 1.0 } else { 0.0 });
                let col = &ad * model.p_to_g(&e);
                m.view_mut((i * dg, c), (dg, 1)).copy_from(&col);
            }
        }
        let commutant = null_space(&m, 1e-8)?;
        if commutant.dim() <= a.dim() {
            return Ok(a);
        }
        let extra = commutant.intersection(&a.orthogonal_complement())?;
        let pick = extra
            .basis()
            .iter()
            .fold(Vector::zeros(dp), |acc, b| acc + b * rng.gen_range(-1.0..1.0));
        a = a.extend(&[pick])?;
    }
}

/// Restricted roots on `a`, one representative per pair of opposite roots.
pub(crate) fn restricted_roots(model: &SymmetricSpaceModel, a: &Subspace, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    let r = a.dim();
    let (f, finv) = model.g_frame();
    let ads: Vec<Matrix> = a.basis().iter().map(|h| &finv * model.ad_g(&model.p_to_g(h)) * &f).collect();
    let mut products = vec![vec![Matrix::zeros(0, 0); r]; r];
    let mut mix = Matrix::zeros(model.dim_g(), model.dim_g());
    for i in 0..r {
        for j in 0..r {
            products[i][j] = &ads[i] * &ads[j];
            if i <= j {
                mix += &products[i][j] * rng.gen_range(0.5..1.5);
            }
        }
    }
    let mix = (&mix + mix.transpose()) * 0.5;
    let Ok((_, vecs)) = sym_eig(&mix, 1.0) else { return Vec::new() };
    let eps = model.epsilon();
    let mut roots: Vec<Vector> = Vec::new();
    for c in 0..vecs.ncols() {
        let v = vecs.column(c).clone_owned();
        let q = Matrix::from_fn(r, r, |i, j| eps * (&products[i][j] * &v).dot(&v));
        let (m, qmm) = (0..r).map(|i| (i, q[(i, i)])).fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if qmm <= 1e-8 {
            continue;
        }
        let lambda = Vector::from_fn(r, |i, _| q[(i, m)] / qmm.sqrt());
        let seen = roots
            .iter()
            .any(|w| (w - &lambda).norm() < 1e-6 * lambda.norm() || (w + &lambda).norm() < 1e-6 * lambda.norm());
        if !seen {
            roots.push(lambda);
        }
    }
    roots
}

/// Lines in `a` cut out by `rank(a) - 1` independent roots, as g elements.
fn root_search_directions(model: &SymmetricSpaceModel) -> Result<Vec<Vector>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
    let a = maximal_abelian(model, &mut rng)?;
    let r = a.dim();
    let roots = restricted_roots(model, &a, &mut rng);
    let mut lines: Vec<Vector> = Vec::new();
    let push = |d: Vector, lines: &mut Vec<Vector>| {
        let d = &d / d.norm();
        if !lines.iter().any(|l| (l.dot(&d).abs() - 1.0).abs() < 1e-9) {
            lines.push(d);
        }
    };
    if r == 1 {
        push(Vector::from_element(1, 1.0), &mut lines);
    } else {
        for combo in combinations(roots.len(), r - 1) {
            let m = Matrix::from_fn(r - 1, r, |i, j| roots[combo[i]][j]);
            let ker = null_space(&m, 1e-8)?;
            if ker.dim() == 1 {
                push(ker.basis()[0].clone(), &mut lines);
            }
        }
    }
    let basis = a.basis_matrix();
    Ok(lines.into_iter().map(|c| model.p_to_g(&(&basis * c))).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Eigenspace decomposition of `k` and `p` under `ad(X)^2`.
pub fn eigensplit(model: &SymmetricSpaceModel, adm: &AdmissibleElement) -> Result<Eigensplit> {
    let tol = model.tol();
    if adm.residual > 10.0 * tol {
        return Err(SymSpaceError::NotAdmissible(adm.residual));
    }
    let eps = model.epsilon();
    let a = ad_orthonormal(model, &adm.x);
    let a2 = &a * &a;
    let dk = model.dim_k();
    let dp = model.dim_p();
    let split = |block: Matrix| -> Result<(Vec<Vector>, Vec<Vector>)> {
        let sym = (&block + block.transpose()) * 0.5;
        let (vals, vecs) = sym_eig(&sym, tol.max(1e-12))?;
        let (mut zero, mut nonzero) = (Vec::new(), Vec::new());
        for (i, v) in vals.iter().enumerate() {
            let col = vecs.column(i).clone_owned();
            if v.abs() <= 10.0 * tol {
                zero.push(col);
            } else if (v - eps).abs() <= 10.0 * tol {
                nonzero.push(col);
            } else {
                return Err(SymSpaceError::Degenerate(*v));
            }
        }
        Ok((zero, nonzero))
    };
    let (k0v, kev) = split(a2.view((0, 0), (dk, dk)).clone_owned())?;
    let (p0v, pev) = split(a2.view((dk, dk), (dp, dp)).clone_owned())?;
    let dg = model.dim_g();
    let to_g = |vs: Vec<Vector>| -> Result<Subspace> {
        let g: Vec<Vector> = vs.iter().map(|v| model.k_to_g(v)).collect();
        Ok(Subspace::span(dg, &g, tol)?)
    };
    Ok(Eigensplit {
        x: adm.x.clone(),
        k0: to_g(k0v)?,
        k_eps: to_g(kev)?,
        p0: Subspace::from_orthonormal(dp, p0v, 1e-10)?.with_tol(tol),
        p_eps: Subspace::from_orthonormal(dp, pev, 1e-10)?.with_tol(tol),
        j: model.ad_g(&adm.x) * (-eps),
    })
}

/// Residuals of the structural properties of an eigensplit.
#[derive(Debug, Clone, Copy)]
pub struct EigensplitResiduals {
    pub j_squared: f64,
    pub j_maps_p_eps_to_k_eps: f64,
    pub k0_preserves_blocks: f64,
    pub k_eps_swaps_blocks: f64,
}

impl Eigensplit {
    pub fn residuals(&self, model: &SymmetricSpaceModel) -> Result<EigensplitResiduals> {
        let eps = model.epsilon();
        let mut j_squared: f64 = 0.0;
        let mut maps: f64 = 0.0;
        for y in self.p_eps.basis() {
            let yg = model.p_to_g(y);
            let jy = &self.j * &yg;
            j_squared = j_squared.max((&self.j * &jy - &yg * eps).norm());
            maps = maps.max(self.k_eps.residual(&jy)?);
        }
        for z in self.k_eps.basis() {
            j_squared = j_squared.max((&self.j * (&self.j * z) - z * eps).norm());
        }
        if self.k_eps.dim() != self.p_eps.dim() {
            maps = f64::INFINITY;
        }
        let pe = self.p_eps.projector();
        let p0 = self.p0.projector();
        let mut keep: f64 = 0.0;
        for z in self.k0.basis() {
            let op = model.isotropy_op(z)?;
            keep = keep.max((&p0 * &op * &pe).norm()).max((&pe * &op * &p0).norm());
        }
        let mut swap: f64 = 0.0;
        for z in self.k_eps.basis() {
            let op = model.isotropy_op(z)?;
            swap = swap.max((&pe * &op * &pe).norm()).max((&p0 * &op * &p0).norm());
        }
        Ok(EigensplitResiduals {
            j_squared,
            j_maps_p_eps_to_k_eps: maps,
            k0_preserves_blocks: keep,
            k_eps_swaps_blocks: swap,
        })
    }
}
