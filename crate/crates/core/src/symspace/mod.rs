//! Symmetric-space models given by Cartan data `g = k + p`.
//!
//! The basis of `g` is the `k` basis followed by the `p` basis, so the
//! involution is `diag(+1, .., -1, ..)`. Tangent vectors ("p-vectors") are
//! coordinates in an orthonormal frame of `p` for the metric
//! `metric_scale * eps * B`, which makes every operator on `p` a plain
//! matrix whose metric adjoint is its transpose.

mod admissible;
mod catalog;

pub use admissible::{eigensplit, find_admissible, AdmissibleElement, Eigensplit};
pub use catalog::{catalog, model_by_name, MODEL_NAMES};

use crate::liealg::{LieError, MatrixLieAlgebra};
use crate::linalg::{flatten, sym_eig, LinalgError, Matrix, Subspace, Vector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymSpaceError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("model {name}: Cartan relation violated ({what}, residual {residual:e})")]
    CartanViolation { name: String, what: &'static str, residual: f64 },
    #[error("model {name}: metric on p is not positive definite (smallest eigenvalue {min:e})")]
    MetricNotPositive { name: String, min: f64 },
    #[error("vector is not in {0}")]
    NotInSubspace(&'static str),
    #[error("model {0} admits no symmetric R-space at tol")]
    NoAdmissible(String),
    #[error("element is not admissible (residual {0:e})")]
    NotAdmissible(f64),
    #[error("eigenvalue {0} of ad(X)^2 is not separated from 0 and eps")]
    Degenerate(f64),
    #[error("model {name}: center of k has dimension {dim}")]
    CenterTooLarge { name: String, dim: usize },
    #[error("isotropy image of the center does not square to a negative multiple of the identity (residual {0:e})")]
    NotComplexStructure(f64),
}

pub type Result<T> = std::result::Result<T, SymSpaceError>;

#[derive(Debug, Clone)]
pub struct SymmetricSpaceModel {
    name: String,
    g: MatrixLieAlgebra,
    dim_k: usize,
    theta: Matrix,
    k: Subspace,
    p: Subspace,
    epsilon: f64,
    killing: Matrix,
    metric_scale: f64,
    /// Columns: raw p coordinates of a frame orthonormal for `eps * B`.
    frame_p: Matrix,
    frame_p_inv: Matrix,
    /// Columns: raw k coordinates of a frame orthonormal for `-B`.
    frame_k: Matrix,
    frame_k_inv: Matrix,
    flat: bool,
    candidates: Vec<Vector>,
    center_k: Vec<Vector>,
    tol: f64,
}

/// Residuals of the Cartan relations of a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanResiduals {
    pub theta_involution: f64,
    pub theta_automorphism: f64,
    pub kk_in_k: f64,
    pub kp_in_p: f64,
    pub pp_in_k: f64,
    pub min_metric_eig: f64,
}

impl CartanResiduals {
    pub fn max_relation(&self) -> f64 {
        [self.theta_involution, self.theta_automorphism, self.kk_in_k, self.kp_in_p, self.pp_in_k]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn frame_for(gram: &Matrix, name: &str) -> Result<(Matrix, Matrix)> {
    let chol = gram.clone().cholesky().ok_or_else(|| SymSpaceError::MetricNotPositive {
        name: name.into(),
        min: f64::NAN,
    })?;
    let l = chol.l();
    let linv = l.clone().try_inverse().expect("Cholesky factor is invertible");
    Ok((linv.transpose(), l.transpose()))
}

impl SymmetricSpaceModel {
    /// Builds and validates a model from `k` and `p` bases.
    pub fn from_cartan(
        name: &str,
        k_basis: Vec<Matrix>,
        p_basis: Vec<Matrix>,
        epsilon: f64,
        candidates: Vec<Matrix>,
        tol: f64,
    ) -> Result<Self> {
        let dim_k = k_basis.len();
        let dim_p = p_basis.len();
        let mut basis = k_basis;
        basis.extend(p_basis);
        let g = MatrixLieAlgebra::new(name, basis, tol)?;
        let dg = g.dim();
        let theta = Matrix::from_fn(dg, dg, |i, j| match (i == j, i < dim_k) {
            (true, true) => 1.0,
            (true, false) => -1.0,
            _ => 0.0,
        });
        let unit = |i: usize| Vector::from_fn(dg, |j, _| if i == j { 1.0 } else { 0.0 });
        let k = Subspace::span(dg, &(0..dim_k).map(unit).collect::<Vec<_>>(), tol)?;
        let p = Subspace::span(dg, &(dim_k..dg).map(unit).collect::<Vec<_>>(), tol)?;
        let killing = g.killing_form();
        let bp = killing.view((dim_k, dim_k), (dim_p, dim_p)) * epsilon;
        let (pvals, _) = sym_eig(&bp.clone_owned(), tol)?;
        let min = pvals.first().copied().unwrap_or(0.0);
        if min <= 1e-6 {
            return Err(SymSpaceError::MetricNotPositive { name: name.into(), min });
        }
        let bk = -killing.view((0, 0), (dim_k, dim_k)).clone_owned();
        let (frame_p, frame_p_inv) = frame_for(&bp.clone_owned(), name)?;
        let (frame_k, frame_k_inv) = if dim_k > 0 {
            frame_for(&bk, name)?
        } else {
            (Matrix::zeros(0, 0), Matrix::zeros(0, 0))
        };
        let candidates = candidates
            .iter()
            .map(|c| g.coordinates(c))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut model = SymmetricSpaceModel {
            name: name.into(),
            g,
            dim_k,
            theta,
            k,
            p,
            epsilon,
            killing,
            metric_scale: 1.0,
            frame_p,
            frame_p_inv,
            frame_k,
            frame_k_inv,
            flat: false,
            candidates,
            center_k: Vec::new(),
            tol,
        };
        let res = model.cartan_residuals();
        let checks = [
            ("theta^2 = id", res.theta_involution),
            ("theta automorphism", res.theta_automorphism),
            ("[k,k] in k", res.kk_in_k),
            ("[k,p] in p", res.kp_in_p),
            ("[p,p] in k", res.pp_in_k),
        ];
        for (what, residual) in checks {
            if residual > tol {
                return Err(SymSpaceError::CartanViolation { name: name.into(), what, residual });
            }
        }
        model.center_k = model.compute_center_k()?;
        Ok(model)
    }

    fn compute_center_k(&self) -> Result<Vec<Vector>> {
        let dk = self.dim_k;
        let dg = self.dim_g();
        let mut m = Matrix::zeros(dg * dk, dk);
        for j in 0..dk {
            let ad = self.g.ad_basis(j);
            m.view_mut((j * dg, 0), (dg, dk)).copy_from(&ad.columns(0, dk));
        }
        let ker = crate::linalg::null_space(&m, self.tol)?;
        Ok(ker
            .basis()
            .iter()
            .map(|c| {
                let mut v = Vector::zeros(dg);
                v.rows_mut(0, dk).copy_from(c);
                v
            })
            .collect())
    }

    /// Flat (Euclidean) ambient carrying the same Cartan data.
    pub fn flat_wrapper(&self, name: &str) -> Self {
        let mut m = self.clone();
        m.name = name.into();
        m.flat = true;
        m
    }

    /// Copy whose metric on `p` is multiplied by `scale`.
    pub fn with_metric_scale(&self, scale: f64) -> Self {
        assert!(scale > 0.0 && scale.is_finite(), "metric scale must be positive");
        let mut m = self.clone();
        m.metric_scale = scale;
        m
    }

    pub fn cartan_residuals(&self) -> CartanResiduals {
        let dk = self.dim_k;
        let dg = self.dim_g();
        let theta_involution = (&self.theta * &self.theta - Matrix::identity(dg, dg)).norm();
        let mut auto: f64 = 0.0;
        let (mut kk, mut kp, mut pp): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for i in 0..dg {
            let ad = self.g.ad_basis(i);
            // theta [e_i, e_j] = [theta e_i, theta e_j] for diagonal theta
            let lhs = &self.theta * ad;
            let rhs = ad * &self.theta * self.theta[(i, i)];
            auto = auto.max((lhs - rhs).norm());
            for j in 0..dg {
                let col = ad.column(j);
                let k_part = col.rows(0, dk).norm();
                let p_part = col.rows(dk, dg - dk).norm();
                match (i < dk, j < dk) {
                    (true, true) => kk = kk.max(p_part),
                    (false, false) => pp = pp.max(p_part),
                    _ => kp = kp.max(k_part),
                }
            }
        }
        let bp = self.killing.view((dk, dk), (self.dim_p(), self.dim_p())) * self.epsilon;
        let min_metric_eig = sym_eig(&bp.clone_owned(), self.tol)
            .map(|(v, _)| v.first().copied().unwrap_or(0.0))
            .unwrap_or(f64::NAN);
        CartanResiduals {
            theta_involution,
            theta_automorphism: auto,
            kk_in_k: kk,
            kp_in_p: kp,
            pp_in_k: pp,
            min_metric_eig,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn is_flat(&self) -> bool {
        self.flat
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn metric_scale(&self) -> f64 {
        self.metric_scale
    }

    pub fn g(&self) -> &MatrixLieAlgebra {
        &self.g
    }

    pub fn theta(&self) -> &Matrix {
        &self.theta
    }

    pub fn k(&self) -> &Subspace {
        &self.k
    }

    pub fn p(&self) -> &Subspace {
        &self.p
    }

    pub fn killing(&self) -> &Matrix {
        &self.killing
    }

    pub fn dim_g(&self) -> usize {
        self.g.dim()
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn dim_p(&self) -> usize {
        self.g.dim() - self.dim_k
    }

    /// Gram matrix of the metric on `p` in raw basis coordinates.
    pub fn metric_p(&self) -> Matrix {
        let dk = self.dim_k;
        let dp = self.dim_p();
        self.killing.view((dk, dk), (dp, dp)) * (self.epsilon * self.metric_scale)
    }

    pub fn is_hermitian(&self) -> bool {
        self.center_k.len() == 1
    }

    /// Basis (g coordinates) of the center of `k`.
    pub fn center_of_k(&self) -> &[Vector] {
        &self.center_k
    }

    pub(crate) fn candidates(&self) -> &[Vector] {
        &self.candidates
    }

    /// g coordinates of a p-vector.
    pub fn p_to_g(&self, v: &Vector) -> Vector {
        let raw = &self.frame_p * v / self.metric_scale.sqrt();
        let mut out = Vector::zeros(self.dim_g());
        out.rows_mut(self.dim_k, self.dim_p()).copy_from(&raw);
        out
    }

    /// p-vector of a g element lying in `p`.
    pub fn g_to_p(&self, y: &Vector) -> Result<Vector> {
        let dk = self.dim_k;
        if y.len() != self.dim_g() {
            return Err(LinalgError::DimensionMismatch { expected: self.dim_g(), found: y.len() }.into());
        }
        if y.rows(0, dk).norm() > self.tol * y.norm().max(1.0) {
            return Err(SymSpaceError::NotInSubspace("p"));
        }
        Ok(&self.frame_p_inv * y.rows(dk, self.dim_p()) * self.metric_scale.sqrt())
    }

    /// g coordinates of a vector given in the `-B`-orthonormal frame of `k`.
    pub fn k_to_g(&self, v: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim_g());
        out.rows_mut(0, self.dim_k).copy_from(&(&self.frame_k * v));
        out
    }

    /// Coordinates in the `-B`-orthonormal frame of `k`.
    pub fn g_to_k(&self, z: &Vector) -> Result<Vector> {
        let dk = self.dim_k;
        if z.rows(dk, self.dim_p()).norm() > self.tol * z.norm().max(1.0) {
            return Err(SymSpaceError::NotInSubspace("k"));
        }
        Ok(&self.frame_k_inv * z.rows(0, dk))
    }

    /// Change of basis from the orthonormal frame of `-B + eps*B` to raw g
    /// coordinates.
    pub(crate) fn g_frame(&self) -> (Matrix, Matrix) {
        let dk = self.dim_k;
        let dp = self.dim_p();
        let dg = self.dim_g();
        let mut f = Matrix::zeros(dg, dg);
        let mut finv = Matrix::zeros(dg, dg);
        f.view_mut((0, 0), (dk, dk)).copy_from(&self.frame_k);
        f.view_mut((dk, dk), (dp, dp)).copy_from(&self.frame_p);
        finv.view_mut((0, 0), (dk, dk)).copy_from(&self.frame_k_inv);
        finv.view_mut((dk, dk), (dp, dp)).copy_from(&self.frame_p_inv);
        (f, finv)
    }

    pub fn ad_g(&self, y: &Vector) -> Matrix {
        self.g.ad(y)
    }

    /// Restriction of a g-endomorphism preserving `p` to p-vector coordinates.
    fn restrict_to_p(&self, m: &Matrix) -> Matrix {
        let dk = self.dim_k;
        let dp = self.dim_p();
        &self.frame_p_inv * m.view((dk, dk), (dp, dp)) * &self.frame_p
    }

    /// `R(x,y)z = -[[x,y],z]` as an operator on p-vectors; zero when flat.
    pub fn curvature_op(&self, x: &Vector, y: &Vector) -> Result<Matrix> {
        let dp = self.dim_p();
        for v in [x, y] {
            if v.len() != dp {
                return Err(LinalgError::DimensionMismatch { expected: dp, found: v.len() }.into());
            }
        }
        if self.flat {
            return Ok(Matrix::zeros(dp, dp));
        }
        let xg = self.p_to_g(x);
        let yg = self.p_to_g(y);
        let w = self.g.bracket_coords(&xg, &yg);
        Ok(-self.restrict_to_p(&self.g.ad(&w)))
    }

    /// `ad(Z)` restricted to `p`, for `Z` in `k` given in g coordinates.
    pub fn isotropy_op(&self, z: &Vector) -> Result<Matrix> {
        if z.len() != self.dim_g() {
            return Err(LinalgError::DimensionMismatch { expected: self.dim_g(), found: z.len() }.into());
        }
        if z.rows(self.dim_k, self.dim_p()).norm() > self.tol * z.norm().max(1.0) {
            return Err(SymSpaceError::NotInSubspace("k"));
        }
        Ok(self.restrict_to_p(&self.g.ad(z)))
    }

    /// Span of the isotropy operators `ad_p(k)` in flattened coordinates.
    pub fn isotropy_image(&self) -> Result<Subspace> {
        let dg = self.dim_g();
        let mut gens = Vec::with_capacity(self.dim_k);
        for i in 0..self.dim_k {
            let z = Vector::from_fn(dg, |j, _| if i == j { 1.0 } else { 0.0 });
            gens.push(flatten(&self.isotropy_op(&z)?));
        }
        Ok(Subspace::span(self.dim_p() * self.dim_p(), &gens, self.tol)?)
    }

    /// Complex structure `j` on p from the one-dimensional center of `k`.
    pub fn hermitian_structure(&self) -> Result<Option<(Vector, Matrix)>> {
        match self.center_k.len() {
            0 => Ok(None),
            1 => {
                let z = &self.center_k[0];
                let j0 = self.isotropy_op(z)?;
                let dp = self.dim_p();
                let sq = &j0 * &j0;
                let c = -sq.trace() / dp as f64;
                if c <= 0.0 {
                    return Err(SymSpaceError::NotComplexStructure(f64::INFINITY));
                }
                let j = j0 / c.sqrt();
                let res = (&j * &j + Matrix::identity(dp, dp)).norm();
                if res > 10.0 * self.tol {
                    return Err(SymSpaceError::NotComplexStructure(res));
                }
                Ok(Some((z / c.sqrt(), j)))
            }
            dim => Err(SymSpaceError::CenterTooLarge { name: self.name.clone(), dim }),
        }
    }
}
