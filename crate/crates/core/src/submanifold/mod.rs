//! Two-jets of symmetric submanifolds and the parallel-submanifold
//! identities they satisfy.
//!
//! A jet stores the operator form `h(x)` in `so(p)` for each vector of an
//! ordered orthonormal tangent basis. The bilinear form `h(x,y)` and the
//! shape operator are derived from it.

mod checks;
mod jetfile;

pub use checks::*;
pub use jetfile::{parse_jet_file, write_jet_file, JetFile, JetFileError};

use crate::linalg::{flatten, LinalgError, Matrix, Subspace, Vector};
use crate::symspace::{eigensplit, find_admissible, model_by_name, AdmissibleElement, SymSpaceError, SymmetricSpaceModel};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error(transparent)]
    SymSpace(#[from] SymSpaceError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("expected {expected} operators, found {found}")]
    OperatorCount { expected: usize, found: usize },
    #[error("operator has shape {0}x{1}, expected {2}x{2}")]
    OperatorShape(usize, usize, usize),
    #[error("invalid jet: {what} (residual {residual:e})")]
    Invariant { what: &'static str, residual: f64 },
    #[error("{0} requires a {1} ambient")]
    WrongAmbient(&'static str, &'static str),
}

pub type Result<T> = std::result::Result<T, JetError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JetKind {
    Family,
    Orbit,
    Veronese,
    Custom,
}

impl JetKind {
    pub fn label(self) -> &'static str {
        match self {
            JetKind::Family => "family",
            JetKind::Orbit => "orbit",
            JetKind::Veronese => "veronese",
            JetKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TwoJet {
    model: Arc<SymmetricSpaceModel>,
    tangent: Subspace,
    normal: Subspace,
    h_ops: Vec<Matrix>,
    c: f64,
    kind: JetKind,
}

/// Residuals of the defining invariants of a jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetResiduals {
    pub skew: f64,
    pub block: f64,
    pub symmetry: f64,
}

impl TwoJet {
    /// `tangent` must be orthonormal; `h_ops[i]` is the operator of its i-th vector.
    pub fn new(
        model: Arc<SymmetricSpaceModel>,
        tangent: Vec<Vector>,
        h_ops: Vec<Matrix>,
        c: f64,
        kind: JetKind,
    ) -> Result<Self> {
        let d = model.dim_p();
        let tol = model.tol();
        if h_ops.len() != tangent.len() {
            return Err(JetError::OperatorCount { expected: tangent.len(), found: h_ops.len() });
        }
        for h in &h_ops {
            if h.shape() != (d, d) {
                return Err(JetError::OperatorShape(h.nrows(), h.ncols(), d));
            }
        }
        let tangent = Subspace::from_orthonormal(d, tangent, 1e-10)?.with_tol(tol);
        let normal = tangent.orthogonal_complement();
        let jet = TwoJet { model, tangent, normal, h_ops, c, kind };
        let r = jet.invariant_residuals();
        let scale = jet.h_ops.iter().map(|h| h.norm()).fold(1.0, f64::max);
        let limit = 10.0 * tol * scale;
        for (what, residual) in [
            ("h(x) is not skew", r.skew),
            ("h(x) does not swap tangent and normal", r.block),
            ("h(x,y) is not symmetric", r.symmetry),
        ] {
            if residual > limit {
                return Err(JetError::Invariant { what, residual });
            }
        }
        Ok(jet)
    }

    pub fn invariant_residuals(&self) -> JetResiduals {
        let pt = self.tangent.projector();
        let pn = self.normal.projector();
        let mut r = JetResiduals { skew: 0.0, block: 0.0, symmetry: 0.0 };
        for h in &self.h_ops {
            r.skew = r.skew.max((h + h.transpose()).norm());
            r.block = r.block.max((&pt * h * &pt).norm()).max((&pn * h * &pn).norm());
        }
        let t = self.tangent.basis();
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                let a = &self.h_ops[i] * &t[j];
                let b = &self.h_ops[j] * &t[i];
                r.symmetry = r.symmetry.max((a - b).norm());
            }
        }
        r
    }

    pub fn model(&self) -> &SymmetricSpaceModel {
        &self.model
    }

    pub fn model_arc(&self) -> Arc<SymmetricSpaceModel> {
        self.model.clone()
    }

    pub fn tangent(&self) -> &Subspace {
        &self.tangent
    }

    pub fn normal(&self) -> &Subspace {
        &self.normal
    }

    pub fn h_ops(&self) -> &[Matrix] {
        &self.h_ops
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn kind(&self) -> JetKind {
        self.kind
    }

    pub fn dim_p(&self) -> usize {
        self.model.dim_p()
    }

    /// `h(x)` for a tangent vector `x`.
    pub fn h(&self, x: &Vector) -> Matrix {
        let d = self.dim_p();
        self.tangent
            .basis()
            .iter()
            .zip(&self.h_ops)
            .fold(Matrix::zeros(d, d), |acc, (t, h)| acc + h * t.dot(x))
    }

    /// Second fundamental form `h(x,y)`.
    pub fn h_bilinear(&self, x: &Vector, y: &Vector) -> Vector {
        self.h(x) * y
    }

    /// Shape operator `S_xi x`.
    pub fn shape(&self, xi: &Vector, x: &Vector) -> Vector {
        -(self.h(x) * xi)
    }

    /// Span of all `h(x,y)`.
    pub fn first_normal(&self) -> Subspace {
        let t = self.tangent.basis();
        let mut vals = Vec::new();
        for (i, h) in self.h_ops.iter().enumerate() {
            for y in &t[i..] {
                vals.push(h * y);
            }
        }
        Subspace::span(self.dim_p(), &vals, self.tangent.tol()).expect("dimensions agree")
    }

    /// Tangent plus first normal space.
    pub fn second_osculating(&self) -> Subspace {
        self.tangent.sum(&self.first_normal()).expect("dimensions agree")
    }

    /// Span of the operators `h(x)` in flattened coordinates.
    pub fn h_image(&self) -> Subspace {
        let flat: Vec<Vector> = self.h_ops.iter().map(flatten).collect();
        Subspace::span(self.dim_p() * self.dim_p(), &flat, self.tangent.tol()).expect("dimensions agree")
    }

    /// Same jet with every operator multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> TwoJet {
        let mut j = self.clone();
        j.h_ops = self.h_ops.iter().map(|h| h * factor).collect();
        j.c *= factor;
        j
    }
}

/// Splitting of operators on `V` into blocks preserving or swapping `W`
/// and its orthogonal complement.
#[derive(Debug, Clone)]
pub struct GradedSplit {
    p: Matrix,
    q: Matrix,
}

impl GradedSplit {
    pub fn new(w: &Subspace) -> Self {
        let p = w.projector();
        let n = p.nrows();
        let q = Matrix::identity(n, n) - &p;
        GradedSplit { p, q }
    }

    pub fn plus(&self, a: &Matrix) -> Matrix {
        &self.p * a * &self.p + &self.q * a * &self.q
    }

    pub fn minus(&self, a: &Matrix) -> Matrix {
        &self.p * a * &self.q + &self.q * a * &self.p
    }

    /// Span of the projections of a spanning set of `so(V)`.
    fn projected_so(&self, even: bool) -> Subspace {
        let n = self.p.nrows();
        let mut gens = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let l = crate::liealg::so_generator(n, i, j);
                gens.push(flatten(&if even { self.plus(&l) } else { self.minus(&l) }));
            }
        }
        Subspace::span(n * n, &gens, 1e-9).expect("dimensions agree")
    }

    pub fn so_plus(&self) -> Subspace {
        self.projected_so(true)
    }

    pub fn so_minus(&self) -> Subspace {
        self.projected_so(false)
    }
}

/// Orbit jet of `Ad(K)X` in the flat ambient `p`.
pub fn orbit_jet(model: Arc<SymmetricSpaceModel>, adm: &AdmissibleElement) -> Result<TwoJet> {
    if !model.is_flat() {
        return Err(JetError::WrongAmbient("orbit jet", "flat"));
    }
    isotropy_jet(model, adm, 1.0, JetKind::Orbit)
}

/// Jet of the family member `M_c` in the curved ambient.
pub fn family_jet(model: Arc<SymmetricSpaceModel>, adm: &AdmissibleElement, c: f64) -> Result<TwoJet> {
    if model.is_flat() {
        return Err(JetError::WrongAmbient("family jet", "curved"));
    }
    isotropy_jet(model, adm, c, JetKind::Family)
}

fn isotropy_jet(model: Arc<SymmetricSpaceModel>, adm: &AdmissibleElement, c: f64, kind: JetKind) -> Result<TwoJet> {
    let split = eigensplit(&model, adm)?;
    let tangent = split.p_eps.basis().to_vec();
    let mut h_ops = Vec::with_capacity(tangent.len());
    for y in &tangent {
        h_ops.push(model.isotropy_op(&split.j_of_p(&model, y))? * c);
    }
    TwoJet::new(model, tangent, h_ops, c, kind)
}

/// The Veronese surface in the round 4-sphere, obtained from the orbit jet
/// of `SU(3)/SO(3)` by removing the radial direction.
pub fn veronese_sphere_jet(tol: f64) -> Result<TwoJet> {
    let flat = Arc::new(model_by_name("euclid_su3_so3", tol)?);
    let adm = find_admissible(&flat)?;
    let orbit = orbit_jet(flat, &adm)?;
    let xhat = &adm.x_p;
    let r2 = xhat.norm_squared();
    let radial = Subspace::span(xhat.len(), std::slice::from_ref(xhat), tol)?;
    let sphere_normal = orbit.normal().intersection(&radial.orthogonal_complement())?;
    let sphere = model_by_name("sphere4", tol)?;
    let e = |i: usize| Vector::from_fn(4, |j, _| if i == j { 1.0 } else { 0.0 });
    let k0 = (sphere.curvature_op(&e(0), &e(1))? * e(1)).dot(&e(0));
    let sphere = Arc::new(sphere.with_metric_scale(k0 * r2));
    let rows: Vec<Vector> = orbit.tangent().basis().iter().chain(sphere_normal.basis()).cloned().collect();
    if rows.len() != 4 {
        return Err(JetError::Invariant { what: "Veronese frame is not 4-dimensional", residual: rows.len() as f64 });
    }
    let phi = Matrix::from_columns(&rows).transpose();
    let h_ops = orbit.h_ops().iter().map(|h| &phi * h * phi.transpose()).collect();
    TwoJet::new(sphere, vec![e(0), e(1)], h_ops, 1.0, JetKind::Veronese)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symspace::catalog;

    const TOL: f64 = 1e-9;

    fn family(name: &str, c: f64) -> TwoJet {
        let m = Arc::new(model_by_name(name, TOL).unwrap());
        let x = find_admissible(&m).unwrap();
        family_jet(m, &x, c).unwrap()
    }

    #[test]
    fn zero_scale_gives_totally_geodesic_jet() {
        let j = family("su3_so3", 0.0);
        assert!(j.h_ops().iter().all(|h| h.norm() == 0.0));
        assert_eq!(j.first_normal().dim(), 0);
        assert!(j.second_osculating().equal(j.tangent()).unwrap().0);
    }

    #[test]
    fn operators_scale_linearly_in_c() {
        let a = family("su3_so3", 1.0);
        let b = family("su3_so3", 2.0);
        for (x, y) in a.h_ops().iter().zip(b.h_ops()) {
            assert!((x * 2.0 - y).norm() < 1e-14);
        }
        let s = a.scaled(2.0);
        assert_eq!(s.c(), 2.0);
    }

    #[test]
    fn family_jets_are_one_full_on_catalog() {
        for m in catalog(TOL).unwrap().into_iter().filter(|m| !m.is_flat()) {
            let name = m.name().to_string();
            let m = Arc::new(m);
            let x = find_admissible(&m).unwrap();
            let j = family_jet(m.clone(), &x, 1.0).unwrap();
            assert!(j.first_normal().equal(j.normal()).unwrap().0, "{name}");
            assert_eq!(j.second_osculating().dim(), m.dim_p(), "{name}");
            let r = j.invariant_residuals();
            assert!(r.block <= 1e-10 && r.skew <= 1e-10 && r.symmetry <= 1e-10, "{name} {r:?}");
        }
    }

    #[test]
    fn orbit_jet_dimensions() {
        let m = Arc::new(model_by_name("euclid_su3_so3", TOL).unwrap());
        let x = find_admissible(&m).unwrap();
        let j = orbit_jet(m.clone(), &x).unwrap();
        assert_eq!((j.tangent().dim(), j.normal().dim()), (2, 3));
        assert_eq!(j.first_normal().dim(), 3);
        assert!(family_jet(m, &x, 1.0).is_err());
    }

    #[test]
    fn veronese_dimensions() {
        let j = veronese_sphere_jet(TOL).unwrap();
        assert_eq!(j.model().name(), "sphere4");
        assert_eq!((j.tangent().dim(), j.normal().dim()), (2, 2));
        assert_eq!(j.first_normal().dim(), 2);
    }

    #[test]
    fn invalid_operators_are_rejected() {
        let m = Arc::new(model_by_name("sphere4", TOL).unwrap());
        let t = vec![Vector::from_vec(vec![1.0, 0.0, 0.0, 0.0])];
        let mut bad = Matrix::zeros(4, 4);
        bad[(1, 2)] = 1.0;
        bad[(2, 1)] = -1.0;
        let err = TwoJet::new(m.clone(), t.clone(), vec![bad], 1.0, JetKind::Custom).unwrap_err();
        assert!(matches!(err, JetError::Invariant { .. }));
        assert!(TwoJet::new(m, t, vec![], 1.0, JetKind::Custom).is_err());
    }

    #[test]
    fn graded_split_decomposes() {
        let w = Subspace::span(4, &[Vector::from_vec(vec![1.0, 1.0, 0.0, 0.0])], TOL).unwrap();
        let g = GradedSplit::new(&w);
        let a = Matrix::from_fn(4, 4, |i, j| (i as f64) - 2.0 * (j as f64));
        let a = &a - a.transpose();
        assert!((g.plus(&a) + g.minus(&a) - &a).norm() < 1e-14);
        // so(1) + so(3) and R^1 x R^3
        assert_eq!(g.so_plus().dim(), 3);
        assert_eq!(g.so_minus().dim(), 3);
    }
}
