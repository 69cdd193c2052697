//! Tolerance-aware dense linear algebra.
//!
//! All rank decisions go through [`Subspace`], which keeps an orthonormal
//! basis built by pivoted modified Gram-Schmidt with one re-orthogonalization
//! pass. A residual counts as zero when it is at most `tol * max(1, scale)`,
//! where `scale` is the largest input norm.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Default rank-decision tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("basis vectors are not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(LinalgError::InvalidTolerance(tol))
    }
}

fn check_finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

/// Row-major flattening of a matrix into operator coordinates.
pub fn flatten(m: &Matrix) -> Vector {
    let (r, c) = m.shape();
    Vector::from_iterator(r * c, (0..r).flat_map(|i| (0..c).map(move |j| m[(i, j)])))
}

/// Inverse of [`flatten`] for square matrices of size `n`.
pub fn unflatten(v: &Vector, n: usize) -> Matrix {
    assert_eq!(v.len(), n * n, "unflatten: length {} is not {}^2", v.len(), n);
    Matrix::from_row_slice(n, n, v.as_slice())
}

/// Frobenius norm of `a - b`.
pub fn dist(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).norm()
}

/// Linear subspace of `R^ambient_dim` with an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vector>,
    tol: f64,
}

impl Subspace {
    pub fn zero(ambient_dim: usize, tol: f64) -> Self {
        Subspace { ambient_dim, basis: Vec::new(), tol }
    }

    pub fn full(ambient_dim: usize, tol: f64) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| Vector::from_fn(ambient_dim, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        Subspace { ambient_dim, basis, tol }
    }

    /// Numerical span of `vectors`.
    pub fn span(ambient_dim: usize, vectors: &[Vector], tol: f64) -> Result<Self> {
        check_tol(tol)?;
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(LinalgError::DimensionMismatch { expected: ambient_dim, found: v.len() });
            }
            check_finite(v.as_slice())?;
        }
        let scale = vectors.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let basis = pivoted_mgs(&[], vectors.to_vec(), tol * scale, ambient_dim);
        Ok(Subspace { ambient_dim, basis, tol })
    }

    /// Wraps an already orthonormal list, keeping its order.
    pub fn from_orthonormal(ambient_dim: usize, basis: Vec<Vector>, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        for v in &basis {
            if v.len() != ambient_dim {
                return Err(LinalgError::DimensionMismatch { expected: ambient_dim, found: v.len() });
            }
            check_finite(v.as_slice())?;
        }
        let mut defect: f64 = 0.0;
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((a.dot(b) - target).abs());
            }
        }
        if defect > tol {
            return Err(LinalgError::NotOrthonormal(defect));
        }
        Ok(Subspace { ambient_dim, basis, tol })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n == self.ambient_dim {
            Ok(())
        } else {
            Err(LinalgError::DimensionMismatch { expected: self.ambient_dim, found: n })
        }
    }

    pub fn project(&self, v: &Vector) -> Result<Vector> {
        self.check_dim(v.len())?;
        let mut p = Vector::zeros(self.ambient_dim);
        for q in &self.basis {
            p.axpy(q.dot(v), q, 1.0);
        }
        Ok(p)
    }

    /// `‖v - proj v‖`.
    pub fn residual(&self, v: &Vector) -> Result<f64> {
        Ok((v - self.project(v)?).norm())
    }

    /// Returns `(contained, residual)`.
    pub fn contains(&self, v: &Vector) -> Result<(bool, f64)> {
        let r = self.residual(v)?;
        Ok((r <= self.tol * v.norm().max(1.0), r))
    }

    /// Orthogonal projector as a matrix.
    pub fn projector(&self) -> Matrix {
        let mut p = Matrix::zeros(self.ambient_dim, self.ambient_dim);
        for q in &self.basis {
            p.ger(1.0, q, q, 1.0);
        }
        p
    }

    /// Basis vectors as matrix columns.
    pub fn basis_matrix(&self) -> Matrix {
        if self.basis.is_empty() {
            Matrix::zeros(self.ambient_dim, 0)
        } else {
            Matrix::from_columns(&self.basis)
        }
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_dim(other.ambient_dim)?;
        let tol = self.tol.max(other.tol);
        let basis = pivoted_mgs(&self.basis, other.basis.clone(), tol, self.ambient_dim);
        Ok(Subspace { ambient_dim: self.ambient_dim, basis, tol })
    }

    /// Extends the span by more vectors.
    pub fn extend(&self, vectors: &[Vector]) -> Result<Subspace> {
        for v in vectors {
            self.check_dim(v.len())?;
            check_finite(v.as_slice())?;
        }
        let scale = vectors.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let basis = pivoted_mgs(&self.basis, vectors.to_vec(), self.tol * scale, self.ambient_dim);
        Ok(Subspace { ambient_dim: self.ambient_dim, basis, tol: self.tol })
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let n = self.ambient_dim;
        let candidates: Vec<Vector> = (0..n)
            .map(|i| Vector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        let all = pivoted_mgs(&self.basis, candidates, self.tol, n);
        let basis = all.into_iter().skip(self.basis.len()).take(n - self.basis.len()).collect();
        Subspace { ambient_dim: n, basis, tol: self.tol }
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check_dim(other.ambient_dim)?;
        let joint = self.orthogonal_complement().sum(&other.orthogonal_complement())?;
        Ok(joint.orthogonal_complement())
    }

    /// Largest residual of `other`'s basis against `self`.
    pub fn containment_residual(&self, other: &Subspace) -> Result<f64> {
        self.check_dim(other.ambient_dim)?;
        let mut worst: f64 = 0.0;
        for v in &other.basis {
            worst = worst.max(self.residual(v)?);
        }
        Ok(worst)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool> {
        Ok(self.containment_residual(other)? <= self.tol.max(other.tol))
    }

    /// Mutual containment with the larger of the two residuals.
    pub fn equal(&self, other: &Subspace) -> Result<(bool, f64)> {
        let r = self.containment_residual(other)?.max(other.containment_residual(self)?);
        let same_dim = self.dim() == other.dim();
        Ok((same_dim && r <= self.tol.max(other.tol), r))
    }
}

/// Pivoted MGS: extends the orthonormal `fixed` list by the candidates in
/// order of largest remaining residual until all residuals fall to `thr`.
fn pivoted_mgs(fixed: &[Vector], candidates: Vec<Vector>, thr: f64, n: usize) -> Vec<Vector> {
    let mut basis: Vec<Vector> = fixed.to_vec();
    let mut rest: Vec<Vector> = candidates;
    for r in rest.iter_mut() {
        for _ in 0..2 {
            for q in &basis {
                let a = q.dot(r);
                r.axpy(-a, q, 1.0);
            }
        }
    }
    while basis.len() < n && !rest.is_empty() {
        let (idx, best) = rest
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= thr {
            break;
        }
        let mut w = rest.swap_remove(idx);
        for q in &basis {
            let a = q.dot(&w);
            w.axpy(-a, q, 1.0);
        }
        let nw = w.norm();
        if nw <= thr {
            continue;
        }
        w /= nw;
        for r in rest.iter_mut() {
            let a = w.dot(r);
            r.axpy(-a, &w, 1.0);
        }
        basis.push(w);
    }
    basis
}

/// Rows of `m` spanning its row space; the null space is the complement.
pub fn null_space(m: &Matrix, tol: f64) -> Result<Subspace> {
    check_tol(tol)?;
    check_finite(m.as_slice())?;
    let rows: Vec<Vector> = (0..m.nrows()).map(|i| m.row(i).transpose()).collect();
    Ok(Subspace::span(m.ncols(), &rows, tol)?.orthogonal_complement())
}

/// Symmetric eigendecomposition with eigenvalues in ascending order.
pub fn sym_eig(a: &Matrix, tol: f64) -> Result<(Vec<f64>, Matrix)> {
    check_tol(tol)?;
    let (r, c) = a.shape();
    if r != c {
        return Err(LinalgError::NotSquare { rows: r, cols: c });
    }
    check_finite(a.as_slice())?;
    let asym = (a - a.transpose()).norm();
    if asym > tol * a.norm().max(1.0) {
        return Err(LinalgError::NotSymmetric { asymmetry: asym });
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Matrix::zeros(r, r);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    Ok((values, vectors))
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(a: &Matrix) -> Result<Matrix> {
    let (r, c) = a.shape();
    if r != c {
        return Err(LinalgError::NotSquare { rows: r, cols: c });
    }
    check_finite(a.as_slice())?;
    let norm1 = (0..c).map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0i32;
    while norm1 / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let b = a / 2f64.powi(s);
    let mut result = Matrix::identity(r, r);
    let mut term = Matrix::identity(r, r);
    for k in 1..=20 {
        term = &term * &b / k as f64;
        result += &term;
        if term.norm() <= f64::EPSILON * result.norm() {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    Ok(result)
}

/// Minimum-norm least-squares solution and its residual `‖map x - target‖`.
pub fn least_squares_solve(map: &Matrix, target: &Vector) -> Result<(Vector, f64)> {
    if map.nrows() != target.len() {
        return Err(LinalgError::DimensionMismatch { expected: map.nrows(), found: target.len() });
    }
    check_finite(map.as_slice())?;
    check_finite(target.as_slice())?;
    if map.ncols() == 0 {
        return Ok((Vector::zeros(0), target.norm()));
    }
    let svd = map.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = f64::EPSILON * (map.nrows().max(map.ncols()) as f64) * smax.max(f64::MIN_POSITIVE);
    let x = svd.solve(target, eps).expect("svd computed with both factors");
    let res = (map * &x - target).norm();
    Ok((x, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(n: usize, i: usize) -> Vector {
        Vector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 })
    }

    fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let a = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &a - a.transpose()
    }

    #[test]
    fn empty_span_is_zero() {
        let s = Subspace::span(4, &[], 1e-9).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s.orthogonal_complement().dim(), 4);
    }

    #[test]
    fn duplicate_direction_collapses() {
        let s = Subspace::span(3, &[e(3, 0), e(3, 0) * 2.0, e(3, 1)], 1e-9).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&e(3, 0)).unwrap().0);
        assert!(s.contains(&e(3, 1)).unwrap().0);
        assert!(!s.contains(&e(3, 2)).unwrap().0);
    }

    #[test]
    fn contains_reports_residuals() {
        let s = Subspace::span(3, &[e(3, 0)], 1e-9).unwrap();
        assert_eq!(s.contains(&e(3, 0)).unwrap(), (true, 0.0));
        let (inside, r) = s.contains(&e(3, 1)).unwrap();
        assert!(!inside);
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(matches!(
            Subspace::span(3, &[e(2, 0)], 1e-9),
            Err(LinalgError::DimensionMismatch { expected: 3, found: 2 })
        ));
        let s = Subspace::span(3, &[e(3, 0)], 1e-9).unwrap();
        assert!(s.contains(&e(4, 0)).is_err());
    }

    #[test]
    fn sums_and_complements() {
        let a = Subspace::span(5, &[e(5, 0)], 1e-9).unwrap();
        let b = Subspace::span(5, &[e(5, 1)], 1e-9).unwrap();
        assert_eq!(a.sum(&b).unwrap().dim(), 2);
        let c = a.sum(&b).unwrap().orthogonal_complement();
        assert_eq!(c.dim(), 3);
        assert!(c.contains(&e(5, 4)).unwrap().0);
    }

    #[test]
    fn intersection_of_planes() {
        let a = Subspace::span(3, &[e(3, 0), e(3, 1)], 1e-9).unwrap();
        let b = Subspace::span(3, &[e(3, 1), e(3, 2)], 1e-9).unwrap();
        let i = a.intersection(&b).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&e(3, 1)).unwrap().0);
    }

    #[test]
    fn invariant_subspace_by_iteration() {
        // Krylov space of a block-diagonal operator stays inside its block.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut a = Matrix::zeros(6, 6);
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = rng.gen_range(-1.0..1.0);
                a[(i + 3, j + 3)] = rng.gen_range(-1.0..1.0);
            }
        }
        let mut v = Vector::from_fn(6, |i, _| if i < 3 { 1.0 + i as f64 } else { 0.0 });
        let mut krylov = vec![v.clone()];
        for _ in 0..5 {
            v = &a * v;
            krylov.push(v.clone());
        }
        let s = Subspace::span(6, &krylov, 1e-9).unwrap();
        for b in s.basis() {
            assert!(s.contains(&(&a * b)).unwrap().0);
        }
    }

    #[test]
    fn sym_eig_diagonal() {
        let a = Matrix::from_diagonal(&Vector::from_vec(vec![3.0, 1.0, 2.0]));
        let (vals, vecs) = sym_eig(&a, 1e-9).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        assert!((vecs.column(0).abs() - e(3, 1)).norm() < 1e-15);
        assert!((vecs.column(2).abs() - e(3, 0)).norm() < 1e-15);
        let (zeros, _) = sym_eig(&Matrix::zeros(3, 3), 1e-9).unwrap();
        assert!(zeros.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sym_eig_rejects_asymmetric() {
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(sym_eig(&a, 1e-9), Err(LinalgError::NotSymmetric { .. })));
    }

    #[test]
    fn sym_eig_recovers_planted_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = expm(&random_skew(&mut rng, 6)).unwrap();
        let lambda = [-2.5, -1.0, 0.0, 0.5, 1.5, 4.0];
        let a = &q * Matrix::from_diagonal(&Vector::from_row_slice(&lambda)) * q.transpose();
        let (vals, _) = sym_eig(&a, 1e-9).unwrap();
        for (v, l) in vals.iter().zip(lambda) {
            assert!((v - l).abs() < 1e-10);
        }
    }

    #[test]
    fn expm_closed_forms() {
        assert_eq!(expm(&Matrix::zeros(3, 3)).unwrap(), Matrix::identity(3, 3));
        let j = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let r = expm(&(&j * std::f64::consts::FRAC_PI_2)).unwrap();
        assert!(dist(&r, &j) < 1e-14);
    }

    #[test]
    fn expm_matches_rk4_integration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_skew(&mut rng, 5) * 0.5;
        let h = 1e-3;
        let mut y = Matrix::identity(5, 5);
        for _ in 0..1000 {
            let k1 = &y * &a;
            let k2 = (&y + &k1 * (h / 2.0)) * &a;
            let k3 = (&y + &k2 * (h / 2.0)) * &a;
            let k4 = (&y + &k3 * h) * &a;
            y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        assert!(dist(&y, &expm(&a).unwrap()) < 1e-8);
    }

    #[test]
    fn least_squares_examples() {
        let b = Vector::from_vec(vec![1.0, -2.0, 3.0]);
        let (x, r) = least_squares_solve(&Matrix::identity(3, 3), &b).unwrap();
        assert!((x - &b).norm() < 1e-14 && r < 1e-14);
        let m = Matrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let (x, r) = least_squares_solve(&m, &e(2, 1)).unwrap();
        assert!(x[0].abs() < 1e-15);
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn least_squares_planted_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = Matrix::from_fn(9, 5, |_, _| rng.gen_range(-1.0..1.0));
        let x0 = Vector::from_fn(5, |_, _| rng.gen_range(-1.0..1.0));
        let (x, r) = least_squares_solve(&m, &(&m * &x0)).unwrap();
        assert!((x - x0).norm() < 1e-9);
        assert!(r < 1e-12);
    }

    #[test]
    fn flatten_round_trip() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(flatten(&m).as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(unflatten(&flatten(&m), 2), m);
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = Matrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0]);
        let n = null_space(&m, 1e-9).unwrap();
        assert_eq!(n.dim(), 2);
        for v in n.basis() {
            assert!((&m * v).norm() < 1e-14);
        }
    }
}
