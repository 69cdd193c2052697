//! Lie algebras of real square matrices.
//!
//! Operator subspaces (closures, centers, centralizers) are returned in
//! flattened row-major coordinates with the Frobenius inner product.

use crate::linalg::{flatten, unflatten, LinalgError, Matrix, Subspace, Vector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("matrix size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("basis of {name} is linearly dependent (rank {rank} < {len})")]
    DependentBasis { name: String, rank: usize, len: usize },
    #[error("{name} is not closed under the bracket (residual {residual:e})")]
    NotClosed { name: String, residual: f64 },
    #[error("matrix is not in {name} (residual {residual:e})")]
    NotInAlgebra { name: String, residual: f64 },
    #[error("bracket closure did not stabilize within {0} rounds")]
    ClosureCapExceeded(usize),
}

pub type Result<T> = std::result::Result<T, LieError>;

/// `AB - BA`.
pub fn bracket(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(LieError::SizeMismatch(a.nrows(), b.nrows()));
    }
    Ok(a * b - b * a)
}

/// Standard basis element `E_ij - E_ji` of so(n).
pub fn so_generator(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m[(j, i)] = -1.0;
    m
}

/// Real form of the complex matrix `re + i*im` as `[[re, -im], [im, re]]`.
pub fn complex_to_real(re: &Matrix, im: &Matrix) -> Matrix {
    let n = re.nrows();
    let mut m = Matrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(re);
    m.view_mut((n, n), (n, n)).copy_from(re);
    m.view_mut((0, n), (n, n)).copy_from(&-im);
    m.view_mut((n, 0), (n, n)).copy_from(im);
    m
}

#[derive(Debug, Clone)]
pub struct MatrixLieAlgebra {
    name: String,
    n: usize,
    basis: Vec<Matrix>,
    tol: f64,
    gram_inv: Matrix,
    ad: Vec<Matrix>,
}

impl MatrixLieAlgebra {
    pub fn new(name: &str, basis: Vec<Matrix>, tol: f64) -> Result<Self> {
        let n = basis.first().map_or(0, |b| b.nrows());
        for b in &basis {
            if b.nrows() != n || b.ncols() != n {
                return Err(LieError::SizeMismatch(n, b.nrows()));
            }
        }
        let flat: Vec<Vector> = basis.iter().map(flatten).collect();
        let rank = Subspace::span(n * n, &flat, tol)?.dim();
        if rank < basis.len() {
            return Err(LieError::DependentBasis { name: name.into(), rank, len: basis.len() });
        }
        let d = basis.len();
        let gram = Matrix::from_fn(d, d, |i, j| flat[i].dot(&flat[j]));
        let gram_inv = gram.try_inverse().unwrap_or_else(|| Matrix::zeros(d, d));
        let mut alg = MatrixLieAlgebra { name: name.into(), n, basis, tol, gram_inv, ad: Vec::new() };
        let mut ad = Vec::with_capacity(d);
        let mut worst: f64 = 0.0;
        for i in 0..d {
            let mut m = Matrix::zeros(d, d);
            for j in 0..d {
                let br = bracket(&alg.basis[i], &alg.basis[j])?;
                let (c, r) = alg.coords_with_residual(&br);
                let scale = br.norm().max(1.0);
                worst = worst.max(r / scale);
                m.set_column(j, &c);
            }
            ad.push(m);
        }
        if worst > tol {
            return Err(LieError::NotClosed { name: alg.name, residual: worst });
        }
        alg.ad = ad;
        Ok(alg)
    }

    /// so(n) with basis `E_ij - E_ji`, `i < j`, in lexicographic order.
    pub fn so(n: usize, tol: f64) -> Result<Self> {
        let mut basis = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                basis.push(so_generator(n, i, j));
            }
        }
        Self::new(&format!("so({n})"), basis, tol)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix_size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn coords_with_residual(&self, m: &Matrix) -> (Vector, f64) {
        let v = flatten(m);
        let rhs = Vector::from_iterator(self.dim(), self.basis.iter().map(|b| flatten(b).dot(&v)));
        let c = &self.gram_inv * rhs;
        let r = (self.element(&c) - m).norm();
        (c, r)
    }

    /// Basis coordinates of `m`; fails if `m` is outside the algebra.
    pub fn coordinates(&self, m: &Matrix) -> Result<Vector> {
        if m.shape() != (self.n, self.n) {
            return Err(LieError::SizeMismatch(self.n, m.nrows()));
        }
        let (c, r) = self.coords_with_residual(m);
        if r > self.tol * m.norm().max(1.0) {
            return Err(LieError::NotInAlgebra { name: self.name.clone(), residual: r });
        }
        Ok(c)
    }

    pub fn element(&self, coords: &Vector) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for (c, b) in coords.iter().zip(&self.basis) {
            m += b * *c;
        }
        m
    }

    /// Matrix of `ad(basis_i)` in basis coordinates.
    pub fn ad_basis(&self, i: usize) -> &Matrix {
        &self.ad[i]
    }

    /// Matrix of `ad(x)` for `x` given in basis coordinates.
    pub fn ad(&self, x: &Vector) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for (c, a) in x.iter().zip(&self.ad) {
            if *c != 0.0 {
                m += a * *c;
            }
        }
        m
    }

    /// Bracket in basis coordinates.
    pub fn bracket_coords(&self, x: &Vector, y: &Vector) -> Vector {
        self.ad(x) * y
    }

    /// Gram matrix of the Killing form `tr(ad X ad Y)`.
    pub fn killing_form(&self) -> Matrix {
        let d = self.dim();
        Matrix::from_fn(d, d, |i, j| (&self.ad[i] * &self.ad[j]).trace())
    }

    /// The algebra itself as a subspace of flattened matrices.
    pub fn as_subspace(&self) -> Subspace {
        let flat: Vec<Vector> = self.basis.iter().map(flatten).collect();
        Subspace::span(self.n * self.n, &flat, self.tol).expect("basis validated at construction")
    }

    pub fn center(&self) -> Result<Subspace> {
        let d = self.dim();
        let mut m = Matrix::zeros(d * d, d);
        for (j, a) in self.ad.iter().enumerate() {
            m.view_mut((j * d, 0), (d, d)).copy_from(a);
        }
        let ker = crate::linalg::null_space(&m, self.tol)?;
        self.coords_to_matrices(&ker)
    }

    pub fn commutator_ideal(&self) -> Result<Subspace> {
        let mut gens = Vec::new();
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                gens.push(flatten(&bracket(&self.basis[i], &self.basis[j])?));
            }
        }
        Ok(Subspace::span(self.n * self.n, &gens, self.tol)?)
    }

    /// Elements of this algebra commuting with every element of `v`.
    pub fn centralizer_in(&self, v: &Subspace) -> Result<Subspace> {
        let nn = self.n * self.n;
        if v.ambient_dim() != nn {
            return Err(LieError::SizeMismatch(nn, v.ambient_dim()));
        }
        let own = self.as_subspace();
        for b in v.basis() {
            let r = own.residual(b)?;
            if r > self.tol {
                return Err(LieError::NotInAlgebra { name: self.name.clone(), residual: r });
            }
        }
        let d = self.dim();
        let mut m = Matrix::zeros(nn * v.dim(), d);
        for (l, b) in v.basis().iter().enumerate() {
            let bm = unflatten(b, self.n);
            for k in 0..d {
                let col = flatten(&bracket(&self.basis[k], &bm)?);
                m.view_mut((l * nn, k), (nn, 1)).copy_from(&col);
            }
        }
        let ker = crate::linalg::null_space(&m, self.tol)?;
        self.coords_to_matrices(&ker)
    }

    fn coords_to_matrices(&self, s: &Subspace) -> Result<Subspace> {
        let mats: Vec<Vector> = s.basis().iter().map(|c| flatten(&self.element(c))).collect();
        Ok(Subspace::span(self.n * self.n, &mats, self.tol)?)
    }
}

/// Smallest bracket-closed subspace containing `generators`.
///
/// Each round adds the brackets of all basis pairs. The round count is
/// capped at the dimension of so(n) (or gl(n) for non-skew input).
pub fn bracket_closure(generators: &[Matrix], tol: f64) -> Result<Subspace> {
    let n = generators.first().map_or(0, |g| g.nrows());
    for g in generators {
        if g.shape() != (n, n) {
            return Err(LieError::SizeMismatch(n, g.nrows()));
        }
    }
    let flat: Vec<Vector> = generators.iter().map(flatten).collect();
    let s = Subspace::span(n * n, &flat, tol)?;
    close_subspace(s, n)
}

/// Bracket closure of an operator subspace of `n x n` matrices.
pub fn close_subspace(mut s: Subspace, n: usize) -> Result<Subspace> {
    let skew = s.basis().iter().all(|b| {
        let m = unflatten(b, n);
        (&m + m.transpose()).norm() <= s.tol()
    });
    let cap = if skew { n * n.saturating_sub(1) / 2 } else { n * n };
    for _ in 0..=cap {
        let mats: Vec<Matrix> = s.basis().iter().map(|b| unflatten(b, n)).collect();
        let mut brs = Vec::new();
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                brs.push(flatten(&bracket(&mats[i], &mats[j])?));
            }
        }
        let next = s.extend(&brs)?;
        if next.dim() == s.dim() {
            return Ok(s);
        }
        s = next;
    }
    Err(LieError::ClosureCapExceeded(cap))
}

/// Largest distance of a pairwise bracket of basis elements from `s`.
pub fn closure_residual(s: &Subspace, n: usize) -> Result<f64> {
    let mats: Vec<Matrix> = s.basis().iter().map(|b| unflatten(b, n)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            worst = worst.max(s.residual(&flatten(&bracket(&mats[i], &mats[j])?))?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn l(n: usize, i: usize, j: usize) -> Matrix {
        so_generator(n, i, j)
    }

    fn u2() -> MatrixLieAlgebra {
        let z = Matrix::zeros(2, 2);
        let e = |i: usize, j: usize| {
            let mut m = Matrix::zeros(2, 2);
            m[(i, j)] = 1.0;
            m
        };
        let basis = vec![
            complex_to_real(&(e(0, 1) - e(1, 0)), &z),
            complex_to_real(&z, &(e(0, 1) + e(1, 0))),
            complex_to_real(&z, &e(0, 0)),
            complex_to_real(&z, &e(1, 1)),
        ];
        MatrixLieAlgebra::new("u(2)", basis, TOL).unwrap()
    }

    #[test]
    fn bracket_basics() {
        let a = l(3, 0, 1);
        assert_eq!(bracket(&a, &a).unwrap(), Matrix::zeros(3, 3));
        // standard generators (L_i)_{jk} = -eps_{ijk}
        let l1 = l(3, 2, 1);
        let l2 = l(3, 0, 2);
        let l3 = l(3, 1, 0);
        assert_eq!(bracket(&l1, &l2).unwrap(), l3);
        assert!(bracket(&l1, &Matrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn jacobi_identity_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let r = |rng: &mut ChaCha8Rng| Matrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
            let (a, b, c) = (r(&mut rng), r(&mut rng), r(&mut rng));
            let j = bracket(&a, &bracket(&b, &c).unwrap()).unwrap()
                + bracket(&b, &bracket(&c, &a).unwrap()).unwrap()
                + bracket(&c, &bracket(&a, &b).unwrap()).unwrap();
            assert!(j.norm() < 1e-13);
        }
    }

    #[test]
    fn killing_form_of_abelian_and_compact() {
        let diag = vec![
            Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 0.0])),
            Matrix::from_diagonal(&Vector::from_vec(vec![0.0, 1.0])),
        ];
        let abelian = MatrixLieAlgebra::new("t2", diag, TOL).unwrap();
        assert_eq!(abelian.killing_form().norm(), 0.0);
        let so3 = MatrixLieAlgebra::so(3, TOL).unwrap();
        let (vals, _) = crate::linalg::sym_eig(&so3.killing_form(), TOL).unwrap();
        assert!(vals.iter().all(|&v| v < -1e-6));
    }

    #[test]
    fn killing_form_is_invariant() {
        let so5 = MatrixLieAlgebra::so(5, TOL).unwrap();
        let b = so5.killing_form();
        for z in 0..so5.dim() {
            let ad = so5.ad_basis(z);
            let r = (ad.transpose() * &b + &b * ad).norm();
            assert!(r < 1e-9);
        }
    }

    #[test]
    fn non_closed_basis_is_rejected() {
        let r = MatrixLieAlgebra::new("pair", vec![l(3, 0, 1), l(3, 1, 2)], TOL);
        assert!(matches!(r, Err(LieError::NotClosed { .. })));
        let r = MatrixLieAlgebra::new("dup", vec![l(3, 0, 1), l(3, 0, 1) * 2.0], TOL);
        assert!(matches!(r, Err(LieError::DependentBasis { .. })));
    }

    #[test]
    fn closures() {
        assert_eq!(bracket_closure(&[Matrix::zeros(3, 3)], TOL).unwrap().dim(), 0);
        assert_eq!(bracket_closure(&[l(3, 1, 2), l(3, 2, 0)], TOL).unwrap().dim(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = |rng: &mut ChaCha8Rng| {
            let a = Matrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
            &a - a.transpose()
        };
        let s = bracket_closure(&[r(&mut rng), r(&mut rng)], TOL).unwrap();
        assert_eq!(s.dim(), 10);
        assert!(closure_residual(&s, 5).unwrap() < 1e-9);
    }

    #[test]
    fn closure_is_idempotent() {
        let s = bracket_closure(&[l(4, 0, 1), l(4, 1, 2)], TOL).unwrap();
        let t = close_subspace(s.clone(), 4).unwrap();
        assert!(s.equal(&t).unwrap().0);
        assert_eq!(s.dim(), 3);
    }

    #[test]
    fn centers_and_ideals() {
        assert_eq!(MatrixLieAlgebra::so(3, TOL).unwrap().center().unwrap().dim(), 0);
        let u = u2();
        let c = u.center().unwrap();
        assert_eq!(c.dim(), 1);
        let i4 = complex_to_real(&Matrix::zeros(2, 2), &Matrix::identity(2, 2));
        assert!(c.contains(&flatten(&i4)).unwrap().0);
        let ideal = u.commutator_ideal().unwrap();
        assert_eq!(ideal.dim(), 3);
        assert_eq!(c.sum(&ideal).unwrap().dim(), 4);
        assert!(c.sum(&ideal).unwrap().equal(&u.as_subspace()).unwrap().0);
    }

    #[test]
    fn commutator_ideal_of_so2_plus_so3() {
        let basis = vec![l(5, 0, 1), l(5, 2, 3), l(5, 2, 4), l(5, 3, 4)];
        let k = MatrixLieAlgebra::new("k", basis, TOL).unwrap();
        let ideal = k.commutator_ideal().unwrap();
        assert_eq!(ideal.dim(), 3);
        for b in k.basis() {
            for v in ideal.basis() {
                let br = bracket(b, &unflatten(v, 5)).unwrap();
                assert!(ideal.contains(&flatten(&br)).unwrap().0);
            }
        }
        let c = k.center().unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&flatten(&l(5, 0, 1))).unwrap().0);
    }

    #[test]
    fn centralizer_of_a_rotation_plane() {
        let so4 = MatrixLieAlgebra::so(4, TOL).unwrap();
        let v = Subspace::span(16, &[flatten(&l(4, 0, 1))], TOL).unwrap();
        let c = so4.centralizer_in(&v).unwrap();
        // so(2) x so(2)
        assert_eq!(c.dim(), 2);
        let outside = Subspace::span(16, &[flatten(&Matrix::identity(4, 4))], TOL).unwrap();
        assert!(matches!(so4.centralizer_in(&outside), Err(LieError::NotInAlgebra { .. })));
    }

    #[test]
    fn coordinates_round_trip() {
        let so4 = MatrixLieAlgebra::so(4, TOL).unwrap();
        let x = Vector::from_fn(6, |i, _| i as f64 - 2.5);
        let m = so4.element(&x);
        assert!((so4.coordinates(&m).unwrap() - x).norm() < 1e-13);
        assert!(so4.coordinates(&Matrix::identity(4, 4)).is_err());
    }
}
