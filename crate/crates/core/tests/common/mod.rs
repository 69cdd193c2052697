//! Exact rational arithmetic used as an independent oracle.

#![allow(dead_code)]

use holocalc_core::linalg::Matrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

/// Exact copy of an integer-valued matrix, or `None`.
pub fn exact_matrix(m: &Matrix) -> Option<ExactMatrix> {
    let mut entries = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let x = m[(r, c)];
            if x.fract() != 0.0 || x.abs() > 1e12 {
                return None;
            }
            entries.push(q(x as i64));
        }
    }
    Some(ExactMatrix { n: m.nrows(), entries })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix {
    pub n: usize,
    pub entries: Vec<Q>,
}

impl ExactMatrix {
    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        let n = self.n;
        let mut entries = vec![Q::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * &other.entries[k * n + j];
                }
            }
        }
        ExactMatrix { n, entries }
    }

    pub fn bracket(&self, other: &ExactMatrix) -> ExactMatrix {
        let ab = self.mul(other);
        let ba = other.mul(self);
        ExactMatrix { n: self.n, entries: ab.entries.iter().zip(&ba.entries).map(|(x, y)| x - y).collect() }
    }
}

/// Incremental row echelon form over the rationals.
#[derive(Default)]
pub struct Echelon {
    rows: Vec<(usize, Vec<Q>)>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Q]) -> Vec<Q> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    /// Adds `v`; returns whether it was independent.
    pub fn insert(&mut self, v: &[Q]) -> bool {
        let v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { return false };
        let inv = Q::one() / &v[p];
        let v: Vec<Q> = v.iter().map(|x| x * &inv).collect();
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(&v) {
                    *x -= &f * y;
                }
            }
        }
        self.rows.push((p, v));
        true
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
}

pub fn exact_rank(vectors: &[Vec<Q>]) -> usize {
    let mut e = Echelon::default();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Dimension of the Lie algebra generated by `gens`.
pub fn exact_closure_dim(gens: &[ExactMatrix]) -> usize {
    let mut echelon = Echelon::default();
    let mut basis: Vec<ExactMatrix> = Vec::new();
    for g in gens {
        if echelon.insert(&g.entries) {
            basis.push(g.clone());
        }
    }
    let mut start = 0;
    loop {
        let mut added = Vec::new();
        for i in 0..basis.len() {
            for j in (i + 1).max(start)..basis.len() {
                let b = basis[i].bracket(&basis[j]);
                if echelon.insert(&b.entries) {
                    added.push(b);
                }
            }
        }
        if added.is_empty() {
            return basis.len();
        }
        start = basis.len();
        basis.extend(added);
    }
}

pub fn max_abs(v: &[Q]) -> Q {
    v.iter().map(|x| x.abs()).fold(Q::zero(), |a, b| if b > a { b } else { a })
}
