use super::{Result, SymSpaceError, SymmetricSpaceModel};
use crate::liealg::{complex_to_real, so_generator};
use crate::linalg::{Matrix, Vector};

/// Stable model identifiers, in catalog order.
pub const MODEL_NAMES: [&str; 8] = [
    "sphere4",
    "sphere5",
    "hyperbolic4",
    "su3_so3",
    "sl3_so3",
    "quadric3",
    "grassmann33",
    "euclid_su3_so3",
];

pub fn catalog(tol: f64) -> Result<Vec<SymmetricSpaceModel>> {
    MODEL_NAMES.iter().map(|n| model_by_name(n, tol)).collect()
}

pub fn model_by_name(name: &str, tol: f64) -> Result<SymmetricSpaceModel> {
    match name {
        "sphere4" => sphere(4, tol),
        "sphere5" => sphere(5, tol),
        "hyperbolic4" => hyperbolic(4, tol),
        "su3_so3" => su_so3("su3_so3", tol),
        "sl3_so3" => sl_so3(tol),
        "quadric3" => quadric3(tol),
        "grassmann33" => grassmann33(tol),
        "euclid_su3_so3" => Ok(su_so3("su3_so3", tol)?.flat_wrapper("euclid_su3_so3")),
        other => Err(SymSpaceError::UnknownModel(other.to_string())),
    }
}

fn sym(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m[(j, i)] = 1.0;
    m
}

fn diag(entries: &[f64]) -> Matrix {
    Matrix::from_diagonal(&Vector::from_row_slice(entries))
}

fn traceless_symmetric_3() -> Vec<Matrix> {
    vec![
        sym(3, 0, 1),
        sym(3, 0, 2),
        sym(3, 1, 2),
        diag(&[1.0, -1.0, 0.0]),
        diag(&[0.0, 1.0, -1.0]),
    ]
}

fn so3_basis() -> Vec<Matrix> {
    vec![so_generator(3, 0, 1), so_generator(3, 0, 2), so_generator(3, 1, 2)]
}

/// SO(n+1)/SO(n).
fn sphere(n: usize, tol: f64) -> Result<SymmetricSpaceModel> {
    let m = n + 1;
    let mut k = Vec::new();
    for i in 1..m {
        for j in i + 1..m {
            k.push(so_generator(m, i, j));
        }
    }
    let p = (1..m).map(|j| so_generator(m, 0, j)).collect();
    SymmetricSpaceModel::from_cartan(&format!("sphere{n}"), k, p, -1.0, vec![so_generator(m, 0, 1)], tol)
}

/// SO(n,1)/SO(n) in the Lorentz realization with timelike index 0.
fn hyperbolic(n: usize, tol: f64) -> Result<SymmetricSpaceModel> {
    let m = n + 1;
    let mut k = Vec::new();
    for i in 1..m {
        for j in i + 1..m {
            k.push(so_generator(m, i, j));
        }
    }
    let p: Vec<Matrix> = (1..m).map(|j| sym(m, 0, j)).collect();
    let candidate = p[0].clone();
    SymmetricSpaceModel::from_cartan(&format!("hyperbolic{n}"), k, p, 1.0, vec![candidate], tol)
}

/// SU(3)/SO(3) with su(3) realized as real 6x6 matrices.
fn su_so3(name: &str, tol: f64) -> Result<SymmetricSpaceModel> {
    let z = Matrix::zeros(3, 3);
    let k = so3_basis().iter().map(|a| complex_to_real(a, &z)).collect();
    let p = traceless_symmetric_3().iter().map(|s| complex_to_real(&z, s)).collect();
    let x = complex_to_real(&z, &diag(&[2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]));
    SymmetricSpaceModel::from_cartan(name, k, p, -1.0, vec![x], tol)
}

/// SL(3,R)/SO(3).
fn sl_so3(tol: f64) -> Result<SymmetricSpaceModel> {
    let x = diag(&[2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]);
    SymmetricSpaceModel::from_cartan("sl3_so3", so3_basis(), traceless_symmetric_3(), 1.0, vec![x], tol)
}

/// SO(5)/(SO(2)xSO(3)); the admissible element comes from the root search.
fn quadric3(tol: f64) -> Result<SymmetricSpaceModel> {
    let k = vec![so_generator(5, 0, 1), so_generator(5, 2, 3), so_generator(5, 2, 4), so_generator(5, 3, 4)];
    let mut p = Vec::new();
    for a in 0..2 {
        for b in 2..5 {
            p.push(so_generator(5, a, b));
        }
    }
    SymmetricSpaceModel::from_cartan("quadric3", k, p, -1.0, Vec::new(), tol)
}

/// SO(6)/(SO(3)xSO(3)).
fn grassmann33(tol: f64) -> Result<SymmetricSpaceModel> {
    let mut k = Vec::new();
    for block in [0, 3] {
        for i in block..block + 3 {
            for j in i + 1..block + 3 {
                k.push(so_generator(6, i, j));
            }
        }
    }
    let mut p = Vec::new();
    for a in 0..3 {
        for b in 3..6 {
            p.push(so_generator(6, a, b));
        }
    }
    let x = (0..3).map(|i| so_generator(6, i, i + 3)).fold(Matrix::zeros(6, 6), |acc, m| acc + m) * 0.5;
    SymmetricSpaceModel::from_cartan("grassmann33", k, p, -1.0, vec![x], tol)
}
