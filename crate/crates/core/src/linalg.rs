//! Dense complex matrix helpers shared by the Dicke and Fock solvers.

use ndarray::Array2;
use num_complex::Complex64;

pub type CMatrix = Array2<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) - b.dot(a)
}

pub fn identity(dim: usize) -> CMatrix {
    Array2::from_diag_elem(dim, c(1.0))
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diag().sum()
}

/// Frobenius norm.
pub fn norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute row sum; an upper bound on the spectral norm for the
/// Hermitian matrices used here.
pub fn norm_inf(a: &CMatrix) -> f64 {
    a.rows().into_iter().map(|row| row.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Distance from Hermiticity, `||a - a^dag||_F`.
pub fn hermiticity_error(a: &CMatrix) -> f64 {
    norm(&(a - &dagger(a)))
}

/// `tr(rho op)`.
pub fn expect(rho: &CMatrix, op: &CMatrix) -> Complex64 {
    // tr(rho op) = sum_ij rho_ij op_ji
    rho.indexed_iter().map(|((i, j), r)| r * op[[j, i]]).sum()
}

fn to_nalgebra(a: &CMatrix) -> nalgebra::DMatrix<Complex64> {
    let (r, c) = a.dim();
    nalgebra::DMatrix::from_fn(r, c, |i, j| a[[i, j]])
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let herm = (a + &dagger(a)).mapv(|z| z * 0.5);
    let mut ev: Vec<f64> = to_nalgebra(&herm).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a).first().copied().unwrap_or(0.0)
}

/// Eigen-decomposition of a Hermitian matrix: `(eigenvalues, eigenvectors as columns)`.
pub fn hermitian_eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = to_nalgebra(a).symmetric_eigen();
    let n = a.nrows();
    let vecs = Array2::from_shape_fn((n, n), |(i, j)| eig.eigenvectors[(i, j)]);
    (eig.eigenvalues.iter().copied().collect(), vecs)
}

/// `exp(-i h t)` for Hermitian `h`, via eigendecomposition.
pub fn unitary_propagator(h: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigh(h);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for j in 0..n {
        let phase = Complex64::from_polar(1.0, -vals[j] * t);
        scaled.column_mut(j).mapv_inplace(|z| z * phase);
    }
    scaled.dot(&dagger(&vecs))
}
