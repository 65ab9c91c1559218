//! Small dense complex linear algebra used throughout the crate.
//!
//! Everything here operates on `nalgebra::DMatrix<Complex64>`; the matrices
//! in scope are at most a few hundred rows, so no effort is spent on
//! blocking or sparsity.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Kronecker product `a ⊗ b` with the row-major convention `(i_a, i_b) -> i_a * dim_b + i_b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `(m + m†) / 2`
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Largest deviation of `m` from being Hermitian.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Matrix unit `|row⟩⟨col|` of size `rows × cols`.
pub fn matrix_unit(rows: usize, cols: usize, row: usize, col: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    m[(row, col)] = ONE;
    m
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
///
/// The input is symmetrized first so small non-Hermitian noise does not leak
/// into the decomposition.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = hermitize(m);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.nrows(), |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    if m.nrows() == 2 {
        // closed form; this is the inner loop of the broadcast optimizer
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return vec![mean - r, mean + r];
    }
    let mut v: Vec<f64> = SymmetricEigen::new(hermitize(m)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Apply a real function to a Hermitian matrix through its spectrum.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(vals.len(), vals.iter().map(|&v| f(v))));
    &vecs * diag * vecs.adjoint()
}

/// `exp(k)` for anti-Hermitian `k`, computed from the Hermitian matrix `i·k`.
pub fn expm_antihermitian(k: &CMatrix) -> CMatrix {
    // k = -i h  with h = i k Hermitian, so exp(k) = Σ e^{-iλ} |v⟩⟨v|
    let h = k * I;
    hermitian_fn(&h, |lambda| Complex64::from_polar(1.0, -lambda))
}

/// Orthonormal basis (as columns) for the column span of `m`, via modified
/// Gram–Schmidt with reorthogonalization. Columns with residual norm below
/// `tol` are skipped.
pub fn orthonormal_columns(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::new();
    for j in 0..m.ncols() {
        let v = m.column(j).into_owned();
        if let Some(u) = orthogonalize(&v, &basis, tol) {
            basis.push(u);
        }
    }
    basis
}

/// Extend `existing` (orthonormal) with vectors from `candidates` until the
/// candidates' span is covered. Returns only the new vectors.
pub fn complete_basis(existing: &[CVector], candidates: &[CVector], tol: f64) -> Vec<CVector> {
    let mut all: Vec<CVector> = existing.to_vec();
    let mut added = Vec::new();
    for v in candidates {
        if let Some(u) = orthogonalize(v, &all, tol) {
            all.push(u.clone());
            added.push(u);
        }
    }
    added
}

fn orthogonalize(v: &CVector, basis: &[CVector], tol: f64) -> Option<CVector> {
    let mut w = v.clone();
    for _ in 0..2 {
        for b in basis {
            let proj = b.dotc(&w);
            w -= b * proj;
        }
    }
    let n = w.norm();
    if n > tol {
        Some(w / c(n, 0.0))
    } else {
        None
    }
}

/// Stack column vectors into a matrix with `rows` rows.
pub fn columns_to_matrix(rows: usize, cols: &[CVector]) -> CMatrix {
    CMatrix::from_fn(rows, cols.len(), |r, k| cols[k][r])
}

/// Operator (spectral) norm via the largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    eigvalsh(&gram).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
