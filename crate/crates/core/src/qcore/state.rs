use num_complex::Complex64;

use super::linalg::{self, c, CMatrix, CVector};
use crate::error::{check_dim, Error, Result};

/// Tolerance for the Hermiticity, trace and positivity checks on states.
pub const STATE_TOL: f64 = 1e-10;

/// A density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validate and wrap a matrix.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() || mat.nrows() == 0 {
            return Err(Error::InvalidState(format!("matrix is {}x{}", mat.nrows(), mat.ncols())));
        }
        let herm = linalg::hermiticity_error(&mat);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = linalg::trace(&mat);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = linalg::eigvalsh(&mat)[0];
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("smallest eigenvalue {min:.3e}")));
        }
        Ok(Self { mat: linalg::hermitize(&mat) })
    }

    /// Wrap the output of a trace-preserving positive operation without
    /// re-running the eigenvalue check.
    pub(crate) fn from_raw(mat: CMatrix) -> Self {
        Self { mat: linalg::hermitize(&mat) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { mat: linalg::identity(dim) * c(1.0 / dim as f64, 0.0) }
    }

    /// Diagonal state in the computational basis.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(probs.len(), probs.iter().map(|&p| c(p, 0.0)));
        Self::new(CMatrix::from_diagonal(&v))
    }

    /// `|k⟩⟨k|`
    pub fn basis(dim: usize, k: usize) -> Self {
        Self { mat: linalg::matrix_unit(dim, dim, k, k) }
    }

    /// Qubit state `(1 + x σ_x + y σ_y + z σ_z) / 2`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = (x * x + y * y + z * z).sqrt();
        if r > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!("Bloch vector length {r} > 1")));
        }
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5 * (1.0 + z), 0.0), c(0.5 * x, -0.5 * y), c(0.5 * x, 0.5 * y), c(0.5 * (1.0 - z), 0.0)],
        );
        Ok(Self::from_raw(m))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.mat)
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `tr(ρ A)` for a Hermitian observable `A`.
    pub fn expectation(&self, obs: &CMatrix) -> Result<f64> {
        check_dim(self.dim(), obs.nrows())?;
        Ok(linalg::trace(&(&self.mat * obs)).re)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { mat: linalg::kron(&self.mat, &other.mat) }
    }

    /// Convex combination `Σ w_i ρ_i`; weights are assumed normalized.
    pub fn mixture(states: &[DensityMatrix], weights: &[f64]) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let mut acc = CMatrix::zeros(first.dim(), first.dim());
        for (s, &w) in states.iter().zip(weights) {
            check_dim(first.dim(), s.dim())?;
            acc += s.matrix() * c(w, 0.0);
        }
        Ok(Self::from_raw(acc))
    }
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    pub fn new(amps: CVector) -> Result<Self> {
        let n = amps.norm();
        if amps.is_empty() || (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state vector norm {n}")));
        }
        Ok(Self { amps })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let n = amps.norm();
        if !(n > 0.0) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(Self { amps: amps / c(n, 0.0) })
    }

    pub fn from_amplitudes(amps: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[k] = linalg::ONE;
        Self { amps: v }
    }

    /// `(|0⟩ + e^{iφ}|1⟩)/√2`
    pub fn equatorial(phase: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { amps: CVector::from_column_slice(&[c(s, 0.0), Complex64::from_polar(s, phase)]) }
    }

    pub fn plus() -> Self {
        Self::equatorial(0.0)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { amps: self.amps.kronecker(&other.amps) }
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { mat: &self.amps * self.amps.adjoint() }
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.density()
    }
}

/// Which factor of a bipartite system to keep when tracing out the other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of an arbitrary operator on `C^da ⊗ C^db`.
pub fn partial_trace_matrix(m: &CMatrix, da: usize, db: usize, keep: Keep) -> Result<CMatrix> {
    check_dim(da * db, m.nrows())?;
    check_dim(da * db, m.ncols())?;
    Ok(match keep {
        Keep::A => CMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Keep::B => CMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
    })
}

/// Reduced state of a bipartite density matrix.
pub fn partial_trace(rho: &DensityMatrix, dims: (usize, usize), keep: Keep) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if da == 0 || db == 0 || da * db != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: da * db });
    }
    Ok(DensityMatrix::from_raw(partial_trace_matrix(rho.matrix(), da, db, keep)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_trace_and_negative_spectrum() {
        assert!(DensityMatrix::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::diagonal(&[1.2, -0.2]).is_err());
        assert!(DensityMatrix::diagonal(&[0.25, 0.75]).is_ok());
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
    }

    #[test]
    fn product_state_partial_trace() {
        let a = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let b = PureState::plus().density();
        let ab = a.tensor(&b);
        let ra = partial_trace(&ab, (2, 2), Keep::A).unwrap();
        let rb = partial_trace(&ab, (2, 2), Keep::B).unwrap();
        assert!(linalg::max_abs_diff(ra.matrix(), a.matrix()) < 1e-12);
        assert!(linalg::max_abs_diff(rb.matrix(), b.matrix()) < 1e-12);
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::from_amplitudes(&[c(s, 0.0), linalg::ZERO, linalg::ZERO, c(s, 0.0)]).unwrap();
        let ra = partial_trace(&bell.density(), (2, 2), Keep::A).unwrap();
        assert!(linalg::max_abs_diff(ra.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_factorization_mismatch() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(partial_trace(&rho, (3, 2), Keep::A).is_err());
    }

    #[test]
    fn plus_tensor_plus_amplitudes() {
        let pp = PureState::plus().tensor(&PureState::plus());
        assert_eq!(pp.dim(), 4);
        for a in pp.amplitudes().iter() {
            assert!((a - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_of_states_is_state() {
        let a = DensityMatrix::diagonal(&[0.1, 0.9]).unwrap();
        let b = DensityMatrix::maximally_mixed(3);
        assert!(DensityMatrix::new(a.tensor(&b).into_matrix()).is_ok());
    }
}
