use num_complex::Complex64;

use super::linalg::{self, c, CMatrix};
use super::state::DensityMatrix;
use crate::error::{check_dim, Error, Result};

/// Eigenvalues closer than this are treated as one degenerate level.
pub const EIGENVALUE_MERGE_TOL: f64 = 1e-9;

const PROJECTION_TOL: f64 = 1e-10;

/// A Hamiltonian stored by its spectral resolution `H = Σ_x x R_x`.
///
/// Eigenvalues are kept strictly increasing with one projection per distinct
/// level, so dephasing and evolution never need a fresh diagonalization.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    eigenvalues: Vec<f64>,
    projections: Vec<CMatrix>,
}

impl HamiltonianSpec {
    /// Build from explicit spectral data, validating the projection family.
    pub fn new(eigenvalues: Vec<f64>, projections: Vec<CMatrix>) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.len() != projections.len() {
            return Err(Error::InvalidHamiltonian(format!(
                "{} eigenvalues for {} projections",
                eigenvalues.len(),
                projections.len()
            )));
        }
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidHamiltonian("non-finite eigenvalue".into()));
        }
        let dim = projections[0].nrows();
        let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
        let projections: Vec<CMatrix> = order.iter().map(|&i| projections[i].clone()).collect();
        for w in eigenvalues.windows(2) {
            if w[1] - w[0] <= EIGENVALUE_MERGE_TOL {
                return Err(Error::InvalidHamiltonian(format!("eigenvalues {} and {} are not distinct", w[0], w[1])));
            }
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for (i, p) in projections.iter().enumerate() {
            if p.shape() != (dim, dim) {
                return Err(Error::InvalidHamiltonian("projections differ in shape".into()));
            }
            if linalg::hermiticity_error(p) > PROJECTION_TOL {
                return Err(Error::InvalidHamiltonian(format!("projection {i} is not Hermitian")));
            }
            if linalg::max_abs_diff(&(p * p), p) > PROJECTION_TOL {
                return Err(Error::InvalidHamiltonian(format!("projection {i} is not idempotent")));
            }
            for q in &projections[i + 1..] {
                if linalg::max_abs(&(p * q)) > PROJECTION_TOL {
                    return Err(Error::InvalidHamiltonian("projections are not mutually orthogonal".into()));
                }
            }
            sum += p;
        }
        if linalg::max_abs_diff(&sum, &linalg::identity(dim)) > PROJECTION_TOL {
            return Err(Error::InvalidHamiltonian("projections do not sum to the identity".into()));
        }
        Ok(Self { eigenvalues, projections })
    }

    /// Diagonal Hamiltonian in the computational basis; repeated energies
    /// are merged into one projection.
    pub fn from_diagonal(energies: &[f64]) -> Result<Self> {
        if energies.is_empty() || energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidHamiltonian("empty or non-finite diagonal".into()));
        }
        let dim = energies.len();
        let vecs: Vec<(f64, CMatrix)> =
            energies.iter().enumerate().map(|(k, &e)| (e, linalg::matrix_unit(dim, dim, k, k))).collect();
        Ok(Self::from_rank_one_parts(dim, vecs))
    }

    /// Diagonalize a Hermitian matrix once and store its spectral data.
    pub fn from_matrix(h: &CMatrix) -> Result<Self> {
        if !h.is_square() || h.nrows() == 0 {
            return Err(Error::InvalidHamiltonian("matrix is not square".into()));
        }
        if linalg::hermiticity_error(h) > PROJECTION_TOL {
            return Err(Error::InvalidHamiltonian("matrix is not Hermitian".into()));
        }
        let dim = h.nrows();
        let (vals, vecs) = linalg::eigh(h);
        let parts = (0..dim)
            .map(|k| {
                let v = vecs.column(k);
                (vals[k], v * v.adjoint())
            })
            .collect();
        Ok(Self::from_rank_one_parts(dim, parts))
    }

    /// Group `(energy, projector)` pairs by energy (within the merge tolerance).
    fn from_rank_one_parts(dim: usize, mut parts: Vec<(f64, CMatrix)>) -> Self {
        parts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut eigenvalues: Vec<f64> = Vec::new();
        let mut projections: Vec<CMatrix> = Vec::new();
        let mut cluster: Vec<f64> = Vec::new();
        for (e, p) in parts {
            match cluster.last() {
                Some(&last) if e - last <= EIGENVALUE_MERGE_TOL => {
                    cluster.push(e);
                    *projections.last_mut().unwrap() += p;
                    *eigenvalues.last_mut().unwrap() = cluster.iter().sum::<f64>() / cluster.len() as f64;
                }
                _ => {
                    cluster = vec![e];
                    eigenvalues.push(e);
                    projections.push(p);
                }
            }
        }
        debug_assert!(projections.iter().all(|p| p.nrows() == dim));
        Self { eigenvalues, projections }
    }

    pub fn dim(&self) -> usize {
        self.projections[0].nrows()
    }

    /// Distinct energy levels, strictly increasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.projections
    }

    pub fn levels(&self) -> impl Iterator<Item = (f64, &CMatrix)> {
        self.eigenvalues.iter().copied().zip(self.projections.iter())
    }

    pub fn matrix(&self) -> CMatrix {
        let mut h = CMatrix::zeros(self.dim(), self.dim());
        for (e, p) in self.levels() {
            h += p * c(e, 0.0);
        }
        h
    }

    /// `e^{-iHt}`
    pub fn propagator(&self, t: f64) -> CMatrix {
        let mut u = CMatrix::zeros(self.dim(), self.dim());
        for (e, p) in self.levels() {
            u += p * Complex64::from_polar(1.0, -e * t);
        }
        u
    }

    /// True when every eigenvalue is an integer (within the merge tolerance),
    /// so the dynamics has period 2π.
    pub fn has_integer_spectrum(&self) -> bool {
        self.eigenvalues.iter().all(|e| (e - e.round()).abs() <= EIGENVALUE_MERGE_TOL)
    }

    /// Kronecker sum `H_A ⊗ 1 + 1 ⊗ H_B`; colliding sums share one projection.
    pub fn tensor(&self, other: &Self) -> Self {
        let dim = self.dim() * other.dim();
        let mut parts = Vec::with_capacity(self.eigenvalues.len() * other.eigenvalues.len());
        for (ea, pa) in self.levels() {
            for (eb, pb) in other.levels() {
                parts.push((ea + eb, linalg::kron(pa, pb)));
            }
        }
        Self::from_rank_one_parts(dim, parts)
    }

    /// Gibbs state `e^{-H/kT} / Z`.
    pub fn gibbs_state(&self, kt: f64) -> DensityMatrix {
        let e0 = self.eigenvalues[0];
        let weights: Vec<f64> = self.eigenvalues.iter().map(|e| (-(e - e0) / kt).exp()).collect();
        let z: f64 = self.levels().map(|(_, p)| linalg::trace(p).re).zip(&weights).map(|(r, w)| r * w).sum();
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for (p, w) in self.projections.iter().zip(&weights) {
            m += p * c(w / z, 0.0);
        }
        DensityMatrix::from_raw(m)
    }
}

/// `α_t(ρ) = e^{-iHt} ρ e^{iHt}`
pub fn evolve(rho: &DensityMatrix, h: &HamiltonianSpec, t: f64) -> Result<DensityMatrix> {
    check_dim(h.dim(), rho.dim())?;
    let u = h.propagator(t);
    Ok(DensityMatrix::from_raw(&u * rho.matrix() * u.adjoint()))
}

/// Time average `Σ_x R_x ρ R_x`.
pub fn dephase(rho: &DensityMatrix, h: &HamiltonianSpec) -> Result<DensityMatrix> {
    check_dim(h.dim(), rho.dim())?;
    Ok(DensityMatrix::from_raw(dephase_matrix(rho.matrix(), h)))
}

pub(crate) fn dephase_matrix(m: &CMatrix, h: &HamiltonianSpec) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for p in h.projections() {
        out += p * m * p;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::state::PureState;
    use std::f64::consts::PI;

    fn qubit() -> HamiltonianSpec {
        HamiltonianSpec::from_diagonal(&[0.0, 1.0]).unwrap()
    }

    #[test]
    fn plus_evolves_to_minus_at_pi() {
        // e^{-iHπ} = diag(1, e^{-iπ}) = diag(1, -1), so |+⟩ ↦ |−⟩
        let plus = PureState::plus().density();
        let out = evolve(&plus, &qubit(), PI).unwrap();
        let minus = PureState::equatorial(PI).density();
        assert!(linalg::max_abs_diff(out.matrix(), minus.matrix()) < 1e-15);
    }

    #[test]
    fn evolution_fixes_diagonal_states_and_t_zero() {
        let rho = DensityMatrix::diagonal(&[0.2, 0.8]).unwrap();
        let out = evolve(&rho, &qubit(), 1.234).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
        let plus = PureState::plus().density();
        let out = evolve(&plus, &qubit(), 0.0).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), plus.matrix()) < 1e-15);
    }

    #[test]
    fn dephasing_examples() {
        let plus = PureState::plus().density();
        let out = dephase(&plus, &qubit()).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
        let diag = DensityMatrix::diagonal(&[0.4, 0.6]).unwrap();
        assert_eq!(dephase(&diag, &qubit()).unwrap().matrix(), diag.matrix());
    }

    #[test]
    fn kronecker_sum_merges_levels() {
        let joint = qubit().tensor(&qubit());
        assert_eq!(joint.eigenvalues(), &[0.0, 1.0, 2.0]);
        let ranks: Vec<f64> = joint.projections().iter().map(|p| linalg::trace(p).re).collect();
        assert_eq!(ranks, vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn near_degenerate_diagonal_is_merged() {
        let h = HamiltonianSpec::from_diagonal(&[1.0, 0.0, 1.0 + 1e-12]).unwrap();
        assert_eq!(h.eigenvalues().len(), 2);
    }

    #[test]
    fn from_matrix_recovers_spectrum() {
        let sx = CMatrix::from_row_slice(2, 2, &[linalg::ZERO, linalg::ONE, linalg::ONE, linalg::ZERO]);
        let h = HamiltonianSpec::from_matrix(&sx).unwrap();
        assert!((h.eigenvalues()[0] + 1.0).abs() < 1e-12 && (h.eigenvalues()[1] - 1.0).abs() < 1e-12);
        assert!(linalg::max_abs_diff(&h.matrix(), &sx) < 1e-12);
    }

    #[test]
    fn rejects_incomplete_projections() {
        let p = linalg::matrix_unit(2, 2, 0, 0);
        assert!(HamiltonianSpec::new(vec![0.0], vec![p]).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(evolve(&rho, &qubit(), 1.0), Err(Error::DimensionMismatch { .. })));
        assert!(dephase(&rho, &qubit()).is_err());
    }

    #[test]
    fn gibbs_populations() {
        let g = qubit().gibbs_state(1.0);
        let z = 1.0 + (-1.0f64).exp();
        assert!((g.matrix()[(0, 0)].re - 1.0 / z).abs() < 1e-15);
    }
}
