use super::hamiltonian::HamiltonianSpec;
use super::linalg::{self, c, CMatrix};
use super::state::DensityMatrix;
use crate::error::{check_dim, Error, Result};

/// Completeness tolerance for `Σ A_j† A_j = 1`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// A completely positive trace-preserving map in Kraus form,
/// `G(ρ) = Σ_j A_j ρ A_j†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        Self::with_tolerance(kraus, COMPLETENESS_TOL)
    }

    pub(crate) fn with_tolerance(kraus: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let (dim_out, dim_in) = first.shape();
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidChannel("empty Kraus operator".into()));
        }
        let mut sum = CMatrix::zeros(dim_in, dim_in);
        for a in &kraus {
            if a.shape() != (dim_out, dim_in) {
                return Err(Error::InvalidChannel("Kraus operators differ in shape".into()));
            }
            sum += a.adjoint() * a;
        }
        let dev = linalg::max_abs_diff(&sum, &linalg::identity(dim_in));
        if dev > tol {
            return Err(Error::InvalidChannel(format!("Σ A†A deviates from identity by {dev:.3e}")));
        }
        Ok(Self { dim_in, dim_out, kraus })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn is_square(&self) -> bool {
        self.dim_in == self.dim_out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dim(self.dim_in, rho.dim())?;
        Ok(DensityMatrix::from_raw(self.apply_matrix(rho.matrix())))
    }

    /// Linear extension of the channel to arbitrary operators.
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for a in &self.kraus {
            out += a * m * a.adjoint();
        }
        out
    }

    /// Largest deviation between two channels as linear maps, measured on
    /// the matrix-unit basis.
    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        check_dim(self.dim_in, other.dim_in)?;
        check_dim(self.dim_out, other.dim_out)?;
        let d = self.dim_in;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let e = linalg::matrix_unit(d, d, i, j);
                worst = worst.max(linalg::max_abs_diff(&self.apply_matrix(&e), &other.apply_matrix(&e)));
            }
        }
        Ok(worst)
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim_in: dim, dim_out: dim, kraus: vec![linalg::identity(dim)] }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Qubit amplitude damping: `A_0 = diag(1, √(1−γ))`, `A_1 = √γ |0⟩⟨1|`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidChannel(format!("damping rate {gamma} outside [0, 1]")));
        }
        let a0 = CMatrix::from_row_slice(2, 2, &[linalg::ONE, linalg::ZERO, linalg::ZERO, c((1.0 - gamma).sqrt(), 0.0)]);
        let a1 = linalg::matrix_unit(2, 2, 0, 1) * c(gamma.sqrt(), 0.0);
        Self::new(vec![a0, a1])
    }

    /// Amplitude damping towards the qubit state `diag(p0, 1 − p0)`
    /// (generalized amplitude damping). With `p0` the ground population of
    /// the Gibbs state this channel fixes the Gibbs state.
    pub fn thermal_amplitude_damping(gamma: f64, p0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) || !(0.0..=1.0).contains(&p0) {
            return Err(Error::InvalidChannel(format!("parameters ({gamma}, {p0}) outside [0, 1]")));
        }
        let g = gamma.sqrt();
        let s = (1.0 - gamma).sqrt();
        let (a, b) = (p0.sqrt(), (1.0 - p0).sqrt());
        let k0 = CMatrix::from_row_slice(2, 2, &[c(a, 0.0), linalg::ZERO, linalg::ZERO, c(a * s, 0.0)]);
        let k1 = linalg::matrix_unit(2, 2, 0, 1) * c(a * g, 0.0);
        let k2 = CMatrix::from_row_slice(2, 2, &[c(b * s, 0.0), linalg::ZERO, linalg::ZERO, c(b, 0.0)]);
        let k3 = linalg::matrix_unit(2, 2, 1, 0) * c(b * g, 0.0);
        Self::new(vec![k0, k1, k2, k3])
    }

    /// Complete dephasing in the computational basis, Kraus `{|k⟩⟨k|}`.
    pub fn full_dephasing(dim: usize) -> Self {
        let kraus = (0..dim).map(|k| linalg::matrix_unit(dim, dim, k, k)).collect();
        Self { dim_in: dim, dim_out: dim, kraus }
    }

    /// The time-average map `ρ ↦ Σ_x R_x ρ R_x` as a channel.
    pub fn energy_dephasing(h: &HamiltonianSpec) -> Self {
        let d = h.dim();
        Self { dim_in: d, dim_out: d, kraus: h.projections().to_vec() }
    }
}

/// `G(ρ) = Σ A_j ρ A_j†`
pub fn apply_channel(g: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    g.apply(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::state::PureState;

    #[test]
    fn amplitude_damping_on_excited_state() {
        let g = KrausChannel::amplitude_damping(0.3).unwrap();
        let out = g.apply(&DensityMatrix::basis(2, 1)).unwrap();
        let expect = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), expect.matrix()) < 1e-15);
    }

    #[test]
    fn identity_and_dephasing() {
        let plus = PureState::plus().density();
        let id = KrausChannel::identity(2).apply(&plus).unwrap();
        assert_eq!(id.matrix(), plus.matrix());
        let deph = KrausChannel::full_dephasing(2).apply(&plus).unwrap();
        assert!(linalg::max_abs_diff(deph.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn incomplete_kraus_set_rejected() {
        let a0 = linalg::matrix_unit(2, 2, 0, 0);
        assert!(matches!(KrausChannel::new(vec![a0]), Err(Error::InvalidChannel(_))));
    }

    #[test]
    fn thermal_damping_fixes_target() {
        let g = KrausChannel::thermal_amplitude_damping(0.4, 0.7).unwrap();
        let fixed = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let out = g.apply(&fixed).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), fixed.matrix()) < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let g = KrausChannel::identity(2);
        assert!(g.apply(&DensityMatrix::maximally_mixed(3)).is_err());
    }
}
