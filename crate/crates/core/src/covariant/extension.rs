//! Energy-conserving unitary dilation `U = Σ_j A_j ⊗ S_j` of a shift-Kraus
//! channel.
//!
//! The environment is `k` copies of a truncated integer lattice
//! `{−w, …, w}`, one per Kraus operator, with `H_E = Σ_j σ_j Z_j`. `S_j`
//! lowers coordinate `j` by one, so applying `A_j` (energy `+σ_j`) is paid
//! for by the environment (energy `−σ_j`) and `|0…0⟩` has energy zero.
//! On `system ⊗ |0…0⟩` this is an isometry `W`; the rest of the space is
//! completed inside each total-energy eigenspace, so the full `U` commutes
//! with the total Hamiltonian, not just its reachable part.

use serde::Serialize;

use super::ShiftKraus;
use crate::error::{check_dim, Error, Result};
use crate::infomeasures::DiscreteDistribution;
use crate::qcore::hamiltonian::EIGENVALUE_MERGE_TOL;
use crate::qcore::io::MatrixJson;
use crate::qcore::linalg::{self, CMatrix, CVector};
use crate::qcore::state::partial_trace_matrix;
use crate::qcore::{DensityMatrix, HamiltonianSpec, Keep, PureState};

/// Largest system ⊗ environment dimension [`build_extension`] will build.
pub const MAX_EXTENSION_DIM: usize = 1024;

/// Residual below which a candidate vector is considered dependent during
/// completion. Any value below `1/√n` works for an `n`-dimensional block.
const COMPLETION_TOL: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct UnitaryExtension {
    system_h: HamiltonianSpec,
    shifts: Vec<f64>,
    window: usize,
    env_energies: Vec<f64>,
    env_initial: usize,
    unitary: CMatrix,
    /// `U (1 ⊗ |φ⟩)`, the Stinespring isometry.
    isometry: CMatrix,
    /// Orthonormal bases of the total-energy eigenspaces.
    blocks: Vec<(f64, CMatrix)>,
}

/// Serializable snapshot of an extension.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionExport {
    pub system_dim: usize,
    pub env_dim: usize,
    pub window: usize,
    pub shifts: Vec<f64>,
    pub env_energies: Vec<f64>,
    pub env_initial_index: usize,
    pub unitary: MatrixJson,
    pub reachable_basis: MatrixJson,
}

/// Build the extension for a single channel application.
pub fn build_extension(sk: &ShiftKraus, window: usize) -> Result<UnitaryExtension> {
    build_extension_for_depth(sk, window, 1)
}

/// Build the extension, requiring the window to cover `depth` successive
/// applications (each moves a lattice coordinate by one).
pub fn build_extension_for_depth(sk: &ShiftKraus, window: usize, depth: usize) -> Result<UnitaryExtension> {
    if window < depth.max(1) {
        return Err(Error::WindowTooSmall {
            window,
            reason: format!("{} application(s) need a window of at least {}", depth, depth.max(1)),
        });
    }
    let d = sk.dim();
    let k = sk.len();
    let levels = 2 * window + 1;
    let env_dim = u32::try_from(k)
        .ok()
        .and_then(|k| levels.checked_pow(k))
        .filter(|&e| e.checked_mul(d).is_some_and(|t| t <= MAX_EXTENSION_DIM))
        .ok_or(Error::EnvironmentTooLarge(levels.saturating_pow(k.min(64) as u32).saturating_mul(d)))?;
    let total = d * env_dim;
    let stride = |j: usize| levels.pow((k - 1 - j) as u32);

    let env_energies: Vec<f64> = (0..env_dim)
        .map(|e| {
            (0..k)
                .map(|j| {
                    let z = ((e / stride(j)) % levels) as f64 - window as f64;
                    sk.shifts()[j] * z
                })
                .sum()
        })
        .collect();
    let env_initial: usize = (0..k).map(|j| window * stride(j)).sum();

    // W[(s, init − stride_j), i] = A_j[s, i]
    let mut isometry = CMatrix::zeros(total, d);
    for (j, a) in sk.kraus().iter().enumerate() {
        let e = env_initial - stride(j);
        for s in 0..d {
            for i in 0..d {
                isometry[(s * env_dim + e, i)] += a[(s, i)];
            }
        }
    }

    // total-energy eigenbasis: (system eigenvector) ⊗ (environment basis state)
    let mut labelled: Vec<(f64, CVector, bool)> = Vec::with_capacity(total);
    for (lambda, r) in sk.hamiltonian().levels() {
        let (vals, vecs) = linalg::eigh(r);
        for (idx, _) in vals.iter().enumerate().filter(|(_, &v)| v > 0.5) {
            let v = vecs.column(idx);
            for (e, &eps) in env_energies.iter().enumerate() {
                let mut col = CVector::zeros(total);
                for s in 0..d {
                    col[s * env_dim + e] = v[s];
                }
                labelled.push((lambda + eps, col, e == env_initial));
            }
        }
    }
    if labelled.len() != total {
        return Err(Error::InvariantViolation(format!("energy basis has {} of {total} vectors", labelled.len())));
    }
    labelled.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut unitary = CMatrix::zeros(total, total);
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < labelled.len() {
        let mut end = start + 1;
        while end < labelled.len() && labelled[end].0 - labelled[start].0 <= EIGENVALUE_MERGE_TOL {
            end += 1;
        }
        let block = &labelled[start..end];
        let energy = block.iter().map(|b| b.0).sum::<f64>() / block.len() as f64;
        let domain: Vec<&CVector> = block.iter().filter(|b| b.2).map(|b| &b.1).collect();
        let rest: Vec<CVector> = block.iter().filter(|b| !b.2).map(|b| b.1.clone()).collect();
        let images: Vec<CVector> =
            domain.iter().map(|u| &isometry * CVector::from_fn(d, |s, _| u[s * env_dim + env_initial])).collect();
        let candidates: Vec<CVector> = block.iter().map(|b| b.1.clone()).collect();
        let image_rest = linalg::complete_basis(&images, &candidates, COMPLETION_TOL);
        if image_rest.len() != rest.len() {
            return Err(Error::InvariantViolation(format!(
                "completion in energy block {energy}: {} vectors for a complement of {}",
                image_rest.len(),
                rest.len()
            )));
        }
        for (u, w) in domain.into_iter().zip(&images).chain(rest.iter().zip(&image_rest)) {
            unitary += w * u.adjoint();
        }
        blocks.push((energy, linalg::columns_to_matrix(total, &candidates)));
        start = end;
    }

    Ok(UnitaryExtension {
        system_h: sk.hamiltonian().clone(),
        shifts: sk.shifts().to_vec(),
        window,
        env_energies,
        env_initial,
        unitary,
        isometry,
        blocks,
    })
}

impl UnitaryExtension {
    pub fn system_dim(&self) -> usize {
        self.system_h.dim()
    }

    pub fn env_dim(&self) -> usize {
        self.env_energies.len()
    }

    pub fn total_dim(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn system_h(&self) -> &HamiltonianSpec {
        &self.system_h
    }

    pub fn env_energies(&self) -> &[f64] {
        &self.env_energies
    }

    pub fn env_h(&self) -> Result<HamiltonianSpec> {
        HamiltonianSpec::from_diagonal(&self.env_energies)
    }

    pub fn env_initial(&self) -> PureState {
        PureState::basis(self.env_dim(), self.env_initial)
    }

    pub fn env_initial_index(&self) -> usize {
        self.env_initial
    }

    /// `H_E` eigenvalue of the initial environment state (exactly zero).
    pub fn env_initial_energy(&self) -> f64 {
        self.env_energies[self.env_initial]
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    /// Orthonormal basis of the range of the isometry.
    pub fn reachable_basis(&self) -> CMatrix {
        let cols = linalg::orthonormal_columns(&self.isometry, 1e-8);
        linalg::columns_to_matrix(self.total_dim(), &cols)
    }

    /// `U (ρ ⊗ |φ⟩⟨φ|) U†`
    pub fn dilate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dim(self.system_dim(), rho.dim())?;
        Ok(DensityMatrix::from_raw(&self.isometry * rho.matrix() * self.isometry.adjoint()))
    }

    /// System output `tr_E U(ρ ⊗ |φ⟩⟨φ|)U†`.
    pub fn reconstruct(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.dilate(rho)?;
        Ok(DensityMatrix::from_raw(partial_trace_matrix(out.matrix(), self.system_dim(), self.env_dim(), Keep::A)?))
    }

    /// Environment output `tr_S U(ρ ⊗ |φ⟩⟨φ|)U†`.
    pub fn env_marginal(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.dilate(rho)?;
        Ok(DensityMatrix::from_raw(partial_trace_matrix(out.matrix(), self.system_dim(), self.env_dim(), Keep::B)?))
    }

    /// Apply `H ⊗ 1 + 1 ⊗ H_E` to the columns of `m`.
    fn apply_total_h(&self, m: &CMatrix) -> CMatrix {
        let d = self.system_dim();
        let env = self.env_dim();
        let h = self.system_h.matrix();
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for col in 0..m.ncols() {
            for s in 0..d {
                for e in 0..env {
                    let mut acc = m[(s * env + e, col)] * self.env_energies[e];
                    for t in 0..d {
                        acc += h[(s, t)] * m[(t * env + e, col)];
                    }
                    out[(s * env + e, col)] = acc;
                }
            }
        }
        out
    }

    /// Largest entry of `[U, H_T]` over the full truncated space.
    pub fn commutator_norm(&self) -> f64 {
        let hu = self.apply_total_h(&self.unitary);
        let uh = self.apply_total_h(&self.unitary.adjoint()).adjoint();
        linalg::max_abs_diff(&uh, &hu)
    }

    /// Operator norm of `[U, H_T]` restricted to `system ⊗ |φ⟩`.
    pub fn reachable_commutator_norm(&self) -> f64 {
        // U H_T (1⊗|φ⟩) = W H  since H_E|φ⟩ = 0
        let wh = &self.isometry * self.system_h.matrix();
        let hw = self.apply_total_h(&self.isometry);
        linalg::spectral_norm(&(wh - hw))
    }

    /// `max |U†U − 1|`
    pub fn unitarity_error(&self) -> f64 {
        linalg::max_abs_diff(&(self.unitary.adjoint() * &self.unitary), &linalg::identity(self.total_dim()))
    }

    /// `max |W†W − 1|`
    pub fn isometry_error(&self) -> f64 {
        linalg::max_abs_diff(&(self.isometry.adjoint() * &self.isometry), &linalg::identity(self.system_dim()))
    }

    /// Distribution of the total energy of a state on system ⊗ environment.
    pub fn total_energy_distribution(&self, state: &DensityMatrix) -> Result<DiscreteDistribution> {
        check_dim(self.total_dim(), state.dim())?;
        let pairs = self.blocks.iter().map(|(e, b)| {
            let p: f64 = (0..b.ncols()).map(|k| b.column(k).dotc(&(state.matrix() * b.column(k))).re).sum();
            (*e, p.max(0.0))
        });
        DiscreteDistribution::from_pairs(pairs.filter(|&(_, p)| p > 0.0).collect::<Vec<_>>())
    }

    pub fn export(&self) -> ExtensionExport {
        ExtensionExport {
            system_dim: self.system_dim(),
            env_dim: self.env_dim(),
            window: self.window,
            shifts: self.shifts.clone(),
            env_energies: self.env_energies.clone(),
            env_initial_index: self.env_initial,
            unitary: MatrixJson::from_matrix(&self.unitary),
            reachable_basis: MatrixJson::from_matrix(&self.reachable_basis()),
        }
    }
}

/// `ρ ↦ ρ ⊗ |φ⟩⟨φ|` as a total-space state.
pub fn with_environment(ext: &UnitaryExtension, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_dim(ext.system_dim(), rho.dim())?;
    Ok(rho.tensor(&ext.env_initial().density()))
}
