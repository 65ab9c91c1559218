//! Time-covariant channels.
//!
//! A channel `G` is covariant when `G(α_t(ρ)) = α_t(G(ρ))` for all `t`.
//! Equivalently its Kraus operators can be chosen as energy shifts,
//! `[H, A_j] = σ_j A_j`, which is what [`shift_decompose`] produces and what
//! the energy-conserving dilation in [`extension`] is built from.

pub mod capacity;
pub mod extension;

use rand::Rng;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::qcore::hamiltonian::EIGENVALUE_MERGE_TOL;
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::random::random_channel_with;
use crate::qcore::{HamiltonianSpec, KrausChannel};

pub use capacity::{
    cloner_orbit_information, ilc_bound, info_loss_capacity_bound, phase_covariant_clone, private_info, PrivateInfoReport,
};
pub use extension::{build_extension, build_extension_for_depth, ExtensionExport, UnitaryExtension, MAX_EXTENSION_DIM};

/// Deviation below which a channel counts as covariant.
pub const COVARIANCE_TOL: f64 = 1e-8;
/// Time points per period used by [`check_covariance`].
pub const DEFAULT_TIME_GRID: usize = 16;
/// Tolerance on `[H, A] = σA` and on map equality after decomposition.
pub const SHIFT_TOL: f64 = 1e-9;
/// Shift components with Frobenius norm below this are dropped.
const DROP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CovarianceReport {
    pub covariant: bool,
    pub max_deviation: f64,
    /// Largest `|G(α_t(E)) − α_t(G(E))|` over matrix units `E` and the time grid.
    pub grid_deviation: f64,
    /// Distance between `G` and the channel built from its shift components.
    pub algebraic_deviation: f64,
}

/// Check covariance on a time grid of `samples` points over `[0, 2π)` and
/// algebraically through the shift decomposition.
pub fn check_covariance(g: &KrausChannel, h: &HamiltonianSpec, samples: usize) -> Result<CovarianceReport> {
    if !g.is_square() {
        return Err(Error::InvalidChannel("covariance needs a square channel".into()));
    }
    check_dim(h.dim(), g.dim_in())?;
    let d = h.dim();
    let mut grid_deviation: f64 = 0.0;
    let units: Vec<(CMatrix, CMatrix)> = (0..d)
        .flat_map(|i| (0..d).map(move |j| linalg::matrix_unit(d, d, i, j)))
        .map(|e| {
            let ge = g.apply_matrix(&e);
            (e, ge)
        })
        .collect();
    for k in 0..samples.max(1) {
        let t = 2.0 * std::f64::consts::PI * k as f64 / samples.max(1) as f64;
        let u = h.propagator(t);
        let ud = u.adjoint();
        for (e, ge) in &units {
            let lhs = g.apply_matrix(&(&u * e * &ud));
            let rhs = &u * ge * &ud;
            grid_deviation = grid_deviation.max(linalg::max_abs_diff(&lhs, &rhs));
        }
    }
    let components: Vec<CMatrix> = shift_components(g, h).into_iter().map(|(_, a)| a).collect();
    let algebraic_deviation = map_deviation(g, &components);
    let max_deviation = grid_deviation.max(algebraic_deviation);
    Ok(CovarianceReport { covariant: max_deviation < COVARIANCE_TOL, max_deviation, grid_deviation, algebraic_deviation })
}

/// Distinct energy differences `x − y`, merged within the eigenvalue tolerance.
pub fn shift_values(h: &HamiltonianSpec) -> Vec<f64> {
    let e = h.eigenvalues();
    let mut diffs: Vec<f64> = e.iter().flat_map(|x| e.iter().map(move |y| x - y)).collect();
    diffs.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for s in diffs {
        match out.last() {
            Some(&last) if s - last <= EIGENVALUE_MERGE_TOL => {}
            _ => out.push(s),
        }
    }
    out
}

/// `A^(σ) = Σ_{x−y=σ} R_x A R_y`
pub fn shift_component(a: &CMatrix, h: &HamiltonianSpec, sigma: f64) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows(), a.ncols());
    for (x, rx) in h.levels() {
        for (y, ry) in h.levels() {
            if ((x - y) - sigma).abs() <= EIGENVALUE_MERGE_TOL {
                out += rx * a * ry;
            }
        }
    }
    out
}

/// All nonzero shift components of all Kraus operators, in Kraus order and
/// ascending shift within each operator.
fn shift_components(g: &KrausChannel, h: &HamiltonianSpec) -> Vec<(f64, CMatrix)> {
    let shifts = shift_values(h);
    g.kraus()
        .iter()
        .flat_map(|a| shifts.iter().map(move |&s| (s, shift_component(a, h, s))))
        .filter(|(_, m)| linalg::frobenius_norm(m) >= DROP_TOL)
        .collect()
}

fn map_deviation(g: &KrausChannel, kraus: &[CMatrix]) -> f64 {
    let d = g.dim_in();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let e = linalg::matrix_unit(d, d, i, j);
            let mut out = CMatrix::zeros(g.dim_out(), g.dim_out());
            for a in kraus {
                out += a * &e * a.adjoint();
            }
            worst = worst.max(linalg::max_abs_diff(&out, &g.apply_matrix(&e)));
        }
    }
    worst
}

/// A covariant channel whose Kraus operators are pure energy shifts,
/// `[H, A_j] = σ_j A_j`.
#[derive(Clone, Debug)]
pub struct ShiftKraus {
    channel: KrausChannel,
    shifts: Vec<f64>,
    hamiltonian: HamiltonianSpec,
}

impl ShiftKraus {
    pub fn new(kraus: Vec<CMatrix>, shifts: Vec<f64>, h: HamiltonianSpec) -> Result<Self> {
        if kraus.len() != shifts.len() {
            return Err(Error::InvalidArgument(format!("{} Kraus operators but {} shifts", kraus.len(), shifts.len())));
        }
        let channel = KrausChannel::with_tolerance(kraus, SHIFT_TOL)?;
        if !channel.is_square() {
            return Err(Error::InvalidChannel("shift decomposition needs a square channel".into()));
        }
        check_dim(h.dim(), channel.dim_in())?;
        let sk = Self { channel, shifts, hamiltonian: h };
        let residual = sk.commutator_residual();
        if residual > SHIFT_TOL {
            return Err(Error::CovarianceViolation(residual));
        }
        Ok(sk)
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }

    pub fn kraus(&self) -> &[CMatrix] {
        self.channel.kraus()
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec {
        &self.hamiltonian
    }

    pub fn dim(&self) -> usize {
        self.channel.dim_in()
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    /// `max_j |[H, A_j] − σ_j A_j|`
    pub fn commutator_residual(&self) -> f64 {
        let h = self.hamiltonian.matrix();
        self.kraus()
            .iter()
            .zip(&self.shifts)
            .map(|(a, &s)| linalg::max_abs(&(&h * a - a * &h - a * linalg::c(s, 0.0))))
            .fold(0.0, f64::max)
    }
}

/// Replace each same-shift group by a linearly independent Kraus family
/// spanning the same map. Groups that are already independent are kept
/// verbatim.
fn reduce_groups(components: Vec<(f64, CMatrix)>) -> (Vec<CMatrix>, Vec<f64>) {
    let mut order: Vec<f64> = Vec::new();
    for (s, _) in &components {
        if !order.iter().any(|o| (o - s).abs() <= EIGENVALUE_MERGE_TOL) {
            order.push(*s);
        }
    }
    let mut kraus = Vec::new();
    let mut shifts = Vec::new();
    for s in order {
        let group: Vec<&CMatrix> = components
            .iter()
            .filter(|(t, _)| (t - s).abs() <= EIGENVALUE_MERGE_TOL)
            .map(|(_, m)| m)
            .collect();
        let m = group.len();
        let gram = CMatrix::from_fn(m, m, |a, b| group[a].iter().zip(group[b].iter()).map(|(x, y)| x.conj() * y).sum());
        let (vals, vecs) = linalg::eigh(&gram);
        let top = vals.last().copied().unwrap_or(0.0);
        let floor = (DROP_TOL * DROP_TOL).max(1e-12 * top);
        if vals.iter().all(|&v| v >= floor) {
            kraus.extend(group.into_iter().cloned());
            shifts.extend(std::iter::repeat_n(s, m));
            continue;
        }
        // B_k = Σ_a A_a V[a, k] over the nonnegligible eigenvalues
        for (k, &v) in vals.iter().enumerate().rev() {
            if v < floor {
                continue;
            }
            let mut b = CMatrix::zeros(group[0].nrows(), group[0].ncols());
            for (a, op) in group.iter().enumerate() {
                b += *op * vecs[(a, k)];
            }
            kraus.push(b);
            shifts.push(s);
        }
    }
    (kraus, shifts)
}

/// Rewrite a covariant channel with pure energy-shift Kraus operators.
pub fn shift_decompose(g: &KrausChannel, h: &HamiltonianSpec) -> Result<ShiftKraus> {
    if !g.is_square() {
        return Err(Error::InvalidChannel("shift decomposition needs a square channel".into()));
    }
    check_dim(h.dim(), g.dim_in())?;
    let components = shift_components(g, h);
    let ops: Vec<CMatrix> = components.iter().map(|(_, m)| m.clone()).collect();
    let deviation = map_deviation(g, &ops);
    if deviation > SHIFT_TOL {
        return Err(Error::CovarianceViolation(deviation));
    }
    let (kraus, shifts) = reduce_groups(components);
    let sk = ShiftKraus::new(kraus, shifts, h.clone()).map_err(|e| match e {
        Error::InvalidChannel(_) => Error::CovarianceViolation(deviation),
        other => other,
    })?;
    let after = sk.channel.max_deviation(g)?;
    if after > SHIFT_TOL {
        return Err(Error::CovarianceViolation(after));
    }
    Ok(sk)
}

/// Random covariant channel: all shift components of a random channel.
/// The result is the time-twirl of that channel.
pub fn random_covariant_channel_with<R: Rng + ?Sized>(rng: &mut R, h: &HamiltonianSpec) -> Result<ShiftKraus> {
    let g = random_channel_with(rng, h.dim());
    let (kraus, shifts) = reduce_groups(shift_components(&g, h));
    ShiftKraus::new(kraus, shifts, h.clone())
}
