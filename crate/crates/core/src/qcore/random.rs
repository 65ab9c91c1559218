//! Seeded random instances for the Monte-Carlo harnesses.
//!
//! Every generator takes an explicit RNG; the `*_seeded` wrappers build a
//! fresh `ChaCha8Rng` from a 64-bit seed so results are reproducible
//! bit-for-bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::channel::KrausChannel;
use super::hamiltonian::HamiltonianSpec;
use super::linalg::{self, c, CMatrix, CVector};
use super::state::{DensityMatrix, PureState};
use crate::error::{Error, Result};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("dimension {dim} < 2")));
    }
    Ok(())
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-random isometry `C^cols → C^rows` (QR of a Ginibre matrix with the
/// phases of `R`'s diagonal absorbed).
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(rows >= cols);
    let g = ginibre(rng, rows, cols);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut v = q;
    for k in 0..cols {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        let mut col = v.column_mut(k);
        col *= phase;
    }
    v
}

pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    haar_isometry(rng, dim, dim)
}

pub fn random_pure_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    let v: CVector = ginibre(rng, dim, 1).column(0).into_owned();
    PureState::normalized(v).expect("Gaussian vector is nonzero almost surely")
}

pub fn random_density_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, dim);
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    DensityMatrix::from_raw(m * c(1.0 / tr, 0.0))
}

/// Random channel from a Haar isometry into system ⊗ environment
/// (environment dimension = `dim`), environment traced out.
pub fn random_channel_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> KrausChannel {
    let env = dim;
    let v = haar_isometry(rng, dim * env, dim);
    // V = Σ_j A_j ⊗ |j⟩  ⇒  A_j[s, i] = V[s·env + j, i]
    let kraus = (0..env).map(|j| CMatrix::from_fn(dim, dim, |s, i| v[(s * env + j, i)])).collect();
    KrausChannel::with_tolerance(kraus, 1e-9).expect("isometry columns are orthonormal")
}

/// Diagonal Hamiltonian with integer energies drawn uniformly from `lo..=hi`.
pub fn random_integer_hamiltonian<R: Rng + ?Sized>(rng: &mut R, dim: usize, lo: i64, hi: i64) -> HamiltonianSpec {
    let energies: Vec<f64> = (0..dim).map(|_| rng.random_range(lo..=hi) as f64).collect();
    HamiltonianSpec::from_diagonal(&energies).expect("finite energies")
}

/// Haar-random pure state.
pub fn random_pure(dim: usize, seed: u64) -> Result<PureState> {
    check_dim(dim)?;
    Ok(random_pure_with(&mut rng_from_seed(seed), dim))
}

/// Random mixed state `G G† / tr(G G†)` with Ginibre `G`.
pub fn random_density(dim: usize, seed: u64) -> Result<DensityMatrix> {
    check_dim(dim)?;
    Ok(random_density_with(&mut rng_from_seed(seed), dim))
}

pub fn random_channel(dim: usize, seed: u64) -> Result<KrausChannel> {
    check_dim(dim)?;
    Ok(random_channel_with(&mut rng_from_seed(seed), dim))
}
