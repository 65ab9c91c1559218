//! Free-energy accounting for channels that respect the time evolution.
//!
//! With `F(ρ) = tr(ρH) − kT·S(ρ)` the free energy splits as
//! `F(ρ) = kT·I(ρ) + F(ρ̄)` because dephasing keeps `⟨H⟩`. For a covariant
//! channel `G` that never raises free energy (passive), this gives
//! `F(ρ) − F(G(ρ)) ≥ kT·(I(ρ) − I(G(ρ)))`: losing timing information costs
//! free energy.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::covariant::{check_covariance, ilc_bound, DEFAULT_TIME_GRID};
use crate::energydist::energy_distribution;
use crate::error::{check_dim, Error, Result};
use crate::infomeasures::{timing_information, von_neumann_entropy, InfoValue};
use crate::qcore::linalg;
use crate::qcore::random::{random_density_with, random_pure_with, rng_from_seed};
use crate::qcore::{dephase, evolve, DensityMatrix, HamiltonianSpec, KrausChannel, PureState};

/// Slack for free-energy inequalities.
pub const THERMO_TOL: f64 = 1e-9;
/// Random states tried by [`passivity_check`] when certifying a channel.
pub const DEFAULT_PASSIVITY_SAMPLES: usize = 200;

/// Temperature as a single energy scale `kT`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermoParams {
    kt: f64,
}

impl ThermoParams {
    pub fn new(kt: f64) -> Result<Self> {
        if kt.is_finite() && kt > 0.0 {
            Ok(Self { kt })
        } else {
            Err(Error::InvalidArgument(format!("kT must be positive and finite, got {kt}")))
        }
    }

    pub fn kt(&self) -> f64 {
        self.kt
    }
}

impl Default for ThermoParams {
    fn default() -> Self {
        Self { kt: 1.0 }
    }
}

/// `F(ρ) = tr(ρH) − kT·S(ρ)`, entropy in nats.
pub fn free_energy(rho: &DensityMatrix, h: &HamiltonianSpec, p: ThermoParams) -> Result<f64> {
    check_dim(h.dim(), rho.dim())?;
    Ok(rho.expectation(&h.matrix())? - p.kt * von_neumann_entropy(rho).nats())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FreeEnergyReport {
    pub f: f64,
    pub f_bar: f64,
    pub kt_times_info: f64,
    pub entropy: f64,
}

impl FreeEnergyReport {
    /// `|F − kT·I − F(ρ̄)|`
    pub fn residual(&self) -> f64 {
        (self.f - self.kt_times_info - self.f_bar).abs()
    }
}

pub fn decompose_free_energy(rho: &DensityMatrix, h: &HamiltonianSpec, p: ThermoParams) -> Result<FreeEnergyReport> {
    let bar = dephase(rho, h)?;
    let hm = h.matrix();
    let (e, e_bar) = (rho.expectation(&hm)?, bar.expectation(&hm)?);
    if (e - e_bar).abs() > 1e-10 {
        return Err(Error::InvariantViolation(format!("dephasing changed ⟨H⟩ by {:.3e}", e - e_bar)));
    }
    let entropy = von_neumann_entropy(rho).nats();
    Ok(FreeEnergyReport {
        f: e - p.kt * entropy,
        f_bar: e_bar - p.kt * von_neumann_entropy(&bar).nats(),
        kt_times_info: p.kt * timing_information(rho, h)?.nats(),
        entropy,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PassivityReport {
    pub passive: bool,
    /// Smallest `F(ρ) − F(G(ρ))` over the tested states.
    pub worst_margin: f64,
    pub states_tested: usize,
}

/// Empirical passivity check over `samples` random states (alternately
/// pure and mixed), every energy eigenstate and the Gibbs state.
pub fn passivity_check(
    g: &KrausChannel,
    h: &HamiltonianSpec,
    p: ThermoParams,
    samples: usize,
    seed: u64,
) -> Result<PassivityReport> {
    if !g.is_square() {
        return Err(Error::InvalidChannel("passivity needs a square channel".into()));
    }
    check_dim(h.dim(), g.dim_in())?;
    let d = h.dim();
    let mut rng = rng_from_seed(seed);
    let mut states: Vec<DensityMatrix> = (0..samples)
        .map(|k| if k % 2 == 0 { random_pure_with(&mut rng, d).density() } else { random_density_with(&mut rng, d) })
        .collect();
    for (_, r) in h.levels() {
        let (vals, vecs) = linalg::eigh(r);
        for (idx, _) in vals.iter().enumerate().filter(|(_, &v)| v > 0.5) {
            states.push(PureState::normalized(vecs.column(idx).into_owned())?.density());
        }
    }
    states.push(h.gibbs_state(p.kt));
    let margins = states
        .iter()
        .map(|rho| Ok(free_energy(rho, h, p)? - free_energy(&g.apply(rho)?, h, p)?))
        .collect::<Result<Vec<f64>>>()?;
    let worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PassivityReport { passive: worst_margin >= -THERMO_TOL, worst_margin, states_tested: states.len() })
}

/// A channel certified covariant and (empirically) passive for one `(H, kT)`.
#[derive(Clone, Debug)]
pub struct PassiveCovariantChannel {
    channel: KrausChannel,
    h: HamiltonianSpec,
    params: ThermoParams,
}

impl PassiveCovariantChannel {
    pub fn certify(g: &KrausChannel, h: &HamiltonianSpec, p: ThermoParams) -> Result<Self> {
        let cov = check_covariance(g, h, DEFAULT_TIME_GRID)?;
        if !cov.covariant {
            return Err(Error::CovarianceViolation(cov.max_deviation));
        }
        let pass = passivity_check(g, h, p, DEFAULT_PASSIVITY_SAMPLES, 0)?;
        if !pass.passive {
            return Err(Error::PassivityViolation(-pass.worst_margin));
        }
        Ok(Self { channel: g.clone(), h: h.clone(), params: p })
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }

    pub fn free_energy_loss_bound(&self, rho: &DensityMatrix) -> Result<LossBound> {
        let (h, p) = (&self.h, self.params);
        let out = self.channel.apply(rho)?;
        let lhs = free_energy(rho, h, p)? - free_energy(&out, h, p)?;
        let rhs = p.kt * (timing_information(rho, h)? - timing_information(&out, h)?).nats();
        Ok(LossBound { lhs, rhs })
    }

    pub fn end_to_end_bound(&self, rho: &DensityMatrix, cp: InfoValue) -> Result<LossBound> {
        if rho.purity() < 1.0 - 1e-10 {
            return Err(Error::InvalidState("the end-to-end bound needs a pure input".into()));
        }
        let (h, p) = (&self.h, self.params);
        let out = self.channel.apply(rho)?;
        let lhs = free_energy(rho, h, p)? - free_energy(&out, h, p)?;
        let bound = ilc_bound(&energy_distribution(rho, h)?, &energy_distribution(&out, h)?, cp);
        Ok(LossBound { lhs, rhs: p.kt * bound.nats() })
    }
}

/// Free-energy loss `lhs` against the bound `rhs`; holds when `lhs ≥ rhs − tol`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LossBound {
    pub lhs: f64,
    pub rhs: f64,
}

impl LossBound {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn holds(&self) -> bool {
        self.margin() >= -THERMO_TOL
    }
}

/// `F(ρ) − F(G(ρ))` against `kT·(I(ρ) − I(G(ρ)))`, after certifying `g`.
pub fn free_energy_loss_bound(
    rho: &DensityMatrix,
    g: &KrausChannel,
    h: &HamiltonianSpec,
    p: ThermoParams,
) -> Result<LossBound> {
    PassiveCovariantChannel::certify(g, h, p)?.free_energy_loss_bound(rho)
}

/// Free-energy loss against `kT·ilc_bound(...)` for a pure input.
pub fn end_to_end_bound(
    rho: &DensityMatrix,
    g: &KrausChannel,
    h: &HamiltonianSpec,
    p: ThermoParams,
    cp: InfoValue,
) -> Result<LossBound> {
    PassiveCovariantChannel::certify(g, h, p)?.end_to_end_bound(rho, cp)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClassicalFreeEnergyBound {
    /// `2 (Δ_min − f_loss / kT)`, a lower bound on the private capacity.
    pub capacity_bound: InfoValue,
    /// Smallest free-energy loss of a zero-capacity channel, `kT·Δ_min`.
    pub min_loss_zero_capacity: f64,
    /// The same corollary in the form `(2/kT)·Δ_min`; kept for comparison.
    pub min_loss_alternative: f64,
}

pub fn classical_free_energy_bound(delta_min_estimate: InfoValue, f_loss: f64, p: ThermoParams) -> ClassicalFreeEnergyBound {
    let delta = delta_min_estimate.nats();
    ClassicalFreeEnergyBound {
        capacity_bound: InfoValue::from_nats(2.0 * (delta - f_loss / p.kt)),
        min_loss_zero_capacity: p.kt * delta,
        min_loss_alternative: 2.0 * delta / p.kt,
    }
}

/// Largest entry of `G(ρ̄) − (1/N) Σ_k G(α_{2πk/N}(ρ))`.
pub fn orbit_average_commutation(g: &KrausChannel, h: &HamiltonianSpec, rho: &DensityMatrix, samples: usize) -> Result<f64> {
    if !h.has_integer_spectrum() {
        return Err(Error::NoPeriod);
    }
    let lhs = g.apply(&dephase(rho, h)?)?;
    let mut avg = linalg::CMatrix::zeros(g.dim_out(), g.dim_out());
    for k in 0..samples {
        let t = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
        avg += g.apply(&evolve(rho, h, t)?)?.matrix();
    }
    avg /= linalg::c(samples as f64, 0.0);
    Ok(linalg::max_abs_diff(lhs.matrix(), &avg))
}

/// The covariant, passive test channels for a Hamiltonian at temperature
/// `kT`: identity, energy dephasing and, for a qubit, amplitude damping
/// towards the Gibbs state.
pub fn passive_suite(h: &HamiltonianSpec, p: ThermoParams, gamma: f64) -> Result<Vec<(String, KrausChannel)>> {
    let mut suite = vec![
        ("identity".to_string(), KrausChannel::identity(h.dim())),
        ("dephasing".to_string(), KrausChannel::energy_dephasing(h)),
    ];
    if h.dim() == 2 && h.eigenvalues().len() == 2 {
        // Gibbs ground population; the damping is written in the energy basis
        let gibbs = h.gibbs_state(p.kt);
        let (vals, vecs) = linalg::eigh(&h.projections()[0]);
        let ground = vecs.column(if vals[1] > 0.5 { 1 } else { 0 }).into_owned();
        let p0 = ground.dotc(&(gibbs.matrix() * &ground)).re;
        let basis = linalg::columns_to_matrix(2, &[ground.clone(), excited_partner(&ground)]);
        let damp = KrausChannel::thermal_amplitude_damping(gamma, p0)?;
        let rotated = damp.kraus().iter().map(|a| &basis * a * basis.adjoint()).collect();
        suite.push(("amplitude_damping".to_string(), KrausChannel::new(rotated)?));
    }
    Ok(suite)
}

fn excited_partner(ground: &linalg::CVector) -> linalg::CVector {
    // the orthogonal complement of a unit vector in C²
    linalg::CVector::from_vec(vec![-ground[1].conj(), ground[0].conj()])
}

/// One (channel, input) evaluation of the free-energy bookkeeping.
#[derive(Clone, Debug, Serialize)]
pub struct ThermoRow {
    pub channel: String,
    pub seed: u64,
    pub kt: f64,
    pub f_in: f64,
    pub f_out: f64,
    pub kt_info_in: f64,
    pub kt_info_out: f64,
    pub decomposition_residual: f64,
    pub loss_margin: f64,
    /// Private-capacity upper bound fed to the end-to-end bound, in nats.
    pub cp_bound: f64,
    pub end_to_end_margin: f64,
}

/// An upper bound on the private capacity of a suite channel: zero for
/// energy dephasing (the environment keeps the energy record), `ln d` otherwise.
pub fn suite_capacity_bound(name: &str, dim: usize) -> InfoValue {
    if name == "dephasing" {
        InfoValue::ZERO
    } else {
        InfoValue::from_nats((dim as f64).ln())
    }
}

/// Evaluate every suite channel on `inputs` random pure states each.
/// Channels are certified first; a failed certification is an error.
pub fn run_suite(h: &HamiltonianSpec, p: ThermoParams, inputs: usize, seed: u64) -> Result<Vec<ThermoRow>> {
    let suite = passive_suite(h, p, 0.3)?;
    let certified = suite
        .iter()
        .map(|(name, g)| Ok((name.clone(), PassiveCovariantChannel::certify(g, h, p)?)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, u64)> =
        (0..certified.len()).flat_map(|c| (0..inputs as u64).map(move |i| (c, seed.wrapping_add(i)))).collect();
    jobs.into_par_iter()
        .map(|(c, s)| {
            let (name, ch) = &certified[c];
            let cp = suite_capacity_bound(name, h.dim());
            let mut rng = rng_from_seed(s);
            let rho = random_pure_with(&mut rng, h.dim()).density();
            let out = ch.channel().apply(&rho)?;
            let rin = decompose_free_energy(&rho, h, p)?;
            let rout = decompose_free_energy(&out, h, p)?;
            Ok(ThermoRow {
                channel: name.clone(),
                seed: s,
                kt: p.kt,
                f_in: rin.f,
                f_out: rout.f,
                kt_info_in: rin.kt_times_info,
                kt_info_out: rout.kt_times_info,
                decomposition_residual: rin.residual().max(rout.residual()),
                loss_margin: ch.free_energy_loss_bound(&rho)?.margin(),
                cp_bound: cp.nats(),
                end_to_end_margin: ch.end_to_end_bound(&rho, cp)?.margin(),
            })
        })
        .collect()
}

/// Random `(state, Hamiltonian)` pair for identity checks: dimension in
/// `2..=4`, integer spectrum in `[0, 3]`, mixed state.
pub fn random_thermo_instance<R: Rng + ?Sized>(rng: &mut R) -> (DensityMatrix, HamiltonianSpec) {
    let d = rng.random_range(2..=4);
    let h = crate::qcore::random::random_integer_hamiltonian(rng, d, 0, 3);
    (random_density_with(rng, d), h)
}
