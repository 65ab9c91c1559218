//! Lower bounds on the information deficit `Δ = I − (I_A + I_B)/2` of a
//! bipartite state, each computable from classical energy statistics.
//!
//! The chain for pure states is
//!
//! ```text
//! Δ ≥ ½ (I(X:X+Y) + I(Y:X+Y))                 mutual_info_deficit_bound
//!   ≥ ½ (K(P_X‖P_{−Y}*P_Z) + K(P_Y‖P_{−X}*P_Z)) convolution_kl_bound
//!   ≥ (ΔE)⁸ / (64 (⟨E_A⁴⟩+⟨E_B⁴⟩) ⟨E⁴⟩)         fourth_moment_bound (separately)
//! ```
//!
//! with `Z = X + Y`. The KL chain carries the factor ½ inherited from the
//! mutual-information step; the sum without it is reported separately as
//! `printed_kl_sum` and is not a valid bound in general.

pub mod harness;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::energydist::{self, JointEnergyDistribution};
use crate::error::{Error, Result};
use crate::infomeasures::{
    self, relative_entropy, timing_information, von_neumann_entropy, DiscreteDistribution, InfoValue,
};
use crate::qcore::linalg::CMatrix;
use crate::qcore::{dephase, partial_trace, DensityMatrix, HamiltonianSpec, Keep};

/// Slack allowed when asserting a bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// Purity above `1 − PURE_TOL` counts as a pure state.
const PURE_TOL: f64 = 1e-10;

/// Timing informations of a bipartite state and its reductions, the
/// deficit, and any lower bounds evaluated on it. All values in nats.
#[derive(Clone, Debug, Serialize)]
pub struct DeficitReport {
    pub joint_info: InfoValue,
    pub info_a: InfoValue,
    pub info_b: InfoValue,
    pub deficit: InfoValue,
    pub bounds: BTreeMap<String, InfoValue>,
}

impl DeficitReport {
    /// Names of recorded bounds that exceed the deficit by more than the slack.
    pub fn violations(&self) -> Vec<String> {
        self.bounds
            .iter()
            .filter(|(_, b)| b.nats() > self.deficit.nats() + BOUND_SLACK)
            .map(|(k, _)| k.clone())
            .collect()
    }
}

fn check_bipartite(rho: &DensityMatrix, ha: &HamiltonianSpec, hb: &HamiltonianSpec) -> Result<()> {
    if ha.dim() * hb.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: ha.dim() * hb.dim() });
    }
    Ok(())
}

pub fn is_pure(rho: &DensityMatrix) -> bool {
    rho.purity() > 1.0 - PURE_TOL
}

/// Information deficit of a bipartite state with local Hamiltonians `ha`, `hb`.
///
/// For pure states the joint timing information is cross-checked against
/// the Shannon entropy of the total energy.
pub fn deficit(rho: &DensityMatrix, ha: &HamiltonianSpec, hb: &HamiltonianSpec) -> Result<DeficitReport> {
    check_bipartite(rho, ha, hb)?;
    let joint_h = ha.tensor(hb);
    let joint_info = timing_information(rho, &joint_h)?;
    let dims = (ha.dim(), hb.dim());
    let info_a = timing_information(&partial_trace(rho, dims, Keep::A)?, ha)?;
    let info_b = timing_information(&partial_trace(rho, dims, Keep::B)?, hb)?;
    if is_pure(rho) {
        let sz = energydist::sum_distribution(&energydist::joint_energy(rho, ha, hb)?).entropy();
        let gap = (sz.nats() - joint_info.nats()).abs();
        if gap > BOUND_SLACK {
            return Err(Error::InvariantViolation(format!("I = {joint_info} but S(X+Y) = {sz} (gap {gap:.3e})")));
        }
    }
    Ok(DeficitReport {
        joint_info,
        info_a,
        info_b,
        deficit: joint_info - (info_a + info_b) * 0.5,
        bounds: BTreeMap::new(),
    })
}

/// Deficit plus every pure-state bound, keyed by name.
pub fn deficit_with_bounds(rho: &DensityMatrix, ha: &HamiltonianSpec, hb: &HamiltonianSpec) -> Result<DeficitReport> {
    let mut report = deficit(rho, ha, hb)?;
    let j = energydist::joint_energy(rho, ha, hb)?;
    let kl = convolution_kl_bound(&j);
    report.bounds.insert("mutual_info".into(), mutual_info_deficit_bound(&j));
    report.bounds.insert("kl_pair".into(), (kl.kl_x + kl.kl_y) * 0.5);
    report.bounds.insert("kl_symmetrized".into(), kl.kl_symmetrized * 0.5);
    report.bounds.insert("fourth_moment".into(), fourth_moment_bound(&j));
    Ok(report)
}

/// Both sides of `S(Σ R_j σ R_j) ≤ S(σ) + S(p)`, `p_j = tr(R_j σ)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PostMeasurementBound {
    pub lhs: InfoValue,
    pub rhs: InfoValue,
}

pub fn post_measurement_entropy_bound(sigma: &DensityMatrix, projections: &[CMatrix]) -> Result<PostMeasurementBound> {
    // a projection family is complete and orthogonal iff it is the spectral
    // resolution of some Hamiltonian; reuse that validation
    let levels: Vec<f64> = (0..projections.len()).map(|k| k as f64).collect();
    let family = HamiltonianSpec::new(levels, projections.to_vec())
        .map_err(|e| Error::InvalidArgument(format!("projection family: {e}")))?;
    if family.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: sigma.dim(), got: family.dim() });
    }
    let outcome = energydist::energy_distribution(sigma, &family)?;
    let lhs = von_neumann_entropy(&dephase(sigma, &family)?);
    let rhs = von_neumann_entropy(sigma) + outcome.entropy();
    Ok(PostMeasurementBound { lhs, rhs })
}

/// Subsystem timing informations next to the conditional energy entropies
/// that bound them: `I_A ≤ S(X|Y)`, `I_B ≤ S(Y|X)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConditionalEntropyBound {
    pub info_a: InfoValue,
    pub s_x_given_y: InfoValue,
    pub info_b: InfoValue,
    pub s_y_given_x: InfoValue,
}

impl ConditionalEntropyBound {
    pub fn holds(&self, slack: f64) -> bool {
        self.info_a.nats() <= self.s_x_given_y.nats() + slack && self.info_b.nats() <= self.s_y_given_x.nats() + slack
    }
}

pub fn conditional_entropy_bound(
    rho: &DensityMatrix,
    ha: &HamiltonianSpec,
    hb: &HamiltonianSpec,
) -> Result<ConditionalEntropyBound> {
    check_bipartite(rho, ha, hb)?;
    let dims = (ha.dim(), hb.dim());
    let j = energydist::joint_energy(rho, ha, hb)?;
    Ok(ConditionalEntropyBound {
        info_a: timing_information(&partial_trace(rho, dims, Keep::A)?, ha)?,
        s_x_given_y: infomeasures::conditional_entropy_x_given_y(&j),
        info_b: timing_information(&partial_trace(rho, dims, Keep::B)?, hb)?,
        s_y_given_x: infomeasures::conditional_entropy_y_given_x(&j),
    })
}

/// `½ (I(X:X+Y) + I(Y:X+Y))`
pub fn mutual_info_deficit_bound(j: &JointEnergyDistribution) -> InfoValue {
    (energydist::mutual_info_x_sum(j) + energydist::mutual_info_y_sum(j)) * 0.5
}

/// Relative entropies of each marginal against its "noisy" reconstruction.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvolutionKl {
    /// `K(P_X ‖ P_{−Y} * P_{X+Y})`, bounded by `I(Y:X+Y)`.
    pub kl_x: InfoValue,
    /// `K(P_Y ‖ P_{−X} * P_{X+Y})`, bounded by `I(X:X+Y)`.
    pub kl_y: InfoValue,
    /// `K(½(P_X+P_Y) ‖ ½(P_{−X}+P_{−Y}) * P_{X+Y})`, bounded by the sum of both.
    pub kl_symmetrized: InfoValue,
}

pub fn convolution_kl_bound(j: &JointEnergyDistribution) -> ConvolutionKl {
    let px = j.marginal_x();
    let py = j.marginal_y();
    let pz = energydist::sum_distribution(j);
    let neg_x = energydist::negate(&px);
    let neg_y = energydist::negate(&py);
    let kl_x = relative_entropy(&px, &energydist::convolve(&neg_y, &pz));
    let kl_y = relative_entropy(&py, &energydist::convolve(&neg_x, &pz));
    let avg = energydist::mixture(&px, &py, 0.5);
    let neg_avg = energydist::mixture(&neg_x, &neg_y, 0.5);
    let kl_symmetrized = relative_entropy(&avg, &energydist::convolve(&neg_avg, &pz));
    ConvolutionKl { kl_x, kl_y, kl_symmetrized }
}

/// `V(X+Y)⁴ / (64 (⟨X⁴⟩ + ⟨Y⁴⟩) ⟨(X+Y)⁴⟩)` in nats; zero when the total
/// energy is sharp.
pub fn fourth_moment_bound(j: &JointEnergyDistribution) -> InfoValue {
    let m = energydist::joint_moments(j);
    let v = m.sum.variance;
    if v <= 0.0 {
        return InfoValue::ZERO;
    }
    InfoValue::from_nats(v.powi(4) / (64.0 * (m.x.fourth_moment + m.y.fourth_moment) * m.sum.fourth_moment))
}

/// Entropy power inequality for grid discretizations of continuous densities.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EpiCheck {
    /// `e^{2 S(X+Y)}`
    pub lhs: f64,
    /// `e^{2 S(X)} + e^{2 S(Y)}`
    pub rhs: f64,
    /// `S(X+Y) − (S(X) + S(Y))/2 − (ln 2)/2`
    pub half_bit_gap: f64,
}

impl EpiCheck {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

fn grid_step(p: &DiscreteDistribution) -> Result<f64> {
    let s = p.support();
    if s.len() < 2 {
        return Err(Error::NonUniformGrid("need at least two grid points".into()));
    }
    let step = (s[s.len() - 1] - s[0]) / (s.len() - 1) as f64;
    for w in s.windows(2) {
        if ((w[1] - w[0]) - step).abs() > 1e-9 * step.max(1.0) {
            return Err(Error::NonUniformGrid(format!("spacing {} differs from {step}", w[1] - w[0])));
        }
    }
    Ok(step)
}

/// Discrete entropy plus `ln(step)`, a surrogate for the differential entropy.
pub fn differential_entropy_surrogate(p: &DiscreteDistribution) -> Result<f64> {
    Ok(p.entropy().nats() + grid_step(p)?.ln())
}

/// Evaluate the entropy power inequality for independent `X ~ p`, `Y ~ q`
/// given on uniform grids of the same step.
pub fn epi_check(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<EpiCheck> {
    let (sp, sq) = (grid_step(p)?, grid_step(q)?);
    if (sp - sq).abs() > 1e-9 * sp {
        return Err(Error::NonUniformGrid(format!("grid steps {sp} and {sq} differ")));
    }
    let sum = energydist::convolve(p, q);
    let (hx, hy) = (p.entropy().nats() + sp.ln(), q.entropy().nats() + sq.ln());
    let hz = sum.entropy().nats() + sp.ln();
    Ok(EpiCheck {
        lhs: (2.0 * hz).exp(),
        rhs: (2.0 * hx).exp() + (2.0 * hy).exp(),
        half_bit_gap: hz - 0.5 * (hx + hy) - 0.5 * std::f64::consts::LN_2,
    })
}

/// Gaussian density with standard deviation `sigma` sampled on the grid
/// `k·step`, `|k·step| ≤ half_width`, renormalized.
pub fn discretized_gaussian(sigma: f64, half_width: f64, step: f64) -> Result<DiscreteDistribution> {
    if !(sigma > 0.0 && step > 0.0 && half_width >= step) {
        return Err(Error::InvalidArgument("gaussian grid needs sigma, step > 0 and half_width ≥ step".into()));
    }
    let n = (half_width / step).floor() as i64;
    let weights: Vec<(f64, f64)> = (-n..=n)
        .map(|k| {
            let x = k as f64 * step;
            (x, (-0.5 * (x / sigma).powi(2)).exp())
        })
        .collect();
    let total: f64 = weights.iter().map(|w| w.1).sum();
    DiscreteDistribution::from_pairs(weights.into_iter().map(|(x, w)| (x, w / total)))
}

/// Uniform density on `[0, n·step)` sampled at `n` grid points.
pub fn discretized_uniform(n: usize, step: f64) -> Result<DiscreteDistribution> {
    let points: Vec<f64> = (0..n).map(|k| k as f64 * step).collect();
    DiscreteDistribution::uniform(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{c, matrix_unit, ZERO};
    use crate::qcore::PureState;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn qubit() -> HamiltonianSpec {
        HamiltonianSpec::from_diagonal(&[0.0, 1.0]).unwrap()
    }

    fn plus_plus() -> DensityMatrix {
        PureState::plus().tensor(&PureState::plus()).density()
    }

    fn bell01() -> DensityMatrix {
        let s = FRAC_1_SQRT_2;
        PureState::from_amplitudes(&[ZERO, c(s, 0.0), c(s, 0.0), ZERO]).unwrap().density()
    }

    #[test]
    fn deficit_examples() {
        let r = deficit(&plus_plus(), &qubit(), &qubit()).unwrap();
        assert!((r.joint_info.bits() - 1.5).abs() < 1e-12);
        assert!((r.info_a.bits() - 1.0).abs() < 1e-12 && (r.info_b.bits() - 1.0).abs() < 1e-12);
        assert!((r.deficit.bits() - 0.5).abs() < 1e-12);

        let e = PureState::basis(4, 2).density();
        assert!(deficit(&e, &qubit(), &qubit()).unwrap().deficit.nats().abs() < 1e-12);

        let b = deficit(&bell01(), &qubit(), &qubit()).unwrap();
        assert!(b.joint_info.nats().abs() < 1e-12);
        assert!(b.info_a.nats().abs() < 1e-12 && b.info_b.nats().abs() < 1e-12);
    }

    #[test]
    fn deficit_dimension_mismatch() {
        let h3 = HamiltonianSpec::from_diagonal(&[0.0, 1.0, 2.0]).unwrap();
        assert!(deficit(&plus_plus(), &qubit(), &h3).is_err());
    }

    #[test]
    fn post_measurement_examples() {
        let proj = vec![matrix_unit(2, 2, 0, 0), matrix_unit(2, 2, 1, 1)];
        let b = post_measurement_entropy_bound(&PureState::plus().density(), &proj).unwrap();
        assert!((b.lhs.bits() - 1.0).abs() < 1e-12 && (b.rhs.bits() - 1.0).abs() < 1e-12);
        let diag = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let b = post_measurement_entropy_bound(&diag, &proj).unwrap();
        assert!((b.lhs.nats() - von_neumann_entropy(&diag).nats()).abs() < 1e-12);
        assert!(b.lhs.nats() <= b.rhs.nats());
        assert!(post_measurement_entropy_bound(&diag, &proj[..1]).is_err());
    }

    #[test]
    fn conditional_entropy_examples() {
        let b = conditional_entropy_bound(&bell01(), &qubit(), &qubit()).unwrap();
        assert!(b.info_a.nats().abs() < 1e-12 && b.s_x_given_y.nats().abs() < 1e-12);
        let p = conditional_entropy_bound(&plus_plus(), &qubit(), &qubit()).unwrap();
        assert!((p.info_a.bits() - 1.0).abs() < 1e-12 && (p.s_x_given_y.bits() - 1.0).abs() < 1e-12);
        assert!(p.holds(BOUND_SLACK));
    }

    #[test]
    fn classical_bounds_on_iid_uniform() {
        let j = energydist::joint_energy(&plus_plus(), &qubit(), &qubit()).unwrap();
        assert!((mutual_info_deficit_bound(&j).bits() - 0.5).abs() < 1e-12);
        let kl = convolution_kl_bound(&j);
        let ln43 = (4.0f64 / 3.0).ln();
        assert!((kl.kl_x.nats() - ln43).abs() < 1e-12 && (kl.kl_y.nats() - ln43).abs() < 1e-12);
        assert!(kl.kl_y.nats() <= 0.5 * LN_2);
        assert!((fourth_moment_bound(&j).nats() - 1.0 / 4608.0).abs() < 1e-15);
    }

    #[test]
    fn point_mass_bounds_vanish() {
        let j = JointEnergyDistribution::new(vec![1.0], vec![2.0], vec![vec![1.0]]).unwrap();
        assert_eq!(mutual_info_deficit_bound(&j).nats(), 0.0);
        let kl = convolution_kl_bound(&j);
        assert_eq!([kl.kl_x.nats(), kl.kl_y.nats(), kl.kl_symmetrized.nats()], [0.0; 3]);
        assert_eq!(fourth_moment_bound(&j).nats(), 0.0);
    }

    #[test]
    fn bell_bounds_vanish() {
        let j = energydist::joint_energy(&bell01(), &qubit(), &qubit()).unwrap();
        assert!(mutual_info_deficit_bound(&j).nats().abs() < 1e-12);
        assert_eq!(fourth_moment_bound(&j).nats(), 0.0);
    }

    #[test]
    fn printed_kl_sum_exceeds_deficit_on_iid_uniform() {
        // without the factor ½ the KL sum would be 2 ln(4/3) ≈ 0.575 > Δ = ln2/2
        let j = energydist::joint_energy(&plus_plus(), &qubit(), &qubit()).unwrap();
        let kl = convolution_kl_bound(&j);
        assert!((kl.kl_x + kl.kl_y).nats() > 0.5 * LN_2);
        let r = deficit_with_bounds(&plus_plus(), &qubit(), &qubit()).unwrap();
        assert!(r.violations().is_empty());
    }

    #[test]
    fn epi_rejects_bad_grids() {
        let p = DiscreteDistribution::new(vec![0.0, 1.0, 3.0], vec![0.2, 0.3, 0.5]).unwrap();
        assert!(matches!(epi_check(&p, &p), Err(Error::NonUniformGrid(_))));
        let a = discretized_uniform(4, 1.0).unwrap();
        let b = discretized_uniform(4, 2.0).unwrap();
        assert!(epi_check(&a, &b).is_err());
    }

    #[test]
    fn epi_uniform_densities() {
        let u = discretized_uniform(200, 1.0).unwrap();
        let e = epi_check(&u, &u).unwrap();
        assert!(e.lhs >= e.rhs);
    }

    #[test]
    fn discretized_gaussian_entropy_matches_analytic() {
        let sigma = 20.0;
        let g = discretized_gaussian(sigma, 8.0 * sigma, 1.0).unwrap();
        let analytic = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * sigma * sigma).ln();
        assert!((differential_entropy_surrogate(&g).unwrap() - analytic).abs() < 1e-6);
    }
}
