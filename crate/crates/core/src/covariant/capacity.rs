//! Private information of a dilated covariant channel, the two information
//! loss bounds, and the phase-covariant cloner.

use serde::Serialize;

use super::extension::build_extension;
use super::ShiftKraus;
use crate::energydist::moments;
use crate::error::{check_dim, Error, Result};
use crate::infomeasures::{holevo_information, orbit_ensemble, timing_information, DiscreteDistribution, InfoValue};
use crate::qcore::state::partial_trace_matrix;
use crate::qcore::{DensityMatrix, HamiltonianSpec, Keep, PureState, StateEnsemble};

/// `I(X:B)`, `I(X:E)` and `c1 = I(X:B) − I(X:E)` for one ensemble.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrivateInfoReport {
    pub info_b: InfoValue,
    pub info_e: InfoValue,
    pub c1: InfoValue,
}

/// Push every ensemble member through the energy-conserving dilation and
/// compare what the output and the environment learn about the label.
pub fn private_info(sk: &ShiftKraus, e: &StateEnsemble, window: usize) -> Result<PrivateInfoReport> {
    check_dim(sk.dim(), e.dim())?;
    let ext = build_extension(sk, window)?;
    let (d, env) = (ext.system_dim(), ext.env_dim());
    // the environment only ever occupies the k lattice sites one step from
    // the origin; restrict to them before taking entropies
    let support: Vec<usize> = {
        let mut s: Vec<usize> = (0..env)
            .filter(|&i| (0..d).any(|r| ext.isometry().row(r * env + i).iter().any(|z| z.norm() > 0.0)))
            .collect();
        s.dedup();
        s
    };
    let mut b_states = Vec::with_capacity(e.len());
    let mut e_states = Vec::with_capacity(e.len());
    for (_, rho) in e.iter() {
        let out = ext.dilate(rho)?;
        let b = partial_trace_matrix(out.matrix(), d, env, Keep::A)?;
        let full_e = partial_trace_matrix(out.matrix(), d, env, Keep::B)?;
        let kept: f64 = support.iter().map(|&i| full_e[(i, i)].re).sum();
        if (kept - 1.0).abs() > 1e-12 {
            return Err(Error::InvariantViolation(format!("environment leaks {:.3e} outside its support", 1.0 - kept)));
        }
        let small = full_e.select_rows(&support).select_columns(&support);
        b_states.push(DensityMatrix::from_raw(b));
        e_states.push(DensityMatrix::from_raw(small));
    }
    let info_b = holevo_information(&StateEnsemble::new(b_states, e.weights().to_vec())?);
    let info_e = holevo_information(&StateEnsemble::new(e_states, e.weights().to_vec())?);
    Ok(PrivateInfoReport { info_b, info_e, c1: info_b - info_e })
}

/// `2 (Δ_min − (I_in − I_out))`, a lower bound on the private capacity.
/// Non-positive values are vacuous.
pub fn info_loss_capacity_bound(delta_min_estimate: InfoValue, info_in: InfoValue, info_out: InfoValue) -> InfoValue {
    (delta_min_estimate - (info_in - info_out)) * 2.0
}

/// `V_in⁴ / (64 (9⟨E_out⁴⟩ + 8⟨E_in⁴⟩) ⟨E_in⁴⟩) − c_p/2` in nats, with
/// `V_in = (ΔE_in)²` the input energy variance and raw fourth moments.
pub fn ilc_bound(in_dist: &DiscreteDistribution, out_dist: &DiscreteDistribution, cp: InfoValue) -> InfoValue {
    let m_in = moments(in_dist);
    let m_out = moments(out_dist);
    let half_cp = cp * 0.5;
    if m_in.variance <= 0.0 {
        return InfoValue::ZERO - half_cp;
    }
    let ratio =
        m_in.variance.powi(4) / (64.0 * (9.0 * m_out.fourth_moment + 8.0 * m_in.fourth_moment) * m_in.fourth_moment);
    InfoValue::from_nats(ratio) - half_cp
}

/// One copy of the optimal phase-covariant cloner: the equatorial Bloch
/// vector shrunk by `1/√2`.
pub fn phase_covariant_clone(bloch_xy: (f64, f64)) -> Result<DensityMatrix> {
    let (x, y) = bloch_xy;
    let r = x.hypot(y);
    if r > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!("Bloch vector length {r} > 1")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::from_bloch(x * s, y * s, 0.0)
}

/// Holevo information of the equatorial orbit of `|+⟩` under
/// `H = diag(0, 1)` and of the orbit of its clones, both at `samples` points.
pub fn cloner_orbit_information(samples: usize) -> Result<(InfoValue, InfoValue)> {
    let h = HamiltonianSpec::from_diagonal(&[0.0, 1.0])?;
    let original = orbit_ensemble(&PureState::plus().density(), &h, samples)?;
    let clones = original.map(|rho| {
        let m = rho.matrix();
        // Bloch x = 2 Re ρ01, y = −2 Im ρ01... with ρ01 = (x − iy)/2
        let z = m[(0, 1)];
        phase_covariant_clone((2.0 * z.re, -2.0 * z.im))
    })?;
    Ok((holevo_information(&original), holevo_information(&clones)))
}

/// Timing information lost by a channel, `I(ρ) − I(G(ρ))`.
pub fn timing_information_loss(sk: &ShiftKraus, rho: &DensityMatrix) -> Result<InfoValue> {
    let h = sk.hamiltonian();
    Ok(timing_information(rho, h)? - timing_information(&sk.channel().apply(rho)?, h)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariant::shift_decompose;
    use crate::qcore::KrausChannel;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn qubit() -> HamiltonianSpec {
        HamiltonianSpec::from_diagonal(&[0.0, 1.0]).unwrap()
    }

    fn equatorial_orbit() -> StateEnsemble {
        orbit_ensemble(&PureState::plus().density(), &qubit(), 64).unwrap()
    }

    #[test]
    fn identity_channel_keeps_all_information() {
        let sk = shift_decompose(&KrausChannel::identity(2), &qubit()).unwrap();
        let e = StateEnsemble::uniform(vec![PureState::basis(2, 0).density(), PureState::basis(2, 1).density()]).unwrap();
        let r = private_info(&sk, &e, 1).unwrap();
        assert!((r.info_b.bits() - 1.0).abs() < 1e-9);
        assert!(r.info_e.nats().abs() < 1e-9);
        assert!((r.c1.nats() - (r.info_b - r.info_e).nats()).abs() < 1e-12);
    }

    #[test]
    fn dephasing_has_no_private_information() {
        let sk = shift_decompose(&KrausChannel::full_dephasing(2), &qubit()).unwrap();
        let r = private_info(&sk, &equatorial_orbit(), 1).unwrap();
        assert!(r.info_b.nats().abs() < 1e-9 && r.info_e.nats().abs() < 1e-9 && r.c1.nats().abs() < 1e-9);
    }

    #[test]
    fn half_damping_is_symmetric() {
        // at γ = 1/2 output and environment states on the equator are unitarily
        // equivalent (both diag(3/4, 1/4) with off-diagonal √γ/2), so c1 = 0
        let sk = shift_decompose(&KrausChannel::amplitude_damping(0.5).unwrap(), &qubit()).unwrap();
        let r = private_info(&sk, &equatorial_orbit(), 1).unwrap();
        assert!(r.c1.nats().abs() < 1e-9);
        // output Bloch length √(1−γ) = 1/√2 in the plane, z = γ = 1/2
        let len = (0.5f64 + 0.25).sqrt();
        let p = 0.5 * (1.0 + len);
        let s_state = -(p * p.ln() + (1.0 - p) * (1.0 - p).ln());
        let s_avg = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert!((r.info_b.nats() - (s_avg - s_state)).abs() < 1e-3);
    }

    #[test]
    fn weaker_damping_has_positive_private_information() {
        let sk = shift_decompose(&KrausChannel::amplitude_damping(0.1).unwrap(), &qubit()).unwrap();
        let r = private_info(&sk, &equatorial_orbit(), 1).unwrap();
        assert!(r.c1.nats() > 0.1);
    }

    #[test]
    fn info_loss_bound_arithmetic() {
        let b = info_loss_capacity_bound(InfoValue::from_nats(0.1), InfoValue::from_nats(0.4), InfoValue::from_nats(0.4));
        assert!((b.nats() - 0.2).abs() < 1e-15);
        let v = info_loss_capacity_bound(InfoValue::from_nats(0.1), InfoValue::from_nats(0.5), InfoValue::from_nats(0.3));
        assert!(v.nats() <= 0.0);
        let deph = info_loss_capacity_bound(InfoValue::from_nats(LN_2), InfoValue::from_nats(LN_2), InfoValue::ZERO);
        assert!(deph.nats() <= 1e-15);
    }

    #[test]
    fn ilc_bound_arithmetic() {
        let u = DiscreteDistribution::uniform(&[0.0, 1.0]).unwrap();
        // V = 1/4, ⟨E⁴⟩ = 1/2
        let expected = (0.25f64).powi(4) / (64.0 * (9.0 * 0.5 + 8.0 * 0.5) * 0.5);
        assert!((ilc_bound(&u, &u, InfoValue::ZERO).nats() - expected).abs() < 1e-18);
        let point = DiscreteDistribution::point_mass(1.0);
        assert_eq!(ilc_bound(&point, &u, InfoValue::from_nats(0.3)).nats(), -0.15);
    }

    #[test]
    fn clone_examples() {
        let mut eig = phase_covariant_clone((1.0, 0.0)).unwrap().eigenvalues();
        eig.sort_by(f64::total_cmp);
        let r = 0.5 * FRAC_1_SQRT_2;
        assert!((eig[1] - (0.5 + r)).abs() < 1e-12 && (eig[0] - (0.5 - r)).abs() < 1e-12);
        let mixed = phase_covariant_clone((0.0, 0.0)).unwrap();
        assert!((mixed.matrix()[(0, 0)].re - 0.5).abs() < 1e-15 && mixed.matrix()[(0, 1)].norm() < 1e-15);
        assert!(phase_covariant_clone((1.0, 0.5)).is_err());
    }

    #[test]
    fn clone_orbit_information() {
        let (orig, copy) = cloner_orbit_information(64).unwrap();
        assert!((orig.bits() - 1.0).abs() < 1e-3);
        // averaged clone is I/2, each clone has eigenvalues ½ ± 1/(2√2)
        let p: f64 = 0.5 + 0.5 * FRAC_1_SQRT_2;
        let h = -(p * p.log2() + (1.0 - p) * (1.0 - p).log2());
        assert!((copy.bits() - (1.0 - h)).abs() < 1e-9);
        assert!((copy.bits() - 0.399).abs() < 1e-3);
    }
}
