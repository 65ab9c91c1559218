//! Entropies and information quantities.
//!
//! All arithmetic is in nats; [`InfoValue`] converts to bits on request.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::energydist::JointEnergyDistribution;
use crate::error::{Error, Result};
use crate::qcore::hamiltonian::{dephase, evolve, HamiltonianSpec};
use crate::qcore::{DensityMatrix, StateEnsemble};

/// Eigenvalues in `[-CLAMP_TOL, 0]` are treated as exact zeros.
pub const CLAMP_TOL: f64 = 1e-10;

/// Support points closer than this are the same point.
pub const SUPPORT_MERGE_TOL: f64 = 1e-9;

/// Default number of orbit samples per period.
pub const DEFAULT_ORBIT_SAMPLES: usize = 64;

/// Reporting unit for information quantities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Bits,
    Nats,
}

impl Unit {
    pub fn label(self) -> &'static str {
        match self {
            Unit::Bits => "bit",
            Unit::Nats => "nats",
        }
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bits" | "bit" => Ok(Unit::Bits),
            "nats" | "nat" => Ok(Unit::Nats),
            other => Err(Error::InvalidArgument(format!("unknown unit {other:?} (expected bits or nats)"))),
        }
    }
}

/// An amount of information, stored in nats. May be `+∞` for relative
/// entropies with a support violation.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InfoValue(f64);

impl InfoValue {
    pub const ZERO: InfoValue = InfoValue(0.0);
    pub const INFINITY: InfoValue = InfoValue(f64::INFINITY);

    pub fn from_nats(nats: f64) -> Self {
        Self(nats)
    }

    pub fn from_bits(bits: f64) -> Self {
        Self(bits * std::f64::consts::LN_2)
    }

    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }

    pub fn in_unit(self, unit: Unit) -> f64 {
        match unit {
            Unit::Bits => self.bits(),
            Unit::Nats => self.nats(),
        }
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `"1.0000 bit"`-style rendering.
    pub fn display(self, unit: Unit) -> String {
        format!("{:.4} {}", self.in_unit(unit), unit.label())
    }
}

impl std::ops::Add for InfoValue {
    type Output = InfoValue;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl std::ops::Sub for InfoValue {
    type Output = InfoValue;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl std::ops::Mul<f64> for InfoValue {
    type Output = InfoValue;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0 * rhs)
    }
}

impl fmt::Display for InfoValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} nats", self.0)
    }
}

/// Sort `(point, mass)` pairs, merge points within [`SUPPORT_MERGE_TOL`]
/// and clamp round-off negatives. No normalization.
pub(crate) fn merge_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> (Vec<f64>, Vec<f64>) {
    let mut pairs: Vec<(f64, f64)> = pairs.into_iter().collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut support: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut anchor = f64::NEG_INFINITY;
    for (x, p) in pairs {
        let p = if p < 0.0 && p > -CLAMP_TOL { 0.0 } else { p };
        if x - anchor <= SUPPORT_MERGE_TOL {
            *probs.last_mut().unwrap() += p;
        } else {
            anchor = x;
            support.push(x);
            probs.push(p);
        }
    }
    (support, probs)
}

/// A probability distribution on finitely many real points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    support: Vec<f64>,
    probs: Vec<f64>,
}

const PROB_SUM_TOL: f64 = 1e-12;

impl DiscreteDistribution {
    /// Validating constructor: support strictly increasing, probabilities
    /// non-negative and summing to one.
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!("{} points, {} probabilities", support.len(), probs.len())));
        }
        if support.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite support point".into()));
        }
        if support.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidDistribution("support is not strictly increasing".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidDistribution("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { support, probs })
    }

    /// Build from unordered `(point, mass)` pairs; points within
    /// [`SUPPORT_MERGE_TOL`] are merged and tiny negative masses from
    /// round-off are clamped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (support, probs) = merge_pairs(pairs);
        Self::new(support, probs)
    }

    pub fn point_mass(x: f64) -> Self {
        Self { support: vec![x], probs: vec![1.0] }
    }

    pub fn uniform(points: &[f64]) -> Result<Self> {
        let p = 1.0 / points.len() as f64;
        Self::from_pairs(points.iter().map(|&x| (x, p)))
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    /// Probability at `x` (0 if `x` is not a support point).
    pub fn prob_at(&self, x: f64) -> f64 {
        let i = self.support.partition_point(|&s| s < x - SUPPORT_MERGE_TOL);
        match self.support.get(i) {
            Some(&s) if (s - x).abs() <= SUPPORT_MERGE_TOL => self.probs[i],
            _ => 0.0,
        }
    }

    pub fn entropy(&self) -> InfoValue {
        shannon_entropy(self.probs.iter().copied())
    }
}

/// `−Σ p ln p` with `0 ln 0 = 0`. Masses a rounding error above one would
/// give a tiny negative sum, so the result is floored at zero.
pub fn shannon_entropy(probs: impl IntoIterator<Item = f64>) -> InfoValue {
    InfoValue(probs.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum::<f64>().max(0.0))
}

pub fn shannon(p: &DiscreteDistribution) -> InfoValue {
    p.entropy()
}

/// `S(ρ) = −tr ρ ln ρ` from the clamped spectrum.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> InfoValue {
    spectrum_entropy(&rho.eigenvalues())
}

pub(crate) fn spectrum_entropy(eigs: &[f64]) -> InfoValue {
    shannon_entropy(eigs.iter().map(|&l| if l < CLAMP_TOL && l > -CLAMP_TOL { 0.0 } else { l.max(0.0) }))
}

/// Joint Shannon entropy `S(X,Y)` of an energy table.
pub fn joint_entropy(j: &JointEnergyDistribution) -> InfoValue {
    shannon_entropy(j.probs().iter().flatten().copied())
}

/// `S(X|Y) = S(X,Y) − S(Y)`
pub fn conditional_entropy_x_given_y(j: &JointEnergyDistribution) -> InfoValue {
    joint_entropy(j) - j.marginal_y().entropy()
}

/// `S(Y|X) = S(X,Y) − S(X)`
pub fn conditional_entropy_y_given_x(j: &JointEnergyDistribution) -> InfoValue {
    joint_entropy(j) - j.marginal_x().entropy()
}

/// `I(X:Y) = S(X) + S(Y) − S(X,Y)`
pub fn mutual_information(j: &JointEnergyDistribution) -> InfoValue {
    j.marginal_x().entropy() + j.marginal_y().entropy() - joint_entropy(j)
}

/// Kullback–Leibler divergence `K(p‖q) = Σ p ln(p/q)` on the union grid.
/// Returns `+∞` when `p` has mass where `q` has none.
pub fn relative_entropy(p: &DiscreteDistribution, q: &DiscreteDistribution) -> InfoValue {
    let mut total = 0.0;
    for (x, px) in p.iter() {
        if px <= 0.0 {
            continue;
        }
        let qx = q.prob_at(x);
        if qx <= 0.0 {
            return InfoValue::INFINITY;
        }
        total += px * (px / qx).ln();
    }
    InfoValue(total)
}

/// `S(Σ p_x ρ_x) − Σ p_x S(ρ_x)`
pub fn holevo_information(e: &StateEnsemble) -> InfoValue {
    let avg = von_neumann_entropy(&e.average());
    let mean: f64 = e.iter().map(|(p, rho)| p * von_neumann_entropy(rho).nats()).sum();
    InfoValue(avg.nats() - mean)
}

/// `I = S(ρ̄) − S(ρ)`, the Holevo information of the time orbit.
pub fn timing_information(rho: &DensityMatrix, h: &HamiltonianSpec) -> Result<InfoValue> {
    let bar = dephase(rho, h)?;
    Ok(von_neumann_entropy(&bar) - von_neumann_entropy(rho))
}

/// Uniform ensemble `{α_{kτ/N}(ρ)}_{k<N}` over one period `τ = 2π`.
/// Requires an integer spectrum.
pub fn orbit_ensemble(rho: &DensityMatrix, h: &HamiltonianSpec, samples: usize) -> Result<StateEnsemble> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("orbit needs at least 2 samples, got {samples}")));
    }
    if !h.has_integer_spectrum() {
        return Err(Error::NoPeriod);
    }
    let tau = 2.0 * std::f64::consts::PI;
    let states = (0..samples)
        .map(|k| evolve(rho, h, tau * k as f64 / samples as f64))
        .collect::<Result<Vec<_>>>()?;
    StateEnsemble::uniform(states)
}
