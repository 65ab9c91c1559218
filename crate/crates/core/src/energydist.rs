//! Classical energy statistics of quantum states: joint tables, marginals,
//! convolutions, moments and symmetrization.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::infomeasures::{self, DiscreteDistribution, InfoValue, CLAMP_TOL, SUPPORT_MERGE_TOL};
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::{DensityMatrix, HamiltonianSpec};

const PROB_SUM_TOL: f64 = 1e-12;

/// `P(X = x, Y = y)` on a finite grid, rows indexed by `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointEnergyDistribution {
    x_support: Vec<f64>,
    y_support: Vec<f64>,
    probs: Vec<Vec<f64>>,
}

impl JointEnergyDistribution {
    pub fn new(x_support: Vec<f64>, y_support: Vec<f64>, probs: Vec<Vec<f64>>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidDistribution(m));
        if x_support.is_empty() || y_support.is_empty() {
            return bad("empty support".into());
        }
        for s in [&x_support, &y_support] {
            if s.windows(2).any(|w| w[1] <= w[0]) || s.iter().any(|v| !v.is_finite()) {
                return bad("support must be finite and strictly increasing".into());
            }
        }
        if probs.len() != x_support.len() || probs.iter().any(|r| r.len() != y_support.len()) {
            return bad("probability table shape does not match supports".into());
        }
        let mut probs = probs;
        for p in probs.iter_mut().flatten() {
            if *p < 0.0 && *p > -CLAMP_TOL {
                *p = 0.0;
            }
            if !(*p >= 0.0) {
                return bad(format!("negative probability {p}"));
            }
        }
        let total: f64 = probs.iter().flatten().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return bad(format!("probabilities sum to {total}"));
        }
        Ok(Self { x_support, y_support, probs })
    }

    /// Product table `P_X(x) P_Y(y)`.
    pub fn independent(px: &DiscreteDistribution, py: &DiscreteDistribution) -> Self {
        let probs = px.probs().iter().map(|a| py.probs().iter().map(|b| a * b).collect()).collect();
        Self { x_support: px.support().to_vec(), y_support: py.support().to_vec(), probs }
    }

    pub fn x_support(&self) -> &[f64] {
        &self.x_support
    }

    pub fn y_support(&self) -> &[f64] {
        &self.y_support
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    /// `(x, y, p)` triples in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.x_support.iter().enumerate().flat_map(move |(i, &x)| {
            self.y_support.iter().enumerate().map(move |(j, &y)| (x, y, self.probs[i][j]))
        })
    }

    pub fn marginal_x(&self) -> DiscreteDistribution {
        let probs = self.probs.iter().map(|r| r.iter().sum()).collect();
        DiscreteDistribution::new(self.x_support.clone(), probs).unwrap_or_else(|_| self.renormalized_marginal(true))
    }

    pub fn marginal_y(&self) -> DiscreteDistribution {
        let probs = (0..self.y_support.len()).map(|j| self.probs.iter().map(|r| r[j]).sum()).collect();
        DiscreteDistribution::new(self.y_support.clone(), probs).unwrap_or_else(|_| self.renormalized_marginal(false))
    }

    // Summation order can push a marginal's total a few ulps past the
    // tolerance; the table itself was validated, so rebuild through pairs.
    fn renormalized_marginal(&self, x: bool) -> DiscreteDistribution {
        let pairs: Vec<(f64, f64)> = if x {
            self.x_support.iter().zip(&self.probs).map(|(&s, r)| (s, r.iter().sum())).collect()
        } else {
            self.y_support.iter().enumerate().map(|(j, &s)| (s, self.probs.iter().map(|r| r[j]).sum())).collect()
        };
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        DiscreteDistribution::from_pairs(pairs.into_iter().map(|(s, p)| (s, p / total))).expect("validated table")
    }

    /// Swap the roles of `X` and `Y`.
    pub fn transpose(&self) -> Self {
        let probs = (0..self.y_support.len()).map(|j| self.probs.iter().map(|r| r[j]).collect()).collect();
        Self { x_support: self.y_support.clone(), y_support: self.x_support.clone(), probs }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.x_support == self.y_support
            && (0..self.x_support.len()).all(|i| (0..i).all(|j| (self.probs[i][j] - self.probs[j][i]).abs() <= tol))
    }
}

/// Energy distribution `p_x = tr(R_x ρ)` of a state.
pub fn energy_distribution(rho: &DensityMatrix, h: &HamiltonianSpec) -> Result<DiscreteDistribution> {
    check_dim(h.dim(), rho.dim())?;
    let pairs: Vec<(f64, f64)> = h.levels().map(|(e, p)| (e, linalg::trace(&(p * rho.matrix())).re)).collect();
    normalized_pairs(pairs)
}

/// Normalize and drop points that carry exactly zero mass.
fn normalized_pairs(pairs: Vec<(f64, f64)>) -> Result<DiscreteDistribution> {
    let (support, probs) = infomeasures::merge_pairs(pairs);
    let total: f64 = probs.iter().sum();
    let (support, probs): (Vec<f64>, Vec<f64>) =
        support.into_iter().zip(probs).filter(|&(_, p)| p != 0.0).map(|(x, p)| (x, p / total)).unzip();
    DiscreteDistribution::new(support, probs)
}

/// Joint table `P(x, y) = tr(ρ (R_x ⊗ Q_y))` of simultaneous spectral
/// measurements on the two factors.
pub fn joint_energy(rho: &DensityMatrix, ha: &HamiltonianSpec, hb: &HamiltonianSpec) -> Result<JointEnergyDistribution> {
    check_dim(ha.dim() * hb.dim(), rho.dim())?;
    let m = rho.matrix();
    let (da, db) = (ha.dim(), hb.dim());
    let mut probs = vec![vec![0.0; hb.eigenvalues().len()]; ha.eigenvalues().len()];
    for (i, ra) in ha.projections().iter().enumerate() {
        for (j, qb) in hb.projections().iter().enumerate() {
            probs[i][j] = kron_expectation(m, ra, qb, da, db);
        }
    }
    let total: f64 = probs.iter().flatten().sum();
    for p in probs.iter_mut().flatten() {
        *p /= total;
    }
    JointEnergyDistribution::new(ha.eigenvalues().to_vec(), hb.eigenvalues().to_vec(), probs)
}

/// `tr(m (a ⊗ b))` without materializing the Kronecker product.
fn kron_expectation(m: &CMatrix, a: &CMatrix, b: &CMatrix, da: usize, db: usize) -> f64 {
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..da {
        for k in 0..da {
            let aki = a[(k, i)];
            if aki.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..db {
                for l in 0..db {
                    acc += m[(i * db + j, k * db + l)] * aki * b[(l, j)];
                }
            }
        }
    }
    acc.re
}

/// Distribution of `X + Y`; colliding sums are merged.
pub fn sum_distribution(j: &JointEnergyDistribution) -> DiscreteDistribution {
    let pairs: Vec<(f64, f64)> = j.cells().map(|(x, y, p)| (x + y, p)).collect();
    normalized_pairs(pairs).expect("validated table")
}

/// Discrete convolution `p * q`.
pub fn convolve(p: &DiscreteDistribution, q: &DiscreteDistribution) -> DiscreteDistribution {
    let pairs: Vec<(f64, f64)> = p.iter().flat_map(|(x, px)| q.iter().map(move |(y, qy)| (x + y, px * qy))).collect();
    normalized_pairs(pairs).expect("product of distributions")
}

/// Distribution of `−X`.
pub fn negate(p: &DiscreteDistribution) -> DiscreteDistribution {
    let support: Vec<f64> = p.support().iter().rev().map(|x| -x).collect();
    let probs: Vec<f64> = p.probs().iter().rev().copied().collect();
    DiscreteDistribution::new(support, probs).expect("reversal preserves validity")
}

/// `w p + (1 − w) q` on the union grid.
pub fn mixture(p: &DiscreteDistribution, q: &DiscreteDistribution, w: f64) -> DiscreteDistribution {
    let pairs: Vec<(f64, f64)> = p.iter().map(|(x, a)| (x, w * a)).chain(q.iter().map(|(x, b)| (x, (1.0 - w) * b))).collect();
    normalized_pairs(pairs).expect("mixture of distributions")
}

/// Mean, variance and raw fourth moment `⟨X⁴⟩` (about zero).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub fourth_moment: f64,
}

pub fn moments(p: &DiscreteDistribution) -> Moments {
    let mean: f64 = p.iter().map(|(x, w)| w * x).sum();
    let variance: f64 = p.iter().map(|(x, w)| w * (x - mean) * (x - mean)).sum();
    let fourth_moment: f64 = p.iter().map(|(x, w)| w * x.powi(4)).sum();
    Moments { mean, variance, fourth_moment }
}

/// Moments of `X`, `Y`, `X+Y` and the covariances `C(X, X+Y)`, `C(Y, X+Y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointMoments {
    pub x: Moments,
    pub y: Moments,
    pub sum: Moments,
    pub cov_x_sum: f64,
    pub cov_y_sum: f64,
}

impl JointMoments {
    /// `C(X,X+Y) + C(Y,X+Y) − V(X+Y)`, zero up to round-off.
    pub fn covariance_identity_residual(&self) -> f64 {
        self.cov_x_sum + self.cov_y_sum - self.sum.variance
    }
}

pub fn joint_moments(j: &JointEnergyDistribution) -> JointMoments {
    let x = moments(&j.marginal_x());
    let y = moments(&j.marginal_y());
    let sum = moments(&sum_distribution(j));
    let cov = |f: fn(f64, f64) -> f64, mean_f: f64| -> f64 {
        j.cells().map(|(a, b, p)| p * (f(a, b) - mean_f) * (a + b - sum.mean)).sum()
    };
    JointMoments { x, y, sum, cov_x_sum: cov(|a, _| a, x.mean), cov_y_sum: cov(|_, b| b, y.mean), }
}

/// `P̄ = (P + P′)/2` with `P′(x, y) = P(y, x)`, on the union of both supports.
pub fn symmetrize(j: &JointEnergyDistribution) -> JointEnergyDistribution {
    let mut grid: Vec<f64> = j.x_support.iter().chain(&j.y_support).copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= SUPPORT_MERGE_TOL);
    let index = |v: f64| grid.iter().position(|&g| (g - v).abs() <= SUPPORT_MERGE_TOL).expect("grid covers supports");
    let n = grid.len();
    let mut probs = vec![vec![0.0; n]; n];
    for (x, y, p) in j.cells() {
        let (a, b) = (index(x), index(y));
        probs[a][b] += 0.5 * p;
        probs[b][a] += 0.5 * p;
    }
    JointEnergyDistribution { x_support: grid.clone(), y_support: grid, probs }
}

/// `I(X : X+Y) = S(X) + S(X+Y) − S(X,Y)`; the map `(x,y) ↦ (x,x+y)` is a
/// bijection so `S(X, X+Y) = S(X,Y)`.
pub fn mutual_info_x_sum(j: &JointEnergyDistribution) -> InfoValue {
    j.marginal_x().entropy() + sum_distribution(j).entropy() - infomeasures::joint_entropy(j)
}

/// `I(Y : X+Y)`
pub fn mutual_info_y_sum(j: &JointEnergyDistribution) -> InfoValue {
    j.marginal_y().entropy() + sum_distribution(j).entropy() - infomeasures::joint_entropy(j)
}

/// Random table on integer supports drawn from `0..=max_energy` with
/// flat-Dirichlet weights. Some cells are zeroed to exercise sparse tables.
pub fn random_joint_table<R: Rng + ?Sized>(rng: &mut R, max_points: usize, max_energy: i64) -> JointEnergyDistribution {
    let support = |rng: &mut R| -> Vec<f64> {
        let n = rng.random_range(1..=max_points);
        let mut pts: Vec<i64> = Vec::new();
        while pts.len() < n.min(max_energy as usize + 1) {
            let v = rng.random_range(0..=max_energy);
            if !pts.contains(&v) {
                pts.push(v);
            }
        }
        pts.sort_unstable();
        pts.into_iter().map(|v| v as f64).collect()
    };
    let xs = support(rng);
    let ys = support(rng);
    let mut probs: Vec<Vec<f64>> = (0..xs.len())
        .map(|_| {
            (0..ys.len())
                .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.sample::<f64, _>(Exp1) })
                .collect()
        })
        .collect();
    let total: f64 = probs.iter().flatten().sum();
    if total == 0.0 {
        probs[0][0] = 1.0;
    } else {
        probs.iter_mut().flatten().for_each(|p| *p /= total);
    }
    JointEnergyDistribution::new(xs, ys, probs).expect("normalized table")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{c, ZERO};
    use crate::qcore::random::rng_from_seed;
    use crate::qcore::PureState;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn qubit() -> HamiltonianSpec {
        HamiltonianSpec::from_diagonal(&[0.0, 1.0]).unwrap()
    }

    fn iid_uniform() -> JointEnergyDistribution {
        let u = DiscreteDistribution::uniform(&[0.0, 1.0]).unwrap();
        JointEnergyDistribution::independent(&u, &u)
    }

    #[test]
    fn joint_energy_of_plus_plus_is_iid_uniform() {
        let psi = PureState::plus().tensor(&PureState::plus()).density();
        let j = joint_energy(&psi, &qubit(), &qubit()).unwrap();
        for row in j.probs() {
            for &p in row {
                assert!((p - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn joint_energy_eigenstate_and_bell() {
        let e01 = PureState::basis(2, 0).tensor(&PureState::basis(2, 1)).density();
        let j = joint_energy(&e01, &qubit(), &qubit()).unwrap();
        assert_eq!(j.probs(), &[vec![0.0, 1.0], vec![0.0, 0.0]]);

        let s = FRAC_1_SQRT_2;
        let bell = PureState::from_amplitudes(&[ZERO, c(s, 0.0), c(s, 0.0), ZERO]).unwrap().density();
        let j = joint_energy(&bell, &qubit(), &qubit()).unwrap();
        assert!((j.probs()[0][1] - 0.5).abs() < 1e-15 && (j.probs()[1][0] - 0.5).abs() < 1e-15);
        let z = sum_distribution(&j);
        assert_eq!(z.support(), &[1.0]);
        assert!((z.probs()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sum_of_iid_uniform() {
        let z = sum_distribution(&iid_uniform());
        assert_eq!(z.support(), &[0.0, 1.0, 2.0]);
        assert_eq!(z.probs(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn convolution_examples() {
        let z = DiscreteDistribution::new(vec![0.0, 1.0, 2.0], vec![0.25, 0.5, 0.25]).unwrap();
        let m = DiscreteDistribution::uniform(&[-1.0, 0.0]).unwrap();
        let conv = convolve(&m, &z);
        assert_eq!(conv.support(), &[-1.0, 0.0, 1.0, 2.0]);
        for (a, b) in conv.probs().iter().zip([0.125, 0.375, 0.375, 0.125]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(convolve(&z, &DiscreteDistribution::point_mass(0.0)), z);
        let sym = convolve(&negate(&z), &z);
        for (x, p) in sym.iter() {
            assert!((sym.prob_at(-x) - p).abs() < 1e-15);
        }
    }

    #[test]
    fn negate_examples() {
        assert_eq!(negate(&DiscreteDistribution::point_mass(2.5)), DiscreteDistribution::point_mass(-2.5));
        let u = DiscreteDistribution::uniform(&[0.0, 1.0]).unwrap();
        assert_eq!(negate(&u), DiscreteDistribution::uniform(&[-1.0, 0.0]).unwrap());
        assert_eq!(negate(&negate(&u)), u);
    }

    #[test]
    fn moments_of_iid_uniform() {
        let m = joint_moments(&iid_uniform());
        assert!((m.x.fourth_moment - 0.5).abs() < 1e-15);
        assert!((m.sum.variance - 0.5).abs() < 1e-15);
        assert!((m.sum.fourth_moment - 4.5).abs() < 1e-15);
        assert!(m.covariance_identity_residual().abs() < 1e-15);
        assert_eq!(moments(&DiscreteDistribution::point_mass(3.0)).variance, 0.0);
    }

    #[test]
    fn symmetrize_examples() {
        let j = iid_uniform();
        assert_eq!(symmetrize(&j), j);
        let point = JointEnergyDistribution::new(vec![0.0], vec![1.0], vec![vec![1.0]]).unwrap();
        let s = symmetrize(&point);
        assert_eq!(s.x_support(), &[0.0, 1.0]);
        assert_eq!(s.probs(), &[vec![0.0, 0.5], vec![0.5, 0.0]]);
        assert!(s.is_symmetric(0.0));
    }

    #[test]
    fn random_tables_are_valid() {
        let mut rng = rng_from_seed(1);
        for _ in 0..200 {
            let j = random_joint_table(&mut rng, 4, 5);
            let total: f64 = j.probs().iter().flatten().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn iid_uniform_mutual_info_with_sum() {
        // S(X) + S(X+Y) − S(X,Y) = ln2 + 1.5 ln2 − 2 ln2 = ln2 / 2
        let i = mutual_info_x_sum(&iid_uniform()).nats();
        assert!((i - 0.5 * std::f64::consts::LN_2).abs() < 1e-15);
    }
}
