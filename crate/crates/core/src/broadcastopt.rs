//! Search over broadcasting maps `ρ ↦ tr_E(V ρ V†)` into `A ⊗ B` that
//! maximize the average Holevo information `(I_A + I_B)/2` of the two
//! reduced ensembles.
//!
//! Every value found is achievable, so `I − avg` upper-bounds the minimal
//! broadcasting loss. Nothing here certifies global optimality.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::infomeasures::{holevo_information, shannon_entropy, spectrum_entropy, InfoValue};
use crate::qcore::io::MatrixJson;
use crate::qcore::linalg::{self, c, CMatrix, ZERO};
use crate::qcore::random::{haar_unitary, rng_from_seed};
use crate::qcore::{DensityMatrix, StateEnsemble};

pub const DEFAULT_RESTARTS: usize = 20;
pub const MAX_ITERATIONS: usize = 2000;
/// Convergence: objective gain below `CONVERGENCE_GAIN` over `CONVERGENCE_WINDOW` iterations.
pub const CONVERGENCE_GAIN: f64 = 1e-7;
pub const CONVERGENCE_WINDOW: usize = 50;
/// Central-difference step for the numerical gradient.
pub const GRADIENT_STEP: f64 = 1e-5;
const INITIAL_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-10;
/// Slack allowed by the data-processing checks.
const MONOTONICITY_TOL: f64 = 1e-6;

/// Input dimension and the three output factors `A ⊗ B ⊗ E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BroadcastDims {
    pub d: usize,
    pub a: usize,
    pub b: usize,
    pub e: usize,
}

impl BroadcastDims {
    pub fn new(d: usize, a: usize, b: usize, e: usize) -> Result<Self> {
        if [d, a, b, e].contains(&0) {
            return Err(Error::InvalidArgument("dimensions must be positive".into()));
        }
        if a * b * e < d {
            return Err(Error::InvalidArgument(format!("output dimension {a}·{b}·{e} is smaller than the input dimension {d}")));
        }
        Ok(Self { d, a, b, e })
    }

    pub fn out(&self) -> usize {
        self.a * self.b * self.e
    }
}

/// A Stinespring isometry `V: C^d → A ⊗ B ⊗ E`.
#[derive(Clone, Debug)]
pub struct BroadcastMap {
    isometry: CMatrix,
    dims: BroadcastDims,
}

impl BroadcastMap {
    pub fn new(isometry: CMatrix, dims: BroadcastDims) -> Result<Self> {
        if isometry.shape() != (dims.out(), dims.d) {
            return Err(Error::InvalidArgument(format!(
                "isometry is {}x{}, expected {}x{}",
                isometry.nrows(),
                isometry.ncols(),
                dims.out(),
                dims.d
            )));
        }
        let err = linalg::max_abs_diff(&(isometry.adjoint() * &isometry), &linalg::identity(dims.d));
        if err > 1e-9 {
            return Err(Error::InvalidChannel(format!("V†V deviates from identity by {err:.3e}")));
        }
        Ok(Self { isometry, dims })
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    pub fn dims(&self) -> BroadcastDims {
        self.dims
    }

    /// `V|i⟩ = |i⟩_A |0⟩_B |0⟩_E`: A receives the input, B nothing.
    pub fn trivial_split(dims: BroadcastDims) -> Result<Self> {
        if dims.a < dims.d {
            return Err(Error::InvalidArgument("trivial split needs d_A ≥ d".into()));
        }
        let be = dims.b * dims.e;
        Self::new(CMatrix::from_fn(dims.out(), dims.d, |r, i| if r == i * be { c(1.0, 0.0) } else { ZERO }), dims)
    }

    /// `V|i⟩ = |i⟩_A |i⟩_B`, the classical copier.
    pub fn copy(d: usize) -> Result<Self> {
        let dims = BroadcastDims::new(d, d, d, 1)?;
        Self::new(CMatrix::from_fn(d * d, d, |r, i| if r == i * d + i { c(1.0, 0.0) } else { ZERO }), dims)
    }

    /// Ancilla-free symmetric qubit cloner `|0⟩ ↦ |00⟩`, `|1⟩ ↦ (|01⟩ + |10⟩)/√2`.
    pub fn symmetric_cloner() -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = CMatrix::zeros(4, 2);
        v[(0, 0)] = c(1.0, 0.0);
        v[(1, 1)] = c(s, 0.0);
        v[(2, 1)] = c(s, 0.0);
        Self::new(v, BroadcastDims::new(2, 2, 2, 1)?)
    }
}

/// Optimizer bookkeeping.
#[derive(Clone, Debug, Default, Serialize)]
pub struct OptimizerTrace {
    pub restarts: usize,
    pub seeds: Vec<u64>,
    pub iterations: Vec<usize>,
    /// Best average information of each restart, in nats.
    pub restart_best: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct BroadcastResult {
    pub info_orig: InfoValue,
    pub info_a: InfoValue,
    pub info_b: InfoValue,
    pub avg: InfoValue,
    pub achieved_delta: InfoValue,
    pub map: BroadcastMap,
    pub trace: OptimizerTrace,
}

/// Serializable form of [`BroadcastResult`]; information in nats.
#[derive(Clone, Debug, Serialize)]
pub struct BroadcastReport {
    pub dims: BroadcastDims,
    pub info_orig: f64,
    pub info_a: f64,
    pub info_b: f64,
    pub avg: f64,
    pub achieved_delta: f64,
    pub trace: OptimizerTrace,
    pub isometry: MatrixJson,
}

impl BroadcastResult {
    pub fn report(&self) -> BroadcastReport {
        BroadcastReport {
            dims: self.map.dims,
            info_orig: self.info_orig.nats(),
            info_a: self.info_a.nats(),
            info_b: self.info_b.nats(),
            avg: self.avg.nats(),
            achieved_delta: self.achieved_delta.nats(),
            trace: self.trace.clone(),
            isometry: MatrixJson::from_matrix(&self.map.isometry),
        }
    }
}

/// Ensemble members as weighted square-root factors `ρ = F F†`.
struct Evaluator {
    dims: BroadcastDims,
    members: Vec<(f64, CMatrix)>,
    info_orig: InfoValue,
}

impl Evaluator {
    fn new(e: &StateEnsemble, dims: BroadcastDims) -> Result<Self> {
        check_dim(dims.d, e.dim())?;
        let members = e
            .iter()
            .map(|(p, rho)| {
                let (vals, vecs) = linalg::eigh(rho.matrix());
                let cols: Vec<_> = vals
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v > 1e-14)
                    .map(|(k, &v)| vecs.column(k) * c(v.sqrt(), 0.0))
                    .collect();
                (p, linalg::columns_to_matrix(dims.d, &cols))
            })
            .collect();
        Ok(Self { dims, members, info_orig: holevo_information(e) })
    }

    /// `(I_A, I_B)` for isometry `v`.
    fn infos(&self, v: &CMatrix) -> (InfoValue, InfoValue) {
        let BroadcastDims { a, b, e, .. } = self.dims;
        let mut avg_a = CMatrix::zeros(a, a);
        let mut avg_b = CMatrix::zeros(b, b);
        let (mut mean_sa, mut mean_sb) = (0.0, 0.0);
        let mut ra = CMatrix::zeros(a, a);
        let mut rb = CMatrix::zeros(b, b);
        for (p, f) in &self.members {
            let y = v * f;
            ra.fill(ZERO);
            rb.fill(ZERO);
            for k in 0..y.ncols() {
                let col = y.column(k);
                for ia in 0..a {
                    for ia2 in 0..a {
                        for ib in 0..b {
                            let mut acc = ZERO;
                            for ie in 0..e {
                                acc += col[(ia * b + ib) * e + ie] * col[(ia2 * b + ib) * e + ie].conj();
                            }
                            ra[(ia, ia2)] += acc;
                        }
                    }
                }
                for ib in 0..b {
                    for ib2 in 0..b {
                        let mut acc = ZERO;
                        for ia in 0..a {
                            for ie in 0..e {
                                acc += col[(ia * b + ib) * e + ie] * col[(ia * b + ib2) * e + ie].conj();
                            }
                        }
                        rb[(ib, ib2)] += acc;
                    }
                }
            }
            mean_sa += p * hermitian_entropy(&ra);
            mean_sb += p * hermitian_entropy(&rb);
            avg_a += &ra * c(*p, 0.0);
            avg_b += &rb * c(*p, 0.0);
        }
        (
            InfoValue::from_nats(hermitian_entropy(&avg_a) - mean_sa),
            InfoValue::from_nats(hermitian_entropy(&avg_b) - mean_sb),
        )
    }

    fn avg(&self, v: &CMatrix) -> f64 {
        let (ia, ib) = self.infos(v);
        0.5 * (ia.nats() + ib.nats())
    }

    fn result(&self, map: BroadcastMap, trace: OptimizerTrace) -> Result<BroadcastResult> {
        let (info_a, info_b) = self.infos(&map.isometry);
        let orig = self.info_orig.nats();
        for (name, v) in [("I_A", info_a), ("I_B", info_b)] {
            if v.nats() > orig + MONOTONICITY_TOL {
                return Err(Error::InvariantViolation(format!("{name} = {v} exceeds the original information {}", self.info_orig)));
            }
        }
        let avg = (info_a + info_b) * 0.5;
        Ok(BroadcastResult { info_orig: self.info_orig, info_a, info_b, avg, achieved_delta: self.info_orig - avg, map, trace })
    }
}

fn hermitian_entropy(m: &CMatrix) -> f64 {
    spectrum_entropy(&linalg::eigvalsh(m)).nats()
}

/// Holevo informations of the reduced ensembles for a fixed map.
pub fn broadcast_objective(m: &BroadcastMap, e: &StateEnsemble) -> Result<BroadcastResult> {
    Evaluator::new(e, m.dims)?.result(m.clone(), OptimizerTrace::default())
}

/// Holevo informations when each member `ρ_x` is sent to a given joint
/// state `outputs[x]` on `A ⊗ B` (no map needed).
pub fn assignment_objective(
    e: &StateEnsemble,
    outputs: &[DensityMatrix],
    (a, b): (usize, usize),
) -> Result<(InfoValue, InfoValue, InfoValue)> {
    if outputs.len() != e.len() {
        return Err(Error::InvalidArgument(format!("{} outputs for {} members", outputs.len(), e.len())));
    }
    let reduce = |keep| {
        outputs
            .iter()
            .map(|o| crate::qcore::partial_trace(o, (a, b), keep))
            .collect::<Result<Vec<_>>>()
            .and_then(|s| StateEnsemble::new(s, e.weights().to_vec()))
    };
    let ia = holevo_information(&reduce(crate::qcore::Keep::A)?);
    let ib = holevo_information(&reduce(crate::qcore::Keep::B)?);
    Ok((holevo_information(e), ia, ib))
}

/// Product of two phase-covariant clones for each qubit member.
pub fn shrink_cloner_outputs(e: &StateEnsemble) -> Result<Vec<DensityMatrix>> {
    check_dim(2, e.dim())?;
    e.states()
        .iter()
        .map(|rho| {
            let z = rho.matrix()[(0, 1)];
            let copy = crate::covariant::phase_covariant_clone((2.0 * z.re, -2.0 * z.im))?;
            Ok(copy.tensor(&copy))
        })
        .collect()
}

/// Real coordinates of the tangent directions at the current point: an
/// anti-Hermitian `K` whose lower-right `(n−d)²` block is zero (that block
/// does not move the first `d` columns to first order).
struct Chart {
    n: usize,
    d: usize,
}

impl Chart {
    fn len(&self) -> usize {
        self.d * self.d + 2 * self.d * (self.n - self.d)
    }

    fn generator(&self, theta: &[f64]) -> CMatrix {
        let mut k = CMatrix::zeros(self.n, self.n);
        let mut it = theta.iter().copied();
        let mut next = || it.next().expect("parameter count matches the chart");
        for r in 0..self.n {
            for col in r..self.n {
                if r >= self.d && col >= self.d {
                    continue;
                }
                if r == col {
                    k[(r, r)] = c(0.0, next());
                } else {
                    let z = c(next(), next());
                    k[(r, col)] = z;
                    k[(col, r)] = -z.conj();
                }
            }
        }
        k
    }

    /// First `d` columns of `U exp(K(θ))`.
    fn point(&self, u: &CMatrix, theta: &[f64]) -> (CMatrix, CMatrix) {
        let full = u * linalg::expm_antihermitian(&self.generator(theta));
        let v = full.columns(0, self.d).into_owned();
        (full, v)
    }
}

struct RestartOutcome {
    value: f64,
    isometry: CMatrix,
    iterations: usize,
}

fn ascend(ev: &Evaluator, start: CMatrix) -> RestartOutcome {
    let chart = Chart { n: ev.dims.out(), d: ev.dims.d };
    let p = chart.len();
    let mut u = start;
    let mut value = ev.avg(&u.columns(0, chart.d).into_owned());
    let mut history = vec![value];
    let mut step = INITIAL_STEP;
    let mut theta = vec![0.0; p];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut grad = vec![0.0; p];
        for i in 0..p {
            theta[i] = GRADIENT_STEP;
            let plus = ev.avg(&chart.point(&u, &theta).1);
            theta[i] = -GRADIENT_STEP;
            let minus = ev.avg(&chart.point(&u, &theta).1);
            theta[i] = 0.0;
            grad[i] = (plus - minus) / (2.0 * GRADIENT_STEP);
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < 1e-12 {
            break;
        }
        let trial: Vec<f64> = grad.iter().map(|g| step * g / norm).collect();
        let (full, v) = chart.point(&u, &trial);
        let candidate = ev.avg(&v);
        if candidate > value {
            u = full;
            value = candidate;
            step *= 1.2;
        } else {
            step *= 0.5;
        }
        history.push(value);
        if step < MIN_STEP {
            break;
        }
        if history.len() > CONVERGENCE_WINDOW && value - history[history.len() - 1 - CONVERGENCE_WINDOW] < CONVERGENCE_GAIN {
            break;
        }
    }
    // re-orthonormalize away accumulated round-off
    let qr = u.qr();
    let phases = qr.r().diagonal().map(|z| if z.norm() > 0.0 { z / z.norm() } else { c(1.0, 0.0) });
    let u = qr.q() * CMatrix::from_diagonal(&phases);
    let isometry = u.columns(0, chart.d).into_owned();
    RestartOutcome { value: ev.avg(&isometry), isometry, iterations }
}

/// Best of `restarts` local ascents from Haar-random isometries; restart
/// `r` uses seed `seed + r`.
pub fn optimize_broadcast(e: &StateEnsemble, dims: BroadcastDims, restarts: usize, seed: u64) -> Result<BroadcastResult> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let ev = Evaluator::new(e, dims)?;
    let seeds: Vec<u64> = (0..restarts as u64).map(|r| seed.wrapping_add(r)).collect();
    let outcomes: Vec<RestartOutcome> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = rng_from_seed(s);
            ascend(&ev, haar_unitary(&mut rng, dims.out()))
        })
        .collect();
    // first maximal restart wins, so ties resolve by seed order
    let best = outcomes
        .iter()
        .enumerate()
        .fold(0, |best, (i, o)| if o.value > outcomes[best].value { i } else { best });
    let trace = OptimizerTrace {
        restarts,
        seeds,
        iterations: outcomes.iter().map(|o| o.iterations).collect(),
        restart_best: outcomes.iter().map(|o| o.value).collect(),
    };
    let map = BroadcastMap::new(outcomes[best].isometry.clone(), dims)?;
    ev.result(map, trace)
}

/// Mutual information between the ensemble label and the outcome of `povm`.
/// Broadcasting the outcome to both parties gives each this much.
pub fn measure_prepare_baseline(e: &StateEnsemble, povm: &[CMatrix]) -> Result<InfoValue> {
    let d = e.dim();
    let mut sum = CMatrix::zeros(d, d);
    for m in povm {
        if m.shape() != (d, d) {
            return Err(Error::InvalidPovm(format!("element is {}x{}, expected {d}x{d}", m.nrows(), m.ncols())));
        }
        if linalg::hermiticity_error(m) > 1e-10 {
            return Err(Error::InvalidPovm("element is not Hermitian".into()));
        }
        if linalg::eigvalsh(m).first().copied().unwrap_or(0.0) < -1e-10 {
            return Err(Error::InvalidPovm("element is not positive".into()));
        }
        sum += m;
    }
    let dev = linalg::max_abs_diff(&sum, &linalg::identity(d));
    if povm.is_empty() || dev > 1e-10 {
        return Err(Error::InvalidPovm(format!("elements sum to identity only within {dev:.3e}")));
    }
    // I(X:M) = H(M) − Σ_x p_x H(M | x)
    let cond: Vec<Vec<f64>> = e
        .iter()
        .map(|(_, rho)| povm.iter().map(|m| (rho.matrix() * m).trace().re.max(0.0)).collect())
        .collect();
    let marginal: Vec<f64> = (0..povm.len()).map(|k| e.weights().iter().zip(&cond).map(|(p, row)| p * row[k]).sum()).collect();
    let h_cond: f64 = e.weights().iter().zip(&cond).map(|(p, row)| p * shannon_entropy(row.iter().copied()).nats()).sum();
    Ok(InfoValue::from_nats((shannon_entropy(marginal).nats() - h_cond).max(0.0)))
}

/// Outcome of the no-lossless-broadcast probe.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConjectureProbe {
    pub info_orig_bits: f64,
    pub max_avg_bits: f64,
    /// Set when the average comes within 0.01 bit of the original
    /// (or exceeds 0.99 bit), which for a non-commuting ensemble would be
    /// lossless broadcasting.
    pub anomaly: bool,
}

pub fn conjecture_probe(r: &BroadcastResult) -> ConjectureProbe {
    let (orig, avg) = (r.info_orig.bits(), r.avg.bits());
    ConjectureProbe { info_orig_bits: orig, max_avg_bits: avg, anomaly: avg > orig - 0.01 || avg > 0.99 }
}

/// Haar-random broadcast map, mostly for tests.
pub fn random_map<R: Rng + ?Sized>(rng: &mut R, dims: BroadcastDims) -> Result<BroadcastMap> {
    let u = haar_unitary(rng, dims.out());
    BroadcastMap::new(u.columns(0, dims.d).into_owned(), dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infomeasures::orbit_ensemble;
    use crate::qcore::{HamiltonianSpec, PureState};

    fn equatorial() -> StateEnsemble {
        let h = HamiltonianSpec::from_diagonal(&[0.0, 1.0]).unwrap();
        orbit_ensemble(&PureState::plus().density(), &h, 64).unwrap()
    }

    fn classical() -> StateEnsemble {
        StateEnsemble::uniform(vec![PureState::basis(2, 0).density(), PureState::basis(2, 1).density()]).unwrap()
    }

    fn dims221() -> BroadcastDims {
        BroadcastDims::new(2, 2, 2, 1).unwrap()
    }

    #[test]
    fn dims_validate() {
        assert!(BroadcastDims::new(4, 1, 2, 1).is_err());
        assert!(BroadcastDims::new(2, 0, 2, 1).is_err());
        assert_eq!(BroadcastDims::new(2, 2, 2, 2).unwrap().out(), 8);
    }

    #[test]
    fn trivial_split_gives_half() {
        let e = equatorial();
        let r = broadcast_objective(&BroadcastMap::trivial_split(BroadcastDims::new(2, 2, 1, 1).unwrap()).unwrap(), &e).unwrap();
        assert!((r.info_a.nats() - r.info_orig.nats()).abs() < 1e-12 && r.info_b.nats().abs() < 1e-12);
        assert!((r.avg.nats() - 0.5 * r.info_orig.nats()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_cloner_feasible_point() {
        // ρ_A = diag(3/4, 1/4) with off-diagonal e^{−iφ}/(2√2): Bloch length √3/2
        let r = broadcast_objective(&BroadcastMap::symmetric_cloner().unwrap(), &equatorial()).unwrap();
        let len = 3f64.sqrt() / 2.0;
        let p = 0.5 * (1.0 + len);
        let s_member = -(p * p.log2() + (1.0 - p) * (1.0 - p).log2());
        let s_avg = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((r.info_a.bits() - (s_avg - s_member)).abs() < 1e-9);
        assert!((r.info_a.nats() - r.info_b.nats()).abs() < 1e-12);
        assert!((r.avg.bits() - 0.457).abs() < 1e-3);
    }

    #[test]
    fn shrink_cloner_assignment() {
        let e = equatorial();
        let outs = shrink_cloner_outputs(&e).unwrap();
        let (orig, ia, ib) = assignment_objective(&e, &outs, (2, 2)).unwrap();
        assert!((orig.bits() - 1.0).abs() < 1e-3);
        assert!((ia.bits() - 0.399).abs() < 1e-3 && (ib.bits() - 0.399).abs() < 1e-3);
    }

    #[test]
    fn single_state_has_no_information() {
        let e = StateEnsemble::uniform(vec![PureState::plus().density()]).unwrap();
        let m = random_map(&mut rng_from_seed(1), BroadcastDims::new(2, 2, 2, 2).unwrap()).unwrap();
        let r = broadcast_objective(&m, &e).unwrap();
        assert!(r.info_orig.nats().abs() < 1e-12 && r.info_a.nats().abs() < 1e-9 && r.info_b.nats().abs() < 1e-9);
    }

    #[test]
    fn copier_broadcasts_classical_ensemble() {
        let r = broadcast_objective(&BroadcastMap::copy(2).unwrap(), &classical()).unwrap();
        assert!(r.achieved_delta.nats().abs() < 1e-12);
    }

    #[test]
    fn random_maps_respect_data_processing() {
        let e = equatorial();
        let mut rng = rng_from_seed(4);
        for dims in [dims221(), BroadcastDims::new(2, 2, 2, 2).unwrap(), BroadcastDims::new(2, 3, 2, 1).unwrap()] {
            for _ in 0..5 {
                let r = broadcast_objective(&random_map(&mut rng, dims).unwrap(), &e).unwrap();
                assert!(r.info_a.nats() <= r.info_orig.nats() + 1e-9 && r.info_b.nats() <= r.info_orig.nats() + 1e-9);
            }
        }
    }

    #[test]
    fn evaluator_matches_partial_traces() {
        let e = equatorial();
        let dims = BroadcastDims::new(2, 2, 3, 2).unwrap();
        let m = random_map(&mut rng_from_seed(12), dims).unwrap();
        let outs: Vec<DensityMatrix> = e
            .states()
            .iter()
            .map(|rho| {
                let full = DensityMatrix::from_raw(m.isometry() * rho.matrix() * m.isometry().adjoint());
                crate::qcore::partial_trace(&full, (6, 2), crate::qcore::Keep::A).unwrap()
            })
            .collect();
        let (_, ia, ib) = assignment_objective(&e, &outs, (2, 3)).unwrap();
        let r = broadcast_objective(&m, &e).unwrap();
        assert!((ia.nats() - r.info_a.nats()).abs() < 1e-10 && (ib.nats() - r.info_b.nats()).abs() < 1e-10);
    }

    #[test]
    fn optimizer_finds_classical_copy() {
        let r = optimize_broadcast(&classical(), dims221(), 3, 5).unwrap();
        assert!(r.achieved_delta.bits() <= 0.02, "{}", r.achieved_delta.bits());
    }

    #[test]
    fn optimizer_is_deterministic() {
        let a = optimize_broadcast(&classical(), dims221(), 2, 9).unwrap();
        let b = optimize_broadcast(&classical(), dims221(), 2, 9).unwrap();
        assert_eq!(a.avg.nats(), b.avg.nats());
        assert_eq!(a.trace.iterations, b.trace.iterations);
    }

    #[test]
    fn measure_prepare_examples() {
        let z = [linalg::matrix_unit(2, 2, 0, 0), linalg::matrix_unit(2, 2, 1, 1)];
        assert!((measure_prepare_baseline(&classical(), &z).unwrap().bits() - 1.0).abs() < 1e-12);
        let half = [linalg::identity(2) * c(0.5, 0.0), linalg::identity(2) * c(0.5, 0.0)];
        assert!(measure_prepare_baseline(&equatorial(), &half).unwrap().nats().abs() < 1e-12);
        assert!(measure_prepare_baseline(&classical(), &z[..1]).is_err());
        // σ_x basis on the equator: p(+|φ) = (1 + cos φ)/2
        let plus = PureState::plus().density().into_matrix();
        let minus = linalg::identity(2) - &plus;
        let got = measure_prepare_baseline(&equatorial(), &[plus, minus]).unwrap().bits();
        let h2 = |q: f64| if q <= 0.0 || q >= 1.0 { 0.0 } else { -(q * q.log2() + (1.0 - q) * (1.0 - q).log2()) };
        let oracle = 1.0
            - (0..64).map(|k| h2(0.5 * (1.0 + (2.0 * std::f64::consts::PI * k as f64 / 64.0).cos()))).sum::<f64>() / 64.0;
        assert!((got - oracle).abs() < 1e-12);
    }

    #[test]
    fn probe_flags_lossless_broadcast() {
        let r = broadcast_objective(&BroadcastMap::copy(2).unwrap(), &classical()).unwrap();
        assert!(conjecture_probe(&r).anomaly);
        let r = broadcast_objective(&BroadcastMap::symmetric_cloner().unwrap(), &equatorial()).unwrap();
        assert!(!conjecture_probe(&r).anomaly);
    }
}
