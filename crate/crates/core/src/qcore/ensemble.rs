use super::state::DensityMatrix;
use crate::error::{Error, Result};

const WEIGHT_TOL: f64 = 1e-12;

/// A weighted family of states `{p(x), ρ_x}`.
#[derive(Clone, Debug)]
pub struct StateEnsemble {
    states: Vec<DensityMatrix>,
    weights: Vec<f64>,
}

impl StateEnsemble {
    pub fn new(states: Vec<DensityMatrix>, weights: Vec<f64>) -> Result<Self> {
        if states.is_empty() || states.len() != weights.len() {
            return Err(Error::InvalidArgument(format!("{} states with {} weights", states.len(), weights.len())));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidArgument("negative or NaN weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.dim() });
        }
        Ok(Self { states, weights })
    }

    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let n = states.len();
        Self::new(states, vec![1.0 / n as f64; n])
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.weights.iter().copied().zip(self.states.iter())
    }

    pub fn average(&self) -> DensityMatrix {
        DensityMatrix::mixture(&self.states, &self.weights).expect("states share a dimension")
    }

    /// Apply `f` to every member, keeping the weights.
    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&DensityMatrix) -> Result<DensityMatrix>,
    {
        let states = self.states.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(states, self.weights.clone())
    }
}
