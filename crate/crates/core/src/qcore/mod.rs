//! States, Hamiltonians, channels and their composition.

pub mod channel;
pub mod ensemble;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod random;
pub mod state;

pub use channel::{apply_channel, KrausChannel};
pub use ensemble::StateEnsemble;
pub use hamiltonian::{dephase, evolve, HamiltonianSpec};
pub use state::{partial_trace, DensityMatrix, Keep, PureState};

/// Composition of two systems: Kronecker product for states, Kronecker sum
/// for Hamiltonians.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        DensityMatrix::tensor(self, other)
    }
}

impl Tensor for PureState {
    fn tensor(&self, other: &Self) -> Self {
        PureState::tensor(self, other)
    }
}

impl Tensor for HamiltonianSpec {
    fn tensor(&self, other: &Self) -> Self {
        HamiltonianSpec::tensor(self, other)
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}
