//! Timing information of quantum states under Hamiltonian dynamics.
//!
//! The crate computes how much information about an absolute time frame a
//! state carries, how that information splits when a bipartite state is
//! handed to two parties, how time-covariant channels can be dilated into
//! energy-conserving unitaries, and what this implies for free-energy loss
//! in passive devices.
//!
//! Modules:
//!
//! * [`qcore`]: states, Hamiltonians, channels, random instances.
//! * [`infomeasures`]: von Neumann/Shannon entropies, Holevo and timing information.
//! * [`energydist`]: joint energy tables, convolutions, moments.
//! * [`bounds`]: lower bounds on the information deficit and a Monte-Carlo harness.
//! * [`covariant`]: covariance checks, energy-shift Kraus forms, unitary extensions.
//! * [`thermo`]: free energy, passivity, free-energy loss bounds.
//! * [`broadcastopt`]: numerical search over broadcasting isometries.
//! * [`cli`]: the `qtiming` command-line front end.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod broadcastopt;
pub mod cli;
pub mod covariant;
pub mod energydist;
pub mod error;
pub mod infomeasures;
pub mod qcore;
pub mod thermo;

pub use error::{Error, Result};
