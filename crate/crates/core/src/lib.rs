//! Correlation dynamics of two dipole-dipole coupled, optically driven
//! quantum emitters.
//!
//! The emitter pair evolves under a Markovian master equation with
//! individual and collective spontaneous emission. Along a trajectory the
//! crate tracks the quantum mutual information, classical correlations
//! (optimized over projective measurements on emitter B), quantum discord,
//! concurrence and entanglement of formation.

pub mod correlations;
pub mod couplings;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod scenario;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use state::{DensityMatrix, PureState, ReducedState, Subsystem};
