//! Simulation and analysis toolkit for quantum raise-and-peel circuits.
//!
//! Stabilizer states evolve under four-qubit random Clifford gates and
//! pairs of single-qubit `Z` measurements. Which of the two is applied at a
//! randomly chosen site is decided by the local shape of the entanglement
//! height profile `h_i = S_[0,i)`.

pub mod analysis;
pub mod bits;
pub mod clifford;
pub mod engine;
pub mod error;
pub mod pauli;
pub mod rng;
pub mod sampler;
pub mod substrate;
pub mod tableau;

pub use bits::BitMatrix;
pub use clifford::CliffordOperation;
pub use error::{Error, Result};
pub use pauli::{Pauli, PauliString};
pub use rng::{RandomStream, StreamPosition, PRNG_ID};
pub use sampler::{random_clifford, random_stabilizer_state};
pub use substrate::{BlockClass, BlockConvention, HeightProfile, ProtectedLength};
pub use tableau::{MeasurementOutcome, StabilizerTableau};
