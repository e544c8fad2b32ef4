//! Energy transfers between generalized colored partitions.
//!
//! A 0/1 minimal-energy matrix over a finite set of states defines two
//! families of colored partitions: sequences of primary particles related by
//! `k - k' >= ε(c, c')` (the O-side), and sequences of primary and secondary
//! particles under a difference-condition relation (the E-side). The
//! [`transfer`] module implements the bijection between the two, built from
//! an involutive energy transfer on adjacent primary/secondary pairs.
//!
//! - [`energy`]: states, minimal-energy matrices, transfer energies
//! - [`particle`]: primary and secondary particles and their relations
//! - [`partition`]: validation, bounded enumeration, difference matrices
//! - [`transfer`]: the maps Φ and Ψ, position tracking and crossing predictors
//! - [`series`]: truncated multivariate power series with exact coefficients
//! - [`identities`]: generating-function checks and the mod-16 partition theorems
//! - [`verify`]: bijection sweeps and structural checks shared by the CLI and tests

pub mod energy;
pub mod error;
pub mod identities;
pub mod par;
pub mod particle;
pub mod partition;
pub mod series;
pub mod transfer;
pub mod verify;

pub use energy::{ColorWord, MinimalEnergy, State, StateSet};
pub use error::{Error, Result};
pub use par::Execution;
pub use particle::{Particle, Primary, Relation, Secondary};
pub use partition::{BoundSpec, ColoredPartition, Flavor};
pub use series::TruncatedSeries;
