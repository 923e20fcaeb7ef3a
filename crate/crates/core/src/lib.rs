//! Exact simulation of remote-entanglement activation in networks of
//! indistinguishable particles.
//!
//! Amplitudes live in ℚ(√2) ([`Scalar`]); n-particle overlaps are permanents
//! (bosons) or determinants (fermions) of one-particle overlap matrices
//! ([`state`]); post-selection by local particle counting is handled in
//! [`slocc`]; [`protocol`] runs the three network schemes end to end.

pub mod error;
pub mod matrix;
pub mod oracle;
pub mod protocol;
pub mod scalar;
pub mod slocc;
pub mod state;

pub use error::Error;
pub use matrix::ScalarMatrix;
pub use scalar::Scalar;
pub use state::{ManyBodyState, NormalizedState, Spin, Statistics};
