//! Compiler, simulator, and verifier for photonic interferometer networks
//! that carry high-dimensional unitaries on the path and orbital angular
//! momentum (OAM) degrees of freedom of a single photon.
//!
//! The pipeline has three compilation stages and one verification stage:
//!
//! 1. [`clements`] decomposes an arbitrary N-dimensional unitary into a
//!    rectangular mesh of two-mode splitting operations plus an output
//!    phase layer.
//! 2. [`hybrid`] maps a 4n-dimensional mesh onto 2n paths that each carry
//!    the OAM pair ±L, fusing pairs of splitting operations into
//!    OAM-dependent beam splitters and realising the odd layers with
//!    swap-conjugated splitters.
//! 3. [`oamnet`] wraps the hybrid unit between cascaded OAM sorters and
//!    spiral phase plates so that a 2^n-dimensional unitary acts on pure
//!    OAM states.
//! 4. [`photosim`] expands any netlist element into its full-space matrix,
//!    multiplies the chain back together, and reports reconstruction error,
//!    fidelity, and element-count law conformance.
//!
//! All matrix values are immutable after construction and every operation
//! is a pure function of its inputs, so concurrent use on distinct data
//! needs no synchronisation.

pub mod error;
pub mod jsonio;
pub mod matcore;

pub mod clements;
pub mod hybrid;
pub mod oamnet;
pub mod photosim;

pub mod diagram;

pub use error::{Error, Result};
