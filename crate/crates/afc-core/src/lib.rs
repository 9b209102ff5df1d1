//! Retrieval-efficiency theory for atomic-frequency-comb (AFC) quantum memories.
//!
//! The crate evaluates the forward retrieval efficiency
//! `eta = |F_{-1} L|^2 exp(-F_0 L)` for arbitrary bounded tooth shapes,
//! optimizes tooth widths under an optical-depth constraint, numerically
//! falsification-tests the square-tooth optimality theorems, and
//! cross-validates the analytic efficiency against a frequency-domain
//! Maxwell-Bloch echo simulation.
//!
//! The crate is `no_std` (with `alloc`); all IO and the CLI live in the
//! companion `afc-cli` crate.

#![cfg_attr(not(test), no_std)]
// Quadrature node tables keep the full published digits, and guard clauses
// use negated comparisons on purpose so NaN inputs fall into the error arm.
#![allow(clippy::excessive_precision)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod efficiency;
pub mod error;
pub mod mbsolver;
pub mod opt;
pub mod optimality;
pub mod shape;
pub mod spectral;

mod quad;

pub use error::{AfcError, Result};
pub use shape::{LineShapeKernel, MemoryParams, ToothShape};
pub use spectral::{fourier_pair, phase_align, quadrature, FourierPair};
