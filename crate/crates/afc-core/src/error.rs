//! Error type shared across the crate.

use core::fmt;

/// Errors reported by shape construction, quadrature, optimization and the
/// echo solver.
#[derive(Debug, Clone, PartialEq)]
pub enum AfcError {
    /// Shape construction invariants violated.
    InvalidShape(&'static str),
    /// Physical parameters out of range.
    InvalidParams(&'static str),
    /// Adaptive quadrature exhausted its refinement budget.
    QuadratureFailure,
    /// Phase alignment requested for a shape with |F_-1| below noise.
    DegenerateShape,
    /// Argument outside the documented domain.
    DomainError(&'static str),
    /// 1-D maximization could not bracket or refine a maximum.
    OptimizationFailure(&'static str),
    /// Composite shape exceeds the maximum absorption bound.
    BoundViolation,
    /// Requested area is not achievable under the height bound.
    InfeasibleArea,
    /// Monotonicity precondition of the generalized theorem violated.
    MonotonicityViolation(&'static str),
    /// Echo simulation not converged: refining the grid moves |a_1|^2 by
    /// more than the stated tolerance.
    GridTooCoarse { rel_change: f64 },
    /// Echo extraction window clipped by the simulated time span.
    WindowError,
}

impl fmt::Display for AfcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AfcError::InvalidShape(m) => write!(f, "invalid shape: {m}"),
            AfcError::InvalidParams(m) => write!(f, "invalid parameters: {m}"),
            AfcError::QuadratureFailure => write!(f, "adaptive quadrature failed to converge"),
            AfcError::DegenerateShape => {
                write!(f, "phase alignment undefined: |F_-1| below noise floor")
            }
            AfcError::DomainError(m) => write!(f, "domain error: {m}"),
            AfcError::OptimizationFailure(m) => write!(f, "optimization failure: {m}"),
            AfcError::BoundViolation => write!(f, "composite shape exceeds alpha_max"),
            AfcError::InfeasibleArea => write!(f, "target area exceeds alpha_max * period"),
            AfcError::MonotonicityViolation(m) => write!(f, "monotonicity violation: {m}"),
            AfcError::GridTooCoarse { rel_change } => {
                write!(
                    f,
                    "grid too coarse: |a_1|^2 changed by {rel_change:e} on refinement"
                )
            }
            AfcError::WindowError => write!(f, "echo window clipped by simulated time span"),
        }
    }
}

pub type Result<T> = core::result::Result<T, AfcError>;
