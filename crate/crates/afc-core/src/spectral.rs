//! Fourier coefficients `F_0`, `F_-1` of a tooth shape and the
//! phase-alignment translation that makes `F_-1` real.
//!
//! `F_0 = (T / 2 pi) int f(omega) d omega` and
//! `F_-1 = (T / 2 pi) int f(omega) exp(i omega T) d omega`, both over one
//! comb period `[-pi/T, pi/T]`.

use alloc::boxed::Box;
use num_complex::Complex64;

use crate::error::{AfcError, Result};
use crate::shape::{MemoryParams, ToothShape};

pub use crate::quad::quadrature;

/// Internal quadrature tolerance for Fourier integrals; tighter than the
/// documented 1e-10 contract so downstream 1e-9 consistency checks hold.
const FOURIER_RTOL: f64 = 1e-11;
/// Relaxed tolerance when the shape itself is evaluated by quadrature:
/// every integrand sample then costs an inner Simpson pass and carries its
/// discretization noise, so a tighter goal would only burn time.
const FOURIER_RTOL_CONVOLVED: f64 = 1e-6;
/// |F_-1| / F_0 below this is treated as a degenerate (phase-free) shape.
const DEGENERACY_RATIO: f64 = 1e-12;

/// The pair of comb Fourier coefficients driving the efficiency formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierPair {
    /// Mean absorption over the period (1/m); always nonnegative.
    pub f0: f64,
    /// First retrieval coefficient (1/m); complex for asymmetric shapes.
    pub f_minus1: Complex64,
}

/// Compute `F_0` and `F_-1` of `shape` by adaptive quadrature.
pub fn fourier_pair(shape: &ToothShape, params: &MemoryParams) -> Result<FourierPair> {
    let delta = params.delta();
    let t = params.period_t;
    let norm = t / (2.0 * core::f64::consts::PI);
    let tol = if shape.has_convolution() {
        FOURIER_RTOL_CONVOLVED
    } else {
        FOURIER_RTOL
    };

    let f0 = norm * quadrature(|w| shape.evaluate(w, params), -delta, delta, tol)?;
    let re = norm
        * quadrature(
            |w| shape.evaluate(w, params) * libm::cos(w * t),
            -delta,
            delta,
            tol,
        )?;
    let im = norm
        * quadrature(
            |w| shape.evaluate(w, params) * libm::sin(w * t),
            -delta,
            delta,
            tol,
        )?;
    Ok(FourierPair {
        f0,
        f_minus1: Complex64::new(re, im),
    })
}

/// Translate `shape` periodically so its `F_-1` becomes real and
/// nonnegative.
///
/// Returns the aligned shape together with the translation `omega_0 =
/// arg(F_-1) / T`, mapped into `(-pi/T, pi/T]`. `|F_-1|` and `F_0` are
/// invariant under the translation.
pub fn phase_align(shape: &ToothShape, params: &MemoryParams) -> Result<(ToothShape, f64)> {
    let pair = fourier_pair(shape, params)?;
    if pair.f_minus1.norm() <= DEGENERACY_RATIO * pair.f0 {
        return Err(AfcError::DegenerateShape);
    }
    let t = params.period_t;
    let omega0 = wrap_half_open(pair.f_minus1.arg() / t, params);
    // Translating the tooth by -omega_0 multiplies F_-1 by exp(-i omega_0 T),
    // cancelling its phase.
    let aligned = ToothShape::Shifted {
        inner: Box::new(shape.clone()),
        offset: -omega0,
    };
    Ok((aligned, omega0))
}

/// Map an angle-like frequency into `(-pi/T, pi/T]`.
fn wrap_half_open(omega: f64, params: &MemoryParams) -> f64 {
    let period = params.full_period();
    let delta = params.delta();
    let mut x = omega - period * libm::round(omega / period);
    if x <= -delta {
        x += period;
    }
    x
}
