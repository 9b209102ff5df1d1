//! Comb geometry: physical parameters, tooth shapes, and line-shape kernels.
//!
//! A tooth shape is the absorption coefficient over one comb period
//! `[-pi/T, pi/T]`, bounded by `0 <= f(omega) <= alpha_max`. Evaluation is
//! periodic: any detuning is first wrapped into the fundamental period.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{AfcError, Result};
use crate::quad::quadrature;

/// Number of grid points (plus knots) used for bound checks at construction.
const BOUND_CHECK_GRID: usize = 8192;
/// Headroom allowed on the alpha_max bound when checking compositions.
const BOUND_SLACK: f64 = 1e-9;
/// Fixed-order Simpson panels used to evaluate a convolved shape pointwise.
const CONV_SIMPSON_PANELS: usize = 128;

/// Physical constraints of the memory: comb period, sample length, and the
/// absorption budget of the ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryParams {
    /// Storage / rephasing time T (s); the comb frequency period is 2 pi / T.
    pub period_t: f64,
    /// Medium length L (m).
    pub length_l: f64,
    /// Maximum absorption coefficient alpha_M (1/m).
    pub alpha_max: f64,
    /// Constant background absorption alpha_bg (1/m).
    pub alpha_bg: f64,
    /// Homogeneous half-width gamma (rad/s); used only by the echo solver.
    pub gamma: f64,
}

impl MemoryParams {
    pub fn new(
        period_t: f64,
        length_l: f64,
        alpha_max: f64,
        alpha_bg: f64,
        gamma: f64,
    ) -> Result<Self> {
        if !(period_t > 0.0 && period_t.is_finite()) {
            return Err(AfcError::InvalidParams("period_T must be positive"));
        }
        if !(length_l > 0.0 && length_l.is_finite()) {
            return Err(AfcError::InvalidParams("length_L must be positive"));
        }
        if !(alpha_max > 0.0 && alpha_max.is_finite()) {
            return Err(AfcError::InvalidParams("alpha_max must be positive"));
        }
        if !(alpha_bg >= 0.0 && alpha_bg < alpha_max) {
            return Err(AfcError::InvalidParams(
                "alpha_bg must satisfy 0 <= alpha_bg < alpha_max",
            ));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(AfcError::InvalidParams("gamma must be nonnegative"));
        }
        Ok(Self {
            period_t,
            length_l,
            alpha_max,
            alpha_bg,
            gamma,
        })
    }

    /// Optical depth OD = alpha_M * L.
    pub fn od(&self) -> f64 {
        self.alpha_max * self.length_l
    }

    /// Half-period delta = pi / T (rad/s).
    pub fn delta(&self) -> f64 {
        PI / self.period_t
    }

    /// Full comb period 2 pi / T (rad/s).
    pub fn full_period(&self) -> f64 {
        2.0 * PI / self.period_t
    }
}

/// Normalized single-atom line shape used as a convolution kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum LineShapeKernel {
    LorentzianLine {
        fwhm: f64,
    },
    GaussianLine {
        fwhm: f64,
    },
    /// Piecewise-linear kernel on explicit knots `(omega, density)`.
    TabulatedLine {
        knots: Vec<(f64, f64)>,
    },
}

impl LineShapeKernel {
    /// Kernel density at `omega` (zero outside the truncated support).
    pub fn evaluate(&self, omega: f64) -> f64 {
        match self {
            LineShapeKernel::LorentzianLine { fwhm } => {
                let (lo, hi) = self.support();
                if omega < lo || omega > hi {
                    return 0.0;
                }
                let hwhm = 0.5 * fwhm;
                hwhm / (PI * (omega * omega + hwhm * hwhm))
            }
            LineShapeKernel::GaussianLine { fwhm } => {
                let (lo, hi) = self.support();
                if omega < lo || omega > hi {
                    return 0.0;
                }
                let c = 4.0 * core::f64::consts::LN_2;
                libm::sqrt(c / PI) / fwhm * libm::exp(-c * omega * omega / (fwhm * fwhm))
            }
            LineShapeKernel::TabulatedLine { knots } => interp_knots(knots, omega),
        }
    }

    /// Truncated support used for normalization checks and convolution.
    ///
    /// The Lorentzian support is wide because of its heavy tails; the
    /// truncated mass defect is ~ fwhm / (pi * X) ~ 1.6e-4 at X = 2000 fwhm.
    pub fn support(&self) -> (f64, f64) {
        match self {
            LineShapeKernel::LorentzianLine { fwhm } => (-2000.0 * fwhm, 2000.0 * fwhm),
            LineShapeKernel::GaussianLine { fwhm } => (-6.0 * fwhm, 6.0 * fwhm),
            LineShapeKernel::TabulatedLine { knots } => {
                if knots.is_empty() {
                    (0.0, 0.0)
                } else {
                    (knots[0].0, knots[knots.len() - 1].0)
                }
            }
        }
    }

    /// Check normalization and shape invariants; warn when the kernel is
    /// wide relative to the comb period.
    pub fn validate(&self, params: &MemoryParams) -> Result<()> {
        let fwhm = match self {
            LineShapeKernel::LorentzianLine { fwhm } | LineShapeKernel::GaussianLine { fwhm } => {
                if !(*fwhm > 0.0 && fwhm.is_finite()) {
                    return Err(AfcError::InvalidShape("kernel fwhm must be positive"));
                }
                *fwhm
            }
            LineShapeKernel::TabulatedLine { knots } => {
                check_knot_layout(knots, None)?;
                if knots.iter().any(|&(_, v)| v < 0.0) {
                    return Err(AfcError::InvalidShape(
                        "kernel knot values must be nonnegative",
                    ));
                }
                knots[knots.len() - 1].0 - knots[0].0
            }
        };
        if fwhm > 0.2 * params.full_period() {
            log::warn!(
                "line-shape kernel fwhm = {fwhm:e} rad/s exceeds 0.2 * comb period; \
                 the narrow-line approximations degrade"
            );
        }
        // Normalization tolerance is looser for the Lorentzian whose
        // truncated tails carry O(1e-4) mass.
        let tol = match self {
            LineShapeKernel::LorentzianLine { .. } => 1e-3,
            _ => 1e-6,
        };
        let (lo, hi) = self.support();
        let mass = quadrature(|w| self.evaluate(w), lo, hi, 1e-9)?;
        if libm::fabs(mass - 1.0) > tol {
            return Err(AfcError::InvalidShape(
                "kernel is not normalized over its support",
            ));
        }
        Ok(())
    }
}

/// A bounded nonnegative absorption profile on one comb period.
///
/// `Shifted { inner, offset }` translates the inner tooth by `offset`
/// (features at `omega` move to `omega + offset`) with periodic wraparound.
#[derive(Debug, Clone, PartialEq)]
pub enum ToothShape {
    /// Full-height tooth of half-width Gamma centered at omega = 0.
    Square {
        half_width: f64,
    },
    /// `alpha_M Gamma^2 / (Gamma^2 + 4 omega^2)`, truncated to one period.
    Lorentzian {
        fwhm: f64,
    },
    /// `alpha_M exp(-4 ln2 omega^2 / Gamma^2)`, truncated to one period.
    Gaussian {
        fwhm: f64,
    },
    /// Piecewise-linear on explicit knots spanning exactly one period.
    Tabulated {
        knots: Vec<(f64, f64)>,
    },
    Shifted {
        inner: Box<ToothShape>,
        offset: f64,
    },
    WithBackground {
        inner: Box<ToothShape>,
        alpha_bg: f64,
    },
    Convolved {
        inner: Box<ToothShape>,
        kernel: LineShapeKernel,
    },
}

impl ToothShape {
    /// Validating constructor for tabulated shapes.
    pub fn tabulated(knots: Vec<(f64, f64)>, params: &MemoryParams) -> Result<Self> {
        let shape = ToothShape::Tabulated { knots };
        shape.validate(params)?;
        Ok(shape)
    }

    /// Check all construction invariants against the given parameters.
    pub fn validate(&self, params: &MemoryParams) -> Result<()> {
        let delta = params.delta();
        match self {
            ToothShape::Square { half_width } => {
                if !(*half_width >= 0.0 && *half_width <= delta * (1.0 + 1e-12)) {
                    return Err(AfcError::InvalidShape(
                        "square half-width outside [0, pi/T]",
                    ));
                }
            }
            ToothShape::Lorentzian { fwhm } | ToothShape::Gaussian { fwhm } => {
                if !(*fwhm > 0.0 && fwhm.is_finite()) {
                    return Err(AfcError::InvalidShape("fwhm must be positive"));
                }
            }
            ToothShape::Tabulated { knots } => {
                check_knot_layout(knots, Some(delta))?;
                self.check_bound(params)?;
            }
            ToothShape::Shifted { inner, offset } => {
                if !offset.is_finite() {
                    return Err(AfcError::InvalidShape("shift offset must be finite"));
                }
                inner.validate(params)?;
            }
            ToothShape::WithBackground { inner, alpha_bg } => {
                if !(*alpha_bg >= 0.0 && alpha_bg.is_finite()) {
                    return Err(AfcError::InvalidShape("background must be nonnegative"));
                }
                inner.validate(params)?;
                self.check_bound(params)?;
            }
            ToothShape::Convolved { inner, kernel } => {
                inner.validate(params)?;
                kernel.validate(params)?;
                // Convolution with a nonnegative kernel of mass <= 1 cannot
                // exceed the bound of the inner shape; no dense scan needed.
            }
        }
        Ok(())
    }

    fn check_bound(&self, params: &MemoryParams) -> Result<()> {
        let delta = params.delta();
        let limit = params.alpha_max * (1.0 + BOUND_SLACK);
        let n = BOUND_CHECK_GRID;
        for i in 0..=n {
            let w = -delta + 2.0 * delta * (i as f64) / (n as f64);
            let v = self.evaluate(w, params);
            if !(v >= -1e-12 * params.alpha_max && v <= limit) {
                return Err(AfcError::InvalidShape(
                    "shape leaves [0, alpha_max] on dense grid",
                ));
            }
        }
        for &(w, _) in self.own_knots() {
            let v = self.evaluate(w, params);
            if !(v >= -1e-12 * params.alpha_max && v <= limit) {
                return Err(AfcError::InvalidShape(
                    "shape leaves [0, alpha_max] at a knot",
                ));
            }
        }
        Ok(())
    }

    fn own_knots(&self) -> &[(f64, f64)] {
        match self {
            ToothShape::Tabulated { knots } => knots,
            ToothShape::Shifted { inner, .. }
            | ToothShape::WithBackground { inner, .. }
            | ToothShape::Convolved { inner, .. } => inner.own_knots(),
            _ => &[],
        }
    }

    /// Whether the shape contains a convolution layer (evaluation is then a
    /// quadrature itself, so outer tolerances are relaxed).
    pub fn has_convolution(&self) -> bool {
        match self {
            ToothShape::Convolved { .. } => true,
            ToothShape::Shifted { inner, .. } | ToothShape::WithBackground { inner, .. } => {
                inner.has_convolution()
            }
            _ => false,
        }
    }

    /// Absorption at detuning `omega`, wrapped periodically into
    /// `[-pi/T, pi/T]`.
    pub fn evaluate(&self, omega: f64, params: &MemoryParams) -> f64 {
        let period = params.full_period();
        let x = omega - period * libm::round(omega / period);
        match self {
            ToothShape::Square { half_width } => {
                if libm::fabs(x) <= *half_width {
                    params.alpha_max
                } else {
                    0.0
                }
            }
            ToothShape::Lorentzian { fwhm } => {
                let g2 = fwhm * fwhm;
                params.alpha_max * g2 / (g2 + 4.0 * x * x)
            }
            ToothShape::Gaussian { fwhm } => {
                let c = 4.0 * core::f64::consts::LN_2;
                params.alpha_max * libm::exp(-c * x * x / (fwhm * fwhm))
            }
            ToothShape::Tabulated { knots } => interp_knots(knots, x),
            ToothShape::Shifted { inner, offset } => inner.evaluate(x - offset, params),
            ToothShape::WithBackground { inner, alpha_bg } => inner.evaluate(x, params) + alpha_bg,
            ToothShape::Convolved { inner, kernel } => {
                // Circular convolution: inner evaluation wraps, so the
                // kernel sees the periodically extended comb. The kernel
                // support is clamped to +-2 periods around the point.
                let (lo, hi) = kernel.support();
                let lo = lo.max(-2.0 * period);
                let hi = hi.min(2.0 * period);
                simpson(
                    |nu| kernel.evaluate(nu) * inner.evaluate(x - nu, params),
                    lo,
                    hi,
                )
            }
        }
    }

    /// Quadrature of the shape over one full period (relative tolerance
    /// 1e-10).
    pub fn area(&self, params: &MemoryParams) -> Result<f64> {
        let delta = params.delta();
        let tol = if self.has_convolution() { 1e-8 } else { 1e-10 };
        quadrature(|w| self.evaluate(w, params), -delta, delta, tol)
    }
}

/// Fixed-order composite Simpson rule; deterministic cost, used only for
/// the smooth pointwise convolution integral inside `evaluate`.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let n = 2 * CONV_SIMPSON_PANELS;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

fn interp_knots(knots: &[(f64, f64)], x: f64) -> f64 {
    if knots.is_empty() {
        return 0.0;
    }
    if x <= knots[0].0 {
        return knots[0].1;
    }
    if x >= knots[knots.len() - 1].0 {
        return knots[knots.len() - 1].1;
    }
    let idx = knots.partition_point(|&(w, _)| w <= x);
    let (w0, v0) = knots[idx - 1];
    let (w1, v1) = knots[idx];
    if w1 == w0 {
        return v1;
    }
    v0 + (v1 - v0) * (x - w0) / (w1 - w0)
}

fn check_knot_layout(knots: &[(f64, f64)], period_delta: Option<f64>) -> Result<()> {
    if knots.len() < 2 {
        return Err(AfcError::InvalidShape("at least two knots required"));
    }
    for pair in knots.windows(2) {
        if !(pair[1].0 > pair[0].0) {
            return Err(AfcError::InvalidShape(
                "knot abscissae must be strictly increasing",
            ));
        }
    }
    if knots.iter().any(|&(w, v)| !w.is_finite() || !v.is_finite()) {
        return Err(AfcError::InvalidShape("knots must be finite"));
    }
    if let Some(delta) = period_delta {
        let eps = 1e-9 * delta;
        if libm::fabs(knots[0].0 + delta) > eps
            || libm::fabs(knots[knots.len() - 1].0 - delta) > eps
        {
            return Err(AfcError::InvalidShape(
                "tabulated knots must span [-pi/T, pi/T]",
            ));
        }
        if libm::fabs(knots[0].1 - knots[knots.len() - 1].1) > 1e-9 * (1.0 + libm::fabs(knots[0].1))
        {
            return Err(AfcError::InvalidShape(
                "periodic endpoints must carry equal values",
            ));
        }
    }
    Ok(())
}
