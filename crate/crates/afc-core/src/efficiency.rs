//! Retrieval-efficiency functional, closed-form shape efficiencies, width
//! optimization, and the background / linewidth corrections.
//!
//! Everything here reduces to `eta = |F_{-1} L|^2 exp(-F_0 L)` evaluated
//! either dimensionally (through `fourier_pair`) or in the dimensionless
//! `(p, OD)` coordinates of the square / Lorentzian / Gaussian families.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{AfcError, Result};
use crate::opt::maximize_scalar;
use crate::quad::quadrature;
use crate::shape::{LineShapeKernel, MemoryParams, ToothShape};
use crate::spectral::{fourier_pair, FourierPair};

/// Forward-retrieval efficiency bound, 4 / e^2.
pub const ETA_MAX_FORWARD: f64 = 0.541_341_132_946_450_8;

/// Optional multiplicative breakdown of a corrected efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyComponents {
    /// Efficiency of the bare (above-background, unconvolved) shape.
    pub eta_ideal: f64,
    /// `exp(-alpha_bg * L)` loss from constant background absorption.
    pub background_factor: f64,
    /// `|FT of line shape|^2` loss from finite optical linewidth.
    pub linewidth_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyResult {
    pub eta: f64,
    pub fourier: FourierPair,
    pub components: Option<EfficiencyComponents>,
}

/// The three closed-form tooth families compared in the figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToothFamily {
    Square,
    Lorentzian,
    Gaussian,
}

/// `eta = |F_-1 L|^2 exp(-F_0 L)` from the Fourier pair of `shape`.
pub fn efficiency(shape: &ToothShape, params: &MemoryParams) -> Result<EfficiencyResult> {
    let pair = fourier_pair(shape, params)?;
    Ok(EfficiencyResult {
        eta: efficiency_from_pair(&pair, params.length_l),
        fourier: pair,
        components: None,
    })
}

/// The efficiency functional applied to precomputed coefficients.
pub fn efficiency_from_pair(pair: &FourierPair, length: f64) -> f64 {
    let amp = pair.f_minus1.norm() * length;
    amp * amp * libm::exp(-pair.f0 * length)
}

/// Closed-form square-tooth efficiency, `p` the dimensionless half-width
/// `Gamma T` in `[0, 2 pi]`.
pub fn eta_square(p: f64, od: f64) -> Result<f64> {
    if !(0.0..=2.0 * PI).contains(&p) {
        return Err(AfcError::DomainError("eta_square requires p in [0, 2 pi]"));
    }
    if !(od >= 0.0) {
        return Err(AfcError::DomainError("eta_square requires od >= 0"));
    }
    let s = libm::sin(p);
    Ok(od * od * s * s / (PI * PI) * libm::exp(-p * od / PI))
}

/// Dimensionless inner integrals `(A, B)` with
/// `A = (1/2pi) int_{-pi}^{pi} fbar(t) cos(t) dt` and
/// `B = (1/2pi) int_{-pi}^{pi} fbar(t) dt`, for a unit-height tooth of
/// dimensionless FWHM `p`; then `eta = (OD A)^2 exp(-OD B)`.
fn lg_integrals(family: ToothFamily, p: f64) -> Result<(f64, f64)> {
    let profile = move |t: f64| -> f64 {
        match family {
            ToothFamily::Lorentzian => p * p / (p * p + 4.0 * t * t),
            ToothFamily::Gaussian => libm::exp(-4.0 * core::f64::consts::LN_2 * t * t / (p * p)),
            ToothFamily::Square => {
                if libm::fabs(t) <= p {
                    1.0
                } else {
                    0.0
                }
            }
        }
    };
    let norm = 1.0 / (2.0 * PI);
    let a = norm * quadrature(|t| profile(t) * libm::cos(t), -PI, PI, 1e-10)?;
    let b = norm * quadrature(profile, -PI, PI, 1e-10)?;
    Ok((a, b))
}

/// Lorentzian-tooth efficiency at dimensionless FWHM `p` and optical depth
/// `od`; quadrature at relative tolerance 1e-10.
pub fn eta_lorentzian(p: f64, od: f64) -> Result<f64> {
    eta_family_quadrature(ToothFamily::Lorentzian, p, od)
}

/// Gaussian-tooth efficiency at dimensionless FWHM `p` and optical depth
/// `od`.
pub fn eta_gaussian(p: f64, od: f64) -> Result<f64> {
    eta_family_quadrature(ToothFamily::Gaussian, p, od)
}

fn eta_family_quadrature(family: ToothFamily, p: f64, od: f64) -> Result<f64> {
    if !(0.0..=2.0 * PI).contains(&p) {
        return Err(AfcError::DomainError("p must lie in [0, 2 pi]"));
    }
    if !(od >= 0.0) {
        return Err(AfcError::DomainError("od must be nonnegative"));
    }
    if p == 0.0 || od == 0.0 {
        // Limits: zero-width tooth or zero optical depth absorb nothing.
        return Ok(0.0);
    }
    let (a, b) = lg_integrals(family, p)?;
    Ok(od * od * a * a * libm::exp(-od * b))
}

/// Optimal square half-width `p_opt = arctan(2 pi / OD)`; `pi/2` at OD = 0
/// by continuity.
pub fn optimal_square_width(od: f64) -> Result<f64> {
    if !(od >= 0.0) {
        return Err(AfcError::DomainError("od must be nonnegative"));
    }
    if od == 0.0 {
        return Ok(PI / 2.0);
    }
    Ok(libm::atan(2.0 * PI / od))
}

/// `eta_{S,opt}(OD) = 4 exp(-(OD/pi) arctan(2 pi / OD)) / (1 + 4 pi^2 / OD^2)`.
pub fn optimal_square_efficiency(od: f64) -> Result<f64> {
    if !(od > 0.0) {
        return Err(AfcError::DomainError("od must be positive"));
    }
    let num = 4.0 * libm::exp(-(od / PI) * libm::atan(2.0 * PI / od));
    Ok(num / (1.0 + 4.0 * PI * PI / (od * od)))
}

/// Maximize the family efficiency over `p in (0, 2 pi]` at fixed `od`.
///
/// Returns `(p_opt, eta_opt)`; `p` resolved to about 1e-9.
pub fn optimize_width(family: ToothFamily, od: f64) -> Result<(f64, f64)> {
    if !(od > 0.0) {
        return Err(AfcError::DomainError("od must be positive"));
    }
    let f = |p: f64| -> Result<f64> {
        match family {
            ToothFamily::Square => eta_square(p, od),
            ToothFamily::Lorentzian => eta_lorentzian(p, od),
            ToothFamily::Gaussian => eta_gaussian(p, od),
        }
    };
    maximize_scalar(f, 0.0, 2.0 * PI, 64, 1e-9)
}

/// Efficiency of `shape_abg` (the above-background tooth) sitting on the
/// constant background `params.alpha_bg`.
///
/// Over a full period the background contributes `F_{bg,-1} = 0` and
/// `F_{bg,0} = alpha_bg`, so the composite efficiency factorizes into
/// `eta_ideal * exp(-alpha_bg * L)`.
pub fn efficiency_with_background(
    shape_abg: &ToothShape,
    params: &MemoryParams,
) -> Result<EfficiencyResult> {
    let peak = dense_max(shape_abg, params);
    if peak + params.alpha_bg > params.alpha_max * (1.0 + 1e-9) {
        return Err(AfcError::BoundViolation);
    }
    let ideal = efficiency(shape_abg, params)?;
    let background_factor = libm::exp(-params.alpha_bg * params.length_l);
    let pair = FourierPair {
        f0: ideal.fourier.f0 + params.alpha_bg,
        f_minus1: ideal.fourier.f_minus1,
    };
    Ok(EfficiencyResult {
        eta: ideal.eta * background_factor,
        fourier: pair,
        components: Some(EfficiencyComponents {
            eta_ideal: ideal.eta,
            background_factor,
            linewidth_factor: 1.0,
        }),
    })
}

fn dense_max(shape: &ToothShape, params: &MemoryParams) -> f64 {
    let delta = params.delta();
    let n = 8192usize;
    let mut peak = f64::NEG_INFINITY;
    for i in 0..=n {
        let w = -delta + 2.0 * delta * (i as f64) / (n as f64);
        peak = peak.max(shape.evaluate(w, params));
    }
    peak
}

/// `|int L(omega) exp(i omega T) d omega|^2` over the kernel support.
pub fn linewidth_scale_factor(kernel: &LineShapeKernel, params: &MemoryParams) -> Result<f64> {
    kernel.validate(params)?;
    let (lo, hi) = kernel.support();
    if !(hi > lo) {
        return Ok(1.0);
    }
    let t = params.period_t;
    let mut re = quadrature(|w| kernel.evaluate(w) * libm::cos(w * t), lo, hi, 1e-9)?;
    let im = quadrature(|w| kernel.evaluate(w) * libm::sin(w * t), lo, hi, 1e-9)?;
    // The truncated Lorentzian tails still contribute O(1e-6) to the
    // oscillatory integral; complete both sides with the leading
    // asymptotic term int_X^inf cos(w t) / w^2 dw ~ -sin(X t) / (t X^2).
    if let LineShapeKernel::LorentzianLine { fwhm } = kernel {
        re -= (fwhm / PI) * libm::sin(hi * t) / (t * hi * hi);
    }
    let f = re * re + im * im;
    Ok(f.min(1.0))
}

/// How a finite linewidth correction is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionMode {
    /// Convolve the shape and run the full efficiency functional.
    Exact,
    /// Multiply the ideal efficiency by the line-shape scale factor.
    ScaleFactor,
}

/// Efficiency of `shape` observed through the optical line `kernel`.
pub fn efficiency_convolved(
    shape: &ToothShape,
    kernel: &LineShapeKernel,
    params: &MemoryParams,
    mode: ConvolutionMode,
) -> Result<EfficiencyResult> {
    match mode {
        ConvolutionMode::Exact => {
            let conv = ToothShape::Convolved {
                inner: Box::new(shape.clone()),
                kernel: kernel.clone(),
            };
            conv.validate(params)?;
            efficiency(&conv, params)
        }
        ConvolutionMode::ScaleFactor => {
            let factor = linewidth_scale_factor(kernel, params)?;
            let ideal = efficiency(shape, params)?;
            Ok(EfficiencyResult {
                eta: ideal.eta * factor,
                fourier: ideal.fourier,
                components: Some(EfficiencyComponents {
                    eta_ideal: ideal.eta,
                    background_factor: 1.0,
                    linewidth_factor: factor,
                }),
            })
        }
    }
}

/// What an efficiency / difference map holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    EtaSquare,
    EtaLorentzian,
    EtaGaussian,
    /// `eta_S(p, OD) - max_p' eta_L(p', OD)`.
    DiffAbsL,
    DiffAbsG,
    /// Same, relative to the Lorentzian / Gaussian optimum.
    DiffRelL,
    DiffRelG,
}

impl MapKind {
    pub fn is_eta(self) -> bool {
        matches!(
            self,
            MapKind::EtaSquare | MapKind::EtaLorentzian | MapKind::EtaGaussian
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            MapKind::EtaSquare => "eta_square",
            MapKind::EtaLorentzian => "eta_lorentzian",
            MapKind::EtaGaussian => "eta_gaussian",
            MapKind::DiffAbsL => "diff_abs_lorentzian",
            MapKind::DiffAbsG => "diff_abs_gaussian",
            MapKind::DiffRelL => "diff_rel_lorentzian",
            MapKind::DiffRelG => "diff_rel_gaussian",
        }
    }
}

/// Rectangular grid of efficiency (or difference) values over `(p, OD)`.
///
/// Values are row-major over the OD axis: `values[i_od * n_p + i_p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyMap {
    pub kind: MapKind,
    pub p_axis: Vec<f64>,
    pub od_axis: Vec<f64>,
    pub values: Vec<f64>,
}

impl EfficiencyMap {
    pub fn get(&self, i_od: usize, i_p: usize) -> f64 {
        self.values[i_od * self.p_axis.len() + i_p]
    }
}

fn check_axes(p_axis: &[f64], od_axis: &[f64]) -> Result<()> {
    if p_axis.len() < 2 || od_axis.len() < 2 {
        return Err(AfcError::DomainError("map axes need at least two points"));
    }
    for w in p_axis.windows(2) {
        if !(w[1] > w[0]) {
            return Err(AfcError::DomainError("p axis must be strictly increasing"));
        }
    }
    for w in od_axis.windows(2) {
        if !(w[1] > w[0]) {
            return Err(AfcError::DomainError("od axis must be strictly increasing"));
        }
    }
    if p_axis[0] < 0.0 || p_axis[p_axis.len() - 1] > 2.0 * PI + 1e-12 {
        return Err(AfcError::DomainError("p axis must lie in [0, 2 pi]"));
    }
    if od_axis[0] < 0.0 {
        return Err(AfcError::DomainError("od axis must be nonnegative"));
    }
    Ok(())
}

/// Evaluate one map over the grid. Lorentzian / Gaussian inner integrals
/// are computed once per `p` column; difference maps compute the inner
/// per-OD maximum once per OD row.
pub fn build_map(kind: MapKind, p_axis: &[f64], od_axis: &[f64]) -> Result<EfficiencyMap> {
    check_axes(p_axis, od_axis)?;
    let n_p = p_axis.len();
    let n_od = od_axis.len();
    let mut values = alloc::vec![0.0f64; n_p * n_od];

    match kind {
        MapKind::EtaSquare => {
            for (i, &od) in od_axis.iter().enumerate() {
                for (j, &p) in p_axis.iter().enumerate() {
                    values[i * n_p + j] = eta_square(p, od)?;
                }
            }
        }
        MapKind::EtaLorentzian | MapKind::EtaGaussian => {
            let family = if kind == MapKind::EtaLorentzian {
                ToothFamily::Lorentzian
            } else {
                ToothFamily::Gaussian
            };
            let mut ab = Vec::with_capacity(n_p);
            for &p in p_axis {
                ab.push(if p == 0.0 {
                    (0.0, 0.0)
                } else {
                    lg_integrals(family, p)?
                });
            }
            for (i, &od) in od_axis.iter().enumerate() {
                for (j, &(a, b)) in ab.iter().enumerate() {
                    values[i * n_p + j] = od * od * a * a * libm::exp(-od * b);
                }
            }
        }
        MapKind::DiffAbsL | MapKind::DiffRelL | MapKind::DiffAbsG | MapKind::DiffRelG => {
            let family = match kind {
                MapKind::DiffAbsL | MapKind::DiffRelL => ToothFamily::Lorentzian,
                _ => ToothFamily::Gaussian,
            };
            let relative = matches!(kind, MapKind::DiffRelL | MapKind::DiffRelG);
            for (i, &od) in od_axis.iter().enumerate() {
                let best = if od == 0.0 {
                    0.0
                } else {
                    optimize_width(family, od)?.1
                };
                for (j, &p) in p_axis.iter().enumerate() {
                    let d = eta_square(p, od)? - best;
                    values[i * n_p + j] = if relative {
                        if best > 0.0 {
                            d / best
                        } else {
                            0.0
                        }
                    } else {
                        d
                    };
                }
            }
        }
    }

    Ok(EfficiencyMap {
        kind,
        p_axis: p_axis.to_vec(),
        od_axis: od_axis.to_vec(),
        values,
    })
}

/// The four comparison maps of the robustness figure, sharing one inner
/// maximization per OD row.
pub fn difference_maps(p_axis: &[f64], od_axis: &[f64]) -> Result<[EfficiencyMap; 4]> {
    check_axes(p_axis, od_axis)?;
    let n_p = p_axis.len();
    let n_od = od_axis.len();
    let mut abs_l = alloc::vec![0.0f64; n_p * n_od];
    let mut abs_g = alloc::vec![0.0f64; n_p * n_od];
    let mut rel_l = alloc::vec![0.0f64; n_p * n_od];
    let mut rel_g = alloc::vec![0.0f64; n_p * n_od];

    for (i, &od) in od_axis.iter().enumerate() {
        let best_l = if od == 0.0 {
            0.0
        } else {
            optimize_width(ToothFamily::Lorentzian, od)?.1
        };
        let best_g = if od == 0.0 {
            0.0
        } else {
            optimize_width(ToothFamily::Gaussian, od)?.1
        };
        for (j, &p) in p_axis.iter().enumerate() {
            let s = eta_square(p, od)?;
            abs_l[i * n_p + j] = s - best_l;
            abs_g[i * n_p + j] = s - best_g;
            rel_l[i * n_p + j] = if best_l > 0.0 {
                (s - best_l) / best_l
            } else {
                0.0
            };
            rel_g[i * n_p + j] = if best_g > 0.0 {
                (s - best_g) / best_g
            } else {
                0.0
            };
        }
    }

    let mk = |kind, values| EfficiencyMap {
        kind,
        p_axis: p_axis.to_vec(),
        od_axis: od_axis.to_vec(),
        values,
    };
    Ok([
        mk(MapKind::DiffAbsL, abs_l),
        mk(MapKind::DiffAbsG, abs_g),
        mk(MapKind::DiffRelL, rel_l),
        mk(MapKind::DiffRelG, rel_g),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_od(od: f64) -> MemoryParams {
        MemoryParams::new(1.0, 1.0, od, 0.0, 0.0).unwrap()
    }

    #[test]
    fn eta_square_trivial_zeros() {
        assert_eq!(eta_square(0.0, 7.0).unwrap(), 0.0);
        assert!(eta_square(PI, 7.0).unwrap() < 1e-30);
    }

    #[test]
    fn eta_square_spot_value() {
        // p = pi/2, od = pi -> exp(-pi/2)
        let v = eta_square(PI / 2.0, PI).unwrap();
        let expected = libm::exp(-PI / 2.0);
        assert!((v - expected).abs() < 1e-14);
    }

    #[test]
    fn eta_square_matches_dimensional_square() {
        let p = 0.561;
        let od = 10.0;
        let mp = params_od(od);
        let shape = ToothShape::Square {
            half_width: p / mp.period_t,
        };
        let eta = efficiency(&shape, &mp).unwrap().eta;
        let closed = eta_square(p, od).unwrap();
        assert!((eta - closed).abs() < 1e-9 * closed);
    }

    #[test]
    fn lorentzian_quadrature_matches_dimensional() {
        let p = 1.3;
        let od = 10.0;
        let mp = params_od(od);
        let shape = ToothShape::Lorentzian {
            fwhm: p / mp.period_t,
        };
        let eta = efficiency(&shape, &mp).unwrap().eta;
        let dimless = eta_lorentzian(p, od).unwrap();
        assert!((eta - dimless).abs() < 1e-8 * dimless.max(1e-6));
    }

    #[test]
    fn zero_length_and_flat_shape_give_zero() {
        let mp = MemoryParams::new(1.0, 1e-300, 10.0, 0.0, 0.0).unwrap();
        let s = ToothShape::Square { half_width: 0.5 };
        assert!(efficiency(&s, &mp).unwrap().eta < 1e-30);
        let mp = params_od(4.0);
        let flat = ToothShape::Square {
            half_width: mp.delta(),
        };
        assert!(efficiency(&flat, &mp).unwrap().eta < 1e-18);
    }

    #[test]
    fn optimal_width_values() {
        assert!((optimal_square_width(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((optimal_square_width(2.0 * PI).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((optimal_square_width(10.0).unwrap() - libm::atan(0.2 * PI)).abs() < 1e-15);
        assert!((optimal_square_width(10.0).unwrap() - 0.560_982_116_108_623_8).abs() < 1e-12);
    }

    #[test]
    fn optimal_square_efficiency_values() {
        let v = optimal_square_efficiency(10.0).unwrap();
        assert!((v - 0.480_894_741_738_825_4).abs() < 1e-12);
        assert!((v - 0.481).abs() < 1e-3);
        assert!(optimal_square_efficiency(0.0).is_err());
        let near_limit = optimal_square_efficiency(1e6).unwrap();
        assert!((near_limit - ETA_MAX_FORWARD).abs() < 1e-5);
    }

    #[test]
    fn optimize_width_square_matches_closed_form() {
        let od = 10.0;
        let (p_opt, eta_opt) = optimize_width(ToothFamily::Square, od).unwrap();
        assert!((p_opt - optimal_square_width(od).unwrap()).abs() < 1e-7);
        assert!((eta_opt - optimal_square_efficiency(od).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn lorentzian_optimum_below_square_optimum() {
        let od = 10.0;
        let (_, eta_l) = optimize_width(ToothFamily::Lorentzian, od).unwrap();
        assert!(eta_l < optimal_square_efficiency(od).unwrap());
        assert!(eta_l > 0.0);
    }

    #[test]
    fn background_factorizes() {
        let mp = MemoryParams::new(1.0, 1.0, 10.0, 1.0, 0.0).unwrap();
        // Above-background tooth must leave headroom for alpha_bg.
        let d = mp.delta();
        let shape = ToothShape::tabulated(
            vec![
                (-d, 0.0),
                (-0.7, 0.0),
                (-0.56, 9.0),
                (0.56, 9.0),
                (0.7, 0.0),
                (d, 0.0),
            ],
            &mp,
        )
        .unwrap();
        let res = efficiency_with_background(&shape, &mp).unwrap();
        let ideal = efficiency(&shape, &mp).unwrap().eta;
        assert!((res.eta - ideal * libm::exp(-1.0)).abs() < 1e-12);
        let c = res.components.unwrap();
        assert!((c.background_factor - libm::exp(-1.0)).abs() < 1e-15);
    }

    #[test]
    fn background_bound_violation() {
        let mp = MemoryParams::new(1.0, 1.0, 10.0, 1.0, 0.0).unwrap();
        // Full-height tooth leaves no room for the background.
        let shape = ToothShape::Square { half_width: 0.5 };
        // evaluate() peaks at alpha_max = 10, +1 background -> violation
        assert_eq!(
            efficiency_with_background(&shape, &mp),
            Err(AfcError::BoundViolation)
        );
    }

    #[test]
    fn linewidth_factors_match_closed_forms() {
        let mp = params_od(10.0);
        let g = 0.05 * mp.full_period();
        let lor =
            linewidth_scale_factor(&LineShapeKernel::LorentzianLine { fwhm: g }, &mp).unwrap();
        assert!((lor - libm::exp(-g * mp.period_t)).abs() < 1e-6);
        let gau = linewidth_scale_factor(&LineShapeKernel::GaussianLine { fwhm: g }, &mp).unwrap();
        let expected =
            libm::exp(-g * g * mp.period_t * mp.period_t / (8.0 * core::f64::consts::LN_2));
        assert!((gau - expected).abs() < 1e-9);
    }

    #[test]
    fn convolved_modes_agree_for_narrow_kernel() {
        let mp = params_od(10.0);
        let shape = ToothShape::Square {
            half_width: optimal_square_width(10.0).unwrap(),
        };
        let kernel = LineShapeKernel::GaussianLine {
            fwhm: 0.02 * mp.full_period(),
        };
        let exact = efficiency_convolved(&shape, &kernel, &mp, ConvolutionMode::Exact)
            .unwrap()
            .eta;
        let scaled = efficiency_convolved(&shape, &kernel, &mp, ConvolutionMode::ScaleFactor)
            .unwrap()
            .eta;
        let ratio = exact / scaled;
        assert!((0.95..=1.05).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn map_has_expected_shape_and_bound() {
        let p_axis: Vec<f64> = (0..40).map(|i| 2.0 * PI * i as f64 / 39.0).collect();
        let od_axis: Vec<f64> = (0..20).map(|i| 20.0 * i as f64 / 19.0).collect();
        let map = build_map(MapKind::EtaSquare, &p_axis, &od_axis).unwrap();
        assert_eq!(map.values.len(), 800);
        assert!(map
            .values
            .iter()
            .all(|&v| (0.0..=ETA_MAX_FORWARD + 1e-9).contains(&v)));
    }

    #[test]
    fn difference_positive_at_square_optimum() {
        let p_axis: Vec<f64> = (0..64)
            .map(|i| 1e-3 + (2.0 * PI - 1e-3) * i as f64 / 63.0)
            .collect();
        let od_axis = alloc::vec![5.0, 10.0, 20.0];
        let maps = difference_maps(&p_axis, &od_axis).unwrap();
        for (i, &od) in od_axis.iter().enumerate() {
            let p_opt = optimal_square_width(od).unwrap();
            let eta_s = eta_square(p_opt, od).unwrap();
            let best_l = optimize_width(ToothFamily::Lorentzian, od).unwrap().1;
            let best_g = optimize_width(ToothFamily::Gaussian, od).unwrap().1;
            assert!(eta_s > best_l && eta_s > best_g);
            // Spot check the stored grid: max over p of D at this od > 0.
            let n_p = p_axis.len();
            let row_max = maps[0].values[i * n_p..(i + 1) * n_p]
                .iter()
                .cloned()
                .fold(f64::MIN, f64::max);
            assert!(row_max > 0.0);
        }
    }
}
