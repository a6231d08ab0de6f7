//! Bending stiffness of ribbed composite flexures and the inverse design
//! problems over rib width ratio and rib height.
//!
//! The model is an Euler-Bernoulli composite beam:
//!
//! * each cross-section is reduced with the transformed-section method about
//!   its modulus-weighted neutral axis,
//! * alternating ribbed and bare segments combine as serial compliances
//!   (length-weighted harmonic mean of `EI`),
//! * the flexure is a cantilever with tip stiffness `3 EI / L^3`.
//!
//! [`tip_stiffness_exact`] integrates the piecewise `EI(x)` profile directly
//! and serves as the cross-check on the homogenized value.

use crate::error::{invalid, Error, Result};
use crate::material::{FlexureSpec, LaminateStack};

/// Stopping tolerance for the bisection solvers, relative to the target.
const SOLVE_RTOL: f64 = 1e-9;
const MAX_BISECTIONS: usize = 400;

/// Midpoint samples per rib period before the first refinement.
pub const BASE_POINTS_PER_PERIOD: usize = 64;
/// Relative change between successive halvings at which quadrature stops.
pub const QUADRATURE_RTOL: f64 = 1e-6;
const MAX_REFINEMENTS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionStiffness {
    /// Bending rigidity, N·m².
    pub ei: f64,
    /// Neutral axis height above the laminate bottom, m.
    pub neutral_axis_height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlexureStiffnessResult {
    /// Base-only section, N·m².
    pub ei_low: f64,
    /// Ribbed section, N·m².
    pub ei_high: f64,
    /// Homogenized over one period, N·m².
    pub ei_eff: f64,
    /// Cantilever tip stiffness, N/m.
    pub k_tip: f64,
    /// Pseudo-rigid-body rotational stiffness over the full flexure length, N·m/rad.
    pub k_torsional: f64,
}

/// Transformed-section bending rigidity of a laminate of the given width.
pub fn section_ei(stack: &LaminateStack, width: f64) -> SectionStiffness {
    let mut bottom = 0.0;
    let mut sum_ea = 0.0;
    let mut sum_eay = 0.0;
    let mut parts = Vec::with_capacity(stack.layers().len());
    for layer in stack.layers() {
        let t = layer.thickness;
        let e = layer.material.youngs_modulus;
        let area = width * t;
        let centroid = bottom + 0.5 * t;
        sum_ea += e * area;
        sum_eay += e * area * centroid;
        parts.push((e, area, t, centroid));
        bottom += t;
    }
    let y_bar = sum_eay / sum_ea;
    let ei = parts
        .iter()
        .map(|&(e, area, t, centroid)| {
            let own = width * t * t * t / 12.0;
            let offset = centroid - y_bar;
            e * (own + area * offset * offset)
        })
        .sum();
    SectionStiffness {
        ei,
        neutral_axis_height: y_bar,
    }
}

/// Low (bare) and high (ribbed) section rigidities of a flexure.
pub fn section_pair(flex: &FlexureSpec) -> (f64, f64) {
    let low = section_ei(&flex.base, flex.width).ei;
    let high = if flex.has_effective_ribs() {
        section_ei(&flex.ribbed_stack(), flex.width).ei
    } else {
        low
    };
    (low, high)
}

fn harmonic_ei(w: f64, ei_low: f64, ei_high: f64) -> f64 {
    if w <= 0.0 {
        ei_low
    } else {
        1.0 / (w / ei_high + (1.0 - w) / ei_low)
    }
}

fn cantilever_k(ei: f64, length: f64) -> f64 {
    3.0 * ei / (length * length * length)
}

/// Serial-compliance homogenization of the ribbed flexure.
pub fn homogenized_ei(flex: &FlexureSpec) -> FlexureStiffnessResult {
    let (ei_low, ei_high) = section_pair(flex);
    let ei_eff = if flex.has_effective_ribs() {
        harmonic_ei(flex.width_ratio(), ei_low, ei_high)
    } else {
        ei_low
    };
    FlexureStiffnessResult {
        ei_low,
        ei_high,
        ei_eff,
        k_tip: cantilever_k(ei_eff, flex.length),
        k_torsional: ei_eff / flex.length,
    }
}

/// Homogenized cantilever tip stiffness, N/m.
pub fn tip_stiffness(flex: &FlexureSpec) -> f64 {
    homogenized_ei(flex).k_tip
}

/// Breakpoints of the piecewise-constant `EI(x)` profile with the rigidity of
/// each interval.
fn ei_profile(flex: &FlexureSpec) -> Vec<(f64, f64, f64)> {
    let (ei_low, ei_high) = section_pair(flex);
    let mut pieces = Vec::new();
    let mut cursor = 0.0;
    for (a, b) in flex.rib_spans() {
        if a > cursor {
            pieces.push((cursor, a, ei_low));
        }
        if b > a {
            pieces.push((a, b, ei_high));
        }
        cursor = b;
    }
    if cursor < flex.length {
        pieces.push((cursor, flex.length, ei_low));
    }
    pieces
}

/// Tip compliance `∫ (L - x)² / EI(x) dx` by the composite midpoint rule.
///
/// Each constant-`EI` interval gets its own sub-grid whose spacing is at most
/// `period / points_per_period`, so interval edges always fall on grid lines.
pub fn tip_compliance_midpoint(flex: &FlexureSpec, points_per_period: usize) -> f64 {
    let period = flex.ribs.map_or(flex.length, |r| r.period);
    let h_max = period / points_per_period.max(1) as f64;
    let length = flex.length;
    ei_profile(flex)
        .into_iter()
        .map(|(a, b, ei)| {
            let n = ((b - a) / h_max).ceil().max(1.0) as usize;
            let h = (b - a) / n as f64;
            let sum: f64 = (0..n)
                .map(|i| {
                    let x = a + (i as f64 + 0.5) * h;
                    let lever = length - x;
                    lever * lever
                })
                .sum();
            sum * h / ei
        })
        .sum()
}

/// Quadrature result with its refinement history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactStiffness {
    /// N/m.
    pub k: f64,
    pub points_per_period: usize,
    /// Relative change of the last halving.
    pub last_change: f64,
}

/// Tip stiffness from the piecewise `EI(x)` profile, refined by step halving
/// until successive values differ by less than [`QUADRATURE_RTOL`].
pub fn tip_stiffness_exact_detail(flex: &FlexureSpec) -> ExactStiffness {
    let mut points = BASE_POINTS_PER_PERIOD;
    let mut previous = tip_compliance_midpoint(flex, points);
    let mut last_change = f64::INFINITY;
    for _ in 0..MAX_REFINEMENTS {
        points *= 2;
        let current = tip_compliance_midpoint(flex, points);
        last_change = ((current - previous) / current).abs();
        previous = current;
        if last_change < QUADRATURE_RTOL {
            break;
        }
    }
    ExactStiffness {
        k: 1.0 / previous,
        points_per_period: points,
        last_change,
    }
}

pub fn tip_stiffness_exact(flex: &FlexureSpec) -> f64 {
    tip_stiffness_exact_detail(flex).k
}

/// Rotational stiffness of a joint of `joint_length` cut from this flexure,
/// assuming a uniform bending moment over the joint.
pub fn torsional_stiffness(flex: &FlexureSpec, joint_length: f64) -> Result<f64> {
    if !(joint_length > 0.0 && joint_length <= flex.length) {
        return Err(invalid(format!(
            "joint length {joint_length} m must lie in (0, {}] m",
            flex.length
        )));
    }
    Ok(homogenized_ei(flex).ei_eff / joint_length)
}

/// Bisection on a nondecreasing map `x -> f(x)` over `[lo, hi]`.
fn bisect_increasing(mut lo: f64, mut hi: f64, target: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let value = f(mid);
        if ((value - target) / target).abs() < SOLVE_RTOL * 1e-3 {
            return mid;
        }
        if value < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn require_ribs(template: &FlexureSpec) -> Result<()> {
    if template.ribs.is_none() {
        return Err(invalid("inverse design needs a template with a rib pattern"));
    }
    Ok(())
}

fn check_target(target_k: f64) -> Result<()> {
    if !(target_k.is_finite() && target_k > 0.0) {
        return Err(invalid(format!("target stiffness must be positive, got {target_k}")));
    }
    Ok(())
}

/// Width ratio that gives `target_k` (N/m) with everything else fixed by the template.
pub fn solve_width_ratio(target_k: f64, template: &FlexureSpec) -> Result<f64> {
    check_target(target_k)?;
    require_ribs(template)?;
    let k_at = |w: f64| tip_stiffness(&template.with_width_ratio(w).expect("w in [0, 1]"));
    let k_min = k_at(0.0);
    let k_max = k_at(1.0);
    let out_of_range = || Error::OutOfRange {
        target: target_k,
        min: k_min,
        max: k_max,
    };
    if target_k < k_min * (1.0 - SOLVE_RTOL) || target_k > k_max * (1.0 + SOLVE_RTOL) {
        return Err(out_of_range());
    }
    if ((target_k - k_min) / target_k).abs() < SOLVE_RTOL {
        return Ok(0.0);
    }
    if ((target_k - k_max) / target_k).abs() < SOLVE_RTOL {
        return Ok(1.0);
    }
    if k_max <= k_min {
        return Err(out_of_range());
    }
    Ok(bisect_increasing(0.0, 1.0, target_k, k_at))
}

/// Supremum of the tip stiffness over all rib heights at the template's width
/// ratio: `3 EI_low / ((1 - w) L³)`. Infinite for `w = 1`.
pub fn height_plateau(template: &FlexureSpec) -> f64 {
    let w = template.width_ratio();
    let ei_low = section_ei(&template.base, template.width).ei;
    if w >= 1.0 {
        f64::INFINITY
    } else {
        cantilever_k(ei_low, template.length) / (1.0 - w)
    }
}

/// Rib height (m) that gives `target_k` (N/m) at the template's width ratio.
pub fn solve_feature_height(target_k: f64, template: &FlexureSpec) -> Result<f64> {
    check_target(target_k)?;
    require_ribs(template)?;
    let k_at = |h: f64| tip_stiffness(&template.with_feature_height(h).expect("h >= 0"));
    let k_zero = k_at(0.0);
    if ((target_k - k_zero) / target_k).abs() < SOLVE_RTOL {
        return Ok(0.0);
    }
    let supremum = height_plateau(template);
    if template.width_ratio() <= 0.0 {
        return Err(Error::OutOfRange {
            target: target_k,
            min: k_zero,
            max: k_zero,
        });
    }
    if target_k < k_zero {
        return Err(Error::OutOfRange {
            target: target_k,
            min: k_zero,
            max: supremum,
        });
    }
    if target_k >= supremum {
        return Err(Error::PlateauUnreachable {
            target: target_k,
            supremum,
        });
    }
    let mut hi = template.base.total_thickness().max(1e-6);
    let mut grown = 0;
    while k_at(hi) < target_k {
        hi *= 2.0;
        grown += 1;
        if grown > 200 || !hi.is_finite() {
            // Numerically indistinguishable from the plateau.
            return Err(Error::PlateauUnreachable {
                target: target_k,
                supremum,
            });
        }
    }
    Ok(bisect_increasing(0.0, hi, target_k, k_at))
}
