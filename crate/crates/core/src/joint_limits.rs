//! Jamming-angle models for printed joint limits.
//!
//! Flexional limits are rows of mushroom pillars: stem height `h`, head
//! radius `r`, spacing `D` along the (inextensible) base film. The jam angle
//! `α` solves
//!
//! ```text
//! α = D / (h1 + h),   sin(α / 2) = r / h1
//! ```
//!
//! which after eliminating `h1` is the scalar equation
//! `α (h + r / sin(α / 2)) = D`, solved by bisection.
//!
//! Extensional limits are mirrored standoffs inclined at `γ` with diagonal
//! length `L` and base width `b`; their jam angle is closed-form:
//!
//! ```text
//! β = d / (h1 + h),  d = D - 2r,  D = 2 L cos γ - b,  h1 = L sin γ
//! ```
//!
//! All angles are radians, all lengths meters.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Distance of the flexional bisection bracket from 0 and π.
pub const BRACKET_EPS: f64 = 1e-9;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlexionalLimitSpec {
    /// Arc spacing between adjacent features.
    pub spacing: f64,
    /// Head radius.
    pub head_radius: f64,
    /// Stem height.
    pub height: f64,
}

impl FlexionalLimitSpec {
    pub fn new(spacing: f64, head_radius: f64, height: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(invalid(format!("feature spacing must be positive, got {spacing}")));
        }
        if !(head_radius.is_finite() && head_radius > 0.0) {
            return Err(invalid(format!("head radius must be positive, got {head_radius}")));
        }
        if !(height.is_finite() && height >= 0.0) {
            return Err(invalid(format!("feature height must be non-negative, got {height}")));
        }
        Ok(Self {
            spacing,
            head_radius,
            height,
        })
    }

    /// The pillars can bend at all before jamming.
    pub fn is_solvable(&self) -> bool {
        self.spacing > 2.0 * self.head_radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionalLimitSpec {
    /// Diagonal length of one standoff.
    pub length: f64,
    pub base_width: f64,
    pub head_radius: f64,
    pub height: f64,
    /// Inclination, radians in (0, π/2).
    pub gamma: f64,
}

impl ExtensionalLimitSpec {
    pub fn new(length: f64, base_width: f64, head_radius: f64, height: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [
            ("feature length", length),
            ("base width", base_width),
            ("head radius", head_radius),
            ("height", height),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(gamma > 0.0 && gamma < 0.5 * PI) {
            return Err(invalid(format!("feature angle must lie in (0, pi/2) rad, got {gamma}")));
        }
        Ok(Self {
            length,
            base_width,
            head_radius,
            height,
            gamma,
        })
    }

    /// Distance between the two head centers at rest, `2 L cos γ - b`.
    pub fn head_spacing(&self) -> f64 {
        2.0 * self.length * self.gamma.cos() - self.base_width
    }

    /// Rest gap between the heads, `D - 2r`.
    pub fn rest_gap(&self) -> f64 {
        self.head_spacing() - 2.0 * self.head_radius
    }

    /// Standoff height `L sin γ`.
    pub fn standoff_height(&self) -> f64 {
        self.length * self.gamma.sin()
    }

    /// Shortest feature length with a positive rest gap.
    pub fn min_feasible_length(&self) -> f64 {
        (self.base_width + 2.0 * self.head_radius) / (2.0 * self.gamma.cos())
    }
}

/// `α (h + r / sin(α/2)) - D`; strictly increasing in `α` on (0, π).
pub fn flexional_residual(spec: &FlexionalLimitSpec, alpha: f64) -> f64 {
    alpha * (spec.height + spec.head_radius / (0.5 * alpha).sin()) - spec.spacing
}

/// Head-contact height `h1 = r / sin(α/2)` for an angle.
pub fn flexional_contact_height(head_radius: f64, alpha: f64) -> f64 {
    head_radius / (0.5 * alpha).sin()
}

pub fn flexional_jam_angle(spec: &FlexionalLimitSpec) -> Result<f64> {
    if !spec.is_solvable() {
        return Err(Error::AlwaysJammed {
            spacing: spec.spacing,
            diameter: 2.0 * spec.head_radius,
        });
    }
    let mut lo = BRACKET_EPS;
    let mut hi = PI - BRACKET_EPS;
    let f_lo = flexional_residual(spec, lo);
    let f_hi = flexional_residual(spec, hi);
    if f_lo >= 0.0 {
        // D exceeds 2r by less than the bracket resolution.
        return Err(Error::AlwaysJammed {
            spacing: spec.spacing,
            diameter: 2.0 * spec.head_radius,
        });
    }
    if f_hi < 0.0 {
        return Err(Error::UnreachableLimit);
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let f = flexional_residual(spec, mid);
        if f == 0.0 {
            return Ok(mid);
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    // Pick whichever end has the smaller residual.
    let (rl, rh) = (flexional_residual(spec, lo).abs(), flexional_residual(spec, hi).abs());
    Ok(if rl <= rh { lo } else { hi })
}

/// Stem height that jams at `target_alpha` for the given head radius and spacing.
pub fn flexional_inverse(target_alpha: f64, head_radius: f64, spacing: f64) -> Result<f64> {
    if !(target_alpha > 0.0 && target_alpha < PI) {
        return Err(invalid(format!("target angle must lie in (0, pi), got {target_alpha}")));
    }
    if !(head_radius > 0.0 && spacing > 0.0) {
        return Err(invalid("head radius and spacing must be positive"));
    }
    let h = spacing / target_alpha - flexional_contact_height(head_radius, target_alpha);
    if h < 0.0 {
        return Err(Error::GeometryInfeasible(format!(
            "jamming at {target_alpha} rad needs a negative stem height ({h} m)"
        )));
    }
    Ok(h)
}

pub fn extensional_residual(spec: &ExtensionalLimitSpec, beta: f64) -> f64 {
    beta * (spec.standoff_height() + spec.height) - spec.rest_gap()
}

pub fn extensional_jam_angle(spec: &ExtensionalLimitSpec) -> Result<f64> {
    let gap = spec.rest_gap();
    if gap <= 0.0 {
        return Err(Error::ContactAtRest {
            gap,
            min_length: spec.min_feasible_length(),
        });
    }
    Ok(gap / (spec.standoff_height() + spec.height))
}

/// Feature length that jams at `target_beta`.
pub fn extensional_inverse(
    target_beta: f64,
    base_width: f64,
    head_radius: f64,
    height: f64,
    gamma: f64,
) -> Result<f64> {
    if !(target_beta.is_finite() && target_beta >= 0.0) {
        return Err(invalid(format!("target angle must be non-negative, got {target_beta}")));
    }
    if !(gamma > 0.0 && gamma < 0.5 * PI) {
        return Err(invalid(format!("feature angle must lie in (0, pi/2) rad, got {gamma}")));
    }
    let denom = 2.0 * gamma.cos() - target_beta * gamma.sin();
    if denom <= 0.0 {
        return Err(Error::AngleUnreachable { target: target_beta });
    }
    Ok((base_width + 2.0 * head_radius + target_beta * height) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MM: f64 = 1e-3;

    fn flex(h: f64) -> FlexionalLimitSpec {
        FlexionalLimitSpec::new(6.0 * MM, 2.0 * MM, h * MM).unwrap()
    }

    fn ext(l: f64) -> ExtensionalLimitSpec {
        ExtensionalLimitSpec::new(l * MM, 5.4 * MM, 1.8 * MM, 2.0 * MM, 45f64.to_radians()).unwrap()
    }

    /// Independent oracle: dense scan for the sign change, then linear
    /// interpolation across the bracketing cell.
    fn scan_root(spec: &FlexionalLimitSpec) -> f64 {
        let n = 2_000_000;
        let step = PI / n as f64;
        let mut prev_a = step;
        let mut prev_f = flexional_residual(spec, prev_a);
        for i in 2..n {
            let a = i as f64 * step;
            let f = flexional_residual(spec, a);
            if prev_f < 0.0 && f >= 0.0 {
                return prev_a + (a - prev_a) * (-prev_f) / (f - prev_f);
            }
            prev_a = a;
            prev_f = f;
        }
        panic!("no root");
    }

    #[test]
    fn flexional_examples_match_scan() {
        let a4 = flexional_jam_angle(&flex(4.0)).unwrap();
        assert!((a4 - scan_root(&flex(4.0))).abs() < 1e-9);
        assert!((a4 - 0.489928).abs() < 1e-6);
        assert!((a4.to_degrees() - 28.07).abs() < 0.01);
        let a12 = flexional_jam_angle(&flex(12.0)).unwrap();
        assert!((a12 - scan_root(&flex(12.0))).abs() < 1e-9);
        assert!((a12 - 0.166282).abs() < 1e-6);
    }

    #[test]
    fn touching_heads_always_jammed() {
        let spec = FlexionalLimitSpec::new(4.0 * MM, 2.0 * MM, 4.0 * MM).unwrap();
        assert!(matches!(flexional_jam_angle(&spec), Err(Error::AlwaysJammed { .. })));
    }

    #[test]
    fn huge_spacing_unreachable() {
        let spec = FlexionalLimitSpec::new(100.0 * MM, 2.0 * MM, 1.0 * MM).unwrap();
        assert_eq!(flexional_jam_angle(&spec), Err(Error::UnreachableLimit));
    }

    #[test]
    fn flexional_inverse_examples() {
        let a4 = flexional_jam_angle(&flex(4.0)).unwrap();
        let h = flexional_inverse(a4, 2.0 * MM, 6.0 * MM).unwrap();
        assert!((h - 4.0 * MM).abs() < 1e-12);
        // 0.167 carries three digits; dh/dα ≈ -D/α² ≈ -0.215 m/rad turns the
        // ±5e-4 rad rounding into about ±0.11 mm.
        let h = flexional_inverse(0.167, 2.0 * MM, 6.0 * MM).unwrap();
        assert!((h - 12.0 * MM).abs() < 0.12 * MM);
        let exact = 6.0 * MM / 0.167 - 2.0 * MM / (0.0835f64).sin();
        assert!((h - exact).abs() < 1e-15);
        assert!(matches!(
            flexional_inverse(3.0, 2.0 * MM, 6.0 * MM),
            Err(Error::GeometryInfeasible(_))
        ));
        assert!(flexional_inverse(0.0, 2.0 * MM, 6.0 * MM).is_err());
    }

    #[test]
    fn extensional_examples() {
        let b65 = extensional_jam_angle(&ext(6.5)).unwrap();
        assert!((b65 - 0.0291665).abs() < 1e-6);
        let b75 = extensional_jam_angle(&ext(7.5)).unwrap();
        assert!((b75 - 0.219983).abs() < 1e-6);
        match extensional_jam_angle(&ext(6.0)) {
            Err(Error::ContactAtRest { min_length, .. }) => {
                assert!((min_length - 6.3640 * MM).abs() < 1e-4 * MM)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extensional_inverse_examples() {
        let g = 45f64.to_radians();
        let b75 = extensional_jam_angle(&ext(7.5)).unwrap();
        let l = extensional_inverse(b75, 5.4 * MM, 1.8 * MM, 2.0 * MM, g).unwrap();
        assert!(((l - 7.5 * MM) / (7.5 * MM)).abs() < 1e-12);
        let l0 = extensional_inverse(0.0, 5.4 * MM, 1.8 * MM, 2.0 * MM, g).unwrap();
        assert!((l0 - 9.0 * MM / (2.0 * g.cos())).abs() < 1e-15);
        let unreachable = 2.0 / g.tan();
        assert!(matches!(
            extensional_inverse(unreachable, 5.4 * MM, 1.8 * MM, 2.0 * MM, g),
            Err(Error::AngleUnreachable { .. })
        ));
    }

    #[test]
    fn flexional_system_holds_separately() {
        for h in [4.0, 6.0, 8.0, 10.0, 12.0] {
            let s = flex(h);
            let a = flexional_jam_angle(&s).unwrap();
            let h1 = flexional_contact_height(s.head_radius, a);
            assert!((a - s.spacing / (h1 + s.height)).abs() < 1e-9);
            assert!(((0.5 * a).sin() - s.head_radius / h1).abs() < 1e-9);
        }
    }
}
