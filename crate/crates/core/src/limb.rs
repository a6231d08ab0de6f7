//! Quasi-static pseudo-rigid-body model of a tendon-driven limb.
//!
//! A limb is a planar chain of rigid links and flexure joints. Each joint is a
//! torsional spring `k_i` with a hard jam cap, crossed by a single
//! inextensible, frictionless tendon at moment arm `r_i`. Pulling the tendon
//! by `u` imposes `Σ r_i φ_i = u` on the joint rotation magnitudes `φ_i`; the
//! equilibrium is the minimizer of `Σ ½ k_i φ_i²` under that constraint and
//! `0 ≤ φ_i ≤ cap_i`, i.e. `φ_i = min(T r_i / k_i, cap_i)` for the tendon
//! tension `T`.
//!
//! Geometric joint angles are `θ_i = s_i φ_i` where `s_i` is the routing
//! sense of joint `i`.

use crate::error::{invalid, Error, Result};

/// Relative slack on the over-pull check.
const PULL_SLACK: f64 = 1e-12;
/// Heat-map bins used when none are requested.
pub const DEFAULT_CURVATURE_BINS: usize = 70;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// Positive (counter-clockwise) rotation shortens the tendon.
    Positive,
    Negative,
}

impl Sense {
    pub fn sign(self) -> f64 {
        match self {
            Sense::Positive => 1.0,
            Sense::Negative => -1.0,
        }
    }

    pub fn from_sign(sign: i64) -> Result<Self> {
        match sign {
            1 => Ok(Sense::Positive),
            -1 => Ok(Sense::Negative),
            other => Err(invalid(format!("joint sense must be +1 or -1, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDef {
    /// N·m/rad.
    pub torsional_stiffness: f64,
    /// m; zero models a point hinge.
    pub joint_length: f64,
    /// rad, magnitude of the cap.
    pub jam_angle: f64,
    pub sense: Sense,
    /// Tendon moment arm, m.
    pub routing_offset: f64,
}

impl JointDef {
    pub fn new(
        torsional_stiffness: f64,
        joint_length: f64,
        jam_angle: f64,
        sense: Sense,
        routing_offset: f64,
    ) -> Result<Self> {
        if !(torsional_stiffness.is_finite() && torsional_stiffness > 0.0) {
            return Err(invalid(format!(
                "torsional stiffness must be positive, got {torsional_stiffness}"
            )));
        }
        if !(joint_length.is_finite() && joint_length >= 0.0) {
            return Err(invalid(format!("joint length must be non-negative, got {joint_length}")));
        }
        if !(jam_angle.is_finite() && jam_angle > 0.0) {
            return Err(invalid(format!("jam angle must be positive, got {jam_angle}")));
        }
        if !(routing_offset.is_finite() && routing_offset > 0.0) {
            return Err(invalid(format!("routing offset must be positive, got {routing_offset}")));
        }
        Ok(Self {
            torsional_stiffness,
            joint_length,
            jam_angle,
            sense,
            routing_offset,
        })
    }

    /// Tension at which this joint reaches its cap.
    pub fn jam_tension(&self) -> f64 {
        self.torsional_stiffness * self.jam_angle / self.routing_offset
    }

    fn compliance(&self) -> f64 {
        self.routing_offset * self.routing_offset / self.torsional_stiffness
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Rigid link of the given length (m).
    Link(f64),
    Joint(JointDef),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BasePose {
    pub x: f64,
    pub y: f64,
    /// Heading of the first segment, rad.
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimbSpec {
    segments: Vec<Segment>,
    pub base_pose: BasePose,
}

impl LimbSpec {
    pub fn new(segments: Vec<Segment>, base_pose: BasePose) -> Result<Self> {
        if !segments.iter().any(|s| matches!(s, Segment::Joint(_))) {
            return Err(Error::EmptyLimb);
        }
        for s in &segments {
            if let Segment::Link(len) = s {
                if !(len.is_finite() && *len >= 0.0) {
                    return Err(invalid(format!("link length must be non-negative, got {len}")));
                }
            }
        }
        let spec = Self { segments, base_pose };
        if !(spec.total_length() > 0.0) {
            return Err(invalid("limb total length must be positive"));
        }
        Ok(spec)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn joints(&self) -> impl Iterator<Item = &JointDef> + '_ {
        self.segments.iter().filter_map(|s| match s {
            Segment::Joint(j) => Some(j),
            Segment::Link(_) => None,
        })
    }

    pub fn joint_count(&self) -> usize {
        self.joints().count()
    }

    pub fn total_length(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| match s {
                Segment::Link(len) => *len,
                Segment::Joint(j) => j.joint_length,
            })
            .sum()
    }

    /// Tendon pull at which every joint sits at its cap.
    pub fn capacity(&self) -> f64 {
        self.joints().map(|j| j.routing_offset * j.jam_angle).sum()
    }

    /// Copy with joint `index` (in joint order) replaced.
    pub fn with_joint(&self, index: usize, joint: JointDef) -> Result<Self> {
        let mut out = self.clone();
        let slot = out
            .segments
            .iter_mut()
            .filter_map(|s| match s {
                Segment::Joint(j) => Some(j),
                Segment::Link(_) => None,
            })
            .nth(index)
            .ok_or_else(|| invalid(format!("limb has no joint {index}")))?;
        *slot = joint;
        Ok(out)
    }

    /// Pulls at which each joint jams, in joint order.
    pub fn jam_events(&self) -> Vec<f64> {
        let joints: Vec<&JointDef> = self.joints().collect();
        joints
            .iter()
            .map(|j| {
                let t = j.jam_tension();
                joints
                    .iter()
                    .map(|o| o.routing_offset * (t * o.routing_offset / o.torsional_stiffness).min(o.jam_angle))
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimbState {
    /// Signed joint angles, rad.
    pub theta: Vec<f64>,
    /// Tendon tension, N.
    pub tension: f64,
    /// Tendon pull, m.
    pub pull: f64,
    pub jammed: Vec<bool>,
}

impl LimbState {
    /// `Σ s_i r_i θ_i - pull`.
    pub fn constraint_residual(&self, limb: &LimbSpec) -> f64 {
        limb.joints()
            .zip(&self.theta)
            .map(|(j, &t)| j.sense.sign() * j.routing_offset * t)
            .sum::<f64>()
            - self.pull
    }

    pub fn elastic_energy(&self, limb: &LimbSpec) -> f64 {
        limb.joints()
            .zip(&self.theta)
            .map(|(j, &t)| 0.5 * j.torsional_stiffness * t * t)
            .sum()
    }
}

/// Active-set equilibrium under tendon pull `pull` (m).
pub fn equilibrium_solve(limb: &LimbSpec, pull: f64) -> Result<LimbState> {
    let joints: Vec<&JointDef> = limb.joints().collect();
    if joints.is_empty() {
        return Err(Error::EmptyLimb);
    }
    if !(pull.is_finite() && pull >= 0.0) {
        return Err(invalid(format!("tendon pull must be non-negative, got {pull}")));
    }
    let capacity = limb.capacity();
    if pull > capacity * (1.0 + PULL_SLACK) {
        return Err(Error::OverPull { pull, capacity });
    }

    let mut order: Vec<usize> = (0..joints.len()).collect();
    order.sort_by(|&a, &b| joints[a].jam_tension().total_cmp(&joints[b].jam_tension()));

    let mut jammed = vec![false; joints.len()];
    let mut jammed_pull = 0.0;
    let mut tension = None;
    for m in 0..joints.len() {
        let free_compliance: f64 = order[m..].iter().map(|&i| joints[i].compliance()).sum();
        let t = (pull - jammed_pull) / free_compliance;
        let next = joints[order[m]];
        if t <= next.jam_tension() {
            tension = Some(t.max(0.0));
            break;
        }
        jammed[order[m]] = true;
        jammed_pull += next.routing_offset * next.jam_angle;
    }
    // Every joint capped: report the least tension that holds the pose.
    let tension = tension.unwrap_or_else(|| joints[*order.last().unwrap()].jam_tension());

    let theta = joints
        .iter()
        .zip(&jammed)
        .map(|(j, &capped)| {
            let magnitude = if capped {
                j.jam_angle
            } else {
                (tension * j.routing_offset / j.torsional_stiffness).min(j.jam_angle)
            };
            j.sense.sign() * magnitude
        })
        .collect();
    Ok(LimbState {
        theta,
        tension,
        pull,
        jammed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainPose {
    /// Base point followed by the end of every segment, m.
    pub points: Vec<[f64; 2]>,
    /// Heading after the last segment, rad.
    pub tip_heading: f64,
}

impl ChainPose {
    pub fn foot(&self) -> [f64; 2] {
        *self.points.last().expect("chain has a base point")
    }
}

fn check_angles(limb: &LimbSpec, theta: &[f64]) -> Result<()> {
    let expected = limb.joint_count();
    if theta.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: theta.len(),
        });
    }
    Ok(())
}

/// Chord of a circular arc of length `len` turning by `angle`, in the arc's
/// starting frame.
fn arc_chord(len: f64, angle: f64) -> (f64, f64) {
    if angle.abs() < 1e-6 {
        let a2 = angle * angle;
        (len * (1.0 - a2 / 6.0 + a2 * a2 / 120.0), len * angle * (0.5 - a2 / 24.0))
    } else {
        (len * angle.sin() / angle, len * (1.0 - angle.cos()) / angle)
    }
}

/// Planar chain with each joint's rotation spread uniformly along its length.
pub fn forward_kinematics(limb: &LimbSpec, theta: &[f64]) -> Result<ChainPose> {
    check_angles(limb, theta)?;
    let mut x = limb.base_pose.x;
    let mut y = limb.base_pose.y;
    let mut heading = limb.base_pose.angle;
    let mut points = Vec::with_capacity(limb.segments.len() + 1);
    points.push([x, y]);
    let mut angles = theta.iter();
    for seg in &limb.segments {
        let (dx, dy, turn) = match seg {
            Segment::Link(len) => (*len, 0.0, 0.0),
            Segment::Joint(j) => {
                let angle = *angles.next().expect("checked length");
                let (cx, cy) = arc_chord(j.joint_length, angle);
                (cx, cy, angle)
            }
        };
        let (s, c) = heading.sin_cos();
        x += c * dx - s * dy;
        y += s * dx + c * dy;
        heading += turn;
        points.push([x, y]);
    }
    Ok(ChainPose {
        points,
        tip_heading: heading,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSegment {
    pub s_start: f64,
    pub s_end: f64,
    /// 1/m; infinite for a point hinge that is bent.
    pub kappa: f64,
    /// Total turning over the segment, rad.
    pub turning: f64,
}

impl CurvatureSegment {
    /// `∫ κ ds` over this segment.
    pub fn integral(&self) -> f64 {
        let len = self.s_end - self.s_start;
        if len > 0.0 {
            self.kappa * len
        } else {
            self.turning
        }
    }
}

/// Piecewise-constant curvature along the limb's arc length.
pub fn curvature_profile(limb: &LimbSpec, theta: &[f64]) -> Result<Vec<CurvatureSegment>> {
    check_angles(limb, theta)?;
    let mut s = 0.0;
    let mut angles = theta.iter();
    let mut out = Vec::with_capacity(limb.segments.len());
    for seg in &limb.segments {
        let (len, turning) = match seg {
            Segment::Link(len) => (*len, 0.0),
            Segment::Joint(j) => (j.joint_length, *angles.next().expect("checked length")),
        };
        let kappa = if turning == 0.0 {
            0.0
        } else if len > 0.0 {
            turning / len
        } else {
            f64::INFINITY.copysign(turning)
        };
        out.push(CurvatureSegment {
            s_start: s,
            s_end: s + len,
            kappa,
            turning,
        });
        s += len;
    }
    Ok(out)
}

/// Mean curvature in `bins` equal arc-length bins over the whole limb.
pub fn curvature_bins(profile: &[CurvatureSegment], bins: usize) -> Vec<f64> {
    let total = profile.last().map_or(0.0, |p| p.s_end);
    if bins == 0 || total <= 0.0 {
        return vec![0.0; bins];
    }
    let width = total / bins as f64;
    let mut turning = vec![0.0; bins];
    for seg in profile {
        if seg.turning == 0.0 {
            continue;
        }
        let len = seg.s_end - seg.s_start;
        if len <= 0.0 {
            let idx = ((seg.s_start / width) as usize).min(bins - 1);
            turning[idx] += seg.turning;
            continue;
        }
        let first = ((seg.s_start / width) as usize).min(bins - 1);
        let last = ((seg.s_end / width).ceil() as usize).min(bins);
        for (b, slot) in turning.iter_mut().enumerate().take(last).skip(first) {
            let lo = (b as f64 * width).max(seg.s_start);
            let hi = ((b + 1) as f64 * width).min(seg.s_end);
            if hi > lo {
                *slot += seg.kappa * (hi - lo);
            }
        }
    }
    turning.into_iter().map(|t| t / width).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokeMetrics {
    /// Horizontal extent of the foot path, m.
    pub stroke_distance: f64,
    /// Stroke distance per unit tendon pull.
    pub stroke_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleSample {
    pub state: LimbState,
    pub foot: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleResult {
    /// Pull phase then release phase; `2 * steps - 1` samples.
    pub samples: Vec<CycleSample>,
    pub metrics: StrokeMetrics,
    /// One row per sample, one column per arc-length bin (1/m).
    pub curvature_map: Vec<Vec<f64>>,
    /// Arc length of the bin edges, m.
    pub bin_edges: Vec<f64>,
}

/// Pull the tendon from 0 to `max_pull` on a uniform grid and release it.
pub fn sweep_cycle(limb: &LimbSpec, max_pull: f64, steps: usize) -> Result<CycleResult> {
    sweep_cycle_with_bins(limb, max_pull, steps, DEFAULT_CURVATURE_BINS)
}

pub fn sweep_cycle_with_bins(
    limb: &LimbSpec,
    max_pull: f64,
    steps: usize,
    bins: usize,
) -> Result<CycleResult> {
    if steps < 2 {
        return Err(invalid(format!("a cycle needs at least 2 steps, got {steps}")));
    }
    if !(max_pull.is_finite() && max_pull >= 0.0) {
        return Err(invalid(format!("max pull must be non-negative, got {max_pull}")));
    }
    let last = steps - 1;
    let grid = (0..steps).chain((0..last).rev());
    let total = limb.total_length();
    let bin_edges = (0..=bins).map(|b| total * b as f64 / bins as f64).collect();

    let mut samples = Vec::with_capacity(2 * steps - 1);
    let mut curvature_map = Vec::with_capacity(2 * steps - 1);
    for i in grid {
        let pull = if i == last {
            max_pull
        } else {
            max_pull * i as f64 / last as f64
        };
        let state = equilibrium_solve(limb, pull)?;
        let foot = forward_kinematics(limb, &state.theta)?.foot();
        let profile = curvature_profile(limb, &state.theta)?;
        curvature_map.push(curvature_bins(&profile, bins));
        samples.push(CycleSample { state, foot });
    }

    let (min_x, max_x) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
        (lo.min(s.foot[0]), hi.max(s.foot[0]))
    });
    let stroke_distance = max_x - min_x;
    let stroke_ratio = if max_pull > 0.0 {
        stroke_distance / max_pull
    } else {
        0.0
    };
    Ok(CycleResult {
        samples,
        metrics: StrokeMetrics {
            stroke_distance,
            stroke_ratio,
        },
        curvature_map,
        bin_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const MM: f64 = 1e-3;

    fn joint(k: f64, cap: f64) -> JointDef {
        JointDef::new(k, 10.0 * MM, cap, Sense::Positive, 2.0 * MM).unwrap()
    }

    fn two_joint(cap2: f64) -> LimbSpec {
        LimbSpec::new(
            vec![
                Segment::Link(10.0 * MM),
                Segment::Joint(joint(0.06, 10.0)),
                Segment::Link(20.0 * MM),
                Segment::Joint(joint(0.03, cap2)),
                Segment::Link(20.0 * MM),
            ],
            BasePose::default(),
        )
        .unwrap()
    }

    /// Brute force: scan θ₁ on a fine grid, θ₂ from the constraint.
    fn grid_minimum(limb: &LimbSpec, pull: f64, n: usize) -> (f64, f64) {
        let j: Vec<_> = limb.joints().copied().collect();
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=n {
            let t1 = j[0].jam_angle.min(pull / j[0].routing_offset) * i as f64 / n as f64;
            let t2 = (pull - j[0].routing_offset * t1) / j[1].routing_offset;
            if t2 < 0.0 || t2 > j[1].jam_angle {
                continue;
            }
            let e = 0.5 * j[0].torsional_stiffness * t1 * t1 + 0.5 * j[1].torsional_stiffness * t2 * t2;
            if e < best.0 {
                best = (e, t1, t2);
            }
        }
        (best.1, best.2)
    }

    #[test]
    fn unloaded() {
        let s = equilibrium_solve(&two_joint(10.0), 0.0).unwrap();
        assert_eq!(s.tension, 0.0);
        assert!(s.theta.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn unjammed_example() {
        let limb = two_joint(10.0);
        let s = equilibrium_solve(&limb, 2.0 * MM).unwrap();
        assert!((s.tension - 10.0).abs() < 1e-12);
        assert!((s.theta[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((s.theta[1] - 2.0 / 3.0).abs() < 1e-14);
        let (g1, g2) = grid_minimum(&limb, 2.0 * MM, 30_000);
        assert!((g1 - s.theta[0]).abs() < 1e-3 && (g2 - s.theta[1]).abs() < 1e-3);
    }

    #[test]
    fn jammed_example() {
        let limb = two_joint(0.5);
        let s = equilibrium_solve(&limb, 2.0 * MM).unwrap();
        assert_eq!(s.jammed, vec![false, true]);
        assert_eq!(s.theta[1], 0.5);
        assert!((s.tension - 15.0).abs() < 1e-12);
        assert!((s.theta[0] - 0.5).abs() < 1e-14);
        assert!(s.tension * 2.0 * MM >= 0.03 * 0.5);
        let (g1, g2) = grid_minimum(&limb, 2.0 * MM, 30_000);
        assert!((g1 - s.theta[0]).abs() < 1e-3 && (g2 - s.theta[1]).abs() < 1e-3);
    }

    #[test]
    fn over_pull_rejected() {
        let limb = two_joint(0.5);
        let cap = limb.capacity();
        assert!(equilibrium_solve(&limb, cap).is_ok());
        assert!(matches!(equilibrium_solve(&limb, cap * 1.001), Err(Error::OverPull { .. })));
        assert!(equilibrium_solve(&limb, -1e-3).is_err());
    }

    #[test]
    fn limb_without_joints_rejected() {
        assert_eq!(
            LimbSpec::new(vec![Segment::Link(1.0)], BasePose::default()),
            Err(Error::EmptyLimb)
        );
    }

    #[test]
    fn straight_limb_foot() {
        let limb = two_joint(0.5);
        let pose = forward_kinematics(&limb, &[0.0, 0.0]).unwrap();
        let foot = pose.foot();
        assert!((foot[0] - 70.0 * MM).abs() < 1e-15 && foot[1] == 0.0);
        assert!(matches!(
            forward_kinematics(&limb, &[0.0]),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn quarter_turn_point_hinge() {
        let j = JointDef::new(0.05, 0.0, PI, Sense::Positive, 1e-3).unwrap();
        let limb = LimbSpec::new(vec![Segment::Joint(j), Segment::Link(35.0 * MM)], BasePose::default()).unwrap();
        let foot = forward_kinematics(&limb, &[0.5 * PI]).unwrap().foot();
        assert!(foot[0].abs() < 1e-15 && (foot[1] - 35.0 * MM).abs() < 1e-15);
        let foot = forward_kinematics(&limb, &[-0.5 * PI]).unwrap().foot();
        assert!((foot[1] + 35.0 * MM).abs() < 1e-15);
    }

    #[test]
    fn curvature_examples() {
        let limb = two_joint(0.5);
        let p = curvature_profile(&limb, &[0.0, 0.0]).unwrap();
        assert!(p.iter().all(|s| s.kappa == 0.0));
        let p = curvature_profile(&limb, &[0.5, 0.0]).unwrap();
        assert!((p[1].kappa - 50.0).abs() < 1e-12);
        assert_eq!(p[1].s_start, 10.0 * MM);
        let bins = curvature_bins(&p, 70);
        let width = 70.0 * MM / 70.0;
        let total: f64 = bins.iter().map(|k| k * width).sum();
        assert!((total - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycle() {
        let c = sweep_cycle(&two_joint(0.5), 0.0, 5).unwrap();
        assert_eq!(c.samples.len(), 9);
        assert_eq!(c.metrics.stroke_distance, 0.0);
        assert_eq!(c.metrics.stroke_ratio, 0.0);
        assert!(sweep_cycle(&two_joint(0.5), 1e-3, 1).is_err());
    }

    #[test]
    fn cycle_is_mirror_symmetric() {
        let limb = two_joint(0.5);
        let c = sweep_cycle(&limb, limb.capacity(), 11).unwrap();
        let n = c.samples.len();
        for i in 0..n {
            assert_eq!(c.samples[i].foot, c.samples[n - 1 - i].foot);
        }
    }

    #[test]
    fn jam_events_order() {
        let limb = two_joint(0.5);
        let events = limb.jam_events();
        // Joint 2 jams at T = 7.5 N: pull = T·(r²/k₁) + r·cap₂.
        assert!((events[1] - (7.5 * 4e-6 / 0.06 + 2e-3 * 0.5)).abs() < 1e-15);
        assert!((events[0] - limb.capacity()).abs() < 1e-15);
    }
}
