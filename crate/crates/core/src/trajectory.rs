//! Foot trajectory synthesis.
//!
//! The vertical trajectory is a chain of cubic Hermite segments through five
//! (time, position, velocity) knots. Horizontal axes share one planner: the
//! support foot slides back at the commanded speed and the swing foot follows
//! a Hermite curve to a landing point chosen from the trunk speed estimate.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gait_clock::{landing_speed, takeoff_speed, GaitParams, PhaseTimeline};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("retraction ends at {end} m, not below the swing apex {apex} m")]
    KeyframeOrderViolation { end: f64, apex: f64 },
}

/// Trunk vertical speeds around the flight phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlightProfile {
    pub takeoff_speed: f64,
    /// Negative: trunk falling at touchdown.
    pub landing_speed: f64,
    pub flight_time: f64,
}

pub fn flight_profile(params: &GaitParams) -> FlightProfile {
    let up = takeoff_speed(params);
    let down = landing_speed(params);
    FlightProfile { takeoff_speed: up, landing_speed: down, flight_time: (up - down) / params.gravity }
}

/// Cubic Hermite segment on [t0, t1] matching position and velocity at both ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicHermite {
    pub t0: f64,
    pub t1: f64,
    pub p0: f64,
    pub v0: f64,
    pub p1: f64,
    pub v1: f64,
}

impl CubicHermite {
    pub fn new(t0: f64, t1: f64, p0: f64, v0: f64, p1: f64, v1: f64) -> Self {
        Self { t0, t1, p0, v0, p1, v1 }
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Position, velocity and acceleration at `t` (clamped to the segment).
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let h = self.duration();
        if h <= 0.0 {
            return (self.p0, self.v0, 0.0);
        }
        let s = ((t - self.t0) / h).clamp(0.0, 1.0);
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let p = h00 * self.p0 + h10 * h * self.v0 + h01 * self.p1 + h11 * h * self.v1;

        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        let v = (d00 * self.p0 + d01 * self.p1) / h + d10 * self.v0 + d11 * self.v1;

        let a00 = 12.0 * s - 6.0;
        let a10 = 6.0 * s - 4.0;
        let a01 = -12.0 * s + 6.0;
        let a11 = 6.0 * s - 2.0;
        let a = (a00 * self.p0 + a01 * self.p1) / (h * h) + (a10 * self.v0 + a11 * self.v1) / h;
        (p, v, a)
    }
}

/// Vertical knots of one gait cycle, times measured from touchdown.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZKeyframes {
    pub times: [f64; 5],
    pub positions: [f64; 5],
    pub velocities: [f64; 5],
}

impl ZKeyframes {
    pub fn period(&self) -> f64 {
        self.times[4]
    }

    pub fn segment(&self, i: usize) -> CubicHermite {
        CubicHermite::new(
            self.times[i],
            self.times[i + 1],
            self.positions[i],
            self.velocities[i],
            self.positions[i + 1],
            self.velocities[i + 1],
        )
    }
}

pub fn synth_z_keyframes(params: &GaitParams, timeline: &PhaseTimeline) -> Result<ZKeyframes, PlanError> {
    let g = params.gravity;
    let speed = params.speed_magnitude();
    let zs = params.landing_height;
    let touchdown = params.c2 * landing_speed(params);
    let takeoff = -speed / params.c1;
    let retract_end = params.c4 * takeoff;
    let retract_pos = zs - params.support_descent
        + (params.c4 * params.c4 - 1.0) * speed * speed / (2.0 * params.c3.abs() * g * params.c1 * params.c1);
    let apex = zs + params.swing_height;
    if retract_pos >= apex {
        return Err(PlanError::KeyframeOrderViolation { end: retract_pos, apex });
    }
    Ok(ZKeyframes {
        times: timeline.knot_times(),
        positions: [zs, zs - params.support_descent, retract_pos, apex, zs],
        velocities: [touchdown, takeoff, retract_end, 0.0, touchdown],
    })
}

/// Vertical foot position, velocity and acceleration at cycle time `t`.
pub fn eval_z(keyframes: &ZKeyframes, t: f64) -> (f64, f64, f64) {
    let t = t.clamp(0.0, keyframes.period());
    let seg = (0..4).find(|&i| t < keyframes.times[i + 1] && keyframes.times[i + 1] > keyframes.times[i]).unwrap_or(3);
    keyframes.segment(seg).eval(t)
}

/// Support-foot position along one horizontal axis.
pub fn plan_support(entry: f64, speed: f64, t: f64) -> f64 {
    entry - speed * t
}

/// Foot-placement gains shared by both horizontal axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementGains {
    /// Neutral-point factor; 1.0 places the neutral point a full stance ahead.
    pub neutral_factor: f64,
    /// Speed regulation constant (m per m/s).
    pub speed_gain: f64,
}

impl Default for PlacementGains {
    fn default() -> Self {
        Self { neutral_factor: 0.5, speed_gain: 0.03 }
    }
}

/// Everything the swing planner needs for one axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwingRequest {
    /// Position and time at which the foot leaves the ground.
    pub lift_position: f64,
    pub lift_time: f64,
    /// Time of the planned touchdown.
    pub land_time: f64,
    /// Commanded trunk speed on this axis.
    pub speed: f64,
    /// Estimated trunk speed on this axis.
    pub estimated_speed: f64,
    /// Planned support duration t_x1.
    pub support_duration: f64,
    /// Offset added to the landing target (CoM regulation on x).
    pub correction: f64,
    /// Nominal foot position on this axis (0 on x, +-a1 on y).
    pub neutral: f64,
    /// Largest allowed distance of the target from `neutral`.
    pub limit: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwingPlan {
    pub target: f64,
    pub curve: CubicHermite,
    /// Set when the raw target fell outside the workspace and was clamped.
    pub clamped: bool,
}

pub fn landing_target(req: &SwingRequest, gains: &PlacementGains) -> f64 {
    req.neutral
        + gains.neutral_factor * req.estimated_speed * req.support_duration
        + gains.speed_gain * (req.estimated_speed - req.speed)
        + req.correction
}

pub fn plan_swing(req: &SwingRequest, gains: &PlacementGains) -> SwingPlan {
    let raw = landing_target(req, gains);
    let target = raw.clamp(req.neutral - req.limit, req.neutral + req.limit);
    SwingPlan {
        target,
        curve: CubicHermite::new(req.lift_time, req.land_time, req.lift_position, -req.speed, target, -req.speed),
        clamped: target != raw,
    }
}

/// Horizontal plan of one axis over a full cycle (support then swing).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisCycle {
    pub entry: f64,
    pub speed: f64,
    pub support_duration: f64,
    pub swing: CubicHermite,
}

impl AxisCycle {
    pub fn new(entry: f64, speed: f64, support_duration: f64, period: f64, target: f64) -> Self {
        let lift = plan_support(entry, speed, support_duration);
        Self {
            entry,
            speed,
            support_duration,
            swing: CubicHermite::new(support_duration, period, lift, -speed, target, -speed),
        }
    }

    pub fn lift_position(&self) -> f64 {
        plan_support(self.entry, self.speed, self.support_duration)
    }

    pub fn with_swing(self, swing: CubicHermite) -> Self {
        Self { swing, ..self }
    }

    /// Position and velocity at cycle time `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        if t < self.support_duration {
            (plan_support(self.entry, self.speed, t), -self.speed)
        } else {
            let (p, v, _) = self.swing.eval(t);
            (p, v)
        }
    }
}

/// Rotation about body z by `angle`.
pub fn heading_rotation(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rotates a body-frame foot point for heading control: support points by
/// +omega*t, swing points by -omega*t, about the body origin.
pub fn apply_heading(p: &Vector3<f64>, omega: f64, t_phase: f64, is_support: bool) -> Vector3<f64> {
    let angle = if is_support { omega * t_phase } else { -omega * t_phase };
    heading_rotation(angle) * p
}

/// Steady open-loop plan for one leg: trunk speed equals the command and no
/// CoM correction is applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyLegPlan {
    pub keyframes: ZKeyframes,
    pub x: AxisCycle,
    pub y: AxisCycle,
}

impl SteadyLegPlan {
    pub fn new(
        params: &GaitParams,
        timeline: &PhaseTimeline,
        gains: &PlacementGains,
        lateral_speed: f64,
        neutral_y: f64,
    ) -> Result<Self, PlanError> {
        let keyframes = synth_z_keyframes(params, timeline)?;
        let axis = |speed: f64, neutral: f64| {
            let ahead = gains.neutral_factor * speed * timeline.support;
            AxisCycle::new(neutral + ahead, speed, timeline.support, timeline.period, neutral + ahead)
        };
        Ok(Self { keyframes, x: axis(params.forward_speed, 0.0), y: axis(lateral_speed, neutral_y) })
    }

    /// Hip-frame position and velocity at cycle time `t`.
    pub fn eval(&self, t: f64) -> (Vector3<f64>, Vector3<f64>) {
        let (pz, vz, _) = eval_z(&self.keyframes, t);
        let (px, vx) = self.x.eval(t);
        let (py, vy) = self.y.eval(t);
        (Vector3::new(px, py, pz), Vector3::new(vx, vy, vz))
    }
}
