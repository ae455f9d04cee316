//! Leg geometry, frames and 3-DOF leg kinematics.
//!
//! Frames: x forward, z up, y to the left. Each hip frame is the body frame
//! translated to the leg mount point. In the zero pose the leg hangs straight
//! down and the hip link points laterally outward (+y on left legs, -y on
//! right legs). The roll joint turns about +x, both pitch joints about +y with
//! positive pitch swinging the foot forward.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Trunk and link dimensions plus mass and gravity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotGeometry {
    /// Fore-to-hind hip spacing (m).
    pub body_length: f64,
    /// Lateral spacing of the fore hips (m).
    pub shoulder_width: f64,
    /// Lateral spacing of the hind hips (m).
    pub hip_width: f64,
    /// Hip (roll) link, lateral offset to the pitch joints (m).
    pub hip_link: f64,
    pub thigh: f64,
    pub crus: f64,
    /// Total robot mass (kg).
    pub mass: f64,
    /// Gravitational acceleration magnitude (m/s^2).
    pub gravity: f64,
}

impl Default for RobotGeometry {
    fn default() -> Self {
        Self {
            body_length: 0.167,
            shoulder_width: 0.162,
            hip_width: 0.142,
            hip_link: 0.046,
            thigh: 0.066,
            crus: 0.065,
            mass: 1.9,
            gravity: 9.81,
        }
    }
}

impl RobotGeometry {
    pub fn validate(&self) -> Result<(), KinematicsError> {
        let checks = [
            ("geometry.L", self.body_length),
            ("geometry.W1", self.shoulder_width),
            ("geometry.W2", self.hip_width),
            ("geometry.a1", self.hip_link),
            ("geometry.a2", self.thigh),
            ("geometry.a3", self.crus),
            ("robot.mass", self.mass),
            ("world.gravity", self.gravity),
        ];
        for (name, value) in checks {
            if !(value > 0.0 && value.is_finite()) {
                return Err(KinematicsError::InvalidGeometry(name));
            }
        }
        Ok(())
    }

    /// Weight of the robot (N).
    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }

    /// Radius of the sphere bounding every reachable foot position.
    pub fn reach_bound(&self) -> f64 {
        self.hip_link + self.thigh + self.crus
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LegId {
    LeftFore,
    RightFore,
    LeftHind,
    RightHind,
}

impl LegId {
    pub const ALL: [LegId; 4] = [LegId::LeftFore, LegId::RightFore, LegId::LeftHind, LegId::RightHind];

    /// 1-based leg number (LF=1, RF=2, LH=3, RH=4).
    pub fn number(self) -> usize {
        self.index() + 1
    }

    pub fn index(self) -> usize {
        match self {
            LegId::LeftFore => 0,
            LegId::RightFore => 1,
            LegId::LeftHind => 2,
            LegId::RightHind => 3,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            LegId::LeftFore => "lf",
            LegId::RightFore => "rf",
            LegId::LeftHind => "lh",
            LegId::RightHind => "rh",
        }
    }

    pub fn from_short_name(name: &str) -> Option<LegId> {
        LegId::ALL.into_iter().find(|leg| leg.short_name() == name)
    }

    pub fn is_fore(self) -> bool {
        matches!(self, LegId::LeftFore | LegId::RightFore)
    }

    /// +1 for left legs, -1 for right legs.
    pub fn side(self) -> f64 {
        match self {
            LegId::LeftFore | LegId::LeftHind => 1.0,
            LegId::RightFore | LegId::RightHind => -1.0,
        }
    }

    pub fn group(self) -> LegGroup {
        match self {
            LegId::LeftFore | LegId::RightHind => LegGroup::L,
            LegId::RightFore | LegId::LeftHind => LegGroup::R,
        }
    }
}

/// Diagonal pairs that move in sync during a trot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LegGroup {
    /// Left fore and right hind.
    L,
    /// Right fore and left hind.
    R,
}

impl LegGroup {
    pub fn legs(self) -> [LegId; 2] {
        match self {
            LegGroup::L => [LegId::LeftFore, LegId::RightHind],
            LegGroup::R => [LegId::RightFore, LegId::LeftHind],
        }
    }

    pub fn other(self) -> LegGroup {
        match self {
            LegGroup::L => LegGroup::R,
            LegGroup::R => LegGroup::L,
        }
    }
}

/// Roll, hip pitch and knee pitch (rad).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct JointAngles {
    pub roll: f64,
    pub hip_pitch: f64,
    pub knee_pitch: f64,
}

impl JointAngles {
    pub fn new(roll: f64, hip_pitch: f64, knee_pitch: f64) -> Self {
        Self { roll, hip_pitch, knee_pitch }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.roll, self.hip_pitch, self.knee_pitch)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointLimits {
    pub roll: (f64, f64),
    pub pitch: (f64, f64),
}

impl Default for JointLimits {
    fn default() -> Self {
        use std::f64::consts::{FRAC_PI_2, PI};
        Self { roll: (-FRAC_PI_2, FRAC_PI_2), pitch: (-PI, PI) }
    }
}

impl JointLimits {
    pub fn contains(&self, q: &JointAngles) -> bool {
        let within = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
        within(q.roll, self.roll) && within(q.hip_pitch, self.pitch) && within(q.knee_pitch, self.pitch)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    Body,
    Hip,
}

/// A foot position and velocity tagged with the frame it is expressed in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FootPoint {
    pub frame: Frame,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
}

impl FootPoint {
    pub fn at(frame: Frame, position: Vector3<f64>) -> Self {
        Self { frame, position, velocity: Vector3::zeros() }
    }

    pub fn to_body(self, leg: LegId, geometry: &RobotGeometry) -> FootPoint {
        match self.frame {
            Frame::Body => self,
            Frame::Hip => FootPoint {
                frame: Frame::Body,
                position: self.position + hip_origin(leg, geometry).position,
                velocity: self.velocity,
            },
        }
    }

    pub fn to_hip(self, leg: LegId, geometry: &RobotGeometry) -> FootPoint {
        match self.frame {
            Frame::Hip => self,
            Frame::Body => FootPoint {
                frame: Frame::Hip,
                position: self.position - hip_origin(leg, geometry).position,
                velocity: self.velocity,
            },
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("foot target {0:?} lies outside the leg workspace")]
    Unreachable([f64; 3]),
    #[error("geometry value {0} must be positive and finite")]
    InvalidGeometry(&'static str),
}

/// IK result; `near_singular` marks a leg within 1e-6 rad of full extension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IkSolution {
    pub angles: JointAngles,
    pub near_singular: bool,
}

const SINGULAR_TOLERANCE: f64 = 1e-6;

/// Hip mount point in the body frame.
pub fn hip_origin(leg: LegId, geometry: &RobotGeometry) -> FootPoint {
    let x = if leg.is_fore() { geometry.body_length / 2.0 } else { -geometry.body_length / 2.0 };
    let half_width = if leg.is_fore() { geometry.shoulder_width / 2.0 } else { geometry.hip_width / 2.0 };
    FootPoint::at(Frame::Body, Vector3::new(x, leg.side() * half_width, 0.0))
}

/// Neutral lateral foot position in the hip frame. Every foot stands at the
/// same body-frame |y|, so both diagonal support lines cross the trunk
/// center even though the shoulders are wider than the hips.
pub fn neutral_foot_y(leg: LegId, geometry: &RobotGeometry) -> f64 {
    let half_stance = (geometry.shoulder_width + geometry.hip_width) / 4.0 + geometry.hip_link;
    leg.side() * half_stance - hip_origin(leg, geometry).position.y
}

/// Foot position in the sagittal plane of the leg, before the roll joint:
/// (forward offset, downward-negative height).
fn sagittal(q: &JointAngles, geometry: &RobotGeometry) -> (f64, f64) {
    let q23 = q.hip_pitch + q.knee_pitch;
    let x = geometry.thigh * q.hip_pitch.sin() + geometry.crus * q23.sin();
    let z = -(geometry.thigh * q.hip_pitch.cos() + geometry.crus * q23.cos());
    (x, z)
}

/// Foot position in the hip frame.
pub fn fk_foot(leg: LegId, q: &JointAngles, geometry: &RobotGeometry) -> FootPoint {
    let (x, z) = sagittal(q, geometry);
    let y = leg.side() * geometry.hip_link;
    let (s1, c1) = q.roll.sin_cos();
    FootPoint::at(Frame::Hip, Vector3::new(x, c1 * y - s1 * z, s1 * y + c1 * z))
}

/// Inverse kinematics on the knee-backward branch (knee pitch >= 0).
pub fn ik_leg(leg: LegId, target: &Vector3<f64>, geometry: &RobotGeometry) -> Result<IkSolution, KinematicsError> {
    let unreachable = || KinematicsError::Unreachable([target.x, target.y, target.z]);
    let (a1, a2, a3) = (geometry.hip_link, geometry.thigh, geometry.crus);
    let lateral = leg.side() * a1;

    let yz_sq = target.y * target.y + target.z * target.z;
    let plane_sq = yz_sq - a1 * a1;
    if plane_sq < 0.0 {
        return Err(unreachable());
    }
    // Sagittal height is taken below the roll axis.
    let z_plane = -plane_sq.sqrt();
    let roll = target.z.atan2(target.y) - z_plane.atan2(lateral);
    let roll = wrap_angle(roll);

    let reach_sq = target.x * target.x + z_plane * z_plane;
    let cos_knee = (reach_sq - a2 * a2 - a3 * a3) / (2.0 * a2 * a3);
    let slack = 1e-12;
    if !(-1.0 - slack..=1.0 + slack).contains(&cos_knee) {
        return Err(unreachable());
    }
    let knee = cos_knee.clamp(-1.0, 1.0).acos();
    let hip = target.x.atan2(-z_plane) - (a3 * knee.sin()).atan2(a2 + a3 * knee.cos());

    Ok(IkSolution {
        angles: JointAngles::new(roll, wrap_angle(hip), knee),
        near_singular: knee.abs() < SINGULAR_TOLERANCE,
    })
}

/// Like [`ik_leg`] but first pulls an unreachable target radially back onto
/// the workspace. The flag reports whether the target was moved.
pub fn ik_leg_clamped(leg: LegId, target: &Vector3<f64>, geometry: &RobotGeometry) -> (IkSolution, bool) {
    if let Ok(sol) = ik_leg(leg, target, geometry) {
        return (sol, false);
    }
    let (a1, a2, a3) = (geometry.hip_link, geometry.thigh, geometry.crus);
    let lateral = leg.side() * a1;
    // Decompose into roll-plane height and sagittal offset, then clamp each.
    let yz = (target.y * target.y + target.z * target.z).sqrt();
    let plane = (yz * yz - a1 * a1).max(0.0).sqrt();
    let roll = if yz > 0.0 { target.z.atan2(target.y) - (-plane).atan2(lateral) } else { 0.0 };
    let max_reach = (a2 + a3) * (1.0 - 1e-12);
    let min_reach = (a2 - a3).abs() * (1.0 + 1e-12) + 1e-12;
    let reach = (target.x * target.x + plane * plane).sqrt();
    let scale = if reach > max_reach {
        max_reach / reach
    } else if reach < min_reach {
        if reach > 0.0 {
            min_reach / reach
        } else {
            0.0
        }
    } else {
        1.0
    };
    let (x, z_plane) = if scale == 0.0 { (0.0, -min_reach) } else { (target.x * scale, -plane * scale) };
    let q = JointAngles::new(wrap_angle(roll), 0.0, 0.0);
    let (s1, c1) = q.roll.sin_cos();
    let projected = Vector3::new(x, c1 * lateral - s1 * z_plane, s1 * lateral + c1 * z_plane);
    let sol = ik_leg(leg, &projected, geometry).unwrap_or(IkSolution { angles: q, near_singular: true });
    (sol, true)
}

/// Foot-velocity Jacobian in the hip frame; column i is d(foot)/d(q_i).
pub fn jacobian(leg: LegId, q: &JointAngles, geometry: &RobotGeometry) -> Matrix3<f64> {
    let p = fk_foot(leg, q, geometry).position;
    let (x, z) = sagittal(q, geometry);
    let q23 = q.hip_pitch + q.knee_pitch;
    let (s1, c1) = q.roll.sin_cos();

    let dx_dq2 = -z;
    let dz_dq2 = x;
    let dx_dq3 = geometry.crus * q23.cos();
    let dz_dq3 = geometry.crus * q23.sin();

    Matrix3::new(0.0, dx_dq2, dx_dq3, -p.z, -s1 * dz_dq2, -s1 * dz_dq3, p.y, c1 * dz_dq2, c1 * dz_dq3)
}

fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut a = (a + PI).rem_euclid(2.0 * PI) - PI;
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}
