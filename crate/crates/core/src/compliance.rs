//! Leg virtual-model compliance: virtual spring-damper forces, gravity
//! compensation, resonance-matched vertical gains and the force-to-torque map.
//!
//! Foot forces follow the convention "force the foot applies to the ground",
//! so a supporting leg has a negative z force.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::kinematics::RobotGeometry;

/// Per-axis stiffness (N/m) and damping (N s/m) of one leg.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VirtualGains {
    pub kp: Vector3<f64>,
    pub kd: Vector3<f64>,
}

impl VirtualGains {
    /// Horizontal gains are the vertical gains scaled by `xy_scale`.
    pub fn from_vertical(kp_z: f64, kd_z: f64, xy_scale: f64) -> Self {
        Self {
            kp: Vector3::new(kp_z * xy_scale, kp_z * xy_scale, kp_z),
            kd: Vector3::new(kd_z * xy_scale, kd_z * xy_scale, kd_z),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { kp: self.kp * factor, kd: self.kd * factor }
    }
}

/// The vertical oscillator behind a gain choice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplianceTuning {
    pub effective_mass: f64,
    pub damping_ratio: f64,
    pub natural_freq: f64,
    pub damped_freq: f64,
    pub kp: f64,
    pub kd: f64,
}

/// Picks (k_p,z, k_d,z) so the damped half period equals the support time.
pub fn tune_vertical_gains(support: f64, effective_mass: f64, damping_ratio: f64) -> ComplianceTuning {
    let damped_freq = std::f64::consts::PI / support;
    let natural_freq = damped_freq / (1.0 - damping_ratio * damping_ratio).sqrt();
    let kp = effective_mass * natural_freq * natural_freq;
    let kd = 2.0 * damping_ratio * (kp * effective_mass).sqrt();
    ComplianceTuning { effective_mass, damping_ratio, natural_freq, damped_freq, kp, kd }
}

pub fn virtual_force(
    p_desired: &Vector3<f64>,
    v_desired: &Vector3<f64>,
    p_foot: &Vector3<f64>,
    v_foot: &Vector3<f64>,
    gains: &VirtualGains,
) -> Vector3<f64> {
    gains.kp.component_mul(&(p_desired - p_foot)) + gains.kd.component_mul(&(v_desired - v_foot))
}

/// Weight share carried by each of `n_support` feet (N, magnitude).
pub fn gravity_comp(n_support: usize, geometry: &RobotGeometry) -> f64 {
    if n_support == 0 {
        0.0
    } else {
        geometry.weight() / n_support as f64
    }
}

pub fn map_to_torques(jacobian: &Matrix3<f64>, force: &Vector3<f64>) -> Vector3<f64> {
    jacobian.transpose() * force
}

pub fn clamp_torques(torques: &Vector3<f64>, limit: f64) -> Vector3<f64> {
    torques.map(|t| t.clamp(-limit, limit))
}

/// Desired foot force of one leg with its parts and joint torques.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct FootForceCommand {
    pub virtual_force: Vector3<f64>,
    pub gravity_comp: f64,
    pub force: Vector3<f64>,
    pub torques: Vector3<f64>,
}

impl FootForceCommand {
    /// Virtual force plus a downward push carrying `gravity_comp` newtons.
    pub fn compose(virtual_force: Vector3<f64>, gravity_comp: f64, jacobian: &Matrix3<f64>) -> Self {
        let force = virtual_force - Vector3::new(0.0, 0.0, gravity_comp);
        Self { virtual_force, gravity_comp, force, torques: map_to_torques(jacobian, &force) }
    }
}
