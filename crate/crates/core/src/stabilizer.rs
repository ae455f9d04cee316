//! Real-time feedback on top of the planned trajectories: posture control by
//! support-foot acceleration, swing freezing on early touchdown, CoM
//! regulation from touchdown symmetry and trunk velocity estimation.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::gait_clock::PhaseKind;
use crate::kinematics::LegId;

/// Roll and pitch angles (rad) with their rates (rad/s).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Attitude {
    pub roll: f64,
    pub pitch: f64,
    pub roll_rate: f64,
    pub pitch_rate: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PostureSetpoint {
    /// Defaults to a level trunk.
    pub desired: Attitude,
    pub measured: Attitude,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostureGains {
    pub kp_pitch: f64,
    pub kd_pitch: f64,
    pub kp_roll: f64,
    pub kd_roll: f64,
    /// Hard bound on the integrated foot offset per axis (m).
    pub max_offset: f64,
}

impl Default for PostureGains {
    fn default() -> Self {
        Self { kp_pitch: 2.0, kd_pitch: 0.1, kp_roll: 2.0, kd_roll: 0.1, max_offset: 0.02 }
    }
}

/// Support-foot adjustment acceleration (x from pitch, y from roll), applied
/// equally to every support foot.
///
/// A positive pitch error (nose up) drives the feet forward so the ground
/// pushes the trunk back and pitches the nose down. About the roll axis the
/// lever arm of a lateral ground force has the opposite sign, so a positive
/// roll error drives the feet toward -y.
pub fn posture_accel(setpoint: &PostureSetpoint, gains: &PostureGains) -> Vector2<f64> {
    let (d, m) = (&setpoint.desired, &setpoint.measured);
    let pitch = gains.kp_pitch * (d.pitch - m.pitch) + gains.kd_pitch * (d.pitch_rate - m.pitch_rate);
    let roll = gains.kp_roll * (d.roll - m.roll) + gains.kd_roll * (d.roll_rate - m.roll_rate);
    Vector2::new(pitch, -roll)
}

/// Stance attitude servo gains (N/rad), shared out over the support feet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ServoGains {
    pub pitch: f64,
    pub roll: f64,
}

impl Default for ServoGains {
    fn default() -> Self {
        Self { pitch: 20.0, roll: 20.0 }
    }
}

/// Horizontal force (body frame, pushed by the foot into the ground) for one
/// of `n_support` support feet, proportional to the attitude error.
///
/// A ground force applied below the trunk turns it: pushing the feet back
/// (ground pushes the trunk forward) lifts the nose, pushing them toward +y
/// lowers the left side.
pub fn attitude_servo_force(setpoint: &PostureSetpoint, gains: &ServoGains, n_support: usize) -> Vector2<f64> {
    if n_support == 0 {
        return Vector2::zeros();
    }
    let (d, m) = (&setpoint.desired, &setpoint.measured);
    let n = n_support as f64;
    Vector2::new(gains.pitch * (d.pitch - m.pitch), -gains.roll * (d.roll - m.roll)) / n
}

/// Double integrator of the adjustment acceleration for one support foot.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AdjustState {
    pub velocity: Vector2<f64>,
    pub offset: Vector2<f64>,
    /// True if the last update hit the offset bound.
    pub clamped: bool,
    last_accel: Option<Vector2<f64>>,
}

impl AdjustState {
    /// Trapezoidal update; returns the new offset.
    pub fn integrate(&mut self, accel: Vector2<f64>, dt: f64, max_offset: f64) -> Vector2<f64> {
        let prev_accel = self.last_accel.unwrap_or(accel);
        let v_next = self.velocity + 0.5 * (prev_accel + accel) * dt;
        let mut offset = self.offset + 0.5 * (self.velocity + v_next) * dt;
        let mut velocity = v_next;
        self.clamped = false;
        for i in 0..2 {
            if offset[i].abs() > max_offset {
                offset[i] = offset[i].clamp(-max_offset, max_offset);
                if velocity[i] * offset[i] > 0.0 {
                    velocity[i] = 0.0;
                }
                self.clamped = true;
            }
        }
        self.offset = offset;
        self.velocity = velocity;
        self.last_accel = Some(accel);
        offset
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

/// Holds the swing-foot height once a swing foot touches down early.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EarlyTouchdown {
    frozen: Option<f64>,
    lifted: bool,
}

impl EarlyTouchdown {
    /// Filters the vertical command for the current phase and contact flag.
    /// Only a touchdown after the foot has left the ground in this swing
    /// counts as early.
    pub fn apply(&mut self, phase: PhaseKind, contact: bool, z_command: f64) -> f64 {
        match phase {
            PhaseKind::Support | PhaseKind::Retract => {
                self.lifted = false;
                self.frozen = None;
                z_command
            }
            PhaseKind::SwingUp | PhaseKind::SwingDown => {
                if let Some(z) = self.frozen {
                    return z;
                }
                if !contact {
                    self.lifted = true;
                } else if self.lifted {
                    self.frozen = Some(z_command);
                }
                z_command
            }
        }
    }

    pub fn frozen(&self) -> Option<f64> {
        self.frozen
    }

    /// Hands over the frozen height at stance entry and clears the latch.
    pub fn take_at_stance_entry(&mut self) -> Option<f64> {
        self.lifted = false;
        self.frozen.take()
    }
}

/// Latest touchdown y-position of each foot in the body frame.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TouchdownLog {
    y: [Option<f64>; 4],
}

impl TouchdownLog {
    pub fn record(&mut self, leg: LegId, y: f64) {
        self.y[leg.index()] = Some(y);
    }

    pub fn get(&self, leg: LegId) -> Option<f64> {
        self.y[leg.index()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComCorrection {
    pub offset: f64,
    /// Set while some foot has not touched down yet; the offset is then 0.
    pub insufficient_history: bool,
}

/// Landing-target shift that moves the CoM back onto the support line.
pub fn com_correction(log: &TouchdownLog, k_com: f64) -> ComCorrection {
    let all = [LegId::LeftFore, LegId::RightFore, LegId::LeftHind, LegId::RightHind].map(|l| log.get(l));
    match all {
        [Some(lf), Some(rf), Some(lh), Some(rh)] => {
            ComCorrection { offset: k_com * (lh - lf + rf - rh), insufficient_history: false }
        }
        _ => ComCorrection { offset: 0.0, insufficient_history: true },
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct VelocityEstimate {
    /// Trunk velocity in the body frame (m/s).
    pub velocity: Vector2<f64>,
    /// Set when no foot supported the trunk on the last update.
    pub stale: bool,
}

/// Trunk velocity from support-foot velocities under a no-slip assumption,
/// smoothed by a first-order low-pass filter.
#[derive(Clone, Copy, Debug)]
pub struct VelocityEstimator {
    time_constant: f64,
    estimate: VelocityEstimate,
}

impl VelocityEstimator {
    pub fn new(cutoff_hz: f64) -> Self {
        Self { time_constant: 1.0 / (2.0 * std::f64::consts::PI * cutoff_hz), estimate: VelocityEstimate::default() }
    }

    pub fn time_constant(&self) -> f64 {
        self.time_constant
    }

    pub fn current(&self) -> VelocityEstimate {
        self.estimate
    }

    /// `support_velocities` are body-frame velocities of the feet in contact.
    pub fn update(&mut self, support_velocities: &[Vector2<f64>], dt: f64) -> VelocityEstimate {
        if support_velocities.is_empty() {
            self.estimate.stale = true;
            return self.estimate;
        }
        let sum: Vector2<f64> = support_velocities.iter().sum();
        let raw = -sum / support_velocities.len() as f64;
        let alpha = 1.0 - (-dt / self.time_constant).exp();
        self.estimate.velocity += alpha * (raw - self.estimate.velocity);
        self.estimate.stale = false;
        self.estimate
    }
}

impl Default for VelocityEstimator {
    fn default() -> Self {
        Self::new(10.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn setpoint(pitch: f64, roll: f64) -> PostureSetpoint {
        PostureSetpoint { desired: Attitude::default(), measured: Attitude { roll, pitch, ..Default::default() } }
    }

    #[test]
    fn servo_torque_opposes_tilt() {
        let gains = ServoGains::default();
        let foot = nalgebra::Vector3::new(0.08, -0.07, -0.13);
        for (pitch, roll) in [(0.1, 0.0), (-0.1, 0.0), (0.0, 0.1), (0.0, -0.1), (0.05, -0.07)] {
            let f = attitude_servo_force(&setpoint(pitch, roll), &gains, 2);
            let reaction = -nalgebra::Vector3::new(f.x, f.y, 0.0);
            let tau = foot.cross(&reaction);
            assert!(tau.x * roll <= 0.0 && tau.y * pitch <= 0.0, "{pitch} {roll}: {tau:?}");
        }
        assert_eq!(attitude_servo_force(&setpoint(0.1, 0.1), &gains, 0), Vector2::zeros());
        let one = attitude_servo_force(&setpoint(0.1, 0.0), &gains, 1);
        let two = attitude_servo_force(&setpoint(0.1, 0.0), &gains, 2);
        assert_abs_diff_eq!(one, two * 2.0, epsilon = 1e-12);
    }

    #[test]
    fn posture_accel_cases() {
        let gains = PostureGains::default();
        assert_eq!(posture_accel(&PostureSetpoint::default(), &gains), Vector2::zeros());
        // Pitch error +0.05 rad means measured pitch -0.05.
        let a = posture_accel(&setpoint(-0.05, 0.0), &gains);
        assert_abs_diff_eq!(a.x, 0.10, epsilon = 1e-15);
        assert_eq!(a.y, 0.0);
        let zero = PostureGains { kp_pitch: 0.0, kd_pitch: 0.0, kp_roll: 0.0, kd_roll: 0.0, ..gains };
        assert_eq!(posture_accel(&setpoint(0.3, -0.2), &zero), Vector2::zeros());
    }

    #[test]
    fn adjust_from_rest() {
        let mut s = AdjustState::default();
        for _ in 0..100 {
            s.integrate(Vector2::new(0.1, 0.0), 1e-3, 0.02);
        }
        assert_abs_diff_eq!(s.offset.x, 5.0e-4, epsilon = 1e-12);
        assert!(!s.clamped);
    }

    #[test]
    fn adjust_saturates_and_resets() {
        let mut s = AdjustState::default();
        let mut peak: f64 = 0.0;
        for _ in 0..5000 {
            peak = peak.max(s.integrate(Vector2::new(1.0, -1.0), 1e-3, 0.02).x);
        }
        assert_eq!(peak, 0.02);
        assert_eq!(s.offset, Vector2::new(0.02, -0.02));
        assert!(s.clamped);
        s.reset();
        assert_eq!(s, AdjustState::default());
    }

    #[test]
    fn early_touchdown_freezes_z() {
        let mut guard = EarlyTouchdown::default();
        // Stance and retraction never freeze.
        assert_eq!(guard.apply(PhaseKind::Support, true, -0.14), -0.14);
        assert_eq!(guard.apply(PhaseKind::Retract, true, -0.13), -0.13);
        // Still on the ground when the swing starts: not an early touchdown.
        assert_eq!(guard.apply(PhaseKind::SwingUp, true, -0.12), -0.12);
        assert_eq!(guard.apply(PhaseKind::SwingUp, false, -0.11), -0.11);
        assert_eq!(guard.apply(PhaseKind::SwingDown, false, -0.12), -0.12);
        // Contact at 90% of the swing holds the command.
        assert_eq!(guard.apply(PhaseKind::SwingDown, true, -0.135), -0.135);
        assert_eq!(guard.apply(PhaseKind::SwingDown, true, -0.138), -0.135);
        assert_eq!(guard.apply(PhaseKind::SwingDown, false, -0.139), -0.135);
        assert_eq!(guard.take_at_stance_entry(), Some(-0.135));
        assert_eq!(guard.apply(PhaseKind::Support, true, -0.14), -0.14);
    }

    #[test]
    fn no_early_contact_passes_through() {
        let mut guard = EarlyTouchdown::default();
        for i in 0..10 {
            let z = -0.1 - 0.001 * f64::from(i);
            assert_eq!(guard.apply(PhaseKind::SwingDown, false, z), z);
        }
        assert_eq!(guard.take_at_stance_entry(), None);
    }

    fn log(lf: f64, rf: f64, lh: f64, rh: f64) -> TouchdownLog {
        let mut log = TouchdownLog::default();
        log.record(LegId::LeftFore, lf);
        log.record(LegId::RightFore, rf);
        log.record(LegId::LeftHind, lh);
        log.record(LegId::RightHind, rh);
        log
    }

    #[test]
    fn com_correction_cases() {
        assert_eq!(com_correction(&log(0.05, -0.05, 0.05, -0.05), 0.1).offset, 0.0);
        let c = com_correction(&log(0.08, -0.08, 0.09, -0.09), 0.1);
        assert_abs_diff_eq!(c.offset, 0.002, epsilon = 1e-15);
        assert_eq!(com_correction(&log(0.08, -0.08, 0.09, -0.09), 0.0).offset, 0.0);
        let mut partial = TouchdownLog::default();
        partial.record(LegId::LeftFore, 0.1);
        let c = com_correction(&partial, 0.1);
        assert!(c.insufficient_history);
        assert_eq!(c.offset, 0.0);
    }

    #[test]
    fn velocity_from_support_feet() {
        let mut est = VelocityEstimator::default();
        let feet = [Vector2::new(-0.8, 0.0), Vector2::new(-0.8, 0.0)];
        for _ in 0..2000 {
            est.update(&feet, 1e-3);
        }
        assert_abs_diff_eq!(est.current().velocity, Vector2::new(0.8, 0.0), epsilon = 1e-9);
        let held = est.update(&[], 1e-3);
        assert!(held.stale);
        assert_abs_diff_eq!(held.velocity, Vector2::new(0.8, 0.0), epsilon = 1e-9);
    }

    #[test]
    fn filter_step_response() {
        // First-order oracle: y(3 tau) = 1 - e^-3 = 0.9502.
        let dt = 1e-4;
        let mut est = VelocityEstimator::new(10.0);
        let steps = (3.0 * est.time_constant() / dt).round() as usize;
        for _ in 0..steps {
            est.update(&[Vector2::new(-1.0, 0.0)], dt);
        }
        let y = est.current().velocity.x;
        assert!(y >= 0.95);
        assert_abs_diff_eq!(y, 1.0 - (-3.0f64).exp(), epsilon = 2e-3);
    }

    proptest! {
        #[test]
        fn posture_is_linear(p1 in -1.0f64..1.0, r1 in -1.0f64..1.0, p2 in -1.0f64..1.0, r2 in -1.0f64..1.0, k in -3.0f64..3.0) {
            let gains = PostureGains::default();
            let a = posture_accel(&setpoint(p1, r1), &gains);
            let b = posture_accel(&setpoint(p2, r2), &gains);
            let sum = posture_accel(&setpoint(p1 + k * p2, r1 + k * r2), &gains);
            prop_assert!((sum - (a + k * b)).amax() < 1e-12);
        }

        #[test]
        fn com_correction_flips_front_rear(lf in -0.2f64..0.2, rf in -0.2f64..0.2, lh in -0.2f64..0.2, rh in -0.2f64..0.2) {
            let a = com_correction(&log(lf, rf, lh, rh), 0.1).offset;
            let b = com_correction(&log(lh, rh, lf, rf), 0.1).offset;
            prop_assert!((a + b).abs() < 1e-15);
        }

        #[test]
        fn adjust_never_exceeds_bound(accels in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 1..400)) {
            let mut s = AdjustState::default();
            for (ax, ay) in accels {
                let off = s.integrate(Vector2::new(ax, ay), 1e-3, 0.02);
                prop_assert!(off.x.abs() <= 0.02 && off.y.abs() <= 0.02);
            }
        }
    }
}
