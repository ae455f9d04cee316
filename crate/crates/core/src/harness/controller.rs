//! Closed-loop controller: gait clock, foot planning, stabilizer and leg
//! compliance combined into per-tick foot commands.

use nalgebra::{Vector2, Vector3};

use super::config::{GaitMode, Scenario};
use super::HarnessError;
use crate::compliance::{gravity_comp, tune_vertical_gains, virtual_force, FootForceCommand, VirtualGains};
use crate::gait_clock::{derive_timeline, phase_in_cycle, GaitParams, PhaseKind, PhaseTimeline};
use crate::kinematics::{hip_origin, jacobian, neutral_foot_y, LegGroup, LegId, RobotGeometry};
use crate::simulator::{FootCommand, SensorSample};
use crate::stabilizer::{
    attitude_servo_force, com_correction, posture_accel, AdjustState, Attitude, EarlyTouchdown, PostureSetpoint,
    TouchdownLog, VelocityEstimator,
};
use crate::trajectory::{apply_heading, eval_z, plan_swing, synth_z_keyframes, AxisCycle, SwingRequest, ZKeyframes};

/// Largest landing-target distance from the neutral point (m).
const PLACEMENT_LIMIT: f64 = 0.08;

/// Gait state of one diagonal pair, latched at its stance entry.
#[derive(Clone, Copy, Debug)]
struct GroupClock {
    cycle_start: f64,
    speed: f64,
    timeline: PhaseTimeline,
    keyframes: ZKeyframes,
    gains: VirtualGains,
}

#[derive(Clone, Copy, Debug)]
struct LegState {
    x: AxisCycle,
    y: AxisCycle,
    swing_planned: bool,
    adjust: AdjustState,
    early: EarlyTouchdown,
    /// Height offset left by an early touchdown, faded out over the stance.
    z_fade: f64,
    contact: bool,
}

/// Per-leg output of one control tick.
#[derive(Clone, Copy, Debug)]
pub struct LegOutput {
    pub phase: PhaseKind,
    /// Desired foot position, body frame.
    pub desired: Vector3<f64>,
    pub force: FootForceCommand,
}

#[derive(Clone, Copy, Debug)]
pub struct ControlOutput {
    pub commands: [FootCommand; 4],
    pub legs: [LegOutput; 4],
    /// Commanded forward speed and yaw rate.
    pub vx_command: f64,
    pub wz_command: f64,
    /// Estimated trunk velocity, body frame.
    pub velocity_estimate: Vector2<f64>,
}

pub struct Controller {
    scenario: Scenario,
    groups: [GroupClock; 2],
    legs: [LegState; 4],
    estimator: VelocityEstimator,
    touchdowns: TouchdownLog,
}

fn group_slot(group: LegGroup) -> usize {
    match group {
        LegGroup::L => 0,
        LegGroup::R => 1,
    }
}

impl Controller {
    pub fn new(scenario: &Scenario) -> Result<Self, HarnessError> {
        let speed = if scenario.gait_mode == GaitMode::Stand { 0.0 } else { scenario.command_vx_at(0.0) };
        let period = scenario.gait.period();
        let group = |start: f64| Self::latch(scenario, start, speed);
        let groups = [group(0.0)?, group(-period / 2.0)?];
        let legs = LegId::ALL.map(|leg| {
            let g = &groups[group_slot(leg.group())];
            let tl = &g.timeline;
            let pl = &scenario.stabilizer.placement;
            let ahead = pl.neutral_factor * g.speed * tl.support;
            let neutral_y = neutral_foot_y(leg, &scenario.geometry);
            LegState {
                x: AxisCycle::new(ahead, g.speed, tl.support, tl.period, ahead),
                y: AxisCycle::new(neutral_y, 0.0, tl.support, tl.period, neutral_y),
                swing_planned: true,
                adjust: AdjustState::default(),
                early: EarlyTouchdown::default(),
                z_fade: 0.0,
                contact: true,
            }
        });
        Ok(Self {
            scenario: scenario.clone(),
            groups,
            legs,
            estimator: VelocityEstimator::new(scenario.stabilizer.cutoff_hz),
            touchdowns: TouchdownLog::default(),
        })
    }

    fn params(scenario: &Scenario, speed: f64) -> GaitParams {
        GaitParams { gravity: scenario.geometry.gravity, ..scenario.gait.with_speed(speed) }
    }

    fn latch(scenario: &Scenario, cycle_start: f64, speed: f64) -> Result<GroupClock, HarnessError> {
        let params = Self::params(scenario, speed);
        let invalid = |e: String| HarnessError::Validation(format!("gait plan at vx = {speed}: {e}"));
        let mut timeline = derive_timeline(&params).map_err(|e| invalid(e.to_string()))?;
        let (support, legs) = match scenario.gait_mode {
            GaitMode::Trot => (timeline.support, 2.0),
            GaitMode::Stand => {
                timeline.support = timeline.period / 2.0;
                (timeline.support, 4.0)
            }
        };
        let keyframes = synth_z_keyframes(&params, &timeline).map_err(|e| invalid(e.to_string()))?;
        let tuning = tune_vertical_gains(support, scenario.geometry.mass / legs, scenario.compliance.zeta);
        Ok(GroupClock {
            cycle_start,
            speed,
            timeline,
            keyframes,
            gains: VirtualGains::from_vertical(tuning.kp, tuning.kd, scenario.compliance.kp_xy_scale),
        })
    }

    pub fn geometry(&self) -> &RobotGeometry {
        &self.scenario.geometry
    }

    pub fn step(&mut self, sample: &SensorSample, dt: f64) -> Result<ControlOutput, HarnessError> {
        let t = sample.time;
        let sc = &self.scenario;
        let geometry = sc.geometry;
        let stand = sc.gait_mode == GaitMode::Stand;
        let stabilize = sc.stabilizer.enable;
        // The four-leg stance holds posture on the leg springs alone.
        let adjust_posture = stabilize && !stand;
        let vx_command = if stand { 0.0 } else { sc.command_vx_at(t) };
        let wz_command = if stand { 0.0 } else { sc.command_wz_at(t) };

        // Velocity estimate from feet currently on the ground. A planted foot
        // moves in the body frame by -(v + w x p).
        let support_vel: Vec<Vector2<f64>> = (0..4)
            .filter(|&i| sample.contacts[i])
            .map(|i| (sample.foot_velocities[i] + sample.rates.cross(&sample.foot_positions[i])).xy())
            .collect();
        let estimate = self.estimator.update(&support_vel, dt).velocity;

        for leg in LegId::ALL {
            let i = leg.index();
            if sample.contacts[i] && !self.legs[i].contact {
                self.touchdowns.record(leg, sample.foot_positions[i].y);
            }
            self.legs[i].contact = sample.contacts[i];
        }

        // Start new cycles.
        for slot in 0..2 {
            let period = self.groups[slot].timeline.period;
            if !stand && t - self.groups[slot].cycle_start >= period - 1e-12 {
                let start = self.groups[slot].cycle_start + period;
                self.groups[slot] = Self::latch(&self.scenario, start, vx_command)?;
                let g = self.groups[slot];
                let group = if slot == 0 { LegGroup::L } else { LegGroup::R };
                for leg in group.legs() {
                    let s = &mut self.legs[leg.index()];
                    let (tx, ty) = (s.x.swing.p1, s.y.swing.p1);
                    s.x = AxisCycle::new(tx, g.speed, g.timeline.support, g.timeline.period, tx);
                    s.y = AxisCycle::new(ty, 0.0, g.timeline.support, g.timeline.period, ty);
                    s.swing_planned = false;
                    s.adjust.reset();
                    let frozen = s.early.take_at_stance_entry();
                    s.z_fade = frozen.map_or(0.0, |z| z - g.keyframes.positions[0]);
                }
            }
        }

        let attitude =
            Attitude { roll: sample.roll, pitch: sample.pitch, roll_rate: sample.rates.x, pitch_rate: sample.rates.y };
        let setpoint = PostureSetpoint { desired: Attitude::default(), measured: attitude };
        let accel = posture_accel(&setpoint, &sc.posture);
        let correction = if stabilize { com_correction(&self.touchdowns, sc.stabilizer.k_com).offset } else { 0.0 };

        let phases = LegId::ALL.map(|leg| {
            let g = &self.groups[group_slot(leg.group())];
            if stand {
                PhaseKind::Support
            } else {
                phase_in_cycle(&g.timeline, t - g.cycle_start).kind
            }
        });
        let n_support = phases.iter().filter(|p| p.is_support()).count();
        let comp = if sc.compliance.enable { gravity_comp(n_support, &geometry) } else { 0.0 };

        let mut commands = [FootCommand::default(); 4];
        let mut outputs =
            [LegOutput { phase: PhaseKind::Support, desired: Vector3::zeros(), force: FootForceCommand::default() }; 4];
        for leg in LegId::ALL {
            let i = leg.index();
            let g = self.groups[group_slot(leg.group())];
            let tl = g.timeline;
            let tau = if stand { 0.0 } else { (t - g.cycle_start).clamp(0.0, tl.period) };
            let phase = phases[i];
            let s = &mut self.legs[i];

            if phase.is_support() && adjust_posture {
                s.adjust.integrate(accel, dt, sc.posture.max_offset);
            }
            let (adj, adj_vel) = if phase.is_support() && adjust_posture {
                (s.adjust.offset, s.adjust.velocity)
            } else {
                (Vector2::zeros(), Vector2::zeros())
            };

            if !stand && !phase.is_support() && !s.swing_planned {
                let request =
                    |axis: &AxisCycle, lift_extra: f64, speed: f64, est: f64, corr: f64, neutral: f64| SwingRequest {
                        lift_position: axis.lift_position() + lift_extra,
                        lift_time: tl.support,
                        land_time: tl.period,
                        speed,
                        estimated_speed: est,
                        support_duration: tl.support,
                        correction: corr,
                        neutral,
                        limit: PLACEMENT_LIMIT,
                    };
                let pl = &sc.stabilizer.placement;
                let lift_adj = if stabilize { s.adjust.offset } else { Vector2::zeros() };
                let px = plan_swing(&request(&s.x, lift_adj.x, g.speed, estimate.x, correction, 0.0), pl);
                let py =
                    plan_swing(&request(&s.y, lift_adj.y, 0.0, estimate.y, 0.0, neutral_foot_y(leg, &geometry)), pl);
                s.x = s.x.with_swing(px.curve);
                s.y = s.y.with_swing(py.curve);
                s.swing_planned = true;
            }

            let (mut pz, mut vz) = if stand {
                (g.keyframes.positions[0], 0.0)
            } else {
                let (p, v, _) = eval_z(&g.keyframes, tau);
                (p, v)
            };
            if phase == PhaseKind::Support && s.z_fade != 0.0 && tl.support > 0.0 {
                let w = 1.0 - tau / tl.support;
                pz += s.z_fade * w;
                vz -= s.z_fade / tl.support;
            }
            if stabilize {
                let filtered = s.early.apply(phase, sample.contacts[i], pz);
                if filtered != pz {
                    vz = 0.0;
                }
                pz = filtered;
            }
            let (px, vx) = s.x.eval(tau);
            let (py, vy) = s.y.eval(tau);
            let hip = hip_origin(leg, &geometry).position;
            let p_body = hip + Vector3::new(px + adj.x, py + adj.y, pz);
            let v_body = Vector3::new(vx + adj_vel.x, vy + adj_vel.y, vz);

            // Support feet sweep opposite to the desired turn so the trunk yaws with it.
            let omega = -wz_command;
            let swing_time = tl.period - tl.support;
            let (t_phase, rate) = if phase.is_support() || stand {
                (tau - tl.support / 2.0, omega)
            } else if swing_time > 0.0 {
                let k = tl.support / swing_time;
                (k * (tau - tl.support - swing_time / 2.0), -omega * k)
            } else {
                (0.0, 0.0)
            };
            let support_like = phase.is_support() || stand;
            let desired = apply_heading(&p_body, omega, t_phase, support_like);
            let desired_vel =
                apply_heading(&v_body, omega, t_phase, support_like) + Vector3::z().cross(&desired) * rate;

            let force = if sc.compliance.enable {
                let mut vf = virtual_force(
                    &desired,
                    &desired_vel,
                    &sample.foot_positions[i],
                    &sample.foot_velocities[i],
                    &g.gains,
                );
                let j = jacobian(leg, &sample.joint_angles[i], &geometry);
                if phase.is_support() && stabilize && sample.contacts[i] {
                    vf += attitude_servo_force(&setpoint, &sc.stabilizer.servo, n_support).push(0.0);
                }
                let c = if phase.is_support() { comp } else { 0.0 };
                FootForceCommand::compose(vf, c, &j)
            } else {
                FootForceCommand::default()
            };
            commands[i] = FootCommand { position: desired, velocity: desired_vel, force: force.force };
            outputs[i] = LegOutput { phase, desired, force };
        }

        Ok(ControlOutput { commands, legs: outputs, vx_command, wz_command, velocity_estimate: estimate })
    }
}
