//! Fixed-step rigid-trunk simulator.
//!
//! The trunk is a single rigid body. Legs are massless: in the default mode a
//! foot that touches the ground is anchored there and passes the commanded
//! foot force to the trunk, limited to a pushing normal force inside the
//! friction cone. Airborne feet follow their commanded body-frame position
//! through a first-order lag. In kinematic-foot mode every foot follows its
//! command and the ground pushes back through a penalty spring-damper.

use nalgebra::{Matrix3, UnitQuaternion, Vector2, Vector3};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{hip_origin, ik_leg_clamped, neutral_foot_y, JointAngles, LegId, RobotGeometry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimMode {
    MasslessLeg,
    KinematicFoot,
}

impl SimMode {
    pub fn name(self) -> &'static str {
        match self {
            SimMode::MasslessLeg => "massless-leg",
            SimMode::KinematicFoot => "kinematic-foot",
        }
    }

    pub fn from_name(s: &str) -> Option<SimMode> {
        match s {
            "massless-leg" => Some(SimMode::MasslessLeg),
            "kinematic-foot" => Some(SimMode::KinematicFoot),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactParams {
    /// Normal stiffness (N/m).
    pub stiffness: f64,
    /// Normal damping (N s/m).
    pub damping: f64,
    pub friction: f64,
    /// Tangential speed at which friction reaches its Coulomb limit (m/s).
    pub reg_velocity: f64,
}

impl Default for ContactParams {
    fn default() -> Self {
        Self { stiffness: 5000.0, damping: 50.0, friction: 0.8, reg_velocity: 0.01 }
    }
}

/// Penalty ground force on a foot, world frame. `rate` is the penetration
/// rate (positive while sinking), `tangential` the foot's ground-plane velocity.
pub fn contact_force(penetration: f64, rate: f64, tangential: Vector2<f64>, params: &ContactParams) -> Vector3<f64> {
    if penetration <= 0.0 {
        return Vector3::zeros();
    }
    let normal = (params.stiffness * penetration + params.damping * rate).max(0.0);
    let speed = tangential.norm();
    let friction = if speed > 0.0 {
        let sat = (speed / params.reg_velocity).min(1.0);
        -params.friction * normal * sat * tangential / speed
    } else {
        Vector2::zeros()
    };
    Vector3::new(friction.x, friction.y, normal)
}

/// A constant push delivering `impulse` (world frame, kg m/s) over `duration`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disturbance {
    pub impulse: Vector3<f64>,
    pub start: f64,
    pub duration: f64,
    /// Application point in the body frame.
    pub point: Vector3<f64>,
}

impl Disturbance {
    /// Lateral push toward -y at the trunk CoM.
    pub fn lateral(impulse: f64, start: f64, duration: f64) -> Self {
        Self { impulse: Vector3::new(0.0, -impulse, 0.0), start, duration, point: Vector3::zeros() }
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    /// Force at time `t`.
    pub fn force_at(&self, t: f64) -> Vector3<f64> {
        if t >= self.start && t <= self.end() {
            self.impulse / self.duration
        } else {
            Vector3::zeros()
        }
    }

    /// Mean force over [t, t + dt]; summing over steps transfers exactly the impulse.
    pub fn mean_force(&self, t: f64, dt: f64) -> Vector3<f64> {
        let overlap = ((t + dt).min(self.end()) - t.max(self.start)).max(0.0);
        self.impulse / self.duration * (overlap / dt)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    /// Trunk inertia about its CoM in the body frame (kg m^2).
    pub inertia: Matrix3<f64>,
    pub mode: SimMode,
    pub contact: ContactParams,
    /// Standard deviation of attitude and rate noise (rad, rad/s).
    pub noise_sigma: f64,
    pub seed: u64,
    /// Time constant of airborne foot tracking (s).
    pub foot_lag: f64,
}

impl SimConfig {
    /// Solid cuboid L x W1 x 0.06 m at the robot mass.
    pub fn cuboid_inertia(geometry: &RobotGeometry) -> Matrix3<f64> {
        let (l, w, h) = (geometry.body_length, geometry.shoulder_width, 0.06);
        let k = geometry.mass / 12.0;
        Matrix3::from_diagonal(&Vector3::new(k * (w * w + h * h), k * (l * l + h * h), k * (l * l + w * w)))
    }

    pub fn new(geometry: &RobotGeometry) -> Self {
        Self {
            dt: 1e-3,
            duration: 10.0,
            inertia: Self::cuboid_inertia(geometry),
            mode: SimMode::MasslessLeg,
            contact: ContactParams::default(),
            noise_sigma: 0.0,
            seed: 0,
            foot_lag: 0.005,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0 && self.dt <= 5e-3) {
            return Err(SimError::InvalidConfig(format!("sim.dt = {} must lie in (0, 5e-3]", self.dt)));
        }
        if !(self.duration > 0.0) {
            return Err(SimError::InvalidConfig("sim.duration must be positive".into()));
        }
        if self.inertia.cholesky().is_none() {
            return Err(SimError::InvalidConfig("trunk inertia must be positive definite".into()));
        }
        let c = &self.contact;
        if !(c.stiffness > 0.0 && c.damping >= 0.0 && c.friction >= 0.0 && c.reg_velocity > 0.0) {
            return Err(SimError::InvalidConfig("contact parameters out of range".into()));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(SimError::InvalidConfig("sim.noise_sigma must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("numerical divergence at t = {time:.4} s: {what}")]
    NumericalDivergence { time: f64, what: String },
    #[error("invalid simulator configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FootState {
    pub world: Vector3<f64>,
    /// Position relative to the trunk CoM, body frame.
    pub body: Vector3<f64>,
    pub body_velocity: Vector3<f64>,
    /// Anchored on the ground (massless-leg mode).
    pub anchored: bool,
    /// Ground reaction on the foot, world frame.
    pub ground_force: Vector3<f64>,
}

impl FootState {
    pub fn in_contact(&self) -> bool {
        self.world.z <= 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldState {
    pub time: f64,
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
    /// World frame.
    pub velocity: Vector3<f64>,
    /// Body frame.
    pub angular_velocity: Vector3<f64>,
    pub feet: [FootState; 4],
}

impl WorldState {
    /// Trunk at rest with every foot directly below its hip link at `foot_z`
    /// (hip frame). Feet that reach the ground are anchored.
    pub fn standing(geometry: &RobotGeometry, height: f64, foot_z: f64, orientation: UnitQuaternion<f64>) -> Self {
        let position = Vector3::new(0.0, 0.0, height);
        let rot = orientation.to_rotation_matrix();
        let feet = LegId::ALL.map(|leg| {
            let body = hip_origin(leg, geometry).position + Vector3::new(0.0, neutral_foot_y(leg, geometry), foot_z);
            let mut world = position + rot * body;
            let anchored = world.z <= 0.0;
            if anchored {
                world.z = 0.0;
            }
            FootState {
                world,
                body: rot.inverse() * (world - position),
                body_velocity: Vector3::zeros(),
                anchored,
                ground_force: Vector3::zeros(),
            }
        });
        Self { time: 0.0, position, orientation, velocity: Vector3::zeros(), angular_velocity: Vector3::zeros(), feet }
    }

    pub fn contacts(&self) -> [bool; 4] {
        self.feet.map(|f| f.in_contact())
    }

    /// Roll, pitch, yaw (rad).
    pub fn rpy(&self) -> (f64, f64, f64) {
        self.orientation.euler_angles()
    }

    /// Kinetic plus gravitational energy of the trunk (J).
    pub fn trunk_energy(&self, geometry: &RobotGeometry, inertia: &Matrix3<f64>) -> f64 {
        let w = self.angular_velocity;
        0.5 * geometry.mass * self.velocity.norm_squared()
            + 0.5 * w.dot(&(inertia * w))
            + geometry.mass * geometry.gravity * self.position.z
    }
}

/// Commanded foot motion and force, body frame. `force` is the force the
/// foot applies to the ground.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FootCommand {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub force: Vector3<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SensorSample {
    pub time: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
    /// Body angular velocity (rad/s).
    pub rates: Vector3<f64>,
    pub joint_angles: [JointAngles; 4],
    /// Foot positions and velocities relative to the trunk, body frame.
    pub foot_positions: [Vector3<f64>; 4],
    pub foot_velocities: [Vector3<f64>; 4],
    pub contacts: [bool; 4],
    /// Ground-truth trunk velocity (world frame), for ablations.
    pub true_velocity: Vector3<f64>,
}

pub struct Simulator {
    pub config: SimConfig,
    pub geometry: RobotGeometry,
    pub disturbances: Vec<Disturbance>,
    inertia_inv: Matrix3<f64>,
    rng: ChaCha8Rng,
}

const POSITION_BOUND: f64 = 100.0;
const VELOCITY_BOUND: f64 = 100.0;

impl Simulator {
    pub fn new(config: SimConfig, geometry: RobotGeometry) -> Result<Self, SimError> {
        config.validate()?;
        let inertia_inv =
            config.inertia.try_inverse().ok_or_else(|| SimError::InvalidConfig("singular inertia".into()))?;
        Ok(Self {
            config,
            geometry,
            disturbances: Vec::new(),
            inertia_inv,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        })
    }

    pub fn with_disturbances(mut self, disturbances: Vec<Disturbance>) -> Self {
        self.disturbances = disturbances;
        self
    }

    /// External force (world) and the torque it produces about the CoM
    /// (world), averaged over the step starting at `t`.
    pub fn external_load(&self, world: &WorldState, t: f64, dt: f64) -> (Vector3<f64>, Vector3<f64>) {
        let rot = world.orientation.to_rotation_matrix();
        self.disturbances.iter().fold((Vector3::zeros(), Vector3::zeros()), |(f, tau), d| {
            let force = d.mean_force(t, dt);
            (f + force, tau + (rot * d.point).cross(&force))
        })
    }

    pub fn step(&mut self, world: &WorldState, commands: &[FootCommand; 4]) -> Result<WorldState, SimError> {
        let dt = self.config.dt;
        let rot = world.orientation.to_rotation_matrix();
        let mut feet = world.feet;

        match self.config.mode {
            SimMode::MasslessLeg => {
                for (foot, cmd) in feet.iter_mut().zip(commands) {
                    foot.ground_force =
                        if foot.anchored { self.anchored_reaction(&(rot * cmd.force)) } else { Vector3::zeros() };
                    if foot.anchored && foot.ground_force.z <= 0.0 {
                        foot.anchored = false;
                    }
                }
            }
            SimMode::KinematicFoot => {
                for foot in feet.iter_mut() {
                    foot.anchored = false;
                    let foot_vel =
                        world.velocity + rot * (world.angular_velocity.cross(&foot.body) + foot.body_velocity);
                    foot.ground_force = contact_force(
                        -foot.world.z,
                        -foot_vel.z,
                        Vector2::new(foot_vel.x, foot_vel.y),
                        &self.config.contact,
                    );
                }
            }
        }

        let (ext_force, ext_torque) = self.external_load(world, world.time, dt);
        let mut force = Vector3::new(0.0, 0.0, -self.geometry.weight()) + ext_force;
        let mut torque = ext_torque;
        for foot in &feet {
            force += foot.ground_force;
            torque += (foot.world - world.position).cross(&foot.ground_force);
        }

        let w = world.angular_velocity;
        let torque_body = rot.inverse() * torque;
        let angular_accel = self.inertia_inv * (torque_body - w.cross(&(self.config.inertia * w)));

        let velocity = world.velocity + force / self.geometry.mass * dt;
        let angular_velocity = w + angular_accel * dt;
        let position = world.position + velocity * dt;
        let orientation = world.orientation * UnitQuaternion::from_scaled_axis(angular_velocity * dt);
        let orientation = UnitQuaternion::new_normalize(orientation.into_inner());
        let rot_next = orientation.to_rotation_matrix();

        let blend = 1.0 - (-dt / self.config.foot_lag).exp();
        for (foot, cmd) in feet.iter_mut().zip(commands) {
            if foot.anchored {
                let body = rot_next.inverse() * (foot.world - position);
                foot.body_velocity = -(rot_next.inverse() * velocity) - angular_velocity.cross(&body);
                foot.body = body;
            } else {
                let body = foot.body + (cmd.position - foot.body) * blend;
                foot.body_velocity = (body - foot.body) / dt;
                foot.body = body;
                foot.world = position + rot_next * body;
                if self.config.mode == SimMode::MasslessLeg && foot.world.z <= 0.0 {
                    foot.world.z = 0.0;
                    foot.anchored = true;
                    foot.body = rot_next.inverse() * (foot.world - position);
                    foot.body_velocity = -(rot_next.inverse() * velocity) - angular_velocity.cross(&foot.body);
                }
            }
        }

        let next = WorldState { time: world.time + dt, position, orientation, velocity, angular_velocity, feet };
        check_sanity(&next)?;
        Ok(next)
    }

    /// Ground reaction for an anchored foot pushing with `foot_force` (world).
    fn anchored_reaction(&self, foot_force: &Vector3<f64>) -> Vector3<f64> {
        let reaction = -foot_force;
        if reaction.z <= 0.0 {
            return Vector3::zeros();
        }
        let limit = self.config.contact.friction * reaction.z;
        let tangential = Vector2::new(reaction.x, reaction.y);
        let norm = tangential.norm();
        if norm > limit {
            let t = tangential * (limit / norm);
            Vector3::new(t.x, t.y, reaction.z)
        } else {
            reaction
        }
    }

    pub fn readout(&mut self, world: &WorldState) -> SensorSample {
        let (mut roll, mut pitch, mut yaw) = world.rpy();
        let mut rates = world.angular_velocity;
        if self.config.noise_sigma > 0.0 {
            let normal = Normal::new(0.0, self.config.noise_sigma).expect("sigma validated");
            roll += normal.sample(&mut self.rng);
            pitch += normal.sample(&mut self.rng);
            yaw += normal.sample(&mut self.rng);
            rates += Vector3::from_fn(|_, _| normal.sample(&mut self.rng));
        }
        let foot_positions = world.feet.map(|f| f.body);
        let joint_angles = LegId::ALL.map(|leg| {
            let hip = foot_positions[leg.index()] - hip_origin(leg, &self.geometry).position;
            ik_leg_clamped(leg, &hip, &self.geometry).0.angles
        });
        SensorSample {
            time: world.time,
            roll,
            pitch,
            yaw,
            rates,
            joint_angles,
            foot_positions,
            foot_velocities: world.feet.map(|f| f.body_velocity),
            contacts: world.contacts(),
            true_velocity: world.velocity,
        }
    }
}

fn check_sanity(world: &WorldState) -> Result<(), SimError> {
    let diverged = |what: &str| Err(SimError::NumericalDivergence { time: world.time, what: what.to_string() });
    let finite =
        world.position.iter().chain(world.velocity.iter()).chain(world.angular_velocity.iter()).all(|v| v.is_finite())
            && world.orientation.coords.iter().all(|v| v.is_finite());
    if !finite {
        return diverged("non-finite trunk state");
    }
    if world.position.amax() > POSITION_BOUND {
        return diverged("trunk position out of bounds");
    }
    if world.velocity.amax() > VELOCITY_BOUND || world.angular_velocity.amax() > VELOCITY_BOUND {
        return diverged("trunk velocity out of bounds");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn geo() -> RobotGeometry {
        RobotGeometry::default()
    }

    #[test]
    fn contact_force_cases() {
        let p = ContactParams::default();
        assert_eq!(contact_force(0.0, 1.0, Vector2::new(1.0, 0.0), &p), Vector3::zeros());
        let f = contact_force(1e-3, 0.0, Vector2::zeros(), &p);
        assert_abs_diff_eq!(f, Vector3::new(0.0, 0.0, 5.0), epsilon = 1e-12);
        // Pulling rate never makes the normal force negative.
        assert_eq!(contact_force(1e-3, -10.0, Vector2::zeros(), &p).z, 0.0);
    }

    #[test]
    fn disturbance_force() {
        let d = Disturbance::lateral(2.1, 1.0, 0.05);
        assert_abs_diff_eq!(d.force_at(1.01), Vector3::new(0.0, -42.0, 0.0), epsilon = 1e-12);
        assert_eq!(d.force_at(0.5), Vector3::zeros());
        assert_eq!(d.force_at(1.2), Vector3::zeros());
    }

    #[test]
    fn free_floating_momentum() {
        let g = RobotGeometry { gravity: 1e-12, ..geo() };
        let mut cfg = SimConfig::new(&g);
        cfg.dt = 7e-4;
        let mut sim = Simulator::new(cfg, g).unwrap().with_disturbances(vec![Disturbance::lateral(2.1, 0.0101, 0.05)]);
        let mut w = WorldState::standing(&g, 10.0, -0.14, UnitQuaternion::identity());
        let cmds = [FootCommand::default(); 4];
        for _ in 0..200 {
            w = sim.step(&w, &cmds).unwrap();
        }
        let momentum = g.mass * w.velocity.y;
        assert!((momentum + 2.1).abs() < 0.01 * 2.1);
    }

    #[test]
    fn free_body_at_rest_stays() {
        let g = RobotGeometry { gravity: 0.0, ..geo() };
        let mut sim = Simulator::new(SimConfig::new(&g), g).unwrap();
        let start = WorldState::standing(&g, 1.0, -0.14, UnitQuaternion::identity());
        let mut w = start;
        let cmds = start.feet.map(|f| FootCommand { position: f.body, ..Default::default() });
        for _ in 0..1000 {
            w = sim.step(&w, &cmds).unwrap();
        }
        assert_eq!(w.position, start.position);
        assert_eq!(w.velocity, start.velocity);
        assert_eq!(w.orientation, start.orientation);
    }

    fn hold_commands(world: &WorldState, force: Vector3<f64>) -> [FootCommand; 4] {
        world.feet.map(|f| FootCommand { position: f.body, velocity: Vector3::zeros(), force })
    }

    #[test]
    fn kinematic_stance_settles_on_penalty_equilibrium() {
        let g = geo();
        let mut cfg = SimConfig::new(&g);
        cfg.mode = SimMode::KinematicFoot;
        let mut sim = Simulator::new(cfg, g).unwrap();
        let mut w = WorldState::standing(&g, 0.14, -0.14, UnitQuaternion::identity());
        let cmds = hold_commands(&w, Vector3::zeros());
        for _ in 0..1000 {
            w = sim.step(&w, &cmds).unwrap();
        }
        // Static equilibrium: four penalty springs carry the weight.
        let sink = g.weight() / (4.0 * cfg.contact.stiffness);
        assert_abs_diff_eq!(w.position.z, 0.14 - sink, epsilon = 2e-4);
        assert!((w.position.z - 0.14).abs() < 2e-3);
    }

    #[test]
    fn massless_stance_holds_with_gravity_comp() {
        let g = geo();
        let mut sim = Simulator::new(SimConfig::new(&g), g).unwrap();
        let mut w = WorldState::standing(&g, 0.14, -0.14, UnitQuaternion::identity());
        assert!(w.feet.iter().all(|f| f.anchored));
        let cmds = hold_commands(&w, Vector3::new(0.0, 0.0, -g.weight() / 4.0));
        for _ in 0..1000 {
            w = sim.step(&w, &cmds).unwrap();
        }
        assert!((w.position.z - 0.14).abs() < 2e-3);
        assert!(w.contacts().iter().all(|c| *c));
    }

    #[test]
    fn pulling_foot_releases() {
        let g = geo();
        let mut sim = Simulator::new(SimConfig::new(&g), g).unwrap();
        let w = WorldState::standing(&g, 0.14, -0.14, UnitQuaternion::identity());
        let mut cmds = hold_commands(&w, Vector3::new(0.0, 0.0, -4.0));
        cmds[0].force = Vector3::new(0.0, 0.0, 1.0);
        cmds[0].position += Vector3::new(0.0, 0.0, 0.02);
        let mut next = sim.step(&w, &cmds).unwrap();
        for _ in 0..20 {
            next = sim.step(&next, &cmds).unwrap();
        }
        assert!(!next.feet[0].anchored);
        assert!(!next.contacts()[0]);
        assert!(next.feet.iter().all(|f| f.ground_force.z >= 0.0));
    }

    #[test]
    fn divergence_is_reported() {
        let g = geo();
        let mut sim = Simulator::new(SimConfig::new(&g), g).unwrap();
        let mut w = WorldState::standing(&g, 0.14, -0.14, UnitQuaternion::identity());
        w.velocity.x = 150.0;
        let err = sim.step(&w, &[FootCommand::default(); 4]).unwrap_err();
        assert!(matches!(err, SimError::NumericalDivergence { .. }));
    }

    #[test]
    fn invalid_dt_rejected() {
        let g = geo();
        let mut cfg = SimConfig::new(&g);
        cfg.dt = 0.01;
        assert!(Simulator::new(cfg, g).is_err());
    }

    #[test]
    fn level_readout_and_determinism() {
        let g = geo();
        let w = WorldState::standing(&g, 0.14, -0.14, UnitQuaternion::identity());
        let mut sim = Simulator::new(SimConfig::new(&g), g).unwrap();
        let s = sim.readout(&w);
        assert_eq!((s.roll, s.pitch, s.yaw), (0.0, 0.0, 0.0));
        let mut noisy = SimConfig::new(&g);
        noisy.noise_sigma = 0.01;
        noisy.seed = 7;
        let a: Vec<f64> = {
            let mut sim = Simulator::new(noisy, g).unwrap();
            (0..5).map(|_| sim.readout(&w).roll).collect()
        };
        let b: Vec<f64> = {
            let mut sim = Simulator::new(noisy, g).unwrap();
            (0..5).map(|_| sim.readout(&w).roll).collect()
        };
        assert_eq!(a, b);
    }

    /// rpy from an explicit rotation-matrix decomposition (Z-Y-X).
    fn rpy_oracle(m: &Matrix3<f64>) -> (f64, f64, f64) {
        let pitch = (-m[(2, 0)]).clamp(-1.0, 1.0).asin();
        let roll = m[(2, 1)].atan2(m[(2, 2)]);
        let yaw = m[(1, 0)].atan2(m[(0, 0)]);
        (roll, pitch, yaw)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn rpy_matches_matrix_oracle(r in -3.1f64..3.1, p in -1.5f64..1.5, y in -3.1f64..3.1) {
            let q = UnitQuaternion::from_euler_angles(r, p, y);
            let w = WorldState { orientation: q, ..WorldState::standing(&geo(), 1.0, -0.14, UnitQuaternion::identity()) };
            let (a, b, c) = w.rpy();
            let (ra, rb, rc) = rpy_oracle(q.to_rotation_matrix().matrix());
            prop_assert!((a - ra).abs() < 1e-9 && (b - rb).abs() < 1e-9 && (c - rc).abs() < 1e-9);
        }

        #[test]
        fn friction_stays_in_cone(pen in 0.0f64..0.01, rate in -1.0f64..1.0, vx in -2.0f64..2.0, vy in -2.0f64..2.0) {
            let p = ContactParams::default();
            let f = contact_force(pen, rate, Vector2::new(vx, vy), &p);
            prop_assert!(f.z >= 0.0);
            prop_assert!(Vector2::new(f.x, f.y).norm() <= p.friction * f.z + 1e-12);
        }
    }
}
