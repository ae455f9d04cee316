//! Scenario files: line-oriented `section.key = value` settings.
//!
//! Blank lines and lines starting with `#` or `;` are ignored. A `[section]`
//! header may be used instead of repeating the prefix. Every key has a
//! default, so an empty file is a valid scenario. Defaults:
//!
//! | key | default |
//! |-----|---------|
//! | geometry.L / W1 / W2 | 0.167 / 0.162 / 0.142 m |
//! | geometry.a1 / a2 / a3 | 0.046 / 0.066 / 0.065 m |
//! | robot.mass, world.gravity | 1.9 kg, 9.81 m/s^2 |
//! | gait.mode | trot (`stand` keeps all four feet down) |
//! | gait.f, gait.vx | 2.9 Hz, 1.0 m/s |
//! | gait.zs, gait.hwa, gait.hsd | -0.14, 0.04, 0.005 m |
//! | gait.c1 .. gait.c5 | 4.0, -0.1, -3.0, -4.5, 0.2 |
//! | stabilizer.enable | true |
//! | stabilizer.kp_pitch / kd_pitch / kp_roll / kd_roll | 2.0 / 0.1 / 2.0 / 0.1 |
//! | stabilizer.p_adj_max | 0.02 m |
//! | stabilizer.servo_pitch / servo_roll | 20 / 20 N/rad (stance attitude servo) |
//! | stabilizer.k_comp, stabilizer.k_com, stabilizer.lambda | 0.03, 0.1, 0.5 |
//! | stabilizer.cutoff_hz | 10 Hz |
//! | compliance.enable, compliance.zeta, compliance.kp_xy_scale | true, 0.1, 0.5 |
//! | sim.dt, sim.duration | 0.001 s, 10 s |
//! | sim.mode | massless-leg (or kinematic-foot) |
//! | sim.kn, sim.dn, sim.mu | 5000 N/m, 50 N s/m, 0.8 |
//! | sim.noise_sigma, sim.seed | 0, 0 |
//! | sim.init_roll, sim.init_pitch | 0, 0 rad |
//! | command.vx | empty: constant gait.vx |
//! | command.wz | empty: 0 rad/s |
//! | disturbance.impulse | 0 kg m/s (no push) |
//! | disturbance.start, disturbance.duration | 3.0 s, 0.05 s |
//! | disturbance.direction, disturbance.point | 0,-1,0 (world), 0,0,0 (body) |
//!
//! Command profiles are comma separated `time:value` points interpolated
//! linearly and held constant outside their range, e.g.
//! `command.vx = 0:0, 1:0, 5:1`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::gait_clock::{derive_timeline, GaitParams, TimelineError};
use crate::kinematics::RobotGeometry;
use crate::simulator::{Disturbance, SimConfig, SimMode};
use crate::stabilizer::{PostureGains, ServoGains};
use crate::trajectory::{synth_z_keyframes, PlacementGains};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GaitMode {
    Trot,
    /// All feet on the ground at the landing height.
    Stand,
}

/// Piecewise-linear time profile.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Profile {
    pub points: Vec<(f64, f64)>,
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Self { points: vec![(0.0, value)] }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let pts = &self.points;
        match pts.len() {
            0 => 0.0,
            _ if t <= pts[0].0 => pts[0].1,
            _ => {
                for w in pts.windows(2) {
                    let ((t0, v0), (t1, v1)) = (w[0], w[1]);
                    if t <= t1 {
                        return if t1 > t0 { v0 + (v1 - v0) * (t - t0) / (t1 - t0) } else { v1 };
                    }
                }
                pts[pts.len() - 1].1
            }
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max(p.1.abs()))
    }

    /// `t:v, t:v, ...`, or a bare number for a constant value.
    fn parse(text: &str) -> Result<Self, String> {
        if !text.contains(':') && !text.trim().is_empty() {
            return Ok(Self::constant(parse_f64(text.trim())?));
        }
        let mut points = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (t, v) = item.split_once(':').ok_or_else(|| format!("expected time:value, got '{item}'"))?;
            points.push((parse_f64(t)?, parse_f64(v)?));
        }
        Ok(Self { points })
    }

    fn render(&self) -> String {
        self.points.iter().map(|(t, v)| format!("{t}:{v}")).collect::<Vec<_>>().join(", ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StabilizerSettings {
    pub enable: bool,
    pub placement: PlacementGains,
    pub k_com: f64,
    pub cutoff_hz: f64,
    pub servo: ServoGains,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplianceSettings {
    pub enable: bool,
    pub zeta: f64,
    pub kp_xy_scale: f64,
}

/// Optional single push.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DisturbanceSettings {
    pub impulse: f64,
    pub start: f64,
    pub duration: f64,
    pub direction: Vector3<f64>,
    pub point: Vector3<f64>,
}

impl DisturbanceSettings {
    pub fn to_disturbance(&self) -> Option<Disturbance> {
        (self.impulse != 0.0).then(|| Disturbance {
            impulse: self.direction.normalize() * self.impulse,
            start: self.start,
            duration: self.duration,
            point: self.point,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub geometry: RobotGeometry,
    pub gait: GaitParams,
    pub gait_mode: GaitMode,
    pub posture: PostureGains,
    pub stabilizer: StabilizerSettings,
    pub compliance: ComplianceSettings,
    pub sim: SimConfig,
    pub init_roll: f64,
    pub init_pitch: f64,
    pub command_vx: Profile,
    pub command_wz: Profile,
    pub disturbance: DisturbanceSettings,
}

impl Default for Scenario {
    fn default() -> Self {
        let geometry = RobotGeometry::default();
        Self {
            geometry,
            gait: GaitParams::default(),
            gait_mode: GaitMode::Trot,
            posture: PostureGains::default(),
            stabilizer: StabilizerSettings {
                enable: true,
                placement: PlacementGains::default(),
                k_com: 0.1,
                cutoff_hz: 10.0,
                servo: ServoGains::default(),
            },
            compliance: ComplianceSettings { enable: true, zeta: 0.1, kp_xy_scale: 0.5 },
            sim: SimConfig::new(&geometry),
            init_roll: 0.0,
            init_pitch: 0.0,
            command_vx: Profile::default(),
            command_wz: Profile::default(),
            disturbance: DisturbanceSettings {
                impulse: 0.0,
                start: 3.0,
                duration: 0.05,
                direction: Vector3::new(0.0, -1.0, 0.0),
                point: Vector3::zeros(),
            },
        }
    }
}

impl Scenario {
    pub fn command_vx_at(&self, t: f64) -> f64 {
        if self.command_vx.points.is_empty() {
            self.gait.forward_speed
        } else {
            self.command_vx.value_at(t)
        }
    }

    pub fn command_wz_at(&self, t: f64) -> f64 {
        self.command_wz.value_at(t)
    }

    /// Time 0 plus every command-profile point, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> =
            std::iter::once(0.0).chain(self.command_vx.times()).chain(self.command_wz.times()).collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn disturbances(&self) -> Vec<Disturbance> {
        self.disturbance.to_disturbance().into_iter().collect()
    }

    /// Nominal trunk height above ground.
    pub fn nominal_height(&self) -> f64 {
        -self.gait.landing_height
    }

    /// Checks cross-field consistency, including the gait plan at every
    /// commanded speed magnitude.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |m: String| Err(HarnessError::Validation(m));
        if let Err(e) = self.geometry.validate() {
            return invalid(e.to_string());
        }
        if let Err(v) = self.gait.validate() {
            let list: Vec<String> = v.iter().map(|x| format!("gait.{x}")).collect();
            return invalid(list.join("; "));
        }
        let mut speeds = vec![self.gait.forward_speed.abs(), self.command_vx.max_abs()];
        speeds.extend(self.command_vx.points.iter().map(|p| p.1.abs()));
        for v in speeds {
            let params = self.gait.with_speed(v);
            let timeline = derive_timeline(&params).map_err(|e| match e {
                TimelineError::Invalid(v) => {
                    HarnessError::Validation(v.iter().map(|x| format!("gait.{x}")).collect::<Vec<_>>().join("; "))
                }
                other => HarnessError::Validation(format!("at vx = {v}: {other}")),
            })?;
            synth_z_keyframes(&params, &timeline).map_err(|e| HarnessError::Validation(format!("at vx = {v}: {e}")))?;
        }
        for (name, profile) in [("command.vx", &self.command_vx), ("command.wz", &self.command_wz)] {
            if profile.points.windows(2).any(|w| w[1].0 < w[0].0) {
                return invalid(format!("{name}: profile times must be non-decreasing"));
            }
            if profile.points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
                return invalid(format!("{name}: values must be finite"));
            }
        }
        if let Err(e) = self.sim.validate() {
            return invalid(e.to_string());
        }
        if !self.compliance.enable && self.sim.mode != SimMode::KinematicFoot {
            return invalid("compliance.enable = false needs sim.mode = kinematic-foot (massless legs cannot hold position without force control)".into());
        }
        if !(self.compliance.zeta >= 0.0 && self.compliance.zeta < 1.0) {
            return invalid(format!("compliance.zeta = {} must lie in [0, 1)", self.compliance.zeta));
        }
        if !(self.compliance.kp_xy_scale >= 0.0) {
            return invalid("compliance.kp_xy_scale must be non-negative".into());
        }
        if !(self.stabilizer.cutoff_hz > 0.0) {
            return invalid("stabilizer.cutoff_hz must be positive".into());
        }
        if !(self.stabilizer.servo.pitch >= 0.0 && self.stabilizer.servo.roll >= 0.0) {
            return invalid("stabilizer.servo_pitch and servo_roll must be non-negative".into());
        }
        if !(self.posture.max_offset >= 0.0) {
            return invalid("stabilizer.p_adj_max must be non-negative".into());
        }
        let d = &self.disturbance;
        if d.impulse != 0.0 && !(d.duration > 0.0 && d.direction.norm() > 0.0) {
            return invalid("disturbance needs duration > 0 and a non-zero direction".into());
        }
        Ok(())
    }

    /// Every setting as `key = value` lines, in a fixed order. Parsing the
    /// output reproduces the scenario.
    pub fn to_ini(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.entries() {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    /// SHA-256 of [`Scenario::to_ini`], hex encoded.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.to_ini().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        let g = &self.geometry;
        let p = &self.gait;
        let s = &self.sim;
        let d = &self.disturbance;
        let vec3 = |v: &Vector3<f64>| format!("{},{},{}", v.x, v.y, v.z);
        vec![
            ("geometry.L", g.body_length.to_string()),
            ("geometry.W1", g.shoulder_width.to_string()),
            ("geometry.W2", g.hip_width.to_string()),
            ("geometry.a1", g.hip_link.to_string()),
            ("geometry.a2", g.thigh.to_string()),
            ("geometry.a3", g.crus.to_string()),
            ("robot.mass", g.mass.to_string()),
            ("world.gravity", g.gravity.to_string()),
            (
                "gait.mode",
                match self.gait_mode {
                    GaitMode::Trot => "trot",
                    GaitMode::Stand => "stand",
                }
                .to_string(),
            ),
            ("gait.f", p.frequency.to_string()),
            ("gait.vx", p.forward_speed.to_string()),
            ("gait.zs", p.landing_height.to_string()),
            ("gait.hwa", p.swing_height.to_string()),
            ("gait.hsd", p.support_descent.to_string()),
            ("gait.c1", p.c1.to_string()),
            ("gait.c2", p.c2.to_string()),
            ("gait.c3", p.c3.to_string()),
            ("gait.c4", p.c4.to_string()),
            ("gait.c5", p.c5.to_string()),
            ("stabilizer.enable", self.stabilizer.enable.to_string()),
            ("stabilizer.kp_pitch", self.posture.kp_pitch.to_string()),
            ("stabilizer.kd_pitch", self.posture.kd_pitch.to_string()),
            ("stabilizer.kp_roll", self.posture.kp_roll.to_string()),
            ("stabilizer.kd_roll", self.posture.kd_roll.to_string()),
            ("stabilizer.p_adj_max", self.posture.max_offset.to_string()),
            ("stabilizer.servo_pitch", self.stabilizer.servo.pitch.to_string()),
            ("stabilizer.servo_roll", self.stabilizer.servo.roll.to_string()),
            ("stabilizer.k_comp", self.stabilizer.placement.speed_gain.to_string()),
            ("stabilizer.k_com", self.stabilizer.k_com.to_string()),
            ("stabilizer.lambda", self.stabilizer.placement.neutral_factor.to_string()),
            ("stabilizer.cutoff_hz", self.stabilizer.cutoff_hz.to_string()),
            ("compliance.enable", self.compliance.enable.to_string()),
            ("compliance.zeta", self.compliance.zeta.to_string()),
            ("compliance.kp_xy_scale", self.compliance.kp_xy_scale.to_string()),
            ("sim.dt", s.dt.to_string()),
            ("sim.duration", s.duration.to_string()),
            ("sim.mode", s.mode.name().to_string()),
            ("sim.kn", s.contact.stiffness.to_string()),
            ("sim.dn", s.contact.damping.to_string()),
            ("sim.mu", s.contact.friction.to_string()),
            ("sim.noise_sigma", s.noise_sigma.to_string()),
            ("sim.seed", s.seed.to_string()),
            ("sim.init_roll", self.init_roll.to_string()),
            ("sim.init_pitch", self.init_pitch.to_string()),
            ("command.vx", self.command_vx.render()),
            ("command.wz", self.command_wz.render()),
            ("disturbance.impulse", d.impulse.to_string()),
            ("disturbance.start", d.start.to_string()),
            ("disturbance.duration", d.duration.to_string()),
            ("disturbance.direction", vec3(&d.direction)),
            ("disturbance.point", vec3(&d.point)),
        ]
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let num = || parse_f64(value);
        match key {
            "geometry.L" => self.geometry.body_length = num()?,
            "geometry.W1" => self.geometry.shoulder_width = num()?,
            "geometry.W2" => self.geometry.hip_width = num()?,
            "geometry.a1" => self.geometry.hip_link = num()?,
            "geometry.a2" => self.geometry.thigh = num()?,
            "geometry.a3" => self.geometry.crus = num()?,
            "robot.mass" => self.geometry.mass = num()?,
            "world.gravity" => self.geometry.gravity = num()?,
            "gait.mode" => {
                self.gait_mode = match value {
                    "trot" => GaitMode::Trot,
                    "stand" => GaitMode::Stand,
                    _ => return Err(format!("expected trot or stand, got '{value}'")),
                }
            }
            "gait.f" => self.gait.frequency = num()?,
            "gait.vx" => self.gait.forward_speed = num()?,
            "gait.zs" => self.gait.landing_height = num()?,
            "gait.hwa" => self.gait.swing_height = num()?,
            "gait.hsd" => self.gait.support_descent = num()?,
            "gait.c1" => self.gait.c1 = num()?,
            "gait.c2" => self.gait.c2 = num()?,
            "gait.c3" => self.gait.c3 = num()?,
            "gait.c4" => self.gait.c4 = num()?,
            "gait.c5" => self.gait.c5 = num()?,
            "stabilizer.enable" => self.stabilizer.enable = parse_bool(value)?,
            "stabilizer.kp_pitch" => self.posture.kp_pitch = num()?,
            "stabilizer.kd_pitch" => self.posture.kd_pitch = num()?,
            "stabilizer.kp_roll" => self.posture.kp_roll = num()?,
            "stabilizer.kd_roll" => self.posture.kd_roll = num()?,
            "stabilizer.p_adj_max" => self.posture.max_offset = num()?,
            "stabilizer.servo_pitch" => self.stabilizer.servo.pitch = num()?,
            "stabilizer.servo_roll" => self.stabilizer.servo.roll = num()?,
            "stabilizer.k_comp" => self.stabilizer.placement.speed_gain = num()?,
            "stabilizer.k_com" => self.stabilizer.k_com = num()?,
            "stabilizer.lambda" => self.stabilizer.placement.neutral_factor = num()?,
            "stabilizer.cutoff_hz" => self.stabilizer.cutoff_hz = num()?,
            "compliance.enable" => self.compliance.enable = parse_bool(value)?,
            "compliance.zeta" => self.compliance.zeta = num()?,
            "compliance.kp_xy_scale" => self.compliance.kp_xy_scale = num()?,
            "sim.dt" => self.sim.dt = num()?,
            "sim.duration" => self.sim.duration = num()?,
            "sim.mode" => {
                self.sim.mode = SimMode::from_name(value)
                    .ok_or_else(|| format!("expected massless-leg or kinematic-foot, got '{value}'"))?
            }
            "sim.kn" => self.sim.contact.stiffness = num()?,
            "sim.dn" => self.sim.contact.damping = num()?,
            "sim.mu" => self.sim.contact.friction = num()?,
            "sim.noise_sigma" => self.sim.noise_sigma = num()?,
            "sim.seed" => {
                self.sim.seed = value.parse().map_err(|_| format!("expected an unsigned integer, got '{value}'"))?
            }
            "sim.init_roll" => self.init_roll = num()?,
            "sim.init_pitch" => self.init_pitch = num()?,
            "command.vx" => self.command_vx = Profile::parse(value)?,
            "command.wz" => self.command_wz = Profile::parse(value)?,
            "disturbance.impulse" => self.disturbance.impulse = num()?,
            "disturbance.start" => self.disturbance.start = num()?,
            "disturbance.duration" => self.disturbance.duration = num()?,
            "disturbance.direction" => self.disturbance.direction = parse_vec3(value)?,
            "disturbance.point" => self.disturbance.point = parse_vec3(value)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let s = s.trim();
    s.parse::<f64>().map_err(|_| format!("expected a number, got '{s}'"))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "1" | "on" | "yes" => Ok(true),
        "false" | "0" | "off" | "no" => Ok(false),
        _ => Err(format!("expected a boolean, got '{s}'")),
    }
}

fn parse_vec3(s: &str) -> Result<Vector3<f64>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got '{s}'"));
    }
    Ok(Vector3::new(parse_f64(parts[0])?, parse_f64(parts[1])?, parse_f64(parts[2])?))
}

/// Parses scenario text without validating it.
pub fn parse_scenario(text: &str) -> Result<Scenario, HarnessError> {
    let mut scenario = Scenario::default();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let err = |message: String| HarnessError::Parse { line: line_no, message };
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| err("unterminated section header".into()))?.trim();
            section = (!name.is_empty()).then(|| name.to_string());
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let full = match (&section, key.contains('.')) {
            (Some(s), false) => format!("{s}.{key}"),
            _ => key.to_string(),
        };
        scenario.set(&full, value).map_err(err)?;
    }
    Ok(scenario)
}

/// Reads, parses and validates a scenario file.
pub fn load_config(path: &Path) -> Result<Scenario, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    let scenario = parse_scenario(&text)?;
    scenario.validate()?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default_and_valid() {
        let s = parse_scenario("").unwrap();
        assert_eq!(s, Scenario::default());
        s.validate().unwrap();
    }

    #[test]
    fn sections_and_comments() {
        let s = parse_scenario("# comment\n[gait]\nf = 3.0\n; other\nsim.dt = 0.0005\n").unwrap();
        assert_eq!(s.gait.frequency, 3.0);
        assert_eq!(s.sim.dt, 0.0005);
    }

    #[test]
    fn unknown_key_reports_line() {
        match parse_scenario("gait.f = 3\n\ngait.bogus = 1\n") {
            Err(HarnessError::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("gait.bogus"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_scenario("gait.f 3"), Err(HarnessError::Parse { line: 1, .. })));
        assert!(matches!(parse_scenario("gait.f = fast"), Err(HarnessError::Parse { line: 1, .. })));
    }

    #[test]
    fn bound_violation_names_field() {
        let s = parse_scenario("gait.c2 = 0.5").unwrap();
        match s.validate() {
            Err(HarnessError::Validation(m)) => assert!(m.contains("c2"), "{m}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn compliance_off_needs_kinematic_feet() {
        assert!(parse_scenario("compliance.enable = false").unwrap().validate().is_err());
        parse_scenario("compliance.enable = false\nsim.mode = kinematic-foot").unwrap().validate().unwrap();
    }

    #[test]
    fn profiles() {
        let p = Profile::parse("0:0, 1:0, 5:1, 9:1").unwrap();
        assert_eq!(p.value_at(-1.0), 0.0);
        assert_eq!(p.value_at(3.0), 0.5);
        assert_eq!(p.value_at(20.0), 1.0);
        let s = parse_scenario("command.vx = 0:0, 2:1\ncommand.wz = 3:0.1").unwrap();
        assert_eq!(s.breakpoints(), vec![0.0, 2.0, 3.0]);
        assert_eq!(s.command_vx_at(1.0), 0.5);
        assert_eq!(parse_scenario("").unwrap().command_vx_at(4.0), 1.0);
        assert!(parse_scenario("command.vx = 2:1, 1:0").unwrap().validate().is_err());
    }

    #[test]
    fn ini_round_trip_and_hash() {
        let mut s = Scenario { command_vx: Profile::parse("0:0, 1:0.25").unwrap(), ..Default::default() };
        s.disturbance.impulse = 2.1;
        s.sim.seed = 42;
        let back = parse_scenario(&s.to_ini()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.config_hash(), s.config_hash());
        assert_ne!(Scenario::default().config_hash(), s.config_hash());
        assert_eq!(s.config_hash().len(), 64);
    }

    #[test]
    fn disturbance_direction() {
        let s = parse_scenario("disturbance.impulse = 2.1\ndisturbance.direction = 0,-2,0").unwrap();
        let d = s.disturbance.to_disturbance().unwrap();
        assert!((d.impulse - Vector3::new(0.0, -2.1, 0.0)).norm() < 1e-15);
        assert!(parse_scenario("").unwrap().disturbances().is_empty());
    }
}
