//! Gait parameters, the derived phase timeline and phase queries.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::LegGroup;

/// The ten control variables that shape a flying-trot foot trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaitParams {
    /// Step frequency f (Hz).
    pub frequency: f64,
    /// Forward speed v_x (m/s).
    pub forward_speed: f64,
    /// Foot height below the hip at touchdown, z_s (m, negative).
    pub landing_height: f64,
    /// Swing ascent height h_wa (m).
    pub swing_height: f64,
    /// Support descent height h_sd (m).
    pub support_descent: f64,
    /// Ratio of forward to vertical takeoff speed.
    pub c1: f64,
    /// Ratio of touchdown foot speed to landing trunk speed, in [-1, 0].
    pub c2: f64,
    /// Retraction acceleration as a multiple of g, <= -1.
    pub c3: f64,
    /// Ratio of retraction end speed to takeoff foot speed, <= 0.
    pub c4: f64,
    /// Share of the swing window spent ascending, in (0, 1).
    pub c5: f64,
    pub gravity: f64,
}

impl Default for GaitParams {
    /// The running-simulation set: 2.9 Hz at 1.0 m/s.
    fn default() -> Self {
        Self {
            frequency: 2.9,
            forward_speed: 1.0,
            landing_height: -0.14,
            swing_height: 0.04,
            support_descent: 0.005,
            c1: 4.0,
            c2: -0.1,
            c3: -3.0,
            c4: -4.5,
            c5: 0.2,
            gravity: 9.81,
        }
    }
}

impl GaitParams {
    /// The hardware speed-experiment set: 2.8 Hz at 0.8 m/s.
    pub fn speed_experiment() -> Self {
        Self {
            frequency: 2.8,
            forward_speed: 0.8,
            landing_height: -0.154,
            swing_height: 0.02,
            support_descent: 0.01,
            c1: 2.0,
            c2: -0.1,
            c3: -2.0,
            c4: -0.1,
            c5: 0.6,
            gravity: 9.81,
        }
    }

    pub fn with_speed(self, forward_speed: f64) -> Self {
        Self { forward_speed, ..self }
    }

    pub fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    /// Speed magnitude used by the vertical plan; the vertical motion does
    /// not depend on the travel direction.
    pub(crate) fn speed_magnitude(&self) -> f64 {
        self.forward_speed.abs()
    }

    /// Checks every parameter bound and reports all violations at once.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let mut check = |ok: bool, field: &'static str, bound: &'static str, value: f64| {
            if !ok || !value.is_finite() {
                out.push(Violation { field, bound, value });
            }
        };
        check(self.frequency > 0.0, "f", "f>0", self.frequency);
        check(self.forward_speed.is_finite(), "vx", "vx finite", self.forward_speed);
        check(self.landing_height < 0.0, "zs", "zs<0", self.landing_height);
        check(self.swing_height > 0.0, "hwa", "hwa>0", self.swing_height);
        check(self.support_descent >= 0.0, "hsd", "hsd≥0", self.support_descent);
        check(self.c1 > 0.0, "c1", "c1>0", self.c1);
        check((-1.0..=0.0).contains(&self.c2), "c2", "c2∈[−1,0]", self.c2);
        check(self.c3 <= -1.0, "c3", "c3≤−1", self.c3);
        check(self.c4 <= 0.0, "c4", "c4≤0", self.c4);
        check(self.c5 > 0.0 && self.c5 < 1.0, "c5", "c5∈(0,1)", self.c5);
        check(self.gravity > 0.0, "g", "g>0", self.gravity);
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }
}

/// One violated parameter bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub bound: &'static str,
    pub value: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} violates {}", self.field, self.value, self.bound)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimelineError {
    #[error("invalid gait parameters: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("support phase has non-positive duration {0} s: step frequency too high for the flight")]
    SupportTooShort(f64),
    #[error("swing window has non-positive duration {0} s: retraction consumes the swing")]
    SwingTooShort(f64),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Phase durations of one gait cycle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimeline {
    pub period: f64,
    pub support: f64,
    pub retract: f64,
    pub swing_up: f64,
    pub swing_down: f64,
    pub flight: f64,
}

impl PhaseTimeline {
    /// Cycle offset of a leg group: L starts at 0, R half a period later.
    pub fn group_offset(&self, group: LegGroup) -> f64 {
        match group {
            LegGroup::L => 0.0,
            LegGroup::R => self.period / 2.0,
        }
    }

    /// Knot times (0, t_z1, t_z2, t_z3, T).
    pub fn knot_times(&self) -> [f64; 5] {
        let t1 = self.support;
        let t2 = t1 + self.retract;
        let t3 = t2 + self.swing_up;
        [0.0, t1, t2, t3, self.period]
    }

    pub fn swing_window(&self) -> f64 {
        self.period - self.support
    }
}

/// Derives phase durations. The flight time is the positive root of the
/// ballistic flight that leaves the ground at v_x/c1 and lands h_sd lower.
pub fn derive_timeline(params: &GaitParams) -> Result<PhaseTimeline, TimelineError> {
    params.validate().map_err(TimelineError::Invalid)?;
    let g = params.gravity;
    let period = params.period();
    let flight = flight_time(params);
    let support = period / 2.0 - flight;
    if support <= 0.0 {
        return Err(TimelineError::SupportTooShort(support));
    }
    let retract = (1.0 - params.c4) * params.speed_magnitude() / (params.c1 * params.c3.abs() * g);
    let swing = period - support - retract;
    if swing <= 0.0 {
        return Err(TimelineError::SwingTooShort(swing));
    }
    let swing_up = params.c5 * swing;
    Ok(PhaseTimeline { period, support, retract, swing_up, swing_down: swing - swing_up, flight })
}

pub(crate) fn takeoff_speed(params: &GaitParams) -> f64 {
    params.speed_magnitude() / params.c1
}

pub(crate) fn landing_speed(params: &GaitParams) -> f64 {
    let up = takeoff_speed(params);
    -(up * up + 2.0 * params.gravity * params.support_descent).sqrt()
}

fn flight_time(params: &GaitParams) -> f64 {
    (takeoff_speed(params) - landing_speed(params)) / params.gravity
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseKind {
    Support,
    Retract,
    SwingUp,
    SwingDown,
}

impl PhaseKind {
    pub fn is_support(self) -> bool {
        self == PhaseKind::Support
    }

    pub fn name(self) -> &'static str {
        match self {
            PhaseKind::Support => "support",
            PhaseKind::Retract => "retract",
            PhaseKind::SwingUp => "swing_up",
            PhaseKind::SwingDown => "swing_down",
        }
    }

    pub fn from_name(name: &str) -> Option<PhaseKind> {
        [PhaseKind::Support, PhaseKind::Retract, PhaseKind::SwingUp, PhaseKind::SwingDown]
            .into_iter()
            .find(|k| k.name() == name)
    }
}

/// Phase of a leg group and the time elapsed since the phase began.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegPhase {
    pub kind: PhaseKind,
    pub local_time: f64,
    /// Time since the group's cycle (support entry) began.
    pub cycle_time: f64,
}

pub fn phase_at(timeline: &PhaseTimeline, t: f64, group: LegGroup) -> LegPhase {
    let cycle_time = (t - timeline.group_offset(group)).rem_euclid(timeline.period);
    phase_in_cycle(timeline, cycle_time)
}

/// Phase for a time measured from the group's support entry.
pub fn phase_in_cycle(timeline: &PhaseTimeline, cycle_time: f64) -> LegPhase {
    let [_, t1, t2, t3, _] = timeline.knot_times();
    let (kind, start) = if cycle_time < t1 {
        (PhaseKind::Support, 0.0)
    } else if cycle_time < t2 {
        (PhaseKind::Retract, t1)
    } else if cycle_time < t3 {
        (PhaseKind::SwingUp, t2)
    } else {
        (PhaseKind::SwingDown, t3)
    };
    LegPhase { kind, local_time: cycle_time - start, cycle_time }
}

pub fn planned_duty_factor(timeline: &PhaseTimeline) -> f64 {
    timeline.support / timeline.period
}

/// Trotting frequency typical for an animal of mass `m` kg.
pub fn preferred_frequency(mass: f64) -> f64 {
    3.35 * mass.powf(-0.13)
}

/// Trotting speed typical for an animal of mass `m` kg.
pub fn preferred_speed(mass: f64) -> f64 {
    1.09 * mass.powf(0.222)
}
