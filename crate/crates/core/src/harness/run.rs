//! Scenario execution and the open-loop plan dump.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{UnitQuaternion, Vector3};

use super::config::Scenario;
use super::controller::Controller;
use super::metrics::{compute_metrics, MetricsReport};
use super::telemetry::{write_csv, LegRow, Telemetry, TelemetryHeader, TelemetryRow};
use super::HarnessError;
use crate::gait_clock::{derive_timeline, phase_in_cycle};
use crate::kinematics::{neutral_foot_y, LegId};
use crate::simulator::{SimError, Simulator, WorldState};
use crate::trajectory::{synth_z_keyframes, SteadyLegPlan};

/// Telemetry of a run; `error` is set if the simulation diverged, in which
/// case `telemetry` holds the rows up to the failure.
pub struct RunOutcome {
    pub telemetry: Telemetry,
    pub error: Option<HarnessError>,
}

pub fn telemetry_header(scenario: &Scenario) -> TelemetryHeader {
    let inertia = scenario.sim.inertia;
    TelemetryHeader {
        config_hash: scenario.config_hash(),
        inertia: Vector3::new(inertia[(0, 0)], inertia[(1, 1)], inertia[(2, 2)]),
        dt: scenario.sim.dt,
        gait_period: scenario.gait.period(),
        nominal_height: scenario.nominal_height(),
        breakpoints: scenario.breakpoints(),
        disturbance: scenario.disturbance.to_disturbance().map(|d| (d.start, d.end())),
        seed: scenario.sim.seed,
    }
}

/// Initial state: trunk at rest at the nominal height, feet at the landing
/// height below their hips.
pub fn initial_world(scenario: &Scenario) -> WorldState {
    let orientation = UnitQuaternion::from_euler_angles(scenario.init_roll, scenario.init_pitch, 0.0);
    WorldState::standing(&scenario.geometry, scenario.nominal_height(), scenario.gait.landing_height, orientation)
}

/// Runs the closed loop for the configured duration.
pub fn simulate(scenario: &Scenario) -> Result<RunOutcome, HarnessError> {
    scenario.validate()?;
    let mut sim = Simulator::new(scenario.sim, scenario.geometry)
        .map_err(|e| HarnessError::Validation(e.to_string()))?
        .with_disturbances(scenario.disturbances());
    let mut controller = Controller::new(scenario)?;
    let dt = scenario.sim.dt;
    let ticks = (scenario.sim.duration / dt).round() as u64;
    let mut world = initial_world(scenario);
    let mut rows = Vec::with_capacity(ticks as usize);
    let mut error = None;

    for tick in 0..ticks {
        let sample = sim.readout(&world);
        let out = controller.step(&sample, dt)?;
        let legs = LegId::ALL.map(|leg| {
            let i = leg.index();
            let l = &out.legs[i];
            LegRow {
                phase: l.phase,
                desired: l.desired,
                actual: world.feet[i].body,
                contact: sample.contacts[i],
                fz: l.force.force.z,
                torques: l.force.torques,
            }
        });
        let (roll, pitch, yaw) = world.rpy();
        rows.push(TelemetryRow {
            t: world.time,
            position: world.position,
            velocity: world.velocity,
            rpy: Vector3::new(roll, pitch, yaw),
            rates: world.angular_velocity,
            vx_cmd: out.vx_command,
            wz_cmd: out.wz_command,
            vx_est: out.velocity_estimate.x,
            vy_est: out.velocity_estimate.y,
            legs,
        });
        match sim.step(&world, &out.commands) {
            Ok(next) => world = next,
            Err(source @ SimError::NumericalDivergence { .. }) => {
                error = Some(HarnessError::Divergence { tick, source });
                break;
            }
            Err(other) => return Err(HarnessError::Validation(other.to_string())),
        }
    }
    Ok(RunOutcome { telemetry: Telemetry { header: telemetry_header(scenario), rows }, error })
}

/// Runs a scenario, writes its telemetry CSV and returns the metrics. On
/// divergence the partial telemetry is still written before the error is
/// returned.
pub fn run_scenario(scenario: &Scenario, out_path: &Path) -> Result<MetricsReport, HarnessError> {
    let outcome = simulate(scenario)?;
    let file = BufWriter::new(File::create(out_path)?);
    write_csv(&outcome.telemetry, file)?;
    if let Some(e) = outcome.error {
        return Err(e);
    }
    compute_metrics(&outcome.telemetry)
}

/// Writes one cycle of the steady open-loop foot plan of every leg at the
/// configured gait speed: knots as header lines, then samples every `sim.dt`
/// with columns t, leg, phase, px, py, pz, vx, vy, vz (hip frame).
pub fn write_plan<W: Write>(scenario: &Scenario, mut out: W) -> Result<(), HarnessError> {
    scenario.validate()?;
    let params = scenario.gait;
    let timeline = derive_timeline(&params).map_err(|e| HarnessError::Validation(e.to_string()))?;
    let gains = scenario.stabilizer.placement;
    writeln!(out, "# quadtrot plan")?;
    writeln!(out, "# config_hash: {}", scenario.config_hash())?;
    writeln!(out, "# period: {}", timeline.period)?;
    writeln!(
        out,
        "# timeline: support={} retract={} swing_up={} swing_down={} flight={}",
        timeline.support, timeline.retract, timeline.swing_up, timeline.swing_down, timeline.flight
    )?;
    let knots = synth_z_keyframes(&params, &timeline).map_err(|e| HarnessError::Validation(e.to_string()))?;
    let join = |v: &[f64; 5]| v.map(|x| x.to_string()).join(" ");
    writeln!(
        out,
        "# z_knots: t=[{}] p=[{}] v=[{}]",
        join(&knots.times),
        join(&knots.positions),
        join(&knots.velocities)
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "leg", "phase", "px", "py", "pz", "vx", "vy", "vz"])?;
    let samples = (timeline.period / scenario.sim.dt).round() as usize;
    for leg in LegId::ALL {
        let plan = SteadyLegPlan::new(&params, &timeline, &gains, 0.0, neutral_foot_y(leg, &scenario.geometry))
            .map_err(|e| HarnessError::Validation(e.to_string()))?;
        let offset = timeline.group_offset(leg.group());
        for k in 0..=samples {
            let t = k as f64 * timeline.period / samples as f64;
            let cycle_time = (t - offset).rem_euclid(timeline.period);
            let (p, v) = plan.eval(cycle_time);
            let phase = phase_in_cycle(&timeline, cycle_time).kind;
            let nums = [p.x, p.y, p.z, v.x, v.y, v.z].map(|x| x.to_string());
            let mut record = vec![t.to_string(), leg.short_name().to_string(), phase.name().to_string()];
            record.extend(nums);
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    Ok(())
}
