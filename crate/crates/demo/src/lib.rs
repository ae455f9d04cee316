//! Browser demo: plan a gait cycle, solve leg IK and run short simulations
//! from a scenario text. Every export returns a JSON string.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use nalgebra::Vector3;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use quadtrot::gait_clock::{derive_timeline, phase_in_cycle, PhaseTimeline};
use quadtrot::harness::{compute_metrics, parse_scenario, simulate as run, MetricsReport};
use quadtrot::kinematics::{fk_foot, ik_leg, neutral_foot_y, LegId};
use quadtrot::trajectory::{synth_z_keyframes, SteadyLegPlan, ZKeyframes};

/// Longest simulation the page may request (s).
const MAX_DURATION: f64 = 20.0;
/// Samples kept per simulated second.
const TRACE_RATE: f64 = 200.0;

#[derive(Serialize)]
struct PlanView {
    timeline: PhaseTimeline,
    keyframes: ZKeyframes,
    t: Vec<f64>,
    phase: Vec<&'static str>,
    x: Vec<f64>,
    z: Vec<f64>,
    vz: Vec<f64>,
}

#[derive(Serialize)]
struct LegView {
    leg: &'static str,
    angles_deg: [f64; 3],
    near_singular: bool,
    fk_error: f64,
}

#[derive(Serialize)]
struct SimView {
    t: Vec<f64>,
    z: Vec<f64>,
    vx: Vec<f64>,
    vx_cmd: Vec<f64>,
    roll: Vec<f64>,
    pitch: Vec<f64>,
    flight: Vec<bool>,
    diverged: Option<String>,
    metrics: Option<MetricsReport>,
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// One steady cycle of the left-fore foot plan in its hip frame.
pub fn plan_cycle_json(config: &str, samples: usize) -> Result<String, String> {
    let sc = parse_scenario(config).map_err(|e| e.to_string())?;
    let timeline = derive_timeline(&sc.gait).map_err(|e| e.to_string())?;
    let keyframes = synth_z_keyframes(&sc.gait, &timeline).map_err(|e| e.to_string())?;
    let leg = LegId::LeftFore;
    let plan =
        SteadyLegPlan::new(&sc.gait, &timeline, &sc.stabilizer.placement, 0.0, neutral_foot_y(leg, &sc.geometry))
            .map_err(|e| e.to_string())?;
    let n = samples.clamp(2, 5000);
    let mut view = PlanView { timeline, keyframes, t: vec![], phase: vec![], x: vec![], z: vec![], vz: vec![] };
    for k in 0..n {
        let t = timeline.period * k as f64 / (n - 1) as f64;
        let (p, v) = plan.eval(t);
        view.t.push(t);
        view.phase.push(phase_in_cycle(&timeline, t).kind.name());
        view.x.push(p.x);
        view.z.push(p.z);
        view.vz.push(v.z);
    }
    json(&view)
}

/// Joint angles reaching a hip-frame foot target.
pub fn solve_leg_json(leg: &str, x: f64, y: f64, z: f64) -> Result<String, String> {
    let id = LegId::from_short_name(leg).ok_or_else(|| format!("unknown leg {leg:?} (use lf, rf, lh or rh)"))?;
    let geometry = Default::default();
    let target = Vector3::new(x, y, z);
    let sol = ik_leg(id, &target, &geometry).map_err(|e| e.to_string())?;
    let q = sol.angles;
    json(&LegView {
        leg: id.short_name(),
        angles_deg: [q.roll, q.hip_pitch, q.knee_pitch].map(f64::to_degrees),
        near_singular: sol.near_singular,
        fk_error: (fk_foot(id, &q, &geometry).position - target).norm(),
    })
}

/// Runs a scenario for at most `duration` seconds and returns a decimated
/// trace plus metrics.
pub fn simulate_json(config: &str, duration: f64) -> Result<String, String> {
    let mut sc = parse_scenario(config).map_err(|e| e.to_string())?;
    if !(duration > 0.0) {
        return Err("duration must be positive".into());
    }
    sc.sim.duration = duration.min(MAX_DURATION);
    let outcome = run(&sc).map_err(|e| e.to_string())?;
    let rows = &outcome.telemetry.rows;
    let stride = ((1.0 / (TRACE_RATE * sc.sim.dt)).round() as usize).max(1);
    let mut view = SimView {
        t: vec![],
        z: vec![],
        vx: vec![],
        vx_cmd: vec![],
        roll: vec![],
        pitch: vec![],
        flight: vec![],
        diverged: outcome.error.as_ref().map(|e| e.to_string()),
        metrics: compute_metrics(&outcome.telemetry).ok(),
    };
    for r in rows.iter().step_by(stride) {
        view.t.push(r.t);
        view.z.push(r.position.z);
        view.vx.push(r.forward_speed());
        view.vx_cmd.push(r.vx_cmd);
        view.roll.push(r.rpy.x);
        view.pitch.push(r.rpy.y);
        view.flight.push(r.contacts().iter().all(|c| !c));
    }
    json(&view)
}

#[wasm_bindgen]
pub fn plan_cycle(config: &str, samples: usize) -> Result<String, JsValue> {
    plan_cycle_json(config, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn solve_leg(leg: &str, x: f64, y: f64, z: f64) -> Result<String, JsValue> {
    solve_leg_json(leg, x, y, z).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate(config: &str, duration: f64) -> Result<String, JsValue> {
    simulate_json(config, duration).map_err(|e| JsValue::from_str(&e))
}
