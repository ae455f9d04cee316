//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits 0 after reporting so the rest of the workspace suite still runs;
//! pass `--strict` (`cargo test --test acceptance -- --strict`) to exit 1
//! when any criterion fails.

use std::path::PathBuf;
use std::time::Instant;

use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use quadtrot::compliance::{gravity_comp, map_to_torques, tune_vertical_gains};
use quadtrot::gait_clock::{derive_timeline, GaitParams, PhaseTimeline};
use quadtrot::harness::{
    compute_metrics_with, load_config, simulate, write_csv, MetricsOptions, MetricsReport, Scenario,
};
use quadtrot::kinematics::{fk_foot, ik_leg, jacobian, neutral_foot_y, JointAngles, LegId, RobotGeometry};
use quadtrot::trajectory::{heading_rotation, synth_z_keyframes, SteadyLegPlan};

struct Verdict {
    pass: bool,
    detail: String,
}

fn scenario(name: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Runs a scenario; a diverged run is scored on its partial telemetry.
fn run(sc: &Scenario, options: &MetricsOptions) -> (MetricsReport, f64, bool) {
    let start = Instant::now();
    let outcome = simulate(sc).expect("valid scenario");
    let elapsed = start.elapsed().as_secs_f64();
    let metrics = compute_metrics_with(&outcome.telemetry, options).expect("enough telemetry");
    (metrics, elapsed, outcome.error.is_some())
}

/// Smallest positive root of f on (0, hi] by bisection, f(0+) > 0 > f(hi).
fn bisect(f: impl Fn(f64) -> f64, hi: f64) -> f64 {
    let (mut a, mut b) = (1e-12, hi);
    assert!(f(a) > 0.0 && f(b) < 0.0, "bracket");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Phase durations from the ballistic flight and the constant-acceleration
/// retract, found numerically.
fn timeline_oracle(p: &GaitParams) -> [f64; 5] {
    let g = p.gravity;
    let period = 1.0 / p.frequency;
    let up = p.forward_speed.abs() / p.c1;
    // Trunk leaves the ground at `up` and lands h_sd lower.
    let flight = bisect(|t| up * t - 0.5 * g * t * t + p.support_descent, 10.0);
    let support = period / 2.0 - flight;
    // Foot leaves at -up and is braked at |c3| g until it moves at -c4 up.
    let a = p.c3.abs() * g;
    let target = -p.c4 * up;
    let retract = if target > -up { bisect(|t| target - (-up + a * t), 10.0) } else { 0.0 };
    let swing = period - support - retract;
    [flight, support, retract, p.c5 * swing, (1.0 - p.c5) * swing]
}

fn timeline_values(t: &PhaseTimeline) -> [f64; 5] {
    [t.flight, t.support, t.retract, t.swing_up, t.swing_down]
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for p in [GaitParams::default(), GaitParams::speed_experiment()] {
        let t = derive_timeline(&p).expect("valid parameters");
        for (a, b) in timeline_values(&t).iter().zip(timeline_oracle(&p)) {
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    Verdict { pass: worst <= 1e-9 && elapsed < 1.0, detail: format!("max |err| {worst:.2e} s, {elapsed:.3} s") }
}

fn criterion_2() -> Verdict {
    let p = GaitParams::default();
    let t = derive_timeline(&p).unwrap();
    let k = synth_z_keyframes(&p, &t).unwrap();
    let up = p.forward_speed / p.c1;
    let a = p.c3.abs() * p.gravity;
    let dt = timeline_oracle(&p)[2];
    let p_oracle = p.landing_height - p.support_descent - up * dt + 0.5 * a * dt * dt;
    let v_oracle = -up + a * dt;
    let (dp, dv) = ((k.positions[2] - p_oracle).abs(), (k.velocities[2] - v_oracle).abs());
    let pass =
        dp <= 1e-9 && dv <= 1e-9 && (k.positions[2] + 0.1246).abs() < 5e-5 && (k.velocities[2] - 1.125).abs() < 1e-9;
    Verdict {
        pass,
        detail: format!("p = {:.6} m, v = {:.6} m/s, oracle err {dp:.1e} / {dv:.1e}", k.positions[2], k.velocities[2]),
    }
}

fn criterion_3(m: &MetricsReport, elapsed: f64, diverged: bool) -> Verdict {
    let pass = !diverged
        && m.steady_cycles > 0
        && m.cycles_with_flight >= 0.9
        && (0.21..=0.41).contains(&m.duty_factor)
        && elapsed < 30.0;
    Verdict {
        pass,
        detail: format!(
            "flight in {:.0}% of {} steady cycles, duty {:.3}, {elapsed:.2} s wall",
            100.0 * m.cycles_with_flight,
            m.steady_cycles,
            m.duty_factor
        ),
    }
}

fn criterion_4(m: &MetricsReport, diverged: bool) -> Verdict {
    let pass =
        !diverged && !m.fell && m.cycle_speed_error_max <= 0.2 && m.roll_envelope <= 0.10 && m.pitch_envelope <= 0.10;
    Verdict {
        pass,
        detail: format!(
            "cycle-mean speed error {:.3} (per tick {:.3}) m/s, roll {:.3}, pitch {:.3} rad{}",
            m.cycle_speed_error_max,
            m.speed_error_max,
            m.roll_envelope,
            m.pitch_envelope,
            if m.fell { ", fell" } else { "" }
        ),
    }
}

fn criterion_5() -> Verdict {
    let (m, _, diverged) = run(&scenario("balance.ini"), &MetricsOptions { settle_band: 0.03 });
    let settle = m.settle_time.filter(|s| *s <= 3.0);
    let pass = !diverged && !m.fell && m.peak_roll <= 0.10 && settle.is_some();
    Verdict {
        pass,
        detail: format!(
            "peak roll {:.3} rad, settle {}{}",
            m.peak_roll,
            m.settle_time.map_or("never".to_string(), |s| format!("{s:.2} s")),
            if m.fell { ", fell" } else { "" }
        ),
    }
}

fn criterion_6() -> Verdict {
    let (m, _, diverged) = run(&scenario("speed.ini"), &MetricsOptions::default());
    let pass = !diverged && !m.fell && (m.mean_speed - 0.80).abs() <= 0.10;
    Verdict { pass, detail: format!("steady mean speed {:.3} m/s{}", m.mean_speed, if m.fell { ", fell" } else { "" }) }
}

fn criterion_7() -> Verdict {
    let p = GaitParams::default();
    let t = derive_timeline(&p).unwrap();
    let mass = RobotGeometry::default().mass / 2.0;
    let tuning = tune_vertical_gains(t.support, mass, 0.0);
    let dt = 1e-4;
    let (mut x, mut v, mut time) = (0.0f64, -1.0f64, 0.0f64);
    let half = loop {
        v += (-tuning.kp * x - tuning.kd * v) / mass * dt;
        let next = x + v * dt;
        time += dt;
        if x < 0.0 && next >= 0.0 {
            break time - dt * next / (next - x);
        }
        x = next;
    };
    let rel = (half - t.support).abs() / t.support;
    Verdict {
        pass: rel <= 0.02,
        detail: format!("half period {half:.5} s vs support {:.5} s ({:.2}%)", t.support, 100.0 * rel),
    }
}

fn property_checks() -> Vec<(&'static str, bool)> {
    let geometry = RobotGeometry::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut out = Vec::new();

    let mut fk_ik = true;
    let mut fd = true;
    let mut work = true;
    for _ in 0..2000 {
        let leg = LegId::ALL[rng.gen_range(0..4)];
        let q = JointAngles::new(rng.gen_range(-0.6..0.6), rng.gen_range(-1.2..1.2), rng.gen_range(0.2..2.4));
        let p = fk_foot(leg, &q, &geometry).position;
        match ik_leg(leg, &p, &geometry) {
            Ok(sol) => fk_ik &= (fk_foot(leg, &sol.angles, &geometry).position - p).norm() <= 1e-9,
            Err(_) => fk_ik = false,
        }
        let j = jacobian(leg, &q, &geometry);
        let h = 1e-6;
        for c in 0..3 {
            let (mut a, mut b) = (q.as_vector(), q.as_vector());
            a[c] += h;
            b[c] -= h;
            let col = (fk_foot(leg, &JointAngles::from_vector(&a), &geometry).position
                - fk_foot(leg, &JointAngles::from_vector(&b), &geometry).position)
                / (2.0 * h);
            fd &= (col - j.column(c)).amax() <= 1e-5;
        }
        let qd = Vector3::from_fn(|_, _| rng.gen_range(-5.0..5.0));
        let f = Vector3::from_fn(|_, _| rng.gen_range(-30.0..30.0));
        work &= (map_to_torques(&j, &f).dot(&qd) - f.dot(&(j * qd))).abs() <= 1e-9;
    }
    out.push(("FK/IK round trip", fk_ik));
    out.push(("Jacobian vs finite differences", fd));

    let mut continuity = true;
    for p in [GaitParams::default(), GaitParams::speed_experiment()] {
        let t = derive_timeline(&p).unwrap();
        let k = synth_z_keyframes(&p, &t).unwrap();
        for i in 0..4 {
            let (end, start) = (k.segment(i).eval(k.times[i + 1]), k.segment((i + 1) % 4).eval(k.times[(i + 1) % 4]));
            continuity &= (end.0 - start.0).abs() <= 1e-9 && (end.1 - start.1).abs() <= 1e-9;
        }
        let plan =
            SteadyLegPlan::new(&p, &t, &Default::default(), 0.0, neutral_foot_y(LegId::LeftFore, &geometry)).unwrap();
        for axis in [plan.x, plan.y] {
            let eps = 1e-12;
            let (a, b) = (axis.eval(t.support - eps), axis.eval(t.support));
            let (c, d) = (axis.eval(t.period), axis.eval(0.0));
            continuity &= (a.0 - b.0).abs() <= 1e-9 && (a.1 - b.1).abs() <= 1e-9;
            continuity &= (c.0 - d.0).abs() <= 1e-9 && (c.1 - d.1).abs() <= 1e-9;
        }
    }
    out.push(("trajectory C0/C1 continuity", continuity));

    let mut ortho = true;
    let id = Matrix3::identity();
    for _ in 0..1000 {
        let r = heading_rotation(rng.gen_range(-10.0..10.0));
        ortho &= (r.transpose() * r - id).amax() <= 1e-12;
        let axis = Vector3::from_fn(|_, _| rng.gen_range(-3.0..3.0));
        let q = UnitQuaternion::from_scaled_axis(axis);
        let m = *q.to_rotation_matrix().matrix();
        ortho &= (m.transpose() * m - id).amax() <= 1e-12;
    }
    out.push(("rotation orthonormality", ortho));

    let sum_ok = (1..=4).all(|n| (n as f64 * gravity_comp(n, &geometry) - geometry.weight()).abs() <= 1e-12);
    out.push(("gravity compensation sum = m g", sum_ok));
    out.push(("virtual-work identity", work));

    let mut sc = scenario("running.ini");
    sc.sim.duration = 2.0;
    sc.sim.noise_sigma = 0.01;
    sc.sim.seed = 7;
    let digest = |sc: &Scenario| {
        let mut buf = Vec::new();
        write_csv(&simulate(sc).unwrap().telemetry, &mut buf).unwrap();
        Sha256::digest(&buf)
    };
    out.push(("determinism", digest(&sc) == digest(&sc)));
    out
}

fn criterion_8() -> Verdict {
    let checks = property_checks();
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    Verdict {
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} suites green", checks.len())
        } else {
            format!("failed: {}", failed.join(", "))
        },
    }
}

fn main() {
    let strict = std::env::args().any(|a| a == "--strict");
    let running = scenario("running.ini");
    let (m, elapsed, diverged) = run(&running, &MetricsOptions::default());

    let results = [
        ("timeline closed forms", criterion_1()),
        ("keyframe synthesis", criterion_2()),
        ("flight phase and duty factor", criterion_3(&m, elapsed, diverged)),
        ("speed tracking and posture", criterion_4(&m, diverged)),
        ("balance recovery", criterion_5()),
        ("mean speed at 0.8 m/s", criterion_6()),
        ("vertical spring resonance", criterion_7()),
        ("property suites", criterion_8()),
    ];
    let mut passed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        passed += v.pass as usize;
        println!("criterion {} [{}] {name}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if strict && passed < results.len() {
        std::process::exit(1);
    }
}
