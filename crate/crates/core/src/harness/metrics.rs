//! Scenario metrics computed from telemetry alone.

use serde::Serialize;

use super::telemetry::{Telemetry, TelemetryRow};
use super::HarnessError;

/// Time excluded from the steady windows after every command breakpoint (s).
pub const SETTLING_EXCLUSION: f64 = 1.0;
/// Time |roll| must stay inside the band to count as settled (s).
pub const SETTLE_HOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsOptions {
    /// Roll band for the settle-time detector (rad).
    pub settle_band: f64,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        Self { settle_band: 0.02 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub duration: f64,
    /// Mean per-leg contact fraction over touchdown-to-touchdown cycles.
    pub duty_factor: f64,
    /// Fraction of ticks with no foot on the ground.
    pub flight_fraction: f64,
    /// Gait cycles (left-fore touchdown to touchdown) inside steady windows.
    pub steady_cycles: usize,
    /// Share of those cycles containing at least one all-feet-off interval.
    pub cycles_with_flight: f64,
    /// Forward speed minus command over steady windows, per tick (m/s).
    pub speed_error_mean: f64,
    pub speed_error_rms: f64,
    pub speed_error_max: f64,
    /// The same error after averaging the speed over one gait period (m/s).
    pub cycle_speed_error_max: f64,
    pub cycle_speed_error_rms: f64,
    /// Mean forward speed over steady windows (m/s).
    pub mean_speed: f64,
    /// Largest |roll| and |pitch| over steady windows (rad).
    pub roll_envelope: f64,
    pub pitch_envelope: f64,
    /// Largest |roll| from the disturbance start (or the run start) on (rad).
    pub peak_roll: f64,
    pub settle_band: f64,
    /// Time from disturbance end (or run start) until |roll| enters the band
    /// and stays there for 0.5 s; None if it never does.
    pub settle_time: Option<f64>,
    pub min_height: f64,
    /// Trunk dropped below half its nominal height.
    pub fell: bool,
    /// Horizontal displacement from the first to the last row (m).
    pub distance: f64,
    /// Largest horizontal distance from the start position (m).
    pub max_excursion: f64,
}

fn in_steady_window(t: f64, breakpoints: &[f64]) -> bool {
    !breakpoints.iter().any(|&b| t >= b && t < b + SETTLING_EXCLUSION)
}

fn duty_factor(rows: &[TelemetryRow]) -> f64 {
    let mut fractions = Vec::new();
    for leg in 0..4 {
        let touchdowns: Vec<usize> =
            (1..rows.len()).filter(|&k| rows[k].legs[leg].contact && !rows[k - 1].legs[leg].contact).collect();
        for w in touchdowns.windows(2) {
            let cycle = &rows[w[0]..w[1]];
            let on = cycle.iter().filter(|r| r.legs[leg].contact).count();
            fractions.push(on as f64 / cycle.len() as f64);
        }
    }
    if fractions.is_empty() {
        let on: usize = rows.iter().map(|r| r.contacts().iter().filter(|c| **c).count()).sum();
        on as f64 / (4 * rows.len()) as f64
    } else {
        fractions.iter().sum::<f64>() / fractions.len() as f64
    }
}

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |m, v| m.max(v.abs()))
}

pub fn compute_metrics(telemetry: &Telemetry) -> Result<MetricsReport, HarnessError> {
    compute_metrics_with(telemetry, &MetricsOptions::default())
}

pub fn compute_metrics_with(telemetry: &Telemetry, options: &MetricsOptions) -> Result<MetricsReport, HarnessError> {
    let rows = &telemetry.rows;
    let h = &telemetry.header;
    if rows.len() < 2 {
        return Err(HarnessError::InsufficientData("fewer than two telemetry rows".into()));
    }
    let duration = rows[rows.len() - 1].t - rows[0].t + h.dt;
    if duration + 1e-9 < h.gait_period {
        return Err(HarnessError::InsufficientData(format!(
            "{duration} s of telemetry is shorter than one gait cycle ({} s)",
            h.gait_period
        )));
    }

    let flight = |r: &TelemetryRow| r.contacts().iter().all(|c| !c);
    let flight_fraction = rows.iter().filter(|r| flight(r)).count() as f64 / rows.len() as f64;

    let steady: Vec<bool> = rows.iter().map(|r| in_steady_window(r.t, &h.breakpoints)).collect();
    let lf_touchdowns: Vec<usize> =
        (1..rows.len()).filter(|&k| rows[k].legs[0].contact && !rows[k - 1].legs[0].contact).collect();
    let (mut steady_cycles, mut with_flight) = (0usize, 0usize);
    for w in lf_touchdowns.windows(2) {
        if steady[w[0]..w[1]].iter().all(|s| *s) {
            steady_cycles += 1;
            if rows[w[0]..w[1]].iter().any(flight) {
                with_flight += 1;
            }
        }
    }

    // Gait-period moving average of the forward speed, centered.
    let speeds: Vec<f64> = rows.iter().map(TelemetryRow::forward_speed).collect();
    let window = ((h.gait_period / h.dt).round() as usize).max(1);
    let mut prefix = vec![0.0; speeds.len() + 1];
    for (k, v) in speeds.iter().enumerate() {
        prefix[k + 1] = prefix[k] + v;
    }
    let half = window / 2;
    let averaged = |k: usize| -> Option<f64> {
        let lo = k.checked_sub(half)?;
        let hi = lo + window;
        (hi <= speeds.len()).then(|| (prefix[hi] - prefix[lo]) / window as f64)
    };

    let (mut n, mut sum_err, mut sum_sq, mut max_err, mut sum_speed) = (0usize, 0.0, 0.0, 0.0f64, 0.0);
    let (mut n_avg, mut sum_sq_avg, mut max_avg) = (0usize, 0.0, 0.0f64);
    let (mut roll_env, mut pitch_env) = (0.0f64, 0.0f64);
    for (k, r) in rows.iter().enumerate() {
        if !steady[k] {
            continue;
        }
        let err = speeds[k] - r.vx_cmd;
        n += 1;
        sum_err += err;
        sum_sq += err * err;
        max_err = max_err.max(err.abs());
        sum_speed += speeds[k];
        roll_env = roll_env.max(r.rpy.x.abs());
        pitch_env = pitch_env.max(r.rpy.y.abs());
        if let Some(avg) = averaged(k) {
            let e = avg - r.vx_cmd;
            n_avg += 1;
            sum_sq_avg += e * e;
            max_avg = max_avg.max(e.abs());
        }
    }
    let mean = |s: f64, n: usize| if n > 0 { s / n as f64 } else { 0.0 };

    let (from, settle_origin) = match h.disturbance {
        Some((start, end)) => (start, end),
        None => (rows[0].t, rows[0].t),
    };
    let peak_roll = max_abs(rows.iter().filter(|r| r.t >= from).map(|r| r.rpy.x));
    let settle_time = settle_time(rows, settle_origin, options.settle_band, h.dt);

    let min_height = rows.iter().map(|r| r.position.z).fold(f64::INFINITY, f64::min);
    let start = rows[0].position.xy();
    let distance = (rows[rows.len() - 1].position.xy() - start).norm();
    let max_excursion = rows.iter().map(|r| (r.position.xy() - start).norm()).fold(0.0, f64::max);

    Ok(MetricsReport {
        duration,
        duty_factor: duty_factor(rows),
        flight_fraction,
        steady_cycles,
        cycles_with_flight: mean(with_flight as f64, steady_cycles),
        speed_error_mean: mean(sum_err, n),
        speed_error_rms: mean(sum_sq, n).sqrt(),
        speed_error_max: max_err,
        cycle_speed_error_max: max_avg,
        cycle_speed_error_rms: mean(sum_sq_avg, n_avg).sqrt(),
        mean_speed: mean(sum_speed, n),
        roll_envelope: roll_env,
        pitch_envelope: pitch_env,
        peak_roll,
        settle_band: options.settle_band,
        settle_time,
        min_height,
        fell: min_height < 0.5 * h.nominal_height,
        distance,
        max_excursion,
    })
}

/// First time at or after `origin` where |roll| < band holds for SETTLE_HOLD,
/// measured from `origin`.
fn settle_time(rows: &[TelemetryRow], origin: f64, band: f64, dt: f64) -> Option<f64> {
    let mut entry: Option<f64> = None;
    for r in rows.iter().filter(|r| r.t >= origin) {
        if r.rpy.x.abs() < band {
            let e = *entry.get_or_insert(r.t);
            if r.t - e + dt >= SETTLE_HOLD - 1e-9 {
                return Some(e - origin);
            }
        } else {
            entry = None;
        }
    }
    None
}
