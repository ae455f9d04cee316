//! Telemetry rows and their CSV form.
//!
//! The file starts with `# key: value` header lines followed by one CSV
//! header row and one row per control tick. Floats are written in their
//! shortest round-trip form, so reading a file back gives identical values.

use std::io::{BufRead, Write};

use nalgebra::Vector3;
use serde::Serialize;

use super::HarnessError;
use crate::gait_clock::PhaseKind;
use crate::kinematics::LegId;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LegRow {
    pub phase: PhaseKind,
    /// Desired and actual foot position, body frame (m).
    pub desired: Vector3<f64>,
    pub actual: Vector3<f64>,
    pub contact: bool,
    /// Commanded vertical foot force (N).
    pub fz: f64,
    pub torques: Vector3<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TelemetryRow {
    pub t: f64,
    pub position: Vector3<f64>,
    /// World frame (m/s).
    pub velocity: Vector3<f64>,
    /// Roll, pitch, yaw (rad).
    pub rpy: Vector3<f64>,
    /// Body angular velocity (rad/s).
    pub rates: Vector3<f64>,
    pub vx_cmd: f64,
    pub wz_cmd: f64,
    /// Estimated body-frame velocity (m/s).
    pub vx_est: f64,
    pub vy_est: f64,
    pub legs: [LegRow; 4],
}

impl TelemetryRow {
    pub fn contacts(&self) -> [bool; 4] {
        self.legs.map(|l| l.contact)
    }

    /// Trunk velocity along the current heading.
    pub fn forward_speed(&self) -> f64 {
        let (s, c) = self.rpy.z.sin_cos();
        self.velocity.x * c + self.velocity.y * s
    }
}

/// Run metadata carried in the CSV header.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TelemetryHeader {
    pub config_hash: String,
    /// Trunk inertia diagonal (kg m^2).
    pub inertia: Vector3<f64>,
    pub dt: f64,
    pub gait_period: f64,
    pub nominal_height: f64,
    /// Command-profile breakpoints, including t = 0.
    pub breakpoints: Vec<f64>,
    /// Start and end of the disturbance window, if any.
    pub disturbance: Option<(f64, f64)>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Telemetry {
    pub header: TelemetryHeader,
    pub rows: Vec<TelemetryRow>,
}

const TRUNK_COLUMNS: [&str; 17] = [
    "t",
    "x",
    "y",
    "z",
    "vx",
    "vy",
    "vz",
    "roll",
    "pitch",
    "yaw",
    "roll_rate",
    "pitch_rate",
    "yaw_rate",
    "vx_cmd",
    "wz_cmd",
    "vx_est",
    "vy_est",
];
const LEG_COLUMNS: [&str; 12] =
    ["phase", "des_x", "des_y", "des_z", "act_x", "act_y", "act_z", "contact", "fz", "tau1", "tau2", "tau3"];

/// Column names in file order.
pub fn column_names() -> Vec<String> {
    let mut cols: Vec<String> = TRUNK_COLUMNS.iter().map(|s| s.to_string()).collect();
    for leg in LegId::ALL {
        cols.extend(LEG_COLUMNS.iter().map(|c| format!("{}_{c}", leg.short_name())));
    }
    cols
}

fn bad(message: impl Into<String>) -> HarnessError {
    HarnessError::Telemetry(message.into())
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn parse_list(s: &str) -> Result<Vec<f64>, HarnessError> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| bad(format!("bad number '{p}' in header"))))
        .collect()
}

pub fn write_csv<W: Write>(telemetry: &Telemetry, mut out: W) -> Result<(), HarnessError> {
    let h = &telemetry.header;
    writeln!(out, "# quadtrot telemetry")?;
    writeln!(out, "# config_hash: {}", h.config_hash)?;
    writeln!(out, "# inertia: {}", join(&[h.inertia.x, h.inertia.y, h.inertia.z]))?;
    writeln!(out, "# dt: {}", h.dt)?;
    writeln!(out, "# gait_period: {}", h.gait_period)?;
    writeln!(out, "# nominal_height: {}", h.nominal_height)?;
    writeln!(out, "# breakpoints: {}", join(&h.breakpoints))?;
    match h.disturbance {
        Some((a, b)) => writeln!(out, "# disturbance: {a};{b}")?,
        None => writeln!(out, "# disturbance: none")?,
    }
    writeln!(out, "# seed: {}", h.seed)?;

    let mut w = csv::Writer::from_writer(out);
    w.write_record(column_names())?;
    let mut record: Vec<String> = Vec::with_capacity(TRUNK_COLUMNS.len() + 4 * LEG_COLUMNS.len());
    for r in &telemetry.rows {
        record.clear();
        let trunk = [
            r.t,
            r.position.x,
            r.position.y,
            r.position.z,
            r.velocity.x,
            r.velocity.y,
            r.velocity.z,
            r.rpy.x,
            r.rpy.y,
            r.rpy.z,
            r.rates.x,
            r.rates.y,
            r.rates.z,
            r.vx_cmd,
            r.wz_cmd,
            r.vx_est,
            r.vy_est,
        ];
        record.extend(trunk.iter().map(f64::to_string));
        for leg in &r.legs {
            record.push(leg.phase.name().to_string());
            let nums = [leg.desired.x, leg.desired.y, leg.desired.z, leg.actual.x, leg.actual.y, leg.actual.z];
            record.extend(nums.iter().map(f64::to_string));
            record.push(if leg.contact { "1" } else { "0" }.to_string());
            let nums = [leg.fz, leg.torques.x, leg.torques.y, leg.torques.z];
            record.extend(nums.iter().map(f64::to_string));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> Result<Telemetry, HarnessError> {
    let mut header = TelemetryHeader {
        config_hash: String::new(),
        inertia: Vector3::zeros(),
        dt: 0.0,
        gait_period: 0.0,
        nominal_height: 0.0,
        breakpoints: vec![0.0],
        disturbance: None,
        seed: 0,
    };
    let mut body = String::new();
    let mut seen = [false; 4];
    for line in input.lines() {
        let line = line?;
        let Some(meta) = line.strip_prefix('#') else {
            body.push_str(&line);
            body.push('\n');
            continue;
        };
        let Some((key, value)) = meta.split_once(':') else { continue };
        let value = value.trim();
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("bad value for {}: '{v}'", key.trim())));
        match key.trim() {
            "config_hash" => header.config_hash = value.to_string(),
            "inertia" => {
                let v = parse_list(value)?;
                if v.len() != 3 {
                    return Err(bad("inertia needs three values"));
                }
                header.inertia = Vector3::new(v[0], v[1], v[2]);
            }
            "dt" => {
                header.dt = num(value)?;
                seen[0] = true;
            }
            "gait_period" => {
                header.gait_period = num(value)?;
                seen[1] = true;
            }
            "nominal_height" => {
                header.nominal_height = num(value)?;
                seen[2] = true;
            }
            "breakpoints" => {
                header.breakpoints = parse_list(value)?;
                seen[3] = true;
            }
            "disturbance" => {
                header.disturbance = if value == "none" {
                    None
                } else {
                    let v = parse_list(value)?;
                    if v.len() != 2 {
                        return Err(bad("disturbance needs start;end"));
                    }
                    Some((v[0], v[1]))
                }
            }
            "seed" => header.seed = value.parse().map_err(|_| bad("bad seed"))?,
            _ => {}
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(bad("missing header line (dt, gait_period, nominal_height and breakpoints are required)"));
    }

    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let names = column_names();
    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if found != names {
        return Err(bad("column schema mismatch"));
    }
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> Result<f64, HarnessError> {
            record[i].parse().map_err(|_| bad(format!("row {}: bad number in column {}", n + 1, names[i])))
        };
        let v3 = |i: usize| -> Result<Vector3<f64>, HarnessError> {
            Ok(Vector3::new(field(i)?, field(i + 1)?, field(i + 2)?))
        };
        let mut legs = [LegRow {
            phase: PhaseKind::Support,
            desired: Vector3::zeros(),
            actual: Vector3::zeros(),
            contact: false,
            fz: 0.0,
            torques: Vector3::zeros(),
        }; 4];
        for (k, leg) in legs.iter_mut().enumerate() {
            let base = TRUNK_COLUMNS.len() + k * LEG_COLUMNS.len();
            leg.phase =
                PhaseKind::from_name(&record[base]).ok_or_else(|| bad(format!("row {}: unknown phase", n + 1)))?;
            leg.desired = v3(base + 1)?;
            leg.actual = v3(base + 4)?;
            leg.contact = match &record[base + 7] {
                "1" => true,
                "0" => false,
                other => return Err(bad(format!("row {}: bad contact flag '{other}'", n + 1))),
            };
            leg.fz = field(base + 8)?;
            leg.torques = v3(base + 9)?;
        }
        rows.push(TelemetryRow {
            t: field(0)?,
            position: v3(1)?,
            velocity: v3(4)?,
            rpy: v3(7)?,
            rates: v3(10)?,
            vx_cmd: field(13)?,
            wz_cmd: field(14)?,
            vx_est: field(15)?,
            vy_est: field(16)?,
            legs,
        });
    }
    if rows.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(bad("rows must be strictly increasing in t"));
    }
    Ok(Telemetry { header, rows })
}
