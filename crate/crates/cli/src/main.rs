use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quadtrot::harness::{
    compute_metrics, load_config, read_csv, run_scenario, write_plan, HarnessError, MetricsReport,
};

#[derive(Parser)]
#[command(name = "quadtrot", version, about = "Flying-trot quadruped planner and simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write its telemetry CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Print the metrics as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Write one cycle of the open-loop foot plan as CSV.
    Plan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute metrics from a telemetry CSV.
    Metrics {
        csv: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn exit_code(err: &HarnessError) -> u8 {
    match err {
        HarnessError::Parse { .. } | HarnessError::Validation(_) => 2,
        HarnessError::Divergence { .. } => 3,
        _ => 1,
    }
}

fn print_report(report: &MetricsReport, json: bool) -> anyhow::Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
        return Ok(());
    }
    let settle = report.settle_time.map_or("never".to_string(), |s| format!("{s:.3} s"));
    println!("duration            {:.3} s", report.duration);
    println!("duty factor         {:.4}", report.duty_factor);
    println!("flight fraction     {:.4}", report.flight_fraction);
    println!("cycles with flight  {:.3} of {}", report.cycles_with_flight, report.steady_cycles);
    println!("mean speed          {:.4} m/s", report.mean_speed);
    println!(
        "speed error         mean {:+.4}  rms {:.4}  max {:.4} m/s",
        report.speed_error_mean, report.speed_error_rms, report.speed_error_max
    );
    println!(
        "cycle speed error   rms {:.4}  max {:.4} m/s",
        report.cycle_speed_error_rms, report.cycle_speed_error_max
    );
    println!("roll / pitch env.   {:.4} / {:.4} rad", report.roll_envelope, report.pitch_envelope);
    println!("peak roll           {:.4} rad", report.peak_roll);
    println!("settle (±{:.3})     {settle}", report.settle_band);
    println!("min height          {:.4} m{}", report.min_height, if report.fell { " (fell)" } else { "" });
    println!("distance            {:.4} m", report.distance);
    Ok(())
}

fn load(path: &Path) -> Result<quadtrot::harness::Scenario, HarnessError> {
    load_config(path)
}

fn run(cli: Cli) -> Result<(), (u8, anyhow::Error)> {
    let harness = |e: HarnessError| (exit_code(&e), anyhow::Error::new(e));
    let other = |e: anyhow::Error| (1u8, e);
    match cli.command {
        Command::Run { config, out, json } => {
            let scenario = load(&config).map_err(harness)?;
            let report = run_scenario(&scenario, &out).map_err(harness)?;
            print_report(&report, json).map_err(other)
        }
        Command::Plan { config, out } => {
            let scenario = load(&config).map_err(harness)?;
            let file = File::create(&out).map_err(|e| other(e.into()))?;
            write_plan(&scenario, BufWriter::new(file)).map_err(harness)
        }
        Command::Metrics { csv, json } => {
            let file = File::open(&csv).map_err(|e| other(anyhow::Error::new(e).context(csv.display().to_string())))?;
            let telemetry = read_csv(BufReader::new(file)).map_err(harness)?;
            let report = compute_metrics(&telemetry).map_err(harness)?;
            print_report(&report, json).map_err(other)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
