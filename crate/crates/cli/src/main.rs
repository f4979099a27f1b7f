//! Experiment CLI: run a configuration, sweep a parameter axis, run the
//! two-stage ablation, or verify the algorithmic invariants.
//!
//! Exit codes: 0 success, 2 configuration error, 3 infeasible instance,
//! 4 verification failure, 5 I/O error, 1 internal error.

mod config;
mod output;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use config::{build_config, parse_axis, parse_sweep_values, Overrides};
use output::{write_json, OutputTable};
use uavsec::error::Error;
use uavsec::harness::{
    ablation_two_stage, run_experiment, run_experiment_with_records, ExperimentConfig, SweepSpec,
    ABLATION_QUADRANTS,
};
use uavsec::verify::{beamforming_suite, coalition_suite, matching_suite, SuiteReport};

#[derive(Parser)]
#[command(name = "uavsec", version, about = "Two-tier UAV network secrecy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of UAV transmitters.
    #[arg(long)]
    n_ut: Option<usize>,
    /// Number of UAV receivers.
    #[arg(long)]
    n_ur: Option<usize>,
    /// Number of UAV eavesdroppers.
    #[arg(long)]
    n_ue: Option<usize>,
    /// Uniform per-receiver quota.
    #[arg(long)]
    quota: Option<usize>,
    /// System bandwidth in hertz.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Noise power: watts or "<x>dBm".
    #[arg(long)]
    noise: Option<String>,
    /// Transmit power budget: watts or "<x>dBm".
    #[arg(long)]
    p0: Option<String>,
    /// Path loss exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Relay decoding SNR threshold: linear or "<x>dB".
    #[arg(long)]
    gamma: Option<String>,
    /// Random layouts per sweep point.
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed; every result is a pure function of it.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated association schemes (PMA, DAMS, RMS).
    #[arg(long)]
    stage1: Option<String>,
    /// Comma-separated transmission schemes (OCFA, AS, FGS, DCS).
    #[arg(long)]
    stage2: Option<String>,
    /// Output directory (default: $UAVSEC_OUT_DIR, then the working dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the raw aggregate as JSON.
    #[arg(long)]
    json: bool,
    /// Omit the timestamp comment line for byte-stable reruns.
    #[arg(long)]
    no_timestamp: bool,
    /// Write one JSON record per trial (positions, matching, structure,
    /// metrics) to this file.
    #[arg(long)]
    dump_trials: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Sweep axis: N, M, R, Q, P0, gamma, or noise.
    #[arg(long)]
    axis: String,
    /// Comma-separated values in figure units (counts; dBm for P0/noise;
    /// dB for gamma). Unit suffixes are allowed.
    #[arg(long)]
    values: String,
    /// Per-value quotas for M sweeps, e.g. 6,4,3,3,3,2.
    #[arg(long)]
    quota_schedule: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random instances per suite.
    #[arg(long, default_value_t = 50)]
    instances: usize,
    /// Random feasible weight vectors per beamforming instance.
    #[arg(long, default_value_t = 10_000)]
    weights: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment at a single point.
    Run(CommonArgs),
    /// Sweep one parameter axis.
    Sweep(SweepArgs),
    /// Four-quadrant two-stage ablation on paired layouts.
    Ablation(CommonArgs),
    /// Run the randomized invariant suites; nonzero exit on any violation.
    Verify(VerifyArgs),
}

fn overrides_of(args: &CommonArgs) -> Overrides {
    Overrides {
        n_ut: args.n_ut,
        n_ur: args.n_ur,
        n_ue: args.n_ue,
        quota: args.quota,
        bandwidth: args.bandwidth,
        noise: args.noise.clone(),
        p0: args.p0.clone(),
        alpha: args.alpha,
        gamma: args.gamma.clone(),
        repetitions: args.reps,
        seed: args.seed,
        stage1: args.stage1.clone(),
        stage2: args.stage2.clone(),
    }
}

fn out_dir(args: &CommonArgs) -> PathBuf {
    args.out
        .clone()
        .or_else(|| std::env::var_os("UAVSEC_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn timestamp(args: &CommonArgs) -> Option<u64> {
    if args.no_timestamp {
        None
    } else {
        Some(SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0))
    }
}

fn dump_records(path: &Path, records: &[uavsec::harness::TrialRecord]) -> Result<(), Error> {
    let file = std::fs::File::create(path)?;
    let mut writer = std::io::BufWriter::new(file);
    for record in records {
        let line = serde_json::to_string(record)
            .map_err(|e| Error::Internal(format!("trial record encoding failed: {e}")))?;
        writeln!(writer, "{line}")?;
    }
    writer.flush()?;
    Ok(())
}

fn run_and_emit(args: &CommonArgs, config: &ExperimentConfig, stem: &str) -> Result<(), Error> {
    let result = if let Some(dump_path) = &args.dump_trials {
        let (result, records) = run_experiment_with_records(config)?;
        dump_records(dump_path, &records)?;
        println!("wrote {} trial records to {}", records.len(), dump_path.display());
        result
    } else {
        run_experiment(config)?
    };

    let dir = out_dir(args);
    std::fs::create_dir_all(&dir)?;
    let table = OutputTable::from_result(&result);
    let csv_path = dir.join(format!("{stem}.csv"));
    table.write_csv(&csv_path, timestamp(args))?;
    println!("wrote {} rows to {}", table.rows.len(), csv_path.display());
    if args.json {
        let json_path = dir.join(format!("{stem}.json"));
        write_json(&result, &json_path)?;
        println!("wrote {}", json_path.display());
    }

    for point in &result.points {
        let label = point
            .sweep_value
            .map(|v| format!("{}={v}", result.axis))
            .unwrap_or_else(|| "default point".to_string());
        for scheme in &point.schemes {
            let total = &scheme.stats[0];
            println!(
                "{label} {}: total utility {:.4} +/- {:.4} over {} trials ({} failed)",
                scheme.scheme, total.mean, total.std, scheme.n_trials, scheme.n_failed
            );
        }
    }
    Ok(())
}

fn cmd_run(args: &CommonArgs) -> Result<(), Error> {
    let config = build_config(args.config.as_deref(), &overrides_of(args))?;
    run_and_emit(args, &config, "results")
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let mut config = build_config(args.common.config.as_deref(), &overrides_of(&args.common))?;
    let axis = parse_axis(&args.axis)?;
    let values = parse_sweep_values(axis, &args.values)?;
    let quota_schedule = args
        .quota_schedule
        .as_ref()
        .map(|text| {
            text.split(',')
                .map(|token| {
                    token.trim().parse::<usize>().map_err(|_| {
                        Error::Config(format!("quota_schedule: bad entry '{token}'"))
                    })
                })
                .collect::<Result<Vec<usize>, Error>>()
        })
        .transpose()?;
    config.sweep = Some(SweepSpec { axis, values, quota_schedule });
    config.validate()?;
    let stem = format!("sweep_{}", axis.label());
    run_and_emit(&args.common, &config, &stem)
}

fn cmd_ablation(args: &CommonArgs) -> Result<(), Error> {
    let mut config = build_config(args.config.as_deref(), &overrides_of(args))?;
    // Quadrant schemes are fixed; any configured scheme list is ignored.
    config.schemes = ABLATION_QUADRANTS
        .iter()
        .map(|&(_, s1, s2)| uavsec::harness::SchemePair::new(s1, s2))
        .collect();
    config.validate()?;
    let quadrants = ablation_two_stage(&config)?;
    let dir = out_dir(args);
    std::fs::create_dir_all(&dir)?;
    let stamp = timestamp(args);
    for ((tag, _, _), result) in ABLATION_QUADRANTS.iter().zip(&quadrants) {
        let table = OutputTable::from_result(result);
        let path = dir.join(format!("ablation_{tag}.csv"));
        table.write_csv(&path, stamp)?;
        let scheme = &result.points[0].schemes[0];
        println!(
            "quadrant ({tag}) {}: total utility {:.4} +/- {:.4} -> {}",
            scheme.scheme,
            scheme.stats[0].mean,
            scheme.stats[0].std,
            path.display()
        );
    }
    Ok(())
}

fn print_report(report: &SuiteReport) {
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    println!(
        "[{verdict}] {}: {} instances, {} checks, {} violations",
        report.name,
        report.instances,
        report.checks,
        report.violations.len()
    );
    for violation in report.violations.iter().take(5) {
        println!("    {violation}");
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, Error> {
    let beamforming = beamforming_suite(args.seed, args.instances, args.weights);
    print_report(&beamforming);
    let matching = matching_suite(args.seed, args.instances, args.instances)?;
    print_report(&matching);
    let coalition = coalition_suite(args.seed, args.instances)?;
    print_report(&coalition);
    Ok(beamforming.passed() && matching.passed() && coalition.passed())
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Config(_) | Error::DegenerateGeometry { .. } => 2,
        Error::Infeasible { .. } => 3,
        Error::Io(_) => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Ablation(args) => cmd_ablation(args),
        Command::Verify(args) => {
            return match cmd_verify(args) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(4),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code_for(&e))
                }
            };
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
