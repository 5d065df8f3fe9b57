use std::path::PathBuf;
use std::process::ExitCode as ProcessExit;

use clap::{Parser, Subcommand, ValueEnum};
use platoon_cli::commands::{self, AnalyzeBins, GlobalOpts};
use platoon_cli::CliError;
use platoon_core::analysis::{SegmentParams, TimeGapReference};

/// Tractive-energy and fuel-consumption assessment, behavioral analysis,
/// and synthetic simulation of car-following platoons.
#[derive(Parser)]
#[command(name = "platoon", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory for every generated file.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Uniform grid step in seconds (ingest resampling; overrides the
    /// scenario's output step for simulate).
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Column-mapping schema file for ingest (TOML or JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Coefficients file overriding the bundled defaults.
    #[arg(long, global = true)]
    coeffs: Option<PathBuf>,

    /// Steady/perturbation segmentation thresholds as
    /// 'a_thr,min_dur,pad' (m/s², s, s).
    #[arg(long, global = true, value_name = "A_THR,MIN_DUR,PAD")]
    segments: Option<String>,

    /// Which vehicle's speed divides the spacing in time gaps.
    #[arg(long = "timegap-ref", global = true, value_enum, default_value_t = TimeGapRefArg::Follower)]
    timegap_ref: TimeGapRefArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum TimeGapRefArg {
    Follower,
    Preceding,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a raw campaign CSV into the canonical platoon format.
    Ingest {
        /// Raw CSV file with a header row.
        data: PathBuf,
        /// Acceleration smoothing window in samples (odd).
        #[arg(long, default_value_t = 5)]
        window: usize,
    },
    /// Run a scenario file and write the canonical platoon CSV.
    Simulate {
        /// Scenario file (TOML or JSON).
        scenario: PathBuf,
    },
    /// Energy demand and fuel consumption per vehicle, model, and segment
    /// class.
    Assess {
        /// Canonical platoon CSV.
        canonical: PathBuf,
        /// Fuel models to evaluate.
        #[arg(long, value_delimiter = ',', default_values_t = [
            String::from("vt_micro"),
            String::from("vsp"),
            String::from("arrb"),
        ])]
        models: Vec<String>,
        /// Apply per-vehicle parameter overrides instead of the common
        /// normalized set.
        #[arg(long)]
        no_normalize: bool,
    },
    /// Gap distributions, stability metrics, joint maps, and correlations.
    Analyze {
        /// Canonical platoon CSV.
        canonical: PathBuf,
        /// Speed bin width for joint maps (m/s).
        #[arg(long, default_value_t = 1.0)]
        v_bin: f64,
        /// Acceleration bin width for joint maps (m/s²).
        #[arg(long, default_value_t = 0.1)]
        a_bin: f64,
        /// Time-gap histogram bin width (s).
        #[arg(long, default_value_t = 0.05)]
        time_bin: f64,
        /// Space-gap histogram bin width (m).
        #[arg(long, default_value_t = 1.0)]
        space_bin: f64,
    },
    /// Joint-map Pearson correlation of each follower against the leader.
    Correlate {
        /// Canonical platoon CSV.
        canonical: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        v_bin: f64,
        #[arg(long, default_value_t = 0.1)]
        a_bin: f64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let segments = match &cli.segments {
        None => SegmentParams::default(),
        Some(arg) => commands::parse_segments(arg).map_err(CliError::usage)?,
    };
    let opts = GlobalOpts {
        out_dir: cli.out,
        dt: cli.dt,
        config: cli.config,
        coeffs: cli.coeffs,
        segments,
        timegap_ref: match cli.timegap_ref {
            TimeGapRefArg::Follower => TimeGapReference::Follower,
            TimeGapRefArg::Preceding => TimeGapReference::Preceding,
        },
    };
    if let Some(dt) = opts.dt {
        if dt.is_nan() || dt <= 0.0 {
            return Err(CliError::usage(format!("--dt must be positive, got {dt}")));
        }
    }
    match cli.command {
        Command::Ingest { data, window } => {
            if window % 2 == 0 {
                return Err(CliError::usage(format!(
                    "--window must be odd, got {window}"
                )));
            }
            commands::cmd_ingest(&opts, &data, window)
        }
        Command::Simulate { scenario } => commands::cmd_simulate(&opts, &scenario),
        Command::Assess {
            canonical,
            models,
            no_normalize,
        } => commands::cmd_assess(&opts, &canonical, &models, !no_normalize),
        Command::Analyze {
            canonical,
            v_bin,
            a_bin,
            time_bin,
            space_bin,
        } => commands::cmd_analyze(
            &opts,
            &canonical,
            &AnalyzeBins {
                v_bin,
                a_bin,
                time_bin,
                space_bin,
            },
        ),
        Command::Correlate {
            canonical,
            v_bin,
            a_bin,
        } => commands::cmd_correlate(&opts, &canonical, v_bin, a_bin),
    }
}

fn main() -> ProcessExit {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ProcessExit::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ProcessExit::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ProcessExit::from(err.code as u8)
        }
    }
}
