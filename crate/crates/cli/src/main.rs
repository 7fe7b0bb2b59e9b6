//! Command-line front end: wideband coefficient reports, the reference
//! table, Monte-Carlo capacity sweeps, and minimum-Eb/N0 search.
//!
//! Exit code 0 on success, 2 when a sweep or argument combination fails
//! validation. The worker-pool size can be overridden with the
//! `BIPPM_WORKERS` environment variable.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bippm::constellation::{labeled_table, Labeling, SignalSet};
use bippm::sweep::{
    esn0_grid_from_range, min_ebno, read_curve_csv, run_sweep, write_outputs, LabelingChoice,
    Scheme, SweepError, SweepSpec,
};
use bippm::wideband::{
    bicm_coefficients, cm_coefficients, render_table, tangent_line, wideband_optimal,
    wideband_summary, TaylorCoefficients,
};
use bippm::{Detection, SamplingPlan};

#[derive(Parser)]
#[command(
    name = "bippm",
    version,
    about = "CM/BICM capacity analysis of (bi-)orthogonal PPM"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Ppm,
    Bippm,
}

impl From<SchemeArg> for Scheme {
    fn from(value: SchemeArg) -> Self {
        match value {
            SchemeArg::Ppm => Scheme::Ppm,
            SchemeArg::Bippm => Scheme::BiPpm,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LabelingArg {
    Natural,
    NearGray,
    None,
}

impl From<LabelingArg> for LabelingChoice {
    fn from(value: LabelingArg) -> Self {
        match value {
            LabelingArg::Natural => LabelingChoice::Natural,
            LabelingArg::NearGray => LabelingChoice::NearGray,
            LabelingArg::None => LabelingChoice::Unlabeled,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetectionArg {
    Coherent,
    Energy,
    Differential,
}

impl From<DetectionArg> for Detection {
    fn from(value: DetectionArg) -> Self {
        match value {
            DetectionArg::Coherent => Detection::Coherent,
            DetectionArg::Energy => Detection::Energy,
            DetectionArg::Differential => Detection::Differential,
        }
    }
}

#[derive(Args)]
struct ConstellationArgs {
    /// Modulation family
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Constellation size M (power of two >= 2)
    #[arg(long)]
    m: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Report Taylor coefficients, the Eb/N0 limit, and wideband slopes
    Coeffs {
        #[command(flatten)]
        constellation: ConstellationArgs,
        /// Labeling for the BICM block
        #[arg(long, value_enum, default_value = "natural")]
        labeling: LabelingArg,
        /// Dump the labeled constellation as a text table
        #[arg(long)]
        show_labels: bool,
    },
    /// Render the full table of Eb/N0 limits and wideband slopes
    Table,
    /// Run a Monte-Carlo capacity sweep and write CSV curves + sidecar
    Sweep {
        #[command(flatten)]
        constellation: ConstellationArgs,
        #[arg(long, value_enum, default_value = "natural")]
        labeling: LabelingArg,
        #[arg(long, value_enum, default_value = "coherent")]
        detection: DetectionArg,
        /// Es/N0 grid in dB as START:STEP:STOP
        #[arg(
            long = "esn0-db",
            default_value = "-10:0.5:12",
            allow_hyphen_values = true
        )]
        esn0_db: String,
        /// Initial samples per grid point
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        /// Double the samples until this standard error is reached
        #[arg(long = "target-se")]
        target_se: Option<f64>,
        /// Hard cap on samples per grid point
        #[arg(long = "max-samples", default_value_t = 10_000_000)]
        max_samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory for the CSV files and meta.json
        #[arg(long)]
        out: PathBuf,
    },
    /// Locate the minimum Eb/N0 of an emitted curve CSV
    MinEbno {
        /// Curve CSV produced by `sweep`
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_workers();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn configure_workers() {
    if let Ok(value) = std::env::var("BIPPM_WORKERS") {
        match value.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring BIPPM_WORKERS={value} (expected a positive integer)"),
        }
    }
}

fn exit_code_for(err: &SweepError) -> u8 {
    match err {
        SweepError::Io(_) | SweepError::Json(_) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<(), SweepError> {
    match cli.command {
        Command::Coeffs {
            constellation,
            labeling,
            show_labels,
        } => coeffs(constellation, labeling.into(), show_labels),
        Command::Table => {
            print!("{}", render_table());
            Ok(())
        }
        Command::Sweep {
            constellation,
            labeling,
            detection,
            esn0_db,
            samples,
            target_se,
            max_samples,
            seed,
            out,
        } => {
            let spec = SweepSpec {
                scheme: constellation.scheme.into(),
                size: constellation.m,
                labeling: labeling.into(),
                detection: detection.into(),
                esn0_db_grid: parse_grid(&esn0_db)?,
                plan: SamplingPlan {
                    initial_samples: samples,
                    target_std_error: target_se,
                    max_samples,
                },
                seed,
            };
            spec.validate()?;
            let result = run_sweep(&spec)?;
            let written = write_outputs(&result, &out)?;
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::MinEbno { input } => {
            let curve = read_curve_csv(&input)?;
            let min = min_ebno(&curve)?;
            println!(
                "family={} min_ebno_db={:.4} capacity_bits={:.6} location={}",
                curve.family,
                min.ebno_db,
                min.capacity_bits,
                if min.boundary { "boundary" } else { "interior" }
            );
            Ok(())
        }
    }
}

fn parse_grid(text: &str) -> Result<Vec<f64>, SweepError> {
    let parts: Vec<&str> = text.split(':').collect();
    let invalid = || {
        SweepError::Validation(format!(
            "grid '{text}' must have the form START:STEP:STOP in dB"
        ))
    };
    if parts.len() != 3 {
        return Err(invalid());
    }
    let numbers: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| invalid())?;
    esn0_grid_from_range(numbers[0], numbers[1], numbers[2])
}

fn build_set(scheme: Scheme, size: usize) -> Result<SignalSet, SweepError> {
    match scheme {
        Scheme::Ppm => SignalSet::ppm(size),
        Scheme::BiPpm => SignalSet::bippm(size),
    }
    .map_err(|e| SweepError::Validation(e.to_string()))
}

fn coeffs(
    constellation: ConstellationArgs,
    labeling: LabelingChoice,
    show_labels: bool,
) -> Result<(), SweepError> {
    let scheme: Scheme = constellation.scheme.into();
    let set = build_set(scheme, constellation.m)?;
    if labeling == LabelingChoice::NearGray && scheme != Scheme::BiPpm {
        return Err(SweepError::Validation(
            "near-gray labeling requires scheme=bippm".into(),
        ));
    }

    println!(
        "constellation: {}-{} (D={}, {} bits/symbol)",
        set.size(),
        scheme,
        set.dim(),
        set.bits_per_symbol()
    );
    println!(
        "wideband-optimal under CM: {}",
        if wideband_optimal(&set) { "yes" } else { "no" }
    );
    print_block("cm", &cm_coefficients(&set), set.dim())?;

    let lab = match labeling {
        LabelingChoice::Natural => Some(("natural", Labeling::natural(&set))),
        LabelingChoice::NearGray => Some((
            "near-gray",
            Labeling::near_gray(&set).expect("scheme checked above"),
        )),
        LabelingChoice::Unlabeled => None,
    };
    if let Some((name, lab)) = &lab {
        println!("labeling: {name}");
        print_block("bicm", &bicm_coefficients(&set, lab), set.dim())?;
    }

    if show_labels {
        let natural = Labeling::natural(&set);
        let mut table = vec![("natural", &natural)];
        let near_gray = Labeling::near_gray(&set).ok();
        if let Some(ng) = &near_gray {
            table.push(("near-gray", ng));
        }
        print!("{}", labeled_table(&set, &table));
    }
    Ok(())
}

fn print_block(name: &str, coeffs: &TaylorCoefficients, dim: usize) -> Result<(), SweepError> {
    match wideband_summary(coeffs, dim) {
        Ok(summary) => {
            let tangent = tangent_line(&summary);
            println!(
                "{name}: first-order={:.9} second-order={:.9} ebno_lim={:.4} dB \
                 slope={:.4} bit/dim/3dB (linear s0={:.4})",
                coeffs.first_order,
                coeffs.second_order,
                summary.ebno_lim_db,
                summary.slope_per_dim_3db,
                summary.slope_linear,
            );
            let ((x0, y0), (x1, y1)) = tangent.endpoints();
            println!("{name}: tangent ({x0:.4}, {y0:.1}) -> ({x1:.4}, {y1:.4})");
            Ok(())
        }
        Err(err) => {
            println!(
                "{name}: first-order={:.9} second-order={:.9} ({err})",
                coeffs.first_order, coeffs.second_order
            );
            Ok(())
        }
    }
}
