//! Command-line front end for the matching simulator.
//!
//! Subcommands: `bench` (LP benchmark optima), `run` (one algorithm,
//! many trials), `sweep` (weight sweep), `ingest` (trip CSV → instance),
//! `hardness` (adversarial fixtures), `compare` (probing algorithms vs
//! greedy baselines), `gen-trips` (synthetic trip CSV).
//!
//! Conventions: all diagnostics go to standard error; the data product
//! of a command goes to `--output` (or standard output). Exit codes:
//! 0 success, 1 validation error (flags, config files, input data),
//! 2 runtime error (I/O, solver failures). Identical invocations with
//! identical seeds produce byte-identical data output.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use fairmatch::{
    benchmarks, configure_thread_pool, fragment_types, generate_trip_records, ingest_trips,
    make_hardness_group_instance, make_hardness_indiv_group_instance, mix, read_trip_records,
    run_experiment, run_unit_weight_ablation, to_kad, validate_instance, write_report,
    write_trip_records, AlgoConfig, AlgoError, ArrivalModel, HarnessError, IngestConfig, Instance,
    LpError, ModelError, RatioReport, ReportFormat, Side, Weights,
};

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    // Usage problems (including no arguments at all) are
                    // validation errors.
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

// ---------------------------------------------------------------------
// Errors and exit-code classification.
// ---------------------------------------------------------------------

#[derive(Debug)]
enum CliError {
    /// Bad flags, config files, or input data → exit 1.
    Validation(String),
    /// I/O or solver failure → exit 2.
    Runtime(String),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::EmptyRecords
            | HarnessError::InvalidConfig(_)
            | HarnessError::InvalidParameter(_)
            | HarnessError::InvalidInstance(..)
            | HarnessError::EmptyReports => CliError::Validation(e.to_string()),
            HarnessError::Model(m) => m.into(),
            HarnessError::Algo(a) => a.into(),
            HarnessError::Lp(l) => l.into(),
            HarnessError::Io(io) => CliError::Runtime(io.to_string()),
            HarnessError::Csv(c) => CliError::Runtime(c.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Io(io) => CliError::Runtime(io.to_string()),
            // A trace violating its own invariants is an internal failure,
            // not a user mistake.
            ModelError::TraceInvariant(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<AlgoError> for CliError {
    fn from(e: AlgoError) -> Self {
        match e {
            AlgoError::BundleMismatch(_)
            | AlgoError::RhoMismatch(_)
            | AlgoError::ProbeMassExceedsPatience { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<LpError> for CliError {
    fn from(e: LpError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

// ---------------------------------------------------------------------
// Flags.
// ---------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "fairmatch",
    version,
    about = "Three-sided fair matching simulator: LP benchmarks, probing algorithms, greedy baselines",
    after_help = "Config files (JSON, via --config) may supply any flag by its long name; \
                  command-line flags override file values."
)]
struct Cli {
    /// JSON file supplying any flag by name (command line overrides it).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Root RNG seed; every sample in a run derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker-thread cap for parallel trials (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the data output to this file instead of standard output.
    #[arg(long, short = 'o', global = true, visible_alias = "out", value_name = "FILE")]
    output: Option<PathBuf>,
    /// Data output format (reports: json|csv; instances are always json).
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the three benchmark LPs and print their optima.
    Bench {
        /// Instance JSON file.
        instance: PathBuf,
        /// Also print individual-fairness optima (requires unit success
        /// probabilities on every edge).
        #[arg(long)]
        individual: bool,
    },
    /// Run one algorithm for N trials and report per-objective ratios.
    Run {
        /// Instance JSON file.
        instance: PathBuf,
        /// Algorithm to run.
        #[arg(long, value_enum)]
        algo: Option<AlgoArg>,
        /// Weight on expected profit (default 1/3; probing algorithms only).
        #[arg(long)]
        alpha: Option<f64>,
        /// Weight on offline-side group fairness (default 1/3).
        #[arg(long)]
        beta: Option<f64>,
        /// Weight on online-side group fairness (default 1/3).
        #[arg(long)]
        gamma: Option<f64>,
        /// Independent trials (default 100).
        #[arg(long)]
        trials: Option<usize>,
        /// Availability-table simulations for tsf-kad; 0 = exact table
        /// (default 1000).
        #[arg(long)]
        rho_sims: Option<usize>,
        /// Probe-attempt scale for tsf-kad, in (0, 1] (default 0.5).
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Sweep the profit weight α (β = γ = (1−α)/2) and report ratios.
    Sweep {
        /// Instance JSON file.
        instance: PathBuf,
        /// Sweep range start:end:step over α, e.g. 0:1:0.1 (default).
        #[arg(long)]
        alphas: Option<String>,
        /// Independent trials per sweep point (default 100).
        #[arg(long)]
        trials: Option<usize>,
        /// Availability-table simulations per point on per-round-arrival
        /// instances; 0 = exact table (default 1000).
        #[arg(long)]
        rho_sims: Option<usize>,
    },
    /// Build a matching instance from a trip CSV.
    Ingest {
        /// Trip records (CSV with columns driver_id, pickup_lat,
        /// pickup_lon, drop_lat, drop_lon, trip_length, timestamp).
        trips: PathBuf,
        /// Bounding box, degrees.
        #[arg(long)]
        lat_min: Option<f64>,
        #[arg(long)]
        lat_max: Option<f64>,
        #[arg(long)]
        lon_min: Option<f64>,
        #[arg(long)]
        lon_max: Option<f64>,
        /// Coordinate bin width in degrees.
        #[arg(long)]
        grid_step: Option<f64>,
        /// Probability a driver or request type is in the advantaged group.
        #[arg(long)]
        advantaged_fraction: Option<f64>,
        /// Probe success probability, both endpoints advantaged.
        #[arg(long)]
        pe_both_advantaged: Option<f64>,
        /// Probe success probability, both endpoints disadvantaged.
        #[arg(long)]
        pe_both_disadvantaged: Option<f64>,
        /// Probe success probability, mixed pair.
        #[arg(long)]
        pe_mixed: Option<f64>,
        /// Failed probes tolerated by each driver over its lifetime.
        #[arg(long)]
        driver_patience: Option<u32>,
        /// Per-type rider patience choices, comma separated.
        #[arg(long, value_delimiter = ',')]
        rider_patience_choices: Option<Vec<u32>>,
        /// Additive utility shift (defaults to the maximum driver–pickup
        /// distance, keeping all utilities nonnegative).
        #[arg(long)]
        utility_scale_shift: Option<f64>,
    },
    /// Emit an adversarial fixture with known benchmark optima.
    Hardness {
        /// Fixture family: `group` (three-objective ceiling) or `indiv`
        /// (group-vs-individual ceiling).
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Horizon for the group fixture (positive multiple of 3).
        #[arg(long)]
        t: Option<usize>,
        /// Heavy-edge weight L for the indiv fixture.
        #[arg(long)]
        l: Option<f64>,
        /// Side of the indiv fixture.
        #[arg(long, value_enum)]
        side: Option<SideArg>,
    },
    /// Compare single-objective probing runs against the greedy baselines.
    Compare {
        /// Instance JSON file.
        instance: PathBuf,
        /// Independent trials per configuration (default 100).
        #[arg(long)]
        trials: Option<usize>,
        /// Availability-table simulations on per-round-arrival instances;
        /// 0 = exact table (default 1000).
        #[arg(long)]
        rho_sims: Option<usize>,
        /// Also run the match-quality ablation: probing guided by LPs with
        /// both fairness utilities set to 1 (stationary instances only),
        /// reported as `tsf-unit-lp` rows paired with the `tsf` rows.
        #[arg(long)]
        unit_weights: bool,
    },
    /// Generate a synthetic clustered trip CSV (ingestion input schema).
    GenTrips {
        /// Number of distinct drivers.
        #[arg(long)]
        drivers: Option<usize>,
        /// Number of trip records.
        #[arg(long)]
        records: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum AlgoArg {
    Tsf,
    TsfKad,
    GreedyO,
    GreedyR,
    GreedyD,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum KindArg {
    Group,
    Indiv,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum SideArg {
    Offline,
    Online,
}

// ---------------------------------------------------------------------
// Config-file manifest: any flag, by long name; CLI values win.
// ---------------------------------------------------------------------

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    threads: Option<usize>,
    output: Option<PathBuf>,
    format: Option<String>,
    algo: Option<String>,
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    trials: Option<usize>,
    rho_sims: Option<usize>,
    lambda: Option<f64>,
    alphas: Option<String>,
    kind: Option<String>,
    t: Option<usize>,
    l: Option<f64>,
    side: Option<String>,
    unit_weights: Option<bool>,
    individual: Option<bool>,
    drivers: Option<usize>,
    records: Option<usize>,
    lat_min: Option<f64>,
    lat_max: Option<f64>,
    lon_min: Option<f64>,
    lon_max: Option<f64>,
    grid_step: Option<f64>,
    advantaged_fraction: Option<f64>,
    pe_both_advantaged: Option<f64>,
    pe_both_disadvantaged: Option<f64>,
    pe_mixed: Option<f64>,
    driver_patience: Option<u32>,
    rider_patience_choices: Option<Vec<u32>>,
    utility_scale_shift: Option<f64>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Runtime(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }

    fn value_enum<T: ValueEnum>(value: &Option<String>, flag: &str) -> Result<Option<T>, CliError> {
        value
            .as_deref()
            .map(|s| {
                T::from_str(s, true)
                    .map_err(|_| CliError::Validation(format!("config: invalid {flag} '{s}'")))
            })
            .transpose()
    }
}

// ---------------------------------------------------------------------
// Dispatch.
// ---------------------------------------------------------------------

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let output = cli.output.or_else(|| file.output.clone());
    let format = match cli.format.or(FileConfig::value_enum(&file.format, "format")?) {
        Some(FormatArg::Json) => Some(ReportFormat::Json),
        Some(FormatArg::Csv) => Some(ReportFormat::Csv),
        None => None,
    };
    if let Some(threads) = cli.threads.or(file.threads) {
        if threads == 0 {
            return Err(CliError::Validation("--threads must be >= 1".into()));
        }
        configure_thread_pool(threads).map_err(CliError::Runtime)?;
    }

    match cli.cmd {
        Cmd::Bench {
            instance,
            individual,
        } => cmd_bench(
            &instance,
            individual || file.individual.unwrap_or(false),
            format,
            &output,
        ),
        Cmd::Run {
            instance,
            algo,
            alpha,
            beta,
            gamma,
            trials,
            rho_sims,
            lambda,
        } => {
            let algo = algo
                .or(FileConfig::value_enum(&file.algo, "algo")?)
                .ok_or_else(|| CliError::Validation("--algo is required".into()))?;
            let params = ProbeParams {
                alpha: alpha.or(file.alpha),
                beta: beta.or(file.beta),
                gamma: gamma.or(file.gamma),
                rho_sims: rho_sims.or(file.rho_sims).unwrap_or(1000),
                lambda: lambda.or(file.lambda).unwrap_or(0.5),
            };
            cmd_run(
                &instance,
                algo,
                params,
                trials.or(file.trials).unwrap_or(100),
                seed,
                format,
                &output,
            )
        }
        Cmd::Sweep {
            instance,
            alphas,
            trials,
            rho_sims,
        } => cmd_sweep(
            &instance,
            &alphas.or_else(|| file.alphas.clone()).unwrap_or_else(|| "0:1:0.1".into()),
            trials.or(file.trials).unwrap_or(100),
            rho_sims.or(file.rho_sims).unwrap_or(1000),
            seed,
            format,
            &output,
        ),
        Cmd::Ingest {
            trips,
            lat_min,
            lat_max,
            lon_min,
            lon_max,
            grid_step,
            advantaged_fraction,
            pe_both_advantaged,
            pe_both_disadvantaged,
            pe_mixed,
            driver_patience,
            rider_patience_choices,
            utility_scale_shift,
        } => {
            let defaults = IngestConfig::default();
            let cfg = IngestConfig {
                lat_min: lat_min.or(file.lat_min).unwrap_or(defaults.lat_min),
                lat_max: lat_max.or(file.lat_max).unwrap_or(defaults.lat_max),
                lon_min: lon_min.or(file.lon_min).unwrap_or(defaults.lon_min),
                lon_max: lon_max.or(file.lon_max).unwrap_or(defaults.lon_max),
                grid_step: grid_step.or(file.grid_step).unwrap_or(defaults.grid_step),
                advantaged_fraction: advantaged_fraction
                    .or(file.advantaged_fraction)
                    .unwrap_or(defaults.advantaged_fraction),
                pe_both_advantaged: pe_both_advantaged
                    .or(file.pe_both_advantaged)
                    .unwrap_or(defaults.pe_both_advantaged),
                pe_both_disadvantaged: pe_both_disadvantaged
                    .or(file.pe_both_disadvantaged)
                    .unwrap_or(defaults.pe_both_disadvantaged),
                pe_mixed: pe_mixed.or(file.pe_mixed).unwrap_or(defaults.pe_mixed),
                driver_patience: driver_patience
                    .or(file.driver_patience)
                    .unwrap_or(defaults.driver_patience),
                rider_patience_choices: rider_patience_choices
                    .or_else(|| file.rider_patience_choices.clone())
                    .unwrap_or(defaults.rider_patience_choices),
                utility_scale_shift: utility_scale_shift.or(file.utility_scale_shift),
                seed,
            };
            cmd_ingest(&trips, &cfg, format, &output)
        }
        Cmd::Hardness { kind, t, l, side } => {
            let kind = kind
                .or(FileConfig::value_enum(&file.kind, "kind")?)
                .ok_or_else(|| CliError::Validation("--kind is required (group|indiv)".into()))?;
            cmd_hardness(
                kind,
                t.or(file.t).unwrap_or(9),
                l.or(file.l).unwrap_or(100.0),
                side.or(FileConfig::value_enum(&file.side, "side")?)
                    .unwrap_or(SideArg::Offline),
                format,
                &output,
            )
        }
        Cmd::Compare {
            instance,
            trials,
            rho_sims,
            unit_weights,
        } => cmd_compare(
            &instance,
            trials.or(file.trials).unwrap_or(100),
            rho_sims.or(file.rho_sims).unwrap_or(1000),
            unit_weights || file.unit_weights.unwrap_or(false),
            seed,
            format,
            &output,
        ),
        Cmd::GenTrips { drivers, records } => cmd_gen_trips(
            drivers.or(file.drivers).unwrap_or(49),
            records.or(file.records).unwrap_or(172),
            seed,
            format,
            &output,
        ),
    }
}

// ---------------------------------------------------------------------
// Shared plumbing.
// ---------------------------------------------------------------------

/// Writes the data product to `--output` or standard output (same bytes
/// either way).
fn write_output(output: &Option<PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Runtime(format!("writing standard output: {e}"))),
    }
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Runtime(format!("opening {}: {e}", path.display())))?;
    let inst = Instance::from_json_reader(std::io::BufReader::new(file)).map_err(|e| match e {
        ModelError::Json(j) => CliError::Validation(format!("{}: {j}", path.display())),
        other => other.into(),
    })?;
    let violations = validate_instance(&inst);
    if !violations.is_empty() {
        return Err(CliError::Validation(format!(
            "{} failed validation ({} violation(s); first: {})",
            path.display(),
            violations.len(),
            violations[0]
        )));
    }
    Ok(inst)
}

/// Loads an instance and, for stationary-arrival instances with
/// multi-arrival types, splits those types into unit-rate copies so the
/// benchmark LPs apply (a notice goes to standard error; the experiment
/// runners would do the same split internally).
fn load_prepared(path: &Path) -> Result<Instance, CliError> {
    let inst = load_instance(path)?;
    if inst.arrival_model == ArrivalModel::Kiid && !inst.is_fragmented_kiid() {
        eprintln!(
            "note: splitting stationary types with multiple expected arrivals \
             into unit-rate copies for the benchmark LPs"
        );
        return Ok(fragment_types(&inst)?);
    }
    Ok(inst)
}

fn instance_json(inst: &Instance) -> Result<Vec<u8>, CliError> {
    let mut text = inst.to_json_string_pretty()?;
    text.push('\n');
    Ok(text.into_bytes())
}

/// Instances and fixtures are emitted as JSON only.
fn require_json_format(format: Option<ReportFormat>, what: &str) -> Result<(), CliError> {
    if format == Some(ReportFormat::Csv) {
        return Err(CliError::Validation(format!(
            "{what} is emitted as json; --format csv applies to report-producing commands"
        )));
    }
    Ok(())
}

fn report_bytes(reports: &[RatioReport], format: ReportFormat) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_report(reports, format, &mut buf)?;
    Ok(buf)
}

struct ProbeParams {
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    rho_sims: usize,
    lambda: f64,
}

impl ProbeParams {
    fn weights(&self) -> Result<Weights, CliError> {
        Ok(Weights::new(
            self.alpha.unwrap_or(1.0 / 3.0),
            self.beta.unwrap_or(1.0 / 3.0),
            self.gamma.unwrap_or(1.0 / 3.0),
        )?)
    }

    fn any_weight_given(&self) -> bool {
        self.alpha.is_some() || self.beta.is_some() || self.gamma.is_some()
    }
}

// ---------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------

/// The three benchmark optima (plus the individual-fairness optima on
/// request), with stable field order.
#[derive(Serialize)]
struct BenchOut {
    opt_op: f64,
    opt_off: f64,
    opt_on: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    opt_off_indiv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    opt_on_indiv: Option<f64>,
}

fn cmd_bench(
    path: &Path,
    individual: bool,
    format: Option<ReportFormat>,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    let inst = load_prepared(path)?;
    let bundle = benchmarks(&inst)?;
    let mut out = BenchOut {
        opt_op: bundle.opt_op,
        opt_off: bundle.opt_off,
        opt_on: bundle.opt_on,
        opt_off_indiv: None,
        opt_on_indiv: None,
    };
    if individual {
        if !inst.is_unit_success() {
            return Err(CliError::Validation(
                "individual-fairness benchmarks require unit success probability on every edge"
                    .into(),
            ));
        }
        let kad = to_kad(&inst);
        out.opt_off_indiv = Some(
            fairmatch::solve_lp(&fairmatch::build_kad_indiv_lp(&kad, Side::Offline)?)?
                .objective_value,
        );
        out.opt_on_indiv = Some(
            fairmatch::solve_lp(&fairmatch::build_kad_indiv_lp(&kad, Side::Online)?)?
                .objective_value,
        );
    }
    let bytes = match format.unwrap_or(ReportFormat::Json) {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(&out)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            text.push('\n');
            text.into_bytes()
        }
        ReportFormat::Csv => {
            let mut header = vec!["opt_op", "opt_off", "opt_on"];
            let mut row = vec![
                format!("{}", out.opt_op),
                format!("{}", out.opt_off),
                format!("{}", out.opt_on),
            ];
            if let (Some(off), Some(on)) = (out.opt_off_indiv, out.opt_on_indiv) {
                header.extend(["opt_off_indiv", "opt_on_indiv"]);
                row.push(format!("{off}"));
                row.push(format!("{on}"));
            }
            format!("{}\n{}\n", header.join(","), row.join(",")).into_bytes()
        }
    };
    write_output(output, &bytes)
}

fn cmd_run(
    path: &Path,
    algo: AlgoArg,
    params: ProbeParams,
    trials: usize,
    seed: u64,
    format: Option<ReportFormat>,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    if !(params.lambda > 0.0 && params.lambda <= 1.0) {
        return Err(CliError::Validation(format!(
            "--lambda {} must lie in (0, 1]",
            params.lambda
        )));
    }
    let config = match algo {
        AlgoArg::Tsf => AlgoConfig::Tsf {
            weights: params.weights()?,
        },
        AlgoArg::TsfKad => AlgoConfig::TsfKad {
            weights: params.weights()?,
            rho_sims: params.rho_sims,
            lambda: params.lambda,
        },
        AlgoArg::GreedyO | AlgoArg::GreedyR | AlgoArg::GreedyD => {
            if params.any_weight_given() {
                eprintln!("note: objective weights are ignored by the greedy baselines");
            }
            match algo {
                AlgoArg::GreedyO => AlgoConfig::GreedyO,
                AlgoArg::GreedyR => AlgoConfig::GreedyR,
                _ => AlgoConfig::GreedyD,
            }
        }
    };
    let inst = load_prepared(path)?;
    let reports = run_experiment(&inst, &[config], trials, seed)?;
    write_output(output, &report_bytes(&reports, format.unwrap_or(ReportFormat::Json))?)
}

/// Parses `start:end:step` into the swept α values (inclusive, within
/// [0, 1], cleaned of accumulated floating-point dust).
fn parse_alpha_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: String| Err(CliError::Validation(msg));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return bad(format!("--alphas '{spec}' must have the form start:end:step"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Validation(format!("--alphas '{spec}': {e}")))?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !step.is_finite() {
        return bad(format!("--alphas step {step} must be positive"));
    }
    if !(0.0..=1.0 + 1e-9).contains(&start) || !(0.0..=1.0 + 1e-9).contains(&end) || start > end {
        return bad(format!(
            "--alphas range [{start}, {end}] must satisfy 0 <= start <= end <= 1"
        ));
    }
    let mut alphas = Vec::new();
    let mut i = 0u32;
    loop {
        let raw = start + f64::from(i) * step;
        if raw > end + 1e-9 {
            break;
        }
        // Snap 0.30000000000000004-style dust so reports carry clean values.
        alphas.push(((raw.min(1.0)) * 1e12).round() / 1e12);
        i += 1;
    }
    Ok(alphas)
}

fn cmd_sweep(
    path: &Path,
    alphas: &str,
    trials: usize,
    rho_sims: usize,
    seed: u64,
    format: Option<ReportFormat>,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    let inst = load_prepared(path)?;
    let mut configs = Vec::new();
    for alpha in parse_alpha_range(alphas)? {
        let rest = (1.0 - alpha) / 2.0;
        let weights = Weights::new(alpha, rest, rest)?;
        configs.push(match inst.arrival_model {
            ArrivalModel::Kiid => AlgoConfig::Tsf { weights },
            ArrivalModel::Kad => AlgoConfig::TsfKad {
                weights,
                rho_sims,
                lambda: 0.5,
            },
        });
    }
    let reports = run_experiment(&inst, &configs, trials, seed)?;
    write_output(output, &report_bytes(&reports, format.unwrap_or(ReportFormat::Json))?)
}

fn cmd_ingest(
    trips: &Path,
    cfg: &IngestConfig,
    format: Option<ReportFormat>,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    require_json_format(format, "an instance")?;
    let records = read_trip_records(trips)?;
    let (inst, summary) = ingest_trips(&records, cfg)?;
    eprintln!(
        "ingested {} records ({} outside the bounding box): {} drivers × {} request types; \
         utility shift {}",
        summary.records_used,
        summary.records_dropped,
        summary.drivers,
        summary.request_types,
        summary.utility_shift
    );
    write_output(output, &instance_json(&inst)?)
}

fn cmd_hardness(
    kind: KindArg,
    t: usize,
    l: f64,
    side: SideArg,
    format: Option<ReportFormat>,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    require_json_format(format, "a fixture")?;
    let inst = match kind {
        KindArg::Group => make_hardness_group_instance(t)?,
        KindArg::Indiv => make_hardness_indiv_group_instance(
            l,
            match side {
                SideArg::Offline => Side::Offline,
                SideArg::Online => Side::Online,
            },
        )?,
    };
    write_output(output, &instance_json(&inst)?)
}

fn cmd_compare(
    path: &Path,
    trials: usize,
    rho_sims: usize,
    unit_weights: bool,
    seed: u64,
    format: Option<ReportFormat>,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    let inst = load_prepared(path)?;
    let single_objective = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)];
    let mut reports = Vec::new();
    if unit_weights {
        if inst.arrival_model != ArrivalModel::Kiid {
            return Err(CliError::Validation(
                "--unit-weights ablation requires a stationary-arrival instance".into(),
            ));
        }
        for (k, (a, b, g)) in single_objective.into_iter().enumerate() {
            let (aware, ablated) = run_unit_weight_ablation(
                &inst,
                &Weights::new(a, b, g)?,
                trials,
                mix(seed, 0x61626c00 + k as u64),
            )?;
            reports.push(aware);
            reports.push(ablated);
        }
    } else {
        let probing: Vec<AlgoConfig> = single_objective
            .into_iter()
            .map(|(a, b, g)| {
                let weights = Weights::new(a, b, g)?;
                Ok(match inst.arrival_model {
                    ArrivalModel::Kiid => AlgoConfig::Tsf { weights },
                    ArrivalModel::Kad => AlgoConfig::TsfKad {
                        weights,
                        rho_sims,
                        lambda: 0.5,
                    },
                })
            })
            .collect::<Result<_, AlgoError>>()?;
        reports.extend(run_experiment(&inst, &probing, trials, seed)?);
    }
    let greedies = [AlgoConfig::GreedyO, AlgoConfig::GreedyR, AlgoConfig::GreedyD];
    reports.extend(run_experiment(&inst, &greedies, trials, mix(seed, 0x677264))?);
    write_output(output, &report_bytes(&reports, format.unwrap_or(ReportFormat::Json))?)
}

fn cmd_gen_trips(
    drivers: usize,
    records: usize,
    seed: u64,
    format: Option<ReportFormat>,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    if drivers == 0 || records == 0 {
        return Err(CliError::Validation(
            "--drivers and --records must be >= 1".into(),
        ));
    }
    let trips = generate_trip_records(drivers, records, seed);
    // Trip data defaults to the CSV schema that `ingest` reads.
    let bytes = match format.unwrap_or(ReportFormat::Csv) {
        ReportFormat::Csv => {
            let mut buf = Vec::new();
            write_trip_records(&trips, &mut buf)?;
            buf
        }
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(&trips)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            text.push('\n');
            text.into_bytes()
        }
    };
    eprintln!("generated {} trip records for {} drivers", trips.len(), drivers);
    write_output(output, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_range_parses_cleanly() {
        let alphas = parse_alpha_range("0:1:0.1").unwrap();
        assert_eq!(alphas.len(), 11);
        assert_eq!(alphas[3], 0.3);
        assert_eq!(alphas[10], 1.0);
        assert_eq!(parse_alpha_range("0.5:0.5:1").unwrap(), vec![0.5]);
        assert!(parse_alpha_range("0:1").is_err());
        assert!(parse_alpha_range("0:1:0").is_err());
        assert!(parse_alpha_range("0.8:0.2:0.1").is_err());
        assert!(parse_alpha_range("0:1.5:0.5").is_err());
    }

    #[test]
    fn cli_flags_parse() {
        let cli = Cli::try_parse_from([
            "fairmatch", "sweep", "inst.json", "--alphas", "0:1:0.5", "--seed", "7", "--out",
            "r.csv", "--format", "csv",
        ])
        .unwrap();
        assert_eq!(cli.seed, Some(7));
        assert_eq!(cli.output.as_deref(), Some(Path::new("r.csv")));
        assert!(matches!(cli.cmd, Cmd::Sweep { .. }));
        assert!(Cli::try_parse_from(["fairmatch"]).is_err());
        assert!(Cli::try_parse_from(["fairmatch", "run", "i.json", "--algo", "nope"]).is_err());
    }
}
