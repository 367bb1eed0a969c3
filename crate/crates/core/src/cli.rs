//! Command-line driver. Exit codes: 0 success, 1 validation or run failure,
//! 2 configuration error, 3 I/O error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{ConfigError, DatasetSource, RunConfig};
use crate::dataio::{
    dataset_calibration, generate_logs, read_log, synth_dataset, validate_log, write_log, DataError,
    Dataset, PredictionLog,
};
use crate::experiment::{
    distribution_report, family_seed, run_cell, run_matrix, split_seed, underestimation_summary,
    CellSpec, ExperimentError, Grid, MatrixConfig, MatrixReport,
};
use crate::metrics::{MetricKind, Task};
use crate::seed::{derive_seed, hash_str};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "assessor-bench", version, about = "Target-versus-proxy assessor benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic datasets and their prediction logs.
    Synth(RunArgs),
    /// Check a prediction log against the canonical schema.
    Validate {
        log: PathBuf,
        /// Expected task of the log.
        #[arg(long)]
        task: Option<Task>,
    },
    /// Run the target-versus-proxy score and margin matrices.
    Matrix(RunArgs),
    /// Emit histograms and underestimation summaries as plot data.
    Report(RunArgs),
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(EXIT_CONFIG, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_IO, format!("i/o error: {e}"))
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        let code = match &e {
            DataError::Io(_) | DataError::Csv(_) | DataError::Json(_) => EXIT_IO,
            DataError::InvalidSpec(_) => EXIT_CONFIG,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Data(d) => d.into(),
            ExperimentError::InvalidConfig(m) => Failure::new(EXIT_CONFIG, m),
            other => Failure::new(EXIT_INVALID, other.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Synth(a) => with_pool(&a, cmd_synth),
        Command::Validate { log, task } => cmd_validate(&log, task),
        Command::Matrix(a) => with_pool(&a, cmd_matrix),
        Command::Report(a) => with_pool(&a, cmd_report),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

struct Ctx {
    config: RunConfig,
    out: PathBuf,
    config_text: String,
}

fn with_pool(args: &RunArgs, f: fn(&Ctx) -> Result<i32, Failure>) -> Result<i32, Failure> {
    let config = RunConfig::load(&args.config, args.seed)?;
    let config_text = fs::read_to_string(&args.config)?;
    let out = args
        .out
        .clone()
        .or_else(|| {
            config.output_dir.as_ref().map(|o| {
                args.config.parent().unwrap_or(Path::new(".")).join(o)
            })
        })
        .ok_or_else(|| Failure::new(EXIT_CONFIG, "no output directory: pass --out or set output_dir"))?;
    fs::create_dir_all(&out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Failure::new(EXIT_CONFIG, e.to_string()))?;
    let ctx = Ctx {
        config,
        out,
        config_text,
    };
    pool.install(|| f(&ctx))
}

/// File-name-safe form of a dataset or family name.
fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn synthetic(config: &RunConfig) -> Result<Vec<Dataset>, Failure> {
    config
        .datasets
        .iter()
        .filter_map(|d| match d {
            DatasetSource::Synth(s) => Some(synth_dataset(s).map_err(Failure::from)),
            DatasetSource::Log(_) => None,
        })
        .collect()
}

/// Every dataset of the config as a prediction log, in config order.
fn load_logs(config: &RunConfig) -> Result<Vec<PredictionLog>, Failure> {
    let generated = generate_logs(&synthetic(config)?, &config.grid, config.holdout, config.seed)?;
    let mut generated = generated.into_iter();
    config
        .datasets
        .iter()
        .map(|d| match d {
            DatasetSource::Synth(_) => Ok(generated.next().expect("one log per synthetic dataset")),
            DatasetSource::Log(p) => read_log(p, Some(config.task)).map_err(|e| {
                let f = Failure::from(e);
                Failure::new(f.code, format!("{}: {}", p.display(), f.message))
            }),
        })
        .collect()
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    config: &'a RunConfig,
    config_source: &'a str,
    decisions: Decisions,
}

#[derive(Serialize)]
struct Decisions {
    split_policy: &'static str,
    subject_holdout: f64,
    assessor_train_fraction: f64,
    b_calibration: &'static str,
    proxy_clamping: &'static str,
    bootstrap: &'static str,
    tie_rule: &'static str,
}

fn write_metadata(ctx: &Ctx, command: &'static str) -> Result<(), Failure> {
    let meta = Metadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed: ctx.config.seed,
        config: &ctx.config,
        config_source: &ctx.config_text,
        decisions: Decisions {
            split_policy: "one_per_dataset",
            subject_holdout: ctx.config.holdout,
            assessor_train_fraction: ctx.config.train_fraction,
            b_calibration: "dataset_mean_abs_residual",
            proxy_clamping: "clamp_to_attainable_range_before_inversion",
            bootstrap: "paired_percentile",
            tie_rule: "average_ranks",
        },
    };
    write_json(&ctx.out.join(format!("run_metadata_{command}.json")), &meta)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn cmd_synth(ctx: &Ctx) -> Result<i32, Failure> {
    let config = &ctx.config;
    let datasets = synthetic(config)?;
    if datasets.is_empty() {
        return Err(Failure::new(EXIT_CONFIG, "config has no synthetic datasets"));
    }
    let logs = generate_logs(&datasets, &config.grid, config.holdout, config.seed)?;
    let (data_dir, log_dir) = (ctx.out.join("datasets"), ctx.out.join("logs"));
    fs::create_dir_all(&data_dir)?;
    fs::create_dir_all(&log_dir)?;
    for (ds, log) in datasets.iter().zip(&logs) {
        write_dataset(&data_dir.join(format!("{}.csv", slug(&ds.name))), ds)?;
        let path = log_dir.join(format!("{}.csv", slug(&ds.name)));
        write_log(&path, log)?;
        println!(
            "{}: {} instances, {} log rows -> {}",
            ds.name,
            ds.features.nrows(),
            log.len(),
            path.display()
        );
    }
    write_metadata(ctx, "synth")?;
    Ok(EXIT_OK)
}

fn write_dataset(path: &Path, ds: &Dataset) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(DataError::from)?;
    let d = ds.features.ncols();
    let header: Vec<String> = std::iter::once("x_id".to_string())
        .chain((0..d).map(|j| format!("f_{j}")))
        .chain(["y".to_string(), "corrupted".to_string()])
        .collect();
    w.write_record(&header).map_err(DataError::from)?;
    for (i, row) in ds.features.outer_iter().enumerate() {
        let rec: Vec<String> = std::iter::once(i.to_string())
            .chain(row.iter().map(f64::to_string))
            .chain([ds.targets[i].to_string(), u8::from(ds.corrupted[i]).to_string()])
            .collect();
        w.write_record(&rec).map_err(DataError::from)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_validate(log: &Path, task: Option<Task>) -> Result<i32, Failure> {
    let report = validate_log(log, task)?;
    for d in &report.diagnostics {
        println!("{}: {d}", log.display());
    }
    if report.is_valid() {
        println!("{}: valid, {} rows", log.display(), report.rows);
        Ok(EXIT_OK)
    } else {
        println!("{}: {} violation(s)", log.display(), report.diagnostics.len());
        Ok(EXIT_INVALID)
    }
}

fn grid_csv<T>(targets: &[MetricKind], proxies: &[MetricKind], grid: &Grid<T>, cell: impl Fn(&T) -> String) -> String {
    let mut s = String::from("target\\proxy");
    for p in proxies {
        let _ = write!(s, ",{}", p.symbol());
    }
    s.push('\n');
    for (t, row) in targets.iter().zip(grid) {
        s.push_str(t.symbol());
        for v in row {
            s.push(',');
            s.push_str(&v.as_ref().map_or_else(|| "NA".to_string(), &cell));
        }
        s.push('\n');
    }
    s
}

fn write_matrix(out: &Path, r: &MatrixReport) -> Result<(), Failure> {
    let (t, p) = (&r.targets, &r.proxies);
    for g in &r.families {
        let fam = slug(&g.family);
        fs::write(out.join(format!("score_{fam}.csv")), grid_csv(t, p, &g.score, i64::to_string))?;
        fs::write(out.join(format!("margin_{fam}.csv")), grid_csv(t, p, &g.margin, f64::to_string))?;
    }
    fs::write(out.join("score_aggregate.csv"), grid_csv(t, p, &r.aggregate_score, f64::to_string))?;
    fs::write(out.join("margin_aggregate.csv"), grid_csv(t, p, &r.aggregate_margin, f64::to_string))?;
    write_json(&out.join("matrix_report.json"), r)
}

fn cmd_matrix(ctx: &Ctx) -> Result<i32, Failure> {
    let c = &ctx.config;
    let logs = load_logs(c)?;
    let mc = MatrixConfig {
        assessors: c.assessors.clone(),
        targets: c.targets.clone(),
        proxies: c.proxies.clone(),
        train_fraction: c.train_fraction,
        bootstrap: c.bootstrap,
        seed: c.seed,
    };
    let report = run_matrix(&logs, &mc)?;
    write_matrix(&ctx.out, &report)?;
    write_metadata(ctx, "matrix")?;
    println!(
        "{} datasets, {} assessor families, {} applicable cells each -> {}",
        report.datasets.len(),
        report.families.len(),
        report.cells.len() / (report.datasets.len() * report.families.len()).max(1),
        ctx.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_report(ctx: &Ctx) -> Result<i32, Failure> {
    let c = &ctx.config;
    let logs = load_logs(c)?;
    if let Some(l) = logs.iter().find(|l| l.is_empty()) {
        return Err(Failure::new(EXIT_CONFIG, format!("log {} has no rows", l.meta.dataset)));
    }
    let metrics = c.metric_set();
    let hist_dir = ctx.out.join("histograms");
    fs::create_dir_all(&hist_dir)?;
    let mut under = String::from("dataset,family,target,proxy,mean_truth,proxy_gap,target_gap\n");
    let mut deciles = String::from("dataset,family,target,proxy,decile,proxy_gap,target_gap\n");
    for (i, log) in logs.iter().enumerate() {
        let needs_b = c.task == Task::Regression && metrics.iter().any(|m| m.is_logistic());
        let b = if needs_b { Some(dataset_calibration(log)?) } else { None };
        let dist = distribution_report(log, &metrics, b)?;
        for h in &dist.histograms {
            let mut s = String::from("bin,lo,hi,count\n");
            let edges = h.edges();
            for (k, n) in h.counts.iter().enumerate() {
                let _ = writeln!(s, "{k},{},{},{n}", edges[k], edges[k + 1]);
            }
            fs::write(hist_dir.join(format!("{}_{}.csv", slug(&log.meta.dataset), h.name)), s)?;
        }
        for a in &c.assessors {
            for &target in metrics.iter().filter(|m| m.is_unsigned()) {
                let proxy = target.signed_counterpart().expect("unsigned loss");
                if !metrics.contains(&proxy) {
                    continue;
                }
                let spec = CellSpec {
                    dataset: log.meta.dataset.clone(),
                    assessor: a.seed(family_seed(c.seed, i, log, a.family.name())),
                    target,
                    proxy,
                    split_seed: split_seed(c.seed, i, log),
                    train_fraction: c.train_fraction,
                    bootstrap: c.bootstrap,
                    bootstrap_seed: derive_seed(c.seed, &[hash_str("report"), i as u64]),
                };
                let out = run_cell(&spec, log)?;
                let u = underestimation_summary(&out)?;
                let _ = writeln!(
                    under,
                    "{},{},{},{},{},{},{}",
                    log.meta.dataset, a.family, target.symbol(), proxy.symbol(), u.mean_truth, u.proxy_gap, u.target_gap
                );
                for (k, (pg, tg)) in u.decile_proxy_gaps.iter().zip(&u.decile_target_gaps).enumerate() {
                    let _ = writeln!(
                        deciles,
                        "{},{},{},{},{k},{pg},{tg}",
                        log.meta.dataset, a.family, target.symbol(), proxy.symbol()
                    );
                }
            }
        }
        println!("{}: {} rows, {} histograms", log.meta.dataset, dist.rows, dist.histograms.len());
    }
    fs::write(ctx.out.join("underestimation.csv"), under)?;
    fs::write(ctx.out.join("underestimation_deciles.csv"), deciles)?;
    write_metadata(ctx, "report")?;
    std::io::stdout().flush()?;
    Ok(EXIT_OK)
}
