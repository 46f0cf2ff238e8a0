//! Subcommand definitions and implementations for the `mrtime` binary.
//!
//! Commands compose through files: `gen-experiments` writes a plan,
//! `profile` turns a plan into a run dataset, `fit` turns a dataset into a
//! model file, `predict` and `evaluate` consume the model. Diagnostics go
//! to stderr; data goes to the named output files or stdout. Every command
//! is deterministic given identical inputs, flags, and seeds (wall-clock
//! workloads excepted).

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mrtime_core::eximlog;
use mrtime_core::profiling::{
    aggregate_runs, generate_grid, Aggregation, ExperimentPlan, RunSample,
};
use mrtime_core::regression::{self, ConfigPoint, RegressionError};
use mrtime_core::rng::SplitMix64;
use mrtime_core::workloads::SyntheticTruth;

use crate::files;
use crate::floatfmt::format_f64_full;
use crate::model_file::ModelFile;
use crate::runner::{run_plan, Workload, WorkloadOptions};

#[derive(Parser)]
#[command(
    name = "mrtime",
    version,
    about = "Profile, model, and predict MapReduce execution times"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Sample a configuration lattice into an experiment plan
    GenExperiments(GenExperimentsArgs),
    /// Run a workload over a plan, recording per-run execution times
    Profile(ProfileArgs),
    /// Fit an execution-time model to a profiled dataset
    Fit(FitArgs),
    /// Predict execution times for configurations or a whole grid
    Predict(PredictArgs),
    /// Compare model predictions against a measured dataset
    Evaluate(EvaluateArgs),
    /// Group an Exim mainlog into per-transaction output
    EximGroup(EximGroupArgs),
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenExperiments(args) => gen_experiments(args),
        Command::Profile(args) => profile(args),
        Command::Fit(args) => fit(args),
        Command::Predict(args) => predict(args),
        Command::Evaluate(args) => evaluate(args),
        Command::EximGroup(args) => exim_group(args),
    }
}

#[derive(Args)]
pub struct GenExperimentsArgs {
    /// Number of distinct configurations to sample
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Smallest mapper/reducer count
    #[arg(long, default_value_t = 5)]
    pub min: u32,
    /// Largest mapper/reducer count
    #[arg(long, default_value_t = 40)]
    pub max: u32,
    /// Sampling seed
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Plan file to write
    #[arg(short, long)]
    pub output: PathBuf,
}

fn gen_experiments(args: GenExperimentsArgs) -> Result<()> {
    let ranges = vec![
        ("mappers".to_string(), args.min, args.max),
        ("reducers".to_string(), args.min, args.max),
    ];
    let configs = generate_grid(&ranges, args.count, args.seed)?;
    files::save_plan(&args.output, &configs)?;
    eprintln!(
        "wrote {} ({} configurations)",
        args.output.display(),
        configs.len()
    );
    Ok(())
}

#[derive(Args)]
pub struct ProfileArgs {
    /// Plan file listing the configurations to run
    #[arg(long)]
    pub plan: PathBuf,
    /// Workload name: wordcount, eximparse, or synthetic
    #[arg(long)]
    pub app: String,
    /// Runs per configuration
    #[arg(long, default_value_t = 5)]
    pub repeats: u32,
    /// Input file for the wordcount and eximparse workloads
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Truth model file for the synthetic workload
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Noise standard deviation in seconds (synthetic; overrides the truth
    /// file's noise_sigma)
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Noise stream seed (synthetic; overrides the truth file's seed)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dataset file to write
    #[arg(short, long)]
    pub output: PathBuf,
}

// Bounding box of the plan's configurations, for truth-positivity checks.
fn plan_ranges(configs: &[ConfigPoint], name: &str) -> (u32, u32) {
    let values = configs.iter().filter_map(|c| c.get(name));
    let min = values.clone().min().unwrap_or(1);
    let max = values.max().unwrap_or(1);
    (min, max)
}

fn profile(args: ProfileArgs) -> Result<()> {
    let configs = files::load_plan(&args.plan)?;
    let seed = args.seed;
    let plan = ExperimentPlan::new(&args.app, configs, args.repeats, seed.unwrap_or(0))?;

    let mut options = WorkloadOptions::default();
    if let Some(input) = &args.input {
        options.input =
            Some(fs::read(input).with_context(|| format!("reading {}", input.display()))?);
    }
    if let Some(truth_path) = &args.truth {
        let truth_file = ModelFile::load(truth_path)?;
        let model = &truth_file.model;
        if model.parameter_names() != ["mappers", "reducers"] || model.degree() != 3 {
            bail!(
                "{}: a synthetic truth must be a degree-3 model over (mappers, reducers)",
                truth_path.display()
            );
        }
        let noise_sigma = args.noise_sigma.or(truth_file.noise_sigma).unwrap_or(0.0);
        let noise_seed = seed.or(truth_file.seed).unwrap_or(0);
        options.truth = Some(SyntheticTruth::new(
            model.coefficients().clone(),
            noise_sigma,
            noise_seed,
            plan_ranges(plan.configs(), "mappers"),
            plan_ranges(plan.configs(), "reducers"),
        )?);
    }
    let workload = Workload::resolve(&args.app, options)?;

    let samples = run_plan(&plan, &workload)?;
    files::save_dataset(&args.output, &args.app, &samples)?;
    eprintln!(
        "wrote {} ({} configurations x {} runs)",
        args.output.display(),
        plan.configs().len(),
        plan.repeats()
    );
    Ok(())
}

#[derive(Args)]
pub struct FitArgs {
    /// Dataset file to fit
    #[arg(long)]
    pub data: PathBuf,
    /// Polynomial degree per parameter
    #[arg(long, default_value_t = 3)]
    pub degree: u32,
    /// How repeats collapse into one time per configuration
    #[arg(long, default_value = "mean")]
    pub agg: Aggregation,
    /// Hold out this many configurations before fitting
    #[arg(long, default_value_t = 0)]
    pub holdout: usize,
    /// Dataset file that receives the held-out runs
    #[arg(long)]
    pub holdout_out: Option<PathBuf>,
    /// Seed for the holdout selection
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Model file to write
    #[arg(short, long)]
    pub output: PathBuf,
}

// Splits samples into (kept, held out) by configuration. Selection is a
// partial Fisher-Yates over the distinct configurations in
// first-appearance order, driven by SplitMix64.
fn carve_holdout(
    samples: Vec<RunSample>,
    holdout: usize,
    seed: u64,
) -> Result<(Vec<RunSample>, Vec<RunSample>)> {
    let mut distinct: Vec<ConfigPoint> = Vec::new();
    for sample in &samples {
        if !distinct.contains(sample.config()) {
            distinct.push(sample.config().clone());
        }
    }
    if holdout >= distinct.len() {
        bail!(
            "--holdout {holdout} would leave no training data ({} distinct configurations)",
            distinct.len()
        );
    }
    let mut rng = SplitMix64::new(seed);
    let n = distinct.len();
    for i in 0..holdout {
        let j = i + rng.next_below((n - i) as u64) as usize;
        distinct.swap(i, j);
    }
    let held: Vec<ConfigPoint> = distinct[..holdout].to_vec();
    let (held_samples, kept_samples): (Vec<RunSample>, Vec<RunSample>) =
        samples.into_iter().partition(|s| held.contains(s.config()));
    Ok((kept_samples, held_samples))
}

fn fit(args: FitArgs) -> Result<()> {
    let dataset = files::load_dataset(&args.data)?;
    let app = dataset.require_app(&args.data)?.to_string();

    let samples = if args.holdout > 0 {
        let holdout_out = args.holdout_out.as_ref().ok_or_else(|| {
            anyhow!("--holdout needs --holdout-out to say where the held-out runs go")
        })?;
        let (kept, held) = carve_holdout(dataset.samples, args.holdout, args.seed)?;
        files::save_dataset(holdout_out, &app, &held)?;
        eprintln!(
            "held out {} configurations into {}",
            args.holdout,
            holdout_out.display()
        );
        kept
    } else {
        dataset.samples
    };

    let records = aggregate_runs(&app, &samples, args.agg)?;
    let model = regression::fit(&records, args.degree).map_err(|e| match &e {
        RegressionError::InsufficientData { needed, .. } => {
            anyhow!("{e}; profile at least {needed} distinct configurations")
        }
        RegressionError::RankDeficient { .. } => {
            anyhow!("{e}; spread that parameter over more distinct values")
        }
        _ => anyhow!(e),
    })?;

    let mut out = ModelFile::new(model);
    out.trained_from = Some(args.data.display().to_string());
    out.m = Some(records.len());
    out.save(&args.output)?;
    eprintln!(
        "wrote {} (degree {}, {} experiments, {} aggregation)",
        args.output.display(),
        args.degree,
        records.len(),
        args.agg
    );
    Ok(())
}

#[derive(Args)]
pub struct PredictArgs {
    /// Model file to evaluate
    #[arg(long)]
    pub model: PathBuf,
    /// Mapper count of a single configuration
    #[arg(long)]
    pub mappers: Option<u32>,
    /// Reducer count of a single configuration
    #[arg(long)]
    pub reducers: Option<u32>,
    /// Plan file of configurations to predict
    #[arg(long, conflicts_with_all = ["mappers", "reducers", "grid"])]
    pub configs: Option<PathBuf>,
    /// Predict the whole mappers x reducers lattice
    #[arg(long, conflicts_with_all = ["mappers", "reducers"])]
    pub grid: bool,
    /// Smallest lattice coordinate (grid mode)
    #[arg(long, default_value_t = 5)]
    pub min: u32,
    /// Largest lattice coordinate (grid mode)
    #[arg(long, default_value_t = 40)]
    pub max: u32,
    /// Surface file to write (grid mode)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn predict(args: PredictArgs) -> Result<()> {
    let model = ModelFile::load(&args.model)?.model;

    if args.grid {
        if args.min < 1 || args.max < args.min {
            bail!(
                "invalid grid bounds {}..={} (need 1 <= min <= max)",
                args.min,
                args.max
            );
        }
        let output = args
            .output
            .as_ref()
            .ok_or_else(|| anyhow!("--grid needs --output for the surface file"))?;
        let mut rows = Vec::new();
        let mut best: Option<(u32, u32, f64)> = None;
        for mappers in args.min..=args.max {
            for reducers in args.min..=args.max {
                let config = ConfigPoint::mappers_reducers(mappers, reducers);
                let predicted = model.predict(&config)?;
                rows.push((mappers, reducers, predicted));
                // Strict comparison: ties keep the first point in row-major
                // scan order.
                if best.is_none_or(|(_, _, b)| predicted < b) {
                    best = Some((mappers, reducers, predicted));
                }
            }
        }
        files::save_surface(output, &rows)?;
        let (m, r, predicted) = best.expect("grid has at least one point");
        println!(
            "argmin mappers={m} reducers={r} predicted_s={}",
            format_f64_full(predicted)
        );
        eprintln!("wrote {} ({} points)", output.display(), rows.len());
        return Ok(());
    }

    let configs: Vec<ConfigPoint> = if let Some(path) = &args.configs {
        files::load_plan(path)?
    } else {
        match (args.mappers, args.reducers) {
            (Some(m), Some(r)) => {
                if m == 0 || r == 0 {
                    bail!("mapper and reducer counts must be at least 1");
                }
                vec![ConfigPoint::mappers_reducers(m, r)]
            }
            (None, None) => {
                bail!("nothing to predict: pass --mappers/--reducers, --configs, or --grid")
            }
            _ => bail!("--mappers and --reducers go together"),
        }
    };

    println!("mappers,reducers,predicted_s");
    for config in &configs {
        let predicted = model.predict(config)?;
        let m = config.get("mappers").unwrap_or(0);
        let r = config.get("reducers").unwrap_or(0);
        println!("{m},{r},{}", format_f64_full(predicted));
    }
    Ok(())
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Model file to evaluate
    #[arg(long)]
    pub model: PathBuf,
    /// Dataset of measured runs to compare against
    #[arg(long)]
    pub data: PathBuf,
    /// How repeats collapse into one time per configuration
    #[arg(long, default_value = "mean")]
    pub agg: Aggregation,
    /// Report file to write
    #[arg(short, long)]
    pub output: PathBuf,
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let model = ModelFile::load(&args.model)?.model;
    let dataset = files::load_dataset(&args.data)?;
    let app = dataset.require_app(&args.data)?.to_string();
    if app != model.app() {
        eprintln!(
            "warning: model app '{}' but dataset app '{app}'",
            model.app()
        );
    }
    let records = aggregate_runs(&app, &dataset.samples, args.agg)?;
    let report = model.error_stats(&records)?;
    let lse = model.lse(&records)?;
    files::save_report(&args.output, &report, lse)?;
    println!(
        "mean_pct={:.6} variance_pct={:.6} lse={:.6}",
        report.mean_pct(),
        report.variance_pct(),
        lse
    );
    eprintln!(
        "wrote {} ({} configurations)",
        args.output.display(),
        report.rows().len()
    );
    Ok(())
}

#[derive(Args)]
pub struct EximGroupArgs {
    /// Mainlog file to parse
    #[arg(long)]
    pub input: PathBuf,
    /// Combined report file (default: stdout)
    #[arg(short, long, conflicts_with = "per_transaction")]
    pub output: Option<PathBuf>,
    /// Write one file per transaction into this directory instead
    #[arg(long)]
    pub per_transaction: Option<PathBuf>,
}

fn exim_group(args: EximGroupArgs) -> Result<()> {
    let input =
        fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let lines = eximlog::parse_log(&input);
    let groups = eximlog::group_transactions(&lines);

    if let Some(dir) = &args.per_transaction {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for tx in groups.iter() {
            let path = dir.join(format!("{}.log", tx.id()));
            let mut out = Vec::new();
            for line in tx.lines() {
                out.extend_from_slice(line.raw());
                out.push(b'\n');
            }
            fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
        }
        eprintln!(
            "wrote {} transaction files to {} ({} lines skipped)",
            groups.len(),
            dir.display(),
            groups.skipped_lines()
        );
        return Ok(());
    }

    let mut out = Vec::new();
    for tx in groups.iter() {
        out.extend_from_slice(
            format!("# transaction {} lines={}\n", tx.id(), tx.lines().len()).as_bytes(),
        );
        for line in tx.lines() {
            out.extend_from_slice(line.raw());
            out.push(b'\n');
        }
        out.push(b'\n');
    }
    match &args.output {
        Some(path) => {
            fs::write(path, &out).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&out)?;
        }
    }
    eprintln!(
        "grouped {} transactions ({} lines skipped)",
        groups.len(),
        groups.skipped_lines()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holdout_carving_is_disjoint_and_seeded() {
        let mut samples = Vec::new();
        for m in 1..=6u32 {
            for run in 0..3 {
                samples.push(
                    RunSample::new(ConfigPoint::mappers_reducers(m, 10), run, m as f64).unwrap(),
                );
            }
        }
        let (kept, held) = carve_holdout(samples.clone(), 2, 7).unwrap();
        assert_eq!(kept.len() + held.len(), samples.len());
        let held_configs: Vec<&ConfigPoint> = held.iter().map(|s| s.config()).collect();
        assert!(kept.iter().all(|s| !held_configs.contains(&s.config())));
        // Whole configurations move together: 2 configs x 3 runs.
        assert_eq!(held.len(), 6);

        let (kept2, held2) = carve_holdout(samples.clone(), 2, 7).unwrap();
        assert_eq!(kept, kept2);
        assert_eq!(held, held2);

        assert!(carve_holdout(samples, 6, 7).is_err());
    }

    #[test]
    fn plan_ranges_bound_the_configs() {
        let configs = vec![
            ConfigPoint::mappers_reducers(7, 12),
            ConfigPoint::mappers_reducers(31, 5),
        ];
        assert_eq!(plan_ranges(&configs, "mappers"), (7, 31));
        assert_eq!(plan_ranges(&configs, "reducers"), (5, 12));
    }
}
