//! Workload registry and the profiling loop.
//!
//! Workloads are addressed by name (`wordcount`, `eximparse`, `synthetic`)
//! and `run_plan` executes every (configuration, repeat) pair strictly
//! sequentially: overlapping runs would contaminate each other's wall-clock
//! measurements. The synthetic workload never touches the clock at all; its
//! "measurement" is the truth polynomial plus seeded noise, which is what
//! makes full-pipeline runs exactly reproducible.

use mrtime_core::profiling::{ExperimentPlan, ProfilingError, RunSample};
use mrtime_core::regression::ConfigPoint;
use mrtime_core::workloads::SyntheticTruth;

use crate::engine::{run_exim_job, run_wordcount, EngineError, JobSpec};

/// Errors from workload resolution and plan execution.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("unknown workload '{0}' (known: wordcount, eximparse, synthetic)")]
    UnknownWorkload(String),
    #[error("workload '{0}' needs an input file")]
    MissingInput(String),
    #[error("the synthetic workload needs a truth model")]
    MissingTruth,
    #[error("plan is for app '{plan}' but the workload is '{workload}'")]
    AppMismatch {
        plan: String,
        workload: &'static str,
    },
    #[error("configuration '{config}' is not (mappers, reducers)")]
    ConfigShape { config: ConfigPoint },
    #[error("workload failed: {0}")]
    Workload(#[from] EngineError),
    #[error(transparent)]
    Profiling(#[from] ProfilingError),
}

/// Ingredients a workload may need beyond its name.
#[derive(Debug, Default)]
pub struct WorkloadOptions {
    /// Input bytes for the wordcount and eximparse jobs.
    pub input: Option<Vec<u8>>,
    /// Ground truth for the synthetic timer.
    pub truth: Option<SyntheticTruth>,
}

/// An executable workload, resolved from the registry.
#[derive(Debug)]
pub enum Workload {
    WordCount { input: Vec<u8> },
    EximParse { input: Vec<u8> },
    Synthetic { truth: SyntheticTruth },
}

impl Workload {
    /// The registered workload names.
    pub const NAMES: [&'static str; 3] = ["wordcount", "eximparse", "synthetic"];

    /// Looks a workload up by name and assembles it from `options`.
    pub fn resolve(name: &str, options: WorkloadOptions) -> Result<Workload, RunError> {
        match name {
            "wordcount" => {
                let input = options
                    .input
                    .ok_or_else(|| RunError::MissingInput(name.into()))?;
                Ok(Workload::WordCount { input })
            }
            "eximparse" => {
                let input = options
                    .input
                    .ok_or_else(|| RunError::MissingInput(name.into()))?;
                Ok(Workload::EximParse { input })
            }
            "synthetic" => {
                let truth = options.truth.ok_or(RunError::MissingTruth)?;
                Ok(Workload::Synthetic { truth })
            }
            other => Err(RunError::UnknownWorkload(other.into())),
        }
    }

    pub fn app_name(&self) -> &'static str {
        match self {
            Workload::WordCount { .. } => "wordcount",
            Workload::EximParse { .. } => "eximparse",
            Workload::Synthetic { .. } => "synthetic",
        }
    }
}

fn canonical_pair(config: &ConfigPoint) -> Result<(u32, u32), RunError> {
    match (config.get("mappers"), config.get("reducers")) {
        (Some(m), Some(r)) if config.len() == 2 => Ok((m, r)),
        _ => Err(RunError::ConfigShape {
            config: config.clone(),
        }),
    }
}

/// Runs every configuration of the plan `repeats` times, in plan order,
/// one run at a time, and returns the samples in execution order.
pub fn run_plan(plan: &ExperimentPlan, workload: &Workload) -> Result<Vec<RunSample>, RunError> {
    if plan.app() != workload.app_name() {
        return Err(RunError::AppMismatch {
            plan: plan.app().to_string(),
            workload: workload.app_name(),
        });
    }
    let mut samples = Vec::with_capacity(plan.configs().len() * plan.repeats() as usize);
    for config in plan.configs() {
        let (mappers, reducers) = canonical_pair(config)?;
        match workload {
            Workload::Synthetic { truth } => {
                for run in 0..plan.repeats() {
                    let time = truth.synthetic_time(config, run);
                    samples.push(RunSample::new(config.clone(), run, time)?);
                }
            }
            Workload::WordCount { input } => {
                let spec = JobSpec::new("wordcount", mappers, reducers, input.clone())?;
                for run in 0..plan.repeats() {
                    let result = run_wordcount(&spec)?;
                    samples.push(RunSample::new(
                        config.clone(),
                        run,
                        result.timing.exec_time_s(),
                    )?);
                }
            }
            Workload::EximParse { input } => {
                let spec = JobSpec::new("eximparse", mappers, reducers, input.clone())?;
                for run in 0..plan.repeats() {
                    let result = run_exim_job(&spec)?;
                    samples.push(RunSample::new(
                        config.clone(),
                        run,
                        result.timing.exec_time_s(),
                    )?);
                }
            }
        }
    }
    Ok(samples)
}
