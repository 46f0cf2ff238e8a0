//! Experiment planning and aggregation.
//!
//! A profiling campaign samples configuration points from an integer
//! lattice, runs each one several times (five by default, to smooth out
//! temporal noise), and collapses the repeats into one record per
//! configuration. The grid sampler and the aggregator live here and are
//! pure; the run loop itself needs a clock and lives in the companion crate.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::regression::{ConfigPoint, ExperimentRecord, RegressionError};
use crate::rng::SplitMix64;

/// Errors from plan construction, grid generation, and aggregation.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfilingError {
    /// A parameter range with `min < 1` or `max < min`.
    InvalidRange { name: String, min: u32, max: u32 },
    /// The same parameter name appears twice in the range list.
    DuplicateParameterName(String),
    /// Grid generation needs at least one parameter range.
    NoParameters,
    /// Requested zero configurations.
    ZeroCount,
    /// More configurations requested than the lattice holds.
    CountExceedsLattice { count: usize, lattice: u128 },
    /// A plan needs at least one configuration.
    EmptyPlan,
    /// The same configuration appears twice in a plan.
    DuplicateConfig(ConfigPoint),
    /// Plans must run each configuration at least once.
    ZeroRepeats,
    /// An operation that needs samples received none.
    EmptyInput,
    /// Invalid configuration or record contents.
    Record(RegressionError),
}

impl fmt::Display for ProfilingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfilingError::InvalidRange { name, min, max } => {
                write!(
                    f,
                    "invalid range {min}..={max} for parameter '{name}' (need 1 <= min <= max)"
                )
            }
            ProfilingError::DuplicateParameterName(name) => {
                write!(f, "duplicate parameter name '{name}'")
            }
            ProfilingError::NoParameters => write!(f, "no parameter ranges supplied"),
            ProfilingError::ZeroCount => write!(f, "configuration count must be at least 1"),
            ProfilingError::CountExceedsLattice { count, lattice } => {
                write!(f, "cannot draw {count} distinct configurations from a lattice of {lattice} points")
            }
            ProfilingError::EmptyPlan => write!(f, "plan has no configurations"),
            ProfilingError::DuplicateConfig(config) => {
                write!(f, "duplicate configuration {config} in plan")
            }
            ProfilingError::ZeroRepeats => write!(f, "repeats must be at least 1"),
            ProfilingError::EmptyInput => write!(f, "no samples supplied"),
            ProfilingError::Record(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ProfilingError {}

impl From<RegressionError> for ProfilingError {
    fn from(e: RegressionError) -> Self {
        ProfilingError::Record(e)
    }
}

/// A profiling campaign: which app, which configurations, how many repeats.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    app: String,
    configs: Vec<ConfigPoint>,
    repeats: u32,
    seed: u64,
}

impl ExperimentPlan {
    pub fn new(
        app: impl Into<String>,
        configs: Vec<ConfigPoint>,
        repeats: u32,
        seed: u64,
    ) -> Result<Self, ProfilingError> {
        if configs.is_empty() {
            return Err(ProfilingError::EmptyPlan);
        }
        if repeats == 0 {
            return Err(ProfilingError::ZeroRepeats);
        }
        for (i, c) in configs.iter().enumerate() {
            if configs[..i].contains(c) {
                return Err(ProfilingError::DuplicateConfig(c.clone()));
            }
        }
        Ok(ExperimentPlan {
            app: app.into(),
            configs,
            repeats,
            seed,
        })
    }

    pub fn app(&self) -> &str {
        &self.app
    }

    pub fn configs(&self) -> &[ConfigPoint] {
        &self.configs
    }

    pub fn repeats(&self) -> u32 {
        self.repeats
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// One timed run of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSample {
    config: ConfigPoint,
    run_index: u32,
    exec_time_s: f64,
}

impl RunSample {
    pub fn new(
        config: ConfigPoint,
        run_index: u32,
        exec_time_s: f64,
    ) -> Result<Self, ProfilingError> {
        if !(exec_time_s.is_finite() && exec_time_s > 0.0) {
            return Err(ProfilingError::Record(RegressionError::NonPositiveTime));
        }
        Ok(RunSample {
            config,
            run_index,
            exec_time_s,
        })
    }

    pub fn config(&self) -> &ConfigPoint {
        &self.config
    }

    pub fn run_index(&self) -> u32 {
        self.run_index
    }

    pub fn exec_time_s(&self) -> f64 {
        self.exec_time_s
    }
}

/// How repeated runs collapse into one record per configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    /// Arithmetic mean of the repeat times.
    #[default]
    Mean,
    /// Median of the repeat times (mean of the middle two for even counts).
    Median,
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(Aggregation::Mean),
            "median" => Ok(Aggregation::Median),
            other => Err(alloc::format!(
                "unknown aggregation '{other}' (expected mean or median)"
            )),
        }
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Aggregation::Mean => write!(f, "mean"),
            Aggregation::Median => write!(f, "median"),
        }
    }
}

/// Draws `count` distinct configurations uniformly from the integer lattice
/// spanned by `param_ranges` (each entry `(name, min, max)` inclusive).
///
/// Sampling is without replacement: each draw picks every coordinate
/// uniformly via [`SplitMix64::next_below`] and redraws on collision, so the
/// result is reproducible from the seed alone. Points come out in draw order.
pub fn generate_grid(
    param_ranges: &[(String, u32, u32)],
    count: usize,
    seed: u64,
) -> Result<Vec<ConfigPoint>, ProfilingError> {
    if param_ranges.is_empty() {
        return Err(ProfilingError::NoParameters);
    }
    for (i, (name, min, max)) in param_ranges.iter().enumerate() {
        if *min < 1 || *max < *min {
            return Err(ProfilingError::InvalidRange {
                name: name.clone(),
                min: *min,
                max: *max,
            });
        }
        if param_ranges[..i].iter().any(|(other, _, _)| other == name) {
            return Err(ProfilingError::DuplicateParameterName(name.clone()));
        }
    }
    if count == 0 {
        return Err(ProfilingError::ZeroCount);
    }
    let lattice: u128 = param_ranges
        .iter()
        .map(|(_, min, max)| (*max - *min + 1) as u128)
        .product();
    if count as u128 > lattice {
        return Err(ProfilingError::CountExceedsLattice { count, lattice });
    }

    let mut rng = SplitMix64::new(seed);
    let mut chosen: Vec<Vec<u32>> = Vec::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let candidate: Vec<u32> = param_ranges
            .iter()
            .map(|(_, min, max)| min + rng.next_below((*max - *min + 1) as u64) as u32)
            .collect();
        if chosen.contains(&candidate) {
            continue;
        }
        let values = param_ranges
            .iter()
            .zip(&candidate)
            .map(|((name, _, _), v)| (name.clone(), *v))
            .collect();
        points.push(ConfigPoint::new(values)?);
        chosen.push(candidate);
    }
    Ok(points)
}

/// The default campaign shape: mappers and reducers in 5..=40.
pub fn default_ranges() -> Vec<(String, u32, u32)> {
    alloc::vec![
        ("mappers".to_string(), 5, 40),
        ("reducers".to_string(), 5, 40),
    ]
}

/// Collapses run samples into one [`ExperimentRecord`] per distinct
/// configuration, in first-appearance order.
pub fn aggregate_runs(
    app: &str,
    samples: &[RunSample],
    aggregation: Aggregation,
) -> Result<Vec<ExperimentRecord>, ProfilingError> {
    if samples.is_empty() {
        return Err(ProfilingError::EmptyInput);
    }
    let mut order: Vec<&ConfigPoint> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for s in samples {
        match order.iter().position(|c| *c == s.config()) {
            Some(i) => groups[i].push(s.exec_time_s()),
            None => {
                order.push(s.config());
                groups.push(alloc::vec![s.exec_time_s()]);
            }
        }
    }
    let mut records = Vec::with_capacity(order.len());
    for (config, times) in order.into_iter().zip(groups) {
        let value = match aggregation {
            Aggregation::Mean => times.iter().sum::<f64>() / times.len() as f64,
            Aggregation::Median => median(times),
        };
        records.push(ExperimentRecord::new(app, config.clone(), value)?);
    }
    Ok(records)
}

fn median(mut times: Vec<f64>) -> f64 {
    times.sort_by(|a, b| a.partial_cmp(b).expect("sample times are finite"));
    let n = times.len();
    if n % 2 == 1 {
        times[n / 2]
    } else {
        (times[n / 2 - 1] + times[n / 2]) / 2.0
    }
}
