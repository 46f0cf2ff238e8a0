//! In-process map/shuffle/reduce engine with wall-clock timing.
//!
//! The engine only schedules: it splits the input, fans the pure map and
//! reduce phases from `mrtime_core::workloads` out over a bounded pool of
//! scoped threads, and merges in a fixed order. Results are bit-identical
//! for every thread interleaving (mapper outputs land in per-mapper slots
//! and are shuffled in mapper order), while the measured wall time of
//! map + shuffle + reduce is whatever the clock says.

use std::collections::BTreeMap;
use std::thread;
use std::time::Instant;

use mrtime_core::eximlog::MessageId;
use mrtime_core::profiling::RunSample;
use mrtime_core::regression::ConfigPoint;
use mrtime_core::workloads::{
    exim_map, group_by_key, merge_counts, shuffle, split_input, wordcount_map, wordcount_reduce,
};

/// Smallest wall time a run reports; coarse clocks must not produce a
/// zero-duration sample.
const MIN_MEASURED_TIME_S: f64 = 1e-9;

/// Errors from job validation and execution.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("job app is '{got}' but this runner executes '{expected}'")]
    WrongApp { expected: &'static str, got: String },
    #[error("job input is empty")]
    EmptyInput,
    #[error("mapper and reducer counts must be at least 1")]
    ZeroTasks,
}

/// One executable job: an app name, its parallelism shape, and input bytes.
#[derive(Debug, Clone)]
pub struct JobSpec {
    app: String,
    mappers: u32,
    reducers: u32,
    input: Vec<u8>,
}

impl JobSpec {
    pub fn new(
        app: impl Into<String>,
        mappers: u32,
        reducers: u32,
        input: Vec<u8>,
    ) -> Result<Self, EngineError> {
        if mappers == 0 || reducers == 0 {
            return Err(EngineError::ZeroTasks);
        }
        if input.is_empty() {
            return Err(EngineError::EmptyInput);
        }
        Ok(JobSpec {
            app: app.into(),
            mappers,
            reducers,
            input,
        })
    }

    pub fn app(&self) -> &str {
        &self.app
    }

    pub fn mappers(&self) -> u32 {
        self.mappers
    }

    pub fn reducers(&self) -> u32 {
        self.reducers
    }

    pub fn input(&self) -> &[u8] {
        &self.input
    }

    fn config(&self) -> ConfigPoint {
        ConfigPoint::mappers_reducers(self.mappers, self.reducers)
    }
}

/// Runs `task(i)` for `i in 0..tasks` on up to `available_parallelism`
/// threads, returning results in task order regardless of scheduling.
fn run_indexed<T, F>(tasks: usize, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(tasks)
        .max(1);
    if workers == 1 {
        return (0..tasks).map(task).collect();
    }
    let mut slots: Vec<Option<T>> = (0..tasks).map(|_| None).collect();
    thread::scope(|scope| {
        let task = &task;
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let mut done = Vec::new();
                    let mut i = w;
                    while i < tasks {
                        done.push((i, task(i)));
                        i += workers;
                    }
                    done
                })
            })
            .collect();
        for handle in handles {
            for (i, value) in handle.join().expect("worker thread panicked") {
                slots[i] = Some(value);
            }
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every task index ran"))
        .collect()
}

fn timing_sample(config: ConfigPoint, started: Instant) -> RunSample {
    let elapsed = started.elapsed().as_secs_f64().max(MIN_MEASURED_TIME_S);
    RunSample::new(config, 0, elapsed).expect("elapsed time is positive and finite")
}

/// A finished word-count job.
#[derive(Debug, Clone)]
pub struct WordCountRun {
    /// Word → occurrence count over the whole input.
    pub counts: BTreeMap<Vec<u8>, u64>,
    /// Wall time of map + shuffle + reduce, with `run_index` 0.
    pub timing: RunSample,
}

/// Runs the word-count job: tokenize chunks, partition by word hash, sum
/// per reducer, merge.
pub fn run_wordcount(spec: &JobSpec) -> Result<WordCountRun, EngineError> {
    if spec.app() != "wordcount" {
        return Err(EngineError::WrongApp {
            expected: "wordcount",
            got: spec.app.clone(),
        });
    }
    let chunks = split_input(&spec.input, spec.mappers);
    let started = Instant::now();
    let mapper_outputs = run_indexed(chunks.len(), |i| wordcount_map(chunks[i]));
    let partitions = shuffle(mapper_outputs, spec.reducers);
    let reduced = run_indexed(partitions.len(), |i| wordcount_reduce(&partitions[i]));
    let counts = merge_counts(reduced);
    let timing = timing_sample(spec.config(), started);
    Ok(WordCountRun { counts, timing })
}

/// A finished mainlog-parsing job.
#[derive(Debug, Clone)]
pub struct EximRun {
    /// Transaction ID → its raw lines in file order.
    pub transactions: BTreeMap<MessageId, Vec<Vec<u8>>>,
    /// Input lines that carried no message ID.
    pub skipped_lines: usize,
    /// Wall time of map + shuffle + reduce, with `run_index` 0.
    pub timing: RunSample,
}

/// Runs the mainlog-parsing job: parse chunks, partition by ID hash, group
/// per reducer, merge.
pub fn run_exim_job(spec: &JobSpec) -> Result<EximRun, EngineError> {
    if spec.app() != "eximparse" {
        return Err(EngineError::WrongApp {
            expected: "eximparse",
            got: spec.app.clone(),
        });
    }
    let chunks = split_input(&spec.input, spec.mappers);
    let started = Instant::now();
    let mapper_outputs = run_indexed(chunks.len(), |i| exim_map(chunks[i]));
    let mut skipped_lines = 0;
    let mut pair_lists = Vec::with_capacity(mapper_outputs.len());
    for (pairs, skipped) in mapper_outputs {
        skipped_lines += skipped;
        pair_lists.push(pairs);
    }
    let partitions = shuffle(pair_lists, spec.reducers);
    let grouped = run_indexed(partitions.len(), |i| group_by_key(partitions[i].clone()));
    let mut transactions = BTreeMap::new();
    for partition_groups in grouped {
        for (key, lines) in partition_groups {
            let id = MessageId::parse(&key).expect("the map phase emits valid message IDs");
            transactions.insert(id, lines);
        }
    }
    let timing = timing_sample(spec.config(), started);
    Ok(EximRun {
        transactions,
        skipped_lines,
        timing,
    })
}
