//! Command-line toolkit around `mrtime-core`: run workloads under a wall
//! clock, persist experiment plans, run datasets, models, and reports as
//! plain text files, and tie profiling → fitting → prediction together as
//! subcommands.
//!
//! - [`engine`]: the in-process map/shuffle/reduce engine with timing.
//! - [`runner`]: the workload registry and the sequential profiling loop.
//! - [`files`]: plan, dataset, report, and surface CSV formats.
//! - [`model_file`]: the versioned key-value model format.
//! - [`cli`]: the subcommand implementations behind the `mrtime` binary.

pub mod cli;
pub mod engine;
pub mod files;
pub mod floatfmt;
pub mod model_file;
pub mod runner;
