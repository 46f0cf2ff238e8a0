//! Modeling kernel for the dependency between MapReduce configuration
//! parameters (number of mappers, number of reducers) and total execution
//! time.
//!
//! The crate is organized as a pipeline of pure building blocks:
//!
//! - [`linalg`]: minimal dense real-matrix kernel (transpose, multiply,
//!   Householder QR least squares, Jacobi-SVD pseudo-inverse).
//! - [`regression`]: design-matrix construction, per-parameter cubic
//!   polynomial fitting, prediction, and prediction-error statistics.
//! - [`profiling`]: experiment grids over configuration lattices and
//!   aggregation of repeated runs into per-configuration records.
//! - [`workloads`]: the functional halves of the desk-scale workloads:
//!   line-aligned input splitting, word-count and mainlog map/reduce
//!   phases, the shuffle partition function, and a seeded synthetic timer.
//! - [`eximlog`]: Exim mainlog line parser, transaction grouping, and a
//!   deterministic log generator with a ground-truth manifest.
//! - [`rng`]: the pinned pseudo-random generator (SplitMix64) that makes
//!   grids, corpora, and noise streams reproducible.
//!
//! Everything here is deterministic and side-effect free. Wall-clock
//! measurement, threads, file formats, and the command-line surface live in
//! the companion `mrtime` crate; this crate builds without `std` (alloc
//! required) when the default `std` feature is disabled.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod eximlog;
pub mod linalg;
pub mod profiling;
pub mod regression;
pub mod rng;
pub mod workloads;

mod fmath;
