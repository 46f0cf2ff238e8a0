//! Functional halves of the desk-scale workloads.
//!
//! A job runs as split → map → shuffle → reduce. Everything in this module
//! is a pure function over bytes, which is what makes job outputs
//! bit-identical no matter how the phases are scheduled: the engine (in the
//! companion crate) only decides *when* these run and measures how long the
//! whole thing took.
//!
//! Two map/reduce pairs are provided, word counting and mainlog
//! transaction grouping, plus the shuffle partitioner (FNV-1a 64 mod
//! reducer count, pinned so partition contents are reproducible) and a
//! seeded synthetic timer that stands in for a real cluster when the
//! pipeline itself is under test.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::eximlog;
use crate::fmath;
use crate::linalg::Vector;
use crate::regression::ConfigPoint;
use crate::rng::{derive_seed, SplitMix64};

/// Errors from synthetic-truth construction.
#[derive(Debug, Clone, PartialEq)]
pub enum WorkloadError {
    /// The truth polynomial takes `1 + 3 × 2` coefficients.
    CoefficientCount { expected: usize, got: usize },
    /// Noise sigma must be finite and non-negative.
    InvalidNoiseSigma(f64),
    /// A validation range with `min < 1` or `max < min`.
    InvalidRange { min: u32, max: u32 },
    /// The truth polynomial is not positive everywhere on the lattice.
    NonPositiveTruth {
        mappers: u32,
        reducers: u32,
        value: f64,
    },
}

impl fmt::Display for WorkloadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkloadError::CoefficientCount { expected, got } => {
                write!(f, "expected {expected} truth coefficients, got {got}")
            }
            WorkloadError::InvalidNoiseSigma(sigma) => {
                write!(
                    f,
                    "noise sigma must be finite and non-negative, got {sigma}"
                )
            }
            WorkloadError::InvalidRange { min, max } => {
                write!(f, "invalid range {min}..={max} (need 1 <= min <= max)")
            }
            WorkloadError::NonPositiveTruth {
                mappers,
                reducers,
                value,
            } => {
                write!(
                    f,
                    "truth polynomial is {value} at mappers={mappers},reducers={reducers}; \
                     execution times must stay positive over the whole lattice"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for WorkloadError {}

/// One key-value pair flowing from mappers to reducers.
///
/// Keys are non-empty by construction in both map phases here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyValue {
    pub key: Vec<u8>,
    pub value: Vec<u8>,
}

/// Splits input into exactly `mappers` line-aligned chunks.
///
/// Lines are distributed as evenly as possible (the first `lines % mappers`
/// chunks get one extra); trailing chunks are empty when there are fewer
/// lines than mappers. No line crosses a chunk boundary, and the
/// concatenation of the chunks is the input, byte for byte.
pub fn split_input(input: &[u8], mappers: u32) -> Vec<&[u8]> {
    assert!(mappers >= 1, "at least one mapper required");
    // Line starts: offset 0 plus every byte after an LF, except a trailing one.
    let mut starts = Vec::new();
    if !input.is_empty() {
        starts.push(0);
        for (i, b) in input.iter().enumerate() {
            if *b == b'\n' && i + 1 < input.len() {
                starts.push(i + 1);
            }
        }
    }
    let lines = starts.len();
    let mappers = mappers as usize;
    let base = lines / mappers;
    let extra = lines % mappers;
    let mut chunks = Vec::with_capacity(mappers);
    let mut line = 0;
    for i in 0..mappers {
        let take = base + usize::from(i < extra);
        let begin = if line < lines {
            starts[line]
        } else {
            input.len()
        };
        let end = if line + take < lines {
            starts[line + take]
        } else {
            input.len()
        };
        chunks.push(&input[begin..end]);
        line += take;
    }
    chunks
}

/// FNV-1a 64-bit hash (offset basis `0xcbf29ce484222325`, prime
/// `0x100000001b3`). Pinned as the shuffle hash so partition contents are
/// reproducible across implementations.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Reducer partition for a key: `fnv1a64(key) mod reducers`.
pub fn partition(key: &[u8], reducers: u32) -> u32 {
    assert!(reducers >= 1, "at least one reducer required");
    (fnv1a64(key) % reducers as u64) as u32
}

/// Routes mapper outputs to reducer partitions.
///
/// Pairs are consumed in mapper order and appended in that order, so each
/// partition's contents preserve the global (mapper, position) order no
/// matter how the map phase was scheduled.
pub fn shuffle(mapper_outputs: Vec<Vec<KeyValue>>, reducers: u32) -> Vec<Vec<KeyValue>> {
    let mut partitions: Vec<Vec<KeyValue>> = (0..reducers).map(|_| Vec::new()).collect();
    for output in mapper_outputs {
        for kv in output {
            let p = partition(&kv.key, reducers) as usize;
            partitions[p].push(kv);
        }
    }
    partitions
}

/// Word-count map phase: one `(word, "1")` pair per token, where a token is
/// a maximal run of non-whitespace bytes (ASCII whitespace, bytes kept
/// verbatim: no case folding, no punctuation stripping).
pub fn wordcount_map(chunk: &[u8]) -> Vec<KeyValue> {
    let mut pairs = Vec::new();
    let mut token_start = None;
    for (i, b) in chunk.iter().enumerate() {
        if b.is_ascii_whitespace() {
            if let Some(start) = token_start.take() {
                pairs.push(KeyValue {
                    key: chunk[start..i].to_vec(),
                    value: b"1".to_vec(),
                });
            }
        } else if token_start.is_none() {
            token_start = Some(i);
        }
    }
    if let Some(start) = token_start {
        pairs.push(KeyValue {
            key: chunk[start..].to_vec(),
            value: b"1".to_vec(),
        });
    }
    pairs
}

/// Word-count reduce phase: sums the pairs of each word in one partition.
pub fn wordcount_reduce(pairs: &[KeyValue]) -> BTreeMap<Vec<u8>, u64> {
    let mut counts = BTreeMap::new();
    for kv in pairs {
        *counts.entry(kv.key.clone()).or_insert(0) += 1;
    }
    counts
}

/// Merges disjoint per-reducer counts into one map.
pub fn merge_counts(per_reducer: Vec<BTreeMap<Vec<u8>, u64>>) -> BTreeMap<Vec<u8>, u64> {
    let mut merged = BTreeMap::new();
    for counts in per_reducer {
        for (word, n) in counts {
            *merged.entry(word).or_insert(0) += n;
        }
    }
    merged
}

/// Mainlog-parsing map phase: one `(message id, raw line)` pair per
/// ID-bearing line, plus the count of lines that carried no ID.
pub fn exim_map(chunk: &[u8]) -> (Vec<KeyValue>, usize) {
    let mut pairs = Vec::new();
    let mut skipped = 0;
    for line in eximlog::parse_log(chunk) {
        match line.message_id() {
            Some(id) => pairs.push(KeyValue {
                key: id.as_bytes().to_vec(),
                value: line.raw().to_vec(),
            }),
            None => skipped += 1,
        }
    }
    (pairs, skipped)
}

/// Groups one partition's pairs by key, preserving arrival order within
/// each key and first-appearance order across keys. The reduce phase of the
/// mainlog-parsing job: with an order-preserving shuffle, arrival order is
/// file order.
pub fn group_by_key(pairs: Vec<KeyValue>) -> Vec<(Vec<u8>, Vec<Vec<u8>>)> {
    let mut order: Vec<Vec<u8>> = Vec::new();
    let mut index: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    let mut groups: Vec<Vec<Vec<u8>>> = Vec::new();
    for kv in pairs {
        match index.get(&kv.key) {
            Some(&i) => groups[i].push(kv.value),
            None => {
                index.insert(kv.key.clone(), groups.len());
                order.push(kv.key);
                groups.push(alloc::vec![kv.value]);
            }
        }
    }
    order.into_iter().zip(groups).collect()
}

/// Smallest time the synthetic timer reports, in seconds. Noise draws are
/// clamped here so sampled times stay positive.
pub const MIN_SYNTHETIC_TIME_S: f64 = 1e-9;

/// A known cubic truth polynomial over (mappers, reducers) plus seeded
/// Gaussian noise: the stand-in for a real cluster that lets the whole
/// profile → fit → predict pipeline be verified against exact ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTruth {
    coefficients: Vector,
    noise_sigma: f64,
    seed: u64,
}

impl SyntheticTruth {
    /// Builds a truth model and validates that the polynomial is positive at
    /// every point of the lattice spanned by `mapper_range × reducer_range`
    /// (both inclusive). Coefficients use the canonical layout
    /// `(α₀, α₁₁, α₁₂, α₁₃, α₂₁, α₂₂, α₂₃)` over (mappers, reducers).
    pub fn new(
        coefficients: Vector,
        noise_sigma: f64,
        seed: u64,
        mapper_range: (u32, u32),
        reducer_range: (u32, u32),
    ) -> Result<Self, WorkloadError> {
        if coefficients.len() != 7 {
            return Err(WorkloadError::CoefficientCount {
                expected: 7,
                got: coefficients.len(),
            });
        }
        if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
            return Err(WorkloadError::InvalidNoiseSigma(noise_sigma));
        }
        for (min, max) in [mapper_range, reducer_range] {
            if min < 1 || max < min {
                return Err(WorkloadError::InvalidRange { min, max });
            }
        }
        let truth = SyntheticTruth {
            coefficients,
            noise_sigma,
            seed,
        };
        for mappers in mapper_range.0..=mapper_range.1 {
            for reducers in reducer_range.0..=reducer_range.1 {
                let value = truth.truth_value(mappers, reducers);
                if value <= 0.0 {
                    return Err(WorkloadError::NonPositiveTruth {
                        mappers,
                        reducers,
                        value,
                    });
                }
            }
        }
        Ok(truth)
    }

    pub fn coefficients(&self) -> &Vector {
        &self.coefficients
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Noise-free polynomial value at a configuration.
    pub fn truth_value(&self, mappers: u32, reducers: u32) -> f64 {
        let c = self.coefficients.as_slice();
        let mut acc = c[0];
        for d in 1..=3u32 {
            acc += c[d as usize] * fmath::ipow(mappers as f64, d);
            acc += c[3 + d as usize] * fmath::ipow(reducers as f64, d);
        }
        acc
    }

    /// Synthetic execution time for one run: the truth value plus one
    /// Gaussian draw of standard deviation `noise_sigma` from a stream keyed
    /// by `(seed, mappers, reducers, run_index)`, clamped positive. With
    /// zero sigma this is exactly the polynomial value.
    ///
    /// # Panics
    ///
    /// Panics if `config` does not carry exactly (mappers, reducers).
    pub fn synthetic_time(&self, config: &ConfigPoint, run_index: u32) -> f64 {
        let (mappers, reducers) = match (config.get("mappers"), config.get("reducers")) {
            (Some(m), Some(r)) if config.len() == 2 => (m, r),
            _ => panic!("synthetic timer requires a (mappers, reducers) configuration"),
        };
        let mut value = self.truth_value(mappers, reducers);
        if self.noise_sigma > 0.0 {
            let stream = derive_seed(
                self.seed,
                &[mappers as u64, reducers as u64, run_index as u64],
            );
            value += SplitMix64::new(stream).next_gaussian() * self.noise_sigma;
        }
        value.max(MIN_SYNTHETIC_TIME_S)
    }
}
