//! The on-disk model format: versioned, line-oriented `key=value` text.
//!
//! ```text
//! mrtime-model v1
//! app=wordcount
//! params=mappers,reducers
//! degree=3
//! coefficients=2.00000000000000000,0.50000000000000000,...
//! trained_from=runs.csv
//! m=20
//! ```
//!
//! Coefficients are written at full precision in the canonical order
//! (α₀, α₁₁..α₁₃, α₂₁..α₂₃, ...), so a load/save cycle is lossless.
//! `trained_from`, `timestamp`, and `m` are optional provenance;
//! `noise_sigma` and `seed` turn a model file into a synthetic-workload
//! truth definition. Unknown keys are rejected: the format is meant to be
//! hand-editable, and a typo should fail loudly rather than be ignored.

use std::fs;
use std::path::Path;

use mrtime_core::linalg::Vector;
use mrtime_core::regression::TimeModel;

use crate::files::FileError;
use crate::floatfmt::format_f64_full;

const VERSION_LINE: &str = "mrtime-model v1";

/// A model plus its optional provenance and synthetic-truth keys.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: TimeModel,
    /// Path of the dataset the model was fitted from.
    pub trained_from: Option<String>,
    /// Free-form creation stamp. Parsed and preserved but never written
    /// automatically: commands stay byte-deterministic for equal inputs.
    pub timestamp: Option<String>,
    /// Number of aggregated experiments behind the fit.
    pub m: Option<usize>,
    /// Noise level when this file defines a synthetic workload truth.
    pub noise_sigma: Option<f64>,
    /// Noise stream seed for the synthetic workload.
    pub seed: Option<u64>,
}

impl ModelFile {
    pub fn new(model: TimeModel) -> Self {
        ModelFile {
            model,
            trained_from: None,
            timestamp: None,
            m: None,
            noise_sigma: None,
            seed: None,
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), FileError> {
        let mut out = String::from(VERSION_LINE);
        out.push('\n');
        out.push_str(&format!("app={}\n", self.model.app()));
        out.push_str(&format!(
            "params={}\n",
            self.model.parameter_names().join(",")
        ));
        out.push_str(&format!("degree={}\n", self.model.degree()));
        let coefficients: Vec<String> = self
            .model
            .coefficients()
            .as_slice()
            .iter()
            .map(|c| format_f64_full(*c))
            .collect();
        out.push_str(&format!("coefficients={}\n", coefficients.join(",")));
        if let Some(trained_from) = &self.trained_from {
            out.push_str(&format!("trained_from={trained_from}\n"));
        }
        if let Some(timestamp) = &self.timestamp {
            out.push_str(&format!("timestamp={timestamp}\n"));
        }
        if let Some(m) = self.m {
            out.push_str(&format!("m={m}\n"));
        }
        if let Some(noise_sigma) = self.noise_sigma {
            out.push_str(&format!("noise_sigma={}\n", format_f64_full(noise_sigma)));
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed={seed}\n"));
        }
        fs::write(path, out).map_err(|source| FileError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<ModelFile, FileError> {
        let parse = |line: usize, reason: String| FileError::Parse {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let contents = fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.to_path_buf(),
            source,
        })?;

        let mut lines = contents
            .split('\n')
            .enumerate()
            .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, line)) if line == VERSION_LINE => {}
            Some((n, line)) => {
                return Err(parse(n, format!("expected '{VERSION_LINE}', got '{line}'")))
            }
            None => return Err(parse(1, format!("empty file, expected '{VERSION_LINE}'"))),
        }

        let mut app = None;
        let mut params: Option<(usize, Vec<String>)> = None;
        let mut degree: Option<u32> = None;
        let mut coefficients: Option<(usize, Vec<f64>)> = None;
        let mut trained_from = None;
        let mut timestamp = None;
        let mut m = None;
        let mut noise_sigma = None;
        let mut seed = None;

        for (n, line) in lines {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse(n, format!("expected key=value, got '{line}'")))?;
            match key {
                "app" => app = Some(value.to_string()),
                "params" => {
                    params = Some((n, value.split(',').map(str::to_string).collect()));
                }
                "degree" => {
                    degree = Some(
                        value
                            .parse()
                            .map_err(|_| parse(n, format!("invalid degree '{value}'")))?,
                    );
                }
                "coefficients" => {
                    let mut parsed = Vec::new();
                    for field in value.split(',') {
                        parsed.push(
                            field
                                .parse::<f64>()
                                .map_err(|_| parse(n, format!("invalid coefficient '{field}'")))?,
                        );
                    }
                    coefficients = Some((n, parsed));
                }
                "trained_from" => trained_from = Some(value.to_string()),
                "timestamp" => timestamp = Some(value.to_string()),
                "m" => {
                    m =
                        Some(value.parse().map_err(|_| {
                            parse(n, format!("invalid experiment count '{value}'"))
                        })?);
                }
                "noise_sigma" => {
                    noise_sigma = Some(
                        value
                            .parse()
                            .map_err(|_| parse(n, format!("invalid noise sigma '{value}'")))?,
                    );
                }
                "seed" => {
                    seed = Some(
                        value
                            .parse()
                            .map_err(|_| parse(n, format!("invalid seed '{value}'")))?,
                    );
                }
                other => return Err(parse(n, format!("unknown key '{other}'"))),
            }
        }

        let app = app.ok_or_else(|| parse(1, "missing 'app=' line".to_string()))?;
        let (params_line, params) =
            params.ok_or_else(|| parse(1, "missing 'params=' line".to_string()))?;
        let degree = degree.ok_or_else(|| parse(1, "missing 'degree=' line".to_string()))?;
        let (coeff_line, coefficients) =
            coefficients.ok_or_else(|| parse(1, "missing 'coefficients=' line".to_string()))?;

        let coefficients =
            Vector::new(coefficients).map_err(|e| parse(coeff_line, e.to_string()))?;
        let model = TimeModel::new(app, params, degree, coefficients)
            .map_err(|e| parse(params_line.max(coeff_line), e.to_string()))?;
        Ok(ModelFile {
            model,
            trained_from,
            timestamp,
            m,
            noise_sigma,
            seed,
        })
    }
}
