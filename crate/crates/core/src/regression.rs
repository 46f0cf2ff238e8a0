//! Per-parameter polynomial models of execution time.
//!
//! An experiment maps a configuration point `(p_1, ..., p_N)`, here the
//! number of mappers and reducers, to an observed total execution time.
//! The model is linear in its coefficients with one polynomial block per
//! parameter and no cross terms:
//!
//! ```text
//! T(p_1..p_N) = α₀ + Σᵢ ( αᵢ₁ pᵢ + αᵢ₂ pᵢ² + αᵢ₃ pᵢ³ )      (degree 3 shown)
//! ```
//!
//! Fitting stacks one feature row per experiment into a design matrix and
//! solves the least-squares problem by QR. Columns are divided by their
//! max-abs entry before solving (cubic features over mapper counts in the
//! tens reach 64000 and would otherwise wreck the conditioning) and the
//! coefficients are mapped back to the unscaled feature space afterwards.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::fmath;
use crate::linalg::{LinalgError, Matrix, Vector};

/// Errors from model construction, fitting, and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum RegressionError {
    /// A configuration point needs at least one parameter.
    EmptyConfig,
    /// The same parameter name appears twice in one configuration.
    DuplicateParameter(String),
    /// Parameter values must be at least 1.
    ZeroParameterValue(String),
    /// Execution times must be positive and finite.
    NonPositiveTime,
    /// Model degree must be at least 1.
    InvalidDegree,
    /// Coefficient count does not match `1 + degree × N`.
    CoefficientCount { expected: usize, got: usize },
    /// Experiment at `index` names or orders its parameters differently
    /// from the first experiment.
    InconsistentParameters { index: usize },
    /// Fewer experiments than model coefficients.
    InsufficientData { rows: usize, needed: usize },
    /// The named design-matrix column is numerically dependent on the others.
    RankDeficient { column: String },
    /// A configuration's parameter names do not match the model's.
    ParameterMismatch {
        expected: Vec<String>,
        got: Vec<String>,
    },
    /// An operation that needs data received none.
    EmptyInput,
    /// Unexpected failure in the matrix kernel.
    Linalg(LinalgError),
}

impl fmt::Display for RegressionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegressionError::EmptyConfig => write!(f, "configuration has no parameters"),
            RegressionError::DuplicateParameter(name) => {
                write!(f, "duplicate parameter name '{name}'")
            }
            RegressionError::ZeroParameterValue(name) => {
                write!(f, "parameter '{name}' must be at least 1")
            }
            RegressionError::NonPositiveTime => {
                write!(f, "execution time must be positive and finite")
            }
            RegressionError::InvalidDegree => write!(f, "model degree must be at least 1"),
            RegressionError::CoefficientCount { expected, got } => {
                write!(f, "expected {expected} coefficients, got {got}")
            }
            RegressionError::InconsistentParameters { index } => {
                write!(f, "experiment {index} names its parameters differently")
            }
            RegressionError::InsufficientData { rows, needed } => {
                write!(
                    f,
                    "{rows} experiments cannot determine {needed} coefficients"
                )
            }
            RegressionError::RankDeficient { column } => {
                write!(f, "design matrix is rank deficient in column '{column}'")
            }
            RegressionError::ParameterMismatch { expected, got } => {
                write!(
                    f,
                    "parameter mismatch: model has [{}], configuration has [{}]",
                    expected.join(", "),
                    got.join(", ")
                )
            }
            RegressionError::EmptyInput => write!(f, "no experiments supplied"),
            RegressionError::Linalg(e) => write!(f, "linear algebra failure: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RegressionError {}

/// One configuration: an ordered list of named positive-integer parameters.
///
/// Ordering matters: design-matrix columns and coefficient layout follow
/// it, so every configuration in a dataset must list the same names in the
/// same order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConfigPoint {
    values: Vec<(String, u32)>,
}

impl ConfigPoint {
    pub fn new(values: Vec<(String, u32)>) -> Result<Self, RegressionError> {
        if values.is_empty() {
            return Err(RegressionError::EmptyConfig);
        }
        for (i, (name, value)) in values.iter().enumerate() {
            if *value == 0 {
                return Err(RegressionError::ZeroParameterValue(name.clone()));
            }
            if values[..i].iter().any(|(other, _)| other == name) {
                return Err(RegressionError::DuplicateParameter(name.clone()));
            }
        }
        Ok(ConfigPoint { values })
    }

    /// The canonical two-parameter configuration.
    ///
    /// # Panics
    ///
    /// Panics if either count is zero.
    pub fn mappers_reducers(mappers: u32, reducers: u32) -> Self {
        ConfigPoint::new(alloc::vec![
            ("mappers".to_string(), mappers),
            ("reducers".to_string(), reducers),
        ])
        .expect("mapper and reducer counts must be at least 1")
    }

    pub fn values(&self) -> &[(String, u32)] {
        &self.values
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.iter().map(|(name, _)| name.as_str())
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.values.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn names_equal(&self, names: &[String]) -> bool {
        self.values.len() == names.len() && self.values.iter().zip(names).all(|((a, _), b)| a == b)
    }
}

impl fmt::Display for ConfigPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, value)) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{name}={value}")?;
        }
        Ok(())
    }
}

/// One profiled experiment: a configuration and its aggregated execution time.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    app: String,
    config: ConfigPoint,
    exec_time_s: f64,
}

impl ExperimentRecord {
    pub fn new(
        app: impl Into<String>,
        config: ConfigPoint,
        exec_time_s: f64,
    ) -> Result<Self, RegressionError> {
        if !(exec_time_s.is_finite() && exec_time_s > 0.0) {
            return Err(RegressionError::NonPositiveTime);
        }
        Ok(ExperimentRecord {
            app: app.into(),
            config,
            exec_time_s,
        })
    }

    pub fn app(&self) -> &str {
        &self.app
    }

    pub fn config(&self) -> &ConfigPoint {
        &self.config
    }

    pub fn exec_time_s(&self) -> f64 {
        self.exec_time_s
    }
}

/// The feature matrix of a fit, stored already column-scaled.
///
/// Row k is `[1, p₁, p₁², p₁³, ..., p_N, p_N², p_N³]` for experiment k
/// (generalized to the requested degree), with every column divided by its
/// scale divisor. `scale[j]` is the max-abs entry of unscaled column j, so
/// the intercept column keeps divisor 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    matrix: Matrix,
    column_labels: Vec<String>,
    scale: Vec<f64>,
}

impl DesignMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn column_labels(&self) -> &[String] {
        &self.column_labels
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }
}

/// Builds the scaled design matrix and the observation vector.
pub fn build_design_matrix(
    experiments: &[ExperimentRecord],
    degree: u32,
) -> Result<(DesignMatrix, Vector), RegressionError> {
    if degree == 0 {
        return Err(RegressionError::InvalidDegree);
    }
    if experiments.is_empty() {
        return Err(RegressionError::EmptyInput);
    }
    let names: Vec<String> = experiments[0]
        .config()
        .names()
        .map(str::to_string)
        .collect();
    for (index, e) in experiments.iter().enumerate() {
        if !e.config().names_equal(&names) {
            return Err(RegressionError::InconsistentParameters { index });
        }
    }

    let rows = experiments.len();
    let cols = 1 + degree as usize * names.len();
    let mut data = Vec::with_capacity(rows * cols);
    let mut times = Vec::with_capacity(rows);
    for e in experiments {
        data.push(1.0);
        for &(_, value) in e.config().values() {
            for d in 1..=degree {
                data.push(fmath::ipow(value as f64, d));
            }
        }
        times.push(e.exec_time_s());
    }

    let mut scale = alloc::vec![0.0f64; cols];
    for (i, x) in data.iter().enumerate() {
        let j = i % cols;
        scale[j] = scale[j].max(if *x < 0.0 { -*x } else { *x });
    }
    for s in &mut scale {
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    for (i, x) in data.iter_mut().enumerate() {
        *x /= scale[i % cols];
    }

    let mut column_labels = Vec::with_capacity(cols);
    column_labels.push("1".to_string());
    for name in &names {
        for d in 1..=degree {
            if d == 1 {
                column_labels.push(name.clone());
            } else {
                column_labels.push(format!("{name}^{d}"));
            }
        }
    }

    let matrix = Matrix::new(rows, cols, data).map_err(RegressionError::Linalg)?;
    let t = Vector::new(times).map_err(RegressionError::Linalg)?;
    Ok((
        DesignMatrix {
            matrix,
            column_labels,
            scale,
        },
        t,
    ))
}

/// A fitted execution-time model.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeModel {
    app: String,
    parameter_names: Vec<String>,
    degree: u32,
    coefficients: Vector,
}

impl TimeModel {
    /// Assembles a model from its parts, checking the coefficient layout
    /// `(α₀, α₁₁..α₁d, ..., α_N1..α_Nd)` against degree and parameter count.
    pub fn new(
        app: impl Into<String>,
        parameter_names: Vec<String>,
        degree: u32,
        coefficients: Vector,
    ) -> Result<Self, RegressionError> {
        if degree == 0 {
            return Err(RegressionError::InvalidDegree);
        }
        if parameter_names.is_empty() {
            return Err(RegressionError::EmptyConfig);
        }
        for (i, name) in parameter_names.iter().enumerate() {
            if parameter_names[..i].contains(name) {
                return Err(RegressionError::DuplicateParameter(name.clone()));
            }
        }
        let expected = 1 + degree as usize * parameter_names.len();
        if coefficients.len() != expected {
            return Err(RegressionError::CoefficientCount {
                expected,
                got: coefficients.len(),
            });
        }
        Ok(TimeModel {
            app: app.into(),
            parameter_names,
            degree,
            coefficients,
        })
    }

    pub fn app(&self) -> &str {
        &self.app
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.parameter_names
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coefficients(&self) -> &Vector {
        &self.coefficients
    }

    /// Evaluates `α₀ + Σᵢ Σ_d α_id pᵢᵈ` at a configuration.
    pub fn predict(&self, config: &ConfigPoint) -> Result<f64, RegressionError> {
        if !config.names_equal(&self.parameter_names) {
            return Err(RegressionError::ParameterMismatch {
                expected: self.parameter_names.clone(),
                got: config.names().map(str::to_string).collect(),
            });
        }
        let c = self.coefficients.as_slice();
        let mut acc = c[0];
        let mut idx = 1;
        for &(_, value) in config.values() {
            for d in 1..=self.degree {
                acc += c[idx] * fmath::ipow(value as f64, d);
                idx += 1;
            }
        }
        Ok(acc)
    }

    /// Least-squares error over a set of experiments: the square root of the
    /// sum of squared residuals between observed and predicted times.
    pub fn lse(&self, experiments: &[ExperimentRecord]) -> Result<f64, RegressionError> {
        let mut sum_sq = 0.0;
        for e in experiments {
            let r = e.exec_time_s() - self.predict(e.config())?;
            sum_sq += r * r;
        }
        Ok(fmath::sqrt(sum_sq))
    }

    /// Per-experiment percent errors plus their mean and population variance.
    pub fn error_stats(
        &self,
        experiments: &[ExperimentRecord],
    ) -> Result<ErrorReport, RegressionError> {
        if experiments.is_empty() {
            return Err(RegressionError::EmptyInput);
        }
        let mut rows = Vec::with_capacity(experiments.len());
        // Welford accumulation; the report invariants (mean is the arithmetic
        // mean, variance divides by M) hold up to rounding.
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for (k, e) in experiments.iter().enumerate() {
            let actual = e.exec_time_s();
            let predicted = self.predict(e.config())?;
            let diff = if actual >= predicted {
                actual - predicted
            } else {
                predicted - actual
            };
            let pct_error = 100.0 * diff / actual;
            let delta = pct_error - mean;
            mean += delta / (k + 1) as f64;
            m2 += delta * (pct_error - mean);
            rows.push(ErrorRow {
                config: e.config().clone(),
                actual_s: actual,
                predicted_s: predicted,
                pct_error,
            });
        }
        let variance = m2 / experiments.len() as f64;
        Ok(ErrorReport {
            rows,
            mean_pct: mean,
            variance_pct: variance,
        })
    }
}

/// Fits a degree-`degree` model to pre-aggregated experiments.
///
/// Needs at least as many experiments as coefficients; configurations that
/// do not spread each parameter over enough distinct values surface as
/// [`RegressionError::RankDeficient`] with the offending column label.
pub fn fit(experiments: &[ExperimentRecord], degree: u32) -> Result<TimeModel, RegressionError> {
    if degree == 0 {
        return Err(RegressionError::InvalidDegree);
    }
    if experiments.is_empty() {
        return Err(RegressionError::EmptyInput);
    }
    let needed = 1 + degree as usize * experiments[0].config().len();
    if experiments.len() < needed {
        return Err(RegressionError::InsufficientData {
            rows: experiments.len(),
            needed,
        });
    }

    let (design, t) = build_design_matrix(experiments, degree)?;
    let scaled = design
        .matrix()
        .solve_least_squares(&t)
        .map_err(|e| match e {
            LinalgError::RankDeficient { column } => RegressionError::RankDeficient {
                column: design.column_labels()[column].clone(),
            },
            other => RegressionError::Linalg(other),
        })?;

    // Solving the scaled system yields diag(scale)·A; divide back out.
    let unscaled: Vec<f64> = scaled
        .as_slice()
        .iter()
        .zip(design.scale())
        .map(|(a, s)| a / s)
        .collect();
    let coefficients = Vector::new(unscaled).map_err(RegressionError::Linalg)?;

    let names: Vec<String> = experiments[0]
        .config()
        .names()
        .map(str::to_string)
        .collect();
    TimeModel::new(experiments[0].app(), names, degree, coefficients)
}

/// One evaluated configuration in an [`ErrorReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub config: ConfigPoint,
    pub actual_s: f64,
    pub predicted_s: f64,
    /// `100 · |actual − predicted| / actual`.
    pub pct_error: f64,
}

/// Prediction-error rows plus summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    rows: Vec<ErrorRow>,
    mean_pct: f64,
    variance_pct: f64,
}

impl ErrorReport {
    pub fn rows(&self) -> &[ErrorRow] {
        &self.rows
    }

    pub fn mean_pct(&self) -> f64 {
        self.mean_pct
    }

    /// Population variance (divides by the row count) of the percent errors.
    pub fn variance_pct(&self) -> f64 {
        self.variance_pct
    }
}
