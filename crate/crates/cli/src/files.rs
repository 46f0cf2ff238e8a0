//! Plan, dataset, report, and surface files: plain UTF-8 CSV with LF line
//! endings.
//!
//! - plan: `mappers,reducers`, one configuration per row.
//! - dataset: `app,mappers,reducers,run,exec_time_s`, one timed run per
//!   row, times at full precision.
//! - report: `mappers,reducers,actual_s,predicted_s,pct_error` rows followed
//!   by `# mean_pct=`, `# variance_pct=`, and `# lse=` comment lines.
//! - surface: `mappers,reducers,predicted_s` over a whole lattice.
//!
//! Readers are strict. A wrong header, wrong field count, or an unparsable
//! field fails with the file and line number; silently coercing a malformed
//! measurement file would poison everything fit from it.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use mrtime_core::profiling::RunSample;
use mrtime_core::regression::{ConfigPoint, ErrorReport};

use crate::floatfmt::format_f64_full;

/// Errors from reading or writing the file formats.
#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{}:{line}: {reason}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("cannot write {}: {reason}", path.display())]
    Invalid { path: PathBuf, reason: String },
    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl FileError {
    fn io(path: &Path, source: io::Error) -> Self {
        FileError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn parse(path: &Path, line: usize, reason: impl Into<String>) -> Self {
        FileError::Parse {
            path: path.to_path_buf(),
            line,
            reason: reason.into(),
        }
    }
}

const PLAN_HEADER: &str = "mappers,reducers";
const DATASET_HEADER: &str = "app,mappers,reducers,run,exec_time_s";
const REPORT_HEADER: &str = "mappers,reducers,actual_s,predicted_s,pct_error";
const SURFACE_HEADER: &str = "mappers,reducers,predicted_s";

fn write_file(path: &Path, contents: &str) -> Result<(), FileError> {
    fs::write(path, contents).map_err(|e| FileError::io(path, e))
}

fn read_file(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|e| FileError::io(path, e))
}

// Numbered non-empty lines; a trailing newline does not produce a line.
fn lines(contents: &str) -> impl Iterator<Item = (usize, &str)> {
    contents
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.is_empty())
}

fn expect_header(path: &Path, got: Option<(usize, &str)>, want: &str) -> Result<(), FileError> {
    match got {
        Some((_, line)) if line == want => Ok(()),
        Some((n, line)) => Err(FileError::parse(
            path,
            n,
            format!("expected header '{want}', got '{line}'"),
        )),
        None => Err(FileError::parse(
            path,
            1,
            format!("empty file, expected header '{want}'"),
        )),
    }
}

fn parse_u32(path: &Path, line: usize, field: &str, what: &str) -> Result<u32, FileError> {
    field
        .parse::<u32>()
        .map_err(|_| FileError::parse(path, line, format!("invalid {what} '{field}'")))
}

fn parse_f64(path: &Path, line: usize, field: &str, what: &str) -> Result<f64, FileError> {
    field
        .parse::<f64>()
        .map_err(|_| FileError::parse(path, line, format!("invalid {what} '{field}'")))
}

fn config_from_fields(
    path: &Path,
    line: usize,
    mappers: &str,
    reducers: &str,
) -> Result<ConfigPoint, FileError> {
    let m = parse_u32(path, line, mappers, "mapper count")?;
    let r = parse_u32(path, line, reducers, "reducer count")?;
    if m == 0 || r == 0 {
        return Err(FileError::parse(
            path,
            line,
            "mapper and reducer counts must be at least 1",
        ));
    }
    Ok(ConfigPoint::mappers_reducers(m, r))
}

/// Writes an experiment plan.
pub fn save_plan(path: &Path, configs: &[ConfigPoint]) -> Result<(), FileError> {
    let mut out = String::from(PLAN_HEADER);
    out.push('\n');
    for config in configs {
        let (m, r) = canonical_pair(path, config)?;
        out.push_str(&format!("{m},{r}\n"));
    }
    write_file(path, &out)
}

/// Reads an experiment plan. A header-only file is an empty plan.
pub fn load_plan(path: &Path) -> Result<Vec<ConfigPoint>, FileError> {
    let contents = read_file(path)?;
    let mut rows = lines(&contents);
    expect_header(path, rows.next(), PLAN_HEADER)?;
    let mut configs = Vec::new();
    for (n, row) in rows {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 2 {
            return Err(FileError::parse(
                path,
                n,
                format!("expected 2 fields, got {}", fields.len()),
            ));
        }
        configs.push(config_from_fields(path, n, fields[0], fields[1])?);
    }
    Ok(configs)
}

/// A loaded run dataset. All rows of a file share one app name; a
/// header-only file has `app: None` and no samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub app: Option<String>,
    pub samples: Vec<RunSample>,
}

impl Dataset {
    /// The app name, failing on an empty dataset.
    pub fn require_app(&self, path: &Path) -> Result<&str, FileError> {
        self.app.as_deref().ok_or_else(|| {
            FileError::parse(path, 1, "dataset has no rows, cannot determine the app")
        })
    }
}

/// Writes run samples as a dataset file.
pub fn save_dataset(path: &Path, app: &str, samples: &[RunSample]) -> Result<(), FileError> {
    if app.is_empty() || app.contains([',', '\n', '\r']) {
        return Err(FileError::Invalid {
            path: path.to_path_buf(),
            reason: format!("app name '{app}' cannot be stored in a CSV field"),
        });
    }
    let mut out = String::from(DATASET_HEADER);
    out.push('\n');
    for sample in samples {
        let (m, r) = canonical_pair(path, sample.config())?;
        out.push_str(&format!(
            "{app},{m},{r},{},{}\n",
            sample.run_index(),
            format_f64_full(sample.exec_time_s())
        ));
    }
    write_file(path, &out)
}

/// Reads a dataset file, enforcing a single app name across rows.
pub fn load_dataset(path: &Path) -> Result<Dataset, FileError> {
    let contents = read_file(path)?;
    let mut rows = lines(&contents);
    expect_header(path, rows.next(), DATASET_HEADER)?;
    let mut app: Option<String> = None;
    let mut samples = Vec::new();
    for (n, row) in rows {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 5 {
            return Err(FileError::parse(
                path,
                n,
                format!("expected 5 fields, got {}", fields.len()),
            ));
        }
        match &app {
            None => app = Some(fields[0].to_string()),
            Some(existing) if existing != fields[0] => {
                return Err(FileError::parse(
                    path,
                    n,
                    format!(
                        "app '{}' differs from '{existing}'; one app per dataset",
                        fields[0]
                    ),
                ));
            }
            Some(_) => {}
        }
        let config = config_from_fields(path, n, fields[1], fields[2])?;
        let run = parse_u32(path, n, fields[3], "run index")?;
        let time = parse_f64(path, n, fields[4], "execution time")?;
        let sample = RunSample::new(config, run, time)
            .map_err(|e| FileError::parse(path, n, e.to_string()))?;
        samples.push(sample);
    }
    Ok(Dataset { app, samples })
}

/// Writes an evaluation report: per-configuration rows plus the summary
/// comment lines.
pub fn save_report(path: &Path, report: &ErrorReport, lse: f64) -> Result<(), FileError> {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for row in report.rows() {
        let (m, r) = canonical_pair(path, &row.config)?;
        out.push_str(&format!(
            "{m},{r},{},{},{}\n",
            format_f64_full(row.actual_s),
            format_f64_full(row.predicted_s),
            format_f64_full(row.pct_error)
        ));
    }
    out.push_str(&format!(
        "# mean_pct={}\n",
        format_f64_full(report.mean_pct())
    ));
    out.push_str(&format!(
        "# variance_pct={}\n",
        format_f64_full(report.variance_pct())
    ));
    out.push_str(&format!("# lse={}\n", format_f64_full(lse)));
    write_file(path, &out)
}

/// One row of a loaded report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub mappers: u32,
    pub reducers: u32,
    pub actual_s: f64,
    pub predicted_s: f64,
    pub pct_error: f64,
}

/// A report read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedReport {
    pub rows: Vec<ReportRow>,
    pub mean_pct: f64,
    pub variance_pct: f64,
    pub lse: f64,
}

/// Reads an evaluation report, including the summary comments.
pub fn load_report(path: &Path) -> Result<LoadedReport, FileError> {
    let contents = read_file(path)?;
    let mut rows_iter = lines(&contents);
    expect_header(path, rows_iter.next(), REPORT_HEADER)?;
    let mut rows = Vec::new();
    let mut mean_pct = None;
    let mut variance_pct = None;
    let mut lse = None;
    for (n, row) in rows_iter {
        if let Some(comment) = row.strip_prefix('#') {
            let comment = comment.trim();
            let (key, value) = comment.split_once('=').ok_or_else(|| {
                FileError::parse(path, n, format!("malformed summary comment '{row}'"))
            })?;
            let slot = match key {
                "mean_pct" => &mut mean_pct,
                "variance_pct" => &mut variance_pct,
                "lse" => &mut lse,
                other => {
                    return Err(FileError::parse(
                        path,
                        n,
                        format!("unknown summary key '{other}'"),
                    ))
                }
            };
            *slot = Some(parse_f64(path, n, value, key)?);
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 5 {
            return Err(FileError::parse(
                path,
                n,
                format!("expected 5 fields, got {}", fields.len()),
            ));
        }
        rows.push(ReportRow {
            mappers: parse_u32(path, n, fields[0], "mapper count")?,
            reducers: parse_u32(path, n, fields[1], "reducer count")?,
            actual_s: parse_f64(path, n, fields[2], "actual time")?,
            predicted_s: parse_f64(path, n, fields[3], "predicted time")?,
            pct_error: parse_f64(path, n, fields[4], "percent error")?,
        });
    }
    let missing =
        |what: &str| FileError::parse(path, 1, format!("missing summary line '# {what}='"));
    Ok(LoadedReport {
        rows,
        mean_pct: mean_pct.ok_or_else(|| missing("mean_pct"))?,
        variance_pct: variance_pct.ok_or_else(|| missing("variance_pct"))?,
        lse: lse.ok_or_else(|| missing("lse"))?,
    })
}

/// Writes a predicted-time surface over a lattice.
pub fn save_surface(path: &Path, rows: &[(u32, u32, f64)]) -> Result<(), FileError> {
    let mut out = String::from(SURFACE_HEADER);
    out.push('\n');
    for (m, r, predicted) in rows {
        out.push_str(&format!("{m},{r},{}\n", format_f64_full(*predicted)));
    }
    write_file(path, &out)
}

// The CSV formats are fixed to the canonical two-parameter configuration.
fn canonical_pair(path: &Path, config: &ConfigPoint) -> Result<(u32, u32), FileError> {
    match (config.get("mappers"), config.get("reducers")) {
        (Some(m), Some(r)) if config.len() == 2 => Ok((m, r)),
        _ => Err(FileError::Invalid {
            path: path.to_path_buf(),
            reason: format!("configuration '{config}' is not (mappers, reducers)"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mrtime_core::rng::SplitMix64;

    fn temp(name: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        (dir, path)
    }

    #[test]
    fn plan_round_trip() {
        let (_dir, path) = temp("plan.csv");
        let configs = vec![
            ConfigPoint::mappers_reducers(5, 40),
            ConfigPoint::mappers_reducers(17, 8),
        ];
        save_plan(&path, &configs).unwrap();
        assert_eq!(load_plan(&path).unwrap(), configs);
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "mappers,reducers\n5,40\n17,8\n");
    }

    #[test]
    fn plan_header_only_is_empty() {
        let (_dir, path) = temp("plan.csv");
        fs::write(&path, "mappers,reducers\n").unwrap();
        assert!(load_plan(&path).unwrap().is_empty());
    }

    #[test]
    fn plan_rejects_bad_rows() {
        let (_dir, path) = temp("plan.csv");
        fs::write(&path, "mappers,reducers\n5,6\na,b,c\n").unwrap();
        match load_plan(&path).unwrap_err() {
            FileError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other}"),
        }
        fs::write(&path, "wrong,header\n").unwrap();
        assert!(matches!(
            load_plan(&path).unwrap_err(),
            FileError::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = load_plan(Path::new("/nonexistent/plan.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/plan.csv"));
    }

    #[test]
    fn dataset_round_trip_preserves_every_field() {
        let (_dir, path) = temp("runs.csv");
        let mut rng = SplitMix64::new(99);
        let samples: Vec<RunSample> = (0..100)
            .map(|i| {
                let config = ConfigPoint::mappers_reducers(
                    1 + rng.next_below(40) as u32,
                    1 + rng.next_below(40) as u32,
                );
                RunSample::new(config, i % 5, rng.next_f64() * 100.0 + 1e-6).unwrap()
            })
            .collect();
        save_dataset(&path, "wordcount", &samples).unwrap();
        let loaded = load_dataset(&path).unwrap();
        assert_eq!(loaded.app.as_deref(), Some("wordcount"));
        assert_eq!(loaded.samples, samples);
    }

    #[test]
    fn dataset_header_only_is_empty() {
        let (_dir, path) = temp("runs.csv");
        fs::write(&path, "app,mappers,reducers,run,exec_time_s\n").unwrap();
        let loaded = load_dataset(&path).unwrap();
        assert!(loaded.samples.is_empty());
        assert!(loaded.app.is_none());
        assert!(loaded.require_app(&path).is_err());
    }

    #[test]
    fn dataset_parse_error_names_line_three() {
        let (_dir, path) = temp("runs.csv");
        fs::write(
            &path,
            "app,mappers,reducers,run,exec_time_s\nwc,1,1,0,2.0\na,b,c\n",
        )
        .unwrap();
        match load_dataset(&path).unwrap_err() {
            FileError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn dataset_rejects_mixed_apps() {
        let (_dir, path) = temp("runs.csv");
        fs::write(
            &path,
            "app,mappers,reducers,run,exec_time_s\nwc,1,1,0,2.0\nexim,1,2,0,3.0\n",
        )
        .unwrap();
        let err = load_dataset(&path).unwrap_err().to_string();
        assert!(err.contains("one app per dataset"), "{err}");
    }

    #[test]
    fn dataset_rejects_non_positive_times() {
        let (_dir, path) = temp("runs.csv");
        fs::write(
            &path,
            "app,mappers,reducers,run,exec_time_s\nwc,1,1,0,-2.0\n",
        )
        .unwrap();
        assert!(matches!(
            load_dataset(&path).unwrap_err(),
            FileError::Parse { line: 2, .. }
        ));
    }

    #[test]
    fn report_round_trip() {
        use mrtime_core::linalg::Vector;
        use mrtime_core::regression::{ExperimentRecord, TimeModel};

        let model = TimeModel::new(
            "wc",
            vec!["mappers".into(), "reducers".into()],
            1,
            Vector::new(vec![1.0, 0.5, 0.25]).unwrap(),
        )
        .unwrap();
        let records: Vec<ExperimentRecord> = [(4u32, 8u32, 5.1), (9, 2, 6.3)]
            .into_iter()
            .map(|(m, r, t)| {
                ExperimentRecord::new("wc", ConfigPoint::mappers_reducers(m, r), t).unwrap()
            })
            .collect();
        let report = model.error_stats(&records).unwrap();
        let lse = model.lse(&records).unwrap();

        let (_dir, path) = temp("report.csv");
        save_report(&path, &report, lse).unwrap();
        let loaded = load_report(&path).unwrap();
        assert_eq!(loaded.rows.len(), 2);
        assert_eq!(loaded.mean_pct.to_bits(), report.mean_pct().to_bits());
        assert_eq!(
            loaded.variance_pct.to_bits(),
            report.variance_pct().to_bits()
        );
        assert_eq!(loaded.lse.to_bits(), lse.to_bits());
        for (got, want) in loaded.rows.iter().zip(report.rows()) {
            assert_eq!(got.actual_s.to_bits(), want.actual_s.to_bits());
            assert_eq!(got.predicted_s.to_bits(), want.predicted_s.to_bits());
            assert_eq!(got.pct_error.to_bits(), want.pct_error.to_bits());
        }
    }

    #[test]
    fn surface_writer_shape() {
        let (_dir, path) = temp("surface.csv");
        save_surface(&path, &[(5, 5, 1.5), (5, 6, 2.5)]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("mappers,reducers,predicted_s"));
        assert!(lines.next().unwrap().starts_with("5,5,1.5"));
    }

    #[test]
    fn writers_reject_non_canonical_configs() {
        let (_dir, path) = temp("plan.csv");
        let odd = ConfigPoint::new(vec![("nodes".into(), 3)]).unwrap();
        assert!(matches!(
            save_plan(&path, &[odd]).unwrap_err(),
            FileError::Invalid { .. }
        ));
    }
}
