//! Artifacts on disk: time series CSV, binary snapshots and JSON summaries.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use pcf_core::{DiagnosticsRecord, FieldState, RunSummary};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const TIMESERIES_COLUMNS: [&str; 11] = [
    "t",
    "energy",
    "energy_mod",
    "virial",
    "virial_rhs",
    "window_energy",
    "sup_ltil",
    "min_lambda",
    "continuity_residual",
    "continuity_residual_e",
    "ineq_margin",
];

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// CSV writer with a fixed header; every float is written with [`fmt_f64`].
pub struct CsvTable {
    writer: csv::Writer<BufWriter<File>>,
    path: PathBuf,
}

impl CsvTable {
    pub fn create(path: &Path, header: &[&str]) -> CliResult<Self> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut writer = csv::Writer::from_writer(BufWriter::new(file));
        writer.write_record(header)?;
        Ok(Self {
            writer,
            path: path.to_path_buf(),
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn floats(&mut self, values: &[f64]) -> CliResult<()> {
        self.row(values.iter().map(|v| fmt_f64(*v)))
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

pub struct TimeseriesWriter(CsvTable);

impl TimeseriesWriter {
    pub fn create(path: &Path) -> CliResult<Self> {
        Ok(Self(CsvTable::create(path, &TIMESERIES_COLUMNS)?))
    }

    pub fn write(&mut self, r: &DiagnosticsRecord) -> CliResult<()> {
        self.0.row([
            fmt_f64(r.t),
            fmt_f64(r.energy),
            fmt_opt(r.energy_mod),
            fmt_opt(r.virial),
            fmt_opt(r.virial_rhs),
            fmt_opt(r.window_energy),
            fmt_f64(r.sup_ltil),
            fmt_f64(r.min_lambda),
            fmt_opt(r.continuity_residual),
            fmt_opt(r.continuity_residual_e),
            fmt_f64(r.ineq_margin),
        ])
    }

    pub fn finish(self) -> CliResult<()> {
        self.0.finish()
    }
}

/// Reads a `timeseries.csv` back; empty cells become `None`.
pub fn read_timeseries(path: &Path) -> CliResult<Vec<DiagnosticsRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != TIMESERIES_COLUMNS {
        return Err(CliError::Snapshot {
            path: path.to_path_buf(),
            msg: format!("unexpected header {header:?}"),
        });
    }
    let bad = |msg: String| CliError::Snapshot {
        path: path.to_path_buf(),
        msg,
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let get = |i: usize| -> CliResult<Option<f64>> {
            let s = rec.get(i).unwrap_or("");
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>()
                    .map(Some)
                    .map_err(|e| bad(format!("column {}: {e}", TIMESERIES_COLUMNS[i])))
            }
        };
        let req = |i: usize| -> CliResult<f64> {
            get(i)?.ok_or_else(|| bad(format!("column {} is empty", TIMESERIES_COLUMNS[i])))
        };
        out.push(DiagnosticsRecord {
            t: req(0)?,
            energy: req(1)?,
            energy_mod: get(2)?,
            virial: get(3)?,
            virial_rhs: get(4)?,
            window_energy: get(5)?,
            sup_ltil: req(6)?,
            min_lambda: req(7)?,
            continuity_residual: get(8)?,
            continuity_residual_e: get(9)?,
            ineq_margin: req(10)?,
        });
    }
    Ok(out)
}

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"PCF1";

/// Layout, little-endian: magic `PCF1`, u64 nx, f64 t, f64 lambda_bg, then
/// the arrays ltil, ltil_t, phi, phi_t with nx f64 each.
pub fn write_snapshot(path: &Path, s: &FieldState) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(|e| CliError::io(path, e));
    put(SNAPSHOT_MAGIC)?;
    put(&(s.len() as u64).to_le_bytes())?;
    put(&s.t.to_le_bytes())?;
    put(&s.lambda_bg.to_le_bytes())?;
    for arr in [&s.ltil, &s.ltil_t, &s.phi, &s.phi_t] {
        for v in arr.iter() {
            put(&v.to_le_bytes())?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_snapshot(path: &Path) -> CliResult<FieldState> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut r = BufReader::new(file);
    let bad = |msg: &str| CliError::Snapshot {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    };
    let mut word = [0u8; 8];
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(bad("missing PCF1 magic"));
    }
    let mut next = |r: &mut BufReader<File>| -> CliResult<[u8; 8]> {
        r.read_exact(&mut word).map_err(|_| bad("truncated data"))?;
        Ok(word)
    };
    let nx = u64::from_le_bytes(next(&mut r)?) as usize;
    let t = f64::from_le_bytes(next(&mut r)?);
    let lambda_bg = f64::from_le_bytes(next(&mut r)?);
    let mut arrays: [Vec<f64>; 4] = Default::default();
    for arr in arrays.iter_mut() {
        arr.reserve(nx);
        for _ in 0..nx {
            arr.push(f64::from_le_bytes(next(&mut r)?));
        }
    }
    if r.read(&mut word).map_err(|e| CliError::io(path, e))? != 0 {
        return Err(bad("trailing bytes after the last array"));
    }
    let [ltil, ltil_t, phi, phi_t] = arrays;
    Ok(FieldState::new(t, lambda_bg, ltil, ltil_t, phi, phi_t)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    /// Passes when `value ≤ threshold`.
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold,
            passed: value <= threshold,
            detail: String::new(),
        }
    }

    /// Passes when `value ≥ threshold`.
    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            passed: value >= threshold,
            ..Self::at_most(name, value, threshold)
        }
    }

    /// Passes when `value` lies in `[lo, hi]`; the threshold field holds `lo`.
    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            passed: (lo..=hi).contains(&value),
            detail: format!("range [{lo}, {hi}]"),
            ..Self::at_most(name, value, lo)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub node: usize,
    pub x: f64,
    pub value: f64,
    pub t: f64,
    pub approach_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub termination: String,
    pub steps: usize,
    pub dt: f64,
    pub t_final: f64,
    pub wall_seconds: f64,
    pub min_lambda: f64,
    pub max_sup_ltil: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singularity: Option<SingularityReport>,
}

impl RunReport {
    pub fn new(s: &RunSummary, grid: &pcf_core::Grid) -> Self {
        Self {
            termination: s.termination.as_str().to_string(),
            steps: s.steps,
            dt: s.dt,
            t_final: s.final_state.t,
            wall_seconds: s.wall_seconds,
            min_lambda: s.min_lambda,
            max_sup_ltil: s.max_sup_ltil,
            error: s.error.as_ref().map(|e| e.to_string()),
            singularity: s.singularity.as_ref().map(|i| SingularityReport {
                node: i.node,
                x: grid.x(i.node),
                value: i.value,
                t: i.t,
                approach_rate: if i.approach_rate.is_finite() { i.approach_rate } else { 0.0 },
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    /// `ok`, or the error category that ended the experiment.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunReport>,
    pub checks: Vec<Check>,
    /// Experiment-specific numbers.
    #[serde(default)]
    pub details: serde_json::Map<String, serde_json::Value>,
}

impl Summary {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            status: "ok".to_string(),
            run: None,
            checks: Vec::new(),
            details: Default::default(),
        }
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.details.insert(key.to_string(), v);
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let path = dir.join("summary.json");
        let text = serde_json::to_string_pretty(self)?;
        write_text(&path, &(text + "\n"))
    }
}

pub fn read_summary(path: &Path) -> CliResult<Summary> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(t: f64, e: f64, opt: Option<f64>) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            energy: e,
            energy_mod: opt,
            virial: opt.map(|v| -v),
            virial_rhs: None,
            window_energy: opt,
            sup_ltil: e.abs(),
            min_lambda: 1.0 - e,
            continuity_residual: opt,
            continuity_residual_e: None,
            ineq_margin: e * 1e-3,
        }
    }

    proptest! {
        #[test]
        fn timeseries_round_trips_exactly(
            rows in proptest::collection::vec((-1e6f64..1e6, -1e300f64..1e300, proptest::option::of(-1e-300f64..1e3)), 1..20)
        ) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("ts.csv");
            let recs: Vec<_> = rows.iter().map(|&(t, e, o)| record(t, e, o)).collect();
            let mut w = TimeseriesWriter::create(&path).unwrap();
            for r in &recs {
                w.write(r).unwrap();
            }
            w.finish().unwrap();
            prop_assert_eq!(read_timeseries(&path).unwrap(), recs);
        }
    }

    #[test]
    fn snapshot_round_trips_and_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.pcf");
        let n = 13;
        let s = FieldState::new(
            0.75,
            1.25,
            (0..n).map(|i| i as f64 * 0.1).collect(),
            (0..n).map(|i| -(i as f64)).collect(),
            (0..n).map(|i| (i as f64).sin()).collect(),
            vec![1e-300; n],
        )
        .unwrap();
        write_snapshot(&path, &s).unwrap();
        let bytes = fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"PCF1");
        assert_eq!(bytes.len(), 4 + 24 + 4 * 8 * n);
        assert_eq!(read_snapshot(&path).unwrap(), s);

        fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(read_snapshot(&path).is_err());
        let mut wrong = bytes.clone();
        wrong[3] = b'2';
        fs::write(&path, wrong).unwrap();
        assert!(read_snapshot(&path).is_err());
    }

    #[test]
    fn float_format_has_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
    }
}
