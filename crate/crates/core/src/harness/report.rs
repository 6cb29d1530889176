use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::degree::{assumption_diagnostics, make_family, AssumptionReport, DegreeSequence};

use super::config::{ExperimentConfig, OutputFormat};
use super::{EsdReport, GapReport, HarnessError, MomentsReport, SweepReport};

const TOLERANCE_NOTE: &str =
    "finite-n tolerances used to judge these numbers are acceptance choices; the closed forms are leading-order limits";

/// The degree sequence an experiment ran on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceInfo {
    pub n: usize,
    pub family: String,
    pub parity_adjusted: bool,
    pub m0: u64,
    pub m_inf: u64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub assumptions: AssumptionReport,
}

impl SequenceInfo {
    pub(crate) fn new(seq: &DegreeSequence, family: String, parity_adjusted: bool) -> Self {
        Self {
            n: seq.len(),
            family,
            parity_adjusted,
            m0: seq.m0(),
            m_inf: seq.m_inf(),
            m1: seq.moment_f64(1),
            m2: seq.moment_f64(2),
            m3: seq.moment_f64(3),
            assumptions: assumption_diagnostics(seq),
        }
    }
}

/// Enough to rerun the experiment: configuration, seed, code version and
/// the sequences with their regime diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub experiment: String,
    pub version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub sequences: Vec<SequenceInfo>,
    pub notes: Vec<String>,
}

impl ReportMeta {
    pub(crate) fn new(cfg: &ExperimentConfig, sequences: Vec<SequenceInfo>) -> Self {
        Self {
            experiment: cfg.experiment.to_string(),
            version: crate::VERSION.to_string(),
            seed: cfg.seed,
            config: cfg.clone(),
            sequences,
            notes: vec![TOLERANCE_NOTE.to_string()],
        }
    }
}

/// Degree sequence of size `n` for `cfg`, plus its description.
pub(crate) fn sequence_for(cfg: &ExperimentConfig, n: usize) -> Result<(DegreeSequence, SequenceInfo), HarnessError> {
    let sample = make_family(&cfg.family, n, cfg.seed)?;
    let label = cfg.family.resolve(n)?.label();
    let info = SequenceInfo::new(&sample.sequence, label, sample.parity_adjusted);
    Ok((sample.sequence, info))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "lowercase")]
pub enum Report {
    Gap(GapReport),
    Sweep(SweepReport),
    Esd(EsdReport),
    Moments(MomentsReport),
}

impl Report {
    pub fn meta(&self) -> &ReportMeta {
        match self {
            Report::Gap(r) => &r.meta,
            Report::Sweep(r) => &r.meta,
            Report::Esd(r) => &r.meta,
            Report::Moments(r) => &r.meta,
        }
    }

    /// Per-replicate table (per-bin for the ESD experiment).
    pub fn to_csv(&self) -> Result<String, HarnessError> {
        match self {
            Report::Gap(r) => rows_to_csv(&r.rows),
            Report::Sweep(r) => rows_to_csv(&r.rows),
            Report::Esd(r) => Ok(r.histogram.to_csv()),
            Report::Moments(r) => rows_to_csv(&r.rows),
        }
    }

    /// Everything except the per-replicate rows.
    pub fn summary_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = value.as_object_mut() {
            obj.remove("rows");
        }
        serde_json::to_string_pretty(&value).expect("value serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::Io(std::io::Error::other(e)))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes `report` under `out` (created if missing) or to `stdout`.
///
/// CSV format writes `<experiment>.csv` plus `<experiment>_summary.json`;
/// JSON format writes the whole report as `<experiment>.json`. Without a
/// directory, the CSV table or the JSON report goes to `stdout`. Returns the
/// files written.
pub fn write_report(
    report: &Report,
    format: OutputFormat,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<Vec<PathBuf>, HarnessError> {
    let name = report.meta().experiment.clone();
    let Some(dir) = out else {
        match format {
            OutputFormat::Csv => stdout.write_all(report.to_csv()?.as_bytes())?,
            OutputFormat::Json => writeln!(stdout, "{}", report.to_json())?,
        }
        return Ok(Vec::new());
    };
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    match format {
        OutputFormat::Csv => {
            let table = dir.join(format!("{name}.csv"));
            fs::write(&table, report.to_csv()?)?;
            written.push(table);
            let summary = dir.join(format!("{name}_summary.json"));
            fs::write(&summary, report.summary_json())?;
            written.push(summary);
            if let Report::Esd(r) = report {
                let overlay = dir.join("esd_reference.csv");
                fs::write(&overlay, r.overlay_csv())?;
                written.push(overlay);
            }
        }
        OutputFormat::Json => {
            let path = dir.join(format!("{name}.json"));
            fs::write(&path, report.to_json())?;
            written.push(path);
        }
    }
    Ok(written)
}
