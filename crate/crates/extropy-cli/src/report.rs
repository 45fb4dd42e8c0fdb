//! Output documents: JSON-lines estimate reports and CSV experiment
//! tables, plus atomic file writing.

use std::io::Write;
use std::path::Path;

use extropy_core::harness::{ExperimentReport, TableReproduction};
use extropy_core::inference::InferenceResult;
use extropy_core::EstimateResult;
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One estimate as emitted on standard output, one JSON object per line.
/// Numbers serialize with shortest-round-trip formatting, so every field
/// re-parses to the exact in-memory value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub measure: String,
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    pub method: String,
    pub n: usize,
    pub n_events: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tool_version: String,
}

impl ReportDocument {
    pub fn from_estimate(estimate: &EstimateResult, inference: Option<&InferenceResult>) -> Self {
        ReportDocument {
            measure: estimate.measure.as_str().to_string(),
            estimate: estimate.value,
            std_error: inference.map(|i| i.std_error),
            ci: inference.map(|i| [i.ci_lower, i.ci_upper]),
            level: inference.map(|i| i.level),
            method: estimate.method.as_str().to_string(),
            n: estimate.n_used,
            n_events: estimate.n_events.unwrap_or(estimate.n_used),
            threshold_t: estimate.threshold_t,
            seed: None,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// CSV body for an experiment report: one row per (estimator, n) cell.
pub fn experiment_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("estimator,n,bias,mse,mc_se,skipped\n");
    for cell in &report.cells {
        out.push_str(&format!(
            "{},{},{:.10e},{:.10e},{:.10e},{}\n",
            cell.estimator.as_str(),
            cell.n,
            cell.bias,
            cell.mse,
            cell.mc_se_bias,
            cell.n_degenerate
        ));
    }
    out
}

/// CSV body for a table reproduction: reproduced values next to the
/// printed ones with the agreement flags.
pub fn table_csv(repro: &TableReproduction) -> String {
    let mut out = String::from(
        "distribution,estimator,n,bias,mse,mc_se,skipped,printed_bias,printed_mse,\
         unbiasedness_ok,mse_vs_theory_ok,printed_bias_agrees,printed_mse_agrees,informational_only\n",
    );
    for cell in &repro.cells {
        let opt = |v: Option<bool>| match v {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        out.push_str(&format!(
            "{},{},{},{:.10e},{:.10e},{:.10e},{},{},{},{},{},{},{},{}\n",
            cell.distribution,
            cell.estimator.as_str(),
            cell.n,
            cell.bias,
            cell.mse,
            cell.mc_se_bias,
            cell.n_degenerate,
            cell.printed_bias,
            cell.printed_mse,
            opt(cell.unbiasedness_ok),
            opt(cell.mse_vs_theory_ok),
            cell.printed_bias_agrees,
            cell.printed_mse_agrees,
            cell.informational_only
        ));
    }
    out
}

/// Writes a file atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, content: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = std::env::temp_dir();
    if let Some(dir) = dir {
        tmp = dir.to_path_buf();
    }
    tmp.push(format!(
        ".{}.tmp-{}",
        path.file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into()),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use extropy_core::complete::estimate_cre;
    use extropy_core::sample::Sample;

    #[test]
    fn json_line_round_trips_exactly() {
        let s = Sample::new(vec![0.1234567890123456, 2.0, 3.7]).unwrap();
        let est = estimate_cre(&s).unwrap();
        let doc = ReportDocument::from_estimate(&est, None);
        let line = doc.to_json_line();
        let back: ReportDocument = serde_json::from_str(&line).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.estimate, est.value);
        assert!(!line.contains("std_error"));
    }

    #[test]
    fn atomic_write_replaces_content(
    ) {
        let dir = std::env::temp_dir();
        let path = dir.join(format!("extropy-report-test-{}.json", std::process::id()));
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        std::fs::remove_file(&path).unwrap();
    }
}
