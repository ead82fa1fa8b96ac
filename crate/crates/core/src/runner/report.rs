//! Report tables (CSV and markdown), per-step score dumps and run manifests.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{MetricReport, ScoreSeries};

use super::config::RunConfig;
use super::protocol::ContinualResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
pub enum Outcome {
    Standard { report: MetricReport },
    Continual { result: ContinualResult },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraResult {
    pub camera_id: String,
    pub outcome: Outcome,
}

/// Everything needed to re-render a report: the configuration and the
/// per-camera results. Serialized as `results.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResults {
    pub config: RunConfig,
    pub cameras: Vec<CameraResult>,
}

impl RunResults {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("results file: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Report row labels, in table order.
fn rows(outcome: &Outcome) -> Vec<(String, &MetricReport)> {
    match outcome {
        Outcome::Standard { report } => vec![("standard".into(), report)],
        Outcome::Continual { result } => {
            let mut out = vec![("baseline".to_string(), &result.baseline)];
            for (i, r) in result.per_step.iter().enumerate() {
                out.push((format!("step_{}", i + 1), r));
            }
            out.push(("normal_training".into(), &result.normal_training));
            out.push(("ucal_average".into(), &result.ucal_average));
            out.push(("ucal_best".into(), &result.ucal_best));
            out
        }
    }
}

/// Two decimals, never printing a negative zero.
fn two(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// `auc_roc, auc_pr, eer, ten_er` as table cells: AUCs in percent, error
/// rates as fractions.
fn cells(r: &MetricReport) -> [String; 4] {
    [two(r.auc_roc * 100.0), two(r.auc_pr * 100.0), two(r.eer), two(r.ten_er)]
}

fn check_nonempty(results: &RunResults) -> Result<()> {
    if results.cameras.is_empty() {
        return Err(Error::InvalidInput("no results to report".into()));
    }
    Ok(())
}

/// One row per camera and context. Contexts are `standard`, or `baseline`,
/// `step_<i>`, `normal_training`, `ucal_average`, `ucal_best`.
pub fn render_csv(results: &RunResults) -> Result<String> {
    check_nonempty(results)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(["camera_id", "context", "auc_roc", "auc_pr", "eer", "ten_er", "n_pos", "n_neg"])
        .map_err(to_err)?;
    for cam in &results.cameras {
        for (ctx, r) in rows(&cam.outcome) {
            let [a, b, c, d] = cells(r);
            w.write_record([
                cam.camera_id.clone(),
                ctx,
                a,
                b,
                c,
                d,
                r.n_pos.to_string(),
                r.n_neg.to_string(),
            ])
            .map_err(to_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

const MD_HEADER: &str = "| Step | AUC-ROC | AUC-PR | EER | 10ER |\n|---|---:|---:|---:|---:|\n";

/// Markdown tables, one per camera. Continual tables list Baseline, steps
/// `1..=k` and Normal Training, then one row carrying UCAL Average and UCAL
/// Best as `average / best` in each cell.
pub fn render_markdown(results: &RunResults) -> Result<String> {
    check_nonempty(results)?;
    let cfg = &results.config;
    let mut out = String::new();
    writeln!(out, "# Anomaly detection report").unwrap();
    for cam in &results.cameras {
        writeln!(out).unwrap();
        match &cam.outcome {
            Outcome::Standard { report } => {
                writeln!(out, "## {} (standard)", cam.camera_id).unwrap();
                writeln!(out).unwrap();
                out.push_str(MD_HEADER);
                let [a, b, c, d] = cells(report);
                writeln!(out, "| Standard | {a} | {b} | {c} | {d} |").unwrap();
            }
            Outcome::Continual { result } => {
                writeln!(out, "## {} (continual, k = {})", cam.camera_id, result.per_step.len()).unwrap();
                writeln!(out).unwrap();
                out.push_str(MD_HEADER);
                let mut row = |label: &str, r: &MetricReport| {
                    let [a, b, c, d] = cells(r);
                    writeln!(out, "| {label} | {a} | {b} | {c} | {d} |").unwrap();
                };
                row("Baseline", &result.baseline);
                for (i, r) in result.per_step.iter().enumerate() {
                    row(&(i + 1).to_string(), r);
                }
                row("Normal Training", &result.normal_training);
                let avg = cells(&result.ucal_average);
                let best = cells(&result.ucal_best);
                writeln!(
                    out,
                    "| UCAL Average / Best | {} / {} | {} / {} | {} / {} | {} / {} |",
                    avg[0], best[0], avg[1], best[1], avg[2], best[2], avg[3], best[3]
                )
                .unwrap();
            }
        }
    }
    writeln!(out).unwrap();
    writeln!(out, "Notes:").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "- AUC-ROC and AUC-PR in percent; EER and 10ER as fractions.").unwrap();
    let smoothing = match cfg.smooth_window {
        Some(w) => format!("then smoothed with a centered {w}-frame window"),
        None => "not smoothed".into(),
    };
    writeln!(
        out,
        "- Track gaps of up to {} frames are interpolated first, {smoothing}.",
        cfg.max_gap
    )
    .unwrap();
    writeln!(
        out,
        "- Windows of {} frames, stride {}; frame scores use the {} over covering windows.",
        cfg.window_length,
        cfg.window_stride,
        match cfg.aggregator {
            crate::metrics::Aggregator::Max => "maximum",
            crate::metrics::Aggregator::Mean => "mean",
        }
    )
    .unwrap();
    writeln!(out, "- Frames covered by no window receive the lowest window score.").unwrap();
    writeln!(out, "- UCAL Best takes the best value of each metric independently across steps.").unwrap();
    Ok(out)
}

/// `frame_index,label,score` at full precision.
pub fn render_scores_csv(scores: &ScoreSeries) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(["frame_index", "label", "score"]).map_err(to_err)?;
    for e in &scores.entries {
        let label = if e.label.is_anomalous() { "anomalous" } else { "normal" };
        w.write_record([e.frame_index.to_string(), label.to_string(), e.score.to_string()])
            .map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `report.csv` and/or `report.md` into `dir`, creating it if needed.
pub fn emit_report(results: &RunResults, dir: &Path, formats: &[ReportFormat]) -> Result<()> {
    check_nonempty(results)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for f in formats {
        match f {
            ReportFormat::Csv => write(&dir.join("report.csv"), render_csv(results)?)?,
            ReportFormat::Markdown => write(&dir.join("report.md"), render_markdown(results)?)?,
        }
    }
    Ok(())
}

/// Writes `results.json` into `dir`.
pub fn write_results(results: &RunResults, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(&dir.join("results.json"), results.to_json())
}

/// Writes `steps/step_<i>.csv` (1-based) under `dir`.
pub fn write_step_scores(dir: &Path, steps: &[ScoreSeries]) -> Result<()> {
    let steps_dir = dir.join("steps");
    std::fs::create_dir_all(&steps_dir).map_err(|e| Error::io(&steps_dir, e))?;
    for (i, s) in steps.iter().enumerate() {
        write(&steps_dir.join(format!("step_{}.csv", i + 1)), render_scores_csv(s)?)?;
    }
    Ok(())
}

/// Reproducibility record written as `manifest.json` in every output directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub started_at: String,
    pub subcommand: String,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write(&dir.join("manifest.json"), text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(x: f64) -> MetricReport {
        MetricReport {
            auc_roc: x,
            auc_pr: x,
            eer: 1.0 - x,
            ten_er: 1.0 - x,
            n_pos: 10,
            n_neg: 10,
        }
    }

    fn continual(k: usize) -> RunResults {
        let per_step: Vec<_> = (0..k).map(|i| report(0.5 + i as f64 * 0.01)).collect();
        let (ucal_average, ucal_best) = super::super::protocol::summarize(&per_step).unwrap();
        RunResults {
            config: RunConfig::default(),
            cameras: vec![CameraResult {
                camera_id: "C0".into(),
                outcome: Outcome::Continual {
                    result: ContinualResult {
                        camera_id: "C0".into(),
                        baseline: report(0.4),
                        per_step,
                        ucal_average,
                        ucal_best,
                        normal_training: report(0.6),
                        pretrain_windows: 0,
                        step_windows: vec![0; k],
                        windows_seen: vec![0; k],
                    },
                },
            }],
        }
    }

    #[test]
    fn k9_markdown_has_twelve_data_rows() {
        let md = render_markdown(&continual(9)).unwrap();
        let table_rows = md.lines().filter(|l| l.starts_with("| ")).count();
        assert_eq!(table_rows, 1 + 12);
    }

    #[test]
    fn csv_contexts() {
        let csv = render_csv(&continual(2)).unwrap();
        let ctx: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
        assert_eq!(ctx, ["baseline", "step_1", "step_2", "normal_training", "ucal_average", "ucal_best"]);
        assert!(csv.starts_with("camera_id,context,auc_roc,auc_pr,eer,ten_er,n_pos,n_neg\n"));
        assert!(csv.contains("C0,baseline,40.00,40.00,0.60,0.60,10,10"));
    }

    #[test]
    fn empty_results_rejected() {
        let r = RunResults {
            config: RunConfig::default(),
            cameras: vec![],
        };
        assert!(render_csv(&r).is_err());
        assert!(render_markdown(&r).is_err());
    }

    #[test]
    fn results_json_round_trip() {
        let r = continual(3);
        assert_eq!(RunResults::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn no_negative_zero() {
        assert_eq!(two(-0.0), "0.00");
        assert_eq!(two(-0.001), "0.00");
        assert_eq!(two(0.125), "0.12");
    }
}
