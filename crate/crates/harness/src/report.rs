//! Report serialization: JSON, CSV, markdown and scatter data.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::correlate::{CorrelationReport, MetricCorrelation};
use crate::error::{HarnessError, Result};
use crate::table::ScoreTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
    ScatterCsv,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 4] = [
        ReportFormat::Json,
        ReportFormat::Csv,
        ReportFormat::Markdown,
        ReportFormat::ScatterCsv,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            ReportFormat::Json => "report.json",
            ReportFormat::Csv => "report.csv",
            ReportFormat::Markdown => "report.md",
            ReportFormat::ScatterCsv => "scatter.csv",
        }
    }
}

pub fn report_json(report: &CorrelationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn report_csv(report: &CorrelationReport) -> String {
    let mut s = String::from("section,metric_id,srocc,krocc,plcc,n_pairs\n");
    let mut line = |section: &str, c: &MetricCorrelation| {
        let _ = writeln!(s, "{section},{},{},{},{},{}", c.metric, c.srocc, c.krocc, c.plcc, c.n_pairs);
    };
    report.non_shuffled.iter().for_each(|c| line("non_shuffled", c));
    report.shuffled.iter().for_each(|c| line("shuffled", c));
    s
}

/// Two tables, non-shuffled metrics first, one row per coefficient.
pub fn report_markdown(report: &CorrelationReport) -> String {
    let mut s = String::new();
    for (title, section) in [
        ("Non-Shuffled Metrics", &report.non_shuffled),
        ("Shuffled Metrics", &report.shuffled),
    ] {
        let _ = writeln!(s, "### {title}\n");
        s.push_str("| |");
        for c in section.iter() {
            let _ = write!(s, " {} |", c.metric.label());
        }
        s.push_str("\n|---|");
        s.push_str(&"---|".repeat(section.len()));
        s.push('\n');
        for (name, get) in [
            ("SROCC", (|c: &MetricCorrelation| c.srocc) as fn(&MetricCorrelation) -> f64),
            ("KROCC", |c| c.krocc),
            ("PLCC", |c| c.plcc),
        ] {
            let _ = write!(s, "| {name} |");
            for c in section.iter() {
                let _ = write!(s, " {:.4} |", get(c));
            }
            s.push('\n');
        }
        s.push_str("| n |");
        for c in section.iter() {
            let _ = write!(s, " {} |", c.n_pairs);
        }
        s.push_str("\n\n");
    }
    s
}

/// One line per joined observation; distance metrics keep their raw score.
pub fn scatter_csv(report: &CorrelationReport) -> String {
    let mut s = String::from("metric_id,model_id,image_id,mos,score\n");
    for c in report.iter() {
        for p in &c.points {
            let _ = writeln!(s, "{},{},{},{},{}", c.metric, csv_field(&p.model_id), csv_field(&p.image_id), p.mos, p.score);
        }
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes the requested formats into `dir` (plus `scores.csv` with the table
/// used) and returns the paths written.
pub fn emit_report(
    report: &CorrelationReport,
    table: &ScoreTable,
    dir: impl AsRef<Path>,
    formats: &[ReportFormat],
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::new();
    for &f in formats {
        let body = match f {
            ReportFormat::Json => report_json(report),
            ReportFormat::Csv => report_csv(report),
            ReportFormat::Markdown => report_markdown(report),
            ReportFormat::ScatterCsv => scatter_csv(report),
        };
        let path = dir.join(f.file_name());
        fs::write(&path, body).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
    }
    let path = dir.join("scores.csv");
    table.save_csv(&path)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlate::{CorrelationMode, ScatterPoint};
    use crate::metric::MetricId;

    fn entry(metric: MetricId) -> MetricCorrelation {
        MetricCorrelation {
            metric,
            srocc: 0.5,
            krocc: 0.25,
            plcc: 0.75,
            n_pairs: 7,
            mos_inverted: metric.lower_is_better(),
            points: vec![ScatterPoint {
                model_id: "m".into(),
                image_id: "i".into(),
                mos: 3.0,
                score: 0.1,
            }],
        }
    }

    #[test]
    fn empty_report_writes_headers() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&CorrelationReport::default(), &ScoreTable::new(), dir.path(), &ReportFormat::ALL).unwrap();
        assert_eq!(files.len(), 5);
        assert_eq!(fs::read_to_string(dir.path().join("report.csv")).unwrap(), "section,metric_id,srocc,krocc,plcc,n_pairs\n");
        assert_eq!(fs::read_to_string(dir.path().join("scatter.csv")).unwrap(), "metric_id,model_id,image_id,mos,score\n");
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(json["non_shuffled"], serde_json::json!([]));
        assert_eq!(fs::read_to_string(dir.path().join("scores.csv")).unwrap(), ScoreTable::new().to_csv_string());
    }

    #[test]
    fn markdown_groups_sections_in_order() {
        let report = CorrelationReport {
            mode: CorrelationMode::PerPair,
            non_shuffled: MetricId::NON_SHUFFLED.iter().map(|&m| entry(m)).collect(),
            shuffled: MetricId::SHUFFLED.iter().map(|&m| entry(m)).collect(),
        };
        let md = report_markdown(&report);
        let non = md.find("Non-Shuffled Metrics").unwrap();
        let shuf = md.find("### Shuffled Metrics").unwrap();
        assert!(non < shuf);
        let header = md.lines().find(|l| l.starts_with("| |")).unwrap();
        assert_eq!(
            header,
            "| | AUC_Borji | AUC_Judd | WF_beta | NSS | EMD | CC | SIM | MAE | WNSS |"
        );
        assert!(md.contains("| | sAUC | sNSS | sWNSS |"));
        let back: CorrelationReport = serde_json::from_str(&report_json(&report)).unwrap();
        assert_eq!(back.non_shuffled.len(), 9);
        assert_eq!(scatter_csv(&report).lines().count(), 13);
    }
}
