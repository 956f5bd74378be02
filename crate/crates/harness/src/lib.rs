//! Benchmark harness: score models on a dataset, normalize by ground-truth
//! self-scores, correlate with mean opinion scores and write reports.

pub mod correlate;
pub mod error;
pub mod metric;
pub mod mos;
pub mod normalize;
pub mod report;
pub mod scoring;
pub mod stats;
pub mod synthetic;
pub mod table;

pub use correlate::{correlate_with_mos, CorrelationMode, CorrelationReport, MetricCorrelation};
pub use error::{HarnessError, Result};
pub use metric::MetricId;
pub use mos::{MosRow, MosTable};
pub use normalize::{normalize_scores, normalize_with_gt_rows, GtSelfScores};
pub use report::{emit_report, ReportFormat};
pub use scoring::{score_dataset, CenterModel, DirectoryModel, InMemoryModel, MapSource, ScoringConfig};
pub use stats::{krocc, plcc, srocc, StatsError};
pub use table::{RawScore, ScoreRow, ScoreTable, GT_MODEL_ID};
