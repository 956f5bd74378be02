//! Division by the ground-truth self-score.

use std::collections::HashMap;

use crate::error::{HarnessError, Result};
use crate::metric::MetricId;
use crate::table::{ScoreTable, GT_MODEL_ID};

/// Ground-truth self-scores keyed by `(image_id, metric)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GtSelfScores {
    scores: HashMap<(String, MetricId), f64>,
}

impl GtSelfScores {
    pub fn insert(&mut self, image_id: impl Into<String>, metric: MetricId, score: f64) {
        self.scores.insert((image_id.into(), metric), score);
    }

    pub fn get(&self, image_id: &str, metric: MetricId) -> Option<f64> {
        self.scores.get(&(image_id.to_string(), metric)).copied()
    }

    /// Collects the numeric rows of `gt_model_id`.
    pub fn from_table(table: &ScoreTable, gt_model_id: &str) -> Self {
        let mut out = Self::default();
        for r in table.rows().filter(|r| r.model_id == gt_model_id) {
            if let Some(v) = r.raw.value() {
                out.insert(r.image_id.clone(), r.metric, v);
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Sets `normalized = raw / gt_self` on every numeric row of a normalized
/// metric. Distance metrics and error rows are left without a normalized value.
pub fn normalize_scores(mut table: ScoreTable, gt_self: &GtSelfScores) -> Result<ScoreTable> {
    for row in table.rows_mut() {
        row.normalized = None;
        let Some(raw) = row.raw.value() else { continue };
        if !row.metric.is_normalized() {
            continue;
        }
        let g = gt_self
            .get(&row.image_id, row.metric)
            .ok_or_else(|| HarnessError::MissingGtSelfScore {
                image: row.image_id.clone(),
                metric: row.metric,
            })?;
        if g == 0.0 {
            return Err(HarnessError::ZeroGtSelfScore {
                image: row.image_id.clone(),
                metric: row.metric,
            });
        }
        row.normalized = Some(raw / g);
    }
    Ok(table)
}

/// Normalizes against the table's own ground-truth rows.
pub fn normalize_with_gt_rows(table: ScoreTable) -> Result<ScoreTable> {
    let gt = GtSelfScores::from_table(&table, GT_MODEL_ID);
    normalize_scores(table, &gt)
}
