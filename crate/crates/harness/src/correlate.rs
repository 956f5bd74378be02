//! Agreement between metric scores and mean opinion scores.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::metric::MetricId;
use crate::mos::{MosTable, MAX_RATING};
use crate::stats::{krocc, plcc, srocc, StatsError};
use crate::table::ScoreTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    /// One point per (model, image) pair.
    #[default]
    PerPair,
    /// One point per model: scores and MOS averaged over the model's images.
    PerModel,
}

/// One joined observation, as plotted in a scatter chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub model_id: String,
    /// Empty in per-model mode.
    pub image_id: String,
    /// MOS as correlated (inverted for distance metrics).
    pub mos: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCorrelation {
    pub metric: MetricId,
    pub srocc: f64,
    pub krocc: f64,
    pub plcc: f64,
    pub n_pairs: usize,
    /// Whether the MOS side was inverted (`5 - mos`).
    pub mos_inverted: bool,
    #[serde(skip)]
    pub points: Vec<ScatterPoint>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub mode: CorrelationMode,
    pub non_shuffled: Vec<MetricCorrelation>,
    pub shuffled: Vec<MetricCorrelation>,
}

impl CorrelationReport {
    pub fn get(&self, metric: MetricId) -> Option<&MetricCorrelation> {
        self.non_shuffled.iter().chain(&self.shuffled).find(|c| c.metric == metric)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MetricCorrelation> {
        self.non_shuffled.iter().chain(&self.shuffled)
    }
}

fn joined_points(table: &ScoreTable, mos: &MosTable, metric: MetricId, mode: CorrelationMode) -> Vec<ScatterPoint> {
    let invert = metric.lower_is_better();
    let pairs: Vec<ScatterPoint> = table
        .rows()
        .filter(|r| r.metric == metric)
        .filter_map(|r| {
            let score = r.comparable()?;
            let m = mos.get(&r.model_id, &r.image_id)?.mos;
            Some(ScatterPoint {
                model_id: r.model_id.clone(),
                image_id: r.image_id.clone(),
                mos: if invert { MAX_RATING as f64 - m } else { m },
                score,
            })
        })
        .collect();
    match mode {
        CorrelationMode::PerPair => pairs,
        CorrelationMode::PerModel => {
            let mut acc: BTreeMap<String, (f64, f64, usize)> = BTreeMap::new();
            for p in pairs {
                let e = acc.entry(p.model_id).or_default();
                e.0 += p.mos;
                e.1 += p.score;
                e.2 += 1;
            }
            acc.into_iter()
                .map(|(model_id, (m, s, n))| ScatterPoint {
                    model_id,
                    image_id: String::new(),
                    mos: m / n as f64,
                    score: s / n as f64,
                })
                .collect()
        }
    }
}

/// Correlates one metric's scores with the MOS.
pub fn correlate_metric(
    table: &ScoreTable,
    mos: &MosTable,
    metric: MetricId,
    mode: CorrelationMode,
) -> Result<MetricCorrelation> {
    let points = joined_points(table, mos, metric, mode);
    let x: Vec<f64> = points.iter().map(|p| p.score).collect();
    let y: Vec<f64> = points.iter().map(|p| p.mos).collect();
    let map_err = |e: StatsError| match e {
        StatsError::DegenerateRanks => HarnessError::DegenerateRanks { metric },
        _ => HarnessError::TooFewPairs { metric, n: x.len() },
    };
    Ok(MetricCorrelation {
        metric,
        srocc: srocc(&x, &y).map_err(map_err)?,
        krocc: krocc(&x, &y).map_err(map_err)?,
        plcc: plcc(&x, &y).map_err(map_err)?,
        n_pairs: x.len(),
        mos_inverted: metric.lower_is_better(),
        points,
    })
}

/// Correlates every metric present in `table` with the MOS. Error rows, rows
/// without a comparable score and pairs without a MOS are dropped pairwise.
pub fn correlate_with_mos(table: &ScoreTable, mos: &MosTable, mode: CorrelationMode) -> Result<CorrelationReport> {
    let present = table.metrics();
    let section = |order: &[MetricId]| -> Result<Vec<MetricCorrelation>> {
        order
            .iter()
            .filter(|m| present.contains(m))
            .map(|&m| correlate_metric(table, mos, m, mode))
            .collect()
    };
    Ok(CorrelationReport {
        mode,
        non_shuffled: section(&MetricId::NON_SHUFFLED)?,
        shuffled: section(&MetricId::SHUFFLED)?,
    })
}
