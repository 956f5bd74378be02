use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

/// Metrics the harness can score. Declaration order is the canonical row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    AucBorji,
    AucJudd,
    Sauc,
    Wfb,
    Nss,
    Snss,
    Cc,
    Sim,
    Emd,
    Mae,
    Wnss,
    Swnss,
}

impl MetricId {
    pub const ALL: [MetricId; 12] = [
        MetricId::AucBorji,
        MetricId::AucJudd,
        MetricId::Sauc,
        MetricId::Wfb,
        MetricId::Nss,
        MetricId::Snss,
        MetricId::Cc,
        MetricId::Sim,
        MetricId::Emd,
        MetricId::Mae,
        MetricId::Wnss,
        MetricId::Swnss,
    ];

    /// Report column order for the two table sections.
    pub const NON_SHUFFLED: [MetricId; 9] = [
        MetricId::AucBorji,
        MetricId::AucJudd,
        MetricId::Wfb,
        MetricId::Nss,
        MetricId::Emd,
        MetricId::Cc,
        MetricId::Sim,
        MetricId::Mae,
        MetricId::Wnss,
    ];
    pub const SHUFFLED: [MetricId; 3] = [MetricId::Sauc, MetricId::Snss, MetricId::Swnss];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::AucBorji => "auc_borji",
            MetricId::AucJudd => "auc_judd",
            MetricId::Sauc => "sauc",
            MetricId::Wfb => "wfb",
            MetricId::Nss => "nss",
            MetricId::Snss => "snss",
            MetricId::Cc => "cc",
            MetricId::Sim => "sim",
            MetricId::Emd => "emd",
            MetricId::Mae => "mae",
            MetricId::Wnss => "wnss",
            MetricId::Swnss => "swnss",
        }
    }

    /// Column heading used in reports.
    pub fn label(self) -> &'static str {
        match self {
            MetricId::AucBorji => "AUC_Borji",
            MetricId::AucJudd => "AUC_Judd",
            MetricId::Sauc => "sAUC",
            MetricId::Wfb => "WF_beta",
            MetricId::Nss => "NSS",
            MetricId::Snss => "sNSS",
            MetricId::Cc => "CC",
            MetricId::Sim => "SIM",
            MetricId::Emd => "EMD",
            MetricId::Mae => "MAE",
            MetricId::Wnss => "WNSS",
            MetricId::Swnss => "sWNSS",
        }
    }

    pub fn is_shuffled(self) -> bool {
        matches!(self, MetricId::Sauc | MetricId::Snss | MetricId::Swnss)
    }

    /// Distances where 0 is a perfect match.
    pub fn lower_is_better(self) -> bool {
        matches!(self, MetricId::Emd | MetricId::Mae)
    }

    /// Whether scores are divided by the ground-truth self-score. A distance
    /// has a self-score of zero, so distances keep their raw values.
    pub fn is_normalized(self) -> bool {
        !self.lower_is_better()
    }

    /// Needs the ground-truth map rather than only fixations.
    pub fn needs_gt_map(self) -> bool {
        matches!(
            self,
            MetricId::Wfb | MetricId::Cc | MetricId::Sim | MetricId::Emd | MetricId::Mae
        )
    }

    /// Parses a comma-separated list, rejecting unknown names and duplicates.
    pub fn parse_list(s: &str) -> Result<Vec<MetricId>, HarnessError> {
        let mut out = Vec::new();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            let m: MetricId = name.parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(HarnessError::UnknownMetric(s.to_string()));
        }
        Ok(out)
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricId::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| HarnessError::UnknownMetric(s.to_string()))
    }
}
