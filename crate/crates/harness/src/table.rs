//! Per-(model, image, metric) score rows and their CSV form.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::metric::MetricId;

pub const SCORE_CSV_HEADER: [&str; 6] = ["model_id", "image_id", "metric_id", "raw", "normalized", "error"];

/// Model id under which ground-truth self-scores are stored.
pub const GT_MODEL_ID: &str = "ground_truth";

/// A metric value, or the tag of the error that prevented computing it.
#[derive(Debug, Clone, PartialEq)]
pub enum RawScore {
    Value(f64),
    Error(String),
}

impl RawScore {
    pub fn value(&self) -> Option<f64> {
        match self {
            RawScore::Value(v) => Some(*v),
            RawScore::Error(_) => None,
        }
    }

    pub fn error(&self) -> Option<&str> {
        match self {
            RawScore::Value(_) => None,
            RawScore::Error(e) => Some(e),
        }
    }
}

impl From<wnss_core::Result<f64>> for RawScore {
    fn from(r: wnss_core::Result<f64>) -> Self {
        match r {
            Ok(v) => RawScore::Value(v),
            Err(e) => RawScore::Error(e.tag().to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub model_id: String,
    pub image_id: String,
    pub metric: MetricId,
    pub raw: RawScore,
    pub normalized: Option<f64>,
}

impl ScoreRow {
    /// The value used when correlating: normalized for normalized metrics,
    /// raw for distances.
    pub fn comparable(&self) -> Option<f64> {
        if self.metric.is_normalized() {
            self.normalized
        } else {
            self.raw.value()
        }
    }
}

type RowKey = (String, String, MetricId);

/// Score rows keyed uniquely by `(model, image, metric)`, iterated in key order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    rows: BTreeMap<RowKey, ScoreRow>,
}

impl ScoreTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, row: ScoreRow) -> Result<()> {
        let key = (row.model_id.clone(), row.image_id.clone(), row.metric);
        if self.rows.contains_key(&key) {
            return Err(HarnessError::DuplicateRow(key.0, key.1, key.2));
        }
        self.rows.insert(key, row);
        Ok(())
    }

    pub fn get(&self, model_id: &str, image_id: &str, metric: MetricId) -> Option<&ScoreRow> {
        self.rows.get(&(model_id.to_string(), image_id.to_string(), metric))
    }

    pub fn rows(&self) -> impl Iterator<Item = &ScoreRow> {
        self.rows.values()
    }

    pub(crate) fn rows_mut(&mut self) -> impl Iterator<Item = &mut ScoreRow> {
        self.rows.values_mut()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Metrics present in the table, in canonical order.
    pub fn metrics(&self) -> Vec<MetricId> {
        let mut m: Vec<MetricId> = self.rows.keys().map(|k| k.2).collect();
        m.sort();
        m.dedup();
        m
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let wrap = |e: csv::Error| HarnessError::table("<score table>", e);
        w.write_record(SCORE_CSV_HEADER).map_err(wrap)?;
        for r in self.rows() {
            let raw = r.raw.value().map(|v| v.to_string()).unwrap_or_default();
            let norm = r.normalized.map(|v| v.to_string()).unwrap_or_default();
            let err = r.raw.error().unwrap_or_default();
            w.write_record([r.model_id.as_str(), &r.image_id, r.metric.as_str(), &raw, &norm, err])
                .map_err(wrap)?;
        }
        w.flush().map_err(|e| HarnessError::io("<score table>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv<R: Read>(input: R, origin: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr.headers().map_err(|e| HarnessError::table(origin, e))?;
        if header.iter().collect::<Vec<_>>() != SCORE_CSV_HEADER {
            return Err(HarnessError::table(origin, format!("unexpected header {header:?}")));
        }
        let mut table = ScoreTable::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| HarnessError::table(origin, e))?;
            let bad = |what: &str| HarnessError::table(origin, format!("row {}: {what}", line + 2));
            let num = |s: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse::<f64>().map(Some).map_err(|_| bad(&format!("bad number `{s}`")))
                }
            };
            let metric: MetricId = rec[2].parse()?;
            let raw = match (num(&rec[3])?, &rec[5]) {
                (Some(v), "") => RawScore::Value(v),
                (None, tag) if !tag.is_empty() => RawScore::Error(tag.to_string()),
                _ => return Err(bad("exactly one of raw and error must be set")),
            };
            let normalized = num(&rec[4])?;
            table.insert(ScoreRow {
                model_id: rec[0].to_string(),
                image_id: rec[1].to_string(),
                metric,
                raw,
                normalized,
            })?;
        }
        Ok(table)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
        Self::read_csv(f, path)
    }
}
