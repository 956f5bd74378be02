//! Mean opinion scores per (model, image) pair.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const MOS_CSV_HEADER: [&str; 4] = ["model_id", "image_id", "mos", "n_raters"];

pub const MIN_RATING: u8 = 1;
pub const MAX_RATING: u8 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MosRow {
    pub model_id: String,
    pub image_id: String,
    pub mos: f64,
    pub n_raters: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MosTable {
    rows: BTreeMap<(String, String), MosRow>,
}

impl MosTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, row: MosRow) -> Result<()> {
        let invalid = |reason: &str| HarnessError::InvalidMos {
            model: row.model_id.clone(),
            image: row.image_id.clone(),
            reason: reason.to_string(),
        };
        if !(MIN_RATING as f64..=MAX_RATING as f64).contains(&row.mos) {
            return Err(invalid("mos outside [1, 5]"));
        }
        if row.n_raters == 0 {
            return Err(invalid("n_raters must be >= 1"));
        }
        let key = (row.model_id.clone(), row.image_id.clone());
        if self.rows.contains_key(&key) {
            return Err(HarnessError::DuplicateMos(key.0, key.1));
        }
        self.rows.insert(key, row);
        Ok(())
    }

    /// Averages raw categorical ratings per pair.
    pub fn from_ratings<'a>(ratings: impl IntoIterator<Item = (&'a str, &'a str, u8)>) -> Result<Self> {
        let mut acc: BTreeMap<(String, String), (u64, usize)> = BTreeMap::new();
        for (model, image, r) in ratings {
            if !(MIN_RATING..=MAX_RATING).contains(&r) {
                return Err(HarnessError::InvalidMos {
                    model: model.into(),
                    image: image.into(),
                    reason: format!("rating {r} outside 1..=5"),
                });
            }
            let e = acc.entry((model.to_string(), image.to_string())).or_default();
            e.0 += r as u64;
            e.1 += 1;
        }
        let mut t = MosTable::new();
        for ((model_id, image_id), (sum, n)) in acc {
            t.insert(MosRow {
                model_id,
                image_id,
                mos: sum as f64 / n as f64,
                n_raters: n,
            })?;
        }
        Ok(t)
    }

    pub fn get(&self, model_id: &str, image_id: &str) -> Option<&MosRow> {
        self.rows.get(&(model_id.to_string(), image_id.to_string()))
    }

    pub fn rows(&self) -> impl Iterator<Item = &MosRow> {
        self.rows.values()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let wrap = |e: csv::Error| HarnessError::table("<mos table>", e);
        w.write_record(MOS_CSV_HEADER).map_err(wrap)?;
        for r in self.rows() {
            w.write_record([r.model_id.as_str(), &r.image_id, &r.mos.to_string(), &r.n_raters.to_string()])
                .map_err(wrap)?;
        }
        w.flush().map_err(|e| HarnessError::io("<mos table>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv<R: Read>(input: R, origin: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr.headers().map_err(|e| HarnessError::table(origin, e))?;
        if header.iter().collect::<Vec<_>>() != MOS_CSV_HEADER {
            return Err(HarnessError::table(origin, format!("unexpected header {header:?}")));
        }
        let mut t = MosTable::new();
        for rec in rdr.deserialize::<MosRow>() {
            t.insert(rec.map_err(|e| HarnessError::table(origin, e))?)?;
        }
        Ok(t)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
        Self::read_csv(f, path)
    }
}
