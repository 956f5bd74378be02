//! Study configuration: the rated pairs and the training exemplars.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wnss_core::io::load_saliency_map;
use wnss_core::SaliencyMap;

use crate::error::{Result, StudyError};

/// Number of training exemplars, one per rating category.
pub const TRAINING_PAIRS: usize = 5;

/// A pair entry as written in a pairs file. Map paths are relative to the
/// file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    #[serde(default)]
    pub pair_id: Option<String>,
    pub model_id: String,
    pub image_id: String,
    pub gt_map: PathBuf,
    pub pred_map: PathBuf,
}

/// A training exemplar entry, labelled with the category it illustrates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingEntry {
    #[serde(default)]
    pub pair_id: Option<String>,
    pub category: String,
    pub gt_map: PathBuf,
    pub pred_map: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyPair {
    pub pair_id: String,
    pub model_id: String,
    pub image_id: String,
    /// Set for training exemplars.
    pub category: Option<String>,
    pub gt: SaliencyMap,
    pub pred: SaliencyMap,
}

pub fn default_pair_id(model_id: &str, image_id: &str) -> String {
    format!("{model_id}__{image_id}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub pairs: Vec<StudyPair>,
    /// Shown in this fixed order before the main phase.
    pub training: Vec<StudyPair>,
}

impl StudyConfig {
    pub fn new(pairs: Vec<StudyPair>, training: Vec<StudyPair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(StudyError::Config("no pairs configured".into()));
        }
        if !training.is_empty() && training.len() != TRAINING_PAIRS {
            return Err(StudyError::Config(format!(
                "training needs {TRAINING_PAIRS} exemplars, got {}",
                training.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in pairs.iter().chain(&training) {
            if !seen.insert(p.pair_id.as_str()) {
                return Err(StudyError::Config(format!("duplicate pair id {}", p.pair_id)));
            }
            if p.pair_id.is_empty() || p.pair_id.contains('/') {
                return Err(StudyError::Config(format!("invalid pair id {:?}", p.pair_id)));
            }
        }
        let mut models_images = std::collections::BTreeSet::new();
        for p in &pairs {
            if !models_images.insert((p.model_id.as_str(), p.image_id.as_str())) {
                return Err(StudyError::Config(format!(
                    "pair ({}, {}) listed twice",
                    p.model_id, p.image_id
                )));
            }
        }
        Ok(Self { pairs, training })
    }

    /// Loads a pairs file and an optional training file (both JSON arrays).
    pub fn load(pairs_path: &Path, training_path: Option<&Path>) -> Result<Self> {
        let entries: Vec<PairEntry> = read_json(pairs_path)?;
        let base = parent(pairs_path);
        let pairs = entries
            .into_iter()
            .map(|e| {
                Ok(StudyPair {
                    pair_id: e.pair_id.unwrap_or_else(|| default_pair_id(&e.model_id, &e.image_id)),
                    gt: load_saliency_map(base.join(&e.gt_map))?,
                    pred: load_saliency_map(base.join(&e.pred_map))?,
                    model_id: e.model_id,
                    image_id: e.image_id,
                    category: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let training = match training_path {
            None => Vec::new(),
            Some(path) => {
                let entries: Vec<TrainingEntry> = read_json(path)?;
                let base = parent(path);
                entries
                    .into_iter()
                    .enumerate()
                    .map(|(i, e)| {
                        Ok(StudyPair {
                            pair_id: e.pair_id.unwrap_or_else(|| format!("training-{}", i + 1)),
                            model_id: "training".into(),
                            image_id: format!("training-{}", i + 1),
                            category: Some(e.category),
                            gt: load_saliency_map(base.join(&e.gt_map))?,
                            pred: load_saliency_map(base.join(&e.pred_map))?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Self::new(pairs, training)
    }

    pub fn find(&self, pair_id: &str) -> Option<&StudyPair> {
        self.pairs.iter().chain(&self.training).find(|p| p.pair_id == pair_id)
    }
}

fn parent(p: &Path) -> PathBuf {
    p.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| StudyError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| StudyError::Config(format!("{}: {e}", path.display())))
}
