//! Dataset manifests and the in-memory fixation dataset used for shuffling.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixation::FixationSet;
use crate::io::load_fixations;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image_id: String,
    pub stimulus_path: PathBuf,
    pub fixation_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_map_path: Option<PathBuf>,
    pub width: usize,
    pub height: usize,
    pub pixels_per_degree: f64,
}

/// Index of stimuli, fixation files and optional ground-truth maps.
///
/// Relative paths resolve against the directory holding the manifest file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        let manifest: Self = serde_json::from_str(text)
            .map_err(|e| Error::malformed("<manifest>", e.to_string()))?;
        manifest.validate()?;
        Ok(manifest)
    }

    /// Reads and validates a manifest, returning it with its base directory.
    pub fn load(path: impl AsRef<Path>) -> Result<(Self, PathBuf)> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Self = serde_json::from_str(&text)
            .map_err(|e| Error::malformed(path, e.to_string()))?;
        manifest.validate()?;
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((manifest, base))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.image_id.as_str()) {
                return Err(Error::DuplicateImage(e.image_id.clone()));
            }
            if e.width == 0 || e.height == 0 {
                return Err(Error::InvalidGeometry(format!(
                    "{}: {}x{}",
                    e.image_id, e.width, e.height
                )));
            }
            if !(e.pixels_per_degree > 0.0) {
                return Err(Error::NonPositiveGeometry(e.pixels_per_degree));
            }
        }
        if let Some(first) = self.entries.first() {
            for e in &self.entries[1..] {
                if (e.width, e.height) != (first.width, first.height) {
                    return Err(Error::DimensionMismatch(
                        first.width,
                        first.height,
                        e.width,
                        e.height,
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn entry(&self, image_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.image_id == image_id)
    }

    /// Loads every fixation file into a [`Dataset`].
    pub fn load_dataset(&self, base_dir: &Path) -> Result<Dataset> {
        let sets = self
            .entries
            .iter()
            .map(|e| {
                load_fixations(
                    resolve(base_dir, &e.fixation_path),
                    &e.image_id,
                    e.width,
                    e.height,
                    e.pixels_per_degree,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(sets)
    }
}

pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Fixation sets for every image of a dataset; all images share one size.
#[derive(Debug, Clone)]
pub struct Dataset {
    width: usize,
    height: usize,
    images: Vec<FixationSet>,
    index: HashMap<String, usize>,
}

impl Dataset {
    pub fn new(images: Vec<FixationSet>) -> Result<Self> {
        let first = images
            .first()
            .ok_or_else(|| Error::InvalidParameter("dataset has no images".into()))?;
        let (width, height) = (first.width(), first.height());
        let mut index = HashMap::with_capacity(images.len());
        for (i, set) in images.iter().enumerate() {
            if (set.width(), set.height()) != (width, height) {
                return Err(Error::DimensionMismatch(
                    width,
                    height,
                    set.width(),
                    set.height(),
                ));
            }
            if index.insert(set.image_id().to_string(), i).is_some() {
                return Err(Error::DuplicateImage(set.image_id().to_string()));
            }
        }
        Ok(Self {
            width,
            height,
            images,
            index,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn images(&self) -> &[FixationSet] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn get(&self, image_id: &str) -> Option<&FixationSet> {
        self.index.get(image_id).map(|&i| &self.images[i])
    }

    pub fn fixations(&self, image_id: &str) -> Result<&FixationSet> {
        self.get(image_id)
            .ok_or_else(|| Error::UnknownImage(image_id.to_string()))
    }
}
