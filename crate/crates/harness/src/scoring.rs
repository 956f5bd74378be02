//! Scoring every (model, image, metric) triple of a dataset.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use wnss_core::clustering::{dbscan, ClusteredFixations, DbscanParams};
use wnss_core::gt::{build_ground_truth_map_with, sigma_from_visual_angle, GaussianKernelSpec, GtNormalization};
use wnss_core::io::load_saliency_map;
use wnss_core::location::{auc_borji, auc_judd, sauc, wfb_with, WfbParams};
use wnss_core::value::{nss, snss, swnss, wnss, SampleSize, ShuffleConfig};
use wnss_core::{cc, emd_with, mae, sim, Dataset, DatasetManifest, EmdConfig, FixationSet, SaliencyMap};

use crate::error::{HarnessError, Result};
use crate::metric::MetricId;
use crate::table::{RawScore, ScoreRow, ScoreTable, GT_MODEL_ID};

/// Supplies one predicted map per image.
pub trait MapSource: Send + Sync {
    /// `Ok(None)` when the model has no map for the image.
    fn load(&self, image_id: &str, width: usize, height: usize) -> Result<Option<SaliencyMap>>;
}

/// Maps stored as `<dir>/<image_id>.<ext>`, trying `.png`, `.txt` then `.csv`.
#[derive(Debug, Clone)]
pub struct DirectoryModel {
    pub dir: PathBuf,
}

impl DirectoryModel {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, image_id: &str) -> Option<PathBuf> {
        ["png", "txt", "csv"]
            .iter()
            .map(|ext| self.dir.join(format!("{image_id}.{ext}")))
            .find(|p| p.is_file())
    }
}

impl MapSource for DirectoryModel {
    fn load(&self, image_id: &str, _: usize, _: usize) -> Result<Option<SaliencyMap>> {
        match self.path_for(image_id) {
            Some(p) => Ok(Some(load_saliency_map(p)?)),
            None => Ok(None),
        }
    }
}

/// Maps held in memory, keyed by image id.
#[derive(Debug, Clone, Default)]
pub struct InMemoryModel {
    pub maps: BTreeMap<String, SaliencyMap>,
}

impl MapSource for InMemoryModel {
    fn load(&self, image_id: &str, _: usize, _: usize) -> Result<Option<SaliencyMap>> {
        Ok(self.maps.get(image_id).cloned())
    }
}

/// Image-independent centered isotropic Gaussian.
#[derive(Debug, Clone, Copy)]
pub struct CenterModel {
    /// Standard deviation as a fraction of the shorter image side.
    pub sigma_fraction: f64,
}

impl Default for CenterModel {
    fn default() -> Self {
        Self { sigma_fraction: 0.25 }
    }
}

pub fn center_gaussian_map(width: usize, height: usize, sigma_fraction: f64) -> wnss_core::Result<SaliencyMap> {
    let s = sigma_fraction * width.min(height) as f64;
    if !(s > 0.0) {
        return Err(wnss_core::Error::DegenerateKernel(s));
    }
    let (cx, cy) = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
    SaliencyMap::from_fn(width, height, |x, y| {
        let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
        (-d2 / (2.0 * s * s)).exp()
    })
}

impl MapSource for CenterModel {
    fn load(&self, _: &str, width: usize, height: usize) -> Result<Option<SaliencyMap>> {
        Ok(Some(center_gaussian_map(width, height, self.sigma_fraction)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringConfig {
    pub shuffle: ShuffleConfig,
    pub borji_trials: usize,
    pub borji_negatives: SampleSize,
    /// `None` derives DBSCAN parameters from each image's viewing geometry.
    pub dbscan: Option<DbscanParams>,
    pub emd: EmdConfig,
    pub wfb: WfbParams,
    /// Also score each ground-truth map against its own fixations.
    pub include_gt_self: bool,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            shuffle: ShuffleConfig::default(),
            borji_trials: 100,
            borji_negatives: SampleSize::MatchFixationCount,
            dbscan: None,
            emd: EmdConfig::default(),
            wfb: WfbParams::default(),
            include_gt_self: true,
        }
    }
}

impl ScoringConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            shuffle: ShuffleConfig::with_seed(seed),
            ..Self::default()
        }
    }
}

/// Everything a metric may need for one image.
pub struct ImageContext<'a> {
    pub fixations: &'a FixationSet,
    pub clustered: &'a wnss_core::Result<ClusteredFixations>,
    pub gt_map: &'a SaliencyMap,
    pub dataset: &'a Dataset,
}

// clustering can only fail on an empty set or bad geometry; anything else is
// carried over by message
fn clone_err(e: &wnss_core::Error) -> wnss_core::Error {
    use wnss_core::Error as E;
    match e {
        E::EmptyPoints => E::EmptyPoints,
        E::NonPositiveGeometry(v) => E::NonPositiveGeometry(*v),
        E::InvalidParameter(s) => E::InvalidParameter(s.clone()),
        other => E::InvalidParameter(other.to_string()),
    }
}

/// Scores one map with one metric.
pub fn score_metric(metric: MetricId, map: &SaliencyMap, ctx: &ImageContext<'_>, config: &ScoringConfig) -> wnss_core::Result<f64> {
    let fix = ctx.fixations;
    let clustered = || ctx.clustered.as_ref().map_err(clone_err);
    match metric {
        MetricId::AucBorji => auc_borji(
            map,
            fix,
            config.borji_negatives.resolve(fix.len()),
            config.borji_trials,
            config.shuffle.seed,
        ),
        MetricId::AucJudd => auc_judd(map, fix),
        MetricId::Sauc => sauc(map, fix, ctx.dataset, &config.shuffle),
        MetricId::Wfb => wfb_with(map, ctx.gt_map, &config.wfb),
        MetricId::Nss => nss(map, fix),
        MetricId::Snss => snss(map, fix, ctx.dataset, &config.shuffle),
        MetricId::Cc => cc(map, ctx.gt_map),
        MetricId::Sim => sim(map, ctx.gt_map),
        MetricId::Emd => emd_with(map, ctx.gt_map, &config.emd),
        MetricId::Mae => mae(map, ctx.gt_map),
        MetricId::Wnss => wnss(map, fix, clustered()?),
        MetricId::Swnss => swnss(map, fix, clustered()?, ctx.dataset, &config.shuffle),
    }
}

/// Clusters each image's fixations once, with per-image or fixed parameters.
pub fn cluster_dataset(dataset: &Dataset, params: Option<DbscanParams>) -> Vec<wnss_core::Result<ClusteredFixations>> {
    dataset
        .images()
        .iter()
        .map(|f| {
            let p = match params {
                Some(p) => p,
                None => DbscanParams::for_geometry(f.pixels_per_degree())?,
            };
            dbscan(f, p)
        })
        .collect()
}

/// Scores every model on every image with every requested metric.
///
/// Metric failures become error-tagged rows. Missing maps and maps of the
/// wrong size are structural failures and abort the whole run.
pub fn score_dataset(
    dataset: &Dataset,
    gt_maps: &BTreeMap<String, SaliencyMap>,
    models: &[(String, &dyn MapSource)],
    metrics: &[MetricId],
    config: &ScoringConfig,
) -> Result<ScoreTable> {
    let (w, h) = (dataset.width(), dataset.height());
    for f in dataset.images() {
        match gt_maps.get(f.image_id()) {
            None => return Err(HarnessError::MissingMap(vec![(GT_MODEL_ID.into(), f.image_id().into())])),
            Some(g) if (g.width(), g.height()) != (w, h) => {
                return Err(HarnessError::DimensionMismatch {
                    model: GT_MODEL_ID.into(),
                    image: f.image_id().into(),
                    got_w: g.width(),
                    got_h: g.height(),
                    want_w: w,
                    want_h: h,
                })
            }
            Some(_) => {}
        }
    }
    let clustered = cluster_dataset(dataset, config.dbscan);

    let mut jobs: Vec<(String, Option<&dyn MapSource>, usize)> = Vec::new();
    for (name, src) in models {
        for i in 0..dataset.len() {
            jobs.push((name.clone(), Some(*src), i));
        }
    }
    if config.include_gt_self {
        for i in 0..dataset.len() {
            jobs.push((GT_MODEL_ID.to_string(), None, i));
        }
    }

    let results: Vec<Result<Vec<ScoreRow>>> = jobs
        .par_iter()
        .map(|(model, src, i)| {
            let fix = &dataset.images()[*i];
            let image = fix.image_id();
            let gt = &gt_maps[image];
            let map = match src {
                None => gt.clone(),
                Some(src) => match src.load(image, w, h)? {
                    None => return Err(HarnessError::MissingMap(vec![(model.clone(), image.into())])),
                    Some(m) => m,
                },
            };
            if (map.width(), map.height()) != (w, h) {
                return Err(HarnessError::DimensionMismatch {
                    model: model.clone(),
                    image: image.into(),
                    got_w: map.width(),
                    got_h: map.height(),
                    want_w: w,
                    want_h: h,
                });
            }
            let ctx = ImageContext {
                fixations: fix,
                clustered: &clustered[*i],
                gt_map: gt,
                dataset,
            };
            Ok(metrics
                .iter()
                .map(|&m| ScoreRow {
                    model_id: model.clone(),
                    image_id: image.into(),
                    metric: m,
                    raw: RawScore::from(score_metric(m, &map, &ctx, config)),
                    normalized: None,
                })
                .collect())
        })
        .collect();

    let mut missing = Vec::new();
    let mut table = ScoreTable::new();
    for r in results {
        match r {
            Ok(rows) => {
                for row in rows {
                    table.insert(row)?;
                }
            }
            Err(HarnessError::MissingMap(m)) => missing.extend(m),
            Err(e) => return Err(e),
        }
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(HarnessError::MissingMap(missing));
    }
    Ok(table)
}

/// How ground-truth maps are obtained for a manifest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtOptions {
    /// Gaussian sigma in degrees of visual angle.
    pub sigma_degrees: f64,
    pub normalization: GtNormalization,
    /// Use `gt_map_path` from the manifest when present.
    pub prefer_manifest_maps: bool,
}

impl Default for GtOptions {
    fn default() -> Self {
        Self {
            sigma_degrees: 1.0,
            normalization: GtNormalization::Peak,
            prefer_manifest_maps: true,
        }
    }
}

pub fn build_gt_map(fixations: &FixationSet, options: &GtOptions) -> wnss_core::Result<SaliencyMap> {
    let sigma = sigma_from_visual_angle(fixations.pixels_per_degree(), options.sigma_degrees)?;
    build_ground_truth_map_with(fixations, &GaussianKernelSpec::new(sigma)?, options.normalization)
}

/// Ground-truth maps for every manifest entry, loaded or built.
pub fn gt_maps_for_manifest(
    manifest: &DatasetManifest,
    base_dir: &Path,
    dataset: &Dataset,
    options: &GtOptions,
) -> Result<BTreeMap<String, SaliencyMap>> {
    manifest
        .entries
        .par_iter()
        .map(|e| {
            let map = match (&e.gt_map_path, options.prefer_manifest_maps) {
                (Some(p), true) => load_saliency_map(wnss_core::dataset::resolve(base_dir, p))?,
                _ => build_gt_map(dataset.fixations(&e.image_id)?, options)?,
            };
            Ok((e.image_id.clone(), map))
        })
        .collect()
}
