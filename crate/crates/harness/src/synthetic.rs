//! Synthetic datasets that reproduce known failure modes of saliency metrics.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wnss_core::clustering::{dbscan, DbscanParams};
use wnss_core::gt::{gaussian_blur, GaussianKernelSpec};
use wnss_core::io::{save_fixations, save_saliency_map, MapFormat};
use wnss_core::value::{nss, swnss, wnss, ShuffleConfig};
use wnss_core::{Dataset, DatasetManifest, FixationPoint, FixationSet, ManifestEntry, SaliencyMap};

use crate::error::{HarnessError, Result};
use crate::scoring::{build_gt_map, center_gaussian_map, GtOptions};

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn clamp_point(x: f64, y: f64, w: usize, h: usize) -> FixationPoint {
    FixationPoint::new(
        x.round().clamp(0.0, (w - 1) as f64) as u32,
        y.round().clamp(0.0, (h - 1) as f64) as u32,
    )
}

/// Sum of isotropic Gaussian bumps, peak-normalized.
pub fn bump_map(width: usize, height: usize, centers: &[(f64, f64)], sigma: f64) -> wnss_core::Result<SaliencyMap> {
    let m = SaliencyMap::from_fn(width, height, |x, y| {
        centers
            .iter()
            .map(|&(cx, cy)| {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                (-d2 / (2.0 * sigma * sigma)).exp()
            })
            .sum()
    })?;
    m.peak_normalized()
}

/// Blurs a map and lifts its floor with `v -> v^gamma` (`gamma < 1`).
pub fn fuzzify(map: &SaliencyMap, blur_sigma: f64, gamma: f64) -> wnss_core::Result<SaliencyMap> {
    let blurred = gaussian_blur(map, &GaussianKernelSpec::new(blur_sigma)?).peak_normalized()?;
    blurred.map_values(|v| v.powf(gamma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterBiasParams {
    pub n_images: usize,
    pub width: usize,
    pub height: usize,
    pub pixels_per_degree: f64,
    /// Spread of object positions around the image centre, as a fraction of
    /// each side.
    pub center_spread: f64,
    pub objects_per_image: usize,
    pub fixations_per_object: usize,
    pub stray_fixations: usize,
    /// Extra blur (degrees) applied to the ground truth to form the model map.
    pub model_blur_degrees: f64,
    pub center_sigma_fraction: f64,
    pub seed: u64,
}

impl Default for CenterBiasParams {
    fn default() -> Self {
        Self {
            n_images: 20,
            width: 160,
            height: 120,
            pixels_per_degree: 8.0,
            center_spread: 0.08,
            objects_per_image: 3,
            fixations_per_object: 12,
            stray_fixations: 3,
            model_blur_degrees: 2.0,
            center_sigma_fraction: 0.15,
            seed: 7,
        }
    }
}

/// A dataset with ground-truth maps and per-model predicted maps.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub dataset: Dataset,
    pub gt_maps: BTreeMap<String, SaliencyMap>,
    /// model id -> image id -> map
    pub models: BTreeMap<String, BTreeMap<String, SaliencyMap>>,
}

/// Images whose fixations gather on objects placed near the image centre.
/// Models: `center` (a centered Gaussian) and `gt_model` (the ground truth
/// with extra blur).
pub fn center_bias_scenario(p: &CenterBiasParams) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (w, h) = (p.width, p.height);
    let mut sets = Vec::with_capacity(p.n_images);
    for i in 0..p.n_images {
        let mut pts = Vec::new();
        for _ in 0..p.objects_per_image {
            let ox = w as f64 / 2.0 + normal(&mut rng) * p.center_spread * w as f64;
            let oy = h as f64 / 2.0 + normal(&mut rng) * p.center_spread * h as f64;
            for _ in 0..p.fixations_per_object {
                let s = 0.4 * p.pixels_per_degree;
                pts.push(clamp_point(ox + normal(&mut rng) * s, oy + normal(&mut rng) * s, w, h));
            }
        }
        for _ in 0..p.stray_fixations {
            pts.push(FixationPoint::new(rng.gen_range(0..w as u32), rng.gen_range(0..h as u32)));
        }
        sets.push(FixationSet::new(format!("img{i:02}"), w, h, p.pixels_per_degree, pts)?);
    }
    let dataset = Dataset::new(sets)?;
    let gt_maps: BTreeMap<String, SaliencyMap> = dataset
        .images()
        .iter()
        .map(|f| Ok((f.image_id().to_string(), build_gt_map(f, &GtOptions::default())?)))
        .collect::<wnss_core::Result<_>>()?;
    let center = center_gaussian_map(w, h, p.center_sigma_fraction)?;
    let kernel = GaussianKernelSpec::new(p.model_blur_degrees * p.pixels_per_degree)?;
    let mut models = BTreeMap::new();
    models.insert(
        "center".to_string(),
        gt_maps.keys().map(|k| (k.clone(), center.clone())).collect(),
    );
    models.insert(
        "gt_model".to_string(),
        gt_maps
            .iter()
            .map(|(k, g)| Ok((k.clone(), gaussian_blur(g, &kernel).peak_normalized()?)))
            .collect::<wnss_core::Result<_>>()?,
    );
    Ok(Scenario {
        dataset,
        gt_maps,
        models,
    })
}

/// One image with a dense fixation cluster and isolated scattered fixations,
/// plus filler images whose fixations are uniform (used for shuffling).
#[derive(Debug, Clone)]
pub struct DensityScenario {
    pub dataset: Dataset,
    pub target_id: String,
    /// Bump on the dense cluster.
    pub dense_map: SaliencyMap,
    /// Bumps on the scattered fixations.
    pub scatter_map: SaliencyMap,
    pub dense_count: usize,
    pub scatter_count: usize,
    pub bump_sigma: f64,
    pub dbscan: DbscanParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityScores {
    pub nss_dense: f64,
    pub nss_scatter: f64,
    pub wnss_dense: f64,
    pub wnss_scatter: f64,
    pub swnss_dense: f64,
    pub swnss_scatter: f64,
}

impl DensityScenario {
    pub fn scores(&self, shuffle: &ShuffleConfig) -> Result<DensityScores> {
        let fix = self.dataset.fixations(&self.target_id)?;
        let c = dbscan(fix, self.dbscan)?;
        Ok(DensityScores {
            nss_dense: nss(&self.dense_map, fix)?,
            nss_scatter: nss(&self.scatter_map, fix)?,
            wnss_dense: wnss(&self.dense_map, fix, &c)?,
            wnss_scatter: wnss(&self.scatter_map, fix, &c)?,
            swnss_dense: swnss(&self.dense_map, fix, &c, &self.dataset, shuffle)?,
            swnss_scatter: swnss(&self.scatter_map, fix, &c, &self.dataset, shuffle)?,
        })
    }
}

impl DensityScores {
    /// Plain NSS ranks the scatter map within `margin` of, or above, the
    /// dense map while both weighted scores prefer the dense map.
    pub fn shows_density_blindness(&self, margin: f64) -> bool {
        self.nss_scatter >= self.nss_dense - margin
            && self.wnss_dense > self.wnss_scatter
            && self.swnss_dense > self.swnss_scatter
    }
}

fn density_candidate(
    width: usize,
    height: usize,
    ppd: f64,
    dense_count: usize,
    scatter_count: usize,
    bump_sigma: f64,
    seed: u64,
) -> Result<DensityScenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cx, cy) = (width as f64 * 0.3, height as f64 * 0.4);
    let mut pts: Vec<FixationPoint> = (0..dense_count)
        .map(|_| clamp_point(cx + normal(&mut rng) * 0.25 * ppd, cy + normal(&mut rng) * 0.25 * ppd, width, height))
        .collect();
    // scattered points sit on a coarse lattice so none is within eps of another
    let mut scattered = Vec::new();
    let step = 3.0 * ppd;
    let cols = ((width as f64 - step) / step) as usize;
    let rows = ((height as f64 - step) / step) as usize;
    let mut cells: Vec<(usize, usize)> = (0..rows).flat_map(|r| (0..cols).map(move |c| (c, r))).collect();
    cells.retain(|&(c, r)| {
        let (x, y) = ((c as f64 + 1.0) * step, (r as f64 + 1.0) * step);
        (x - cx).hypot(y - cy) > 3.0 * ppd
    });
    for k in 0..scatter_count.min(cells.len()) {
        let j = rng.gen_range(k..cells.len());
        cells.swap(k, j);
        let (c, r) = cells[k];
        scattered.push(((c as f64 + 1.0) * step, (r as f64 + 1.0) * step));
    }
    if scattered.len() < scatter_count {
        return Err(HarnessError::Core(wnss_core::Error::InvalidParameter(
            "image too small for the requested scatter".into(),
        )));
    }
    pts.extend(scattered.iter().map(|&(x, y)| clamp_point(x, y, width, height)));
    let target = FixationSet::new("target", width, height, ppd, pts)?;

    let mut sets = vec![target];
    for f in 0..4 {
        let filler: Vec<FixationPoint> = (0..40)
            .map(|_| FixationPoint::new(rng.gen_range(0..width as u32), rng.gen_range(0..height as u32)))
            .collect();
        sets.push(FixationSet::new(format!("filler{f}"), width, height, ppd, filler)?);
    }
    let dataset = Dataset::new(sets)?;
    Ok(DensityScenario {
        dense_map: bump_map(width, height, &[(cx, cy)], bump_sigma)?,
        scatter_map: bump_map(width, height, &scattered, bump_sigma)?,
        dataset,
        target_id: "target".into(),
        dense_count,
        scatter_count,
        bump_sigma,
        dbscan: DbscanParams::for_geometry(ppd)?,
    })
}

/// Deterministic search for a dense-cluster/scatter configuration in which
/// plain NSS cannot separate the two maps (within `margin`) while WNSS and
/// sWNSS prefer the dense map. Returns the first configuration found.
pub fn find_density_blindness_scenario(seed: u64, margin: f64, shuffle: &ShuffleConfig) -> Result<Option<(DensityScenario, DensityScores)>> {
    let (w, h, ppd) = (240, 180, 8.0);
    for dense_count in [3, 4, 5, 6, 8] {
        for scatter_count in [12, 16, 20, 24, 30, 36] {
            for sigma_deg in [0.5, 0.75, 1.0] {
                let s = density_candidate(w, h, ppd, dense_count, scatter_count, sigma_deg * ppd, seed)?;
                let scores = s.scores(shuffle)?;
                if scores.shows_density_blindness(margin) {
                    return Ok(Some((s, scores)));
                }
            }
        }
    }
    Ok(None)
}

/// Writes a scenario to disk: `manifest.json`, `fixations/<id>.csv`,
/// `gt/<id>.txt` and `models/<model>/<id>.txt`. Returns the manifest path.
pub fn write_scenario(scenario: &Scenario, dir: impl AsRef<Path>, with_gt_paths: bool) -> Result<PathBuf> {
    let dir = dir.as_ref();
    let mkdir = |p: &Path| fs::create_dir_all(p).map_err(|e| HarnessError::io(p, e));
    mkdir(&dir.join("fixations"))?;
    mkdir(&dir.join("gt"))?;
    let mut entries = Vec::new();
    for f in scenario.dataset.images() {
        let id = f.image_id();
        let fix_rel = PathBuf::from("fixations").join(format!("{id}.csv"));
        save_fixations(f, dir.join(&fix_rel))?;
        let gt_rel = PathBuf::from("gt").join(format!("{id}.txt"));
        save_saliency_map(&scenario.gt_maps[id], dir.join(&gt_rel), MapFormat::FloatGrid)?;
        entries.push(ManifestEntry {
            image_id: id.to_string(),
            stimulus_path: PathBuf::from("stimuli").join(format!("{id}.png")),
            fixation_path: fix_rel,
            gt_map_path: with_gt_paths.then_some(gt_rel),
            width: f.width(),
            height: f.height(),
            pixels_per_degree: f.pixels_per_degree(),
        });
    }
    for (model, maps) in &scenario.models {
        let mdir = dir.join("models").join(model);
        mkdir(&mdir)?;
        for (id, m) in maps {
            save_saliency_map(m, mdir.join(format!("{id}.txt")), MapFormat::FloatGrid)?;
        }
    }
    let manifest = DatasetManifest { entries };
    let path = dir.join("manifest.json");
    fs::write(&path, manifest.to_json()).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}

/// A small multi-model scenario for end-to-end pipeline checks: the centered
/// Gaussian, the ground truth blurred at two strengths, and a noisy map.
pub fn pipeline_scenario(n_images: usize, seed: u64) -> Result<Scenario> {
    let params = CenterBiasParams {
        n_images,
        width: 64,
        height: 48,
        pixels_per_degree: 4.0,
        seed,
        ..CenterBiasParams::default()
    };
    let mut s = center_bias_scenario(&params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let wide = GaussianKernelSpec::new(3.0 * params.pixels_per_degree)?;
    let mut blur_wide = BTreeMap::new();
    let mut noisy = BTreeMap::new();
    for (id, g) in &s.gt_maps {
        blur_wide.insert(id.clone(), gaussian_blur(g, &wide).peak_normalized()?);
        let vals = g.values().iter().map(|&v| 0.5 * v + 0.5 * rng.gen::<f64>()).collect();
        noisy.insert(id.clone(), SaliencyMap::new(g.width(), g.height(), vals)?);
    }
    s.models.insert("blur_wide".into(), blur_wide);
    s.models.insert("noisy".into(), noisy);
    Ok(s)
}
