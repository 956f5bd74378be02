//! Ground-truth saliency maps from fixations, and study image selection.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fixation::FixationSet;
use crate::map::{map_stats, SaliencyMap};

/// A truncated, normalized isotropic Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernelSpec {
    sigma_pixels: f64,
    truncation_radius: usize,
}

impl GaussianKernelSpec {
    /// Kernel with the default truncation radius `ceil(3 * sigma)`.
    pub fn new(sigma_pixels: f64) -> Result<Self> {
        if !(sigma_pixels > 0.0) || !sigma_pixels.is_finite() {
            return Err(Error::DegenerateKernel(sigma_pixels));
        }
        Ok(Self {
            sigma_pixels,
            truncation_radius: (3.0 * sigma_pixels).ceil() as usize,
        })
    }

    pub fn with_truncation_radius(mut self, radius: usize) -> Self {
        self.truncation_radius = radius;
        self
    }

    pub fn sigma_pixels(&self) -> f64 {
        self.sigma_pixels
    }

    pub fn truncation_radius(&self) -> usize {
        self.truncation_radius
    }

    /// One-dimensional taps over `[-radius, radius]`, summing to 1. The 2-D
    /// kernel is their outer product and therefore also sums to 1.
    pub fn taps(&self) -> Vec<f64> {
        let r = self.truncation_radius as i64;
        let two_s2 = 2.0 * self.sigma_pixels * self.sigma_pixels;
        let mut taps: Vec<f64> = (-r..=r)
            .map(|k| (-((k * k) as f64) / two_s2).exp())
            .collect();
        let sum: f64 = taps.iter().sum();
        taps.iter_mut().for_each(|t| *t /= sum);
        taps
    }
}

/// How a ground-truth map is scaled after convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GtNormalization {
    /// Maximum becomes 1.
    #[default]
    Peak,
    /// Values sum to 1.
    UnitMass,
}

/// Converts viewing geometry to a Gaussian sigma in pixels.
pub fn sigma_from_visual_angle(pixels_per_degree: f64, proportionality: f64) -> Result<f64> {
    if !(pixels_per_degree > 0.0) || !pixels_per_degree.is_finite() {
        return Err(Error::NonPositiveGeometry(pixels_per_degree));
    }
    if !(proportionality > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "proportionality must be positive, got {proportionality}"
        )));
    }
    Ok(proportionality * pixels_per_degree)
}

/// Per-pixel fixation counts.
pub fn build_fixation_map(
    fixations: &FixationSet,
    width: usize,
    height: usize,
) -> Result<SaliencyMap> {
    fixations.require_non_empty()?;
    let mut counts = vec![0.0; width * height];
    for p in fixations.points() {
        let (x, y) = (p.x as usize, p.y as usize);
        if x >= width || y >= height {
            return Err(Error::OutOfBounds {
                x: x as i64,
                y: y as i64,
                width,
                height,
            });
        }
        counts[y * width + x] += 1.0;
    }
    SaliencyMap::new(width, height, counts)
}

/// Fixation map convolved with `kernel` (zero padding) and peak-normalized.
pub fn build_ground_truth_map(
    fixations: &FixationSet,
    kernel: &GaussianKernelSpec,
) -> Result<SaliencyMap> {
    build_ground_truth_map_with(fixations, kernel, GtNormalization::Peak)
}

pub fn build_ground_truth_map_with(
    fixations: &FixationSet,
    kernel: &GaussianKernelSpec,
    normalization: GtNormalization,
) -> Result<SaliencyMap> {
    let fix = build_fixation_map(fixations, fixations.width(), fixations.height())?;
    let blurred = gaussian_blur(&fix, kernel);
    match normalization {
        GtNormalization::Peak => blurred.peak_normalized(),
        GtNormalization::UnitMass => blurred.mass_normalized(),
    }
}

/// Separable Gaussian convolution with zero padding; output has the input size.
pub fn gaussian_blur(map: &SaliencyMap, kernel: &GaussianKernelSpec) -> SaliencyMap {
    let taps = kernel.taps();
    let r = kernel.truncation_radius() as isize;
    let (w, h) = (map.width(), map.height());
    let src = map.values();

    let mut horiz = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        let out = &mut horiz[y * w..(y + 1) * w];
        for (x, &v) in row.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let lo = (x as isize - r).max(0) as usize;
            let hi = (x as isize + r).min(w as isize - 1) as usize;
            for (xo, o) in out.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *o += v * taps[(xo as isize - x as isize + r) as usize];
            }
        }
    }

    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let lo = (y as isize - r).max(0) as usize;
        let hi = (y as isize + r).min(h as isize - 1) as usize;
        for yo in lo..=hi {
            let t = taps[(yo as isize - y as isize + r) as usize];
            let src_row = &horiz[y * w..(y + 1) * w];
            let dst_row = &mut out[yo * w..(yo + 1) * w];
            for (d, &s) in dst_row.iter_mut().zip(src_row) {
                *d += t * s;
            }
        }
    }
    // float accumulation can leave tiny negative residue in zero regions
    out.iter_mut().for_each(|v| *v = v.max(0.0));
    SaliencyMap::new(w, h, out).expect("blur preserves validity")
}

/// Result of one-dimensional k-means; centroids are sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeans1d {
    pub centroids: Vec<f64>,
    pub assignments: Vec<usize>,
    pub inertia: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    pub k: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl KMeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            restarts: 10,
            max_iterations: 100,
            seed,
        }
    }
}

fn nearest(centroids: &[f64], v: f64) -> usize {
    let mut best = 0;
    for (c, &m) in centroids.iter().enumerate() {
        if (v - m).abs() < (v - centroids[best]).abs() {
            best = c;
        }
    }
    best
}

/// Lloyd's algorithm on scalars with k-means++ seeding and random restarts;
/// the lowest-inertia run wins.
pub fn kmeans_1d(values: &[f64], params: KMeansParams) -> Result<KMeans1d> {
    let k = params.k;
    if k == 0 || params.restarts == 0 {
        return Err(Error::InvalidParameter("k and restarts must be >= 1".into()));
    }
    if values.len() < k {
        return Err(Error::TooFewImages {
            needed: k,
            got: values.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<KMeans1d> = None;

    for _ in 0..params.restarts {
        let mut centroids = Vec::with_capacity(k);
        centroids.push(values[rng.gen_range(0..values.len())]);
        while centroids.len() < k {
            let d2: Vec<f64> = values
                .iter()
                .map(|&v| {
                    let c = centroids[nearest(&centroids, v)];
                    (v - c) * (v - c)
                })
                .collect();
            let total: f64 = d2.iter().sum();
            let pick = if total > 0.0 {
                let mut target = rng.gen::<f64>() * total;
                let mut idx = values.len() - 1;
                for (i, &d) in d2.iter().enumerate() {
                    if target < d {
                        idx = i;
                        break;
                    }
                    target -= d;
                }
                idx
            } else {
                rng.gen_range(0..values.len())
            };
            centroids.push(values[pick]);
        }

        let mut assignments = vec![usize::MAX; values.len()];
        for _ in 0..params.max_iterations {
            let next: Vec<usize> = values.iter().map(|&v| nearest(&centroids, v)).collect();
            let changed = next != assignments;
            assignments = next;

            let mut sums = vec![0.0; k];
            let mut counts = vec![0usize; k];
            for (&v, &a) in values.iter().zip(&assignments) {
                sums[a] += v;
                counts[a] += 1;
            }
            let mut reseeded = false;
            for c in 0..k {
                if counts[c] > 0 {
                    centroids[c] = sums[c] / counts[c] as f64;
                } else {
                    // empty cluster takes the point farthest from its centroid
                    let far = (0..values.len())
                        .max_by(|&i, &j| {
                            let di = (values[i] - centroids[assignments[i]]).abs();
                            let dj = (values[j] - centroids[assignments[j]]).abs();
                            di.total_cmp(&dj).then(j.cmp(&i))
                        })
                        .expect("values non-empty");
                    centroids[c] = values[far];
                    reseeded = true;
                }
            }
            if !changed && !reseeded {
                break;
            }
        }
        let assignments: Vec<usize> = values.iter().map(|&v| nearest(&centroids, v)).collect();
        let inertia = values
            .iter()
            .zip(&assignments)
            .map(|(&v, &a)| (v - centroids[a]) * (v - centroids[a]))
            .sum();

        if best.as_ref().map_or(true, |b| inertia < b.inertia) {
            best = Some(KMeans1d {
                centroids,
                assignments,
                inertia,
            });
        }
    }

    let mut run = best.expect("at least one restart");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| run.centroids[a].total_cmp(&run.centroids[b]));
    let mut relabel = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    run.centroids = order.iter().map(|&c| run.centroids[c]).collect();
    run.assignments.iter_mut().for_each(|a| *a = relabel[*a]);
    Ok(run)
}

/// Picks `per_cluster` ids per cluster, nearest to the centroid first (ties by
/// id). A cluster with too few members is topped up with the nearest
/// still-unselected values from the whole pool.
pub fn select_nearest_to_centroids(
    ids: &[String],
    values: &[f64],
    clustering: &KMeans1d,
    per_cluster: usize,
) -> Vec<String> {
    let mut taken = vec![false; ids.len()];
    let mut out = Vec::with_capacity(clustering.centroids.len() * per_cluster);
    for (c, &centroid) in clustering.centroids.iter().enumerate() {
        let rank = |pool: &mut Vec<usize>| {
            pool.sort_by(|&a, &b| {
                (values[a] - centroid)
                    .abs()
                    .total_cmp(&(values[b] - centroid).abs())
                    .then_with(|| ids[a].cmp(&ids[b]))
            })
        };
        let mut members: Vec<usize> = (0..ids.len())
            .filter(|&i| clustering.assignments[i] == c && !taken[i])
            .collect();
        rank(&mut members);
        let mut chosen: Vec<usize> = members.into_iter().take(per_cluster).collect();
        if chosen.len() < per_cluster {
            let mut rest: Vec<usize> = (0..ids.len())
                .filter(|&i| !taken[i] && !chosen.contains(&i))
                .collect();
            rank(&mut rest);
            chosen.extend(rest.into_iter().take(per_cluster - chosen.len()));
        }
        for i in chosen {
            taken[i] = true;
            out.push(ids[i].clone());
        }
    }
    out
}

/// Clusters maps by their standard deviation and returns `k * per_cluster`
/// representative image ids, grouped by ascending cluster centroid.
pub fn select_study_images(
    gt_maps: &[(String, SaliencyMap)],
    k_clusters: usize,
    per_cluster: usize,
    seed: u64,
) -> Result<Vec<String>> {
    let needed = k_clusters * per_cluster;
    if gt_maps.len() < needed || needed == 0 {
        return Err(Error::TooFewImages {
            needed: needed.max(1),
            got: gt_maps.len(),
        });
    }
    let ids: Vec<String> = gt_maps.iter().map(|(id, _)| id.clone()).collect();
    let stds: Vec<f64> = gt_maps.iter().map(|(_, m)| map_stats(m).std_dev).collect();
    let clustering = kmeans_1d(&stds, KMeansParams::new(k_clusters, seed))?;
    Ok(select_nearest_to_centroids(&ids, &stds, &clustering, per_cluster))
}
