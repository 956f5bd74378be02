//! Location metrics: ROC-based AUC variants and the weighted F-measure.

use rand::Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fixation::{FixationPoint, FixationSet};
use crate::map::{map_stats, SaliencyMap};
use crate::rng::trial_rng;
use crate::value::{draw_shuffle_sample, ShuffleConfig};

const UNIFORM_DOMAIN: &str = "uniform-negatives";

/// Points of an ROC curve, from `(0, 0)` to `(1, 1)`.
///
/// A sample is detected at threshold `t` when its value is `>= t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// Interior thresholds, descending. `tpr`/`fpr` carry two more entries
    /// for the `(0, 0)` and `(1, 1)` endpoints.
    pub thresholds: Vec<f64>,
    pub tpr: Vec<f64>,
    pub fpr: Vec<f64>,
}

impl RocCurve {
    /// Sweeps `thresholds` (descending) over positive and negative scores.
    pub fn sweep(positives: &[f64], negatives: &[f64], thresholds: Vec<f64>) -> Self {
        let mut pos = positives.to_vec();
        let mut neg = negatives.to_vec();
        pos.sort_by(|a, b| b.total_cmp(a));
        neg.sort_by(|a, b| b.total_cmp(a));
        let (np, nn) = (pos.len() as f64, neg.len() as f64);

        let mut tpr = Vec::with_capacity(thresholds.len() + 2);
        let mut fpr = Vec::with_capacity(thresholds.len() + 2);
        tpr.push(0.0);
        fpr.push(0.0);
        let (mut ip, mut ineg) = (0, 0);
        for &t in &thresholds {
            while ip < pos.len() && pos[ip] >= t {
                ip += 1;
            }
            while ineg < neg.len() && neg[ineg] >= t {
                ineg += 1;
            }
            tpr.push(ip as f64 / np);
            fpr.push(ineg as f64 / nn);
        }
        tpr.push(1.0);
        fpr.push(1.0);
        Self {
            thresholds,
            tpr,
            fpr,
        }
    }

    /// Trapezoidal area under the curve.
    pub fn auc(&self) -> f64 {
        self.fpr
            .windows(2)
            .zip(self.tpr.windows(2))
            .map(|(f, t)| (f[1] - f[0]) * (t[0] + t[1]) / 2.0)
            .sum()
    }
}

fn distinct_descending(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    v
}

fn positives(map: &SaliencyMap, points: &[FixationPoint]) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::EmptyPoints);
    }
    points
        .iter()
        .map(|p| {
            if p.x as usize >= map.width() || p.y as usize >= map.height() {
                Err(Error::OutOfBounds {
                    x: p.x as i64,
                    y: p.y as i64,
                    width: map.width(),
                    height: map.height(),
                })
            } else {
                Ok(map.at(*p))
            }
        })
        .collect()
}

/// ROC with thresholds at every distinct positive value and every
/// non-fixated pixel as a negative.
pub fn roc_judd(map: &SaliencyMap, fixations: &FixationSet) -> Result<RocCurve> {
    let pos = positives(map, fixations.points())?;
    let mut fixated = vec![false; map.len()];
    for p in fixations.points() {
        fixated[p.y as usize * map.width() + p.x as usize] = true;
    }
    let neg: Vec<f64> = map
        .values()
        .iter()
        .zip(&fixated)
        .filter(|(_, &f)| !f)
        .map(|(&v, _)| v)
        .collect();
    if neg.is_empty() {
        return Err(Error::NoNegatives);
    }
    let thresholds = distinct_descending(pos.iter().copied());
    Ok(RocCurve::sweep(&pos, &neg, thresholds))
}

pub fn auc_judd(map: &SaliencyMap, fixations: &FixationSet) -> Result<f64> {
    Ok(roc_judd(map, fixations)?.auc())
}

/// Full empirical ROC (thresholds at every distinct score). Its trapezoidal
/// area equals the Mann-Whitney statistic with ties counted as one half.
pub fn roc_sampled(positives: &[f64], negatives: &[f64]) -> RocCurve {
    let thresholds = distinct_descending(positives.iter().chain(negatives).copied());
    RocCurve::sweep(positives, negatives, thresholds)
}

/// AUC with negatives drawn uniformly over all pixels, averaged over trials.
pub fn auc_borji(
    map: &SaliencyMap,
    fixations: &FixationSet,
    negatives_per_trial: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let pos = positives(map, fixations.points())?;
    if trials == 0 || negatives_per_trial == 0 {
        return Err(Error::InvalidParameter(
            "trials and negatives_per_trial must be >= 1".into(),
        ));
    }
    let mut total = 0.0;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, UNIFORM_DOMAIN, fixations.image_id(), trial as u64);
        let neg: Vec<f64> = (0..negatives_per_trial)
            .map(|_| map.values()[rng.gen_range(0..map.len())])
            .collect();
        total += roc_sampled(&pos, &neg).auc();
    }
    Ok(total / trials as f64)
}

/// AUC with negatives drawn from other images' fixations.
pub fn sauc(
    map: &SaliencyMap,
    fixations: &FixationSet,
    dataset: &Dataset,
    config: &ShuffleConfig,
) -> Result<f64> {
    config.validate()?;
    let pos = positives(map, fixations.points())?;
    if (map.width(), map.height()) != (dataset.width(), dataset.height()) {
        return Err(Error::DimensionMismatch(
            map.width(),
            map.height(),
            dataset.width(),
            dataset.height(),
        ));
    }
    let n = config.sample_size.resolve(fixations.len());
    let mut total = 0.0;
    for trial in 0..config.trials {
        let sample = draw_shuffle_sample(
            dataset,
            fixations.image_id(),
            n,
            trial,
            config.seed,
            config.with_replacement,
        )?;
        let neg: Vec<f64> = sample.points.iter().map(|&p| map.at(p)).collect();
        total += roc_sampled(&pos, &neg).auc();
    }
    Ok(total / config.trials as f64)
}

/// Parameters of the weighted F-measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WfbParams {
    pub beta_sq: f64,
    /// Side length of the square pixel-dependency kernel.
    pub dependency_size: usize,
    pub dependency_sigma: f64,
    /// Background distance at which the importance factor reaches 1.5.
    pub importance_half_distance: f64,
}

impl Default for WfbParams {
    fn default() -> Self {
        Self {
            beta_sq: 1.0,
            dependency_size: 7,
            dependency_sigma: 5.0,
            importance_half_distance: 5.0,
        }
    }
}

/// Distance from every pixel to its nearest foreground pixel, with the index
/// of that pixel. Ties go to the smallest row, then the smallest column.
/// Foreground pixels map to themselves at distance 0.
pub fn nearest_foreground(mask: &[bool], width: usize, height: usize) -> Vec<(f64, usize)> {
    const NONE: usize = usize::MAX;
    // per-column nearest foreground row (upper one on ties)
    let mut col_row = vec![NONE; width * height];
    for x in 0..width {
        let mut last = NONE;
        for y in 0..height {
            if mask[y * width + x] {
                last = y;
            }
            col_row[y * width + x] = last;
        }
        let mut next = NONE;
        for y in (0..height).rev() {
            if mask[y * width + x] {
                next = y;
            }
            let i = y * width + x;
            let above = col_row[i];
            if next != NONE && (above == NONE || next - y < y - above) {
                col_row[i] = next;
            }
        }
    }

    let mut out = vec![(f64::INFINITY, NONE); width * height];
    for y in 0..height {
        for x in 0..width {
            let mut best: Option<(usize, usize, usize)> = None; // (d2, row, col)
            let mut k = 0usize;
            loop {
                if let Some((d2, _, _)) = best {
                    if k * k > d2 {
                        break;
                    }
                }
                if k > x && x + k >= width {
                    break;
                }
                let cols = [x.checked_sub(k), (k > 0 && x + k < width).then_some(x + k)];
                for cx in cols.into_iter().flatten() {
                    let r = col_row[y * width + cx];
                    if r == NONE {
                        continue;
                    }
                    let dy = r.abs_diff(y);
                    let cand = (k * k + dy * dy, r, cx);
                    if best.map_or(true, |b| cand < b) {
                        best = Some(cand);
                    }
                }
                k += 1;
            }
            if let Some((d2, r, c)) = best {
                out[y * width + x] = ((d2 as f64).sqrt(), r * width + c);
            }
        }
    }
    out
}

fn gaussian_kernel_2d(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size as f64 - 1.0) / 2.0;
    let mut k: Vec<f64> = (0..size * size)
        .map(|i| {
            let (dx, dy) = ((i % size) as f64 - c, (i / size) as f64 - c);
            (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Same-size correlation with zero padding.
fn filter_same(src: &[f64], width: usize, height: usize, kernel: &[f64], size: usize) -> Vec<f64> {
    let half = (size / 2) as isize;
    let mut out = vec![0.0; width * height];
    for y in 0..height as isize {
        for x in 0..width as isize {
            let mut acc = 0.0;
            for ky in 0..size as isize {
                let sy = y + ky - half;
                if sy < 0 || sy >= height as isize {
                    continue;
                }
                for kx in 0..size as isize {
                    let sx = x + kx - half;
                    if sx < 0 || sx >= width as isize {
                        continue;
                    }
                    acc += kernel[(ky * size as isize + kx) as usize]
                        * src[(sy * width as isize + sx) as usize];
                }
            }
            out[(y * width as isize + x) as usize] = acc;
        }
    }
    out
}

/// Min-max scaling to `[0, 1]`; a constant map becomes all zeros.
fn unit_range(map: &SaliencyMap) -> Vec<f64> {
    let (lo, hi) = (map.min(), map.max());
    if hi > lo {
        map.values().iter().map(|&v| (v - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; map.len()]
    }
}

/// Weighted F-measure of a continuous prediction against the ground truth
/// binarized at its standard deviation.
pub fn wfb(map: &SaliencyMap, gt_map: &SaliencyMap) -> Result<f64> {
    wfb_with(map, gt_map, &WfbParams::default())
}

pub fn wfb_with(map: &SaliencyMap, gt_map: &SaliencyMap, params: &WfbParams) -> Result<f64> {
    map.same_shape(gt_map)?;
    let sd = map_stats(gt_map).std_dev;
    if sd == 0.0 {
        return Err(Error::DegenerateGroundTruth);
    }
    let mask: Vec<bool> = gt_map.values().iter().map(|&v| v > sd).collect();
    let f = unit_range(map);
    weighted_f_measure(&f, &mask, map.width(), map.height(), params)
}

/// The weighted F-measure on a `[0, 1]` prediction and a binary mask.
pub fn weighted_f_measure(
    f: &[f64],
    mask: &[bool],
    width: usize,
    height: usize,
    params: &WfbParams,
) -> Result<f64> {
    if params.dependency_size == 0 || !(params.dependency_sigma > 0.0) {
        return Err(Error::InvalidParameter("bad dependency kernel".into()));
    }
    let fg_count = mask.iter().filter(|&&m| m).count();
    if fg_count == 0 {
        return Err(Error::DegenerateGroundTruth);
    }
    let err: Vec<f64> = f
        .iter()
        .zip(mask)
        .map(|(&v, &m)| (v - if m { 1.0 } else { 0.0 }).abs())
        .collect();
    let nearest = nearest_foreground(mask, width, height);

    // background pixels borrow the error of their nearest foreground pixel so
    // the dependency filter behaves at the foreground boundary
    let borrowed: Vec<f64> = (0..err.len())
        .map(|i| if mask[i] { err[i] } else { err[nearest[i].1] })
        .collect();
    let kernel = gaussian_kernel_2d(params.dependency_size, params.dependency_sigma);
    let spread = filter_same(&borrowed, width, height, &kernel, params.dependency_size);

    let decay = 0.5f64.ln() / params.importance_half_distance;
    let (mut fg_err, mut bg_err) = (0.0, 0.0);
    for i in 0..err.len() {
        if mask[i] {
            fg_err += err[i].min(spread[i]);
        } else {
            let importance = 2.0 - (decay * nearest[i].0).exp();
            bg_err += err[i] * importance;
        }
    }
    let tp = fg_count as f64 - fg_err;
    let recall = 1.0 - fg_err / fg_count as f64;
    let precision = if tp + bg_err > 0.0 { tp / (tp + bg_err) } else { 0.0 };
    let denom = recall + params.beta_sq * precision;
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok(((1.0 + params.beta_sq) * recall * precision / denom).clamp(0.0, 1.0))
}
