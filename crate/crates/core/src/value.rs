//! Fixation-value metrics: NSS, its density-weighted form WNSS, and the
//! shuffled variants sNSS and sWNSS.
//!
//! All four z-score the prediction with its own whole-map mean and standard
//! deviation, so they are exactly invariant under `S -> a*S + b` with `a > 0`.
//! The shuffled forms subtract the NSS measured at fixations borrowed from the
//! other images of the dataset, averaged over `trials` independent draws.

use rand::seq::index;
use rand::Rng;

use crate::clustering::ClusteredFixations;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fixation::{FixationPoint, FixationSet};
use crate::map::{map_stats, SaliencyMap};
use crate::rng::trial_rng;

const SHUFFLE_DOMAIN: &str = "shuffle";

fn check_points(map: &SaliencyMap, points: &[FixationPoint]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyPoints);
    }
    for p in points {
        if p.x as usize >= map.width() || p.y as usize >= map.height() {
            return Err(Error::OutOfBounds {
                x: p.x as i64,
                y: p.y as i64,
                width: map.width(),
                height: map.height(),
            });
        }
    }
    Ok(())
}

fn check_geometry(map: &SaliencyMap, fixations: &FixationSet) -> Result<()> {
    if (map.width(), map.height()) != (fixations.width(), fixations.height()) {
        return Err(Error::DimensionMismatch(
            map.width(),
            map.height(),
            fixations.width(),
            fixations.height(),
        ));
    }
    Ok(())
}

/// Mean and standard deviation of the map, rejecting constant maps.
fn z_params(map: &SaliencyMap) -> Result<(f64, f64)> {
    let s = map_stats(map);
    if s.std_dev == 0.0 {
        return Err(Error::DegenerateSaliency);
    }
    Ok((s.mean, s.std_dev))
}

/// Mean z-scored saliency at `points`.
pub fn nss_at(map: &SaliencyMap, points: &[FixationPoint]) -> Result<f64> {
    check_points(map, points)?;
    let (mean, std) = z_params(map)?;
    let total: f64 = points.iter().map(|&p| (map.at(p) - mean) / std).sum();
    Ok(total / points.len() as f64)
}

/// Weighted mean z-scored saliency at `points`; zero-weight points are ignored.
pub fn weighted_nss_at(map: &SaliencyMap, points: &[FixationPoint], weights: &[f64]) -> Result<f64> {
    check_points(map, points)?;
    if weights.len() != points.len() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {} points",
            weights.len(),
            points.len()
        )));
    }
    if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidParameter("weights must be finite and >= 0".into()));
    }
    let weight_sum: f64 = weights.iter().sum();
    if weight_sum <= 0.0 {
        return Err(Error::NoWeightedFixations);
    }
    let (mean, std) = z_params(map)?;
    let total: f64 = points
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&p, &w)| w * (map.at(p) - mean) / std)
        .sum();
    Ok(total / weight_sum)
}

/// NSS at the image's own fixations.
pub fn nss(map: &SaliencyMap, fixations: &FixationSet) -> Result<f64> {
    check_geometry(map, fixations)?;
    nss_at(map, fixations.points())
}

/// NSS with each fixation weighted by the size of its density cluster.
pub fn wnss(map: &SaliencyMap, fixations: &FixationSet, clustered: &ClusteredFixations) -> Result<f64> {
    check_geometry(map, fixations)?;
    if clustered.len() != fixations.len() {
        return Err(Error::InvalidParameter(format!(
            "clustering covers {} points, fixation set has {}",
            clustered.len(),
            fixations.len()
        )));
    }
    weighted_nss_at(map, fixations.points(), &clustered.weights_f64())
}

/// How many borrowed points each shuffle trial draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleSize {
    /// As many as the image under evaluation has fixations.
    #[default]
    MatchFixationCount,
    Fixed(usize),
}

impl SampleSize {
    pub fn resolve(self, fixation_count: usize) -> usize {
        match self {
            SampleSize::MatchFixationCount => fixation_count,
            SampleSize::Fixed(n) => n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShuffleConfig {
    pub trials: usize,
    pub sample_size: SampleSize,
    pub seed: u64,
    pub with_replacement: bool,
}

impl Default for ShuffleConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            sample_size: SampleSize::MatchFixationCount,
            seed: 0,
            with_replacement: true,
        }
    }
}

impl ShuffleConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        Ok(())
    }
}

/// Fixations borrowed from other images for one shuffle trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ShuffleSample {
    pub points: Vec<FixationPoint>,
    /// Image each point was taken from, parallel to `points`.
    pub source_image_ids: Vec<String>,
    pub trial_index: usize,
}

/// Draws `n` points uniformly from the pooled fixations of every image except
/// `exclude`. The draw is a pure function of `(seed, exclude, trial, n)`.
pub fn draw_shuffle_sample(
    dataset: &Dataset,
    exclude: &str,
    n: usize,
    trial: usize,
    seed: u64,
    with_replacement: bool,
) -> Result<ShuffleSample> {
    if dataset.len() < 2 {
        return Err(Error::SingleImageDataset);
    }
    dataset.fixations(exclude)?;
    let mut pool: Vec<(FixationPoint, &str)> = Vec::new();
    for set in dataset.images().iter().filter(|s| s.image_id() != exclude) {
        pool.extend(set.points().iter().map(|&p| (p, set.image_id())));
    }
    if pool.is_empty() || (!with_replacement && n > pool.len()) {
        return Err(Error::SamplePoolTooSmall {
            requested: n,
            available: pool.len(),
        });
    }
    let mut rng = trial_rng(seed, SHUFFLE_DOMAIN, exclude, trial as u64);
    let picks: Vec<usize> = if with_replacement {
        (0..n).map(|_| rng.gen_range(0..pool.len())).collect()
    } else {
        index::sample(&mut rng, pool.len(), n).into_vec()
    };
    Ok(ShuffleSample {
        points: picks.iter().map(|&i| pool[i].0).collect(),
        source_image_ids: picks.iter().map(|&i| pool[i].1.to_string()).collect(),
        trial_index: trial,
    })
}

/// Mean over trials of the NSS measured at borrowed fixations.
pub fn shuffled_baseline(
    map: &SaliencyMap,
    fixations: &FixationSet,
    dataset: &Dataset,
    config: &ShuffleConfig,
) -> Result<f64> {
    config.validate()?;
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
        total += nss_at(map, &sample.points)?;
    }
    Ok(total / config.trials as f64)
}

/// Shuffled NSS: own-fixation NSS minus the shuffled baseline. The own term
/// does not depend on the trial and is computed once.
pub fn snss(
    map: &SaliencyMap,
    fixations: &FixationSet,
    dataset: &Dataset,
    config: &ShuffleConfig,
) -> Result<f64> {
    let own = nss(map, fixations)?;
    Ok(own - shuffled_baseline(map, fixations, dataset, config)?)
}

/// Shuffled WNSS: the borrowed points stay unweighted.
pub fn swnss(
    map: &SaliencyMap,
    fixations: &FixationSet,
    clustered: &ClusteredFixations,
    dataset: &Dataset,
    config: &ShuffleConfig,
) -> Result<f64> {
    let own = wnss(map, fixations, clustered)?;
    Ok(own - shuffled_baseline(map, fixations, dataset, config)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{dbscan, DbscanParams};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fp(x: u32, y: u32) -> FixationPoint {
        FixationPoint::new(x, y)
    }

    fn fset(id: &str, w: usize, h: usize, pts: Vec<FixationPoint>) -> FixationSet {
        FixationSet::new(id, w, h, 20.0, pts).unwrap()
    }

    #[test]
    fn nss_hand_arithmetic() {
        let m = SaliencyMap::new(2, 1, vec![0.0, 1.0]).unwrap();
        assert_eq!(nss_at(&m, &[fp(1, 0)]).unwrap(), 1.0);
        assert_eq!(nss_at(&m, &[fp(0, 0), fp(1, 0)]).unwrap(), 0.0);
    }

    #[test]
    fn nss_four_by_four_oracle() {
        let vals: Vec<f64> = (1..=16).map(|v| v as f64 / 16.0).collect();
        let m = SaliencyMap::new(4, 4, vals.clone()).unwrap();
        let mu = vals.iter().sum::<f64>() / 16.0;
        let sd = (vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / 16.0).sqrt();
        let expected = ((vals[0] - mu) / sd + (vals[15] - mu) / sd) / 2.0;
        assert_relative_eq!(nss_at(&m, &[fp(0, 0), fp(3, 3)]).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn nss_errors() {
        let flat = SaliencyMap::filled(3, 3, 0.4).unwrap();
        assert!(matches!(nss_at(&flat, &[fp(0, 0)]), Err(Error::DegenerateSaliency)));
        let m = SaliencyMap::new(2, 1, vec![0.0, 1.0]).unwrap();
        assert!(matches!(nss_at(&m, &[]), Err(Error::EmptyPoints)));
        assert!(matches!(nss_at(&m, &[fp(2, 0)]), Err(Error::OutOfBounds { .. })));
        let wrong = fset("a", 3, 1, vec![fp(0, 0)]);
        assert!(matches!(nss(&m, &wrong), Err(Error::DimensionMismatch(..))));
    }

    #[test]
    fn nss_is_zero_at_mean_valued_points() {
        let m = SaliencyMap::new(3, 1, vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(nss_at(&m, &[fp(1, 0), fp(1, 0)]).unwrap(), 0.0);
    }

    #[test]
    fn wnss_single_cluster_equals_nss() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = SaliencyMap::from_fn(20, 20, |_, _| rng.gen::<f64>()).unwrap();
        let pts = vec![fp(5, 5), fp(6, 5), fp(5, 6), fp(6, 6), fp(7, 7)];
        let fs = fset("a", 20, 20, pts);
        let c = dbscan(&fs, DbscanParams::new(3.0, 3).unwrap()).unwrap();
        assert_eq!(c.clusters.len(), 1);
        assert_relative_eq!(wnss(&m, &fs, &c).unwrap(), nss(&m, &fs).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn wnss_rewards_dense_cluster_on_salient_region() {
        // 9 fixations on a bright blob, 3 on a dim one
        let m = SaliencyMap::from_fn(40, 20, |x, y| {
            let d1 = (x as f64 - 10.0).powi(2) + (y as f64 - 10.0).powi(2);
            let d2 = (x as f64 - 30.0).powi(2) + (y as f64 - 10.0).powi(2);
            (-d1 / 8.0).exp() + 0.3 * (-d2 / 8.0).exp()
        })
        .unwrap();
        let mut pts: Vec<FixationPoint> = (0..9).map(|i| fp(9 + i % 3, 9 + i / 3)).collect();
        pts.extend([fp(29, 10), fp(30, 10), fp(31, 10)]);
        let fs = fset("a", 40, 20, pts);
        let c = dbscan(&fs, DbscanParams::new(3.0, 3).unwrap()).unwrap();
        let sizes: Vec<usize> = c.clusters.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![9, 3]);
        assert!(wnss(&m, &fs, &c).unwrap() > nss(&m, &fs).unwrap());
    }

    #[test]
    fn wnss_three_cluster_weighted_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = SaliencyMap::from_fn(30, 30, |_, _| rng.gen::<f64>()).unwrap();
        let pts = vec![
            fp(2, 2), fp(3, 2), fp(2, 3), fp(3, 3),
            fp(15, 15), fp(16, 15), fp(15, 16),
            fp(25, 3), fp(26, 3), fp(25, 4), fp(26, 4), fp(27, 4),
            fp(10, 27),
        ];
        let fs = fset("a", 30, 30, pts.clone());
        let c = dbscan(&fs, DbscanParams::new(2.0, 3).unwrap()).unwrap();
        assert_eq!(c.weights, vec![4, 4, 4, 4, 3, 3, 3, 5, 5, 5, 5, 5, 0]);

        let vals = m.values();
        let mu = vals.iter().sum::<f64>() / vals.len() as f64;
        let sd = (vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / vals.len() as f64).sqrt();
        let (mut num, mut den) = (0.0, 0.0);
        for (p, &w) in pts.iter().zip(&c.weights) {
            num += w as f64 * (m.get(p.x as usize, p.y as usize) - mu) / sd;
            den += w as f64;
        }
        assert_relative_eq!(wnss(&m, &fs, &c).unwrap(), num / den, epsilon = 1e-12);
    }

    #[test]
    fn all_noise_is_an_error() {
        let m = SaliencyMap::new(10, 1, (0..10).map(|v| v as f64).collect()).unwrap();
        let fs = fset("a", 10, 1, vec![fp(0, 0), fp(9, 0)]);
        let c = dbscan(&fs, DbscanParams::new(1.0, 3).unwrap()).unwrap();
        assert!(matches!(wnss(&m, &fs, &c), Err(Error::NoWeightedFixations)));
    }

    fn toy_dataset() -> Dataset {
        Dataset::new(vec![
            fset("a", 8, 8, vec![fp(1, 1), fp(2, 2), fp(3, 3)]),
            fset("b", 8, 8, vec![fp(6, 6), fp(7, 7)]),
            fset("c", 8, 8, vec![fp(0, 7), fp(4, 4), fp(5, 1), fp(5, 2)]),
        ])
        .unwrap()
    }

    #[test]
    fn shuffle_excludes_current_image_and_is_deterministic() {
        let ds = Dataset::new(vec![
            fset("a", 8, 8, vec![fp(1, 1), fp(2, 2)]),
            fset("b", 8, 8, vec![fp(6, 6), fp(7, 7), fp(5, 5)]),
        ])
        .unwrap();
        let b: Vec<FixationPoint> = ds.get("b").unwrap().points().to_vec();
        for trial in 0..20 {
            let s = draw_shuffle_sample(&ds, "a", 10, trial, 3, true).unwrap();
            assert!(s.points.iter().all(|p| b.contains(p)));
            assert!(s.source_image_ids.iter().all(|id| id == "b"));
            assert_eq!(s, draw_shuffle_sample(&ds, "a", 10, trial, 3, true).unwrap());
        }
        let single = Dataset::new(vec![fset("a", 8, 8, vec![fp(1, 1)])]).unwrap();
        assert!(matches!(
            draw_shuffle_sample(&single, "a", 1, 0, 0, true),
            Err(Error::SingleImageDataset)
        ));
        assert!(matches!(
            draw_shuffle_sample(&ds, "a", 4, 0, 0, false),
            Err(Error::SamplePoolTooSmall { .. })
        ));
        let s = draw_shuffle_sample(&ds, "a", 3, 0, 0, false).unwrap();
        let mut pts = s.points.clone();
        pts.sort();
        pts.dedup();
        assert_eq!(pts.len(), 3);
    }

    #[test]
    fn shuffle_distribution_matches_pool_histogram() {
        // pool for "a" is b (2 points) + c (4 points) with (5,5)-style repeats
        let ds = Dataset::new(vec![
            fset("a", 8, 8, vec![fp(1, 1)]),
            fset("b", 8, 8, vec![fp(6, 6), fp(7, 7), fp(6, 6)]),
            fset("c", 8, 8, vec![fp(0, 7), fp(4, 4), fp(6, 6)]),
        ])
        .unwrap();
        let pool = [fp(6, 6), fp(7, 7), fp(6, 6), fp(0, 7), fp(4, 4), fp(6, 6)];
        let mut expected = std::collections::BTreeMap::new();
        for p in pool {
            *expected.entry(p).or_insert(0.0) += 1.0 / pool.len() as f64;
        }
        let mut observed = std::collections::BTreeMap::new();
        let draws = 1000;
        for trial in 0..draws {
            for p in draw_shuffle_sample(&ds, "a", 100, trial, 17, true).unwrap().points {
                *observed.entry(p).or_insert(0.0) += 1.0;
            }
        }
        let total = (draws * 100) as f64;
        let chi2: f64 = expected
            .iter()
            .map(|(p, &prob)| {
                let o = observed.get(p).copied().unwrap_or(0.0);
                (o - prob * total).powi(2) / (prob * total)
            })
            .sum();
        assert_eq!(observed.len(), expected.len());
        // 3 degrees of freedom; p = 0.001 critical value is 16.27
        assert!(chi2 < 16.27, "chi2 = {chi2}");
    }

    #[test]
    fn snss_matches_explicit_trial_loop() {
        let ds = toy_dataset();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let m = SaliencyMap::from_fn(8, 8, |_, _| rng.gen::<f64>()).unwrap();
        let fs = ds.get("a").unwrap();
        let cfg = ShuffleConfig::with_seed(42);

        let mut acc = 0.0;
        for t in 0..100 {
            let r = draw_shuffle_sample(&ds, "a", fs.len(), t, 42, true).unwrap();
            acc += nss_at(&m, fs.points()).unwrap() - nss_at(&m, &r.points).unwrap();
        }
        assert_relative_eq!(snss(&m, fs, &ds, &cfg).unwrap(), acc / 100.0, epsilon = 1e-12);

        let c = ClusteredFixations::from_labels(&[Some(0), Some(0), None]);
        let mut acc = 0.0;
        for t in 0..100 {
            let r = draw_shuffle_sample(&ds, "a", fs.len(), t, 42, true).unwrap();
            acc += weighted_nss_at(&m, fs.points(), &[2.0, 2.0, 0.0]).unwrap()
                - nss_at(&m, &r.points).unwrap();
        }
        assert_relative_eq!(swnss(&m, fs, &c, &ds, &cfg).unwrap(), acc / 100.0, epsilon = 1e-12);
    }

    #[test]
    fn swnss_single_cluster_equals_snss() {
        let ds = toy_dataset();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = SaliencyMap::from_fn(8, 8, |_, _| rng.gen::<f64>()).unwrap();
        let fs = ds.get("c").unwrap();
        let c = ClusteredFixations::from_labels(&[Some(0); 4]);
        let cfg = ShuffleConfig::with_seed(9);
        assert_relative_eq!(
            swnss(&m, fs, &c, &ds, &cfg).unwrap(),
            snss(&m, fs, &ds, &cfg).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn snss_approaches_nss_under_uniform_shuffle() {
        // other images fixate every pixel once, so the shuffled baseline
        // estimates the whole-map mean z-score, which is 0
        let (w, h) = (10, 10);
        let all: Vec<FixationPoint> = (0..h as u32)
            .flat_map(|y| (0..w as u32).map(move |x| fp(x, y)))
            .collect();
        let ds = Dataset::new(vec![
            fset("a", w, h, vec![fp(2, 3), fp(7, 7), fp(5, 1)]),
            fset("b", w, h, all.clone()),
            fset("c", w, h, all),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = SaliencyMap::from_fn(w, h, |_, _| rng.gen::<f64>()).unwrap();
        let fs = ds.get("a").unwrap();
        let cfg = ShuffleConfig {
            trials: 2000,
            sample_size: SampleSize::Fixed(100),
            ..ShuffleConfig::with_seed(1)
        };
        let diff = nss(&m, fs).unwrap() - snss(&m, fs, &ds, &cfg).unwrap();
        assert!(diff.abs() < 0.02, "correction term {diff}");
    }

    #[test]
    fn shuffled_metrics_are_seed_deterministic() {
        let ds = toy_dataset();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = SaliencyMap::from_fn(8, 8, |_, _| rng.gen::<f64>()).unwrap();
        let fs = ds.get("b").unwrap();
        let cfg = ShuffleConfig::with_seed(77);
        let a = snss(&m, fs, &ds, &cfg).unwrap();
        let b = snss(&m, fs, &ds, &cfg).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(snss(&m, fs, &ds, &ShuffleConfig { trials: 0, ..cfg }).is_err());
    }

    #[test]
    fn snss_variance_shrinks_with_more_trials() {
        let ds = toy_dataset();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = SaliencyMap::from_fn(8, 8, |_, _| rng.gen::<f64>()).unwrap();
        let fs = ds.get("a").unwrap();
        let var = |trials: usize| {
            let vals: Vec<f64> = (0..50)
                .map(|seed| {
                    let cfg = ShuffleConfig {
                        trials,
                        ..ShuffleConfig::with_seed(seed)
                    };
                    snss(&m, fs, &ds, &cfg).unwrap()
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64
        };
        assert!(var(1000) < var(10));
    }
}
