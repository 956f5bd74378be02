//! Saliency maps and whole-map statistics.

use crate::error::{Error, Result};
use crate::fixation::FixationPoint;

/// A non-negative real-valued saliency grid stored row-major.
///
/// Coordinates follow the image convention: `x` is the column, `y` the row,
/// origin at the top-left pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl SaliencyMap {
    /// Builds a map, rejecting empty geometry, non-finite and negative values.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGeometry(format!(
                "width and height must be >= 1, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::InvalidGeometry(format!(
                "{width}x{height} map needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue {
                    x: i % width,
                    y: i / width,
                });
            }
            if v < 0.0 {
                return Err(Error::NegativeValue {
                    x: i % width,
                    y: i / width,
                    value: v,
                });
            }
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds a map by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn at(&self, p: FixationPoint) -> f64 {
        self.get(p.x as usize, p.y as usize)
    }

    pub fn same_shape(&self, other: &SaliencyMap) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Applies `f` to every value; the result must still be a valid map.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Rescales so the maximum equals 1.
    pub fn peak_normalized(&self) -> Result<Self> {
        let max = self.max();
        if max <= 0.0 {
            return Err(Error::ZeroMassMap);
        }
        self.map_values(|v| v / max)
    }

    /// Rescales so the values sum to 1.
    pub fn mass_normalized(&self) -> Result<Self> {
        let sum = self.sum();
        if sum <= 0.0 {
            return Err(Error::ZeroMassMap);
        }
        self.map_values(|v| v / sum)
    }

    pub fn stats(&self) -> SaliencyStats {
        map_stats(self)
    }
}

/// Mean and population standard deviation of a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaliencyStats {
    pub mean: f64,
    pub std_dev: f64,
}

/// Whole-map mean and population standard deviation (divisor = pixel count).
pub fn map_stats(map: &SaliencyMap) -> SaliencyStats {
    let n = map.len() as f64;
    let first = map.values[0];
    if map.values.iter().all(|&v| v == first) {
        return SaliencyStats {
            mean: first,
            std_dev: 0.0,
        };
    }
    let mean = map.values.iter().sum::<f64>() / n;
    // two-pass keeps the variance non-negative and stable for near-constant maps
    let var = map
        .values
        .iter()
        .map(|&v| {
            let d = v - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    SaliencyStats {
        mean,
        std_dev: var.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(
            SaliencyMap::new(2, 1, vec![0.0, -1.0]),
            Err(Error::NegativeValue { x: 1, y: 0, .. })
        ));
        assert!(matches!(
            SaliencyMap::new(1, 1, vec![f64::NAN]),
            Err(Error::NonFiniteValue { .. })
        ));
        assert!(SaliencyMap::new(0, 3, vec![]).is_err());
        assert!(SaliencyMap::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn constant_map_stats() {
        let m = SaliencyMap::filled(4, 3, 0.5).unwrap();
        let s = map_stats(&m);
        assert_eq!(s.mean, 0.5);
        assert_eq!(s.std_dev, 0.0);
    }

    #[test]
    fn two_point_stats() {
        let m = SaliencyMap::new(2, 1, vec![0.0, 1.0]).unwrap();
        let s = map_stats(&m);
        assert_eq!(s.mean, 0.5);
        assert_eq!(s.std_dev, 0.5);
    }

    #[test]
    fn three_by_three_against_direct_summation() {
        let vals: Vec<f64> = (1..=9).map(|v| v as f64 / 9.0).collect();
        let m = SaliencyMap::new(3, 3, vals.clone()).unwrap();
        let s = map_stats(&m);
        // oracle: E[x^2] - E[x]^2 over the nine values
        let mean = vals.iter().sum::<f64>() / 9.0;
        let ex2 = vals.iter().map(|v| v * v).sum::<f64>() / 9.0;
        assert_relative_eq!(s.mean, 5.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(s.mean, mean, epsilon = 1e-15);
        assert_relative_eq!(s.std_dev, (ex2 - mean * mean).sqrt(), epsilon = 1e-14);
        // values 1..9 have population variance 60/9; scaled by 1/81
        assert_relative_eq!(s.std_dev, (60.0f64 / 9.0).sqrt() / 9.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn stats_are_permutation_invariant(
            vals in proptest::collection::vec(0.0f64..10.0, 1..64),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let n = vals.len();
            let a = map_stats(&SaliencyMap::new(n, 1, vals.clone()).unwrap());
            let mut shuffled = vals;
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = map_stats(&SaliencyMap::new(1, n, shuffled).unwrap());
            prop_assert!((a.mean - b.mean).abs() < 1e-12);
            prop_assert!((a.std_dev - b.std_dev).abs() < 1e-12);
        }

        #[test]
        fn stats_follow_affine_maps(
            vals in proptest::collection::vec(0.0f64..10.0, 2..64),
            a in 0.1f64..10.0,
            b in 0.0f64..5.0,
        ) {
            let n = vals.len();
            let m = SaliencyMap::new(n, 1, vals).unwrap();
            let s = map_stats(&m);
            let t = map_stats(&m.map_values(|v| a * v + b).unwrap());
            prop_assert!((t.mean - (a * s.mean + b)).abs() < 1e-9);
            prop_assert!((t.std_dev - a * s.std_dev).abs() < 1e-9);
        }
    }
}
