//! Map-to-map metrics: CC, SIM, EMD and MAE.

use crate::error::{Error, Result};
use crate::map::{map_stats, SaliencyMap};
use crate::transport::solve_transport;

/// A grid of non-negative masses summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionMap {
    width: usize,
    height: usize,
    mass: Vec<f64>,
}

impl DistributionMap {
    pub fn from_map(map: &SaliencyMap) -> Result<Self> {
        let m = map.mass_normalized()?;
        Ok(Self {
            width: m.width(),
            height: m.height(),
            mass: m.into_values(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }
}

/// Pearson correlation over corresponding pixels.
pub fn cc(map_a: &SaliencyMap, map_b: &SaliencyMap) -> Result<f64> {
    map_a.same_shape(map_b)?;
    let (sa, sb) = (map_stats(map_a), map_stats(map_b));
    if sa.std_dev == 0.0 || sb.std_dev == 0.0 {
        return Err(Error::DegenerateSaliency);
    }
    let cov = map_a
        .values()
        .iter()
        .zip(map_b.values())
        .map(|(a, b)| (a - sa.mean) * (b - sb.mean))
        .sum::<f64>()
        / map_a.len() as f64;
    Ok((cov / (sa.std_dev * sb.std_dev)).clamp(-1.0, 1.0))
}

/// Histogram intersection of the two mass-normalized maps.
pub fn sim(map_a: &SaliencyMap, map_b: &SaliencyMap) -> Result<f64> {
    map_a.same_shape(map_b)?;
    let (a, b) = (DistributionMap::from_map(map_a)?, DistributionMap::from_map(map_b)?);
    let s: f64 = a.mass.iter().zip(&b.mass).map(|(x, y)| x.min(*y)).sum();
    Ok(s.min(1.0))
}

/// Mean absolute difference of the two peak-normalized maps.
pub fn mae(map_a: &SaliencyMap, map_b: &SaliencyMap) -> Result<f64> {
    map_a.same_shape(map_b)?;
    let (a, b) = (map_a.peak_normalized()?, map_b.peak_normalized()?);
    let s: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).sum();
    Ok(s / a.len() as f64)
}

/// Target resolution for EMD.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmdGrid {
    /// Largest aspect-preserving grid with at most `max_cells` cells; never
    /// finer than the input.
    Auto { max_cells: usize },
    Fixed { width: usize, height: usize },
    Native,
}

impl Default for EmdGrid {
    fn default() -> Self {
        EmdGrid::Auto { max_cells: 768 }
    }
}

impl EmdGrid {
    /// Grid size used for a `width x height` input.
    pub fn resolve(self, width: usize, height: usize) -> Result<(usize, usize)> {
        match self {
            EmdGrid::Native => Ok((width, height)),
            EmdGrid::Fixed { width: gw, height: gh } => {
                if gw == 0 || gh == 0 || gw > width || gh > height {
                    return Err(Error::InvalidParameter(format!(
                        "EMD grid {gw}x{gh} does not fit a {width}x{height} map"
                    )));
                }
                Ok((gw, gh))
            }
            EmdGrid::Auto { max_cells } => {
                if max_cells == 0 {
                    return Err(Error::InvalidParameter("max_cells must be >= 1".into()));
                }
                if width * height <= max_cells {
                    return Ok((width, height));
                }
                let s = (max_cells as f64 / (width * height) as f64).sqrt();
                let mut gw = ((width as f64 * s + 1e-9).floor() as usize).clamp(1, width);
                let mut gh = ((height as f64 * s + 1e-9).floor() as usize).clamp(1, height);
                while gw * gh > max_cells {
                    if gw >= gh && gw > 1 {
                        gw -= 1;
                    } else {
                        gh -= 1;
                    }
                }
                Ok((gw, gh))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmdConfig {
    pub grid: EmdGrid,
    pub max_iterations: usize,
}

impl Default for EmdConfig {
    fn default() -> Self {
        Self {
            grid: EmdGrid::default(),
            max_iterations: 1_000_000,
        }
    }
}

/// Overlap of each source cell with each of `dst` equal bins spanning `src`
/// cells, as `(dst, src, weight)` triples.
fn box_weights(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    let mut out = Vec::new();
    for d in 0..dst {
        let (lo, hi) = (d as f64 * scale, (d + 1) as f64 * scale);
        let first = lo.floor() as usize;
        let last = (hi.ceil() as usize).min(src);
        for s in first..last {
            let w = (hi.min(s as f64 + 1.0) - lo.max(s as f64)).max(0.0);
            if w > 0.0 {
                out.push((d, s, w));
            }
        }
    }
    out
}

/// Area-weighted box downsampling; total mass is preserved.
pub fn box_downsample(map: &SaliencyMap, width: usize, height: usize) -> Result<SaliencyMap> {
    if width == 0 || height == 0 || width > map.width() || height > map.height() {
        return Err(Error::InvalidParameter(format!(
            "cannot box-downsample {}x{} to {width}x{height}",
            map.width(),
            map.height()
        )));
    }
    if (width, height) == (map.width(), map.height()) {
        return Ok(map.clone());
    }
    let wx = box_weights(map.width(), width);
    let wy = box_weights(map.height(), height);
    let mut rows = vec![0.0; width * map.height()];
    for y in 0..map.height() {
        for &(d, s, w) in &wx {
            rows[y * width + d] += w * map.get(s, y);
        }
    }
    let mut out = vec![0.0; width * height];
    for &(d, s, w) in &wy {
        for x in 0..width {
            out[d * width + x] += w * rows[s * width + x];
        }
    }
    SaliencyMap::new(width, height, out)
}

/// Earth mover's distance with Euclidean ground distance in grid-cell units.
pub fn emd(map_a: &SaliencyMap, map_b: &SaliencyMap) -> Result<f64> {
    emd_with(map_a, map_b, &EmdConfig::default())
}

pub fn emd_with(map_a: &SaliencyMap, map_b: &SaliencyMap, config: &EmdConfig) -> Result<f64> {
    map_a.same_shape(map_b)?;
    let (gw, gh) = config.grid.resolve(map_a.width(), map_a.height())?;
    let a = DistributionMap::from_map(&box_downsample(map_a, gw, gh)?)?;
    let b = DistributionMap::from_map(&box_downsample(map_b, gw, gh)?)?;
    emd_distributions(&a, &b, config.max_iterations)
}

/// Exact EMD between two distributions on the same grid.
pub fn emd_distributions(a: &DistributionMap, b: &DistributionMap, max_iterations: usize) -> Result<f64> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    // mass shared by both cells stays in place; only the surplus moves
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for (i, (&x, &y)) in a.mass.iter().zip(&b.mass).enumerate() {
        if x > y {
            src.push((i, x - y));
        } else if y > x {
            dst.push((i, y - x));
        }
    }
    if src.is_empty() || dst.is_empty() {
        return Ok(0.0);
    }
    let w = a.width;
    let cost: Vec<f64> = src
        .iter()
        .flat_map(|&(i, _)| {
            dst.iter().map(move |&(j, _)| {
                let dx = (i % w) as f64 - (j % w) as f64;
                let dy = (i / w) as f64 - (j / w) as f64;
                (dx * dx + dy * dy).sqrt()
            })
        })
        .collect();
    let supply: Vec<f64> = src.iter().map(|p| p.1).collect();
    let demand: Vec<f64> = dst.iter().map(|p| p.1).collect();
    Ok(solve_transport(&supply, &demand, &cost, max_iterations)?.cost)
}
