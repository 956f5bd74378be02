//! Fixation points and per-image fixation sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integer pixel location: `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FixationPoint {
    pub x: u32,
    pub y: u32,
}

impl FixationPoint {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist_sq(self, other: FixationPoint) -> f64 {
        let dx = self.x as f64 - other.x as f64;
        let dy = self.y as f64 - other.y as f64;
        dx * dx + dy * dy
    }
}

/// All fixations recorded on one image, plus its viewing geometry.
///
/// Points keep file order and duplicates: each entry is an independent gaze
/// sample, so repeated pixels add density.
#[derive(Debug, Clone, PartialEq)]
pub struct FixationSet {
    image_id: String,
    width: usize,
    height: usize,
    pixels_per_degree: f64,
    points: Vec<FixationPoint>,
}

impl FixationSet {
    pub fn new(
        image_id: impl Into<String>,
        width: usize,
        height: usize,
        pixels_per_degree: f64,
        points: Vec<FixationPoint>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGeometry(format!(
                "image must be at least 1x1, got {width}x{height}"
            )));
        }
        if !(pixels_per_degree > 0.0) || !pixels_per_degree.is_finite() {
            return Err(Error::NonPositiveGeometry(pixels_per_degree));
        }
        for p in &points {
            if p.x as usize >= width || p.y as usize >= height {
                return Err(Error::OutOfBounds {
                    x: p.x as i64,
                    y: p.y as i64,
                    width,
                    height,
                });
            }
        }
        Ok(Self {
            image_id: image_id.into(),
            width,
            height,
            pixels_per_degree,
            points,
        })
    }

    pub fn image_id(&self) -> &str {
        &self.image_id
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels_per_degree(&self) -> f64 {
        self.pixels_per_degree
    }

    pub fn points(&self) -> &[FixationPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Copy with repeated pixels collapsed to their first occurrence.
    pub fn deduplicated(&self) -> Self {
        let mut seen = std::collections::HashSet::new();
        let points = self
            .points
            .iter()
            .copied()
            .filter(|p| seen.insert(*p))
            .collect();
        Self {
            points,
            ..self.clone()
        }
    }

    /// Same set translated by `(dx, dy)`; fails if any point leaves the image.
    pub fn translated(&self, dx: i64, dy: i64) -> Result<Self> {
        let mut points = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let x = p.x as i64 + dx;
            let y = p.y as i64 + dy;
            if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
                return Err(Error::OutOfBounds {
                    x,
                    y,
                    width: self.width,
                    height: self.height,
                });
            }
            points.push(FixationPoint::new(x as u32, y as u32));
        }
        Ok(Self {
            points,
            ..self.clone()
        })
    }

    pub(crate) fn require_non_empty(&self) -> Result<()> {
        if self.points.is_empty() {
            Err(Error::EmptyPoints)
        } else {
            Ok(())
        }
    }
}
