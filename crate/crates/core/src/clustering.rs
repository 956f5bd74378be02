//! Density clustering of fixations and cluster-cardinality weights.
//!
//! Fixations are grouped with DBSCAN over Euclidean pixel distance. Every
//! fixation in a cluster is weighted by the cluster's size; fixations
//! rejected as noise get weight zero and drop out of weighted scores.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::fixation::FixationSet;

/// DBSCAN neighbourhood radius (pixels) and core-point threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbscanParams {
    pub eps: f64,
    pub min_pts: usize,
}

impl DbscanParams {
    pub fn new(eps: f64, min_pts: usize) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        if min_pts == 0 {
            return Err(Error::InvalidParameter("min_pts must be >= 1".into()));
        }
        Ok(Self { eps, min_pts })
    }

    /// `eps` spanning one degree of visual angle and `min_pts = 3`, so groups
    /// of two or fewer isolated fixations are rejected.
    pub fn for_geometry(pixels_per_degree: f64) -> Result<Self> {
        Self::new(default_eps(pixels_per_degree)?, 3)
    }
}

/// Diameter, in pixels, of the circle subtended by one degree of visual angle.
pub fn default_eps(pixels_per_degree: f64) -> Result<f64> {
    if !(pixels_per_degree > 0.0) || !pixels_per_degree.is_finite() {
        return Err(Error::NonPositiveGeometry(pixels_per_degree));
    }
    Ok(pixels_per_degree)
}

/// A partition of fixation indices into clusters and noise, with weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusteredFixations {
    /// Member indices of each cluster, ascending, clusters in discovery order.
    pub clusters: Vec<Vec<usize>>,
    /// Indices rejected as noise, ascending.
    pub noise: Vec<usize>,
    /// Per-point weight: the size of the point's cluster, 0 for noise.
    pub weights: Vec<usize>,
}

impl ClusteredFixations {
    /// Builds a partition from per-point labels (`None` = noise) and assigns
    /// weights.
    pub fn from_labels(labels: &[Option<usize>]) -> Self {
        let n_clusters = labels.iter().flatten().map(|&c| c + 1).max().unwrap_or(0);
        let mut clusters = vec![Vec::new(); n_clusters];
        let mut noise = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            match l {
                Some(c) => clusters[*c].push(i),
                None => noise.push(i),
            }
        }
        clusters.retain(|c| !c.is_empty());
        assign_weights(Self {
            clusters,
            noise,
            weights: vec![0; labels.len()],
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Cluster index of every point, `None` for noise.
    pub fn labels(&self) -> Vec<Option<usize>> {
        let mut labels = vec![None; self.weights.len()];
        for (c, members) in self.clusters.iter().enumerate() {
            for &i in members {
                labels[i] = Some(c);
            }
        }
        labels
    }

    pub fn total_weight(&self) -> usize {
        self.weights.iter().sum()
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|&w| w as f64).collect()
    }
}

/// Sets every clustered point's weight to its cluster's cardinality and every
/// noise point's weight to zero.
pub fn assign_weights(mut clustered: ClusteredFixations) -> ClusteredFixations {
    let n = clustered.clusters.iter().map(Vec::len).sum::<usize>() + clustered.noise.len();
    clustered.weights = vec![0; n];
    for members in &clustered.clusters {
        for &i in members {
            clustered.weights[i] = members.len();
        }
    }
    clustered
}

/// DBSCAN with inclusive radius (`d <= eps`) and the point itself counted in
/// its neighbourhood.
///
/// Points are scanned in input order and clusters grown breadth-first; a
/// border point reachable from several clusters stays with the first one that
/// claims it, so reruns on the same input give the same labelling.
pub fn dbscan(points: &FixationSet, params: DbscanParams) -> Result<ClusteredFixations> {
    points.require_non_empty()?;
    let pts = points.points();
    let n = pts.len();
    let eps_sq = params.eps * params.eps;

    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| pts[i].dist_sq(pts[j]) <= eps_sq)
                .collect()
        })
        .collect();
    let is_core: Vec<bool> = neighbours.iter().map(|nb| nb.len() >= params.min_pts).collect();

    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut next_cluster = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start].is_some() || !is_core[start] {
            continue;
        }
        let cluster = next_cluster;
        next_cluster += 1;
        labels[start] = Some(cluster);
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            if !is_core[p] {
                continue;
            }
            for &q in &neighbours[p] {
                if labels[q].is_none() {
                    labels[q] = Some(cluster);
                    queue.push_back(q);
                }
            }
        }
    }
    Ok(ClusteredFixations::from_labels(&labels))
}
