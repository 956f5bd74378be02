//! Saliency evaluation metrics with fixation-density weighting.
//!
//! The crate covers the value metrics (NSS, WNSS and their shuffled forms),
//! location metrics (AUC variants, weighted F-measure), distribution metrics
//! (CC, SIM, EMD, MAE), ground-truth map construction, DBSCAN clustering of
//! fixations and the map/fixation file formats.

pub mod clustering;
pub mod colormap;
pub mod dataset;
pub mod distribution;
pub mod error;
pub mod fixation;
pub mod gt;
pub mod io;
pub mod location;
pub mod map;
pub mod rng;
pub mod transport;
pub mod value;

pub use clustering::{dbscan, ClusteredFixations, DbscanParams};
pub use dataset::{Dataset, DatasetManifest, ManifestEntry};
pub use distribution::{cc, emd, emd_with, mae, sim, DistributionMap, EmdConfig, EmdGrid};
pub use error::{Error, Result};
pub use fixation::{FixationPoint, FixationSet};
pub use gt::{build_ground_truth_map, GaussianKernelSpec, GtNormalization};
pub use location::{auc_borji, auc_judd, sauc, wfb, wfb_with, WfbParams};
pub use map::{map_stats, SaliencyMap, SaliencyStats};
pub use value::{nss, snss, swnss, wnss, SampleSize, ShuffleConfig};
