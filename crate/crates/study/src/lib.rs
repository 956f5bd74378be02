//! Rating study service: sessions with a fixed training phase followed by a
//! per-session random order of (ground truth, prediction) pairs, rated on a
//! 1..=5 scale and stored as append-only JSON lines.

pub mod api;
pub mod config;
pub mod error;
pub mod state;
pub mod store;

pub use api::{router, serve, AppState};
pub use config::{StudyConfig, StudyPair, TRAINING_PAIRS};
pub use error::{Result, StudyError};
pub use state::{session_order, Study};
pub use store::{Phase, RatingRecord};
