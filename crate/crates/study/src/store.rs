//! Append-only JSON-lines storage for sessions and ratings.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StudyError};

pub const SESSIONS_FILE: &str = "sessions.jsonl";
pub const RATINGS_FILE: &str = "ratings.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Training,
    Main,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Created {
        session_id: String,
        subject_id: String,
        seed: u64,
        order: Vec<String>,
        phase: Phase,
        timestamp_ms: u64,
    },
    PhaseAdvanced {
        session_id: String,
        phase: Phase,
        timestamp_ms: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub session_id: String,
    pub pair_id: String,
    pub rating: u8,
    pub phase: Phase,
    pub timestamp_ms: u64,
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Open handles on both log files. Every append is flushed to disk before it
/// returns.
#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    sessions: File,
    ratings: File,
}

impl Store {
    /// Opens (creating if needed) the logs in `dir` and returns their parsed
    /// contents. Any unparsable or truncated line is an error.
    pub fn open(dir: impl AsRef<Path>) -> Result<(Self, Vec<SessionEvent>, Vec<RatingRecord>)> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir).map_err(|e| StudyError::io(&dir, e))?;
        let sp = dir.join(SESSIONS_FILE);
        let rp = dir.join(RATINGS_FILE);
        let events = read_lines(&sp)?;
        let ratings = read_lines(&rp)?;
        let open = |p: &Path| {
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .map_err(|e| StudyError::io(p, e))
        };
        Ok((
            Self {
                sessions: open(&sp)?,
                ratings: open(&rp)?,
                dir,
            },
            events,
            ratings,
        ))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn append_session_event(&mut self, event: &SessionEvent) -> Result<()> {
        let path = self.dir.join(SESSIONS_FILE);
        append(&mut self.sessions, &path, event)
    }

    pub fn append_rating(&mut self, record: &RatingRecord) -> Result<()> {
        let path = self.dir.join(RATINGS_FILE);
        append(&mut self.ratings, &path, record)
    }
}

fn append<T: Serialize>(file: &mut File, path: &Path, value: &T) -> Result<()> {
    let mut line = serde_json::to_vec(value).expect("records serialize");
    line.push(b'\n');
    file.write_all(&line).map_err(|e| StudyError::io(path, e))?;
    file.sync_data().map_err(|e| StudyError::io(path, e))
}

fn read_lines<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(StudyError::io(path, e)),
    };
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(StudyError::CorruptStorage {
            path: path.to_path_buf(),
            line: text.lines().count(),
            reason: "truncated final record".into(),
        });
    }
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| StudyError::CorruptStorage {
                path: path.to_path_buf(),
                line: i + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}
