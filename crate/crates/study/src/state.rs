//! Session bookkeeping. All mutations go through [`Study`], which persists
//! each event before applying it.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wnss_harness::mos::{MAX_RATING, MIN_RATING};
use wnss_harness::MosTable;

use crate::config::StudyConfig;
use crate::error::{Result, StudyError};
use crate::store::{now_ms, Phase, RatingRecord, SessionEvent, Store};

/// Presentation order of the main-phase pairs for a session seed.
pub fn session_order(pair_ids: &[String], seed: u64) -> Vec<String> {
    let mut order = pair_ids.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub session_id: String,
    pub subject_id: String,
    pub seed: u64,
    pub order: Vec<String>,
    pub phase: Phase,
    pub training_done: usize,
    pub main_done: usize,
    rated: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub rated: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionStatus {
    pub session_id: String,
    pub subject_id: String,
    pub phase: Phase,
    pub progress: Progress,
    pub training_progress: Progress,
    pub done: bool,
}

/// The pair a session should rate next, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NextPair {
    pub phase: Phase,
    pub pair_id: Option<String>,
    /// Training category label.
    pub category: Option<String>,
    pub progress: Progress,
}

#[derive(Debug)]
pub struct Study {
    config: Arc<StudyConfig>,
    sessions: BTreeMap<String, Session>,
    ratings: Vec<RatingRecord>,
    store: Option<Store>,
}

impl Study {
    /// A study without persistence.
    pub fn in_memory(config: Arc<StudyConfig>) -> Self {
        Self {
            config,
            sessions: BTreeMap::new(),
            ratings: Vec::new(),
            store: None,
        }
    }

    /// Opens the storage directory and replays it. Refuses to start if a log
    /// is corrupt or does not fit the configuration.
    pub fn open(config: Arc<StudyConfig>, dir: impl AsRef<std::path::Path>) -> Result<Self> {
        let (store, events, ratings) = Store::open(dir)?;
        let mut study = Self::in_memory(config);
        let corrupt = |file: &str, line: usize, reason: String| StudyError::CorruptStorage {
            path: store.dir().join(file),
            line,
            reason,
        };
        for (i, ev) in events.into_iter().enumerate() {
            study
                .apply_event(ev)
                .map_err(|e| corrupt(crate::store::SESSIONS_FILE, i + 1, e.to_string()))?;
        }
        for (i, r) in ratings.into_iter().enumerate() {
            study
                .apply_rating(r)
                .map_err(|e| corrupt(crate::store::RATINGS_FILE, i + 1, e.to_string()))?;
        }
        for s in study.sessions.values() {
            if s.phase == Phase::Main && s.training_done < study.config.training.len() {
                return Err(corrupt(
                    crate::store::SESSIONS_FILE,
                    0,
                    format!("session {} left training early", s.session_id),
                ));
            }
        }
        study.store = Some(store);
        Ok(study)
    }

    pub fn config(&self) -> &StudyConfig {
        &self.config
    }

    fn initial_phase(&self) -> Phase {
        if self.config.training.is_empty() {
            Phase::Main
        } else {
            Phase::Training
        }
    }

    fn apply_event(&mut self, ev: SessionEvent) -> Result<()> {
        match ev {
            SessionEvent::Created {
                session_id,
                subject_id,
                seed,
                order,
                phase,
                ..
            } => {
                let mut expected: Vec<&str> = self.config.pairs.iter().map(|p| p.pair_id.as_str()).collect();
                let mut got: Vec<&str> = order.iter().map(String::as_str).collect();
                expected.sort_unstable();
                got.sort_unstable();
                if expected != got {
                    return Err(StudyError::Config(format!(
                        "session {session_id} order does not match the configured pairs"
                    )));
                }
                if self.sessions.contains_key(&session_id) {
                    return Err(StudyError::Config(format!("session {session_id} created twice")));
                }
                self.sessions.insert(
                    session_id.clone(),
                    Session {
                        session_id,
                        subject_id,
                        seed,
                        order,
                        phase,
                        training_done: 0,
                        main_done: 0,
                        rated: BTreeSet::new(),
                    },
                );
            }
            SessionEvent::PhaseAdvanced { session_id, phase, .. } => {
                let s = self
                    .sessions
                    .get_mut(&session_id)
                    .ok_or(StudyError::UnknownSession(session_id))?;
                if s.phase != Phase::Training || phase != Phase::Main {
                    return Err(StudyError::PhaseConflict("only training -> main is allowed".into()));
                }
                s.phase = phase;
            }
        }
        Ok(())
    }

    /// Checks that `pair_id` is the session's next pair and returns it.
    fn expected_pair(&self, session_id: &str, phase: Phase, pair_id: &str) -> Result<()> {
        let s = self.session(session_id)?;
        if s.rated.contains(pair_id) {
            return Err(StudyError::AlreadyRated(pair_id.into()));
        }
        if self.config.find(pair_id).is_none() {
            return Err(StudyError::UnknownPair(pair_id.into()));
        }
        let expected = self.next_pair_id(s, phase);
        if expected.as_deref() != Some(pair_id) {
            return Err(StudyError::OutOfOrder {
                expected,
                got: pair_id.into(),
            });
        }
        Ok(())
    }

    fn next_pair_id(&self, s: &Session, phase: Phase) -> Option<String> {
        match phase {
            Phase::Training => self.config.training.get(s.training_done).map(|p| p.pair_id.clone()),
            Phase::Main => s.order.get(s.main_done).cloned(),
        }
    }

    fn apply_rating(&mut self, r: RatingRecord) -> Result<()> {
        if !(MIN_RATING..=MAX_RATING).contains(&r.rating) {
            return Err(StudyError::RatingOutOfRange(r.rating as i64));
        }
        let phase = self.session(&r.session_id)?.phase;
        let in_phase = match r.phase {
            // training ratings can only precede the phase change; during
            // replay the change may already be applied
            Phase::Training => true,
            Phase::Main => phase == Phase::Main,
        };
        if !in_phase {
            return Err(StudyError::PhaseConflict("main rating during training".into()));
        }
        self.expected_pair(&r.session_id, r.phase, &r.pair_id)?;
        let s = self.sessions.get_mut(&r.session_id).expect("checked above");
        s.rated.insert(r.pair_id.clone());
        match r.phase {
            Phase::Training => s.training_done += 1,
            Phase::Main => s.main_done += 1,
        }
        self.ratings.push(r);
        Ok(())
    }

    pub fn session(&self, session_id: &str) -> Result<&Session> {
        self.sessions
            .get(session_id)
            .ok_or_else(|| StudyError::UnknownSession(session_id.into()))
    }

    pub fn sessions(&self) -> impl Iterator<Item = &Session> {
        self.sessions.values()
    }

    pub fn ratings(&self) -> &[RatingRecord] {
        &self.ratings
    }

    /// Starts a session. Without a seed one is drawn from the OS.
    pub fn create_session(&mut self, subject_id: &str, seed: Option<u64>) -> Result<SessionStatus> {
        let seed = seed.unwrap_or_else(rand::random);
        let ids: Vec<String> = self.config.pairs.iter().map(|p| p.pair_id.clone()).collect();
        let ev = SessionEvent::Created {
            session_id: uuid::Uuid::new_v4().to_string(),
            subject_id: subject_id.to_string(),
            seed,
            order: session_order(&ids, seed),
            phase: self.initial_phase(),
            timestamp_ms: now_ms(),
        };
        let SessionEvent::Created { session_id, .. } = &ev else { unreachable!() };
        let session_id = session_id.clone();
        if let Some(store) = &mut self.store {
            store.append_session_event(&ev)?;
        }
        self.apply_event(ev)?;
        self.status(&session_id)
    }

    pub fn status(&self, session_id: &str) -> Result<SessionStatus> {
        let s = self.session(session_id)?;
        Ok(SessionStatus {
            session_id: s.session_id.clone(),
            subject_id: s.subject_id.clone(),
            phase: s.phase,
            progress: Progress {
                rated: s.main_done,
                total: s.order.len(),
            },
            training_progress: Progress {
                rated: s.training_done,
                total: self.config.training.len(),
            },
            done: s.phase == Phase::Main && s.main_done == s.order.len(),
        })
    }

    pub fn next(&self, session_id: &str) -> Result<NextPair> {
        let s = self.session(session_id)?;
        let pair_id = self.next_pair_id(s, s.phase);
        let (rated, total) = match s.phase {
            Phase::Training => (s.training_done, self.config.training.len()),
            Phase::Main => (s.main_done, s.order.len()),
        };
        Ok(NextPair {
            phase: s.phase,
            category: pair_id
                .as_deref()
                .and_then(|id| self.config.find(id))
                .and_then(|p| p.category.clone()),
            pair_id,
            progress: Progress { rated, total },
        })
    }

    /// Records a rating for the session's current pair. The record is on disk
    /// when this returns `Ok`.
    pub fn rate(&mut self, session_id: &str, pair_id: &str, rating: i64) -> Result<NextPair> {
        if !(MIN_RATING as i64..=MAX_RATING as i64).contains(&rating) {
            return Err(StudyError::RatingOutOfRange(rating));
        }
        let phase = self.session(session_id)?.phase;
        self.expected_pair(session_id, phase, pair_id)?;
        let record = RatingRecord {
            session_id: session_id.into(),
            pair_id: pair_id.into(),
            rating: rating as u8,
            phase,
            timestamp_ms: now_ms(),
        };
        if let Some(store) = &mut self.store {
            store.append_rating(&record)?;
        }
        self.apply_rating(record)?;
        self.next(session_id)
    }

    /// Moves a session from training to the main phase once every training
    /// pair is rated.
    pub fn advance_phase(&mut self, session_id: &str) -> Result<SessionStatus> {
        let s = self.session(session_id)?;
        if s.phase != Phase::Training {
            return Err(StudyError::PhaseConflict("session is already in the main phase".into()));
        }
        if s.training_done < self.config.training.len() {
            return Err(StudyError::PhaseConflict(format!(
                "{} of {} training pairs rated",
                s.training_done,
                self.config.training.len()
            )));
        }
        let ev = SessionEvent::PhaseAdvanced {
            session_id: session_id.into(),
            phase: Phase::Main,
            timestamp_ms: now_ms(),
        };
        if let Some(store) = &mut self.store {
            store.append_session_event(&ev)?;
        }
        self.apply_event(ev)?;
        self.status(session_id)
    }

    /// Mean opinion scores over main-phase ratings.
    pub fn mos(&self) -> Result<MosTable> {
        let lookup: BTreeMap<&str, (&str, &str)> = self
            .config
            .pairs
            .iter()
            .map(|p| (p.pair_id.as_str(), (p.model_id.as_str(), p.image_id.as_str())))
            .collect();
        let rows = self
            .ratings
            .iter()
            .filter(|r| r.phase == Phase::Main)
            .filter_map(|r| lookup.get(r.pair_id.as_str()).map(|&(m, i)| (m, i, r.rating)));
        Ok(MosTable::from_ratings(rows)?)
    }
}
