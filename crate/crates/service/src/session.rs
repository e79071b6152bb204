//! In-memory sessions with idle expiry.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, Instant};

use rsvp_core::dashboard::DashboardDoc;
use rsvp_core::data_model::{IngestOptions, RunTable};
use rsvp_core::design_space::EncodingState;
use rsvp_core::visrec::Task;

use crate::error::ApiError;

pub const DEFAULT_IDLE: Duration = Duration::from_secs(60 * 60);

/// Everything one analyst works on: a single table plus the UI state built on it.
#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    /// Name the emitted specs use to refer to the table.
    pub data_ref: String,
    pub table: Arc<RunTable>,
    pub enc: EncodingState,
    pub tasks: Vec<Task>,
    pub doc: DashboardDoc,
}

impl Session {
    pub fn new(id: String, data_ref: String, table: RunTable) -> Self {
        Session {
            id,
            data_ref,
            table: Arc::new(table),
            enc: EncodingState::default(),
            tasks: Vec::new(),
            doc: DashboardDoc::new(),
        }
    }
}

struct Slot {
    session: Arc<Mutex<Session>>,
    last_used: Instant,
}

#[derive(Debug, Clone, Copy)]
pub struct StoreConfig {
    pub idle: Duration,
    pub ingest: IngestOptions,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig {
            idle: DEFAULT_IDLE,
            ingest: IngestOptions::default(),
        }
    }
}

/// Shared session map. Each session has its own lock so writers never block other sessions.
pub struct SessionStore {
    slots: Mutex<HashMap<String, Slot>>,
    pub config: StoreConfig,
}

impl SessionStore {
    pub fn new(config: StoreConfig) -> Self {
        SessionStore {
            slots: Mutex::new(HashMap::new()),
            config,
        }
    }

    fn slots(&self) -> MutexGuard<'_, HashMap<String, Slot>> {
        self.slots
            .lock()
            .unwrap_or_else(|poisoned| poisoned.into_inner())
    }

    pub fn create(&self, data_ref: &str, table: RunTable) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let slot = Slot {
            session: Arc::new(Mutex::new(Session::new(
                id.clone(),
                data_ref.to_string(),
                table,
            ))),
            last_used: Instant::now(),
        };
        self.slots().insert(id.clone(), slot);
        id
    }

    pub fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let now = Instant::now();
        let mut slots = self.slots();
        match slots.get_mut(id) {
            Some(slot) if now.duration_since(slot.last_used) <= self.config.idle => {
                slot.last_used = now;
                Ok(slot.session.clone())
            }
            Some(_) => {
                slots.remove(id);
                Err(not_found(id))
            }
            None => Err(not_found(id)),
        }
    }

    pub fn remove(&self, id: &str) -> Result<(), ApiError> {
        self.slots()
            .remove(id)
            .map(|_| ())
            .ok_or_else(|| not_found(id))
    }

    /// Drops sessions idle for longer than the configured limit; returns how many.
    pub fn sweep(&self) -> usize {
        let now = Instant::now();
        let idle = self.config.idle;
        let mut slots = self.slots();
        let before = slots.len();
        slots.retain(|_, s| now.duration_since(s.last_used) <= idle);
        before - slots.len()
    }

    pub fn len(&self) -> usize {
        self.slots().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn not_found(id: &str) -> ApiError {
    ApiError::new("SessionNotFound", format!("no live session `{id}`"))
}

pub fn lock(session: &Mutex<Session>) -> MutexGuard<'_, Session> {
    session
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rsvp_core::data_model::load_csv;

    fn table() -> RunTable {
        load_csv("a\n1\n2\n", &IngestOptions::default()).unwrap()
    }

    #[test]
    fn idle_sessions_expire() {
        let store = SessionStore::new(StoreConfig {
            idle: Duration::ZERO,
            ..StoreConfig::default()
        });
        let id = store.create("t", table());
        std::thread::sleep(Duration::from_millis(5));
        assert_eq!(store.get(&id).unwrap_err().code, "SessionNotFound");
        assert!(store.is_empty());
        store.create("t", table());
        std::thread::sleep(Duration::from_millis(5));
        assert_eq!(store.sweep(), 1);
    }

    #[test]
    fn live_sessions_are_shared() {
        let store = SessionStore::new(StoreConfig::default());
        let id = store.create("t", table());
        lock(&store.get(&id).unwrap()).tasks.push(Task::Fitting);
        assert_eq!(lock(&store.get(&id).unwrap()).tasks, [Task::Fitting]);
        store.remove(&id).unwrap();
        assert!(store.get(&id).is_err());
    }
}
