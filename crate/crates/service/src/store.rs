use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use log::{info, warn};
use parking_lot::{Mutex, RwLock};

use crate::error::ApiError;
use crate::session::{Session, SessionSnapshot};

pub fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// 128 random bits from the thread-local CSPRNG, as hex.
pub fn new_session_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

/// Live sessions. Each session sits behind its own lock, so mutations of one
/// session are serialized while different sessions proceed independently.
/// With a state directory every mutation is written through as a JSON
/// snapshot before the lock is released.
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    state_dir: Option<PathBuf>,
    ttl: Duration,
}

impl SessionStore {
    pub fn new(state_dir: Option<PathBuf>, ttl: Duration) -> Self {
        Self {
            sessions: RwLock::new(HashMap::new()),
            state_dir,
            ttl,
        }
    }

    /// Loads every readable snapshot from the state directory.
    pub fn open(state_dir: PathBuf, ttl: Duration) -> std::io::Result<Self> {
        std::fs::create_dir_all(&state_dir)?;
        let store = Self::new(Some(state_dir.clone()), ttl);
        for entry in std::fs::read_dir(&state_dir)? {
            let path = entry?.path();
            if path.extension().is_none_or(|e| e != "json") {
                continue;
            }
            match load_snapshot(&path) {
                Ok(session) => {
                    store
                        .sessions
                        .write()
                        .insert(session.id.clone(), Arc::new(Mutex::new(session)));
                }
                Err(e) => warn!("skipping {}: {e}", path.display()),
            }
        }
        info!("restored {} sessions from {}", store.len(), state_dir.display());
        Ok(store)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn insert(&self, session: Session) -> Result<(), ApiError> {
        self.persist(&session)?;
        self.sessions
            .write()
            .insert(session.id.clone(), Arc::new(Mutex::new(session)));
        Ok(())
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(id.to_string()))
    }

    /// Reads a session under its lock.
    pub fn read<T>(&self, id: &str, f: impl FnOnce(&Session) -> T) -> Result<T, ApiError> {
        let cell = self.get(id)?;
        let guard = cell.lock();
        Ok(f(&guard))
    }

    /// Mutates a session under its lock and persists it when `f` succeeds.
    /// A failed mutation leaves the session untouched.
    pub fn update<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let cell = self.get(id)?;
        let mut guard = cell.lock();
        let mut draft = guard.clone();
        let out = f(&mut draft)?;
        self.persist(&draft)?;
        *guard = draft;
        Ok(out)
    }

    /// Drops sessions idle for longer than the TTL, with their snapshots.
    pub fn evict_expired(&self, now: u64) -> usize {
        let ttl = self.ttl.as_secs();
        let mut sessions = self.sessions.write();
        let expired: Vec<String> = sessions
            .iter()
            .filter(|(_, s)| s.lock().updated.saturating_add(ttl) < now)
            .map(|(id, _)| id.clone())
            .collect();
        for id in &expired {
            sessions.remove(id);
            if let Some(path) = self.snapshot_path(id) {
                if let Err(e) = std::fs::remove_file(&path) {
                    warn!("could not remove {}: {e}", path.display());
                }
            }
        }
        if !expired.is_empty() {
            info!("evicted {} idle sessions", expired.len());
        }
        expired.len()
    }

    fn snapshot_path(&self, id: &str) -> Option<PathBuf> {
        self.state_dir.as_ref().map(|d| d.join(format!("{id}.json")))
    }

    fn persist(&self, session: &Session) -> Result<(), ApiError> {
        let Some(path) = self.snapshot_path(&session.id) else {
            return Ok(());
        };
        let text = serde_json::to_string_pretty(&SessionSnapshot::of(session))
            .map_err(|e| ApiError::Internal(e.to_string()))?;
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, text)
            .and_then(|()| std::fs::rename(&tmp, &path))
            .map_err(|e| ApiError::Internal(format!("{}: {e}", path.display())))
    }
}

fn load_snapshot(path: &Path) -> Result<Session, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let snapshot: SessionSnapshot = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    snapshot.restore()
}
