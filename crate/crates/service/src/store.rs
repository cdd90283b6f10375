//! The session table and its directory of replayable records.

use std::collections::HashMap;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use crate::error::ApiError;
use crate::session::{CreateRequest, Session, SessionRecord};

#[derive(Default)]
pub struct Store {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    data_dir: Option<PathBuf>,
}

impl Store {
    pub fn in_memory() -> Self {
        Store::default()
    }

    /// Opens `dir`, creating it if needed, and rebuilds every recorded
    /// session by replaying its answers. Returns the ids of records that
    /// could not be restored alongside the store.
    pub fn open(dir: impl AsRef<Path>) -> io::Result<(Self, Vec<(PathBuf, String)>)> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir)?;
        let store = Store {
            sessions: RwLock::default(),
            data_dir: Some(dir.clone()),
        };
        let mut skipped = Vec::new();
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let restored = std::fs::read(&path)
                .map_err(|e| e.to_string())
                .and_then(|bytes| {
                    serde_json::from_slice::<SessionRecord>(&bytes).map_err(|e| e.to_string())
                })
                .and_then(|record| store.restore(record).map_err(|e| e.message));
            if let Err(reason) = restored {
                skipped.push((path, reason));
            }
        }
        Ok((store, skipped))
    }

    fn file_for(&self, id: &str) -> Option<PathBuf> {
        self.data_dir.as_ref().map(|d| d.join(format!("{id}.json")))
    }

    fn insert(&self, session: Arc<Session>) {
        self.sessions
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(session.id.clone(), session);
    }

    fn restore(&self, record: SessionRecord) -> Result<(), ApiError> {
        let instance = record.request.resolve()?;
        let file = self.file_for(&record.id);
        let session = Session::start(record.id, record.request, instance, record.answers, file)?;
        self.insert(session);
        Ok(())
    }

    pub fn create(&self, request: CreateRequest) -> Result<Arc<Session>, ApiError> {
        let instance = request.resolve()?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        let file = self.file_for(&id);
        let session = Session::start(id, request, instance, Vec::new(), file)?;
        self.insert(Arc::clone(&session));
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no session with id {id}")))
    }

    pub fn len(&self) -> usize {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
