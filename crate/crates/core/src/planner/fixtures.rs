//! Record/replay store for planner responses.
//!
//! One JSON object per line:
//! `{"key", "model", "temperature", "system", "user", "response"}`, keyed
//! by the SHA-256 of the request. Later lines win over earlier ones with
//! the same key.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::promptkit::LlmInput;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture-corrupt(line {line}): {reason}")]
    Corrupt { line: usize, reason: String },
    #[error("fixture store {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub key: String,
    pub model: String,
    pub temperature: f64,
    pub system: String,
    pub user: String,
    pub response: String,
}

/// Hex SHA-256 over the request fields that determine a response.
pub fn fixture_key(input: &LlmInput, model: &str, temperature: f64) -> String {
    let canonical = serde_json::to_string(&(&input.system, &input.user, model, temperature))
        .expect("tuple of strings and a float serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

#[derive(Debug, Default)]
pub struct FixtureStore {
    path: Option<PathBuf>,
    entries: RwLock<HashMap<String, FixtureRecord>>,
    append: Mutex<()>,
}

/// What [`FixtureStore::record`] did with an existing entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordOutcome {
    Inserted,
    /// An entry with the same key existed and was overwritten.
    Replaced,
}

impl FixtureStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens a store backed by `path`. A missing file is an empty store;
    /// it is created on the first record.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, FixtureError> {
        let path = path.as_ref().to_path_buf();
        let entries = match fs::read_to_string(&path) {
            Ok(text) => parse_lines(&text)?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => HashMap::new(),
            Err(source) => return Err(FixtureError::Io { path, source }),
        };
        Ok(Self {
            path: Some(path),
            entries: RwLock::new(entries),
            append: Mutex::new(()),
        })
    }

    pub fn from_jsonl(text: &str) -> Result<Self, FixtureError> {
        Ok(Self {
            path: None,
            entries: RwLock::new(parse_lines(text)?),
            append: Mutex::new(()),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("fixture lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lookup(&self, input: &LlmInput, model: &str, temperature: f64) -> Option<String> {
        let key = fixture_key(input, model, temperature);
        self.lookup_key(&key)
    }

    pub fn lookup_key(&self, key: &str) -> Option<String> {
        let entries = self.entries.read().expect("fixture lock poisoned");
        entries.get(key).map(|r| r.response.clone())
    }

    pub fn record(
        &self,
        input: &LlmInput,
        model: &str,
        temperature: f64,
        response: &str,
    ) -> Result<RecordOutcome, FixtureError> {
        let record = FixtureRecord {
            key: fixture_key(input, model, temperature),
            model: model.to_string(),
            temperature,
            system: input.system.clone(),
            user: input.user.clone(),
            response: response.to_string(),
        };
        if let Some(path) = &self.path {
            let mut line = serde_json::to_string(&record).expect("record serializes");
            line.push('\n');
            let _guard = self.append.lock().expect("fixture lock poisoned");
            let io_err = |source| FixtureError::Io {
                path: path.clone(),
                source,
            };
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(io_err)?;
            // one write per record so concurrent appenders never interleave
            file.write_all(line.as_bytes()).map_err(io_err)?;
        }
        let key = record.key.clone();
        let previous = self
            .entries
            .write()
            .expect("fixture lock poisoned")
            .insert(key.clone(), record);
        if previous.is_some() {
            log::warn!("fixture {key} recorded twice; keeping the latest response");
            Ok(RecordOutcome::Replaced)
        } else {
            Ok(RecordOutcome::Inserted)
        }
    }

    /// All records sorted by key.
    pub fn records(&self) -> Vec<FixtureRecord> {
        let mut all: Vec<_> = self
            .entries
            .read()
            .expect("fixture lock poisoned")
            .values()
            .cloned()
            .collect();
        all.sort_by(|a, b| a.key.cmp(&b.key));
        all
    }
}

fn parse_lines(text: &str) -> Result<HashMap<String, FixtureRecord>, FixtureError> {
    let mut entries = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: FixtureRecord = serde_json::from_str(line).map_err(|e| FixtureError::Corrupt {
            line: n + 1,
            reason: e.to_string(),
        })?;
        if entries.insert(record.key.clone(), record).is_some() {
            log::warn!("duplicate fixture key on line {}; later entry wins", n + 1);
        }
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(user: &str) -> LlmInput {
        LlmInput {
            system: "sys".into(),
            user: user.into(),
        }
    }

    #[test]
    fn record_then_lookup() {
        let store = FixtureStore::in_memory();
        store.record(&input("hello"), "m", 0.0, "resp").unwrap();
        assert_eq!(store.lookup(&input("hello"), "m", 0.0).as_deref(), Some("resp"));
        assert_eq!(store.lookup(&input("hellp"), "m", 0.0), None);
        assert_eq!(store.lookup(&input("hello"), "m2", 0.0), None);
        assert_eq!(store.lookup(&input("hello"), "m", 0.5), None);
    }

    #[test]
    fn last_write_wins() {
        let store = FixtureStore::in_memory();
        assert_eq!(
            store.record(&input("q"), "m", 0.0, "a").unwrap(),
            RecordOutcome::Inserted
        );
        assert_eq!(
            store.record(&input("q"), "m", 0.0, "b").unwrap(),
            RecordOutcome::Replaced
        );
        assert_eq!(store.lookup(&input("q"), "m", 0.0).as_deref(), Some("b"));
        assert_eq!(store.len(), 1);
    }

    #[test]
    fn persists_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fx.jsonl");
        {
            let store = FixtureStore::open(&path).unwrap();
            store.record(&input("one"), "m", 0.0, "1").unwrap();
            store.record(&input("two"), "m", 0.0, "2").unwrap();
            store.record(&input("one"), "m", 0.0, "1b").unwrap();
        }
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with(r#"{"key":""#));
        let store = FixtureStore::open(&path).unwrap();
        assert_eq!(store.len(), 2);
        assert_eq!(store.lookup(&input("one"), "m", 0.0).as_deref(), Some("1b"));
    }

    #[test]
    fn corrupt_line_is_reported() {
        let good = serde_json::to_string(&FixtureRecord {
            key: "k".into(),
            model: "m".into(),
            temperature: 0.0,
            system: "s".into(),
            user: "u".into(),
            response: "r".into(),
        })
        .unwrap();
        let text = format!("{good}\n\n{{not json\n");
        match FixtureStore::from_jsonl(&text) {
            Err(FixtureError::Corrupt { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected corrupt error, got {other:?}"),
        }
    }

    #[test]
    fn key_is_hex_sha256() {
        let key = fixture_key(&input("x"), "m", 0.0);
        assert_eq!(key.len(), 64);
        assert!(key.chars().all(|c| c.is_ascii_hexdigit()));
    }
}
