//! File-backed model store.
//!
//! Each model lives in `<root>/<id>.anp.json` (the same canonical file the
//! command line reads) next to a small `<id>.rev.json` sidecar holding the
//! revision counter and the digest of the document it describes. Every file
//! is written to a temporary sibling and renamed into place.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};

use anp_core::model::{digest, load, save, ModelDocument};
use anp_core::{ModelError, ResultDocument};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const MODEL_SUFFIX: &str = ".anp.json";
const REVISION_SUFFIX: &str = ".rev.json";
const RESULT_SUFFIX: &str = ".result.json";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("stored model {path} is unreadable: {source}")]
    Corrupt {
        path: PathBuf,
        #[source]
        source: ModelError,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RevisionFile {
    revision: u64,
    digest: String,
}

/// A model together with its revision counter.
#[derive(Debug, Clone)]
pub struct StoredModel {
    pub doc: ModelDocument,
    pub revision: u64,
}

/// Result of [`ModelStore::update`]: the edit's own error nested inside the
/// storage error.
pub type EditOutcome<T, E> = Result<Result<(T, StoredModel), E>, StoreError>;

#[derive(Debug, Clone, Serialize)]
pub struct ModelSummary {
    pub id: String,
    pub title: String,
    pub revision: u64,
    pub pending_slots: usize,
}

type Entry = Arc<Mutex<StoredModel>>;

#[derive(Debug)]
pub struct ModelStore {
    root: PathBuf,
    models: Mutex<BTreeMap<String, Entry>>,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// Model ids double as file names, so only a conservative charset is
/// accepted.
pub fn is_valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 64
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

impl ModelStore {
    /// Opens (creating if needed) a store rooted at `root` and loads every
    /// model found there.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(io_err(&root))?;
        let mut models = BTreeMap::new();
        for entry in fs::read_dir(&root).map_err(io_err(&root))? {
            let path = entry.map_err(io_err(&root))?.path();
            let Some(id) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(MODEL_SUFFIX))
            else {
                continue;
            };
            if !is_valid_id(id) {
                continue;
            }
            let bytes = fs::read(&path).map_err(io_err(&path))?;
            let doc = load(&bytes).map_err(|source| StoreError::Corrupt {
                path: path.clone(),
                source,
            })?;
            let revision = read_revision(&root.join(format!("{id}{REVISION_SUFFIX}")), &doc);
            models.insert(
                id.to_string(),
                Arc::new(Mutex::new(StoredModel { doc, revision })),
            );
        }
        Ok(Self {
            root,
            models: Mutex::new(models),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn model_path(&self, id: &str) -> PathBuf {
        self.root.join(format!("{id}{MODEL_SUFFIX}"))
    }

    fn entry(&self, id: &str) -> Option<Entry> {
        lock(&self.models).get(id).cloned()
    }

    pub fn insert(&self, id: &str, doc: ModelDocument) -> Result<StoredModel, StoreError> {
        let stored = StoredModel { doc, revision: 1 };
        self.persist(id, &stored)?;
        lock(&self.models).insert(id.to_string(), Arc::new(Mutex::new(stored.clone())));
        Ok(stored)
    }

    /// A consistent copy of the model at its current revision.
    pub fn snapshot(&self, id: &str) -> Option<StoredModel> {
        self.entry(id).map(|e| lock(&e).clone())
    }

    pub fn list(&self) -> Vec<ModelSummary> {
        let entries: Vec<(String, Entry)> = lock(&self.models)
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        entries
            .into_iter()
            .map(|(id, e)| {
                let m = lock(&e);
                ModelSummary {
                    id,
                    title: m.doc.metadata.title.clone(),
                    revision: m.revision,
                    pending_slots: m.doc.pending().len(),
                }
            })
            .collect()
    }

    /// Runs `edit` on the model under its write guard. A successful edit
    /// bumps the revision and is persisted before the guard is released.
    /// `None` if the model does not exist.
    pub fn update<T, E>(
        &self,
        id: &str,
        edit: impl FnOnce(&mut StoredModel) -> Result<T, E>,
    ) -> Option<EditOutcome<T, E>> {
        let entry = self.entry(id)?;
        let mut guard = lock(&entry);
        let mut next = guard.clone();
        let out = match edit(&mut next) {
            Ok(out) => out,
            Err(e) => return Some(Ok(Err(e))),
        };
        next.revision = guard.revision + 1;
        if let Err(e) = self.persist(id, &next) {
            return Some(Err(e));
        }
        *guard = next.clone();
        Some(Ok(Ok((out, next))))
    }

    pub fn save_result(&self, id: &str, result: &ResultDocument) -> Result<(), StoreError> {
        write_atomic(
            &self.root,
            &format!("{id}{RESULT_SUFFIX}"),
            &result.to_json(),
        )
    }

    pub fn load_result(&self, id: &str) -> Result<Option<Vec<u8>>, StoreError> {
        let path = self.root.join(format!("{id}{RESULT_SUFFIX}"));
        match fs::read(&path) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    fn persist(&self, id: &str, stored: &StoredModel) -> Result<(), StoreError> {
        write_atomic(
            &self.root,
            &format!("{id}{MODEL_SUFFIX}"),
            &save(&stored.doc),
        )?;
        let rev = RevisionFile {
            revision: stored.revision,
            digest: digest(&stored.doc),
        };
        let bytes = serde_json::to_vec(&rev).expect("serializable");
        write_atomic(&self.root, &format!("{id}{REVISION_SUFFIX}"), &bytes)
    }
}

/// Revision recorded in the sidecar. A digest mismatch means the document
/// was replaced after the sidecar was last written, so it counts as one
/// revision later.
fn read_revision(path: &Path, doc: &ModelDocument) -> u64 {
    let Some(rev) = fs::read(path)
        .ok()
        .and_then(|b| serde_json::from_slice::<RevisionFile>(&b).ok())
    else {
        return 1;
    };
    if rev.digest == digest(doc) {
        rev.revision
    } else {
        rev.revision + 1
    }
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), StoreError> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(&target))?;
    tmp.write_all(bytes).map_err(io_err(&target))?;
    tmp.as_file().sync_all().map_err(io_err(&target))?;
    tmp.persist(&target).map_err(|e| io_err(&target)(e.error))?;
    Ok(())
}
