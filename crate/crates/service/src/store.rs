//! Append-only JSON-lines response log.
//!
//! Each record is serialized to one line and written with a single
//! `write_all` under a mutex, then synced, so concurrent submissions never
//! interleave and a crash can at worst leave one incomplete final line, which
//! [`read_log`] skips.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use survey_core::{ResponseRecord, Terminal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppendOutcome {
    Stored,
    /// The respondent already has a completed record for this survey
    /// version; nothing was written.
    Duplicate,
}

#[derive(Debug, Default)]
pub struct LogContents {
    pub records: Vec<ResponseRecord>,
    /// Lines that were not a valid record (for example a torn final line).
    pub malformed_lines: usize,
}

/// Reads every record in a log file.
pub fn read_log(path: &Path) -> Result<LogContents, StoreError> {
    let io_err = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let mut out = LogContents::default();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(r) => out.records.push(r),
            Err(_) => out.malformed_lines += 1,
        }
    }
    Ok(out)
}

struct Inner {
    file: File,
    /// (respondent_id, source_digest) of completed records.
    completed: HashSet<(String, String)>,
    lines: usize,
}

pub struct ResponseStore {
    path: PathBuf,
    inner: Mutex<Inner>,
}

impl ResponseStore {
    /// Opens (creating if needed) the log at `path`.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        let existing = if path.exists() {
            read_log(&path)?
        } else {
            LogContents::default()
        };
        let io_err = |source| StoreError::Io {
            path: path.clone(),
            source,
        };
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(io_err)?;
        // Terminate a torn final line so the next record starts cleanly.
        let bytes = std::fs::read(&path).map_err(io_err)?;
        if bytes.last().is_some_and(|b| *b != b'\n') {
            file.write_all(b"\n").map_err(io_err)?;
        }
        let completed = existing
            .records
            .iter()
            .filter(|r| r.terminal == Terminal::Completed)
            .map(|r| (r.respondent_id.clone(), r.source_digest.clone()))
            .collect();
        Ok(ResponseStore {
            path,
            inner: Mutex::new(Inner {
                file,
                completed,
                lines: existing.records.len(),
            }),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Records stored so far, including those found when opening.
    pub fn len(&self) -> usize {
        self.inner.lock().expect("store lock").lines
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn append(&self, record: &ResponseRecord) -> Result<AppendOutcome, StoreError> {
        let mut line = serde_json::to_vec(record).expect("records serialize");
        line.push(b'\n');
        let key = (record.respondent_id.clone(), record.source_digest.clone());
        let mut inner = self.inner.lock().expect("store lock");
        if inner.completed.contains(&key) {
            return Ok(AppendOutcome::Duplicate);
        }
        let io_err = |source| StoreError::Io {
            path: self.path.clone(),
            source,
        };
        inner.file.write_all(&line).map_err(io_err)?;
        inner.file.sync_data().map_err(io_err)?;
        inner.lines += 1;
        if record.terminal == Terminal::Completed {
            inner.completed.insert(key);
        }
        Ok(AppendOutcome::Stored)
    }

    /// Everything written so far; the log itself is never modified.
    pub fn snapshot(&self) -> Result<LogContents, StoreError> {
        let _guard = self.inner.lock().expect("store lock");
        read_log(&self.path)
    }
}
