//! Run record files and their meta sidecars.
//!
//! Records are append-only JSONL, one [`RunRecord`] per line, written in
//! question order. Everything needed to re-score a run offline is in the
//! record; timing, usage, and per-question failures go to a sidecar file
//! (`<records>.meta.jsonl`) so the record file stays pure data.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use roleplay_core::RunRecord;

/// Why record IO failed.
#[derive(Debug, Error)]
pub enum RecordError {
    #[error("record file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("record file {path} line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(
        "record file contains records for strategy {strategy:?} with a different fingerprint; \
         prompt texts or parameters changed since that run — use a new output file"
    )]
    FingerprintMismatch { strategy: String },
}

/// Append-only writer for run records. Each record is flushed as written so
/// an interrupted run keeps everything completed so far.
pub struct RecordWriter {
    writer: BufWriter<File>,
    path: PathBuf,
    written: usize,
}

impl RecordWriter {
    /// Create a new record file; fails if the path already exists.
    pub fn create(path: &Path) -> Result<Self, RecordError> {
        let file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(path)
            .map_err(|source| RecordError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        Ok(RecordWriter {
            writer: BufWriter::new(file),
            path: path.to_path_buf(),
            written: 0,
        })
    }

    /// Open an existing record file for appending (resume).
    pub fn append_to(path: &Path) -> Result<Self, RecordError> {
        let file = OpenOptions::new()
            .append(true)
            .create(true)
            .open(path)
            .map_err(|source| RecordError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        Ok(RecordWriter {
            writer: BufWriter::new(file),
            path: path.to_path_buf(),
            written: 0,
        })
    }

    pub fn append(&mut self, record: &RunRecord) -> Result<(), RecordError> {
        let io_err = |source| RecordError::Io {
            path: self.path.clone(),
            source,
        };
        let line = serde_json::to_string(record).expect("run records serialize");
        self.writer.write_all(line.as_bytes()).map_err(io_err)?;
        self.writer.write_all(b"\n").map_err(io_err)?;
        self.writer.flush().map_err(io_err)?;
        self.written += 1;
        Ok(())
    }

    /// Records appended through this writer (not pre-existing ones).
    pub fn written(&self) -> usize {
        self.written
    }
}

/// Load every record in a file. Parsing is strict: a malformed line is an
/// error, not a skip, because silently dropping records would skew reports.
pub fn load_records(path: &Path) -> Result<Vec<RunRecord>, RecordError> {
    let content = std::fs::read_to_string(path).map_err(|source| RecordError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: RunRecord = serde_json::from_str(line).map_err(|e| RecordError::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Question ids already answered under exactly this strategy fingerprint.
///
/// Fails if the file holds records for the same strategy *name* with a
/// different fingerprint: mixing those in one file would poison reports, so
/// resuming over them is refused.
pub fn completed_question_ids(
    records: &[RunRecord],
    strategy_name: &str,
    fingerprint: &str,
) -> Result<HashSet<String>, RecordError> {
    let mut done = HashSet::new();
    for record in records {
        if record.strategy != strategy_name {
            continue;
        }
        if record.strategy_fingerprint != fingerprint {
            return Err(RecordError::FingerprintMismatch {
                strategy: strategy_name.to_owned(),
            });
        }
        done.insert(record.question_id.clone());
    }
    Ok(done)
}

/// Sidecar path for a record file: `<records>.meta.jsonl`.
pub fn meta_path(records_path: &Path) -> PathBuf {
    let mut name = records_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".meta.jsonl");
    records_path.with_file_name(name)
}

/// One line of the meta sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum MetaEvent {
    RunStarted {
        unix_time: u64,
        dataset_id: String,
        strategy: String,
        fingerprint: String,
        model: String,
        backend: String,
        total: usize,
        skipped: usize,
    },
    QuestionFailed {
        question_id: String,
        message: String,
    },
    RunFinished {
        completed: usize,
        failed: usize,
        correct: usize,
        parse_failed: usize,
        cache_hits: u64,
        cache_misses: u64,
        backend_calls: u64,
        retries: u64,
        prompt_tokens: u64,
        completion_tokens: u64,
        duration_ms: u64,
    },
}

/// Seconds since the Unix epoch, for `RunStarted` stamps.
pub fn unix_time() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Append-only writer for the meta sidecar of a record file.
pub struct MetaWriter {
    writer: BufWriter<File>,
    path: PathBuf,
}

impl MetaWriter {
    /// Open (always appending) the sidecar for `records_path`.
    pub fn create(records_path: &Path) -> Result<Self, RecordError> {
        let path = meta_path(records_path);
        let file = OpenOptions::new()
            .append(true)
            .create(true)
            .open(&path)
            .map_err(|source| RecordError::Io {
                path: path.clone(),
                source,
            })?;
        Ok(MetaWriter {
            writer: BufWriter::new(file),
            path,
        })
    }

    pub fn append(&mut self, event: &MetaEvent) -> Result<(), RecordError> {
        let io_err = |source| RecordError::Io {
            path: self.path.clone(),
            source,
        };
        let line = serde_json::to_string(event).expect("meta events serialize");
        self.writer.write_all(line.as_bytes()).map_err(io_err)?;
        self.writer.write_all(b"\n").map_err(io_err)?;
        self.writer.flush().map_err(io_err)
    }
}
