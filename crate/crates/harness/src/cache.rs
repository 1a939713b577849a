//! Content-addressed response cache.
//!
//! Every completed request is stored under its request digest at
//! `<root>/<first two hex chars>/<digest>.json`, so identical requests across
//! runs (same messages, model, and parameters) are answered from disk without
//! touching any backend. Writes go to a temporary file and are renamed into
//! place, so a crashed run never leaves a half-written entry; unreadable or
//! mismatched entries are quarantined (renamed to `.corrupt`) and treated as
//! misses rather than aborting an evaluation.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use roleplay_core::{CompletionParams, CompletionResult, Usage};

/// On-disk shape of one cache entry: the result plus enough of the request
/// to audit what the entry answers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CacheRecord {
    digest: String,
    model: String,
    temperature: f64,
    max_tokens: u32,
    n: u32,
    choices: Vec<String>,
    backend_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    usage: Option<Usage>,
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache io error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Totals reported by `cache stats`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CacheStats {
    pub entries: u64,
    pub bytes: u64,
    pub quarantined: u64,
}

pub struct ResponseCache {
    root: PathBuf,
}

impl ResponseCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ResponseCache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn entry_path(&self, digest: &str) -> PathBuf {
        let shard = digest.get(..2).unwrap_or("xx");
        self.root.join(shard).join(format!("{digest}.json"))
    }

    /// Look up a digest. Any unreadable, unparsable, or inconsistent entry is
    /// quarantined and reported as a miss.
    pub fn get(&self, digest: &str, params: &CompletionParams) -> Option<CompletionResult> {
        let path = self.entry_path(digest);
        let bytes = match fs::read(&path) {
            Ok(bytes) => bytes,
            Err(_) => return None,
        };
        let record: CacheRecord = match serde_json::from_slice(&bytes) {
            Ok(record) => record,
            Err(_) => {
                self.quarantine(&path);
                return None;
            }
        };
        let consistent = record.digest == digest
            && record.model == params.model
            && record.temperature == params.temperature
            && record.max_tokens == params.max_tokens
            && record.n == params.n
            && record.choices.len() == params.n as usize;
        if !consistent {
            self.quarantine(&path);
            return None;
        }
        Some(CompletionResult {
            choices: record.choices,
            model: record.model,
            usage: record.usage,
            backend_id: record.backend_id,
        })
    }

    /// Store a result. Concurrent writers of the same digest are safe: each
    /// writes its own temporary file and the rename is atomic.
    pub fn put(
        &self,
        digest: &str,
        params: &CompletionParams,
        result: &CompletionResult,
    ) -> Result<(), CacheError> {
        let path = self.entry_path(digest);
        let dir = path.parent().expect("entry paths have a shard directory");
        fs::create_dir_all(dir).map_err(|source| CacheError::Io {
            path: dir.to_path_buf(),
            source,
        })?;

        let record = CacheRecord {
            digest: digest.to_owned(),
            model: params.model.clone(),
            temperature: params.temperature,
            max_tokens: params.max_tokens,
            n: params.n,
            choices: result.choices.clone(),
            backend_id: result.backend_id.clone(),
            usage: result.usage,
        };
        let io_err = |source| CacheError::Io {
            path: path.clone(),
            source,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
        serde_json::to_writer(&mut tmp, &record).map_err(|e| io_err(e.into()))?;
        tmp.write_all(b"\n").map_err(io_err)?;
        tmp.persist(&path)
            .map_err(|e| io_err(e.error))?;
        Ok(())
    }

    fn quarantine(&self, path: &Path) {
        let mut quarantined = path.as_os_str().to_owned();
        quarantined.push(".corrupt");
        match fs::rename(path, &quarantined) {
            Ok(()) => eprintln!(
                "warning: quarantined corrupt cache entry {} (renamed to .corrupt)",
                path.display()
            ),
            Err(e) => eprintln!(
                "warning: failed to quarantine corrupt cache entry {}: {e}",
                path.display()
            ),
        }
    }

    /// Walk the cache and count entries, bytes, and quarantined files.
    pub fn stats(&self) -> Result<CacheStats, CacheError> {
        let mut stats = CacheStats::default();
        let shards = match fs::read_dir(&self.root) {
            Ok(shards) => shards,
            Err(_) => return Ok(stats), // absent cache = empty cache
        };
        for shard in shards.flatten() {
            let Ok(entries) = fs::read_dir(shard.path()) else {
                continue;
            };
            for entry in entries.flatten() {
                let path = entry.path();
                let name = entry.file_name();
                let name = name.to_string_lossy();
                if name.ends_with(".corrupt") {
                    stats.quarantined += 1;
                } else if name.ends_with(".json") {
                    stats.entries += 1;
                    if let Ok(meta) = entry.metadata() {
                        stats.bytes += meta.len();
                    }
                } else {
                    let _ = path; // stray temp files are ignored
                }
            }
        }
        Ok(stats)
    }

    /// Delete all entries (including quarantined ones). Returns how many
    /// files were removed.
    pub fn clear(&self) -> Result<u64, CacheError> {
        let mut removed = 0;
        let shards = match fs::read_dir(&self.root) {
            Ok(shards) => shards,
            Err(_) => return Ok(0),
        };
        for shard in shards.flatten() {
            let Ok(entries) = fs::read_dir(shard.path()) else {
                continue;
            };
            for entry in entries.flatten() {
                fs::remove_file(entry.path()).map_err(|source| CacheError::Io {
                    path: entry.path(),
                    source,
                })?;
                removed += 1;
            }
            let _ = fs::remove_dir(shard.path());
        }
        Ok(removed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> CompletionParams {
        CompletionParams::greedy("mock-model")
    }

    fn result(text: &str) -> CompletionResult {
        CompletionResult {
            choices: vec![text.to_owned()],
            model: "mock-model".to_owned(),
            usage: None,
            backend_id: "mock".to_owned(),
        }
    }

    fn digest() -> String {
        "ab".to_owned() + &"0".repeat(62)
    }

    #[test]
    fn put_then_get_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path());
        let digest = digest();

        assert!(cache.get(&digest, &params()).is_none(), "cold cache misses");
        cache.put(&digest, &params(), &result("The answer is 4.")).unwrap();

        let hit = cache.get(&digest, &params()).unwrap();
        assert_eq!(hit.choices, vec!["The answer is 4."]);
        assert_eq!(hit.backend_id, "mock");
    }

    #[test]
    fn entries_shard_by_digest_prefix() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path());
        let digest = digest();
        cache.put(&digest, &params(), &result("x")).unwrap();
        assert!(dir.path().join("ab").join(format!("{digest}.json")).exists());
    }

    #[test]
    fn corrupt_entries_are_quarantined_and_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path());
        let digest = digest();
        cache.put(&digest, &params(), &result("x")).unwrap();

        let path = dir.path().join("ab").join(format!("{digest}.json"));
        fs::write(&path, b"{ truncated").unwrap();

        assert!(cache.get(&digest, &params()).is_none());
        assert!(!path.exists(), "corrupt entry removed from the hot path");
        assert!(path.with_extension("json.corrupt").exists());

        let stats = cache.stats().unwrap();
        assert_eq!(stats.entries, 0);
        assert_eq!(stats.quarantined, 1);
    }

    #[test]
    fn entries_for_different_params_do_not_alias() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path());
        let digest = digest();
        cache.put(&digest, &params(), &result("x")).unwrap();

        // Same digest requested with different params means the digest
        // function and the stored entry disagree — quarantine, miss.
        let other = CompletionParams::greedy("other-model");
        assert!(cache.get(&digest, &other).is_none());
        assert_eq!(cache.stats().unwrap().quarantined, 1);
    }

    #[test]
    fn stats_and_clear_count_entries() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path());
        for i in 0..3 {
            let digest = format!("{i}{i}") + &"0".repeat(62);
            cache.put(&digest, &params(), &result("x")).unwrap();
        }

        let stats = cache.stats().unwrap();
        assert_eq!(stats.entries, 3);
        assert!(stats.bytes > 0);

        assert_eq!(cache.clear().unwrap(), 3);
        assert_eq!(cache.stats().unwrap().entries, 0);
        assert!(cache.get(&digest(), &params()).is_none());
    }

    #[test]
    fn missing_cache_directory_reads_as_empty() {
        let cache = ResponseCache::new("/nonexistent/cache/dir");
        assert_eq!(cache.stats().unwrap(), CacheStats::default());
        assert!(cache.get(&digest(), &params()).is_none());
    }
}
