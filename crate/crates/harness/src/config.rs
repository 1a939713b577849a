//! TOML configuration with a fixed precedence: command-line flags override
//! environment variables, which override the config file, which overrides
//! built-in defaults.
//!
//! The file is optional. When `--config` is not given, `roleplay-bench.toml`
//! in the working directory is used if it exists.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

/// Environment variable holding the API key (never put keys in the file).
pub const API_KEY_ENV: &str = "ROLEPLAY_BENCH_API_KEY";
/// Environment variable overriding the chat-completions base URL.
pub const BASE_URL_ENV: &str = "ROLEPLAY_BENCH_BASE_URL";
/// Environment variable pointing at the benchmark source-data directory.
pub const DATA_DIR_ENV: &str = "ROLEPLAY_BENCH_DATA_DIR";

/// Default config file name looked up in the working directory.
pub const DEFAULT_CONFIG_FILE: &str = "roleplay-bench.toml";

pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo-0613";
pub const DEFAULT_CONCURRENCY: usize = 4;
pub const DEFAULT_CACHE_DIR: &str = ".roleplay-cache";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: Box<toml::de::Error>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub api: ApiConfig,
    pub run: RunConfig,
    pub params: ParamsConfig,
    pub registry: RegistryConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApiConfig {
    /// Chat-completions base URL, e.g. `https://api.openai.com/v1`.
    pub base_url: Option<String>,
    /// Whether the server supports `n` > 1 in one request. Servers that do
    /// not get sequential single-choice calls instead.
    pub multi_choice: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Maximum in-flight backend requests.
    pub concurrency: Option<usize>,
    /// Response cache directory; set to the empty string to disable caching.
    pub cache_dir: Option<String>,
    /// Directory holding benchmark source files for `datasets import`.
    pub data_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub model: Option<String>,
    pub max_tokens: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegistryConfig {
    /// Registry file path; when unset the built-in registry is used.
    pub path: Option<String>,
}

impl Config {
    pub fn parse_str(input: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(input).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source: Box::new(source),
        })
    }

    /// Load an explicit config file, or the default one if present, or the
    /// empty config.
    pub fn load(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        let path = match explicit {
            Some(path) => path.to_path_buf(),
            None => {
                let default = PathBuf::from(DEFAULT_CONFIG_FILE);
                if !default.exists() {
                    return Ok(Config::default());
                }
                default
            }
        };
        let input = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
            path: path.clone(),
            source,
        })?;
        Self::parse_str(&input, &path)
    }

    /// Base URL after applying env and default fallbacks (flags are applied
    /// by the caller).
    pub fn base_url(&self) -> String {
        std::env::var(BASE_URL_ENV)
            .ok()
            .filter(|v| !v.is_empty())
            .or_else(|| self.api.base_url.clone())
            .unwrap_or_else(|| DEFAULT_BASE_URL.to_owned())
    }

    pub fn api_key(&self) -> Option<String> {
        std::env::var(API_KEY_ENV).ok().filter(|v| !v.is_empty())
    }

    pub fn data_dir(&self) -> Option<PathBuf> {
        std::env::var(DATA_DIR_ENV)
            .ok()
            .filter(|v| !v.is_empty())
            .or_else(|| self.run.data_dir.clone())
            .map(PathBuf::from)
    }

    pub fn model(&self) -> String {
        self.params
            .model
            .clone()
            .unwrap_or_else(|| DEFAULT_MODEL.to_owned())
    }

    pub fn max_tokens(&self) -> Option<u32> {
        self.params.max_tokens
    }

    pub fn concurrency(&self) -> usize {
        self.run.concurrency.unwrap_or(DEFAULT_CONCURRENCY)
    }

    /// Cache directory; `None` when caching is disabled via empty string.
    pub fn cache_dir(&self) -> Option<PathBuf> {
        match self.run.cache_dir.as_deref() {
            Some("") => None,
            Some(dir) => Some(PathBuf::from(dir)),
            None => Some(PathBuf::from(DEFAULT_CACHE_DIR)),
        }
    }

    pub fn registry_path(&self) -> Option<PathBuf> {
        self.registry.path.as_deref().map(PathBuf::from)
    }

    pub fn multi_choice(&self) -> bool {
        self.api.multi_choice.unwrap_or(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_yields_defaults() {
        let config = Config::parse_str("", Path::new("test.toml")).unwrap();
        assert_eq!(config.model(), DEFAULT_MODEL);
        assert_eq!(config.concurrency(), DEFAULT_CONCURRENCY);
        assert_eq!(config.cache_dir(), Some(PathBuf::from(DEFAULT_CACHE_DIR)));
        assert_eq!(config.registry_path(), None);
        assert!(config.multi_choice());
        assert_eq!(config.max_tokens(), None);
    }

    #[test]
    fn sections_parse_and_override_defaults() {
        let config = Config::parse_str(
            r#"
[api]
base_url = "http://localhost:8000/v1"
multi_choice = false

[run]
concurrency = 8
cache_dir = ""
data_dir = "/data/benchmarks"

[params]
model = "my-model"
max_tokens = 256

[registry]
path = "prompts.jsonl"
"#,
            Path::new("test.toml"),
        )
        .unwrap();
        assert_eq!(config.api.base_url.as_deref(), Some("http://localhost:8000/v1"));
        assert!(!config.multi_choice());
        assert_eq!(config.concurrency(), 8);
        assert_eq!(config.cache_dir(), None, "empty string disables the cache");
        assert_eq!(config.run.data_dir.as_deref(), Some("/data/benchmarks"));
        assert_eq!(config.model(), "my-model");
        assert_eq!(config.max_tokens(), Some(256));
        assert_eq!(config.registry_path(), Some(PathBuf::from("prompts.jsonl")));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = Config::parse_str("[params]\nmodle = \"typo\"\n", Path::new("test.toml"))
            .unwrap_err();
        assert!(err.to_string().contains("test.toml"), "{err}");
    }

    #[test]
    fn missing_explicit_file_is_an_error_but_missing_default_is_not() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.toml");
        assert!(Config::load(Some(&missing)).is_err());
    }
}
