//! Chat-completion backends: a live OpenAI-compatible HTTP client and a
//! deterministic scripted mock.
//!
//! Both implement [`ChatBackend`] and are driven through
//! [`crate::client::ChatClient`], which owns validation, retries, and
//! concurrency limits. The mock replays pre-authored responses keyed by
//! request digest, so an entire evaluation run is reproducible offline and
//! any drift in prompt assembly shows up as a loud "no scripted response"
//! error instead of a silently different answer.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicI64, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use roleplay_core::{
    conversation_digest, CompletionParams, CompletionResult, Conversation, ConversationError,
    ParamsError, ResultError, Usage,
};

/// Errors a backend (or the client driving it) can produce.
#[derive(Debug, Error)]
pub enum BackendError {
    /// Connection-level failure: DNS, refused, timeout, broken pipe.
    #[error("transport error contacting backend: {message}")]
    Transport { message: String },
    /// Server answered with a non-success status.
    #[error("HTTP {status} from backend: {message}")]
    Http { status: u16, message: String },
    /// Server answered 2xx but the body was not a chat completion.
    #[error("backend response could not be decoded: {message}")]
    Decode { message: String },
    /// The mock script has no entry for this request.
    #[error(
        "no scripted response for request digest {digest}; the mock script does not cover this \
         request (was it generated for a different prompt, model, or parameters?)"
    )]
    FixtureMissing { digest: String },
    /// An ordinal-mode mock script ran out of entries.
    #[error("mock script exhausted after {served} scripted responses")]
    ScriptExhausted { served: u64 },
    #[error("invalid conversation: {0}")]
    InvalidConversation(#[from] ConversationError),
    #[error("invalid completion parameters: {0}")]
    InvalidParams(#[from] ParamsError),
    #[error("invalid completion result: {0}")]
    InvalidResult(#[from] ResultError),
}

impl BackendError {
    /// Only transient failures are worth retrying: transport errors, rate
    /// limits (429), and server errors (5xx). Client errors and fixture
    /// misses are deterministic and retried never.
    pub fn is_retryable(&self) -> bool {
        match self {
            BackendError::Transport { .. } => true,
            BackendError::Http { status, .. } => {
                *status == 429 || (500..=599).contains(status)
            }
            _ => false,
        }
    }
}

/// Anything that can answer a chat completion request.
#[async_trait]
pub trait ChatBackend: Send + Sync {
    /// Short identifier recorded in results (e.g. `"http"`, `"mock"`).
    fn id(&self) -> &str;

    /// Whether one request may carry `n > 1`. When `false`, the client
    /// splits multi-choice requests into `n` single-choice calls.
    fn supports_multi_choice(&self) -> bool {
        true
    }

    async fn complete(
        &self,
        conversation: &Conversation,
        params: &CompletionParams,
    ) -> Result<CompletionResult, BackendError>;
}

// --- live HTTP backend -----------------------------------------------------

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
    temperature: f64,
    max_tokens: u32,
    n: u32,
}

#[derive(Deserialize)]
struct WireChoiceMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireChoiceMessage,
}

#[derive(Deserialize)]
struct WireUsage {
    #[serde(default)]
    prompt_tokens: u64,
    #[serde(default)]
    completion_tokens: u64,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    model: Option<String>,
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireErrorBody {
    error: Option<WireErrorDetail>,
}

#[derive(Deserialize)]
struct WireErrorDetail {
    message: Option<String>,
}

/// Client for any server speaking the OpenAI chat-completions protocol.
///
/// `base_url` should include the API prefix (e.g. `https://api.openai.com/v1`
/// or `http://localhost:8000/v1`); requests go to `{base_url}/chat/completions`.
pub struct HttpBackend {
    base_url: String,
    api_key: Option<String>,
    multi_choice: bool,
    client: reqwest::Client,
}

impl HttpBackend {
    pub fn new(base_url: impl Into<String>, api_key: Option<String>) -> Self {
        HttpBackend {
            base_url: base_url.into(),
            api_key,
            multi_choice: true,
            client: reqwest::Client::new(),
        }
    }

    /// Declare that the server ignores `n`; the client will then issue one
    /// request per requested choice.
    pub fn without_multi_choice(mut self) -> Self {
        self.multi_choice = false;
        self
    }

    fn endpoint_url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

#[async_trait]
impl ChatBackend for HttpBackend {
    fn id(&self) -> &str {
        "http"
    }

    fn supports_multi_choice(&self) -> bool {
        self.multi_choice
    }

    async fn complete(
        &self,
        conversation: &Conversation,
        params: &CompletionParams,
    ) -> Result<CompletionResult, BackendError> {
        let body = WireRequest {
            model: &params.model,
            messages: conversation
                .messages()
                .iter()
                .map(|m| WireMessage {
                    role: m.role.as_str(),
                    content: &m.content,
                })
                .collect(),
            temperature: params.temperature,
            max_tokens: params.max_tokens,
            n: params.n,
        };

        let mut request = self.client.post(self.endpoint_url()).json(&body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }

        let response = request.send().await.map_err(|e| BackendError::Transport {
            message: e.to_string(),
        })?;
        let status = response.status();
        let text = response.text().await.map_err(|e| BackendError::Transport {
            message: e.to_string(),
        })?;

        if !status.is_success() {
            let message = serde_json::from_str::<WireErrorBody>(&text)
                .ok()
                .and_then(|b| b.error)
                .and_then(|e| e.message)
                .unwrap_or_else(|| truncate_for_error(&text));
            return Err(BackendError::Http {
                status: status.as_u16(),
                message,
            });
        }

        let wire: WireResponse =
            serde_json::from_str(&text).map_err(|e| BackendError::Decode {
                message: format!("{e} in body {}", truncate_for_error(&text)),
            })?;
        Ok(CompletionResult {
            choices: wire
                .choices
                .into_iter()
                .map(|c| c.message.content.unwrap_or_default())
                .collect(),
            model: wire.model.unwrap_or_else(|| params.model.clone()),
            usage: wire.usage.map(|u| Usage {
                prompt_tokens: u.prompt_tokens,
                completion_tokens: u.completion_tokens,
            }),
            backend_id: "http".to_owned(),
        })
    }
}

fn truncate_for_error(text: &str) -> String {
    const LIMIT: usize = 200;
    let trimmed = text.trim();
    if trimmed.len() <= LIMIT {
        trimmed.to_owned()
    } else {
        let mut end = LIMIT;
        while !trimmed.is_char_boundary(end) {
            end -= 1;
        }
        format!("{}…", &trimmed[..end])
    }
}

// --- deterministic scripted mock -------------------------------------------

/// One line of a mock script: the scripted choices for one request digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptEntry {
    /// Digest of the request this entry answers. Ignored (and may be empty)
    /// in ordinal mode.
    #[serde(default)]
    pub digest: String,
    /// The scripted completion texts, one per requested choice.
    pub choices: Vec<String>,
}

/// Why a mock script failed to load.
#[derive(Debug, Error)]
pub enum MockScriptError {
    #[error("failed to read mock script {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("mock script line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mock script line {line}: conflicting entries for digest {digest}")]
    ConflictingDigest { digest: String, line: usize },
    #[error("mock script line {line}: digest-keyed entry with empty digest")]
    MissingDigest { line: usize },
    #[error("mock script line {line}: entry has no choices")]
    EmptyChoices { line: usize },
}

/// How a [`MockBackend`] matches requests to script entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MockMode {
    /// Look entries up by request digest (order-independent; the default).
    #[default]
    Digest,
    /// Serve entries strictly in file order, ignoring digests.
    Ordinal,
}

/// In-flight instrumentation shared by tests and acceptance checks.
#[derive(Debug, Default)]
pub struct BackendCounters {
    calls: AtomicU64,
    in_flight: AtomicI64,
    max_in_flight: AtomicI64,
}

impl BackendCounters {
    fn enter(&self) {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.max_in_flight.fetch_max(now, Ordering::SeqCst);
    }

    fn exit(&self) {
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
    }

    /// Total completion calls served.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }

    /// Highest number of calls that were ever in flight simultaneously.
    pub fn max_in_flight(&self) -> u64 {
        self.max_in_flight.load(Ordering::SeqCst).max(0) as u64
    }
}

/// A backend that replays a pre-authored script instead of calling anything.
pub struct MockBackend {
    by_digest: HashMap<String, Vec<String>>,
    ordinal: Option<Mutex<VecDeque<ScriptEntry>>>,
    served: AtomicU64,
    counters: BackendCounters,
    latency: Duration,
}

impl core::fmt::Debug for MockBackend {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MockBackend")
            .field("digest_entries", &self.by_digest.len())
            .field("ordinal", &self.ordinal.is_some())
            .finish_non_exhaustive()
    }
}

impl MockBackend {
    /// Build from script text (JSONL, one [`ScriptEntry`] per line).
    pub fn from_script_str(script: &str, mode: MockMode) -> Result<Self, MockScriptError> {
        let mut by_digest = HashMap::new();
        let mut in_order = VecDeque::new();
        for (idx, raw) in script.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let entry: ScriptEntry =
                serde_json::from_str(raw).map_err(|e| MockScriptError::Parse {
                    line,
                    message: e.to_string(),
                })?;
            if entry.choices.is_empty() {
                return Err(MockScriptError::EmptyChoices { line });
            }
            match mode {
                MockMode::Digest => {
                    if entry.digest.is_empty() {
                        return Err(MockScriptError::MissingDigest { line });
                    }
                    match by_digest.get(&entry.digest) {
                        // Re-listing an identical entry is harmless (merged
                        // scripts share extraction responses); disagreeing
                        // entries are an authoring bug.
                        Some(existing) if *existing == entry.choices => {}
                        Some(_) => {
                            return Err(MockScriptError::ConflictingDigest {
                                digest: entry.digest,
                                line,
                            })
                        }
                        None => {
                            by_digest.insert(entry.digest, entry.choices);
                        }
                    }
                }
                MockMode::Ordinal => in_order.push_back(entry),
            }
        }
        Ok(MockBackend {
            by_digest,
            ordinal: match mode {
                MockMode::Digest => None,
                MockMode::Ordinal => Some(Mutex::new(in_order)),
            },
            served: AtomicU64::new(0),
            counters: BackendCounters::default(),
            latency: Duration::ZERO,
        })
    }

    /// Load a script file.
    pub fn from_script_path(path: &Path, mode: MockMode) -> Result<Self, MockScriptError> {
        let script = std::fs::read_to_string(path).map_err(|source| MockScriptError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_script_str(&script, mode)
    }

    /// Add artificial per-call latency, so concurrency tests can observe
    /// calls overlapping.
    pub fn with_latency(mut self, latency: Duration) -> Self {
        self.latency = latency;
        self
    }

    pub fn counters(&self) -> &BackendCounters {
        &self.counters
    }

    /// Number of digest-keyed entries loaded.
    pub fn entry_count(&self) -> usize {
        self.by_digest.len()
            + self
                .ordinal
                .as_ref()
                .map(|q| q.lock().expect("mock queue lock").len())
                .unwrap_or(0)
    }
}

#[async_trait]
impl ChatBackend for MockBackend {
    fn id(&self) -> &str {
        "mock"
    }

    async fn complete(
        &self,
        conversation: &Conversation,
        params: &CompletionParams,
    ) -> Result<CompletionResult, BackendError> {
        self.counters.enter();
        if !self.latency.is_zero() {
            tokio::time::sleep(self.latency).await;
        }
        let outcome = (|| {
            let choices = match &self.ordinal {
                Some(queue) => queue
                    .lock()
                    .expect("mock queue lock")
                    .pop_front()
                    .map(|e| e.choices)
                    .ok_or_else(|| BackendError::ScriptExhausted {
                        served: self.served.load(Ordering::SeqCst),
                    })?,
                None => {
                    let digest = conversation_digest(conversation, params);
                    self.by_digest
                        .get(&digest)
                        .cloned()
                        .ok_or(BackendError::FixtureMissing { digest })?
                }
            };
            self.served.fetch_add(1, Ordering::SeqCst);
            Ok(CompletionResult {
                choices,
                model: params.model.clone(),
                usage: None,
                backend_id: "mock".to_owned(),
            })
        })();
        self.counters.exit();
        outcome
    }
}
