//! Conversation and completion-request primitives.
//!
//! These types mirror the "chat completions" wire shape used by
//! OpenAI-compatible servers, but stay transport-agnostic: a backend receives
//! a validated [`Conversation`] plus [`CompletionParams`] and returns a
//! [`CompletionResult`]. Validation lives here so every backend — live HTTP or
//! scripted mock — enforces identical rules.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Who said a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    /// Wire name of the role, as sent to chat-completions servers.
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One turn of a conversation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        ChatMessage {
            role,
            content: content.into(),
        }
    }

    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage::new(Role::System, content)
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage::new(Role::User, content)
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage::new(Role::Assistant, content)
    }
}

/// An ordered list of messages forming one request body.
///
/// A conversation sent for completion must be non-empty, may start with at
/// most one system message (never elsewhere), must end with a user message,
/// and every message must have non-empty content. [`Conversation::validate`]
/// checks all of that; clients are expected to call it before dispatch.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Conversation {
    messages: Vec<ChatMessage>,
}

/// Why a conversation was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConversationError {
    /// No messages at all.
    Empty,
    /// Message at `index` has empty content.
    EmptyContent { index: usize },
    /// A system message appeared somewhere other than position 0.
    MisplacedSystem { index: usize },
    /// The final message is not a user message.
    FinalNotUser { role: Role },
}

impl fmt::Display for ConversationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConversationError::Empty => write!(f, "conversation has no messages"),
            ConversationError::EmptyContent { index } => {
                write!(f, "message {index} has empty content")
            }
            ConversationError::MisplacedSystem { index } => {
                write!(f, "system message at position {index} (only position 0 is allowed)")
            }
            ConversationError::FinalNotUser { role } => {
                write!(f, "final message has role {role}, expected user")
            }
        }
    }
}

impl core::error::Error for ConversationError {}

impl Conversation {
    pub fn new(messages: Vec<ChatMessage>) -> Self {
        Conversation { messages }
    }

    pub fn messages(&self) -> &[ChatMessage] {
        &self.messages
    }

    pub fn push(&mut self, message: ChatMessage) {
        self.messages.push(message);
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Check the structural rules for a completion request.
    pub fn validate(&self) -> Result<(), ConversationError> {
        if self.messages.is_empty() {
            return Err(ConversationError::Empty);
        }
        for (index, message) in self.messages.iter().enumerate() {
            if message.content.is_empty() {
                return Err(ConversationError::EmptyContent { index });
            }
            if message.role == Role::System && index != 0 {
                return Err(ConversationError::MisplacedSystem { index });
            }
        }
        let last = self.messages.last().expect("non-empty");
        if last.role != Role::User {
            return Err(ConversationError::FinalNotUser { role: last.role });
        }
        Ok(())
    }
}

impl From<Vec<ChatMessage>> for Conversation {
    fn from(messages: Vec<ChatMessage>) -> Self {
        Conversation::new(messages)
    }
}

impl FromIterator<ChatMessage> for Conversation {
    fn from_iter<I: IntoIterator<Item = ChatMessage>>(iter: I) -> Self {
        Conversation::new(iter.into_iter().collect())
    }
}

/// Sampling and sizing knobs for one completion request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionParams {
    pub model: String,
    /// Sampling temperature in `[0.0, 2.0]`. `0.0` means greedy decoding.
    pub temperature: f64,
    /// Upper bound on generated tokens per choice.
    pub max_tokens: u32,
    /// Number of choices to sample in this request.
    pub n: u32,
}

/// Default token budget for a single completion.
pub const DEFAULT_MAX_TOKENS: u32 = 512;

/// Why completion parameters were rejected.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamsError {
    EmptyModel,
    TemperatureOutOfRange { temperature: f64 },
    ZeroMaxTokens,
    ZeroN,
    /// Greedy decoding is deterministic, so asking for several choices at
    /// temperature 0 would only duplicate one completion.
    MultiChoiceAtZeroTemperature { n: u32 },
}

impl fmt::Display for ParamsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamsError::EmptyModel => write!(f, "model id is empty"),
            ParamsError::TemperatureOutOfRange { temperature } => {
                write!(f, "temperature {temperature} outside [0.0, 2.0]")
            }
            ParamsError::ZeroMaxTokens => write!(f, "max_tokens must be at least 1"),
            ParamsError::ZeroN => write!(f, "n must be at least 1"),
            ParamsError::MultiChoiceAtZeroTemperature { n } => {
                write!(f, "n = {n} requires a positive sampling temperature")
            }
        }
    }
}

impl core::error::Error for ParamsError {}

impl CompletionParams {
    /// Greedy defaults: temperature 0, one choice, 512-token budget.
    pub fn greedy(model: impl Into<String>) -> Self {
        CompletionParams {
            model: model.into(),
            temperature: 0.0,
            max_tokens: DEFAULT_MAX_TOKENS,
            n: 1,
        }
    }

    /// Sampling request for `n` choices at the given temperature.
    pub fn sampling(model: impl Into<String>, temperature: f64, n: u32) -> Self {
        CompletionParams {
            model: model.into(),
            temperature,
            max_tokens: DEFAULT_MAX_TOKENS,
            n,
        }
    }

    pub fn with_max_tokens(mut self, max_tokens: u32) -> Self {
        self.max_tokens = max_tokens;
        self
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.model.is_empty() {
            return Err(ParamsError::EmptyModel);
        }
        if !(self.temperature >= 0.0 && self.temperature <= 2.0) {
            return Err(ParamsError::TemperatureOutOfRange {
                temperature: self.temperature,
            });
        }
        if self.max_tokens == 0 {
            return Err(ParamsError::ZeroMaxTokens);
        }
        if self.n == 0 {
            return Err(ParamsError::ZeroN);
        }
        if self.temperature == 0.0 && self.n > 1 {
            return Err(ParamsError::MultiChoiceAtZeroTemperature { n: self.n });
        }
        Ok(())
    }
}

/// Token accounting reported by a backend, when available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

impl Usage {
    pub fn total_tokens(&self) -> u64 {
        self.prompt_tokens + self.completion_tokens
    }
}

impl core::ops::AddAssign for Usage {
    fn add_assign(&mut self, rhs: Usage) {
        self.prompt_tokens += rhs.prompt_tokens;
        self.completion_tokens += rhs.completion_tokens;
    }
}

/// What a backend produced for one request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionResult {
    /// One generated text per requested choice, in server order.
    pub choices: Vec<String>,
    /// Model id the server reports having used.
    pub model: String,
    /// Token accounting, if the backend reports it (mocks generally do not).
    pub usage: Option<Usage>,
    /// Identifier of the backend that produced this result (e.g. `"http"`,
    /// `"mock"`), for instrumentation and run records.
    pub backend_id: String,
}

/// Why a completion result was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResultError {
    /// The server returned a different number of choices than requested.
    ChoiceCount { expected: u32, got: usize },
}

impl fmt::Display for ResultError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResultError::ChoiceCount { expected, got } => {
                write!(f, "backend returned {got} choices, expected {expected}")
            }
        }
    }
}

impl core::error::Error for ResultError {}

impl CompletionResult {
    /// Check that the result satisfies the request it answers.
    pub fn validate_against(&self, params: &CompletionParams) -> Result<(), ResultError> {
        if self.choices.len() != params.n as usize {
            return Err(ResultError::ChoiceCount {
                expected: params.n,
                got: self.choices.len(),
            });
        }
        Ok(())
    }
}
