//! Core primitives for chat-based reasoning evaluations.
//!
//! This crate is `no_std` (with `alloc`) so the evaluation semantics — message
//! assembly, request digests, answer normalization, majority voting, and
//! scoring — can be embedded anywhere, independent of any particular HTTP
//! stack, file format, or runtime. The companion `roleplay-bench` crate layers
//! IO, backends, datasets, and a CLI on top.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod answer;
pub mod chat;
pub mod digest;
pub mod eval;
pub mod question;
pub mod strategy;
pub mod vote;

pub use answer::{
    build_extraction_message, normalize_gold, parse_answer, AnswerFormat, ExtractionOutcome,
    GoldError, NormalizedAnswer, ParsePath,
};
pub use chat::{
    ChatMessage, CompletionParams, CompletionResult, Conversation, ConversationError, ParamsError,
    ResultError, Role, Usage,
};
pub use digest::{canonical_request, conversation_digest};
pub use eval::{aggregate, score, AggregateError, Report, ReportRow, RunRecord, SampleRecord};
pub use question::{Question, QuestionError};
pub use strategy::{SelfConsistency, Strategy, StrategyError, StrategyKind};
pub use vote::majority_vote;
