//! The unit of evaluation: one benchmark question with its gold answer.

use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::answer::{AnswerFormat, NormalizedAnswer};

/// One evaluable question.
///
/// `gold` is stored in canonical form and must satisfy the gold-closure rule:
/// parsing the gold value under `format` reproduces it exactly. Dataset
/// loaders enforce this at import time via [`Question::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Question {
    /// Stable id, unique within a dataset (e.g. `gsm8k-0004`).
    pub id: String,
    /// Which dataset this question belongs to (e.g. `gsm8k`).
    pub dataset_id: String,
    /// Full question text as sent to the model, including any inlined
    /// answer choices.
    pub text: String,
    /// Canonical gold answer.
    pub gold: NormalizedAnswer,
}

/// Why a question was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuestionError {
    EmptyId,
    EmptyText { id: String },
    FormatMismatch {
        id: String,
        expected: AnswerFormat,
        got: AnswerFormat,
    },
    /// The gold value does not survive a parse round-trip.
    GoldNotClosed { id: String, gold: String },
}

impl fmt::Display for QuestionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuestionError::EmptyId => write!(f, "question has an empty id"),
            QuestionError::EmptyText { id } => write!(f, "question {id} has empty text"),
            QuestionError::FormatMismatch { id, expected, got } => {
                write!(f, "question {id} has format {got}, dataset expects {expected}")
            }
            QuestionError::GoldNotClosed { id, gold } => write!(
                f,
                "question {id}: gold value {gold:?} does not round-trip through the parser"
            ),
        }
    }
}

impl core::error::Error for QuestionError {}

impl Question {
    /// The answer format this question is scored under.
    pub fn format(&self) -> AnswerFormat {
        self.gold.format
    }

    /// Check id/text presence, the expected format, and gold closure.
    pub fn validate(&self, expected_format: AnswerFormat) -> Result<(), QuestionError> {
        if self.id.is_empty() {
            return Err(QuestionError::EmptyId);
        }
        if self.text.is_empty() {
            return Err(QuestionError::EmptyText {
                id: self.id.clone(),
            });
        }
        if self.gold.format != expected_format {
            return Err(QuestionError::FormatMismatch {
                id: self.id.clone(),
                expected: expected_format,
                got: self.gold.format,
            });
        }
        if !self.gold.round_trips() {
            return Err(QuestionError::GoldNotClosed {
                id: self.id.clone(),
                gold: self.gold.value.clone(),
            });
        }
        Ok(())
    }
}
