//! Prompting strategies and conversation assembly.
//!
//! A [`Strategy`] is fully *resolved*: every prompt text it needs (role
//! setting, role feedback, trigger sentence, exemplar block) is inlined, so
//! assembly is a pure function of strategy + question and the strategy can be
//! fingerprinted for reproducibility. Looking prompt ids up in a registry is
//! the companion crate's job.

use alloc::string::String;
use core::fmt;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::chat::{ChatMessage, CompletionParams, Conversation, ParamsError};
use crate::question::Question;

/// Which prompting scheme to use, with all texts resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyKind {
    /// The bare question.
    ZeroShot,
    /// Question plus a chain-of-thought trigger sentence.
    ZeroShotCot { trigger: String },
    /// Worked exemplars prepended to the question.
    FewShotCot { exemplars: String },
    /// Role-setting prompt and question merged into one user turn.
    RolePlayOneRound {
        prompt_id: String,
        role_setting: String,
    },
    /// Role-setting user turn, pre-recorded role-feedback assistant turn,
    /// then the question — all sent in a single request.
    RolePlayTwoRound {
        prompt_id: String,
        role_setting: String,
        role_feedback: String,
    },
}

impl StrategyKind {
    /// Short tag used in fingerprints and reports.
    pub fn tag(&self) -> &'static str {
        match self {
            StrategyKind::ZeroShot => "zero_shot",
            StrategyKind::ZeroShotCot { .. } => "zero_shot_cot",
            StrategyKind::FewShotCot { .. } => "few_shot_cot",
            StrategyKind::RolePlayOneRound { .. } => "roleplay_one_round",
            StrategyKind::RolePlayTwoRound { .. } => "roleplay_two_round",
        }
    }
}

/// Sample-and-vote configuration layered over a strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfConsistency {
    /// Number of reasoning paths to sample.
    pub n: u32,
    /// Sampling temperature for those paths (must be positive).
    pub temperature: f64,
}

/// A fully resolved evaluation strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    /// Human-readable label, e.g. `roleplay2:math_teacher_v4`.
    pub name: String,
    pub kind: StrategyKind,
    /// Base completion parameters (greedy unless self-consistency applies).
    pub params: CompletionParams,
    /// Optional system message prepended to every assembled conversation
    /// (some chat servers need one to answer test questions willingly).
    pub system_override: Option<String>,
    pub self_consistency: Option<SelfConsistency>,
}

/// Why a strategy is malformed.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategyError {
    Params(ParamsError),
    EmptyPromptText { field: &'static str },
    /// Self-consistency at temperature 0 would sample identical paths.
    NonPositiveSamplingTemperature { temperature: f64 },
    ZeroSamples,
}

impl fmt::Display for StrategyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyError::Params(e) => write!(f, "invalid completion parameters: {e}"),
            StrategyError::EmptyPromptText { field } => {
                write!(f, "strategy field {field} is empty")
            }
            StrategyError::NonPositiveSamplingTemperature { temperature } => {
                write!(f, "self-consistency temperature {temperature} must be positive")
            }
            StrategyError::ZeroSamples => write!(f, "self-consistency needs at least one sample"),
        }
    }
}

impl core::error::Error for StrategyError {}

impl From<ParamsError> for StrategyError {
    fn from(e: ParamsError) -> Self {
        StrategyError::Params(e)
    }
}

impl Strategy {
    /// Greedy single-sample strategy with default parameters.
    pub fn new(name: impl Into<String>, kind: StrategyKind, model: impl Into<String>) -> Self {
        Strategy {
            name: name.into(),
            kind,
            params: CompletionParams::greedy(model),
            system_override: None,
            self_consistency: None,
        }
    }

    pub fn with_self_consistency(mut self, n: u32, temperature: f64) -> Self {
        self.self_consistency = Some(SelfConsistency { n, temperature });
        self
    }

    pub fn with_system_override(mut self, text: impl Into<String>) -> Self {
        self.system_override = Some(text.into());
        self
    }

    /// Check prompt texts and parameter ranges.
    pub fn validate(&self) -> Result<(), StrategyError> {
        self.params.validate()?;
        let empty = |field, text: &String| {
            if text.is_empty() {
                Err(StrategyError::EmptyPromptText { field })
            } else {
                Ok(())
            }
        };
        match &self.kind {
            StrategyKind::ZeroShot => {}
            StrategyKind::ZeroShotCot { trigger } => empty("trigger", trigger)?,
            StrategyKind::FewShotCot { exemplars } => empty("exemplars", exemplars)?,
            StrategyKind::RolePlayOneRound {
                prompt_id,
                role_setting,
            } => {
                empty("prompt_id", prompt_id)?;
                empty("role_setting", role_setting)?;
            }
            StrategyKind::RolePlayTwoRound {
                prompt_id,
                role_setting,
                role_feedback,
            } => {
                empty("prompt_id", prompt_id)?;
                empty("role_setting", role_setting)?;
                empty("role_feedback", role_feedback)?;
            }
        }
        if let Some(text) = &self.system_override {
            empty("system_override", text)?;
        }
        if let Some(sc) = &self.self_consistency {
            if sc.n == 0 {
                return Err(StrategyError::ZeroSamples);
            }
            if sc.temperature <= 0.0 || sc.temperature.is_nan() {
                return Err(StrategyError::NonPositiveSamplingTemperature {
                    temperature: sc.temperature,
                });
            }
        }
        Ok(())
    }

    /// Parameters for the reasoning request, with self-consistency applied.
    pub fn sampling_params(&self) -> CompletionParams {
        let mut params = self.params.clone();
        if let Some(sc) = &self.self_consistency {
            params.n = sc.n;
            params.temperature = sc.temperature;
        }
        params
    }

    /// Assemble the conversation sent for one question's reasoning request.
    pub fn assemble(&self, question: &Question) -> Conversation {
        let mut conversation = Conversation::default();
        if let Some(text) = &self.system_override {
            conversation.push(ChatMessage::system(text.clone()));
        }
        match &self.kind {
            StrategyKind::ZeroShot => {
                conversation.push(ChatMessage::user(question.text.clone()));
            }
            StrategyKind::ZeroShotCot { trigger } => {
                let mut content = question.text.clone();
                content.push('\n');
                content.push_str(trigger);
                conversation.push(ChatMessage::user(content));
            }
            StrategyKind::FewShotCot { exemplars } => {
                let mut content = exemplars.clone();
                content.push('\n');
                content.push_str(&question.text);
                conversation.push(ChatMessage::user(content));
            }
            StrategyKind::RolePlayOneRound { role_setting, .. } => {
                let mut content = role_setting.clone();
                content.push('\n');
                content.push_str(&question.text);
                conversation.push(ChatMessage::user(content));
            }
            StrategyKind::RolePlayTwoRound {
                role_setting,
                role_feedback,
                ..
            } => {
                conversation.push(ChatMessage::user(role_setting.clone()));
                conversation.push(ChatMessage::assistant(role_feedback.clone()));
                conversation.push(ChatMessage::user(question.text.clone()));
            }
        }
        conversation
    }

    /// Stable digest over every field that affects behaviour: kind tag,
    /// resolved prompt texts, completion parameters, system override, and
    /// self-consistency settings. Run records carry this so a resumed or
    /// replayed run can prove it used the same strategy.
    pub fn fingerprint(&self) -> String {
        fn field(canon: &mut String, name: &str, value: &str) {
            let _ = writeln!(canon, "{}:{}:{}", name, value.len(), value);
        }
        let mut canon = String::from("roleplay-strategy-v1\n");
        field(&mut canon, "kind", self.kind.tag());
        match &self.kind {
            StrategyKind::ZeroShot => {}
            StrategyKind::ZeroShotCot { trigger } => field(&mut canon, "trigger", trigger),
            StrategyKind::FewShotCot { exemplars } => field(&mut canon, "exemplars", exemplars),
            StrategyKind::RolePlayOneRound {
                prompt_id,
                role_setting,
            } => {
                field(&mut canon, "prompt_id", prompt_id);
                field(&mut canon, "role_setting", role_setting);
            }
            StrategyKind::RolePlayTwoRound {
                prompt_id,
                role_setting,
                role_feedback,
            } => {
                field(&mut canon, "prompt_id", prompt_id);
                field(&mut canon, "role_setting", role_setting);
                field(&mut canon, "role_feedback", role_feedback);
            }
        }
        field(&mut canon, "model", &self.params.model);
        let _ = writeln!(canon, "temperature:{:.6}", self.params.temperature);
        let _ = writeln!(canon, "max_tokens:{}", self.params.max_tokens);
        let _ = writeln!(canon, "n:{}", self.params.n);
        match &self.system_override {
            Some(text) => field(&mut canon, "system", text),
            None => canon.push_str("system:-\n"),
        }
        match &self.self_consistency {
            Some(sc) => {
                let _ = writeln!(canon, "sc:{}:{:.6}", sc.n, sc.temperature);
            }
            None => canon.push_str("sc:-\n"),
        }
        let hash = Sha256::digest(canon.as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in hash {
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }
}
