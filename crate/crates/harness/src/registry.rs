//! The prompt registry: role prompt pairs, answer triggers, and named texts.
//!
//! A registry is a JSONL file whose first line is a schema header
//! (`{"schema_version":1}`) followed by one entry per line. The built-in
//! registry (see [`Registry::builtin`]) carries every prompt the harness
//! ships with; `prompts init` exports it so users can version and edit their
//! own copy, and `sample-feedback` writes selected role feedback back into it.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use roleplay_core::AnswerFormat;

use crate::texts;

/// The registry schema this build reads and writes.
pub const SCHEMA_VERSION: u64 = 1;

/// Whether a role prompt drives one conversation round or two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounds {
    /// Role setting and question merged into a single user turn.
    OneRound,
    /// Role setting, pre-recorded feedback, then the question.
    TwoRound,
}

/// A role-setting prompt plus (for two-round prompts) its role feedback.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolePromptPair {
    /// Stable id referenced by strategy specs, e.g. `math_teacher_v4`.
    pub prompt_id: String,
    /// Which task family the pair was designed for, e.g. `arithmetic`.
    pub task_id: String,
    pub rounds: Rounds,
    pub role_setting: String,
    /// Absent until sampled/selected for two-round pairs still in authoring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role_feedback: Option<String>,
    /// Where the pair came from: `builtin`, `reconstructed`, or a
    /// `sampled <date>, selected by user` note written by `sample-feedback`.
    pub provenance: String,
}

/// One line of a registry file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegistryEntry {
    RolePair(RolePromptPair),
    /// Extraction trigger sentence for one answer format.
    Trigger {
        format: AnswerFormat,
        trigger_text: String,
    },
    /// A named free-standing text (e.g. `cot_trigger`).
    Text { name: String, text: String },
    /// A named pointer to a few-shot exemplar file on disk.
    ExemplarFile { name: String, path: String },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    schema_version: u64,
}

/// Why a registry failed to load or a lookup failed.
#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("failed to read registry {path}: {source}")]
    Io {
        path: PathBuf,
        source: io::Error,
    },
    #[error("registry file is empty")]
    Empty,
    #[error("registry line {line}: expected schema header like {{\"schema_version\":1}}")]
    MissingHeader { line: usize },
    #[error("unsupported registry schema version {found} (this build supports {SCHEMA_VERSION})")]
    UnsupportedSchema { found: u64 },
    #[error("registry line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("registry line {line}: duplicate prompt id {prompt_id:?}")]
    DuplicatePromptId { prompt_id: String, line: usize },
    #[error("registry line {line}: duplicate trigger for format {format}")]
    DuplicateTrigger { format: AnswerFormat, line: usize },
    #[error("registry line {line}: duplicate entry named {name:?}")]
    DuplicateName { name: String, line: usize },
    #[error("registry line {line}: prompt {prompt_id:?} is one_round but carries role feedback")]
    OneRoundWithFeedback { prompt_id: String, line: usize },
    #[error("registry line {line}: prompt {prompt_id:?} has an empty {field}")]
    EmptyField {
        prompt_id: String,
        field: &'static str,
        line: usize,
    },
    #[error("no role prompt with id {prompt_id:?} in the registry (see `prompts list`)")]
    UnknownPromptId { prompt_id: String },
    #[error("no exemplar file named {name:?} in the registry (add an exemplar_file entry)")]
    UnknownName { name: String },
    #[error(
        "prompt {prompt_id:?} has no role feedback yet; run `sample-feedback --prompt {prompt_id}` \
         and select one, or use roleplay1:{prompt_id}"
    )]
    FeedbackMissing { prompt_id: String },
    #[error("prompt {prompt_id:?} is one_round and cannot take role feedback")]
    OneRoundPair { prompt_id: String },
}

/// An in-memory registry preserving file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    entries: Vec<RegistryEntry>,
}

impl Registry {
    /// Wrap already-validated entries. Private: go through `parse_str`,
    /// `load`, or `builtin`.
    fn from_entries(entries: Vec<RegistryEntry>) -> Self {
        Registry { entries }
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    /// Parse registry JSONL, validating uniqueness and rounds coherence.
    pub fn parse_str(input: &str) -> Result<Self, RegistryError> {
        if input.trim().is_empty() {
            return Err(RegistryError::Empty);
        }
        let mut lines = input.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());

        let (header_idx, header_line) = lines.next().ok_or(RegistryError::Empty)?;
        let header: Header = serde_json::from_str(header_line)
            .map_err(|_| RegistryError::MissingHeader { line: header_idx + 1 })?;
        if header.schema_version != SCHEMA_VERSION {
            return Err(RegistryError::UnsupportedSchema {
                found: header.schema_version,
            });
        }

        let mut entries = Vec::new();
        for (idx, raw) in lines {
            let line = idx + 1;
            let entry: RegistryEntry =
                serde_json::from_str(raw).map_err(|e| RegistryError::Parse {
                    line,
                    message: e.to_string(),
                })?;
            validate_new_entry(&entries, &entry, line)?;
            entries.push(entry);
        }
        Ok(Registry::from_entries(entries))
    }

    /// Load and parse a registry file.
    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let input = fs::read_to_string(path).map_err(|source| RegistryError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_str(&input)
    }

    /// Serialize to JSONL. Serialization is a fixed point: saving, loading,
    /// and saving again produces identical bytes.
    pub fn to_jsonl_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{{\"schema_version\":{SCHEMA_VERSION}}}");
        for entry in &self.entries {
            out.push_str(&serde_json::to_string(entry).expect("registry entries serialize"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), RegistryError> {
        fs::write(path, self.to_jsonl_string()).map_err(|source| RegistryError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// All role prompt pairs, in file order.
    pub fn pairs(&self) -> impl Iterator<Item = &RolePromptPair> {
        self.entries.iter().filter_map(|e| match e {
            RegistryEntry::RolePair(pair) => Some(pair),
            _ => None,
        })
    }

    pub fn pair(&self, prompt_id: &str) -> Result<&RolePromptPair, RegistryError> {
        self.pairs()
            .find(|p| p.prompt_id == prompt_id)
            .ok_or_else(|| RegistryError::UnknownPromptId {
                prompt_id: prompt_id.to_owned(),
            })
    }

    /// Resolve a pair for two-round use: both setting and feedback.
    pub fn two_round_pair(&self, prompt_id: &str) -> Result<(&str, &str), RegistryError> {
        let pair = self.pair(prompt_id)?;
        let feedback = pair
            .role_feedback
            .as_deref()
            .ok_or_else(|| RegistryError::FeedbackMissing {
                prompt_id: prompt_id.to_owned(),
            })?;
        Ok((&pair.role_setting, feedback))
    }

    /// The extraction trigger for a format — the registry's entry when
    /// present, the built-in default otherwise.
    pub fn trigger_for(&self, format: AnswerFormat) -> &str {
        self.entries
            .iter()
            .find_map(|e| match e {
                RegistryEntry::Trigger {
                    format: f,
                    trigger_text,
                } if *f == format => Some(trigger_text.as_str()),
                _ => None,
            })
            .unwrap_or_else(|| format.default_trigger())
    }

    /// Named text lookup.
    pub fn text(&self, name: &str) -> Option<&str> {
        self.entries.iter().find_map(|e| match e {
            RegistryEntry::Text { name: n, text } if n == name => Some(text.as_str()),
            _ => None,
        })
    }

    /// The chain-of-thought trigger — the registry's `cot_trigger` text when
    /// present, the built-in default otherwise.
    pub fn cot_trigger(&self) -> &str {
        self.text("cot_trigger").unwrap_or(texts::COT_TRIGGER)
    }

    /// Registered exemplar file path for `fewshot:<name>`.
    pub fn exemplar_path(&self, name: &str) -> Option<&str> {
        self.entries.iter().find_map(|e| match e {
            RegistryEntry::ExemplarFile { name: n, path } if n == name => Some(path.as_str()),
            _ => None,
        })
    }

    /// The design-ablation ladder for a base prompt id: `<base>_v1`,
    /// `<base>_v2`, … as long as consecutive rungs exist.
    pub fn ladder(&self, base: &str) -> Vec<&RolePromptPair> {
        let mut rungs = Vec::new();
        for k in 1.. {
            match self.pair(&format!("{base}_v{k}")) {
                Ok(pair) => rungs.push(pair),
                Err(_) => break,
            }
        }
        rungs
    }

    /// Append one entry, enforcing the same rules as parsing. The reported
    /// line number is where the entry would land when saved.
    pub fn add_entry(&mut self, entry: RegistryEntry) -> Result<(), RegistryError> {
        validate_new_entry(&self.entries, &entry, self.entries.len() + 2)?;
        self.entries.push(entry);
        Ok(())
    }

    /// Record a selected role feedback on a two-round pair.
    pub fn set_role_feedback(
        &mut self,
        prompt_id: &str,
        feedback: String,
        provenance: String,
    ) -> Result<(), RegistryError> {
        let pair = self
            .entries
            .iter_mut()
            .find_map(|e| match e {
                RegistryEntry::RolePair(pair) if pair.prompt_id == prompt_id => Some(pair),
                _ => None,
            })
            .ok_or_else(|| RegistryError::UnknownPromptId {
                prompt_id: prompt_id.to_owned(),
            })?;
        if pair.rounds == Rounds::OneRound {
            return Err(RegistryError::OneRoundPair {
                prompt_id: prompt_id.to_owned(),
            });
        }
        pair.role_feedback = Some(feedback);
        pair.provenance = provenance;
        Ok(())
    }

    /// The registry every build ships with.
    pub fn builtin() -> Self {
        let mut entries = Vec::new();

        for format in AnswerFormat::ALL {
            entries.push(RegistryEntry::Trigger {
                format,
                trigger_text: format.default_trigger().to_owned(),
            });
        }
        entries.push(RegistryEntry::Text {
            name: "cot_trigger".to_owned(),
            text: texts::COT_TRIGGER.to_owned(),
        });
        entries.push(RegistryEntry::Text {
            name: "system_override_llama".to_owned(),
            text: texts::SYSTEM_OVERRIDE_ACTIVE_ANSWER.to_owned(),
        });

        let two_round = |id: &str, task: &str, setting: &str, feedback: &str| {
            RegistryEntry::RolePair(RolePromptPair {
                prompt_id: id.to_owned(),
                task_id: task.to_owned(),
                rounds: Rounds::TwoRound,
                role_setting: setting.to_owned(),
                role_feedback: Some(feedback.to_owned()),
                provenance: "builtin".to_owned(),
            })
        };
        let one_round = |id: &str, task: &str, setting: &str| {
            RegistryEntry::RolePair(RolePromptPair {
                prompt_id: id.to_owned(),
                task_id: task.to_owned(),
                rounds: Rounds::OneRound,
                role_setting: setting.to_owned(),
                role_feedback: None,
                provenance: "builtin".to_owned(),
            })
        };

        // Production pairs.
        entries.push(two_round(
            "math_teacher",
            "arithmetic",
            texts::MATH_TEACHER_SETTING,
            texts::MATH_TEACHER_FEEDBACK,
        ));
        entries.push(two_round(
            "letter_teacher",
            "letter",
            texts::LETTER_TEACHER_SETTING,
            texts::LETTER_TEACHER_FEEDBACK,
        ));
        entries.push(two_round(
            "coin",
            "coin",
            texts::COIN_SETTING,
            texts::COIN_FEEDBACK,
        ));
        entries.push(two_round(
            "date_teacher",
            "date",
            texts::DATE_TEACHER_SETTING,
            texts::DATE_TEACHER_FEEDBACK,
        ));
        entries.push(two_round(
            "object_recorder",
            "object",
            texts::OBJECT_RECORDER_SETTING,
            texts::OBJECT_RECORDER_FEEDBACK,
        ));
        {
            let mut pair = match two_round(
                "commonsense_contestant",
                "commonsense",
                texts::COMMONSENSE_CONTESTANT_SETTING,
                texts::COMMONSENSE_CONTESTANT_FEEDBACK,
            ) {
                RegistryEntry::RolePair(pair) => pair,
                _ => unreachable!(),
            };
            pair.provenance = "reconstructed".to_owned();
            entries.push(RegistryEntry::RolePair(pair));
        }

        // Design-ablation ladders (rung 4 repeats the production pair).
        entries.push(one_round(
            "math_teacher_v1",
            "arithmetic",
            texts::MATH_TEACHER_V1_SETTING,
        ));
        entries.push(one_round(
            "math_teacher_v2",
            "arithmetic",
            texts::MATH_TEACHER_V2_SETTING,
        ));
        entries.push(two_round(
            "math_teacher_v3",
            "arithmetic",
            texts::MATH_TEACHER_SETTING,
            texts::MATH_TEACHER_V3_FEEDBACK,
        ));
        entries.push(two_round(
            "math_teacher_v4",
            "arithmetic",
            texts::MATH_TEACHER_SETTING,
            texts::MATH_TEACHER_FEEDBACK,
        ));
        entries.push(one_round(
            "letter_teacher_v1",
            "letter",
            texts::LETTER_TEACHER_V1_SETTING,
        ));
        entries.push(one_round(
            "letter_teacher_v2",
            "letter",
            texts::LETTER_TEACHER_SETTING,
        ));
        entries.push(two_round(
            "letter_teacher_v3",
            "letter",
            texts::LETTER_TEACHER_SETTING,
            texts::LETTER_TEACHER_V3_FEEDBACK,
        ));
        entries.push(two_round(
            "letter_teacher_v4",
            "letter",
            texts::LETTER_TEACHER_SETTING,
            texts::LETTER_TEACHER_FEEDBACK,
        ));
        entries.push(one_round("coin_v1", "coin", texts::COIN_V1_SETTING));
        entries.push(one_round("coin_v2", "coin", texts::COIN_SETTING));
        entries.push(two_round(
            "coin_v3",
            "coin",
            texts::COIN_SETTING,
            texts::COIN_V3_FEEDBACK,
        ));
        entries.push(two_round(
            "coin_v4",
            "coin",
            texts::COIN_SETTING,
            texts::COIN_FEEDBACK,
        ));

        // Role-selection study.
        entries.push(two_round(
            "mathematician",
            "arithmetic",
            texts::MATHEMATICIAN_SETTING,
            texts::MATHEMATICIAN_FEEDBACK,
        ));
        entries.push(two_round(
            "police",
            "arithmetic",
            texts::POLICE_SETTING,
            texts::POLICE_FEEDBACK,
        ));
        entries.push(two_round(
            "farmer",
            "arithmetic",
            texts::FARMER_SETTING,
            texts::FARMER_FEEDBACK,
        ));
        entries.push(two_round(
            "doctor",
            "arithmetic",
            texts::DOCTOR_SETTING,
            texts::DOCTOR_FEEDBACK,
        ));
        entries.push(two_round(
            "writer",
            "arithmetic",
            texts::WRITER_SETTING,
            texts::WRITER_FEEDBACK,
        ));
        entries.push(two_round(
            "careless_student",
            "arithmetic",
            texts::CARELESS_STUDENT_SETTING,
            texts::CARELESS_STUDENT_FEEDBACK,
        ));
        entries.push(two_round(
            "math_rookie",
            "arithmetic",
            texts::MATH_ROOKIE_SETTING,
            texts::MATH_ROOKIE_FEEDBACK,
        ));

        Registry::from_entries(entries)
    }
}

/// Validate one entry against everything accepted so far.
fn validate_new_entry(
    accepted: &[RegistryEntry],
    entry: &RegistryEntry,
    line: usize,
) -> Result<(), RegistryError> {
    match entry {
        RegistryEntry::RolePair(pair) => {
            if pair.role_setting.is_empty() {
                return Err(RegistryError::EmptyField {
                    prompt_id: pair.prompt_id.clone(),
                    field: "role_setting",
                    line,
                });
            }
            if pair.prompt_id.is_empty() {
                return Err(RegistryError::EmptyField {
                    prompt_id: pair.prompt_id.clone(),
                    field: "prompt_id",
                    line,
                });
            }
            if pair.rounds == Rounds::OneRound && pair.role_feedback.is_some() {
                return Err(RegistryError::OneRoundWithFeedback {
                    prompt_id: pair.prompt_id.clone(),
                    line,
                });
            }
            if pair.role_feedback.as_deref() == Some("") {
                return Err(RegistryError::EmptyField {
                    prompt_id: pair.prompt_id.clone(),
                    field: "role_feedback",
                    line,
                });
            }
            for existing in accepted {
                if let RegistryEntry::RolePair(p) = existing {
                    if p.prompt_id == pair.prompt_id {
                        return Err(RegistryError::DuplicatePromptId {
                            prompt_id: pair.prompt_id.clone(),
                            line,
                        });
                    }
                }
            }
        }
        RegistryEntry::Trigger { format, .. } => {
            for existing in accepted {
                if let RegistryEntry::Trigger { format: f, .. } = existing {
                    if f == format {
                        return Err(RegistryError::DuplicateTrigger {
                            format: *format,
                            line,
                        });
                    }
                }
            }
        }
        RegistryEntry::Text { name, .. } | RegistryEntry::ExemplarFile { name, .. } => {
            for existing in accepted {
                let existing_name = match existing {
                    RegistryEntry::Text { name, .. } => Some(name),
                    RegistryEntry::ExemplarFile { name, .. } => Some(name),
                    _ => None,
                };
                if existing_name == Some(name) {
                    return Err(RegistryError::DuplicateName {
                        name: name.clone(),
                        line,
                    });
                }
            }
        }
    }
    Ok(())
}
