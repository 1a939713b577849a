//! Authoring tool for mock-backend fixtures.
//!
//! A *plan* file declares, for one strategy over one synthetic dataset,
//! every raw reply and extraction reply the mock backend should produce,
//! plus the hand-counted number of correct answers. `author` turns plans
//! into a digest-keyed mock script, canonical question files, and an
//! expected report — by actually running the pipeline against the authored
//! script, then verifying the outcome matches the plan's declared counts.
//! Fixtures therefore cannot drift from the code that consumes them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use roleplay_core::{aggregate, AggregateError, AnswerFormat, Question, Report, RunRecord};

use crate::backend::{MockBackend, MockMode, MockScriptError};
use crate::client::ChatClient;
use crate::datasets::{self, DatasetError};
use crate::pipeline::{
    answer_question, resolve_strategy, CachedClient, ExtractionMode, PipelineError, RunContext,
    StrategyOptions, StrategySpec,
};
use crate::registry::Registry;

pub const PLAN_SCHEMA: &str = "mock-plan-v1";

#[derive(Debug, Error)]
pub enum MockAuthorError {
    #[error("failed to read plan {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("plan {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("plan {path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error(
        "plan {path}: scripted replies for a request digest conflict with another plan entry \
         (digest {digest})"
    )]
    ConflictingReplies { path: PathBuf, digest: String },
    #[error(
        "plan {path} declares {expected} correct answers for strategy {strategy}, \
         but the pipeline scores {found}"
    )]
    DeclaredCountMismatch {
        path: PathBuf,
        strategy: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Script(#[from] MockScriptError),
    #[error("authored records failed aggregation: {0}")]
    Aggregate(AggregateError),
    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanSelfConsistency {
    n: u32,
    temperature: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanQuestion {
    id: String,
    text: String,
    gold: String,
    /// Raw reasoning replies, one per sampled choice.
    answers: Vec<String>,
    /// Extraction replies, aligned with `answers`.
    extractions: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Plan {
    schema: String,
    model: String,
    dataset_id: String,
    format: AnswerFormat,
    strategy: String,
    #[serde(default)]
    self_consistency: Option<PlanSelfConsistency>,
    #[serde(default)]
    system_override: bool,
    /// Hand-counted correct answers this plan is designed to score.
    expected_correct: usize,
    questions: Vec<PlanQuestion>,
}

/// Everything authored from a set of plans.
#[derive(Debug)]
pub struct Authored {
    /// Digest-keyed mock script (JSONL, sorted by digest).
    pub script: String,
    /// Canonical question files, one per dataset id.
    pub questions: BTreeMap<String, Vec<Question>>,
    /// Records produced by running the pipeline over the authored script.
    pub records: Vec<RunRecord>,
    /// Aggregated report over those records.
    pub report: Report,
}

fn load_plan(path: &Path) -> Result<Plan, MockAuthorError> {
    let content = std::fs::read_to_string(path).map_err(|source| MockAuthorError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let plan: Plan = serde_json::from_str(&content).map_err(|e| MockAuthorError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if plan.schema != PLAN_SCHEMA {
        return Err(MockAuthorError::Invalid {
            path: path.to_path_buf(),
            message: format!(
                "unsupported plan schema {:?} (this build supports {PLAN_SCHEMA:?})",
                plan.schema
            ),
        });
    }
    Ok(plan)
}

fn invalid(path: &Path, message: String) -> MockAuthorError {
    MockAuthorError::Invalid {
        path: path.to_path_buf(),
        message,
    }
}

/// Author fixtures from plan files.
pub async fn author(plan_paths: &[PathBuf], registry: &Registry) -> Result<Authored, MockAuthorError> {
    let mut script_entries: BTreeMap<String, (Vec<String>, PathBuf)> = BTreeMap::new();
    let mut questions_by_dataset: BTreeMap<String, Vec<Question>> = BTreeMap::new();
    let mut prepared = Vec::new();

    for path in plan_paths {
        let plan = load_plan(path)?;
        let spec: StrategySpec = plan
            .strategy
            .parse()
            .map_err(|e: crate::pipeline::SpecParseError| invalid(path, e.to_string()))?;
        let options = StrategyOptions {
            self_consistency: plan.self_consistency.as_ref().map(|sc| {
                roleplay_core::SelfConsistency {
                    n: sc.n,
                    temperature: sc.temperature,
                }
            }),
            system_override: plan.system_override,
            max_tokens: None,
        };
        let strategy = resolve_strategy(&spec, registry, &plan.model, &options)?;
        let params = strategy.sampling_params();
        let n = params.n as usize;

        let mut questions = Vec::with_capacity(plan.questions.len());
        for (index, pq) in plan.questions.iter().enumerate() {
            let gold = roleplay_core::normalize_gold(&pq.gold, plan.format)
                .map_err(|e| invalid(path, format!("question {index}: bad gold: {e}")))?;
            let question = Question {
                id: pq.id.clone(),
                dataset_id: plan.dataset_id.clone(),
                text: pq.text.clone(),
                gold,
            };
            question
                .validate(plan.format)
                .map_err(|e| invalid(path, format!("question {index}: {e}")))?;
            if pq.answers.len() != n {
                return Err(invalid(
                    path,
                    format!(
                        "question {index}: {} answers scripted but strategy samples {n}",
                        pq.answers.len()
                    ),
                ));
            }
            if pq.extractions.len() != pq.answers.len() {
                return Err(invalid(
                    path,
                    format!(
                        "question {index}: {} extractions for {} answers",
                        pq.extractions.len(),
                        pq.answers.len()
                    ),
                ));
            }

            // Script the reasoning request.
            let conversation = strategy.assemble(&question);
            let digest = roleplay_core::conversation_digest(&conversation, &params);
            insert_entry(&mut script_entries, digest, pq.answers.clone(), path)?;

            // Script each extraction request (fresh conversation).
            let trigger = registry.trigger_for(plan.format);
            let extraction_params =
                roleplay_core::CompletionParams::greedy(&strategy.params.model)
                    .with_max_tokens(params.max_tokens);
            for (answer, extraction) in pq.answers.iter().zip(&pq.extractions) {
                let conv = roleplay_core::Conversation::from(vec![
                    roleplay_core::ChatMessage::user(roleplay_core::build_extraction_message(
                        &question.text,
                        answer,
                        trigger,
                    )),
                ]);
                let digest = roleplay_core::conversation_digest(&conv, &extraction_params);
                insert_entry(
                    &mut script_entries,
                    digest,
                    vec![extraction.clone()],
                    path,
                )?;
            }
            questions.push(question);
        }

        // All plans over one dataset must agree on its questions.
        match questions_by_dataset.get(&plan.dataset_id) {
            None => {
                questions_by_dataset.insert(plan.dataset_id.clone(), questions.clone());
            }
            Some(existing) if *existing == questions => {}
            Some(_) => {
                return Err(invalid(
                    path,
                    format!(
                        "dataset {} questions differ from an earlier plan's",
                        plan.dataset_id
                    ),
                ));
            }
        }

        prepared.push((path.clone(), strategy, plan.expected_correct, questions));
    }

    let mut script = String::new();
    for (digest, (choices, _)) in &script_entries {
        script.push_str(
            &serde_json::json!({"digest": digest, "choices": choices}).to_string(),
        );
        script.push('\n');
    }

    // Replay the authored script through the real pipeline and check the
    // hand-declared counts.
    let backend = Arc::new(MockBackend::from_script_str(&script, MockMode::Digest)?);
    let mut records = Vec::new();
    for (path, strategy, expected_correct, questions) in prepared {
        let strategy_name = strategy.name.clone();
        let ctx = RunContext {
            client: CachedClient::new(ChatClient::new(backend.clone(), 4), None),
            registry: registry.clone(),
            strategy,
            extraction: ExtractionMode::FreshConversation,
        };
        let mut correct = 0usize;
        for question in &questions {
            let record = answer_question(&ctx, question).await?;
            if record.correct {
                correct += 1;
            }
            records.push(record);
        }
        if correct != expected_correct {
            return Err(MockAuthorError::DeclaredCountMismatch {
                path,
                strategy: strategy_name,
                expected: expected_correct,
                found: correct,
            });
        }
    }

    let report = aggregate(&records).map_err(MockAuthorError::Aggregate)?;
    Ok(Authored {
        script,
        questions: questions_by_dataset,
        records,
        report,
    })
}

fn insert_entry(
    entries: &mut BTreeMap<String, (Vec<String>, PathBuf)>,
    digest: String,
    choices: Vec<String>,
    path: &Path,
) -> Result<(), MockAuthorError> {
    match entries.get(&digest) {
        None => {
            entries.insert(digest, (choices, path.to_path_buf()));
            Ok(())
        }
        Some((existing, _)) if *existing == choices => Ok(()),
        Some(_) => Err(MockAuthorError::ConflictingReplies {
            path: path.to_path_buf(),
            digest,
        }),
    }
}

/// Render the expected report as pretty JSON (trailing newline included).
pub fn report_json(report: &Report) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("reports serialize");
    out.push('\n');
    out
}

/// Write authored fixtures into a directory: `script.jsonl`, one
/// `<dataset_id>.questions.jsonl` per dataset, and `expected_report.json`.
pub fn write_outputs(authored: &Authored, out_dir: &Path) -> Result<(), MockAuthorError> {
    std::fs::create_dir_all(out_dir).map_err(|source| MockAuthorError::Write {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let write = |name: String, content: &str| -> Result<(), MockAuthorError> {
        let path = out_dir.join(name);
        std::fs::write(&path, content).map_err(|source| MockAuthorError::Write { path, source })
    };
    write("script.jsonl".to_owned(), &authored.script)?;
    for (dataset_id, questions) in &authored.questions {
        write(
            format!("{dataset_id}.questions.jsonl"),
            &datasets::to_canonical_jsonl(questions),
        )?;
    }
    write("expected_report.json".to_owned(), &report_json(&authored.report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan_json(strategy: &str, expected_correct: usize, answers: &[(&str, &str, &str, &str)]) -> String {
        // answers: (id, text, gold, raw reply); extraction reply mirrors gold
        // or a wrong value depending on the raw reply content.
        let questions: Vec<serde_json::Value> = answers
            .iter()
            .map(|(id, text, gold, raw)| {
                serde_json::json!({
                    "id": id,
                    "text": text,
                    "gold": gold,
                    "answers": [raw],
                    "extractions": [raw.rsplit(' ').next().unwrap().trim_end_matches('.')],
                })
            })
            .collect();
        serde_json::json!({
            "schema": PLAN_SCHEMA,
            "model": "mock-model",
            "dataset_id": "tiny",
            "format": "arabic_number",
            "strategy": strategy,
            "expected_correct": expected_correct,
            "questions": questions,
        })
        .to_string()
    }

    #[tokio::test]
    async fn authors_script_and_verified_report() {
        let dir = tempfile::tempdir().unwrap();
        let plan_path = dir.path().join("plan.json");
        std::fs::write(
            &plan_path,
            plan_json(
                "zeroshot",
                1,
                &[
                    ("tiny-0000", "What is 2 plus 2?", "4", "The answer is 4."),
                    ("tiny-0001", "What is 3 plus 3?", "6", "The answer is 7."),
                ],
            ),
        )
        .unwrap();
        let registry = Registry::builtin();
        let authored = author(&[plan_path], &registry).await.unwrap();

        assert_eq!(authored.records.len(), 2);
        assert_eq!(authored.report.rows.len(), 1);
        let row = &authored.report.rows[0];
        assert_eq!((row.total, row.correct), (2, 1));
        assert_eq!(row.accuracy_text(), "50.0");
        // Script round-trips through the loader.
        assert!(MockBackend::from_script_str(&authored.script, MockMode::Digest).is_ok());
        assert_eq!(authored.questions["tiny"].len(), 2);

        let out = dir.path().join("out");
        write_outputs(&authored, &out).unwrap();
        assert!(out.join("script.jsonl").exists());
        assert!(out.join("tiny.questions.jsonl").exists());
        assert!(out.join("expected_report.json").exists());
    }

    #[tokio::test]
    async fn wrong_declared_count_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let plan_path = dir.path().join("plan.json");
        std::fs::write(
            &plan_path,
            plan_json(
                "zeroshot",
                2,
                &[("tiny-0000", "What is 2 plus 2?", "4", "The answer is 5.")],
            ),
        )
        .unwrap();
        let registry = Registry::builtin();
        let err = author(&[plan_path], &registry).await.unwrap_err();
        assert!(matches!(
            err,
            MockAuthorError::DeclaredCountMismatch {
                expected: 2,
                found: 0,
                ..
            }
        ));
    }

    #[tokio::test]
    async fn conflicting_plans_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        // Same strategy and question but different scripted replies: the
        // reasoning request digest collides with conflicting choices.
        std::fs::write(
            &a,
            plan_json("zeroshot", 1, &[("tiny-0000", "What is 2 plus 2?", "4", "It is 4.")]),
        )
        .unwrap();
        std::fs::write(
            &b,
            plan_json("zeroshot", 0, &[("tiny-0000", "What is 2 plus 2?", "4", "It is 5.")]),
        )
        .unwrap();
        let registry = Registry::builtin();
        let err = author(&[a, b], &registry).await.unwrap_err();
        assert!(matches!(err, MockAuthorError::ConflictingReplies { .. }));
    }
}
