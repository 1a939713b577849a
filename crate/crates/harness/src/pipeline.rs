//! The evaluation pipeline: strategy specs, cache-fronted completion, the
//! per-question answer/extract/score flow, and the concurrent dataset runner.
//!
//! A run proceeds per question as: assemble the strategy's conversation,
//! request one completion (with `n` choices under self-consistency), then
//! for each returned choice make a second, fresh-conversation request that
//! restates the question and the raw reply followed by the format's answer
//! trigger, and parse that extraction reply. If the extraction reply does
//! not parse, parsing falls back to the raw reply. Self-consistency takes a
//! majority vote over the per-choice parses. Scoring compares canonical
//! strings.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;
use tokio::task::JoinSet;

use roleplay_core::{
    build_extraction_message, conversation_digest, majority_vote, score, ChatMessage,
    CompletionParams, CompletionResult, Conversation, ExtractionOutcome, NormalizedAnswer,
    Question, RunRecord, SelfConsistency, Strategy, StrategyError, StrategyKind, Usage,
};

use crate::backend::BackendError;
use crate::cache::ResponseCache;
use crate::client::ChatClient;
use crate::records::{MetaEvent, MetaWriter, RecordError, RecordWriter};
use crate::registry::{Registry, RegistryError, Rounds};
use crate::texts;

/// Errors surfaced by pipeline operations.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("invalid strategy: {0}")]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Spec(#[from] SpecParseError),
    #[error("failed to read exemplar file {path}: {source}")]
    Exemplars {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("worker task failed: {message}")]
    Worker { message: String },
}

// --- strategy specs --------------------------------------------------------

/// A strategy as named on the command line, before prompt texts are
/// resolved against a registry.
///
/// Grammar: `zeroshot`, `zeroshot-cot`, `fewshot:<name>`,
/// `roleplay1:<prompt_id>`, `roleplay2:<prompt_id>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategySpec {
    ZeroShot,
    ZeroShotCot,
    FewShot { name: String },
    RolePlayOneRound { prompt_id: String },
    RolePlayTwoRound { prompt_id: String },
}

/// The spec string did not match the strategy grammar.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown strategy {spec:?}; expected zeroshot, zeroshot-cot, fewshot:<name>, roleplay1:<prompt_id>, or roleplay2:<prompt_id>")]
pub struct SpecParseError {
    pub spec: String,
}

impl FromStr for StrategySpec {
    type Err = SpecParseError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let reject = || SpecParseError {
            spec: spec.to_owned(),
        };
        if let Some((head, arg)) = spec.split_once(':') {
            if arg.is_empty() {
                return Err(reject());
            }
            return match head {
                "fewshot" => Ok(StrategySpec::FewShot {
                    name: arg.to_owned(),
                }),
                "roleplay1" => Ok(StrategySpec::RolePlayOneRound {
                    prompt_id: arg.to_owned(),
                }),
                "roleplay2" => Ok(StrategySpec::RolePlayTwoRound {
                    prompt_id: arg.to_owned(),
                }),
                _ => Err(reject()),
            };
        }
        match spec {
            "zeroshot" => Ok(StrategySpec::ZeroShot),
            "zeroshot-cot" => Ok(StrategySpec::ZeroShotCot),
            _ => Err(reject()),
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::ZeroShot => f.write_str("zeroshot"),
            StrategySpec::ZeroShotCot => f.write_str("zeroshot-cot"),
            StrategySpec::FewShot { name } => write!(f, "fewshot:{name}"),
            StrategySpec::RolePlayOneRound { prompt_id } => write!(f, "roleplay1:{prompt_id}"),
            StrategySpec::RolePlayTwoRound { prompt_id } => write!(f, "roleplay2:{prompt_id}"),
        }
    }
}

/// Knobs that modify a base strategy spec.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StrategyOptions {
    pub self_consistency: Option<SelfConsistency>,
    /// Prepend the "respond actively" system message to every conversation.
    pub system_override: bool,
    pub max_tokens: Option<u32>,
}

/// Resolve a spec into a runnable [`Strategy`] using the registry's texts.
///
/// The strategy name doubles as the report label: the spec string, plus a
/// `+sc<n>` suffix when self-consistency is enabled.
pub fn resolve_strategy(
    spec: &StrategySpec,
    registry: &Registry,
    model: &str,
    options: &StrategyOptions,
) -> Result<Strategy, PipelineError> {
    let kind = match spec {
        StrategySpec::ZeroShot => StrategyKind::ZeroShot,
        StrategySpec::ZeroShotCot => StrategyKind::ZeroShotCot {
            trigger: registry.cot_trigger().to_owned(),
        },
        StrategySpec::FewShot { name } => {
            let path = registry
                .exemplar_path(name)
                .ok_or_else(|| RegistryError::UnknownName {
                    name: name.clone(),
                })?;
            let path = PathBuf::from(path);
            let exemplars =
                std::fs::read_to_string(&path).map_err(|source| PipelineError::Exemplars {
                    path: path.clone(),
                    source,
                })?;
            StrategyKind::FewShotCot { exemplars }
        }
        StrategySpec::RolePlayOneRound { prompt_id } => {
            let pair = registry.pair(prompt_id)?;
            StrategyKind::RolePlayOneRound {
                prompt_id: prompt_id.clone(),
                role_setting: pair.role_setting.clone(),
            }
        }
        StrategySpec::RolePlayTwoRound { prompt_id } => {
            let (setting, feedback) = registry.two_round_pair(prompt_id)?;
            StrategyKind::RolePlayTwoRound {
                prompt_id: prompt_id.clone(),
                role_setting: setting.to_owned(),
                role_feedback: feedback.to_owned(),
            }
        }
    };

    let name = match options.self_consistency {
        Some(sc) => format!("{spec}+sc{}", sc.n),
        None => spec.to_string(),
    };
    let mut strategy = Strategy::new(name, kind, model);
    if let Some(max_tokens) = options.max_tokens {
        strategy.params.max_tokens = max_tokens;
    }
    if let Some(sc) = options.self_consistency {
        strategy = strategy.with_self_consistency(sc.n, sc.temperature);
    }
    if options.system_override {
        let text = registry
            .text("system_override_llama")
            .unwrap_or(texts::SYSTEM_OVERRIDE_ACTIVE_ANSWER);
        strategy = strategy.with_system_override(text);
    }
    strategy.validate()?;
    Ok(strategy)
}

// --- cache-fronted client --------------------------------------------------

/// A [`ChatClient`] with an optional content-addressed response cache in
/// front of it. Hits skip the backend entirely; misses are stored after the
/// call succeeds.
pub struct CachedClient {
    client: ChatClient,
    cache: Option<ResponseCache>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl CachedClient {
    pub fn new(client: ChatClient, cache: Option<ResponseCache>) -> Self {
        CachedClient {
            client,
            cache,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn client(&self) -> &ChatClient {
        &self.client
    }

    pub fn cache_hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn cache_misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    /// Complete a request, returning the result and its request digest.
    pub async fn complete(
        &self,
        conversation: &Conversation,
        params: &CompletionParams,
    ) -> Result<(CompletionResult, String), BackendError> {
        conversation.validate()?;
        params.validate()?;
        let digest = conversation_digest(conversation, params);
        if let Some(cache) = &self.cache {
            if let Some(result) = cache.get(&digest, params) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok((result, digest));
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let result = self.client.complete(conversation, params).await?;
        if let Some(cache) = &self.cache {
            if let Err(e) = cache.put(&digest, params, &result) {
                // A cache write failure must not lose a finished completion.
                eprintln!("warning: failed to cache response {digest}: {e}");
            }
        }
        Ok((result, digest))
    }
}

// --- per-question flow -----------------------------------------------------

/// How the extraction request is framed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtractionMode {
    /// A fresh conversation restating the question and the raw reply,
    /// followed by the answer trigger.
    #[default]
    FreshConversation,
    /// Continue the original conversation: append the raw reply as an
    /// assistant turn and the answer trigger as a new user turn.
    InContext,
}

/// Everything a worker needs to answer questions for one run.
pub struct RunContext {
    pub client: CachedClient,
    pub registry: Registry,
    pub strategy: Strategy,
    pub extraction: ExtractionMode,
}

impl RunContext {
    /// The strategy fingerprint stamped into every record of this run.
    pub fn fingerprint(&self) -> String {
        self.strategy.fingerprint()
    }
}

/// Answer one question end to end and score it.
pub async fn answer_question(
    ctx: &RunContext,
    question: &Question,
) -> Result<RunRecord, PipelineError> {
    let format = question.format();
    let conversation = ctx.strategy.assemble(question);
    let params = ctx.strategy.sampling_params();
    let (result, digest) = ctx.client.complete(&conversation, &params).await?;

    let trigger = ctx.registry.trigger_for(format);
    let extraction_params =
        CompletionParams::greedy(&ctx.strategy.params.model).with_max_tokens(params.max_tokens);

    let mut digests = vec![digest];
    let mut samples = Vec::with_capacity(result.choices.len());
    for raw in &result.choices {
        let extraction_conversation = match ctx.extraction {
            ExtractionMode::FreshConversation => Conversation::from(vec![ChatMessage::user(
                build_extraction_message(&question.text, raw, trigger),
            )]),
            ExtractionMode::InContext => {
                let mut continued = conversation.clone();
                continued.push(ChatMessage::assistant(raw));
                continued.push(ChatMessage::user(trigger));
                continued
            }
        };
        let (extraction_result, extraction_digest) = ctx
            .client
            .complete(&extraction_conversation, &extraction_params)
            .await?;
        digests.push(extraction_digest);
        let extraction_text = extraction_result
            .choices
            .first()
            .cloned()
            .unwrap_or_default();
        samples.push(ExtractionOutcome::resolve(
            raw.clone(),
            extraction_text,
            format,
        ));
    }

    let votes: Vec<Option<NormalizedAnswer>> =
        samples.iter().map(|s| s.parsed.clone()).collect();
    let parsed = majority_vote(&votes);
    let correct = score(parsed.as_ref(), &question.gold);

    Ok(RunRecord {
        question_id: question.id.clone(),
        dataset_id: question.dataset_id.clone(),
        strategy: ctx.strategy.name.clone(),
        strategy_fingerprint: ctx.strategy.fingerprint(),
        digests,
        samples,
        parsed,
        gold: question.gold.clone(),
        correct,
    })
}

// --- dataset runner --------------------------------------------------------

/// A question that could not be answered (after retries); the run continues.
#[derive(Debug)]
pub struct QuestionFailure {
    pub question_id: String,
    pub message: String,
}

/// Tallies for a finished (or partially failed) run.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub total: usize,
    pub completed: usize,
    pub failures: Vec<QuestionFailure>,
    pub correct: usize,
    pub parse_failed: usize,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub backend_calls: u64,
    pub retries: u64,
    pub usage: Usage,
}

/// Answer every question concurrently and append records to `writer` in
/// input order.
///
/// Concurrency: all questions are spawned at once; the client's in-flight
/// limiter bounds actual backend concurrency. Completions arrive out of
/// order and are buffered so the record file order is deterministic —
/// identical runs produce byte-identical files. A question failure is
/// logged to the meta sidecar and skipped; it never aborts the run or
/// appears in the record file.
pub async fn run_dataset(
    ctx: Arc<RunContext>,
    questions: Vec<Question>,
    writer: &mut RecordWriter,
    meta: &mut MetaWriter,
) -> Result<RunSummary, PipelineError> {
    let mut summary = RunSummary {
        total: questions.len(),
        ..RunSummary::default()
    };

    let mut join = JoinSet::new();
    for (index, question) in questions.into_iter().enumerate() {
        let ctx = Arc::clone(&ctx);
        join.spawn(async move {
            let outcome = answer_question(&ctx, &question).await;
            (index, question.id, outcome)
        });
    }

    // Reorder buffer: hold finished work until everything before it is
    // written.
    let mut pending: BTreeMap<usize, (String, Result<RunRecord, PipelineError>)> = BTreeMap::new();
    let mut next_to_write = 0usize;
    while let Some(joined) = join.join_next().await {
        let (index, question_id, outcome) = joined.map_err(|e| PipelineError::Worker {
            message: e.to_string(),
        })?;
        pending.insert(index, (question_id, outcome));
        while let Some((question_id, outcome)) = pending.remove(&next_to_write) {
            next_to_write += 1;
            match outcome {
                Ok(record) => {
                    summary.completed += 1;
                    if record.correct {
                        summary.correct += 1;
                    }
                    if record.parse_failed() {
                        summary.parse_failed += 1;
                    }
                    writer.append(&record)?;
                }
                Err(error) => {
                    let message = error.to_string();
                    meta.append(&MetaEvent::QuestionFailed {
                        question_id: question_id.clone(),
                        message: message.clone(),
                    })?;
                    summary.failures.push(QuestionFailure {
                        question_id,
                        message,
                    });
                }
            }
        }
    }

    summary.cache_hits = ctx.client.cache_hits();
    summary.cache_misses = ctx.client.cache_misses();
    summary.backend_calls = ctx.client.client().backend_calls();
    summary.retries = ctx.client.client().retries();
    summary.usage = ctx.client.client().usage();
    Ok(summary)
}

// --- stage-1 feedback sampling ---------------------------------------------

/// Sample candidate role-feedback replies for a two-round pair's setting.
///
/// This is the first stage of preparing a two-round prompt: send the role
/// setting alone at a positive temperature, collect `k` candidate replies,
/// and let a human pick one to freeze into the registry.
pub async fn sample_feedback(
    client: &CachedClient,
    registry: &Registry,
    prompt_id: &str,
    model: &str,
    k: u32,
    temperature: f64,
) -> Result<Vec<String>, PipelineError> {
    let pair = registry.pair(prompt_id)?;
    if pair.rounds == Rounds::OneRound {
        return Err(RegistryError::OneRoundPair {
            prompt_id: prompt_id.to_owned(),
        }
        .into());
    }
    let conversation = Conversation::from(vec![ChatMessage::user(pair.role_setting.clone())]);
    let params = CompletionParams::sampling(model, temperature, k);
    let (result, _digest) = client.complete(&conversation, &params).await?;
    Ok(result.choices)
}
