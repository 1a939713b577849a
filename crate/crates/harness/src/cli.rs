//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 on evaluation-time failures (per-question
//! failures are listed on stderr), 2 on usage or configuration errors.

use std::collections::HashSet;
use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use roleplay_core::{aggregate, parse_answer, AnswerFormat, Question, SelfConsistency};

use crate::backend::{ChatBackend, HttpBackend, MockBackend, MockMode};
use crate::cache::ResponseCache;
use crate::client::ChatClient;
use crate::config::{self, Config};
use crate::datasets::{self, DatasetManifest, CATALOG};
use crate::mock_author;
use crate::pipeline::{
    resolve_strategy, run_dataset, sample_feedback, CachedClient, ExtractionMode, RunContext,
    StrategyOptions, StrategySpec,
};
use crate::records::{
    completed_question_ids, load_records, meta_path, unix_time, MetaEvent, MetaWriter,
    RecordWriter,
};
use crate::registry::{Registry, Rounds};

#[derive(Parser)]
#[command(
    name = "roleplay-bench",
    version,
    about = "Evaluate role-play prompting and baselines over reasoning benchmarks",
    propagate_version = true
)]
pub struct Cli {
    /// Config file (default: ./roleplay-bench.toml if present).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one dataset with one strategy.
    Run(Box<RunArgs>),
    /// Aggregate run-record files into an accuracy report.
    Report(ReportArgs),
    /// Inspect, import, and validate benchmark datasets.
    #[command(subcommand)]
    Datasets(DatasetsCommand),
    /// Inspect and manage the prompt registry.
    #[command(subcommand)]
    Prompts(PromptsCommand),
    /// Debug answer parsing.
    #[command(subcommand)]
    Extract(ExtractCommand),
    /// Sample role-feedback candidates for a two-round prompt and select one.
    SampleFeedback(SampleFeedbackArgs),
    /// Inspect or clear the response cache.
    #[command(subcommand)]
    Cache(CacheCommand),
    /// Author mock-backend fixtures.
    #[command(subcommand)]
    Mock(MockCommand),
}

#[derive(Args)]
struct RunArgs {
    /// Dataset id from the catalog (expects datasets/<id>.jsonl) or a path
    /// to a canonical question file.
    #[arg(long)]
    dataset: String,
    /// Strategy spec: zeroshot | zeroshot-cot | fewshot:<name> |
    /// roleplay1:<prompt_id> | roleplay2:<prompt_id>.
    #[arg(long)]
    strategy: String,
    /// Model id sent to the backend.
    #[arg(long)]
    model: Option<String>,
    /// Mock-backend script; runs offline against scripted responses.
    #[arg(long, value_name = "SCRIPT")]
    mock: Option<PathBuf>,
    /// Self-consistency: number of sampled reasoning paths (≥ 2).
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(2..))]
    sc_n: Option<u32>,
    /// Self-consistency sampling temperature (default 0.7; implies --sc-n 10
    /// when given alone).
    #[arg(long, value_name = "T")]
    sc_temp: Option<f64>,
    /// Evaluate only the first K questions (canonical order).
    #[arg(long, value_name = "K")]
    limit: Option<usize>,
    /// Shuffle evaluation order deterministically with this seed (applied
    /// after --limit).
    #[arg(long, value_name = "SEED")]
    seed_order: Option<u64>,
    /// Record file (default: runs/<dataset>_<strategy>.jsonl).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Continue an interrupted run: skip questions already recorded under
    /// the same strategy fingerprint and append the rest.
    #[arg(long)]
    resume: bool,
    /// Response cache directory (default from config; ".roleplay-cache").
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Disable the response cache for this run.
    #[arg(long)]
    no_cache: bool,
    /// Maximum in-flight backend requests.
    #[arg(long, value_name = "N")]
    concurrency: Option<usize>,
    /// Completion token budget per request.
    #[arg(long, value_name = "N")]
    max_tokens: Option<u32>,
    /// Registry file (default: built-in registry).
    #[arg(long, value_name = "FILE")]
    registry: Option<PathBuf>,
    /// Prepend the "respond actively" system message to every conversation.
    #[arg(long)]
    system_override: bool,
    /// Run the extraction request as a continuation of the reasoning
    /// conversation instead of a fresh one.
    #[arg(long)]
    extract_in_context: bool,
    /// Chat-completions base URL (overrides env and config).
    #[arg(long, value_name = "URL")]
    base_url: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Run-record files to aggregate.
    #[arg(long, value_name = "FILE", required = true, num_args = 1..)]
    runs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    /// Also write the report to this file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum DatasetsCommand {
    /// List the supported benchmarks.
    List,
    /// Convert a downloaded source file to canonical JSONL.
    Import(DatasetImportArgs),
    /// Validate a canonical file against the catalog (format, gold closure,
    /// expected count).
    Validate(DatasetValidateArgs),
}

#[derive(Args)]
struct DatasetImportArgs {
    /// Dataset id from the catalog.
    dataset: String,
    /// Source file (default: <data-dir>/<conventional source path>).
    #[arg(long, value_name = "FILE")]
    source: Option<PathBuf>,
    /// Output canonical file (default: datasets/<id>.jsonl).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Directory holding downloaded benchmark sources (or set
    /// ROLEPLAY_BENCH_DATA_DIR).
    #[arg(long, value_name = "DIR")]
    data_dir: Option<PathBuf>,
}

#[derive(Args)]
struct DatasetValidateArgs {
    /// Dataset id from the catalog.
    dataset: String,
    /// Canonical file to validate (default: datasets/<id>.jsonl).
    #[arg(long, value_name = "FILE")]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PromptsCommand {
    /// List role prompt pairs.
    List(PromptsListArgs),
    /// Print one role prompt pair verbatim.
    Show(PromptsShowArgs),
    /// Write the built-in registry to a file for versioning and editing.
    Init(PromptsInitArgs),
}

#[derive(Args)]
struct PromptsListArgs {
    #[arg(long, value_name = "FILE")]
    registry: Option<PathBuf>,
}

#[derive(Args)]
struct PromptsShowArgs {
    prompt_id: String,
    #[arg(long, value_name = "FILE")]
    registry: Option<PathBuf>,
}

#[derive(Args)]
struct PromptsInitArgs {
    /// Destination registry file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Overwrite an existing file.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum ExtractCommand {
    /// Parse a piece of text as a final answer and print the result.
    Try(ExtractTryArgs),
}

#[derive(Args)]
struct ExtractTryArgs {
    #[arg(long)]
    format: AnswerFormatArg,
    #[arg(long)]
    text: String,
}

/// Clap-friendly wrapper for [`AnswerFormat`].
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AnswerFormatArg {
    ArabicNumber,
    OptionAe,
    OptionAc,
    OptionAf,
    YesNo,
    FreeString,
}

impl From<AnswerFormatArg> for AnswerFormat {
    fn from(arg: AnswerFormatArg) -> Self {
        match arg {
            AnswerFormatArg::ArabicNumber => AnswerFormat::ArabicNumber,
            AnswerFormatArg::OptionAe => AnswerFormat::OptionAE,
            AnswerFormatArg::OptionAc => AnswerFormat::OptionAC,
            AnswerFormatArg::OptionAf => AnswerFormat::OptionAF,
            AnswerFormatArg::YesNo => AnswerFormat::YesNo,
            AnswerFormatArg::FreeString => AnswerFormat::FreeString,
        }
    }
}

#[derive(Args)]
struct SampleFeedbackArgs {
    /// Two-round prompt id to sample feedback for.
    #[arg(long)]
    prompt: String,
    /// Number of candidates to sample.
    #[arg(long, default_value_t = 5)]
    k: u32,
    /// Sampling temperature.
    #[arg(long, default_value_t = 0.7)]
    temperature: f64,
    #[arg(long)]
    model: Option<String>,
    /// Mock-backend script (offline sampling).
    #[arg(long, value_name = "SCRIPT")]
    mock: Option<PathBuf>,
    /// Registry file to read (default: built-in registry).
    #[arg(long, value_name = "FILE")]
    registry: Option<PathBuf>,
    /// Select candidate I (1-based) non-interactively.
    #[arg(long, value_name = "I")]
    select: Option<usize>,
    /// Where to save the updated registry (default: the --registry file).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "URL")]
    base_url: Option<String>,
}

#[derive(Subcommand)]
enum CacheCommand {
    /// Print entry and size counts.
    Stats(CacheDirArg),
    /// Delete every cached response.
    Clear(CacheDirArg),
}

#[derive(Args)]
struct CacheDirArg {
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MockCommand {
    /// Build a mock script, canonical questions, and an expected report
    /// from plan files.
    Author(MockAuthorArgs),
}

#[derive(Args)]
struct MockAuthorArgs {
    /// Plan files (repeatable).
    #[arg(long, value_name = "FILE", required = true, num_args = 1..)]
    plan: Vec<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// Registry file resolving the plans' strategies (default: built-in).
    #[arg(long, value_name = "FILE")]
    registry: Option<PathBuf>,
}

// --- error plumbing --------------------------------------------------------

enum CliError {
    /// Usage/config problems: exit 2.
    Usage(String),
    /// Evaluation-time problems: exit 1.
    Failed(String),
}

impl CliError {
    fn failed(e: impl fmt::Display) -> Self {
        CliError::Failed(e.to_string())
    }
}

macro_rules! impl_failed_from {
    ($($ty:ty),* $(,)?) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::failed(e)
            }
        }
    )*};
}

impl_failed_from!(
    crate::backend::BackendError,
    crate::backend::MockScriptError,
    crate::cache::CacheError,
    crate::datasets::DatasetError,
    crate::mock_author::MockAuthorError,
    crate::pipeline::PipelineError,
    crate::records::RecordError,
    crate::registry::RegistryError,
    roleplay_core::AggregateError,
    std::io::Error,
);

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(runtime) => runtime,
        Err(e) => {
            eprintln!("error: failed to start async runtime: {e}");
            return ExitCode::FAILURE;
        }
    };
    match runtime.block_on(dispatch(cli)) {
        Ok(code) => code,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(message)) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

async fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    let config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Run(args) => run(*args, &config).await,
        Command::Report(args) => report(args),
        Command::Datasets(cmd) => datasets_cmd(cmd, &config),
        Command::Prompts(cmd) => prompts_cmd(cmd, &config),
        Command::Extract(ExtractCommand::Try(args)) => extract_try(args),
        Command::SampleFeedback(args) => sample_feedback_cmd(args, &config).await,
        Command::Cache(cmd) => cache_cmd(cmd, &config),
        Command::Mock(MockCommand::Author(args)) => mock_author_cmd(args, &config).await,
    }
}

// --- shared resolution helpers ---------------------------------------------

fn load_registry(flag: Option<&Path>, config: &Config) -> Result<Registry, CliError> {
    match flag.map(Path::to_path_buf).or_else(|| config.registry_path()) {
        Some(path) => Ok(Registry::load(&path)?),
        None => Ok(Registry::builtin()),
    }
}

fn catalog_manifest(dataset_id: &str) -> Result<&'static DatasetManifest, CliError> {
    datasets::manifest(dataset_id).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown dataset {dataset_id:?}; see `datasets list`"
        ))
    })
}

fn default_canonical_path(dataset_id: &str) -> PathBuf {
    PathBuf::from("datasets").join(format!("{dataset_id}.jsonl"))
}

/// Resolve `--dataset` to (canonical file, label for default file names).
fn resolve_dataset_arg(value: &str) -> Result<(PathBuf, String), CliError> {
    let as_path = Path::new(value);
    if as_path.exists() {
        let label = as_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_owned());
        return Ok((as_path.to_path_buf(), label));
    }
    if datasets::manifest(value).is_some() {
        let path = default_canonical_path(value);
        if !path.exists() {
            return Err(CliError::Failed(format!(
                "no canonical file at {}; run `roleplay-bench datasets import {value}` first",
                path.display()
            )));
        }
        return Ok((path, value.to_owned()));
    }
    Err(CliError::Usage(format!(
        "--dataset {value:?} is neither a catalog id (see `datasets list`) nor an existing file"
    )))
}

fn sanitize_for_filename(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

fn build_backend(
    mock: Option<&Path>,
    base_url_flag: Option<&str>,
    config: &Config,
) -> Result<Arc<dyn ChatBackend>, CliError> {
    match mock {
        Some(script) => Ok(Arc::new(MockBackend::from_script_path(script, MockMode::Digest)?)),
        None => {
            let base_url = base_url_flag
                .map(str::to_owned)
                .unwrap_or_else(|| config.base_url());
            let api_key = config.api_key();
            if api_key.is_none() && base_url == config::DEFAULT_BASE_URL {
                return Err(CliError::Failed(format!(
                    "no API key: set {} or pass --mock <script> to run offline",
                    config::API_KEY_ENV
                )));
            }
            let mut backend = HttpBackend::new(base_url, api_key);
            if !config.multi_choice() {
                backend = backend.without_multi_choice();
            }
            Ok(Arc::new(backend))
        }
    }
}

fn self_consistency_from_flags(
    sc_n: Option<u32>,
    sc_temp: Option<f64>,
) -> Option<SelfConsistency> {
    match (sc_n, sc_temp) {
        (None, None) => None,
        (n, temperature) => Some(SelfConsistency {
            n: n.unwrap_or(10),
            temperature: temperature.unwrap_or(0.7),
        }),
    }
}

// --- run -------------------------------------------------------------------

async fn run(args: RunArgs, config: &Config) -> Result<ExitCode, CliError> {
    let spec: StrategySpec = args
        .strategy
        .parse()
        .map_err(|e: crate::pipeline::SpecParseError| CliError::Usage(e.to_string()))?;
    let registry = load_registry(args.registry.as_deref(), config)?;
    let model = args.model.clone().unwrap_or_else(|| config.model());
    let options = StrategyOptions {
        self_consistency: self_consistency_from_flags(args.sc_n, args.sc_temp),
        system_override: args.system_override,
        max_tokens: args.max_tokens.or(config.max_tokens()),
    };
    let strategy = resolve_strategy(&spec, &registry, &model, &options)?;

    let (dataset_path, dataset_label) = resolve_dataset_arg(&args.dataset)?;
    let mut questions = datasets::load_canonical(&dataset_path)?;
    if let Some(limit) = args.limit {
        questions.truncate(limit);
    }
    if let Some(seed) = args.seed_order {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        questions.shuffle(&mut rng);
    }
    if questions.is_empty() {
        return Err(CliError::Failed(format!(
            "no questions to evaluate in {}",
            dataset_path.display()
        )));
    }

    let backend = build_backend(args.mock.as_deref(), args.base_url.as_deref(), config)?;
    let backend_id = backend.id().to_owned();
    let concurrency = args.concurrency.unwrap_or_else(|| config.concurrency());
    let client = ChatClient::new(backend, concurrency);
    let cache = if args.no_cache {
        None
    } else {
        args.cache_dir
            .clone()
            .or_else(|| config.cache_dir())
            .map(ResponseCache::new)
    };

    let out_path = args.out.clone().unwrap_or_else(|| {
        PathBuf::from("runs").join(format!(
            "{}_{}.jsonl",
            sanitize_for_filename(&dataset_label),
            sanitize_for_filename(&strategy.name)
        ))
    });
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }

    let fingerprint = strategy.fingerprint();
    let mut skipped = 0usize;
    let writer = if out_path.exists() {
        if !args.resume {
            return Err(CliError::Failed(format!(
                "{} already exists; pass --resume to continue it or --out for a new file",
                out_path.display()
            )));
        }
        let existing = load_records(&out_path)?;
        let done: HashSet<String> =
            completed_question_ids(&existing, &strategy.name, &fingerprint)?;
        let before = questions.len();
        questions.retain(|q| !done.contains(&q.id));
        skipped = before - questions.len();
        RecordWriter::append_to(&out_path)?
    } else {
        RecordWriter::create(&out_path)?
    };
    let mut writer = writer;
    let mut meta = MetaWriter::create(&out_path)?;

    let total = questions.len();
    meta.append(&MetaEvent::RunStarted {
        unix_time: unix_time(),
        dataset_id: dataset_label.clone(),
        strategy: strategy.name.clone(),
        fingerprint: fingerprint.clone(),
        model: model.clone(),
        backend: backend_id,
        total,
        skipped,
    })?;

    println!(
        "running {} over {} ({} questions{})",
        strategy.name,
        dataset_label,
        total,
        if skipped > 0 {
            format!(", {skipped} already done")
        } else {
            String::new()
        }
    );

    let started = std::time::Instant::now();
    let ctx = Arc::new(RunContext {
        client: CachedClient::new(client, cache),
        registry,
        strategy,
        extraction: if args.extract_in_context {
            ExtractionMode::InContext
        } else {
            ExtractionMode::FreshConversation
        },
    });
    let summary = run_dataset(Arc::clone(&ctx), questions, &mut writer, &mut meta).await?;
    let duration = started.elapsed();

    meta.append(&MetaEvent::RunFinished {
        completed: summary.completed,
        failed: summary.failures.len(),
        correct: summary.correct,
        parse_failed: summary.parse_failed,
        cache_hits: summary.cache_hits,
        cache_misses: summary.cache_misses,
        backend_calls: summary.backend_calls,
        retries: summary.retries,
        prompt_tokens: summary.usage.prompt_tokens,
        completion_tokens: summary.usage.completion_tokens,
        duration_ms: duration.as_millis() as u64,
    })?;

    println!(
        "answered {}/{} ({} correct, {} parse failures); backend calls {}, retries {}; cache {} hits / {} misses",
        summary.completed,
        summary.total,
        summary.correct,
        summary.parse_failed,
        summary.backend_calls,
        summary.retries,
        summary.cache_hits,
        summary.cache_misses,
    );
    println!("records: {}", out_path.display());

    let report = aggregate(&load_records(&out_path)?)?;
    print!("{}", report.render_text());

    if summary.failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "{} question(s) failed (details in {}):",
            summary.failures.len(),
            meta_path(&out_path).display()
        );
        for failure in &summary.failures {
            eprintln!("  {}: {}", failure.question_id, failure.message);
        }
        Ok(ExitCode::FAILURE)
    }
}

// --- report ----------------------------------------------------------------

fn report(args: ReportArgs) -> Result<ExitCode, CliError> {
    let mut records = Vec::new();
    for path in &args.runs {
        records.extend(load_records(path)?);
    }
    let report = aggregate(&records)?;
    let rendered = match args.format {
        ReportFormat::Text => report.render_text(),
        ReportFormat::Json => mock_author::report_json(&report),
    };
    if let Some(out) = &args.out {
        std::fs::write(out, &rendered)?;
    }
    print!("{rendered}");
    Ok(ExitCode::SUCCESS)
}

// --- datasets --------------------------------------------------------------

fn datasets_cmd(cmd: DatasetsCommand, config: &Config) -> Result<ExitCode, CliError> {
    match cmd {
        DatasetsCommand::List => {
            println!(
                "{:<12}  {:<12}  {:<14}  {:>6}  {:<10}  source",
                "dataset", "task", "format", "count", "adapter"
            );
            for m in &CATALOG {
                println!(
                    "{:<12}  {:<12}  {:<14}  {:>6}  {:<10}  {}",
                    m.dataset_id,
                    m.task_id,
                    m.format.as_str(),
                    m.expected_count,
                    m.adapter.id(),
                    m.default_source
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        DatasetsCommand::Import(args) => {
            let manifest = catalog_manifest(&args.dataset)?;
            let source = match args.source {
                Some(source) => source,
                None => {
                    let data_dir = args
                        .data_dir
                        .or_else(|| config.data_dir())
                        .ok_or_else(|| {
                            CliError::Usage(format!(
                                "no source file: pass --source, --data-dir, or set {}",
                                config::DATA_DIR_ENV
                            ))
                        })?;
                    data_dir.join(manifest.default_source)
                }
            };
            let out = args
                .out
                .unwrap_or_else(|| default_canonical_path(manifest.dataset_id));
            let questions = datasets::import(manifest, &source, &out)?;
            println!(
                "imported {} questions from {} to {}",
                questions.len(),
                source.display(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        DatasetsCommand::Validate(args) => {
            let manifest = catalog_manifest(&args.dataset)?;
            let file = args
                .file
                .unwrap_or_else(|| default_canonical_path(manifest.dataset_id));
            let questions = datasets::validate(manifest, &file)?;
            println!(
                "{}: {} questions, format {}, gold labels closed under parsing",
                manifest.dataset_id,
                questions.len(),
                manifest.format.as_str()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

// --- prompts ---------------------------------------------------------------

fn rounds_str(rounds: Rounds) -> &'static str {
    match rounds {
        Rounds::OneRound => "one_round",
        Rounds::TwoRound => "two_round",
    }
}

fn prompts_cmd(cmd: PromptsCommand, config: &Config) -> Result<ExitCode, CliError> {
    match cmd {
        PromptsCommand::List(args) => {
            let registry = load_registry(args.registry.as_deref(), config)?;
            println!(
                "{:<26}  {:<12}  {:<9}  {:<8}  provenance",
                "prompt_id", "task", "rounds", "feedback"
            );
            for pair in registry.pairs() {
                println!(
                    "{:<26}  {:<12}  {:<9}  {:<8}  {}",
                    pair.prompt_id,
                    pair.task_id,
                    rounds_str(pair.rounds),
                    if pair.role_feedback.is_some() {
                        "yes"
                    } else {
                        "no"
                    },
                    pair.provenance
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        PromptsCommand::Show(args) => {
            let registry = load_registry(args.registry.as_deref(), config)?;
            let pair = registry.pair(&args.prompt_id)?;
            println!("prompt: {}", pair.prompt_id);
            println!("task: {}", pair.task_id);
            println!("rounds: {}", rounds_str(pair.rounds));
            println!("provenance: {}", pair.provenance);
            println!();
            println!("role setting:");
            println!("{}", pair.role_setting);
            println!();
            println!("role feedback:");
            match &pair.role_feedback {
                Some(feedback) => println!("{feedback}"),
                None => println!("(none yet — run `sample-feedback --prompt {}`)", pair.prompt_id),
            }
            Ok(ExitCode::SUCCESS)
        }
        PromptsCommand::Init(args) => {
            if args.out.exists() && !args.force {
                return Err(CliError::Failed(format!(
                    "{} already exists; pass --force to overwrite",
                    args.out.display()
                )));
            }
            Registry::builtin().save(&args.out)?;
            println!("wrote built-in registry to {}", args.out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

// --- extract ---------------------------------------------------------------

fn extract_try(args: ExtractTryArgs) -> Result<ExitCode, CliError> {
    let format: AnswerFormat = args.format.into();
    println!("format: {}", format.as_str());
    match parse_answer(&args.text, format) {
        Some(answer) => println!("parsed: {}", answer.value),
        None => println!("parsed: (none)"),
    }
    Ok(ExitCode::SUCCESS)
}

// --- sample-feedback -------------------------------------------------------

async fn sample_feedback_cmd(
    args: SampleFeedbackArgs,
    config: &Config,
) -> Result<ExitCode, CliError> {
    if args.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".to_owned()));
    }
    let mut registry = load_registry(args.registry.as_deref(), config)?;
    let model = args.model.clone().unwrap_or_else(|| config.model());
    let backend = build_backend(args.mock.as_deref(), args.base_url.as_deref(), config)?;
    // Sampling is not cached: each invocation should draw fresh candidates.
    let client = CachedClient::new(ChatClient::new(backend, 1), None);
    let candidates = sample_feedback(
        &client,
        &registry,
        &args.prompt,
        &model,
        args.k,
        args.temperature,
    )
    .await?;

    println!(
        "sampled {} role-feedback candidates for {:?} at temperature {}:",
        candidates.len(),
        args.prompt,
        args.temperature
    );
    for (i, candidate) in candidates.iter().enumerate() {
        println!();
        println!("[{}] {}", i + 1, candidate);
    }
    println!();

    let selection = match args.select {
        Some(i) => Some(i),
        None => prompt_for_selection(candidates.len())?,
    };
    let Some(index) = selection else {
        println!("no selection made; registry unchanged");
        return Ok(ExitCode::FAILURE);
    };
    if index == 0 || index > candidates.len() {
        return Err(CliError::Usage(format!(
            "selection {} out of range 1..={}",
            index,
            candidates.len()
        )));
    }

    let out = args
        .out
        .clone()
        .or_else(|| args.registry.clone())
        .or_else(|| config.registry_path())
        .ok_or_else(|| {
            CliError::Usage(
                "nowhere to save the selection: pass --out <file> (or --registry)".to_owned(),
            )
        })?;
    let provenance = format!("sampled {}, selected by user", unix_date(unix_time()));
    registry.set_role_feedback(&args.prompt, candidates[index - 1].clone(), provenance)?;
    registry.save(&out)?;
    println!(
        "selected candidate {} as role feedback for {:?}; saved {}",
        index,
        args.prompt,
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// Read a 1-based selection from stdin; empty input or EOF aborts.
fn prompt_for_selection(k: usize) -> Result<Option<usize>, CliError> {
    print!("select a candidate [1-{k}] (empty to abort): ");
    std::io::stdout().flush().ok();
    let mut line = String::new();
    std::io::stdin().read_line(&mut line)?;
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return Ok(None);
    }
    trimmed
        .parse::<usize>()
        .map(Some)
        .map_err(|_| CliError::Usage(format!("selection {trimmed:?} is not a number")))
}

// --- cache -----------------------------------------------------------------

fn cache_cmd(cmd: CacheCommand, config: &Config) -> Result<ExitCode, CliError> {
    let dir_of = |arg: CacheDirArg| {
        arg.cache_dir
            .or_else(|| config.cache_dir())
            .unwrap_or_else(|| PathBuf::from(config::DEFAULT_CACHE_DIR))
    };
    match cmd {
        CacheCommand::Stats(arg) => {
            let dir = dir_of(arg);
            let stats = ResponseCache::new(&dir).stats()?;
            println!("cache: {}", dir.display());
            println!("entries: {}", stats.entries);
            println!("bytes: {}", stats.bytes);
            println!("quarantined: {}", stats.quarantined);
            Ok(ExitCode::SUCCESS)
        }
        CacheCommand::Clear(arg) => {
            let dir = dir_of(arg);
            let removed = ResponseCache::new(&dir).clear()?;
            println!("removed {removed} cached responses from {}", dir.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

// --- mock author -----------------------------------------------------------

async fn mock_author_cmd(args: MockAuthorArgs, config: &Config) -> Result<ExitCode, CliError> {
    let registry = load_registry(args.registry.as_deref(), config)?;
    let authored = mock_author::author(&args.plan, &registry).await?;
    mock_author::write_outputs(&authored, &args.out_dir)?;
    println!(
        "authored {} scripted responses and {} dataset file(s) in {}",
        authored.script.lines().count(),
        authored.questions.len(),
        args.out_dir.display()
    );
    print!("{}", authored.report.render_text());
    Ok(ExitCode::SUCCESS)
}

// --- small helpers ---------------------------------------------------------

/// Format a Unix timestamp as a UTC calendar date (`YYYY-MM-DD`).
fn unix_date(secs: u64) -> String {
    let (y, m, d) = civil_from_days((secs / 86_400) as i64);
    format!("{y:04}-{m:02}-{d:02}")
}

/// Days-since-epoch to (year, month, day) in the proleptic Gregorian
/// calendar.
fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = (z - era * 146_097) as u64;
    let yoe = (doe - doe / 1_460 + doe / 36_524 - doe / 146_096) / 365;
    let year = yoe as i64 + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let day = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let month = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    (if month <= 2 { year + 1 } else { year }, month, day)
}

/// Used by tests that want the real `Question` loading behavior without a
/// subprocess.
pub fn load_questions_for_test(path: &Path) -> Result<Vec<Question>, String> {
    datasets::load_canonical(path).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn civil_dates_are_correct() {
        assert_eq!(unix_date(0), "1970-01-01");
        assert_eq!(unix_date(86_399), "1970-01-01");
        assert_eq!(unix_date(86_400), "1970-01-02");
        assert_eq!(unix_date(951_868_800), "2000-03-01");
        assert_eq!(unix_date(1_700_000_000), "2023-11-14");
    }

    #[test]
    fn filenames_are_sanitized() {
        assert_eq!(
            sanitize_for_filename("roleplay2:math_teacher+sc3"),
            "roleplay2-math_teacher-sc3"
        );
        assert_eq!(sanitize_for_filename("gsm8k"), "gsm8k");
    }

    #[test]
    fn sc_flags_combine_with_defaults() {
        assert_eq!(self_consistency_from_flags(None, None), None);
        assert_eq!(
            self_consistency_from_flags(Some(3), None),
            Some(SelfConsistency {
                n: 3,
                temperature: 0.7
            })
        );
        assert_eq!(
            self_consistency_from_flags(None, Some(0.5)),
            Some(SelfConsistency {
                n: 10,
                temperature: 0.5
            })
        );
    }

    #[test]
    fn cli_parses_the_documented_run_grammar() {
        let cli = Cli::try_parse_from([
            "roleplay-bench",
            "run",
            "--dataset",
            "letter",
            "--strategy",
            "roleplay2:letter_teacher",
            "--mock",
            "fixtures/letter.jsonl",
            "--sc-n",
            "3",
            "--limit",
            "25",
        ])
        .unwrap();
        match cli.command {
            Command::Run(args) => {
                assert_eq!(args.dataset, "letter");
                assert_eq!(args.strategy, "roleplay2:letter_teacher");
                assert_eq!(args.sc_n, Some(3));
                assert_eq!(args.limit, Some(25));
            }
            _ => panic!("expected run"),
        }
    }

    #[test]
    fn sc_n_below_two_is_a_usage_error() {
        let parsed = Cli::try_parse_from([
            "roleplay-bench",
            "run",
            "--dataset",
            "x",
            "--strategy",
            "zeroshot",
            "--sc-n",
            "1",
        ]);
        match parsed {
            Ok(_) => panic!("expected a usage error for --sc-n 1"),
            Err(err) => assert_eq!(err.exit_code(), 2),
        }
    }
}
