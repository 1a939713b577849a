//! Benchmark datasets: the catalog, source-format adapters, and the
//! canonical question file format.
//!
//! Twelve benchmarks are supported out of the box. Each has a manifest
//! describing its answer format, its published question count, and which
//! adapter reads its upstream file layout. `datasets import` converts a
//! source file into the canonical JSONL used everywhere else; loading is
//! deterministic, and every gold label must survive a parse round-trip
//! ("gold closure") so scoring can never be confused by label formatting.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use roleplay_core::{normalize_gold, AnswerFormat, GoldError, Question, QuestionError};

/// Static description of one supported benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetManifest {
    /// Id used on the command line, e.g. `gsm8k`.
    pub dataset_id: &'static str,
    /// Task family: `arithmetic`, `commonsense`, `letter`, `coin`, `date`,
    /// or `object` (drives the default role prompt suggestions).
    pub task_id: &'static str,
    pub format: AnswerFormat,
    /// Published question count; `datasets validate` checks against it.
    pub expected_count: usize,
    pub adapter: SourceAdapter,
    /// Conventional source path below the data directory.
    pub default_source: &'static str,
}

/// All supported benchmarks.
pub const CATALOG: [DatasetManifest; 12] = [
    DatasetManifest {
        dataset_id: "singleeq",
        task_id: "arithmetic",
        format: AnswerFormat::ArabicNumber,
        expected_count: 508,
        adapter: SourceAdapter::Mawps,
        default_source: "SingleEq/questions.json",
    },
    DatasetManifest {
        dataset_id: "addsub",
        task_id: "arithmetic",
        format: AnswerFormat::ArabicNumber,
        expected_count: 395,
        adapter: SourceAdapter::Mawps,
        default_source: "AddSub/AddSub.json",
    },
    DatasetManifest {
        dataset_id: "multiarith",
        task_id: "arithmetic",
        format: AnswerFormat::ArabicNumber,
        expected_count: 600,
        adapter: SourceAdapter::Mawps,
        default_source: "MultiArith/MultiArith.json",
    },
    DatasetManifest {
        dataset_id: "gsm8k",
        task_id: "arithmetic",
        format: AnswerFormat::ArabicNumber,
        expected_count: 1319,
        adapter: SourceAdapter::Gsm8k,
        default_source: "grade-school-math/test.jsonl",
    },
    DatasetManifest {
        dataset_id: "aqua",
        task_id: "arithmetic",
        format: AnswerFormat::OptionAE,
        expected_count: 254,
        adapter: SourceAdapter::Aqua,
        default_source: "AQuA/test.json",
    },
    DatasetManifest {
        dataset_id: "svamp",
        task_id: "arithmetic",
        format: AnswerFormat::ArabicNumber,
        expected_count: 1000,
        adapter: SourceAdapter::Svamp,
        default_source: "SVAMP/SVAMP.json",
    },
    DatasetManifest {
        dataset_id: "csqa",
        task_id: "commonsense",
        format: AnswerFormat::OptionAE,
        expected_count: 1221,
        adapter: SourceAdapter::Csqa,
        default_source: "CommonsenseQA/dev_rand_split.jsonl",
    },
    DatasetManifest {
        dataset_id: "strategyqa",
        task_id: "commonsense",
        format: AnswerFormat::YesNo,
        expected_count: 2290,
        adapter: SourceAdapter::BigBench,
        default_source: "StrategyQA/task.json",
    },
    DatasetManifest {
        dataset_id: "date",
        task_id: "date",
        format: AnswerFormat::OptionAF,
        expected_count: 369,
        adapter: SourceAdapter::BigBench,
        default_source: "Bigbench_Date/task.json",
    },
    DatasetManifest {
        dataset_id: "object",
        task_id: "object",
        format: AnswerFormat::OptionAC,
        expected_count: 750,
        adapter: SourceAdapter::BigBench,
        default_source: "Bigbench_object_tracking/task.json",
    },
    DatasetManifest {
        dataset_id: "letter",
        task_id: "letter",
        format: AnswerFormat::FreeString,
        expected_count: 500,
        adapter: SourceAdapter::KojimaSymbolic,
        default_source: "last_letters/last_letters.json",
    },
    DatasetManifest {
        dataset_id: "coin",
        task_id: "coin",
        format: AnswerFormat::YesNo,
        expected_count: 500,
        adapter: SourceAdapter::KojimaSymbolic,
        default_source: "coin_flip/coin_flip.json",
    },
];

/// Look a manifest up by dataset id.
pub fn manifest(dataset_id: &str) -> Option<&'static DatasetManifest> {
    CATALOG.iter().find(|m| m.dataset_id == dataset_id)
}

/// Which upstream file layout a source file uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceAdapter {
    /// JSON array of `{"sQuestion": …, "lSolutions": [n]}` (SingleEq,
    /// AddSub, MultiArith).
    Mawps,
    /// JSONL of `{"question": …, "answer": "… #### n"}`.
    Gsm8k,
    /// JSONL of `{"question": …, "options": ["A)…", …], "correct": "B"}`.
    Aqua,
    /// JSON array of `{"Body": …, "Question": …, "Answer": n}`.
    Svamp,
    /// JSONL of `{"answerKey": "A", "question": {"stem": …, "choices": …}}`.
    Csqa,
    /// BIG-bench `task.json`: `{"examples": [{"input": …, "target_scores":
    /// {…}}]}`. Yes/no tasks read the Yes/No scores; option tasks inline the
    /// score keys as lettered choices in declaration order.
    BigBench,
    /// `{"examples": [{"question": …, "answer": …}]}` (Last Letters, Coin
    /// Flip).
    KojimaSymbolic,
    /// This harness's own canonical JSONL.
    Canonical,
}

impl SourceAdapter {
    pub fn id(self) -> &'static str {
        match self {
            SourceAdapter::Mawps => "mawps",
            SourceAdapter::Gsm8k => "gsm8k",
            SourceAdapter::Aqua => "aqua",
            SourceAdapter::Svamp => "svamp",
            SourceAdapter::Csqa => "csqa",
            SourceAdapter::BigBench => "bigbench",
            SourceAdapter::KojimaSymbolic => "symbolic",
            SourceAdapter::Canonical => "canonical",
        }
    }
}

/// Why a dataset failed to load, import, or validate.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("failed to read dataset file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("dataset {context}: {message}")]
    Parse { context: String, message: String },
    #[error("dataset question {index}: {source}")]
    Gold { index: usize, source: GoldError },
    #[error("{source}")]
    Question {
        #[from]
        source: QuestionError,
    },
    #[error("dataset {dataset_id} has {found} questions, expected {expected}")]
    CountMismatch {
        dataset_id: String,
        expected: usize,
        found: usize,
    },
    #[error("dataset question {index} has {found} answer choices, but format {format} admits at most {max}")]
    TooManyOptions {
        index: usize,
        found: usize,
        format: AnswerFormat,
        max: usize,
    },
    #[error("canonical record {id}: gold {gold:?} is not in canonical form (did you mean {canonical:?}?)")]
    GoldNotCanonical {
        id: String,
        gold: String,
        canonical: String,
    },
    #[error("unknown dataset {dataset_id:?} (see `datasets list`)")]
    UnknownDataset { dataset_id: String },
}

fn question_id(dataset_id: &str, index: usize) -> String {
    format!("{dataset_id}-{index:04}")
}

/// Append `\nAnswer Choices: (A) … (B) …` to a question stem.
fn inline_options(stem: &str, options: &[String]) -> String {
    let mut text = String::with_capacity(stem.len() + 32);
    text.push_str(stem);
    text.push_str("\nAnswer Choices:");
    for (i, option) in options.iter().enumerate() {
        let letter = char::from(b'A' + i as u8);
        let _ = write!(text, " ({letter}) {option}");
    }
    text
}

fn build_question(
    dataset_id: &str,
    index: usize,
    text: String,
    gold_raw: &str,
    format: AnswerFormat,
) -> Result<Question, DatasetError> {
    let gold = normalize_gold(gold_raw, format)
        .map_err(|source| DatasetError::Gold { index, source })?;
    let question = Question {
        id: question_id(dataset_id, index),
        dataset_id: dataset_id.to_owned(),
        text,
        gold,
    };
    question.validate(format)?;
    Ok(question)
}

// --- canonical format ------------------------------------------------------

/// One line of a canonical dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CanonicalRecord {
    id: String,
    dataset_id: String,
    text: String,
    gold: String,
    format: AnswerFormat,
}

/// Serialize questions to canonical JSONL.
pub fn to_canonical_jsonl(questions: &[Question]) -> String {
    let mut out = String::new();
    for q in questions {
        let record = CanonicalRecord {
            id: q.id.clone(),
            dataset_id: q.dataset_id.clone(),
            text: q.text.clone(),
            gold: q.gold.value.clone(),
            format: q.gold.format,
        };
        out.push_str(&serde_json::to_string(&record).expect("canonical records serialize"));
        out.push('\n');
    }
    out
}

fn parse_canonical(content: &str) -> Result<Vec<Question>, DatasetError> {
    let mut questions = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let record: CanonicalRecord =
            serde_json::from_str(raw).map_err(|e| DatasetError::Parse {
                context: format!("line {}", idx + 1),
                message: e.to_string(),
            })?;
        let gold = normalize_gold(&record.gold, record.format)
            .map_err(|source| DatasetError::Gold { index: idx, source })?;
        // A canonical file must store gold labels in canonical form; a label
        // that normalizes to something else would silently change scoring.
        if gold.value != record.gold {
            return Err(DatasetError::GoldNotCanonical {
                id: record.id,
                gold: record.gold,
                canonical: gold.value,
            });
        }
        let question = Question {
            id: record.id,
            dataset_id: record.dataset_id,
            text: record.text,
            gold,
        };
        question.validate(record.format)?;
        questions.push(question);
    }
    Ok(questions)
}

// --- source adapters -------------------------------------------------------

#[derive(Deserialize)]
struct MawpsItem {
    #[serde(rename = "sQuestion")]
    question: String,
    #[serde(rename = "lSolutions")]
    solutions: Vec<f64>,
}

fn parse_mawps(content: &str, dataset_id: &str) -> Result<Vec<Question>, DatasetError> {
    let items: Vec<MawpsItem> = serde_json::from_str(content).map_err(|e| DatasetError::Parse {
        context: dataset_id.to_owned(),
        message: e.to_string(),
    })?;
    items
        .into_iter()
        .enumerate()
        .map(|(index, item)| {
            let solution = item.solutions.first().ok_or_else(|| DatasetError::Parse {
                context: format!("{dataset_id} question {index}"),
                message: "no entries in lSolutions".to_owned(),
            })?;
            build_question(
                dataset_id,
                index,
                item.question.trim().to_owned(),
                &solution.to_string(),
                AnswerFormat::ArabicNumber,
            )
        })
        .collect()
}

#[derive(Deserialize)]
struct Gsm8kItem {
    question: String,
    answer: String,
}

fn parse_gsm8k(content: &str, dataset_id: &str) -> Result<Vec<Question>, DatasetError> {
    let mut questions = Vec::new();
    for (index, raw) in content.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let item: Gsm8kItem = serde_json::from_str(raw).map_err(|e| DatasetError::Parse {
            context: format!("line {}", index + 1),
            message: e.to_string(),
        })?;
        let gold = item
            .answer
            .rsplit("####")
            .next()
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| DatasetError::Parse {
                context: format!("line {}", index + 1),
                message: "answer has no final value after ####".to_owned(),
            })?;
        questions.push(build_question(
            dataset_id,
            index,
            item.question.trim().to_owned(),
            gold,
            AnswerFormat::ArabicNumber,
        )?);
    }
    Ok(questions)
}

#[derive(Deserialize)]
struct AquaItem {
    question: String,
    options: Vec<String>,
    correct: String,
}

/// Strip the `A)` prefix AQuA options carry, since lettering is re-applied
/// when options are inlined.
fn strip_option_prefix(option: &str) -> &str {
    let bytes = option.as_bytes();
    if bytes.len() >= 2 && bytes[0].is_ascii_uppercase() && bytes[1] == b')' {
        option[2..].trim()
    } else {
        option.trim()
    }
}

fn parse_aqua(content: &str, dataset_id: &str) -> Result<Vec<Question>, DatasetError> {
    let mut questions = Vec::new();
    for (index, raw) in content.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let item: AquaItem = serde_json::from_str(raw).map_err(|e| DatasetError::Parse {
            context: format!("line {}", index + 1),
            message: e.to_string(),
        })?;
        let options: Vec<String> = item
            .options
            .iter()
            .map(|o| strip_option_prefix(o).to_owned())
            .collect();
        questions.push(build_question(
            dataset_id,
            index,
            inline_options(item.question.trim(), &options),
            &item.correct,
            AnswerFormat::OptionAE,
        )?);
    }
    Ok(questions)
}

#[derive(Deserialize)]
struct SvampItem {
    #[serde(rename = "Body")]
    body: String,
    #[serde(rename = "Question")]
    question: String,
    #[serde(rename = "Answer")]
    answer: f64,
}

fn parse_svamp(content: &str, dataset_id: &str) -> Result<Vec<Question>, DatasetError> {
    let items: Vec<SvampItem> = serde_json::from_str(content).map_err(|e| DatasetError::Parse {
        context: dataset_id.to_owned(),
        message: e.to_string(),
    })?;
    items
        .into_iter()
        .enumerate()
        .map(|(index, item)| {
            let text = format!("{} {}", item.body.trim(), item.question.trim());
            build_question(
                dataset_id,
                index,
                text,
                &item.answer.to_string(),
                AnswerFormat::ArabicNumber,
            )
        })
        .collect()
}

#[derive(Deserialize)]
struct CsqaChoice {
    label: String,
    text: String,
}

#[derive(Deserialize)]
struct CsqaQuestion {
    stem: String,
    choices: Vec<CsqaChoice>,
}

#[derive(Deserialize)]
struct CsqaItem {
    #[serde(rename = "answerKey")]
    answer_key: String,
    question: CsqaQuestion,
}

fn parse_csqa(content: &str, dataset_id: &str) -> Result<Vec<Question>, DatasetError> {
    let mut questions = Vec::new();
    for (index, raw) in content.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let item: CsqaItem = serde_json::from_str(raw).map_err(|e| DatasetError::Parse {
            context: format!("line {}", index + 1),
            message: e.to_string(),
        })?;
        let options: Vec<String> = item
            .question
            .choices
            .iter()
            .map(|c| c.text.clone())
            .collect();
        // Labels are re-derived from position; verify the source agrees.
        for (i, choice) in item.question.choices.iter().enumerate() {
            let expected = char::from(b'A' + i as u8).to_string();
            if choice.label != expected {
                return Err(DatasetError::Parse {
                    context: format!("line {}", index + 1),
                    message: format!(
                        "choice {} is labelled {:?}, expected {:?}",
                        i, choice.label, expected
                    ),
                });
            }
        }
        questions.push(build_question(
            dataset_id,
            index,
            inline_options(item.question.stem.trim(), &options),
            &item.answer_key,
            AnswerFormat::OptionAE,
        )?);
    }
    Ok(questions)
}

#[derive(Deserialize)]
struct BigBenchExample {
    input: String,
    // `serde_json`'s preserve_order feature keeps these keys in file order,
    // which fixes the letter each option gets.
    target_scores: serde_json::Map<String, serde_json::Value>,
}

#[derive(Deserialize)]
struct BigBenchTask {
    examples: Vec<BigBenchExample>,
}

fn parse_bigbench(
    content: &str,
    dataset_id: &str,
    format: AnswerFormat,
) -> Result<Vec<Question>, DatasetError> {
    let task: BigBenchTask = serde_json::from_str(content).map_err(|e| DatasetError::Parse {
        context: dataset_id.to_owned(),
        message: e.to_string(),
    })?;
    let mut questions = Vec::new();
    for (index, example) in task.examples.into_iter().enumerate() {
        let scores: Vec<(String, f64)> = example
            .target_scores
            .into_iter()
            .map(|(k, v)| (k, v.as_f64().unwrap_or(0.0)))
            .collect();
        let best = scores
            .iter()
            .enumerate()
            .max_by(|(ai, (_, a)), (bi, (_, b))| {
                a.partial_cmp(b)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    // On ties prefer the earlier option, like a stable argmax.
                    .then(bi.cmp(ai))
            })
            .map(|(i, _)| i)
            .ok_or_else(|| DatasetError::Parse {
                context: format!("{dataset_id} question {index}"),
                message: "empty target_scores".to_owned(),
            })?;

        let question = if format == AnswerFormat::YesNo {
            build_question(
                dataset_id,
                index,
                example.input.trim().to_owned(),
                &scores[best].0,
                format,
            )?
        } else {
            let max = format.option_max().expect("option format") as u8 - b'A' + 1;
            if scores.len() > max as usize {
                return Err(DatasetError::TooManyOptions {
                    index,
                    found: scores.len(),
                    format,
                    max: max as usize,
                });
            }
            let options: Vec<String> = scores.iter().map(|(k, _)| k.clone()).collect();
            let letter = char::from(b'A' + best as u8).to_string();
            build_question(
                dataset_id,
                index,
                inline_options(example.input.trim(), &options),
                &letter,
                format,
            )?
        };
        questions.push(question);
    }
    Ok(questions)
}

#[derive(Deserialize)]
struct SymbolicExample {
    question: String,
    answer: String,
}

#[derive(Deserialize)]
struct SymbolicTask {
    examples: Vec<SymbolicExample>,
}

fn parse_symbolic(
    content: &str,
    dataset_id: &str,
    format: AnswerFormat,
) -> Result<Vec<Question>, DatasetError> {
    let task: SymbolicTask = serde_json::from_str(content).map_err(|e| DatasetError::Parse {
        context: dataset_id.to_owned(),
        message: e.to_string(),
    })?;
    task.examples
        .into_iter()
        .enumerate()
        .map(|(index, example)| {
            build_question(
                dataset_id,
                index,
                example.question.trim().to_owned(),
                &example.answer,
                format,
            )
        })
        .collect()
}

impl SourceAdapter {
    /// Parse source-file content into validated questions. Deterministic:
    /// the same content always yields the same question list.
    pub fn parse(
        self,
        content: &str,
        dataset_id: &str,
        format: AnswerFormat,
    ) -> Result<Vec<Question>, DatasetError> {
        match self {
            SourceAdapter::Mawps => parse_mawps(content, dataset_id),
            SourceAdapter::Gsm8k => parse_gsm8k(content, dataset_id),
            SourceAdapter::Aqua => parse_aqua(content, dataset_id),
            SourceAdapter::Svamp => parse_svamp(content, dataset_id),
            SourceAdapter::Csqa => parse_csqa(content, dataset_id),
            SourceAdapter::BigBench => parse_bigbench(content, dataset_id, format),
            SourceAdapter::KojimaSymbolic => parse_symbolic(content, dataset_id, format),
            SourceAdapter::Canonical => parse_canonical(content),
        }
    }
}

// --- file-level operations -------------------------------------------------

fn read_file(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Read a canonical question file.
pub fn load_canonical(path: &Path) -> Result<Vec<Question>, DatasetError> {
    parse_canonical(&read_file(path)?)
}

/// Convert a source file to canonical form, enforcing the expected count.
pub fn import(
    manifest: &DatasetManifest,
    source_path: &Path,
    out_path: &Path,
) -> Result<Vec<Question>, DatasetError> {
    let content = read_file(source_path)?;
    let questions = manifest
        .adapter
        .parse(&content, manifest.dataset_id, manifest.format)?;
    check_count(manifest, questions.len())?;
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| DatasetError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    fs::write(out_path, to_canonical_jsonl(&questions)).map_err(|source| DatasetError::Io {
        path: out_path.to_path_buf(),
        source,
    })?;
    Ok(questions)
}

/// Validate a canonical file against its manifest: parse, per-question
/// checks (including gold closure), and the expected count.
pub fn validate(manifest: &DatasetManifest, path: &Path) -> Result<Vec<Question>, DatasetError> {
    let questions = load_canonical(path)?;
    for question in &questions {
        question.validate(manifest.format)?;
    }
    check_count(manifest, questions.len())?;
    Ok(questions)
}

fn check_count(manifest: &DatasetManifest, found: usize) -> Result<(), DatasetError> {
    if found != manifest.expected_count {
        return Err(DatasetError::CountMismatch {
            dataset_id: manifest.dataset_id.to_owned(),
            expected: manifest.expected_count,
            found,
        });
    }
    Ok(())
}
