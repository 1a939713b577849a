//! Scoring, run records, and accuracy reports.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::answer::{ExtractionOutcome, NormalizedAnswer};

/// Exact-match scoring on canonical values.
///
/// A missing answer (parse failure) scores as incorrect. Comparing answers of
/// different formats is a harness bug, not a model error, so it panics.
pub fn score(parsed: Option<&NormalizedAnswer>, gold: &NormalizedAnswer) -> bool {
    match parsed {
        None => false,
        Some(answer) => {
            assert_eq!(
                answer.format, gold.format,
                "scored answer format must match gold format"
            );
            answer.value == gold.value
        }
    }
}

/// Everything recorded for one (question, strategy) evaluation.
///
/// Records append to a JSONL file as they complete and are all a report
/// needs; the raw texts and request digests make a run auditable and
/// replayable without re-contacting any backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub question_id: String,
    pub dataset_id: String,
    /// Strategy label, e.g. `roleplay2:math_teacher_v4`.
    pub strategy: String,
    /// [`crate::Strategy::fingerprint`] of the resolved strategy.
    pub strategy_fingerprint: String,
    /// Digests of every completion request issued, in issue order
    /// (reasoning request first, then extraction requests).
    pub digests: Vec<String>,
    /// Per-sample outcomes; exactly one unless self-consistency sampled more.
    pub samples: Vec<ExtractionOutcome>,
    /// Final answer — the single sample's, or the majority vote. Absent iff
    /// every sample failed to parse.
    pub parsed: Option<NormalizedAnswer>,
    pub gold: NormalizedAnswer,
    pub correct: bool,
}

/// Alias kept for readability where per-sample data is discussed.
pub type SampleRecord = ExtractionOutcome;

impl RunRecord {
    /// Whether this record represents a parse failure (no admissible answer).
    pub fn parse_failed(&self) -> bool {
        self.parsed.is_none()
    }
}

/// One (dataset, strategy) line of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dataset_id: String,
    pub strategy: String,
    pub total: u64,
    pub correct: u64,
    /// Questions where no admissible answer could be parsed (still counted
    /// in `total`, and never counted correct).
    pub parse_failed: u64,
    /// Exact accuracy `correct / total` in `[0, 1]`.
    pub accuracy: f64,
    /// Accuracy as a percentage rounded to one decimal place (the display
    /// convention used by the text table).
    pub accuracy_percent: f64,
}

impl ReportRow {
    /// Accuracy in tenths of a percent, rounded half-up. Integer arithmetic,
    /// so two runs can be compared without float noise.
    pub fn accuracy_tenths(&self) -> u64 {
        if self.total == 0 {
            return 0;
        }
        (self.correct * 1000 + self.total / 2) / self.total
    }

    /// Accuracy as text with one decimal place, e.g. `85.0`.
    pub fn accuracy_text(&self) -> String {
        let tenths = self.accuracy_tenths();
        let mut out = String::new();
        let _ = write!(out, "{}.{}", tenths / 10, tenths % 10);
        out
    }
}

/// A full accuracy report: one row per (dataset, strategy), sorted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

/// Why aggregation refused a set of records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AggregateError {
    /// The same question appears twice under one (dataset, strategy).
    DuplicateQuestion {
        dataset_id: String,
        strategy: String,
        question_id: String,
    },
    /// A stored `correct` flag disagrees with rescoring `parsed` vs `gold`,
    /// which means the record file was edited or corrupted.
    ScoreMismatch { question_id: String },
    /// One (dataset, strategy) row mixes records from different strategy
    /// fingerprints — comparing them as one row would be meaningless.
    MixedFingerprints { dataset_id: String, strategy: String },
}

impl fmt::Display for AggregateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggregateError::DuplicateQuestion {
                dataset_id,
                strategy,
                question_id,
            } => write!(
                f,
                "duplicate record for question {question_id} under {dataset_id}/{strategy}"
            ),
            AggregateError::ScoreMismatch { question_id } => write!(
                f,
                "record for question {question_id}: stored correctness disagrees with rescoring"
            ),
            AggregateError::MixedFingerprints {
                dataset_id,
                strategy,
            } => write!(
                f,
                "records under {dataset_id}/{strategy} mix different strategy fingerprints"
            ),
        }
    }
}

impl core::error::Error for AggregateError {}

/// Fold run records into a report.
///
/// Records group by (dataset, strategy); rows come out sorted by that key so
/// the report is byte-identical no matter what order records completed in.
pub fn aggregate(records: &[RunRecord]) -> Result<Report, AggregateError> {
    use alloc::collections::{BTreeMap, BTreeSet};

    let mut groups: BTreeMap<(&str, &str), (u64, u64, u64)> = BTreeMap::new();
    let mut seen: BTreeSet<(&str, &str, &str)> = BTreeSet::new();
    let mut fingerprints: BTreeMap<(&str, &str), &str> = BTreeMap::new();

    for record in records {
        let key = (
            record.dataset_id.as_str(),
            record.strategy.as_str(),
            record.question_id.as_str(),
        );
        if !seen.insert(key) {
            return Err(AggregateError::DuplicateQuestion {
                dataset_id: record.dataset_id.clone(),
                strategy: record.strategy.clone(),
                question_id: record.question_id.clone(),
            });
        }
        if score(record.parsed.as_ref(), &record.gold) != record.correct {
            return Err(AggregateError::ScoreMismatch {
                question_id: record.question_id.clone(),
            });
        }
        let row_key = (record.dataset_id.as_str(), record.strategy.as_str());
        let fingerprint = fingerprints
            .entry(row_key)
            .or_insert(record.strategy_fingerprint.as_str());
        if *fingerprint != record.strategy_fingerprint {
            return Err(AggregateError::MixedFingerprints {
                dataset_id: record.dataset_id.clone(),
                strategy: record.strategy.clone(),
            });
        }
        let entry = groups.entry(row_key).or_insert((0, 0, 0));
        entry.0 += 1;
        if record.correct {
            entry.1 += 1;
        }
        if record.parse_failed() {
            entry.2 += 1;
        }
    }

    let rows = groups
        .into_iter()
        .map(|((dataset_id, strategy), (total, correct, parse_failed))| {
            let mut row = ReportRow {
                dataset_id: dataset_id.into(),
                strategy: strategy.into(),
                total,
                correct,
                parse_failed,
                accuracy: 0.0,
                accuracy_percent: 0.0,
            };
            if total > 0 {
                row.accuracy = correct as f64 / total as f64;
            }
            row.accuracy_percent = row.accuracy_tenths() as f64 / 10.0;
            row
        })
        .collect();
    Ok(Report { rows })
}

impl Report {
    /// Fixed-width text table, deterministic for a given set of rows.
    pub fn render_text(&self) -> String {
        let dataset_width = self
            .rows
            .iter()
            .map(|r| r.dataset_id.len())
            .chain(core::iter::once("dataset".len()))
            .max()
            .unwrap_or(0);
        let strategy_width = self
            .rows
            .iter()
            .map(|r| r.strategy.len())
            .chain(core::iter::once("strategy".len()))
            .max()
            .unwrap_or(0);

        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<dw$}  {:<sw$}  {:>6}  {:>7}  {:>6}  {:>8}",
            "dataset",
            "strategy",
            "total",
            "correct",
            "failed",
            "accuracy",
            dw = dataset_width,
            sw = strategy_width,
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<dw$}  {:<sw$}  {:>6}  {:>7}  {:>6}  {:>7}%",
                row.dataset_id,
                row.strategy,
                row.total,
                row.correct,
                row.parse_failed,
                row.accuracy_text(),
                dw = dataset_width,
                sw = strategy_width,
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::answer::{normalize_gold, AnswerFormat, ParsePath};
    use alloc::borrow::ToOwned;
    use alloc::vec;

    fn gold(value: &str) -> NormalizedAnswer {
        normalize_gold(value, AnswerFormat::ArabicNumber).unwrap()
    }

    fn record(id: &str, dataset: &str, strategy: &str, parsed: Option<&str>, gold_v: &str) -> RunRecord {
        let parsed = parsed.map(gold);
        let gold = gold(gold_v);
        let correct = score(parsed.as_ref(), &gold);
        RunRecord {
            question_id: id.to_owned(),
            dataset_id: dataset.to_owned(),
            strategy: strategy.to_owned(),
            strategy_fingerprint: "f".repeat(64),
            digests: vec!["d".repeat(64)],
            samples: vec![ExtractionOutcome {
                raw_answer: "raw".into(),
                extraction_text: "ext".into(),
                parsed: parsed.clone(),
                parse_path: if parsed.is_some() {
                    ParsePath::FromExtraction
                } else {
                    ParsePath::Failed
                },
            }],
            parsed,
            gold,
            correct,
        }
    }

    #[test]
    fn score_is_exact_string_match() {
        assert!(score(Some(&gold("405")), &gold("405")));
        assert!(!score(Some(&gold("594")), &gold("405")));
        assert!(!score(None, &gold("405")));
    }

    #[test]
    #[should_panic(expected = "format")]
    fn score_panics_on_format_mismatch() {
        let option = normalize_gold("A", AnswerFormat::OptionAE).unwrap();
        score(Some(&option), &gold("1"));
    }

    #[test]
    fn aggregate_groups_and_sorts_rows() {
        let records = vec![
            record("q2", "multiarith", "zeroshot", Some("4"), "4"),
            record("q1", "gsm8k", "zeroshot", Some("18"), "18"),
            record("q1", "multiarith", "zeroshot", Some("5"), "4"),
            record("q1", "gsm8k", "roleplay2:math_teacher", None, "18"),
        ];
        let report = aggregate(&records).unwrap();
        let keys: Vec<(&str, &str)> = report
            .rows
            .iter()
            .map(|r| (r.dataset_id.as_str(), r.strategy.as_str()))
            .collect();
        assert_eq!(
            keys,
            vec![
                ("gsm8k", "roleplay2:math_teacher"),
                ("gsm8k", "zeroshot"),
                ("multiarith", "zeroshot"),
            ]
        );
        let failed_row = &report.rows[0];
        assert_eq!(failed_row.total, 1);
        assert_eq!(failed_row.correct, 0);
        assert_eq!(failed_row.parse_failed, 1);
        let multi = &report.rows[2];
        assert_eq!(multi.total, 2);
        assert_eq!(multi.correct, 1);
        assert_eq!(multi.accuracy, 0.5, "exact ratio");
        assert_eq!(multi.accuracy_percent, 50.0);
        assert_eq!(multi.accuracy_text(), "50.0");
    }

    #[test]
    fn aggregate_rejects_mixed_fingerprints_in_one_row() {
        let mut other = record("q2", "gsm8k", "zeroshot", Some("18"), "18");
        other.strategy_fingerprint = "g".repeat(64);
        let records = vec![record("q1", "gsm8k", "zeroshot", Some("18"), "18"), other];
        let err = aggregate(&records).unwrap_err();
        assert!(matches!(err, AggregateError::MixedFingerprints { .. }));
    }

    #[test]
    fn aggregate_rejects_duplicate_question_ids() {
        let records = vec![
            record("q1", "gsm8k", "zeroshot", Some("18"), "18"),
            record("q1", "gsm8k", "zeroshot", Some("17"), "18"),
        ];
        let err = aggregate(&records).unwrap_err();
        assert!(matches!(err, AggregateError::DuplicateQuestion { question_id, .. } if question_id == "q1"));
    }

    #[test]
    fn same_question_under_different_strategies_is_fine() {
        let records = vec![
            record("q1", "gsm8k", "zeroshot", Some("18"), "18"),
            record("q1", "gsm8k", "zeroshot-cot", Some("18"), "18"),
        ];
        assert_eq!(aggregate(&records).unwrap().rows.len(), 2);
    }

    #[test]
    fn aggregate_detects_tampered_correctness() {
        let mut bad = record("q1", "gsm8k", "zeroshot", Some("17"), "18");
        bad.correct = true;
        let err = aggregate(&[bad]).unwrap_err();
        assert_eq!(
            err,
            AggregateError::ScoreMismatch {
                question_id: "q1".into()
            }
        );
    }

    #[test]
    fn accuracy_rounds_to_one_decimal_half_up() {
        let mut row = ReportRow {
            dataset_id: "d".into(),
            strategy: "s".into(),
            total: 3,
            correct: 1,
            parse_failed: 0,
            accuracy: 0.0,
            accuracy_percent: 0.0,
        };
        assert_eq!(row.accuracy_text(), "33.3");
        row.correct = 2;
        assert_eq!(row.accuracy_text(), "66.7");
        row.total = 20;
        row.correct = 17;
        assert_eq!(row.accuracy_text(), "85.0");
        row.total = 0;
        row.correct = 0;
        assert_eq!(row.accuracy_text(), "0.0");
        row.total = 254;
        row.correct = 162;
        assert_eq!(row.accuracy_text(), "63.8");
    }

    #[test]
    fn text_rendering_is_aligned_and_stable() {
        let records = vec![
            record("q1", "gsm8k", "zeroshot", Some("18"), "18"),
            record("q2", "gsm8k", "zeroshot", Some("4"), "5"),
        ];
        let report = aggregate(&records).unwrap();
        let text = report.render_text();
        assert_eq!(
            text,
            "dataset  strategy   total  correct  failed  accuracy\n\
             gsm8k    zeroshot       2        1       0     50.0%\n"
        );
        // Re-aggregating the same records renders identically.
        assert_eq!(text, aggregate(&records).unwrap().render_text());
    }
}
