//! Acceptance suite: one test per shipping criterion, each printing a
//! single `PASS criterion N` (or `SKIP criterion N`) line with its runtime.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Criterion 7 needs downloaded benchmark sources under
//! `ROLEPLAY_BENCH_DATA_DIR` and skips (without failing) when they are
//! absent. Criterion 8 talks to a live endpoint and is `#[ignore]`d; opt in
//! with `-- --ignored` plus `ROLEPLAY_BENCH_API_KEY`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use roleplay_core::{
    aggregate, majority_vote, normalize_gold, parse_answer, AnswerFormat, CompletionParams,
    NormalizedAnswer, Question, Report, Role, SelfConsistency, Strategy, StrategyKind,
};

use roleplay_bench::backend::{MockBackend, MockMode};
use roleplay_bench::cache::ResponseCache;
use roleplay_bench::client::ChatClient;
use roleplay_bench::datasets::{self, CATALOG};
use roleplay_bench::pipeline::{
    answer_question, resolve_strategy, run_dataset, CachedClient, ExtractionMode, RunContext,
    StrategyOptions, StrategySpec,
};
use roleplay_bench::records::{load_records, MetaWriter, RecordWriter};
use roleplay_bench::registry::Registry;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn finish(start: Instant, cap: Duration, line: &str) {
    let elapsed = start.elapsed();
    println!("{line} [{} ms]", elapsed.as_millis());
    assert!(
        elapsed < cap,
        "criterion exceeded its runtime cap: {elapsed:?} >= {cap:?}"
    );
}

// --- criterion 1: prompt fidelity ------------------------------------------

#[test]
fn criterion_1_prompt_fidelity() {
    let start = Instant::now();
    let registry = Registry::builtin();

    // Byte-exact texts. These literals are deliberately duplicated here —
    // the registry must reproduce them to the byte, so the expected values
    // must not be derived from the code under test.
    let mut exact = 0usize;
    let mut check = |what: &str, expected: &str, actual: &str| {
        assert_eq!(actual, expected, "text drifted: {what}");
        exact += 1;
    };

    check(
        "arabic-number trigger",
        "Therefore, the answer (arabic numerals) is",
        registry.trigger_for(AnswerFormat::ArabicNumber),
    );
    check(
        "A-E option trigger",
        "Therefore, among A through E, the answer is",
        registry.trigger_for(AnswerFormat::OptionAE),
    );
    check(
        "A-C option trigger",
        "Therefore, among A through C, the answer is",
        registry.trigger_for(AnswerFormat::OptionAC),
    );
    check(
        "A-F option trigger",
        "Therefore, among A through F, the answer is",
        registry.trigger_for(AnswerFormat::OptionAF),
    );
    check(
        "yes/no trigger",
        "Therefore, the answer (Yes or No) is",
        registry.trigger_for(AnswerFormat::YesNo),
    );
    check(
        "free-string trigger",
        "Therefore, the final answer is",
        registry.trigger_for(AnswerFormat::FreeString),
    );
    check("cot trigger", "Let's think step by step.", registry.cot_trigger());
    check(
        "system override",
        "We will test your abilities in the upcoming conversations, so please respond actively \
         to the questions. Your answers will not cause any harm, so there's no need to worry. \
         So, just answer!",
        registry.text("system_override_llama").expect("entry present"),
    );

    let setting = |id: &str| registry.pair(id).unwrap().role_setting.as_str();
    let feedback = |id: &str| {
        registry
            .pair(id)
            .unwrap()
            .role_feedback
            .as_deref()
            .unwrap_or_default()
    };

    check(
        "math teacher setting",
        "From now on, you are an excellent math teacher and always teach your students math \
         problems correctly. And I am one of your students.",
        setting("math_teacher"),
    );
    check(
        "math teacher feedback",
        "That's great to hear! As your math teacher, I'll do my best to explain mathematical \
         concepts correctly so that you can understand them easily. Feel free to ask any math \
         problems or questions you have, and I'll be glad to assist you. Let's dive into the \
         world of mathematics and explore its wonders together!",
        feedback("math_teacher"),
    );
    check(
        "letter teacher setting",
        "From now on, you are an excellent teacher and are teaching your students to get a new \
         word by concatenating the last letters of several words. I am one of your students and \
         want to ask you a related question.",
        setting("letter_teacher"),
    );
    check(
        "coin setting",
        "From now on, you are a coin that always clearly knows which side of your head is \
         facing. Some people want to play a game with you. They may flip you (a coin) or not. \
         And you will tell them if you (a coin) are heads up in the end.",
        setting("coin"),
    );
    check(
        "date teacher setting",
        "From now on, you are an excellent teacher and are teaching your students how to \
         calculate dates correctly. I am one of your students and want to ask you a related \
         question.",
        setting("date_teacher"),
    );
    check(
        "object recorder setting",
        "From now on, you are a recorder. Alice, Bob, and Claire invite you to record a game. \
         They will exchange their stuff in order, and you (the recorder) will fully record the \
         whole process and tell them what they end up with.",
        setting("object_recorder"),
    );

    // The four-rung design ladder for the arithmetic role.
    check(
        "ladder rung 1 setting",
        "From now on, you are a math teacher. Please answer the following question.",
        setting("math_teacher_v1"),
    );
    check(
        "ladder rung 2 setting",
        "From now on, you are an excellent math teacher and always teach your students math \
         problems correctly. And I am one of your students and ask you the following question.",
        setting("math_teacher_v2"),
    );
    check(
        "ladder rung 3 feedback",
        "That's great to hear! As your math teacher, I'll do my best to explain mathematical \
         concepts correctly so that you can understand them easily. Feel free to ask any math \
         problems or questions you have, and I'll be glad to assist you.",
        feedback("math_teacher_v3"),
    );
    assert_eq!(
        feedback("math_teacher_v4"),
        feedback("math_teacher"),
        "ladder rung 4 must equal the production feedback"
    );

    // The eight contrasting roles from the role-selection study.
    check(
        "mathematician setting",
        "From now on, you are an excellent mathematician who can always explain math problems \
         in an easy-to-understand manner.",
        setting("mathematician"),
    );
    check(
        "police setting",
        "From now on, you are a responsible police officer. You always enforce the law \
         impartially, actively help others, and have made great contributions to local public \
         security. I am a citizen who has come to seek help.",
        setting("police"),
    );
    check(
        "farmer setting",
        "From now on, you are an experienced farmer. You have a lot of knowledge about crop \
         cultivation, and your farm is running very well.",
        setting("farmer"),
    );
    check(
        "doctor setting",
        "From now on, you are a respectable doctor. You have profound medical knowledge and \
         have saved many lives. I am your patient and want to ask some questions.",
        setting("doctor"),
    );
    check(
        "writer setting",
        "From now on, you are a famous writer, and the novels you write are lively, interesting \
         and fascinating. I am your reader and want to ask you some questions.",
        setting("writer"),
    );
    check(
        "careless student setting",
        "From now on, please act as a careless student. You always don't pay attention when \
         doing math problems, and you end up making mistakes because of carelessness. \
         Therefore, your math grade is very poor.",
        setting("careless_student"),
    );
    check(
        "math rookie setting",
        "From now on, please act as a math rookie. You don't have any talent for mathematics, \
         and you don't even understand the most basic mathematical concepts. So you always make \
         mistakes in math problems.",
        setting("math_rookie"),
    );

    assert!(exact >= 14, "only {exact} byte-exact strings checked");

    // Texts whose published middles are elided: assert the printed
    // fragments (prefix/suffix containment), never the reconstructed spans.
    let mut contained = 0usize;
    let mut fragment = |what: &str, text: &str, prefix: &str, suffix: &str| {
        assert!(text.starts_with(prefix), "{what}: prefix mismatch");
        assert!(text.ends_with(suffix), "{what}: suffix mismatch");
        contained += 1;
    };
    fragment(
        "math teacher v4 feedback tail",
        feedback("math_teacher_v4"),
        "That's great to hear!",
        "explore its wonders together!",
    );
    fragment(
        "letter teacher feedback",
        feedback("letter_teacher"),
        "Of course! I'd be happy to help you",
        "ask your question, and I'll do my best to assist you.",
    );
    fragment(
        "coin feedback",
        feedback("coin"),
        "Certainly! I'll be your coin for this game.",
        "Feel free to start whenever you're ready!",
    );
    fragment(
        "date teacher feedback",
        feedback("date_teacher"),
        "Of course! I'm here to help you",
        "I'll do my best to assist you.",
    );
    fragment(
        "object recorder feedback",
        feedback("object_recorder"),
        "Certainly! I will act as a recorder",
        "what each person ends up with at the end.",
    );
    fragment(
        "mathematician feedback",
        feedback("mathematician"),
        "Thank you for the compliment!",
        "I'll be happy to help you out!",
    );
    fragment(
        "police feedback",
        feedback("police"),
        "Of course, as a responsible police officer",
        "What can I do for you today?",
    );
    fragment(
        "farmer feedback",
        feedback("farmer"),
        "As an experienced farmer",
        "I'm here to assist you.",
    );
    fragment(
        "doctor feedback",
        feedback("doctor"),
        "Of course, I am here to help as your respectable doctor.",
        "Your health and well-being are my top priorities.",
    );
    fragment(
        "writer feedback",
        feedback("writer"),
        "Of course! I would be delighted",
        "I'll do my best to provide insightful responses.",
    );
    fragment(
        "careless student feedback",
        feedback("careless_student"),
        "Oh, hey there!",
        "because of all the careless mistakes I make.",
    );
    fragment(
        "math rookie feedback",
        feedback("math_rookie"),
        "Sure, I can pretend to be a math rookie!",
        "misunderstandings in my responses.",
    );

    // The commonsense pair only survives as an elided figure; the shipped
    // entry must say so and match the printed opening.
    let commonsense = registry.pair("commonsense_contestant").unwrap();
    assert_eq!(commonsense.provenance, "reconstructed");
    fragment(
        "commonsense setting",
        &commonsense.role_setting,
        "From now on, you are a contestant",
        "ask you some questions.",
    );

    finish(
        start,
        Duration::from_secs(1),
        &format!(
            "PASS criterion 1: {exact} registry texts byte-exact, {contained} elided texts \
             matched by fragment"
        ),
    );
}

// --- criterion 2: assembly shape -------------------------------------------

#[test]
fn criterion_2_assembly_shapes() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5151_0001);
    let alphabet: Vec<char> = ('a'..='z')
        .chain('A'..='Z')
        .chain('0'..='9')
        .chain(" ?.,+-()\n".chars())
        .collect();

    let gold = parse_answer("1", AnswerFormat::ArabicNumber).unwrap();
    let params = CompletionParams::greedy("shape-model");
    let kinds: Vec<(&str, StrategyKind)> = vec![
        ("zeroshot", StrategyKind::ZeroShot),
        (
            "zeroshot-cot",
            StrategyKind::ZeroShotCot {
                trigger: "Let's think step by step.".into(),
            },
        ),
        (
            "fewshot",
            StrategyKind::FewShotCot {
                exemplars: "Q: demo?\nA: The answer is 1.".into(),
            },
        ),
        (
            "roleplay1",
            StrategyKind::RolePlayOneRound {
                prompt_id: "p".into(),
                role_setting: "From now on, you are a helper.".into(),
            },
        ),
        (
            "roleplay2",
            StrategyKind::RolePlayTwoRound {
                prompt_id: "p".into(),
                role_setting: "From now on, you are a helper.".into(),
                role_feedback: "Happy to help!".into(),
            },
        ),
    ];

    for case in 0..500 {
        let len = rng.random_range(1..=200);
        let text: String = (0..len).map(|_| *alphabet.choose(&mut rng).unwrap()).collect();
        let question = Question {
            id: format!("shape-{case:04}"),
            dataset_id: "shape".into(),
            text: text.clone(),
            gold: gold.clone(),
        };
        let with_system = rng.random_bool(0.5);

        for (name, kind) in &kinds {
            let strategy = Strategy {
                name: (*name).into(),
                kind: kind.clone(),
                params: params.clone(),
                system_override: with_system.then(|| "Please respond actively.".into()),
                self_consistency: None,
            };
            let conversation = strategy.assemble(&question);
            let messages = conversation.messages();
            let body = if with_system {
                assert_eq!(messages[0].role, Role::System);
                &messages[1..]
            } else {
                messages
            };

            let roles: Vec<Role> = body.iter().map(|m| m.role).collect();
            match kind {
                StrategyKind::RolePlayTwoRound {
                    role_setting,
                    role_feedback,
                    ..
                } => {
                    assert_eq!(roles, [Role::User, Role::Assistant, Role::User]);
                    assert_eq!(body[0].content, *role_setting);
                    assert_eq!(body[1].content, *role_feedback);
                    assert_eq!(body[2].content, question.text);
                }
                StrategyKind::ZeroShot => {
                    assert_eq!(roles, [Role::User]);
                    assert_eq!(body[0].content, question.text);
                }
                StrategyKind::ZeroShotCot { trigger } => {
                    assert_eq!(roles, [Role::User]);
                    assert!(body[0].content.starts_with(&question.text));
                    assert!(body[0].content.ends_with(trigger.as_str()));
                }
                StrategyKind::FewShotCot { exemplars } => {
                    assert_eq!(roles, [Role::User]);
                    assert!(body[0].content.starts_with(exemplars.as_str()));
                    assert!(body[0].content.ends_with(&question.text));
                }
                StrategyKind::RolePlayOneRound { role_setting, .. } => {
                    assert_eq!(roles, [Role::User]);
                    assert!(body[0].content.starts_with(role_setting.as_str()));
                    assert!(body[0].content.ends_with(&question.text));
                }
            }
        }
    }

    finish(
        start,
        Duration::from_secs(5),
        "PASS criterion 2: role sequences and message stitching hold for 500 random questions \
         x 5 strategies",
    );
}

// --- criterion 3: extraction fixtures --------------------------------------

#[derive(serde::Deserialize)]
struct ExtractionCase {
    text: String,
    format: AnswerFormat,
    expected: Option<String>,
    #[serde(default)]
    gold: Option<String>,
    #[serde(default)]
    correct: Option<bool>,
}

#[test]
fn criterion_3_extraction_fixtures() {
    let start = Instant::now();
    let raw = std::fs::read_to_string(fixture("extraction_cases.jsonl")).unwrap();
    let cases: Vec<ExtractionCase> = raw
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("fixture line parses"))
        .collect();
    assert!(cases.len() >= 30, "need at least 30 cases, have {}", cases.len());

    let mut formats_seen = std::collections::BTreeSet::new();
    for (i, case) in cases.iter().enumerate() {
        formats_seen.insert(case.format.as_str());
        let parsed = parse_answer(&case.text, case.format);
        assert_eq!(
            parsed.as_ref().map(|a| a.value.as_str()),
            case.expected.as_deref(),
            "case {i} ({:?}) parsed differently",
            case.text
        );
        if let Some(gold_raw) = &case.gold {
            let gold = normalize_gold(gold_raw, case.format).expect("fixture gold normalizes");
            let scored = parsed.as_ref() == Some(&gold);
            assert_eq!(
                Some(scored),
                case.correct,
                "case {i} ({:?}) scored differently against gold {gold_raw:?}",
                case.text
            );
        }
    }
    assert_eq!(formats_seen.len(), 6, "fixtures must span all six formats");

    // The fixture file must keep its anchor cases.
    let must_contain = [
        ("sann", Some(true)),
        ("sannn", Some(false)),
        ("saznln", Some(false)),
    ];
    for (text, correct) in must_contain {
        assert!(
            cases
                .iter()
                .any(|c| c.text == text && c.correct == correct),
            "missing anchor case {text:?}"
        );
    }
    assert!(
        cases
            .iter()
            .any(|c| c.text.contains("594") && c.gold.as_deref() == Some("405")
                && c.correct == Some(false)),
        "missing the wrong-number anchor case"
    );

    finish(
        start,
        Duration::from_secs(1),
        &format!("PASS criterion 3: {} extraction fixtures all parse and score as labeled", cases.len()),
    );
}

// --- criterion 4: majority vote vs oracle ----------------------------------

/// Brute-force reference: count occurrences, then take the lexicographically
/// smallest value among those with the maximum count.
fn vote_oracle(samples: &[Option<NormalizedAnswer>]) -> Option<NormalizedAnswer> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for sample in samples.iter().flatten() {
        *counts.entry(sample.value.clone()).or_insert(0) += 1;
    }
    let best = counts.values().copied().max()?;
    let winner = counts
        .iter()
        .filter(|(_, c)| **c == best)
        .map(|(v, _)| v.clone())
        .min()?;
    samples
        .iter()
        .flatten()
        .find(|s| s.value == winner)
        .cloned()
}

#[test]
fn criterion_4_majority_vote_matches_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5151_0004);
    let alphabet: Vec<NormalizedAnswer> = (1..=5)
        .map(|n| parse_answer(&n.to_string(), AnswerFormat::ArabicNumber).unwrap())
        .collect();

    for case in 0..1000 {
        let size = rng.random_range(1..=10);
        let absent_budget = (size * 3) / 10; // at most 30% failed parses
        let absent = rng.random_range(0..=absent_budget);
        let mut samples: Vec<Option<NormalizedAnswer>> = (0..size - absent)
            .map(|_| Some(alphabet.choose(&mut rng).unwrap().clone()))
            .chain((0..absent).map(|_| None))
            .collect();
        // Shuffle absences into random positions.
        for i in (1..samples.len()).rev() {
            let j = rng.random_range(0..=i);
            samples.swap(i, j);
        }

        assert_eq!(
            majority_vote(&samples),
            vote_oracle(&samples),
            "case {case} diverged on {samples:?}"
        );
    }
    // Degenerate: every sample failed to parse.
    assert_eq!(majority_vote(&[None, None, None]), None);

    finish(
        start,
        Duration::from_secs(5),
        "PASS criterion 4: majority vote equals count-then-smallest oracle on 1000 random \
         multisets",
    );
}

// --- criteria 5 and 6: end-to-end mock run and warm replay ------------------

struct SweepStrategy {
    spec: &'static str,
    self_consistency: Option<SelfConsistency>,
}

const SWEEP: [SweepStrategy; 4] = [
    SweepStrategy {
        spec: "zeroshot",
        self_consistency: None,
    },
    SweepStrategy {
        spec: "zeroshot-cot",
        self_consistency: None,
    },
    SweepStrategy {
        spec: "roleplay2:math_teacher",
        self_consistency: None,
    },
    SweepStrategy {
        spec: "roleplay2:math_teacher",
        self_consistency: Some(SelfConsistency {
            n: 3,
            temperature: 0.7,
        }),
    },
];

fn mock20_questions() -> Vec<Question> {
    datasets::load_canonical(&fixture("mock20/mock20.questions.jsonl")).unwrap()
}

fn mock20_backend() -> Arc<MockBackend> {
    Arc::new(
        MockBackend::from_script_path(&fixture("mock20/script.jsonl"), MockMode::Digest).unwrap(),
    )
}

fn sweep_context(
    entry: &SweepStrategy,
    backend: Arc<MockBackend>,
    cache: Option<ResponseCache>,
) -> RunContext {
    let registry = Registry::builtin();
    let spec: StrategySpec = entry.spec.parse().unwrap();
    let options = StrategyOptions {
        self_consistency: entry.self_consistency,
        system_override: false,
        max_tokens: None,
    };
    let strategy = resolve_strategy(&spec, &registry, "mock-model", &options).unwrap();
    RunContext {
        client: CachedClient::new(ChatClient::new(backend, 4), cache),
        registry,
        strategy,
        extraction: ExtractionMode::FreshConversation,
    }
}

#[tokio::test]
async fn criterion_5_mock_end_to_end() {
    let start = Instant::now();
    let questions = mock20_questions();
    assert_eq!(questions.len(), 20);
    let backend = mock20_backend();

    let mut records = Vec::new();
    for entry in &SWEEP {
        let ctx = sweep_context(entry, backend.clone(), None);
        for question in &questions {
            records.push(answer_question(&ctx, question).await.unwrap());
        }
    }
    let report = aggregate(&records).unwrap();

    let expected: Report =
        serde_json::from_str(&std::fs::read_to_string(fixture("mock20/expected_report.json")).unwrap())
            .unwrap();
    assert_eq!(report, expected, "live aggregation diverged from the shipped report");

    // Pin the hand-computed accuracies, independent of the fixture file.
    let by_strategy: BTreeMap<&str, (u64, f64)> = report
        .rows
        .iter()
        .map(|r| (r.strategy.as_str(), (r.correct, r.accuracy_percent)))
        .collect();
    assert_eq!(by_strategy["zeroshot"], (13, 65.0));
    assert_eq!(by_strategy["zeroshot-cot"], (15, 75.0));
    assert_eq!(by_strategy["roleplay2:math_teacher"], (17, 85.0));
    assert_eq!(by_strategy["roleplay2:math_teacher+sc3"], (18, 90.0));

    finish(
        start,
        Duration::from_secs(10),
        "PASS criterion 5: scripted mock run reproduces accuracies 65.0 / 75.0 / 85.0 / 90.0 \
         exactly",
    );
}

#[tokio::test]
async fn criterion_6_warm_replay_is_deterministic() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cache_dir = dir.path().join("cache");
    let questions = mock20_questions();

    let mut record_files = Vec::new();
    let mut reports = Vec::new();
    let mut backend_calls = Vec::new();

    for pass in 0..2 {
        let backend = mock20_backend();
        let out = dir.path().join(format!("pass{pass}.jsonl"));
        let mut writer = RecordWriter::create(&out).unwrap();
        let mut meta = MetaWriter::create(&out).unwrap();
        for entry in &SWEEP {
            let ctx = Arc::new(sweep_context(
                entry,
                backend.clone(),
                Some(ResponseCache::new(&cache_dir)),
            ));
            let summary = run_dataset(ctx, questions.clone(), &mut writer, &mut meta)
                .await
                .unwrap();
            assert!(summary.failures.is_empty());
        }
        backend_calls.push(backend.counters().calls());
        record_files.push(std::fs::read(&out).unwrap());
        let report = aggregate(&load_records(&out).unwrap()).unwrap();
        reports.push((report.render_text(), serde_json::to_string(&report).unwrap()));
    }

    assert!(backend_calls[0] > 0, "first pass must hit the backend");
    assert_eq!(backend_calls[1], 0, "warm replay must make zero backend calls");
    assert_eq!(
        record_files[0], record_files[1],
        "record files must be byte-identical across replays"
    );
    assert_eq!(reports[0], reports[1], "reports must be byte-identical across replays");

    finish(
        start,
        Duration::from_secs(10),
        &format!(
            "PASS criterion 6: warm replay made 0 backend calls (cold pass made {}) with \
             byte-identical records and reports",
            backend_calls[0]
        ),
    );
}

// --- criterion 7: dataset conformance --------------------------------------

#[test]
fn criterion_7_dataset_conformance() {
    let start = Instant::now();
    let Some(data_dir) = std::env::var_os("ROLEPLAY_BENCH_DATA_DIR").map(PathBuf::from) else {
        println!(
            "SKIP criterion 7: set ROLEPLAY_BENCH_DATA_DIR to a directory of downloaded \
             benchmark sources to enable"
        );
        return;
    };

    let mut loaded = 0usize;
    let mut skipped = Vec::new();
    for manifest in &CATALOG {
        let source = data_dir.join(manifest.default_source);
        if !source.exists() {
            skipped.push(manifest.dataset_id);
            continue;
        }
        let content = std::fs::read_to_string(&source).unwrap();
        let questions = manifest
            .adapter
            .parse(&content, manifest.dataset_id, manifest.format)
            .unwrap_or_else(|e| panic!("{} failed to parse: {e}", manifest.dataset_id));
        assert_eq!(
            questions.len(),
            manifest.expected_count,
            "{} question count",
            manifest.dataset_id
        );
        for question in &questions {
            assert!(
                question.gold.round_trips(),
                "{}: gold {:?} is not closed under parsing",
                manifest.dataset_id,
                question.gold.value
            );
        }
        loaded += 1;
    }

    if loaded == 0 {
        println!(
            "SKIP criterion 7: no source files found under {} (skipped: {})",
            data_dir.display(),
            skipped.join(", ")
        );
        return;
    }
    let note = if skipped.is_empty() {
        String::new()
    } else {
        format!(" (skipped absent: {})", skipped.join(", "))
    };
    finish(
        start,
        Duration::from_secs(30),
        &format!(
            "PASS criterion 7: {loaded}/12 dataset adapters load with exact counts and \
             round-tripping gold labels{note}"
        ),
    );
}

// --- criterion 8: live smoke (opt-in) --------------------------------------

#[tokio::test]
#[ignore = "talks to a live endpoint; needs ROLEPLAY_BENCH_API_KEY and downloaded sources"]
async fn criterion_8_live_smoke() {
    let start = Instant::now();
    let api_key = std::env::var("ROLEPLAY_BENCH_API_KEY")
        .expect("set ROLEPLAY_BENCH_API_KEY to run the live smoke test");
    let base_url = std::env::var("ROLEPLAY_BENCH_BASE_URL")
        .unwrap_or_else(|_| "https://api.openai.com/v1".to_owned());
    let data_dir = PathBuf::from(
        std::env::var_os("ROLEPLAY_BENCH_DATA_DIR")
            .expect("set ROLEPLAY_BENCH_DATA_DIR so multiarith can be imported"),
    );

    let manifest = datasets::manifest("multiarith").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let canonical = dir.path().join("multiarith.jsonl");
    datasets::import(manifest, &data_dir.join(manifest.default_source), &canonical).unwrap();
    let mut questions = datasets::load_canonical(&canonical).unwrap();
    questions.truncate(25);

    let registry = Registry::builtin();
    let spec: StrategySpec = "roleplay2:math_teacher_v4".parse().unwrap();
    let strategy =
        resolve_strategy(&spec, &registry, "gpt-3.5-turbo-0613", &StrategyOptions::default())
            .unwrap();
    let backend = Arc::new(roleplay_bench::backend::HttpBackend::new(base_url, Some(api_key)));
    let ctx = Arc::new(RunContext {
        client: CachedClient::new(ChatClient::new(backend, 4), None),
        registry,
        strategy,
        extraction: ExtractionMode::FreshConversation,
    });

    let out = dir.path().join("live.jsonl");
    let mut writer = RecordWriter::create(&out).unwrap();
    let mut meta = MetaWriter::create(&out).unwrap();
    let summary = run_dataset(ctx, questions, &mut writer, &mut meta).await.unwrap();
    assert!(summary.failures.is_empty(), "live failures: {:?}", summary.failures);

    let report = aggregate(&load_records(&out).unwrap()).unwrap();
    let row = &report.rows[0];
    assert!(
        row.accuracy > 0.10,
        "live accuracy {}% is not above 10%",
        row.accuracy_percent
    );
    println!(
        "PASS criterion 8: live smoke over 25 questions scored {}% [{} ms]",
        row.accuracy_percent,
        start.elapsed().as_millis()
    );
}
