//! Guards that the checked-in fixtures are exactly what the authoring tools
//! produce from their sources. If any of these fail, regenerate with:
//!
//! ```text
//! roleplay-bench mock author --plan crates/harness/fixtures/mock20/plans/*.json \
//!     --out-dir crates/harness/fixtures/mock20
//! roleplay-bench prompts init --out crates/harness/data/default_registry.jsonl --force
//! ```

use std::path::{Path, PathBuf};

use roleplay_bench::datasets;
use roleplay_bench::mock_author::{author, report_json, write_outputs};
use roleplay_bench::registry::Registry;

fn manifest_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

#[tokio::test]
async fn mock20_fixtures_are_a_fixed_point_of_their_plans() {
    let plans: Vec<PathBuf> = [
        "fixtures/mock20/plans/plan_zeroshot.json",
        "fixtures/mock20/plans/plan_zeroshot_cot.json",
        "fixtures/mock20/plans/plan_roleplay2.json",
        "fixtures/mock20/plans/plan_roleplay2_sc3.json",
    ]
    .iter()
    .map(|p| manifest_path(p))
    .collect();

    let authored = author(&plans, &Registry::builtin()).await.unwrap();

    let read = |rel: &str| std::fs::read_to_string(manifest_path(rel)).unwrap();
    assert_eq!(
        authored.script,
        read("fixtures/mock20/script.jsonl"),
        "script.jsonl drifted from its plans"
    );
    assert_eq!(
        datasets::to_canonical_jsonl(&authored.questions["mock20"]),
        read("fixtures/mock20/mock20.questions.jsonl"),
        "question file drifted from its plans"
    );
    assert_eq!(
        report_json(&authored.report),
        read("fixtures/mock20/expected_report.json"),
        "expected report drifted from its plans"
    );

    // write_outputs emits exactly the three files compared above.
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&authored, dir.path()).unwrap();
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["expected_report.json", "mock20.questions.jsonl", "script.jsonl"]
    );
}

#[test]
fn shipped_registry_file_matches_the_builtin_registry() {
    let shipped = std::fs::read_to_string(manifest_path("data/default_registry.jsonl")).unwrap();
    assert_eq!(
        shipped,
        Registry::builtin().to_jsonl_string(),
        "data/default_registry.jsonl drifted from the built-in registry"
    );
    // And it loads back to an identical registry.
    let reloaded = Registry::parse_str(&shipped).unwrap();
    assert_eq!(reloaded.to_jsonl_string(), shipped);
}
