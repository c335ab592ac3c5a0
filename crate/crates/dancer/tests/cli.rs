mod common;

use std::fs;

use common::{dancer, fixture, stderr, stdout};

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn score_of_identical_files_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    fs::write(&a, "The cat sat on the mat. It purred.").unwrap();
    let o = dancer(&[
        "score",
        "--candidate",
        path(&a),
        "--reference",
        path(&a),
        "--json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(lines.len(), 3);
    for l in lines {
        assert_eq!(l["f1"], 1.0);
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = dancer(&["split", "--in", "x", "--out", "y", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("--frobnicate") && err.contains("Usage"),
        "{err}"
    );
    assert_eq!(dancer(&[]).status.code(), Some(2));
}

#[test]
fn missing_input_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let o = dancer(&[
        "split",
        "--in",
        "/nonexistent/x.jsonl",
        "--out",
        path(&dir.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not found"));
}

#[test]
fn help_documents_every_flag() {
    let expected: &[(&str, &[&str])] = &[
        (
            "ingest",
            &["--in", "--out", "--format", "--keywords", "--config"],
        ),
        (
            "split",
            &[
                "--in",
                "--out",
                "--format",
                "--max-source",
                "--max-target",
                "--sections",
                "--align-denominator",
                "--drop-zero-overlap",
                "--sentence-truncation",
                "--fallback-first-k",
                "--keywords",
            ],
        ),
        (
            "stats",
            &["--in", "--copy-counting", "--json", "--out", "--workers"],
        ),
        (
            "summarize",
            &[
                "--in",
                "--out",
                "--summarizer",
                "--workers",
                "--block-trigrams",
                "--max-summary-words",
                "--timeout-ms",
                "--fallback-first-k",
            ],
        ),
        (
            "evaluate",
            &[
                "--hyp",
                "--ref",
                "--stem",
                "--resamples",
                "--confidence",
                "--seed",
                "--json",
            ],
        ),
        ("score", &["--candidate", "--reference", "--stem"]),
    ];
    for (cmd, flags) in expected {
        let o = dancer(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        let help = stdout(&o);
        for f in *flags {
            assert!(help.contains(f), "{cmd} --help lacks {f}");
        }
    }
}

#[test]
fn split_matches_fixture_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex.jsonl");
    let input = fixture("mini.jsonl");
    let o = dancer(&[
        "split",
        "--in",
        path(&input),
        "--out",
        path(&out),
        "--max-source",
        "500",
        "--max-target",
        "100",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(&out).unwrap(),
        fs::read(fixture("expected_examples.jsonl")).unwrap()
    );
    assert!(stderr(&o).contains("23 examples from 10 documents"));
}

#[test]
fn caps_from_config_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "[generation]\nmax_source_words = 20\nmax_target_words = 5\n",
    )
    .unwrap();
    let out = dir.path().join("ex.jsonl");
    let input = fixture("mini.jsonl");
    let run = |extra: &[&str]| {
        let mut args = vec![
            "--config",
            path(&config),
            "split",
            "--in",
            path(&input),
            "--out",
            path(&out),
        ];
        args.extend_from_slice(extra);
        let o = dancer(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = fs::read_to_string(&out).unwrap();
        text.lines()
            .map(|l| {
                let v: serde_json::Value = serde_json::from_str(l).unwrap();
                let n = |f: &str| v[f].as_str().unwrap().split(' ').count();
                (n("source"), n("target"))
            })
            .fold((0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
    };
    assert_eq!(run(&[]), (20, 5));
    assert_eq!(run(&["--max-source", "30"]), (30, 5));
}

#[test]
fn malformed_records_are_diagnosed_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.jsonl");
    let o = dancer(&[
        "summarize",
        "--in",
        path(&fixture("malformed.jsonl")),
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 2);
    let err = stderr(&o);
    assert!(err.contains("line 2: invalid JSON"), "{err}");
    assert!(
        err.contains("line 4: missing required field \"sections\""),
        "{err}"
    );
}

#[test]
fn ingest_then_native_split_is_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let native = dir.path().join("native.jsonl");
    let o = dancer(&[
        "ingest",
        "--in",
        path(&fixture("mini.jsonl")),
        "--out",
        path(&native),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("ex.jsonl");
    let o = dancer(&[
        "split",
        "--in",
        path(&native),
        "--format",
        "native",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(&out).unwrap(),
        fs::read(fixture("expected_examples.jsonl")).unwrap()
    );
}

#[test]
fn summarize_then_evaluate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let hyps = dir.path().join("h.jsonl");
    let input = fixture("mini.jsonl");
    let o = dancer(&[
        "summarize",
        "--in",
        path(&input),
        "--out",
        path(&hyps),
        "--summarizer",
        "lead:2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for line in fs::read_to_string(&hyps).unwrap().lines() {
        let h: dancer_core::SummaryHypothesis = serde_json::from_str(line).unwrap();
        assert!(h.is_consistent());
    }
    let eval = || {
        let o = dancer(&[
            "evaluate",
            "--hyp",
            path(&hyps),
            "--ref",
            path(&input),
            "--seed",
            "9",
            "--json",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        o.stdout
    };
    let first = eval();
    assert_eq!(first, eval());
    let report: dancer::eval::EvalReport = serde_json::from_slice(&first).unwrap();
    assert_eq!(report.n_pairs, 10);
    for v in &report.variants {
        assert!(v.mean.f1 > 0.0 && v.mean.f1 < 1.0);
        assert!(v.f1_ci.0 <= v.mean.f1 && v.mean.f1 <= v.f1_ci.1);
    }
    let table = dancer(&["evaluate", "--hyp", path(&hyps), "--ref", path(&input)]);
    assert!(stdout(&table).starts_with("metric"));
}

#[test]
fn stats_table_and_keyword_override() {
    let dir = tempfile::tempdir().unwrap();
    let kw = dir.path().join("kw.toml");
    fs::write(&kw, "introduction = [\"preface\"]\n").unwrap();
    let input = fixture("mini.jsonl");
    let o = dancer(&[
        "stats",
        "--in",
        path(&input),
        "--keywords",
        path(&kw),
        "--json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // only the preface of one document is selected now
    assert_eq!(v["corpus"]["n_examples"], 1);
    let o = dancer(&["stats", "--in", path(&input)]);
    let text = stdout(&o);
    assert!(
        text.contains("copied n-grams") && text.contains("literature"),
        "{text}"
    );
}

#[test]
fn empty_input_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let out = dir.path().join("h.jsonl");
    let o = dancer(&[
        "summarize",
        "--in",
        path(&empty),
        "--out",
        path(&out),
        "--workers",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&out).unwrap(), b"");
    let o = dancer(&["evaluate", "--hyp", path(&out), "--ref", path(&empty)]);
    assert_eq!(o.status.code(), Some(1));
}
