use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn readgauge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_readgauge"))
        .args(args)
        .env_remove("READGAUGE_DATA")
        .output()
        .expect("run readgauge")
}

fn ok(out: Output) -> Output {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn synth(docs: usize) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(readgauge(&["synth", "--out", s(dir.path()), "--docs", &docs.to_string(), "--oracle-scores"]));
    dir
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn corpus_flags<'a>(corpus: &'a Path, manifest: &'a str, out: &'a Path) -> Vec<&'a str> {
    vec!["--manifest", manifest, "--data-dir", s(corpus), "--out", s(out)]
}

#[test]
fn extract_is_byte_identical_across_runs() {
    let corpus = synth(60);
    let manifest = corpus.path().join("manifest.csv");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for out in [&a, &b] {
        let mut args = vec!["extract", "--features", "linguistic+word_types"];
        args.extend(corpus_flags(corpus.path(), s(&manifest), out.path()));
        ok(readgauge(&args));
    }
    let first = std::fs::read(a.path().join("features.csv")).unwrap();
    assert_eq!(first, std::fs::read(b.path().join("features.csv")).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 61);
    assert!(text.starts_with("doc_id,label,number_of_sentences,"));
}

#[test]
fn missing_score_row_fails_and_names_the_document() {
    let corpus = synth(30);
    let scores = corpus.path().join("oracle_scores.csv");
    let text = std::fs::read_to_string(&scores).unwrap();
    let dropped = text.lines().nth(5).unwrap().split(',').next().unwrap().to_string();
    let kept: Vec<&str> = text.lines().filter(|l| !l.starts_with(&format!("{dropped},"))).collect();
    std::fs::write(&scores, kept.join("\n") + "\n").unwrap();

    let out = tempfile::tempdir().unwrap();
    let manifest = corpus.path().join("manifest.csv");
    let mut args = vec!["train", "--features", "flesch", "--scores", s(&scores)];
    args.extend(corpus_flags(corpus.path(), s(&manifest), out.path()));
    let result = readgauge(&args);
    assert_eq!(result.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert_eq!(stderr.trim().lines().count(), 1, "{stderr}");
    assert!(stderr.contains(&dropped), "{stderr}");
    assert!(!out.path().join("model.txt").exists());
}

#[test]
fn bad_inputs_exit_nonzero_with_one_line() {
    let corpus = synth(10);
    let out = tempfile::tempdir().unwrap();
    let manifest = corpus.path().join("manifest.csv");
    let missing = corpus.path().join("nope.csv");
    let cases: Vec<Vec<&str>> = vec![
        [vec!["extract", "--features", "nonsense"], corpus_flags(corpus.path(), s(&manifest), out.path())].concat(),
        [vec!["extract", "--features", "flesch"], corpus_flags(corpus.path(), s(&missing), out.path())].concat(),
        vec!["extract", "--features", "pos", "--manifest", s(&manifest), "--out", s(out.path())],
    ];
    for args in cases {
        let result = readgauge(&args);
        assert_eq!(result.status.code(), Some(1), "{args:?}");
        let stderr = String::from_utf8_lossy(&result.stderr);
        assert_eq!(stderr.trim().lines().count(), 1, "{args:?}: {stderr}");
    }
}

#[test]
fn train_writes_a_loadable_model() {
    let corpus = synth(45);
    let out = tempfile::tempdir().unwrap();
    let manifest = corpus.path().join("manifest.csv");
    let mut args = vec!["train", "--features", "flesch", "--model", "logistic"];
    args.extend(corpus_flags(corpus.path(), s(&manifest), out.path()));
    ok(readgauge(&args));
    let model = readgauge::LinearModel::<f64>::load(&out.path().join("model.txt")).unwrap();
    assert_eq!(model.class_names, ["level1", "level2", "level3"]);
    assert_eq!(model.feature_names.len(), 12);
}

#[test]
fn feature_order_follows_the_registry() {
    let corpus = synth(60);
    let manifest = corpus.path().join("manifest.csv");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut joined = vec!["eval", "--features", "flesch+linguistic", "--folds", "3"];
    joined.extend(corpus_flags(corpus.path(), s(&manifest), a.path()));
    let mut split = vec!["eval", "--features", "linguistic", "--features", "flesch", "--folds", "3"];
    split.extend(corpus_flags(corpus.path(), s(&manifest), b.path()));
    let first = ok(readgauge(&joined)).stdout;
    assert_eq!(first, ok(readgauge(&split)).stdout);
    for file in ["report.csv", "folds.csv"] {
        assert_eq!(std::fs::read(a.path().join(file)).unwrap(), std::fs::read(b.path().join(file)).unwrap());
    }
}

#[test]
fn eval_on_the_bundled_corpus_reports_five_folds() {
    let corpus = synth(600);
    let out = tempfile::tempdir().unwrap();
    let manifest = corpus.path().join("manifest.csv");
    let mut args = vec!["eval", "--features", "linguistic", "--model", "svm", "--folds", "5", "--seed", "7"];
    args.extend(corpus_flags(corpus.path(), s(&manifest), out.path()));
    ok(readgauge(&args));
    let folds = std::fs::read_to_string(out.path().join("folds.csv")).unwrap();
    let lines: Vec<&str> = folds.lines().collect();
    assert_eq!(lines.len(), 7, "{folds}");
    assert!(lines[6].starts_with("all,"));
    let report = std::fs::read_to_string(out.path().join("report.csv")).unwrap();
    let row: Vec<&str> = report.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "svm with linguistic");
    let weighted: f64 = row[1].parse().unwrap();
    assert!((weighted - 0.984_995_049_355_448_8).abs() < 1e-9, "{weighted}");
}

#[test]
fn ablate_and_report_are_deterministic() {
    let corpus = synth(150);
    let manifest = corpus.path().join("manifest.csv");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for out in [&a, &b] {
        let mut args = vec!["ablate", "--features", "flesch", "--model", "logistic", "--sizes", "20,40"];
        args.extend(corpus_flags(corpus.path(), s(&manifest), out.path()));
        ok(readgauge(&args));
    }
    let curve = std::fs::read_to_string(a.path().join("ablation.csv")).unwrap();
    assert_eq!(curve, std::fs::read_to_string(b.path().join("ablation.csv")).unwrap());
    assert_eq!(curve.lines().count(), 3);

    let reports = tempfile::tempdir().unwrap();
    let mut inputs = Vec::new();
    for (i, features) in ["flesch", "lexical_diversity"].iter().enumerate() {
        let out = reports.path().join(format!("r{i}"));
        let mut args = vec!["eval", "--features", features, "--model", "logistic", "--folds", "3"];
        args.extend(corpus_flags(corpus.path(), s(&manifest), &out));
        ok(readgauge(&args));
        inputs.push(out.join("report.csv"));
    }
    let ranked = tempfile::tempdir().unwrap();
    let mut args = vec!["report", "--out", s(ranked.path())];
    args.extend(inputs.iter().map(|p| s(p)));
    ok(readgauge(&args));
    let table = std::fs::read_to_string(ranked.path().join("ranked.csv")).unwrap();
    let scores: Vec<f64> = table.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(scores.len(), 2);
    assert!(scores[0] >= scores[1]);
}

#[test]
fn bundled_resources_match_the_generators() {
    use readgauge::demo;
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let expected = [
        ("grammar.pcfg", demo::grammar_text()),
        ("tags.csv", demo::tag_lexicon_csv()),
        ("norms.csv", demo::norms_csv()),
        ("senses.csv", demo::senses_csv()),
        ("lemmas.csv", demo::lemmas_csv()),
    ];
    for (file, text) in expected {
        assert_eq!(std::fs::read_to_string(data.join(file)).unwrap(), text, "{file}");
    }
}
