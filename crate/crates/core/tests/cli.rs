use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn toxbias(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toxbias"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = toxbias(args);
    assert!(
        out.status.success(),
        "toxbias {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn end_to_end_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let p = |name: &str| tmp.path().join(name);
    let cfg = p("run.toml");
    std::fs::write(
        &cfg,
        "learning_rate = 0.01\nepochs = 5\nctf = true\npinned_auc = true\npinned_sample_size = 40\n",
    )
    .unwrap();

    ok(&[
        "synth",
        "--out",
        s(&p("corpus.csv")),
        "--n",
        "800",
        "--toxic-fraction",
        "0.2",
        "--seed",
        "3",
    ]);
    let stats = ok(&["stats", "--input", s(&p("corpus.csv"))]);
    assert!(stats.starts_with("rows: 800\n"), "{stats}");
    ok(&[
        "stats",
        "--input",
        s(&p("corpus.csv")),
        "--out",
        s(&p("stats.json")),
    ]);
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(p("stats.json")).unwrap()).unwrap();
    assert_eq!(v["n_rows"], 800);

    let train = ok(&[
        "train",
        "--input",
        s(&p("corpus.csv")),
        "--config",
        s(&cfg),
        "--model-out",
        s(&p("model.txt")),
        "--split-seed",
        "9",
        "--test-out",
        s(&p("test.csv")),
    ]);
    assert!(train.contains("train rows: 640"), "{train}");
    ok(&[
        "predict",
        "--model",
        s(&p("model.txt")),
        "--input",
        s(&p("test.csv")),
        "--out",
        s(&p("preds.csv")),
    ]);
    let preds = std::fs::read_to_string(p("preds.csv")).unwrap();
    assert!(preds.starts_with("id,score\n"));
    assert_eq!(preds.lines().count(), 161);

    let report = ok(&[
        "evaluate",
        "--input",
        s(&p("test.csv")),
        "--predictions",
        s(&p("preds.csv")),
        "--config",
        s(&cfg),
        "--model",
        s(&p("model.txt")),
        "--provenance",
        "logreg",
    ]);
    assert!(report.starts_with("model: logreg\n"), "{report}");
    assert!(report.contains("Generalized mean AUC: "));
    assert!(report.contains("FPED: "));
    assert!(report.contains("Pinned AUC"));
    assert!(report.contains("Counterfactual token fairness"));

    let subset = ok(&[
        "evaluate",
        "--input",
        s(&p("test.csv")),
        "--predictions",
        s(&p("preds.csv")),
        "--subgroups",
        "muslim,jewish",
    ]);
    assert!(
        subset.contains("\nmuslim ") && subset.contains("\njewish ") && !subset.contains("\nmale ")
    );
}

#[test]
fn cli_reproduces_golden_report() {
    let tmp = tempfile::tempdir().unwrap();
    let f = fixtures();
    for ext in ["txt", "json"] {
        let out = tmp.path().join(format!("report.{ext}"));
        ok(&[
            "evaluate",
            "--input",
            s(&f.join("corpus.csv")),
            "--predictions",
            s(&f.join("predictions.csv")),
            "--config",
            s(&f.join("audit.toml")),
            "--out",
            s(&out),
        ]);
        assert_eq!(
            std::fs::read(&out).unwrap(),
            std::fs::read(f.join(format!("report.{ext}"))).unwrap()
        );
    }
}

#[test]
fn training_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = fixtures().join("corpus.csv");
    let a = tmp.path().join("a.txt");
    let b = tmp.path().join("b.txt");
    for m in [&a, &b] {
        ok(&["train", "--input", s(&corpus), "--model-out", s(m)]);
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn grid_search_ranks_configurations() {
    let tmp = tempfile::tempdir().unwrap();
    let grid = tmp.path().join("grid.toml");
    std::fs::write(
        &grid,
        "learning_rate = [0.01, 0.001]\nclass_weights = [\"balanced\", \"none\"]\nepochs = [3]\n",
    )
    .unwrap();
    let table = ok(&[
        "grid-search",
        "--input",
        s(&fixtures().join("corpus.csv")),
        "--grid",
        s(&grid),
    ]);
    assert_eq!(table.lines().count(), 5, "{table}");
    assert_eq!(table.matches("best").count(), 1);
}

fn expect_error(args: &[&str], kind: &str) {
    let out = toxbias(args);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    let line = err.lines().last().unwrap();
    assert!(
        line.starts_with(&format!("error: kind={kind} message=")),
        "{line}"
    );
}

#[test]
fn failures_print_one_machine_parsable_line() {
    let tmp = tempfile::tempdir().unwrap();
    let f = fixtures();
    expect_error(&["stats", "--input", "/nonexistent/corpus.csv"], "io");

    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "learning_rat = 0.1\n").unwrap();
    expect_error(
        &[
            "stats",
            "--input",
            s(&f.join("corpus.csv")),
            "--config",
            s(&cfg),
        ],
        "config",
    );

    let preds = tmp.path().join("preds.csv");
    std::fs::write(&preds, "id,score\n1,0.4\nnot-an-id,0.2\n").unwrap();
    expect_error(
        &[
            "evaluate",
            "--input",
            s(&f.join("corpus.csv")),
            "--predictions",
            s(&preds),
        ],
        "report",
    );
    std::fs::write(&preds, "id,score\n1,1.5\n").unwrap();
    expect_error(
        &[
            "evaluate",
            "--input",
            s(&f.join("corpus.csv")),
            "--predictions",
            s(&preds),
        ],
        "report",
    );

    let ctf = tmp.path().join("ctf.toml");
    std::fs::write(&ctf, "ctf = true\n").unwrap();
    expect_error(
        &[
            "evaluate",
            "--input",
            s(&f.join("corpus.csv")),
            "--predictions",
            s(&f.join("predictions.csv")),
            "--config",
            s(&ctf),
        ],
        "config",
    );
    expect_error(
        &[
            "synth",
            "--out",
            s(&tmp.path().join("x.csv")),
            "--toxic-fraction",
            "2",
        ],
        "corpus",
    );
}
