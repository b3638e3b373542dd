//! The file-level workflow behind the command-line tool:
//! synth -> stats -> train -> predict -> evaluate, all in a scratch directory.

use toxbias::corpus::{IdentityBias, SynthSpec};
use toxbias::workflow::{
    run_evaluate, run_predict, run_stats, run_synth, run_train, EvaluateJob, PredictJob, StatsJob,
    SynthJob, TrainJob,
};

fn main() -> toxbias::Result<()> {
    let dir = std::env::temp_dir().join(format!("toxbias-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| toxbias::Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let p = |name: &str| dir.join(name);

    std::fs::write(
        p("run.toml"),
        "learning_rate = 0.01\nepochs = 8\nclass_weights = \"balanced\"\nctf = true\npinned_auc = true\npinned_sample_size = 100\n",
    )
    .unwrap();

    run_synth(&SynthJob {
        out: p("corpus.csv"),
        spec: SynthSpec {
            n_comments: 5000,
            identity_bias: IdentityBias::default_table(0.3, 0.08),
            ..SynthSpec::default()
        },
    })?;
    run_stats(&StatsJob {
        input: p("corpus.csv"),
        config: None,
        out: Some(p("stats.json")),
    })?;
    let summary = run_train(&TrainJob {
        input: p("corpus.csv"),
        config: Some(p("run.toml")),
        model_out: p("model.txt"),
        split_seed: Some(1),
        test_out: Some(p("test.csv")),
    })?;
    println!(
        "trained on {} rows, vocabulary {}, held-out AUC {:.4}",
        summary.n_train,
        summary.vocabulary_size,
        summary.test_auc.unwrap_or(f64::NAN)
    );
    run_predict(&PredictJob {
        model: p("model.txt"),
        input: p("test.csv"),
        config: None,
        out: p("predictions.csv"),
    })?;
    let report = run_evaluate(&EvaluateJob {
        input: p("test.csv"),
        predictions: p("predictions.csv"),
        subgroups: None,
        config: Some(p("run.toml")),
        out: None,
        model: Some(p("model.txt")),
        provenance: Some("logreg".into()),
    })?;
    print!("\n{}", report.rendered);
    println!("\nartifacts in {}", dir.display());
    Ok(())
}
