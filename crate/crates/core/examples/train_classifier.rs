//! Trains the TF-IDF + logistic-regression pipeline on a synthetic corpus,
//! reports held-out AUC and round-trips the model bundle through a file.

use toxbias::corpus::{split, synth_corpus, SplitSpec, SynthSpec};
use toxbias::fairmetrics::roc_auc_labels;
use toxbias::logreg::TrainConfig;
use toxbias::textprep::CleanConfig;
use toxbias::workflow::Pipeline;

fn main() -> toxbias::Result<()> {
    let corpus = synth_corpus(&SynthSpec {
        n_comments: 4000,
        ..SynthSpec::default()
    })?;
    let (train, test) = split(&corpus, &SplitSpec::default())?;
    println!("train {} rows, test {} rows", train.len(), test.len());

    let cfg = TrainConfig {
        learning_rate: 0.01,
        epochs: 8,
        ..TrainConfig::default()
    };
    let (pipeline, outcome) = Pipeline::fit(&train, &CleanConfig::default(), Some(5000), &cfg)?;
    for (epoch, loss) in outcome.loss_trace.iter().enumerate() {
        println!("epoch {epoch}: weighted loss {loss:.5}");
    }

    let auc = roc_auc_labels(&test.labels(), &pipeline.score_corpus(&test))?;
    println!(
        "held-out AUC {auc:.4} with {} features",
        pipeline.vocabulary.len()
    );

    let path = std::env::temp_dir().join("toxbias-example-model.txt");
    pipeline.save(&path)?;
    let reloaded = Pipeline::load(&path)?;
    for text in ["You stupid idiot", "Lovely weather for the garden party"] {
        println!("{:<40} {:.4}", text, reloaded.score_text(text));
    }
    std::fs::remove_file(&path).map_err(|e| toxbias::Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(())
}
