//! Balanced class weights versus unweighted training on an imbalanced corpus.

use toxbias::corpus::{split, synth_corpus, SplitSpec, SynthSpec};
use toxbias::fairmetrics::{confusion_at, roc_auc_labels, ScoredExample};
use toxbias::logreg::{balanced_class_weights, ClassWeights, TrainConfig};
use toxbias::textprep::CleanConfig;
use toxbias::workflow::Pipeline;

fn main() -> toxbias::Result<()> {
    let corpus = synth_corpus(&SynthSpec {
        n_comments: 6000,
        toxic_fraction: 0.08,
        ..SynthSpec::default()
    })?;
    let (train, test) = split(&corpus, &SplitSpec::default())?;
    let n_toxic = train.iter().filter(|c| c.label().is_toxic()).count();
    let (w0, w1) = balanced_class_weights(train.len() - n_toxic, n_toxic)?;
    println!("balanced weights: non-toxic {w0:.4}, toxic {w1:.4}");

    for cw in [
        ClassWeights::Uniform,
        ClassWeights::Balanced,
        ClassWeights::Custom(1.0, 4.0),
    ] {
        let cfg = TrainConfig {
            learning_rate: 0.01,
            epochs: 10,
            class_weights: cw,
            ..TrainConfig::default()
        };
        let (pipeline, _) = Pipeline::fit(&train, &CleanConfig::default(), None, &cfg)?;
        let scores = pipeline.score_corpus(&test);
        let scored: Vec<ScoredExample> = test
            .iter()
            .zip(&scores)
            .map(|(c, s)| ScoredExample::new(c.id.clone(), c.label(), *s, Vec::<String>::new()))
            .collect::<Result<_, _>>()?;
        let counts = confusion_at(&scored, 0.5);
        println!(
            "{:<10} AUC {:.4}  toxic recall {:.4}  false positive rate {:.4}",
            cw.to_string(),
            roc_auc_labels(&test.labels(), &scores)?,
            1.0 - counts.fnr().unwrap_or(f64::NAN),
            counts.fpr().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
