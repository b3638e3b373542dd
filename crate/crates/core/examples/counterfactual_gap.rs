//! Counterfactual token fairness: how much a score moves when one identity
//! term is swapped for another in short texts.

use toxbias::corpus::{synth_corpus, IdentityBias, SynthSpec};
use toxbias::fairmetrics::{ctf_gap, CounterfactualGenerator};
use toxbias::logreg::{ClassWeights, TrainConfig};
use toxbias::textprep::CleanConfig;
use toxbias::workflow::Pipeline;

fn main() -> toxbias::Result<()> {
    let pair = CounterfactualGenerator::from_table("gay,straight")?;
    let stub = |t: &str| if t.contains("gay") { 0.8 } else { 0.3 };
    println!(
        "counterfactuals: {:?}",
        pair.counterfactuals("i am a gay woman")?
    );
    println!(
        "stub scorer gap: {:.2}",
        ctf_gap(stub, "i am a gay woman", &pair)?
    );

    // a model trained where "gay" co-occurs with toxicity
    let corpus = synth_corpus(&SynthSpec {
        n_comments: 5000,
        identity_bias: vec![IdentityBias::new(
            "homosexual_gay_or_lesbian",
            "gay",
            0.8,
            0.05,
        )],
        ..SynthSpec::default()
    })?;
    let cfg = TrainConfig {
        learning_rate: 0.01,
        epochs: 10,
        class_weights: ClassWeights::Uniform,
        ..TrainConfig::default()
    };
    let (pipeline, _) = Pipeline::fit(&corpus, &CleanConfig::default(), None, &cfg)?;
    let generator = CounterfactualGenerator::default();
    let score = |t: &str| pipeline.score_text(t);
    for text in [
        "I am a gay man",
        "My black neighbour is kind",
        "Ten muslims attended the meeting",
        "Nice weather today",
    ] {
        match ctf_gap(score, text, &generator) {
            Ok(gap) => println!("{text:<36} score {:.4}  gap {gap:.4}", score(text)),
            Err(e) => println!("{text:<36} skipped: {e}"),
        }
    }
    Ok(())
}
