//! Reproduces the identity false-positive failure mode: when an identity term
//! co-occurs with toxicity in training data, an unweighted classifier scores
//! harmless mentions of that identity as toxic (BPSN-AUC well below BNSP-AUC).

use toxbias::corpus::{split, synth_corpus, IdentityBias, SplitSpec, SynthSpec};
use toxbias::fairmetrics::{ScoreConfig, ScoredExample};
use toxbias::logreg::{ClassWeights, TrainConfig};
use toxbias::report::{evaluate, render_report, Format};
use toxbias::textprep::CleanConfig;
use toxbias::workflow::Pipeline;

fn main() -> toxbias::Result<()> {
    let mut identity_bias = IdentityBias::default_table(0.1, 0.1);
    identity_bias.retain(|b| b.identity != "muslim");
    identity_bias.push(IdentityBias::new("muslim", "muslim", 0.9, 0.1));
    let corpus = synth_corpus(&SynthSpec {
        n_comments: 10_000,
        toxic_fraction: 0.08,
        identity_bias,
        seed: 11,
        ..SynthSpec::default()
    })?;
    let (train, test) = split(&corpus, &SplitSpec::default())?;
    let cfg = TrainConfig {
        learning_rate: 0.01,
        epochs: 10,
        class_weights: ClassWeights::Uniform,
        ..TrainConfig::default()
    };
    let (pipeline, _) = Pipeline::fit(&train, &CleanConfig::default(), None, &cfg)?;

    let scored: Vec<ScoredExample> = test
        .iter()
        .zip(pipeline.score_corpus(&test))
        .map(|(c, s)| ScoredExample::new(c.id.clone(), c.label(), s, c.identities_at(0.5)))
        .collect::<Result<_, _>>()?;
    let subgroups: Vec<String> = test.registry().names().map(str::to_string).collect();
    let mut report = evaluate(&scored, &subgroups, &ScoreConfig::default())?;
    report.provenance = Some("logreg (unweighted)".into());
    print!("{}", render_report(&report, Format::Plain));
    Ok(())
}
