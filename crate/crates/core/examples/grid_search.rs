//! Searches learning rate × class weights and ranks by validation AUC.

use toxbias::config::GridFile;
use toxbias::corpus::{split, synth_corpus, SplitSpec, SynthSpec};
use toxbias::logreg::{default_grid, grid_search, TrainConfig};
use toxbias::report::{render_grid, Format};
use toxbias::textprep::{clean_tokens, CleanConfig};
use toxbias::tfidf::{fit, transform, SparseVector};

fn main() -> toxbias::Result<()> {
    let corpus = synth_corpus(&SynthSpec {
        n_comments: 3000,
        toxic_fraction: 0.15,
        ..SynthSpec::default()
    })?;
    let (train, val) = split(&corpus, &SplitSpec::new(0.75, 1)?)?;
    let cfg = CleanConfig::default();
    let train_tokens: Vec<_> = train.iter().map(|c| clean_tokens(&c.text, &cfg)).collect();
    let vocab = fit(&train_tokens, None)?;
    let train_x: Vec<SparseVector> = train_tokens.iter().map(|t| transform(t, &vocab)).collect();
    let val_x: Vec<SparseVector> = val
        .iter()
        .map(|c| transform(&clean_tokens(&c.text, &cfg), &vocab))
        .collect();

    let base = TrainConfig {
        epochs: 4,
        ..TrainConfig::default()
    };
    let result = grid_search(
        (&train_x, &train.labels()),
        (&val_x, &val.labels()),
        &default_grid(&base),
    )?;
    print!("{}", render_grid(&result, Format::Plain));
    println!(
        "best: lr {} weights {}",
        result.best.learning_rate, result.best.class_weights
    );

    // the same grid shape as a file
    let file = GridFile::from_toml("learning_rate = [0.05, 0.005]\nbatch_size = [50, 200]\n")?;
    let grid = file.expand(&base)?;
    let result = grid_search((&train_x, &train.labels()), (&val_x, &val.labels()), &grid)?;
    print!("\n{}", render_grid(&result, Format::Plain));
    Ok(())
}
