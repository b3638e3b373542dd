//! Audits scores produced by an external model (e.g. a fine-tuned transformer)
//! by joining an `id,score` file to the labelled corpus.

use std::path::PathBuf;

use toxbias::config::Settings;
use toxbias::fairmetrics::ScoreConfig;
use toxbias::report::{evaluate, import_predictions, render_report, Format, PredictionFile};
use toxbias::workflow::read_corpus;

fn main() -> toxbias::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let settings = Settings::default();
    let (corpus, _) = read_corpus(&fixtures.join("corpus.csv"), &settings)?;

    // a stand-in for external scores: a near-oracle with a little noise
    let csv: String = std::iter::once("id,score".to_string())
        .chain(corpus.iter().enumerate().map(|(i, c)| {
            let noise = ((i * 7919) % 100) as f64 / 400.0;
            format!("{},{}", c.id, (c.target * 0.75 + noise).min(1.0))
        }))
        .collect::<Vec<_>>()
        .join("\n");
    let file = PredictionFile::read_csv(csv.as_bytes())?.with_provenance("external-model");

    let scored = import_predictions(&file, &corpus, settings.membership_threshold)?;
    let mut report = evaluate(&scored, &settings.subgroups, &ScoreConfig::default())?;
    report.provenance = file.provenance.clone();
    print!("{}", render_report(&report, Format::Plain));

    let bad = PredictionFile::read_csv("id,score\n1,0.5\nno-such-id,0.1\n".as_bytes())?;
    if let Err(e) = import_predictions(&bad, &corpus, 0.5) {
        println!("\nrejected: {e}");
    }
    Ok(())
}
