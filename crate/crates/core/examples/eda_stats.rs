//! Exploratory statistics of a Jigsaw-format CSV.

use std::path::PathBuf;

use toxbias::config::Settings;
use toxbias::report::{render_eda, stats, weighted_toxicity, Format};
use toxbias::workflow::read_corpus;

fn main() -> toxbias::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus.csv")
        });
    let (corpus, ingest) = read_corpus(&path, &Settings::default())?;
    println!(
        "{}: {} rows read, {} rejected\n",
        path.display(),
        ingest.rows_read,
        ingest.rejected_count()
    );

    let summary = stats(&corpus)?;
    print!("{}", render_eda(&summary, Format::Plain));

    if let Ok(w) = weighted_toxicity(&corpus, "female") {
        println!("\nweighted toxicity of `female`: {w:.4}");
    }
    Ok(())
}
