//! Fits a vocabulary and turns documents into sparse TF-IDF vectors.

use toxbias::textprep::{clean_tokens, CleanConfig};
use toxbias::tfidf::{fit, transform};

fn main() -> toxbias::Result<()> {
    let cfg = CleanConfig::default();
    let docs = [
        "You are a complete idiot.",
        "What a lovely garden you have.",
        "The garden club meets on Tuesday.",
        "Idiot drivers everywhere, idiot!",
    ];
    let tokens: Vec<_> = docs.iter().map(|d| clean_tokens(d, &cfg)).collect();

    let vocab = fit(&tokens, None)?;
    println!("{} terms over {} documents", vocab.len(), vocab.n_docs());
    for (term, index, df) in vocab.iter() {
        println!("  [{index}] {term:<10} df={df}");
    }

    for (doc, t) in docs.iter().zip(&tokens) {
        let v = transform(t, &vocab);
        let named: Vec<String> = v
            .entries()
            .iter()
            .map(|(i, w)| format!("{}={w:.3}", vocab.term(*i).unwrap()))
            .collect();
        println!("{doc:<36} -> {}", named.join(" "));
    }

    // capped vocabulary keeps the most frequent terms
    let small = fit(&tokens, Some(2))?;
    let kept: Vec<&str> = small.iter().map(|(t, _, _)| t).collect();
    println!("max_features=2 keeps {kept:?}");

    let unseen = clean_tokens("an idiot and a unicorn", &cfg);
    println!(
        "out-of-vocabulary tokens dilute tf: {:?}",
        transform(&unseen, &vocab).entries()
    );
    Ok(())
}
