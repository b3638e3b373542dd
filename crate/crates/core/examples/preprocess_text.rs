//! Cleaning pipeline: HTML stripping, lowercasing, contraction expansion,
//! punctuation and stopword removal, alphabetic-token filter.

use toxbias::textprep::{clean, clean_tokens, expand_contractions, CleanConfig};

fn main() {
    let cfg = CleanConfig::default();
    let samples = [
        "The woman is basically a slave.",
        "<p>You're <b>NOT</b> going to believe this!!!</p>",
        "I don’t think 42 idiots agree... they'll see.",
        "Muslims & Christians can't both be wrong :)",
    ];
    for s in samples {
        println!("raw:     {s}");
        println!("cleaned: {}", clean(s, &cfg));
        println!("tokens:  {:?}\n", clean_tokens(s, &cfg).tokens);
    }

    let keep_everything = CleanConfig {
        remove_stopwords: false,
        keep_alpha_only: false,
        ..CleanConfig::default()
    };
    println!(
        "without stopword/alpha filters: {}",
        clean(samples[2], &keep_everything)
    );
    println!(
        "contractions only: {}",
        expand_contractions("They'll say it isn't so", &cfg.contraction_map)
    );
}
