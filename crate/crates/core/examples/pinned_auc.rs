//! Pinned AUC: subgroup sample pinned to an equal-size sample of the whole set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toxbias::corpus::Label;
use toxbias::fairmetrics::{
    pinned_auc, roc_auc, subgroup_auc, MetricError, MinCounts, ScoredExample,
};

fn main() -> Result<(), MetricError> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let examples: Vec<ScoredExample> = (0..2000)
        .map(|i| {
            let toxic = rng.gen_bool(0.2);
            let member = rng.gen_bool(0.15);
            // members get a score boost regardless of label
            let mut score: f64 = if toxic {
                rng.gen_range(0.3..1.0)
            } else {
                rng.gen_range(0.0..0.7)
            };
            if member {
                score = (score + 0.25).min(1.0);
            }
            let label = if toxic { Label::Toxic } else { Label::NonToxic };
            let groups: Vec<&str> = if member { vec!["jewish"] } else { vec![] };
            ScoredExample::new(i.to_string(), label, score, groups)
        })
        .collect::<Result<_, _>>()?;

    println!("overall AUC  {:.4}", roc_auc(&examples)?);
    println!(
        "subgroup AUC {:.4}",
        subgroup_auc(&examples, "jewish", MinCounts::default())?
    );
    for seed in 0..5 {
        let p = pinned_auc(&examples, "jewish", 200, seed)?;
        println!(
            "seed {seed}: pinned AUC {:.4} (k = {}, clamped = {})",
            p.auc, p.sample_size, p.clamped
        );
    }
    let big = pinned_auc(&examples, "jewish", 10_000, 0)?;
    println!(
        "oversized request is clamped to k = {} (clamped = {})",
        big.sample_size, big.clamped
    );
    Ok(())
}
