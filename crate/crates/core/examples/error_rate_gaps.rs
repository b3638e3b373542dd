//! False positive / false negative equality gaps at a fixed threshold.

use toxbias::corpus::Label;
use toxbias::fairmetrics::{confusion_at, fped_fned, ScoredExample};

fn main() -> Result<(), toxbias::fairmetrics::MetricError> {
    // (label, score, subgroups); the classifier over-flags "muslim" mentions
    let rows: &[(Label, f64, &[&str])] = &[
        (Label::Toxic, 0.92, &[]),
        (Label::Toxic, 0.71, &["muslim"]),
        (Label::Toxic, 0.35, &["female"]),
        (Label::Toxic, 0.81, &["female"]),
        (Label::NonToxic, 0.12, &[]),
        (Label::NonToxic, 0.22, &[]),
        (Label::NonToxic, 0.64, &["muslim"]),
        (Label::NonToxic, 0.58, &["muslim"]),
        (Label::NonToxic, 0.31, &["muslim"]),
        (Label::NonToxic, 0.08, &["female"]),
        (Label::NonToxic, 0.27, &["female"]),
        (Label::NonToxic, 0.55, &[]),
    ];
    let examples: Vec<ScoredExample> = rows
        .iter()
        .enumerate()
        .map(|(i, (l, s, g))| ScoredExample::new(format!("c{i}"), *l, *s, g.iter().copied()))
        .collect::<Result<_, _>>()?;

    let overall = confusion_at(&examples, 0.5);
    println!("overall at 0.5: {overall:?}");
    let gaps = fped_fned(&examples, &["muslim".into(), "female".into()], 0.5)?;
    for r in &gaps.rows {
        println!("{:<8} FPR {:?}  FNR {:?}", r.subgroup, r.fpr, r.fnr);
    }
    println!("FPED {:.4}  FNED {:.4}", gaps.fped, gaps.fned);

    for t in [0.3, 0.5, 0.7] {
        let g = fped_fned(&examples, &["muslim".into(), "female".into()], t)?;
        println!("threshold {t}: FPED {:.4} FNED {:.4}", g.fped, g.fned);
    }
    Ok(())
}
