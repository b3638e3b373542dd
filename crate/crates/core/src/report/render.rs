use std::fmt::Write as _;

use serde_json::json;

use super::{EdaSummary, Format};
use crate::fairmetrics::BiasReport;
use crate::logreg::GridSearchResult;

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}

/// Renders the per-subgroup AUC table followed by the overall and
/// generalized-mean lines, then any optional sections.
pub fn render_report(report: &BiasReport, format: Format) -> String {
    if format == Format::Json {
        return to_json(report);
    }
    let w = report
        .rows
        .iter()
        .map(|r| r.subgroup.len())
        .max()
        .unwrap_or(0)
        .max(8);
    let mut out = String::new();
    if let Some(p) = &report.provenance {
        writeln!(out, "model: {p}").unwrap();
    }
    writeln!(out, "examples: {}", report.n_examples).unwrap();
    writeln!(out).unwrap();
    writeln!(
        out,
        "{:<w$}  {:>8}  {:>12}  {:>8}  {:>8}",
        "subgroup", "members", "subgroup_auc", "bpsn_auc", "bnsp_auc"
    )
    .unwrap();
    for r in &report.rows {
        writeln!(
            out,
            "{:<w$}  {:>8}  {:>12}  {:>8}  {:>8}{}",
            r.subgroup,
            r.n_members,
            cell(r.subgroup_auc),
            cell(r.bpsn_auc),
            cell(r.bnsp_auc),
            if r.missing { " *" } else { "" }
        )
        .unwrap();
    }
    writeln!(out, "Overall AUC: {:.4}", report.overall_auc).unwrap();
    writeln!(out, "Generalized mean AUC: {}", cell(report.final_score)).unwrap();
    if report.rows.iter().any(|r| r.missing) {
        let m = report.score_config.min_counts;
        writeln!(
            out,
            "* below minimum subgroup counts ({} positive, {} negative); excluded from the generalized mean",
            m.positives, m.negatives
        )
        .unwrap();
    }

    if let Some(g) = &report.error_gaps {
        writeln!(out).unwrap();
        writeln!(out, "Error rate gaps at threshold {:.4}", g.threshold).unwrap();
        writeln!(out, "{:<w$}  {:>8}  {:>8}", "subgroup", "fpr", "fnr").unwrap();
        for r in &g.rows {
            writeln!(
                out,
                "{:<w$}  {:>8}  {:>8}",
                r.subgroup,
                cell(r.fpr),
                cell(r.fnr)
            )
            .unwrap();
        }
        writeln!(
            out,
            "{:<w$}  {:>8.4}  {:>8.4}",
            "overall", g.overall_fpr, g.overall_fnr
        )
        .unwrap();
        writeln!(out, "FPED: {:.4}", g.fped).unwrap();
        writeln!(out, "FNED: {:.4}", g.fned).unwrap();
    }

    if let Some(rows) = &report.pinned {
        writeln!(out).unwrap();
        writeln!(out, "Pinned AUC").unwrap();
        writeln!(
            out,
            "{:<w$}  {:>10}  {:>11}",
            "subgroup", "pinned_auc", "sample_size"
        )
        .unwrap();
        for r in rows {
            writeln!(
                out,
                "{:<w$}  {:>10}  {:>11}{}",
                r.subgroup,
                cell(r.auc),
                r.sample_size,
                if r.clamped { " (clamped)" } else { "" }
            )
            .unwrap();
        }
    }

    if let Some(c) = &report.ctf {
        writeln!(out).unwrap();
        writeln!(
            out,
            "Counterfactual token fairness (texts of at most {} tokens)",
            c.max_tokens
        )
        .unwrap();
        writeln!(out, "evaluated: {}", c.evaluated).unwrap();
        writeln!(out, "skipped, too long: {}", c.skipped_too_long).unwrap();
        writeln!(out, "skipped, no identity term: {}", c.skipped_no_identity).unwrap();
        writeln!(out, "mean gap: {}", cell(c.mean_gap)).unwrap();
        writeln!(out, "mean gap, toxic: {}", cell(c.mean_gap_toxic)).unwrap();
        writeln!(out, "mean gap, non-toxic: {}", cell(c.mean_gap_nontoxic)).unwrap();
    }
    out
}

pub fn render_eda(summary: &EdaSummary, format: Format) -> String {
    if format == Format::Json {
        return to_json(summary);
    }
    let mut out = String::new();
    let d = &summary.class_distribution;
    writeln!(out, "rows: {}", summary.n_rows).unwrap();
    writeln!(out, "toxic: {} ({:.4})", d.toxic, d.toxic_fraction).unwrap();
    writeln!(
        out,
        "non-toxic: {} ({:.4})",
        d.non_toxic, d.non_toxic_fraction
    )
    .unwrap();

    let w = summary
        .weighted_toxicity
        .iter()
        .map(|t| t.identity.len())
        .max()
        .unwrap_or(0)
        .max(8);
    writeln!(out).unwrap();
    writeln!(out, "Weighted toxicity by identity").unwrap();
    writeln!(
        out,
        "{:<w$}  {:>8}  {:>8}",
        "identity", "mentions", "weighted"
    )
    .unwrap();
    for t in &summary.weighted_toxicity {
        writeln!(
            out,
            "{:<w$}  {:>8}  {:>8}",
            t.identity,
            t.n_mentions,
            cell(t.weighted_toxicity)
        )
        .unwrap();
    }

    if !summary.subtype_histograms.is_empty() {
        writeln!(out).unwrap();
        writeln!(out, "Subtype histograms (10 bins over [0, 1])").unwrap();
        for h in &summary.subtype_histograms {
            let bins: Vec<String> = h.bins.iter().map(|b| b.to_string()).collect();
            writeln!(
                out,
                "{:<17}  {}  absent {}",
                h.name,
                bins.join(" "),
                h.absent
            )
            .unwrap();
        }
    }

    for (title, m) in [
        ("Reaction correlations", &summary.reaction_correlations),
        ("Identity correlations", &summary.identity_correlations),
    ] {
        writeln!(out).unwrap();
        writeln!(out, "{title} (Pearson r)").unwrap();
        let w = m.variables.iter().map(|v| v.len()).max().unwrap_or(0);
        let header: Vec<String> = m
            .variables
            .iter()
            .enumerate()
            .map(|(i, _)| format!("{i:>7}"))
            .collect();
        writeln!(out, "{:>3} {:<w$}  {}", "", "", header.join(" ")).unwrap();
        for (i, (name, row)) in m.variables.iter().zip(&m.values).enumerate() {
            let cells: Vec<String> = row
                .iter()
                .map(|v| format!("{:>7}", v.map_or("n/a".into(), |v| format!("{v:.3}"))))
                .collect();
            writeln!(out, "{i:>3} {name:<w$}  {}", cells.join(" ")).unwrap();
        }
    }
    out
}

pub fn render_grid(result: &GridSearchResult, format: Format) -> String {
    if format == Format::Json {
        let rows: Vec<_> = result
            .rows
            .iter()
            .map(|r| {
                json!({
                    "learning_rate": r.config.learning_rate,
                    "class_weights": r.config.class_weights.to_string(),
                    "batch_size": r.config.batch_size,
                    "epochs": r.config.epochs,
                    "l2": r.config.l2,
                    "validation_auc": r.validation_auc,
                    "error": r.error,
                })
            })
            .collect();
        return to_json(&json!({ "best_index": result.best_index, "rows": rows }));
    }
    let mut out = String::new();
    writeln!(
        out,
        "{:>3}  {:>13}  {:>13}  {:>10}  {:>6}  {:>8}  {:>14}",
        "#", "learning_rate", "class_weights", "batch_size", "epochs", "l2", "validation_auc"
    )
    .unwrap();
    for (i, r) in result.rows.iter().enumerate() {
        writeln!(
            out,
            "{:>3}  {:>13}  {:>13}  {:>10}  {:>6}  {:>8}  {:>14}{}",
            i,
            r.config.learning_rate,
            r.config.class_weights.to_string(),
            r.config.batch_size,
            r.config.epochs,
            r.config.l2,
            cell(r.validation_auc),
            if i == result.best_index { "  best" } else { "" }
        )
        .unwrap();
    }
    out
}
