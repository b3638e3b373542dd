use rayon::prelude::*;

use super::{train, ClassWeights, LogRegError, TrainConfig};
use crate::corpus::Label;
use crate::fairmetrics::roc_auc_labels;
use crate::tfidf::SparseVector;

/// One grid entry and its validation Overall-AUC (or the reason it failed).
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub config: TrainConfig,
    pub validation_auc: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best: TrainConfig,
    pub best_index: usize,
    /// One row per grid entry, in grid order.
    pub rows: Vec<GridRow>,
}

/// Learning rate {1e-2, 1e-3, 1e-4} × class weights {balanced, none} on top of `base`.
pub fn default_grid(base: &TrainConfig) -> Vec<TrainConfig> {
    let mut grid = Vec::new();
    for lr in [1e-2, 1e-3, 1e-4] {
        for cw in [ClassWeights::Balanced, ClassWeights::Uniform] {
            grid.push(TrainConfig {
                learning_rate: lr,
                class_weights: cw,
                ..base.clone()
            });
        }
    }
    grid
}

/// Trains one model per configuration and keeps the one with the highest
/// validation AUC. Ties go to the earliest entry. Configurations run in
/// parallel; each uses only its own seed, so results do not depend on scheduling.
pub fn grid_search(
    train_data: (&[SparseVector], &[Label]),
    validation_data: (&[SparseVector], &[Label]),
    grid: &[TrainConfig],
) -> Result<GridSearchResult, LogRegError> {
    if grid.is_empty() {
        return Err(LogRegError::EmptyGrid);
    }
    let (vx, vy) = validation_data;
    if !vy.iter().any(|l| l.is_toxic()) || vy.iter().all(|l| l.is_toxic()) {
        return Err(LogRegError::SingleClassValidation);
    }
    let rows: Vec<GridRow> = grid
        .par_iter()
        .map(|cfg| {
            let scored = train(train_data.0, train_data.1, cfg).and_then(|out| {
                let scores = out.model.predict_many(vx)?;
                roc_auc_labels(vy, &scores).map_err(|_| LogRegError::SingleClassValidation)
            });
            match scored {
                Ok(auc) => GridRow {
                    config: cfg.clone(),
                    validation_auc: Some(auc),
                    error: None,
                },
                Err(e) => GridRow {
                    config: cfg.clone(),
                    validation_auc: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (i, row) in rows.iter().enumerate() {
        if let Some(auc) = row.validation_auc {
            if best.is_none_or(|(_, b)| auc > b) {
                best = Some((i, auc));
            }
        }
    }
    match best {
        Some((best_index, _)) => Ok(GridSearchResult {
            best: rows[best_index].config.clone(),
            best_index,
            rows,
        }),
        None => Err(LogRegError::AllConfigsFailed(
            rows[0].error.clone().unwrap_or_default(),
        )),
    }
}
