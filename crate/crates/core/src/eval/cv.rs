//! Stratified two-fold cross-validation and the feature-ablation grid.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{score_predictions, EvalReport};
use crate::corpus::AreaSet;
use crate::error::{Error, Result};
use crate::features::{AreaFeatureVector, FeatureMask};
use crate::fusion::{decide, train_weights};

pub const FOLDS: usize = 2;

/// A labeled paper with its precomputed features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub id: String,
    pub gold: usize,
    pub features: AreaFeatureVector,
}

/// Splits instances into two folds, stratified by gold area.
///
/// Within each area the instances are ordered by id and shuffled with a
/// generator seeded from `seed`; the first half (the larger half for odd
/// counts) goes to fold 0. Returned positions index into `labels` and are
/// ascending within each fold.
pub fn stratified_folds(labels: &[(&str, usize)], areas: &AreaSet, seed: u64) -> Result<[Vec<usize>; FOLDS]> {
    let mut by_area: Vec<Vec<usize>> = vec![Vec::new(); areas.len()];
    for (pos, &(_, gold)) in labels.iter().enumerate() {
        let bucket = by_area.get_mut(gold).ok_or_else(|| Error::UnknownArea(format!("area index {gold}")))?;
        bucket.push(pos);
    }
    for (area, members) in by_area.iter().enumerate() {
        if members.len() < 2 {
            return Err(Error::TooFewLabels { area: areas[area].id.clone(), count: members.len() });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: [Vec<usize>; FOLDS] = Default::default();
    for mut members in by_area {
        members.sort_by(|&a, &b| labels[a].0.cmp(labels[b].0));
        members.shuffle(&mut rng);
        let cut = members.len().div_ceil(2);
        folds[0].extend_from_slice(&members[..cut]);
        folds[1].extend_from_slice(&members[cut..]);
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    /// Fold whose instances trained the weights; the other fold is tested.
    pub train_fold: usize,
    pub beta: [f64; 3],
    pub trained_on: usize,
    pub rank_deficient: bool,
    pub test_ids: Vec<String>,
    pub predictions: Vec<Option<usize>>,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidationReport {
    pub mask: FeatureMask,
    pub seed: u64,
    /// Unweighted mean of the per-fold accuracies.
    pub accuracy: f64,
    /// Unweighted mean of the per-fold macro F-measures.
    pub macro_f: f64,
    pub folds: Vec<FoldReport>,
}

/// Two-fold cross-validation with per-fold weight training. Features
/// outside `mask` are zeroed before training and before classification.
pub fn cross_validate(
    instances: &[LabeledInstance],
    areas: &AreaSet,
    seed: u64,
    mask: FeatureMask,
) -> Result<CrossValidationReport> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let labels: Vec<(&str, usize)> = instances.iter().map(|i| (i.id.as_str(), i.gold)).collect();
    let folds = stratified_folds(&labels, areas, seed)?;
    let masked: Vec<AreaFeatureVector> = instances.iter().map(|i| i.features.masked(mask)).collect();
    let gold: HashMap<String, usize> = instances.iter().map(|i| (i.id.clone(), i.gold)).collect();

    let mut fold_reports = Vec::with_capacity(FOLDS);
    for train_fold in 0..FOLDS {
        let train = &folds[train_fold];
        let test = &folds[1 - train_fold];

        let (beta, trained_on, rank_deficient) =
            match train_weights(train.iter().map(|&i| (&masked[i], instances[i].gold))) {
                Ok(w) => (w.beta, w.trained_on, w.rank_deficient),
                Err(Error::DegenerateTraining) => {
                    log::warn!("mask `{mask}`: no usable training signal in fold {train_fold}; all weights zero");
                    ([0.0; 3], train.len(), true)
                }
                Err(e) => return Err(e),
            };

        let predictions: Vec<Option<usize>> = test.iter().map(|&i| decide(&masked[i], beta).predicted()).collect();
        let test_ids: Vec<String> = test.iter().map(|&i| instances[i].id.clone()).collect();
        let report = score_predictions(
            &gold,
            test_ids.iter().map(String::as_str).zip(predictions.iter().copied()),
            areas.len(),
        )?;
        fold_reports.push(FoldReport { train_fold, beta, trained_on, rank_deficient, test_ids, predictions, report });
    }

    let mean = |f: fn(&FoldReport) -> f64| fold_reports.iter().map(f).sum::<f64>() / fold_reports.len() as f64;
    Ok(CrossValidationReport {
        mask,
        seed,
        accuracy: mean(|r| r.report.accuracy),
        macro_f: mean(|r| r.report.macro_f),
        folds: fold_reports,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub seed: u64,
    pub rows: Vec<CrossValidationReport>,
}

impl AblationReport {
    pub fn row(&self, mask: FeatureMask) -> Option<&CrossValidationReport> {
        self.rows.iter().find(|r| r.mask == mask)
    }

    /// Aligned `Method / Accuracy / F-measure` table.
    pub fn to_table(&self) -> String {
        format_table(self.rows.iter())
    }
}

pub fn format_table<'a>(rows: impl Iterator<Item = &'a CrossValidationReport>) -> String {
    let rows: Vec<(String, f64, f64)> = rows.map(|r| (r.mask.to_string(), r.accuracy, r.macro_f)).collect();
    let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0).max("Method".len());
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>8}  {:>9}", "Method", "Accuracy", "F-measure");
    for (label, acc, f) in rows {
        let _ = writeln!(out, "{label:<width$}  {acc:>8.3}  {f:>9.3}");
    }
    out
}

/// Cross-validates every non-empty feature subset on the same folds.
pub fn ablation_grid(instances: &[LabeledInstance], areas: &AreaSet, seed: u64) -> Result<AblationReport> {
    let rows = FeatureMask::ablation_rows()
        .par_iter()
        .map(|&mask| cross_validate(instances, areas, seed, mask))
        .collect::<Result<Vec<_>>>()?;
    Ok(AblationReport { seed, rows })
}
