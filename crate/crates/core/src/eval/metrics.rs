use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold papers of this area among the evaluated ones.
    pub support: usize,
}

/// Classification quality over one set of predictions.
///
/// `confusion[g][p]` counts papers with gold area `g` predicted as `p`.
/// Unclassifiable papers are left out of the matrix, counted separately,
/// and scored as wrong.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub evaluated: usize,
    pub accuracy: f64,
    pub macro_f: f64,
    pub per_area: Vec<AreaMetrics>,
    pub confusion: Vec<Vec<u64>>,
    pub unclassifiable_count: usize,
}

impl EvalReport {
    pub fn correct(&self) -> u64 {
        (0..self.confusion.len()).map(|k| self.confusion[k][k]).sum()
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores predictions (`None` = unclassifiable) against gold labels.
///
/// Macro F is the unweighted mean of per-area F1 over the areas that occur
/// in the gold labels or the predictions of this evaluation.
pub fn score_predictions<'a, I>(gold: &HashMap<String, usize>, predicted: I, n_areas: usize) -> Result<EvalReport>
where
    I: IntoIterator<Item = (&'a str, Option<usize>)>,
{
    let mut confusion = vec![vec![0u64; n_areas]; n_areas];
    let mut gold_counts = vec![0u64; n_areas];
    let mut unclassifiable = 0;
    let mut evaluated = 0;

    for (id, pred) in predicted {
        let g = *gold.get(id).ok_or_else(|| Error::UnknownGoldId(id.to_string()))?;
        if g >= n_areas {
            return Err(Error::UnknownArea(format!("gold area index {g} for `{id}`")));
        }
        evaluated += 1;
        gold_counts[g] += 1;
        match pred {
            Some(p) if p < n_areas => confusion[g][p] += 1,
            Some(p) => return Err(Error::UnknownArea(format!("predicted area index {p} for `{id}`"))),
            None => unclassifiable += 1,
        }
    }

    let mut per_area = Vec::with_capacity(n_areas);
    let mut f_sum = 0.0;
    let mut present = 0;
    for k in 0..n_areas {
        let tp = confusion[k][k];
        let predicted_k: u64 = confusion.iter().map(|row| row[k]).sum();
        let precision = ratio(tp, predicted_k);
        let recall = ratio(tp, gold_counts[k]);
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        if gold_counts[k] > 0 || predicted_k > 0 {
            f_sum += f1;
            present += 1;
        }
        per_area.push(AreaMetrics { precision, recall, f1, support: gold_counts[k] as usize });
    }

    let correct: u64 = (0..n_areas).map(|k| confusion[k][k]).sum();
    Ok(EvalReport {
        evaluated,
        accuracy: ratio(correct, evaluated as u64),
        macro_f: if present == 0 { 0.0 } else { f_sum / present as f64 },
        per_area,
        confusion,
        unclassifiable_count: unclassifiable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gold(pairs: &[(&str, usize)]) -> HashMap<String, usize> {
        pairs.iter().map(|(i, a)| (i.to_string(), *a)).collect()
    }

    #[test]
    fn unknown_gold_id_is_fatal() {
        let g = gold(&[("a", 0)]);
        assert!(matches!(score_predictions(&g, [("zz", Some(0))], 2), Err(Error::UnknownGoldId(_))));
    }

    #[test]
    fn unclassifiable_counts_against_accuracy_and_recall() {
        let g = gold(&[("a", 0), ("b", 0)]);
        let r = score_predictions(&g, [("a", Some(0)), ("b", None)], 2).unwrap();
        assert_eq!(r.accuracy, 0.5);
        assert_eq!(r.unclassifiable_count, 1);
        assert_eq!(r.per_area[0].precision, 1.0);
        assert_eq!(r.per_area[0].recall, 0.5);
        let total: u64 = r.confusion.iter().flatten().sum();
        assert_eq!(total as usize + r.unclassifiable_count, r.evaluated);
    }
}
