//! Linear fusion of the three normalized features and weight training.
//!
//! An area's score is `b1 * sim' + b2 * citing' + b3 * cited'` and a paper
//! goes to the highest-scoring area. The weights are fitted by ordinary
//! least squares: every labeled paper contributes one design row per area
//! with target 1 for its gold area and 0 elsewhere, so the fit minimizes the
//! squared Euclidean distance between fused score vectors and one-hot
//! class vectors.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CitationGraph, Paper};
use crate::error::{Error, Result};
use crate::features::{AreaFeatureVector, Feature, FeatureExtractor};
use crate::index::SeedIndex;

/// Relative singular-value cutoff below which the Gram matrix is treated
/// as singular.
const SINGULAR_RCOND: f64 = 1e-12;

/// Trained fusion weights plus the configuration they were trained under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionModel {
    pub beta: [f64; 3],
    pub trained_on: usize,
    pub config_fingerprint: String,
    pub areas: Vec<String>,
}

impl FusionModel {
    pub fn new(beta: [f64; 3], trained_on: usize, config_fingerprint: String, areas: Vec<String>) -> Result<Self> {
        let model = FusionModel { beta, trained_on, config_fingerprint, areas };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite fusion weight in {:?}", self.beta)));
        }
        Ok(())
    }

    pub fn check_fingerprint(&self, runtime: &str) -> Result<()> {
        if self.config_fingerprint != runtime {
            return Err(Error::FingerprintMismatch {
                model: self.config_fingerprint.clone(),
                runtime: runtime.to_string(),
            });
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: FusionModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|source| Error::File { path: path.to_path_buf(), source })
    }
}

/// Per-area fused scores.
pub fn fuse(features: &AreaFeatureVector, beta: [f64; 3]) -> Vec<f64> {
    (0..features.area_count())
        .map(|k| beta[0] * features.sim_norm[k] + beta[1] * features.citing_norm[k] + beta[2] * features.cited_norm[k])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Classified {
        area: usize,
        tie_broken: bool,
    },
    /// Every weighted feature was all-zero for this paper.
    Unclassifiable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub scores: Vec<f64>,
    pub outcome: Outcome,
}

impl ClassificationResult {
    pub fn predicted(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Classified { area, .. } => Some(area),
            Outcome::Unclassifiable => None,
        }
    }

    pub fn tie_broken(&self) -> bool {
        matches!(self.outcome, Outcome::Classified { tie_broken: true, .. })
    }

    pub fn best_score(&self) -> Option<f64> {
        self.predicted().map(|a| self.scores[a])
    }
}

/// Index of the maximum score, lowest index on ties, and whether a tie
/// occurred at the maximum.
pub fn argmax(scores: &[f64]) -> Option<(usize, bool)> {
    let mut best: Option<(usize, f64)> = None;
    let mut tie = false;
    for (k, &s) in scores.iter().enumerate() {
        match best {
            None => best = Some((k, s)),
            Some((_, b)) if s > b => {
                best = Some((k, s));
                tie = false;
            }
            Some((_, b)) if s == b => tie = true,
            _ => {}
        }
    }
    best.map(|(k, _)| (k, tie))
}

/// Scores every area and picks the winner. A paper is unclassifiable when
/// each feature carrying a nonzero weight is degenerate.
pub fn decide(features: &AreaFeatureVector, beta: [f64; 3]) -> ClassificationResult {
    let scores = fuse(features, beta);
    let has_evidence = Feature::ALL.iter().any(|&f| beta[f.position()] != 0.0 && !features.is_degenerate(f));
    let outcome = match argmax(&scores) {
        Some((area, tie_broken)) if has_evidence => Outcome::Classified { area, tie_broken },
        _ => Outcome::Unclassifiable,
    };
    ClassificationResult { scores, outcome }
}

/// Classifies papers against an index, a citation graph and a model whose
/// fingerprint matches the index configuration.
pub struct Classifier<'a> {
    extractor: FeatureExtractor<'a>,
    model: &'a FusionModel,
}

impl<'a> Classifier<'a> {
    pub fn new(index: &'a SeedIndex, graph: &'a CitationGraph, model: &'a FusionModel) -> Result<Self> {
        model.check_fingerprint(&index.fingerprint())?;
        Ok(Self { extractor: FeatureExtractor::new(index, graph), model })
    }

    pub fn model(&self) -> &FusionModel {
        self.model
    }

    pub fn features(&self, paper: &Paper) -> AreaFeatureVector {
        self.extractor.extract(paper)
    }

    pub fn fuse(&self, features: &AreaFeatureVector) -> Vec<f64> {
        fuse(features, self.model.beta)
    }

    pub fn classify(&self, paper: &Paper) -> ClassificationResult {
        decide(&self.extractor.extract(paper), self.model.beta)
    }

    /// Classifies in parallel; results are in input order.
    pub fn classify_batch(&self, papers: &[Paper]) -> Vec<ClassificationResult> {
        papers.par_iter().map(|p| self.classify(p)).collect()
    }
}

/// Solution of a stacked least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresFit {
    pub beta: [f64; 3],
    /// The Gram matrix of the nonzero columns was singular and the
    /// minimum-norm solution was returned.
    pub rank_deficient: bool,
}

/// Accumulates the 3×3 normal equations for `y ≈ x · beta`.
#[derive(Debug, Clone, Default)]
pub struct NormalEquations {
    gram: [[f64; 3]; 3],
    moment: [f64; 3],
    rows: usize,
}

impl NormalEquations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: [f64; 3], y: f64) {
        for i in 0..3 {
            for j in 0..3 {
                self.gram[i][j] += x[i] * x[j];
            }
            self.moment[i] += x[i] * y;
        }
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn gram(&self) -> [[f64; 3]; 3] {
        self.gram
    }

    /// Solves the normal equations over the columns that are not identically
    /// zero; zero columns get weight 0. Falls back to the pseudo-inverse when
    /// the remaining Gram matrix is singular.
    pub fn solve(&self) -> Result<LeastSquaresFit> {
        let active: Vec<usize> = (0..3).filter(|&j| self.gram[j][j] > 0.0).collect();
        if active.is_empty() {
            return Err(Error::DegenerateTraining);
        }
        let m = active.len();
        if m == 1 {
            let j = active[0];
            let mut beta = [0.0; 3];
            beta[j] = self.moment[j] / self.gram[j][j];
            return Ok(LeastSquaresFit { beta, rank_deficient: false });
        }
        let g = DMatrix::from_fn(m, m, |i, j| self.gram[active[i]][active[j]]);
        let r = DVector::from_fn(m, |i, _| self.moment[active[i]]);

        let sv = g.clone().singular_values();
        let (max_sv, min_sv) = (sv.max(), sv.min());
        let singular = min_sv.is_nan() || min_sv <= max_sv * SINGULAR_RCOND;

        let solution = if singular {
            let pinv = g
                .pseudo_inverse(max_sv * SINGULAR_RCOND)
                .map_err(|e| Error::InvalidParams(format!("pseudo-inverse failed: {e}")))?;
            pinv * r
        } else {
            match g.clone().cholesky() {
                Some(chol) => chol.solve(&r),
                None => g.lu().solve(&r).ok_or(Error::DegenerateTraining)?,
            }
        };

        let mut beta = [0.0; 3];
        for (i, &j) in active.iter().enumerate() {
            beta[j] = solution[i];
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::DegenerateTraining);
        }
        Ok(LeastSquaresFit { beta, rank_deficient: singular })
    }
}

/// Result of fitting fusion weights to labeled papers.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedWeights {
    pub beta: [f64; 3],
    pub trained_on: usize,
    pub rank_deficient: bool,
}

impl TrainedWeights {
    pub fn into_model(self, config_fingerprint: String, areas: Vec<String>) -> Result<FusionModel> {
        FusionModel::new(self.beta, self.trained_on, config_fingerprint, areas)
    }
}

/// Fits the fusion weights against one-hot gold-area targets.
pub fn train_weights<'a, I>(rows: I) -> Result<TrainedWeights>
where
    I: IntoIterator<Item = (&'a AreaFeatureVector, usize)>,
{
    let mut eq = NormalEquations::new();
    let mut instances = 0;
    let mut informative = 0;
    for (features, gold) in rows {
        instances += 1;
        if !features.degenerate.iter().all(|&d| d) {
            informative += 1;
        }
        for k in 0..features.area_count() {
            eq.push(features.row(k), if k == gold { 1.0 } else { 0.0 });
        }
    }
    if instances == 0 {
        return Err(Error::NoTrainingData);
    }
    if informative == 0 {
        return Err(Error::DegenerateTraining);
    }
    let fit = eq.solve()?;
    if fit.rank_deficient {
        log::warn!("fusion Gram matrix is singular; using the minimum-norm solution");
    }
    Ok(TrainedWeights { beta: fit.beta, trained_on: instances, rank_deficient: fit.rank_deficient })
}
