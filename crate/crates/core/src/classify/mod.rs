//! From-scratch classifier bench behind one train/score interface.
//!
//! The bench covers a classical lineup: the k-NN family
//! (k ∈ {3, 5, 7, 11, 13, 15}), two-class LDA, a CART decision tree, and a
//! random forest. Scores are calibrated to [0, 1] with larger meaning "more
//! likely fake" so they feed directly into rank-based AUC. All training is
//! deterministic given the explicit seed; nothing reads global randomness.

mod forest;
mod knn;
mod lda;
mod split;
mod tree;

pub use forest::{ForestModel, ForestParams};
pub use knn::KnnModel;
pub use lda::LdaModel;
pub use split::{stratified_split, SplitAssignment, SplitError};
pub use tree::{TreeModel, TreeNode};

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::beta::VideoDescriptor;
use crate::label::Label;
use crate::region::RegionKind;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DatasetError {
    #[error("dataset must contain at least one row")]
    Empty,
    #[error("feature vectors have inconsistent dimensions: {first} vs {offending}")]
    DimensionMismatch { first: usize, offending: usize },
    #[error("duplicate video_id {0:?}")]
    DuplicateVideoId(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TrainError {
    #[error("training requires at least 2 rows, got {got}")]
    TooFewRows { got: usize },
    #[error("training set contains a single class")]
    SingleClassTraining,
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("feature dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// One labeled feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub video_id: String,
    pub label: Label,
    pub features: Vec<f64>,
}

impl From<&VideoDescriptor> for DatasetRow {
    fn from(d: &VideoDescriptor) -> DatasetRow {
        DatasetRow {
            video_id: d.video_id.clone(),
            label: d.label,
            features: d.mean_betas.to_vec(),
        }
    }
}

/// The labeled feature table of one region.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    region: RegionKind,
    rows: Vec<DatasetRow>,
    feature_dim: usize,
}

impl Dataset {
    /// Validates uniform feature dimension and unique video ids.
    pub fn new(region: RegionKind, rows: Vec<DatasetRow>) -> Result<Dataset, DatasetError> {
        let first = match rows.first() {
            Some(row) => row.features.len(),
            None => return Err(DatasetError::Empty),
        };
        let mut seen = BTreeSet::new();
        for row in rows.iter() {
            if row.features.len() != first {
                return Err(DatasetError::DimensionMismatch {
                    first,
                    offending: row.features.len(),
                });
            }
            if !seen.insert(row.video_id.as_str()) {
                return Err(DatasetError::DuplicateVideoId(row.video_id.clone()));
            }
        }
        Ok(Dataset {
            region,
            rows,
            feature_dim: first,
        })
    }

    pub fn region(&self) -> RegionKind {
        self.region
    }

    pub fn rows(&self) -> &[DatasetRow] {
        &self.rows
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    /// Rows whose video_id appears in `ids` (sorted slice), original order
    /// preserved. The result may be empty; it keeps this dataset's
    /// dimension.
    pub fn subset(&self, ids: &[String]) -> Dataset {
        debug_assert!(ids.windows(2).all(|w| w[0] <= w[1]), "ids must be sorted");
        let rows = self
            .rows
            .iter()
            .filter(|r| ids.binary_search(&r.video_id).is_ok())
            .cloned()
            .collect();
        Dataset {
            region: self.region,
            rows,
            feature_dim: self.feature_dim,
        }
    }
}

/// A classifier kind plus its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ClassifierSpec {
    Knn { k: usize },
    Lda,
    DecisionTree,
    RandomForest(ForestParams),
}

impl ClassifierSpec {
    /// Neighbor counts evaluated by the default bench.
    pub const KNN_KS: [usize; 6] = [3, 5, 7, 11, 13, 15];

    /// Stable name used as the report row key, e.g. "knn_7".
    pub fn name(&self) -> String {
        match self {
            ClassifierSpec::Knn { k } => format!("knn_{k}"),
            ClassifierSpec::Lda => String::from("lda"),
            ClassifierSpec::DecisionTree => String::from("decision_tree"),
            ClassifierSpec::RandomForest(_) => String::from("random_forest"),
        }
    }
}

/// An immutable trained classifier.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum TrainedModel {
    Knn(KnnModel),
    Lda(LdaModel),
    DecisionTree(TreeModel),
    RandomForest(ForestModel),
}

impl TrainedModel {
    pub fn feature_dim(&self) -> usize {
        match self {
            TrainedModel::Knn(m) => m.feature_dim(),
            TrainedModel::Lda(m) => m.feature_dim(),
            TrainedModel::DecisionTree(m) => m.feature_dim(),
            TrainedModel::RandomForest(m) => m.feature_dim(),
        }
    }

    /// The spec this model was trained from.
    pub fn spec(&self) -> ClassifierSpec {
        match self {
            TrainedModel::Knn(m) => ClassifierSpec::Knn { k: m.k() },
            TrainedModel::Lda(_) => ClassifierSpec::Lda,
            TrainedModel::DecisionTree(_) => ClassifierSpec::DecisionTree,
            TrainedModel::RandomForest(m) => ClassifierSpec::RandomForest(m.params().clone()),
        }
    }
}

/// Trains `spec` on `rows`. Requires at least two rows spanning both
/// classes and uniform feature dimension. `seed` drives every stochastic
/// choice (currently only the forest's bootstrap and feature sampling);
/// identical inputs and seed give an identical model.
pub fn train(
    spec: &ClassifierSpec,
    rows: &[DatasetRow],
    seed: u64,
) -> Result<TrainedModel, TrainError> {
    if rows.len() < 2 {
        return Err(TrainError::TooFewRows { got: rows.len() });
    }
    let dim = rows[0].features.len();
    for row in rows {
        if row.features.len() != dim {
            return Err(TrainError::DimensionMismatch {
                expected: dim,
                got: row.features.len(),
            });
        }
    }
    let has_fake = rows.iter().any(|r| r.label == Label::Fake);
    let has_real = rows.iter().any(|r| r.label == Label::Real);
    if !(has_fake && has_real) {
        return Err(TrainError::SingleClassTraining);
    }
    match spec {
        ClassifierSpec::Knn { k } => Ok(TrainedModel::Knn(knn::train(*k, rows)?)),
        ClassifierSpec::Lda => Ok(TrainedModel::Lda(lda::train(rows)?)),
        ClassifierSpec::DecisionTree => Ok(TrainedModel::DecisionTree(tree::train(rows))),
        ClassifierSpec::RandomForest(params) => {
            Ok(TrainedModel::RandomForest(forest::train(params, rows, seed)?))
        }
    }
}

/// Scores one feature vector: the probability-like degree to which the
/// model considers it fake, in [0, 1].
pub fn score(model: &TrainedModel, features: &[f64]) -> Result<f64, ModelError> {
    if features.len() != model.feature_dim() {
        return Err(ModelError::DimensionMismatch {
            expected: model.feature_dim(),
            got: features.len(),
        });
    }
    let s = match model {
        TrainedModel::Knn(m) => m.score(features),
        TrainedModel::Lda(m) => m.score(features),
        TrainedModel::DecisionTree(m) => m.score(features),
        TrainedModel::RandomForest(m) => m.score(features),
    };
    debug_assert!((0.0..=1.0).contains(&s), "score {s} out of range");
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SelectError {
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error("validation split cannot rank settings: {0}")]
    Validation(crate::eval::EvalError),
}

/// Outcome of hyperparameter selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub model: TrainedModel,
    /// Index of the winning spec in the input grid.
    pub spec_index: usize,
    /// Validation AUC of the winner; `None` for singleton grids, which are
    /// returned without touching the validation split.
    pub validation_auc: Option<f64>,
}

/// Trains every spec in `grid` on `train_rows`, scores each on
/// `val_rows`, and returns the model with the highest validation AUC.
/// Ties go to the earlier grid entry. A singleton grid skips validation
/// scoring entirely.
pub fn select_model(
    grid: &[ClassifierSpec],
    train_rows: &[DatasetRow],
    val_rows: &[DatasetRow],
    seed: u64,
) -> Result<Selection, SelectError> {
    use crate::eval::{auc, ScoredPrediction};

    if grid.is_empty() {
        return Err(SelectError::EmptyGrid);
    }
    if grid.len() == 1 {
        return Ok(Selection {
            model: train(&grid[0], train_rows, seed)?,
            spec_index: 0,
            validation_auc: None,
        });
    }
    let mut best: Option<(f64, usize, TrainedModel)> = None;
    for (i, spec) in grid.iter().enumerate() {
        let model = train(spec, train_rows, seed)?;
        let predictions: Vec<ScoredPrediction> = val_rows
            .iter()
            .map(|row| {
                score(&model, &row.features).map(|s| ScoredPrediction {
                    video_id: row.video_id.clone(),
                    score: s,
                    true_label: row.label,
                })
            })
            .collect::<Result<_, _>>()
            .map_err(|e| match e {
                ModelError::DimensionMismatch { expected, got } => {
                    SelectError::Train(TrainError::DimensionMismatch { expected, got })
                }
            })?;
        let val_auc = auc(&predictions).map_err(SelectError::Validation)?;
        if best.as_ref().map_or(true, |(b, _, _)| val_auc > *b) {
            best = Some((val_auc, i, model));
        }
    }
    let (validation_auc, spec_index, model) = best.expect("grid is nonempty");
    Ok(Selection {
        model,
        spec_index,
        validation_auc: Some(validation_auc),
    })
}
