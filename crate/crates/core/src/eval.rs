//! Exact AUC and the classifier × region evaluation grid.
//!
//! AUC is computed as the Mann-Whitney rank statistic: over all
//! (fake, real) pairs, the fraction where the fake outscores the real,
//! counting ties as one half. Average ranks make this exact under ties in
//! O(n log n); the O(n²) pair count is kept as a test oracle only.

use alloc::string::String;
use alloc::vec::Vec;

use crate::classify::{select_model, ClassifierSpec, Dataset, SelectError, SplitAssignment};
use crate::label::Label;
use crate::region::RegionKind;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    /// AUC needs at least one fake and one real prediction.
    #[error("predictions contain a single class; AUC is undefined")]
    SingleClassTest,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("no region datasets were supplied")]
    NoRegions,
    #[error("classifier grid is empty")]
    EmptyGrid,
    #[error("cell ({classifier}, {region}): {source}")]
    Selection {
        classifier: String,
        region: RegionKind,
        source: SelectError,
    },
    #[error("cell ({classifier}, {region}) test split: {source}")]
    Test {
        classifier: String,
        region: RegionKind,
        source: EvalError,
    },
}

/// One scored test example.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoredPrediction {
    pub video_id: String,
    /// In [0, 1]; larger means more likely fake.
    pub score: f64,
    pub true_label: Label,
}

/// Area under the ROC curve of `predictions`, fake as the positive class.
///
/// Equals the probability that a uniformly random fake outranks a
/// uniformly random real, ties counted half. Exact for score sets of
/// evaluation size: rank sums stay within the integer-exact range of f64.
pub fn auc(predictions: &[ScoredPrediction]) -> Result<f64, EvalError> {
    let n = predictions.len();
    let n_fake = predictions
        .iter()
        .filter(|p| p.true_label == Label::Fake)
        .count();
    let n_real = n - n_fake;
    if n_fake == 0 || n_real == 0 {
        return Err(EvalError::SingleClassTest);
    }
    debug_assert!(predictions.iter().all(|p| p.score.is_finite()));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| predictions[a].score.total_cmp(&predictions[b].score));

    // Sum of average ranks (1-based) over the fake predictions.
    let mut rank_sum_fake = 0.0f64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && predictions[order[j]].score == predictions[order[i]].score {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if predictions[idx].true_label == Label::Fake {
                rank_sum_fake += avg_rank;
            }
        }
        i = j;
    }
    let u = rank_sum_fake - (n_fake * (n_fake + 1)) as f64 / 2.0;
    Ok(u / (n_fake as f64 * n_real as f64))
}

/// One grid cell. `auc` is `None` when the cell could not be evaluated
/// (no descriptors for the region); absence is reported, never imputed
/// as zero.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalCell {
    pub classifier: String,
    pub region: RegionKind,
    pub auc: Option<f64>,
    pub n_test: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitSizes {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

/// The full evaluation grid plus the metadata needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalGrid {
    pub cells: Vec<EvalCell>,
    pub seed: u64,
    pub split_sizes: SplitSizes,
    /// Optional corpus label for sub-grid reports over dataset slices.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub corpus_tag: Option<String>,
}

impl EvalGrid {
    pub fn cell(&self, classifier: &str, region: RegionKind) -> Option<&EvalCell> {
        self.cells
            .iter()
            .find(|c| c.classifier == classifier && c.region == region)
    }

    /// Classifier names in first-appearance (grid row) order.
    pub fn classifier_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for cell in &self.cells {
            if !names.contains(&cell.classifier.as_str()) {
                names.push(&cell.classifier);
            }
        }
        names
    }

    /// The evaluated cell with the highest AUC, if any cell is present.
    pub fn best_cell(&self) -> Option<&EvalCell> {
        self.cells
            .iter()
            .filter(|c| c.auc.is_some())
            .max_by(|a, b| a.auc.unwrap().total_cmp(&b.auc.unwrap()))
    }
}

/// One grid row: a report name plus the hyperparameter settings competing
/// for it. A single setting is trained directly; multiple settings are
/// ranked on the validation split by [`select_model`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierGridEntry {
    pub name: String,
    pub settings: Vec<ClassifierSpec>,
}

impl ClassifierGridEntry {
    pub fn single(spec: ClassifierSpec) -> ClassifierGridEntry {
        ClassifierGridEntry {
            name: spec.name(),
            settings: alloc::vec![spec],
        }
    }

    /// The default bench, one row per hyperparameter setting: six k-NN
    /// rows, LDA, decision tree, and random forest.
    pub fn per_setting_bench() -> Vec<ClassifierGridEntry> {
        let mut grid: Vec<ClassifierGridEntry> = ClassifierSpec::KNN_KS
            .iter()
            .map(|&k| ClassifierGridEntry::single(ClassifierSpec::Knn { k }))
            .collect();
        grid.push(ClassifierGridEntry::single(ClassifierSpec::Lda));
        grid.push(ClassifierGridEntry::single(ClassifierSpec::DecisionTree));
        grid.push(ClassifierGridEntry::single(ClassifierSpec::RandomForest(
            Default::default(),
        )));
        grid
    }

    /// Family layout: one "knn" row whose k is chosen on validation, plus
    /// the three single-setting rows.
    pub fn family_bench() -> Vec<ClassifierGridEntry> {
        let mut grid = Vec::new();
        grid.push(ClassifierGridEntry {
            name: String::from("knn"),
            settings: ClassifierSpec::KNN_KS
                .iter()
                .map(|&k| ClassifierSpec::Knn { k })
                .collect(),
        });
        grid.push(ClassifierGridEntry::single(ClassifierSpec::Lda));
        grid.push(ClassifierGridEntry::single(ClassifierSpec::DecisionTree));
        grid.push(ClassifierGridEntry::single(ClassifierSpec::RandomForest(
            Default::default(),
        )));
        grid
    }
}

/// Evaluates every grid entry on every region of the canonical region
/// order. Regions without a dataset yield absent cells; regions with data
/// run selection on train/validation and score the test split once.
/// Test labels are never read before that final scoring.
pub fn evaluate_grid(
    datasets: &[Dataset],
    grid: &[ClassifierGridEntry],
    split: &SplitAssignment,
) -> Result<EvalGrid, GridError> {
    if datasets.is_empty() {
        return Err(GridError::NoRegions);
    }
    if grid.is_empty() || grid.iter().any(|e| e.settings.is_empty()) {
        return Err(GridError::EmptyGrid);
    }
    let (train_n, val_n, test_n) = split.sizes();
    let mut cells = Vec::with_capacity(grid.len() * RegionKind::ALL.len());
    for entry in grid {
        for region in RegionKind::ALL {
            let dataset = datasets.iter().find(|d| d.region() == region);
            let cell = match dataset {
                None => EvalCell {
                    classifier: entry.name.clone(),
                    region,
                    auc: None,
                    n_test: 0,
                },
                Some(ds) => evaluate_cell(entry, ds, split)?,
            };
            cells.push(cell);
        }
    }
    Ok(EvalGrid {
        cells,
        seed: split.seed,
        split_sizes: SplitSizes {
            train: train_n,
            val: val_n,
            test: test_n,
        },
        corpus_tag: None,
    })
}

fn evaluate_cell(
    entry: &ClassifierGridEntry,
    dataset: &Dataset,
    split: &SplitAssignment,
) -> Result<EvalCell, GridError> {
    let train_rows = dataset.subset(&split.train_ids);
    let val_rows = dataset.subset(&split.val_ids);
    let test_rows = dataset.subset(&split.test_ids);

    let selection = select_model(
        &entry.settings,
        train_rows.rows(),
        val_rows.rows(),
        split.seed,
    )
    .map_err(|source| GridError::Selection {
        classifier: entry.name.clone(),
        region: dataset.region(),
        source,
    })?;

    let predictions: Vec<ScoredPrediction> = test_rows
        .rows()
        .iter()
        .map(|row| ScoredPrediction {
            video_id: row.video_id.clone(),
            score: crate::classify::score(&selection.model, &row.features)
                .expect("test rows share the dataset dimension"),
            true_label: row.label,
        })
        .collect();
    let cell_auc = auc(&predictions).map_err(|source| GridError::Test {
        classifier: entry.name.clone(),
        region: dataset.region(),
        source,
    })?;
    Ok(EvalCell {
        classifier: entry.name.clone(),
        region: dataset.region(),
        auc: Some(cell_auc),
        n_test: predictions.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{stratified_split, DatasetRow};
    use alloc::format;
    use alloc::vec;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn pred(score: f64, label: Label) -> ScoredPrediction {
        ScoredPrediction {
            video_id: String::new(),
            score,
            true_label: label,
        }
    }

    /// Exhaustive pairwise oracle: fake > real counts 1, tie counts 1/2.
    fn auc_pairwise(predictions: &[ScoredPrediction]) -> f64 {
        let fakes: Vec<f64> = predictions
            .iter()
            .filter(|p| p.true_label == Label::Fake)
            .map(|p| p.score)
            .collect();
        let reals: Vec<f64> = predictions
            .iter()
            .filter(|p| p.true_label == Label::Real)
            .map(|p| p.score)
            .collect();
        let mut total = 0.0;
        for &f in &fakes {
            for &r in &reals {
                total += if f > r {
                    1.0
                } else if f == r {
                    0.5
                } else {
                    0.0
                };
            }
        }
        total / (fakes.len() as f64 * reals.len() as f64)
    }

    #[test]
    fn perfect_ranking_is_one() {
        let mut p = vec![];
        for i in 0..10 {
            p.push(pred(0.8 + i as f64 * 0.01, Label::Fake));
            p.push(pred(0.1 + i as f64 * 0.01, Label::Real));
        }
        assert_eq!(auc(&p).unwrap(), 1.0);
        for q in p.iter_mut() {
            q.score = -q.score;
        }
        // Negated scores invert the ranking.
        assert_eq!(auc(&p).unwrap(), 0.0);
    }

    #[test]
    fn all_tied_scores_give_half() {
        let p: Vec<ScoredPrediction> = (0..20)
            .map(|i| {
                pred(
                    0.5,
                    if i % 2 == 0 { Label::Fake } else { Label::Real },
                )
            })
            .collect();
        assert_eq!(auc(&p).unwrap(), 0.5);
    }

    #[test]
    fn single_class_is_an_error() {
        let p = vec![pred(0.1, Label::Fake), pred(0.9, Label::Fake)];
        assert_eq!(auc(&p).unwrap_err(), EvalError::SingleClassTest);
        assert_eq!(auc(&[]).unwrap_err(), EvalError::SingleClassTest);
    }

    #[test]
    fn matches_the_pairwise_oracle_with_heavy_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xa0c);
        for round in 0..50 {
            let n = rng.random_range(2..=120);
            // Quantize scores to force many ties.
            let levels = rng.random_range(1..=6);
            let p: Vec<ScoredPrediction> = (0..n)
                .map(|_| {
                    pred(
                        (rng.random_range(0..=levels) as f64) / levels as f64,
                        if rng.random::<bool>() {
                            Label::Fake
                        } else {
                            Label::Real
                        },
                    )
                })
                .collect();
            match auc(&p) {
                Err(EvalError::SingleClassTest) => continue,
                Ok(fast) => {
                    let slow = auc_pairwise(&p);
                    assert!(
                        (fast - slow).abs() < 1e-12,
                        "round {round}: {fast} vs {slow}"
                    );
                }
            }
        }
    }

    fn synthetic_region(region: RegionKind, n_per_class: usize, gap: f64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9107 ^ region as u64);
        let mut rows = Vec::new();
        for i in 0..n_per_class {
            for (label, offset) in [(Label::Real, 0.0), (Label::Fake, gap)] {
                let features: Vec<f64> = (0..6)
                    .map(|_| rng.random::<f64>() + offset)
                    .collect();
                rows.push(DatasetRow {
                    video_id: format!("{label}_{i:03}"),
                    label,
                    features,
                });
            }
        }
        Dataset::new(region, rows).unwrap()
    }

    #[test]
    fn grid_covers_all_regions_with_absent_cells_for_missing_data() {
        let face = synthetic_region(RegionKind::Face, 20, 3.0);
        let split = stratified_split(&face, 4).unwrap();
        let grid = [ClassifierGridEntry::single(ClassifierSpec::Knn { k: 3 })];
        let result = evaluate_grid(&[face], &grid, &split).unwrap();

        assert_eq!(result.cells.len(), 7);
        let face_cell = result.cell("knn_3", RegionKind::Face).unwrap();
        assert!(face_cell.auc.is_some());
        assert_eq!(face_cell.n_test, 12);
        for region in RegionKind::ALL {
            if region != RegionKind::Face {
                let cell = result.cell("knn_3", region).unwrap();
                assert_eq!(cell.auc, None);
                assert_eq!(cell.n_test, 0);
            }
        }
        assert_eq!(result.split_sizes.train, 20);
        assert_eq!(result.split_sizes.val, 8);
        assert_eq!(result.split_sizes.test, 12);
    }

    #[test]
    fn separable_corpus_scores_high_everywhere() {
        let datasets: Vec<Dataset> = [RegionKind::Face, RegionKind::Eyes, RegionKind::Nose]
            .into_iter()
            .map(|r| synthetic_region(r, 25, 4.0))
            .collect();
        let split = stratified_split(&datasets[0], 1).unwrap();
        let grid = ClassifierGridEntry::per_setting_bench();
        let result = evaluate_grid(&datasets, &grid, &split).unwrap();
        assert_eq!(result.cells.len(), 9 * 7);
        for cell in result.cells.iter().filter(|c| c.auc.is_some()) {
            assert!(
                cell.auc.unwrap() >= 0.95,
                "{} on {} scored {:?}",
                cell.classifier,
                cell.region,
                cell.auc
            );
        }
        assert!(result.best_cell().is_some());
    }

    #[test]
    fn grid_is_deterministic() {
        let datasets = vec![synthetic_region(RegionKind::Mouth, 15, 2.0)];
        let split = stratified_split(&datasets[0], 9).unwrap();
        let grid = ClassifierGridEntry::family_bench();
        let a = evaluate_grid(&datasets, &grid, &split).unwrap();
        let b = evaluate_grid(&datasets, &grid, &split).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.classifier_names(), ["knn", "lda", "decision_tree", "random_forest"]);
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let ds = synthetic_region(RegionKind::Face, 12, 2.0);
        let split = stratified_split(&ds, 0).unwrap();
        assert_eq!(
            evaluate_grid(&[], &ClassifierGridEntry::per_setting_bench(), &split),
            Err(GridError::NoRegions)
        );
        assert_eq!(
            evaluate_grid(&[ds], &[], &split),
            Err(GridError::EmptyGrid)
        );
    }
}
