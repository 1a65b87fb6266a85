//! k-nearest-neighbors on raw β features.
//!
//! Distances are plain Euclidean: β magnitudes are commensurate across
//! coefficients, so no per-feature normalization is applied. Distance ties
//! are broken by lower training-row index, which makes the neighbor set a
//! pure function of the training order.

use alloc::vec::Vec;

use super::{DatasetRow, ModelError, TrainError};
use crate::label::Label;

/// The memorized training set of a lazy k-NN learner.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KnnModel {
    k: usize,
    features: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

pub(super) fn train(k: usize, rows: &[DatasetRow]) -> Result<KnnModel, TrainError> {
    if k == 0 {
        return Err(TrainError::InvalidHyperparameter(alloc::string::String::from(
            "knn requires k >= 1",
        )));
    }
    Ok(KnnModel {
        k,
        features: rows.iter().map(|r| r.features.clone()).collect(),
        labels: rows.iter().map(|r| r.label).collect(),
    })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn feature_dim(&self) -> usize {
        self.features.first().map_or(0, |f| f.len())
    }

    /// Training-row indices of the `min(k, n)` nearest rows, nearest first.
    pub fn neighbor_indices(&self, query: &[f64]) -> Result<Vec<usize>, ModelError> {
        if query.len() != self.feature_dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.feature_dim(),
                got: query.len(),
            });
        }
        let mut order: Vec<usize> = (0..self.features.len()).collect();
        let dist: Vec<f64> = self
            .features
            .iter()
            .map(|f| squared_distance(f, query))
            .collect();
        order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
        order.truncate(self.k.min(self.features.len()));
        Ok(order)
    }

    /// Fraction of the k nearest training rows labeled fake.
    pub fn score(&self, query: &[f64]) -> f64 {
        let neighbors = self
            .neighbor_indices(query)
            .expect("dimension checked by caller");
        let fake = neighbors
            .iter()
            .filter(|&&i| self.labels[i] == Label::Fake)
            .count();
        fake as f64 / neighbors.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rows_from(points: &[(f64, f64, Label)]) -> Vec<DatasetRow> {
        points
            .iter()
            .enumerate()
            .map(|(i, &(x, y, label))| DatasetRow {
                video_id: format!("v{i}"),
                label,
                features: vec![x, y],
            })
            .collect()
    }

    #[test]
    fn unanimous_fake_neighbors_score_one() {
        let rows = rows_from(&[
            (0.0, 0.0, Label::Fake),
            (0.1, 0.0, Label::Fake),
            (0.0, 0.1, Label::Fake),
            (50.0, 50.0, Label::Real),
            (51.0, 50.0, Label::Real),
        ]);
        let model = train(3, &rows).unwrap();
        assert_eq!(model.score(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn mixed_neighbors_score_the_vote_fraction() {
        let rows = rows_from(&[
            (0.0, 0.0, Label::Real),
            (0.1, 0.0, Label::Real),
            (0.0, 0.1, Label::Fake),
            (50.0, 50.0, Label::Fake),
        ]);
        let model = train(3, &rows).unwrap();
        let s = model.score(&[0.0, 0.0]);
        assert_eq!(s, 1.0 / 3.0);
    }

    #[test]
    fn distance_ties_prefer_lower_row_index() {
        // Four equidistant points around the query; k = 2 must pick rows 0
        // and 1.
        let rows = rows_from(&[
            (1.0, 0.0, Label::Fake),
            (-1.0, 0.0, Label::Real),
            (0.0, 1.0, Label::Real),
            (0.0, -1.0, Label::Real),
        ]);
        let model = train(2, &rows).unwrap();
        assert_eq!(model.neighbor_indices(&[0.0, 0.0]).unwrap(), vec![0, 1]);
        assert_eq!(model.score(&[0.0, 0.0]), 0.5);
    }

    #[test]
    fn k_larger_than_training_set_clamps() {
        let rows = rows_from(&[(0.0, 0.0, Label::Fake), (1.0, 0.0, Label::Real)]);
        let model = train(15, &rows).unwrap();
        assert_eq!(model.neighbor_indices(&[0.0, 0.0]).unwrap().len(), 2);
        assert_eq!(model.score(&[0.0, 0.0]), 0.5);
    }

    #[test]
    fn neighbor_sets_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let rows: Vec<DatasetRow> = (0..50)
            .map(|i| DatasetRow {
                video_id: format!("v{i}"),
                label: if rng.random::<bool>() {
                    Label::Fake
                } else {
                    Label::Real
                },
                features: (0..5).map(|_| rng.random::<f64>() * 4.0).collect(),
            })
            .collect();
        let model = train(7, &rows).unwrap();
        for _ in 0..20 {
            let query: Vec<f64> = (0..5).map(|_| rng.random::<f64>() * 4.0).collect();
            // Exhaustive all-pairs sort, independent of the model internals.
            let mut pairs: Vec<(f64, usize)> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let d2: f64 = r
                        .features
                        .iter()
                        .zip(query.iter())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    (d2, i)
                })
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let expect: Vec<usize> = pairs.iter().take(7).map(|p| p.1).collect();
            assert_eq!(model.neighbor_indices(&query).unwrap(), expect);
        }
    }

    #[test]
    fn scores_live_on_the_k_lattice() {
        let rows = rows_from(&[
            (0.0, 0.0, Label::Fake),
            (1.0, 0.0, Label::Real),
            (0.0, 1.0, Label::Fake),
            (2.0, 2.0, Label::Real),
            (3.0, 1.0, Label::Fake),
        ]);
        let model = train(5, &rows).unwrap();
        let s = model.score(&[0.5, 0.5]);
        let lattice: Vec<f64> = (0..=5).map(|i| i as f64 / 5.0).collect();
        assert!(lattice.contains(&s));
    }

    #[test]
    fn rejects_k_zero() {
        let rows = rows_from(&[(0.0, 0.0, Label::Fake), (1.0, 0.0, Label::Real)]);
        assert!(matches!(
            train(0, &rows),
            Err(TrainError::InvalidHyperparameter(_))
        ));
    }
}
