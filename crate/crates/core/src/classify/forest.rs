//! Random forest over the CART builder.
//!
//! Each tree trains on a bootstrap resample (n draws with replacement) and
//! samples a fresh candidate feature subset at every split. Tree t derives
//! its generator from (seed, stream = t), so training is reproducible and
//! schedule-independent: trees may be built concurrently without changing
//! the result. With bootstrap disabled and the subset covering all
//! features, every tree degenerates to the plain decision tree, which
//! pins the forest to the tree implementation in tests.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tree::{self, TreeModel, TreeNode};
use super::{DatasetRow, TrainError};
use crate::label::Label;

/// Forest hyperparameters. The defaults are the conventional ones: 100
/// trees, bootstrap on, and ⌊√63⌋ = 8 candidate features per split.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForestParams {
    pub trees: usize,
    pub bootstrap: bool,
    pub features_per_split: usize,
}

impl Default for ForestParams {
    fn default() -> ForestParams {
        ForestParams {
            trees: 100,
            bootstrap: true,
            features_per_split: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForestModel {
    params: ForestParams,
    seed: u64,
    members: Vec<TreeModel>,
}

pub(super) fn train(
    params: &ForestParams,
    rows: &[DatasetRow],
    seed: u64,
) -> Result<ForestModel, TrainError> {
    if params.trees == 0 {
        return Err(TrainError::InvalidHyperparameter(String::from(
            "forest requires at least one tree",
        )));
    }
    if params.features_per_split == 0 {
        return Err(TrainError::InvalidHyperparameter(String::from(
            "forest requires at least one candidate feature per split",
        )));
    }
    let features: Vec<&[f64]> = rows.iter().map(|r| r.features.as_slice()).collect();
    let labels: Vec<Label> = rows.iter().map(|r| r.label).collect();
    let dim = features[0].len();
    let n = rows.len();

    let members = (0..params.trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let sample: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut nodes = Vec::new();
            grow_subsampled(
                &features,
                &labels,
                sample,
                dim,
                params.features_per_split,
                &mut rng,
                &mut nodes,
            );
            TreeModel::from_arena(nodes, dim)
        })
        .collect();

    Ok(ForestModel {
        params: params.clone(),
        seed,
        members,
    })
}

/// Recursive growth with per-node feature subsampling. Candidates are
/// drawn without replacement and sorted ascending, so a subset covering
/// every feature scans them in 0..dim order exactly like the plain tree.
fn grow_subsampled(
    features: &[&[f64]],
    labels: &[Label],
    rows: Vec<usize>,
    dim: usize,
    per_split: usize,
    rng: &mut ChaCha8Rng,
    nodes: &mut Vec<TreeNode>,
) -> usize {
    let n = rows.len();
    let fakes = rows.iter().filter(|&&r| labels[r] == Label::Fake).count();
    if fakes == 0 || fakes == n || n < 2 {
        nodes.push(TreeNode::Leaf {
            fake_fraction: fakes as f64 / n as f64,
            samples: n,
        });
        return nodes.len() - 1;
    }

    // Partial Fisher-Yates draw of m distinct features.
    let m = per_split.min(dim);
    let mut pool: Vec<usize> = (0..dim).collect();
    for i in 0..m {
        let j = rng.random_range(i..dim);
        pool.swap(i, j);
    }
    pool.truncate(m);
    pool.sort_unstable();

    match tree::best_split(features, labels, &rows, &pool) {
        None => {
            nodes.push(TreeNode::Leaf {
                fake_fraction: fakes as f64 / n as f64,
                samples: n,
            });
            nodes.len() - 1
        }
        Some((feature, threshold)) => {
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                .into_iter()
                .partition(|&r| features[r][feature] <= threshold);
            let slot = nodes.len();
            nodes.push(TreeNode::Leaf {
                fake_fraction: 0.0,
                samples: 0,
            });
            let left =
                grow_subsampled(features, labels, left_rows, dim, per_split, rng, nodes);
            let right =
                grow_subsampled(features, labels, right_rows, dim, per_split, rng, nodes);
            nodes[slot] = TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            };
            slot
        }
    }
}

impl ForestModel {
    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn members(&self) -> &[TreeModel] {
        &self.members
    }

    pub fn feature_dim(&self) -> usize {
        self.members[0].feature_dim()
    }

    /// Mean of the member trees' leaf fractions.
    pub fn score(&self, query: &[f64]) -> f64 {
        let sum: f64 = self.members.iter().map(|t| t.score(query)).sum();
        sum / self.members.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::testutil::separated_rows;
    use crate::classify::{score, train as train_any, ClassifierSpec, TrainedModel};
    use alloc::vec;

    #[test]
    fn forest_is_deterministic_per_seed() {
        let rows = separated_rows(15, 6);
        let params = ForestParams {
            trees: 20,
            ..ForestParams::default()
        };
        let a = train(&params, &rows, 99).unwrap();
        let b = train(&params, &rows, 99).unwrap();
        assert_eq!(a, b);
        let c = train(&params, &rows, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_tree_without_bootstrap_equals_the_plain_tree() {
        let rows = separated_rows(12, 5);
        let params = ForestParams {
            trees: 1,
            bootstrap: false,
            features_per_split: 5,
        };
        let forest = train(&params, &rows, 7).unwrap();
        let plain = match train_any(&ClassifierSpec::DecisionTree, &rows, 7).unwrap() {
            TrainedModel::DecisionTree(t) => t,
            other => panic!("unexpected model {other:?}"),
        };
        assert_eq!(forest.members()[0], plain);
        for r in rows.iter() {
            assert_eq!(forest.score(&r.features), plain.score(&r.features));
        }
    }

    #[test]
    fn forest_separates_the_easy_fixture() {
        let rows = separated_rows(20, 8);
        let model = train_any(
            &ClassifierSpec::RandomForest(ForestParams::default()),
            &rows,
            3,
        )
        .unwrap();
        let mut fake_probe = vec![0.25; 8];
        fake_probe[0] = 10.4;
        let mut real_probe = vec![0.25; 8];
        real_probe[0] = 0.7;
        assert!(score(&model, &fake_probe).unwrap() > 0.9);
        assert!(score(&model, &real_probe).unwrap() < 0.1);
    }

    #[test]
    fn rejects_zero_trees_and_zero_features() {
        let rows = separated_rows(5, 3);
        let no_trees = ForestParams {
            trees: 0,
            ..ForestParams::default()
        };
        assert!(matches!(
            train(&no_trees, &rows, 0),
            Err(TrainError::InvalidHyperparameter(_))
        ));
        let no_features = ForestParams {
            features_per_split: 0,
            ..ForestParams::default()
        };
        assert!(matches!(
            train(&no_features, &rows, 0),
            Err(TrainError::InvalidHyperparameter(_))
        ));
    }

    #[test]
    fn stream_per_tree_varies_the_members() {
        let rows = separated_rows(15, 6);
        let params = ForestParams {
            trees: 8,
            ..ForestParams::default()
        };
        let forest = train(&params, &rows, 5).unwrap();
        // Bootstrap resamples differ across streams, so at least two trees
        // must differ structurally.
        let first = &forest.members()[0];
        assert!(forest.members().iter().any(|t| t != first));
    }
}
