//! Stratified train/validation/test split.
//!
//! Within each class independently, video ids are sorted, shuffled by a
//! seeded generator (one stream per class), and cut at 50%/20%/30% using
//! integer largest-remainder rounding, so per-class proportions are exact
//! whenever the class size divides evenly and off by at most one video per
//! split otherwise.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::label::Label;

/// Split percentages, in cut order: train, validation, test.
pub const SPLIT_PERCENTS: [usize; 3] = [50, 20, 30];

/// Minimum videos per class for the split to be meaningful.
pub const MIN_VIDEOS_PER_CLASS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplitError {
    #[error("class {label} has {got} videos, need at least {MIN_VIDEOS_PER_CLASS}")]
    TooFewVideos { label: Label, got: usize },
}

/// A disjoint partition of the dataset's video ids. Each id list is sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitAssignment {
    pub train_ids: Vec<String>,
    pub val_ids: Vec<String>,
    pub test_ids: Vec<String>,
    pub seed: u64,
}

impl SplitAssignment {
    /// (train, val, test) sizes.
    pub fn sizes(&self) -> (usize, usize, usize) {
        (
            self.train_ids.len(),
            self.val_ids.len(),
            self.test_ids.len(),
        )
    }
}

/// Integer largest-remainder apportionment of `n` into the split
/// percentages. Remainder ties hand the extra video to the earlier split
/// (train before val before test).
fn cut_sizes(n: usize) -> [usize; 3] {
    let mut sizes = [0usize; 3];
    let mut remainders = [0usize; 3];
    for (i, pct) in SPLIT_PERCENTS.iter().enumerate() {
        sizes[i] = n * pct / 100;
        remainders[i] = n * pct % 100;
    }
    let mut leftover = n - sizes.iter().sum::<usize>();
    let mut order = [0usize, 1, 2];
    // Sort by descending remainder, stable in split order.
    order.sort_by(|&a, &b| remainders[b].cmp(&remainders[a]));
    let mut at = 0;
    while leftover > 0 {
        sizes[order[at]] += 1;
        leftover -= 1;
        at += 1;
    }
    sizes
}

/// Splits the dataset's videos 50/20/30 within each class. Deterministic:
/// the same dataset and seed always produce the same assignment.
pub fn stratified_split(dataset: &Dataset, seed: u64) -> Result<SplitAssignment, SplitError> {
    let mut train_ids = Vec::new();
    let mut val_ids = Vec::new();
    let mut test_ids = Vec::new();

    for (stream, label) in [Label::Real, Label::Fake].into_iter().enumerate() {
        let mut ids: Vec<&str> = dataset
            .rows()
            .iter()
            .filter(|r| r.label == label)
            .map(|r| r.video_id.as_str())
            .collect();
        if ids.len() < MIN_VIDEOS_PER_CLASS {
            return Err(SplitError::TooFewVideos {
                label,
                got: ids.len(),
            });
        }
        // Sort before shuffling so the outcome is independent of row order.
        ids.sort_unstable();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream as u64);
        ids.shuffle(&mut rng);

        let sizes = cut_sizes(ids.len());
        let (train, rest) = ids.split_at(sizes[0]);
        let (val, test) = rest.split_at(sizes[1]);
        train_ids.extend(train.iter().map(|s| String::from(*s)));
        val_ids.extend(val.iter().map(|s| String::from(*s)));
        test_ids.extend(test.iter().map(|s| String::from(*s)));
    }

    train_ids.sort_unstable();
    val_ids.sort_unstable();
    test_ids.sort_unstable();
    Ok(SplitAssignment {
        train_ids,
        val_ids,
        test_ids,
        seed,
    })
}
