//! Numerical core for video forensics based on block-DCT spectral statistics.
//!
//! The pipeline implemented across this crate and its companion toolkit:
//! grayscale frames are cut into 8×8 blocks inside facial region masks, each
//! block is transformed with the orthonormal 8×8 DCT, the 63 AC coefficients
//! (zigzag order) are modeled as zero-centered Laplacians, and the per-patch
//! scale parameters β = σ/√2 become the feature vector that a bench of
//! classical classifiers separates into real vs. deepfake.
//!
//! This crate is `no_std` (with `alloc`) and holds everything that is pure
//! computation: the transform, the β estimator, region mask geometry, the
//! classifier bench (k-NN, LDA, decision tree, random forest), the stratified
//! split protocol, and exact rank-based AUC. File formats, image decoding,
//! subprocess demuxing, and the CLI live in the `betadct` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod beta;
pub mod classify;
pub mod dct;
pub mod eval;
pub mod gray;
pub mod landmarks;
pub mod region;

mod label;

pub use beta::{estimate_betas, patch_vector, video_descriptor, BetaVector, VideoDescriptor};
pub use classify::{
    score, select_model, stratified_split, train, ClassifierSpec, Dataset, DatasetRow,
    ForestParams, ModelError, Selection, SplitAssignment, TrainError, TrainedModel,
};
pub use dct::{dct_8x8, zigzag, Dct8x8, SpectrumBlock};
pub use eval::{auc, evaluate_grid, ClassifierGridEntry, EvalCell, EvalGrid, ScoredPrediction};
pub use gray::GrayImage;
pub use label::Label;
pub use landmarks::{LandmarkSet, Point};
pub use region::{build_mask, extract_blocks, Block8x8, RegionKind, RegionMask};
