//! Laplacian scale estimation over AC coefficients.
//!
//! Each of the 63 AC coefficients of a block spectrum is modeled as a
//! zero-centered Laplacian; its scale parameter is estimated as β = σ/√2
//! with σ the population standard deviation (divide by n) of that
//! coefficient across the blocks of one patch. One patch is one
//! (frame, region) instance; per-video descriptors average patch vectors
//! component-wise.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dct::{Dct8x8, SpectrumBlock};
use crate::gray::GrayImage;
use crate::label::Label;
use crate::region::{extract_blocks, RegionKind, RegionMask};

/// Number of AC coefficients per block (all but DC).
pub const AC_COUNT: usize = 63;

/// Patches with fewer blocks than this are skipped: β from a handful of
/// blocks is statistically meaningless noise.
pub const DEFAULT_MIN_BLOCKS_PER_PATCH: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BetaError {
    /// Too few blocks to estimate a patch vector; the patch is skipped.
    #[error("patch has {got} blocks, minimum is {minimum}")]
    TooFewBlocks { got: usize, minimum: usize },
    /// No patch produced a vector for this (video, region); the descriptor
    /// is excluded from the dataset.
    #[error("no valid patches for this video and region")]
    NoPatches,
}

/// β values of one patch: 63 Laplacian scales, one per AC coefficient in
/// zigzag order.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaVector {
    betas: [f64; AC_COUNT],
    block_count: usize,
}

impl BetaVector {
    /// `betas[i]` is the scale of AC coefficient i+1 (zigzag index).
    pub fn betas(&self) -> &[f64; AC_COUNT] {
        &self.betas
    }

    /// Number of blocks the estimate was computed from.
    pub fn block_count(&self) -> usize {
        self.block_count
    }
}

/// Per-video feature row: the component-wise mean of all patch vectors of
/// one region.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoDescriptor {
    pub video_id: String,
    pub label: Label,
    pub region: RegionKind,
    pub mean_betas: [f64; AC_COUNT],
    pub patch_count: usize,
}

/// Estimates the 63 β values from the AC coefficients of `blocks`.
///
/// For each AC index the population standard deviation σ is computed in
/// two passes (mean, then squared deviations, both summed in input order),
/// and β = σ/√2. Zero variance yields β = 0. Errors with `TooFewBlocks`
/// when fewer than `max(min_blocks, 1)` blocks are given.
pub fn estimate_betas(
    blocks: &[SpectrumBlock],
    min_blocks: usize,
) -> Result<BetaVector, BetaError> {
    let n = blocks.len();
    let minimum = min_blocks.max(1);
    if n < minimum {
        return Err(BetaError::TooFewBlocks { got: n, minimum });
    }
    let mut betas = [0.0f64; AC_COUNT];
    for (i, beta) in betas.iter_mut().enumerate() {
        let coef = i + 1;
        // Identical samples are exactly zero-variance; skipping them avoids
        // the rounding of mean = (n·x)/n, which would otherwise leave a
        // ~1e-30 residue on constant patches.
        let first = blocks[0].coefficients()[coef];
        if blocks.iter().all(|b| b.coefficients()[coef] == first) {
            *beta = 0.0;
            continue;
        }
        let mut sum = 0.0;
        for block in blocks {
            sum += block.coefficients()[coef];
        }
        let mean = sum / n as f64;
        let mut sq = 0.0;
        for block in blocks {
            let d = block.coefficients()[coef] - mean;
            sq += d * d;
        }
        let sigma = libm::sqrt(sq / n as f64);
        *beta = sigma / core::f64::consts::SQRT_2;
    }
    Ok(BetaVector {
        betas,
        block_count: n,
    })
}

/// Extracts the patch vector of one (frame, region): grid blocks fully
/// inside `mask`, transformed and zigzag-ordered, then β-estimated.
/// Returns `None` when fewer than `min_blocks` grid blocks are covered.
pub fn patch_vector(
    image: &GrayImage,
    mask: &RegionMask,
    min_blocks: usize,
) -> Option<BetaVector> {
    let blocks = extract_blocks(image, mask);
    if blocks.len() < min_blocks.max(1) {
        return None;
    }
    let dct = Dct8x8::new();
    let spectra: Vec<SpectrumBlock> = blocks.iter().map(|b| dct.spectrum(b)).collect();
    estimate_betas(&spectra, min_blocks).ok()
}

/// Averages patch vectors into the per-video descriptor for one region.
/// The mean is the plain arithmetic mean in patch order (bit-stable).
pub fn video_descriptor(
    video_id: &str,
    label: Label,
    region: RegionKind,
    patches: &[BetaVector],
) -> Result<VideoDescriptor, BetaError> {
    if patches.is_empty() {
        return Err(BetaError::NoPatches);
    }
    let k = patches.len() as f64;
    let mut mean_betas = [0.0f64; AC_COUNT];
    for patch in patches {
        for (m, b) in mean_betas.iter_mut().zip(patch.betas.iter()) {
            *m += b;
        }
    }
    for m in mean_betas.iter_mut() {
        *m /= k;
    }
    Ok(VideoDescriptor {
        video_id: String::from(video_id),
        label,
        region,
        mean_betas,
        patch_count: patches.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn block_with_ac1(value: f64) -> SpectrumBlock {
        let mut coefs = [0.0; 64];
        coefs[1] = value;
        SpectrumBlock::from_zigzag(coefs)
    }

    /// Laplace(0, beta) quantile function.
    fn laplace_inv_cdf(beta: f64, u: f64) -> f64 {
        if u < 0.5 {
            beta * libm::log(2.0 * u.max(1e-300))
        } else {
            -beta * libm::log(2.0 * (1.0 - u).max(1e-300))
        }
    }

    #[test]
    fn identical_blocks_give_zero_betas() {
        let mut coefs = [0.0; 64];
        for (i, c) in coefs.iter_mut().enumerate() {
            *c = i as f64 * 0.5 - 3.0;
        }
        let blocks = [SpectrumBlock::from_zigzag(coefs); 10];
        let bv = estimate_betas(&blocks, 8).unwrap();
        assert_eq!(bv.block_count(), 10);
        assert!(bv.betas().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn symmetric_pair_gives_c_over_sqrt2() {
        let c = 3.0;
        let blocks = [block_with_ac1(c), block_with_ac1(-c)];
        let bv = estimate_betas(&blocks, 2).unwrap();
        // mean 0, population variance c², so β₁ = c/√2 exactly.
        assert_eq!(bv.betas()[0], c / core::f64::consts::SQRT_2);
        assert!(bv.betas()[1..].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn too_few_blocks_is_an_error() {
        let blocks = [block_with_ac1(1.0); 3];
        assert_eq!(
            estimate_betas(&blocks, 8),
            Err(BetaError::TooFewBlocks { got: 3, minimum: 8 })
        );
        assert!(estimate_betas(&[], 0).is_err());
    }

    #[test]
    fn laplace_samples_recover_the_scale() {
        let beta = 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(0xbe7a);
        let blocks: Vec<SpectrumBlock> = (0..2000)
            .map(|_| block_with_ac1(laplace_inv_cdf(beta, rng.random())))
            .collect();
        let bv = estimate_betas(&blocks, 8).unwrap();

        // Oracle: σ/√2 from the same samples, same summation order.
        let n = blocks.len() as f64;
        let mean: f64 = blocks.iter().map(|b| b.coefficients()[1]).sum::<f64>() / n;
        let var: f64 = blocks
            .iter()
            .map(|b| {
                let d = b.coefficients()[1] - mean;
                d * d
            })
            .sum::<f64>()
            / n;
        let oracle = libm::sqrt(var) / core::f64::consts::SQRT_2;

        assert_eq!(bv.betas()[0], oracle);
        assert!((bv.betas()[0] - beta).abs() < 0.2, "β̂ = {}", bv.betas()[0]);
    }

    #[test]
    fn descriptor_is_patchwise_mean() {
        let one = estimate_betas(&[block_with_ac1(1.0), block_with_ac1(-1.0)], 2).unwrap();
        let three = estimate_betas(&[block_with_ac1(3.0), block_with_ac1(-3.0)], 2).unwrap();

        let single =
            video_descriptor("v0", Label::Real, RegionKind::Face, &[one.clone()]).unwrap();
        assert_eq!(single.mean_betas, one.betas);
        assert_eq!(single.patch_count, 1);

        let pair = video_descriptor("v1", Label::Fake, RegionKind::Face, &[one, three]).unwrap();
        // β₁ of the patches are 1/√2 and 3/√2, so the mean is 2/√2 = √2.
        assert!((pair.mean_betas[0] - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(pair.patch_count, 2);

        assert_eq!(
            video_descriptor("v2", Label::Real, RegionKind::Face, &[]),
            Err(BetaError::NoPatches)
        );
    }

    #[test]
    fn patch_vector_counts_grid_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6464);
        let mut img = GrayImage::zeroed(64, 64);
        for y in 0..64 {
            for x in 0..64 {
                img.set(x, y, rng.random());
            }
        }
        let full = RegionMask::full(64, 64);
        let bv = patch_vector(&img, &full, DEFAULT_MIN_BLOCKS_PER_PATCH).unwrap();
        assert_eq!(bv.block_count(), 64);
    }

    #[test]
    fn uniform_image_has_zero_betas() {
        let img = GrayImage::from_raw(32, 32, alloc::vec![77; 32 * 32]).unwrap();
        let full = RegionMask::full(32, 32);
        let bv = patch_vector(&img, &full, 8).unwrap();
        assert!(bv.betas().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn sparse_mask_below_minimum_is_skipped() {
        let img = GrayImage::zeroed(64, 64);
        // Cover exactly 3 grid blocks.
        let mut mask = RegionMask::new(64, 64);
        for block in 0..3u32 {
            for y in 0..8 {
                for x in 0..8 {
                    mask.set(block * 8 + x, y, true);
                }
            }
        }
        assert!(patch_vector(&img, &mask, 8).is_none());
        assert!(patch_vector(&img, &mask, 3).is_some());
    }
}
