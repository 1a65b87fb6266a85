//! Orthonormal 8×8 block DCT and the JPEG zigzag scan.
//!
//! The forward transform is
//!
//! ```text
//! F(u,v) = (2/N)·C(u)·C(v)·Σₓ Σ_y f(x,y)·cos((2x+1)uπ/2N)·cos((2y+1)vπ/2N)
//! ```
//!
//! with N = 8 and C(0) = 1/√2, C(k) = 1 otherwise. This normalization is
//! orthonormal, so coefficient energy equals pixel energy (Parseval), which
//! keeps the β statistics comparable across implementations. Samples are
//! shifted by −128 before the transform (JPEG convention); the shift only
//! moves DC, which the feature pipeline discards.

use crate::region::Block8x8;

/// Number of samples per block edge.
pub const BLOCK_EDGE: usize = 8;

/// Zigzag scan order: `ZIGZAG[k]` is the row-major matrix index (`8·row + col`)
/// visited at scan position `k`. Position 0 is DC at (0,0); the scan ends at
/// (7,7). This is the standard JPEG table.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27,
    20, 13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58,
    59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];

/// 64 DCT coefficients of one block, stored in zigzag order.
///
/// Index 0 is the DC coefficient (average luminance of the centered block);
/// indices 1..=63 are the AC coefficients that feed the β estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumBlock {
    coefficients: [f64; 64],
}

impl SpectrumBlock {
    /// Wraps coefficients already in zigzag order. All values must be finite.
    pub fn from_zigzag(coefficients: [f64; 64]) -> SpectrumBlock {
        assert!(
            coefficients.iter().all(|c| c.is_finite()),
            "spectrum coefficients must be finite"
        );
        SpectrumBlock { coefficients }
    }

    /// All 64 coefficients in zigzag order.
    pub fn coefficients(&self) -> &[f64; 64] {
        &self.coefficients
    }

    /// The DC coefficient.
    pub fn dc(&self) -> f64 {
        self.coefficients[0]
    }

    /// The 63 AC coefficients, zigzag order, DC removed.
    pub fn ac(&self) -> &[f64] {
        &self.coefficients[1..]
    }
}

/// Precomputed cosine basis for the 8×8 DCT.
///
/// Building the table costs 64 `cos` calls; reuse one instance across blocks
/// in hot paths. [`dct_8x8`] is a convenience wrapper that builds a transient
/// table per call.
#[derive(Debug, Clone)]
pub struct Dct8x8 {
    /// `cos[k][n] = cos((2n+1)·k·π/16)`.
    cos: [[f64; 8]; 8],
    /// Per-pass scale `√(2/N)·C(k)`.
    scale: [f64; 8],
}

impl Default for Dct8x8 {
    fn default() -> Self {
        Self::new()
    }
}

impl Dct8x8 {
    pub fn new() -> Dct8x8 {
        let mut cos = [[0.0; 8]; 8];
        for (k, row) in cos.iter_mut().enumerate() {
            for (n, c) in row.iter_mut().enumerate() {
                *c = libm::cos((2 * n + 1) as f64 * k as f64 * core::f64::consts::PI / 16.0);
            }
        }
        let mut scale = [0.5; 8];
        scale[0] = 0.5 / libm::sqrt(2.0);
        Dct8x8 { cos, scale }
    }

    /// Forward transform of one block: level shift by −128, then two
    /// separable orthonormal 1D passes (rows, then columns). The output is
    /// the row-major coefficient matrix `F[8·u + v]` with `u` the vertical
    /// frequency (paired with pixel rows) and `v` the horizontal frequency.
    pub fn transform(&self, block: &Block8x8) -> [f64; 64] {
        let mut centered = [0.0f64; 64];
        for (c, &p) in centered.iter_mut().zip(block.pixels.iter()) {
            *c = p as f64 - 128.0;
        }

        // Row pass: rows[r][v] = scale(v)·Σ_y centered[r][y]·cos[v][y].
        let mut rows = [0.0f64; 64];
        for r in 0..8 {
            for v in 0..8 {
                let mut acc = 0.0;
                for y in 0..8 {
                    acc += centered[r * 8 + y] * self.cos[v][y];
                }
                rows[r * 8 + v] = acc * self.scale[v];
            }
        }

        // Column pass: out[u][v] = scale(u)·Σ_x rows[x][v]·cos[u][x].
        let mut out = [0.0f64; 64];
        for v in 0..8 {
            for u in 0..8 {
                let mut acc = 0.0;
                for x in 0..8 {
                    acc += rows[x * 8 + v] * self.cos[u][x];
                }
                out[u * 8 + v] = acc * self.scale[u];
            }
        }
        out
    }

    /// Transform followed by the zigzag scan.
    pub fn spectrum(&self, block: &Block8x8) -> SpectrumBlock {
        zigzag(&self.transform(block))
    }
}

/// One-shot forward DCT; see [`Dct8x8::transform`].
pub fn dct_8x8(block: &Block8x8) -> [f64; 64] {
    Dct8x8::new().transform(block)
}

/// Reorders a row-major 8×8 coefficient matrix into zigzag scan order.
pub fn zigzag(matrix: &[f64; 64]) -> SpectrumBlock {
    let mut coefficients = [0.0; 64];
    for (k, &idx) in ZIGZAG.iter().enumerate() {
        coefficients[k] = matrix[idx];
    }
    SpectrumBlock::from_zigzag(coefficients)
}

/// Inverse of [`zigzag`]: scatters coefficients back into the row-major
/// matrix layout.
pub fn zigzag_inverse(spectrum: &SpectrumBlock) -> [f64; 64] {
    let mut matrix = [0.0; 64];
    for (k, &idx) in ZIGZAG.iter().enumerate() {
        matrix[idx] = spectrum.coefficients[k];
    }
    matrix
}
