//! Grayscale frame buffer and RGB → luma conversion.

use alloc::vec;
use alloc::vec::Vec;

/// An 8-bit grayscale frame, row-major, no padding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    /// Creates a frame from raw row-major bytes. `data.len()` must equal
    /// `width * height`.
    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Option<GrayImage> {
        let expected = (width as usize).checked_mul(height as usize)?;
        if data.len() != expected {
            return None;
        }
        Some(GrayImage {
            width,
            height,
            data,
        })
    }

    /// Creates an all-zero (black) frame.
    pub fn zeroed(width: u32, height: u32) -> GrayImage {
        GrayImage {
            width,
            height,
            data: vec![0; width as usize * height as usize],
        }
    }

    /// Converts packed 8-bit RGB into luma using the BT.601 weights
    /// 0.299 R + 0.587 G + 0.114 B, rounding half up. `rgb.len()` must equal
    /// `width * height * 3`.
    pub fn from_rgb8(width: u32, height: u32, rgb: &[u8]) -> Option<GrayImage> {
        let pixels = (width as usize).checked_mul(height as usize)?;
        if rgb.len() != pixels.checked_mul(3)? {
            return None;
        }
        let data = rgb
            .chunks_exact(3)
            .map(|p| luma_bt601(p[0], p[1], p[2]))
            .collect();
        Some(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Row-major pixel bytes.
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    /// Copies the 8×8 block whose top-left corner is `(x0, y0)` into a flat
    /// 64-element array. The block must lie fully inside the frame.
    pub fn block_at(&self, x0: u32, y0: u32) -> [u8; 64] {
        debug_assert!(x0 + 8 <= self.width && y0 + 8 <= self.height);
        let mut out = [0u8; 64];
        let w = self.width as usize;
        for row in 0..8 {
            let src = (y0 as usize + row) * w + x0 as usize;
            out[row * 8..row * 8 + 8].copy_from_slice(&self.data[src..src + 8]);
        }
        out
    }
}

/// BT.601 luma of one RGB pixel, rounded half up and clamped to `0..=255`.
pub fn luma_bt601(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
    let rounded = libm::floor(y + 0.5);
    if rounded <= 0.0 {
        0
    } else if rounded >= 255.0 {
        255
    } else {
        rounded as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luma_known_values() {
        assert_eq!(luma_bt601(0, 0, 0), 0);
        assert_eq!(luma_bt601(255, 255, 255), 255);
        // 0.299 * 255 = 76.245 -> 76
        assert_eq!(luma_bt601(255, 0, 0), 76);
        // 0.587 * 255 = 149.685 -> 150
        assert_eq!(luma_bt601(0, 255, 0), 150);
        // 0.114 * 255 = 29.07 -> 29
        assert_eq!(luma_bt601(0, 0, 255), 29);
        // Gray inputs map to themselves under weights summing to 1.
        for v in [1u8, 17, 128, 200, 254] {
            assert_eq!(luma_bt601(v, v, v), v);
        }
    }

    #[test]
    fn luma_rounds_half_up() {
        // 0.299*5 + 0.587*0 + 0.114*0 = 1.495 -> 1; 0.299*10 = 2.99 -> 3
        assert_eq!(luma_bt601(5, 0, 0), 1);
        assert_eq!(luma_bt601(10, 0, 0), 3);
    }

    #[test]
    fn from_raw_checks_length() {
        assert!(GrayImage::from_raw(4, 4, vec![0; 16]).is_some());
        assert!(GrayImage::from_raw(4, 4, vec![0; 15]).is_none());
        assert!(GrayImage::from_raw(4, 4, vec![0; 17]).is_none());
    }

    #[test]
    fn from_rgb8_layout() {
        // 2x1 frame: red then mid gray.
        let img = GrayImage::from_rgb8(2, 1, &[255, 0, 0, 128, 128, 128]).unwrap();
        assert_eq!(img.data(), &[76, 128]);
    }

    #[test]
    fn block_extraction_is_row_major() {
        let mut img = GrayImage::zeroed(16, 16);
        for y in 0..16 {
            for x in 0..16 {
                img.set(x, y, (y * 16 + x) as u8);
            }
        }
        let block = img.block_at(8, 0);
        assert_eq!(block[0], 8);
        assert_eq!(block[7], 15);
        assert_eq!(block[8], 24);
        assert_eq!(block[63], 7 * 16 + 15);
    }
}
