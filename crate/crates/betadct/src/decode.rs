//! Frame image decoding to the toolkit's 8-bit grayscale.

use std::path::{Path, PathBuf};

use betadct_core::GrayImage;

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error("decoding {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{path}: zero-sized image")]
    Empty { path: PathBuf },
}

/// Decodes a frame image to grayscale. Single-channel 8-bit sources pass
/// through byte for byte; anything else goes through RGB and the BT.601
/// luma weights (round half up), matching `betadct_core::gray::luma_bt601`.
pub fn decode_grayscale(path: &Path) -> Result<GrayImage, DecodeError> {
    let decoded = image::open(path).map_err(|source| DecodeError::Image {
        path: path.to_path_buf(),
        source,
    })?;
    let gray = match decoded {
        image::DynamicImage::ImageLuma8(g) => {
            let (width, height) = g.dimensions();
            GrayImage::from_raw(width, height, g.into_raw())
        }
        other => {
            let rgb = other.to_rgb8();
            let (width, height) = rgb.dimensions();
            GrayImage::from_rgb8(width, height, rgb.as_raw())
        }
    };
    gray.filter(|g| g.width() > 0 && g.height() > 0)
        .ok_or_else(|| DecodeError::Empty {
            path: path.to_path_buf(),
        })
}

/// Writes a grayscale image as a lossless PNG.
pub fn encode_png(path: &Path, image: &GrayImage) -> Result<(), image::ImageError> {
    let buffer: image::GrayImage =
        image::ImageBuffer::from_raw(image.width(), image.height(), image.data().to_vec())
            .expect("buffer length matches dimensions");
    buffer.save_with_format(path, image::ImageFormat::Png)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trips_grayscale_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.png");
        let data: Vec<u8> = (0..64u32).map(|i| (i * 4) as u8).collect();
        let img = GrayImage::from_raw(8, 8, data.clone()).unwrap();
        encode_png(&path, &img).unwrap();
        let back = decode_grayscale(&path).unwrap();
        assert_eq!(back.data(), &data[..]);
    }

    #[test]
    fn color_input_is_converted_with_bt601_weights() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.png");
        // One red, one green, one blue, one white pixel.
        let rgb = [255, 0, 0, 0, 255, 0, 0, 0, 255, 255, 255, 255];
        image::save_buffer(&path, &rgb, 4, 1, image::ExtendedColorType::Rgb8).unwrap();
        let gray = decode_grayscale(&path).unwrap();
        assert_eq!(gray.data(), &[76, 150, 29, 255]);
    }

    #[test]
    fn pgm_is_supported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.pgm");
        let mut payload = b"P5\n3 2\n255\n".to_vec();
        payload.extend_from_slice(&[0, 50, 100, 150, 200, 250]);
        std::fs::write(&path, payload).unwrap();
        let gray = decode_grayscale(&path).unwrap();
        assert_eq!((gray.width(), gray.height()), (3, 2));
        assert_eq!(gray.data(), &[0, 50, 100, 150, 200, 250]);
    }

    #[test]
    fn unreadable_file_is_a_decode_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.png");
        std::fs::write(&path, b"not an image").unwrap();
        assert!(matches!(
            decode_grayscale(&path),
            Err(DecodeError::Image { .. })
        ));
    }
}
