//! Card image decoding and PNG output.

use std::path::Path;

use image::{DynamicImage, ImageFormat};
use sha2::{Digest, Sha256};
use spraycard::segmentation::{DropSegment, LabelMap};
use spraycard::{BinaryImage, GrayImage, RgbImage};

use crate::error::{CliError, Result};

/// Decoded card, keeping PGM input single-channel so the grayscale step is
/// skipped for it.
#[derive(Debug, Clone)]
pub enum CardImage {
    Rgb(RgbImage),
    Gray(GrayImage),
}

impl CardImage {
    pub fn dimensions(&self) -> (u32, u32) {
        match self {
            CardImage::Rgb(i) => i.dimensions(),
            CardImage::Gray(i) => i.dimensions(),
        }
    }

    pub fn to_rgb(&self) -> RgbImage {
        match self {
            CardImage::Rgb(i) => i.clone(),
            CardImage::Gray(i) => i.to_rgb(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedImage {
    pub image: CardImage,
    pub format: &'static str,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load(path: &Path) -> Result<LoadedImage> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(path, &bytes)
}

pub fn decode(path: &Path, bytes: &[u8]) -> Result<LoadedImage> {
    let format = image::guess_format(bytes).map_err(|e| CliError::input(path, e))?;
    let name = match format {
        ImageFormat::Png => "png",
        ImageFormat::Pnm => "pgm",
        other => {
            return Err(CliError::input(
                path,
                format!("unsupported image format {other:?}; expected PNG or PGM"),
            ))
        }
    };
    let decoded = image::load_from_memory_with_format(bytes, format).map_err(|e| CliError::input(path, e))?;
    let (w, h) = (decoded.width(), decoded.height());
    let image = match (name, decoded) {
        ("pgm", img @ (DynamicImage::ImageLuma8(_) | DynamicImage::ImageLuma16(_))) => {
            CardImage::Gray(GrayImage::from_luma8(w, h, img.to_luma8().as_raw()).map_err(|e| CliError::input(path, e))?)
        }
        ("pgm", _) => return Err(CliError::input(path, "only grayscale PNM (PGM) input is supported")),
        (_, img) => CardImage::Rgb(RgbImage::from_rgb8(w, h, img.to_rgb8().as_raw()).map_err(|e| CliError::input(path, e))?),
    };
    Ok(LoadedImage {
        image,
        format: name,
        sha256: sha256_hex(bytes),
    })
}

pub fn save_png(path: &Path, img: &RgbImage) -> Result<()> {
    image::save_buffer_with_format(
        path,
        &img.to_rgb8(),
        img.width(),
        img.height(),
        image::ExtendedColorType::Rgb8,
        ImageFormat::Png,
    )
    .map_err(|e| CliError::input(path, e))
}

/// Distinct 24-bit color for the `k`-th segment. Multiplication by an odd
/// constant is a bijection modulo 2^24, so colors never repeat for fewer
/// than 2^24 segments.
pub fn segment_color(k: u32) -> [u8; 3] {
    let c = k.wrapping_mul(0x9E_3779) & 0xFF_FFFF;
    [(c >> 16) as u8, (c >> 8) as u8, c as u8]
}

/// Paints each measured segment over the original image in its own color.
pub fn overlay(original: &RgbImage, labels: &LabelMap, material: &BinaryImage, segments: &[DropSegment]) -> RgbImage {
    let mut color_of = vec![None; labels.max_label() as usize + 1];
    for (k, s) in segments.iter().enumerate() {
        color_of[s.label as usize] = Some(segment_color(k as u32 + 1));
    }
    let pixels = original
        .pixels()
        .iter()
        .zip(labels.labels())
        .zip(material.pixels())
        .map(|((&px, &label), &drop)| {
            match color_of.get(label as usize).copied().flatten() {
                Some(c) if drop => c.map(|v| f64::from(v) / 255.0),
                _ => px,
            }
        })
        .collect();
    RgbImage::new(original.width(), original.height(), pixels).expect("same dimensions as the original")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn segment_colors_are_distinct() {
        let colors: HashSet<_> = (1..=100_000).map(segment_color).collect();
        assert_eq!(colors.len(), 100_000);
    }

    #[test]
    fn rejects_unknown_bytes() {
        let err = decode(Path::new("x.bin"), b"definitely not an image").unwrap_err();
        assert_eq!(err.exit_code(), crate::error::exit::INPUT);
    }

    #[test]
    fn decodes_binary_pgm_as_gray() {
        let mut bytes = b"P5\n3 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 90, 255, 10, 20, 30]);
        let loaded = decode(Path::new("card.pgm"), &bytes).unwrap();
        assert_eq!(loaded.format, "pgm");
        match loaded.image {
            CardImage::Gray(g) => {
                assert_eq!(g.dimensions(), (3, 2));
                assert_eq!(g.to_luma8(), vec![0, 90, 255, 10, 20, 30]);
            }
            CardImage::Rgb(_) => panic!("PGM must stay single-channel"),
        }
    }

    #[test]
    fn png_roundtrip_ignores_alpha() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.png");
        let rgba = image::RgbaImage::from_raw(2, 1, vec![10, 20, 30, 0, 200, 100, 50, 255]).unwrap();
        rgba.save(&path).unwrap();
        let loaded = load(&path).unwrap();
        assert_eq!(loaded.format, "png");
        assert_eq!(loaded.image.to_rgb().to_rgb8(), vec![10, 20, 30, 200, 100, 50]);
        assert_eq!(loaded.sha256.len(), 64);
    }
}
