//! Raster carriers and the pixel-level transforms that precede segmentation:
//! grayscale conversion, fixed-threshold binarization, square-element
//! dilation/erosion and the contour ring mask.
//!
//! Binary images use a fixed polarity: `true` is drop material, `false` is
//! card background. Morphology treats every out-of-bounds neighbor as
//! background, so erosion also shrinks shapes that touch the image border.

use crate::error::{Error, Result};

/// Luma weights applied to (R, G, B).
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Gray level below which a pixel is classified as drop material.
pub const DEFAULT_THRESHOLD: f64 = 0.35;

fn check_dims(width: u32, height: u32) -> Result<usize> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage { width, height });
    }
    Ok(width as usize * height as usize)
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::BufferSize { expected, actual });
    }
    Ok(())
}

fn check_unit(index: usize, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::PixelRange { index, value });
    }
    Ok(())
}

macro_rules! raster_dims {
    ($ty:ty) => {
        impl $ty {
            pub fn width(&self) -> u32 {
                self.width
            }

            pub fn height(&self) -> u32 {
                self.height
            }

            pub fn dimensions(&self) -> (u32, u32) {
                (self.width, self.height)
            }

            pub fn len(&self) -> usize {
                self.width as usize * self.height as usize
            }

            pub fn is_empty(&self) -> bool {
                self.len() == 0
            }

            #[inline]
            pub fn index(&self, x: u32, y: u32) -> usize {
                debug_assert!(x < self.width && y < self.height);
                y as usize * self.width as usize + x as usize
            }
        }
    };
}

/// Color image with channels normalized to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    pixels: Vec<[f64; 3]>,
}

raster_dims!(RgbImage);

impl RgbImage {
    pub fn new(width: u32, height: u32, pixels: Vec<[f64; 3]>) -> Result<Self> {
        let n = check_dims(width, height)?;
        check_len(n, pixels.len())?;
        for (i, px) in pixels.iter().enumerate() {
            for &c in px {
                check_unit(i, c)?;
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, rgb: [f64; 3]) -> Result<Self> {
        let n = check_dims(width, height)?;
        Self::new(width, height, vec![rgb; n])
    }

    /// Builds an image from interleaved 8-bit RGB samples.
    pub fn from_rgb8(width: u32, height: u32, data: &[u8]) -> Result<Self> {
        let n = check_dims(width, height)?;
        check_len(n * 3, data.len())?;
        let pixels = data
            .chunks_exact(3)
            .map(|c| {
                [
                    f64::from(c[0]) / 255.0,
                    f64::from(c[1]) / 255.0,
                    f64::from(c[2]) / 255.0,
                ]
            })
            .collect();
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Interleaved 8-bit RGB samples, rounding to the nearest level.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.pixels
            .iter()
            .flat_map(|px| px.map(unit_to_u8))
            .collect()
    }

    pub fn get(&self, x: u32, y: u32) -> [f64; 3] {
        self.pixels[self.index(x, y)]
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }
}

/// Single-channel intensity image with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<f64>,
}

raster_dims!(GrayImage);

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<f64>) -> Result<Self> {
        let n = check_dims(width, height)?;
        check_len(n, pixels.len())?;
        for (i, &v) in pixels.iter().enumerate() {
            check_unit(i, v)?;
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, value: f64) -> Result<Self> {
        let n = check_dims(width, height)?;
        Self::new(width, height, vec![value; n])
    }

    pub fn from_luma8(width: u32, height: u32, data: &[u8]) -> Result<Self> {
        let n = check_dims(width, height)?;
        check_len(n, data.len())?;
        Ok(Self {
            width,
            height,
            pixels: data.iter().map(|&v| f64::from(v) / 255.0).collect(),
        })
    }

    pub fn to_luma8(&self) -> Vec<u8> {
        self.pixels.iter().map(|&v| unit_to_u8(v)).collect()
    }

    /// Replicates the intensity into all three channels.
    pub fn to_rgb(&self) -> RgbImage {
        RgbImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&v| [v, v, v]).collect(),
        }
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.pixels[self.index(x, y)]
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }
}

/// Two-level image. `true` marks drop material.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    pixels: Vec<bool>,
}

raster_dims!(BinaryImage);

impl BinaryImage {
    pub fn new(width: u32, height: u32, pixels: Vec<bool>) -> Result<Self> {
        let n = check_dims(width, height)?;
        check_len(n, pixels.len())?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn zeros(width: u32, height: u32) -> Result<Self> {
        let n = check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            pixels: vec![false; n],
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Result<Self> {
        let n = check_dims(width, height)?;
        let mut pixels = Vec::with_capacity(n);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.pixels[self.index(x, y)]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let i = self.index(x, y);
        self.pixels[i] = value;
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    pub fn count_ones(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    /// Pixel-wise complement.
    pub fn not(&self) -> BinaryImage {
        BinaryImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| !p).collect(),
        }
    }

    /// True when every foreground pixel of `self` is foreground in `other`.
    pub fn is_subset_of(&self, other: &BinaryImage) -> bool {
        self.dimensions() == other.dimensions()
            && self
                .pixels
                .iter()
                .zip(&other.pixels)
                .all(|(&a, &b)| !a || b)
    }
}

/// Full square structuring element of odd side length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StructuringElement {
    side: u32,
}

impl Default for StructuringElement {
    fn default() -> Self {
        Self { side: 3 }
    }
}

impl StructuringElement {
    pub fn square(side: u32) -> Result<Self> {
        if side == 0 || side.is_multiple_of(2) {
            return Err(Error::parameter(
                "se_side",
                format!("structuring element side must be odd and >= 1, got {side}"),
            ));
        }
        Ok(Self { side })
    }

    pub fn side(&self) -> u32 {
        self.side
    }

    /// Reach from the center pixel in each direction.
    pub fn radius(&self) -> u32 {
        self.side / 2
    }
}

fn unit_to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Weighted luma conversion. Output stays in `[0, 1]` because the weights
/// are non-negative and sum to one.
pub fn to_grayscale(img: &RgbImage) -> GrayImage {
    let [wr, wg, wb] = LUMA_WEIGHTS;
    GrayImage {
        width: img.width,
        height: img.height,
        pixels: img
            .pixels
            .iter()
            .map(|&[r, g, b]| (wr * r + wg * g + wb * b).clamp(0.0, 1.0))
            .collect(),
    }
}

/// Marks pixels strictly darker than `threshold` as drop material.
pub fn binarize(img: &GrayImage, threshold: f64) -> Result<BinaryImage> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::parameter(
            "threshold",
            format!("must lie strictly between 0 and 1, got {threshold}"),
        ));
    }
    Ok(BinaryImage {
        width: img.width,
        height: img.height,
        pixels: img.pixels.iter().map(|&v| v < threshold).collect(),
    })
}

pub fn dilate(img: &BinaryImage, se: StructuringElement) -> BinaryImage {
    square_filter(img, se.radius(), Reduce::Any)
}

pub fn erode(img: &BinaryImage, se: StructuringElement) -> BinaryImage {
    square_filter(img, se.radius(), Reduce::All)
}

/// `dilated AND NOT eroded`, the ring left between the grown and the shrunk
/// copy of each shape.
pub fn contour_mask(dilated: &BinaryImage, eroded: &BinaryImage) -> Result<BinaryImage> {
    if dilated.dimensions() != eroded.dimensions() {
        return Err(Error::DimensionMismatch {
            left_width: dilated.width,
            left_height: dilated.height,
            right_width: eroded.width,
            right_height: eroded.height,
        });
    }
    Ok(BinaryImage {
        width: dilated.width,
        height: dilated.height,
        pixels: dilated
            .pixels
            .iter()
            .zip(&eroded.pixels)
            .map(|(&d, &e)| d && !e)
            .collect(),
    })
}

#[derive(Clone, Copy)]
enum Reduce {
    Any,
    All,
}

/// Square-window OR/AND, computed separably as a row pass followed by a
/// column pass. Each pass keeps a running count of foreground pixels in the
/// window; out-of-bounds positions count as background.
fn square_filter(img: &BinaryImage, radius: u32, reduce: Reduce) -> BinaryImage {
    if radius == 0 {
        return img.clone();
    }
    let w = img.width as usize;
    let h = img.height as usize;
    let r = radius as usize;
    let window = 2 * r + 1;

    let decide = |count: usize| match reduce {
        Reduce::Any => count > 0,
        Reduce::All => count == window,
    };

    let mut rows = vec![false; w * h];
    for y in 0..h {
        let line = &img.pixels[y * w..(y + 1) * w];
        let out = &mut rows[y * w..(y + 1) * w];
        sliding_pass(w, r, |i| line[i], |i, c| out[i] = decide(c));
    }

    let mut pixels = vec![false; w * h];
    for x in 0..w {
        sliding_pass(
            h,
            r,
            |i| rows[i * w + x],
            |i, c| pixels[i * w + x] = decide(c),
        );
    }

    BinaryImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

/// Calls `emit(i, n)` with the number of set positions in `[i - r, i + r]`
/// for every `i` in `0..len`.
fn sliding_pass(len: usize, r: usize, get: impl Fn(usize) -> bool, mut emit: impl FnMut(usize, usize)) {
    let mut count = (0..r.min(len)).filter(|&i| get(i)).count();
    for i in 0..len {
        let enter = i + r;
        if enter < len && get(enter) {
            count += 1;
        }
        emit(i, count);
        if i >= r && get(i - r) {
            count -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn se3() -> StructuringElement {
        StructuringElement::default()
    }

    fn gray1(v: f64) -> GrayImage {
        GrayImage::filled(1, 1, v).unwrap()
    }

    fn square(w: u32, h: u32, x0: u32, y0: u32, side: u32) -> BinaryImage {
        BinaryImage::from_fn(w, h, |x, y| {
            (x0..x0 + side).contains(&x) && (y0..y0 + side).contains(&y)
        })
        .unwrap()
    }

    #[test]
    fn grayscale_examples() {
        let img = RgbImage::new(
            3,
            1,
            vec![[1.0, 1.0, 1.0], [1.0, 0.0, 0.0], [0.5, 0.5, 0.5]],
        )
        .unwrap();
        let g = to_grayscale(&img);
        assert_abs_diff_eq!(g.get(0, 0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.get(1, 0), 0.299, epsilon = 1e-12);
        assert_abs_diff_eq!(g.get(2, 0), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rgb_rejects_out_of_range() {
        assert!(matches!(
            RgbImage::new(1, 1, vec![[1.2, 0.0, 0.0]]),
            Err(Error::PixelRange { .. })
        ));
        assert!(matches!(
            RgbImage::new(0, 1, vec![]),
            Err(Error::EmptyImage { .. })
        ));
    }

    #[test]
    fn binarize_is_strict_at_threshold() {
        assert!(binarize(&gray1(0.34), 0.35).unwrap().get(0, 0));
        assert!(!binarize(&gray1(0.35), 0.35).unwrap().get(0, 0));
        let white = GrayImage::filled(4, 4, 1.0).unwrap();
        assert_eq!(binarize(&white, DEFAULT_THRESHOLD).unwrap().count_ones(), 0);
    }

    #[test]
    fn binarize_rejects_bad_threshold() {
        for t in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(binarize(&gray1(0.5), t).is_err(), "threshold {t}");
        }
    }

    #[test]
    fn dilate_stamps_the_element() {
        let mut img = BinaryImage::zeros(5, 5).unwrap();
        img.set(2, 2, true);
        assert_eq!(dilate(&img, se3()), square(5, 5, 1, 1, 3));

        let empty = BinaryImage::zeros(5, 5).unwrap();
        assert_eq!(dilate(&empty, se3()), empty);
    }

    #[test]
    fn dilate_grows_square_by_one() {
        let img = square(20, 20, 5, 5, 10);
        assert_eq!(dilate(&img, se3()), square(20, 20, 4, 4, 12));
    }

    #[test]
    fn erode_examples() {
        let ones = BinaryImage::from_fn(3, 3, |_, _| true).unwrap();
        assert_eq!(erode(&ones, se3()), square(3, 3, 1, 1, 1));

        let full = BinaryImage::from_fn(20, 20, |_, _| true).unwrap();
        assert_eq!(erode(&full, se3()), square(20, 20, 1, 1, 18));

        let mut single = BinaryImage::zeros(5, 5).unwrap();
        single.set(2, 2, true);
        assert_eq!(erode(&single, se3()).count_ones(), 0);
    }

    #[test]
    fn contour_examples() {
        let zeros = BinaryImage::zeros(6, 6).unwrap();
        assert_eq!(contour_mask(&zeros, &zeros).unwrap(), zeros);

        let ones = zeros.not();
        assert_eq!(contour_mask(&ones, &ones).unwrap(), zeros);

        let other = BinaryImage::zeros(6, 5).unwrap();
        assert!(matches!(
            contour_mask(&zeros, &other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn contour_of_disk_is_annulus() {
        let disk = BinaryImage::from_fn(21, 21, |x, y| {
            let dx = x as f64 - 10.0;
            let dy = y as f64 - 10.0;
            dx * dx + dy * dy <= 25.0
        })
        .unwrap();
        let dil = dilate(&disk, se3());
        let ero = erode(&disk, se3());
        let ring = contour_mask(&dil, &ero).unwrap();
        for y in 0..21 {
            for x in 0..21 {
                assert_eq!(ring.get(x, y), dil.get(x, y) && !ero.get(x, y));
            }
        }
        // One outer layer plus the disk pixels whose 3x3 window leaves the disk.
        assert!(ring.get(10, 4) && ring.get(10, 5) && ring.get(10, 6));
        assert!(!ring.get(10, 3) && !ring.get(10, 7));
        assert!(!ring.get(10, 10));
    }

    #[test]
    fn unit_element_is_identity() {
        let se = StructuringElement::square(1).unwrap();
        let img = square(7, 7, 2, 1, 3);
        assert_eq!(dilate(&img, se), img);
        assert_eq!(erode(&img, se), img);
    }

    #[test]
    fn element_side_must_be_odd() {
        assert!(StructuringElement::square(0).is_err());
        assert!(StructuringElement::square(4).is_err());
        assert_eq!(StructuringElement::square(5).unwrap().radius(), 2);
    }

    #[test]
    fn element_wider_than_image() {
        let mut img = BinaryImage::zeros(2, 2).unwrap();
        img.set(0, 0, true);
        let se = StructuringElement::square(7).unwrap();
        assert_eq!(dilate(&img, se).count_ones(), 4);
        assert_eq!(erode(&img.not().not(), se).count_ones(), 0);
    }

    #[test]
    fn eight_bit_roundtrip() {
        let data = [0u8, 90, 255, 12, 34, 56];
        let img = RgbImage::from_rgb8(2, 1, &data).unwrap();
        assert_eq!(img.to_rgb8(), data);
    }
}
