//! Synthetic water-sensitive cards with exactly known drops.
//!
//! Rendering uses pixel-center point sampling: a pixel is drop-colored iff
//! its center lies inside some drop disk. This makes the rasterized area of
//! every drop an exact integer that the segmentation can be checked against.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MICROMETERS_PER_INCH;
use crate::raster::{RgbImage, DEFAULT_THRESHOLD};

/// Drop sizes printed on the reference control card, in µm.
pub const CONTROL_CARD_DIAMETERS_UM: [f64; 5] = [50.0, 100.0, 250.0, 500.0, 1000.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthDrop {
    pub center_x_um: f64,
    pub center_y_um: f64,
    pub diameter_um: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub card_width_um: f64,
    pub card_height_um: f64,
    pub dpi: f64,
    #[serde(default)]
    pub drops: Vec<SynthDrop>,
    #[serde(default = "default_background")]
    pub background_intensity: f64,
    #[serde(default = "default_drop")]
    pub drop_intensity: f64,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub rng_seed: u64,
}

fn default_background() -> f64 {
    0.85
}

fn default_drop() -> f64 {
    0.10
}

impl SynthSpec {
    /// Noiseless card with default intensities.
    pub fn new(card_width_um: f64, card_height_um: f64, dpi: f64, drops: Vec<SynthDrop>) -> Self {
        Self {
            card_width_um,
            card_height_um,
            dpi,
            drops,
            background_intensity: default_background(),
            drop_intensity: default_drop(),
            noise_sigma: 0.0,
            rng_seed: 0,
        }
    }

    /// Side of one pixel in µm.
    pub fn pixel_pitch_um(&self) -> f64 {
        MICROMETERS_PER_INCH / self.dpi
    }

    /// Rendered image size, `round(card_um * dpi / 25400)` per axis.
    pub fn image_dimensions(&self) -> (u32, u32) {
        let px = |um: f64| ((um / self.pixel_pitch_um()).round() as u32).max(1);
        (px(self.card_width_um), px(self.card_height_um))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("card_width_um", self.card_width_um),
            ("card_height_um", self.card_height_um),
            ("dpi", self.dpi),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::parameter(name, format!("must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("background_intensity", self.background_intensity),
            ("drop_intensity", self.drop_intensity),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::parameter(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        if !(self.drop_intensity < DEFAULT_THRESHOLD && DEFAULT_THRESHOLD < self.background_intensity) {
            return Err(Error::parameter(
                "drop_intensity",
                format!(
                    "drop ({}) and background ({}) intensities must straddle {DEFAULT_THRESHOLD}",
                    self.drop_intensity, self.background_intensity
                ),
            ));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::parameter(
                "noise_sigma",
                format!("must be non-negative, got {}", self.noise_sigma),
            ));
        }
        for (index, d) in self.drops.iter().enumerate() {
            let r = d.diameter_um / 2.0;
            let inside = d.diameter_um.is_finite()
                && d.diameter_um > 0.0
                && d.center_x_um - r >= 0.0
                && d.center_y_um - r >= 0.0
                && d.center_x_um + r <= self.card_width_um
                && d.center_y_um + r <= self.card_height_um;
            if !inside {
                return Err(Error::DropOutsideCard {
                    index,
                    center_x_um: d.center_x_um,
                    center_y_um: d.center_y_um,
                    diameter_um: d.diameter_um,
                });
            }
        }
        Ok(())
    }

    /// Sum of the drops' disk areas over the card area, in percent.
    pub fn analytic_coverage_pct(&self) -> f64 {
        let covered: f64 = self
            .drops
            .iter()
            .map(|d| std::f64::consts::PI * (d.diameter_um / 2.0).powi(2))
            .sum();
        covered / (self.card_width_um * self.card_height_um) * 100.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthDrop {
    pub diameter_um: f64,
    /// Pixels whose centers fall inside this drop's disk.
    pub area_px: u64,
    /// Drop center in pixel-index coordinates (pixel `i` spans `[i, i+1)`
    /// with its center at `i`).
    pub center_px: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub image_width_px: u32,
    pub image_height_px: u32,
    pub pixel_pitch_um: f64,
    pub drops: Vec<TruthDrop>,
    /// Pixels covered by at least one drop.
    pub covered_px: u64,
}

pub fn render(spec: &SynthSpec) -> Result<(RgbImage, GroundTruth)> {
    spec.validate()?;
    let (w, h) = spec.image_dimensions();
    let pitch = spec.pixel_pitch_um();
    let mut covered = vec![false; w as usize * h as usize];
    let mut truth = Vec::with_capacity(spec.drops.len());

    for d in &spec.drops {
        let cx = d.center_x_um / pitch - 0.5;
        let cy = d.center_y_um / pitch - 0.5;
        let r = d.diameter_um / 2.0 / pitch;
        let r2 = r * r;
        let x0 = (cx - r).floor().max(0.0) as u32;
        let y0 = (cy - r).floor().max(0.0) as u32;
        let x1 = ((cx + r).ceil() as u32).min(w - 1);
        let y1 = ((cy + r).ceil() as u32).min(h - 1);
        let mut area = 0u64;
        for y in y0..=y1 {
            for x in x0..=x1 {
                let dx = f64::from(x) - cx;
                let dy = f64::from(y) - cy;
                if dx * dx + dy * dy <= r2 {
                    area += 1;
                    covered[y as usize * w as usize + x as usize] = true;
                }
            }
        }
        truth.push(TruthDrop {
            diameter_um: d.diameter_um,
            area_px: area,
            center_px: (cx, cy),
        });
    }

    let mut levels: Vec<f64> = covered
        .iter()
        .map(|&c| if c { spec.drop_intensity } else { spec.background_intensity })
        .collect();
    if spec.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
        let noise = Normal::new(0.0, spec.noise_sigma)
            .map_err(|e| Error::parameter("noise_sigma", e.to_string()))?;
        for v in &mut levels {
            *v = (*v + noise.sample(&mut rng)).clamp(0.0, 1.0);
        }
    }

    let image = RgbImage::new(w, h, levels.iter().map(|&v| [v, v, v]).collect())?;
    let covered_px = covered.iter().filter(|&&c| c).count() as u64;
    Ok((
        image,
        GroundTruth {
            image_width_px: w,
            image_height_px: h,
            pixel_pitch_um: pitch,
            drops: truth,
            covered_px,
        },
    ))
}

/// Axis-aligned rectangle on the card, in µm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_um: f64,
    pub y_um: f64,
    pub width_um: f64,
    pub height_um: f64,
}

impl Region {
    pub fn whole_card(card_width_um: f64, card_height_um: f64) -> Self {
        Self {
            x_um: 0.0,
            y_um: 0.0,
            width_um: card_width_um,
            height_um: card_height_um,
        }
    }
}

/// Smallest center-to-center spacing accepted by [`grid_layout`]: the
/// diameter plus four pixels, so the dilated rings of neighbors never touch.
pub fn min_grid_spacing_um(diameter_um: f64, dpi: f64) -> f64 {
    diameter_um + 2.0 * (2.0 * MICROMETERS_PER_INCH / dpi)
}

/// Row-major grid of `count` identical drops filling `region` from its
/// top-left corner.
///
/// The spacing is rounded up to a whole number of pixels, and every center
/// is snapped to the midpoint of a vertical pixel edge. Drops of at least
/// one pixel in diameter therefore always cover two or more pixel centers.
pub fn grid_layout(
    region: Region,
    dpi: f64,
    diameter_um: f64,
    count: usize,
    spacing_um: f64,
) -> Result<Vec<SynthDrop>> {
    if !(dpi.is_finite() && dpi > 0.0) {
        return Err(Error::parameter("dpi", format!("must be positive, got {dpi}")));
    }
    if !(diameter_um.is_finite() && diameter_um > 0.0) {
        return Err(Error::parameter(
            "diameter_um",
            format!("must be positive, got {diameter_um}"),
        ));
    }
    let min = min_grid_spacing_um(diameter_um, dpi);
    if spacing_um.is_nan() || spacing_um <= min {
        return Err(Error::parameter(
            "spacing_um",
            format!("{spacing_um} um is too tight for {diameter_um} um drops at {dpi} dpi (need > {min:.1})"),
        ));
    }
    let pitch = MICROMETERS_PER_INCH / dpi;
    let step = (spacing_um / pitch).ceil() * pitch;
    let cols = (region.width_um / step).floor() as usize;
    if count == 0 {
        return Ok(Vec::new());
    }
    if cols == 0 {
        return Err(Error::LayoutDoesNotFit(format!(
            "region is {:.0} um wide, one cell needs {step:.0} um",
            region.width_um
        )));
    }
    let rows = count.div_ceil(cols);
    if rows as f64 * step > region.height_um {
        return Err(Error::LayoutDoesNotFit(format!(
            "{count} drops need {rows} rows of {step:.0} um, region is {:.0} um tall",
            region.height_um
        )));
    }

    Ok((0..count)
        .map(|k| {
            let (row, col) = (k / cols, k % cols);
            let x = region.x_um + (col as f64 + 0.5) * step;
            let y = region.y_um + (row as f64 + 0.5) * step;
            SynthDrop {
                center_x_um: (x / pitch).round() * pitch,
                center_y_um: ((y / pitch).floor() + 0.5) * pitch,
                diameter_um,
            }
        })
        .collect())
}

/// Five horizontal bands of `per_band` drops each, one band per control-card
/// drop size, smallest on top.
pub fn control_card_layout(
    card_width_um: f64,
    card_height_um: f64,
    dpi: f64,
    per_band: usize,
) -> Result<Vec<SynthDrop>> {
    let band_height = card_height_um / CONTROL_CARD_DIAMETERS_UM.len() as f64;
    let pitch = MICROMETERS_PER_INCH / dpi;
    let mut drops = Vec::new();
    for (i, &d) in CONTROL_CARD_DIAMETERS_UM.iter().enumerate() {
        let region = Region {
            x_um: 0.0,
            y_um: i as f64 * band_height,
            width_um: card_width_um,
            height_um: band_height,
        };
        let spacing = 2.0 * d + 6.0 * pitch;
        drops.extend(grid_layout(region, dpi, d, per_band, spacing)?);
    }
    Ok(drops)
}

/// Two equal drops side by side whose centers are `center_distance_um` apart.
pub fn overlap_pair(center_x_um: f64, center_y_um: f64, diameter_um: f64, center_distance_um: f64) -> [SynthDrop; 2] {
    let half = center_distance_um / 2.0;
    [
        SynthDrop {
            center_x_um: center_x_um - half,
            center_y_um,
            diameter_um,
        },
        SynthDrop {
            center_x_um: center_x_um + half,
            center_y_um,
            diameter_um,
        },
    ]
}

/// Area of the lens shared by two circles of radii `r1`, `r2` whose centers
/// are `d` apart.
pub fn circle_intersection_area(r1: f64, r2: f64, d: f64) -> f64 {
    use std::f64::consts::PI;
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        return PI * r1.min(r2).powi(2);
    }
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).acos();
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).acos();
    let k = ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)).sqrt();
    r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k
}
