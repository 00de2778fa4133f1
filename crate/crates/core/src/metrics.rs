//! Physical measurements: pixel-to-micrometer scaling, area-derived
//! diameters, the power-law diameter correction, and the card-level spray
//! statistics (drop density, coverage density, VMD, relative span).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segmentation::DropSegment;

pub const MICROMETERS_PER_INCH: f64 = 25_400.0;
const UM2_PER_CM2: f64 = 1.0e8;

/// Coverage above which merged stains make counts and diameters unreliable.
pub const COVERAGE_RELIABILITY_LIMIT_PCT: f64 = 20.0;

/// Largest relative disagreement allowed between the horizontal and
/// vertical µm/px scales.
pub const ASPECT_TOLERANCE: f64 = 0.02;

/// A length spanning less than this fraction of a pixel is reported as not
/// representable, even where rounding would give one pixel.
pub const MIN_REPRESENTABLE_PX: f64 = 0.95;

pub const DEFAULT_CALIBRATION_A: f64 = 0.2192733;
pub const DEFAULT_CALIBRATION_B: f64 = 1.227941;

/// Physical card size and the pixel size of its image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CardSpec {
    pub card_width_um: f64,
    pub card_height_um: f64,
    pub image_width_px: u32,
    pub image_height_px: u32,
}

impl CardSpec {
    pub fn new(card_width_um: f64, card_height_um: f64, image_width_px: u32, image_height_px: u32) -> Result<Self> {
        for (name, v) in [("card_width_um", card_width_um), ("card_height_um", card_height_um)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::parameter(name, format!("must be positive, got {v}")));
            }
        }
        if image_width_px == 0 || image_height_px == 0 {
            return Err(Error::EmptyImage {
                width: image_width_px,
                height: image_height_px,
            });
        }
        Ok(Self {
            card_width_um,
            card_height_um,
            image_width_px,
            image_height_px,
        })
    }

    pub fn area_um2(&self) -> f64 {
        self.card_width_um * self.card_height_um
    }

    /// Micrometers per pixel along the card width. Fails when the vertical
    /// scale disagrees by more than [`ASPECT_TOLERANCE`].
    pub fn px_to_um_ratio(&self) -> Result<f64> {
        let horizontal = self.card_width_um / f64::from(self.image_width_px);
        let vertical = self.card_height_um / f64::from(self.image_height_px);
        if (vertical / horizontal - 1.0).abs() > ASPECT_TOLERANCE {
            return Err(Error::DistortedCapture {
                horizontal,
                vertical,
                tolerance_pct: ASPECT_TOLERANCE * 100.0,
            });
        }
        Ok(horizontal)
    }
}

/// Coefficients of the correction `d' = a * d^b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationParams {
    pub a: f64,
    pub b: f64,
    pub enabled: bool,
}

impl Default for CalibrationParams {
    fn default() -> Self {
        Self {
            a: DEFAULT_CALIBRATION_A,
            b: DEFAULT_CALIBRATION_B,
            enabled: false,
        }
    }
}

impl CalibrationParams {
    pub fn enabled(a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::parameter(name, format!("calibration coefficient must be positive, got {v}")));
            }
        }
        Ok(Self { a, b, enabled: true })
    }
}

/// Equivalent-circle diameter from the segment's pixel area.
pub fn segment_diameter_um(seg: &DropSegment, um_per_px: f64) -> f64 {
    diameter_from_area_px(seg.area_px as f64, um_per_px)
}

pub fn diameter_from_area_px(area_px: f64, um_per_px: f64) -> f64 {
    2.0 * (area_px / std::f64::consts::PI).sqrt() * um_per_px
}

pub fn calibrate_diameter(d_um: f64, params: &CalibrationParams) -> f64 {
    if params.enabled {
        params.a * d_um.powf(params.b)
    } else {
        d_um
    }
}

/// Percentile of an ascending slice by linear interpolation between the
/// closest ranks: position `p * (n - 1)` in zero-based indexing.
pub fn percentile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() || !(0.0..=1.0).contains(&p) {
        return None;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// Pixels spanned by `diameter_um` at `dpi`, rounded to nearest. Zero means
/// the length cannot be represented at that resolution.
pub fn pixels_for(diameter_um: f64, dpi: f64) -> u64 {
    let raw = diameter_um * dpi / MICROMETERS_PER_INCH;
    if raw < MIN_REPRESENTABLE_PX {
        0
    } else {
        raw.round() as u64
    }
}

/// Per-drop row of a [`SprayReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DropMeasurement {
    pub id: u32,
    pub area_px: u64,
    pub area_um2: f64,
    pub diameter_um: f64,
    pub calibrated_diameter_um: f64,
    pub centroid_x_px: f64,
    pub centroid_y_px: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SprayReport {
    pub drop_count: usize,
    /// Set when no drop was found; percentiles are then absent.
    pub no_drops: bool,
    pub um_per_px: f64,
    pub card_area_cm2: f64,
    pub total_drop_area_um2: f64,
    pub density_per_cm2: f64,
    pub coverage_density_pct: f64,
    pub vmd_um: Option<f64>,
    pub d10_um: Option<f64>,
    pub d90_um: Option<f64>,
    pub drs: Option<f64>,
    pub calibration_applied: bool,
    pub reliability_warning: bool,
    pub drops: Vec<DropMeasurement>,
}

/// Card-level statistics for a set of segments.
///
/// Percentiles are taken over the (optionally calibrated) per-drop
/// diameters. Coverage always uses measured areas.
pub fn compute_report(segments: &[DropSegment], spec: &CardSpec, cal: &CalibrationParams) -> Result<SprayReport> {
    let um_per_px = spec.px_to_um_ratio()?;
    let px_area_um2 = um_per_px * um_per_px;
    let card_area_um2 = spec.area_um2();

    let drops: Vec<DropMeasurement> = segments
        .iter()
        .map(|s| {
            let diameter_um = segment_diameter_um(s, um_per_px);
            DropMeasurement {
                id: s.label,
                area_px: s.area_px,
                area_um2: s.area_px as f64 * px_area_um2,
                diameter_um,
                calibrated_diameter_um: calibrate_diameter(diameter_um, cal),
                centroid_x_px: s.centroid.0,
                centroid_y_px: s.centroid.1,
            }
        })
        .collect();

    let total_drop_area_um2: f64 = drops.iter().map(|d| d.area_um2).sum();
    let mut diameters: Vec<f64> = drops.iter().map(|d| d.calibrated_diameter_um).collect();
    diameters.sort_by(f64::total_cmp);

    let d10_um = percentile(&diameters, 0.1);
    let vmd_um = percentile(&diameters, 0.5);
    let d90_um = percentile(&diameters, 0.9);
    let drs = match (d10_um, vmd_um, d90_um) {
        (Some(lo), Some(mid), Some(hi)) if mid > 0.0 => Some((hi - lo) / mid),
        _ => None,
    };
    let coverage_density_pct = (total_drop_area_um2 / card_area_um2 * 100.0).min(100.0);
    let card_area_cm2 = card_area_um2 / UM2_PER_CM2;

    Ok(SprayReport {
        drop_count: drops.len(),
        no_drops: drops.is_empty(),
        um_per_px,
        card_area_cm2,
        total_drop_area_um2,
        density_per_cm2: drops.len() as f64 / card_area_cm2,
        coverage_density_pct,
        vmd_um,
        d10_um,
        d90_um,
        drs,
        calibration_applied: cal.enabled,
        reliability_warning: coverage_density_pct > COVERAGE_RELIABILITY_LIMIT_PCT,
        drops,
    })
}
