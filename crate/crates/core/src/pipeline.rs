//! The full card analysis: grayscale, binarize, dilate/erode, contour ring,
//! watershed, then the card statistics.

use serde::Serialize;

use crate::error::Result;
use crate::metrics::{compute_report, CalibrationParams, CardSpec, SprayReport};
use crate::raster::{
    binarize, contour_mask, dilate, erode, to_grayscale, BinaryImage, GrayImage, RgbImage, StructuringElement,
    DEFAULT_THRESHOLD,
};
use crate::segmentation::{extract_segments_within, find_contours, watershed, DropSegment, LabelMap};

pub const DEFAULT_MIN_AREA_PX: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub threshold: f64,
    pub se_side: u32,
    pub min_area_px: u64,
    pub calibration: CalibrationParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            se_side: StructuringElement::default().side(),
            min_area_px: DEFAULT_MIN_AREA_PX,
            calibration: CalibrationParams::default(),
        }
    }
}

/// Intermediate rasters and segments of one run.
#[derive(Debug, Clone)]
pub struct Segmentation {
    pub binary: BinaryImage,
    pub dilated: BinaryImage,
    pub contours: BinaryImage,
    pub contour_count: usize,
    pub labels: LabelMap,
    /// Segments measured over drop material only; the outer marker ring
    /// that dilation adds is not part of any drop's area.
    pub segments: Vec<DropSegment>,
}

pub fn segment(gray: &GrayImage, cfg: &PipelineConfig) -> Result<Segmentation> {
    let se = StructuringElement::square(cfg.se_side)?;
    let binary = binarize(gray, cfg.threshold)?;
    let dilated = dilate(&binary, se);
    let eroded = erode(&binary, se);
    let contours = contour_mask(&dilated, &eroded)?;
    let components = find_contours(&contours);
    let labels = watershed(gray, &components, &dilated)?;
    let segments = extract_segments_within(&labels, &binary, cfg.min_area_px)?;
    Ok(Segmentation {
        contour_count: components.len(),
        binary,
        dilated,
        contours,
        labels,
        segments,
    })
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub segmentation: Segmentation,
    pub report: SprayReport,
}

/// Analyzes a gray card image whose physical size is `card_width_um` by
/// `card_height_um`.
pub fn analyze_gray(gray: &GrayImage, card_width_um: f64, card_height_um: f64, cfg: &PipelineConfig) -> Result<Analysis> {
    let spec = CardSpec::new(card_width_um, card_height_um, gray.width(), gray.height())?;
    // Fail on a distorted capture before spending time on segmentation.
    spec.px_to_um_ratio()?;
    let segmentation = segment(gray, cfg)?;
    let report = compute_report(&segmentation.segments, &spec, &cfg.calibration)?;
    Ok(Analysis { segmentation, report })
}

pub fn analyze_rgb(img: &RgbImage, card_width_um: f64, card_height_um: f64, cfg: &PipelineConfig) -> Result<Analysis> {
    analyze_gray(&to_grayscale(img), card_width_um, card_height_um, cfg)
}
