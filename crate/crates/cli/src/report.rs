//! Report file format.
//!
//! A report is a JSON object with three members: `generated_at` (wall-clock
//! time, informational only), `payload`, and `payload_sha256`, the SHA-256
//! of the compact JSON serialization of `payload`. Everything in `payload`
//! is a pure function of the input bytes and the analysis settings, so two
//! runs over the same file produce the same payload and checksum.
//! The schema is published in `docs/report.schema.json`.

use std::path::Path;

use serde::Serialize;
use spraycard::metrics::{CalibrationParams, SprayReport};
use spraycard::PipelineConfig;

use crate::error::{CliError, Result};
use crate::imageio::sha256_hex;

pub const TOOL_NAME: &str = "spraycard";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CSV_HEADER: [&str; 7] = [
    "id",
    "area_px",
    "area_um2",
    "diameter_um",
    "calibrated_diameter_um",
    "centroid_x_px",
    "centroid_y_px",
];

/// Analysis settings as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub threshold: f64,
    pub se_side: u32,
    pub min_area_px: u64,
    pub card_width_um: f64,
    pub card_height_um: f64,
    pub calibration: CalibrationParams,
}

impl AnalysisConfig {
    pub fn new(card_width_um: f64, card_height_um: f64) -> Self {
        let p = PipelineConfig::default();
        Self {
            threshold: p.threshold,
            se_side: p.se_side,
            min_area_px: p.min_area_px,
            card_width_um,
            card_height_um,
            calibration: p.calibration,
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            threshold: self.threshold,
            se_side: self.se_side,
            min_area_px: self.min_area_px,
            calibration: self.calibration,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl ToolInfo {
    pub fn current() -> Self {
        Self {
            name: TOOL_NAME,
            version: TOOL_VERSION,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputInfo {
    /// File name without directories.
    pub file: String,
    pub format: &'static str,
    pub sha256: String,
    pub width_px: u32,
    pub height_px: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportPayload {
    pub tool: ToolInfo,
    pub input: InputInfo,
    pub config: AnalysisConfig,
    pub report: SprayReport,
}

/// Payload wrapped with its checksum and a timestamp.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T> {
    pub generated_at: String,
    pub payload_sha256: String,
    pub payload: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn seal(payload: T) -> Self {
        let compact = serde_json::to_vec(&payload).expect("payload serializes");
        Self {
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            payload_sha256: sha256_hex(&compact),
            payload,
        }
    }

    pub fn to_pretty_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_pretty_json()).map_err(|e| CliError::io(path, e))
    }
}

pub type ReportFile = Envelope<ReportPayload>;

pub fn write_csv(path: &Path, report: &SprayReport) -> Result<()> {
    let to_err = |e: csv::Error| CliError::input(path, e);
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    w.write_record(CSV_HEADER).map_err(to_err)?;
    for d in &report.drops {
        w.serialize((
            d.id,
            d.area_px,
            d.area_um2,
            d.diameter_um,
            d.calibrated_diameter_um,
            d.centroid_x_px,
            d.centroid_y_px,
        ))
        .map_err(to_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
