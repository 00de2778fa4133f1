use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use spraycard::metrics::{CalibrationParams, DEFAULT_CALIBRATION_A, DEFAULT_CALIBRATION_B};
use spraycard::raster::StructuringElement;

use crate::error::{CliError, Result};
use crate::report::AnalysisConfig;

#[derive(Debug, Parser)]
#[command(name = "spraycard", version, about = "Droplet segmentation and spray-quality metrics for water-sensitive cards")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one card image (PNG or PGM).
    Analyze(AnalyzeArgs),
    /// Analyze every image in a directory.
    Batch(BatchArgs),
    /// Pixels needed to represent a diameter at a given dpi.
    DpiCheck(DpiArgs),
    /// Render a synthetic card and its ground truth from a JSON layout.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Settings {
    /// Physical card size in micrometers, e.g. 76000x26000.
    #[arg(long = "card-um", value_name = "WxH", value_parser = parse_card_um)]
    pub card_um: (f64, f64),

    /// Gray level below which a pixel counts as drop material.
    #[arg(long, default_value_t = spraycard::raster::DEFAULT_THRESHOLD)]
    pub threshold: f64,

    /// Side of the square structuring element (odd).
    #[arg(long = "se-side", default_value_t = 3)]
    pub se_side: u32,

    /// Segments smaller than this many pixels are treated as noise.
    #[arg(long = "min-area-px", default_value_t = spraycard::pipeline::DEFAULT_MIN_AREA_PX)]
    pub min_area_px: u64,

    /// Enable the power-law diameter correction d' = a*d^b. Pass `A,B` or
    /// `default` for the built-in coefficients.
    #[arg(long, value_name = "A,B")]
    pub calibrate: Option<String>,
}

impl Settings {
    pub fn to_config(&self) -> Result<AnalysisConfig> {
        let mut cfg = AnalysisConfig::new(self.card_um.0, self.card_um.1);
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(CliError::Usage(format!(
                "--threshold must lie strictly between 0 and 1, got {}",
                self.threshold
            )));
        }
        StructuringElement::square(self.se_side).map_err(|e| CliError::Usage(format!("--se-side: {e}")))?;
        cfg.threshold = self.threshold;
        cfg.se_side = self.se_side;
        cfg.min_area_px = self.min_area_px;
        if let Some(spec) = &self.calibrate {
            cfg.calibration = parse_calibration(spec)?;
        }
        Ok(cfg)
    }
}

fn parse_calibration(s: &str) -> Result<CalibrationParams> {
    let (a, b) = if s.trim() == "default" {
        (DEFAULT_CALIBRATION_A, DEFAULT_CALIBRATION_B)
    } else {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| CliError::Usage(format!("--calibrate expects A,B or `default`, got `{s}`")))?;
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--calibrate: `{v}` is not a number")))
        };
        (num(a)?, num(b)?)
    };
    CalibrationParams::enabled(a, b).map_err(|e| CliError::Usage(format!("--calibrate: {e}")))
}

fn parse_card_um(s: &str) -> std::result::Result<(f64, f64), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH in micrometers, got `{s}`"))?;
    let num = |v: &str| -> std::result::Result<f64, String> {
        let n: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
        if n.is_finite() && n > 0.0 {
            Ok(n)
        } else {
            Err(format!("card size must be positive, got {n}"))
        }
    };
    Ok((num(w)?, num(h)?))
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub image: PathBuf,

    #[command(flatten)]
    pub settings: Settings,

    /// Write the JSON report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Write the per-drop table as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,

    /// Write a PNG with every segment painted in its own color.
    #[arg(long, value_name = "FILE")]
    pub overlay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    pub dir: PathBuf,

    #[command(flatten)]
    pub settings: Settings,

    /// Directory for per-image reports and summary.json
    /// (default: DIR/spraycard-reports).
    #[arg(long = "out-dir", value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DpiArgs {
    /// Drop diameter in micrometers. Omit both arguments to print the
    /// reference table.
    #[arg(allow_negative_numbers = true, requires = "dpi")]
    pub diameter_um: Option<f64>,

    #[arg(allow_negative_numbers = true)]
    pub dpi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// JSON layout document.
    pub spec: PathBuf,

    /// Output PNG path.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Ground-truth JSON path (default: the PNG path with a .truth.json
    /// extension).
    #[arg(long, value_name = "FILE")]
    pub truth: Option<PathBuf>,

    /// Override the noise seed from the layout document.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn card_size_parsing() {
        assert_eq!(parse_card_um("76000x26000"), Ok((76_000.0, 26_000.0)));
        assert_eq!(parse_card_um("1.5X2"), Ok((1.5, 2.0)));
        assert!(parse_card_um("76000").is_err());
        assert!(parse_card_um("0x5").is_err());
        assert!(parse_card_um("ax5").is_err());
    }

    #[test]
    fn calibration_parsing() {
        let p = parse_calibration("default").unwrap();
        assert!(p.enabled);
        assert_eq!((p.a, p.b), (DEFAULT_CALIBRATION_A, DEFAULT_CALIBRATION_B));
        let p = parse_calibration("0.5, 1.1").unwrap();
        assert_eq!((p.a, p.b), (0.5, 1.1));
        assert!(parse_calibration("0.5").is_err());
        assert!(parse_calibration("-1,1").is_err());
    }

    #[test]
    fn verify_cli() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
