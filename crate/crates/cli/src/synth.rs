//! `synth`: expands a JSON layout document into a [`SynthSpec`], renders it,
//! and writes the PNG plus a ground-truth sidecar.
//!
//! Layout document fields: `card_width_um`, `card_height_um`, `dpi`, and any
//! mix of `drops` (explicit list), `grids`, `overlap_pairs` and
//! `control_card`; optional `background_intensity`, `drop_intensity`,
//! `noise_sigma`, `rng_seed`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spraycard::synthcard::{
    control_card_layout, grid_layout, overlap_pair, render, GroundTruth, Region, SynthDrop, SynthSpec,
};

use crate::args::SynthArgs;
use crate::error::{exit, CliError, Result};
use crate::imageio::save_png;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub diameter_um: f64,
    pub count: usize,
    pub spacing_um: f64,
    #[serde(default)]
    pub region: Option<Region>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapDoc {
    pub center_x_um: f64,
    pub center_y_um: f64,
    pub diameter_um: f64,
    pub center_distance_um: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlCardDoc {
    pub per_band: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutDocument {
    pub card_width_um: f64,
    pub card_height_um: f64,
    pub dpi: f64,
    #[serde(default)]
    pub drops: Vec<SynthDrop>,
    #[serde(default)]
    pub grids: Vec<GridDoc>,
    #[serde(default)]
    pub overlap_pairs: Vec<OverlapDoc>,
    #[serde(default)]
    pub control_card: Option<ControlCardDoc>,
    pub background_intensity: Option<f64>,
    pub drop_intensity: Option<f64>,
    pub noise_sigma: Option<f64>,
    pub rng_seed: Option<u64>,
}

fn field_error(field: impl std::fmt::Display, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("at `{field}`: {e}"))
}

impl LayoutDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            field_error(if path.is_empty() { ".".into() } else { path }, e.into_inner())
        })
    }

    /// Expands layouts into an explicit drop list and validates the result.
    pub fn into_spec(self) -> Result<SynthSpec> {
        let mut drops = self.drops;
        let card = Region::whole_card(self.card_width_um, self.card_height_um);
        for (i, g) in self.grids.iter().enumerate() {
            let region = g.region.unwrap_or(card);
            drops.extend(
                grid_layout(region, self.dpi, g.diameter_um, g.count, g.spacing_um)
                    .map_err(|e| field_error(format!("grids[{i}]"), e))?,
            );
        }
        for p in &self.overlap_pairs {
            drops.extend(overlap_pair(p.center_x_um, p.center_y_um, p.diameter_um, p.center_distance_um));
        }
        if let Some(c) = &self.control_card {
            drops.extend(
                control_card_layout(self.card_width_um, self.card_height_um, self.dpi, c.per_band)
                    .map_err(|e| field_error("control_card", e))?,
            );
        }

        let mut spec = SynthSpec::new(self.card_width_um, self.card_height_um, self.dpi, drops);
        if let Some(v) = self.background_intensity {
            spec.background_intensity = v;
        }
        if let Some(v) = self.drop_intensity {
            spec.drop_intensity = v;
        }
        if let Some(v) = self.noise_sigma {
            spec.noise_sigma = v;
        }
        if let Some(v) = self.rng_seed {
            spec.rng_seed = v;
        }
        spec.validate().map_err(|e| match e {
            spraycard::Error::Parameter { name, reason } => field_error(name, reason),
            e @ spraycard::Error::DropOutsideCard { .. } => field_error("drops", e),
            e => CliError::Usage(e.to_string()),
        })?;
        Ok(spec)
    }
}

#[derive(Debug, Serialize)]
pub struct TruthFile<'a> {
    pub spec: &'a SynthSpec,
    pub analytic_coverage_pct: f64,
    pub truth: &'a GroundTruth,
}

pub fn default_truth_path(png: &Path) -> PathBuf {
    png.with_extension("truth.json")
}

pub fn run(args: &SynthArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.spec).map_err(|e| CliError::Usage(format!("{}: {e}", args.spec.display())))?;
    let mut spec = LayoutDocument::parse(&text)
        .and_then(LayoutDocument::into_spec)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.spec.display())))?;
    if let Some(seed) = args.seed {
        spec.rng_seed = seed;
    }
    let (image, truth) = render(&spec)?;
    save_png(&args.out, &image)?;

    let truth_path = args.truth.clone().unwrap_or_else(|| default_truth_path(&args.out));
    let doc = TruthFile {
        spec: &spec,
        analytic_coverage_pct: spec.analytic_coverage_pct(),
        truth: &truth,
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("truth serializes");
    json.push('\n');
    std::fs::write(&truth_path, json).map_err(|e| CliError::io(&truth_path, e))?;

    println!(
        "rendered {}x{} px card with {} drops (coverage {:.2}%) to {}; ground truth in {}",
        truth.image_width_px,
        truth.image_height_px,
        truth.drops.len(),
        doc.analytic_coverage_pct,
        args.out.display(),
        truth_path.display()
    );
    Ok(exit::OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_field_path_for_type_errors() {
        let err = LayoutDocument::parse(
            r#"{"card_width_um": 1000, "card_height_um": 1000, "dpi": 600,
                "grids": [{"diameter_um": 100, "count": "many", "spacing_um": 400}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("grids[0].count"), "{err}");
    }

    #[test]
    fn rejects_unknown_fields() {
        let err = LayoutDocument::parse(r#"{"card_width_um": 1, "card_height_um": 1, "dpi": 1, "colour": 3}"#)
            .unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn reports_layout_errors_by_field() {
        let doc = LayoutDocument::parse(
            r#"{"card_width_um": 5000, "card_height_um": 5000, "dpi": 600,
                "grids": [{"diameter_um": 1000, "count": 3, "spacing_um": 1000}]}"#,
        )
        .unwrap();
        let err = doc.into_spec().unwrap_err();
        assert!(err.to_string().contains("grids[0]"), "{err}");

        let doc = LayoutDocument::parse(
            r#"{"card_width_um": 5000, "card_height_um": 5000, "dpi": 600, "noise_sigma": -1}"#,
        )
        .unwrap();
        assert!(doc.into_spec().unwrap_err().to_string().contains("noise_sigma"));
    }

    #[test]
    fn expands_all_layout_kinds() {
        let doc = LayoutDocument::parse(
            r#"{"card_width_um": 76000, "card_height_um": 26000, "dpi": 600,
                "drops": [{"center_x_um": 1000, "center_y_um": 1000, "diameter_um": 500}],
                "overlap_pairs": [{"center_x_um": 38000, "center_y_um": 13000, "diameter_um": 2000, "center_distance_um": 1500}],
                "control_card": {"per_band": 4}}"#,
        )
        .unwrap();
        let spec = doc.into_spec().unwrap();
        assert_eq!(spec.drops.len(), 1 + 2 + 20);
    }

    #[test]
    fn truth_path_default() {
        assert_eq!(default_truth_path(Path::new("out/card.png")), PathBuf::from("out/card.truth.json"));
    }
}
