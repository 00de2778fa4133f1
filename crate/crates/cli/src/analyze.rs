use std::io::Write;
use std::path::Path;

use spraycard::pipeline::{analyze_gray, analyze_rgb, Analysis};

use crate::args::AnalyzeArgs;
use crate::error::{exit, CliError, Result};
use crate::imageio::{self, CardImage, LoadedImage};
use crate::report::{write_csv, AnalysisConfig, Envelope, InputInfo, ReportFile, ReportPayload, ToolInfo};

pub struct Analyzed {
    pub loaded: LoadedImage,
    pub analysis: Analysis,
    pub report: ReportFile,
}

/// Runs the pipeline on one file and builds its report.
pub fn analyze_file(path: &Path, cfg: &AnalysisConfig) -> Result<Analyzed> {
    let loaded = imageio::load(path)?;
    let pipeline = cfg.pipeline();
    let (w_um, h_um) = (cfg.card_width_um, cfg.card_height_um);
    let result = match &loaded.image {
        CardImage::Rgb(img) => analyze_rgb(img, w_um, h_um, &pipeline),
        CardImage::Gray(img) => analyze_gray(img, w_um, h_um, &pipeline),
    };
    let analysis = result.map_err(|e| match e {
        e @ spraycard::Error::DistortedCapture { .. } => CliError::Distorted {
            path: path.display().to_string(),
            source: e,
        },
        e => CliError::input(path, e),
    })?;

    let (width_px, height_px) = loaded.image.dimensions();
    let payload = ReportPayload {
        tool: ToolInfo::current(),
        input: InputInfo {
            file: path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            format: loaded.format,
            sha256: loaded.sha256.clone(),
            width_px,
            height_px,
        },
        config: *cfg,
        report: analysis.report.clone(),
    };
    Ok(Analyzed {
        loaded,
        analysis,
        report: Envelope::seal(payload),
    })
}

pub fn run(args: &AnalyzeArgs) -> Result<i32> {
    let cfg = args.settings.to_config()?;
    let done = analyze_file(&args.image, &cfg)?;
    let report = &done.report.payload.report;

    match &args.out {
        Some(path) => done.report.write(path)?,
        None => std::io::stdout()
            .write_all(done.report.to_pretty_json().as_bytes())
            .map_err(|e| CliError::io("<stdout>", e))?,
    }
    if let Some(path) = &args.csv {
        write_csv(path, report)?;
    }
    if let Some(path) = &args.overlay {
        let seg = &done.analysis.segmentation;
        let img = imageio::overlay(&done.loaded.image.to_rgb(), &seg.labels, &seg.binary, &seg.segments);
        imageio::save_png(path, &img)?;
    }

    if args.out.is_some() {
        println!(
            "{}: {} drops, {:.2} drops/cm2, coverage {:.2}%{}",
            args.image.display(),
            report.drop_count,
            report.density_per_cm2,
            report.coverage_density_pct,
            if report.reliability_warning { " (above reliability limit)" } else { "" }
        );
    }
    if report.reliability_warning {
        eprintln!(
            "warning: coverage {:.2}% exceeds {}%; drop counts and diameters are unreliable",
            report.coverage_density_pct,
            spraycard::metrics::COVERAGE_RELIABILITY_LIMIT_PCT
        );
        Ok(exit::RELIABILITY)
    } else {
        Ok(exit::OK)
    }
}
