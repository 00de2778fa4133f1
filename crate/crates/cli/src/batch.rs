//! Directory mode. Every regular, non-hidden file is analyzed on its own;
//! a file that fails is recorded in the summary and does not stop the run.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analyze::analyze_file;
use crate::args::BatchArgs;
use crate::error::{exit, CliError, Result};
use crate::report::{AnalysisConfig, Envelope, ToolInfo};

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CardRow {
    Ok {
        file: String,
        report: String,
        drop_count: usize,
        total_drop_area_um2: f64,
        density_per_cm2: f64,
        coverage_density_pct: f64,
        vmd_um: Option<f64>,
        drs: Option<f64>,
        reliability_warning: bool,
    },
    Failed {
        file: String,
        exit_code: i32,
        error: String,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchSummary {
    pub tool: ToolInfo,
    pub config: AnalysisConfig,
    pub analyzed: usize,
    pub failed: usize,
    pub cards: Vec<CardRow>,
}

fn list_inputs(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if !hidden && entry.file_type().map_err(|e| CliError::io(entry.path(), e))?.is_file() {
            files.push(entry.path());
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!("{}: no input files", dir.display())));
    }
    Ok(files)
}

pub fn run(args: &BatchArgs) -> Result<i32> {
    let cfg = args.settings.to_config()?;
    let inputs = list_inputs(&args.dir)?;
    let out_dir = args
        .out_dir
        .clone()
        .unwrap_or_else(|| args.dir.join("spraycard-reports"));
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;

    let results: Vec<_> = inputs.par_iter().map(|p| analyze_file(p, &cfg)).collect();

    let mut rows = Vec::with_capacity(inputs.len());
    for (path, result) in inputs.iter().zip(results) {
        let file = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
        match result {
            Ok(done) => {
                let report_name = format!("{file}.json");
                done.report.write(&out_dir.join(&report_name))?;
                let r = &done.report.payload.report;
                rows.push(CardRow::Ok {
                    file,
                    report: report_name,
                    drop_count: r.drop_count,
                    total_drop_area_um2: r.total_drop_area_um2,
                    density_per_cm2: r.density_per_cm2,
                    coverage_density_pct: r.coverage_density_pct,
                    vmd_um: r.vmd_um,
                    drs: r.drs,
                    reliability_warning: r.reliability_warning,
                });
            }
            Err(e) => {
                eprintln!("error: {e}");
                rows.push(CardRow::Failed {
                    file,
                    exit_code: e.exit_code(),
                    error: e.to_string(),
                })
            }
        }
    }

    let failed = rows.iter().filter(|r| matches!(r, CardRow::Failed { .. })).count();
    let warned = rows
        .iter()
        .any(|r| matches!(r, CardRow::Ok { reliability_warning: true, .. }));
    print_table(&rows);
    let summary = Envelope::seal(BatchSummary {
        tool: ToolInfo::current(),
        config: cfg,
        analyzed: rows.len() - failed,
        failed,
        cards: rows,
    });
    summary.write(&out_dir.join("summary.json"))?;

    Ok(if failed > 0 {
        exit::INPUT
    } else if warned {
        exit::RELIABILITY
    } else {
        exit::OK
    })
}

fn print_table(rows: &[CardRow]) {
    println!(
        "{:<28} {:>7} {:>14} {:>11} {:>9} {:>7}",
        "card", "drops", "density/cm2", "coverage%", "VMD um", "DRS"
    );
    let opt = |v: Option<f64>, p: usize| v.map_or_else(|| "-".to_string(), |x| format!("{x:.p$}"));
    for row in rows {
        match row {
            CardRow::Ok {
                file,
                drop_count,
                density_per_cm2,
                coverage_density_pct,
                vmd_um,
                drs,
                reliability_warning,
                ..
            } => println!(
                "{:<28} {:>7} {:>14.2} {:>11.2} {:>9} {:>7}{}",
                file,
                drop_count,
                density_per_cm2,
                coverage_density_pct,
                opt(*vmd_um, 0),
                opt(*drs, 2),
                if *reliability_warning { "  !" } else { "" }
            ),
            CardRow::Failed { file, error, .. } => println!("{file:<28} failed: {error}"),
        }
    }
}
