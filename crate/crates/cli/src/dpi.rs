use spraycard::metrics::pixels_for;

use crate::args::DpiArgs;
use crate::error::{exit, CliError, Result};

const TABLE_DIAMETERS_UM: [f64; 7] = [10.0, 50.0, 100.0, 250.0, 500.0, 1000.0, 10_000.0];
const TABLE_DPI: [f64; 7] = [50.0, 100.0, 300.0, 600.0, 1200.0, 2400.0, 2600.0];

/// Human-readable verdict, e.g. `50 µm at 600 dpi: 1 px — representable`.
pub fn verdict(diameter_um: f64, dpi: f64) -> String {
    match pixels_for(diameter_um, dpi) {
        0 => format!("{diameter_um} µm at {dpi} dpi: not representable"),
        n => format!("{diameter_um} µm at {dpi} dpi: {n} px — representable"),
    }
}

/// Tab-separated `diameter_um dpi pixels representable`.
pub fn machine_row(diameter_um: f64, dpi: f64) -> String {
    let n = pixels_for(diameter_um, dpi);
    format!("{diameter_um}\t{dpi}\t{n}\t{}", n > 0)
}

pub fn table() -> String {
    let mut out = String::from("um\\dpi");
    for dpi in TABLE_DPI {
        out.push_str(&format!("\t{dpi}"));
    }
    out.push('\n');
    for d in TABLE_DIAMETERS_UM {
        out.push_str(&d.to_string());
        for dpi in TABLE_DPI {
            match pixels_for(d, dpi) {
                0 => out.push_str("\t-"),
                n => out.push_str(&format!("\t{n}")),
            }
        }
        out.push('\n');
    }
    out
}

pub fn run(args: &DpiArgs) -> Result<i32> {
    match (args.diameter_um, args.dpi) {
        (Some(d), Some(dpi)) => {
            if !(d.is_finite() && d > 0.0 && dpi.is_finite() && dpi > 0.0) {
                return Err(CliError::Usage(format!(
                    "diameter and dpi must be positive, got {d} um and {dpi} dpi"
                )));
            }
            println!("{}", verdict(d, dpi));
            println!("{}", machine_row(d, dpi));
        }
        _ => print!("{}", table()),
    }
    Ok(exit::OK)
}
