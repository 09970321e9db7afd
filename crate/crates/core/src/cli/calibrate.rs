use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{error, info, warn};

use super::{CalibrateArgs, CliError};
use crate::calibration::{
    fit_mle, initial_guess, read_specimens, write_trace, CalibrationError, FatigueParams, FitOptions, FitParameter,
    FitReport, RestartSummary,
};
use crate::material::{read_partial_material, MaterialFileError, MaterialParams, PartialMaterial};
use crate::reliability::output::OutputError;

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOptions {
    pub fit: FitOptions,
    pub out: PathBuf,
}

pub(super) fn options_from_args(a: &CalibrateArgs) -> Result<CalibrationOptions, CliError> {
    let mut fit = FitOptions { seed: a.seed, restarts: a.restarts, max_iterations: a.max_iterations, ..FitOptions::default() };
    if let Some(names) = &a.free {
        fit.free = names
            .iter()
            .map(|n| {
                let n = n.trim();
                FitParameter::ALL
                    .into_iter()
                    .find(|p| p.name() == n || (n == "m" && *p == FitParameter::M))
                    .ok_or_else(|| CliError::Usage(format!("unknown parameter `{n}` in --free")))
            })
            .collect::<Result<_, _>>()?;
    }
    Ok(CalibrationOptions { fit, out: a.out.clone() })
}

fn write_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Write { path: path.display().to_string(), source: OutputError::Io(e) }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| write_err(path, e))
}

fn write_trace_file(dir: &Path, restarts: &[RestartSummary]) -> Result<PathBuf, CliError> {
    let path = dir.join("fit_trace.csv");
    let f = File::create(&path).map_err(|e| write_err(&path, e))?;
    let mut w = BufWriter::new(f);
    write_trace(&mut w, restarts).and_then(|_| w.flush()).map_err(|e| write_err(&path, e))?;
    Ok(path)
}

/// Everything but the fitted parameters comes from the fixed file; fitted
/// parameters it lists serve as the starting point.
fn base_material(fixed: &PartialMaterial, start: &FatigueParams) -> Result<MaterialParams, CliError> {
    let mut p = fixed.clone();
    for (key, value) in [
        ("sigma_f", start.cmb.sigma_f),
        ("b", start.cmb.b),
        ("eps_f", start.cmb.eps_f),
        ("c", start.cmb.c),
        ("m_weibull", start.m),
    ] {
        if p.get(key).is_none() {
            p.values.push((key, value, 0));
        }
    }
    Ok(p.complete()?)
}

/// Fits the specimen data; writes `fitted_material.txt`, `fit_report.txt`
/// and `fit_trace.csv` into `opts.out`.
pub fn run_calibration(data: &Path, fixed: &Path, opts: &CalibrationOptions) -> Result<FitReport, CliError> {
    let records = read_specimens(data)?;
    let fixed = read_partial_material(fixed)?;
    let e = fixed.get("E").ok_or(MaterialFileError::Missing("E"))?;
    info!("{} specimens from {}", records.len(), data.display());

    let mut start = initial_guess(&records, e);
    let mut from_file = 0;
    for p in FitParameter::ALL {
        if let Some(v) = fixed.get(p.name()) {
            p.set(&mut start, v);
            from_file += 1;
        }
    }
    if from_file < FitParameter::ALL.len() {
        info!("starting point: {from_file} of 5 values from the parameter file, the rest estimated from the data");
    }
    let base = base_material(&fixed, &start)?;
    let start = FatigueParams::from_material(&base);

    std::fs::create_dir_all(&opts.out).map_err(|e| write_err(&opts.out, e))?;
    match fit_mle(&records, &start, &opts.fit) {
        Ok(report) => {
            write_trace_file(&opts.out, &report.restarts)?;
            let fitted = report.fitted_material(&base);
            write_text(&opts.out.join("fitted_material.txt"), &fitted.to_file_string())?;
            write_text(&opts.out.join("fit_report.txt"), &report.to_text())?;
            for w in &report.warnings {
                warn!("{w}");
            }
            Ok(report)
        }
        Err(err) => {
            if let CalibrationError::EstimationFailed { restarts, .. } = &err {
                let path = write_trace_file(&opts.out, restarts)?;
                error!("optimizer trace written to {}", path.display());
            }
            if matches!(err, CalibrationError::TooFewRecords(_) | CalibrationError::TooFewStrainLevels(_)) {
                warn!("the data set cannot determine the model: {err}");
            }
            Err(err.into())
        }
    }
}
