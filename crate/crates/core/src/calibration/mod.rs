//! Maximum-likelihood calibration of the strain-life curve and the Weibull
//! shape from strain-controlled specimen tests.

mod fit;

use std::io::Read;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::material::{cmb_life, CmbParams, MaterialError, MaterialParams};
use crate::sum::CompensatedSum;

pub use fit::{fit_mle, initial_guess, write_trace, FitOptions, FitReport, RestartSummary};

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("specimen data line {line}: {message}")]
    Data { line: u64, message: String },
    #[error("need at least 3 specimens, found {0}")]
    TooFewRecords(usize),
    #[error("need at least 2 distinct strain levels, found {0}")]
    TooFewStrainLevels(usize),
    #[error("no free parameters to fit")]
    NothingToFit,
    #[error("starting point is inadmissible: {0}")]
    InadmissibleStart(String),
    #[error("estimation failed: no restart converged (best log-likelihood {best_log_likelihood})")]
    EstimationFailed { best_log_likelihood: f64, restarts: Vec<RestartSummary> },
    #[error("optimizer error: {0}")]
    Optimizer(String),
}

/// One failed specimen.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct SpecimenRecord {
    pub n_cycles: f64,
    pub strain_amplitude: f64,
    pub gauge_area: f64,
}

impl SpecimenRecord {
    fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("n_cycles", self.n_cycles),
            ("strain_amplitude", self.strain_amplitude),
            ("gauge_area", self.gauge_area),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(())
    }
}

/// Reads `n_cycles,strain_amplitude,gauge_area` CSV.
pub fn parse_specimens<R: Read>(reader: R) -> Result<Vec<SpecimenRecord>, CalibrationError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CalibrationError::Data { line: 1, message: e.to_string() })?
        .clone();
    for required in ["n_cycles", "strain_amplitude", "gauge_area"] {
        if !headers.iter().any(|h| h == required) {
            return Err(CalibrationError::Data { line: 1, message: format!("missing column `{required}`") });
        }
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CalibrationError::Data {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let r: SpecimenRecord =
            rec.deserialize(Some(&headers)).map_err(|e| CalibrationError::Data { line, message: e.to_string() })?;
        r.validate().map_err(|message| CalibrationError::Data { line, message })?;
        out.push(r);
    }
    Ok(out)
}

pub fn read_specimens(path: &Path) -> Result<Vec<SpecimenRecord>, CalibrationError> {
    let file = std::fs::File::open(path)
        .map_err(|source| CalibrationError::Io { path: path.display().to_string(), source })?;
    parse_specimens(file)
}

/// The parameters the specimen likelihood depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FatigueParams {
    pub cmb: CmbParams,
    pub m: f64,
}

impl FatigueParams {
    pub fn from_material(p: &MaterialParams) -> Self {
        Self { cmb: p.cmb, m: p.weibull_shape }
    }

    pub fn admissible(&self) -> bool {
        let c = &self.cmb;
        CmbParams::new(c.sigma_f, c.b, c.eps_f, c.c, c.e).is_ok() && self.m >= 1.0 && self.m.is_finite()
    }

    /// Copies the fitted values into a full parameter set.
    pub fn apply_to(&self, base: &MaterialParams) -> MaterialParams {
        let mut out = *base;
        out.cmb = self.cmb;
        out.weibull_shape = self.m;
        out
    }
}

/// Parameters the optimizer may vary, each with a transform onto the real line
/// that enforces its sign constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitParameter {
    SigmaF,
    B,
    EpsF,
    C,
    M,
}

impl FitParameter {
    pub const ALL: [FitParameter; 5] =
        [FitParameter::SigmaF, FitParameter::B, FitParameter::EpsF, FitParameter::C, FitParameter::M];

    pub fn name(self) -> &'static str {
        match self {
            FitParameter::SigmaF => "sigma_f",
            FitParameter::B => "b",
            FitParameter::EpsF => "eps_f",
            FitParameter::C => "c",
            FitParameter::M => "m_weibull",
        }
    }

    pub fn get(self, p: &FatigueParams) -> f64 {
        match self {
            FitParameter::SigmaF => p.cmb.sigma_f,
            FitParameter::B => p.cmb.b,
            FitParameter::EpsF => p.cmb.eps_f,
            FitParameter::C => p.cmb.c,
            FitParameter::M => p.m,
        }
    }

    pub fn set(self, p: &mut FatigueParams, v: f64) {
        match self {
            FitParameter::SigmaF => p.cmb.sigma_f = v,
            FitParameter::B => p.cmb.b = v,
            FitParameter::EpsF => p.cmb.eps_f = v,
            FitParameter::C => p.cmb.c = v,
            FitParameter::M => p.m = v,
        }
    }

    pub fn to_internal(self, v: f64) -> f64 {
        match self {
            FitParameter::SigmaF | FitParameter::EpsF => v.ln(),
            FitParameter::B | FitParameter::C => (-v).ln(),
            FitParameter::M => (v - 1.0).ln(),
        }
    }

    pub fn to_natural(self, x: f64) -> f64 {
        match self {
            FitParameter::SigmaF | FitParameter::EpsF => x.exp(),
            FitParameter::B | FitParameter::C => -x.exp(),
            FitParameter::M => 1.0 + x.exp(),
        }
    }
}

/// `eta_i = N_det(eps_i) A_i^(-1/m)` for a homogeneously loaded gauge surface.
pub fn specimen_eta(record: &SpecimenRecord, theta: &FatigueParams) -> Result<f64, MaterialError> {
    let life = cmb_life(record.strain_amplitude, &theta.cmb)?;
    Ok(life.cycles * record.gauge_area.powf(-1.0 / theta.m))
}

/// `ln f(n; eta, m)` of the Weibull density.
pub fn weibull_log_density(n: f64, eta: f64, m: f64) -> f64 {
    let t = n / eta;
    m.ln() - eta.ln() + (m - 1.0) * t.ln() - t.powf(m)
}

/// Sum of Weibull log-densities over all specimens; `-inf` when `theta` is
/// inadmissible or any specimen has no finite scale.
pub fn log_likelihood(records: &[SpecimenRecord], theta: &FatigueParams) -> f64 {
    if !theta.admissible() {
        return f64::NEG_INFINITY;
    }
    let mut acc = CompensatedSum::new();
    for r in records {
        let eta = match specimen_eta(r, theta) {
            Ok(eta) if eta > 0.0 && eta.is_finite() => eta,
            _ => return f64::NEG_INFINITY,
        };
        acc.add(weibull_log_density(r.n_cycles, eta, theta.m));
    }
    let ll = acc.value();
    if ll.is_nan() {
        f64::NEG_INFINITY
    } else {
        ll
    }
}

/// Number of distinct strain amplitudes.
pub fn strain_levels(records: &[SpecimenRecord]) -> usize {
    let mut levels: Vec<f64> = records.iter().map(|r| r.strain_amplitude).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels.len()
}
