use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{AnalyzeArgs, CliError, CommonArgs};
use crate::exec::Parallelism;
use crate::quadrature::MAX_POINTS_PER_DIM;
use crate::reliability::output::Spacing;

pub const DEFAULT_LQ: usize = 4;
pub const DEFAULT_GRID_COUNT: usize = 200;
pub const DEFAULT_REPORT_NSTAR: f64 = 1e-2;

/// Optional TOML defaults; relative paths are taken relative to the file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub mesh: Option<PathBuf>,
    pub material: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub exec: Option<String>,
    pub lq: Option<usize>,
    pub segments: Option<u32>,
    pub report_cycles: Option<f64>,
    pub report_nstar: Option<f64>,
    #[serde(default)]
    pub grid: GridFile,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<Spacing>,
}

/// Cycle grid of the PoF curve; missing ends follow the Weibull scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: usize,
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReportPoint {
    Cycles(f64),
    /// Multiples of the Weibull scale.
    NStar(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mesh: PathBuf,
    pub material: PathBuf,
    pub lq: usize,
    pub segments: u32,
    pub out: PathBuf,
    pub grid: GridConfig,
    pub report: ReportPoint,
    pub exec: Parallelism,
}

impl RunConfig {
    pub fn new(mesh: impl Into<PathBuf>, material: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            mesh: mesh.into(),
            material: material.into(),
            lq: DEFAULT_LQ,
            segments: 1,
            out: out.into(),
            grid: GridConfig { start: None, stop: None, count: DEFAULT_GRID_COUNT, spacing: Spacing::Log },
            report: ReportPoint::NStar(DEFAULT_REPORT_NSTAR),
            exec: Parallelism::default(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if !(1..=MAX_POINTS_PER_DIM).contains(&self.lq) {
            return usage(format!("--lq must be in 1..={MAX_POINTS_PER_DIM}, got {}", self.lq));
        }
        if self.segments == 0 {
            return usage("--segments must be at least 1".into());
        }
        if self.grid.count == 0 {
            return usage("--grid-count must be at least 1".into());
        }
        for (name, v) in [("--grid-start", self.grid.start), ("--grid-stop", self.grid.stop)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return usage(format!("{name} must be a finite non-negative cycle count, got {v}"));
                }
            }
        }
        let r = match self.report {
            ReportPoint::Cycles(v) | ReportPoint::NStar(v) => v,
        };
        if !(r >= 0.0 && r.is_finite()) {
            return usage(format!("report point must be finite and non-negative, got {r}"));
        }
        Ok(())
    }
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let err = |message: String| CliError::Config { path: path.display().to_string(), message };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let mut cfg: ConfigFile = toml::from_str(&text).map_err(|e| err(e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new(""));
    for p in [&mut cfg.mesh, &mut cfg.material, &mut cfg.out].into_iter().flatten() {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    if cfg.report_cycles.is_some() && cfg.report_nstar.is_some() {
        return Err(err("report_cycles and report_nstar are mutually exclusive".into()));
    }
    Ok(cfg)
}

/// Merges config file and flags; flags win.
pub(super) fn resolve(common: &CommonArgs, analyze: Option<&AnalyzeArgs>) -> Result<RunConfig, CliError> {
    let file = match &common.config {
        Some(p) => read_config(p)?,
        None => ConfigFile::default(),
    };
    let mesh = common
        .mesh
        .clone()
        .or(file.mesh)
        .ok_or_else(|| CliError::Usage("--mesh is required (flag or config file)".into()))?;
    let material = common
        .material
        .clone()
        .or(file.material)
        .ok_or_else(|| CliError::Usage("--material is required (flag or config file)".into()))?;
    let out = common.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("."));
    let mut cfg = RunConfig::new(mesh, material, out);

    let file_exec = match &file.exec {
        Some(s) => Some(s.parse::<Parallelism>().map_err(|message| CliError::Config {
            path: common.config.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            message,
        })?),
        None => None,
    };
    cfg.exec = common.exec.or(file_exec).unwrap_or_default();

    let a = analyze;
    cfg.lq = a.and_then(|a| a.lq).or(file.lq).unwrap_or(DEFAULT_LQ);
    cfg.segments = a.and_then(|a| a.segments).or(file.segments).unwrap_or(1);
    cfg.grid = GridConfig {
        start: a.and_then(|a| a.grid_start).or(file.grid.start),
        stop: a.and_then(|a| a.grid_stop).or(file.grid.stop),
        count: a.and_then(|a| a.grid_count).or(file.grid.count).unwrap_or(DEFAULT_GRID_COUNT),
        spacing: a.and_then(|a| a.grid_spacing).or(file.grid.spacing).unwrap_or_default(),
    };
    cfg.report = match (a.and_then(|a| a.report_cycles), a.and_then(|a| a.report_nstar)) {
        (Some(n), _) => ReportPoint::Cycles(n),
        (_, Some(s)) => ReportPoint::NStar(s),
        _ => match (file.report_cycles, file.report_nstar) {
            (Some(n), _) => ReportPoint::Cycles(n),
            (_, Some(s)) => ReportPoint::NStar(s),
            _ => ReportPoint::NStar(DEFAULT_REPORT_NSTAR),
        },
    };
    cfg.validate()?;
    Ok(cfg)
}
