use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use log::{info, warn};

use super::config::{ReportPoint, RunConfig};
use super::CliError;
use crate::keyvalue;
use crate::material::{read_material, MaterialParams};
use crate::mesh::io::read_mesh;
use crate::mesh::{extract_boundary_faces, Mesh};
use crate::quadrature::{FaceRules, MAX_POINTS_PER_DIM};
use crate::reliability::output::{
    write_density_vtk, write_faces_csv, write_pof_csv, CycleGrid, OutputError, PofRow,
};
use crate::reliability::{
    assess, crack_count_probability, cumulative_hazard, top_faces_report, ReliabilityResult,
};

/// Summary reports the running top-face share at these prefix lengths.
const TOP_FACE_COUNTS: [usize; 5] = [1, 5, 10, 21, 50];
/// Crack counts whose probabilities go into the summary.
const CRACK_COUNTS: u32 = 3;

#[derive(Debug, Clone)]
pub struct AnalysisOutcome {
    pub result: ReliabilityResult,
    pub report_cycles: f64,
    pub boundary_faces: usize,
}

fn load(cfg: &RunConfig) -> Result<(Mesh, MaterialParams), CliError> {
    let mesh = read_mesh(&cfg.mesh)?;
    let params = read_material(&cfg.material)?;
    info!("mesh {}: {} nodes, {} elements", cfg.mesh.display(), mesh.nodes().len(), mesh.elements().len());
    Ok((mesh, params))
}

fn rules(lq: usize) -> Result<FaceRules, CliError> {
    FaceRules::new(lq).map_err(|e| CliError::Usage(e.to_string()))
}

fn create(dir: &Path, name: &str) -> Result<(BufWriter<File>, String), CliError> {
    let path = dir.join(name);
    let shown = path.display().to_string();
    let f = File::create(&path).map_err(|e| CliError::Write { path: shown.clone(), source: OutputError::Io(e) })?;
    Ok((BufWriter::new(f), shown))
}

fn write_file(dir: &Path, name: &str, body: impl FnOnce(BufWriter<File>) -> Result<(), OutputError>) -> Result<(), CliError> {
    let (w, path) = create(dir, name)?;
    body(w).map_err(|source| CliError::Write { path, source })
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Write { path: dir.display().to_string(), source: OutputError::Io(e) })
}

fn cycle_grid(cfg: &RunConfig, eta: f64) -> Result<CycleGrid, CliError> {
    // without a finite scale there is nothing to anchor the default grid to
    let (default_start, default_stop) = if eta.is_finite() { (eta * 1e-4, eta * 10.0) } else { (1.0, 1e7) };
    let start = cfg.grid.start.unwrap_or(default_start);
    let stop = cfg.grid.stop.unwrap_or(default_stop);
    CycleGrid::new(start, stop, cfg.grid.count, cfg.grid.spacing).map_err(|e| CliError::Usage(e.to_string()))
}

fn summary_text(cfg: &RunConfig, outcome: &AnalysisOutcome) -> String {
    let r = &outcome.result;
    let n = outcome.report_cycles;
    let f = |v: f64| format!("{v:?}");
    let mut s = String::new();
    s.push_str("# lcfpost analysis summary\n");
    keyvalue::push(&mut s, "mesh", cfg.mesh.display());
    keyvalue::push(&mut s, "material", cfg.material.display());
    keyvalue::push(&mut s, "lq", cfg.lq);
    keyvalue::push(&mut s, "eta", f(r.eta));
    keyvalue::push(&mut s, "m", f(r.m));
    keyvalue::push(&mut s, "total_hazard", f(r.total()));
    keyvalue::push(&mut s, "infinite_life", r.is_infinite_life());
    keyvalue::push(&mut s, "boundary_faces", outcome.boundary_faces);
    keyvalue::push(&mut s, "integrated_faces", r.faces().len());
    keyvalue::push(&mut s, "boundary_area", f(r.area()));
    keyvalue::push(&mut s, "skipped_elements", r.hazard.skipped.len());
    let ids: Vec<String> = r.hazard.skipped.iter().map(|e| e.element_id.to_string()).collect();
    keyvalue::push(&mut s, "skipped_element_ids", ids.join(" "));
    keyvalue::push(&mut s, "clamped_points", r.hazard.clamped_points());
    keyvalue::push(&mut s, "segments", cfg.segments);
    keyvalue::push(&mut s, "report_cycles", f(n));
    keyvalue::push(&mut s, "report_nstar", f(n / r.eta));
    keyvalue::push(&mut s, "pof", f(r.pof(n)));
    keyvalue::push(&mut s, "pof_segments", f(r.pof_segments(n, cfg.segments)));
    keyvalue::push(&mut s, "density", f(r.density(n)));
    let z = cumulative_hazard(n, r.eta, r.m);
    keyvalue::push(&mut s, "expected_cracks", f(z));
    for q in 0..=CRACK_COUNTS {
        keyvalue::push(&mut s, &format!("p_cracks_{q}"), f(crack_count_probability(q, z)));
    }
    let top = top_faces_report(r.faces(), n, r.m);
    for k in TOP_FACE_COUNTS {
        if let Some(e) = top.get(k - 1) {
            keyvalue::push(&mut s, &format!("top_{k}_share"), f(e.cumulative_share));
            keyvalue::push(&mut s, &format!("top_{k}_pof"), f(e.combined_pof));
        }
    }
    if let Some(e) = top.first() {
        keyvalue::push(&mut s, "max_density_element", e.element_id);
        keyvalue::push(&mut s, "max_density_face", e.face);
        keyvalue::push(&mut s, "max_density", f(e.density));
    }
    s
}

/// Runs the full pipeline and writes `pof.csv`, `faces.csv`, `density.vtk`
/// and `summary.txt` into `cfg.out`.
pub fn run_analysis(cfg: &RunConfig) -> Result<AnalysisOutcome, CliError> {
    cfg.validate()?;
    let (mesh, params) = load(cfg)?;
    let rules = rules(cfg.lq)?;
    let boundary_faces = extract_boundary_faces(&mesh).len();
    let result = assess(&mesh, &params, &rules, cfg.exec)?;
    if !result.hazard.skipped.is_empty() {
        warn!("{} degenerate elements were left out of the integral", result.hazard.skipped.len());
    }
    if result.hazard.clamped_points() > 0 {
        warn!(
            "{} quadrature points exceeded the strain-life curve and were clamped to its shortest life",
            result.hazard.clamped_points()
        );
    }
    let report_cycles = match cfg.report {
        ReportPoint::Cycles(n) => n,
        ReportPoint::NStar(s) if result.eta.is_finite() => s * result.eta,
        ReportPoint::NStar(_) => 0.0,
    };
    let grid = cycle_grid(cfg, result.eta)?;
    let outcome = AnalysisOutcome { result, report_cycles, boundary_faces };
    let r = &outcome.result;

    ensure_dir(&cfg.out)?;
    let rows: Vec<PofRow> = grid.values().into_iter().map(|n| PofRow { n, pof: r.pof(n) }).collect();
    write_file(&cfg.out, "pof.csv", |w| write_pof_csv(w, &rows))?;
    write_file(&cfg.out, "faces.csv", |w| write_faces_csv(w, r.faces(), r.m))?;
    write_file(&cfg.out, "density.vtk", |w| write_density_vtk(w, &mesh, r.faces(), Some((report_cycles, r.m))))?;
    let summary = summary_text(cfg, &outcome);
    write_file(&cfg.out, "summary.txt", |mut w| {
        use std::io::Write;
        w.write_all(summary.as_bytes())?;
        w.flush()?;
        Ok(())
    })?;
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub lq: usize,
    pub eta: f64,
    pub eta_over_eta6: f64,
}

/// Weibull scale for every supported rule; writes `convergence.csv`.
pub fn run_convergence(cfg: &RunConfig) -> Result<Vec<ConvergenceRow>, CliError> {
    let (mesh, params) = load(cfg)?;
    let mut etas = Vec::with_capacity(MAX_POINTS_PER_DIM);
    for lq in 1..=MAX_POINTS_PER_DIM {
        etas.push(assess(&mesh, &params, &rules(lq)?, cfg.exec)?.eta);
    }
    let reference = etas[MAX_POINTS_PER_DIM - 1];
    let rows: Vec<ConvergenceRow> = etas
        .iter()
        .enumerate()
        .map(|(i, &eta)| ConvergenceRow { lq: i + 1, eta, eta_over_eta6: eta / reference })
        .collect();
    ensure_dir(&cfg.out)?;
    let mut text = String::from("lq,eta,eta_over_eta6\n");
    for r in &rows {
        let _ = writeln!(text, "{},{:?},{:?}", r.lq, r.eta, r.eta_over_eta6);
    }
    write_file(&cfg.out, "convergence.csv", |mut w| {
        use std::io::Write;
        w.write_all(text.as_bytes())?;
        w.flush()?;
        Ok(())
    })?;
    Ok(rows)
}
