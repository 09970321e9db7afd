//! File formats for reliability results: PoF curve CSV, per-face CSV and
//! a legacy-VTK polygon file carrying the crack-initiation density.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{face_corner_nodes, ElementId, Mesh, NodeId};

use super::FaceContribution;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("VTK line {line}: {message}")]
    Vtk { line: usize, message: String },
    #[error("face {face} of element {element} does not exist in the mesh")]
    UnknownFace { element: ElementId, face: usize },
    #[error("invalid cycle grid: {0}")]
    Grid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl CycleGrid {
    pub fn new(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Self, OutputError> {
        let bad = |m: &str| Err(OutputError::Grid(m.to_string()));
        if count == 0 {
            return bad("count must be at least 1");
        }
        if !(start.is_finite() && stop.is_finite() && start >= 0.0 && stop >= start) {
            return bad("need finite 0 <= start <= stop");
        }
        if spacing == Spacing::Log && start <= 0.0 {
            return bad("log spacing needs start > 0");
        }
        Ok(Self { start, stop, count, spacing })
    }

    /// `eta * 1e-4 ..= eta * 10`, 200 log-spaced points.
    pub fn around_scale(eta: f64) -> Self {
        Self { start: eta * 1e-4, stop: eta * 10.0, count: 200, spacing: Spacing::Log }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        let mut v: Vec<f64> = (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect();
        v[self.count - 1] = self.stop;
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PofRow {
    pub n: f64,
    pub pof: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceRow {
    pub element_id: u64,
    pub face: usize,
    pub area: f64,
    pub hazard: f64,
    pub density: f64,
    pub eta_face: f64,
}

impl FaceRow {
    pub fn from_contribution(f: &FaceContribution, m: f64) -> Self {
        Self {
            element_id: f.element_id.0,
            face: f.face,
            area: f.area,
            hazard: f.hazard,
            density: f.density(),
            eta_face: f.eta(m),
        }
    }
}

fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<(), OutputError> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(r: R) -> Result<Vec<T>, OutputError> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

pub fn write_pof_csv<W: Write>(w: W, rows: &[PofRow]) -> Result<(), OutputError> {
    write_rows(w, rows)
}

pub fn read_pof_csv<R: Read>(r: R) -> Result<Vec<PofRow>, OutputError> {
    read_rows(r)
}

pub fn write_faces_csv<W: Write>(w: W, faces: &[FaceContribution], m: f64) -> Result<(), OutputError> {
    let rows: Vec<FaceRow> = faces.iter().map(|f| FaceRow::from_contribution(f, m)).collect();
    write_rows(w, &rows)
}

pub fn read_faces_csv<R: Read>(r: R) -> Result<Vec<FaceRow>, OutputError> {
    read_rows(r)
}

/// Boundary polygons (corner nodes only) of the faces in `faces`, in the
/// same order, with nodes numbered by first use.
fn face_polygons(mesh: &Mesh, faces: &[FaceContribution]) -> Result<(Vec<[f64; 3]>, Vec<Vec<usize>>), OutputError> {
    let by_id: HashMap<ElementId, usize> = mesh.elements().iter().enumerate().map(|(i, e)| (e.id, i)).collect();
    let mut point_index: HashMap<NodeId, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut polygons = Vec::with_capacity(faces.len());
    for f in faces {
        let unknown = || OutputError::UnknownFace { element: f.element_id, face: f.face };
        let e = by_id.get(&f.element_id).map(|&i| &mesh.elements()[i]).ok_or_else(unknown)?;
        if f.face == 0 || f.face > e.kind.face_count() {
            return Err(unknown());
        }
        let poly = face_corner_nodes(e.kind, f.face)
            .into_iter()
            .map(|k| {
                let id = e.node_ids[k];
                *point_index.entry(id).or_insert_with(|| {
                    let c = mesh.node(id).expect("mesh connectivity was validated").coords;
                    points.push([c.x, c.y, c.z]);
                    points.len() - 1
                })
            })
            .collect();
        polygons.push(poly);
    }
    Ok((points, polygons))
}

/// Writes boundary faces as legacy-VTK POLYDATA with cell scalars
/// `density` and `hazard`, plus `expected_cracks` (density times `n^m`)
/// when `at_cycles = Some((n, m))`.
pub fn write_density_vtk<W: Write>(
    mut w: W,
    mesh: &Mesh,
    faces: &[FaceContribution],
    at_cycles: Option<(f64, f64)>,
) -> Result<(), OutputError> {
    let (points, polygons) = face_polygons(mesh, faces)?;
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\nlcfpost crack initiation density\nASCII\nDATASET POLYDATA\n");
    let _ = writeln!(s, "POINTS {} double", points.len());
    for p in &points {
        let _ = writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]);
    }
    let size: usize = polygons.iter().map(|p| p.len() + 1).sum();
    let _ = writeln!(s, "POLYGONS {} {}", polygons.len(), size);
    for p in &polygons {
        let _ = write!(s, "{}", p.len());
        for i in p {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_DATA {}", faces.len());
    let mut scalars = |name: &str, values: &mut dyn Iterator<Item = f64>| {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in values {
            let _ = writeln!(s, "{v:?}");
        }
    };
    scalars("density", &mut faces.iter().map(|f| f.density()));
    scalars("hazard", &mut faces.iter().map(|f| f.hazard));
    if let Some((n, m)) = at_cycles {
        let nm = n.powf(m);
        scalars("expected_cracks", &mut faces.iter().map(|f| f.density() * nm));
    }
    w.write_all(s.as_bytes())?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VtkPolyData {
    pub points: Vec<[f64; 3]>,
    pub polygons: Vec<Vec<usize>>,
    pub cell_scalars: Vec<(String, Vec<f64>)>,
}

impl VtkPolyData {
    pub fn scalar(&self, name: &str) -> Option<&[f64]> {
        self.cell_scalars.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

/// Reads the subset of legacy-VTK ASCII POLYDATA produced by
/// [`write_density_vtk`].
pub fn parse_vtk_polydata(text: &str) -> Result<VtkPolyData, OutputError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: String| OutputError::Vtk { line, message };
    let mut next = |what: &str| lines.next().ok_or_else(|| err(0, format!("unexpected end of file, expected {what}")));
    let (l, header) = next("header")?;
    if !header.starts_with("# vtk DataFile") {
        return Err(err(l, "missing `# vtk DataFile` header".into()));
    }
    next("title")?;
    let (l, fmt) = next("format")?;
    if fmt != "ASCII" {
        return Err(err(l, format!("only ASCII is supported, found `{fmt}`")));
    }
    let (l, ds) = next("DATASET")?;
    if ds != "DATASET POLYDATA" {
        return Err(err(l, format!("expected `DATASET POLYDATA`, found `{ds}`")));
    }
    let num = |l: usize, tok: Option<&str>| -> Result<f64, OutputError> {
        let tok = tok.ok_or_else(|| err(l, "missing value".into()))?;
        tok.parse::<f64>().map_err(|_| err(l, format!("bad number `{tok}`")))
    };
    let count = |l: usize, tok: Option<&str>| -> Result<usize, OutputError> {
        let tok = tok.ok_or_else(|| err(l, "missing count".into()))?;
        tok.parse::<usize>().map_err(|_| err(l, format!("bad count `{tok}`")))
    };

    let mut out = VtkPolyData::default();
    let (l, pts) = next("POINTS")?;
    let mut it = pts.split_whitespace();
    if it.next() != Some("POINTS") {
        return Err(err(l, "expected POINTS".into()));
    }
    let np = count(l, it.next())?;
    let mut coords = Vec::with_capacity(3 * np);
    while coords.len() < 3 * np {
        let (l, line) = next("point coordinates")?;
        for tok in line.split_whitespace() {
            coords.push(num(l, Some(tok))?);
        }
    }
    out.points = coords.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();

    let (l, polys) = next("POLYGONS")?;
    let mut it = polys.split_whitespace();
    if it.next() != Some("POLYGONS") {
        return Err(err(l, "expected POLYGONS".into()));
    }
    let nc = count(l, it.next())?;
    for _ in 0..nc {
        let (l, line) = next("polygon")?;
        let mut it = line.split_whitespace();
        let k = count(l, it.next())?;
        let ids = it.map(|t| count(l, Some(t))).collect::<Result<Vec<_>, _>>()?;
        if ids.len() != k || ids.iter().any(|&i| i >= np) {
            return Err(err(l, "malformed polygon".into()));
        }
        out.polygons.push(ids);
    }

    let (l, cd) = next("CELL_DATA")?;
    if count(l, cd.strip_prefix("CELL_DATA").map(str::trim))? != nc {
        return Err(err(l, "CELL_DATA count differs from polygon count".into()));
    }
    while let Some((l, line)) = lines.next() {
        let mut it = line.split_whitespace();
        if it.next() != Some("SCALARS") {
            return Err(err(l, format!("expected SCALARS, found `{line}`")));
        }
        let name = it.next().ok_or_else(|| err(l, "unnamed scalar field".into()))?.to_string();
        match lines.next() {
            Some((_, "LOOKUP_TABLE default")) => {}
            other => return Err(err(other.map_or(0, |(l, _)| l), "expected `LOOKUP_TABLE default`".into())),
        }
        let mut values = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (l, v) = lines.next().ok_or_else(|| err(0, format!("scalar field `{name}` is truncated")))?;
            values.push(num(l, Some(v))?);
        }
        out.cell_scalars.push((name, values));
    }
    Ok(out)
}
