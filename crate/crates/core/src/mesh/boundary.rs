//! Boundary faces and their charts.
//!
//! A face lies on the surface when its corner-node set belongs to exactly one
//! element. Each face carries the chart from its map area (unit square or
//! unit triangle) into the reference cell:
//!
//! | kind  | face | chart                 |
//! |-------|------|-----------------------|
//! | Hex20 | 1    | (0, s1, s2)           |
//! | Hex20 | 2    | (1, s1, s2)           |
//! | Hex20 | 3    | (s1, 0, s2)           |
//! | Hex20 | 4    | (s1, 1, s2)           |
//! | Hex20 | 5    | (s1, s2, 0)           |
//! | Hex20 | 6    | (s1, s2, 1)           |
//! | Tet10 | 1    | (0, s1, s2)           |
//! | Tet10 | 2    | (s1, 0, s2)           |
//! | Tet10 | 3    | (s1, s2, 0)           |
//! | Tet10 | 4    | (s1, s2, 1 - s1 - s2) |

use std::collections::HashMap;

use nalgebra::Vector3;

use super::shape::{reference_nodes, transform_jacobian_unchecked};
use super::{ElementGeometry, ElementId, ElementKind, Mesh, MeshError, NodeId, DEGENERACY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapArea {
    Square,
    Triangle,
}

/// Affine chart from the map area into the reference cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceChart {
    pub kind: ElementKind,
    /// One-based local face index.
    pub face: usize,
}

impl FaceChart {
    pub fn new(kind: ElementKind, face: usize) -> Option<Self> {
        (1..=kind.face_count()).contains(&face).then_some(Self { kind, face })
    }

    pub fn map_area(&self) -> MapArea {
        match self.kind {
            ElementKind::Hex20 => MapArea::Square,
            ElementKind::Tet10 => MapArea::Triangle,
        }
    }

    pub fn contains(&self, s: [f64; 2]) -> bool {
        let tol = 1e-12;
        let box_ok = s.iter().all(|&c| c.is_finite() && c >= -tol && c <= 1.0 + tol);
        match self.map_area() {
            MapArea::Square => box_ok,
            MapArea::Triangle => box_ok && s[0] + s[1] <= 1.0 + tol,
        }
    }

    pub fn reference_point(&self, s: [f64; 2]) -> [f64; 3] {
        let [a, b] = s;
        match (self.kind, self.face) {
            (ElementKind::Hex20, 1) => [0.0, a, b],
            (ElementKind::Hex20, 2) => [1.0, a, b],
            (ElementKind::Hex20, 3) => [a, 0.0, b],
            (ElementKind::Hex20, 4) => [a, 1.0, b],
            (ElementKind::Hex20, 5) => [a, b, 0.0],
            (ElementKind::Hex20, 6) => [a, b, 1.0],
            (ElementKind::Tet10, 1) => [0.0, a, b],
            (ElementKind::Tet10, 2) => [a, 0.0, b],
            (ElementKind::Tet10, 3) => [a, b, 0.0],
            (ElementKind::Tet10, 4) => [a, b, 1.0 - a - b],
            _ => unreachable!("face index validated at construction"),
        }
    }

    /// Columns of the (constant) 3x2 derivative of the chart.
    pub fn tangents(&self) -> (Vector3<f64>, Vector3<f64>) {
        let e1 = Vector3::x();
        let e2 = Vector3::y();
        let e3 = Vector3::z();
        match (self.kind, self.face) {
            (_, 1) => (e2, e3),
            (ElementKind::Hex20, 2) => (e2, e3),
            (ElementKind::Hex20, 3 | 4) | (ElementKind::Tet10, 2) => (e1, e3),
            (ElementKind::Hex20, 5 | 6) | (ElementKind::Tet10, 3) => (e1, e2),
            (ElementKind::Tet10, 4) => (Vector3::new(1.0, 0.0, -1.0), Vector3::new(0.0, 1.0, -1.0)),
            _ => unreachable!("face index validated at construction"),
        }
    }

    /// Corners of the map area in cyclic order.
    fn map_corners(&self) -> &'static [[f64; 2]] {
        match self.map_area() {
            MapArea::Square => &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            MapArea::Triangle => &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        }
    }
}

/// Zero-based local indices of the corner nodes of `face`, in cyclic order.
pub fn face_corner_nodes(kind: ElementKind, face: usize) -> Vec<usize> {
    let chart = FaceChart::new(kind, face).expect("face index in range");
    let nodes = reference_nodes(kind);
    chart
        .map_corners()
        .iter()
        .map(|&s| {
            let x = chart.reference_point(s);
            nodes[..kind.corner_count()]
                .iter()
                .position(|n| n == &x)
                .expect("chart corners are reference corners")
        })
        .collect()
}

pub fn face_count(kind: ElementKind) -> usize {
    kind.face_count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFace {
    pub element_id: ElementId,
    /// Position of the element in [`Mesh::elements`].
    pub element_index: usize,
    pub chart: FaceChart,
}

impl BoundaryFace {
    pub fn face(&self) -> usize {
        self.chart.face
    }
}

fn face_key(mesh: &Mesh, element: usize, face: usize) -> Vec<NodeId> {
    let e = &mesh.elements()[element];
    let mut key: Vec<NodeId> = face_corner_nodes(e.kind, face).iter().map(|&k| e.node_ids[k]).collect();
    key.sort_unstable();
    key
}

/// All faces whose sorted corner-node set occurs in exactly one element,
/// ordered by `(element_id, face)`.
pub fn extract_boundary_faces(mesh: &Mesh) -> Vec<BoundaryFace> {
    let mut counts: HashMap<Vec<NodeId>, usize> = HashMap::new();
    for (i, e) in mesh.elements().iter().enumerate() {
        for f in 1..=e.kind.face_count() {
            *counts.entry(face_key(mesh, i, f)).or_insert(0) += 1;
        }
    }
    let mut faces = Vec::new();
    for (i, e) in mesh.elements().iter().enumerate() {
        for f in 1..=e.kind.face_count() {
            if counts[&face_key(mesh, i, f)] == 1 {
                faces.push(BoundaryFace {
                    element_id: e.id,
                    element_index: i,
                    chart: FaceChart { kind: e.kind, face: f },
                });
            }
        }
    }
    faces.sort_by_key(|f| (f.element_id, f.chart.face));
    faces
}

/// Area element `sqrt(det(G^T G))` of the composed chart `s -> Upsilon(gamma(s))`.
pub fn face_chart_gram(element: &ElementGeometry, chart: &FaceChart, s: [f64; 2]) -> Result<f64, MeshError> {
    if !chart.contains(s) {
        return Err(MeshError::OutsideReferenceCell { kind: chart.kind, point: [s[0], s[1], f64::NAN] });
    }
    let x = chart.reference_point(s);
    let j = transform_jacobian_unchecked(element, x)?;
    gram_from_jacobian(element, chart, &j)
}

pub(crate) fn gram_from_jacobian(
    element: &ElementGeometry,
    chart: &FaceChart,
    j: &nalgebra::Matrix3<f64>,
) -> Result<f64, MeshError> {
    let (t1, t2) = chart.tangents();
    // For a 3x2 matrix [a b], det(G^T G) = |a x b|^2.
    let gram = (j * t1).cross(&(j * t2)).norm();
    if gram > DEGENERACY_TOL * element.char_length * element.char_length {
        Ok(gram)
    } else {
        Err(MeshError::DegenerateFace { element: element.id, face: chart.face, gram })
    }
}
