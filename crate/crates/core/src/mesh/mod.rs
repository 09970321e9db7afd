//! Finite-element input: nodes, quadratic elements, nodal displacements,
//! and everything derived from geometry alone (shape functions, geometric
//! transformation, boundary faces and their charts).

mod boundary;
pub mod builders;
pub mod io;
mod shape;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

pub use boundary::{
    extract_boundary_faces, face_chart_gram, face_corner_nodes, face_count, BoundaryFace, FaceChart, MapArea,
};
pub use shape::{
    geometric_transform, in_reference_cell, reference_nodes, shape_functions, shape_gradients, transform_jacobian,
    transform_jacobian_unchecked,
};
pub(crate) use boundary::gram_from_jacobian;
pub(crate) use shape::nodal_gradient;

/// Relative tolerance for Jacobian determinants (scaled by `L^3`) and Gram
/// determinants (scaled by `L^2`).
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Hex20,
    Tet10,
}

impl ElementKind {
    pub fn node_count(self) -> usize {
        match self {
            ElementKind::Hex20 => 20,
            ElementKind::Tet10 => 10,
        }
    }

    pub fn corner_count(self) -> usize {
        match self {
            ElementKind::Hex20 => 8,
            ElementKind::Tet10 => 4,
        }
    }

    pub fn face_count(self) -> usize {
        match self {
            ElementKind::Hex20 => 6,
            ElementKind::Tet10 => 4,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ElementKind::Hex20 => "HEX20",
            ElementKind::Tet10 => "TET10",
        }
    }
}

impl FromStr for ElementKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "HEX20" | "C3D20" => Ok(ElementKind::Hex20),
            "TET10" | "C3D10" => Ok(ElementKind::Tet10),
            other => Err(format!("unknown element kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub coords: Vector3<f64>,
    pub displacement: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: ElementId,
    pub kind: ElementKind,
    pub node_ids: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("mesh has no elements")]
    NoElements,
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate element id {0}")]
    DuplicateElement(ElementId),
    #[error("element {element} references unknown node {node}")]
    UnknownNode { element: ElementId, node: NodeId },
    #[error("element {element} of kind {kind:?} has {found} nodes, expected {expected}")]
    NodeCount { element: ElementId, kind: ElementKind, found: usize, expected: usize },
    #[error("node {0} has non-finite coordinates or displacement")]
    NonFinite(NodeId),
    #[error("point {point:?} lies outside the {kind:?} reference cell")]
    OutsideReferenceCell { kind: ElementKind, point: [f64; 3] },
    #[error("element {element} is degenerate (det J = {det:e})")]
    DegenerateElement { element: ElementId, det: f64 },
    #[error("face {face} of element {element} is degenerate (sqrt g = {gram:e})")]
    DegenerateFace { element: ElementId, face: usize, gram: f64 },
}

/// Node coordinates of one element, gathered in element node order.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementGeometry {
    pub id: ElementId,
    pub kind: ElementKind,
    pub coords: Vec<Vector3<f64>>,
    /// Bounding-box diagonal, the length scale for degeneracy checks.
    pub char_length: f64,
}

impl ElementGeometry {
    pub fn new(id: ElementId, kind: ElementKind, coords: Vec<Vector3<f64>>) -> Self {
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        for c in &coords {
            lo = lo.inf(c);
            hi = hi.sup(c);
        }
        let char_length = (hi - lo).norm();
        Self { id, kind, coords, char_length }
    }

    pub(crate) fn check_jacobian(&self, j: &Matrix3<f64>) -> Result<(), MeshError> {
        let det = j.determinant();
        if det > DEGENERACY_TOL * self.char_length.powi(3) {
            Ok(())
        } else {
            Err(MeshError::DegenerateElement { element: self.id, det })
        }
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    nodes: Vec<Node>,
    elements: Vec<Element>,
    node_index: HashMap<NodeId, usize>,
    // node positions of each element, resolved once
    connectivity: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn new(nodes: Vec<Node>, elements: Vec<Element>) -> Result<Self, MeshError> {
        if elements.is_empty() {
            return Err(MeshError::NoElements);
        }
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if !(n.coords.iter().all(|c| c.is_finite()) && n.displacement.iter().all(|c| c.is_finite())) {
                return Err(MeshError::NonFinite(n.id));
            }
            if node_index.insert(n.id, i).is_some() {
                return Err(MeshError::DuplicateNode(n.id));
            }
        }
        let mut seen = HashMap::with_capacity(elements.len());
        let mut connectivity = Vec::with_capacity(elements.len());
        for e in &elements {
            if seen.insert(e.id, ()).is_some() {
                return Err(MeshError::DuplicateElement(e.id));
            }
            let expected = e.kind.node_count();
            if e.node_ids.len() != expected {
                return Err(MeshError::NodeCount {
                    element: e.id,
                    kind: e.kind,
                    found: e.node_ids.len(),
                    expected,
                });
            }
            let idx = e
                .node_ids
                .iter()
                .map(|n| {
                    node_index
                        .get(n)
                        .copied()
                        .ok_or(MeshError::UnknownNode { element: e.id, node: *n })
                })
                .collect::<Result<Vec<_>, _>>()?;
            connectivity.push(idx);
        }
        Ok(Self { nodes, elements, node_index, connectivity })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.node_index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn element_geometry(&self, element: usize) -> ElementGeometry {
        let e = &self.elements[element];
        let coords = self.connectivity[element].iter().map(|&i| self.nodes[i].coords).collect();
        ElementGeometry::new(e.id, e.kind, coords)
    }

    pub fn element_displacements(&self, element: usize) -> Vec<Vector3<f64>> {
        self.connectivity[element].iter().map(|&i| self.nodes[i].displacement).collect()
    }

    /// Replace every nodal displacement by `f(coords)`.
    pub fn set_displacements<F: Fn(&Vector3<f64>) -> Vector3<f64>>(&mut self, f: F) {
        for n in &mut self.nodes {
            n.displacement = f(&n.coords);
        }
    }

    /// Move every node by `f(coords)`; displacements are kept.
    pub fn map_coordinates<F: Fn(&Vector3<f64>) -> Vector3<f64>>(&mut self, f: F) {
        for n in &mut self.nodes {
            n.coords = f(&n.coords);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: u64) -> Node {
        Node { id: NodeId(id), coords: Vector3::zeros(), displacement: Vector3::zeros() }
    }

    #[test]
    fn rejects_broken_connectivity() {
        let nodes: Vec<Node> = (1..=10).map(node).collect();
        let tet = Element {
            id: ElementId(1),
            kind: ElementKind::Tet10,
            node_ids: (1..=9).chain(std::iter::once(99)).map(NodeId).collect(),
        };
        assert_eq!(
            Mesh::new(nodes.clone(), vec![tet]).unwrap_err(),
            MeshError::UnknownNode { element: ElementId(1), node: NodeId(99) }
        );
        assert_eq!(Mesh::new(nodes.clone(), vec![]).unwrap_err(), MeshError::NoElements);
        let short = Element { id: ElementId(2), kind: ElementKind::Hex20, node_ids: (1..=10).map(NodeId).collect() };
        assert!(matches!(Mesh::new(nodes.clone(), vec![short]), Err(MeshError::NodeCount { found: 10, .. })));
        let mut dup = nodes;
        dup.push(node(3));
        let ok = Element { id: ElementId(1), kind: ElementKind::Tet10, node_ids: (1..=10).map(NodeId).collect() };
        assert_eq!(Mesh::new(dup, vec![ok]).unwrap_err(), MeshError::DuplicateNode(NodeId(3)));
    }

    #[test]
    fn kind_tags_parse() {
        assert_eq!("hex20".parse::<ElementKind>().unwrap(), ElementKind::Hex20);
        assert_eq!("C3D10".parse::<ElementKind>().unwrap(), ElementKind::Tet10);
        assert!("C3D8".parse::<ElementKind>().is_err());
    }
}
