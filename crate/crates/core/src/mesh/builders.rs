//! Structured quadratic meshes for fixtures, tests and benchmarks.

use std::collections::HashMap;

use nalgebra::Vector3;

use super::shape::{reference_nodes, TET_EDGES};
use super::{Element, ElementId, ElementKind, Mesh, Node, NodeId};

/// Hands out node ids on the half-spacing lattice of a structured block.
struct Lattice {
    size: [f64; 3],
    divisions: [usize; 3],
    ids: HashMap<[usize; 3], NodeId>,
    nodes: Vec<Node>,
}

impl Lattice {
    fn new(size: [f64; 3], divisions: [usize; 3]) -> Self {
        assert!(divisions.iter().all(|&n| n > 0), "divisions must be positive");
        Self { size, divisions, ids: HashMap::new(), nodes: Vec::new() }
    }

    fn node(&mut self, g: [usize; 3]) -> NodeId {
        if let Some(id) = self.ids.get(&g) {
            return *id;
        }
        let id = NodeId(self.nodes.len() as u64 + 1);
        let coords = Vector3::from_fn(|d, _| self.size[d] * g[d] as f64 / (2 * self.divisions[d]) as f64);
        self.nodes.push(Node { id, coords, displacement: Vector3::zeros() });
        self.ids.insert(g, id);
        id
    }

    fn cells(&self) -> impl Iterator<Item = [usize; 3]> {
        let [nx, ny, nz] = self.divisions;
        (0..nz).flat_map(move |k| (0..ny).flat_map(move |j| (0..nx).map(move |i| [i, j, k])))
    }

    fn finish(self, elements: Vec<Element>) -> Mesh {
        Mesh::new(self.nodes, elements).expect("structured block is well formed")
    }
}

/// Axis-aligned box `[0, size]` split into `divisions` Hex20 elements.
pub fn hex_block(size: [f64; 3], divisions: [usize; 3]) -> Mesh {
    let mut lattice = Lattice::new(size, divisions);
    let reference = reference_nodes(ElementKind::Hex20);
    let cells: Vec<_> = lattice.cells().collect();
    let mut elements = Vec::with_capacity(cells.len());
    for (n, cell) in cells.into_iter().enumerate() {
        let node_ids = reference
            .iter()
            .map(|r| lattice.node([0, 1, 2].map(|d| 2 * cell[d] + (2.0 * r[d]) as usize)))
            .collect();
        elements.push(Element { id: ElementId(n as u64 + 1), kind: ElementKind::Hex20, node_ids });
    }
    lattice.finish(elements)
}

/// Axis-aligned box split into cubes, each cut into six Tet10 elements
/// along its main diagonal (Kuhn subdivision, conforming across cubes).
pub fn tet_block(size: [f64; 3], divisions: [usize; 3]) -> Mesh {
    const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut lattice = Lattice::new(size, divisions);
    let cells: Vec<_> = lattice.cells().collect();
    let mut elements = Vec::with_capacity(6 * cells.len());
    for cell in cells {
        let base = cell.map(|c| 2 * c);
        for perm in PERMUTATIONS {
            let mut corners = [base; 4];
            corners[1][perm[0]] += 2;
            corners[2] = corners[1];
            corners[2][perm[1]] += 2;
            corners[3] = base.map(|c| c + 2);
            if orientation(&corners) < 0 {
                corners.swap(1, 2);
            }
            let mut grid: Vec<[usize; 3]> = corners.to_vec();
            grid.extend(TET_EDGES.iter().map(|&(a, b)| [0, 1, 2].map(|d| (corners[a][d] + corners[b][d]) / 2)));
            let node_ids = grid.into_iter().map(|g| lattice.node(g)).collect();
            elements.push(Element {
                id: ElementId(elements.len() as u64 + 1),
                kind: ElementKind::Tet10,
                node_ids,
            });
        }
    }
    lattice.finish(elements)
}

fn orientation(c: &[[usize; 3]; 4]) -> i64 {
    let v = |k: usize| Vector3::from_fn(|d, _| c[k][d] as f64 - c[0][d] as f64);
    v(1).cross(&v(2)).dot(&v(3)).signum() as i64
}

/// Sector of an annulus: radii `[r_inner, r_outer]`, opening `angle`
/// (radians), axial thickness `thickness`, meshed with Hex20 elements whose
/// mid-edge nodes lie on the exact circular arcs.
pub fn annular_sector(r_inner: f64, r_outer: f64, angle: f64, thickness: f64, divisions: [usize; 3]) -> Mesh {
    annular_sector_graded(r_inner, r_outer, angle, thickness, divisions, 0.0)
}

/// [`annular_sector`] with radial positions
/// `r_inner + (r_outer - r_inner) (exp(g t) - 1) / (exp(g) - 1)`; `g > 0`
/// packs elements towards the inner radius, `g = 0` is uniform.
pub fn annular_sector_graded(
    r_inner: f64,
    r_outer: f64,
    angle: f64,
    thickness: f64,
    divisions: [usize; 3],
    grading: f64,
) -> Mesh {
    let spread = |t: f64| if grading == 0.0 { t } else { (grading * t).exp_m1() / grading.exp_m1() };
    let mut mesh = hex_block([1.0; 3], divisions);
    mesh.map_coordinates(|p| {
        let r = r_inner + (r_outer - r_inner) * spread(p.x);
        let theta = angle * p.y;
        Vector3::new(r * theta.cos(), r * theta.sin(), thickness * p.z)
    });
    mesh
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::transform_jacobian;

    #[test]
    fn block_node_counts() {
        // Hex20 block: corner lattice plus edge midpoints.
        let m = hex_block([1.0; 3], [2, 2, 2]);
        assert_eq!(m.elements().len(), 8);
        assert_eq!(m.nodes().len(), 27 + 54);
        let t = tet_block([1.0; 3], [1, 1, 1]);
        assert_eq!(t.elements().len(), 6);
    }

    #[test]
    fn all_generated_elements_have_positive_jacobian() {
        let meshes = [
            hex_block([1.0, 2.0, 3.0], [2, 1, 3]),
            tet_block([1.0; 3], [2, 2, 1]),
            annular_sector(1.0, 2.0, 0.3, 0.2, [2, 3, 1]),
            annular_sector_graded(1.0, 3.0, 0.3, 0.2, [4, 2, 1], 2.5),
        ];
        for m in &meshes {
            for e in 0..m.elements().len() {
                let g = m.element_geometry(e);
                let x = match g.kind {
                    ElementKind::Hex20 => [0.5; 3],
                    ElementKind::Tet10 => [0.25; 3],
                };
                assert!(transform_jacobian(&g, x).is_ok());
            }
        }
    }
}
