//! Reference elements: quadratic serendipity brick (20 nodes) and quadratic
//! tetrahedron (10 nodes).
//!
//! The reference brick is `[0, 1]^3` and the reference tetrahedron is the
//! unit simplex. Node numbering follows the usual commercial-FEA convention:
//! corners first, then mid-edge nodes.
//!
//! Brick corners: 1 (0,0,0), 2 (1,0,0), 3 (1,1,0), 4 (0,1,0), 5 (0,0,1),
//! 6 (1,0,1), 7 (1,1,1), 8 (0,1,1). Mid-edge nodes 9..20 sit on edges
//! 1-2, 2-3, 3-4, 4-1, 5-6, 6-7, 7-8, 8-5, 1-5, 2-6, 3-7, 4-8.
//!
//! Tetrahedron corners: 1 (0,0,0), 2 (1,0,0), 3 (0,1,0), 4 (0,0,1).
//! Mid-edge nodes 5..10 sit on edges 1-2, 2-3, 3-1, 1-4, 2-4, 3-4.

use nalgebra::{Matrix3, Vector3};

use super::{ElementGeometry, ElementKind, MeshError};

pub(crate) const HEX_CORNERS: [[f64; 3]; 8] = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [1.0, 1.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 1.0],
    [1.0, 1.0, 1.0],
    [0.0, 1.0, 1.0],
];

pub(crate) const HEX_EDGES: [(usize, usize); 12] = [
    (0, 1),
    (1, 2),
    (2, 3),
    (3, 0),
    (4, 5),
    (5, 6),
    (6, 7),
    (7, 4),
    (0, 4),
    (1, 5),
    (2, 6),
    (3, 7),
];

pub(crate) const TET_CORNERS: [[f64; 3]; 4] =
    [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub(crate) const TET_EDGES: [(usize, usize); 6] = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)];

const DOMAIN_TOL: f64 = 1e-12;

fn midpoint(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

/// Reference-cell coordinates of every node of `kind`, in node order.
pub fn reference_nodes(kind: ElementKind) -> Vec<[f64; 3]> {
    let (corners, edges): (&[[f64; 3]], &[(usize, usize)]) = match kind {
        ElementKind::Hex20 => (&HEX_CORNERS, &HEX_EDGES),
        ElementKind::Tet10 => (&TET_CORNERS, &TET_EDGES),
    };
    corners
        .iter()
        .copied()
        .chain(edges.iter().map(|&(a, b)| midpoint(corners[a], corners[b])))
        .collect()
}

/// Whether `x` lies in the closed reference cell (with a 1e-12 margin).
pub fn in_reference_cell(kind: ElementKind, x: [f64; 3]) -> bool {
    if x.iter().any(|c| !c.is_finite()) {
        return false;
    }
    match kind {
        ElementKind::Hex20 => x.iter().all(|&c| (-DOMAIN_TOL..=1.0 + DOMAIN_TOL).contains(&c)),
        ElementKind::Tet10 => {
            x.iter().all(|&c| c >= -DOMAIN_TOL) && x[0] + x[1] + x[2] <= 1.0 + DOMAIN_TOL
        }
    }
}

fn check_domain(kind: ElementKind, x: [f64; 3]) -> Result<(), MeshError> {
    if in_reference_cell(kind, x) {
        Ok(())
    } else {
        Err(MeshError::OutsideReferenceCell { kind, point: x })
    }
}

/// Shape function values at a reference point.
pub fn shape_functions(kind: ElementKind, x: [f64; 3]) -> Result<Vec<f64>, MeshError> {
    check_domain(kind, x)?;
    let mut out = vec![0.0; kind.node_count()];
    match kind {
        ElementKind::Hex20 => hex20_values(x, &mut out),
        ElementKind::Tet10 => tet10_values(x, &mut out),
    }
    Ok(out)
}

/// Reference-coordinate gradients; row `k` is the gradient of shape function `k`.
pub fn shape_gradients(kind: ElementKind, x: [f64; 3]) -> Result<Vec<[f64; 3]>, MeshError> {
    check_domain(kind, x)?;
    let mut out = vec![[0.0; 3]; kind.node_count()];
    match kind {
        ElementKind::Hex20 => hex20_gradients(x, &mut out),
        ElementKind::Tet10 => tet10_gradients(x, &mut out),
    }
    Ok(out)
}

// Natural coordinates in [-1, 1]^3 for the brick formulas.
fn natural(x: [f64; 3]) -> [f64; 3] {
    [2.0 * x[0] - 1.0, 2.0 * x[1] - 1.0, 2.0 * x[2] - 1.0]
}

fn hex_natural_nodes() -> [[f64; 3]; 20] {
    let mut nodes = [[0.0; 3]; 20];
    for (dst, src) in nodes.iter_mut().zip(reference_nodes(ElementKind::Hex20)) {
        *dst = natural(src);
    }
    nodes
}

fn hex20_values(x: [f64; 3], out: &mut [f64]) {
    let p = natural(x);
    for (k, node) in hex_natural_nodes().iter().enumerate() {
        out[k] = if k < 8 {
            let a = 1.0 + p[0] * node[0];
            let b = 1.0 + p[1] * node[1];
            let c = 1.0 + p[2] * node[2];
            0.125 * a * b * c * (p[0] * node[0] + p[1] * node[1] + p[2] * node[2] - 2.0)
        } else {
            (0..3)
                .map(|d| if node[d] == 0.0 { 1.0 - p[d] * p[d] } else { 1.0 + p[d] * node[d] })
                .product::<f64>()
                * 0.25
        };
    }
}

fn hex20_gradients(x: [f64; 3], out: &mut [[f64; 3]]) {
    let p = natural(x);
    for (k, node) in hex_natural_nodes().iter().enumerate() {
        let mut g = [0.0; 3];
        if k < 8 {
            let f = [1.0 + p[0] * node[0], 1.0 + p[1] * node[1], 1.0 + p[2] * node[2]];
            let s = p[0] * node[0] + p[1] * node[1] + p[2] * node[2] - 2.0;
            for d in 0..3 {
                let (o1, o2) = ((d + 1) % 3, (d + 2) % 3);
                // d/dp_d [f_d f_o1 f_o2 s] = node_d f_o1 f_o2 (s + f_d)
                g[d] = 0.125 * node[d] * f[o1] * f[o2] * (s + f[d]);
            }
        } else {
            let factor = |d: usize| {
                if node[d] == 0.0 {
                    1.0 - p[d] * p[d]
                } else {
                    1.0 + p[d] * node[d]
                }
            };
            let dfactor = |d: usize| if node[d] == 0.0 { -2.0 * p[d] } else { node[d] };
            for d in 0..3 {
                let (o1, o2) = ((d + 1) % 3, (d + 2) % 3);
                g[d] = 0.25 * dfactor(d) * factor(o1) * factor(o2);
            }
        }
        // chain rule: dp/dx = 2
        out[k] = [2.0 * g[0], 2.0 * g[1], 2.0 * g[2]];
    }
}

fn barycentric(x: [f64; 3]) -> [f64; 4] {
    [1.0 - x[0] - x[1] - x[2], x[0], x[1], x[2]]
}

const BARY_GRAD: [[f64; 3]; 4] =
    [[-1.0, -1.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn tet10_values(x: [f64; 3], out: &mut [f64]) {
    let l = barycentric(x);
    for k in 0..4 {
        out[k] = l[k] * (2.0 * l[k] - 1.0);
    }
    for (e, &(a, b)) in TET_EDGES.iter().enumerate() {
        out[4 + e] = 4.0 * l[a] * l[b];
    }
}

fn tet10_gradients(x: [f64; 3], out: &mut [[f64; 3]]) {
    let l = barycentric(x);
    for k in 0..4 {
        let f = 4.0 * l[k] - 1.0;
        out[k] = [f * BARY_GRAD[k][0], f * BARY_GRAD[k][1], f * BARY_GRAD[k][2]];
    }
    for (e, &(a, b)) in TET_EDGES.iter().enumerate() {
        let mut g = [0.0; 3];
        for d in 0..3 {
            g[d] = 4.0 * (l[b] * BARY_GRAD[a][d] + l[a] * BARY_GRAD[b][d]);
        }
        out[4 + e] = g;
    }
}

/// Physical point `x = sum_i a_i psi_i(x_hat)`.
pub fn geometric_transform(element: &ElementGeometry, x: [f64; 3]) -> Result<Vector3<f64>, MeshError> {
    let psi = shape_functions(element.kind, x)?;
    Ok(element
        .coords
        .iter()
        .zip(&psi)
        .fold(Vector3::zeros(), |acc, (a, w)| acc + a * *w))
}

/// Jacobian of the geometric transformation, `J_ij = sum_k (a_k)_i dpsi_k/dx_j`,
/// without the degeneracy check.
pub fn transform_jacobian_unchecked(element: &ElementGeometry, x: [f64; 3]) -> Result<Matrix3<f64>, MeshError> {
    let grads = shape_gradients(element.kind, x)?;
    Ok(nodal_gradient(&element.coords, &grads))
}

/// Jacobian of the geometric transformation. Fails with
/// [`MeshError::DegenerateElement`] when `det J` is at or below
/// `1e-12 * L^3` (`L` = bounding-box diagonal of the element).
pub fn transform_jacobian(element: &ElementGeometry, x: [f64; 3]) -> Result<Matrix3<f64>, MeshError> {
    let j = transform_jacobian_unchecked(element, x)?;
    element.check_jacobian(&j)?;
    Ok(j)
}

/// `sum_k v_k (grad psi_k)^T`: the reference derivative of a nodal field.
pub(crate) fn nodal_gradient(values: &[Vector3<f64>], grads: &[[f64; 3]]) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for (v, g) in values.iter().zip(grads) {
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] += v[i] * g[j];
            }
        }
    }
    m
}
