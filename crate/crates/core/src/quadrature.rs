//! Gauss quadrature on the unit interval, the unit square and the unit
//! triangle.
//!
//! The order of a rule is the largest total polynomial degree it integrates
//! exactly. Interval rules with `l` points have order `2l - 1`; the square
//! rules are tensor products and carry the same order.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

pub const MAX_POINTS_PER_DIM: usize = 6;
pub const TRIANGLE_ORDERS: [usize; 5] = [1, 2, 3, 5, 7];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("unsupported point count {0} per dimension (expected 1..={MAX_POINTS_PER_DIM})")]
    PointCount(usize),
    #[error("unsupported triangle rule order {order} (supported: {TRIANGLE_ORDERS:?})")]
    TriangleOrder { order: usize },
}

/// A point rule on a `D`-dimensional domain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl<const D: usize> QuadratureRule<D> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; D], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(&[f64; D]) -> f64>(&self, mut f: F) -> f64 {
        crate::sum::compensated_sum(self.iter().map(|(p, w)| w * f(p)))
    }

    pub fn weight_sum(&self) -> f64 {
        crate::sum::compensated_sum(self.weights.iter().copied())
    }
}

/// Gauss-Legendre rule with `points` nodes on `[a, b]`.
///
/// One to four points use the closed forms; five and six points use nodes
/// obtained by Newton iteration on the Legendre polynomial.
pub fn gauss_interval(points: usize, a: f64, b: f64) -> Result<QuadratureRule<1>, QuadratureError> {
    let mid = 0.5 * (a + b);
    let len = b - a;
    let half = 0.5 * len;
    let (pts, wts): (Vec<f64>, Vec<f64>) = match points {
        1 => (vec![mid], vec![len]),
        2 => {
            let d = len / (2.0 * 3f64.sqrt());
            (vec![mid - d, mid + d], vec![0.5 * len, 0.5 * len])
        }
        3 => {
            let d = half * (3.0f64 / 5.0).sqrt();
            (
                vec![mid - d, mid, mid + d],
                vec![5.0 * len / 18.0, 8.0 * len / 18.0, 5.0 * len / 18.0],
            )
        }
        4 => {
            let s30 = 30f64.sqrt();
            let outer = half * ((15.0 + 2.0 * s30) / 35.0).sqrt();
            let inner = half * ((15.0 - 2.0 * s30) / 35.0).sqrt();
            let w_corr = (5.0f64 / 6.0).sqrt() / 12.0;
            let w_outer = (0.25 - w_corr) * len;
            let w_inner = (0.25 + w_corr) * len;
            (
                vec![mid - outer, mid - inner, mid + inner, mid + outer],
                vec![w_outer, w_inner, w_inner, w_outer],
            )
        }
        5 | 6 => {
            let (nodes, weights) = legendre_nodes(points);
            (
                nodes.iter().map(|t| mid + half * t).collect(),
                weights.iter().map(|w| half * w).collect(),
            )
        }
        other => return Err(QuadratureError::PointCount(other)),
    };
    Ok(QuadratureRule {
        points: pts.into_iter().map(|p| [p]).collect(),
        weights: wts,
        order: 2 * points - 1,
    })
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// ascending.
fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton to machine precision.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Tensor-product Gauss rule on `[0, 1]^2` with `points` nodes per axis.
pub fn tensor_square(points: usize) -> Result<QuadratureRule<2>, QuadratureError> {
    let line = gauss_interval(points, 0.0, 1.0)?;
    let mut pts = Vec::with_capacity(points * points);
    let mut wts = Vec::with_capacity(points * points);
    for (p, wp) in line.iter() {
        for (q, wq) in line.iter() {
            pts.push([p[0], q[0]]);
            wts.push(wp * wq);
        }
    }
    Ok(QuadratureRule { points: pts, weights: wts, order: line.order })
}

/// Positive-weight rule of the given order on the unit triangle
/// `{s1 >= 0, s2 >= 0, s1 + s2 <= 1}`.
///
/// Orders 1, 2 and 5 are the classical symmetric rules (centroid, three
/// interior points, Radon's seven points). Orders 3 and 7 are collapsed
/// products of a Gauss-Jacobi rule (weight `1 - u`) and a Gauss-Legendre rule
/// with 2 and 4 points per direction.
pub fn triangle_rule(order: usize) -> Result<QuadratureRule<2>, QuadratureError> {
    let (points, weights) = match order {
        1 => (vec![[1.0 / 3.0, 1.0 / 3.0]], vec![0.5]),
        2 => {
            let a = 1.0 / 6.0;
            let b = 2.0 / 3.0;
            (vec![[a, a], [b, a], [a, b]], vec![1.0 / 6.0; 3])
        }
        3 => collapsed_product(2),
        5 => {
            let s15 = 15f64.sqrt();
            let a1 = (6.0 - s15) / 21.0;
            let a2 = (6.0 + s15) / 21.0;
            let w1 = (155.0 - s15) / 2400.0;
            let w2 = (155.0 + s15) / 2400.0;
            let c = 1.0 / 3.0;
            let points = vec![
                [c, c],
                [a1, a1],
                [1.0 - 2.0 * a1, a1],
                [a1, 1.0 - 2.0 * a1],
                [a2, a2],
                [1.0 - 2.0 * a2, a2],
                [a2, 1.0 - 2.0 * a2],
            ];
            let weights = vec![9.0 / 80.0, w1, w1, w1, w2, w2, w2];
            (points, weights)
        }
        7 => collapsed_product(4),
        other => return Err(QuadratureError::TriangleOrder { order: other }),
    };
    Ok(QuadratureRule { points, weights, order })
}

/// Conical product rule: `s1 = u`, `s2 = (1 - u) v` with Gauss-Jacobi in `u`
/// (absorbing the `1 - u` Jacobian) and Gauss-Legendre in `v`. Exact for
/// total degree `2n - 1`.
fn collapsed_product(n: usize) -> (Vec<[f64; 2]>, Vec<f64>) {
    let (u_nodes, u_weights) = gauss_jacobi_unit(n, 1.0);
    let (v_nodes, v_weights) = gauss_jacobi_unit(n, 0.0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (u, wu) in u_nodes.iter().zip(&u_weights) {
        for (v, wv) in v_nodes.iter().zip(&v_weights) {
            points.push([*u, (1.0 - u) * v]);
            weights.push(wu * wv);
        }
    }
    (points, weights)
}

/// Gauss rule on `[0, 1]` for the weight `(1 - u)^alpha`, via Golub-Welsch on
/// the Jacobi recurrence (`beta = 0`).
fn gauss_jacobi_unit(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let beta = 0.0;
    let ab = alpha + beta;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jacobi[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let num = 4.0 * j * (j + alpha) * (j + beta) * (j + ab);
            let s = 2.0 * j + ab;
            let den = s * s * (s + 1.0) * (s - 1.0);
            let off = (num / den).sqrt();
            jacobi[(k, k + 1)] = off;
            jacobi[(k + 1, k)] = off;
        }
    }
    // Total mass of (1 - t)^alpha on [-1, 1] for beta = 0.
    let mu0 = 2f64.powf(ab + 1.0) / (alpha + 1.0);
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (t, mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // t in [-1, 1] -> u in [0, 1]: (1 - t)^alpha dt = 2^(alpha+1) (1 - u)^alpha du.
    let scale = 2f64.powf(-(alpha + 1.0));
    let nodes = pairs.iter().map(|(t, _)| 0.5 * (1.0 + t)).collect();
    let weights = pairs.iter().map(|(_, w)| w * scale).collect();
    (nodes, weights)
}

/// Triangle rule order paired with `points` Gauss points per dimension on
/// quadrilateral faces: `2 * points - 1`, capped at the highest available.
pub fn triangle_order_for(points: usize) -> usize {
    (2 * points - 1).min(7)
}

/// Matched pair of rules used for quadrilateral and triangular faces.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceRules {
    pub points_per_dim: usize,
    pub square: QuadratureRule<2>,
    pub triangle: QuadratureRule<2>,
}

impl FaceRules {
    pub fn new(points_per_dim: usize) -> Result<Self, QuadratureError> {
        Ok(Self {
            points_per_dim,
            square: tensor_square(points_per_dim)?,
            triangle: triangle_rule(triangle_order_for(points_per_dim))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    // i! j! / (i + j + 2)!
    fn simplex_monomial(i: u32, j: u32) -> f64 {
        factorial(i) * factorial(j) / factorial(i + j + 2)
    }

    #[test]
    fn two_point_rule_matches_table() {
        let r = gauss_interval(2, 0.0, 1.0).unwrap();
        let d = 1.0 / (2.0 * 3f64.sqrt());
        assert!((r.points[0][0] - (0.5 - d)).abs() < 1e-15);
        assert!((r.points[1][0] - (0.5 + d)).abs() < 1e-15);
        assert_eq!(r.weights, vec![0.5, 0.5]);
    }

    #[test]
    fn three_point_integrates_quintic() {
        let r = gauss_interval(3, 0.0, 1.0).unwrap();
        assert!((r.integrate(|x| x[0].powi(5)) - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn six_point_integrates_degree_eleven() {
        let r = gauss_interval(6, 0.0, 1.0).unwrap();
        assert!((r.integrate(|x| x[0].powi(11)) - 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn newton_nodes_agree_with_closed_forms() {
        for n in 1..=4 {
            let closed = gauss_interval(n, -1.0, 1.0).unwrap();
            let (nodes, weights) = legendre_nodes(n);
            for k in 0..n {
                assert!((closed.points[k][0] - nodes[k]).abs() < 1e-15, "n={n}");
                assert!((closed.weights[k] - weights[k]).abs() < 1e-15, "n={n}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range_point_counts() {
        assert_eq!(gauss_interval(0, 0.0, 1.0), Err(QuadratureError::PointCount(0)));
        assert_eq!(tensor_square(7), Err(QuadratureError::PointCount(7)));
    }

    #[test]
    fn square_rules() {
        let r = tensor_square(2).unwrap();
        assert_eq!(r.len(), 4);
        assert!((r.weight_sum() - 1.0).abs() < 1e-15);
        let r3 = tensor_square(3).unwrap();
        let v = r3.integrate(|p| p[0].powi(3) * p[1].powi(5));
        assert!((v - 1.0 / 24.0).abs() < 1e-14);
    }

    #[test]
    fn triangle_centroid_rule() {
        let r = triangle_rule(1).unwrap();
        assert_eq!(r.points, vec![[1.0 / 3.0, 1.0 / 3.0]]);
        assert_eq!(r.weights, vec![0.5]);
    }

    #[test]
    fn triangle_area_and_cubic_moment() {
        for &k in &TRIANGLE_ORDERS {
            let r = triangle_rule(k).unwrap();
            assert!((r.weight_sum() - 0.5).abs() < 1e-14, "order {k}");
            if k >= 3 {
                let v = r.integrate(|p| p[0] * p[0] * p[1]);
                assert!((v - 1.0 / 60.0).abs() < 1e-13, "order {k}");
            }
        }
        assert!(matches!(triangle_rule(4), Err(QuadratureError::TriangleOrder { order: 4 })));
    }

    #[test]
    fn exactness_sweep_both_directions() {
        let mut rules: Vec<(String, QuadratureRule<2>, bool)> = Vec::new();
        for l in 1..=MAX_POINTS_PER_DIM {
            rules.push((format!("square {l}"), tensor_square(l).unwrap(), false));
        }
        for &k in &TRIANGLE_ORDERS {
            rules.push((format!("triangle {k}"), triangle_rule(k).unwrap(), true));
        }
        for (name, rule, tri) in &rules {
            let exact = |i: u32, j: u32| {
                if *tri {
                    simplex_monomial(i, j)
                } else {
                    1.0 / f64::from((i + 1) * (j + 1))
                }
            };
            let order = rule.order as u32;
            for deg in 0..=order {
                for i in 0..=deg {
                    let j = deg - i;
                    let got = rule.integrate(|p| p[0].powi(i as i32) * p[1].powi(j as i32));
                    let want = exact(i, j);
                    assert!(((got - want) / want).abs() < 1e-13, "{name}: x^{i} y^{j}");
                }
            }
            let deg = order + 1;
            let worst = (0..=deg)
                .map(|i| {
                    let j = deg - i;
                    let got = rule.integrate(|p| p[0].powi(i as i32) * p[1].powi(j as i32));
                    ((got - exact(i, j)) / exact(i, j)).abs()
                })
                .fold(0.0, f64::max);
            assert!(worst > 1e-6, "{name} unexpectedly exact at degree {deg}");
        }
    }

    #[test]
    fn points_inside_and_weights_positive() {
        for l in 1..=MAX_POINTS_PER_DIM {
            let r = tensor_square(l).unwrap();
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!(r.points.iter().all(|p| p.iter().all(|&c| (0.0..=1.0).contains(&c))));
        }
        for &k in &TRIANGLE_ORDERS {
            let r = triangle_rule(k).unwrap();
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!(r.points.iter().all(|p| p[0] >= 0.0 && p[1] >= 0.0 && p[0] + p[1] <= 1.0));
        }
    }

    #[test]
    fn rules_are_reproducible() {
        assert_eq!(triangle_rule(7).unwrap(), triangle_rule(7).unwrap());
        assert_eq!(gauss_interval(6, 0.0, 1.0).unwrap(), gauss_interval(6, 0.0, 1.0).unwrap());
    }
}
