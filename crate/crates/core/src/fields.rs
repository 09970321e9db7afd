//! Displacement, strain, stress and von Mises fields reconstructed from
//! nodal displacements at arbitrary reference-cell points.

use nalgebra::{Matrix3, Vector3};

use crate::material::MaterialError;
use crate::mesh::{nodal_gradient, shape_functions, shape_gradients, ElementGeometry, ElementKind, MeshError};

/// Symmetric 3x3 tensor stored as `[xx, yy, zz, yz, xz, xy]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor(pub [f64; 6]);

impl SymTensor {
    pub fn from_matrix_symmetrized(m: &Matrix3<f64>) -> Self {
        Self([
            m[(0, 0)],
            m[(1, 1)],
            m[(2, 2)],
            0.5 * (m[(1, 2)] + m[(2, 1)]),
            0.5 * (m[(0, 2)] + m[(2, 0)]),
            0.5 * (m[(0, 1)] + m[(1, 0)]),
        ])
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        let [xx, yy, zz, yz, xz, xy] = self.0;
        Matrix3::new(xx, xy, xz, xy, yy, yz, xz, yz, zz)
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StrainTensor(pub SymTensor);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StressTensor(pub SymTensor);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticConstants {
    youngs_modulus: f64,
    poisson_ratio: f64,
}

impl ElasticConstants {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64) -> Result<Self, MaterialError> {
        if !(youngs_modulus.is_finite() && youngs_modulus > 0.0) {
            return Err(MaterialError::invalid("E", youngs_modulus, "E > 0"));
        }
        if !(poisson_ratio > -1.0 && poisson_ratio < 0.5) {
            return Err(MaterialError::invalid("nu", poisson_ratio, "-1 < nu < 0.5"));
        }
        Ok(Self { youngs_modulus, poisson_ratio })
    }

    pub fn youngs_modulus(&self) -> f64 {
        self.youngs_modulus
    }

    pub fn poisson_ratio(&self) -> f64 {
        self.poisson_ratio
    }

    /// Lame coefficients `(lambda, mu)`.
    pub fn lame(&self) -> (f64, f64) {
        let (e, nu) = (self.youngs_modulus, self.poisson_ratio);
        (e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu)))
    }
}

pub fn displacement_at(kind: ElementKind, displacements: &[Vector3<f64>], x: [f64; 3]) -> Result<Vector3<f64>, MeshError> {
    let psi = shape_functions(kind, x)?;
    Ok(displacements.iter().zip(&psi).fold(Vector3::zeros(), |acc, (u, w)| acc + u * *w))
}

/// Small strain at a reference point: `du/dx = (du/dx_hat) J^-1`, symmetrized.
pub fn strain_at(
    element: &ElementGeometry,
    displacements: &[Vector3<f64>],
    x: [f64; 3],
) -> Result<StrainTensor, MeshError> {
    let grads = shape_gradients(element.kind, x)?;
    let jacobian = nodal_gradient(&element.coords, &grads);
    element.check_jacobian(&jacobian)?;
    Ok(strain_from_reference(&jacobian, &nodal_gradient(displacements, &grads), element))
}

/// Strain from the transform Jacobian and the reference displacement gradient.
/// The Jacobian must already have passed the degeneracy check.
pub(crate) fn strain_from_reference(
    jacobian: &Matrix3<f64>,
    du_ref: &Matrix3<f64>,
    element: &ElementGeometry,
) -> StrainTensor {
    let inv = jacobian
        .try_inverse()
        .unwrap_or_else(|| panic!("element {} passed the degeneracy check but is singular", element.id));
    StrainTensor(SymTensor::from_matrix_symmetrized(&(du_ref * inv)))
}

/// `sigma = lambda tr(eps) I + 2 mu eps`.
pub fn stress_from_strain(strain: &StrainTensor, constants: &ElasticConstants) -> StressTensor {
    let (lambda, mu) = constants.lame();
    let e = strain.0 .0;
    let p = lambda * strain.0.trace();
    StressTensor(SymTensor([
        p + 2.0 * mu * e[0],
        p + 2.0 * mu * e[1],
        p + 2.0 * mu * e[2],
        2.0 * mu * e[3],
        2.0 * mu * e[4],
        2.0 * mu * e[5],
    ]))
}

/// Von Mises stress from the second deviatoric invariant, `sqrt(3/2 s:s)`.
pub fn von_mises(stress: &StressTensor) -> f64 {
    let s = stress.0 .0;
    let mean = (s[0] + s[1] + s[2]) / 3.0;
    let (d0, d1, d2) = (s[0] - mean, s[1] - mean, s[2] - mean);
    let ss = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * (s[3] * s[3] + s[4] * s[4] + s[5] * s[5]);
    (1.5 * ss).sqrt()
}
