//! Component-level Weibull model: boundary hazard integration, scale and
//! PoF, per-face localization.

pub mod output;
mod report;
pub mod weibull;

use log::{debug, warn};
use nalgebra::Vector3;
use thiserror::Error;

use crate::exec::{map_ordered, Parallelism};
use crate::fields::{strain_from_reference, stress_from_strain, von_mises, ElasticConstants};
use crate::material::{LifeEstimate, LifeModel, MaterialError, MaterialParams};
use crate::mesh::{
    extract_boundary_faces, gram_from_jacobian, nodal_gradient, shape_gradients, BoundaryFace, ElementId, MapArea, Mesh,
    MeshError,
};
use crate::quadrature::{FaceRules, QuadratureRule};
use crate::sum::CompensatedSum;

pub use report::{top_faces_report, TopFaceEntry};
pub use weibull::{
    aggregate_segments, crack_count_probability, cumulative_hazard, density_fn, hazard_rate, pof, shape_from_pof,
    survival, weibull_scale,
};

#[derive(Debug, Error)]
pub enum ReliabilityError {
    #[error("Weibull shape must be positive and finite, got {0}")]
    InvalidShape(f64),
    #[error("hazard total must be non-negative and finite, got {0}")]
    InvalidHazard(f64),
    #[error("mesh has no boundary faces")]
    NoBoundaryFaces,
    #[error("all {0} elements carrying boundary faces are degenerate")]
    AllDegenerate(usize),
    #[error("element {element}, face {face}: {source}")]
    Material {
        element: ElementId,
        face: usize,
        #[source]
        source: MaterialError,
    },
}

/// Hazard carried by one boundary face.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceContribution {
    pub element_id: ElementId,
    pub face: usize,
    pub area: f64,
    /// `J_f = sum sqrt(g) N_det^-m w` over the face rule.
    pub hazard: f64,
    /// Quadrature points whose strain exceeded the strain-life curve.
    pub clamped_points: usize,
}

impl FaceContribution {
    /// Hazard per unit area; times `n^m` this is the expected crack count
    /// per unit area after `n` cycles.
    pub fn density(&self) -> f64 {
        self.hazard / self.area
    }

    /// Weibull scale of the face taken on its own.
    pub fn eta(&self, m: f64) -> f64 {
        weibull_scale(self.hazard, m).unwrap_or(f64::NAN)
    }
}

/// An element whose boundary faces were left out of the integral.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedElement {
    pub element_id: ElementId,
    pub reason: MeshError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HazardIntegration {
    pub total: f64,
    /// Ascending `(element_id, face)`.
    pub faces: Vec<FaceContribution>,
    pub skipped: Vec<SkippedElement>,
}

impl HazardIntegration {
    pub fn clamped_points(&self) -> usize {
        self.faces.iter().map(|f| f.clamped_points).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityResult {
    pub eta: f64,
    pub m: f64,
    pub hazard: HazardIntegration,
}

impl ReliabilityResult {
    pub fn total(&self) -> f64 {
        self.hazard.total
    }

    pub fn faces(&self) -> &[FaceContribution] {
        &self.hazard.faces
    }

    pub fn pof(&self, n: f64) -> f64 {
        pof(n, self.eta, self.m)
    }

    pub fn density(&self, n: f64) -> f64 {
        density_fn(n, self.eta, self.m)
    }

    /// PoF of `segments` identical, independent copies of the component.
    pub fn pof_segments(&self, n: f64, segments: u32) -> f64 {
        aggregate_segments(self.pof(n), segments)
    }

    /// Area of the boundary that entered the integral.
    pub fn area(&self) -> f64 {
        self.hazard.faces.iter().map(|f| f.area).collect::<CompensatedSum>().value()
    }

    /// Infinite scale: no loaded material anywhere on the surface.
    pub fn is_infinite_life(&self) -> bool {
        self.eta.is_infinite()
    }
}

/// Life model whose lives are all multiplied by a constant.
#[derive(Debug, Clone, Copy)]
pub struct ScaledLife<L> {
    pub inner: L,
    pub factor: f64,
}

impl<L: LifeModel> LifeModel for ScaledLife<L> {
    fn weibull_shape(&self) -> f64 {
        self.inner.weibull_shape()
    }

    fn life(&self, elastic_von_mises: f64) -> Result<LifeEstimate, MaterialError> {
        let mut est = self.inner.life(elastic_von_mises)?;
        est.cycles *= self.factor;
        Ok(est)
    }
}

enum ElementOutcome {
    Faces(Vec<FaceContribution>),
    Skipped(SkippedElement),
}

fn rule_for<'r>(rules: &'r FaceRules, area: MapArea) -> &'r QuadratureRule<2> {
    match area {
        MapArea::Square => &rules.square,
        MapArea::Triangle => &rules.triangle,
    }
}

fn integrate_element<L: LifeModel + ?Sized>(
    mesh: &Mesh,
    faces: &[BoundaryFace],
    elastic: &ElasticConstants,
    model: &L,
    rules: &FaceRules,
) -> Result<ElementOutcome, ReliabilityError> {
    let index = faces[0].element_index;
    let geom = mesh.element_geometry(index);
    let disps: Vec<Vector3<f64>> = mesh.element_displacements(index);
    let m = model.weibull_shape();
    let skip = |reason| Ok(ElementOutcome::Skipped(SkippedElement { element_id: geom.id, reason }));

    let mut out = Vec::with_capacity(faces.len());
    for face in faces {
        let chart = &face.chart;
        let rule = rule_for(rules, chart.map_area());
        let mut area = CompensatedSum::new();
        let mut hazard = CompensatedSum::new();
        let mut clamped_points = 0;
        for (s, w) in rule.iter() {
            let x = chart.reference_point(*s);
            let grads = match shape_gradients(geom.kind, x) {
                Ok(g) => g,
                Err(e) => return skip(e),
            };
            let j = nodal_gradient(&geom.coords, &grads);
            if let Err(e) = geom.check_jacobian(&j) {
                return skip(e);
            }
            let gram = match gram_from_jacobian(&geom, chart, &j) {
                Ok(g) => g,
                Err(e) => return skip(e),
            };
            let du = nodal_gradient(&disps, &grads);
            let strain = strain_from_reference(&j, &du, &geom);
            let vm = von_mises(&stress_from_strain(&strain, elastic));
            let life = model
                .life(vm)
                .map_err(|source| ReliabilityError::Material { element: geom.id, face: chart.face, source })?;
            clamped_points += usize::from(life.clamped);
            area.add(gram * w);
            hazard.add(gram * life.hazard_weight(m) * w);
        }
        out.push(FaceContribution {
            element_id: face.element_id,
            face: chart.face,
            area: area.value(),
            hazard: hazard.value(),
            clamped_points,
        });
    }
    Ok(ElementOutcome::Faces(out))
}

/// Splits the sorted boundary faces into runs belonging to one element.
fn group_by_element(faces: &[BoundaryFace]) -> Vec<&[BoundaryFace]> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=faces.len() {
        if i == faces.len() || faces[i].element_index != faces[start].element_index {
            groups.push(&faces[start..i]);
            start = i;
        }
    }
    groups
}

/// Integrates `N_det^-m` over the mesh boundary.
///
/// Elements are evaluated independently (in parallel when `mode` allows),
/// then folded in ascending `(element_id, face)` order with compensated
/// summation, so the result does not depend on `mode` or thread count.
pub fn integrate_hazard<L: LifeModel + ?Sized>(
    mesh: &Mesh,
    elastic: &ElasticConstants,
    model: &L,
    rules: &FaceRules,
    mode: Parallelism,
) -> Result<HazardIntegration, ReliabilityError> {
    let m = model.weibull_shape();
    if !(m > 0.0 && m.is_finite()) {
        return Err(ReliabilityError::InvalidShape(m));
    }
    let boundary = extract_boundary_faces(mesh);
    if boundary.is_empty() {
        return Err(ReliabilityError::NoBoundaryFaces);
    }
    let groups = group_by_element(&boundary);
    debug!("integrating {} boundary faces on {} elements ({mode})", boundary.len(), groups.len());
    let outcomes = map_ordered(&groups, mode, |g| integrate_element(mesh, g, elastic, model, rules));

    let mut faces = Vec::with_capacity(boundary.len());
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome? {
            ElementOutcome::Faces(f) => faces.extend(f),
            ElementOutcome::Skipped(s) => {
                warn!("skipping element {}: {}", s.element_id, s.reason);
                skipped.push(s);
            }
        }
    }
    if faces.is_empty() {
        return Err(ReliabilityError::AllDegenerate(skipped.len()));
    }
    let total = faces.iter().map(|f| f.hazard).collect::<CompensatedSum>().value();
    if !(total >= 0.0 && total.is_finite()) {
        return Err(ReliabilityError::InvalidHazard(total));
    }
    Ok(HazardIntegration { total, faces, skipped })
}

/// Hazard integral followed by the Weibull scale.
pub fn assess_with<L: LifeModel + ?Sized>(
    mesh: &Mesh,
    elastic: &ElasticConstants,
    model: &L,
    rules: &FaceRules,
    mode: Parallelism,
) -> Result<ReliabilityResult, ReliabilityError> {
    let hazard = integrate_hazard(mesh, elastic, model, rules, mode)?;
    let m = model.weibull_shape();
    let eta = weibull_scale(hazard.total, m)?;
    if eta.is_infinite() {
        warn!("hazard integral is zero: the surface carries no load and the failure probability is zero");
    }
    Ok(ReliabilityResult { eta, m, hazard })
}

pub fn assess(
    mesh: &Mesh,
    params: &MaterialParams,
    rules: &FaceRules,
    mode: Parallelism,
) -> Result<ReliabilityResult, ReliabilityError> {
    assess_with(mesh, &params.elastic, params, rules, mode)
}
