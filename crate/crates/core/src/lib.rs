//! Probabilistic low-cycle-fatigue postprocessing of quadratic finite-element
//! results: surface hazard integration, Weibull failure statistics and
//! maximum-likelihood calibration of the local model.

pub mod calibration;
pub mod cli;
pub mod exec;
pub mod fields;
pub mod keyvalue;
pub mod material;
pub mod mesh;
pub mod quadrature;
pub mod reliability;
pub mod sum;
