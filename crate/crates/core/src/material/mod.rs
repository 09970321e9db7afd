//! Material parameters and the scalar life chain.
//!
//! Units are not checked. `E`, `K` and `sigma_f` must share one stress unit;
//! strains are dimensionless and lives are in load cycles.
//!
//! # Parameter file
//!
//! Flat `key = value` text with `#` comments:
//!
//! | key         | meaning                                   | constraint     |
//! |-------------|-------------------------------------------|----------------|
//! | `E`         | Young's modulus                           | > 0            |
//! | `nu`        | Poisson ratio                             | (-1, 0.5)      |
//! | `K`         | cyclic strain hardening coefficient       | > 0            |
//! | `n_ro`      | cyclic strain hardening exponent          | (0, 1)         |
//! | `sigma_f`   | fatigue strength coefficient              | > 0            |
//! | `b`         | fatigue strength exponent                 | < 0            |
//! | `eps_f`     | fatigue ductility coefficient             | >= 0           |
//! | `c`         | fatigue ductility exponent                | < 0            |
//! | `m_weibull` | Weibull shape                             | >= 1           |
//! | `K_t`       | notch factor (optional, default 1)        | >= 1           |
//! | `amplitude` | `halve_elastic` (default) or `halve_elastic_plastic` | |
//!
//! Unknown keys are ignored with a warning, so a calibration report can be
//! read back as a parameter file.

mod laws;
mod solve;

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::fields::ElasticConstants;
use crate::keyvalue::{self, KeyValueError};

pub use laws::{
    cmb_life, cmb_strain, life_scale_from_elastic_stress, neuber_shakedown, ramberg_osgood_strain, LifeEstimate,
    MAX_LIFE, MIN_LIFE,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaterialError {
    #[error("invalid parameter {name} = {value}: requires {constraint}")]
    InvalidParameter { name: &'static str, value: f64, constraint: &'static str },
    #[error("{quantity} out of domain: {value}")]
    Domain { quantity: &'static str, value: f64 },
    #[error(
        "{solver} solve did not converge for input {input} after {iterations} iterations \
         (bracket {bracket:?}, residuals {residuals:?})"
    )]
    NonConvergence {
        solver: &'static str,
        input: f64,
        iterations: usize,
        bracket: (f64, f64),
        residuals: (f64, f64),
    },
}

impl MaterialError {
    pub(crate) fn invalid(name: &'static str, value: f64, constraint: &'static str) -> Self {
        MaterialError::InvalidParameter { name, value, constraint }
    }
}

fn require(ok: bool, name: &'static str, value: f64, constraint: &'static str) -> Result<(), MaterialError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(MaterialError::invalid(name, value, constraint))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RambergOsgoodParams {
    pub k: f64,
    pub n: f64,
    pub e: f64,
}

impl RambergOsgoodParams {
    pub fn new(k: f64, n: f64, e: f64) -> Result<Self, MaterialError> {
        require(k > 0.0, "K", k, "K > 0")?;
        require(n > 0.0 && n < 1.0, "n_ro", n, "0 < n < 1")?;
        require(e > 0.0, "E", e, "E > 0")?;
        Ok(Self { k, n, e })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmbParams {
    pub sigma_f: f64,
    pub b: f64,
    pub eps_f: f64,
    pub c: f64,
    pub e: f64,
}

impl CmbParams {
    pub fn new(sigma_f: f64, b: f64, eps_f: f64, c: f64, e: f64) -> Result<Self, MaterialError> {
        require(sigma_f > 0.0, "sigma_f", sigma_f, "sigma_f > 0")?;
        require(b < 0.0, "b", b, "b < 0")?;
        require(eps_f >= 0.0, "eps_f", eps_f, "eps_f >= 0")?;
        require(c < 0.0, "c", c, "c < 0")?;
        require(e > 0.0, "E", e, "E > 0")?;
        Ok(Self { sigma_f, b, eps_f, c, e })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotchFactor(f64);

impl NotchFactor {
    pub fn new(k_t: f64) -> Result<Self, MaterialError> {
        require(k_t >= 1.0, "K_t", k_t, "K_t >= 1")?;
        Ok(Self(k_t))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl Default for NotchFactor {
    fn default() -> Self {
        Self(1.0)
    }
}

/// Where the factor one half turns the elastic stress into an amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmplitudeConvention {
    /// `sigma_a = SD^-1(sigma_e / 2)`
    #[default]
    HalveElastic,
    /// `sigma_a = SD^-1(sigma_e) / 2`
    HalveElasticPlastic,
}

impl AmplitudeConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            AmplitudeConvention::HalveElastic => "halve_elastic",
            AmplitudeConvention::HalveElasticPlastic => "halve_elastic_plastic",
        }
    }
}

/// All parameters of the local probabilistic life model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub elastic: ElasticConstants,
    pub ramberg_osgood: RambergOsgoodParams,
    pub cmb: CmbParams,
    pub weibull_shape: f64,
    pub notch: NotchFactor,
    pub amplitude: AmplitudeConvention,
}

/// Maps an elastic von Mises stress to a deterministic life.
pub trait LifeModel: Sync {
    fn weibull_shape(&self) -> f64;
    fn life(&self, elastic_von_mises: f64) -> Result<LifeEstimate, MaterialError>;
}

impl LifeModel for MaterialParams {
    fn weibull_shape(&self) -> f64 {
        self.weibull_shape
    }

    fn life(&self, elastic_von_mises: f64) -> Result<LifeEstimate, MaterialError> {
        life_scale_from_elastic_stress(elastic_von_mises, self)
    }
}

impl MaterialParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        e: f64,
        nu: f64,
        k: f64,
        n_ro: f64,
        sigma_f: f64,
        b: f64,
        eps_f: f64,
        c: f64,
        m: f64,
    ) -> Result<Self, MaterialError> {
        require(m >= 1.0, "m_weibull", m, "m >= 1")?;
        Ok(Self {
            elastic: ElasticConstants::new(e, nu)?,
            ramberg_osgood: RambergOsgoodParams::new(k, n_ro, e)?,
            cmb: CmbParams::new(sigma_f, b, eps_f, c, e)?,
            weibull_shape: m,
            notch: NotchFactor::default(),
            amplitude: AmplitudeConvention::default(),
        })
    }

    /// Steel-like parameter set (MPa) used by fixtures and examples.
    pub fn example() -> Self {
        Self::new(200_000.0, 0.3, 1000.0, 0.1, 900.0, -0.09, 0.3, -0.6, 3.0).expect("valid example")
    }

    pub fn youngs_modulus(&self) -> f64 {
        self.elastic.youngs_modulus()
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        out.push_str("# lcfpost material parameters\n");
        let ro = &self.ramberg_osgood;
        let cmb = &self.cmb;
        keyvalue::push(&mut out, "E", format!("{:?}", self.youngs_modulus()));
        keyvalue::push(&mut out, "nu", format!("{:?}", self.elastic.poisson_ratio()));
        keyvalue::push(&mut out, "K", format!("{:?}", ro.k));
        keyvalue::push(&mut out, "n_ro", format!("{:?}", ro.n));
        keyvalue::push(&mut out, "sigma_f", format!("{:?}", cmb.sigma_f));
        keyvalue::push(&mut out, "b", format!("{:?}", cmb.b));
        keyvalue::push(&mut out, "eps_f", format!("{:?}", cmb.eps_f));
        keyvalue::push(&mut out, "c", format!("{:?}", cmb.c));
        keyvalue::push(&mut out, "m_weibull", format!("{:?}", self.weibull_shape));
        keyvalue::push(&mut out, "K_t", format!("{:?}", self.notch.value()));
        let _ = writeln!(out, "amplitude = {}", self.amplitude.as_str());
        out
    }
}

#[derive(Debug, Error)]
pub enum MaterialFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Syntax(#[from] KeyValueError),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: MaterialError },
}

pub(crate) const MATERIAL_KEYS: [&str; 11] =
    ["E", "nu", "K", "n_ro", "sigma_f", "b", "eps_f", "c", "m_weibull", "K_t", "amplitude"];

/// Values present in a parameter file, all optional.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialMaterial {
    pub values: Vec<(&'static str, f64, usize)>,
    pub amplitude: Option<AmplitudeConvention>,
}

impl PartialMaterial {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.iter().find(|(k, _, _)| *k == key).map(|(_, v, _)| *v)
    }

    fn line_of(&self, key: &str) -> usize {
        self.values.iter().find(|(k, _, _)| *k == key).map(|(_, _, l)| *l).unwrap_or(0)
    }

    fn required(&self, key: &'static str) -> Result<f64, MaterialFileError> {
        self.get(key).ok_or(MaterialFileError::Missing(key))
    }

    pub fn complete(&self) -> Result<MaterialParams, MaterialFileError> {
        let keys = ["E", "nu", "K", "n_ro", "sigma_f", "b", "eps_f", "c", "m_weibull"];
        let v: Vec<f64> = keys.iter().map(|k| self.required(k)).collect::<Result<_, _>>()?;
        let mut params = MaterialParams::new(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]).map_err(|e| {
            let line = match &e {
                MaterialError::InvalidParameter { name, .. } => self.line_of(name),
                _ => 0,
            };
            MaterialFileError::Invalid { line, source: e }
        })?;
        if let Some(kt) = self.get("K_t") {
            params.notch =
                NotchFactor::new(kt).map_err(|e| MaterialFileError::Invalid { line: self.line_of("K_t"), source: e })?;
        }
        if let Some(a) = self.amplitude {
            params.amplitude = a;
        }
        Ok(params)
    }
}

pub fn parse_partial_material(text: &str) -> Result<PartialMaterial, MaterialFileError> {
    let mut out = PartialMaterial::default();
    for entry in keyvalue::parse(text)? {
        match MATERIAL_KEYS.iter().find(|k| **k == entry.key) {
            Some(&"amplitude") => {
                out.amplitude = Some(match entry.value.as_str() {
                    "halve_elastic" => AmplitudeConvention::HalveElastic,
                    "halve_elastic_plastic" => AmplitudeConvention::HalveElasticPlastic,
                    other => {
                        return Err(KeyValueError { line: entry.line, message: format!("unknown amplitude `{other}`") }
                            .into())
                    }
                })
            }
            Some(key) => out.values.push((key, keyvalue::parse_f64(&entry)?, entry.line)),
            None => log::warn!("line {}: ignoring unknown material key `{}`", entry.line, entry.key),
        }
    }
    Ok(out)
}

pub fn parse_material(text: &str) -> Result<MaterialParams, MaterialFileError> {
    parse_partial_material(text)?.complete()
}

fn read_text(path: &Path) -> Result<String, MaterialFileError> {
    std::fs::read_to_string(path).map_err(|source| MaterialFileError::Io { path: path.display().to_string(), source })
}

pub fn read_material(path: &Path) -> Result<MaterialParams, MaterialFileError> {
    parse_material(&read_text(path)?)
}

pub fn read_partial_material(path: &Path) -> Result<PartialMaterial, MaterialFileError> {
    parse_partial_material(&read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_round_trip() {
        let mut p = MaterialParams::example();
        p.notch = NotchFactor::new(1.7).unwrap();
        p.amplitude = AmplitudeConvention::HalveElasticPlastic;
        p.weibull_shape = 1.0 / 0.3;
        assert_eq!(parse_material(&p.to_file_string()).unwrap(), p);
    }

    #[test]
    fn missing_and_invalid_keys() {
        let text = MaterialParams::example().to_file_string();
        let without_c: String = text.lines().filter(|l| !l.starts_with("c ")).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_material(&without_c), Err(MaterialFileError::Missing("c"))));
        let bad = text.replace("b = -0.09", "b = 0.09");
        match parse_material(&bad) {
            Err(MaterialFileError::Invalid { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
        let garbage = text.replace("nu = 0.3", "nu = abc");
        assert!(matches!(parse_material(&garbage), Err(MaterialFileError::Syntax(KeyValueError { line: 3, .. }))));
    }

    #[test]
    fn unknown_keys_are_ignored() {
        let text = MaterialParams::example().to_file_string() + "log_likelihood = -12.5\n";
        assert_eq!(parse_material(&text).unwrap(), MaterialParams::example());
    }

    #[test]
    fn parameter_constraints() {
        assert!(RambergOsgoodParams::new(1000.0, 1.0, 1.0).is_err());
        assert!(CmbParams::new(900.0, -0.1, -0.1, -0.5, 1.0).is_err());
        assert!(CmbParams::new(900.0, -0.1, 0.0, -0.5, 1.0).is_ok());
        assert!(NotchFactor::new(0.9).is_err());
        assert!(MaterialParams::new(2e5, 0.3, 1e3, 0.1, 900.0, -0.09, 0.3, -0.6, 0.8).is_err());
    }
}
