//! Scalar material chain: elastic von Mises stress -> Neuber shakedown ->
//! Ramberg-Osgood strain -> Coffin-Manson-Basquin life.

use super::solve::{solve_increasing, SolveFailure};
use super::{AmplitudeConvention, CmbParams, MaterialError, MaterialParams, NotchFactor, RambergOsgoodParams};

/// Shortest life the strain-life curve is evaluated at; larger strains clamp here.
pub const MIN_LIFE: f64 = 0.25;
/// Lives beyond this are reported as infinite.
pub const MAX_LIFE: f64 = 1e300;

const RESIDUAL_TOL: f64 = 1e-12;
const WIDTH_TOL: f64 = 1e-14;

/// Deterministic life `N_det` at one material point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifeEstimate {
    /// Cycles; `f64::INFINITY` for unloaded material.
    pub cycles: f64,
    /// The strain amplitude exceeded the curve at [`MIN_LIFE`] and was clamped.
    pub clamped: bool,
}

impl LifeEstimate {
    pub fn infinite() -> Self {
        Self { cycles: f64::INFINITY, clamped: false }
    }

    /// `N_det^-m`; exactly zero for the infinite-life sentinel.
    pub fn hazard_weight(&self, m: f64) -> f64 {
        if self.cycles.is_infinite() {
            0.0
        } else {
            self.cycles.powf(-m)
        }
    }
}

fn non_convergence(solver: &'static str, input: f64, f: SolveFailure) -> MaterialError {
    MaterialError::NonConvergence {
        solver,
        input,
        iterations: f.iterations,
        bracket: (f.lo, f.hi),
        residuals: (f.f_lo, f.f_hi),
    }
}

/// `eps = sigma / E + (sigma / K)^(1/n)`.
pub fn ramberg_osgood_strain(stress: f64, p: &RambergOsgoodParams) -> Result<f64, MaterialError> {
    if !(stress >= 0.0) {
        return Err(MaterialError::Domain { quantity: "stress", value: stress });
    }
    Ok(stress / p.e + (stress / p.k).powf(1.0 / p.n))
}

/// Elastic-plastic stress `sigma` solving
/// `(K_t sigma_e)^2 / E = sigma^2 / E + sigma (sigma / K)^(1/n)`.
pub fn neuber_shakedown(elastic: f64, notch: NotchFactor, p: &RambergOsgoodParams) -> Result<f64, MaterialError> {
    if !(elastic >= 0.0) || elastic.is_infinite() {
        return Err(MaterialError::Domain { quantity: "elastic stress", value: elastic });
    }
    if elastic == 0.0 {
        return Ok(0.0);
    }
    let upper = notch.value() * elastic;
    let lhs = upper * upper / p.e;
    let inv_n = 1.0 / p.n;
    let residual = |s: f64| s * s / p.e + s * (s / p.k).powf(inv_n) - lhs;
    solve_increasing(residual, 0.0, upper, RESIDUAL_TOL * lhs, WIDTH_TOL * upper)
        .map_err(|f| non_convergence("neuber", elastic, f))
}

/// Strain amplitude on the strain-life curve at `cycles`.
pub fn cmb_strain(cycles: f64, p: &CmbParams) -> f64 {
    let reversals = 2.0 * cycles;
    p.sigma_f / p.e * reversals.powf(p.b) + p.eps_f * reversals.powf(p.c)
}

// Curve in terms of x = ln(2N).
fn cmb_strain_log(x: f64, p: &CmbParams) -> f64 {
    p.sigma_f / p.e * (p.b * x).exp() + p.eps_f * (p.c * x).exp()
}

/// Inverts the strain-life curve for `N_det`.
///
/// The root is bracketed by doubling `N` from 0.5; strains above the curve at
/// [`MIN_LIFE`] clamp there, strains below the curve at [`MAX_LIFE`] give an
/// infinite life.
pub fn cmb_life(strain: f64, p: &CmbParams) -> Result<LifeEstimate, MaterialError> {
    if !(strain > 0.0) {
        return Err(MaterialError::Domain { quantity: "strain amplitude", value: strain });
    }
    let mut lo = (2.0 * MIN_LIFE).ln();
    let at_min = cmb_strain_log(lo, p);
    if strain > at_min {
        return Ok(LifeEstimate { cycles: MIN_LIFE, clamped: true });
    }
    if strain == at_min {
        return Ok(LifeEstimate { cycles: MIN_LIFE, clamped: false });
    }
    let x_max = (2.0 * MAX_LIFE).ln();
    let step = std::f64::consts::LN_2;
    let mut hi = 0.0; // N = 0.5
    while cmb_strain_log(hi, p) > strain {
        lo = hi;
        hi += step;
        if hi > x_max {
            return Ok(LifeEstimate::infinite());
        }
    }
    // increasing residual in x
    let residual = |x: f64| strain - cmb_strain_log(x, p);
    let x = solve_increasing(residual, lo, hi, RESIDUAL_TOL * strain, WIDTH_TOL)
        .map_err(|f| non_convergence("cmb", strain, f))?;
    Ok(LifeEstimate { cycles: 0.5 * x.exp(), clamped: false })
}

/// Full chain from the elastic von Mises stress to `N_det`.
pub fn life_scale_from_elastic_stress(elastic: f64, params: &MaterialParams) -> Result<LifeEstimate, MaterialError> {
    if !(elastic >= 0.0) || elastic.is_infinite() {
        return Err(MaterialError::Domain { quantity: "elastic von Mises stress", value: elastic });
    }
    if elastic == 0.0 {
        return Ok(LifeEstimate::infinite());
    }
    let ro = &params.ramberg_osgood;
    let amplitude = match params.amplitude {
        AmplitudeConvention::HalveElastic => neuber_shakedown(0.5 * elastic, params.notch, ro)?,
        AmplitudeConvention::HalveElasticPlastic => 0.5 * neuber_shakedown(elastic, params.notch, ro)?,
    };
    let strain = ramberg_osgood_strain(amplitude, ro)?;
    if strain == 0.0 {
        return Ok(LifeEstimate::infinite());
    }
    cmb_life(strain, &params.cmb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ro() -> RambergOsgoodParams {
        RambergOsgoodParams::new(1000.0, 0.1, 200_000.0).unwrap()
    }

    fn cmb() -> CmbParams {
        CmbParams::new(900.0, -0.09, 0.3, -0.6, 200_000.0).unwrap()
    }

    #[test]
    fn ramberg_osgood_examples() {
        let p = ro();
        assert_eq!(ramberg_osgood_strain(0.0, &p).unwrap(), 0.0);
        assert!((ramberg_osgood_strain(1000.0, &p).unwrap() - (1000.0 / 200_000.0 + 1.0)).abs() < 1e-15);
        let e = ramberg_osgood_strain(500.0, &p).unwrap();
        assert!((e - (0.0025 + 0.5f64.powi(10))).abs() < 1e-15);
        assert!((e - 0.003_476_562_5).abs() < 1e-12);
        assert!(ramberg_osgood_strain(-1.0, &p).is_err());
    }

    // Plain bisection, independent of the production solver.
    fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn neuber_examples() {
        let p = ro();
        let kt = NotchFactor::default();
        assert_eq!(neuber_shakedown(0.0, kt, &p).unwrap(), 0.0);
        let s = neuber_shakedown(800.0, kt, &p).unwrap();
        let lhs = 800.0f64.powi(2) / p.e;
        let rhs = s * s / p.e + s * (s / p.k).powf(10.0);
        assert!(((lhs - rhs) / lhs).abs() < 1e-10);
        let oracle = bisect(|x| x * x / p.e + x * (x / p.k).powf(10.0) - lhs, 0.0, 800.0);
        assert!(((s - oracle) / oracle).abs() < 1e-12);
        assert!(s < 800.0);
        let notched = neuber_shakedown(300.0, NotchFactor::new(2.5).unwrap(), &p).unwrap();
        assert!(notched < 750.0 && notched > s * 0.0);
    }

    #[test]
    fn neuber_is_nearly_elastic_for_small_stresses() {
        let p = ro();
        for s in [1.0, 10.0, 50.0, 100.0] {
            let r = neuber_shakedown(s, NotchFactor::default(), &p).unwrap();
            assert!((r - s).abs() / s < 1e-3, "{s} -> {r}");
        }
    }

    #[test]
    fn single_term_inversions() {
        let basquin = CmbParams::new(900.0, -0.09, 0.0, -0.6, 200_000.0).unwrap();
        for eps in [1e-3, 2e-3, 4e-3] {
            let n = cmb_life(eps, &basquin).unwrap().cycles;
            let closed = 0.5 * (eps * basquin.e / basquin.sigma_f).powf(1.0 / basquin.b);
            assert!(((n - closed) / closed).abs() < 1e-10, "{eps}: {n} vs {closed}");
        }
        // Coffin-Manson dominated: a vanishing elastic term.
        let coffin = CmbParams::new(1e-9, -0.09, 0.3, -0.6, 200_000.0).unwrap();
        for eps in [5e-3, 1e-2, 3e-2] {
            let n = cmb_life(eps, &coffin).unwrap().cycles;
            let closed = 0.5 * (eps / coffin.eps_f).powf(1.0 / coffin.c);
            assert!(((n - closed) / closed).abs() < 1e-10);
        }
    }

    #[test]
    fn cmb_domain_and_clamping() {
        let p = cmb();
        assert!(cmb_life(0.0, &p).is_err());
        assert!(cmb_life(-1e-3, &p).is_err());
        let huge = cmb_life(10.0, &p).unwrap();
        assert_eq!(huge, LifeEstimate { cycles: MIN_LIFE, clamped: true });
        let tiny = cmb_life(1e-40, &p).unwrap();
        assert!(tiny.cycles.is_infinite());
        assert_eq!(tiny.hazard_weight(3.0), 0.0);
    }

    #[test]
    fn chain_examples() {
        let params = MaterialParams::example();
        assert!(life_scale_from_elastic_stress(0.0, &params).unwrap().cycles.is_infinite());
        let mut last = f64::INFINITY;
        for k in 1..60 {
            let n = life_scale_from_elastic_stress(k as f64 * 40.0, &params).unwrap().cycles;
            assert!(n < last);
            last = n;
        }
        assert!(life_scale_from_elastic_stress(-1.0, &params).is_err());
    }

    #[test]
    fn amplitude_conventions_differ_in_the_plastic_range() {
        let mut params = MaterialParams::example();
        let a = life_scale_from_elastic_stress(1600.0, &params).unwrap().cycles;
        params.amplitude = AmplitudeConvention::HalveElasticPlastic;
        let b = life_scale_from_elastic_stress(1600.0, &params).unwrap().cycles;
        // halving after the plastic correction gives the lower amplitude
        assert!(b > a);
    }

    #[test]
    fn solves_are_bit_reproducible() {
        let params = MaterialParams::example();
        let a = life_scale_from_elastic_stress(733.3, &params).unwrap();
        let b = life_scale_from_elastic_stress(733.3, &params).unwrap();
        assert_eq!(a.cycles.to_bits(), b.cycles.to_bits());
    }

    proptest! {
        #[test]
        fn cmb_round_trip(log_eps in -3.0f64..-1.0) {
            let p = cmb();
            let eps = 10f64.powf(log_eps);
            let life = cmb_life(eps, &p).unwrap();
            prop_assume!(!life.clamped);
            let back = cmb_strain(life.cycles, &p);
            prop_assert!(((back - eps) / eps).abs() < 1e-10);
        }

        #[test]
        fn neuber_is_bounded_by_the_elastic_line(log_s in -3.0f64..2.0) {
            let p = ro();
            let s = p.k * 10f64.powf(log_s);
            let r = neuber_shakedown(s, NotchFactor::default(), &p).unwrap();
            prop_assert!(r >= 0.0 && r <= s);
            let r2 = neuber_shakedown(s * 1.01, NotchFactor::default(), &p).unwrap();
            prop_assert!(r2 > r);
        }
    }
}
