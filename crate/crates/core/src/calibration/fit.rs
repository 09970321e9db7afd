use std::fmt::Write as _;
use std::io::Write;

use argmin::core::{CostFunction, Error as ArgminError, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use log::{debug, info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{log_likelihood, strain_levels, CalibrationError, FatigueParams, FitParameter, SpecimenRecord};
use crate::material::{CmbParams, MaterialParams};

// Finite stand-in for -inf so the simplex statistics stay finite.
const PENALTY: f64 = 1e300;
const POLISH_PASSES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Perturbed restarts in addition to the run from the initial guess.
    pub restarts: usize,
    pub seed: u64,
    pub free: Vec<FitParameter>,
    pub max_iterations: u64,
    /// Standard deviation of the simplex costs (mean negative
    /// log-likelihood per specimen) at which a run counts as converged.
    pub tolerance: f64,
    /// Half-width of the uniform perturbation of restart points, in
    /// transformed coordinates.
    pub perturbation: f64,
    /// Edge length of the initial simplex, in transformed coordinates.
    pub initial_step: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            seed: 0,
            free: FitParameter::ALL.to_vec(),
            max_iterations: 5000,
            tolerance: 1e-11,
            perturbation: 0.5,
            initial_step: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartSummary {
    pub index: usize,
    pub start: FatigueParams,
    pub end: FatigueParams,
    pub start_log_likelihood: f64,
    pub log_likelihood: f64,
    pub iterations: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub fitted: FatigueParams,
    pub log_likelihood: f64,
    pub initial: FatigueParams,
    pub initial_log_likelihood: f64,
    pub converged: bool,
    pub iterations: u64,
    pub best_restart: usize,
    pub restarts: Vec<RestartSummary>,
    pub warnings: Vec<String>,
    pub records: usize,
    pub strain_levels: usize,
    pub free: Vec<FitParameter>,
    pub seed: u64,
}

#[derive(Clone, Copy)]
struct Objective<'a> {
    records: &'a [SpecimenRecord],
    base: FatigueParams,
    free: &'a [FitParameter],
}

impl Objective<'_> {
    fn theta(&self, x: &[f64]) -> FatigueParams {
        let mut t = self.base;
        for (p, &xi) in self.free.iter().zip(x) {
            p.set(&mut t, p.to_natural(xi));
        }
        t
    }

    fn internal(&self, t: &FatigueParams) -> Vec<f64> {
        self.free.iter().map(|p| p.to_internal(p.get(t))).collect()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let ll = log_likelihood(self.records, &self.theta(x));
        if ll.is_finite() {
            -ll / self.records.len() as f64
        } else {
            PENALTY
        }
    }
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> Result<f64, ArgminError> {
        Ok(self.eval(x))
    }
}

fn optimizer_error(e: ArgminError) -> CalibrationError {
    CalibrationError::Optimizer(e.to_string())
}

/// Nelder-Mead from `x0`, restarted on its own optimum until a converged
/// pass no longer improves the cost.
fn run_simplex(obj: Objective<'_>, x0: Vec<f64>, opts: &FitOptions) -> Result<(Vec<f64>, f64, u64, bool), CalibrationError> {
    let mut x = x0;
    let mut best = obj.eval(&x);
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..POLISH_PASSES {
        let mut simplex = vec![x.clone()];
        for i in 0..x.len() {
            let mut v = x.clone();
            v[i] += opts.initial_step;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex).with_sd_tolerance(opts.tolerance).map_err(optimizer_error)?;
        let res = Executor::new(obj, solver)
            .configure(|s| s.max_iters(opts.max_iterations))
            .run()
            .map_err(optimizer_error)?;
        let state = &res.state;
        iterations += state.get_iter();
        converged = matches!(state.get_termination_status(), TerminationStatus::Terminated(TerminationReason::SolverConverged));
        let (cost, param) = (state.get_best_cost(), state.get_best_param().cloned());
        let improved = best - cost;
        if let Some(p) = param {
            if cost <= best {
                x = p;
                best = cost;
            }
        }
        if converged && improved <= opts.tolerance {
            break;
        }
    }
    Ok((x, best, iterations, converged))
}

/// Starting point when the parameter file gives none: `b = -0.1`,
/// `c = -0.6`, both curve terms equal to half the strain at the geometric
/// mean life of the data, `m = 3`.
pub fn initial_guess(records: &[SpecimenRecord], e: f64) -> FatigueParams {
    let k = records.len().max(1) as f64;
    let ln_mean = |f: fn(&SpecimenRecord) -> f64| records.iter().map(|r| f(r).ln()).sum::<f64>() / k;
    let two_n = (ln_mean(|r| 2.0 * r.n_cycles)).exp();
    let eps = (ln_mean(|r| r.strain_amplitude)).exp();
    let (b, c) = (-0.1, -0.6);
    FatigueParams {
        cmb: CmbParams { sigma_f: e * 0.5 * eps * two_n.powf(-b), b, eps_f: 0.5 * eps * two_n.powf(-c), c, e },
        m: 3.0,
    }
}

/// Maximizes the specimen log-likelihood over the free parameters.
pub fn fit_mle(records: &[SpecimenRecord], initial: &FatigueParams, opts: &FitOptions) -> Result<FitReport, CalibrationError> {
    if records.len() < 3 {
        return Err(CalibrationError::TooFewRecords(records.len()));
    }
    let levels = strain_levels(records);
    if levels < 2 {
        return Err(CalibrationError::TooFewStrainLevels(levels));
    }
    let mut free = Vec::new();
    for p in &opts.free {
        if !free.contains(p) {
            free.push(*p);
        }
    }
    if free.is_empty() {
        return Err(CalibrationError::NothingToFit);
    }
    let initial_ll = log_likelihood(records, initial);
    if !initial_ll.is_finite() {
        return Err(CalibrationError::InadmissibleStart(format!(
            "log-likelihood at the initial guess is {initial_ll}; check signs and m >= 1"
        )));
    }

    let mut warnings = Vec::new();
    let first = records[0].n_cycles;
    if records.iter().all(|r| r.n_cycles == first) {
        warnings.push("all specimen lives are equal: the Weibull shape m is unbounded above".to_string());
    }
    let curve_params = free.iter().filter(|p| **p != FitParameter::M).count();
    if levels < curve_params {
        warnings.push(format!(
            "{levels} strain levels for {curve_params} strain-life parameters: the curve is only determined at the tested levels"
        ));
    }

    let obj = Objective { records, base: *initial, free: &free };
    let x0 = obj.internal(initial);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut restarts = Vec::with_capacity(opts.restarts + 1);
    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    for index in 0..=opts.restarts {
        let start: Vec<f64> = if index == 0 {
            x0.clone()
        } else {
            x0.iter().map(|v| v + rng.random_range(-opts.perturbation..=opts.perturbation)).collect()
        };
        let start_theta = obj.theta(&start);
        let (x, cost, iterations, converged) = run_simplex(obj, start.clone(), opts)?;
        let end = obj.theta(&x);
        let ll = log_likelihood(records, &end);
        debug!("restart {index}: log-likelihood {ll} after {iterations} iterations (converged: {converged})");
        restarts.push(RestartSummary {
            index,
            start: start_theta,
            end,
            start_log_likelihood: log_likelihood(records, &start_theta),
            log_likelihood: ll,
            iterations,
            converged,
        });
        // ties keep the earlier restart
        if converged && best.as_ref().is_none_or(|(_, _, c)| cost < *c) {
            best = Some((index, x, cost));
        }
    }

    let Some((best_restart, x, _)) = best else {
        let best_log_likelihood = restarts.iter().map(|r| r.log_likelihood).fold(f64::NEG_INFINITY, f64::max);
        return Err(CalibrationError::EstimationFailed { best_log_likelihood, restarts });
    };
    let fitted = obj.theta(&x);
    let ll = log_likelihood(records, &fitted);
    if fitted.m > 100.0 {
        warnings.push(format!("fitted m = {} is very large; the data show almost no scatter", fitted.m));
    }
    for w in &warnings {
        warn!("{w}");
    }
    info!("fit finished: log-likelihood {ll} (start {initial_ll})");
    Ok(FitReport {
        fitted,
        log_likelihood: ll,
        initial: *initial,
        initial_log_likelihood: initial_ll,
        converged: true,
        iterations: restarts.iter().map(|r| r.iterations).sum(),
        best_restart,
        restarts,
        warnings,
        records: records.len(),
        strain_levels: levels,
        free,
        seed: opts.seed,
    })
}

fn theta_line(t: &FatigueParams) -> String {
    format!(
        "sigma_f = {:?}, b = {:?}, eps_f = {:?}, c = {:?}, m = {:?}",
        t.cmb.sigma_f, t.cmb.b, t.cmb.eps_f, t.cmb.c, t.m
    )
}

impl FitReport {
    pub fn fitted_material(&self, base: &MaterialParams) -> MaterialParams {
        self.fitted.apply_to(base)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "maximum-likelihood fit");
        let _ = writeln!(s, "specimens: {}", self.records);
        let _ = writeln!(s, "strain levels: {}", self.strain_levels);
        let names: Vec<&str> = self.free.iter().map(|p| p.name()).collect();
        let _ = writeln!(s, "free parameters: {}", names.join(", "));
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "converged: {}", self.converged);
        let _ = writeln!(s, "iterations: {}", self.iterations);
        let _ = writeln!(s, "best restart: {}", self.best_restart);
        let _ = writeln!(s, "initial log-likelihood: {:?}", self.initial_log_likelihood);
        let _ = writeln!(s, "final log-likelihood: {:?}", self.log_likelihood);
        let _ = writeln!(s, "initial: {}", theta_line(&self.initial));
        let _ = writeln!(s, "fitted:  {}", theta_line(&self.fitted));
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

/// One row per restart: start and end points, likelihoods, status.
pub fn write_trace<W: Write>(w: W, restarts: &[RestartSummary]) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["restart".to_string(), "converged".into(), "iterations".into()];
    header.push("start_log_likelihood".into());
    header.push("log_likelihood".into());
    for prefix in ["start", "end"] {
        for p in FitParameter::ALL {
            header.push(format!("{prefix}_{}", p.name()));
        }
    }
    out.write_record(&header)?;
    for r in restarts {
        let mut row = vec![r.index.to_string(), r.converged.to_string(), r.iterations.to_string()];
        row.push(format!("{:?}", r.start_log_likelihood));
        row.push(format!("{:?}", r.log_likelihood));
        for t in [&r.start, &r.end] {
            row.extend(FitParameter::ALL.iter().map(|p| format!("{:?}", p.get(t))));
        }
        out.write_record(&row)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::super::specimen_eta;
    use super::*;
    use crate::material::cmb_strain;

    fn truth() -> FatigueParams {
        let mut t = FatigueParams::from_material(&MaterialParams::example());
        t.m = 4.0;
        t
    }

    /// Inverse-CDF Weibull samples at fixed target lives.
    fn synthetic(t: &FatigueParams, lives: &[f64], per_level: usize, seed: u64) -> Vec<SpecimenRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for &n_det in lives {
            let eps = cmb_strain(n_det, &t.cmb);
            for _ in 0..per_level {
                let u: f64 = rng.random_range(f64::EPSILON..1.0);
                let n = n_det * (-u.ln()).powf(1.0 / t.m);
                out.push(SpecimenRecord { n_cycles: n, strain_amplitude: eps, gauge_area: 1.0 });
            }
        }
        out
    }

    #[test]
    fn guards() {
        let t = truth();
        let two = synthetic(&t, &[1e3], 2, 1);
        assert!(matches!(fit_mle(&two, &t, &FitOptions::default()), Err(CalibrationError::TooFewRecords(2))));
        let one_level = synthetic(&t, &[1e3], 10, 1);
        assert!(matches!(
            fit_mle(&one_level, &t, &FitOptions::default()),
            Err(CalibrationError::TooFewStrainLevels(1))
        ));
        let data = synthetic(&t, &[1e3, 1e4], 5, 1);
        let opts = FitOptions { free: vec![], ..FitOptions::default() };
        assert!(matches!(fit_mle(&data, &t, &opts), Err(CalibrationError::NothingToFit)));
        let mut bad = t;
        bad.m = 0.2;
        assert!(matches!(fit_mle(&data, &bad, &FitOptions::default()), Err(CalibrationError::InadmissibleStart(_))));
    }

    #[test]
    fn shape_only_matches_one_dimensional_mle() {
        let t = truth();
        let data = synthetic(&t, &[2e3, 2e4], 150, 11);
        let opts = FitOptions { free: vec![FitParameter::M], restarts: 1, ..FitOptions::default() };
        let start = FatigueParams { m: 2.0, ..t };
        let fit = fit_mle(&data, &start, &opts).unwrap();
        // score equation in m with known scales, solved by bisection
        let etas: Vec<f64> = data.iter().map(|r| specimen_eta(r, &t).unwrap()).collect();
        let score = |m: f64| {
            data.iter()
                .zip(&etas)
                .map(|(r, e)| {
                    let l = (r.n_cycles / e).ln();
                    1.0 / m + l - (r.n_cycles / e).powf(m) * l
                })
                .sum::<f64>()
        };
        let (mut lo, mut hi) = (1.0, 50.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if score(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((fit.fitted.m - lo).abs() / lo < 1e-4, "{} vs {lo}", fit.fitted.m);
        assert!(fit.fitted.cmb == t.cmb);
    }

    #[test]
    fn full_fit_improves_on_truth_and_is_deterministic() {
        let t = truth();
        let data = synthetic(&t, &[5e2, 5e3, 5e4], 30, 3);
        let start = initial_guess(&data, t.cmb.e);
        let opts = FitOptions { restarts: 2, seed: 9, ..FitOptions::default() };
        let a = fit_mle(&data, &start, &opts).unwrap();
        let b = fit_mle(&data, &start, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.log_likelihood >= log_likelihood(&data, &t));
        assert!(a.log_likelihood >= a.initial_log_likelihood);
        assert!(a.fitted.admissible());
        let text = a.to_text();
        assert!(text.contains("final log-likelihood"));
        let mut buf = Vec::new();
        write_trace(&mut buf, &a.restarts).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
    }

    #[test]
    fn equal_lives_warn() {
        let t = truth();
        let data: Vec<SpecimenRecord> = [3e-3, 5e-3, 8e-3]
            .iter()
            .map(|&e| SpecimenRecord { n_cycles: 1000.0, strain_amplitude: e, gauge_area: 1.0 })
            .collect();
        let opts = FitOptions { restarts: 0, max_iterations: 300, ..FitOptions::default() };
        match fit_mle(&data, &t, &opts) {
            Ok(r) => assert!(r.warnings.iter().any(|w| w.contains("unbounded"))),
            Err(CalibrationError::EstimationFailed { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
}
