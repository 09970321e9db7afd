//! Weibull failure distribution of a component and Poisson crack counts.

use super::ReliabilityError;

/// `eta = total^(-1/m)`; a zero total means nothing on the surface can fail
/// and gives an infinite scale.
pub fn weibull_scale(total: f64, m: f64) -> Result<f64, ReliabilityError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(ReliabilityError::InvalidShape(m));
    }
    if !(total >= 0.0 && total.is_finite()) {
        return Err(ReliabilityError::InvalidHazard(total));
    }
    if total == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(total.powf(-1.0 / m))
}

/// Cumulative hazard `(n / eta)^m`.
pub fn cumulative_hazard(n: f64, eta: f64, m: f64) -> f64 {
    if eta.is_infinite() {
        return 0.0;
    }
    (n / eta).powf(m)
}

/// `F(n) = 1 - exp(-(n / eta)^m)`.
pub fn pof(n: f64, eta: f64, m: f64) -> f64 {
    -(-cumulative_hazard(n, eta, m)).exp_m1()
}

/// `1 - F(n) = exp(-(n / eta)^m)`, without cancellation in the tail.
pub fn survival(n: f64, eta: f64, m: f64) -> f64 {
    (-cumulative_hazard(n, eta, m)).exp()
}

/// `f(n) = (m / eta) (n / eta)^(m - 1) exp(-(n / eta)^m)`.
pub fn density_fn(n: f64, eta: f64, m: f64) -> f64 {
    if eta.is_infinite() {
        return 0.0;
    }
    let t = n / eta;
    m / eta * t.powf(m - 1.0) * (-t.powf(m)).exp()
}

/// Weibull hazard rate `(m / eta) (n / eta)^(m - 1)`.
pub fn hazard_rate(n: f64, eta: f64, m: f64) -> f64 {
    if eta.is_infinite() {
        return 0.0;
    }
    m / eta * (n / eta).powf(m - 1.0)
}

/// Probability of exactly `q` crack initiations in a region with expected
/// count `z`: `exp(-z) z^q / q!`.
pub fn crack_count_probability(q: u32, z: f64) -> f64 {
    if z == 0.0 {
        return if q == 0 { 1.0 } else { 0.0 };
    }
    let ln_factorial: f64 = (2..=q).map(|k| f64::from(k).ln()).sum();
    (-z + f64::from(q) * z.ln() - ln_factorial).exp()
}

/// PoF of `count` independent, identically loaded segments: `1 - (1 - p)^count`.
pub fn aggregate_segments(single: f64, count: u32) -> f64 {
    if single >= 1.0 {
        return 1.0;
    }
    -(f64::from(count) * (-single).ln_1p()).exp_m1()
}

/// Weibull shape reproducing PoF `p` at `n_star` multiples of the scale:
/// `m = ln(-ln(1 - p)) / ln(n_star)`.
pub fn shape_from_pof(p: f64, n_star: f64) -> f64 {
    (-(-p).ln_1p()).ln() / n_star.ln()
}
