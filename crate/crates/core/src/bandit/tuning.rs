use crate::error::{Error, Result};
use crate::graph::LayeredGraph;

/// Default mixing weight and learning rate for a horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuning {
    pub gamma: f64,
    pub eta: f64,
    /// Whether the horizon is long enough for `gamma <= 1` without clipping.
    pub feasible: bool,
    /// Smallest horizon for which `feasible` holds.
    pub min_horizon: f64,
}

/// `ln C(a, b)` without forming the integer.
pub fn ln_binomial(a: usize, b: usize) -> f64 {
    let b = b.min(a - b);
    (0..b).map(|i| ((a - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// Heuristic default parameters, with `P` paths and `E` edges:
///
/// ```text
/// eta   = sqrt( ln P / (T E (2n / (E lambda*) + 1)) )
/// gamma = min(1, eta n / lambda*)
/// feasible iff T >= n ln P / (lambda*^2 (E / n + 2 / lambda*))
/// ```
pub fn tune_parameters(m: usize, n: usize, horizon: usize, lambda_star: f64) -> Result<Tuning> {
    if !(lambda_star > 0.0 && lambda_star.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda* must be positive, got {lambda_star}"
        )));
    }
    if m < 1 || n < 2 {
        return Err(Error::InvalidDimensions { m, n });
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    let e = LayeredGraph::edge_count_formula(m, n) as f64;
    let nf = n as f64;
    let t = horizon as f64;
    let ln_p = ln_binomial(n + m - 1, n - 1);
    let eta = (ln_p / (t * e * (2.0 * nf / (e * lambda_star) + 1.0))).sqrt();
    let gamma = (eta * nf / lambda_star).min(1.0);
    let min_horizon = nf * ln_p / (lambda_star * lambda_star * (e / nf + 2.0 / lambda_star));
    Ok(Tuning {
        gamma,
        eta,
        feasible: t >= min_horizon,
        min_horizon,
    })
}
