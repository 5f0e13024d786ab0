use std::sync::Arc;
use std::time::{Duration, Instant};

use super::config::LearnerKind;
use super::rng::{stream, Stream};
use crate::bandit::{tune_parameters, BanditConfig, ComBand, EdgeCb, Learner};
use crate::env::{path_loss, Environment, TieRule};
use crate::error::{Error, Result};
use crate::explore::{null_basis, uniform_report, ExplorationSpec};
use crate::graph::LayeredGraph;

/// One row of the timing table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub m: usize,
    pub n: usize,
    pub edges: usize,
    pub paths: String,
    pub learner: LearnerKind,
    /// Stages actually run; less than the horizon after a timeout.
    pub stages: usize,
    pub seconds: f64,
    pub timed_out: bool,
    /// Set when the learner could not be built (e.g. too many paths to enumerate).
    pub skipped: Option<String>,
}

impl BenchRow {
    /// Mean wall-clock time per completed stage; NaN when nothing ran.
    pub fn per_stage(&self) -> f64 {
        if self.stages == 0 {
            f64::NAN
        } else {
            self.seconds / self.stages as f64
        }
    }

    /// Per-stage time scaled to the full horizon.
    pub fn projected_total(&self, horizon: usize) -> f64 {
        self.per_stage() * horizon as f64
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub horizon: usize,
    /// Per instance and learner.
    pub timeout: Duration,
    pub seed: u64,
    pub enumeration_cap: u64,
}

/// Writes the table as CSV.
pub fn bench_csv(rows: &[BenchRow], horizon: usize) -> String {
    let mut s = String::from("m,n,edges,paths,learner,stages,seconds,per_stage,projected_total,status\n");
    for r in rows {
        let status = match (&r.skipped, r.timed_out) {
            (Some(_), _) => "skipped",
            (None, true) => "timeout",
            (None, false) => "ok",
        };
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.m,
            r.n,
            r.edges,
            r.paths,
            r.learner.name(),
            r.stages,
            r.seconds,
            r.per_stage(),
            r.projected_total(horizon),
            status
        ));
    }
    s
}

/// Times each learner on each `(m, n)` against the extreme-strong adversary
/// with uniform exploration and default tuning.
pub fn benchmark_runtime(
    instances: &[(usize, usize)],
    learners: &[LearnerKind],
    opts: &BenchOptions,
) -> Result<Vec<BenchRow>> {
    if opts.horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    let mut rows = Vec::new();
    for &(m, n) in instances {
        let graph = Arc::new(LayeredGraph::new(m, n)?);
        let report = uniform_report(&graph)?;
        let tuning = tune_parameters(m, n, opts.horizon, report.lambda_star)?;
        let cfg = BanditConfig {
            gamma: tuning.gamma,
            eta: tuning.eta,
            horizon: opts.horizon,
            exploration: ExplorationSpec::Uniform,
        };
        let env = Environment::extreme_strong(n, 0.1, 0, TieRule::AdversaryWins)?;
        for &kind in learners {
            let mut row = BenchRow {
                m,
                n,
                edges: graph.num_edges(),
                paths: graph.path_count().to_string(),
                learner: kind,
                stages: 0,
                seconds: 0.0,
                timed_out: false,
                skipped: None,
            };
            let start = Instant::now();
            let built: Result<Box<dyn Learner>> = match kind {
                LearnerKind::ComBand => ComBand::new(Arc::clone(&graph), &cfg, opts.enumeration_cap)
                    .map(|l| Box::new(l) as Box<dyn Learner>),
                LearnerKind::EdgeCb => null_basis(&graph)
                    .and_then(|b| EdgeCb::new(Arc::clone(&graph), &cfg, Some(&b)))
                    .map(|l| Box::new(l) as Box<dyn Learner>),
            };
            let mut learner = match built {
                Ok(l) => l,
                Err(Error::EnumerationCap { count, .. }) => {
                    row.skipped = Some(format!("{count} paths exceed the enumeration cap"));
                    rows.push(row);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let mut adv_rng = stream(opts.seed, Stream::Adversary(0));
            let mut rng = stream(opts.seed, Stream::Learner(0));
            for t in 0..opts.horizon {
                let losses = env.stage_losses(&graph, t, &mut adv_rng);
                learner.step(&mut |p| path_loss(&losses, p), &mut rng)?;
                row.stages = t + 1;
                if start.elapsed() > opts.timeout {
                    row.timed_out = row.stages < opts.horizon;
                    break;
                }
            }
            row.seconds = start.elapsed().as_secs_f64();
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Least-squares fit of `log y = log a + b log x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub coefficient: f64,
    pub exponent: f64,
    /// Coefficient of determination in log-log space.
    pub r_squared: f64,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerFit> {
    let (a, b, r2) = linear_fit(
        &xs.iter().map(|x| x.ln()).collect::<Vec<_>>(),
        &ys.iter().map(|y| y.ln()).collect::<Vec<_>>(),
    )?;
    Ok(PowerFit {
        coefficient: a.exp(),
        exponent: b,
        r_squared: r2,
    })
}

/// Pearson correlation of `x` and `y`.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    let (_, _, r2) = linear_fit(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(r2.sqrt().copysign(cov))
}

/// Ordinary least squares `y = a + b x`, returning `(a, b, R^2)`.
fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 || x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "fit needs at least two finite points".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit needs distinct x values".into()));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((a, b, r2))
}
