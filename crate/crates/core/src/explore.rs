//! Exploration distributions and their spectral quality.
//!
//! The regret guarantee of the mixed exponential-weights learner degrades with
//! the smallest nonzero eigenvalue `lambda*` of `M(mu) = E_mu[p p^T]`. For any
//! distribution whose support spans the path set, `M(mu)` has the same number
//! `K` of zero eigenvalues, so `lambda*` is simply the `(K + 1)`-th smallest.
//!
//! [`optimize_exploration`] searches edge-factored distributions `mu_w` for a
//! large `lambda*` with a derivative-free randomized search, starting from unit
//! weights (the uniform distribution). [`SdpData`] exports the full
//! path-space eigenvalue problem for external SDP solvers.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Allocation, LayeredGraph, Path};
use crate::linalg::{null_count, sym_eigen, sym_eigenvalues, DEFAULT_REL_TOL};
use crate::weight_push::{compute_h, cooccurrence, path_probability, CooccurrenceMatrix, EdgeWeights};

/// The fixed exploration distribution `mu` mixed into every stage.
#[derive(Debug, Clone, PartialEq)]
pub enum ExplorationSpec {
    /// Uniform over all paths (unit edge weights).
    Uniform,
    /// `mu_w` for positive edge weights `w`.
    Factored(EdgeWeights),
    /// Explicit probabilities, aligned with [`LayeredGraph::enumerate_paths`].
    Explicit(Vec<f64>),
}

impl ExplorationSpec {
    /// Edge weights realizing this distribution.
    pub fn edge_weights(&self, g: &LayeredGraph) -> Result<EdgeWeights> {
        match self {
            ExplorationSpec::Uniform => Ok(EdgeWeights::uniform(g.num_edges())),
            ExplorationSpec::Factored(w) => {
                if w.len() != g.num_edges() {
                    return Err(Error::LengthMismatch {
                        expected: g.num_edges(),
                        got: w.len(),
                    });
                }
                Ok(w.clone())
            }
            ExplorationSpec::Explicit(_) => Err(Error::NotFactored),
        }
    }

    /// Probability of each path in `paths`.
    pub fn path_probabilities(&self, g: &LayeredGraph, paths: &[Path]) -> Result<Vec<f64>> {
        match self {
            ExplorationSpec::Explicit(probs) => {
                if probs.len() != paths.len() {
                    return Err(Error::LengthMismatch {
                        expected: paths.len(),
                        got: probs.len(),
                    });
                }
                Ok(probs.clone())
            }
            _ => {
                let w = self.edge_weights(g)?;
                let h = compute_h(g, &w)?;
                Ok(paths.iter().map(|p| path_probability(g, &w, &h, p)).collect())
            }
        }
    }

    /// `M(mu)`. Explicit distributions need the enumerated `paths`.
    pub fn cooccurrence(&self, g: &LayeredGraph, paths: Option<&[Path]>) -> Result<CooccurrenceMatrix> {
        match self {
            ExplorationSpec::Explicit(probs) => {
                let paths = paths.ok_or(Error::NotFactored)?;
                if probs.len() != paths.len() {
                    return Err(Error::LengthMismatch {
                        expected: paths.len(),
                        got: probs.len(),
                    });
                }
                Ok(CooccurrenceMatrix::from_paths(g.num_edges(), paths, probs))
            }
            _ => cooccurrence(g, &self.edge_weights(g)?),
        }
    }

    /// Checks positivity/normalization and that the support spans the path set.
    pub fn validate(&self, g: &LayeredGraph, paths: Option<&[Path]>) -> Result<()> {
        if let ExplorationSpec::Explicit(probs) = self {
            if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(Error::InvalidParameter("negative exploration probability".into()));
            }
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "exploration probabilities sum to {total}"
                )));
            }
        }
        let k = zero_eigen_count(g)?;
        let values = sym_eigenvalues(self.cooccurrence(g, paths)?.as_mat())?;
        let zeros = null_count(&values, DEFAULT_REL_TOL);
        if zeros != k {
            return Err(Error::Spectral(format!(
                "exploration support does not span the path set ({zeros} zero eigenvalues, expected {k})"
            )));
        }
        Ok(())
    }
}

/// Spectrum summary of a co-occurrence matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// Number of zero eigenvalues.
    pub k: usize,
    /// Smallest nonzero eigenvalue.
    pub lambda_star: f64,
    /// All eigenvalues, ascending.
    pub spectrum: Vec<f64>,
}

/// `K`: the number of zero eigenvalues of `M(mu)` for any spanning `mu`,
/// read off the uniform distribution's matrix.
pub fn zero_eigen_count(g: &LayeredGraph) -> Result<usize> {
    let m = cooccurrence(g, &EdgeWeights::uniform(g.num_edges()))?;
    Ok(null_count(&sym_eigenvalues(m.as_mat())?, DEFAULT_REL_TOL))
}

/// `(K + 1)`-th smallest eigenvalue, after checking that the `K` smallest vanish.
pub fn lambda_star(m: &CooccurrenceMatrix, k: usize, rel_tol: f64) -> Result<f64> {
    Ok(spectral_report(m, k, rel_tol)?.lambda_star)
}

pub fn spectral_report(m: &CooccurrenceMatrix, k: usize, rel_tol: f64) -> Result<SpectralReport> {
    let spectrum = sym_eigenvalues(m.as_mat())?;
    report_from_spectrum(spectrum, k, rel_tol)
}

fn report_from_spectrum(spectrum: Vec<f64>, k: usize, rel_tol: f64) -> Result<SpectralReport> {
    if k >= spectrum.len() {
        return Err(Error::Spectral(format!(
            "K = {k} leaves no nonzero eigenvalue in dimension {}",
            spectrum.len()
        )));
    }
    let top = spectrum.last().copied().unwrap_or(0.0);
    let cut = rel_tol * top;
    if k > 0 && spectrum[k - 1] > cut {
        return Err(Error::Spectral(format!(
            "eigenvalue {} = {} exceeds the zero threshold {cut}",
            k,
            spectrum[k - 1]
        )));
    }
    if spectrum[k] <= cut {
        return Err(Error::Spectral(format!(
            "eigenvalue {} = {} is numerically zero; the distribution does not span",
            k + 1,
            spectrum[k]
        )));
    }
    Ok(SpectralReport {
        k,
        lambda_star: spectrum[k],
        spectrum,
    })
}

/// A black-box maximizer over `R^dim` with a fixed evaluation budget.
///
/// Implementations must evaluate `start` first and return the best point seen.
pub trait SearchStrategy {
    fn maximize(
        &mut self,
        start: &[f64],
        budget: usize,
        objective: &mut dyn FnMut(&[f64]) -> f64,
        rng: &mut dyn rand::RngCore,
    ) -> SearchOutcome;
}

/// Result of a [`SearchStrategy`] run.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    /// Best-so-far value after each evaluation.
    pub trace: Vec<f64>,
}

/// Population-based randomized local search with an adaptive step size.
///
/// Each candidate perturbs a few coordinates of a population member (or, with
/// probability `global_rate`, every coordinate of the incumbent). The step
/// size grows after improvements and shrinks after failures, so the search
/// region contracts around good solutions.
#[derive(Debug, Clone)]
pub struct RandomizedSearch {
    pub population: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub global_rate: f64,
    pub bound: f64,
}

impl Default for RandomizedSearch {
    fn default() -> Self {
        RandomizedSearch {
            population: 8,
            initial_step: 0.5,
            min_step: 1e-3,
            max_step: 2.0,
            global_rate: 0.15,
            bound: 12.0,
        }
    }
}

impl SearchStrategy for RandomizedSearch {
    fn maximize(
        &mut self,
        start: &[f64],
        budget: usize,
        objective: &mut dyn FnMut(&[f64]) -> f64,
        rng: &mut dyn rand::RngCore,
    ) -> SearchOutcome {
        let dim = start.len();
        let mut trace = Vec::with_capacity(budget);
        let first = objective(start);
        trace.push(first);
        let mut pop: Vec<(Vec<f64>, f64)> = vec![(start.to_vec(), first)];
        let mut best = 0;
        let mut step = self.initial_step;
        let mut evals = 1;

        while evals < budget {
            let global = pop.len() < self.population || rng.random::<f64>() < self.global_rate;
            let mut cand = if global {
                pop[best].0.clone()
            } else {
                // binary tournament
                let a = rng.random_range(0..pop.len());
                let b = rng.random_range(0..pop.len());
                pop[if pop[a].1 >= pop[b].1 { a } else { b }].0.clone()
            };
            if global {
                for c in cand.iter_mut() {
                    *c += step * standard_normal(rng);
                }
            } else {
                let touched = 1 + rng.random_range(0..dim.clamp(1, 4));
                for _ in 0..touched {
                    let i = rng.random_range(0..dim);
                    cand[i] += 2.0 * step * standard_normal(rng);
                }
            }
            for c in cand.iter_mut() {
                *c = c.clamp(-self.bound, self.bound);
            }
            let value = objective(&cand);
            evals += 1;

            let improved = value > pop[best].1;
            if pop.len() < self.population {
                pop.push((cand, value));
            } else {
                let worst = (0..pop.len())
                    .min_by(|&i, &j| pop[i].1.total_cmp(&pop[j].1))
                    .expect("population is nonempty");
                if value > pop[worst].1 {
                    pop[worst] = (cand, value);
                }
            }
            best = (0..pop.len())
                .max_by(|&i, &j| pop[i].1.total_cmp(&pop[j].1).then(j.cmp(&i)))
                .expect("population is nonempty");
            step = if improved {
                (step * 1.5).min(self.max_step)
            } else {
                (step * 0.97).max(self.min_step)
            };
            trace.push(pop[best].1.max(*trace.last().expect("trace starts nonempty")));
        }

        let (best_point, best_value) = pop.swap_remove(best);
        SearchOutcome {
            best_point,
            best_value,
            trace,
        }
    }
}

/// Optimized exploration weights and their spectrum.
#[derive(Debug, Clone)]
pub struct OptimizedExploration {
    pub weights: EdgeWeights,
    pub report: SpectralReport,
    /// Best-so-far `lambda*` after each objective evaluation.
    pub trace: Vec<f64>,
}

/// Default evaluation budget, `100 E`.
pub fn default_budget(g: &LayeredGraph) -> usize {
    100 * g.num_edges()
}

/// Maximizes `lambda*(M(mu_w))` over edge weights with [`RandomizedSearch`].
pub fn optimize_exploration<R: Rng>(
    g: &LayeredGraph,
    budget: usize,
    rng: &mut R,
) -> Result<OptimizedExploration> {
    optimize_exploration_with(g, budget, &mut RandomizedSearch::default(), rng)
}

/// Maximizes `lambda*(M(mu_w))` over log-weights with a pluggable strategy.
///
/// The search starts at unit weights, so the result is never worse than the
/// uniform distribution.
pub fn optimize_exploration_with<R: Rng>(
    g: &LayeredGraph,
    budget: usize,
    strategy: &mut dyn SearchStrategy,
    rng: &mut R,
) -> Result<OptimizedExploration> {
    if budget < 1 {
        return Err(Error::InvalidParameter("evaluation budget must be at least 1".into()));
    }
    let k = zero_eigen_count(g)?;
    let mut objective = |x: &[f64]| -> f64 {
        let w = match log_weights_to_edge_weights(g, x) {
            Ok(w) => w,
            Err(_) => return f64::NEG_INFINITY,
        };
        cooccurrence(g, &w)
            .and_then(|m| sym_eigenvalues(m.as_mat()))
            .map(|s| s[k])
            .unwrap_or(f64::NEG_INFINITY)
    };
    let start = vec![0.0; g.num_edges()];
    let outcome = strategy.maximize(&start, budget, &mut objective, rng);
    let weights = log_weights_to_edge_weights(g, &outcome.best_point)?;
    let report = spectral_report(&cooccurrence(g, &weights)?, k, DEFAULT_REL_TOL)?;
    Ok(OptimizedExploration {
        weights,
        report,
        trace: outcome.trace,
    })
}

/// Exponentiates log-weights after centering each battlefield's edges, so the
/// geometric mean of the weights is one.
fn log_weights_to_edge_weights(g: &LayeredGraph, x: &[f64]) -> Result<EdgeWeights> {
    let mut centered = x.to_vec();
    for layer in 0..g.n() {
        let range = g.layer_edges(layer);
        let mean = x[range.clone()].iter().sum::<f64>() / range.len() as f64;
        for e in range {
            centered[e] -= mean;
        }
    }
    EdgeWeights::new(centered.into_iter().map(f64::exp).collect())
}

/// Writes one weight per line in edge-index order.
pub fn write_edge_weights<W: Write>(w: &EdgeWeights, mut out: W) -> Result<()> {
    for v in w.as_slice() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

/// Reads the one-weight-per-line format; blank lines and `#` comments are skipped.
pub fn read_edge_weights<R: BufRead>(input: R) -> Result<EdgeWeights> {
    let mut values = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| {
            Error::InvalidWeights(format!("line {}: cannot parse {t:?}", lineno + 1))
        })?;
        values.push(v);
    }
    EdgeWeights::new(values)
}

/// Problem data for the path-space eigenvalue design SDP:
///
/// ```text
/// minimize   (K + 1) s + tr(Z)
/// subject to Z >= 0
///            Z + sum_i x_i A_i + s I >= 0,   A_i = p_i p_i^T
///            0 <= x_i <= 1,  sum_i x_i = 1
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct SdpData {
    pub m: usize,
    pub n: usize,
    pub dimension: usize,
    pub k: usize,
    /// `(allocation, edge indices)` per path; `A_i` has a one at every pair of these edges.
    pub blocks: Vec<(Allocation, Vec<usize>)>,
    /// `(battlefield, from_troops, to_troops)` per edge.
    pub edges: Vec<(usize, usize, usize)>,
}

impl SdpData {
    pub fn build(g: &LayeredGraph, cap: u64) -> Result<Self> {
        let paths = g.enumerate_paths(cap)?;
        let k = zero_eigen_count(g)?;
        let blocks = paths
            .iter()
            .map(|p| (g.path_to_allocation(p), p.edges().to_vec()))
            .collect();
        let edges = g
            .edges()
            .iter()
            .map(|e| (e.battlefield, g.nodes()[e.from].troops, g.nodes()[e.to].troops))
            .collect();
        Ok(SdpData {
            m: g.m(),
            n: g.n(),
            dimension: g.num_edges(),
            k,
            blocks,
            edges,
        })
    }

    /// Dense `A_i`.
    pub fn coefficient_matrix(&self, i: usize) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.dimension]; self.dimension];
        for &r in &self.blocks[i].1 {
            for &c in &self.blocks[i].1 {
                a[r][c] = 1.0;
            }
        }
        a
    }

    /// Text export. Indices are 1-based; each block lists the upper triangle of
    /// `A_i` as `row col value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# exploration-design SDP on the layered graph G(m, n)");
        let _ = writeln!(s, "# minimize (K+1)*s + trace(Z)");
        let _ = writeln!(s, "# subject to Z psd; Z + sum_i x_i*A_i + s*I psd; 0 <= x_i <= 1; sum_i x_i = 1");
        let _ = writeln!(s, "format blotto-sdp 1");
        let _ = writeln!(s, "m {}", self.m);
        let _ = writeln!(s, "n {}", self.n);
        let _ = writeln!(s, "dimension {}", self.dimension);
        let _ = writeln!(s, "paths {}", self.blocks.len());
        let _ = writeln!(s, "zero_eigenvalues {}", self.k);
        let _ = writeln!(s, "objective {} s + trace Z", self.k + 1);
        let _ = writeln!(s, "edges {}", self.edges.len());
        for (i, (bf, a, b)) in self.edges.iter().enumerate() {
            let _ = writeln!(s, "{} {} {} {}", i + 1, bf + 1, a, b);
        }
        for (i, (alloc, edges)) in self.blocks.iter().enumerate() {
            let nnz = edges.len() * (edges.len() + 1) / 2;
            let troops: Vec<String> = alloc.0.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(s, "block {} nnz {} allocation {}", i + 1, nnz, troops.join(" "));
            let mut sorted = edges.clone();
            sorted.sort_unstable();
            for (a, &r) in sorted.iter().enumerate() {
                for &c in &sorted[a..] {
                    let _ = writeln!(s, "{} {} 1", r + 1, c + 1);
                }
            }
        }
        let _ = writeln!(s, "end");
        s
    }

    /// Parses [`SdpData::to_text`] output.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Config(format!("sdp file: {msg}"));
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = |lines: &mut dyn Iterator<Item = &str>, key: &str| -> Result<usize> {
            let line = lines.next().ok_or_else(|| bad("truncated header"))?;
            let mut it = line.split_whitespace();
            if it.next() != Some(key) {
                return Err(bad(&format!("expected {key:?}, got {line:?}")));
            }
            it.next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad(&format!("bad value in {line:?}")))
        };
        match lines.next() {
            Some("format blotto-sdp 1") => {}
            other => return Err(bad(&format!("unsupported format line {other:?}"))),
        }
        let m = header(&mut lines, "m")?;
        let n = header(&mut lines, "n")?;
        let dimension = header(&mut lines, "dimension")?;
        let num_paths = header(&mut lines, "paths")?;
        let k = header(&mut lines, "zero_eigenvalues")?;
        let _ = header(&mut lines, "objective")?;
        let num_edges = header(&mut lines, "edges")?;
        let nums = |line: &str| -> Result<Vec<usize>> {
            line.split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(&format!("bad token {t:?}"))))
                .collect()
        };
        let mut edges = Vec::with_capacity(num_edges);
        for _ in 0..num_edges {
            let v = nums(lines.next().ok_or_else(|| bad("truncated edge list"))?)?;
            if v.len() != 4 || v[1] == 0 {
                return Err(bad("edge lines have four fields"));
            }
            edges.push((v[1] - 1, v[2], v[3]));
        }
        let mut blocks = Vec::with_capacity(num_paths);
        for _ in 0..num_paths {
            let head = lines.next().ok_or_else(|| bad("truncated blocks"))?;
            let fields: Vec<&str> = head.split_whitespace().collect();
            if fields.len() < 5 || fields[0] != "block" || fields[2] != "nnz" || fields[4] != "allocation" {
                return Err(bad(&format!("bad block header {head:?}")));
            }
            let nnz: usize = fields[3].parse().map_err(|_| bad("bad nnz"))?;
            let alloc = fields[5..]
                .iter()
                .map(|t| t.parse().map_err(|_| bad("bad allocation")))
                .collect::<Result<Vec<usize>>>()?;
            let mut on_path = Vec::new();
            for _ in 0..nnz {
                let v = nums(lines.next().ok_or_else(|| bad("truncated block"))?)?;
                if v.len() != 3 || v[0] == 0 {
                    return Err(bad("entry lines have three fields"));
                }
                if v[0] == v[1] {
                    on_path.push(v[0] - 1);
                }
            }
            blocks.push((Allocation(alloc), on_path));
        }
        Ok(SdpData {
            m,
            n,
            dimension,
            k,
            blocks,
            edges,
        })
    }
}

// Box-Muller; works through `dyn RngCore`.
fn standard_normal(rng: &mut dyn rand::RngCore) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `lambda*` of the uniform distribution on `g`.
pub fn uniform_report(g: &LayeredGraph) -> Result<SpectralReport> {
    let k = zero_eigen_count(g)?;
    spectral_report(&cooccurrence(g, &EdgeWeights::uniform(g.num_edges()))?, k, DEFAULT_REL_TOL)
}

/// Orthonormal basis (columns) of the common null space of every spanning `M(mu)`.
pub fn null_basis(g: &LayeredGraph) -> Result<faer::Mat<f64>> {
    let m = cooccurrence(g, &EdgeWeights::uniform(g.num_edges()))?;
    let eig = sym_eigen(m.as_mat())?;
    let k = null_count(&eig.values, DEFAULT_REL_TOL);
    Ok(faer::Mat::from_fn(g.num_edges(), k, |i, j| eig.vectors[(i, j)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DEFAULT_ENUMERATION_CAP;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn k_for_small_graphs() {
        assert_eq!(zero_eigen_count(&LayeredGraph::new(1, 2).unwrap()).unwrap(), 2);
        // K = N - 2: one flow-conservation constraint per interior node
        for (m, n) in [(3, 3), (2, 4), (4, 3)] {
            let g = LayeredGraph::new(m, n).unwrap();
            assert_eq!(zero_eigen_count(&g).unwrap(), g.num_nodes() - 2);
        }
    }

    #[test]
    fn disjoint_paths_lambda_star() {
        // G(1, 2) has two edge-disjoint 2-edge paths; M = (p1 p1^T + p2 p2^T) / 2
        let g = LayeredGraph::new(1, 2).unwrap();
        let r = uniform_report(&g).unwrap();
        assert_eq!(r.k, 2);
        assert!((r.lambda_star - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_star_rejects_wrong_k() {
        let g = LayeredGraph::new(3, 3).unwrap();
        let m = cooccurrence(&g, &EdgeWeights::uniform(g.num_edges())).unwrap();
        assert!(lambda_star(&m, 9, DEFAULT_REL_TOL).is_err());
        assert!(lambda_star(&m, 7, DEFAULT_REL_TOL).is_err());
        assert!(lambda_star(&m, 8, DEFAULT_REL_TOL).is_ok());
    }

    #[test]
    fn budget_one_returns_uniform() {
        let g = LayeredGraph::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = optimize_exploration(&g, 1, &mut rng).unwrap();
        assert_eq!(out.weights, EdgeWeights::uniform(g.num_edges()));
        assert_eq!(out.report, uniform_report(&g).unwrap());
        assert_eq!(out.trace.len(), 1);
        assert!(optimize_exploration(&g, 0, &mut rng).is_err());
    }

    #[test]
    fn optimized_trace_is_monotone_and_beats_uniform() {
        let g = LayeredGraph::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let out = optimize_exploration(&g, default_budget(&g), &mut rng).unwrap();
        assert_eq!(out.trace.len(), default_budget(&g));
        assert!(out.trace.windows(2).all(|w| w[1] >= w[0]));
        let uni = uniform_report(&g).unwrap().lambda_star;
        assert!(out.report.lambda_star >= uni);
        assert!((out.report.lambda_star - out.trace.last().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn explicit_spec_is_not_factored() {
        let g = LayeredGraph::new(2, 2).unwrap();
        let spec = ExplorationSpec::Explicit(vec![1.0 / 3.0; 3]);
        assert!(matches!(spec.edge_weights(&g), Err(Error::NotFactored)));
        let paths = g.enumerate_paths(DEFAULT_ENUMERATION_CAP).unwrap();
        spec.validate(&g, Some(&paths)).unwrap();
        let degenerate = ExplorationSpec::Explicit(vec![1.0, 0.0, 0.0]);
        assert!(degenerate.validate(&g, Some(&paths)).is_err());
    }

    #[test]
    fn sdp_text_round_trip() {
        let g = LayeredGraph::new(1, 2).unwrap();
        let sdp = SdpData::build(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(sdp.blocks.len(), 2);
        assert_eq!(sdp.k, 2);
        let text = sdp.to_text();
        assert!(text.contains("objective 3 s + trace Z"));
        assert_eq!(SdpData::parse(&text).unwrap(), sdp);
    }

    #[test]
    fn edge_weight_file_round_trip() {
        let w = EdgeWeights::new(vec![1.0, 0.25, 3.0e-7, 12345.678]).unwrap();
        let mut buf = Vec::new();
        write_edge_weights(&w, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(!text.contains('e'));
        assert_eq!(read_edge_weights(&buf[..]).unwrap(), w);
        assert!(read_edge_weights(&b"1.0\nabc\n"[..]).is_err());
        assert!(read_edge_weights(&b"1.0\n-2\n"[..]).is_err());
    }
}
