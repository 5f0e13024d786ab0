use std::sync::Arc;

use faer::Mat;
use rand::{Rng, RngCore};

use super::{check_loss, BanditConfig, Learner};
use crate::error::{Error, Result};
use crate::graph::{LayeredGraph, Path};
use crate::linalg::{pinv_apply, SpanSolver, DEFAULT_REL_TOL};
use crate::weight_push::{
    compute_h, fill_cooccurrence, path_probability, wp_sample, CooccurrenceMatrix, EdgeWeights,
    HTable,
};

/// Stages between per-battlefield recentering of the log-weights.
const RENORMALIZE_EVERY: usize = 100;

/// Exponential weights kept on edges; a path's weight is the product of its edge weights.
///
/// Sampling uses weight pushing and `C_t = (1 - gamma) M(nu_t) + gamma M(mu)`
/// is assembled from `H` tables, so no step enumerates paths. The
/// exploration distribution must be edge-factored.
#[derive(Debug, Clone)]
pub struct EdgeCb {
    graph: Arc<LayeredGraph>,
    gamma: f64,
    eta: f64,
    log_w: Vec<f64>,
    explore_w: EdgeWeights,
    explore_h: HTable,
    explore_m: Mat<f64>,
    solver: SpanSolver,
    current: Option<(EdgeWeights, HTable)>,
    c_buf: Mat<f64>,
    pending: Option<Path>,
    stages: usize,
}

impl EdgeCb {
    /// Starts from unit edge weights.
    ///
    /// `null_basis` spans the common null space of the co-occurrence matrices
    /// (see [`crate::explore::null_basis`]); pass `None` to compute it here.
    pub fn new(
        graph: Arc<LayeredGraph>,
        cfg: &BanditConfig,
        null_basis: Option<&Mat<f64>>,
    ) -> Result<Self> {
        cfg.validate()?;
        let explore_w = cfg.exploration.edge_weights(&graph)?;
        let explore_h = compute_h(&graph, &explore_w)?;
        let mut explore_m = Mat::zeros(graph.num_edges(), graph.num_edges());
        fill_cooccurrence(&graph, &explore_w, &explore_h, &mut explore_m);
        let solver = match null_basis {
            Some(b) => {
                if b.nrows() != graph.num_edges() {
                    return Err(Error::LengthMismatch {
                        expected: graph.num_edges(),
                        got: b.nrows(),
                    });
                }
                SpanSolver::new(b)
            }
            None => SpanSolver::new(&crate::explore::null_basis(&graph)?),
        };
        let ne = graph.num_edges();
        Ok(EdgeCb {
            gamma: cfg.gamma,
            eta: cfg.eta,
            log_w: vec![0.0; ne],
            explore_w,
            explore_h,
            explore_m,
            solver,
            current: None,
            c_buf: Mat::zeros(ne, ne),
            pending: None,
            stages: 0,
            graph,
        })
    }

    pub fn graph(&self) -> &LayeredGraph {
        &self.graph
    }

    /// Current log edge weights (defined up to a per-battlefield shift).
    pub fn log_weights(&self) -> &[f64] {
        &self.log_w
    }

    fn refresh(&mut self) -> Result<()> {
        if self.current.is_none() {
            let w = EdgeWeights::from_log(&self.graph, &self.log_w)?;
            let h = compute_h(&self.graph, &w)?;
            self.current = Some((w, h));
        }
        Ok(())
    }

    fn current(&mut self) -> Result<&(EdgeWeights, HTable)> {
        self.refresh()?;
        Ok(self.current.as_ref().expect("refreshed above"))
    }

    /// `nu_t(P)`.
    pub fn exploitation_probability(&mut self, path: &Path) -> Result<f64> {
        let g = Arc::clone(&self.graph);
        let (w, h) = self.current()?;
        Ok(path_probability(&g, w, h, path))
    }

    /// `d_t(P) = (1 - gamma) nu_t(P) + gamma mu(P)`.
    pub fn probability(&mut self, path: &Path) -> Result<f64> {
        let nu = self.exploitation_probability(path)?;
        let mu = path_probability(&self.graph, &self.explore_w, &self.explore_h, path);
        Ok((1.0 - self.gamma) * nu + self.gamma * mu)
    }

    /// Fills `c_buf` with `C_t`.
    fn assemble(&mut self) -> Result<()> {
        self.refresh()?;
        let (w, h) = self.current.as_ref().expect("refreshed above");
        let ne = self.graph.num_edges();
        if self.gamma < 1.0 {
            fill_cooccurrence(&self.graph, w, h, &mut self.c_buf);
        }
        let (a, b) = (1.0 - self.gamma, self.gamma);
        for j in 0..ne {
            for i in 0..ne {
                let nu = if a > 0.0 { a * self.c_buf[(i, j)] } else { 0.0 };
                let mu = if b > 0.0 { b * self.explore_m[(i, j)] } else { 0.0 };
                self.c_buf[(i, j)] = nu + mu;
            }
        }
        Ok(())
    }

    /// `C_t` as a standalone matrix.
    pub fn cooccurrence(&mut self) -> Result<CooccurrenceMatrix> {
        self.assemble()?;
        Ok(CooccurrenceMatrix::from_mat(self.c_buf.clone()))
    }

    /// `L * C_t^+ p`, by a Cholesky solve on the span of the paths.
    pub fn estimate(&mut self, path: &Path, loss: f64) -> Result<Vec<f64>> {
        self.assemble()?;
        let p = path.indicator(self.graph.num_edges());
        let x = match self.solver.solve(&self.c_buf, &p) {
            Some(x) => x,
            // ill-conditioned on the span: fall back to the eigen route
            None => pinv_apply(&self.c_buf, &p, DEFAULT_REL_TOL)?,
        };
        Ok(x.into_iter().map(|v| v * loss).collect())
    }

    /// `w_e <- w_e exp(-eta * estimate_e)`.
    pub fn apply_estimate(&mut self, estimate: &[f64]) -> Result<()> {
        if estimate.len() != self.log_w.len() {
            return Err(Error::LengthMismatch {
                expected: self.log_w.len(),
                got: estimate.len(),
            });
        }
        if let Some(bad) = estimate.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite loss estimate {bad}")));
        }
        for (lw, l) in self.log_w.iter_mut().zip(estimate) {
            *lw -= self.eta * l;
        }
        self.stages += 1;
        if self.stages % RENORMALIZE_EVERY == 0 {
            self.recenter();
        }
        self.current = None;
        Ok(())
    }

    /// Divides each battlefield's edge weights by their geometric mean.
    fn recenter(&mut self) {
        for layer in 0..self.graph.n() {
            let range = self.graph.layer_edges(layer);
            let mean = self.log_w[range.clone()].iter().sum::<f64>() / range.len() as f64;
            for e in range {
                self.log_w[e] -= mean;
            }
        }
    }
}

impl Learner for EdgeCb {
    fn select(&mut self, rng: &mut dyn RngCore) -> Path {
        let explore = rng.random::<f64>() < self.gamma;
        let path = if explore {
            wp_sample(&self.graph, &self.explore_w, &self.explore_h, rng)
        } else {
            let g = Arc::clone(&self.graph);
            // from_log on finite log-weights always succeeds
            let (w, h) = self.current().expect("finite log-weights");
            wp_sample(&g, w, h, rng)
        };
        self.pending = Some(path.clone());
        path
    }

    fn observe(&mut self, loss: f64) -> Result<()> {
        check_loss(loss)?;
        let path = self
            .pending
            .take()
            .ok_or_else(|| Error::InvalidParameter("observe called before select".into()))?;
        let est = self.estimate(&path, loss)?;
        self.apply_estimate(&est)
    }
}
