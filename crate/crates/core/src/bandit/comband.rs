use std::sync::Arc;

use rand::{Rng, RngCore};

use super::{check_loss, estimate_loss, BanditConfig, Learner};
use crate::error::{Error, Result};
use crate::graph::{LayeredGraph, Path};
use crate::linalg::DEFAULT_REL_TOL;
use crate::weight_push::CooccurrenceMatrix;

/// Exponential weights over explicitly enumerated paths.
///
/// Every stage touches every path, so this only runs on small instances; it
/// serves as the reference for [`super::EdgeCb`].
#[derive(Debug, Clone)]
pub struct ComBand {
    graph: Arc<LayeredGraph>,
    paths: Vec<Path>,
    log_w: Vec<f64>,
    mu: Vec<f64>,
    gamma: f64,
    eta: f64,
    pending: Option<usize>,
    tol: f64,
}

impl ComBand {
    /// Enumerates the paths of `graph` (refusing above `cap`) and starts from unit weights.
    pub fn new(graph: Arc<LayeredGraph>, cfg: &BanditConfig, cap: u64) -> Result<Self> {
        cfg.validate()?;
        let paths = graph.enumerate_paths(cap)?;
        let mu = cfg.exploration.path_probabilities(&graph, &paths)?;
        if mu.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParameter("invalid exploration probability".into()));
        }
        Ok(ComBand {
            log_w: vec![0.0; paths.len()],
            graph,
            paths,
            mu,
            gamma: cfg.gamma,
            eta: cfg.eta,
            pending: None,
            tol: DEFAULT_REL_TOL,
        })
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    /// Exploitation distribution `nu_t`, aligned with [`ComBand::paths`].
    pub fn exploitation(&self) -> Vec<f64> {
        let top = self.log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = self.log_w.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|r| r / total).collect()
    }

    /// Sampling distribution `d_t = (1 - gamma) nu_t + gamma mu`.
    pub fn distribution(&self) -> Vec<f64> {
        self.exploitation()
            .iter()
            .zip(&self.mu)
            .map(|(nu, mu)| (1.0 - self.gamma) * nu + self.gamma * mu)
            .collect()
    }

    /// `C_t = sum_P d_t(P) p p^T`.
    pub fn cooccurrence(&self) -> CooccurrenceMatrix {
        CooccurrenceMatrix::from_paths(self.graph.num_edges(), &self.paths, &self.distribution())
    }

    /// `L * C_t^+ p` for the current stage.
    pub fn estimate(&self, path: &Path, loss: f64) -> Result<Vec<f64>> {
        estimate_loss(&self.cooccurrence(), path, loss, self.tol)
    }

    /// `w(P) <- w(P) exp(-eta * estimate^T P)` for every path.
    pub fn apply_estimate(&mut self, estimate: &[f64]) -> Result<()> {
        if estimate.len() != self.graph.num_edges() {
            return Err(Error::LengthMismatch {
                expected: self.graph.num_edges(),
                got: estimate.len(),
            });
        }
        for (lw, p) in self.log_w.iter_mut().zip(&self.paths) {
            *lw -= self.eta * p.dot(estimate);
        }
        let top = self.log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for lw in self.log_w.iter_mut() {
            *lw -= top;
        }
        Ok(())
    }
}

impl Learner for ComBand {
    fn select(&mut self, rng: &mut dyn RngCore) -> Path {
        let d = self.distribution();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = d.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        for (i, p) in d.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = i;
                break;
            }
        }
        self.pending = Some(chosen);
        self.paths[chosen].clone()
    }

    fn observe(&mut self, loss: f64) -> Result<()> {
        check_loss(loss)?;
        let idx = self
            .pending
            .take()
            .ok_or_else(|| Error::InvalidParameter("observe called before select".into()))?;
        let est = estimate_loss(&self.cooccurrence(), &self.paths[idx], loss, self.tol)?;
        self.apply_estimate(&est)
    }
}
