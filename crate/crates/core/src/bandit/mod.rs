//! Bandit learners over the paths of the layered graph.
//!
//! Both learners mix an exponential-weights exploitation distribution `nu_t`
//! with a fixed exploration distribution `mu`: `d_t = (1 - gamma) nu_t + gamma mu`.
//! After playing a path `p` and observing only the scalar loss `L`, they form
//! the estimate `L * C_t^+ p` with `C_t = E_{d_t}[p p^T]` and apply the
//! multiplicative update.
//!
//! [`ComBand`] keeps one weight per path and is the reference implementation.
//! [`EdgeCb`] keeps one weight per edge and uses weight pushing, so its cost
//! is polynomial in `m` and `n`. For the same estimate history the two induce
//! identical path distributions.

mod comband;
mod edgecb;
mod estimate;
mod tuning;

pub use comband::ComBand;
pub use edgecb::EdgeCb;
pub use estimate::estimate_loss;
pub use tuning::{ln_binomial, tune_parameters, Tuning};

use rand::RngCore;

use crate::error::{Error, Result};
use crate::explore::ExplorationSpec;
use crate::graph::Path;

/// Mixing weight, learning rate, horizon, and exploration distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditConfig {
    pub gamma: f64,
    pub eta: f64,
    pub horizon: usize,
    pub exploration: ExplorationSpec,
}

impl BanditConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eta must be positive and finite, got {}",
                self.eta
            )));
        }
        Ok(())
    }
}

/// What a learner did in one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub path: Path,
    pub loss: f64,
}

/// A bandit learner. It sees its own chosen path and the scalar loss, nothing else.
pub trait Learner {
    /// Samples this stage's path from `d_t`.
    fn select(&mut self, rng: &mut dyn RngCore) -> Path;

    /// Feeds back the scalar loss of the path returned by the last [`Learner::select`].
    fn observe(&mut self, loss: f64) -> Result<()>;

    /// One full stage: select, query `feedback` for the loss, update.
    fn step(
        &mut self,
        feedback: &mut dyn FnMut(&Path) -> f64,
        rng: &mut dyn RngCore,
    ) -> Result<StepOutcome> {
        let path = self.select(rng);
        let loss = feedback(&path);
        self.observe(loss)?;
        Ok(StepOutcome { path, loss })
    }
}

fn check_loss(loss: f64) -> Result<()> {
    if !loss.is_finite() {
        return Err(Error::InvalidParameter(format!("observed loss {loss} is not finite")));
    }
    Ok(())
}
