//! Bandit learning in repeated Colonel Blotto games.
//!
//! A learner with `m` troops and `n` battlefields picks one allocation per
//! stage and only sees its total loss. Allocations are source-to-destination
//! paths in a layered graph, so bandit algorithms over path sets apply.
//!
//! - [`graph`]: the layered graph and allocation/path conversions.
//! - [`env`]: battlefield values, adversary models, and losses.
//! - [`weight_push`]: path distributions induced by edge weights.
//! - [`bandit`]: the path-weight reference learner and the edge-weight learner.
//! - [`explore`]: exploration distributions and their spectral quality.
//! - [`harness`]: experiments, regret traces, comparisons, and timing.

pub mod bandit;
pub mod env;
pub mod error;
pub mod explore;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod weight_push;

pub use error::{Error, Result};
