//! Battlefields, adversaries, and the Colonel Blotto loss rules.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Allocation, LayeredGraph, Path};

/// Battlefield values, normalized to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Battlefields(Vec<f64>);

impl Battlefields {
    /// Accepts values that are positive and already sum to one.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::check_positive(&values)?;
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "battlefield values sum to {total}, expected 1"
            )));
        }
        Ok(Battlefields(values))
    }

    /// Scales positive raw values so that they sum to one.
    pub fn normalized(raw: Vec<f64>) -> Result<Self> {
        Self::check_positive(&raw)?;
        let total: f64 = raw.iter().sum();
        Ok(Battlefields(raw.into_iter().map(|v| v / total).collect()))
    }

    /// `n` values drawn uniformly from `(0, high]`, then normalized.
    pub fn random<R: Rng + ?Sized>(n: usize, high: f64, rng: &mut R) -> Result<Self> {
        let raw = (0..n)
            .map(|_| high * (1.0 - rng.random::<f64>()))
            .collect();
        Self::normalized(raw)
    }

    /// Equal values `1/n`.
    pub fn uniform(n: usize) -> Self {
        Battlefields(vec![1.0 / n as f64; n])
    }

    /// The extreme-strong layout: `1 - epsilon` on `hidden`, `epsilon / (n - 1)` elsewhere.
    pub fn extreme_strong(n: usize, epsilon: f64, hidden: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) || hidden >= n || n < 2 {
            return Err(Error::InvalidParameter(format!(
                "extreme-strong layout needs 0 < epsilon < 1 and hidden < n (epsilon = {epsilon}, hidden = {hidden}, n = {n})"
            )));
        }
        let low = epsilon / (n - 1) as f64;
        Ok(Battlefields(
            (0..n)
                .map(|i| if i == hidden { 1.0 - epsilon } else { low })
                .collect(),
        ))
    }

    fn check_positive(values: &[f64]) -> Result<()> {
        if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter(
                "battlefield values must be finite and positive".into(),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// How a battlefield's value is settled when the learner ties the top adversary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    /// Every player at the maximum receives an equal share.
    #[default]
    SharedEqually,
    /// Ties go to the adversary.
    AdversaryWins,
}

/// One adversary's strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum AdversaryModel {
    /// Blocks every battlefield except `hidden` with `m + 1` troops and puts
    /// `m - 1` on `hidden`, for a budget of `(n - 1)(m + 1) + (m - 1)`.
    ExtremeStrong { epsilon: f64, hidden: usize },
    /// Places `budget` troops one at a time on uniformly drawn battlefields.
    Uniform { budget: usize },
    /// Places `budget` troops one at a time, battlefield `i` drawn with probability `b_i`.
    BattlefieldWise { budget: usize },
    /// Replays a fixed list of allocations, cycling when the stage index runs past the end.
    FixedSequence { allocations: Vec<Allocation> },
}

impl AdversaryModel {
    /// Troop budget of the extreme-strong adversary.
    pub fn extreme_strong_budget(m: usize, n: usize) -> usize {
        (n - 1) * (m + 1) + (m - 1)
    }

    /// Total troops this adversary spends each stage.
    pub fn budget(&self, m: usize, n: usize) -> usize {
        match self {
            AdversaryModel::ExtremeStrong { .. } => Self::extreme_strong_budget(m, n),
            AdversaryModel::Uniform { budget } | AdversaryModel::BattlefieldWise { budget } => {
                *budget
            }
            AdversaryModel::FixedSequence { allocations } => {
                allocations.first().map(Allocation::total).unwrap_or(0)
            }
        }
    }

    /// Checks the model against a game with learner budget `m` over `n` battlefields.
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        match self {
            AdversaryModel::ExtremeStrong { epsilon, hidden } => {
                if !(*epsilon > 0.0 && *epsilon < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "extreme-strong epsilon must lie in (0, 1), got {epsilon}"
                    )));
                }
                if *hidden >= n {
                    return Err(Error::InvalidParameter(format!(
                        "hidden battlefield {hidden} out of range for n = {n}"
                    )));
                }
                if m < 1 {
                    return Err(Error::InvalidParameter("extreme-strong needs m >= 1".into()));
                }
            }
            AdversaryModel::Uniform { .. } | AdversaryModel::BattlefieldWise { .. } => {}
            AdversaryModel::FixedSequence { allocations } => {
                if allocations.is_empty() {
                    return Err(Error::InvalidParameter("empty fixed sequence".into()));
                }
                if let Some(a) = allocations.iter().find(|a| a.len() != n) {
                    return Err(Error::InvalidAllocation(format!(
                        "fixed-sequence allocation {:?} has the wrong length",
                        a.0
                    )));
                }
            }
        }
        Ok(())
    }

    /// This adversary's allocation at `stage`.
    pub fn allocate<R: Rng + ?Sized>(
        &self,
        m: usize,
        battlefields: &Battlefields,
        stage: usize,
        rng: &mut R,
    ) -> Allocation {
        let n = battlefields.len();
        match self {
            AdversaryModel::ExtremeStrong { hidden, .. } => Allocation(
                (0..n)
                    .map(|i| if i == *hidden { m - 1 } else { m + 1 })
                    .collect(),
            ),
            AdversaryModel::Uniform { budget } => {
                let mut troops = vec![0; n];
                for _ in 0..*budget {
                    troops[rng.random_range(0..n)] += 1;
                }
                Allocation(troops)
            }
            AdversaryModel::BattlefieldWise { budget } => {
                let mut troops = vec![0; n];
                for _ in 0..*budget {
                    troops[draw_index(battlefields.values(), rng)] += 1;
                }
                Allocation(troops)
            }
            AdversaryModel::FixedSequence { allocations } => {
                allocations[stage % allocations.len()].clone()
            }
        }
    }
}

/// Inverse-CDF draw from nonnegative weights summing to one.
fn draw_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Allocations of every adversary at `stage`, in order.
pub fn adversary_allocations<R: Rng + ?Sized>(
    models: &[AdversaryModel],
    m: usize,
    battlefields: &Battlefields,
    stage: usize,
    rng: &mut R,
) -> Vec<Allocation> {
    models
        .iter()
        .map(|a| a.allocate(m, battlefields, stage, rng))
        .collect()
}

/// The learner's loss on one battlefield of value `value`.
pub fn battlefield_loss(learner: usize, adversaries: &[usize], value: f64, rule: TieRule) -> f64 {
    let top = adversaries.iter().copied().max().unwrap_or(0);
    if adversaries.is_empty() || learner > top {
        return 0.0;
    }
    if learner < top {
        return value;
    }
    match rule {
        TieRule::AdversaryWins => value,
        TieRule::SharedEqually => {
            let players = 1 + adversaries.iter().filter(|&&a| a == top).count();
            value * (1.0 - 1.0 / players as f64)
        }
    }
}

/// Game loss of an allocation computed directly, without the graph.
pub fn allocation_loss(
    learner: &Allocation,
    battlefields: &Battlefields,
    adversaries: &[Allocation],
    rule: TieRule,
) -> f64 {
    let mut column = Vec::with_capacity(adversaries.len());
    learner
        .0
        .iter()
        .enumerate()
        .map(|(i, &troops)| {
            column.clear();
            column.extend(adversaries.iter().map(|a| a.0[i]));
            battlefield_loss(troops, &column, battlefields.values()[i], rule)
        })
        .sum()
}

/// Per-edge losses: edge `(battlefield i, k troops)` carries the loss of placing `k` on `i`.
pub fn edge_losses(
    g: &LayeredGraph,
    battlefields: &Battlefields,
    adversaries: &[Allocation],
    rule: TieRule,
) -> Vec<f64> {
    let n = g.n();
    let m = g.m();
    // loss of placing k troops on battlefield i, tabulated once
    let mut table = vec![0.0; n * (m + 1)];
    let mut column = Vec::with_capacity(adversaries.len());
    for i in 0..n {
        column.clear();
        column.extend(adversaries.iter().map(|a| a.0[i]));
        for k in 0..=m {
            table[i * (m + 1) + k] = battlefield_loss(k, &column, battlefields.values()[i], rule);
        }
    }
    g.edges()
        .iter()
        .map(|e| table[e.battlefield * (m + 1) + e.troops])
        .collect()
}

/// `(loss)^T p`.
pub fn path_loss(losses: &[f64], path: &Path) -> f64 {
    path.dot(losses)
}

/// A complete game configuration: battlefields, adversaries, and tie rule.
#[derive(Debug, Clone)]
pub struct Environment {
    pub battlefields: Battlefields,
    pub adversaries: Vec<AdversaryModel>,
    pub tie_rule: TieRule,
}

impl Environment {
    pub fn new(
        battlefields: Battlefields,
        adversaries: Vec<AdversaryModel>,
        tie_rule: TieRule,
    ) -> Self {
        Environment {
            battlefields,
            adversaries,
            tie_rule,
        }
    }

    /// The extreme-strong scenario with matching battlefield values.
    pub fn extreme_strong(n: usize, epsilon: f64, hidden: usize, tie_rule: TieRule) -> Result<Self> {
        Ok(Environment {
            battlefields: Battlefields::extreme_strong(n, epsilon, hidden)?,
            adversaries: vec![AdversaryModel::ExtremeStrong { epsilon, hidden }],
            tie_rule,
        })
    }

    pub fn validate(&self, g: &LayeredGraph) -> Result<()> {
        if self.battlefields.len() != g.n() {
            return Err(Error::LengthMismatch {
                expected: g.n(),
                got: self.battlefields.len(),
            });
        }
        if self.adversaries.is_empty() {
            return Err(Error::InvalidParameter("at least one adversary is required".into()));
        }
        for a in &self.adversaries {
            a.validate(g.m(), g.n())?;
        }
        Ok(())
    }

    /// Draws this stage's adversary allocations and returns the edge-loss vector.
    pub fn stage_losses<R: Rng + ?Sized>(
        &self,
        g: &LayeredGraph,
        stage: usize,
        rng: &mut R,
    ) -> Vec<f64> {
        let allocs =
            adversary_allocations(&self.adversaries, g.m(), &self.battlefields, stage, rng);
        edge_losses(g, &self.battlefields, &allocs, self.tie_rule)
    }
}
