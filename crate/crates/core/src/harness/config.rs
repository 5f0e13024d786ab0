use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};

use crate::env::TieRule;
use crate::error::{Error, Result};
use crate::graph::DEFAULT_ENUMERATION_CAP;

/// Current config schema version.
pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    #[serde(rename = "comband")]
    ComBand,
    #[serde(rename = "edgecb")]
    EdgeCb,
}

impl LearnerKind {
    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::ComBand => "comband",
            LearnerKind::EdgeCb => "edgecb",
        }
    }
}

impl std::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "comband" => Ok(LearnerKind::ComBand),
            "edgecb" => Ok(LearnerKind::EdgeCb),
            _ => Err(Error::Config(format!("unknown learner {s:?} (comband | edgecb)"))),
        }
    }
}

/// Where the exploration distribution comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExplorationChoice {
    Uniform,
    /// Edge weights read from a file, one per line.
    File { path: PathBuf },
    /// Optimize `lambda*` first; `budget` defaults to `100 E` evaluations.
    Optimize {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<usize>,
    },
}

impl ExplorationChoice {
    pub fn label(&self) -> String {
        match self {
            ExplorationChoice::Uniform => "uniform".into(),
            ExplorationChoice::File { path } => format!("file:{}", path.display()),
            ExplorationChoice::Optimize { .. } => "optimize".into(),
        }
    }
}

impl std::str::FromStr for ExplorationChoice {
    type Err = Error;

    /// `uniform`, `optimize`, `optimize:<budget>`, or `file:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(ExplorationChoice::Uniform),
            "optimize" => Ok(ExplorationChoice::Optimize { budget: None }),
            _ => {
                if let Some(b) = s.strip_prefix("optimize:") {
                    let budget = b
                        .parse()
                        .map_err(|_| Error::Config(format!("bad optimize budget {b:?}")))?;
                    Ok(ExplorationChoice::Optimize { budget: Some(budget) })
                } else if let Some(p) = s.strip_prefix("file:") {
                    Ok(ExplorationChoice::File { path: p.into() })
                } else {
                    Err(Error::Config(format!(
                        "unknown exploration {s:?} (uniform | optimize[:budget] | file:<path>)"
                    )))
                }
            }
        }
    }
}

/// Adversary parameters as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AdversaryChoice {
    /// `hidden` is drawn per repetition when absent.
    ExtremeStrong {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hidden: Option<usize>,
    },
    /// `budget` defaults to the learner's `m`.
    Uniform {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<usize>,
    },
    BattlefieldWise {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<usize>,
    },
}

fn default_epsilon() -> f64 {
    0.1
}

impl AdversaryChoice {
    pub fn label(&self) -> &'static str {
        match self {
            AdversaryChoice::ExtremeStrong { .. } => "extreme-strong",
            AdversaryChoice::Uniform { .. } => "uniform",
            AdversaryChoice::BattlefieldWise { .. } => "battlefield-wise",
        }
    }
}

impl std::str::FromStr for AdversaryChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extreme-strong" => Ok(AdversaryChoice::ExtremeStrong {
                epsilon: default_epsilon(),
                hidden: None,
            }),
            "uniform" => Ok(AdversaryChoice::Uniform { budget: None }),
            "battlefield-wise" => Ok(AdversaryChoice::BattlefieldWise { budget: None }),
            _ => Err(Error::Config(format!(
                "unknown adversary {s:?} (extreme-strong | uniform | battlefield-wise)"
            ))),
        }
    }
}

/// Battlefield values. Ignored by the extreme-strong adversary, which fixes its own layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BattlefieldChoice {
    /// All values `1/n`.
    Equal,
    /// Raw values uniform on `(0, high]`, normalized; drawn once per experiment.
    Random {
        #[serde(default = "default_high")]
        high: f64,
    },
    /// Explicit values, normalized to sum one.
    Values { values: Vec<f64> },
}

fn default_high() -> f64 {
    8.0
}

impl std::str::FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shared-equally" | "shared" => Ok(TieRule::SharedEqually),
            "adversary-wins" => Ok(TieRule::AdversaryWins),
            _ => Err(Error::Config(format!(
                "unknown tie rule {s:?} (shared-equally | adversary-wins)"
            ))),
        }
    }
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub m: usize,
    pub n: usize,
    pub horizon: usize,
    pub learner: LearnerKind,
    pub exploration: ExplorationChoice,
    pub adversary: AdversaryChoice,
    #[serde(default = "default_battlefields")]
    pub battlefields: BattlefieldChoice,
    #[serde(default)]
    pub tie_rule: TieRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    /// Number of hindsight checkpoints, spread evenly over the horizon.
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
    #[serde(default = "default_cap")]
    pub enumeration_cap: u64,
}

fn default_battlefields() -> BattlefieldChoice {
    BattlefieldChoice::Equal
}

fn default_reps() -> usize {
    1
}

fn default_checkpoints() -> usize {
    100
}

fn default_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            version: CONFIG_VERSION,
            m: 3,
            n: 3,
            horizon: 1000,
            learner: LearnerKind::EdgeCb,
            exploration: ExplorationChoice::Uniform,
            adversary: AdversaryChoice::Uniform { budget: None },
            battlefields: default_battlefields(),
            tie_rule: TieRule::default(),
            gamma: None,
            eta: None,
            repetitions: default_reps(),
            seed: 0,
            checkpoints: default_checkpoints(),
            enumeration_cap: default_cap(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &FsPath) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!("unsupported config version {}", self.version)));
        }
        if self.m < 1 || self.n < 2 {
            return Err(Error::InvalidDimensions { m: self.m, n: self.n });
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.checkpoints == 0 {
            return Err(Error::Config("checkpoints must be at least 1".into()));
        }
        if let Some(g) = self.gamma {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::Config(format!("gamma must lie in [0, 1], got {g}")));
            }
        }
        if let Some(e) = self.eta {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::Config(format!("eta must be positive, got {e}")));
            }
        }
        match &self.adversary {
            AdversaryChoice::ExtremeStrong { epsilon, hidden } => {
                if !(*epsilon > 0.0 && *epsilon < 1.0) {
                    return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
                }
                if let Some(h) = hidden {
                    if *h >= self.n {
                        return Err(Error::Config(format!("hidden battlefield {h} >= n = {}", self.n)));
                    }
                }
            }
            AdversaryChoice::Uniform { budget } | AdversaryChoice::BattlefieldWise { budget } => {
                if *budget == Some(0) {
                    return Err(Error::Config("adversary budget must be positive".into()));
                }
            }
        }
        match &self.battlefields {
            BattlefieldChoice::Equal => {}
            BattlefieldChoice::Random { high } => {
                if !(*high > 0.0 && high.is_finite()) {
                    return Err(Error::Config(format!("battlefield high must be positive, got {high}")));
                }
            }
            BattlefieldChoice::Values { values } => {
                if values.len() != self.n {
                    return Err(Error::LengthMismatch {
                        expected: self.n,
                        got: values.len(),
                    });
                }
            }
        }
        if let ExplorationChoice::Optimize { budget: Some(0) } = self.exploration {
            return Err(Error::Config("optimization budget must be positive".into()));
        }
        Ok(())
    }
}
