use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path as FsPath;
use std::sync::Arc;
use std::time::Instant;

use faer::Mat;
use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{
    AdversaryChoice, BattlefieldChoice, ExperimentConfig, ExplorationChoice, LearnerKind,
};
use super::rng::{stream, Stream};
use crate::bandit::{tune_parameters, BanditConfig, ComBand, EdgeCb, Learner};
use crate::env::{path_loss, AdversaryModel, Battlefields, Environment};
use crate::error::{Error, Result};
use crate::explore::{
    default_budget, null_basis, optimize_exploration, read_edge_weights, spectral_report,
    zero_eigen_count, ExplorationSpec,
};
use crate::graph::LayeredGraph;
use crate::linalg::DEFAULT_REL_TOL;

/// One checkpoint row of a regret trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    /// 1-based stage index.
    pub stage: usize,
    /// Loss observed at this stage.
    pub loss: f64,
    pub cum_loss: f64,
    /// Cumulative loss of the best fixed path in hindsight.
    pub hindsight: f64,
    pub regret: f64,
}

/// Checkpointed regret of one repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub repetition: usize,
    pub points: Vec<TracePoint>,
    /// Wall-clock seconds for the whole stage loop.
    pub seconds: f64,
    pub horizon: usize,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.points.last().map(|p| p.regret).unwrap_or(0.0)
    }

    pub fn per_stage_seconds(&self) -> f64 {
        self.seconds / self.horizon as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "stage,loss,cum_loss,hindsight,regret")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{}",
                p.stage, p.loss, p.cum_loss, p.hindsight, p.regret
            )?;
        }
        Ok(())
    }
}

/// Parameters resolved from an [`ExperimentConfig`] before any stage runs.
#[derive(Debug, Clone)]
pub struct ResolvedSetup {
    pub graph: Arc<LayeredGraph>,
    pub exploration: ExplorationSpec,
    pub lambda_star: f64,
    pub gamma: f64,
    pub eta: f64,
    /// Whether the horizon meets the tuning threshold.
    pub feasible: bool,
    pub min_horizon: f64,
    /// Battlefield values for non-extreme adversaries, fixed for the whole experiment.
    pub battlefields: Battlefields,
}

/// Aggregate over repetitions.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub m: usize,
    pub n: usize,
    pub num_edges: usize,
    pub num_paths: String,
    pub learner: LearnerKind,
    pub exploration: String,
    pub adversary: String,
    pub horizon: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub gamma: f64,
    pub eta: f64,
    pub lambda_star: f64,
    pub feasible: bool,
    pub checkpoints: Vec<usize>,
    pub mean_regret: Vec<f64>,
    pub sd_regret: Vec<f64>,
    pub final_regrets: Vec<f64>,
    pub mean_seconds_per_stage: f64,
}

impl RunSummary {
    pub fn final_mean_regret(&self) -> f64 {
        self.mean_regret.last().copied().unwrap_or(0.0)
    }

    /// Plain `key value` text followed by the checkpoint table.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(s, "m {}", self.m);
        let _ = writeln!(s, "n {}", self.n);
        let _ = writeln!(s, "edges {}", self.num_edges);
        let _ = writeln!(s, "paths {}", self.num_paths);
        let _ = writeln!(s, "learner {}", self.learner.name());
        let _ = writeln!(s, "exploration {}", self.exploration);
        let _ = writeln!(s, "adversary {}", self.adversary);
        let _ = writeln!(s, "horizon {}", self.horizon);
        let _ = writeln!(s, "repetitions {}", self.repetitions);
        let _ = writeln!(s, "seed {}", self.seed);
        let _ = writeln!(s, "gamma {}", self.gamma);
        let _ = writeln!(s, "eta {}", self.eta);
        let _ = writeln!(s, "lambda_star {}", self.lambda_star);
        let _ = writeln!(s, "feasible {}", self.feasible);
        let _ = writeln!(s, "final_mean_regret {}", self.final_mean_regret());
        let finals: Vec<String> = self.final_regrets.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(s, "final_regrets {}", finals.join(" "));
        let _ = writeln!(s, "seconds_per_stage {:.3e}", self.mean_seconds_per_stage);
        let _ = writeln!(s, "stage,mean_regret,sd_regret");
        for ((t, m), sd) in self.checkpoints.iter().zip(&self.mean_regret).zip(&self.sd_regret) {
            let _ = writeln!(s, "{t},{m},{sd}");
        }
        s
    }
}

/// Summary plus the per-repetition traces.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub summary: RunSummary,
    pub traces: Vec<RegretTrace>,
}

impl ExperimentOutcome {
    /// Writes `trace_<rep>.csv` for each repetition and `summary.txt` into `dir`.
    pub fn write_to(&self, dir: &FsPath) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for t in &self.traces {
            let f = File::create(dir.join(format!("trace_{}.csv", t.repetition)))?;
            let mut w = BufWriter::new(f);
            t.write_csv(&mut w)?;
            w.flush()?;
        }
        std::fs::write(dir.join("summary.txt"), self.summary.to_text())?;
        Ok(())
    }
}

/// Stages at which the hindsight comparison is evaluated: `k T / c` for `k = 1..=c`.
pub fn checkpoint_stages(horizon: usize, checkpoints: usize) -> Vec<usize> {
    let c = checkpoints.min(horizon).max(1);
    let mut out: Vec<usize> = (1..=c).map(|k| k * horizon / c).collect();
    out.dedup();
    out
}

/// Builds the graph, exploration distribution, and default parameters.
pub fn resolve_setup(cfg: &ExperimentConfig) -> Result<ResolvedSetup> {
    cfg.validate()?;
    let graph = Arc::new(LayeredGraph::new(cfg.m, cfg.n)?);
    // fail on the enumeration cap before any expensive setup
    let paths = match cfg.learner {
        LearnerKind::ComBand => Some(graph.enumerate_paths(cfg.enumeration_cap)?),
        LearnerKind::EdgeCb => None,
    };
    let exploration = match &cfg.exploration {
        ExplorationChoice::Uniform => ExplorationSpec::Uniform,
        ExplorationChoice::File { path } => {
            let w = read_edge_weights(BufReader::new(File::open(path)?))?;
            if w.len() != graph.num_edges() {
                return Err(Error::LengthMismatch {
                    expected: graph.num_edges(),
                    got: w.len(),
                });
            }
            ExplorationSpec::Factored(w)
        }
        ExplorationChoice::Optimize { budget } => {
            let budget = budget.unwrap_or_else(|| default_budget(&graph));
            let mut rng = stream(cfg.seed, Stream::Optimizer);
            ExplorationSpec::Factored(optimize_exploration(&graph, budget, &mut rng)?.weights)
        }
    };
    let k = zero_eigen_count(&graph)?;
    let m = exploration.cooccurrence(&graph, paths.as_deref())?;
    let lambda_star = spectral_report(&m, k, DEFAULT_REL_TOL)?.lambda_star;
    let tuning = tune_parameters(cfg.m, cfg.n, cfg.horizon, lambda_star)?;
    let battlefields = match &cfg.battlefields {
        BattlefieldChoice::Equal => Battlefields::uniform(cfg.n),
        BattlefieldChoice::Random { high } => {
            Battlefields::random(cfg.n, *high, &mut stream(cfg.seed, Stream::Battlefields))?
        }
        BattlefieldChoice::Values { values } => Battlefields::normalized(values.clone())?,
    };
    Ok(ResolvedSetup {
        graph,
        exploration,
        lambda_star,
        gamma: cfg.gamma.unwrap_or(tuning.gamma),
        eta: cfg.eta.unwrap_or(tuning.eta),
        feasible: tuning.feasible,
        min_horizon: tuning.min_horizon,
        battlefields,
    })
}

/// The environment of one repetition. The extreme-strong hidden battlefield,
/// when not fixed by the config, is drawn from the repetition's adversary stream.
fn environment(
    cfg: &ExperimentConfig,
    setup: &ResolvedSetup,
    adv_rng: &mut ChaCha8Rng,
) -> Result<Environment> {
    let env = match &cfg.adversary {
        AdversaryChoice::ExtremeStrong { epsilon, hidden } => {
            let h = match hidden {
                Some(h) => *h,
                None => adv_rng.random_range(0..cfg.n),
            };
            Environment::extreme_strong(cfg.n, *epsilon, h, cfg.tie_rule)?
        }
        AdversaryChoice::Uniform { budget } => Environment::new(
            setup.battlefields.clone(),
            vec![AdversaryModel::Uniform {
                budget: budget.unwrap_or(cfg.m),
            }],
            cfg.tie_rule,
        ),
        AdversaryChoice::BattlefieldWise { budget } => Environment::new(
            setup.battlefields.clone(),
            vec![AdversaryModel::BattlefieldWise {
                budget: budget.unwrap_or(cfg.m),
            }],
            cfg.tie_rule,
        ),
    };
    env.validate(&setup.graph)?;
    Ok(env)
}

fn build_learner(
    cfg: &ExperimentConfig,
    setup: &ResolvedSetup,
    basis: Option<&Mat<f64>>,
) -> Result<Box<dyn Learner + Send>> {
    let bc = BanditConfig {
        gamma: setup.gamma,
        eta: setup.eta,
        horizon: cfg.horizon,
        exploration: setup.exploration.clone(),
    };
    Ok(match cfg.learner {
        LearnerKind::ComBand => Box::new(ComBand::new(
            Arc::clone(&setup.graph),
            &bc,
            cfg.enumeration_cap,
        )?),
        LearnerKind::EdgeCb => Box::new(EdgeCb::new(Arc::clone(&setup.graph), &bc, basis)?),
    })
}

/// Runs the stage loop with `learner`, returning checkpoint rows.
///
/// The learner only ever sees the scalar loss of its own path; the edge-loss
/// vector and cumulative costs stay here.
pub fn simulate(
    graph: &LayeredGraph,
    env: &Environment,
    learner: &mut dyn Learner,
    horizon: usize,
    checkpoints: &[usize],
    adv_rng: &mut dyn RngCore,
    learner_rng: &mut dyn RngCore,
) -> Result<Vec<TracePoint>> {
    let mut cum_edge = vec![0.0; graph.num_edges()];
    let mut cum_loss = 0.0;
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for t in 0..horizon {
        let losses = env.stage_losses(graph, t, adv_rng);
        let outcome = learner.step(&mut |p| path_loss(&losses, p), learner_rng)?;
        cum_loss += outcome.loss;
        for (c, l) in cum_edge.iter_mut().zip(&losses) {
            *c += l;
        }
        if next.peek() == Some(&&(t + 1)) {
            next.next();
            let (_, hindsight) = graph.min_cost_path(&cum_edge)?;
            points.push(TracePoint {
                stage: t + 1,
                loss: outcome.loss,
                cum_loss,
                hindsight,
                regret: cum_loss - hindsight,
            });
        }
    }
    Ok(points)
}

fn run_repetition(
    cfg: &ExperimentConfig,
    setup: &ResolvedSetup,
    basis: Option<&Mat<f64>>,
    checkpoints: &[usize],
    rep: usize,
) -> Result<RegretTrace> {
    let mut adv_rng = stream(cfg.seed, Stream::Adversary(rep));
    let mut learner_rng = stream(cfg.seed, Stream::Learner(rep));
    let env = environment(cfg, setup, &mut adv_rng)?;
    let mut learner = build_learner(cfg, setup, basis)?;
    let start = Instant::now();
    let points = simulate(
        &setup.graph,
        &env,
        learner.as_mut(),
        cfg.horizon,
        checkpoints,
        &mut adv_rng,
        &mut learner_rng,
    )?;
    Ok(RegretTrace {
        repetition: rep,
        points,
        seconds: start.elapsed().as_secs_f64(),
        horizon: cfg.horizon,
    })
}

/// Runs every repetition of `cfg` (concurrently) and aggregates in repetition order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let setup = resolve_setup(cfg)?;
    run_with_setup(cfg, &setup)
}

/// [`run_experiment`] with a precomputed setup.
pub fn run_with_setup(cfg: &ExperimentConfig, setup: &ResolvedSetup) -> Result<ExperimentOutcome> {
    let checkpoints = checkpoint_stages(cfg.horizon, cfg.checkpoints);
    let basis = match cfg.learner {
        LearnerKind::EdgeCb => Some(null_basis(&setup.graph)?),
        LearnerKind::ComBand => None,
    };
    let traces = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| run_repetition(cfg, setup, basis.as_ref(), &checkpoints, rep))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(cfg, setup, &checkpoints, &traces);
    Ok(ExperimentOutcome { summary, traces })
}

fn summarize(
    cfg: &ExperimentConfig,
    setup: &ResolvedSetup,
    checkpoints: &[usize],
    traces: &[RegretTrace],
) -> RunSummary {
    let r = traces.len() as f64;
    let mut mean = vec![0.0; checkpoints.len()];
    let mut sd = vec![0.0; checkpoints.len()];
    for (i, m) in mean.iter_mut().enumerate() {
        *m = traces.iter().map(|t| t.points[i].regret).sum::<f64>() / r;
        if traces.len() > 1 {
            let var = traces
                .iter()
                .map(|t| (t.points[i].regret - *m).powi(2))
                .sum::<f64>()
                / (r - 1.0);
            sd[i] = var.sqrt();
        }
    }
    RunSummary {
        m: cfg.m,
        n: cfg.n,
        num_edges: setup.graph.num_edges(),
        num_paths: setup.graph.path_count().to_string(),
        learner: cfg.learner,
        exploration: cfg.exploration.label(),
        adversary: cfg.adversary.label().to_string(),
        horizon: cfg.horizon,
        repetitions: cfg.repetitions,
        seed: cfg.seed,
        gamma: setup.gamma,
        eta: setup.eta,
        lambda_star: setup.lambda_star,
        feasible: setup.feasible,
        checkpoints: checkpoints.to_vec(),
        mean_regret: mean,
        sd_regret: sd,
        final_regrets: traces.iter().map(RegretTrace::final_regret).collect(),
        mean_seconds_per_stage: traces.iter().map(RegretTrace::per_stage_seconds).sum::<f64>() / r,
    }
}

/// Both arms of a regret comparison.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub uniform: ExperimentOutcome,
    pub free: ExperimentOutcome,
    pub checkpoints: Vec<usize>,
    /// `(mean R_uni - mean R_free) / mean R_uni` at each checkpoint.
    pub ratios: Vec<f64>,
}

impl Comparison {
    pub fn final_ratio(&self) -> f64 {
        self.ratios.last().copied().unwrap_or(0.0)
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(s, "final_ratio {}", self.final_ratio());
        let _ = writeln!(s, "uniform_final_mean_regret {}", self.uniform.summary.final_mean_regret());
        let _ = writeln!(s, "free_final_mean_regret {}", self.free.summary.final_mean_regret());
        let _ = writeln!(s, "uniform_lambda_star {}", self.uniform.summary.lambda_star);
        let _ = writeln!(s, "free_lambda_star {}", self.free.summary.lambda_star);
        let _ = writeln!(s, "stage,mean_regret_uniform,mean_regret_free,ratio");
        for (i, t) in self.checkpoints.iter().enumerate() {
            let _ = writeln!(
                s,
                "{t},{},{},{}",
                self.uniform.summary.mean_regret[i], self.free.summary.mean_regret[i], self.ratios[i]
            );
        }
        s
    }

    /// Writes each arm into `uniform/` and `free/` plus `comparison.txt`.
    pub fn write_to(&self, dir: &FsPath) -> Result<()> {
        self.uniform.write_to(&dir.join("uniform"))?;
        self.free.write_to(&dir.join("free"))?;
        std::fs::write(dir.join("comparison.txt"), self.to_text())?;
        Ok(())
    }
}

/// Runs two arms that differ only in exploration, with paired seeds.
pub fn compare_regret(cfg_uni: &ExperimentConfig, cfg_free: &ExperimentConfig) -> Result<Comparison> {
    let same = cfg_uni.m == cfg_free.m
        && cfg_uni.n == cfg_free.n
        && cfg_uni.horizon == cfg_free.horizon
        && cfg_uni.learner == cfg_free.learner
        && cfg_uni.adversary == cfg_free.adversary
        && cfg_uni.battlefields == cfg_free.battlefields
        && cfg_uni.tie_rule == cfg_free.tie_rule
        && cfg_uni.repetitions == cfg_free.repetitions
        && cfg_uni.seed == cfg_free.seed
        && cfg_uni.checkpoints == cfg_free.checkpoints;
    if !same {
        return Err(Error::Config(
            "compared arms must share everything except exploration and tuning".into(),
        ));
    }
    let uniform = run_experiment(cfg_uni)?;
    let free = run_experiment(cfg_free)?;
    let ratios = uniform
        .summary
        .mean_regret
        .iter()
        .zip(&free.summary.mean_regret)
        .map(|(u, f)| if *u == 0.0 { 0.0 } else { (u - f) / u })
        .collect();
    Ok(Comparison {
        checkpoints: uniform.summary.checkpoints.clone(),
        uniform,
        free,
        ratios,
    })
}
