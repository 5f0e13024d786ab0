use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use blotto_core::env::TieRule;
use blotto_core::explore::{
    default_budget, optimize_exploration, uniform_report, write_edge_weights, SdpData,
};
use blotto_core::graph::{LayeredGraph, DEFAULT_ENUMERATION_CAP};
use blotto_core::harness::{
    bench_csv, benchmark_runtime, compare_regret, fit_power_law, resolve_setup, run_with_setup,
    stream, AdversaryChoice, BenchOptions, ExperimentConfig, ExplorationChoice, LearnerKind,
    Stream,
};

#[derive(Parser)]
#[command(name = "blotto", version, about = "Bandit learners for repeated Colonel Blotto games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print node, edge, and path counts of G(m, n).
    GraphInfo(Dims),
    /// Run an experiment and write regret traces.
    Simulate(RunArgs),
    /// Run uniform against optimized exploration with paired seeds.
    Compare(RunArgs),
    /// Time the learners on the n = 2m sweep.
    Bench(BenchArgs),
    /// Optimize exploration edge weights.
    OptimizeExplore(OptimizeArgs),
    /// Write the exploration-design SDP data.
    ExportSdp(SdpArgs),
}

#[derive(Args)]
struct Dims {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
}

#[derive(Args, Default)]
struct RunArgs {
    /// TOML experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    /// comband | edgecb
    #[arg(long)]
    learner: Option<LearnerKind>,
    /// uniform | optimize[:budget] | file:<path>
    #[arg(long)]
    exploration: Option<ExplorationChoice>,
    /// extreme-strong | uniform | battlefield-wise
    #[arg(long)]
    adversary: Option<AdversaryChoice>,
    /// shared-equally | adversary-wins
    #[arg(long)]
    tie_rule: Option<TieRule>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Smallest m of the sweep.
    #[arg(long, default_value_t = 2)]
    m_min: usize,
    /// Largest m of the sweep.
    #[arg(long, default_value_t = 7)]
    m_max: usize,
    #[arg(long, default_value_t = 40_000)]
    horizon: usize,
    /// Run only this learner.
    #[arg(long)]
    learner: Option<LearnerKind>,
    /// Seconds per instance and learner.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// Objective evaluations; defaults to 100 E.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for `weights.txt` and `spectrum.txt`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SdpArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)
                .with_context(|| format!("reading config {}", p.display()))?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.m {
            cfg.m = v;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.learner {
            cfg.learner = v;
        }
        if let Some(v) = &self.exploration {
            cfg.exploration = v.clone();
        }
        if let Some(v) = &self.adversary {
            cfg.adversary = v.clone();
        }
        if let Some(v) = self.tie_rule {
            cfg.tie_rule = v;
        }
        if self.gamma.is_some() {
            cfg.gamma = self.gamma;
        }
        if self.eta.is_some() {
            cfg.eta = self.eta;
        }
        if let Some(v) = self.reps {
            cfg.repetitions = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn graph_info(d: &Dims) -> Result<()> {
    let g = LayeredGraph::new(d.m, d.n)?;
    println!("m {}", g.m());
    println!("n {}", g.n());
    println!("nodes {}", g.num_nodes());
    println!("edges {}", g.num_edges());
    println!("paths {}", g.path_count());
    Ok(())
}

fn simulate(args: &RunArgs) -> Result<()> {
    let cfg = args.config()?;
    let setup = resolve_setup(&cfg)?;
    if !setup.feasible && cfg.gamma.is_none() {
        eprintln!(
            "warning: horizon {} is below the tuning threshold {:.0}; gamma clipped to {}",
            cfg.horizon, setup.min_horizon, setup.gamma
        );
    }
    let out = run_with_setup(&cfg, &setup)?;
    print!("{}", out.summary.to_text());
    if let Some(dir) = &args.out {
        out.write_to(dir)?;
        std::fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    }
    Ok(())
}

fn compare(args: &RunArgs) -> Result<()> {
    let base = args.config()?;
    let free_exploration = match &base.exploration {
        ExplorationChoice::Uniform => ExplorationChoice::Optimize { budget: None },
        other => other.clone(),
    };
    let uni = ExperimentConfig {
        exploration: ExplorationChoice::Uniform,
        ..base.clone()
    };
    let free = ExperimentConfig {
        exploration: free_exploration,
        ..base
    };
    let cmp = compare_regret(&uni, &free)?;
    print!("{}", cmp.to_text());
    if let Some(dir) = &args.out {
        cmp.write_to(dir)?;
    }
    Ok(())
}

fn bench(args: &BenchArgs) -> Result<()> {
    if args.m_min < 1 || args.m_max < args.m_min {
        bail!("need 1 <= m-min <= m-max");
    }
    let instances: Vec<(usize, usize)> = (args.m_min..=args.m_max).map(|m| (m, 2 * m)).collect();
    let learners = match args.learner {
        Some(l) => vec![l],
        None => vec![LearnerKind::EdgeCb, LearnerKind::ComBand],
    };
    let opts = BenchOptions {
        horizon: args.horizon,
        timeout: Duration::from_secs(args.timeout),
        seed: args.seed,
        enumeration_cap: DEFAULT_ENUMERATION_CAP,
    };
    let rows = benchmark_runtime(&instances, &learners, &opts)?;
    let table = bench_csv(&rows, args.horizon);
    print!("{table}");
    let edge: Vec<_> = rows
        .iter()
        .filter(|r| r.learner == LearnerKind::EdgeCb && r.stages > 0)
        .collect();
    if edge.len() >= 2 {
        let xs: Vec<f64> = edge.iter().map(|r| r.m as f64).collect();
        let ys: Vec<f64> = edge.iter().map(|r| r.per_stage()).collect();
        let fit = fit_power_law(&xs, &ys)?;
        eprintln!(
            "edgecb per-stage time ~ m^{:.2} (R^2 = {:.3})",
            fit.exponent, fit.r_squared
        );
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("bench.csv"), table)?;
    }
    Ok(())
}

fn optimize(args: &OptimizeArgs) -> Result<()> {
    let g = LayeredGraph::new(args.m, args.n)?;
    let budget = args.budget.unwrap_or_else(|| default_budget(&g));
    let uniform = uniform_report(&g)?;
    let mut rng = stream(args.seed, Stream::Optimizer);
    let res = optimize_exploration(&g, budget, &mut rng)?;
    let mut report = String::new();
    report.push_str(&format!("budget {budget}\n"));
    report.push_str(&format!("zero_eigenvalues {}\n", res.report.k));
    report.push_str(&format!("lambda_star {}\n", res.report.lambda_star));
    report.push_str(&format!("lambda_star_uniform {}\n", uniform.lambda_star));
    let spectrum: Vec<String> = res.report.spectrum.iter().map(|v| v.to_string()).collect();
    report.push_str(&format!("spectrum {}\n", spectrum.join(" ")));
    print!("{report}");
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            write_edge_weights(&res.weights, BufWriter::new(File::create(dir.join("weights.txt"))?))?;
            std::fs::write(dir.join("spectrum.txt"), report)?;
        }
        None => write_edge_weights(&res.weights, std::io::stdout().lock())?,
    }
    Ok(())
}

fn export_sdp(args: &SdpArgs) -> Result<()> {
    let g = LayeredGraph::new(args.m, args.n)?;
    let text = SdpData::build(&g, args.cap)?.to_text();
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("sdp_m{}_n{}.txt", args.m, args.n)), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::GraphInfo(d) => graph_info(d),
        Command::Simulate(a) => simulate(a),
        Command::Compare(a) => compare(a),
        Command::Bench(a) => bench(a),
        Command::OptimizeExplore(a) => optimize(a),
        Command::ExportSdp(a) => export_sdp(a),
    }
}
