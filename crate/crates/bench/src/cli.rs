//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrccm_core::beamformer::{AlgorithmConfig, Beamformer};
use rrccm_core::complexity::{complexity_eval, CostedAlgorithm, Structure};
use rrccm_core::convexity::{binary_symbol_set, convexity_condition, hessian_psd_check};
use rrccm_core::signal::generate_snapshots;
use rrccm_core::trial::{trial_seed, AveragedSeries};
use rrccm_core::{CVector, C64};

use crate::dump::SavedState;
use crate::plot::{write_plot_script, PlotKind};
use crate::runner::{configs, run_experiment, sinr_bounds, sweep_rank};
use crate::setup::{parse_algorithms, Setup};
use crate::table::{metrics_rows, write_metrics, write_sweep, SweepRow};

/// Overrides the directory of every output file; file names are kept.
pub const OUT_DIR_ENV: &str = "RRCCM_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "rrccm", version, about = "Reduced-rank CCM beamforming experiments")]
pub struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo convergence run; writes per-snapshot averages as CSV.
    Run(RunArgs),
    /// Final SINR against the rank of fixed-rank variants.
    SweepRank(SweepArgs),
    /// Operation counts per snapshot from the complexity tables.
    Complexity(ComplexityArgs),
    /// Convexity condition and the sampled Hessian's smallest eigenvalue.
    CheckConvexity(ConvexityArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Preset name (fig4 … fig8) or path to a scenario file.
    #[arg(long)]
    pub scenario: String,
    /// Comma-separated algorithm ids, e.g. `dfp-sg,dfp-rls,gsc-rgs`.
    #[arg(long)]
    pub algs: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV; a plotting script is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
    /// Use the unnormalized projector `I − a₀a₀ᴴ` in the direct-form SG
    /// transform update.
    #[arg(long)]
    pub literal_table1: bool,
    /// Also write the final processor states of the first trial to this
    /// directory, one dump per algorithm.
    #[arg(long)]
    pub dump_state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1)]
    pub min: usize,
    #[arg(long, default_value_t = 16)]
    pub max: usize,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub r: u64,
    #[arg(long, value_parser = parse_structure)]
    pub structure: Structure,
    /// Only this row, e.g. `JIO-CCM-SG`.
    #[arg(long)]
    pub alg: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConvexityArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub c0: f64,
    /// Modulus of the desired user's symbol.
    #[arg(long)]
    pub d0: f64,
    /// Number of interferers in the sampled Hessian.
    #[arg(long, default_value_t = 4)]
    pub interferers: usize,
    /// Random interferer responses to try.
    #[arg(long, default_value_t = 20)]
    pub draws: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn parse_structure(s: &str) -> Result<Structure, String> {
    s.parse().map_err(|_| format!("expected `dfp` or `gsc`, got `{s}`"))
}

pub fn execute(cli: Cli) -> anyhow::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Run(args) => run(&args, &mut out),
        Command::SweepRank(args) => sweep(&args, &mut out),
        Command::Complexity(args) => complexity(&args, &mut out),
        Command::CheckConvexity(args) => convexity(&args, &mut out),
    }
}

/// Where an output file goes: `requested`, or its file name inside
/// `$RRCCM_OUT_DIR` when that is set.
pub fn output_path(requested: &Path, env_dir: Option<&Path>) -> PathBuf {
    match (env_dir, requested.file_name()) {
        (Some(dir), Some(name)) => dir.join(name),
        _ => requested.to_path_buf(),
    }
}

fn resolve_out(requested: Option<&PathBuf>, default: String) -> anyhow::Result<PathBuf> {
    let requested = requested.cloned().unwrap_or_else(|| PathBuf::from(default));
    let env_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let path = output_path(&requested, env_dir.as_deref());
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(path)
}

fn load(common: &Common) -> anyhow::Result<(Setup, Vec<rrccm_core::beamformer::AlgorithmId>)> {
    let setup = Setup::resolve(&common.scenario)?;
    let ids = match &common.algs {
        Some(list) => parse_algorithms(list)?,
        None => setup.algorithms.clone(),
    };
    if common.trials == 0 {
        bail!("--trials must be at least 1");
    }
    Ok((setup, ids))
}

fn run(args: &RunArgs, out: &mut impl Write) -> anyhow::Result<()> {
    let (setup, ids) = load(&args.common)?;
    let mut algs = configs(&setup, &ids, None)?;
    if args.literal_table1 {
        for (_, config) in &mut algs {
            match config {
                AlgorithmConfig::Dfp(p) => p.literal_table1 = true,
                AlgorithmConfig::Auto(p) => p.master.literal_table1 = true,
                AlgorithmConfig::Gsc(_) => {}
            }
        }
    }
    let series = run_experiment(&setup.scenario, &algs, args.common.trials, args.common.seed)?;
    let bounds = sinr_bounds(&setup.scenario)?;

    let path = resolve_out(args.common.out.as_ref(), format!("{}.csv", setup.name))?;
    write_metrics(&path, &metrics_rows(&series))?;
    let script = write_plot_script(&path, PlotKind::Convergence, bounds.first().map(|b| b.1))?;

    for (start, db) in &bounds {
        writeln!(out, "MVDR bound from snapshot {start}: {db:.3} dB")?;
    }
    summarize(&series, out)?;
    writeln!(out, "wrote {} and {}", path.display(), script.display())?;

    if let Some(dir) = &args.dump_state {
        let dir = std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| dir.clone());
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        dump_first_trial(&setup, &algs, args.common.seed, &dir)?;
        writeln!(out, "wrote state dumps to {}", dir.display())?;
    }
    Ok(())
}

fn summarize(series: &[AveragedSeries], out: &mut impl Write) -> anyhow::Result<()> {
    writeln!(
        out,
        "{:<14} {:>7} {:>8} {:>12} {:>12}",
        "algorithm", "trials", "excluded", "final dB", "last-10% dB"
    )?;
    for s in series {
        let n = s.sinr_db.len();
        let tail = &s.sinr_db[n - (n / 10).max(1)..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        writeln!(
            out,
            "{:<14} {:>7} {:>8} {:>12.3} {:>12.3}",
            s.name,
            s.trials,
            s.excluded,
            s.sinr_db[n - 1],
            mean
        )?;
    }
    Ok(())
}

fn dump_first_trial(setup: &Setup, algs: &[(String, AlgorithmConfig)], seed: u64, dir: &Path) -> anyhow::Result<()> {
    let scenario = rrccm_core::signal::ScenarioConfig {
        seed: trial_seed(seed, 0),
        ..setup.scenario.clone()
    };
    let batch = generate_snapshots(&scenario)?;
    let a0 = scenario.desired_steering();
    for (name, config) in algs {
        let mut bf = Beamformer::new(config, &a0)?;
        for i in 0..batch.len() {
            if let Err(e) = bf.step(&batch.snapshot(i)) {
                log::warn!("{name}: stopped at snapshot {}: {e}", i + 1);
                break;
            }
        }
        let saved = match bf {
            Beamformer::Dfp { state, .. } => SavedState::Dfp(state),
            Beamformer::Gsc { state, .. } => SavedState::Gsc(state),
            Beamformer::Auto { state, .. } => SavedState::Auto(state),
        };
        let path = dir.join(format!("{name}.state"));
        std::fs::write(&path, saved.to_text()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn sweep(args: &SweepArgs, out: &mut impl Write) -> anyhow::Result<()> {
    let (setup, ids) = load(&args.common)?;
    if args.min == 0 || args.min > args.max {
        bail!("rank range must satisfy 1 ≤ --min ≤ --max");
    }
    let points = sweep_rank(&setup, &ids, args.min..=args.max, args.common.trials, args.common.seed)?;
    let path = resolve_out(args.common.out.as_ref(), format!("{}-rank-sweep.csv", setup.name))?;
    let rows: Vec<SweepRow> = points
        .iter()
        .map(|p| SweepRow {
            rank: p.rank,
            algorithm: p.algorithm.clone(),
            sinr_db: p.sinr_db,
            cm_cost: p.cm_cost,
            weight_err: p.weight_err,
        })
        .collect();
    write_sweep(&path, &rows)?;
    let bound = sinr_bounds(&setup.scenario)?.last().map(|b| b.1);
    let script = write_plot_script(&path, PlotKind::RankSweep, bound)?;

    writeln!(
        out,
        "{:<10} {:>5} {:>12} {:>8}",
        "algorithm", "rank", "final dB", "excluded"
    )?;
    for p in &points {
        writeln!(
            out,
            "{:<10} {:>5} {:>12.3} {:>8}",
            p.algorithm, p.rank, p.sinr_db, p.excluded
        )?;
    }
    for id in &ids {
        let name = id.name();
        let best = points
            .iter()
            .filter(|p| p.algorithm == name && p.sinr_db.is_finite())
            .max_by(|a, b| a.sinr_db.total_cmp(&b.sinr_db));
        if let Some(best) = best {
            writeln!(out, "{name}: best rank {} ({:.3} dB)", best.rank, best.sinr_db)?;
        }
    }
    writeln!(out, "wrote {} and {}", path.display(), script.display())?;
    Ok(())
}

fn complexity(args: &ComplexityArgs, out: &mut impl Write) -> anyhow::Result<()> {
    let rows: Vec<CostedAlgorithm> = match &args.alg {
        Some(id) => vec![id
            .parse()
            .map_err(|_| anyhow::anyhow!("unknown complexity row `{id}`"))?],
        None => CostedAlgorithm::ALL.to_vec(),
    };
    writeln!(out, "algorithm,structure,additions,multiplications")?;
    for alg in rows {
        let e = complexity_eval(alg, args.structure, args.m, args.r)?;
        writeln!(
            out,
            "{},{},{},{}",
            e.algorithm, e.structure, e.additions, e.multiplications
        )?;
    }
    Ok(())
}

fn convexity(args: &ConvexityArgs, out: &mut impl Write) -> anyhow::Result<()> {
    for (name, v) in [("gamma", args.gamma), ("c0", args.c0), ("d0", args.d0)] {
        if !(v > 0.0 && v.is_finite()) {
            bail!("--{name} must be positive");
        }
    }
    if args.interferers == 0 || args.interferers > 16 {
        bail!("--interferers must lie in 1..=16");
    }
    let holds = convexity_condition(args.d0, args.c0, args.gamma);
    let kappa = args.gamma * args.gamma * args.d0 * args.d0 * args.c0 * args.c0;
    writeln!(out, "γ²|d₀|²C₀² = {kappa}")?;
    writeln!(out, "condition holds: {holds}")?;

    let symbols = binary_symbol_set(args.interferers);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut worst = f64::INFINITY;
    for draw in 0..args.draws.max(1) {
        let varsigma = if draw == 0 {
            CVector::zeros(args.interferers)
        } else {
            CVector::from_fn(args.interferers, |_, _| {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            })
        };
        let (_, min_eig) = hessian_psd_check(&varsigma, &symbols, kappa)?;
        worst = worst.min(min_eig);
    }
    writeln!(
        out,
        "smallest Hessian eigenvalue over {} draws: {worst:e}",
        args.draws.max(1)
    )?;
    Ok(())
}
