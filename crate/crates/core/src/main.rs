use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use fairgame::format;
use fairgame::harness::{self, CheckOptions, GenConfig};
use fairgame::paritygame::{zielonka_solve, Regions};
use fairgame::reduction::{self, Materialize, Variant};
use fairgame::{fixpoint, oracle, BetaMode, FairGame, Player};

#[derive(Parser)]
#[command(name = "fairgame", version, about = "Solve parity games with strong transition fairness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Reduce,
    Fixpoint,
    Oracle,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Bot,
    Top,
    Parity,
}

impl From<Mode> for BetaMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Bot => BetaMode::Bot,
            Mode::Top => BetaMode::Top,
            Mode::Parity => BetaMode::Parity,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GadgetVariant {
    Existential,
    Universal,
}

#[derive(Subcommand)]
enum Command {
    /// Print the winner of every node.
    Solve {
        /// Game file, or `-` for stdin.
        file: PathBuf,
        #[arg(long, value_enum, default_value = "reduce")]
        method: Method,
    },
    /// Reduce to an ordinary parity game.
    Reduce {
        file: PathBuf,
        /// Print the reduced game in PGSolver format instead of a size summary.
        #[arg(long)]
        emit_pgsolver: bool,
        /// Gadget family for bot games.
        #[arg(long, value_enum, default_value = "existential")]
        variant: GadgetVariant,
    },
    /// Cross-check all routes on generated instances.
    Check {
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        first_seed: u64,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, value_enum, default_value = "bot")]
        mode: Mode,
        #[arg(long, default_value_t = 0.35)]
        density: f64,
        #[arg(long, default_value_t = 0.4)]
        fair_prob: f64,
        /// Caps the fair out-degree of generated nodes.
        #[arg(long)]
        max_fair_out: Option<usize>,
        /// Skip the oracle even on small instances.
        #[arg(long)]
        no_oracle: bool,
        /// Also lift and verify winning strategies.
        #[arg(long)]
        strategies: bool,
        /// Step budget of each oracle search.
        #[arg(long, default_value_t = 200_000_000)]
        oracle_budget: u64,
        /// Write the JSON summary here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Generate a random game.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, value_enum, default_value = "bot")]
        mode: Mode,
        #[arg(long, default_value_t = 0.35)]
        density: f64,
        #[arg(long, default_value_t = 0.4)]
        fair_prob: f64,
        #[arg(long)]
        max_fair_out: Option<usize>,
    },
    /// Play both lifted strategies from a node and print the resulting lasso.
    Trace {
        file: PathBuf,
        #[arg(long)]
        from: usize,
    },
}

enum Failure {
    Parse(String),
    Disagree(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn load(path: &PathBuf) -> Result<FairGame, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
    } else {
        text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    }
    format::parse(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn print_regions(r: &Regions) {
    for (v, p) in r.winners().iter().enumerate() {
        println!("node {v}: {p}");
    }
}

fn solve_with(game: &FairGame, method: Method) -> Result<Regions> {
    Ok(match method {
        Method::Reduce => reduction::solve_by_reduction(game)?,
        Method::Fixpoint => fixpoint::solve_fixpoint(game)?,
        Method::Oracle => oracle::oracle_solve(game)?,
        Method::All => unreachable!(),
    })
}

fn solve(file: &PathBuf, method: Method) -> Result<(), Failure> {
    let game = load(file)?;
    if method != Method::All {
        print_regions(&solve_with(&game, method)?);
        return Ok(());
    }
    let red = solve_with(&game, Method::Reduce)?;
    let fix = solve_with(&game, Method::Fixpoint)?;
    let orc = match oracle::oracle_solve(&game) {
        Ok(r) => Some(r),
        Err(oracle::OracleError::Intractable(why)) => {
            eprintln!("oracle skipped: {why}");
            None
        }
        Err(e) => return Err(Failure::Other(e.into())),
    };
    print_regions(&red);
    let mut bad = Vec::new();
    if fix != red {
        bad.push("fixpoint");
    }
    if orc.as_ref().is_some_and(|o| *o != red) {
        bad.push("oracle");
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Disagree(format!("{} disagree with the reduction", bad.join(" and "))))
    }
}

fn reduce(file: &PathBuf, emit: bool, variant: GadgetVariant) -> Result<(), Failure> {
    let game = load(file)?;
    let r = match variant {
        GadgetVariant::Existential => reduction::build(&game),
        GadgetVariant::Universal => reduction::build_parity_bot(&game, Variant::Universal),
    }
    .map_err(anyhow::Error::from)?;
    if emit {
        print!("{}", format::emit_pgsolver(&r.parity, &r.labels()));
    } else {
        let b = reduction::bounds(&r);
        println!(
            "nodes {} (bound {}), max priority {} (bound {})",
            b.nodes, b.node_bound, b.max_priority, b.priority_bound
        );
    }
    Ok(())
}

fn trace(file: &PathBuf, from: usize) -> Result<(), Failure> {
    let game = load(file)?;
    if from >= game.len() {
        return Err(Failure::Other(anyhow::anyhow!("node {from} out of range")));
    }
    let r = match game.beta_mode {
        BetaMode::Parity => reduction::build_parity_parity_with(&game, Materialize::All),
        _ => reduction::build(&game),
    }
    .map_err(anyhow::Error::from)?;
    let sol = zielonka_solve(&r.parity);
    let regions = reduction::project_regions(&r, &sol.regions);
    let lift = |p: Player| reduction::lift_strategy(&r, &sol.strategy[p.index()], p).map_err(anyhow::Error::from);
    let (s, t) = (lift(Player::Exists)?, lift(Player::Forall)?);
    let lasso = oracle::induced_lasso(&game, from, &s, &t).map_err(anyhow::Error::from)?;
    let name = |v: usize| game.display_name(v);
    let stem: Vec<String> = lasso.stem.iter().map(|&v| name(v)).collect();
    let cycle: Vec<String> = lasso.cycle.iter().map(|&v| name(v)).collect();
    println!("region winner: {}", regions.winner(from));
    println!("stem: {}", if stem.is_empty() { "-".into() } else { stem.join(" ") });
    println!("cycle: {}", cycle.join(" "));
    for p in [Player::Exists, Player::Forall] {
        println!("{p}-fair: {}", game.arena.is_fair_for(&lasso, p).map_err(anyhow::Error::from)?);
    }
    println!("winner: {}", game.play_winner(&lasso).map_err(anyhow::Error::from)?);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn gen_config(seed: u64, n: usize, k: u32, d: u32, mode: Mode, density: f64, fair_prob: f64) -> Result<GenConfig> {
    if n == 0 || k == 0 || d == 0 {
        bail!("n, k and d must be positive");
    }
    if !(density > 0.0 && density <= 1.0) || !(0.0..=1.0).contains(&fair_prob) {
        bail!("density must lie in (0, 1] and the fair probability in [0, 1]");
    }
    let mut cfg = GenConfig::new(seed, n, mode.into());
    cfg.k = k;
    cfg.d = d;
    cfg.density = density;
    cfg.fair_prob = fair_prob;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { file, method } => solve(&file, method),
        Command::Reduce { file, emit_pgsolver, variant } => reduce(&file, emit_pgsolver, variant),
        Command::Trace { file, from } => trace(&file, from),
        Command::Gen { seed, n, k, d, mode, density, fair_prob, max_fair_out } => {
            let mut cfg = gen_config(seed, n, k, d, mode, density, fair_prob)?;
            cfg.max_fair_out = max_fair_out;
            print!("{}", format::emit(&harness::generate(&cfg)));
            Ok(())
        }
        Command::Check {
            seeds,
            first_seed,
            n,
            k,
            d,
            mode,
            density,
            fair_prob,
            max_fair_out,
            no_oracle,
            strategies,
            oracle_budget,
            json,
        } => {
            let configs = (first_seed..first_seed + seeds)
                .map(|s| {
                    let mut cfg = gen_config(s, n, k, d, mode, density, fair_prob)?;
                    cfg.max_fair_out = max_fair_out;
                    Ok(cfg)
                })
                .collect::<Result<Vec<_>>>()?;
            let opts = CheckOptions { oracle: !no_oracle, strategies, oracle_budget, ..CheckOptions::default() };
            let report = harness::cross_check(&configs, &opts);
            print!("{}", report.text());
            for r in report.instances.iter().filter(|r| r.counterexample.is_some()) {
                println!("counterexample for seed {}:\n{}", r.seed, r.counterexample.as_deref().unwrap_or(""));
            }
            match json {
                Some(path) => std::fs::write(&path, report.json() + "\n")
                    .with_context(|| format!("writing {}", path.display()))?,
                None => println!("{}", report.json()),
            }
            if report.ok() {
                Ok(())
            } else {
                Err(Failure::Disagree(format!("{} failing instances", report.summary.failures)))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Disagree(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
