//! Seeded instance generation and cross-validation of the solution routes.
//!
//! Instances are drawn from SplitMix64 seeded with the configured seed.
//! Integers below `m` are `(x * m) >> 64` on the 128-bit product of a raw
//! output `x`; probabilities compare `(x >> 11) * 2^-53` against the
//! threshold. Draw order: for every node its owner (`0` is ∃), α in
//! `[1, 2k]` and, in parity mode, Γ in `[1, d]`; then for every node and
//! every target in increasing order one edge draw, plus one fallback target
//! draw if no edge was kept; then one fair draw per edge in the same order.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arena::{BetaMode, FairArena, FairGame, NodeId, Player};
use crate::fixpoint::{self, solve_fixpoint};
use crate::format;
use crate::oracle::{self, Family, OracleConfig};
use crate::paritygame::{zielonka_solve, Regions};
use crate::reduction::{self, bounds, BoundReport, Materialize, ReducedGame};

/// Owners that may receive fair edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FairOwners {
    Both,
    ExistsOnly,
    ForallOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    pub n: usize,
    pub k: u32,
    pub d: u32,
    pub density: f64,
    pub fair_prob: f64,
    pub beta_mode: BetaMode,
    /// Caps the fair out-degree of every node.
    pub max_fair_out: Option<usize>,
    pub fair_owners: FairOwners,
}

impl GenConfig {
    pub fn new(seed: u64, n: usize, beta_mode: BetaMode) -> Self {
        GenConfig {
            seed,
            n,
            k: 2,
            d: 2,
            density: 0.35,
            fair_prob: 0.4,
            beta_mode,
            max_fair_out: None,
            fair_owners: FairOwners::Both,
        }
    }
}

/// The documented sampler on top of SplitMix64.
pub struct Sampler(SplitMix64);

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `[0, m)`.
    pub fn below(&mut self, m: u64) -> u64 {
        ((self.next_u64() as u128 * m as u128) >> 64) as u64
    }

    /// True with probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        ((self.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64) < p
    }
}

/// Generates a game; deterministic in the configuration.
pub fn generate(cfg: &GenConfig) -> FairGame {
    assert!(cfg.n >= 1 && cfg.k >= 1 && cfg.d >= 1, "invalid generator configuration");
    let mut rng = Sampler::new(cfg.seed);
    let n = cfg.n;
    let (mut owner, mut alpha, mut beta) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..n {
        owner.push(if rng.below(2) == 0 { Player::Exists } else { Player::Forall });
        alpha.push(1 + rng.below(2 * cfg.k as u64) as u32);
        beta.push(if cfg.beta_mode == BetaMode::Parity { 1 + rng.below(cfg.d as u64) as u32 } else { 0 });
    }
    let mut succ: Vec<Vec<NodeId>> = Vec::new();
    for _ in 0..n {
        let mut s: Vec<NodeId> = (0..n).filter(|_| rng.chance(cfg.density)).collect();
        if s.is_empty() {
            s.push(rng.below(n as u64) as usize);
        }
        succ.push(s);
    }
    let mut fair = vec![Vec::new(); n];
    for v in 0..n {
        let allowed = match cfg.fair_owners {
            FairOwners::Both => true,
            FairOwners::ExistsOnly => owner[v] == Player::Exists,
            FairOwners::ForallOnly => owner[v] == Player::Forall,
        };
        for &w in &succ[v] {
            let hit = rng.chance(cfg.fair_prob);
            if hit && allowed && cfg.max_fair_out.is_none_or(|m| fair[v].len() < m) {
                fair[v].push(w);
            }
        }
    }
    FairGame::new(FairArena::new(owner, succ, fair), alpha, cfg.beta_mode, beta)
}

/// Which routes and checks a cross-check runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckOptions {
    /// Run the oracle on instances within its caps.
    pub oracle: bool,
    /// Lift strategies and play them against every opponent family strategy.
    pub strategies: bool,
    /// Compare the bot reduction with its universal-gadget variant.
    pub variants: bool,
    /// Compare against the fixpoint game backend (bot instances within cap).
    pub fixpoint_game: bool,
    /// Step budget of every oracle search; exhausting it skips the oracle.
    pub oracle_budget: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            oracle: true,
            strategies: false,
            variants: false,
            fixpoint_game: false,
            oracle_budget: OracleConfig::default().step_budget,
        }
    }
}

/// Outcome of checking one instance.
#[derive(Clone, Debug, Serialize)]
pub struct InstanceReport {
    pub seed: u64,
    pub n: usize,
    pub mode: BetaMode,
    pub reduction: String,
    pub fixpoint: String,
    pub oracle: Option<String>,
    pub agree: bool,
    pub bound_nodes: usize,
    pub bound_node_limit: usize,
    pub bound_priority: u32,
    pub bound_priority_limit: u32,
    pub bounds_ok: bool,
    pub monotone: bool,
    pub one_sided_ok: Option<bool>,
    pub variants_ok: Option<bool>,
    pub fixpoint_game_ok: Option<bool>,
    pub strategies_ok: Option<bool>,
    /// Parity mode: whether the per-node family gave different regions.
    pub family_finding: Option<bool>,
    pub errors: Vec<String>,
    /// Shrunk counterexample in the fair game format, on failure.
    pub counterexample: Option<String>,
}

impl InstanceReport {
    /// Failures that make a check fail (bound violations are reported separately).
    pub fn failed(&self) -> bool {
        !self.agree
            || !self.monotone
            || self.one_sided_ok == Some(false)
            || self.variants_ok == Some(false)
            || self.fixpoint_game_ok == Some(false)
            || self.strategies_ok == Some(false)
            || !self.errors.is_empty()
    }

    pub fn line(&self) -> String {
        let yn = |b: bool| if b { "ok" } else { "FAIL" };
        let opt = |o: Option<bool>| o.map_or("-", |b| if b { "ok" } else { "FAIL" });
        format!(
            "seed={} n={} mode={} agree={} bounds={}({}/{},{}/{}) monotone={} one_sided={} variants={} fpgame={} strategies={} family_diff={}{}",
            self.seed,
            self.n,
            self.mode,
            yn(self.agree),
            yn(self.bounds_ok),
            self.bound_nodes,
            self.bound_node_limit,
            self.bound_priority,
            self.bound_priority_limit,
            yn(self.monotone),
            opt(self.one_sided_ok),
            opt(self.variants_ok),
            opt(self.fixpoint_game_ok),
            opt(self.strategies_ok),
            self.family_finding.map_or("-", |b| if b { "yes" } else { "no" }),
            if self.errors.is_empty() { String::new() } else { format!(" errors={}", self.errors.join("; ")) }
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub instances: usize,
    pub failures: usize,
    pub bound_violations: usize,
    pub family_findings: usize,
    pub oracle_checked: usize,
    pub strategy_checked: usize,
    pub strategy_failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub instances: Vec<InstanceReport>,
    pub summary: Summary,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.summary.failures == 0
    }

    pub fn text(&self) -> String {
        let mut s: String = self.instances.iter().map(|r| r.line() + "\n").collect();
        let m = &self.summary;
        s += &format!(
            "instances={} failures={} bound_violations={} family_findings={} oracle_checked={} strategy_checked={} strategy_failures={}\n",
            m.instances,
            m.failures,
            m.bound_violations,
            m.family_findings,
            m.oracle_checked,
            m.strategy_checked,
            m.strategy_failures
        );
        s
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes")
    }
}

fn show(r: &Regions) -> String {
    r.winners().iter().map(|p| if *p == Player::Exists { 'E' } else { 'A' }).collect()
}

/// Solves with the reduction route, returning the reduced game as well.
fn reduce(game: &FairGame) -> Result<(ReducedGame, Regions), String> {
    let r = reduction::build(game).map_err(|e| e.to_string())?;
    let sol = zielonka_solve(&r.parity);
    let regions = reduction::project_regions(&r, &sol.regions);
    Ok((r, regions))
}

/// Lifts both players' strategies and checks each against every opponent
/// family strategy from every node of its region, plus the memory bound.
/// `Ok(None)` means the search budget ran out.
pub fn check_strategies(game: &FairGame, budget: u64) -> Result<Option<bool>, String> {
    let r = match game.beta_mode {
        BetaMode::Parity => reduction::build_parity_parity_with(game, Materialize::All).map_err(|e| e.to_string())?,
        _ => reduction::build(game).map_err(|e| e.to_string())?,
    };
    let sol = zielonka_solve(&r.parity);
    let regions = reduction::project_regions(&r, &sol.regions);
    for p in [Player::Exists, Player::Forall] {
        let s = reduction::lift_strategy(&r, &sol.strategy[p.index()], p).map_err(|e| e.to_string())?;
        if let Err(e) = s.check_shape(game) {
            return Err(format!("{p} strategy shape: {e}"));
        }
        for &v in regions.region(p) {
            match oracle::beats_all(game, v, &s, budget) {
                Ok(true) => {}
                Ok(false) => return Ok(Some(false)),
                Err(oracle::OracleError::Intractable(_)) => return Ok(None),
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(Some(true))
}

fn within_oracle_caps(game: &FairGame, cfg: &OracleConfig) -> bool {
    game.len() <= cfg.max_nodes
        && game.d() <= cfg.max_d
        && game.arena.nodes().all(|v| game.arena.fair_succ(v).len() <= cfg.max_fair_out)
}

/// Checks one game; `seed` only labels the report.
pub fn check_game(game: &FairGame, seed: u64, opts: &CheckOptions) -> InstanceReport {
    let ocfg = OracleConfig { step_budget: opts.oracle_budget, ..OracleConfig::default() };
    let mut errors = Vec::new();
    let (red, red_regions) = match reduce(game) {
        Ok(x) => x,
        Err(e) => panic!("reduction failed on a valid game: {e}"),
    };
    let b: BoundReport = bounds(&red);
    let fix = solve_fixpoint(game).expect("mode matches");
    let mut agree = fix == red_regions;
    let mut oracle_regions = None;
    let mut family_finding = None;
    if opts.oracle && within_oracle_caps(game, &ocfg) {
        match oracle::oracle_solve_with(game, Family::for_mode(game.beta_mode), &ocfg) {
            Ok(o) => {
                agree &= o == red_regions;
                if game.beta_mode == BetaMode::Parity {
                    match oracle::oracle_solve_with(game, Family::Simple, &ocfg) {
                        Ok(s) => family_finding = Some(s != o),
                        Err(oracle::OracleError::Intractable(_)) => {}
                        Err(e) => errors.push(format!("simple family: {e}")),
                    }
                }
                oracle_regions = Some(o);
            }
            Err(oracle::OracleError::Intractable(_)) => {}
            Err(e) => errors.push(format!("oracle: {e}")),
        }
    }

    // β-monotonicity and one-sided independence on the same arena.
    let (monotone, one_sided_ok) = if game.beta_mode == BetaMode::Parity {
        (true, None)
    } else {
        let bot = reduction::solve_by_reduction(&game.with_mode(BetaMode::Bot)).expect("bot");
        let top = reduction::solve_by_reduction(&game.with_mode(BetaMode::Top)).expect("top");
        let monotone = bot.win_exists.iter().all(|v| top.win_exists.contains(v));
        let one_sided = !game.arena.has_fair_nodes_of(Player::Exists) || !game.arena.has_fair_nodes_of(Player::Forall);
        (monotone, one_sided.then_some(bot == top))
    };

    let variants_ok = (opts.variants && game.beta_mode == BetaMode::Bot).then(|| {
        let u = reduction::build_parity_bot(game, reduction::Variant::Universal).expect("bot");
        reduction::project_regions(&u, &zielonka_solve(&u.parity).regions) == red_regions
    });
    let fixpoint_game_ok = (opts.fixpoint_game && game.beta_mode == BetaMode::Bot)
        .then(|| fixpoint::build_fixpoint_game(game, fixpoint::DEFAULT_FIXPOINT_GAME_CAP).ok())
        .flatten()
        .map(|fg| fixpoint::solve_fixpoint_game(&fg) == fix);
    let strategies_ok = if opts.strategies && oracle_regions.is_some() {
        check_strategies(game, ocfg.step_budget).unwrap_or_else(|e| {
            errors.push(format!("strategies: {e}"));
            Some(false)
        })
    } else {
        None
    };

    InstanceReport {
        seed,
        n: game.len(),
        mode: game.beta_mode,
        reduction: show(&red_regions),
        fixpoint: show(&fix),
        oracle: oracle_regions.as_ref().map(show),
        agree,
        bound_nodes: b.nodes,
        bound_node_limit: b.node_bound,
        bound_priority: b.max_priority,
        bound_priority_limit: b.priority_bound,
        bounds_ok: b.holds(),
        monotone,
        one_sided_ok,
        variants_ok,
        fixpoint_game_ok,
        strategies_ok,
        family_finding,
        errors,
        counterexample: None,
    }
}

/// Checks a batch of generated instances; reports are ordered by input order.
pub fn cross_check(configs: &[GenConfig], opts: &CheckOptions) -> Report {
    let instances: Vec<InstanceReport> = configs
        .par_iter()
        .map(|cfg| {
            let game = generate(cfg);
            let mut r = check_game(&game, cfg.seed, opts);
            if r.failed() {
                let opts = *opts;
                let small = shrink(&game, &|g| check_game(g, cfg.seed, &opts).failed());
                r.counterexample = Some(format::emit(&small));
            }
            r
        })
        .collect();
    let summary = Summary {
        instances: instances.len(),
        failures: instances.iter().filter(|r| r.failed()).count(),
        bound_violations: instances.iter().filter(|r| !r.bounds_ok).count(),
        family_findings: instances.iter().filter(|r| r.family_finding == Some(true)).count(),
        oracle_checked: instances.iter().filter(|r| r.oracle.is_some()).count(),
        strategy_checked: instances.iter().filter(|r| r.strategies_ok.is_some()).count(),
        strategy_failures: instances.iter().filter(|r| r.strategies_ok == Some(false)).count(),
    };
    Report { instances, summary }
}

fn remove_node(game: &FairGame, x: NodeId) -> Option<FairGame> {
    if game.len() <= 1 {
        return None;
    }
    let map = |v: NodeId| if v < x { v } else { v - 1 };
    let keep: Vec<NodeId> = game.arena.nodes().filter(|&v| v != x).collect();
    let filt = |l: &[NodeId]| l.iter().copied().filter(|&w| w != x).map(map).collect::<Vec<_>>();
    let succ: Vec<Vec<NodeId>> = keep.iter().map(|&v| filt(game.arena.succ(v))).collect();
    if succ.iter().any(Vec::is_empty) {
        return None;
    }
    let fair = keep.iter().map(|&v| filt(game.arena.fair_succ(v))).collect();
    let owner = keep.iter().map(|&v| game.arena.owner(v)).collect();
    let mut g = FairGame::new(
        FairArena::new(owner, succ, fair),
        keep.iter().map(|&v| game.alpha[v]).collect(),
        game.beta_mode,
        keep.iter().map(|&v| game.beta[v]).collect(),
    );
    g.names = keep.iter().map(|&v| game.names[v].clone()).collect();
    Some(g)
}

fn edit_edges(game: &FairGame, v: NodeId, w: NodeId, drop_edge: bool) -> Option<FairGame> {
    let a = &game.arena;
    let mut succ: Vec<Vec<NodeId>> = a.nodes().map(|u| a.succ(u).to_vec()).collect();
    let mut fair: Vec<Vec<NodeId>> = a.nodes().map(|u| a.fair_succ(u).to_vec()).collect();
    fair[v].retain(|&u| u != w);
    if drop_edge {
        succ[v].retain(|&u| u != w);
        if succ[v].is_empty() {
            return None;
        }
    }
    let owner = a.nodes().map(|u| a.owner(u)).collect();
    let mut g = FairGame::new(FairArena::new(owner, succ, fair), game.alpha.clone(), game.beta_mode, game.beta.clone());
    g.names = game.names.clone();
    Some(g)
}

/// Greedily deletes nodes, edges and fairness marks while `fails` holds.
pub fn shrink(game: &FairGame, fails: &dyn Fn(&FairGame) -> bool) -> FairGame {
    let mut cur = game.clone();
    loop {
        let mut candidates: Vec<FairGame> = Vec::new();
        candidates.extend(cur.arena.nodes().filter_map(|x| remove_node(&cur, x)));
        for v in cur.arena.nodes() {
            for &w in cur.arena.succ(v) {
                candidates.extend(edit_edges(&cur, v, w, true));
                if cur.arena.is_fair_edge(v, w) {
                    candidates.extend(edit_edges(&cur, v, w, false));
                }
            }
        }
        match candidates.into_iter().find(|g| fails(g)) {
            Some(g) => cur = g,
            None => return cur,
        }
    }
}
