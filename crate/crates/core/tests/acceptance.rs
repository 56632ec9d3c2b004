//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so that every criterion reports even
//! when an earlier one fails. Exits with status 1 if any criterion fails.

use std::cell::OnceCell;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use fairgame::fixpoint::{self, build_fixpoint_game, solve_fixpoint_bot, solve_fixpoint_game};
use fairgame::format;
use fairgame::harness::{self, check_game, check_strategies, generate, CheckOptions, FairOwners, GenConfig};
use fairgame::oracle::{self, Family, OracleConfig, OracleError};
use fairgame::paritygame::{zielonka_solve, ParityGame, Regions};
use fairgame::reduction::{self, Variant};
use fairgame::{BetaMode, FairGame, Player};

/// Criterion 1 wall-clock limit.
const FIXTURE_TIME_LIMIT: Duration = Duration::from_secs(1);
/// Criterion 4 wall-clock limit.
const AGREEMENT_TIME_LIMIT: Duration = Duration::from_secs(600);
/// Oracle-checked instances required per mode in criterion 4.
const AGREEMENT_INSTANCES: usize = 200;
/// Seeds tried per mode before criterion 4 gives up collecting.
const AGREEMENT_MAX_SEEDS: u64 = 600;
/// Step budget of each oracle search in criteria 4, 6 and 9.
const ORACLE_BUDGET: u64 = 20_000_000;
const BOUND_INSTANCES: u64 = 500;
const SCALE_INSTANCES: u64 = 200;
const DEGENERATE_INSTANCES: u64 = 100;
const ONE_SIDED_INSTANCES: u64 = 100;
const VARIANT_INSTANCES: u64 = 100;
const FIXPOINT_GAME_INSTANCES: u64 = 50;

const MODES: [BetaMode; 3] = [BetaMode::Bot, BetaMode::Top, BetaMode::Parity];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn fixture(name: &str) -> FairGame {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    format::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn oracle_cfg() -> OracleConfig {
    OracleConfig { step_budget: ORACLE_BUDGET, ..OracleConfig::default() }
}

fn show(r: &Regions) -> String {
    r.winners().iter().map(|p| if *p == Player::Exists { 'E' } else { 'A' }).collect()
}

/// Regions of every route, labelled.
fn all_routes(game: &FairGame) -> Vec<(&'static str, Result<Regions, String>)> {
    vec![
        ("reduction", reduction::solve_by_reduction(game).map_err(|e| e.to_string())),
        ("fixpoint", fixpoint::solve_fixpoint(game).map_err(|e| e.to_string())),
        ("oracle", oracle::oracle_solve(game).map_err(|e| e.to_string())),
    ]
}

fn criterion_fixtures() -> Verdict {
    let start = Instant::now();
    let expected = [
        ("g1.fg", Player::Exists),
        ("g2.fg", Player::Forall),
        ("g3.fg", Player::Forall),
        ("g4.fg", Player::Exists),
    ];
    let mut bad = Vec::new();
    let mut runs = 0;
    for (file, winner) in expected {
        let base = fixture(file);
        for mode in [BetaMode::Bot, BetaMode::Top] {
            let game = base.with_mode(mode);
            for (route, r) in all_routes(&game) {
                runs += 1;
                match r {
                    Ok(r) if r.winners().iter().all(|&p| p == winner) => {}
                    Ok(r) => bad.push(format!("{file}/{mode}/{route}={}", show(&r))),
                    Err(e) => bad.push(format!("{file}/{mode}/{route}: {e}")),
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed < FIXTURE_TIME_LIMIT;
    verdict(pass, format!("{runs} route runs, mismatches [{}], {elapsed:.2?} (limit {FIXTURE_TIME_LIMIT:?})", bad.join(", ")))
}

fn criterion_fig2() -> Verdict {
    let base = fixture("fig2.fg");
    let mut bad = Vec::new();
    let mut parity_odd = base.with_mode(BetaMode::Parity);
    parity_odd.beta = vec![1; base.len()];
    let mut parity_even = parity_odd.clone();
    parity_even.beta = vec![2; base.len()];
    let games = [
        ("bot", base.with_mode(BetaMode::Bot)),
        ("top", base.with_mode(BetaMode::Top)),
        ("parity-odd", parity_odd),
        ("parity-even", parity_even),
    ];
    let mut pinned = Vec::new();
    for (label, game) in &games {
        let oracle = match oracle::oracle_solve(game) {
            Ok(r) => r,
            Err(e) => return verdict(false, format!("{label}: oracle failed: {e}")),
        };
        if oracle.winner(0) != Player::Forall || oracle.winner(3) != Player::Exists {
            bad.push(format!("{label}: outer nodes {}", show(&oracle)));
        }
        let middle = match *label {
            "bot" => Some(Player::Forall),
            "top" => Some(Player::Exists),
            _ => None,
        };
        if let Some(m) = middle {
            if oracle.winner(1) != m || oracle.winner(2) != m {
                bad.push(format!("{label}: oracle middle nodes {}", show(&oracle)));
            }
        }
        for (route, r) in all_routes(game).into_iter().take(2) {
            match r {
                Ok(r) if r == oracle => {}
                Ok(r) => bad.push(format!("{label}/{route}={} vs oracle {}", show(&r), show(&oracle))),
                Err(e) => bad.push(format!("{label}/{route}: {e}")),
            }
        }
        pinned.push(format!("{label}={}", show(&oracle)));
    }
    verdict(bad.is_empty(), format!("oracle regions {}; mismatches [{}]", pinned.join(" "), bad.join(", ")))
}

fn criterion_bounds() -> Verdict {
    let reports: Vec<(GenConfig, reduction::BoundReport)> = (0..BOUND_INSTANCES)
        .into_par_iter()
        .map(|i| {
            let mode = if i % 2 == 0 { BetaMode::Bot } else { BetaMode::Parity };
            let mut cfg = GenConfig::new(1_000 + i, 1 + (i as usize / 2) % 20, mode);
            cfg.k = 1 + (i as u32 / 40) % 3;
            cfg.d = 1 + (i as u32 / 120) % 3;
            let game = generate(&cfg);
            let r = reduction::build(&game).expect("generated games reduce");
            (cfg, reduction::bounds(&r))
        })
        .collect();
    let mut text = Vec::new();
    for mode in [BetaMode::Bot, BetaMode::Parity] {
        let of_mode: Vec<_> = reports.iter().filter(|(c, _)| c.beta_mode == mode).collect();
        let node_viol: Vec<_> = of_mode.iter().filter(|(_, b)| b.nodes > b.node_bound).collect();
        let prio_viol = of_mode.iter().filter(|(_, b)| b.max_priority > b.priority_bound).count();
        let worst = node_viol
            .iter()
            .max_by_key(|(_, b)| b.nodes as i64 - b.node_bound as i64)
            .map(|(c, b)| format!(", worst seed {} n={} k={}: {}/{}", c.seed, c.n, c.k, b.nodes, b.node_bound))
            .unwrap_or_default();
        text.push(format!(
            "{mode}: {} instances, {} node-bound and {prio_viol} priority-bound violations{worst}",
            of_mode.len(),
            node_viol.len()
        ));
    }
    let pass = reports.iter().all(|(_, b)| b.holds());
    verdict(pass, text.join("; "))
}

fn agreement_config(seed: u64, mode: BetaMode) -> GenConfig {
    let mut cfg = GenConfig::new(seed, 2 + (seed as usize % 5), mode);
    cfg.k = 1 + (seed as u32 / 5) % 2;
    cfg.d = 2;
    cfg.max_fair_out = Some(2);
    cfg
}

/// Criterion 4 data: oracle-checked reports per mode, plus skipped seeds.
struct Agreement {
    reports: Vec<(BetaMode, Vec<(GenConfig, harness::InstanceReport)>)>,
    skipped: Vec<(BetaMode, usize)>,
    elapsed: Duration,
}

fn run_agreement() -> Agreement {
    let start = Instant::now();
    let opts = CheckOptions { oracle: true, strategies: true, oracle_budget: ORACLE_BUDGET, ..CheckOptions::default() };
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for mode in MODES {
        let mut kept = Vec::new();
        let mut skip = 0;
        let mut next = 0;
        while kept.len() < AGREEMENT_INSTANCES && next < AGREEMENT_MAX_SEEDS {
            let chunk: Vec<u64> = (next..(next + 50).min(AGREEMENT_MAX_SEEDS)).collect();
            next += chunk.len() as u64;
            let batch: Vec<_> = chunk
                .par_iter()
                .map(|&s| {
                    let cfg = agreement_config(s, mode);
                    (cfg, check_game(&generate(&cfg), s, &opts))
                })
                .collect();
            for (cfg, r) in batch {
                if kept.len() == AGREEMENT_INSTANCES {
                    break;
                }
                if r.oracle.is_some() {
                    kept.push((cfg, r));
                } else {
                    skip += 1;
                }
            }
        }
        reports.push((mode, kept));
        skipped.push((mode, skip));
    }
    Agreement { reports, skipped, elapsed: start.elapsed() }
}

fn criterion_agreement(a: &Agreement) -> Verdict {
    let mut text = Vec::new();
    let mut pass = a.elapsed <= AGREEMENT_TIME_LIMIT;
    for ((mode, kept), (_, skip)) in a.reports.iter().zip(&a.skipped) {
        let bad: Vec<String> = kept
            .iter()
            .filter(|(_, r)| !r.agree || r.errors.iter().any(|e| !e.starts_with("strategies")))
            .map(|(c, r)| format!("seed {} ({}/{}/{})", c.seed, r.reduction, r.fixpoint, r.oracle.as_deref().unwrap_or("-")))
            .collect();
        pass &= kept.len() >= AGREEMENT_INSTANCES && bad.is_empty();
        text.push(format!(
            "{mode}: {} agreeing of {} oracle-checked ({skip} over budget){}",
            kept.len() - bad.len(),
            kept.len(),
            if bad.is_empty() { String::new() } else { format!(", disagreements {}", bad.join(" ")) }
        ));
    }
    text.push(format!("limit {AGREEMENT_TIME_LIMIT:?}"));
    verdict(pass, text.join("; "))
}

fn criterion_strategies(a: &Agreement) -> Verdict {
    let mut text = Vec::new();
    let mut pass = true;
    let mut first_failure = None;
    for (mode, kept) in &a.reports {
        let ok = kept.iter().filter(|(_, r)| r.strategies_ok == Some(true)).count();
        let failed: Vec<&GenConfig> =
            kept.iter().filter(|(_, r)| r.strategies_ok == Some(false)).map(|(c, _)| c).collect();
        let unchecked = kept.iter().filter(|(_, r)| r.strategies_ok.is_none()).count();
        pass &= failed.is_empty() && unchecked == 0;
        if first_failure.is_none() {
            first_failure = failed.first().copied().copied();
        }
        text.push(format!(
            "{mode}: {ok} sound, {} losing{}, {unchecked} over budget",
            failed.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!(" (seeds {})", failed.iter().map(|c| c.seed.to_string()).collect::<Vec<_>>().join(","))
            }
        ));
    }
    let mut detail = text.join("; ");
    if let Some(cfg) = first_failure {
        let fails = |g: &FairGame| matches!(check_strategies(g, ORACLE_BUDGET), Ok(Some(false)));
        let small = harness::shrink(&generate(&cfg), &fails);
        detail += &format!("\n    shrunk counterexample from seed {}:\n    {}", cfg.seed, format::emit(&small).trim_end().replace('\n', "\n    "));
    }
    verdict(pass, detail)
}

fn criterion_scale() -> Verdict {
    let mut text = Vec::new();
    let mut pass = true;
    for mode in MODES {
        let bad: Vec<u64> = (0..SCALE_INSTANCES)
            .into_par_iter()
            .filter_map(|i| {
                let mut cfg = GenConfig::new(5_000 + i, 1 + (i as usize % 20), mode);
                cfg.k = 1 + (i as u32 / 20) % 3;
                cfg.d = 1 + (i as u32 / 60) % 3;
                let game = generate(&cfg);
                let red = reduction::solve_by_reduction(&game).ok()?;
                let fix = fixpoint::solve_fixpoint(&game).ok()?;
                (red != fix).then_some(cfg.seed)
            })
            .collect();
        pass &= bad.is_empty();
        text.push(format!("{mode}: {} of {SCALE_INSTANCES} agree{}", SCALE_INSTANCES as usize - bad.len(), list(&bad)));
    }
    verdict(pass, text.join("; "))
}

fn list(seeds: &[u64]) -> String {
    if seeds.is_empty() {
        String::new()
    } else {
        format!(" (failing seeds {seeds:?})")
    }
}

fn plain_zielonka(game: &FairGame) -> Regions {
    let a = &game.arena;
    let pg = ParityGame {
        owner: a.nodes().map(|v| a.owner(v)).collect(),
        succ: a.nodes().map(|v| a.succ(v).to_vec()).collect(),
        priority: game.alpha.clone(),
        edge_priority: None,
    };
    zielonka_solve(&pg).regions
}

fn criterion_degenerate() -> Verdict {
    let results: Vec<(u64, bool, bool)> = (0..DEGENERATE_INSTANCES)
        .into_par_iter()
        .map(|i| {
            let mut cfg = GenConfig::new(7_000 + i, 1 + (i as usize % 8), MODES[i as usize % 3]);
            cfg.fair_prob = 0.0;
            let game = generate(&cfg);
            let expected = plain_zielonka(&game);
            let mut ok = reduction::solve_by_reduction(&game).is_ok_and(|r| r == expected)
                && fixpoint::solve_fixpoint(&game).is_ok_and(|r| r == expected);
            let mut oracle_ran = false;
            match oracle::oracle_solve_with(&game, Family::for_mode(game.beta_mode), &oracle_cfg()) {
                Ok(r) => {
                    oracle_ran = true;
                    ok &= r == expected;
                }
                Err(OracleError::Intractable(_)) => {}
                Err(_) => ok = false,
            }
            (cfg.seed, ok, oracle_ran)
        })
        .collect();
    let bad: Vec<u64> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    let with_oracle = results.iter().filter(|r| r.2).count();
    verdict(
        bad.is_empty(),
        format!(
            "{} of {DEGENERATE_INSTANCES} match plain Zielonka on α (oracle included on {with_oracle}){}",
            results.len() - bad.len(),
            list(&bad)
        ),
    )
}

fn criterion_one_sided() -> Verdict {
    let bad: Vec<u64> = (0..ONE_SIDED_INSTANCES)
        .into_par_iter()
        .filter_map(|i| {
            let mut cfg = GenConfig::new(9_000 + i, 1 + (i as usize % 12), BetaMode::Bot);
            cfg.fair_owners = FairOwners::ForallOnly;
            let game = generate(&cfg);
            let top_game = game.with_mode(BetaMode::Top);
            let bot = fixpoint::solve_fixpoint(&game).ok()?;
            let top = fixpoint::solve_fixpoint(&top_game).ok()?;
            let red_bot = reduction::solve_by_reduction(&game).ok()?;
            let red_top = reduction::solve_by_reduction(&top_game).ok()?;
            (bot != top || bot != red_bot || top != red_top).then_some(cfg.seed)
        })
        .collect();
    verdict(
        bad.is_empty(),
        format!("{} of {ONE_SIDED_INSTANCES} ∀-fair-only games: bot = top = reduction{}", ONE_SIDED_INSTANCES as usize - bad.len(), list(&bad)),
    )
}

fn criterion_variants() -> Verdict {
    let bad: Vec<u64> = (0..VARIANT_INSTANCES)
        .into_par_iter()
        .filter_map(|i| {
            let mut cfg = GenConfig::new(11_000 + i, 1 + (i as usize % 12), BetaMode::Bot);
            cfg.k = 1 + (i as u32 / 12) % 3;
            let game = generate(&cfg);
            let solve = |v| {
                let r = reduction::build_parity_bot(&game, v).expect("bot game");
                reduction::project_regions(&r, &zielonka_solve(&r.parity).regions)
            };
            (solve(Variant::Existential) != solve(Variant::Universal)).then_some(cfg.seed)
        })
        .collect();
    verdict(
        bad.is_empty(),
        format!("{} of {VARIANT_INSTANCES} existential/universal gadget pairs agree{}", VARIANT_INSTANCES as usize - bad.len(), list(&bad)),
    )
}

fn criterion_fixpoint_game() -> Verdict {
    let results: Vec<(u64, Result<bool, String>)> = (0..FIXPOINT_GAME_INSTANCES)
        .into_par_iter()
        .map(|i| {
            let mut cfg = GenConfig::new(13_000 + i, 1 + (i as usize % 5), BetaMode::Bot);
            cfg.k = 1 + (i as u32 / 5) % 2;
            let game = generate(&cfg);
            let r = build_fixpoint_game(&game, fixpoint::DEFAULT_FIXPOINT_GAME_CAP)
                .map_err(|e| e.to_string())
                .and_then(|fg| Ok(solve_fixpoint_game(&fg) == solve_fixpoint_bot(&game).map_err(|e| e.to_string())?));
            (cfg.seed, r)
        })
        .collect();
    let bad: Vec<String> = results
        .iter()
        .filter_map(|(s, r)| match r {
            Ok(true) => None,
            Ok(false) => Some(format!("{s}")),
            Err(e) => Some(format!("{s}: {e}")),
        })
        .collect();
    verdict(
        bad.is_empty(),
        format!("{} of {FIXPOINT_GAME_INSTANCES} fixpoint games agree with the nested fixpoint [{}]", results.len() - bad.len(), bad.join(", ")),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &dyn Fn() -> Verdict| {
        let start = Instant::now();
        let v = f();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {status} [{name}, {:.1?}] {}", start.elapsed(), v.detail);
        if !v.pass {
            failed += 1;
        }
    };
    report(1, "paper fixtures", &criterion_fixtures);
    report(2, "division example", &criterion_fig2);
    report(3, "reduction size bounds", &criterion_bounds);
    let agreement = OnceCell::new();
    report(4, "three-way agreement", &|| criterion_agreement(agreement.get_or_init(run_agreement)));
    report(5, "reduction vs fixpoint at scale", &criterion_scale);
    report(6, "no fair edges", &criterion_degenerate);
    report(7, "one-sided fairness", &criterion_one_sided);
    report(8, "gadget variants", &criterion_variants);
    report(9, "strategy soundness", &|| criterion_strategies(agreement.get_or_init(run_agreement)));
    report(10, "fixpoint game backend", &criterion_fixpoint_game);
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
