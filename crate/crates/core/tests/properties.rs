use proptest::prelude::*;

use fairgame::fixpoint::{self, chi_bot};
use fairgame::format;
use fairgame::harness::{generate, GenConfig};
use fairgame::nodeset::NodeSet;
use fairgame::paritygame::{attractor, zielonka_solve};
use fairgame::reduction;
use fairgame::{BetaMode, FairGame, Lasso, Player};

fn mode() -> impl Strategy<Value = BetaMode> {
    prop_oneof![Just(BetaMode::Bot), Just(BetaMode::Top), Just(BetaMode::Parity)]
}

fn game_in(mode: impl Strategy<Value = BetaMode>) -> impl Strategy<Value = FairGame> {
    (any::<u64>(), 1usize..8, 1u32..3, 1u32..3, mode, 0.1f64..0.9, 0.0f64..1.0).prop_map(
        |(seed, n, k, d, mode, density, fair_prob)| {
            let mut cfg = GenConfig::new(seed, n, mode);
            cfg.k = k;
            cfg.d = d;
            cfg.density = density;
            cfg.fair_prob = fair_prob;
            generate(&cfg)
        },
    )
}

fn subset(n: usize, bits: u64) -> NodeSet {
    NodeSet::from_iter(n, (0..n).filter(|v| bits >> v & 1 == 1))
}

/// Some lasso of `g` from node `v0`: follow successor indices from `picks`
/// until a node repeats.
fn walk(g: &FairGame, v0: usize, picks: &[usize]) -> Lasso {
    let mut path = vec![v0];
    let mut i = 0;
    loop {
        let v = *path.last().unwrap();
        let s = g.arena.succ(v);
        let w = s[picks.get(i).copied().unwrap_or(0) % s.len()];
        i += 1;
        if let Some(at) = path.iter().position(|&u| u == w) {
            return Lasso::new(path[..at].to_vec(), path[at..].to_vec());
        }
        path.push(w);
    }
}

proptest! {
    #[test]
    fn emit_then_parse_is_identity(g in game_in(mode())) {
        prop_assert!(g.validate().is_empty());
        let back = format::parse(&format::emit(&g)).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn pgsolver_round_trip(g in game_in(mode())) {
        let r = reduction::build(&g).unwrap();
        let labels = r.labels();
        let (pg, names) = format::parse_pgsolver(&format::emit_pgsolver(&r.parity, &labels)).unwrap();
        prop_assert_eq!(pg, r.parity);
        prop_assert_eq!(names, labels.into_iter().map(Some).collect::<Vec<_>>());
    }

    #[test]
    fn generator_is_deterministic(seed in any::<u64>(), n in 1usize..10, m in mode()) {
        let cfg = GenConfig::new(seed, n, m);
        let g = generate(&cfg);
        prop_assert!(g.validate().is_empty());
        prop_assert_eq!(g, generate(&cfg));
    }

    #[test]
    fn rotating_the_cycle_keeps_the_winner(
        g in game_in(mode()),
        picks in prop::collection::vec(any::<usize>(), 0..12),
        by in 0usize..8,
    ) {
        let lasso = walk(&g, 0, &picks);
        let turned = lasso.rotated(by);
        prop_assert_eq!(g.play_winner(&turned).unwrap(), g.play_winner(&lasso).unwrap());
        for p in [Player::Exists, Player::Forall] {
            prop_assert_eq!(g.arena.is_fair_for(&turned, p).unwrap(), g.arena.is_fair_for(&lasso, p).unwrap());
        }
    }

    #[test]
    fn attractor_is_monotone_and_idempotent(g in game_in(mode()), a in any::<u64>(), b in any::<u64>()) {
        let pg = reduction::build(&g.with_mode(BetaMode::Bot)).unwrap().parity;
        let n = pg.len();
        let small = subset(n, a & b);
        let big = subset(n, a);
        for p in [Player::Exists, Player::Forall] {
            let at_small = attractor(&pg, &small, p);
            let at_big = attractor(&pg, &big, p);
            prop_assert!(small.is_subset(&at_small));
            prop_assert!(at_small.is_subset(&at_big));
            prop_assert_eq!(attractor(&pg, &at_big, p), at_big);
        }
    }

    #[test]
    fn zielonka_regions_partition_the_nodes(g in game_in(mode())) {
        let pg = reduction::build(&g).unwrap().parity;
        let sol = zielonka_solve(&pg);
        let (e, a) = (sol.regions.region(Player::Exists), sol.regions.region(Player::Forall));
        prop_assert_eq!(e.len() + a.len(), pg.len());
        prop_assert!(e.iter().all(|v| !a.contains(v)));
    }

    #[test]
    fn bot_functional_is_monotone(
        g in game_in(Just(BetaMode::Bot)),
        lo in prop::collection::vec(any::<u64>(), 5),
        extra in prop::collection::vec(any::<u64>(), 5),
    ) {
        let arity = fixpoint::bot_arity(&g);
        let n = g.len();
        let small: Vec<NodeSet> = (0..arity).map(|i| subset(n, lo[i])).collect();
        let big: Vec<NodeSet> = (0..arity).map(|i| subset(n, lo[i] | extra[i])).collect();
        prop_assert!(chi_bot(&g, &small).is_subset(&chi_bot(&g, &big)));
    }

    #[test]
    fn top_is_at_least_as_good_for_exists(g in game_in(Just(BetaMode::Bot))) {
        let bot = reduction::solve_by_reduction(&g).unwrap();
        let top = reduction::solve_by_reduction(&g.with_mode(BetaMode::Top)).unwrap();
        for &v in bot.region(Player::Exists) {
            prop_assert_eq!(top.winner(v), Player::Exists);
        }
    }

    #[test]
    fn dual_swaps_the_regions(g in game_in(prop_oneof![Just(BetaMode::Bot), Just(BetaMode::Top)])) {
        let r = reduction::solve_by_reduction(&g).unwrap();
        let d = reduction::solve_by_reduction(&g.dual()).unwrap();
        for v in 0..g.len() {
            prop_assert_eq!(d.winner(v), r.winner(v).opponent());
        }
        // Dualising twice shifts α by two, which keeps every parity.
        prop_assert_eq!(reduction::solve_by_reduction(&g.dual().dual()).unwrap(), r);
    }

    #[test]
    fn parity_with_odd_beta_matches_bot(g in game_in(Just(BetaMode::Bot))) {
        let mut p = g.with_mode(BetaMode::Parity);
        p.beta = vec![1; p.len()];
        prop_assert_eq!(reduction::solve_by_reduction(&p).unwrap(), reduction::solve_by_reduction(&g).unwrap());
    }

    #[test]
    fn parsers_survive_edited_input(
        g in game_in(mode()),
        cut in any::<prop::sample::Index>(),
        junk in "[ -~\n]{0,6}",
    ) {
        let text = format::emit(&g);
        let at = cut.index(text.len() + 1);
        let edited = format!("{}{junk}{}", &text[..at], &text[at..]);
        if let Ok(h) = format::parse(&edited) {
            prop_assert!(h.validate().is_empty());
        }
        let pg = format::emit_pgsolver(&reduction::build(&g).unwrap().parity, &[]);
        let at = cut.index(pg.len() + 1);
        let _ = format::parse_pgsolver(&format!("{}{junk}{}", &pg[..at], &pg[at..]));
    }
}
