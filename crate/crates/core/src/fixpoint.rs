//! Winning regions as nested fixpoints, and the equivalent fixpoint game.
//!
//! Variables `X_1 .. X_o` alternate between least (odd index) and greatest
//! (even index) fixpoints, `X_o` outermost. Evaluation is plain
//! Knaster-Tarski iteration: least fixpoints start from the empty set,
//! greatest ones from the full carrier, and inner variables restart on every
//! outer step.

use thiserror::Error;

use crate::arena::{BetaMode, FairArena, FairGame, NodeId, Player};
use crate::nodeset::NodeSet;
use crate::paritygame::{lower_edge_priorities, zielonka_solve, ParityGame, Regions};
use crate::strategy::{KeySpace, Memory, MemoryRule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FixpointError {
    #[error("wrong mode: expected {expected}, found {found}")]
    WrongMode { expected: BetaMode, found: BetaMode },
    #[error("fixpoint game too large: {nodes} nodes > cap {cap}")]
    TooLarge { nodes: usize, cap: usize },
}

fn check_mode(game: &FairGame, expected: BetaMode) -> Result<(), FixpointError> {
    if game.beta_mode != expected {
        return Err(FixpointError::WrongMode { expected, found: game.beta_mode });
    }
    Ok(())
}

fn any_in(ws: &[NodeId], x: &NodeSet) -> bool {
    ws.iter().any(|&w| x.contains(w))
}

fn all_in(ws: &[NodeId], x: &NodeSet) -> bool {
    ws.iter().all(|&w| x.contains(w))
}

fn collect(n: usize, pred: impl Fn(NodeId) -> bool) -> NodeSet {
    NodeSet::from_iter(n, (0..n).filter(|&v| pred(v)))
}

/// Nodes from which the owner can force a move into `x`.
pub fn cpre(arena: &FairArena, x: &NodeSet) -> NodeSet {
    collect(arena.len(), |v| match arena.owner(v) {
        Player::Exists => any_in(arena.succ(v), x),
        Player::Forall => all_in(arena.succ(v), x),
    })
}

/// `⋄X ∩ □_f Y`: some successor in `x` and every fair successor in `y`.
pub fn apre_exists(arena: &FairArena, x: &NodeSet, y: &NodeSet) -> NodeSet {
    collect(arena.len(), |v| any_in(arena.succ(v), x) && all_in(arena.fair_succ(v), y))
}

/// `⋄_f X ∩ □Y`: some fair successor in `x` and every successor in `y`.
pub fn apre_forall(arena: &FairArena, x: &NodeSet, y: &NodeSet) -> NodeSet {
    collect(arena.len(), |v| any_in(arena.fair_succ(v), x) && all_in(arena.succ(v), y))
}

/// Number of fixpoint variables of the bot expression.
pub fn bot_arity(game: &FairGame) -> usize {
    2 * game.k() as usize + 1
}

/// The bot functional; `xs[i - 1]` is the argument `X_i`, `i = 1 ..= 2k+1`.
pub fn chi_bot(game: &FairGame, xs: &[NodeSet]) -> NodeSet {
    let a = &game.arena;
    let k2 = 2 * game.k();
    let x = |i: u32| &xs[i as usize - 1];
    collect(game.len(), |v| {
        let p = game.alpha[v];
        let (all, fair) = (a.succ(v), a.fair_succ(v));
        if fair.is_empty() {
            return match a.owner(v) {
                Player::Exists => any_in(all, x(p)),
                Player::Forall => all_in(all, x(p)),
            };
        }
        let lo = if p % 2 == 1 { p } else { p + 1 };
        match a.owner(v) {
            Player::Exists => {
                (lo..k2).step_by(2).any(|i| any_in(all, x(i)) && all_in(fair, x(i + 1)))
                    || any_in(all, x(k2 + 1))
                    || (p.is_multiple_of(2) && all_in(fair, x(p)))
            }
            Player::Forall => {
                (lo..k2).step_by(2).any(|i| any_in(fair, x(i)) && all_in(all, x(i + 1)))
                    || (p.is_multiple_of(2) && all_in(all, x(p)))
            }
        }
    })
}

/// Statistics of a nested evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    pub applications: u64,
}

/// Evaluates `σX_o ... μX_1. f(X_1..X_o)` over a carrier of size `n`.
pub fn nested_fixpoint(n: usize, arity: usize, f: &dyn Fn(&[NodeSet]) -> NodeSet) -> (NodeSet, EvalStats) {
    let mut xs = vec![NodeSet::empty(n); arity];
    let mut stats = EvalStats::default();
    let value = eval_level(arity, n, &mut xs, f, &mut stats);
    (value, stats)
}

fn eval_level(j: usize, n: usize, xs: &mut [NodeSet], f: &dyn Fn(&[NodeSet]) -> NodeSet, stats: &mut EvalStats) -> NodeSet {
    if j == 0 {
        stats.applications += 1;
        return f(xs);
    }
    let mut cur = if j % 2 == 1 { NodeSet::empty(n) } else { NodeSet::full(n) };
    loop {
        xs[j - 1] = cur.clone();
        let next = eval_level(j - 1, n, xs, f, stats);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Regions of a bot game from the nested fixpoint.
pub fn solve_fixpoint_bot(game: &FairGame) -> Result<Regions, FixpointError> {
    check_mode(game, BetaMode::Bot)?;
    let (win, _) = nested_fixpoint(game.len(), bot_arity(game), &|xs| chi_bot(game, xs));
    Ok(Regions::from_exists(game.len(), &win))
}

/// Regions of a top game: the complement of the bot solution of the dual game.
pub fn solve_fixpoint_top(game: &FairGame) -> Result<Regions, FixpointError> {
    check_mode(game, BetaMode::Top)?;
    let dual = solve_fixpoint_bot(&game.dual())?;
    Ok(Regions { win_exists: dual.win_forall, win_forall: dual.win_exists })
}

/// Solves a game by the fixpoint route appropriate for its mode.
pub fn solve_fixpoint(game: &FairGame) -> Result<Regions, FixpointError> {
    match game.beta_mode {
        BetaMode::Bot => solve_fixpoint_bot(game),
        BetaMode::Top => solve_fixpoint_top(game),
        BetaMode::Parity => solve_fixpoint_parity(game),
    }
}

/// Carrier `V × [d] × {∃,∀}` with memory-updating successor relations.
pub struct AnnotatedCarrier {
    pub keys: KeySpace,
    /// Successors `(w, max(p, Γ(v)), b)` over all edges.
    pub all: Vec<Vec<usize>>,
    /// The same restricted to fair edges.
    pub fair: Vec<Vec<usize>>,
    /// Committing move of ∃: `(w, max(p,Γ(v)), ∃)` if `b = ∃`, `(w, Γ(v), ∃)` if `b = ∀`.
    pub reset: Vec<Vec<usize>>,
    /// Committing move of ∀: `(w, max(p, Γ(v)), ∀)`.
    pub to_forall: Vec<Vec<usize>>,
}

impl AnnotatedCarrier {
    pub fn new(game: &FairGame) -> Self {
        let keys = KeySpace::new(game, MemoryRule::Annotated);
        let size = keys.size();
        let mut c = AnnotatedCarrier {
            keys,
            all: vec![Vec::new(); size],
            fair: vec![Vec::new(); size],
            reset: vec![Vec::new(); size],
            to_forall: vec![Vec::new(); size],
        };
        for x in 0..size {
            let (v, m) = keys.decode(x);
            let gamma = game.beta[v];
            let stepped = Memory { p: m.p.max(gamma), b: m.b };
            let map = |ws: &[NodeId], to: Memory| ws.iter().map(|&w| keys.key(w, to)).collect::<Vec<_>>();
            c.all[x] = map(game.arena.succ(v), stepped);
            c.fair[x] = map(game.arena.fair_succ(v), stepped);
            let reset_to = match m.b {
                Player::Exists => Memory { p: stepped.p, b: Player::Exists },
                Player::Forall => Memory { p: gamma, b: Player::Exists },
            };
            c.reset[x] = map(game.arena.succ(v), reset_to);
            c.to_forall[x] = map(game.arena.succ(v), Memory { p: stepped.p, b: Player::Forall });
        }
        c
    }

    pub fn size(&self) -> usize {
        self.keys.size()
    }
}

/// The rightmost branch of existential gadgets: tuples `(v,p,b)` with a move
/// into `X_{2k+1}` keeping `p` when `b = ∃`, or into `X_{2k+p}` restarting
/// the memory at `Γ(v)` when `b = ∀`. `top[j - 1]` is `X_{2k+j}`.
pub fn odot(_game: &FairGame, carrier: &AnnotatedCarrier, top: &[NodeSet]) -> NodeSet {
    collect(carrier.size(), |x| {
        let (_, m) = carrier.keys.decode(x);
        let target = match m.b {
            Player::Exists => &top[0],
            Player::Forall => &top[m.p as usize - 1],
        };
        any_in(&carrier.reset[x], target)
    })
}

/// Number of fixpoint variables of the parity expression.
pub fn parity_arity(game: &FairGame) -> usize {
    2 * game.k() as usize + game.d() as usize
}

/// The parity functional over the annotated carrier; `xs[i - 1]` is `X_i`,
/// `i = 1 ..= 2k+d`.
pub fn chi_parity(game: &FairGame, carrier: &AnnotatedCarrier, xs: &[NodeSet]) -> NodeSet {
    let a = &game.arena;
    let k = game.k();
    let x = |i: u32| &xs[i as usize - 1];
    let right = odot(game, carrier, &xs[2 * k as usize..]);
    collect(carrier.size(), |c| {
        let (v, _) = carrier.keys.decode(c);
        let lam = game.alpha[v];
        let at = |i: u32| x(lam.max(i));
        let (all, fair) = (&carrier.all[c], &carrier.fair[c]);
        if !a.is_fair_node(v) {
            return match a.owner(v) {
                Player::Exists => any_in(all, at(lam)),
                Player::Forall => all_in(all, at(lam)),
            };
        }
        match a.owner(v) {
            Player::Exists => {
                (1..=k).any(|i| any_in(all, at(2 * i - 1)) && all_in(fair, at(2 * i))) || right.contains(c)
            }
            Player::Forall => {
                any_in(fair, at(1))
                    && (2..=k).all(|i| all_in(all, at(2 * i - 2)) || any_in(fair, at(2 * i - 1)))
                    && all_in(&carrier.to_forall[c], at(2 * k))
            }
        }
    })
}

/// Regions of a parity-mode game, read at the annotated nodes `(v,1,∃)`.
pub fn solve_fixpoint_parity(game: &FairGame) -> Result<Regions, FixpointError> {
    check_mode(game, BetaMode::Parity)?;
    let carrier = AnnotatedCarrier::new(game);
    let (win, _) = nested_fixpoint(carrier.size(), parity_arity(game), &|xs| chi_parity(game, &carrier, xs));
    let winners: Vec<Player> = game
        .arena
        .nodes()
        .map(|v| if win.contains(carrier.keys.key(v, Memory::INITIAL)) { Player::Exists } else { Player::Forall })
        .collect();
    Ok(Regions::from_winners(&winners))
}

/// The fixpoint game of the bot functional over a finite move family.
#[derive(Clone, Debug)]
pub struct FixpointGame {
    /// Edge-priority game: nodes `0..n` are the carrier (∃), then one ∀ node
    /// per tuple with one edge per component and member, carrying the
    /// component index; then a sink lost by ∃ and a sink won by ∃.
    pub game: ParityGame,
    pub tuples: Vec<Vec<NodeSet>>,
    pub carrier: usize,
}

pub const DEFAULT_FIXPOINT_GAME_CAP: usize = 6;

/// Tuples `(Z_1..Z_o)` the existential player needs: for every node the
/// argument patterns its own clause of the functional reads.
pub fn economical_tuples(game: &FairGame) -> Vec<Vec<NodeSet>> {
    let a = &game.arena;
    let n = game.len();
    let o = bot_arity(game);
    let k2 = 2 * game.k();
    let mut out: Vec<Vec<NodeSet>> = Vec::new();
    let mut push = |parts: &[(u32, Vec<NodeId>)]| {
        let mut z = vec![NodeSet::empty(n); o];
        for (i, ws) in parts {
            for &w in ws {
                z[*i as usize - 1].insert(w);
            }
        }
        if !out.contains(&z) {
            out.push(z);
        }
    };
    for v in a.nodes() {
        let p = game.alpha[v];
        let (all, fair) = (a.succ(v).to_vec(), a.fair_succ(v).to_vec());
        if fair.is_empty() {
            push(&[(p, all.clone())]);
            for &w in &all {
                push(&[(p, vec![w])]);
            }
            continue;
        }
        let lo = if p % 2 == 1 { p } else { p + 1 };
        match a.owner(v) {
            Player::Exists => {
                for i in (lo..k2).step_by(2) {
                    for &w in &all {
                        push(&[(i, vec![w]), (i + 1, fair.clone())]);
                    }
                }
                for &w in &all {
                    push(&[(k2 + 1, vec![w])]);
                }
                if p.is_multiple_of(2) {
                    push(&[(p, fair.clone())]);
                }
            }
            Player::Forall => {
                for i in (lo..k2).step_by(2) {
                    for &w in &fair {
                        push(&[(i, vec![w]), (i + 1, all.clone())]);
                    }
                }
                if p.is_multiple_of(2) {
                    push(&[(p, all.clone())]);
                }
            }
        }
    }
    out
}

/// Builds the fixpoint game of a bot game with at most `cap` nodes.
pub fn build_fixpoint_game(game: &FairGame, cap: usize) -> Result<FixpointGame, FixpointError> {
    check_mode(game, BetaMode::Bot)?;
    let n = game.len();
    if n > cap {
        return Err(FixpointError::TooLarge { nodes: n, cap });
    }
    let tuples = economical_tuples(game);
    let sink = n + tuples.len();
    let good = sink + 1;
    let mut owner = vec![Player::Exists; n];
    owner.extend(std::iter::repeat_n(Player::Forall, tuples.len() + 2));
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); good + 1];
    let mut eprio: Vec<Vec<u32>> = vec![Vec::new(); good + 1];
    for (t, z) in tuples.iter().enumerate() {
        let chi = chi_bot(game, z);
        for v in chi.iter() {
            succ[v].push(n + t);
            eprio[v].push(0);
        }
        // ∀ picks both the successor and a component containing it.
        for (i, zi) in z.iter().enumerate() {
            for w in zi.iter() {
                succ[n + t].push(w);
                eprio[n + t].push(i as u32 + 1);
            }
        }
        // An all-empty tuple leaves ∀ without a move.
        if succ[n + t].is_empty() {
            succ[n + t].push(good);
            eprio[n + t].push(0);
        }
    }
    for v in 0..n {
        if succ[v].is_empty() {
            succ[v].push(sink);
            eprio[v].push(0);
        }
    }
    succ[sink].push(sink);
    eprio[sink].push(1);
    succ[good].push(good);
    eprio[good].push(2);
    let game = ParityGame { owner, succ, priority: vec![0; good + 1], edge_priority: Some(eprio) };
    Ok(FixpointGame { game, tuples, carrier: n })
}

/// Solves the fixpoint game and reads the winners of the carrier.
pub fn solve_fixpoint_game(fg: &FixpointGame) -> Regions {
    let lowered = lower_edge_priorities(&fg.game);
    let sol = zielonka_solve(&lowered.game);
    let winners: Vec<Player> = (0..fg.carrier).map(|v| sol.regions.winner(v)).collect();
    Regions::from_winners(&winners)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse;

    const G1: &str = "fairgame 2 bot; 0 1 3 0 0,1 1; 1 0 4 0 0 -;";

    #[test]
    fn cpre_on_g1() {
        let g = parse(G1).unwrap();
        let a = &g.arena;
        assert!(cpre(a, &NodeSet::empty(2)).is_empty());
        assert_eq!(cpre(a, &NodeSet::full(2)).len(), 2);
        assert!(cpre(a, &NodeSet::from_iter(2, [1])).is_empty());
    }

    #[test]
    fn apre_edge_cases() {
        let g = parse(G1).unwrap();
        let a = &g.arena;
        assert!(apre_exists(a, &NodeSet::empty(2), &NodeSet::full(2)).is_empty());
        // ⋄_f needs a fair successor: only the fair node qualifies.
        assert_eq!(apre_forall(a, &NodeSet::full(2), &NodeSet::full(2)).to_vec(), vec![0]);
        assert_eq!(apre_exists(a, &NodeSet::full(2), &NodeSet::full(2)).len(), 2);
    }

    #[test]
    fn chi_bot_extremes() {
        let g = parse(G1).unwrap();
        let o = bot_arity(&g);
        assert!(chi_bot(&g, &vec![NodeSet::empty(2); o]).is_empty());
        assert_eq!(chi_bot(&g, &vec![NodeSet::full(2); o]).len(), 2);
    }

    #[test]
    fn g1_fixpoint() {
        let g = parse(G1).unwrap();
        assert_eq!(solve_fixpoint_bot(&g).unwrap().win_exists, vec![0, 1]);
        let fg = build_fixpoint_game(&g, DEFAULT_FIXPOINT_GAME_CAP).unwrap();
        assert_eq!(solve_fixpoint_game(&fg).win_exists, vec![0, 1]);
    }

    #[test]
    fn self_loop_fixpoint_games() {
        for fair in ["-", "0"] {
            for (p, w) in [(2, Player::Exists), (1, Player::Forall)] {
                let g = parse(&format!("fairgame 1 bot; 0 0 {p} 0 0 {fair};")).unwrap();
                let fg = build_fixpoint_game(&g, 6).unwrap();
                assert_eq!(solve_fixpoint_game(&fg).winner(0), w, "priority {p}, fair {fair}");
            }
        }
    }

    #[test]
    fn fixpoint_game_cap() {
        let g = parse(G1).unwrap();
        assert_eq!(build_fixpoint_game(&g, 1).unwrap_err(), FixpointError::TooLarge { nodes: 2, cap: 1 });
    }

    #[test]
    fn odot_extremes() {
        let g = parse("fairgame 2 parity; 0 1 3 1 0,1 1; 1 0 4 2 0 -;").unwrap();
        let c = AnnotatedCarrier::new(&g);
        let d = g.d() as usize;
        assert!(odot(&g, &c, &vec![NodeSet::empty(c.size()); d]).is_empty());
        assert_eq!(odot(&g, &c, &vec![NodeSet::full(c.size()); d]).len(), c.size());
    }
}
