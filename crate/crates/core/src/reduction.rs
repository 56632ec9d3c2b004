//! Gadget reductions from fair games to ordinary parity games, projection of
//! the solved regions and lifting of positional strategies to cycling ones.
//!
//! Every fair node is replaced by a three level gadget: the root keeps the
//! node's priority, the branch level lets one player bid a priority and the
//! out level either hands the move back to the node's owner (control nodes,
//! successors `E(v)`) or makes the opponent pick a fair edge (fair nodes,
//! successors `E_f(v)`).

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::arena::{BetaMode, FairGame, NodeId, Player};
use crate::paritygame::{zielonka_solve, ParityGame, PositionalStrategy, Regions};
use crate::strategy::{Choice, CyclingStrategy, Memory, MemoryRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Root owned by the fair node's owner in bot mode; branches trimmed from λ↓(v).
    Existential,
    /// Root owned by the universal player; full branch range.
    Universal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GadgetTag {
    Base,
    Branch(u32),
    OutOdd(u32),
    OutEven(u32),
}

impl GadgetTag {
    fn out(priority: u32) -> GadgetTag {
        if priority % 2 == 1 {
            GadgetTag::OutOdd(priority)
        } else {
            GadgetTag::OutEven(priority)
        }
    }
}

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("wrong mode: expected {expected}, found {found}")]
    WrongMode { expected: BetaMode, found: BetaMode },
    #[error("positional strategy undefined at reduced node {0}")]
    Uncovered(usize),
    #[error("strategy lifting is not supported for the universal gadget variant")]
    UnsupportedVariant,
}

/// A parity game produced by one of the reductions together with the
/// bookkeeping needed to read results back.
#[derive(Clone, Debug)]
pub struct ReducedGame {
    pub parity: ParityGame,
    pub source: FairGame,
    pub variant: Variant,
    /// Original node each reduced node belongs to.
    pub origin: Vec<NodeId>,
    /// Memory of annotated base nodes and their gadgets (parity mode).
    pub memory: Vec<Option<Memory>>,
    pub tag: Vec<GadgetTag>,
    /// Reduced id of the base node `v` (bot/top) or `(v,1,∃)` (parity).
    pub seeds: Vec<usize>,
}

impl ReducedGame {
    pub fn len(&self) -> usize {
        self.parity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parity.is_empty()
    }

    /// Human readable node names, as used in PGSolver output.
    pub fn labels(&self) -> Vec<String> {
        (0..self.len())
            .map(|x| {
                let v = self.source.display_name(self.origin[x]);
                let v = match self.memory[x] {
                    Some(m) => {
                        let b = if m.b == Player::Exists { 'E' } else { 'A' };
                        format!("({v},{},{b})", m.p)
                    }
                    None => v,
                };
                match self.tag[x] {
                    GadgetTag::Base => v,
                    GadgetTag::Branch(i) => format!("{v}^b,{i}"),
                    GadgetTag::OutOdd(i) | GadgetTag::OutEven(i) => format!("{v}^out,{i}"),
                }
            })
            .collect()
    }

    /// Number of reduced nodes that stem from original node `v`.
    pub fn nodes_of(&self, v: NodeId) -> usize {
        self.origin.iter().filter(|&&o| o == v).count()
    }
}

struct Builder {
    owner: Vec<Player>,
    priority: Vec<u32>,
    succ: Vec<Vec<usize>>,
    origin: Vec<NodeId>,
    memory: Vec<Option<Memory>>,
    tag: Vec<GadgetTag>,
}

impl Builder {
    fn new() -> Self {
        Builder { owner: vec![], priority: vec![], succ: vec![], origin: vec![], memory: vec![], tag: vec![] }
    }

    fn node(&mut self, owner: Player, priority: u32, tag: GadgetTag, origin: NodeId, memory: Option<Memory>) -> usize {
        self.owner.push(owner);
        self.priority.push(priority);
        self.succ.push(Vec::new());
        self.origin.push(origin);
        self.memory.push(memory);
        self.tag.push(tag);
        self.owner.len() - 1
    }

    fn finish(mut self, source: &FairGame, variant: Variant, seeds: Vec<usize>) -> ReducedGame {
        for s in &mut self.succ {
            s.sort_unstable();
            s.dedup();
        }
        ReducedGame {
            parity: ParityGame { owner: self.owner, succ: self.succ, priority: self.priority, edge_priority: None },
            source: source.clone(),
            variant,
            origin: self.origin,
            memory: self.memory,
            tag: self.tag,
            seeds,
        }
    }
}

fn check_mode(game: &FairGame, expected: BetaMode) -> Result<(), ReductionError> {
    if game.beta_mode != expected {
        return Err(ReductionError::WrongMode { expected, found: game.beta_mode });
    }
    Ok(())
}

/// Reduction for games whose mutually unfair plays are lost by ∃.
pub fn build_parity_bot(game: &FairGame, variant: Variant) -> Result<ReducedGame, ReductionError> {
    check_mode(game, BetaMode::Bot)?;
    Ok(bot_gadgets(game, variant))
}

fn bot_gadgets(game: &FairGame, variant: Variant) -> ReducedGame {
    let a = &game.arena;
    let k = game.k();
    let n = game.len();
    let mut b = Builder::new();
    for v in a.nodes() {
        let root_owner = match (variant, a.is_fair_node(v)) {
            (_, false) => a.owner(v),
            (Variant::Existential, true) => Player::Exists,
            (Variant::Universal, true) => Player::Forall,
        };
        b.node(root_owner, game.alpha[v], GadgetTag::Base, v, None);
    }
    for v in a.nodes() {
        if !a.is_fair_node(v) {
            b.succ[v] = a.succ(v).to_vec();
            continue;
        }
        let owner = a.owner(v);
        // Out-node successors: the owner's own choice or a fair choice.
        let control = a.succ(v).to_vec();
        let fair = a.fair_succ(v).to_vec();
        let out_succ = |owned_by: Player| if owned_by == owner { control.clone() } else { fair.clone() };
        match variant {
            Variant::Existential => {
                let lam = game.alpha[v];
                let lo = if lam % 2 == 1 { lam } else { lam - 1 };
                let hi = if owner == Player::Exists { 2 * k + 1 } else { 2 * k - 1 };
                for i in (lo..=hi).step_by(2) {
                    let br = b.node(Player::Forall, i, GadgetTag::Branch(i), v, None);
                    b.succ[v].push(br);
                    let outs: &[u32] = if i == 2 * k + 1 { &[i] } else { &[i, i + 1] };
                    for &j in outs {
                        let o = if j % 2 == 1 { Player::Exists } else { Player::Forall };
                        let out = b.node(o, j, GadgetTag::out(j), v, None);
                        b.succ[out] = out_succ(o);
                        b.succ[br].push(out);
                    }
                }
            }
            Variant::Universal => {
                for j in (0..=2 * k).step_by(2) {
                    let br = b.node(Player::Exists, j.max(1), GadgetTag::Branch(j), v, None);
                    b.succ[v].push(br);
                    // Universal out nodes carry even priorities, existential ones odd.
                    let mut outs = Vec::new();
                    if j >= 2 {
                        outs.push((Player::Forall, j));
                    }
                    if owner == Player::Exists || j < 2 * k {
                        outs.push((Player::Exists, j + 1));
                    }
                    for (o, p) in outs {
                        let out = b.node(o, p, GadgetTag::out(p), v, None);
                        b.succ[out] = out_succ(o);
                        b.succ[br].push(out);
                    }
                }
            }
        }
    }
    b.finish(game, variant, (0..n).collect())
}

/// Reduction for games whose mutually unfair plays are won by ∃.
///
/// Built as the dual of the bot reduction of the dual game: owners are
/// swapped back and priorities lowered by one, so base nodes keep their
/// α priority and the maximal priority is at most `2k+2`.
pub fn build_parity_top(game: &FairGame) -> Result<ReducedGame, ReductionError> {
    check_mode(game, BetaMode::Top)?;
    let dual = game.dual();
    let mut r = bot_gadgets(&dual, Variant::Existential);
    r.parity.owner.iter_mut().for_each(|o| *o = o.opponent());
    r.parity.priority.iter_mut().for_each(|p| *p -= 1);
    r.source = game.clone();
    Ok(r)
}

/// Which annotated base nodes the parity-mode reduction materializes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Materialize {
    /// Only base nodes reachable from the seeds `(v,1,∃)`.
    Reachable,
    /// Every `(v,p,b)`; used when strategies must cover all memory values.
    All,
}

/// Reduction for games whose mutually unfair plays are decided by Γ.
pub fn build_parity_parity(game: &FairGame) -> Result<ReducedGame, ReductionError> {
    build_parity_parity_with(game, Materialize::Reachable)
}

pub fn build_parity_parity_with(game: &FairGame, what: Materialize) -> Result<ReducedGame, ReductionError> {
    check_mode(game, BetaMode::Parity)?;
    let a = &game.arena;
    let k = game.k();
    let d = game.d();
    let mut p = Product { game, b: Builder::new(), ids: HashMap::new(), queue: VecDeque::new() };
    let seeds: Vec<usize> = a.nodes().map(|v| p.base(v, Memory::INITIAL)).collect();
    if what == Materialize::All {
        for v in a.nodes() {
            for q in 1..=d {
                for bb in [Player::Exists, Player::Forall] {
                    p.base(v, Memory { p: q, b: bb });
                }
            }
        }
    }
    while let Some((u, v, m)) = p.queue.pop_front() {
        let gamma = game.beta[v];
        let stepped = Memory { p: m.p.max(gamma), b: m.b };
        if !a.is_fair_node(v) {
            p.b.succ[u] = p.bases(a.succ(v), stepped);
            continue;
        }
        let owner = a.owner(v);
        let all = a.succ(v);
        let fair = a.fair_succ(v);
        for i in 1..=k + 1 {
            let br = p.b.node(owner.opponent(), 0, GadgetTag::Branch(i), v, Some(m));
            p.b.succ[u].push(br);
            let mut out = |o: Player, prio: u32, ws: &[NodeId], to: Memory| p.out(br, v, m, o, prio, ws, to);
            match owner {
                Player::Exists if i <= k => {
                    out(Player::Exists, 2 * i - 1, all, stepped);
                    out(Player::Forall, 2 * i, fair, stepped);
                }
                Player::Exists => match m.b {
                    Player::Exists => out(Player::Exists, 2 * k + 1, all, stepped),
                    Player::Forall => out(Player::Exists, 2 * k + m.p, all, Memory { p: gamma, b: Player::Exists }),
                },
                Player::Forall if i == 1 => out(Player::Exists, 1, fair, stepped),
                Player::Forall if i <= k => {
                    out(Player::Forall, 2 * i - 2, all, stepped);
                    out(Player::Exists, 2 * i - 1, fair, stepped);
                }
                Player::Forall => out(Player::Forall, 2 * k, all, Memory { p: stepped.p, b: Player::Forall }),
            }
        }
    }
    Ok(p.b.finish(game, Variant::Existential, seeds))
}

/// Incremental construction of the annotated product.
struct Product<'a> {
    game: &'a FairGame,
    b: Builder,
    ids: HashMap<(NodeId, Memory), usize>,
    queue: VecDeque<(usize, NodeId, Memory)>,
}

impl Product<'_> {
    fn base(&mut self, v: NodeId, m: Memory) -> usize {
        if let Some(&id) = self.ids.get(&(v, m)) {
            return id;
        }
        let id = self.b.node(self.game.arena.owner(v), self.game.alpha[v], GadgetTag::Base, v, Some(m));
        self.ids.insert((v, m), id);
        self.queue.push_back((id, v, m));
        id
    }

    fn bases(&mut self, ws: &[NodeId], m: Memory) -> Vec<usize> {
        ws.iter().map(|&w| self.base(w, m)).collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn out(&mut self, br: usize, v: NodeId, m: Memory, owner: Player, prio: u32, ws: &[NodeId], to: Memory) {
        let out = self.b.node(owner, prio, GadgetTag::out(prio), v, Some(m));
        self.b.succ[out] = self.bases(ws, to);
        self.b.succ[br].push(out);
    }
}

/// Builds the default reduction for the game's mode.
pub fn build(game: &FairGame) -> Result<ReducedGame, ReductionError> {
    match game.beta_mode {
        BetaMode::Bot => build_parity_bot(game, Variant::Existential),
        BetaMode::Top => build_parity_top(game),
        BetaMode::Parity => build_parity_parity(game),
    }
}

/// Reads the regions of the original nodes off the solved reduced game.
pub fn project_regions(reduced: &ReducedGame, parity_regions: &Regions) -> Regions {
    let winners: Vec<Player> = reduced.seeds.iter().map(|&s| parity_regions.winner(s)).collect();
    Regions::from_winners(&winners)
}

/// Solves a fair game through its default reduction and Zielonka's algorithm.
pub fn solve_by_reduction(game: &FairGame) -> Result<Regions, ReductionError> {
    let r = build(game)?;
    Ok(project_regions(&r, &zielonka_solve(&r.parity).regions))
}

/// Size and priority bounds the reductions are expected to respect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub nodes: usize,
    pub node_bound: usize,
    pub max_priority: u32,
    pub priority_bound: u32,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.nodes <= self.node_bound && self.max_priority <= self.priority_bound
    }
}

/// Node bound `n(3k+1)` (bot), `n(3k+1) + 2|V^fair|` (top), `2nd(3k+1)`
/// (parity); priority bound `2k+1`, `2k+2`, `2k+d` respectively.
pub fn bounds(reduced: &ReducedGame) -> BoundReport {
    let g = &reduced.source;
    let (n, k, d) = (g.len(), g.k() as usize, g.d() as usize);
    let fair_nodes = g.arena.nodes().filter(|&v| g.arena.is_fair_node(v)).count();
    let (node_bound, priority_bound) = match g.beta_mode {
        BetaMode::Bot => (n * (3 * k + 1), 2 * k + 1),
        BetaMode::Top => (n * (3 * k + 1) + 2 * fair_nodes, 2 * k + 2),
        BetaMode::Parity => (2 * n * d * (3 * k + 1), 2 * k + d),
    };
    BoundReport {
        nodes: reduced.len(),
        node_bound,
        max_priority: reduced.parity.max_priority(),
        priority_bound: priority_bound as u32,
    }
}

/// Exact number of reduced nodes a single gadget contributes.
pub fn gadget_size(game: &FairGame, v: NodeId, variant: Variant) -> usize {
    let a = &game.arena;
    let k = game.k() as usize;
    if !a.is_fair_node(v) {
        return 1;
    }
    let exists = a.owner(v) == Player::Exists;
    match (game.beta_mode, variant) {
        (BetaMode::Parity, _) => {
            if exists {
                3 * k + 3
            } else {
                3 * k + 2
            }
        }
        (BetaMode::Bot, Variant::Universal) => {
            if exists {
                3 * k + 3
            } else {
                3 * k + 2
            }
        }
        (mode, _) => {
            // Bot gadget of the node, or of the dual node for top mode.
            let (lam, k, owner_exists) = match mode {
                BetaMode::Top => (game.alpha[v] as usize + 1, k + 1, !exists),
                _ => (game.alpha[v] as usize, k, exists),
            };
            let lo = if lam % 2 == 1 { lam } else { lam - 1 };
            let hi = if owner_exists { 2 * k + 1 } else { 2 * k - 1 };
            let branches = (hi - lo) / 2 + 1;
            let outs = 2 * branches - usize::from(owner_exists);
            1 + branches + outs
        }
    }
}

/// Turns a positional strategy of the reduced game into a cycling strategy
/// of the fair game.
///
/// At a node whose gadget root belongs to `player`, the chosen branch
/// decides: a branch without a fair out node becomes a commitment to the
/// control successor, a branch with both becomes a cycle starting at the
/// control successor. At a node of `player` whose root belongs to the
/// opponent, the highest branch where `player` hands the move to itself
/// decides in the same way (the topmost such branch commits).
pub fn lift_strategy(
    reduced: &ReducedGame,
    positional: &PositionalStrategy,
    player: Player,
) -> Result<CyclingStrategy, ReductionError> {
    if reduced.variant == Variant::Universal && reduced.source.arena.has_fair_edges() {
        return Err(ReductionError::UnsupportedVariant);
    }
    let game = &reduced.source;
    let a = &game.arena;
    let pg = &reduced.parity;
    let rule = if game.beta_mode == BetaMode::Parity { MemoryRule::Annotated } else { MemoryRule::None };
    let mut strat = CyclingStrategy::new(game, player, rule);
    let pick = |x: usize| positional[x].ok_or(ReductionError::Uncovered(x));
    let choice_at = |x: usize| -> Result<Option<Choice>, ReductionError> {
        let v = reduced.origin[x];
        if a.owner(v) != player {
            return Ok(None);
        }
        if !a.is_fair_node(v) {
            return Ok(Some(Choice::Commit(reduced.origin[pick(x)?])));
        }
        let first_fair = a.fair_succ(v)[0];
        let control_of = |br: usize| pg.succ[br].iter().copied().find(|&o| pg.owner[o] == player);
        let has_fair = |br: usize| pg.succ[br].iter().any(|&o| pg.owner[o] != player);
        if pg.owner[x] == player {
            let br = pick(x)?;
            return Ok(Some(match control_of(br) {
                None => Choice::cycle_from(game, v, first_fair),
                Some(c) => {
                    let w = reduced.origin[pick(c)?];
                    if has_fair(br) {
                        Choice::cycle_from(game, v, w)
                    } else {
                        Choice::Commit(w)
                    }
                }
            }));
        }
        let branches = &pg.succ[x];
        let top = *branches.iter().max_by_key(|&&br| branch_index(reduced, br)).unwrap();
        let mut best: Option<(u32, usize, usize)> = None;
        for &br in branches {
            let chosen = pick(br)?;
            if pg.owner[chosen] == player {
                let i = branch_index(reduced, br);
                if best.is_none_or(|(j, _, _)| i > j) {
                    best = Some((i, br, chosen));
                }
            }
        }
        Ok(Some(match best {
            None => Choice::cycle_from(game, v, first_fair),
            Some((_, br, c)) => {
                let w = reduced.origin[pick(c)?];
                if br == top {
                    Choice::Commit(w)
                } else {
                    Choice::cycle_from(game, v, w)
                }
            }
        }))
    };
    for x in 0..reduced.len() {
        if reduced.tag[x] != GadgetTag::Base {
            continue;
        }
        if let Some(c) = choice_at(x)? {
            strat.set(reduced.origin[x], reduced.memory[x].unwrap_or(Memory::INITIAL), c);
        }
    }
    Ok(strat)
}

fn branch_index(reduced: &ReducedGame, br: usize) -> u32 {
    match reduced.tag[br] {
        GadgetTag::Branch(i) => i,
        _ => 0,
    }
}
