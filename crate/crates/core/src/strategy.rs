//! Cycling strategies and the plays they induce.
//!
//! A cycling strategy fixes, per decision point, either a committed
//! successor or a round-robin list (a designated successor followed by all
//! fair successors). Decision points are nodes, or triples `(v, p, b)` when
//! the strategy carries the memory used for parity-decided unfair plays:
//! `p` is the largest Γ priority seen since the last reset and `b` is the
//! player believed to have taken the last committing move at a fair node.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::arena::{FairGame, Lasso, NodeId, Player};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Choice {
    Commit(NodeId),
    Cycle(Vec<NodeId>),
}

impl Choice {
    /// Round-robin list starting at `designated`, then the fair successors
    /// of `v` in ascending order (without repeating `designated`).
    pub fn cycle_from(game: &FairGame, v: NodeId, designated: NodeId) -> Choice {
        let mut list = vec![designated];
        list.extend(game.arena.fair_succ(v).iter().copied().filter(|&w| w != designated));
        Choice::Cycle(list)
    }

    pub fn memory_size(&self) -> usize {
        match self {
            Choice::Commit(_) => 1,
            Choice::Cycle(l) => l.len(),
        }
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Choice::Commit(w) => write!(f, "commit {w}"),
            Choice::Cycle(l) => {
                let l: Vec<String> = l.iter().map(|w| w.to_string()).collect();
                write!(f, "cycle [{}]", l.join(","))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MemoryRule {
    /// Decision points are plain nodes.
    None,
    /// Decision points are `(v, p, b)` triples updated along the play.
    Annotated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Memory {
    pub p: u32,
    pub b: Player,
}

impl Memory {
    pub const INITIAL: Memory = Memory { p: 1, b: Player::Exists };
}

/// Dense index of decision points for a game.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeySpace {
    pub rule: MemoryRule,
    pub d: u32,
    pub n: usize,
}

impl KeySpace {
    pub fn new(game: &FairGame, rule: MemoryRule) -> Self {
        KeySpace { rule, d: game.d(), n: game.len() }
    }

    pub fn size(&self) -> usize {
        match self.rule {
            MemoryRule::None => self.n,
            MemoryRule::Annotated => self.n * self.d as usize * 2,
        }
    }

    pub fn key(&self, v: NodeId, m: Memory) -> usize {
        match self.rule {
            MemoryRule::None => v,
            MemoryRule::Annotated => (v * self.d as usize + (m.p as usize - 1)) * 2 + m.b.index(),
        }
    }

    pub fn decode(&self, key: usize) -> (NodeId, Memory) {
        match self.rule {
            MemoryRule::None => (key, Memory::INITIAL),
            MemoryRule::Annotated => {
                let b = if key.is_multiple_of(2) { Player::Exists } else { Player::Forall };
                let rest = key / 2;
                let d = self.d as usize;
                (rest / d, Memory { p: (rest % d) as u32 + 1, b })
            }
        }
    }
}

/// Memory update of `me` after the move `v -> w`. `committed` tells whether
/// the move was a committing choice of `me` at its own node.
pub fn update_memory(game: &FairGame, me: Player, m: Memory, v: NodeId, w: NodeId, committed: bool) -> Memory {
    let gamma = game.beta[v].max(1);
    let keep = Memory { p: m.p.max(gamma), b: m.b };
    if !game.arena.is_fair_node(v) {
        return keep;
    }
    let owner = game.arena.owner(v);
    let existential_commit = if owner == me {
        committed && me == Player::Exists
    } else {
        me == Player::Forall && owner == Player::Exists && !game.arena.is_fair_edge(v, w)
    };
    let universal_commit = if owner == me {
        committed && me == Player::Forall
    } else {
        me == Player::Exists && owner == Player::Forall && !game.arena.is_fair_edge(v, w)
    };
    if existential_commit {
        if m.b == Player::Forall {
            Memory { p: gamma, b: Player::Exists }
        } else {
            Memory { p: keep.p, b: Player::Exists }
        }
    } else if universal_commit {
        Memory { p: keep.p, b: Player::Forall }
    } else {
        keep
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclingStrategy {
    pub player: Player,
    pub rule: MemoryRule,
    pub d: u32,
    /// Indexed by decision key; `None` where the strategy is unspecified.
    pub choices: Vec<Option<Choice>>,
}

impl CyclingStrategy {
    pub fn new(game: &FairGame, player: Player, rule: MemoryRule) -> Self {
        let ks = KeySpace::new(game, rule);
        CyclingStrategy { player, rule, d: ks.d, choices: vec![None; ks.size()] }
    }

    pub fn keyspace(&self) -> KeySpace {
        KeySpace { rule: self.rule, d: self.d, n: self.node_count() }
    }

    fn node_count(&self) -> usize {
        match self.rule {
            MemoryRule::None => self.choices.len(),
            MemoryRule::Annotated => self.choices.len() / (2 * self.d as usize),
        }
    }

    pub fn set(&mut self, v: NodeId, m: Memory, c: Choice) {
        let k = self.keyspace().key(v, m);
        self.choices[k] = Some(c);
    }

    pub fn get(&self, v: NodeId, m: Memory) -> Option<&Choice> {
        self.choices[self.keyspace().key(v, m)].as_ref()
    }

    /// Checks the shape constraints: commit targets and cycle lists are
    /// successors, cycles contain all fair successors, and the per-point
    /// memory does not exceed `|E_f(v)| + 1`.
    pub fn check_shape(&self, game: &FairGame) -> Result<(), String> {
        let ks = self.keyspace();
        for (key, c) in self.choices.iter().enumerate() {
            let Some(c) = c else { continue };
            let (v, _) = ks.decode(key);
            let a = &game.arena;
            match c {
                Choice::Commit(w) if !a.is_edge(v, *w) => return Err(format!("node {v}: commit to non-successor {w}")),
                Choice::Cycle(l) => {
                    if l.iter().any(|&w| !a.is_edge(v, w)) {
                        return Err(format!("node {v}: cycle through non-successor"));
                    }
                    if a.fair_succ(v).iter().any(|w| !l.contains(w)) {
                        return Err(format!("node {v}: cycle misses a fair successor"));
                    }
                }
                _ => {}
            }
            if c.memory_size() > a.fair_succ(v).len() + 1 {
                return Err(format!("node {v}: memory {} exceeds bound", c.memory_size()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("strategy of {player} undefined at node {node} (memory p={p}, b={b})")]
    Undefined { player: Player, node: NodeId, p: u32, b: Player },
}

/// Play state: position, both memories, round-robin counters of both players.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlayState {
    pub node: NodeId,
    pub mem: [Memory; 2],
    pub counters: Vec<u8>,
}

impl PlayState {
    pub fn initial(v0: NodeId, keys: [usize; 2]) -> Self {
        PlayState { node: v0, mem: [Memory::INITIAL; 2], counters: vec![0; keys[0] + keys[1]] }
    }
}

pub enum Step {
    Moved(PlayState),
    /// The owner of the current node has no choice at this key.
    Missing(Player, usize),
}

/// Advances the play by one move. `choice_of(player, key)` returns the
/// player's choice at a decision key.
pub fn step<'a, F>(game: &FairGame, spaces: [KeySpace; 2], st: &PlayState, choice_of: F) -> Step
where
    F: Fn(Player, usize) -> Option<&'a Choice>,
{
    let v = st.node;
    let owner = game.arena.owner(v);
    let key = spaces[owner.index()].key(v, st.mem[owner.index()]);
    let Some(choice) = choice_of(owner, key) else {
        return Step::Missing(owner, key);
    };
    let mut next = st.clone();
    let counter_slot = if owner == Player::Exists { key } else { spaces[0].size() + key };
    let (w, committed) = match choice {
        Choice::Commit(w) => (*w, true),
        Choice::Cycle(l) => {
            let c = st.counters[counter_slot] as usize % l.len();
            next.counters[counter_slot] = ((c + 1) % l.len()) as u8;
            (l[c], false)
        }
    };
    for me in [Player::Exists, Player::Forall] {
        let space = spaces[me.index()];
        if space.rule == MemoryRule::Annotated {
            let own = committed && me == owner;
            next.mem[me.index()] = update_memory(game, me, st.mem[me.index()], v, w, own);
        }
    }
    next.node = w;
    Step::Moved(next)
}

/// Cuts a state history whose last state repeats an earlier one into a lasso.
pub fn lasso_from_history(history: &[PlayState], repeat_at: usize) -> Lasso {
    let nodes: Vec<NodeId> = history.iter().map(|s| s.node).collect();
    Lasso::new(nodes[..repeat_at].to_vec(), nodes[repeat_at..].to_vec())
}

/// The play from `v0` when the existential player follows `s` and the
/// universal player follows `t`.
pub fn induced_lasso(
    game: &FairGame,
    v0: NodeId,
    s: &CyclingStrategy,
    t: &CyclingStrategy,
) -> Result<Lasso, StrategyError> {
    let spaces = [s.keyspace(), t.keyspace()];
    let mut st = PlayState::initial(v0, [spaces[0].size(), spaces[1].size()]);
    let mut seen: HashMap<PlayState, usize> = HashMap::new();
    let mut history = Vec::new();
    loop {
        if let Some(&i) = seen.get(&st) {
            return Ok(lasso_from_history(&history, i));
        }
        seen.insert(st.clone(), history.len());
        history.push(st.clone());
        let strat = |p: Player, key: usize| -> Option<&Choice> {
            if p == Player::Exists {
                s.choices[key].as_ref()
            } else {
                t.choices[key].as_ref()
            }
        };
        match step(game, spaces, &st, strat) {
            Step::Moved(next) => st = next,
            Step::Missing(player, key) => {
                let (node, m) = spaces[player.index()].decode(key);
                return Err(StrategyError::Undefined { player, node, p: m.p, b: m.b });
            }
        }
    }
}
