//! Fair game arenas, fair parity games and the winner of ultimately periodic plays.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    Exists,
    Forall,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Exists => Player::Forall,
            Player::Forall => Player::Exists,
        }
    }

    /// The player that wins a max-parity condition whose maximum is `priority`.
    pub fn of_parity(priority: u32) -> Player {
        if priority.is_multiple_of(2) {
            Player::Exists
        } else {
            Player::Forall
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::Exists => 0,
            Player::Forall => 1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Exists => f.write_str("exists"),
            Player::Forall => f.write_str("forall"),
        }
    }
}

/// How mutually unfair plays are decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BetaMode {
    /// Mutually unfair plays are lost by the existential player.
    Bot,
    /// Mutually unfair plays are won by the existential player.
    Top,
    /// Mutually unfair plays are decided by a second max-parity condition.
    Parity,
}

impl fmt::Display for BetaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaMode::Bot => f.write_str("bot"),
            BetaMode::Top => f.write_str("top"),
            BetaMode::Parity => f.write_str("parity"),
        }
    }
}

/// Owners, edges and fair edges. Successor lists are sorted and duplicate free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FairArena {
    owner: Vec<Player>,
    succ: Vec<Vec<NodeId>>,
    fair: Vec<Vec<NodeId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("node {0}: not right-total")]
    NotRightTotal(NodeId),
    #[error("edge ({0},{1}): target out of range")]
    EdgeOutOfRange(NodeId, NodeId),
    #[error("fair edge ({0},{1}): fair edge not an edge")]
    FairNotEdge(NodeId, NodeId),
    #[error("node {0}: alpha priority must be positive")]
    ZeroAlpha(NodeId),
    #[error("node {0}: beta priority must be positive in parity mode")]
    ZeroBeta(NodeId),
    #[error("node {0}: beta priority present outside parity mode")]
    UnexpectedBeta(NodeId),
    #[error("map length {found} does not match node count {expected}")]
    Length { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum PlayError {
    #[error("not a play: {0}")]
    NotAPlay(String),
}

impl FairArena {
    /// Builds an arena, sorting and deduplicating the successor lists.
    /// Call [`FairArena::validate`] (or [`FairGame::validate`]) to check invariants.
    pub fn new(owner: Vec<Player>, succ: Vec<Vec<NodeId>>, fair: Vec<Vec<NodeId>>) -> Self {
        let norm = |mut l: Vec<NodeId>| {
            l.sort_unstable();
            l.dedup();
            l
        };
        FairArena {
            owner,
            succ: succ.into_iter().map(norm).collect(),
            fair: fair.into_iter().map(norm).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.owner.len()
    }

    pub fn owner(&self, v: NodeId) -> Player {
        self.owner[v]
    }

    pub fn succ(&self, v: NodeId) -> &[NodeId] {
        &self.succ[v]
    }

    pub fn fair_succ(&self, v: NodeId) -> &[NodeId] {
        &self.fair[v]
    }

    pub fn is_fair_node(&self, v: NodeId) -> bool {
        !self.fair[v].is_empty()
    }

    pub fn is_edge(&self, v: NodeId, w: NodeId) -> bool {
        self.succ[v].binary_search(&w).is_ok()
    }

    pub fn is_fair_edge(&self, v: NodeId, w: NodeId) -> bool {
        self.fair[v].binary_search(&w).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn has_fair_edges(&self) -> bool {
        self.fair.iter().any(|f| !f.is_empty())
    }

    /// True if some node owned by `player` has a fair out-edge.
    pub fn has_fair_nodes_of(&self, player: Player) -> bool {
        self.nodes().any(|v| self.owner[v] == player && self.is_fair_node(v))
    }

    pub fn validate(&self) -> Vec<Violation> {
        let n = self.len();
        let mut out = Vec::new();
        for (expected, found) in [(n, self.succ.len()), (n, self.fair.len())] {
            if expected != found {
                out.push(Violation::Length { expected, found });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for v in self.nodes() {
            if self.succ[v].is_empty() {
                out.push(Violation::NotRightTotal(v));
            }
            for &w in &self.succ[v] {
                if w >= n {
                    out.push(Violation::EdgeOutOfRange(v, w));
                }
            }
            for &w in &self.fair[v] {
                if !self.is_edge(v, w) {
                    out.push(Violation::FairNotEdge(v, w));
                }
            }
        }
        out
    }

    /// The arena with owners swapped.
    pub fn dual(&self) -> FairArena {
        FairArena {
            owner: self.owner.iter().map(|p| p.opponent()).collect(),
            succ: self.succ.clone(),
            fair: self.fair.clone(),
        }
    }

    /// Checks that `lasso` is a play of this arena.
    pub fn check_lasso(&self, lasso: &Lasso) -> Result<(), PlayError> {
        if lasso.cycle.is_empty() {
            return Err(PlayError::NotAPlay("empty cycle".into()));
        }
        let seq: Vec<NodeId> = lasso
            .stem
            .iter()
            .chain(lasso.cycle.iter())
            .copied()
            .chain(std::iter::once(lasso.cycle[0]))
            .collect();
        if let Some(&v) = seq.iter().find(|&&v| v >= self.len()) {
            return Err(PlayError::NotAPlay(format!("node {v} out of range")));
        }
        for pair in seq.windows(2) {
            if !self.is_edge(pair[0], pair[1]) {
                return Err(PlayError::NotAPlay(format!("({},{}) is not an edge", pair[0], pair[1])));
            }
        }
        Ok(())
    }

    /// A play is fair for `player` iff every fair node of `player` seen
    /// infinitely often takes all of its fair edges infinitely often.
    pub fn is_fair_for(&self, lasso: &Lasso, player: Player) -> Result<bool, PlayError> {
        self.check_lasso(lasso)?;
        let edges = lasso.cycle_edges();
        Ok(lasso.cycle.iter().all(|&v| {
            self.owner[v] != player || self.fair[v].iter().all(|&w| edges.contains(&(v, w)))
        }))
    }
}

/// An arena with the α priorities and the β condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FairGame {
    pub arena: FairArena,
    pub alpha: Vec<u32>,
    pub beta_mode: BetaMode,
    /// Γ priorities; all zero unless `beta_mode` is `Parity`.
    pub beta: Vec<u32>,
    pub names: Vec<Option<String>>,
}

impl FairGame {
    pub fn new(arena: FairArena, alpha: Vec<u32>, beta_mode: BetaMode, beta: Vec<u32>) -> Self {
        let n = arena.len();
        FairGame { arena, alpha, beta_mode, beta, names: vec![None; n] }
    }

    pub fn len(&self) -> usize {
        self.arena.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arena.is_empty()
    }

    /// Half of the normalized maximal α priority.
    pub fn k(&self) -> u32 {
        let max = self.alpha.iter().copied().max().unwrap_or(0);
        max.div_ceil(2).max(1)
    }

    /// Maximal Γ priority (1 outside parity mode).
    pub fn d(&self) -> u32 {
        match self.beta_mode {
            BetaMode::Parity => self.beta.iter().copied().max().unwrap_or(1).max(1),
            _ => 1,
        }
    }

    pub fn with_mode(&self, beta_mode: BetaMode) -> FairGame {
        let mut g = self.clone();
        if beta_mode != BetaMode::Parity {
            g.beta = vec![0; g.len()];
        } else if self.beta_mode != BetaMode::Parity {
            g.beta = vec![1; g.len()];
        }
        g.beta_mode = beta_mode;
        g
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.arena.validate();
        let n = self.len();
        for found in [self.alpha.len(), self.beta.len(), self.names.len()] {
            if found != n {
                out.push(Violation::Length { expected: n, found });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for v in 0..n {
            if self.alpha[v] == 0 {
                out.push(Violation::ZeroAlpha(v));
            }
            match self.beta_mode {
                BetaMode::Parity if self.beta[v] == 0 => out.push(Violation::ZeroBeta(v)),
                BetaMode::Bot | BetaMode::Top if self.beta[v] != 0 => {
                    out.push(Violation::UnexpectedBeta(v))
                }
                _ => {}
            }
        }
        out
    }

    /// The game seen from the other side: owners swapped, α shifted by one,
    /// Bot and Top exchanged. The existential region of the dual is the
    /// universal region of `self`. Not defined for parity mode.
    pub fn dual(&self) -> FairGame {
        assert!(self.beta_mode != BetaMode::Parity, "dual is only defined for bot/top games");
        FairGame {
            arena: self.arena.dual(),
            alpha: self.alpha.iter().map(|a| a + 1).collect(),
            beta_mode: if self.beta_mode == BetaMode::Bot { BetaMode::Top } else { BetaMode::Bot },
            beta: self.beta.clone(),
            names: self.names.clone(),
        }
    }

    pub fn display_name(&self, v: NodeId) -> String {
        self.names[v].clone().unwrap_or_else(|| v.to_string())
    }

    /// Winner of the ultimately periodic play `lasso`.
    pub fn play_winner(&self, lasso: &Lasso) -> Result<Player, PlayError> {
        let fair_e = self.arena.is_fair_for(lasso, Player::Exists)?;
        let fair_a = self.arena.is_fair_for(lasso, Player::Forall)?;
        let max_of = |m: &[u32]| lasso.cycle.iter().map(|&v| m[v]).max().unwrap_or(0);
        Ok(match (fair_e, fair_a) {
            (true, true) => Player::of_parity(max_of(&self.alpha)),
            (true, false) => Player::Exists,
            (false, true) => Player::Forall,
            (false, false) => match self.beta_mode {
                BetaMode::Bot => Player::Forall,
                BetaMode::Top => Player::Exists,
                BetaMode::Parity => Player::of_parity(max_of(&self.beta)),
            },
        })
    }
}

/// A finite stem followed by a cycle repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lasso {
    pub stem: Vec<NodeId>,
    pub cycle: Vec<NodeId>,
}

impl Lasso {
    pub fn new(stem: Vec<NodeId>, cycle: Vec<NodeId>) -> Self {
        Lasso { stem, cycle }
    }

    /// Edges taken infinitely often, including the wrap-around edge.
    pub fn cycle_edges(&self) -> BTreeSet<(NodeId, NodeId)> {
        let c = &self.cycle;
        (0..c.len()).map(|i| (c[i], c[(i + 1) % c.len()])).collect()
    }

    /// The same play with its cycle rotated left by `by` positions.
    pub fn rotated(&self, by: usize) -> Lasso {
        let mut stem = self.stem.clone();
        let by = by % self.cycle.len().max(1);
        stem.extend_from_slice(&self.cycle[..by]);
        let mut cycle = self.cycle[by..].to_vec();
        cycle.extend_from_slice(&self.cycle[..by]);
        Lasso { stem, cycle }
    }
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &[NodeId]| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "{} ({})^w", join(&self.stem), join(&self.cycle))
    }
}
