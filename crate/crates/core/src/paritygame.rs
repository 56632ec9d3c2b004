//! Max-parity games: attractors, recursive Zielonka, edge-priority lowering.

use serde::Serialize;

use crate::arena::{NodeId, Player};
use crate::nodeset::NodeSet;

/// A max-parity game; the existential player wins plays whose maximal
/// infinitely recurring priority is even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub succ: Vec<Vec<NodeId>>,
    pub priority: Vec<u32>,
    /// Per-edge priorities, aligned with `succ`.
    pub edge_priority: Option<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Regions {
    pub win_exists: Vec<NodeId>,
    pub win_forall: Vec<NodeId>,
}

impl Regions {
    pub fn from_exists(n: usize, win_exists: &NodeSet) -> Regions {
        Regions {
            win_exists: win_exists.to_vec(),
            win_forall: (0..n).filter(|&v| !win_exists.contains(v)).collect(),
        }
    }

    pub fn from_winners(winners: &[Player]) -> Regions {
        let pick = |p| (0..winners.len()).filter(|&v| winners[v] == p).collect();
        Regions { win_exists: pick(Player::Exists), win_forall: pick(Player::Forall) }
    }

    pub fn len(&self) -> usize {
        self.win_exists.len() + self.win_forall.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn winner(&self, v: NodeId) -> Player {
        if self.win_exists.binary_search(&v).is_ok() {
            Player::Exists
        } else {
            Player::Forall
        }
    }

    pub fn winners(&self) -> Vec<Player> {
        (0..self.len()).map(|v| self.winner(v)).collect()
    }

    pub fn region(&self, p: Player) -> &[NodeId] {
        match p {
            Player::Exists => &self.win_exists,
            Player::Forall => &self.win_forall,
        }
    }
}

/// Successor choice for every node (owned nodes are the meaningful ones).
pub type PositionalStrategy = Vec<Option<NodeId>>;

#[derive(Clone, Debug)]
pub struct Solution {
    pub regions: Regions,
    /// Indexed by `Player::index()`; entries for the player's own nodes.
    pub strategy: [PositionalStrategy; 2],
}

impl ParityGame {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn max_priority(&self) -> u32 {
        self.priority.iter().copied().max().unwrap_or(0)
    }

    pub fn is_right_total(&self) -> bool {
        self.succ.iter().all(|s| !s.is_empty())
    }

    fn predecessors(&self) -> Vec<Vec<NodeId>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (v, ws) in self.succ.iter().enumerate() {
            for &w in ws {
                pred[w].push(v);
            }
        }
        pred
    }

    /// The game with owners swapped and all priorities raised by one.
    pub fn dual(&self) -> ParityGame {
        ParityGame {
            owner: self.owner.iter().map(|p| p.opponent()).collect(),
            succ: self.succ.clone(),
            priority: self.priority.iter().map(|p| p + 1).collect(),
            edge_priority: self
                .edge_priority
                .as_ref()
                .map(|e| e.iter().map(|l| l.iter().map(|p| p + 1).collect()).collect()),
        }
    }
}

/// Least set containing `target` into which `player` can force the play.
pub fn attractor(game: &ParityGame, target: &NodeSet, player: Player) -> NodeSet {
    let sub = NodeSet::full(game.len());
    let mut scratch = vec![None; game.len()];
    attractor_in(game, &game.predecessors(), &sub, target, player, &mut scratch)
}

fn attractor_in(
    game: &ParityGame,
    pred: &[Vec<NodeId>],
    sub: &NodeSet,
    target: &NodeSet,
    player: Player,
    strategy: &mut PositionalStrategy,
) -> NodeSet {
    let mut attr = target.clone();
    attr.intersect_with(sub);
    let mut remaining: Vec<usize> = (0..game.len())
        .map(|v| if sub.contains(v) { game.succ[v].iter().filter(|&&w| sub.contains(w)).count() } else { 0 })
        .collect();
    let mut queue: Vec<NodeId> = attr.to_vec();
    while let Some(w) = queue.pop() {
        for &u in &pred[w] {
            if !sub.contains(u) || attr.contains(u) {
                continue;
            }
            let join = if game.owner[u] == player {
                true
            } else {
                remaining[u] -= 1;
                remaining[u] == 0
            };
            if join {
                if game.owner[u] == player {
                    strategy[u] = game.succ[u].iter().copied().find(|&x| attr.contains(x));
                }
                attr.insert(u);
                queue.push(u);
            }
        }
    }
    attr
}

/// Solves a node-priority game with Zielonka's recursive algorithm.
pub fn zielonka_solve(game: &ParityGame) -> Solution {
    assert!(game.edge_priority.is_none(), "lower edge priorities before solving");
    assert!(game.is_right_total(), "parity game must be right-total");
    let n = game.len();
    let pred = game.predecessors();
    let mut strategy = [vec![None; n], vec![None; n]];
    let (we, _) = zielonka_rec(game, &pred, NodeSet::full(n), &mut strategy);
    for v in 0..n {
        let s = &mut strategy[game.owner[v].index()];
        if s[v].is_none() {
            s[v] = Some(game.succ[v][0]);
        }
    }
    // Strategies only matter on owned nodes.
    for v in 0..n {
        strategy[game.owner[v].opponent().index()][v] = None;
    }
    Solution { regions: Regions::from_exists(n, &we), strategy }
}

fn zielonka_rec(
    game: &ParityGame,
    pred: &[Vec<NodeId>],
    sub: NodeSet,
    strategy: &mut [PositionalStrategy; 2],
) -> (NodeSet, NodeSet) {
    let n = game.len();
    if sub.is_empty() {
        return (NodeSet::empty(n), NodeSet::empty(n));
    }
    let m = sub.iter().map(|v| game.priority[v]).max().unwrap();
    let p = Player::of_parity(m);
    let q = p.opponent();
    let top = NodeSet::from_iter(n, sub.iter().filter(|&v| game.priority[v] == m));
    let a = attractor_in(game, pred, &sub, &top, p, &mut strategy[p.index()]);
    for v in top.iter() {
        if game.owner[v] == p {
            strategy[p.index()][v] = game.succ[v].iter().copied().find(|&w| sub.contains(w));
        }
    }
    let mut rest = sub.clone();
    rest.difference_with(&a);
    let w1 = zielonka_rec(game, pred, rest, strategy);
    let w1_q = if q == Player::Exists { &w1.0 } else { &w1.1 };
    if w1_q.is_empty() {
        let empty = NodeSet::empty(n);
        return if p == Player::Exists { (sub, empty) } else { (empty, sub) };
    }
    let b = attractor_in(game, pred, &sub, w1_q, q, &mut strategy[q.index()]);
    let mut rest = sub;
    rest.difference_with(&b);
    let (mut we, mut wa) = zielonka_rec(game, pred, rest, strategy);
    if q == Player::Exists {
        we.union_with(&b);
    } else {
        wa.union_with(&b);
    }
    (we, wa)
}

/// Result of moving edge priorities onto fresh intermediate nodes.
#[derive(Clone, Debug)]
pub struct Lowered {
    pub game: ParityGame,
    /// Number of nodes of the original game; they keep their ids.
    pub original: usize,
}

/// Replaces edge priorities by fresh nodes: every edge whose priority is
/// positive is routed through a new node carrying that priority. Node
/// priorities of the input are folded into their out-edges first, so
/// original nodes end up with priority 0.
pub fn lower_edge_priorities(game: &ParityGame) -> Lowered {
    let n = game.len();
    let mut owner = game.owner.clone();
    let mut priority = vec![0; n];
    let mut succ = vec![Vec::new(); n];
    for v in 0..n {
        for (j, &w) in game.succ[v].iter().enumerate() {
            let ep = game.edge_priority.as_ref().map_or(0, |e| e[v][j]);
            let p = ep.max(game.priority[v]);
            if p == 0 {
                succ[v].push(w);
            } else {
                let fresh = owner.len();
                owner.push(Player::Exists);
                priority.push(p);
                succ.push(vec![w]);
                succ[v].push(fresh);
            }
        }
    }
    Lowered { game: ParityGame { owner, succ, priority, edge_priority: None }, original: n }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(owner: Player, prio: u32) -> ParityGame {
        ParityGame { owner: vec![owner], succ: vec![vec![0]], priority: vec![prio], edge_priority: None }
    }

    #[test]
    fn self_loops() {
        assert_eq!(zielonka_solve(&single(Player::Exists, 2)).regions.win_exists, vec![0]);
        assert_eq!(zielonka_solve(&single(Player::Exists, 1)).regions.win_forall, vec![0]);
    }

    #[test]
    fn attractor_edge_cases() {
        let g = single(Player::Exists, 1);
        assert!(attractor(&g, &NodeSet::empty(1), Player::Exists).is_empty());
        assert_eq!(attractor(&g, &NodeSet::full(1), Player::Forall).len(), 1);
    }

    #[test]
    fn attractor_respects_ownership() {
        // 0 (∃) -> {1, 2}; 1 (∀) -> {1, 2}; 2 -> 2. ∀ at 1 can stay away from 2.
        let g = ParityGame {
            owner: vec![Player::Exists, Player::Forall, Player::Exists],
            succ: vec![vec![1, 2], vec![1, 2], vec![2]],
            priority: vec![0, 0, 0],
            edge_priority: None,
        };
        let t = NodeSet::from_iter(3, [2]);
        assert_eq!(attractor(&g, &t, Player::Exists).to_vec(), vec![0, 2]);
        assert_eq!(attractor(&g, &t, Player::Forall).to_vec(), vec![0, 1, 2]);
    }

    #[test]
    fn lowering_single_edges() {
        for (p, w) in [(2, Player::Exists), (1, Player::Forall)] {
            let g = ParityGame {
                owner: vec![Player::Forall],
                succ: vec![vec![0]],
                priority: vec![0],
                edge_priority: Some(vec![vec![p]]),
            };
            let l = lower_edge_priorities(&g);
            assert_eq!(l.game.len(), 2);
            assert_eq!(l.game.priority[0], 0);
            assert_eq!(zielonka_solve(&l.game).regions.winner(0), w);
        }
    }

    #[test]
    fn lowering_zero_priorities_adds_nothing() {
        let g = ParityGame {
            owner: vec![Player::Exists, Player::Forall],
            succ: vec![vec![1], vec![0, 1]],
            priority: vec![0, 0],
            edge_priority: Some(vec![vec![0], vec![0, 0]]),
        };
        let l = lower_edge_priorities(&g);
        assert_eq!(l.game.succ, g.succ);
        assert_eq!(l.game.priority, vec![0, 0]);
    }
}
