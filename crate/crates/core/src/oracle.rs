//! Brute-force winners by quantifying over cycling strategy families.
//!
//! A node is won by ∃ if some family strategy of ∃ beats every family
//! strategy of ∀ (and symmetrically for ∀). Strategies are enumerated
//! lazily: a decision point is only fixed once a play reaches it, so only
//! the choices that influence some play are ever branched on. Both sides are
//! computed independently and exactly one of them must hold.

use std::collections::HashMap;
use std::rc::Rc;

use rayon::prelude::*;
use thiserror::Error;

use crate::arena::{BetaMode, FairGame, Lasso, NodeId, Player};
use crate::paritygame::Regions;
use crate::strategy::{lasso_from_history, step, Choice, CyclingStrategy, KeySpace, MemoryRule, PlayState, Step};

pub use crate::strategy::induced_lasso;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// One decision per node.
    Simple,
    /// One decision per `(v, p, b)`, with memory updated along the play.
    Annotated,
}

impl Family {
    pub fn for_mode(mode: BetaMode) -> Family {
        if mode == BetaMode::Parity {
            Family::Annotated
        } else {
            Family::Simple
        }
    }

    fn rule(self) -> MemoryRule {
        match self {
            Family::Simple => MemoryRule::None,
            Family::Annotated => MemoryRule::Annotated,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_nodes: usize,
    pub max_fair_out: usize,
    pub max_d: u32,
    /// Upper bound on simulated moves per node and player.
    pub step_budget: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_nodes: 6, max_fair_out: 2, max_d: 2, step_budget: 200_000_000 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle intractable: {0}")]
    Intractable(String),
    #[error("family determinacy violated at node {node}: exists wins {exists}, forall wins {forall}")]
    Indeterminate { node: NodeId, exists: bool, forall: bool },
    #[error("fixed strategy undefined at node {0}")]
    Undefined(NodeId),
}

/// Choice space of a node: commit to any successor, or cycle with any
/// designated successor.
pub fn choices(game: &FairGame, v: NodeId) -> Vec<Choice> {
    let a = &game.arena;
    let mut out: Vec<Choice> = a.succ(v).iter().map(|&w| Choice::Commit(w)).collect();
    if a.is_fair_node(v) {
        for &w in a.succ(v) {
            let c = Choice::cycle_from(game, v, w);
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

struct Ctx<'a> {
    game: &'a FairGame,
    spaces: [KeySpace; 2],
    tables: Rc<Vec<Vec<Choice>>>,
    steps: u64,
    budget: u64,
    /// The most recent play won by the inner player.
    counter: Option<Lasso>,
}

enum Outcome {
    /// Every completion of the inner player's strategy loses to the outer player.
    AllGood,
    /// A play fully determined by fixed choices is won by the inner player.
    Counter,
    /// The outer player's choice at this key is needed.
    Need(usize),
}

struct Search<'c, 'a> {
    ctx: &'c mut Ctx<'a>,
    outer: Player,
    history: Vec<PlayState>,
    seen: HashMap<PlayState, usize>,
}

impl Search<'_, '_> {
    /// Explores all inner completions from `st` against the outer choices
    /// given by `outer_choice`.
    fn inner(
        &mut self,
        mut st: PlayState,
        outer_choice: &dyn Fn(usize) -> Option<Choice>,
        inner_assign: &mut Vec<Option<u16>>,
    ) -> Result<Outcome, OracleError> {
        let mark = self.history.len();
        let result = loop {
            if let Some(&i) = self.seen.get(&st) {
                let lasso = lasso_from_history(&self.history, i);
                let w = self.ctx.game.play_winner(&lasso).expect("induced plays are valid");
                if w == self.outer {
                    break Ok(Outcome::AllGood);
                }
                self.ctx.counter = Some(lasso);
                break Ok(Outcome::Counter);
            }
            self.ctx.steps += 1;
            if self.ctx.steps > self.ctx.budget {
                break Err(OracleError::Intractable(format!("step budget {} exhausted", self.ctx.budget)));
            }
            self.seen.insert(st.clone(), self.history.len());
            self.history.push(st.clone());
            let owner = self.ctx.game.arena.owner(st.node);
            let key = self.ctx.spaces[owner.index()].key(st.node, st.mem[owner.index()]);
            let chosen: Option<Choice> = if owner == self.outer {
                outer_choice(key)
            } else {
                inner_assign[key].map(|i| self.ctx.tables[st.node][i as usize].clone())
            };
            let Some(chosen) = chosen else {
                if owner == self.outer {
                    break Ok(Outcome::Need(key));
                }
                break self.branch(st, key, outer_choice, inner_assign);
            };
            let spaces = self.ctx.spaces;
            match step(self.ctx.game, spaces, &st, |_, _| Some(&chosen)) {
                Step::Moved(next) => st = next,
                Step::Missing(..) => unreachable!("choice supplied"),
            }
        };
        for s in self.history.drain(mark..) {
            self.seen.remove(&s);
        }
        result
    }

    /// Tries every inner choice at `key`; the state `st` is already recorded.
    fn branch(
        &mut self,
        st: PlayState,
        key: usize,
        outer_choice: &dyn Fn(usize) -> Option<Choice>,
        inner_assign: &mut Vec<Option<u16>>,
    ) -> Result<Outcome, OracleError> {
        let v = st.node;
        // Undo the recording so that `inner` re-enters this state with the choice set.
        let last = self.history.pop().expect("state recorded");
        self.seen.remove(&last);
        let mut need = None;
        for i in 0..self.ctx.tables[v].len() {
            inner_assign[key] = Some(i as u16);
            match self.inner(st.clone(), outer_choice, inner_assign)? {
                Outcome::Counter => {
                    inner_assign[key] = None;
                    return Ok(Outcome::Counter);
                }
                Outcome::Need(k) => need = need.or(Some(k)),
                Outcome::AllGood => {}
            }
        }
        inner_assign[key] = None;
        Ok(need.map_or(Outcome::AllGood, Outcome::Need))
    }
}

impl<'a> Ctx<'a> {
    fn new(game: &'a FairGame, family: Family, budget: u64) -> Self {
        let ks = KeySpace::new(game, family.rule());
        Ctx {
            game,
            spaces: [ks, ks],
            tables: Rc::new(game.arena.nodes().map(|v| choices(game, v)).collect()),
            steps: 0,
            budget,
            counter: None,
        }
    }

    fn initial(&self, v0: NodeId) -> PlayState {
        PlayState::initial(v0, [self.spaces[0].size(), self.spaces[1].size()])
    }

    /// Does `outer` have a family strategy winning from `v0` against every
    /// family strategy of the opponent?
    fn wins(&mut self, outer: Player, v0: NodeId) -> Result<bool, OracleError> {
        let size = self.spaces[outer.index()].size();
        let mut assign: Vec<Option<u16>> = vec![None; size];
        self.extend(outer, v0, &mut assign)
    }

    fn extend(&mut self, outer: Player, v0: NodeId, assign: &mut Vec<Option<u16>>) -> Result<bool, OracleError> {
        let outcome = {
            let tables = Rc::clone(&self.tables);
            let fixed = assign.clone();
            let ks = self.spaces[outer.index()];
            let lookup = move |key: usize| -> Option<Choice> {
                fixed[key].map(|i| tables[ks.decode(key).0][i as usize].clone())
            };
            self.run_inner(outer, v0, &lookup)?
        };
        match outcome {
            Outcome::AllGood => Ok(true),
            Outcome::Counter => Ok(false),
            Outcome::Need(key) => {
                let (v, _) = self.spaces[outer.index()].decode(key);
                for i in 0..self.tables[v].len() {
                    assign[key] = Some(i as u16);
                    if self.extend(outer, v0, assign)? {
                        assign[key] = None;
                        return Ok(true);
                    }
                }
                assign[key] = None;
                Ok(false)
            }
        }
    }

    fn run_inner(
        &mut self,
        outer: Player,
        v0: NodeId,
        lookup: &dyn Fn(usize) -> Option<Choice>,
    ) -> Result<Outcome, OracleError> {
        let st = self.initial(v0);
        let size = self.spaces[outer.opponent().index()].size();
        let mut inner_assign = vec![None; size];
        let mut s = Search { ctx: self, outer, history: Vec::new(), seen: HashMap::new() };
        s.inner(st, lookup, &mut inner_assign)
    }
}

fn check_caps(game: &FairGame, config: &OracleConfig) -> Result<(), OracleError> {
    if game.len() > config.max_nodes {
        return Err(OracleError::Intractable(format!("{} nodes > {}", game.len(), config.max_nodes)));
    }
    if let Some(v) = game.arena.nodes().find(|&v| game.arena.fair_succ(v).len() > config.max_fair_out) {
        return Err(OracleError::Intractable(format!("node {v} has more than {} fair edges", config.max_fair_out)));
    }
    if game.d() > config.max_d {
        return Err(OracleError::Intractable(format!("d = {} > {}", game.d(), config.max_d)));
    }
    Ok(())
}

/// Exact regions under the default family and caps.
pub fn oracle_solve(game: &FairGame) -> Result<Regions, OracleError> {
    oracle_solve_with(game, Family::for_mode(game.beta_mode), &OracleConfig::default())
}

pub fn oracle_solve_with(game: &FairGame, family: Family, config: &OracleConfig) -> Result<Regions, OracleError> {
    check_caps(game, config)?;
    let winners: Vec<Player> = game
        .arena
        .nodes()
        .into_par_iter()
        .map(|v| {
            let exists = Ctx::new(game, family, config.step_budget).wins(Player::Exists, v)?;
            let forall = Ctx::new(game, family, config.step_budget).wins(Player::Forall, v)?;
            match (exists, forall) {
                (true, false) => Ok(Player::Exists),
                (false, true) => Ok(Player::Forall),
                _ => Err(OracleError::Indeterminate { node: v, exists, forall }),
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(Regions::from_winners(&winners))
}

/// Does the fixed strategy win from `v0` against every family strategy of
/// the opponent? The opponent family uses the fixed strategy's memory rule.
pub fn beats_all(game: &FairGame, v0: NodeId, fixed: &CyclingStrategy, budget: u64) -> Result<bool, OracleError> {
    Ok(counter_play(game, v0, fixed, budget)?.is_none())
}

/// A play from `v0` consistent with `fixed` that the opponent wins, if any.
pub fn counter_play(
    game: &FairGame,
    v0: NodeId,
    fixed: &CyclingStrategy,
    budget: u64,
) -> Result<Option<Lasso>, OracleError> {
    let family = match fixed.rule {
        MemoryRule::None => Family::Simple,
        MemoryRule::Annotated => Family::Annotated,
    };
    let mut ctx = Ctx::new(game, family, budget);
    let lookup = |key: usize| fixed.choices[key].clone();
    match ctx.run_inner(fixed.player, v0, &lookup)? {
        Outcome::AllGood => Ok(None),
        Outcome::Counter => Ok(ctx.counter.take()),
        Outcome::Need(key) => Err(OracleError::Undefined(ctx.spaces[fixed.player.index()].decode(key).0)),
    }
}
