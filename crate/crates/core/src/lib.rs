//! Solvers for two-player parity games with strong transition fairness.
//!
//! Three independent routes compute winning regions: a gadget reduction to
//! ordinary parity games solved with Zielonka's algorithm
//! ([`reduction`]), nested fixpoint evaluation ([`fixpoint`]) and exhaustive
//! search over cycling strategies on small instances ([`oracle`]).

pub mod arena;
pub mod fixpoint;
pub mod format;
pub mod harness;
pub mod nodeset;
pub mod oracle;
pub mod paritygame;
pub mod reduction;
pub mod strategy;

pub use arena::{BetaMode, FairArena, FairGame, Lasso, NodeId, Player};
pub use paritygame::{ParityGame, Regions};
