//! Game solvers and the `refines` / `distance` entry points.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::game::{GameError, GameGraph, Player};
use crate::automata::StateId;

mod brute_force;
mod cycle_mean;
mod discounted;
mod distance;
mod mean_payoff;
mod reachability;
mod simulation;

pub use brute_force::{brute_force_value, BruteForceResult, BRUTE_FORCE_MAX_STATES};
pub use discounted::{bellman_residual, discounted_value, DiscountedSolution};
pub use distance::{distance, distance_with, DistanceResult, DistanceValue, Objective};
pub use mean_payoff::{mean_payoff_value, mean_payoff_value_with, one_player_values, MeanPayoffSolution};
pub use reachability::{solve_reachability, ReachabilityResult};
pub use simulation::{maximal_simulation, refines, Refinement, SimulationRelation};

/// Default cap on the number of edge relaxations the mean-payoff dynamic
/// program may perform.
pub const DEFAULT_BUDGET: u64 = 100_000_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("game too large: {states} states, {edges} edges; {detail}")]
    TooLarge { states: usize, edges: usize, detail: String },
    #[error("discount factor must lie strictly between 0 and 1, got {0}")]
    InvalidLambda(String),
    #[error("invalid epsilon: {0}")]
    InvalidEpsilon(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("internal solver error: {0}")]
    Internal(String),
}

/// A positional strategy: the successor chosen at every state of `owner`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemorylessStrategy {
    pub owner: Player,
    pub choice: BTreeMap<StateId, StateId>,
}

impl MemorylessStrategy {
    pub fn new(owner: Player) -> Self {
        MemorylessStrategy { owner, choice: BTreeMap::new() }
    }

    pub(crate) fn from_targets(game: &GameGraph, owner: Player, targets: &[usize]) -> Self {
        let choice = (0..game.num_states())
            .filter(|&s| game.owner(s) == owner)
            .map(|s| (s, targets[s]))
            .collect();
        MemorylessStrategy { owner, choice }
    }

    /// Every choice is an edge of `game` out of a state of the owner.
    pub fn is_valid(&self, game: &GameGraph) -> bool {
        self.choice
            .iter()
            .all(|(&s, &t)| game.owner(s) == self.owner && game.edges(s).iter().any(|e| e.to == t))
    }

    pub fn get(&self, s: StateId) -> Option<StateId> {
        self.choice.get(&s).copied()
    }

    /// `{"state label": {"to": "target label", "action": ...}}`
    pub fn to_json(&self, game: &GameGraph) -> Value {
        let map: serde_json::Map<String, Value> = self
            .choice
            .iter()
            .map(|(&s, &t)| {
                let action = game.edges(s).iter().find(|e| e.to == t).and_then(|e| e.action.clone());
                (game.label(s), json!({ "to": game.label(t), "action": action }))
            })
            .collect();
        Value::Object(map)
    }
}

/// Flat adjacency used by the numeric solvers.
pub(crate) struct Arena {
    pub n: usize,
    pub off: Vec<usize>,
    pub to: Vec<usize>,
    pub w: Vec<i64>,
    pub max_player: Vec<bool>,
}

impl Arena {
    pub fn new(game: &GameGraph) -> Self {
        let n = game.num_states();
        let mut off = Vec::with_capacity(n + 1);
        let mut to = Vec::new();
        let mut w = Vec::new();
        off.push(0);
        for s in 0..n {
            for e in game.edges(s) {
                to.push(e.to);
                w.push(i64::try_from(e.weight).expect("edge weight fits in i64"));
            }
            off.push(to.len());
        }
        let max_player = (0..n).map(|s| game.owner(s) == Player::One).collect();
        Arena { n, off, to, w, max_player }
    }

    pub fn m(&self) -> usize {
        self.to.len()
    }

    pub fn edges(&self, s: usize) -> std::ops::Range<usize> {
        self.off[s]..self.off[s + 1]
    }

    pub fn max_weight(&self) -> i64 {
        self.w.iter().copied().max().unwrap_or(0)
    }
}
