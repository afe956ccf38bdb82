//! Alternating refinement and quantitative interface simulation distances
//! for broadcast interface automata.

pub mod abstraction;
pub mod automata;
pub mod composition;
pub mod error_models;
pub mod game;
pub mod rational;
pub mod solvers;

pub use abstraction::{abstract_automaton, AbstractionError, Mode, Partition};
pub use automata::{
    validate_bia, ActionId, ActionKind, Bia, ModelError, QueryError, RawModel, RawTransition, StateId,
    Transition, Weight, WeightedAutomaton,
};
pub use composition::{compose, compose_bia, composable, CompositionError, CompositionReport};
pub use error_models::{
    apply_error_model, max_finite_weight, validate_error_model, CompositionSafety, ErrorModel, ErrorModelError,
    RawErrorModel,
};
pub use game::{build_boolean_game, build_quantitative_game, GameError, GameGraph, GameState, Player};
pub use rational::Rational;
pub use solvers::{
    brute_force_value, discounted_value, distance, mean_payoff_value, refines, solve_reachability, DistanceResult,
    MemorylessStrategy, Objective,
};
