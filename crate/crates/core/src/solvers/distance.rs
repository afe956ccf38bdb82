//! Interface simulation distance.

use serde_json::{json, Value};

use super::{discounted_value, mean_payoff_value_with, refines, MemorylessStrategy, SolveError, SolveOptions};
use crate::automata::WeightedAutomaton;
use crate::error_models::ErrorModel;
use crate::game::{build_quantitative_game, GameGraph};
use crate::rational::{parse_rational, to_decimal, to_pair, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    LimAvg,
    Disc { lambda: Rational, epsilon: f64 },
}

impl Objective {
    fn to_json(&self) -> Value {
        match self {
            Objective::LimAvg => json!("limavg"),
            Objective::Disc { lambda, epsilon } => {
                json!({ "disc": { "lambda": lambda.to_string(), "epsilon": format!("{epsilon:e}") } })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DistanceValue {
    Exact(Rational),
    Approx { value: f64, error: f64 },
}

impl DistanceValue {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            DistanceValue::Exact(r) => Some(r),
            DistanceValue::Approx { .. } => None,
        }
    }

    /// Decimal rendering; approximate values get enough digits to show
    /// their error bound.
    pub fn decimal(&self) -> String {
        match self {
            DistanceValue::Exact(r) => to_decimal(r, 6),
            DistanceValue::Approx { value, error } => {
                let digits = (-error.log10()).ceil().clamp(1.0, 15.0) as usize;
                format!("{value:.digits$}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct DistanceResult {
    pub value: DistanceValue,
    /// Boolean alternating refinement of the unmodified automata.
    pub refines: bool,
    /// Player 1 (the spoiler, moving in the left automaton).
    pub spoiler: MemorylessStrategy,
    /// Player 2 (the matcher, answering in the right automaton).
    pub matcher: MemorylessStrategy,
    pub objective: Objective,
    pub game: GameGraph,
}

impl DistanceResult {
    pub fn game_size(&self) -> (usize, usize) {
        (self.game.num_states(), self.game.num_edges())
    }

    pub fn to_json(&self) -> Value {
        let value = match &self.value {
            DistanceValue::Exact(r) => {
                let (num, den) = to_pair(r);
                json!({ "num": num, "den": den })
            }
            DistanceValue::Approx { .. } => {
                let r = parse_rational(&self.value.decimal()).expect("decimal parses");
                let (num, den) = to_pair(&r);
                json!({ "num": num, "den": den })
            }
        };
        let mut out = json!({
            "value": value,
            "decimal": self.value.decimal(),
            "refines": self.refines,
            "objective": self.objective.to_json(),
            "game": { "states": self.game.num_states(), "edges": self.game.num_edges() },
            "strategies": {
                "player1": self.spoiler.to_json(&self.game),
                "player2": self.matcher.to_json(&self.game),
            },
        });
        if let DistanceValue::Approx { error, .. } = &self.value {
            out["errorBound"] = json!(format!("{error:e}"));
        }
        out
    }
}

/// `d(spec ⊗ m_o, imp ⊗ m_i)` under `objective`.
pub fn distance(
    spec: &WeightedAutomaton,
    m_o: &ErrorModel,
    imp: &WeightedAutomaton,
    m_i: &ErrorModel,
    objective: &Objective,
) -> Result<DistanceResult, SolveError> {
    distance_with(spec, m_o, imp, m_i, objective, &SolveOptions::default())
}

pub fn distance_with(
    spec: &WeightedAutomaton,
    m_o: &ErrorModel,
    imp: &WeightedAutomaton,
    m_i: &ErrorModel,
    objective: &Objective,
    options: &SolveOptions,
) -> Result<DistanceResult, SolveError> {
    let game = build_quantitative_game(spec, m_o, imp, m_i)?;
    let boolean = refines(spec, imp).refines;
    let init = game.initial();
    let (value, spoiler, matcher) = match objective {
        Objective::LimAvg => {
            let sol = mean_payoff_value_with(&game, options)?;
            (DistanceValue::Exact(sol.values[init].clone()), sol.player1, sol.player2)
        }
        Objective::Disc { lambda, epsilon } => {
            let sol = discounted_value(&game, lambda, *epsilon)?;
            (DistanceValue::Approx { value: sol.values[init], error: sol.error_bound }, sol.player1, sol.player2)
        }
    };
    Ok(DistanceResult { value, refines: boolean, spoiler, matcher, objective: objective.clone(), game })
}
