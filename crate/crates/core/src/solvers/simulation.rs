//! Alternating simulation: greatest fixpoint and the game-based check.

use std::collections::BTreeSet;

use super::{solve_reachability, MemorylessStrategy};
use crate::automata::WeightedAutomaton;
use crate::game::{build_boolean_game, check_alphabets, GameError};

/// A set of pairs (state of the refined interface, state of the refining one).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimulationRelation {
    pub pairs: BTreeSet<(String, String)>,
}

impl SimulationRelation {
    pub fn contains(&self, spec_state: &str, imp_state: &str) -> bool {
        self.pairs.contains(&(spec_state.to_string(), imp_state.to_string()))
    }

    /// Whether the relation satisfies both alternating-simulation clauses.
    pub fn is_alternating_simulation(&self, spec: &WeightedAutomaton, imp: &WeightedAutomaton) -> bool {
        let ids: BTreeSet<(usize, usize)> = self
            .pairs
            .iter()
            .filter_map(|(p, q)| Some((spec.state_id(p)?, imp.state_id(q)?)))
            .collect();
        ids.len() == self.pairs.len() && ids.iter().all(|&(p, q)| step_ok(spec, imp, p, q, |a, b| ids.contains(&(a, b))))
    }
}

/// Both clauses at `(p, q)`: every input of `spec` at `p` is matched by
/// `imp` at `q`, and every output of `imp` at `q` is matched by `spec` at
/// `p`, with related successors.
fn step_ok(
    spec: &WeightedAutomaton,
    imp: &WeightedAutomaton,
    p: usize,
    q: usize,
    related: impl Fn(usize, usize) -> bool,
) -> bool {
    let inputs_ok = spec
        .outgoing(p)
        .iter()
        .filter(|t| spec.inputs().contains(&t.action))
        .all(|t| imp.successors(q, &t.action).any(|u| related(t.to, u.to)));
    let outputs_ok = imp
        .outgoing(q)
        .iter()
        .filter(|u| imp.outputs().contains(&u.action))
        .all(|u| spec.successors(p, &u.action).any(|t| related(t.to, u.to)));
    inputs_ok && outputs_ok
}

/// The largest alternating simulation between `spec` and `imp`.
pub fn maximal_simulation(spec: &WeightedAutomaton, imp: &WeightedAutomaton) -> SimulationRelation {
    let (n, m) = (spec.num_states(), imp.num_states());
    let mut rel = vec![true; n * m];
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in 0..m {
                if rel[p * m + q] && !step_ok(spec, imp, p, q, |a, b| rel[a * m + b]) {
                    rel[p * m + q] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let pairs = (0..n)
        .flat_map(|p| (0..m).map(move |q| (p, q)))
        .filter(|&(p, q)| rel[p * m + q])
        .map(|(p, q)| (spec.state_name(p).to_string(), imp.state_name(q).to_string()))
        .collect();
    SimulationRelation { pairs }
}

#[derive(Clone, Debug)]
pub struct Refinement {
    /// `spec ⪰ imp`.
    pub refines: bool,
    /// Empty when the alphabet precondition fails.
    pub relation: SimulationRelation,
    /// Set when the signatures already rule out refinement.
    pub alphabet_error: Option<GameError>,
    /// Player 1 strategy reaching `s_err` when refinement fails.
    pub counterexample: Option<MemorylessStrategy>,
    /// Number of states and edges of the boolean game.
    pub game_size: (usize, usize),
}

/// Decides `spec ⪰ imp` on the boolean game and cross-checks the verdict
/// against the greatest-fixpoint relation.
pub fn refines(spec: &WeightedAutomaton, imp: &WeightedAutomaton) -> Refinement {
    if let Err(e) = check_alphabets(spec, imp) {
        return Refinement {
            refines: false,
            relation: SimulationRelation::default(),
            alphabet_error: Some(e),
            counterexample: None,
            game_size: (0, 0),
        };
    }
    let game = build_boolean_game(spec, imp).expect("alphabets checked");
    let sink = game.sink().expect("boolean game has a sink");
    let reach = solve_reachability(&game, &BTreeSet::from([sink]));
    let verdict = !reach.winning1.contains(&game.initial());
    let relation = maximal_simulation(spec, imp);
    let by_fixpoint = relation.contains(spec.state_name(spec.initial()), imp.state_name(imp.initial()));
    assert_eq!(verdict, by_fixpoint, "game and fixpoint disagree on {} vs {}", spec.name(), imp.name());
    Refinement {
        refines: verdict,
        relation,
        alphabet_error: None,
        counterexample: (!verdict).then_some(reach.strategy1),
        game_size: (game.num_states(), game.num_edges()),
    }
}
