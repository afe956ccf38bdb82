//! Alternating simulation games, boolean and weighted.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::automata::{ActionKind, StateId, Weight, WeightedAutomaton};
use crate::error_models::{apply_error_model, max_finite_weight, ErrorModel, ErrorModelError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    #[serde(rename = "player1")]
    One,
    #[serde(rename = "player2")]
    Two,
}

impl Player {
    pub fn opponent(self) -> Self {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

/// What a game state stands for. `spec` is a state of the left automaton
/// (the one carrying the output error model), `imp` one of the right.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GameState {
    /// `(s, #, s')`
    Choose { spec: String, imp: String },
    /// `(s, σ, s')`: Player 2 has to answer `σ`
    Answer { spec: String, action: String, kind: ActionKind, imp: String },
    /// `s_err`
    Sink,
    /// A state of a game not built from automata.
    Vertex { name: String },
}

impl GameState {
    pub fn owner(&self) -> Player {
        match self {
            GameState::Answer { .. } => Player::Two,
            GameState::Choose { .. } | GameState::Sink => Player::One,
            GameState::Vertex { .. } => unreachable!("vertex owners are stored on the graph"),
        }
    }

    pub fn label(&self) -> String {
        match self {
            GameState::Choose { spec, imp } => format!("({spec},#,{imp})"),
            GameState::Answer { spec, action, kind, imp } => {
                format!("({spec},{action}{},{imp})", kind.decoration())
            }
            GameState::Sink => "s_err".to_string(),
            GameState::Vertex { name } => name.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub to: StateId,
    pub weight: Weight,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("alphabet precondition fails: inputs of `{spec}` missing from `{imp}`: {missing_inputs:?}; outputs of `{imp}` missing from `{spec}`: {extra_outputs:?}")]
    AlphabetPrecondition { spec: String, imp: String, missing_inputs: Vec<String>, extra_outputs: Vec<String> },
    #[error(transparent)]
    ErrorModel(#[from] ErrorModelError),
    #[error("game state {state} has no outgoing edge")]
    NotTotal { state: usize },
    #[error("edge {from} -> {to} leaves the game")]
    BadEdge { from: usize, to: usize },
}

/// A finite two-player game graph with nonnegative integer weights. Edges
/// out of every state are sorted by (action, target label).
#[derive(Clone, Debug)]
pub struct GameGraph {
    states: Vec<GameState>,
    owners: Vec<Player>,
    edges: Vec<Vec<Edge>>,
    initial: StateId,
    sink: Option<StateId>,
}

impl GameGraph {
    /// A game over anonymous vertices `v0, v1, ...`.
    pub fn from_edges(
        owners: Vec<Player>,
        edges: impl IntoIterator<Item = (StateId, StateId, Weight)>,
        initial: StateId,
    ) -> Result<Self, GameError> {
        let n = owners.len();
        let mut out: Vec<Vec<Edge>> = vec![Vec::new(); n];
        for (from, to, weight) in edges {
            if from >= n || to >= n {
                return Err(GameError::BadEdge { from, to });
            }
            out[from].push(Edge { to, weight, action: None });
        }
        let states = (0..n).map(|i| GameState::Vertex { name: format!("v{i}") }).collect();
        let g = GameGraph { states, owners, edges: out, initial, sink: None };
        g.check_total()?;
        Ok(g.normalized())
    }

    fn check_total(&self) -> Result<(), GameError> {
        match self.edges.iter().position(|e| e.is_empty()) {
            Some(state) => Err(GameError::NotTotal { state }),
            None => Ok(()),
        }
    }

    /// Sorts edges and keeps the cheapest of parallel edges.
    fn normalized(mut self) -> Self {
        let labels: Vec<String> = self.states.iter().map(GameState::label).collect();
        for out in &mut self.edges {
            out.sort_by(|a, b| {
                (&a.action, &labels[a.to], a.weight).cmp(&(&b.action, &labels[b.to], b.weight))
            });
            let mut best: HashMap<StateId, usize> = HashMap::new();
            let mut keep = vec![true; out.len()];
            for (i, e) in out.iter().enumerate() {
                match best.get(&e.to) {
                    Some(&j) if out[j].weight <= e.weight => keep[i] = false,
                    Some(&j) => {
                        keep[j] = false;
                        best.insert(e.to, i);
                    }
                    None => {
                        best.insert(e.to, i);
                    }
                }
            }
            let mut k = keep.into_iter();
            out.retain(|_| k.next().unwrap());
        }
        self
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn state(&self, s: StateId) -> &GameState {
        &self.states[s]
    }

    pub fn states(&self) -> &[GameState] {
        &self.states
    }

    pub fn label(&self, s: StateId) -> String {
        self.states[s].label()
    }

    pub fn owner(&self, s: StateId) -> Player {
        self.owners[s]
    }

    pub fn edges(&self, s: StateId) -> &[Edge] {
        &self.edges[s]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn sink(&self) -> Option<StateId> {
        self.sink
    }

    pub fn max_weight(&self) -> Weight {
        self.edges.iter().flatten().map(|e| e.weight).max().unwrap_or(0)
    }

    pub fn find(&self, state: &GameState) -> Option<StateId> {
        self.states.iter().position(|s| s == state)
    }

    /// Graphviz rendering. Nodes and edges are emitted in label order.
    pub fn to_dot(&self) -> String {
        let mut order: Vec<StateId> = (0..self.num_states()).collect();
        order.sort_by_key(|&s| self.label(s));
        let mut out = String::from("digraph game {\n");
        for &s in &order {
            let shape = match (self.sink == Some(s), self.owners[s]) {
                (true, _) => "doublecircle",
                (false, Player::One) => "box",
                (false, Player::Two) => "ellipse",
            };
            let init = if s == self.initial { ", penwidth=2" } else { "" };
            let _ = writeln!(out, "  n{s} [label={}, shape={shape}{init}];", quote(&self.label(s)));
        }
        for &s in &order {
            let mut edges: Vec<&Edge> = self.edges[s].iter().collect();
            edges.sort_by_key(|e| (e.action.clone(), self.label(e.to)));
            for e in edges {
                let action = match (&e.action, self.action_kind(s, e)) {
                    (Some(a), Some(kind)) => format!("{a}{}", kind.decoration()),
                    (Some(a), None) => a.clone(),
                    (None, _) => "-".to_string(),
                };
                let label = format!("{action}/{}", e.weight);
                let _ = writeln!(out, "  n{s} -> n{} [label={}];", e.to, quote(&label));
            }
        }
        out.push_str("}\n");
        out
    }

    /// Kind of the action on `e`, read off the answer state at either end.
    fn action_kind(&self, s: StateId, e: &Edge) -> Option<ActionKind> {
        [s, e.to].into_iter().find_map(|x| match &self.states[x] {
            GameState::Answer { kind, .. } => Some(*kind),
            _ => None,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let states: Vec<_> = (0..self.num_states())
            .map(|s| serde_json::json!({ "id": s, "owner": self.owners[s], "label": self.label(s), "payload": self.states[s] }))
            .collect();
        let edges: Vec<_> = (0..self.num_states())
            .flat_map(|s| {
                self.edges[s]
                    .iter()
                    .map(move |e| serde_json::json!({ "src": s, "dst": e.to, "weight": e.weight, "action": e.action }))
            })
            .collect();
        serde_json::json!({ "states": states, "edges": edges, "initial": self.initial })
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Checks `A^I_spec ⊆ A^I_imp` and `A^O_spec ⊇ A^O_imp`.
pub fn check_alphabets(spec: &WeightedAutomaton, imp: &WeightedAutomaton) -> Result<(), GameError> {
    let missing_inputs: Vec<String> = spec.inputs().difference(imp.inputs()).cloned().collect();
    let extra_outputs: Vec<String> = imp.outputs().difference(spec.outputs()).cloned().collect();
    if missing_inputs.is_empty() && extra_outputs.is_empty() {
        Ok(())
    } else {
        Err(GameError::AlphabetPrecondition {
            spec: spec.name().to_string(),
            imp: imp.name().to_string(),
            missing_inputs,
            extra_outputs,
        })
    }
}

/// Upper bound on the number of game states, `|Q|·|Q'|·(|A|+|A'|+1)+1`.
pub fn state_bound(spec: &WeightedAutomaton, imp: &WeightedAutomaton) -> usize {
    spec.num_states() * imp.num_states() * (spec.alphabet_size() + imp.alphabet_size() + 1) + 1
}

/// The game for `spec ⪰ imp` with all weights 0.
pub fn build_boolean_game(spec: &WeightedAutomaton, imp: &WeightedAutomaton) -> Result<GameGraph, GameError> {
    check_alphabets(spec, imp)?;
    Ok(build(spec, imp, 0, false))
}

/// The game over `spec ⊗ m_o` and `imp ⊗ m_i`.
pub fn build_quantitative_game(
    spec: &WeightedAutomaton,
    m_o: &ErrorModel,
    imp: &WeightedAutomaton,
    m_i: &ErrorModel,
) -> Result<GameGraph, GameError> {
    check_alphabets(spec, imp)?;
    let spec_m = apply_error_model(spec, m_o)?;
    let imp_m = apply_error_model(imp, m_i)?;
    Ok(build(&spec_m, &imp_m, max_finite_weight(m_i, m_o), true))
}

/// Reachable part of the game between two (already modified) automata.
pub fn build(spec: &WeightedAutomaton, imp: &WeightedAutomaton, sink_weight: Weight, weighted: bool) -> GameGraph {
    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    enum Key<'a> {
        Choose(StateId, StateId),
        Answer(StateId, &'a str, StateId),
    }

    let mut keys: Vec<Key> = Vec::new();
    let mut index: HashMap<Key, StateId> = HashMap::new();
    let mut raw_edges: Vec<Vec<Edge>> = Vec::new();
    let mut queue = VecDeque::new();

    let mut get = |k, keys: &mut Vec<_>, queue: &mut VecDeque<StateId>, raw_edges: &mut Vec<Vec<Edge>>| {
        *index.entry(k).or_insert_with(|| {
            keys.push(k);
            raw_edges.push(Vec::new());
            queue.push_back(keys.len() - 1);
            keys.len() - 1
        })
    };

    let init = get(Key::Choose(spec.initial(), imp.initial()), &mut keys, &mut queue, &mut raw_edges);
    debug_assert_eq!(init, 0);
    let mut needs_sink: Vec<StateId> = Vec::new();
    let w = |x: Weight| if weighted { 2 * x } else { 0 };

    while let Some(s) = queue.pop_front() {
        match keys[s] {
            Key::Choose(p, q) => {
                let mut out = Vec::new();
                for t in spec.outgoing(p) {
                    if spec.inputs().contains(&t.action) {
                        let k = Key::Answer(t.to, t.action.as_str(), q);
                        out.push(Edge { to: get(k, &mut keys, &mut queue, &mut raw_edges), weight: 0, action: Some(t.action.clone()) });
                    }
                }
                for t in imp.outgoing(q) {
                    if imp.outputs().contains(&t.action) {
                        let k = Key::Answer(p, t.action.as_str(), t.to);
                        out.push(Edge { to: get(k, &mut keys, &mut queue, &mut raw_edges), weight: 0, action: Some(t.action.clone()) });
                    }
                }
                if out.is_empty() {
                    out.push(Edge { to: s, weight: 0, action: None });
                }
                raw_edges[s] = out;
            }
            Key::Answer(p, action, q) => {
                let mut out = Vec::new();
                if spec.inputs().contains(action) {
                    for t in imp.successors(q, action) {
                        let k = Key::Choose(p, t.to);
                        out.push(Edge { to: get(k, &mut keys, &mut queue, &mut raw_edges), weight: w(t.weight), action: Some(action.to_string()) });
                    }
                } else {
                    for t in spec.successors(p, action) {
                        let k = Key::Choose(t.to, q);
                        out.push(Edge { to: get(k, &mut keys, &mut queue, &mut raw_edges), weight: w(t.weight), action: Some(action.to_string()) });
                    }
                }
                if out.is_empty() {
                    needs_sink.push(s);
                }
                raw_edges[s] = out;
            }
        }
    }

    let sink = keys.len();
    let mut states: Vec<GameState> = keys
        .iter()
        .map(|k| match *k {
            Key::Choose(p, q) => GameState::Choose { spec: spec.state_name(p).to_string(), imp: imp.state_name(q).to_string() },
            Key::Answer(p, a, q) => GameState::Answer {
                spec: spec.state_name(p).to_string(),
                action: a.to_string(),
                kind: if spec.inputs().contains(a) { ActionKind::Input } else { ActionKind::Output },
                imp: imp.state_name(q).to_string(),
            },
        })
        .collect();
    states.push(GameState::Sink);
    for s in needs_sink {
        raw_edges[s].push(Edge { to: sink, weight: 0, action: None });
    }
    raw_edges.push(vec![Edge { to: sink, weight: sink_weight, action: None }]);
    let owners = states.iter().map(GameState::owner).collect();

    GameGraph { states, owners, edges: raw_edges, initial: 0, sink: Some(sink) }.normalized()
}

/// Labels of the states reachable from the initial state.
pub fn reachable(game: &GameGraph) -> BTreeSet<StateId> {
    let mut seen = BTreeSet::from([game.initial()]);
    let mut queue = VecDeque::from([game.initial()]);
    while let Some(s) = queue.pop_front() {
        for e in game.edges(s) {
            if seen.insert(e.to) {
                queue.push_back(e.to);
            }
        }
    }
    seen
}
