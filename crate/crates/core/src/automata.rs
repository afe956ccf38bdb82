//! Broadcast interface automata and their weighted generalisation.
//!
//! A [`WeightedAutomaton`] is the general carrier: finite states, disjoint
//! input/output signatures and a transition relation whose edges carry a
//! natural-number weight. A [`Bia`] is a weighted automaton that is
//! input-deterministic and has only zero weights.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type StateId = usize;
pub type Weight = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Input,
    Output,
}

impl ActionKind {
    /// Suffix used when rendering an action of this kind (`a?`, `x!`).
    pub fn decoration(self) -> char {
        match self {
            ActionKind::Input => '?',
            ActionKind::Output => '!',
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionKind::Input => f.write_str("input"),
            ActionKind::Output => f.write_str("output"),
        }
    }
}

/// An action name together with its kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId {
    pub name: String,
    pub kind: ActionKind,
}

impl ActionId {
    pub fn input(name: impl Into<String>) -> Self {
        ActionId { name: name.into(), kind: ActionKind::Input }
    }

    pub fn output(name: impl Into<String>) -> Self {
        ActionId { name: name.into(), kind: ActionKind::Output }
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, self.kind.decoration())
    }
}

/// Returns true for non-empty names over `[A-Za-z0-9_]`.
pub fn is_valid_action_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub action: String,
    pub to: StateId,
    pub weight: Weight,
}

/// A single problem found while validating a model. Every variant names
/// the offending state and/or action.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("state `{0}` is declared more than once")]
    DuplicateState(String),
    #[error("transition ({from}, {action}, {to}) refers to undeclared state `{state}`")]
    UnknownEndpoint { state: String, from: String, action: String, to: String },
    #[error("transition from `{from}` uses undeclared action `{action}`")]
    UnknownAction { from: String, action: String },
    #[error("action `{0}` is declared both as input and as output")]
    AlphabetOverlap(String),
    #[error("state `{state}` has several `{action}?` successors: {}", targets.join(", "))]
    InputNondeterminism { state: String, action: String, targets: Vec<String> },
    #[error("initial state `{0}` is not a declared state")]
    MissingInitial(String),
    #[error("action name `{0}` must be non-empty and use only [A-Za-z0-9_]")]
    InvalidActionName(String),
    #[error("transition ({from}, {action}, {to}) has non-zero weight {weight}")]
    NonzeroWeight { from: String, action: String, to: String, weight: Weight },
}

/// Errors of the point queries [`WeightedAutomaton::post`] and
/// [`WeightedAutomaton::enabled`].
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
}

/// One transition of the JSON model format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTransition {
    pub from: String,
    pub action: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub weight: Weight,
}

fn is_zero(w: &Weight) -> bool {
    *w == 0
}

/// The JSON model format, exactly as read from or written to disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawModel {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<RawTransition>,
}

impl RawModel {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialisation cannot fail")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedAutomaton {
    name: String,
    states: Vec<String>,
    index: HashMap<String, StateId>,
    initial: StateId,
    inputs: BTreeSet<String>,
    outputs: BTreeSet<String>,
    // outgoing transitions per state, sorted by (action, target name)
    out: Vec<Vec<Transition>>,
}

impl WeightedAutomaton {
    /// Builds an automaton from its parts, reporting every problem found.
    /// Input determinism is not checked here; see [`Bia::from_weighted`].
    pub fn new<S, A, B, T>(
        name: impl Into<String>,
        states: S,
        initial: &str,
        inputs: A,
        outputs: B,
        transitions: T,
    ) -> Result<Self, Vec<ModelError>>
    where
        S: IntoIterator,
        S::Item: Into<String>,
        A: IntoIterator,
        A::Item: Into<String>,
        B: IntoIterator,
        B::Item: Into<String>,
        T: IntoIterator<Item = (String, String, String, Weight)>,
    {
        let mut errors = Vec::new();

        let mut state_list = Vec::new();
        let mut index = HashMap::new();
        for s in states {
            let s = s.into();
            if index.contains_key(&s) {
                errors.push(ModelError::DuplicateState(s));
                continue;
            }
            index.insert(s.clone(), state_list.len());
            state_list.push(s);
        }

        let inputs: BTreeSet<String> = inputs.into_iter().map(Into::into).collect();
        let outputs: BTreeSet<String> = outputs.into_iter().map(Into::into).collect();
        for a in inputs.iter().chain(outputs.iter()) {
            if !is_valid_action_name(a) {
                errors.push(ModelError::InvalidActionName(a.clone()));
            }
        }
        for a in inputs.intersection(&outputs) {
            errors.push(ModelError::AlphabetOverlap(a.clone()));
        }

        let initial_id = match index.get(initial) {
            Some(&id) => id,
            None => {
                errors.push(ModelError::MissingInitial(initial.to_string()));
                0
            }
        };

        let mut edges: BTreeMap<(StateId, String, StateId), Weight> = BTreeMap::new();
        for (from, action, to, weight) in transitions {
            let mut ok = true;
            for endpoint in [&from, &to] {
                if !index.contains_key(endpoint) {
                    errors.push(ModelError::UnknownEndpoint {
                        state: endpoint.clone(),
                        from: from.clone(),
                        action: action.clone(),
                        to: to.clone(),
                    });
                    ok = false;
                }
            }
            if !inputs.contains(&action) && !outputs.contains(&action) {
                errors.push(ModelError::UnknownAction { from: from.clone(), action: action.clone() });
                ok = false;
            }
            if ok {
                let key = (index[&from], action, index[&to]);
                edges
                    .entry(key)
                    .and_modify(|w| *w = (*w).min(weight))
                    .or_insert(weight);
            }
        }

        if !errors.is_empty() {
            return Err(errors);
        }

        let mut out = vec![Vec::new(); state_list.len()];
        for ((from, action, to), weight) in edges {
            out[from].push(Transition { from, action, to, weight });
        }
        for list in &mut out {
            list.sort_by(|a, b| {
                a.action
                    .cmp(&b.action)
                    .then_with(|| state_list[a.to].cmp(&state_list[b.to]))
            });
        }

        Ok(WeightedAutomaton {
            name: name.into(),
            states: state_list,
            index,
            initial: initial_id,
            inputs,
            outputs,
            out,
        })
    }

    /// Builds an automaton from the JSON model format.
    pub fn from_raw(raw: &RawModel) -> Result<Self, Vec<ModelError>> {
        WeightedAutomaton::new(
            raw.name.clone(),
            raw.states.iter().cloned(),
            &raw.initial,
            raw.inputs.clone(),
            raw.outputs.clone(),
            raw.transitions
                .iter()
                .map(|t| (t.from.clone(), t.action.clone(), t.to.clone(), t.weight)),
        )
    }

    pub fn to_raw(&self) -> RawModel {
        RawModel {
            name: self.name.clone(),
            inputs: self.inputs.iter().cloned().collect(),
            outputs: self.outputs.iter().cloned().collect(),
            states: self.states.clone(),
            initial: self.states[self.initial].clone(),
            transitions: self
                .transitions()
                .map(|t| RawTransition {
                    from: self.states[t.from].clone(),
                    action: t.action.clone(),
                    to: self.states[t.to].clone(),
                    weight: t.weight,
                })
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn inputs(&self) -> &BTreeSet<String> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<String> {
        &self.outputs
    }

    /// Declared alphabet of the given kind.
    pub fn alphabet(&self, kind: ActionKind) -> &BTreeSet<String> {
        match kind {
            ActionKind::Input => &self.inputs,
            ActionKind::Output => &self.outputs,
        }
    }

    /// Number of declared actions, inputs and outputs together.
    pub fn alphabet_size(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }

    pub fn kind_of(&self, action: &str) -> Option<ActionKind> {
        if self.inputs.contains(action) {
            Some(ActionKind::Input)
        } else if self.outputs.contains(action) {
            Some(ActionKind::Output)
        } else {
            None
        }
    }

    /// All transitions, grouped by source state in declaration order.
    pub fn transitions(&self) -> impl Iterator<Item = &Transition> {
        self.out.iter().flatten()
    }

    pub fn num_transitions(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Outgoing transitions of `q`, sorted by action and target name.
    pub fn outgoing(&self, q: StateId) -> &[Transition] {
        &self.out[q]
    }

    /// Transitions leaving `q` on `action`.
    pub fn successors<'a>(
        &'a self,
        q: StateId,
        action: &'a str,
    ) -> impl Iterator<Item = &'a Transition> + 'a {
        self.out[q].iter().filter(move |t| t.action == action)
    }

    /// Targets of the transitions leaving `q` on `action`.
    pub fn post(&self, q: &str, action: &str) -> Result<BTreeSet<&str>, QueryError> {
        let id = self
            .state_id(q)
            .ok_or_else(|| QueryError::UnknownState(q.to_string()))?;
        if self.kind_of(action).is_none() {
            return Err(QueryError::UnknownAction(action.to_string()));
        }
        Ok(self
            .successors(id, action)
            .map(|t| self.states[t.to].as_str())
            .collect())
    }

    /// Actions of the given kind with at least one transition out of `q`.
    pub fn enabled(&self, q: &str, kind: ActionKind) -> Result<BTreeSet<&str>, QueryError> {
        let id = self
            .state_id(q)
            .ok_or_else(|| QueryError::UnknownState(q.to_string()))?;
        Ok(self.enabled_at(id, kind))
    }

    pub fn enabled_at(&self, q: StateId, kind: ActionKind) -> BTreeSet<&str> {
        let alphabet = self.alphabet(kind);
        self.out[q]
            .iter()
            .filter(|t| alphabet.contains(&t.action))
            .map(|t| t.action.as_str())
            .collect()
    }

    pub fn is_enabled(&self, q: StateId, action: &str) -> bool {
        self.out[q].iter().any(|t| t.action == action)
    }

    /// States reachable from the initial state, in breadth-first order;
    /// successors are visited by action name, then target name.
    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.states.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        seen[self.initial] = true;
        queue.push_back(self.initial);
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for t in &self.out[q] {
                if !seen[t.to] {
                    seen[t.to] = true;
                    queue.push_back(t.to);
                }
            }
        }
        order
    }

    /// Names of the reachable states, in the order of [`Self::reachable`].
    pub fn reachable_names(&self) -> Vec<&str> {
        self.reachable()
            .into_iter()
            .map(|q| self.states[q].as_str())
            .collect()
    }

    /// Largest transition weight (0 for an automaton without transitions).
    pub fn max_weight(&self) -> Weight {
        self.transitions().map(|t| t.weight).max().unwrap_or(0)
    }

    /// Checks input determinism, returning one error per offending
    /// (state, input) pair.
    pub fn input_nondeterminism(&self) -> Vec<ModelError> {
        let mut errors = Vec::new();
        for (q, list) in self.out.iter().enumerate() {
            let mut by_action: BTreeMap<&str, Vec<String>> = BTreeMap::new();
            for t in list.iter().filter(|t| self.inputs.contains(&t.action)) {
                by_action
                    .entry(&t.action)
                    .or_default()
                    .push(self.states[t.to].clone());
            }
            for (action, targets) in by_action {
                if targets.len() > 1 {
                    errors.push(ModelError::InputNondeterminism {
                        state: self.states[q].clone(),
                        action: action.to_string(),
                        targets,
                    });
                }
            }
        }
        errors
    }

    /// Restricts the automaton to the given states (the initial state must
    /// be among them); transitions touching removed states are dropped.
    pub(crate) fn restrict(&self, keep: &[StateId], drop_edge: impl Fn(&Transition) -> bool) -> Self {
        let mut new_id = vec![usize::MAX; self.states.len()];
        for (i, &q) in keep.iter().enumerate() {
            new_id[q] = i;
        }
        let states: Vec<String> = keep.iter().map(|&q| self.states[q].clone()).collect();
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let out = keep
            .iter()
            .map(|&q| {
                self.out[q]
                    .iter()
                    .filter(|t| new_id[t.to] != usize::MAX && !drop_edge(t))
                    .map(|t| Transition {
                        from: new_id[t.from],
                        action: t.action.clone(),
                        to: new_id[t.to],
                        weight: t.weight,
                    })
                    .collect()
            })
            .collect();
        WeightedAutomaton {
            name: self.name.clone(),
            states,
            index,
            initial: new_id[self.initial],
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            out,
        }
    }
}

/// A broadcast interface automaton: input-deterministic, all weights zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bia(WeightedAutomaton);

impl Bia {
    /// Checks the BIA invariants on a weighted automaton.
    pub fn from_weighted(automaton: WeightedAutomaton) -> Result<Self, Vec<ModelError>> {
        let mut errors: Vec<ModelError> = automaton
            .transitions()
            .filter(|t| t.weight != 0)
            .map(|t| ModelError::NonzeroWeight {
                from: automaton.states[t.from].clone(),
                action: t.action.clone(),
                to: automaton.states[t.to].clone(),
                weight: t.weight,
            })
            .collect();
        errors.extend(automaton.input_nondeterminism());
        if errors.is_empty() {
            Ok(Bia(automaton))
        } else {
            Err(errors)
        }
    }

    /// Convenience constructor for unweighted transitions given as
    /// `(from, action, to)` triples.
    pub fn build<'a>(
        name: &str,
        states: &[&str],
        initial: &str,
        inputs: &[&str],
        outputs: &[&str],
        transitions: &[(&'a str, &'a str, &'a str)],
    ) -> Result<Self, Vec<ModelError>> {
        let automaton = WeightedAutomaton::new(
            name,
            states.iter().copied(),
            initial,
            inputs.iter().copied(),
            outputs.iter().copied(),
            transitions
                .iter()
                .map(|(f, a, t)| (f.to_string(), a.to_string(), t.to_string(), 0)),
        )?;
        Bia::from_weighted(automaton)
    }

    pub fn as_weighted(&self) -> &WeightedAutomaton {
        &self.0
    }

    pub fn into_weighted(self) -> WeightedAutomaton {
        self.0
    }

    pub fn with_name(self, name: impl Into<String>) -> Self {
        Bia(self.0.with_name(name))
    }
}

impl Deref for Bia {
    type Target = WeightedAutomaton;

    fn deref(&self) -> &WeightedAutomaton {
        &self.0
    }
}

impl AsRef<WeightedAutomaton> for Bia {
    fn as_ref(&self) -> &WeightedAutomaton {
        &self.0
    }
}

impl AsRef<WeightedAutomaton> for WeightedAutomaton {
    fn as_ref(&self) -> &WeightedAutomaton {
        self
    }
}

/// Validates a parsed model, returning every violation found.
pub fn validate_bia(raw: &RawModel) -> Result<Bia, Vec<ModelError>> {
    match WeightedAutomaton::from_raw(raw) {
        Ok(automaton) => Bia::from_weighted(automaton),
        Err(mut errors) => {
            // structural errors stop construction; still report the
            // determinism and weight violations visible in the raw text
            let inputs: BTreeSet<&str> = raw.inputs.iter().map(String::as_str).collect();
            let mut targets: BTreeMap<(&str, &str), BTreeSet<&str>> = BTreeMap::new();
            for t in &raw.transitions {
                if t.weight != 0 {
                    errors.push(ModelError::NonzeroWeight {
                        from: t.from.clone(),
                        action: t.action.clone(),
                        to: t.to.clone(),
                        weight: t.weight,
                    });
                }
                if inputs.contains(t.action.as_str()) {
                    targets.entry((&t.from, &t.action)).or_default().insert(&t.to);
                }
            }
            for ((state, action), to) in targets {
                if to.len() > 1 {
                    errors.push(ModelError::InputNondeterminism {
                        state: state.to_string(),
                        action: action.to_string(),
                        targets: to.into_iter().map(String::from).collect(),
                    });
                }
            }
            Err(errors)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(json: &str) -> RawModel {
        RawModel::from_json(json).unwrap()
    }

    fn loop_bia() -> Bia {
        Bia::build("LOOP", &["q0"], "q0", &["a"], &["x"], &[("q0", "a", "q0")]).unwrap()
    }

    #[test]
    fn single_state_without_transitions_is_valid() {
        let m = raw(r#"{"name":"E","inputs":[],"outputs":[],"states":["q0"],"initial":"q0","transitions":[]}"#);
        let bia = validate_bia(&m).unwrap();
        assert_eq!(bia.num_states(), 1);
        assert_eq!(bia.reachable_names(), vec!["q0"]);
    }

    #[test]
    fn input_nondeterminism_is_reported_with_location() {
        let m = raw(
            r#"{"name":"N","inputs":["a"],"outputs":[],"states":["q0","q1","q2"],"initial":"q0",
                "transitions":[{"from":"q0","action":"a","to":"q1"},{"from":"q0","action":"a","to":"q2"}]}"#,
        );
        let errors = validate_bia(&m).unwrap_err();
        assert_eq!(
            errors,
            vec![ModelError::InputNondeterminism {
                state: "q0".into(),
                action: "a".into(),
                targets: vec!["q1".into(), "q2".into()],
            }]
        );
    }

    #[test]
    fn output_nondeterminism_is_allowed() {
        let bia = Bia::build(
            "O",
            &["q0", "q1", "q2"],
            "q0",
            &[],
            &["x"],
            &[("q0", "x", "q1"), ("q0", "x", "q2")],
        )
        .unwrap();
        assert_eq!(bia.post("q0", "x").unwrap().len(), 2);
    }

    #[test]
    fn all_violations_are_collected() {
        let m = raw(
            r#"{"name":"Bad","inputs":["a","b"],"outputs":["b","bad name"],"states":["q0","q0"],"initial":"z",
                "transitions":[{"from":"q0","action":"c","to":"q9"}]}"#,
        );
        let errors = validate_bia(&m).unwrap_err();
        assert!(errors.contains(&ModelError::DuplicateState("q0".into())));
        assert!(errors.contains(&ModelError::AlphabetOverlap("b".into())));
        assert!(errors.contains(&ModelError::InvalidActionName("bad name".into())));
        assert!(errors.contains(&ModelError::MissingInitial("z".into())));
        assert!(errors.contains(&ModelError::UnknownAction { from: "q0".into(), action: "c".into() }));
        assert!(errors.iter().any(|e| matches!(e, ModelError::UnknownEndpoint { state, .. } if state == "q9")));
    }

    #[test]
    fn post_and_enabled_on_loop() {
        let f = loop_bia();
        assert_eq!(f.post("q0", "a").unwrap(), BTreeSet::from(["q0"]));
        assert!(f.post("q0", "x").unwrap().is_empty());
        assert_eq!(f.enabled("q0", ActionKind::Input).unwrap(), BTreeSet::from(["a"]));
        assert!(f.enabled("q0", ActionKind::Output).unwrap().is_empty());
        assert_eq!(f.post("nope", "a"), Err(QueryError::UnknownState("nope".into())));
        assert_eq!(f.post("q0", "zz"), Err(QueryError::UnknownAction("zz".into())));
        assert_eq!(f.enabled("nope", ActionKind::Input), Err(QueryError::UnknownState("nope".into())));
    }

    #[test]
    fn dead_state_enables_nothing() {
        let f = Bia::build("D", &["q0", "q1"], "q0", &["a"], &["x"], &[("q0", "a", "q1")]).unwrap();
        assert!(f.enabled("q1", ActionKind::Input).unwrap().is_empty());
        assert!(f.enabled("q1", ActionKind::Output).unwrap().is_empty());
    }

    #[test]
    fn reachable_excludes_isolated_states_and_is_ordered() {
        let f = Bia::build(
            "R",
            &["q0", "u", "b", "a"],
            "q0",
            &["i"],
            &["o"],
            &[("q0", "o", "b"), ("q0", "i", "a"), ("b", "i", "q0")],
        )
        .unwrap();
        // action `i` sorts before `o`
        assert_eq!(f.reachable_names(), vec!["q0", "a", "b"]);
    }

    #[test]
    fn unreachable_states_are_kept_by_validation() {
        let f = Bia::build("U", &["q0", "u"], "q0", &[], &[], &[]).unwrap();
        assert_eq!(f.num_states(), 2);
    }

    #[test]
    fn zero_weight_deterministic_automaton_round_trips_to_bia() {
        let w = loop_bia().into_weighted();
        let back = Bia::from_weighted(w.clone()).unwrap();
        assert_eq!(back.as_weighted(), &w);
        let raw = w.to_raw();
        assert_eq!(WeightedAutomaton::from_raw(&RawModel::from_json(&raw.to_json()).unwrap()).unwrap(), w);
    }

    #[test]
    fn weighted_automaton_is_not_a_bia() {
        let w = WeightedAutomaton::new(
            "W",
            ["q0"],
            "q0",
            ["a"],
            Vec::<String>::new(),
            [("q0".into(), "a".into(), "q0".into(), 3)],
        )
        .unwrap();
        assert!(matches!(
            Bia::from_weighted(w).unwrap_err()[0],
            ModelError::NonzeroWeight { weight: 3, .. }
        ));
    }

    #[test]
    fn json_omits_zero_weights() {
        let json = loop_bia().to_raw().to_json();
        assert!(!json.contains("weight"));
        assert!(json.contains(r#""action": "a""#));
    }
}
