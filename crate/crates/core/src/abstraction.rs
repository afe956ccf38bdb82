//! ∀∃ and ∃∀ abstractions over a user-supplied state partition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{ActionKind, StateId, WeightedAutomaton};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Inputs ∀∃, outputs ∃∃. Under-approximates a specification.
    ForallExists,
    /// Inputs ∃∃, outputs ∀∃. Over-approximates a specification.
    ExistsForall,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "forall_exists" | "forall-exists" | "ae" => Some(Mode::ForallExists),
            "exists_forall" | "exists-forall" | "ea" => Some(Mode::ExistsForall),
            _ => None,
        }
    }

    fn universal_on(self, kind: ActionKind) -> bool {
        matches!((self, kind), (Mode::ForallExists, ActionKind::Input) | (Mode::ExistsForall, ActionKind::Output))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::ForallExists => "forall_exists",
            Mode::ExistsForall => "exists_forall",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AbstractionError {
    #[error("state `{state}` is not covered by any class")]
    Uncovered { state: String },
    #[error("state `{state}` appears in classes `{first}` and `{second}`")]
    Overlap { state: String, first: String, second: String },
    #[error("class `{class}` is empty")]
    EmptyClass { class: String },
    #[error("class `{class}` names unknown state `{state}`")]
    UnknownState { class: String, state: String },
}

/// A total partition of an automaton's states into named classes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub classes: BTreeMap<String, Vec<String>>,
}

impl Partition {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("partition serializes")
    }

    /// One class per state, named after the state.
    pub fn singletons(f: &WeightedAutomaton) -> Self {
        Partition { classes: f.states().iter().map(|s| (s.clone(), vec![s.clone()])).collect() }
    }

    /// Class index of every state, or every way the partition is broken.
    pub fn class_of(&self, f: &WeightedAutomaton) -> Result<Vec<usize>, Vec<AbstractionError>> {
        let mut errors = Vec::new();
        let mut owner: Vec<Option<usize>> = vec![None; f.num_states()];
        let names: Vec<&String> = self.classes.keys().collect();
        for (c, (class, members)) in self.classes.iter().enumerate() {
            if members.is_empty() {
                errors.push(AbstractionError::EmptyClass { class: class.clone() });
            }
            for m in members {
                match f.state_id(m) {
                    None => errors.push(AbstractionError::UnknownState { class: class.clone(), state: m.clone() }),
                    Some(q) => match owner[q] {
                        Some(prev) => errors.push(AbstractionError::Overlap {
                            state: m.clone(),
                            first: names[prev].clone(),
                            second: class.clone(),
                        }),
                        None => owner[q] = Some(c),
                    },
                }
            }
        }
        for (q, o) in owner.iter().enumerate() {
            if o.is_none() {
                errors.push(AbstractionError::Uncovered { state: f.state_name(q).to_string() });
            }
        }
        if errors.is_empty() {
            Ok(owner.into_iter().map(|o| o.unwrap()).collect())
        } else {
            Err(errors)
        }
    }
}

/// Quotient of `f` under `partition`. States are the class names (sorted),
/// the initial state is the class of `f`'s initial state, all weights are 0.
pub fn abstract_automaton(
    f: &WeightedAutomaton,
    partition: &Partition,
    mode: Mode,
) -> Result<WeightedAutomaton, Vec<AbstractionError>> {
    let class_of = partition.class_of(f)?;
    let class_names: Vec<&String> = partition.classes.keys().collect();
    let mut members: Vec<Vec<StateId>> = vec![Vec::new(); class_names.len()];
    for (q, &c) in class_of.iter().enumerate() {
        members[c].push(q);
    }

    let mut transitions = Vec::new();
    for action in f.inputs().iter().chain(f.outputs()) {
        let universal = mode.universal_on(f.kind_of(action).unwrap());
        for (s, qs) in members.iter().enumerate() {
            // target classes reached from each member
            let reached: Vec<BTreeSet<usize>> =
                qs.iter().map(|&q| f.successors(q, action).map(|t| class_of[t.to]).collect()).collect();
            let targets: BTreeSet<usize> = if universal {
                let mut it = reached.into_iter();
                let first = it.next().unwrap_or_default();
                it.fold(first, |acc, r| acc.intersection(&r).copied().collect())
            } else {
                reached.into_iter().flatten().collect()
            };
            for t in targets {
                transitions.push((class_names[s].clone(), action.clone(), class_names[t].clone(), 0));
            }
        }
    }

    let suffix = match mode {
        Mode::ForallExists => "AE",
        Mode::ExistsForall => "EA",
    };
    Ok(WeightedAutomaton::new(
        format!("{}^{}", f.name(), suffix),
        class_names.iter().map(|s| s.to_string()),
        class_names[class_of[f.initial()]],
        f.inputs().iter().cloned(),
        f.outputs().iter().cloned(),
        transitions,
    )
    .expect("abstraction of a valid automaton is valid"))
}
