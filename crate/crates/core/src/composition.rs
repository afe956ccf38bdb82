//! Product, error states, compatibility and the pruned composition `F ∥ G`.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{ActionKind, Bia, RawTransition, StateId, WeightedAutomaton};

pub const DEFAULT_SEPARATOR: &str = "|";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CompositionError {
    #[error("`{left}` and `{right}` are not composable: shared inputs {inputs:?}, shared outputs {outputs:?}")]
    NotComposable { left: String, right: String, inputs: Vec<String>, outputs: Vec<String> },
    #[error("`{left}` and `{right}` are incompatible: error state `{error_state}` is reachable from the initial state by outputs [{}]", witness.join(", "))]
    Incompatible {
        left: String,
        right: String,
        error_state: String,
        witness: Vec<String>,
        report: Box<CompositionReport>,
    },
    #[error("state name `{state}` contains the product separator `{separator}`")]
    NameCollision { state: String, separator: String },
}

/// A state of `F ⊗ G` with its classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductState {
    pub left: String,
    pub right: String,
    pub is_error: bool,
    pub is_incompatible: bool,
}

/// Audit trail of a composition, written as the `compose` sidecar.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompositionReport {
    pub shared: Vec<String>,
    pub error_states: Vec<String>,
    pub incompatible: Vec<String>,
    pub removed_inputs: Vec<RawTransition>,
    /// Product states dropped because they became unreachable after the
    /// input transitions above were removed.
    pub pruned_unreachable: Vec<String>,
    pub compatible: bool,
}

#[derive(Clone, Debug)]
pub struct Composition {
    pub automaton: WeightedAutomaton,
    pub report: CompositionReport,
}

/// The product `F ⊗ G` together with the pair behind each product state.
#[derive(Clone, Debug)]
pub struct Product {
    pub automaton: WeightedAutomaton,
    pub pairs: Vec<(StateId, StateId)>,
    pub shared: BTreeSet<String>,
}

impl Product {
    /// Every product state with its flags, in product-state order.
    pub fn classify(
        &self,
        f: &WeightedAutomaton,
        g: &WeightedAutomaton,
        errors: &BTreeSet<StateId>,
        incompatible: &BTreeSet<StateId>,
    ) -> Vec<ProductState> {
        self.pairs
            .iter()
            .enumerate()
            .map(|(id, &(l, r))| ProductState {
                left: f.state_name(l).to_string(),
                right: g.state_name(r).to_string(),
                is_error: errors.contains(&id),
                is_incompatible: incompatible.contains(&id),
            })
            .collect()
    }
}

/// Whether `f` and `g` are composable, and their shared actions.
pub fn composable(f: &WeightedAutomaton, g: &WeightedAutomaton) -> (bool, BTreeSet<String>) {
    let ok = f.inputs().is_disjoint(g.inputs()) && f.outputs().is_disjoint(g.outputs());
    let shared = f
        .inputs()
        .iter()
        .chain(f.outputs())
        .filter(|a| g.kind_of(a).is_some())
        .cloned()
        .collect();
    (ok, shared)
}

fn check_composable(f: &WeightedAutomaton, g: &WeightedAutomaton) -> Result<BTreeSet<String>, CompositionError> {
    let (ok, shared) = composable(f, g);
    if ok {
        Ok(shared)
    } else {
        Err(CompositionError::NotComposable {
            left: f.name().to_string(),
            right: g.name().to_string(),
            inputs: f.inputs().intersection(g.inputs()).cloned().collect(),
            outputs: f.outputs().intersection(g.outputs()).cloned().collect(),
        })
    }
}

pub fn product(f: &WeightedAutomaton, g: &WeightedAutomaton) -> Result<Product, CompositionError> {
    product_with(f, g, DEFAULT_SEPARATOR)
}

/// Builds `F ⊗ G`: interleaving on unshared actions, joint steps on shared
/// ones. Weights of joint steps add up.
pub fn product_with(f: &WeightedAutomaton, g: &WeightedAutomaton, separator: &str) -> Result<Product, CompositionError> {
    let shared = check_composable(f, g)?;
    for s in f.states().iter().chain(g.states()) {
        if s.contains(separator) {
            return Err(CompositionError::NameCollision { state: s.clone(), separator: separator.to_string() });
        }
    }

    let ng = g.num_states();
    let id = |p: StateId, q: StateId| p * ng + q;
    let name = |p: StateId, q: StateId| format!("{}{}{}", f.state_name(p), separator, g.state_name(q));

    let mut states = Vec::with_capacity(f.num_states() * ng);
    let mut pairs = Vec::with_capacity(f.num_states() * ng);
    for p in 0..f.num_states() {
        for q in 0..ng {
            states.push(name(p, q));
            pairs.push((p, q));
        }
    }

    let mut transitions = Vec::new();
    for p in 0..f.num_states() {
        for q in 0..ng {
            for t in f.outgoing(p) {
                if shared.contains(&t.action) {
                    for u in g.successors(q, &t.action) {
                        transitions.push((id(p, q), t.action.clone(), id(t.to, u.to), t.weight + u.weight));
                    }
                } else {
                    transitions.push((id(p, q), t.action.clone(), id(t.to, q), t.weight));
                }
            }
            for u in g.outgoing(q) {
                if !shared.contains(&u.action) {
                    transitions.push((id(p, q), u.action.clone(), id(p, u.to), u.weight));
                }
            }
        }
    }

    let inputs: BTreeSet<String> = f.inputs().union(g.inputs()).filter(|a| !shared.contains(*a)).cloned().collect();
    let outputs: BTreeSet<String> = f.outputs().union(g.outputs()).cloned().collect();
    let automaton = WeightedAutomaton::new(
        format!("{}||{}", f.name(), g.name()),
        states.iter().cloned(),
        &name(f.initial(), g.initial()),
        inputs,
        outputs,
        transitions
            .into_iter()
            .map(|(from, a, to, w)| (states[from].clone(), a, states[to].clone(), w)),
    )
    .expect("product of valid automata is valid");
    Ok(Product { automaton, pairs, shared })
}

/// Product states where one side emits a shared action the other side does
/// not accept.
pub fn error_states(f: &WeightedAutomaton, g: &WeightedAutomaton, product: &Product) -> BTreeSet<StateId> {
    let mut errors = BTreeSet::new();
    for (id, &(p, q)) in product.pairs.iter().enumerate() {
        let bad = product.shared.iter().any(|a| {
            let (emitter, emit_state, receiver, recv_state) = if f.kind_of(a) == Some(ActionKind::Output) {
                (f, p, g, q)
            } else {
                (g, q, f, p)
            };
            emitter.is_enabled(emit_state, a) && !receiver.is_enabled(recv_state, a)
        });
        if bad {
            errors.insert(id);
        }
    }
    errors
}

/// States from which an error state is reachable using output transitions
/// only (reverse breadth-first closure).
pub fn incompatible_states(product: &WeightedAutomaton, errors: &BTreeSet<StateId>) -> BTreeSet<StateId> {
    let n = product.num_states();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for t in product.transitions() {
        if product.outputs().contains(&t.action) {
            preds[t.to].push(t.from);
        }
    }
    let mut bad = vec![false; n];
    let mut queue: VecDeque<StateId> = errors.iter().copied().collect();
    for &e in errors {
        bad[e] = true;
    }
    while let Some(s) = queue.pop_front() {
        for &p in &preds[s] {
            if !bad[p] {
                bad[p] = true;
                queue.push_back(p);
            }
        }
    }
    (0..n).filter(|&s| bad[s]).collect()
}

/// Shortest sequence of outputs leading from the initial state to an error
/// state, with that state.
fn output_witness(product: &WeightedAutomaton, errors: &BTreeSet<StateId>) -> Option<(StateId, Vec<String>)> {
    let n = product.num_states();
    let mut parent: Vec<Option<(StateId, String)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([product.initial()]);
    seen[product.initial()] = true;
    while let Some(s) = queue.pop_front() {
        if errors.contains(&s) {
            let mut path = Vec::new();
            let mut cur = s;
            while let Some((p, a)) = &parent[cur] {
                path.push(a.clone());
                cur = *p;
            }
            path.reverse();
            return Some((s, path));
        }
        for t in product.outgoing(s) {
            if product.outputs().contains(&t.action) && !seen[t.to] {
                seen[t.to] = true;
                parent[t.to] = Some((s, t.action.clone()));
                queue.push_back(t.to);
            }
        }
    }
    None
}

pub fn compose(f: &WeightedAutomaton, g: &WeightedAutomaton) -> Result<Composition, CompositionError> {
    compose_with(f, g, DEFAULT_SEPARATOR)
}

/// `F ∥ G`: the product without input transitions from compatible into
/// incompatible states, restricted to the states still reachable.
pub fn compose_with(f: &WeightedAutomaton, g: &WeightedAutomaton, separator: &str) -> Result<Composition, CompositionError> {
    let prod = product_with(f, g, separator)?;
    let p = &prod.automaton;
    let errors = error_states(f, g, &prod);
    let incompatible = incompatible_states(p, &errors);

    let names = |set: &BTreeSet<StateId>| -> Vec<String> { set.iter().map(|&s| p.state_name(s).to_string()).collect() };
    let mut report = CompositionReport {
        shared: prod.shared.iter().cloned().collect(),
        error_states: names(&errors),
        incompatible: names(&incompatible),
        compatible: !incompatible.contains(&p.initial()),
        ..Default::default()
    };

    if !report.compatible {
        let (state, witness) = output_witness(p, &errors).expect("incompatible initial state has an output path to an error");
        return Err(CompositionError::Incompatible {
            left: f.name().to_string(),
            right: g.name().to_string(),
            error_state: p.state_name(state).to_string(),
            witness,
            report: Box::new(report),
        });
    }

    let is_removed = |t: &crate::automata::Transition| {
        p.inputs().contains(&t.action) && !incompatible.contains(&t.from) && incompatible.contains(&t.to)
    };
    report.removed_inputs = p
        .transitions()
        .filter(|t| is_removed(t))
        .map(|t| RawTransition {
            from: p.state_name(t.from).to_string(),
            action: t.action.clone(),
            to: p.state_name(t.to).to_string(),
            weight: t.weight,
        })
        .collect();

    let all: Vec<StateId> = (0..p.num_states()).collect();
    let pruned_edges = p.restrict(&all, is_removed);
    let keep = pruned_edges.reachable();
    let mut kept: Vec<StateId> = keep.clone();
    kept.sort_unstable();
    let kept_set: BTreeSet<StateId> = kept.iter().copied().collect();
    report.pruned_unreachable = (0..p.num_states())
        .filter(|s| !kept_set.contains(s))
        .map(|s| p.state_name(s).to_string())
        .collect();
    let automaton = pruned_edges.restrict(&kept, |_| false);
    debug_assert!(kept.iter().all(|s| !incompatible.contains(s)));

    Ok(Composition { automaton, report })
}

/// Composition of two BIAs, checked to be a BIA again.
pub fn compose_bia(f: &Bia, g: &Bia) -> Result<(Bia, CompositionReport), CompositionError> {
    let Composition { automaton, report } = compose(f, g)?;
    let bia = Bia::from_weighted(automaton).unwrap_or_else(|e| panic!("composition of BIAs must be a BIA: {e:?}"));
    Ok((bia, report))
}
