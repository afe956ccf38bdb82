//! Shared fixtures and random generators for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;

use ifsim::game::{GameGraph, Player};
use ifsim::{validate_bia, validate_error_model, ActionKind, Bia, ErrorModel, Partition, RawErrorModel, RawModel, WeightedAutomaton};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.json"))
}

pub fn model(name: &str) -> Bia {
    let text = std::fs::read_to_string(corpus_path(name)).unwrap();
    validate_bia(&RawModel::from_json(&text).unwrap()).unwrap()
}

pub fn error_model(name: &str, kind: ActionKind) -> ErrorModel {
    let text = std::fs::read_to_string(corpus_path(name)).unwrap();
    validate_error_model(&RawErrorModel::from_json(&text).unwrap(), kind).unwrap()
}

pub const CORPUS_MODELS: &[&str] = &[
    "intA",
    "intB",
    "int1",
    "int2",
    "int3",
    "send",
    "send_once",
    "send_twice",
    "medium",
    "medium_reliable",
    "f_spec",
    "f_c1",
    "f_c2",
    "f_error_single",
    "f_error_multi",
];

/// Random automaton over the given signature. Inputs get at most one
/// successor per state; outputs may branch.
pub fn random_bia<R: Rng>(
    rng: &mut R,
    name: &str,
    states: usize,
    inputs: &[&str],
    outputs: &[&str],
    density: f64,
) -> WeightedAutomaton {
    let names: Vec<String> = (0..states).map(|i| format!("{}{i}", name.to_lowercase())).collect();
    let mut transitions = Vec::new();
    for from in &names {
        for a in inputs {
            if rng.gen_bool(density) {
                let to = names.choose(rng).unwrap();
                transitions.push((from.clone(), a.to_string(), to.clone(), 0));
            }
        }
        for a in outputs {
            if rng.gen_bool(density) {
                let k = rng.gen_range(1..=2.min(states));
                for to in names.choose_multiple(rng, k) {
                    transitions.push((from.clone(), a.to_string(), to.clone(), 0));
                }
            }
        }
    }
    let a = WeightedAutomaton::new(name, names.clone(), &names[0], inputs.iter().copied(), outputs.iter().copied(), transitions)
        .unwrap();
    Bia::from_weighted(a).unwrap().into_weighted()
}

/// Uniform model over a random subset (possibly empty) of `actions`.
pub fn random_uniform_model<R: Rng>(rng: &mut R, kind: ActionKind, actions: &[&str]) -> ErrorModel {
    let subset: Vec<&str> = actions.iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
    ErrorModel::uniform(kind, subset, rng.gen_range(1..=2))
}

pub fn random_partition<R: Rng>(rng: &mut R, f: &WeightedAutomaton) -> Partition {
    let k = rng.gen_range(1..=f.num_states());
    let mut classes = std::collections::BTreeMap::<String, Vec<String>>::new();
    for (i, s) in f.states().iter().enumerate() {
        // every class gets at least one state
        let c = if i < k { i } else { rng.gen_range(0..k) };
        classes.entry(format!("C{c}")).or_default().push(s.clone());
    }
    Partition { classes }
}

/// Random total game with `n` states and weights in `0..=w`.
pub fn random_game<R: Rng>(rng: &mut R, n: usize, w: u64, max_out: usize) -> GameGraph {
    let owners: Vec<Player> = (0..n).map(|_| if rng.gen_bool(0.5) { Player::One } else { Player::Two }).collect();
    let mut edges = Vec::new();
    for s in 0..n {
        let k = rng.gen_range(1..=max_out.min(n));
        let targets: Vec<usize> = (0..n).collect();
        for &t in targets.choose_multiple(rng, k) {
            edges.push((s, t, rng.gen_range(0..=w)));
        }
    }
    GameGraph::from_edges(owners, edges, 0).unwrap()
}

pub fn seed() -> u64 {
    std::env::var("IFSIM_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20111)
}

/// Per state: an optional successor for every input and a successor
/// bitmask for every output.
pub type Table = Vec<(Vec<Option<usize>>, Vec<u32>)>;

pub fn table_strategy(
    max_states: usize,
    inputs: usize,
    outputs: usize,
) -> impl proptest::strategy::Strategy<Value = Table> {
    use proptest::prelude::*;
    (1..=max_states).prop_flat_map(move |n| {
        let row = (
            proptest::collection::vec(proptest::option::weighted(0.6, 0..n), inputs),
            proptest::collection::vec(prop_oneof![2 => Just(0u32), 3 => 1u32..(1 << n)], outputs),
        );
        proptest::collection::vec(row, n)
    })
}

pub fn from_table(name: &str, table: &Table, inputs: &[&str], outputs: &[&str]) -> WeightedAutomaton {
    let names: Vec<String> = (0..table.len()).map(|i| format!("{}{i}", name.to_lowercase())).collect();
    let mut transitions = Vec::new();
    for (s, (ins, outs)) in table.iter().enumerate() {
        for (a, t) in inputs.iter().zip(ins) {
            if let Some(t) = t {
                transitions.push((names[s].clone(), a.to_string(), names[*t].clone(), 0));
            }
        }
        for (a, mask) in outputs.iter().zip(outs) {
            for (t, target) in names.iter().enumerate() {
                if mask >> t & 1 == 1 {
                    transitions.push((names[s].clone(), a.to_string(), target.clone(), 0));
                }
            }
        }
    }
    WeightedAutomaton::new(name, names.clone(), &names[0], inputs.iter().copied(), outputs.iter().copied(), transitions)
        .unwrap()
}

/// A random total game as owners plus `(from, to, weight)` edges.
pub fn game_strategy(max_states: usize, max_weight: u64) -> impl proptest::strategy::Strategy<Value = GameGraph> {
    use proptest::prelude::*;
    (1..=max_states).prop_flat_map(move |n| {
        let state = (any::<bool>(), proptest::collection::btree_map(0..n, 0..=max_weight, 1..=n.min(3)));
        proptest::collection::vec(state, n).prop_map(|rows| {
            let owners = rows.iter().map(|(p1, _)| if *p1 { Player::One } else { Player::Two }).collect();
            let edges: Vec<(usize, usize, u64)> = rows
                .iter()
                .enumerate()
                .flat_map(|(s, (_, out))| out.iter().map(move |(&t, &w)| (s, t, w)))
                .collect();
            GameGraph::from_edges(owners, edges, 0).unwrap()
        })
    })
}
