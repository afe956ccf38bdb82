//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ifsim::{validate_bia, Bia, GameGraph, Player, RawModel};

pub fn corpus_model(name: &str) -> Bia {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    validate_bia(&RawModel::from_json(&text).expect("corpus JSON parses")).expect("corpus model is valid")
}

/// A total game with `n` states, out-degree between 1 and 4, weights up to `w`.
pub fn random_game(seed: u64, n: usize, w: u64) -> GameGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let owners = (0..n).map(|_| if rng.gen_bool(0.5) { Player::One } else { Player::Two }).collect();
    let mut edges = Vec::new();
    for s in 0..n {
        for _ in 0..rng.gen_range(1..=4) {
            edges.push((s, rng.gen_range(0..n), rng.gen_range(0..=w)));
        }
    }
    GameGraph::from_edges(owners, edges, 0).expect("every state has an edge")
}
