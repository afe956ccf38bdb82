//! Discounted-sum games by value iteration.

use super::{Arena, MemorylessStrategy, SolveError};
use crate::game::{GameGraph, Player};
use crate::rational::{to_f64, Rational};

#[derive(Clone, Debug)]
pub struct DiscountedSolution {
    pub values: Vec<f64>,
    /// Bound on `|values[s] − v(s)|` including floating-point round-off.
    pub error_bound: f64,
    pub iterations: u64,
    pub player1: MemorylessStrategy,
    pub player2: MemorylessStrategy,
}

const ULP: f64 = f64::EPSILON;

pub fn discounted_value(game: &GameGraph, lambda: &Rational, epsilon: f64) -> Result<DiscountedSolution, SolveError> {
    let l = to_f64(lambda);
    if !(l > 0.0 && l < 1.0) || lambda <= &Rational::from_integer(0.into()) || lambda >= &Rational::from_integer(1.into()) {
        return Err(SolveError::InvalidLambda(lambda.to_string()));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(SolveError::InvalidEpsilon(epsilon.to_string()));
    }
    let arena = Arena::new(game);
    let w = arena.max_weight() as f64;
    let scale = w / (1.0 - l);
    // each iteration rounds at most twice per state, relative to the scale
    let rounding = |iters: f64| 4.0 * ULP * scale * (iters + 1.0);
    let mut iters: u64 = 1;
    let mut tail = l * scale;
    while tail > epsilon / 2.0 {
        tail *= l;
        iters += 1;
        if rounding(iters as f64) > epsilon / 2.0 {
            return Err(SolveError::InvalidEpsilon(format!(
                "{epsilon} is below the floating-point resolution for this game"
            )));
        }
    }

    let n = arena.n;
    let mut v = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    for _ in 0..iters {
        for s in 0..n {
            let vals = arena.edges(s).map(|e| arena.w[e] as f64 + l * v[arena.to[e]]);
            next[s] = if arena.max_player[s] { vals.fold(f64::MIN, f64::max) } else { vals.fold(f64::MAX, f64::min) };
        }
        std::mem::swap(&mut v, &mut next);
    }

    let mut choice = vec![0usize; n];
    for s in 0..n {
        let mut best: Option<(f64, usize)> = None;
        for e in arena.edges(s) {
            let c = arena.w[e] as f64 + l * v[arena.to[e]];
            let better = match best {
                None => true,
                Some((b, _)) => {
                    if arena.max_player[s] {
                        c > b
                    } else {
                        c < b
                    }
                }
            };
            if better {
                best = Some((c, arena.to[e]));
            }
        }
        choice[s] = best.expect("total game").1;
    }

    Ok(DiscountedSolution {
        values: v,
        error_bound: tail + rounding(iters as f64),
        iterations: iters,
        player1: MemorylessStrategy::from_targets(game, Player::One, &choice),
        player2: MemorylessStrategy::from_targets(game, Player::Two, &choice),
    })
}

/// Largest `|v(s) − opt_t(ω(s,t) + λ·v(t))|` over all states.
pub fn bellman_residual(game: &GameGraph, lambda: f64, values: &[f64]) -> f64 {
    let arena = Arena::new(game);
    (0..arena.n)
        .map(|s| {
            let vals = arena.edges(s).map(|e| arena.w[e] as f64 + lambda * values[arena.to[e]]);
            let opt = if arena.max_player[s] { vals.fold(f64::MIN, f64::max) } else { vals.fold(f64::MAX, f64::min) };
            (values[s] - opt).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn selfloop_and_two_cycle() {
        let g = GameGraph::from_edges(vec![Player::One], [(0, 0, 1)], 0).unwrap();
        let sol = discounted_value(&g, &ratio(1, 2), 1e-9).unwrap();
        assert!((sol.values[0] - 2.0).abs() <= 1e-9);

        let g = GameGraph::from_edges(vec![Player::One, Player::Two], [(0, 1, 0), (1, 0, 2)], 0).unwrap();
        let sol = discounted_value(&g, &ratio(1, 2), 1e-9).unwrap();
        assert!((sol.values[0] - 4.0 / 3.0).abs() <= 1e-9);
        assert!(bellman_residual(&g, 0.5, &sol.values) <= 1e-9 * 1.5);
    }

    #[test]
    fn invalid_parameters() {
        let g = GameGraph::from_edges(vec![Player::One], [(0, 0, 1)], 0).unwrap();
        assert!(matches!(discounted_value(&g, &ratio(1, 1), 1e-3), Err(SolveError::InvalidLambda(_))));
        assert!(matches!(discounted_value(&g, &ratio(0, 1), 1e-3), Err(SolveError::InvalidLambda(_))));
        assert!(matches!(discounted_value(&g, &ratio(1, 2), 0.0), Err(SolveError::InvalidEpsilon(_))));
        assert!(matches!(discounted_value(&g, &ratio(1, 2), f64::NAN), Err(SolveError::InvalidEpsilon(_))));
    }

    #[test]
    fn zero_weights() {
        let g = GameGraph::from_edges(vec![Player::One, Player::Two], [(0, 1, 0), (1, 0, 0)], 0).unwrap();
        let sol = discounted_value(&g, &ratio(9, 10), 1e-9).unwrap();
        assert!(sol.values.iter().all(|&v| v == 0.0));
    }
}
