//! Exact mean-payoff values by the k-step dynamic program.
//!
//! The program `ν_{k+1}(s) = max/min (ω(s,t) + ν_k(t))` is run with
//! integer accumulators. At doubling checkpoints the per-state slope is
//! rounded to a fraction with denominator at most `|S|`, positional
//! strategies are derived for that guess, and the guess is accepted only
//! when both strategies are certified by mean-cycle computations on the
//! two one-player graphs they induce. If no checkpoint certifies, the
//! program runs to `k = 4·|S|³·W`, where rounding alone is exact.

use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::cycle_mean::{best_reachable_cycle_mean, Frac};
use super::{Arena, MemorylessStrategy, SolveError, SolveOptions};
use crate::game::{GameGraph, Player};
use crate::rational::{limit_denominator, simplest_between, Rational};

#[derive(Clone, Debug)]
pub struct MeanPayoffSolution {
    /// Value of every game state.
    pub values: Vec<Rational>,
    pub player1: MemorylessStrategy,
    pub player2: MemorylessStrategy,
    /// Steps of the dynamic program actually run.
    pub iterations: u64,
    /// `4·|S|³·W` (1 when all weights are 0).
    pub full_iterations: u128,
}

impl MeanPayoffSolution {
    pub fn value_at(&self, s: usize) -> &Rational {
        &self.values[s]
    }
}

pub fn mean_payoff_value(game: &GameGraph) -> Result<MeanPayoffSolution, SolveError> {
    mean_payoff_value_with(game, &SolveOptions::default())
}

pub fn mean_payoff_value_with(game: &GameGraph, options: &SolveOptions) -> Result<MeanPayoffSolution, SolveError> {
    let arena = Arena::new(game);
    let n = arena.n as u128;
    let w = arena.max_weight() as u128;
    let full = if w == 0 { 1 } else { 4 * n * n * n * w };

    if w == 0 {
        let zero = vec![Frac::new(0, 1); arena.n];
        let first: Vec<usize> = (0..arena.n).map(|s| arena.to[arena.off[s]]).collect();
        return Ok(solution(game, &zero, &first, &first, 1, full));
    }

    let m = arena.m().max(1) as u128;
    let affordable = options.budget as u128 / m;
    let limit = full.min(affordable);
    if limit.saturating_mul(w) >= 1u128 << 120 {
        return Err(too_large(&arena, "accumulators would overflow"));
    }
    if limit.saturating_mul(w) < 1u128 << 60 {
        run::<i64>(game, &arena, full, limit)
    } else {
        run::<i128>(game, &arena, full, limit)
    }
}

fn too_large(arena: &Arena, detail: &str) -> SolveError {
    SolveError::TooLarge { states: arena.n, edges: arena.m(), detail: detail.to_string() }
}

trait Acc: Copy + Ord + Add<Output = Self> + Sub<Output = Self> + Into<i128> {
    fn from_i64(x: i64) -> Self;
}

impl Acc for i64 {
    fn from_i64(x: i64) -> Self {
        x
    }
}

impl Acc for i128 {
    fn from_i64(x: i64) -> Self {
        x as i128
    }
}

fn run<T: Acc>(game: &GameGraph, arena: &Arena, full: u128, limit: u128) -> Result<MeanPayoffSolution, SolveError> {
    let n = arena.n;
    let zero = T::from_i64(0);
    let weights: Vec<T> = arena.w.iter().map(|&x| T::from_i64(x)).collect();
    let mut prev = vec![zero; n];
    let mut cur = vec![zero; n];
    let mut snapshot = prev.clone();
    let mut snapshot_k: u128 = 0;
    let mut next_check: u128 = 16;
    let mut k: u128 = 0;

    while k < limit {
        for s in 0..n {
            let r = arena.edges(s);
            let mut best = weights[r.start] + prev[arena.to[r.start]];
            if arena.max_player[s] {
                for e in r.start + 1..r.end {
                    let c = weights[e] + prev[arena.to[e]];
                    if c > best {
                        best = c;
                    }
                }
            } else {
                for e in r.start + 1..r.end {
                    let c = weights[e] + prev[arena.to[e]];
                    if c < best {
                        best = c;
                    }
                }
            }
            cur[s] = best;
        }
        std::mem::swap(&mut prev, &mut cur);
        k += 1;
        // prev = ν_k, cur = ν_{k-1}

        if k == full {
            return finish(game, arena, &prev, k, full);
        }
        if k == next_check {
            let span = (k - snapshot_k) as i128;
            let guess: Vec<Frac> = (0..n)
                .map(|s| {
                    let diff: i128 = (prev[s] - snapshot[s]).into();
                    round_slope(diff, span, n)
                })
                .collect();
            if let Some(sol) = certify_guess(game, arena, &guess, &cur, k, full) {
                return Ok(sol);
            }
            snapshot.copy_from_slice(&prev);
            snapshot_k = k;
            next_check *= 2;
        }
    }
    Err(too_large(
        arena,
        &format!("values not certified within the work budget ({k} of {full} dynamic-programming steps)"),
    ))
}

/// Closest fraction with denominator at most `n` to `diff / span`.
fn round_slope(diff: i128, span: i128, n: usize) -> Frac {
    let x = Rational::new(BigInt::from(diff), BigInt::from(span));
    to_frac(&limit_denominator(&x, &BigInt::from(n.max(1))))
}

fn to_frac(r: &Rational) -> Frac {
    Frac::new(r.numer().to_i128().unwrap(), r.denom().to_i128().unwrap())
}

/// Values forced by the full-length program: the unique fraction with
/// denominator at most `|S|` in `[(ν_k − 2|S|W)/k, (ν_k + 2|S|W)/k]`.
fn finish<T: Acc>(game: &GameGraph, arena: &Arena, nu: &[T], k: u128, full: u128) -> Result<MeanPayoffSolution, SolveError> {
    let n = arena.n;
    let slack = BigInt::from(2 * n as i128 * arena.max_weight() as i128);
    let kk = BigInt::from(k);
    let mut values = Vec::with_capacity(n);
    for &v in nu {
        let v = BigInt::from(v.into());
        let lo = Rational::new(&v - &slack, kk.clone());
        let hi = Rational::new(&v + &slack, kk.clone());
        let r = simplest_between(&lo, &hi);
        if r.denom() > &BigInt::from(n) {
            return Err(SolveError::Internal(format!("no value with denominator <= {n} in [{lo}, {hi}]")));
        }
        values.push(to_frac(&r));
    }
    let p1 = energy_strategy(arena, &values, true)
        .ok_or_else(|| SolveError::Internal("no player 1 strategy realizes the computed values".into()))?;
    let p2 = energy_strategy(arena, &values, false)
        .ok_or_else(|| SolveError::Internal("no player 2 strategy realizes the computed values".into()))?;
    if !certified(arena, &values, &p1, &p2) {
        return Err(SolveError::Internal("extracted strategies do not certify the computed values".into()));
    }
    Ok(solution(game, &values, &p1, &p2, k as u64, full))
}

fn certify_guess<T: Acc>(
    game: &GameGraph,
    arena: &Arena,
    guess: &[Frac],
    before: &[T],
    k: u128,
    full: u128,
) -> Option<MeanPayoffSolution> {
    if !locally_consistent(arena, guess) {
        return None;
    }
    if let Some((p1, p2)) = greedy(arena, guess, before) {
        if certified(arena, guess, &p1, &p2) {
            return Some(solution(game, guess, &p1, &p2, k as u64, full));
        }
    }
    let p1 = energy_strategy(arena, guess, true)?;
    let p2 = energy_strategy(arena, guess, false)?;
    if certified(arena, guess, &p1, &p2) {
        return Some(solution(game, guess, &p1, &p2, k as u64, full));
    }
    None
}

/// Every state's guess is the max/min of its successors' guesses.
fn locally_consistent(arena: &Arena, guess: &[Frac]) -> bool {
    (0..arena.n).all(|s| {
        let it = arena.edges(s).map(|e| guess[arena.to[e]]);
        let opt = if arena.max_player[s] { it.max() } else { it.min() };
        opt == Some(guess[s])
    })
}

/// Among value-preserving edges, the one that is optimal for the last
/// step of the program; first edge on ties.
fn greedy<T: Acc>(arena: &Arena, guess: &[Frac], before: &[T]) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut choice = vec![usize::MAX; arena.n];
    for s in 0..arena.n {
        let mut best: Option<(T, usize)> = None;
        for e in arena.edges(s) {
            let t = arena.to[e];
            if guess[t] != guess[s] {
                continue;
            }
            let c = T::from_i64(arena.w[e]) + before[t];
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
                best = Some((c, t));
            }
        }
        choice[s] = best?.1;
    }
    Some((choice.clone(), choice))
}

/// Positional strategy for player 1 (`maximizer`) or player 2 from the
/// least progress measure of an energy game per value class.
///
/// For a class of value `p/q`, the strategy's owner must keep the running
/// sum of `q·ω − p` (player 1) or `p − q·ω` (player 2) bounded from below.
/// Leaving the class in the owner's favour ends the obligation; leaving it
/// in the opponent's favour means the guess is wrong.
fn energy_strategy(arena: &Arena, values: &[Frac], maximizer: bool) -> Option<Vec<usize>> {
    let n = arena.n;
    let owner_moves = |s: usize| arena.max_player[s] == maximizer;
    let energy = |s: usize, e: usize| -> i128 {
        let (p, q) = (values[s].num, values[s].den);
        let w = arena.w[e] as i128;
        if maximizer {
            q * w - p
        } else {
            p - q * w
        }
    };
    // favourable exit for the owner
    let good_exit = |s: usize, t: usize| if maximizer { values[t] > values[s] } else { values[t] < values[s] };

    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        for e in arena.edges(s) {
            let t = arena.to[e];
            if values[t] == values[s] {
                preds[t].push(s);
            }
        }
    }
    let w_max = arena.max_weight() as i128;
    let cap: Vec<i128> = (0..n).map(|s| (n as i128 + 1) * (values[s].den * w_max + values[s].num.abs() + 1)).collect();

    let mut f = vec![0i128; n];
    let mut queued = vec![true; n];
    let mut work: std::collections::VecDeque<usize> = (0..n).collect();

    // needed credit at s given the current measure, None if the opponent
    // can escape into a class that is bad for the owner
    let need = |s: usize, f: &[i128]| -> Option<i128> {
        let mut acc: Option<i128> = None;
        for e in arena.edges(s) {
            let t = arena.to[e];
            let c = if values[t] == values[s] {
                (f[t] - energy(s, e)).max(0)
            } else if good_exit(s, t) {
                if owner_moves(s) {
                    continue;
                }
                0
            } else {
                if owner_moves(s) {
                    continue;
                }
                return None;
            };
            acc = Some(match acc {
                None => c,
                Some(a) if owner_moves(s) => a.min(c),
                Some(a) => a.max(c),
            });
        }
        acc
    };

    while let Some(s) = work.pop_front() {
        queued[s] = false;
        let c = need(s, &f)?;
        if c > f[s] {
            if c > cap[s] {
                return None;
            }
            f[s] = c;
            for &p in &preds[s] {
                if !queued[p] {
                    queued[p] = true;
                    work.push_back(p);
                }
            }
        }
    }

    let mut choice = vec![usize::MAX; n];
    for s in 0..n {
        let mut best: Option<(i128, usize)> = None;
        for e in arena.edges(s) {
            let t = arena.to[e];
            if values[t] != values[s] {
                continue;
            }
            let c = (f[t] - energy(s, e)).max(0);
            if best.map_or(true, |(b, _)| c < b) {
                best = Some((c, t));
            }
        }
        choice[s] = match best {
            Some((_, t)) => t,
            None if owner_moves(s) => return None,
            None => arena.to[arena.off[s]],
        };
    }
    Some(choice)
}

/// Values are exact and both strategies optimal iff, with player 2 fixed,
/// player 1 cannot exceed them, and with player 1 fixed, player 2 cannot
/// go below them.
fn certified(arena: &Arena, values: &[Frac], p1: &[usize], p2: &[usize]) -> bool {
    let fixed = |player1_fixed: bool| -> Vec<Vec<(usize, i64)>> {
        (0..arena.n)
            .map(|s| {
                if arena.max_player[s] == player1_fixed {
                    let t = if player1_fixed { p1[s] } else { p2[s] };
                    let e = arena.edges(s).find(|&e| arena.to[e] == t).expect("strategy follows an edge");
                    vec![(t, arena.w[e])]
                } else {
                    arena.edges(s).map(|e| (arena.to[e], arena.w[e])).collect()
                }
            })
            .collect()
    };
    let upper = best_reachable_cycle_mean(&fixed(false), true);
    if upper.iter().zip(values).any(|(u, v)| u != v) {
        return false;
    }
    let lower = best_reachable_cycle_mean(&fixed(true), false);
    lower.iter().zip(values).all(|(l, v)| l == v)
}

fn solution(game: &GameGraph, values: &[Frac], p1: &[usize], p2: &[usize], iterations: u64, full: u128) -> MeanPayoffSolution {
    MeanPayoffSolution {
        values: values.iter().map(|f| Rational::new(BigInt::from(f.num), BigInt::from(f.den))).collect(),
        player1: MemorylessStrategy::from_targets(game, Player::One, p1),
        player2: MemorylessStrategy::from_targets(game, Player::Two, p2),
        iterations,
        full_iterations: full,
    }
}

/// Value of every state when `strategy` is fixed and the other player
/// optimizes alone.
pub fn one_player_values(game: &GameGraph, strategy: &MemorylessStrategy) -> Vec<Rational> {
    let arena = Arena::new(game);
    let adj: Vec<Vec<(usize, i64)>> = (0..arena.n)
        .map(|s| match strategy.get(s) {
            Some(t) if game.owner(s) == strategy.owner => {
                let e = arena.edges(s).find(|&e| arena.to[e] == t).expect("strategy follows an edge");
                vec![(t, arena.w[e])]
            }
            _ => arena.edges(s).map(|e| (arena.to[e], arena.w[e])).collect(),
        })
        .collect();
    let maximize = strategy.owner == Player::Two;
    best_reachable_cycle_mean(&adj, maximize)
        .into_iter()
        .map(|f| Rational::new(BigInt::from(f.num), BigInt::from(f.den)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use num_traits::Zero;

    fn game(owners: &[u8], edges: &[(usize, usize, u64)]) -> GameGraph {
        let owners = owners.iter().map(|&o| if o == 1 { Player::One } else { Player::Two }).collect();
        GameGraph::from_edges(owners, edges.iter().copied(), 0).unwrap()
    }

    #[test]
    fn zero_weights() {
        let g = game(&[1, 2], &[(0, 1, 0), (1, 0, 0), (1, 1, 0)]);
        let sol = mean_payoff_value(&g).unwrap();
        assert!(sol.values.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn forced_two_cycle() {
        let g = game(&[1, 2], &[(0, 1, 0), (1, 0, 2)]);
        let sol = mean_payoff_value(&g).unwrap();
        assert_eq!(sol.values, vec![int(1), int(1)]);
    }

    #[test]
    fn choices_matter() {
        // player 1 at 0 chooses between a 1/3-cycle and a P2 state that can
        // pick a 0-loop or a 2-loop
        let g = game(
            &[1, 1, 1, 2, 1, 1],
            &[(0, 1, 1), (1, 2, 0), (2, 0, 0), (0, 3, 0), (3, 4, 0), (3, 5, 0), (4, 4, 0), (5, 5, 2)],
        );
        let sol = mean_payoff_value(&g).unwrap();
        assert_eq!(sol.values[0], ratio(1, 3));
        assert_eq!(sol.values[3], int(0));
        assert_eq!(sol.values[5], int(2));
        assert_eq!(sol.player1.get(0), Some(1));
        assert_eq!(sol.player2.get(3), Some(4));
    }

    #[test]
    fn full_length_path_matches_early_certification() {
        let g = game(&[1, 2, 1], &[(0, 1, 1), (1, 2, 3), (1, 0, 2), (2, 0, 0), (2, 2, 1)]);
        let early = mean_payoff_value(&g).unwrap();
        let arena = Arena::new(&g);
        let full = 4 * 27 * arena.max_weight() as u128;
        let late = run::<i64>(&g, &arena, full, u128::MAX).unwrap();
        // with checkpoints at powers of two from 16, a full length of 324
        // may still certify early; force the end-of-program rounding
        let forced = {
            let mut prev = vec![0i64; arena.n];
            for _ in 0..full {
                let mut cur = vec![0i64; arena.n];
                for s in 0..arena.n {
                    let vals = arena.edges(s).map(|e| arena.w[e] + prev[arena.to[e]]);
                    cur[s] = if arena.max_player[s] { vals.max().unwrap() } else { vals.min().unwrap() };
                }
                prev = cur;
            }
            finish(&g, &arena, &prev, full, full).unwrap()
        };
        assert_eq!(early.values, late.values);
        assert_eq!(early.values, forced.values);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let g = game(&[1, 2, 1], &[(0, 1, 1), (1, 2, 3), (1, 0, 2), (2, 0, 0), (2, 2, 1)]);
        let err = mean_payoff_value_with(&g, &SolveOptions { budget: 20 }).unwrap_err();
        assert!(matches!(err, SolveError::TooLarge { .. }));
    }
}
