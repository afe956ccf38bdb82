//! Exhaustive search over memoryless strategy pairs, for small games.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::cycle_mean::Frac;
use super::{Arena, SolveError};
use crate::game::GameGraph;
use crate::rational::Rational;

pub const BRUTE_FORCE_MAX_STATES: usize = 12;
const MAX_PROFILES: u128 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForceResult {
    /// max over player 1 strategies of min over player 2 strategies
    pub sup_inf: Rational,
    /// min over player 2 strategies of max over player 1 strategies
    pub inf_sup: Rational,
}

impl BruteForceResult {
    pub fn value(&self) -> &Rational {
        &self.sup_inf
    }

    pub fn determined(&self) -> bool {
        self.sup_inf == self.inf_sup
    }
}

/// Value at the initial state. `lambda = None` selects the limit average,
/// `Some(λ)` the exact λ-discounted sum.
pub fn brute_force_value(game: &GameGraph, lambda: Option<&Rational>) -> Result<BruteForceResult, SolveError> {
    let arena = Arena::new(game);
    let too_large = |detail: String| SolveError::TooLarge { states: arena.n, edges: arena.m(), detail };
    if arena.n > BRUTE_FORCE_MAX_STATES {
        return Err(too_large(format!("brute force is limited to {BRUTE_FORCE_MAX_STATES} states")));
    }
    let p1: Vec<usize> = (0..arena.n).filter(|&s| arena.max_player[s]).collect();
    let p2: Vec<usize> = (0..arena.n).filter(|&s| !arena.max_player[s]).collect();
    let count = |states: &[usize]| states.iter().map(|&s| arena.edges(s).len() as u128).product::<u128>();
    let (c1, c2) = (count(&p1), count(&p2));
    if c1 * c2 > MAX_PROFILES {
        return Err(too_large(format!("{} strategy pairs", c1 * c2)));
    }

    let payoff = |choice: &[usize]| -> Rational {
        let lasso = lasso(&arena, game.initial(), choice);
        match lambda {
            None => lasso.mean(),
            Some(l) => lasso.discounted(l),
        }
    };

    let mut choice: Vec<usize> = (0..arena.n).map(|s| arena.off[s]).collect();
    let mut col_max: Vec<Option<Rational>> = vec![None; c2 as usize];
    let mut sup_inf: Option<Rational> = None;
    for _ in 0..c1 {
        let mut row_min: Option<Rational> = None;
        for j in 0..c2 as usize {
            let v = payoff(&choice);
            if row_min.as_ref().map_or(true, |m| &v < m) {
                row_min = Some(v.clone());
            }
            if col_max[j].as_ref().map_or(true, |m| &v > m) {
                col_max[j] = Some(v);
            }
            advance(&arena, &p2, &mut choice);
        }
        let r = row_min.unwrap();
        if sup_inf.as_ref().map_or(true, |m| &r > m) {
            sup_inf = Some(r);
        }
        advance(&arena, &p1, &mut choice);
    }
    let inf_sup = col_max.into_iter().map(Option::unwrap).min().unwrap();
    Ok(BruteForceResult { sup_inf: sup_inf.unwrap(), inf_sup })
}

/// Next strategy in mixed-radix order over the edges of `states`.
fn advance(arena: &Arena, states: &[usize], choice: &mut [usize]) {
    for &s in states {
        choice[s] += 1;
        if choice[s] < arena.off[s + 1] {
            return;
        }
        choice[s] = arena.off[s];
    }
}

struct Lasso {
    prefix: Vec<i64>,
    cycle: Vec<i64>,
}

fn lasso(arena: &Arena, start: usize, choice: &[usize]) -> Lasso {
    let mut seen = vec![usize::MAX; arena.n];
    let mut weights = Vec::new();
    let mut s = start;
    while seen[s] == usize::MAX {
        seen[s] = weights.len();
        let e = choice[s];
        weights.push(arena.w[e]);
        s = arena.to[e];
    }
    let cycle = weights.split_off(seen[s]);
    Lasso { prefix: weights, cycle }
}

impl Lasso {
    fn mean(&self) -> Rational {
        let f = Frac::new(self.cycle.iter().map(|&w| w as i128).sum(), self.cycle.len() as i128);
        Rational::new(BigInt::from(f.num), BigInt::from(f.den))
    }

    fn discounted(&self, lambda: &Rational) -> Rational {
        let mut total = Rational::zero();
        let mut factor = Rational::one();
        for &w in &self.prefix {
            total += &factor * Rational::from_integer(w.into());
            factor *= lambda;
        }
        let mut cycle_sum = Rational::zero();
        let mut f = Rational::one();
        for &w in &self.cycle {
            cycle_sum += &f * Rational::from_integer(w.into());
            f *= lambda;
        }
        // f = λ^|cycle|
        total + factor * cycle_sum / (Rational::one() - f)
    }
}
