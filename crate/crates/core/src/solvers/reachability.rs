//! Attractor computation for reachability games.

use std::collections::{BTreeSet, VecDeque};

use super::MemorylessStrategy;
use crate::automata::StateId;
use crate::game::{GameGraph, Player};

#[derive(Clone, Debug)]
pub struct ReachabilityResult {
    /// States from which player 1 can force a visit to the target.
    pub winning1: BTreeSet<StateId>,
    /// Attractor strategy on player 1 states in `winning1` outside the target.
    pub strategy1: MemorylessStrategy,
    /// On player 2 states outside `winning1`: an edge that stays outside.
    pub strategy2: MemorylessStrategy,
}

pub fn solve_reachability(game: &GameGraph, target: &BTreeSet<StateId>) -> ReachabilityResult {
    let n = game.num_states();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    let mut remaining: Vec<usize> = vec![0; n];
    for s in 0..n {
        for e in game.edges(s) {
            preds[e.to].push(s);
        }
        remaining[s] = game.edges(s).len();
    }

    let mut win = vec![false; n];
    let mut strategy1 = MemorylessStrategy::new(Player::One);
    let mut queue: VecDeque<StateId> = VecDeque::new();
    for &t in target {
        win[t] = true;
        queue.push_back(t);
    }
    while let Some(t) = queue.pop_front() {
        for &p in &preds[t] {
            if win[p] {
                continue;
            }
            match game.owner(p) {
                Player::One => {
                    win[p] = true;
                    strategy1.choice.insert(p, first_edge_into(game, p, &win));
                    queue.push_back(p);
                }
                Player::Two => {
                    remaining[p] -= 1;
                    if remaining[p] == 0 {
                        win[p] = true;
                        queue.push_back(p);
                    }
                }
            }
        }
    }

    let mut strategy2 = MemorylessStrategy::new(Player::Two);
    for s in (0..n).filter(|&s| !win[s] && game.owner(s) == Player::Two) {
        let t = game.edges(s).iter().find(|e| !win[e.to]).expect("losing region is a trap").to;
        strategy2.choice.insert(s, t);
    }
    ReachabilityResult { winning1: (0..n).filter(|&s| win[s]).collect(), strategy1, strategy2 }
}

// The attractor rank is implied by insertion order: the first winning
// successor at the time `p` joins is already closer to the target.
fn first_edge_into(game: &GameGraph, p: StateId, win: &[bool]) -> StateId {
    game.edges(p).iter().find(|e| win[e.to]).expect("winning successor").to
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(owners: &[Player], edges: &[(usize, usize)], initial: usize) -> GameGraph {
        GameGraph::from_edges(owners.to_vec(), edges.iter().map(|&(a, b)| (a, b, 0)), initial).unwrap()
    }

    #[test]
    fn initial_in_target() {
        let g = game(&[Player::One], &[(0, 0)], 0);
        assert!(solve_reachability(&g, &BTreeSet::from([0])).winning1.contains(&0));
    }

    #[test]
    fn player2_avoids_target() {
        let g = game(&[Player::Two, Player::One, Player::One], &[(0, 1), (0, 2), (1, 1), (2, 2)], 0);
        let r = solve_reachability(&g, &BTreeSet::from([2]));
        assert!(!r.winning1.contains(&0));
        assert_eq!(r.strategy2.get(0), Some(1));
    }

    #[test]
    fn player1_forces_target_through_player2() {
        let g = game(
            &[Player::One, Player::Two, Player::One, Player::One],
            &[(0, 1), (0, 2), (1, 3), (2, 2), (3, 3)],
            0,
        );
        let r = solve_reachability(&g, &BTreeSet::from([3]));
        assert_eq!(r.winning1, BTreeSet::from([0, 1, 3]));
        assert_eq!(r.strategy1.get(0), Some(1));
    }
}
