//! Karp's minimum/maximum mean cycle on one-player graphs.

use std::cmp::Ordering;

/// A small exact fraction with positive denominator.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frac {
    pub num: i128,
    pub den: i128,
}

impl Frac {
    pub fn new(num: i128, den: i128) -> Self {
        debug_assert!(den > 0);
        Frac { num, den }
    }

    pub fn neg(self) -> Self {
        Frac { num: -self.num, den: self.den }
    }
}

impl PartialEq for Frac {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frac {}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// For every node, the best mean of a cycle reachable from it (maximal if
/// `maximize`, minimal otherwise). Every node must have a successor.
pub(crate) fn best_reachable_cycle_mean(adj: &[Vec<(usize, i64)>], maximize: bool) -> Vec<Frac> {
    let n = adj.len();
    let sign = if maximize { 1 } else { -1 };
    let comps = tarjan(adj);
    let mut comp_of = vec![0usize; n];
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of[v] = c;
        }
    }
    let mut local = vec![usize::MAX; n];
    let mut best: Vec<Option<Frac>> = vec![None; comps.len()];
    // tarjan emits components in reverse topological order
    for (c, members) in comps.iter().enumerate() {
        let mut value: Option<Frac> = None;
        let cyclic = members.len() > 1 || adj[members[0]].iter().any(|&(t, _)| t == members[0]);
        if cyclic {
            for (i, &v) in members.iter().enumerate() {
                local[v] = i;
            }
            let sub: Vec<Vec<(usize, i64)>> = members
                .iter()
                .map(|&v| {
                    adj[v]
                        .iter()
                        .filter(|&&(t, _)| comp_of[t] == c)
                        .map(|&(t, w)| (local[t], sign * w))
                        .collect()
                })
                .collect();
            value = Some(karp_max(&sub));
        }
        for &v in members {
            for &(t, _) in &adj[v] {
                let d = comp_of[t];
                if d != c {
                    let cand = best[d].expect("successor component already solved");
                    value = Some(value.map_or(cand, |x| x.max(cand)));
                }
            }
        }
        best[c] = Some(value.expect("every node reaches a cycle"));
    }
    (0..n)
        .map(|v| {
            let f = best[comp_of[v]].unwrap();
            if maximize {
                f
            } else {
                f.neg()
            }
        })
        .collect()
}

/// Maximum cycle mean of a strongly connected graph with at least one cycle.
fn karp_max(adj: &[Vec<(usize, i64)>]) -> Frac {
    let n = adj.len();
    const NEG: i64 = i64::MIN / 4;
    // d[k * n + v]: heaviest walk of exactly k edges ending in v
    let mut d = vec![NEG; (n + 1) * n];
    d[..n].fill(0);
    for k in 1..=n {
        let (before, after) = d.split_at_mut(k * n);
        let prev = &before[(k - 1) * n..];
        let cur = &mut after[..n];
        for (u, edges) in adj.iter().enumerate() {
            let du = prev[u];
            if du == NEG {
                continue;
            }
            for &(v, w) in edges {
                let cand = du + w;
                if cand > cur[v] {
                    cur[v] = cand;
                }
            }
        }
    }
    let mut best: Option<Frac> = None;
    for v in 0..n {
        let dn = d[n * n + v];
        if dn == NEG {
            continue;
        }
        let mut worst: Option<Frac> = None;
        for k in 0..n {
            let dk = d[k * n + v];
            if dk == NEG {
                continue;
            }
            let f = Frac::new((dn - dk) as i128, (n - k) as i128);
            worst = Some(worst.map_or(f, |x| x.min(f)));
        }
        if let Some(wv) = worst {
            best = Some(best.map_or(wv, |x| x.max(wv)));
        }
    }
    best.expect("strongly connected graph with a cycle")
}

/// Iterative Tarjan; components come out sinks first.
fn tarjan(adj: &[Vec<(usize, i64)>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let t = adj[v][*i].0;
                *i += 1;
                if index[t] == UNSEEN {
                    index[t] = next;
                    low[t] = next;
                    next += 1;
                    stack.push(t);
                    on_stack[t] = true;
                    call.push((t, 0));
                } else if on_stack[t] {
                    low[v] = low[v].min(index[t]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}
