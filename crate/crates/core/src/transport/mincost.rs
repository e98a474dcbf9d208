//! Exact min-cost transportation by successive shortest paths.
//!
//! Cells are brought in one at a time and each is filled by shortest augmenting
//! paths from the points with free supply. A path alternates "point `u` takes
//! over part of cell `c` from point `v`" steps, so the search runs on the `N`
//! point nodes only: the cheapest takeover `u → v` is the smallest
//! `cost(u, c) − cost(v, c)` over cells `c` currently served by `v`, kept in an
//! ordered set per ordered pair. Johnson potentials on the points keep every
//! reduced step cost nonnegative, and all arithmetic is on integers.

use std::collections::BTreeSet;

use smallvec::SmallVec;

use super::instance::Instance;

const INF: i64 = i64::MAX / 4;

/// Units shipped from each point into each cell, per cell.
#[derive(Debug, Clone)]
pub struct Assignment {
    pub per_cell: Vec<SmallVec<[(u32, i64); 2]>>,
    pub total_cost: i128,
}

#[derive(Clone, Copy)]
enum Pred {
    Source,
    Takeover { from: usize, cell: usize },
}

struct Solver<'a> {
    inst: &'a Instance,
    limit: i64,
    n: usize,
    pot: Vec<i64>,
    used: Vec<i64>,
    flows: Vec<SmallVec<[(u32, i64); 2]>>,
    takeover: Vec<BTreeSet<(i64, u32)>>,
    cheapest: Vec<Option<(i64, u32)>>,
}

impl<'a> Solver<'a> {
    fn new(inst: &'a Instance, limit: i64) -> Self {
        let n = inst.n;
        Solver {
            inst,
            limit,
            n,
            pot: vec![0; n],
            used: vec![0; n],
            flows: vec![SmallVec::new(); inst.num_cells()],
            takeover: vec![BTreeSet::new(); n * n],
            cheapest: vec![None; n * n],
        }
    }

    fn allowed(&self, k: usize, j: usize) -> bool {
        self.inst.cost(k, j) <= self.limit
    }

    fn add(&mut self, v: usize, j: usize, amt: i64) {
        if let Some(e) = self.flows[j].iter_mut().find(|e| e.0 as usize == v) {
            e.1 += amt;
            return;
        }
        self.flows[j].push((v as u32, amt));
        let cv = self.inst.cost(v, j);
        for u in 0..self.n {
            if u == v || !self.allowed(u, j) {
                continue;
            }
            let key = (self.inst.cost(u, j) - cv, j as u32);
            let slot = u * self.n + v;
            self.takeover[slot].insert(key);
            if self.cheapest[slot].is_none_or(|c| key < c) {
                self.cheapest[slot] = Some(key);
            }
        }
    }

    fn sub(&mut self, v: usize, j: usize, amt: i64) {
        let pos = self.flows[j]
            .iter()
            .position(|e| e.0 as usize == v)
            .expect("takeover from a point that does not serve the cell");
        self.flows[j][pos].1 -= amt;
        debug_assert!(self.flows[j][pos].1 >= 0);
        if self.flows[j][pos].1 > 0 {
            return;
        }
        self.flows[j].swap_remove(pos);
        let cv = self.inst.cost(v, j);
        for u in 0..self.n {
            if u == v || !self.allowed(u, j) {
                continue;
            }
            let key = (self.inst.cost(u, j) - cv, j as u32);
            let slot = u * self.n + v;
            self.takeover[slot].remove(&key);
            if self.cheapest[slot] == Some(key) {
                self.cheapest[slot] = self.takeover[slot].first().copied();
            }
        }
    }

    fn served(&self, v: usize, j: usize) -> i64 {
        self.flows[j]
            .iter()
            .find(|e| e.0 as usize == v)
            .map_or(0, |e| e.1)
    }

    /// One shortest augmenting path into cell `j`; returns units moved or `None`
    /// when the cell cannot be reached.
    fn augment(&mut self, j: usize, remaining: i64) -> Option<i64> {
        let n = self.n;
        let supply = self.inst.supply();
        let target_pot = (0..n)
            .filter(|&a| self.allowed(a, j))
            .map(|a| self.inst.cost(a, j) + self.pot[a])
            .min()?;

        let mut dist = vec![INF; n];
        let mut pred = vec![Pred::Source; n];
        let mut done = vec![false; n];
        for z in 0..n {
            if self.used[z] < supply {
                dist[z] = -self.pot[z];
            }
        }
        let mut best = INF;
        let mut last = usize::MAX;
        loop {
            let mut u = usize::MAX;
            let mut du = INF;
            for k in 0..n {
                if !done[k] && dist[k] < du {
                    du = dist[k];
                    u = k;
                }
            }
            if u == usize::MAX || du >= best {
                break;
            }
            done[u] = true;
            if self.allowed(u, j) {
                let reach = du + self.inst.cost(u, j) + self.pot[u] - target_pot;
                if reach < best {
                    best = reach;
                    last = u;
                }
            }
            for v in 0..n {
                if done[v] {
                    continue;
                }
                if let Some((key, cell)) = self.cheapest[u * n + v] {
                    let nd = du + key + self.pot[u] - self.pot[v];
                    debug_assert!(nd >= du, "negative reduced takeover cost");
                    if nd < dist[v] {
                        dist[v] = nd;
                        pred[v] = Pred::Takeover {
                            from: u,
                            cell: cell as usize,
                        };
                    }
                }
            }
        }
        if last == usize::MAX {
            return None;
        }
        for k in 0..n {
            self.pot[k] += dist[k].min(best);
        }

        // walk back to the source, collecting takeovers
        let mut steps = Vec::new();
        let mut v = last;
        let source = loop {
            match pred[v] {
                Pred::Source => break v,
                Pred::Takeover { from, cell } => {
                    steps.push((from, v, cell));
                    v = from;
                }
            }
        };
        let mut amt = remaining.min(supply - self.used[source]);
        for &(_, v, c) in &steps {
            amt = amt.min(self.served(v, c));
        }
        debug_assert!(amt > 0);
        self.add(last, j, amt);
        for &(u, _, c) in &steps {
            self.add(u, c, amt);
        }
        for &(_, v, c) in &steps {
            self.sub(v, c, amt);
        }
        self.used[source] += amt;
        Some(amt)
    }
}

/// Minimum-cost flow using only edges with `cost ≤ limit`; `None` if infeasible.
pub fn solve(inst: &Instance, limit: i64) -> Option<Assignment> {
    let mut s = Solver::new(inst, limit);
    let demand = inst.demand();
    for j in 0..inst.num_cells() {
        let mut remaining = demand;
        while remaining > 0 {
            remaining -= s.augment(j, remaining)?;
        }
    }
    let total_cost = s
        .flows
        .iter()
        .enumerate()
        .flat_map(|(j, f)| f.iter().map(move |&(k, x)| (k as usize, j, x)))
        .map(|(k, j, x)| x as i128 * inst.cost(k, j) as i128)
        .sum();
    Some(Assignment {
        per_cell: s.flows,
        total_cost,
    })
}

/// Unrestricted minimum-cost flow.
pub fn solve_unrestricted(inst: &Instance) -> Option<Assignment> {
    solve(inst, i64::MAX)
}
