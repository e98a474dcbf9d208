//! Exact semi-discrete W₁ and W∞ between an empirical measure and a grid measure.
//!
//! Both problems are solved on the integer instance described in [`instance`]:
//! each point supplies one unit per positive-mass cell and each such cell demands
//! one unit per point, so feasibility and optimality are decided without any
//! floating-point tolerance. Distances are point-to-cell-center and quantized to
//! 10⁻¹²; every reported distance is such a quantized value.

mod density;
mod instance;
mod maxflow;
mod mincost;
mod plan;

pub use density::{density_bound_check, DensityReport, DEFAULT_PROBES};
pub use instance::{dequantize, quantize, COST_SCALE, MAX_COST_ENTRIES};
pub use maxflow::Dinic;
pub use plan::{regions, PlanEntry, PlanKind, Region, TransportPlan};

use crate::domain::{GridMeasure, PointSet};
use crate::error::{Error, Result};
use crate::geom;

use instance::Instance;
use mincost::Assignment;

/// An optimal value together with a plan attaining it.
#[derive(Debug, Clone)]
pub struct Solution {
    pub value: f64,
    pub plan: TransportPlan,
}

fn to_plan(inst: &Instance, g: &GridMeasure, a: &Assignment, kind: PlanKind, value: f64) -> TransportPlan {
    let total_units = (inst.n as f64) * (inst.num_cells() as f64);
    let mut entries = Vec::new();
    for (jl, flows) in a.per_cell.iter().enumerate() {
        let mut flows = flows.clone();
        flows.sort_unstable_by_key(|e| e.0);
        for (k, units) in flows {
            let k = k as usize;
            entries.push(PlanEntry {
                point: k,
                cell: inst.cells[jl],
                units,
                mass: units as f64 / total_units,
                distance: dequantize(inst.cost(k, jl)),
            });
        }
    }
    entries.sort_by_key(|e| (e.point, e.cell));
    TransportPlan {
        kind,
        value,
        n_points: inst.n,
        dim: g.dim(),
        res: g.res(),
        units_per_point: inst.supply(),
        entries,
    }
}

/// Discrete W₁: the optimal mean point-to-cell-center distance.
pub fn solve_w1(pts: &PointSet, g: &GridMeasure) -> Result<Solution> {
    let inst = Instance::build(pts, g)?;
    let a = mincost::solve_unrestricted(&inst)
        .ok_or_else(|| Error::Infeasible("unrestricted transportation problem".into()))?;
    let total_units = (inst.n as f64) * (inst.num_cells() as f64);
    let value = a.total_cost as f64 / COST_SCALE / total_units;
    Ok(Solution {
        value,
        plan: to_plan(&inst, g, &a, PlanKind::W1, value),
    })
}

fn feasible(inst: &Instance, threshold: i64) -> bool {
    let n = inst.n;
    let mc = inst.num_cells();
    let (s, t) = (0, n + mc + 1);
    let mut net = Dinic::new(n + mc + 2);
    let gcd = gcd(n as i64, mc as i64);
    let supply = inst.supply() / gcd;
    let demand = inst.demand() / gcd;
    for k in 0..n {
        net.add_edge(s, 1 + k, supply);
    }
    for j in 0..mc {
        net.add_edge(1 + n + j, t, demand);
    }
    for k in 0..n {
        for j in 0..mc {
            if inst.cost(k, j) <= threshold {
                net.add_edge(1 + k, 1 + n + j, demand);
            }
        }
    }
    net.max_flow(s, t) == supply * n as i64
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Whether every unit can ship along edges of length at most `threshold`.
pub fn bottleneck_feasible(pts: &PointSet, g: &GridMeasure, threshold: f64) -> Result<bool> {
    let inst = Instance::build(pts, g)?;
    Ok(feasible(&inst, quantize(threshold)))
}

/// Sorted distinct (quantized) point-to-cell-center distances.
pub fn candidate_distances(pts: &PointSet, g: &GridMeasure) -> Result<Vec<f64>> {
    let inst = Instance::build(pts, g)?;
    Ok(inst.candidates().into_iter().map(dequantize).collect())
}

/// Discrete W∞: the smallest candidate distance `t` such that all mass can ship
/// along edges of length ≤ `t`. The returned plan is the cheapest (W₁-optimal)
/// plan among those using only such edges.
pub fn solve_winf(pts: &PointSet, g: &GridMeasure) -> Result<Solution> {
    let inst = Instance::build(pts, g)?;
    let candidates = inst.candidates();
    let cover = inst.covering_cost();
    // invariant: candidates[hi] feasible; everything below lo infeasible
    let mut lo = candidates.partition_point(|&c| c < cover);
    let mut hi = candidates.len() - 1;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(&inst, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let t = candidates[hi];
    let a = mincost::solve(&inst, t)
        .ok_or_else(|| Error::Infeasible(format!("no plan within bottleneck {}", dequantize(t))))?;
    let value = dequantize(t);
    Ok(Solution {
        value,
        plan: to_plan(&inst, g, &a, PlanKind::WInfinity, value),
    })
}

/// Largest distance from a positive-mass cell center to its nearest point.
pub fn covering_radius(pts: &PointSet, g: &GridMeasure) -> f64 {
    let geo = g.geometry();
    let mut c = vec![0.0; g.dim()];
    let mut worst: f64 = 0.0;
    for j in g.support() {
        geo.center_into(j, &mut c);
        let near = pts.iter().map(|p| geom::dist2(p, &c)).fold(f64::INFINITY, f64::min);
        worst = worst.max(near);
    }
    worst.sqrt()
}
