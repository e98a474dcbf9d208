//! Integer form of a semi-discrete instance: every point supplies `M` units and
//! every positive-mass cell demands `N` units, with costs quantized to 10⁻¹².

use crate::domain::{GridMeasure, PointSet};
use crate::error::{Error, Result};
use crate::geom;

/// Costs are Euclidean distances times this factor, rounded to the nearest integer.
pub const COST_SCALE: f64 = 1e12;

/// Upper bound on dense cost-matrix entries held in memory.
pub const MAX_COST_ENTRIES: usize = 1 << 25;

pub fn quantize(distance: f64) -> i64 {
    (distance * COST_SCALE).round() as i64
}

pub fn dequantize(cost: i64) -> f64 {
    cost as f64 / COST_SCALE
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub n: usize,
    /// Global indices of the positive-mass cells, in increasing order.
    pub cells: Vec<usize>,
    /// Row-major `n × cells.len()` quantized distances.
    pub cost: Vec<i64>,
}

impl Instance {
    pub fn build(pts: &PointSet, g: &GridMeasure) -> Result<Instance> {
        if pts.dim() != g.dim() {
            return Err(Error::arg("points", format!(
                "point dimension {} differs from grid dimension {}",
                pts.dim(),
                g.dim()
            )));
        }
        let cells = g.support();
        if cells.is_empty() {
            return Err(Error::DegenerateSupport("measure has no positive-mass cell".into()));
        }
        let w0 = g.cell_mass()[cells[0]];
        if cells.iter().any(|&j| g.cell_mass()[j] != w0) {
            return Err(Error::arg(
                "measure",
                "transport needs equal mass on every positive-mass cell",
            ));
        }
        let n = pts.len();
        let mc = cells.len();
        let units = (n as u128) * (mc as u128);
        if units > (1u128 << 62) {
            return Err(Error::Budget(format!("N·M = {units} exceeds 2^62 integer units")));
        }
        if units > MAX_COST_ENTRIES as u128 {
            return Err(Error::Budget(format!(
                "N·M = {units} exceeds the dense cost budget of {MAX_COST_ENTRIES}"
            )));
        }
        let geo = g.geometry();
        let centers: Vec<f64> = {
            let mut out = vec![0.0; mc * g.dim()];
            for (chunk, &j) in out.chunks_exact_mut(g.dim()).zip(&cells) {
                geo.center_into(j, chunk);
            }
            out
        };
        let mut cost = Vec::with_capacity(n * mc);
        for p in pts.iter() {
            cost.extend(centers.chunks_exact(g.dim()).map(|c| quantize(geom::dist(p, c))));
        }
        Ok(Instance { n, cells, cost })
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn cost(&self, k: usize, j: usize) -> i64 {
        self.cost[k * self.cells.len() + j]
    }

    /// Units each point supplies.
    pub fn supply(&self) -> i64 {
        self.cells.len() as i64
    }

    /// Units each cell demands.
    pub fn demand(&self) -> i64 {
        self.n as i64
    }

    /// Largest nearest-point cost over cells: a lower bound on any bottleneck value.
    pub fn covering_cost(&self) -> i64 {
        (0..self.num_cells())
            .map(|j| (0..self.n).map(|k| self.cost(k, j)).min().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Sorted distinct costs.
    pub fn candidates(&self) -> Vec<i64> {
        let mut c = self.cost.clone();
        c.sort_unstable();
        c.dedup();
        c
    }
}
