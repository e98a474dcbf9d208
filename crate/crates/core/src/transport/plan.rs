use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanKind {
    W1,
    WInfinity,
}

impl PlanKind {
    pub fn name(&self) -> &'static str {
        match self {
            PlanKind::W1 => "w1",
            PlanKind::WInfinity => "w_infinity",
        }
    }
}

/// Mass shipped from point `point` to cell `cell` (global cell index).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanEntry {
    pub point: usize,
    pub cell: usize,
    /// Integer units; one unit is `1 / (N · M)` of the (normalized) total mass.
    pub units: i64,
    pub mass: f64,
    pub distance: f64,
}

/// A feasible coupling between the empirical measure and a grid measure.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub kind: PlanKind,
    /// Mean distance for W₁, maximal distance for W∞.
    pub value: f64,
    pub n_points: usize,
    pub dim: usize,
    pub res: usize,
    /// Units each point ships in total (the number of positive-mass cells).
    pub units_per_point: i64,
    pub entries: Vec<PlanEntry>,
}

impl TransportPlan {
    pub fn max_distance(&self) -> f64 {
        self.entries.iter().map(|e| e.distance).fold(0.0, f64::max)
    }

    pub fn mean_distance(&self) -> f64 {
        self.entries.iter().map(|e| e.mass * e.distance).sum()
    }

    /// Text export: a `key=value` header line, then `k j mass distance` per entry.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "kind={} value={} N={} m={} d={}\n",
            self.kind.name(),
            self.value,
            self.n_points,
            self.res,
            self.dim
        );
        for e in &self.entries {
            let _ = writeln!(s, "{} {} {} {}", e.point, e.cell, e.mass, e.distance);
        }
        s
    }

    /// Reads back `(k, j, mass, distance)` rows from [`TransportPlan::to_text`] output.
    pub fn parse_entries(text: &str) -> Result<Vec<(usize, usize, f64, f64)>> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = |reason: String| Error::Parse { line: i + 1, reason };
            if f.len() != 4 {
                return Err(bad(format!("expected 4 fields, found {}", f.len())));
            }
            out.push((
                f[0].parse().map_err(|e| bad(format!("{e}")))?,
                f[1].parse().map_err(|e| bad(format!("{e}")))?,
                f[2].parse().map_err(|e| bad(format!("{e}")))?,
                f[3].parse().map_err(|e| bad(format!("{e}")))?,
            ));
        }
        Ok(out)
    }
}

/// The cells `X_k` receiving mass from point `k`, with the restricted masses `μ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub point: usize,
    pub cells: Vec<usize>,
    pub mass: Vec<f64>,
}

impl Region {
    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }
}

pub fn regions(plan: &TransportPlan) -> Vec<Region> {
    let mut out: Vec<Region> = (0..plan.n_points)
        .map(|k| Region {
            point: k,
            cells: Vec::new(),
            mass: Vec::new(),
        })
        .collect();
    for e in plan.entries.iter().filter(|e| e.units > 0) {
        let r = &mut out[e.point];
        r.cells.push(e.cell);
        r.mass.push(e.mass);
    }
    out
}
