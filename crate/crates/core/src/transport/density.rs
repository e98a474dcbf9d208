use crate::domain::{PointSet, UniformStream};
use crate::error::{Error, Result};
use crate::geom;

pub const DEFAULT_PROBES: usize = 100;

/// Point counts in balls of radius W∞ against `ω_d · 2^d · W∞^d · N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    /// Number of probe locations examined (random probes plus every point).
    pub probes: usize,
    /// `#{i : ‖x_i − x‖ ≤ W∞}` per probe, random probes first.
    pub counts: Vec<usize>,
    pub bound: f64,
    pub max_count: usize,
    pub max_ratio: f64,
}

impl DensityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_count as f64 <= self.bound + tol
    }
}

pub fn density_bound_check(pts: &PointSet, w_inf: f64, probes: usize, seed: u64) -> Result<DensityReport> {
    if !(w_inf > 0.0) {
        return Err(Error::arg("w_inf", "W∞ must be positive"));
    }
    if probes == 0 {
        return Err(Error::arg("probes", "need at least one probe"));
    }
    let d = pts.dim();
    let mut rng = UniformStream::new(seed);
    let mut locations: Vec<Vec<f64>> = (0..probes)
        .map(|_| (0..d).map(|_| rng.next_f64()).collect())
        .collect();
    locations.extend(pts.iter().map(<[f64]>::to_vec));
    let r2 = w_inf * w_inf;
    let counts: Vec<usize> = locations
        .iter()
        .map(|x| pts.iter().filter(|p| geom::dist2(p, x) <= r2).count())
        .collect();
    let bound = geom::overlap_constant(d) * w_inf.powi(d as i32) * pts.len() as f64;
    let max_count = counts.iter().copied().max().unwrap_or(0);
    Ok(DensityReport {
        probes: locations.len(),
        counts,
        bound,
        max_count,
        max_ratio: max_count as f64 / bound,
    })
}
