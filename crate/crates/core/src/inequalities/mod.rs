//! Quadrature errors and every right-hand side of the transport bounds, with
//! dimensionless ratios.
//!
//! Only the bounds with explicit constants are ever asserted (Kantorovich-
//! Rubinstein with constant 1, the density count with `ω_d·2^d`). Everything
//! else is reported as a ratio `E / rhs` so stability across scales can be
//! inspected.

mod audit;
mod lemma;

pub use audit::{proof_chain_audit, proof_chain_audit_with_plan, AuditReport};
pub use lemma::{
    ball_example, cone_example, lemma1_verify, lemma4_verify, star_hull, Lemma1Report, Lemma4Report,
};

use crate::domain::{PointSet, ScalarField};
use crate::error::{Error, Result};
use crate::norms::{summarize, NormSummary, Subset};
use crate::transport::{solve_w1, solve_winf};
use crate::domain::GridMeasure;

/// `num / den`, with `0/0 = 0` and `x/0 = ∞` for `x > 0`.
pub fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `|Σ_j f_j · cellvol − (1/N) Σ_k f(x_k)|` on the unit-cube grid of `f`.
pub fn quadrature_error(f: &ScalarField, pts: &PointSet) -> Result<f64> {
    let geo = f.geometry();
    if !geo.cube.is_unit() {
        return Err(Error::Precondition("quadrature error needs a unit-cube grid".into()));
    }
    if pts.dim() != geo.dim {
        return Err(Error::arg("pts", "dimension mismatch with the field"));
    }
    let integral = f.values().iter().sum::<f64>() * geo.cell_volume();
    let average = pts.iter().map(|x| f.eval(x)).sum::<f64>() / pts.len() as f64;
    Ok((integral - average).abs())
}

/// One row of the δ-family: `linf^{(d−1)/d} · l1^{1/d} · N^{δ/d} · W∞^{1+δ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRow {
    pub delta: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub dim: usize,
    pub n_points: usize,
    pub e: f64,
    pub w1: f64,
    pub w_inf: f64,
    pub norms: NormSummary,
    /// `linf · W₁`
    pub rhs_kr: f64,
    /// `linf^{(d−1)/d} · l1^{1/d} · N^{1/d} · W∞²`
    pub rhs_theorem: f64,
    /// `linf^{(d−1)/d} · l1^{1/d} · N · W∞^{d+1}`
    pub rhs_proposition: f64,
    pub ratio_kr: f64,
    pub ratio_theorem: f64,
    pub ratio_proposition: f64,
    pub deltas: Vec<DeltaRow>,
}

impl InequalityReport {
    /// Assembles a report from precomputed transport distances.
    pub fn from_parts(f: &ScalarField, pts: &PointSet, w1: f64, w_inf: f64, deltas: &[f64]) -> Result<Self> {
        let e = quadrature_error(f, pts)?;
        let norms = summarize(f.grad_mag(), f.geometry(), Subset::All)?;
        let d = f.geometry().dim as f64;
        let n = pts.len() as f64;
        let grad = norms.linf.powf((d - 1.0) / d) * norms.l1.powf(1.0 / d);
        let rhs_kr = norms.linf * w1;
        let rhs_theorem = grad * n.powf(1.0 / d) * w_inf * w_inf;
        let rhs_proposition = grad * n * w_inf.powf(d + 1.0);
        let mut report = InequalityReport {
            dim: f.geometry().dim,
            n_points: pts.len(),
            e,
            w1,
            w_inf,
            norms,
            rhs_kr,
            rhs_theorem,
            rhs_proposition,
            ratio_kr: ratio(e, rhs_kr),
            ratio_theorem: ratio(e, rhs_theorem),
            ratio_proposition: ratio(e, rhs_proposition),
            deltas: Vec::new(),
        };
        report.deltas = delta_sweep(&report, deltas)?;
        Ok(report)
    }

    pub fn rhs_delta(&self, delta: f64) -> f64 {
        let d = self.dim as f64;
        let n = self.n_points as f64;
        self.norms.linf.powf((d - 1.0) / d)
            * self.norms.l1.powf(1.0 / d)
            * n.powf(delta / d)
            * self.w_inf.powf(1.0 + delta)
    }
}

/// Solves both transport problems and assembles the full report.
pub fn theorem_report(f: &ScalarField, pts: &PointSet, g: &GridMeasure, deltas: &[f64]) -> Result<InequalityReport> {
    if f.geometry() != g.geometry() {
        return Err(Error::arg("f", "field and measure live on different grids"));
    }
    let w1 = solve_w1(pts, g)?.value;
    let w_inf = solve_winf(pts, g)?.value;
    InequalityReport::from_parts(f, pts, w1, w_inf, deltas)
}

/// The δ-family rows for `δ ∈ (0, d]`.
pub fn delta_sweep(report: &InequalityReport, deltas: &[f64]) -> Result<Vec<DeltaRow>> {
    deltas
        .iter()
        .map(|&delta| {
            if !(delta > 0.0 && delta <= report.dim as f64) {
                return Err(Error::arg("deltas", format!("δ = {delta} is outside (0, {}]", report.dim)));
            }
            let rhs = report.rhs_delta(delta);
            Ok(DeltaRow {
                delta,
                rhs,
                ratio: ratio(report.e, rhs),
            })
        })
        .collect()
}
