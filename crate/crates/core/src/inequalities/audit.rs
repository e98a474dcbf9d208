use super::{quadrature_error, ratio};
use crate::domain::{GridMeasure, PointSet, ScalarField};
use crate::error::{Error, Result};
use crate::geom::overlap_constant;
use crate::norms::{lorentz_d1, lp_norms, Subset};
use crate::transport::{regions, solve_winf, PlanKind, TransportPlan};

/// Term-by-term evaluation of the region decomposition induced by a W∞ plan.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub e: f64,
    pub w_inf: f64,
    /// `t_k = |∫_{X_k} f dμ_k − f(x_k)/N|`
    pub terms: Vec<f64>,
    /// `Σ_k t_k − E`, nonnegative by the triangle inequality.
    pub triangle_slack: f64,
    /// `t_k / ((W∞ / N^{(d−1)/d}) · ‖∇f‖_{L^{d,1}(X_k)})`
    pub region_ratios: Vec<f64>,
    /// `Σ_k ‖∇f‖_{L¹(X_k)} / (W∞^d · N · ‖∇f‖_{L¹})`
    pub overlap_ratio: f64,
    /// `ω_d · 2^d`
    pub overlap_bound: f64,
}

impl AuditReport {
    pub fn sum_terms(&self) -> f64 {
        self.terms.iter().sum()
    }
}

pub fn proof_chain_audit(f: &ScalarField, pts: &PointSet, g: &GridMeasure) -> Result<AuditReport> {
    if f.geometry() != g.geometry() {
        return Err(Error::arg("f", "field and measure live on different grids"));
    }
    let plan = solve_winf(pts, g)?.plan;
    proof_chain_audit_with_plan(f, pts, &plan)
}

/// Audit on a precomputed W∞ plan over the unit-cube grid of `f`.
pub fn proof_chain_audit_with_plan(f: &ScalarField, pts: &PointSet, plan: &TransportPlan) -> Result<AuditReport> {
    if plan.kind != PlanKind::WInfinity {
        return Err(Error::arg("plan", "the audit needs a w_infinity plan"));
    }
    let geo = f.geometry();
    if plan.n_points != pts.len() || plan.dim != geo.dim || plan.res != geo.res {
        return Err(Error::arg("plan", "plan does not match the point set or grid"));
    }
    let e = quadrature_error(f, pts)?;
    let n = pts.len() as f64;
    let d = geo.dim as f64;
    let w_inf = plan.value;
    let values = f.values();
    let h = f.grad_mag();

    let mut terms = Vec::with_capacity(pts.len());
    let mut region_ratios = Vec::with_capacity(pts.len());
    let mut l1_sum = 0.0;
    for r in regions(plan) {
        let integral: f64 = r.cells.iter().zip(&r.mass).map(|(&j, w)| values[j] * w).sum();
        let t = (integral - f.eval(pts.point(r.point)) / n).abs();
        terms.push(t);
        if r.cells.is_empty() {
            region_ratios.push(ratio(t, 0.0));
            continue;
        }
        let lorentz = lorentz_d1(h, geo, Subset::Cells(&r.cells))?;
        region_ratios.push(ratio(t, w_inf / n.powf((d - 1.0) / d) * lorentz));
        l1_sum += lp_norms(h, geo, Subset::Cells(&r.cells))?.0;
    }
    let l1 = lp_norms(h, geo, Subset::All)?.0;
    let triangle_slack = terms.iter().sum::<f64>() - e;
    Ok(AuditReport {
        e,
        w_inf,
        terms,
        triangle_slack,
        region_ratios,
        overlap_ratio: ratio(l1_sum, w_inf.powf(d) * n * l1),
        overlap_bound: overlap_constant(geo.dim),
    })
}
