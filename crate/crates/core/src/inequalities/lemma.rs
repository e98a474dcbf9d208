use super::ratio;
use crate::domain::{
    build_field, make_grid_measure, restrict_to_ball, restrict_to_cone, Anchor, Cube, FieldFamily, GridGeometry,
    GridMeasure, ScalarField,
};
use crate::error::{Error, Result};
use crate::geom;
use crate::norms::{lorentz_d1, lp_norms, Subset};

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Report {
    pub lhs: f64,
    pub radius: f64,
    pub mass: f64,
    /// Lorentz norm of `|∇f|` over the cells with center norm `≤ R`.
    pub lorentz: f64,
    /// `R · mass^{(d−1)/d} · lorentz`
    pub rhs: f64,
    pub ratio: f64,
    /// Lorentz norm over the star hull of the support: the cells crossed by
    /// segments from the origin to support cells.
    pub hull_lorentz: f64,
    pub hull_rhs: f64,
    pub hull_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Report {
    pub lhs: f64,
    pub radius: f64,
    pub l1: f64,
    pub linf: f64,
    /// `lhs / (r^d · linf^{(d−1)/d} · l1^{1/d})`
    pub ratio: f64,
}

fn cells_within(geo: &GridGeometry, radius: f64) -> Vec<usize> {
    let r2 = radius * radius;
    let mut c = vec![0.0; geo.dim];
    (0..geo.num_cells())
        .filter(|&j| {
            geo.center_into(j, &mut c);
            geom::norm(&c).powi(2) <= r2
        })
        .collect()
}

/// `f(0) = 0` up to one cell of gradient: `|f(cell ∋ 0)| ≤ linf · side · √d / m`.
fn check_vanishes_at_origin(f: &ScalarField) -> Result<()> {
    let geo = f.geometry();
    let origin = vec![0.0; geo.dim];
    let j = geo
        .locate(&origin)
        .ok_or_else(|| Error::Precondition("the origin lies outside the grid".into()))?;
    let linf = f.grad_mag().iter().copied().fold(0.0, f64::max);
    let tol = linf * geo.cube.side * (geo.dim as f64).sqrt() / geo.res as f64;
    let v = f.values()[j];
    if v.abs() > tol {
        return Err(Error::Precondition(format!("f(0) = {v} exceeds the tolerance {tol}")));
    }
    Ok(())
}

/// Cells whose interior is crossed by a segment from the origin to the center
/// of one of `cells`.
pub fn star_hull(geo: &GridGeometry, cells: &[usize]) -> Vec<usize> {
    let d = geo.dim;
    let h = geo.cell_side();
    let mut mark = vec![false; geo.num_cells()];
    let mut c = vec![0.0; d];
    let mut x = vec![0.0; d];
    let mut ts: Vec<f64> = Vec::new();
    for &j in cells {
        geo.center_into(j, &mut c);
        ts.clear();
        ts.extend([0.0, 1.0]);
        for &ca in &c {
            if ca == 0.0 {
                continue;
            }
            // planes origin + k h strictly between 0 and ca
            let (lo, hi) = if ca > 0.0 { (0.0, ca) } else { (ca, 0.0) };
            let k0 = ((lo - geo.cube.origin) / h).floor() as i64;
            let k1 = ((hi - geo.cube.origin) / h).ceil() as i64;
            for k in k0..=k1 {
                let t = (geo.cube.origin + k as f64 * h) / ca;
                if t > 0.0 && t < 1.0 {
                    ts.push(t);
                }
            }
        }
        ts.sort_by(f64::total_cmp);
        for w in ts.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let t = 0.5 * (w[0] + w[1]);
            for (xa, ca) in x.iter_mut().zip(&c) {
                *xa = t * ca;
            }
            if let Some(i) = geo.locate(&x) {
                mark[i] = true;
            }
        }
        mark[j] = true;
    }
    (0..mark.len()).filter(|&i| mark[i]).collect()
}

/// Evaluates `|∫ f dμ|` against `R · μ(ℝ^d)^{(d−1)/d} · ‖∇f‖_{L^{d,1}}` for a
/// measure supported in `B(0, R)` and `f(0) = 0`.
pub fn lemma1_verify(mu: &GridMeasure, f: &ScalarField, radius: f64) -> Result<Lemma1Report> {
    let geo = mu.geometry();
    if f.geometry() != geo {
        return Err(Error::arg("f", "field and measure live on different grids"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::arg("radius", format!("must be positive, got {radius}")));
    }
    let support = mu.support();
    let r2 = radius * radius * (1.0 + 1e-12);
    if let Some(&j) = support.iter().find(|&&j| geom::norm(&geo.center(j)).powi(2) > r2) {
        return Err(Error::Precondition(format!(
            "cell {j} carries mass outside the ball of radius {radius}"
        )));
    }
    check_vanishes_at_origin(f)?;

    let lhs = f
        .values()
        .iter()
        .zip(mu.cell_mass())
        .map(|(v, w)| v * w)
        .sum::<f64>()
        .abs();
    let mass = mu.total_mass();
    let d = geo.dim as f64;
    let scale = radius * mass.powf((d - 1.0) / d);

    let ball = cells_within(geo, radius);
    let lorentz = lorentz_d1(f.grad_mag(), geo, Subset::Cells(&ball))?;
    let hull = star_hull(geo, &support);
    let hull_lorentz = lorentz_d1(f.grad_mag(), geo, Subset::Cells(&hull))?;
    Ok(Lemma1Report {
        lhs,
        radius,
        mass,
        lorentz,
        rhs: scale * lorentz,
        ratio: ratio(lhs, scale * lorentz),
        hull_lorentz,
        hull_rhs: scale * hull_lorentz,
        hull_ratio: ratio(lhs, scale * hull_lorentz),
    })
}

/// `|∫_{B(0,r)} f dx|` against `r^d · ‖∇f‖_∞^{(d−1)/d} · ‖∇f‖_1^{1/d}` on the ball.
pub fn lemma4_verify(f: &ScalarField, radius: f64) -> Result<Lemma4Report> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::arg("radius", format!("must be positive, got {radius}")));
    }
    let geo = f.geometry();
    check_vanishes_at_origin(f)?;
    let ball = cells_within(geo, radius);
    if ball.is_empty() {
        return Err(Error::DegenerateSupport(format!("no cell center within radius {radius}")));
    }
    let lhs = (ball.iter().map(|&j| f.values()[j]).sum::<f64>() * geo.cell_volume()).abs();
    let (l1, linf) = lp_norms(f.grad_mag(), geo, Subset::Cells(&ball))?;
    let d = geo.dim as f64;
    let rhs = radius.powf(d) * linf.powf((d - 1.0) / d) * l1.powf(1.0 / d);
    Ok(Lemma4Report {
        lhs,
        radius,
        l1,
        linf,
        ratio: ratio(lhs, rhs),
    })
}

/// Lebesgue measure on `B(0, R)` inside `[−R, R]^d`, with the capped distance
/// `min(‖x‖, δ)`.
pub fn ball_example(d: usize, m: usize, radius: f64, delta: f64) -> Result<(GridMeasure, ScalarField)> {
    let g = make_grid_measure(d, m, Cube::centered(radius))?;
    let mu = restrict_to_ball(&g, &vec![0.0; d], radius)?;
    let f = build_field(&FieldFamily::DistanceCap { cap: delta }, Anchor::Point(&vec![0.0; d]), g.geometry())?;
    Ok((mu, f))
}

/// Lebesgue measure on a cone with apex 0 along the first axis, of length `R`
/// and half-width `h`, clipped to `B(0, R)` inside `[−R, R]^d`, with the same
/// capped distance.
pub fn cone_example(
    d: usize,
    m: usize,
    length: f64,
    half_width: f64,
    delta: f64,
) -> Result<(GridMeasure, ScalarField)> {
    let g = make_grid_measure(d, m, Cube::centered(length))?;
    let origin = vec![0.0; d];
    let mut axis = vec![0.0; d];
    axis[0] = 1.0;
    let cone = restrict_to_cone(&g, &origin, &axis, length, half_width)?;
    let mu = restrict_to_ball(&cone, &origin, length)?;
    let f = build_field(&FieldFamily::DistanceCap { cap: delta }, Anchor::Point(&origin), g.geometry())?;
    Ok((mu, f))
}
