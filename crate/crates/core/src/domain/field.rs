//! Test functions sampled at cell centers together with their gradient magnitudes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom;

use super::grid::GridGeometry;
use super::points::PointSet;

/// Analytic families of test functions (plus the purely sampled case).
#[derive(Debug, Clone, PartialEq)]
pub enum FieldFamily {
    /// `min(ε, min_k ‖x − x_k‖)`; needs a point set.
    ExtremalEps { eps: f64 },
    /// `min(‖x − a‖, δ)`; needs an anchor point `a`.
    DistanceCap { cap: f64 },
    /// `⟨c, x⟩ + offset`.
    Linear { coeffs: Vec<f64>, offset: f64 },
    /// `Π_i sin(2π a_i x_i)`.
    ProductSine { freqs: Vec<f64> },
    /// Values supplied directly, gradients by finite differences.
    Sampled,
}

impl FieldFamily {
    pub fn name(&self) -> &'static str {
        match self {
            FieldFamily::ExtremalEps { .. } => "extremal_eps",
            FieldFamily::DistanceCap { .. } => "distance_cap",
            FieldFamily::Linear { .. } => "linear",
            FieldFamily::ProductSine { .. } => "product_sine",
            FieldFamily::Sampled => "sampled",
        }
    }

    /// The scalar parameter reported alongside results (ε or δ), if any.
    pub fn scalar_param(&self) -> Option<f64> {
        match self {
            FieldFamily::ExtremalEps { eps } => Some(*eps),
            FieldFamily::DistanceCap { cap } => Some(*cap),
            _ => None,
        }
    }
}

/// What an analytic family is anchored to.
#[derive(Debug, Clone, Copy)]
pub enum Anchor<'a> {
    None,
    Points(&'a PointSet),
    Point(&'a [f64]),
}

#[derive(Debug, Clone, PartialEq)]
enum Analytic {
    MinDistance {
        cap: f64,
        dim: usize,
        sites: Vec<f64>,
    },
    Linear {
        coeffs: Vec<f64>,
        offset: f64,
    },
    ProductSine {
        freqs: Vec<f64>,
    },
}

impl Analytic {
    /// Value and gradient magnitude at `x`.
    fn eval(&self, x: &[f64]) -> (f64, f64) {
        match self {
            Analytic::MinDistance { cap, dim, sites } => {
                let r = sites
                    .chunks_exact(*dim)
                    .map(|s| geom::dist2(x, s))
                    .fold(f64::INFINITY, f64::min)
                    .sqrt();
                // ties with the cap resolve to the flat side
                if r < *cap {
                    (r, 1.0)
                } else {
                    (*cap, 0.0)
                }
            }
            Analytic::Linear { coeffs, offset } => {
                let v = coeffs.iter().zip(x).map(|(c, xi)| c * xi).sum::<f64>() + offset;
                (v, geom::norm(coeffs))
            }
            Analytic::ProductSine { freqs } => {
                let w: Vec<f64> = freqs.iter().map(|a| 2.0 * PI * a).collect();
                let s: Vec<f64> = w.iter().zip(x).map(|(w, xi)| (w * xi).sin()).collect();
                let value = s.iter().product();
                let mut g2 = 0.0;
                for i in 0..s.len() {
                    let mut gi = w[i] * (w[i] * x[i]).cos();
                    for (l, sl) in s.iter().enumerate() {
                        if l != i {
                            gi *= sl;
                        }
                    }
                    g2 += gi * gi;
                }
                (value, g2.sqrt())
            }
        }
    }
}

/// A function sampled at the cell centers of a grid, with `|∇f|` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    geometry: GridGeometry,
    values: Vec<f64>,
    grad_mag: Vec<f64>,
    family: FieldFamily,
    analytic: Option<Analytic>,
    scale: f64,
}

impl ScalarField {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grad_mag(&self) -> &[f64] {
        &self.grad_mag
    }

    pub fn family(&self) -> &FieldFamily {
        &self.family
    }

    /// Point evaluation: the analytic formula when available, otherwise
    /// multilinear interpolation of the cell-center samples (clamped at the
    /// outermost centers).
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.analytic {
            Some(a) => self.scale * a.eval(x).0,
            None => interpolate(&self.geometry, &self.values, x),
        }
    }

    /// The field `λ f`.
    pub fn scaled(&self, lambda: f64) -> ScalarField {
        ScalarField {
            geometry: self.geometry,
            values: self.values.iter().map(|v| lambda * v).collect(),
            grad_mag: self.grad_mag.iter().map(|g| lambda.abs() * g).collect(),
            family: self.family.clone(),
            analytic: self.analytic.clone(),
            scale: self.scale * lambda,
        }
    }

    /// A sampled field from explicit cell-center values; gradients by finite differences.
    pub fn sampled(geometry: GridGeometry, values: Vec<f64>) -> Result<ScalarField> {
        if values.len() != geometry.num_cells() {
            return Err(Error::arg("values", "one value per cell is required"));
        }
        let grad_mag = finite_diff_gradient(&geometry, &values)?;
        Ok(ScalarField {
            geometry,
            values,
            grad_mag,
            family: FieldFamily::Sampled,
            analytic: None,
            scale: 1.0,
        })
    }

    /// Samples `f` at cell centers; gradients by finite differences.
    pub fn from_fn(geometry: GridGeometry, f: impl Fn(&[f64]) -> f64) -> Result<ScalarField> {
        let mut c = vec![0.0; geometry.dim];
        let values = (0..geometry.num_cells())
            .map(|j| {
                geometry.center_into(j, &mut c);
                f(&c)
            })
            .collect();
        ScalarField::sampled(geometry, values)
    }

    /// A sampled field with caller-provided gradient magnitudes (piecewise-constant data).
    pub fn with_gradient(geometry: GridGeometry, values: Vec<f64>, grad_mag: Vec<f64>) -> Result<ScalarField> {
        let n = geometry.num_cells();
        if values.len() != n || grad_mag.len() != n {
            return Err(Error::arg("values", "one value per cell is required"));
        }
        if grad_mag.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::arg("grad_mag", "gradient magnitudes must be finite and nonnegative"));
        }
        Ok(ScalarField {
            geometry,
            values,
            grad_mag,
            family: FieldFamily::Sampled,
            analytic: None,
            scale: 1.0,
        })
    }
}

/// Samples an analytic family (or validates a sampled request) on `geometry`.
pub fn build_field(family: &FieldFamily, anchor: Anchor<'_>, geometry: &GridGeometry) -> Result<ScalarField> {
    let d = geometry.dim;
    let analytic = match family {
        FieldFamily::ExtremalEps { eps } => {
            if !(*eps > 0.0) {
                return Err(Error::arg("eps", "ε must be positive"));
            }
            let Anchor::Points(pts) = anchor else {
                return Err(Error::arg("points", "extremal_eps needs a point set"));
            };
            if pts.dim() != d {
                return Err(Error::arg("points", "dimension mismatch with grid"));
            }
            Analytic::MinDistance {
                cap: *eps,
                dim: d,
                sites: pts.coords().to_vec(),
            }
        }
        FieldFamily::DistanceCap { cap } => {
            if !(*cap > 0.0) {
                return Err(Error::arg("cap", "δ must be positive"));
            }
            let Anchor::Point(a) = anchor else {
                return Err(Error::arg("anchor", "distance_cap needs an anchor point"));
            };
            if a.len() != d {
                return Err(Error::arg("anchor", "dimension mismatch with grid"));
            }
            Analytic::MinDistance {
                cap: *cap,
                dim: d,
                sites: a.to_vec(),
            }
        }
        FieldFamily::Linear { coeffs, offset } => {
            if coeffs.len() != d {
                return Err(Error::arg("coeffs", format!("need {d} coefficients")));
            }
            Analytic::Linear {
                coeffs: coeffs.clone(),
                offset: *offset,
            }
        }
        FieldFamily::ProductSine { freqs } => {
            if freqs.len() != d {
                return Err(Error::arg("coeffs", format!("need {d} frequencies")));
            }
            Analytic::ProductSine { freqs: freqs.clone() }
        }
        FieldFamily::Sampled => {
            return Err(Error::arg("family", "sampled fields are built from values, not a family"))
        }
    };
    let n = geometry.num_cells();
    let mut values = Vec::with_capacity(n);
    let mut grad_mag = Vec::with_capacity(n);
    let mut c = vec![0.0; d];
    for j in 0..n {
        geometry.center_into(j, &mut c);
        let (v, g) = analytic.eval(&c);
        values.push(v);
        grad_mag.push(g);
    }
    Ok(ScalarField {
        geometry: *geometry,
        values,
        grad_mag,
        family: family.clone(),
        analytic: Some(analytic),
        scale: 1.0,
    })
}

/// Gradient magnitude from cell-center samples: central differences inside,
/// one-sided differences on boundary cells.
pub fn finite_diff_gradient(geometry: &GridGeometry, values: &[f64]) -> Result<Vec<f64>> {
    let m = geometry.res;
    if m < 3 {
        return Err(Error::Resolution(format!(
            "finite differences need at least 3 cells per axis, got {m}"
        )));
    }
    let d = geometry.dim;
    let h = geometry.cell_side();
    let strides: Vec<usize> = (0..d).map(|a| m.pow((d - 1 - a) as u32)).collect();
    let mut idx = vec![0usize; d];
    let mut out = Vec::with_capacity(values.len());
    for j in 0..values.len() {
        geometry.multi_index(j, &mut idx);
        let mut g2 = 0.0;
        for a in 0..d {
            let s = strides[a];
            let da = if idx[a] == 0 {
                (values[j + s] - values[j]) / h
            } else if idx[a] == m - 1 {
                (values[j] - values[j - s]) / h
            } else {
                (values[j + s] - values[j - s]) / (2.0 * h)
            };
            g2 += da * da;
        }
        out.push(g2.sqrt());
    }
    Ok(out)
}

fn interpolate(geometry: &GridGeometry, values: &[f64], x: &[f64]) -> f64 {
    let d = geometry.dim;
    let m = geometry.res;
    let h = geometry.cell_side();
    let mut lo = vec![0usize; d];
    let mut frac = vec![0.0; d];
    for a in 0..d {
        let t = ((x[a] - geometry.cube.origin) / h - 0.5).clamp(0.0, (m - 1) as f64);
        let i = (t.floor() as usize).min(m - 2);
        lo[a] = i;
        frac[a] = t - i as f64;
    }
    let mut acc = 0.0;
    let mut idx = vec![0usize; d];
    for corner in 0..(1usize << d) {
        let mut w = 1.0;
        for a in 0..d {
            let up = (corner >> a) & 1;
            idx[a] = lo[a] + up;
            w *= if up == 1 { frac[a] } else { 1.0 - frac[a] };
        }
        if w != 0.0 {
            acc += w * values[geometry.flat_index(&idx)];
        }
    }
    acc
}
