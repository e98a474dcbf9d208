//! L¹, L∞ and Lorentz L^{d,1} norms of piecewise-constant gradient samples.
//!
//! A sample `h_j` stands for the constant value of `|∇f|` on the whole cell
//! `j`, so every norm below is the exact norm of that step function. The
//! Lorentz norm carries the prefactor `d`:
//!
//! ```text
//! ‖h‖_{L^{d,1}} = d · ∫₀^∞ |{|h| ≥ t}|^{1/d} dt
//! ```

use crate::domain::GridGeometry;
use crate::error::{Error, Result};

/// Which cells a norm is taken over.
#[derive(Debug, Clone, Copy)]
pub enum Subset<'a> {
    All,
    /// Distinct global cell indices.
    Cells(&'a [usize]),
}

/// Descriptor of the subset a [`NormSummary`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Whole,
    Cells(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormSummary {
    pub l1: f64,
    pub linf: f64,
    pub lorentz_d1: f64,
    /// `d · linf^{(d−1)/d} · l1^{1/d}`, which dominates `lorentz_d1`.
    pub interp_bound: f64,
    pub scope: Scope,
}

impl NormSummary {
    pub fn slack(&self) -> f64 {
        self.interp_bound - self.lorentz_d1
    }
}

fn gather(h: &[f64], geo: &GridGeometry, subset: Subset<'_>) -> Result<Vec<f64>> {
    if h.len() != geo.num_cells() {
        return Err(Error::arg("h", format!("{} samples for {} cells", h.len(), geo.num_cells())));
    }
    let vals: Vec<f64> = match subset {
        Subset::All => h.iter().map(|v| v.abs()).collect(),
        Subset::Cells(cells) => {
            if let Some(&j) = cells.iter().find(|&&j| j >= h.len()) {
                return Err(Error::arg("subset", format!("cell {j} out of range")));
            }
            cells.iter().map(|&j| h[j].abs()).collect()
        }
    };
    if vals.is_empty() {
        return Err(Error::arg("subset", "empty"));
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("h", "non-finite sample"));
    }
    Ok(vals)
}

fn l1_of(vals: &[f64], vol: f64) -> f64 {
    vals.iter().sum::<f64>() * vol
}

/// `(Σ |h_j| · cellvol, max |h_j|)` over the subset.
pub fn lp_norms(h: &[f64], geo: &GridGeometry, subset: Subset<'_>) -> Result<(f64, f64)> {
    let vals = gather(h, geo, subset)?;
    let linf = vals.iter().copied().fold(0.0, f64::max);
    Ok((l1_of(&vals, geo.cell_volume()), linf))
}

/// Layer cake over sorted distinct levels with closed super-level sets.
fn layer_cake(mut vals: Vec<f64>, vol: f64, d: usize) -> f64 {
    vals.sort_by(f64::total_cmp);
    let n = vals.len();
    let inv_d = 1.0 / d as f64;
    let mut total = 0.0;
    let mut prev = 0.0;
    let mut i = 0;
    while i < n {
        let v = vals[i];
        if v > prev {
            total += (v - prev) * ((n - i) as f64 * vol).powf(inv_d);
            prev = v;
        }
        while i < n && vals[i] == v {
            i += 1;
        }
    }
    d as f64 * total
}

/// Exact `‖h‖_{L^{d,1}}` of the step function over the subset, with `d` the
/// grid dimension and the cell volume left unnormalized.
pub fn lorentz_d1(h: &[f64], geo: &GridGeometry, subset: Subset<'_>) -> Result<f64> {
    let vals = gather(h, geo, subset)?;
    // at d = 1 the layer cake is the L¹ norm; return it bit-for-bit
    if geo.dim == 1 {
        return Ok(l1_of(&vals, geo.cell_volume()));
    }
    Ok(layer_cake(vals, geo.cell_volume(), geo.dim))
}

fn interp_bound(d: usize, l1: f64, linf: f64) -> f64 {
    let d = d as f64;
    d * linf.powf((d - 1.0) / d) * l1.powf(1.0 / d)
}

/// All three norms and the interpolation bound over one subset.
pub fn summarize(h: &[f64], geo: &GridGeometry, subset: Subset<'_>) -> Result<NormSummary> {
    let (l1, linf) = lp_norms(h, geo, subset)?;
    let lorentz = lorentz_d1(h, geo, subset)?;
    Ok(NormSummary {
        l1,
        linf,
        lorentz_d1: lorentz,
        interp_bound: interp_bound(geo.dim, l1, linf),
        scope: match subset {
            Subset::All => Scope::Whole,
            Subset::Cells(c) => Scope::Cells(c.len()),
        },
    })
}

/// `interp_bound − lorentz_d1`; nonnegative up to rounding.
pub fn interpolation_check(h: &[f64], geo: &GridGeometry, subset: Subset<'_>) -> Result<f64> {
    summarize(h, geo, subset).map(|s| s.slack())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{
        build_field, gen_point_set, make_grid_measure, Anchor, Cube, FieldFamily, PointSetKind, UniformStream,
    };
    use crate::geom::unit_ball_volume;
    use proptest::prelude::*;

    fn geo(d: usize, m: usize) -> GridGeometry {
        *make_grid_measure(d, m, Cube::UNIT).unwrap().geometry()
    }

    #[test]
    fn constant_fields() {
        let g = geo(2, 16);
        assert_eq!(lp_norms(&vec![1.0; 256], &g, Subset::All).unwrap(), (1.0, 1.0));
        assert_eq!(lp_norms(&vec![0.0; 256], &g, Subset::All).unwrap(), (0.0, 0.0));
        assert_eq!(lorentz_d1(&vec![0.0; 256], &g, Subset::All).unwrap(), 0.0);
    }

    #[test]
    fn single_layer_quarter() {
        let g = geo(2, 16);
        let h: Vec<f64> = (0..256).map(|j| if j % 16 < 8 && j / 16 < 8 { 1.0 } else { 0.0 }).collect();
        assert!((lorentz_d1(&h, &g, Subset::All).unwrap() - 1.0).abs() < 1e-12);
        let s = summarize(&h, &g, Subset::All).unwrap();
        assert!(s.slack().abs() < 1e-12);
    }

    #[test]
    fn empty_subset_rejected() {
        let g = geo(2, 4);
        assert!(lp_norms(&[1.0; 16], &g, Subset::Cells(&[])).is_err());
        assert!(lorentz_d1(&[1.0; 16], &g, Subset::Cells(&[])).is_err());
        assert!(lorentz_d1(&[1.0; 15], &g, Subset::All).is_err());
        assert!(lp_norms(&[1.0; 16], &g, Subset::Cells(&[16])).is_err());
    }

    #[test]
    fn extremal_field_norms() {
        let (d, m, n, eps) = (2, 256, 16, 0.03);
        let g = geo(d, m);
        let p = gen_point_set(PointSetKind::MidpointGrid, d, n, 0).unwrap();
        let f = build_field(&FieldFamily::ExtremalEps { eps }, Anchor::Points(&p), &g).unwrap();
        let s = summarize(f.grad_mag(), &g, Subset::All).unwrap();
        let expect = n as f64 * unit_ball_volume(d) * eps.powi(d as i32);
        assert!((s.l1 - expect).abs() <= 4.0 * d as f64 * n as f64 * eps.powi(d as i32 - 1) / m as f64);
        assert_eq!(s.linf, 1.0);
        assert!(s.slack() >= 0.0);
        assert!(s.slack() / s.interp_bound <= 0.5);
    }

    #[test]
    fn distance_cap_lorentz_scales_with_delta() {
        // gradient is the indicator of a disc of radius δ: value 2·√(πδ²)
        let m = 512;
        let g = *make_grid_measure(2, m, Cube::centered(0.5)).unwrap().geometry();
        for delta in [0.05, 0.1, 0.2] {
            let f = build_field(&FieldFamily::DistanceCap { cap: delta }, Anchor::Point(&[0.0, 0.0]), &g).unwrap();
            let v = lorentz_d1(f.grad_mag(), &g, Subset::All).unwrap();
            let exact = 2.0 * std::f64::consts::PI.sqrt() * delta;
            assert!((v / exact - 1.0).abs() < 0.03, "{delta}: {v} vs {exact}");
        }
    }

    #[test]
    fn generic_layer_cake_matches_l1_in_one_dimension() {
        let mut rng = UniformStream::new(9);
        for _ in 0..50 {
            let vals: Vec<f64> = (0..37).map(|_| (rng.next_f64() * 4.0).floor() * rng.next_f64()).collect();
            let a = layer_cake(vals.clone(), 1.0 / 37.0, 1);
            let b = l1_of(&vals, 1.0 / 37.0);
            assert!((a - b).abs() < 1e-12);
        }
    }

    /// Piecewise field: a handful of levels placed on random cells.
    fn random_field(d: usize, m: usize, seed: u64) -> Vec<f64> {
        let mut rng = UniformStream::new(seed);
        let levels: Vec<f64> = (0..1 + (rng.next_u64() % 5) as usize).map(|_| 3.0 * rng.next_f64()).collect();
        let cells = m.pow(d as u32);
        (0..cells)
            .map(|_| {
                let r = rng.next_u64() as usize % (levels.len() + 1);
                if r == levels.len() { 0.0 } else { levels[r] }
            })
            .collect()
    }

    fn dm() -> impl Strategy<Value = (usize, usize)> {
        (1usize..=3).prop_flat_map(|d| (Just(d), 2usize..=[0, 40, 12, 6][d]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn interpolation_inequality((d, m) in dm(), seed in any::<u64>()) {
            let g = geo(d, m);
            let h = random_field(d, m, seed);
            let s = summarize(&h, &g, Subset::All).unwrap();
            prop_assert!(s.lorentz_d1 <= s.interp_bound + 1e-9);
            prop_assert!(s.l1 >= 0.0 && s.linf >= 0.0 && s.lorentz_d1 >= 0.0);
            if d == 1 {
                prop_assert_eq!(s.lorentz_d1, s.l1);
            }
        }

        #[test]
        fn single_layer_equality((d, m) in dm(), seed in any::<u64>(), c in 0.01f64..10.0) {
            let g = geo(d, m);
            let h: Vec<f64> = random_field(d, m, seed).iter().map(|&v| if v > 0.0 { c } else { 0.0 }).collect();
            let s = summarize(&h, &g, Subset::All).unwrap();
            prop_assert!((s.interp_bound - s.lorentz_d1).abs() <= 1e-9);
        }

        #[test]
        fn homogeneity((d, m) in dm(), seed in any::<u64>(), lambda in -20.0f64..20.0) {
            let g = geo(d, m);
            let h = random_field(d, m, seed);
            let scaled: Vec<f64> = h.iter().map(|v| lambda * v).collect();
            let a = lorentz_d1(&h, &g, Subset::All).unwrap();
            let b = lorentz_d1(&scaled, &g, Subset::All).unwrap();
            prop_assert!((b - lambda.abs() * a).abs() <= 1e-9 * lambda.abs().max(1.0));
        }

        #[test]
        fn monotonicity((d, m) in dm(), seed in any::<u64>()) {
            let g = geo(d, m);
            let h = random_field(d, m, seed);
            let bump = random_field(d, m, seed ^ 0xdead_beef);
            let hp: Vec<f64> = h.iter().zip(&bump).map(|(a, b)| a + b).collect();
            let s = summarize(&h, &g, Subset::All).unwrap();
            let t = summarize(&hp, &g, Subset::All).unwrap();
            prop_assert!(s.l1 <= t.l1 + 1e-12);
            prop_assert!(s.linf <= t.linf);
            prop_assert!(s.lorentz_d1 <= t.lorentz_d1 + 1e-12);
        }

        #[test]
        fn l1_additive_over_disjoint_subsets((d, m) in dm(), seed in any::<u64>(), split in any::<u64>()) {
            let g = geo(d, m);
            let h = random_field(d, m, seed);
            let n = h.len();
            let (a, b): (Vec<usize>, Vec<usize>) = (0..n).partition(|j| (split >> (j % 64)) & 1 == 1);
            let whole = lp_norms(&h, &g, Subset::All).unwrap().0;
            let pa = if a.is_empty() { 0.0 } else { lp_norms(&h, &g, Subset::Cells(&a)).unwrap().0 };
            let pb = if b.is_empty() { 0.0 } else { lp_norms(&h, &g, Subset::Cells(&b)).unwrap().0 };
            prop_assert!((whole - pa - pb).abs() <= 1e-9);
            for part in [&a, &b] {
                if !part.is_empty() {
                    prop_assert!(interpolation_check(&h, &g, Subset::Cells(part)).unwrap() >= -1e-9);
                }
            }
        }
    }
}
