//! Uniform grids on axis-aligned cubes and the cell measures that live on them.

use crate::error::{Error, Result};
use crate::geom;

/// Default cap on the number of cells a grid may have.
pub const DEFAULT_CELL_BUDGET: usize = 1 << 22;

/// The cube `[origin, origin + side]^d` covered by a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cube {
    pub origin: f64,
    pub side: f64,
}

impl Cube {
    pub const UNIT: Cube = Cube {
        origin: 0.0,
        side: 1.0,
    };

    /// The centered cube `[-r, r]^d`.
    pub fn centered(r: f64) -> Cube {
        Cube {
            origin: -r,
            side: 2.0 * r,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.origin == 0.0 && self.side == 1.0
    }
}

/// Geometry of a uniform `m^d` cell grid. Cells are indexed with axis 0 varying slowest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub dim: usize,
    pub res: usize,
    pub cube: Cube,
}

impl GridGeometry {
    pub fn num_cells(&self) -> usize {
        self.res.pow(self.dim as u32)
    }

    pub fn cell_side(&self) -> f64 {
        self.cube.side / self.res as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_side().powi(self.dim as i32)
    }

    /// Length of a cell diagonal.
    pub fn cell_diameter(&self) -> f64 {
        self.cell_side() * (self.dim as f64).sqrt()
    }

    pub fn multi_index(&self, mut cell: usize, out: &mut [usize]) {
        for a in (0..self.dim).rev() {
            out[a] = cell % self.res;
            cell /= self.res;
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.res + i)
    }

    /// Writes the center of `cell` into `out`.
    pub fn center_into(&self, cell: usize, out: &mut [f64]) {
        let h = self.cell_side();
        let mut rest = cell;
        for a in (0..self.dim).rev() {
            let i = rest % self.res;
            rest /= self.res;
            out[a] = self.cube.origin + (i as f64 + 0.5) * h;
        }
    }

    pub fn center(&self, cell: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        self.center_into(cell, &mut c);
        c
    }

    /// All cell centers, flattened row-major (`num_cells * dim` entries).
    pub fn centers(&self) -> Vec<f64> {
        let n = self.num_cells();
        let mut out = vec![0.0; n * self.dim];
        for (j, chunk) in out.chunks_exact_mut(self.dim).enumerate() {
            self.center_into(j, chunk);
        }
        out
    }

    /// Index of the cell containing `x`, if `x` lies in the closed cube.
    /// Points on an interior face belong to the upper cell.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let h = self.cell_side();
        let mut idx = 0usize;
        for &xa in x.iter().take(self.dim) {
            let t = (xa - self.cube.origin) / h;
            if !(t >= 0.0 && t <= self.res as f64) {
                return None;
            }
            let i = (t.floor() as usize).min(self.res - 1);
            idx = idx * self.res + i;
        }
        Some(idx)
    }
}

/// An absolutely continuous measure discretized to per-cell masses, with `μ ≤ dx`
/// enforced per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    geometry: GridGeometry,
    cell_mass: Vec<f64>,
}

impl GridMeasure {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim
    }

    pub fn res(&self) -> usize {
        self.geometry.res
    }

    pub fn cell_mass(&self) -> &[f64] {
        &self.cell_mass
    }

    /// The per-cell density cap (the cell volume).
    pub fn density_cap(&self) -> f64 {
        self.geometry.cell_volume()
    }

    pub fn total_mass(&self) -> f64 {
        self.cell_mass.iter().sum()
    }

    /// Indices of cells that carry positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.cell_mass.len())
            .filter(|&j| self.cell_mass[j] > 0.0)
            .collect()
    }

    /// True for the uniform Lebesgue measure on the unit cube.
    pub fn is_unit_lebesgue(&self) -> bool {
        let v = self.geometry.cell_volume();
        self.geometry.cube.is_unit() && self.cell_mass.iter().all(|&w| w == v)
    }

    fn restrict_by(&self, keep: impl Fn(&[f64]) -> bool, what: &str) -> Result<GridMeasure> {
        let mut c = vec![0.0; self.dim()];
        let mut mass = vec![0.0; self.cell_mass.len()];
        let mut any = false;
        for (j, w) in mass.iter_mut().enumerate() {
            self.geometry.center_into(j, &mut c);
            if keep(&c) && self.cell_mass[j] > 0.0 {
                *w = self.cell_mass[j];
                any = true;
            }
        }
        if !any {
            return Err(Error::DegenerateSupport(format!(
                "no cell center of the {}^{} grid lies inside the {what}",
                self.res(),
                self.dim()
            )));
        }
        Ok(GridMeasure {
            geometry: self.geometry,
            cell_mass: mass,
        })
    }
}

/// Uniform Lebesgue measure on `cube`: every cell carries its own volume.
pub fn make_grid_measure(d: usize, m: usize, cube: Cube) -> Result<GridMeasure> {
    make_grid_measure_with_budget(d, m, cube, DEFAULT_CELL_BUDGET)
}

pub fn make_grid_measure_with_budget(
    d: usize,
    m: usize,
    cube: Cube,
    budget: usize,
) -> Result<GridMeasure> {
    if d == 0 {
        return Err(Error::arg("d", "dimension must be at least 1"));
    }
    if m < 2 {
        return Err(Error::arg("m", format!("need at least 2 cells per axis, got {m}")));
    }
    if !(cube.side > 0.0 && cube.side.is_finite() && cube.origin.is_finite()) {
        return Err(Error::arg("support", "cube side must be positive and finite"));
    }
    let cells = (m as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if cells > budget as u128 {
        return Err(Error::Resolution(format!(
            "{m}^{d} cells exceeds the budget of {budget}"
        )));
    }
    let geometry = GridGeometry { dim: d, res: m, cube };
    let v = geometry.cell_volume();
    Ok(GridMeasure {
        geometry,
        cell_mass: vec![v; cells as usize],
    })
}

/// Keeps the cells whose centers lie in the closed ball `B(center, radius)`.
pub fn restrict_to_ball(g: &GridMeasure, center: &[f64], radius: f64) -> Result<GridMeasure> {
    if center.len() != g.dim() {
        return Err(Error::arg("center", "dimension mismatch"));
    }
    if !(radius.is_finite()) || radius < 0.5 * g.geometry.cell_diameter() {
        return Err(Error::DegenerateSupport(format!(
            "radius {radius} is below half a cell diagonal ({})",
            0.5 * g.geometry.cell_diameter()
        )));
    }
    let r2 = radius * radius;
    g.restrict_by(|c| geom::dist2(c, center) <= r2, "ball")
}

/// Keeps the cells whose centers lie in the solid cone with the given apex and
/// axis, length `length` and half-width `half_width` at the far end (widening
/// linearly from the apex).
pub fn restrict_to_cone(
    g: &GridMeasure,
    apex: &[f64],
    axis: &[f64],
    length: f64,
    half_width: f64,
) -> Result<GridMeasure> {
    let d = g.dim();
    if apex.len() != d || axis.len() != d {
        return Err(Error::arg("apex", "dimension mismatch"));
    }
    if !(length > 0.0) {
        return Err(Error::DegenerateSupport(format!("cone length {length} is not positive")));
    }
    if !(half_width > 0.0 && half_width <= length) {
        return Err(Error::arg("half_width", format!("need 0 < h <= R, got h={half_width}")));
    }
    let n = geom::norm(axis);
    if !(n > 0.0) {
        return Err(Error::arg("axis", "axis must be nonzero"));
    }
    let u: Vec<f64> = axis.iter().map(|a| a / n).collect();
    let slope = half_width / length;
    g.restrict_by(
        |c| {
            let v: Vec<f64> = c.iter().zip(apex).map(|(x, a)| x - a).collect();
            let t: f64 = v.iter().zip(&u).map(|(x, y)| x * y).sum();
            if t < 0.0 || t > length {
                return false;
            }
            let perp2: f64 = v.iter().zip(&u).map(|(x, a)| (x - t * a).powi(2)).sum();
            perp2 <= (slope * t).powi(2)
        },
        "cone",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_interval_cells() {
        let g = make_grid_measure(1, 4, Cube::UNIT).unwrap();
        assert_eq!(g.cell_mass(), &[0.25; 4]);
        let centers = g.geometry().centers();
        assert_eq!(centers, vec![0.125, 0.375, 0.625, 0.875]);
        assert!(g.is_unit_lebesgue());
    }

    #[test]
    fn unit_square_cells() {
        let g = make_grid_measure(2, 2, Cube::UNIT).unwrap();
        assert_eq!(g.cell_mass(), &[0.25; 4]);
        assert_eq!(g.total_mass(), 1.0);
    }

    #[test]
    fn lebesgue_mass_sums_to_one() {
        for (d, m) in [(1, 1024), (2, 64), (3, 16)] {
            let g = make_grid_measure(d, m, Cube::UNIT).unwrap();
            assert_eq!(g.total_mass(), 1.0);
        }
    }

    #[test]
    fn budget_and_argument_errors() {
        assert!(matches!(
            make_grid_measure(2, 1 << 12, Cube::UNIT),
            Err(Error::Resolution(_))
        ));
        assert!(matches!(make_grid_measure(0, 4, Cube::UNIT), Err(Error::Argument { name: "d", .. })));
        assert!(matches!(make_grid_measure(2, 1, Cube::UNIT), Err(Error::Argument { name: "m", .. })));
    }

    #[test]
    fn index_roundtrip_and_locate() {
        let g = make_grid_measure(3, 5, Cube::centered(1.0)).unwrap();
        let geo = g.geometry();
        let mut idx = [0; 3];
        for j in [0, 7, 61, 124] {
            geo.multi_index(j, &mut idx);
            assert_eq!(geo.flat_index(&idx), j);
            assert_eq!(geo.locate(&geo.center(j)), Some(j));
        }
        assert_eq!(geo.locate(&[1.5, 0.0, 0.0]), None);
        assert_eq!(geo.locate(&[1.0, 1.0, 1.0]), Some(124));
    }

    #[test]
    fn ball_mass_matches_area() {
        let g = make_grid_measure(2, 64, Cube::centered(1.0)).unwrap();
        let b = restrict_to_ball(&g, &[0.0, 0.0], 0.5).unwrap();
        assert!((b.total_mass() - PI / 4.0).abs() < 0.05);
        for &w in b.cell_mass() {
            assert!(w <= b.density_cap());
        }
    }

    #[test]
    fn huge_ball_is_no_restriction() {
        let g = make_grid_measure(2, 16, Cube::UNIT).unwrap();
        let b = restrict_to_ball(&g, &[0.5, 0.5], 10.0).unwrap();
        assert_eq!(b.total_mass(), 1.0);
    }

    #[test]
    fn tiny_ball_is_degenerate() {
        let g = make_grid_measure(2, 16, Cube::UNIT).unwrap();
        // Centered exactly on a cell center but below half a diagonal.
        let c = g.geometry().center(17);
        assert!(matches!(
            restrict_to_ball(&g, &c, 0.01),
            Err(Error::DegenerateSupport(_))
        ));
    }

    /// Direct cell-count oracle for the cone: count centers with |y| <= (h/R) x, 0 <= x <= R.
    fn cone_cell_count(m: usize, length: f64, h: f64) -> f64 {
        let s = 2.0 / m as f64;
        let mut n = 0usize;
        for i in 0..m {
            for k in 0..m {
                let x = -1.0 + (i as f64 + 0.5) * s;
                let y = -1.0 + (k as f64 + 0.5) * s;
                if x >= 0.0 && x <= length && y.abs() <= h / length * x {
                    n += 1;
                }
            }
        }
        n as f64 * s * s
    }

    #[test]
    fn thin_cone_mass_matches_triangle() {
        let g = make_grid_measure(2, 256, Cube::centered(1.0)).unwrap();
        let c = restrict_to_cone(&g, &[0.0, 0.0], &[1.0, 0.0], 1.0, 0.1).unwrap();
        let mass = c.total_mass();
        assert!((0.5 * 0.1..=2.0 * 0.1).contains(&mass), "mass {mass}");
        assert!((mass - cone_cell_count(256, 1.0, 0.1)).abs() < 1e-12);
    }

    #[test]
    fn wide_cone_is_comparable_to_sector() {
        let g = make_grid_measure(2, 128, Cube::centered(1.0)).unwrap();
        let c = restrict_to_cone(&g, &[0.0, 0.0], &[1.0, 0.0], 1.0, 1.0).unwrap();
        let sector = PI / 4.0;
        let mass = c.total_mass();
        assert!(mass <= 2.0 * sector && mass >= 0.5 * sector, "mass {mass}");
        assert!((mass - cone_cell_count(128, 1.0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_length_cone_is_degenerate() {
        let g = make_grid_measure(2, 16, Cube::centered(1.0)).unwrap();
        assert!(matches!(
            restrict_to_cone(&g, &[0.0, 0.0], &[1.0, 0.0], 0.0, 0.0),
            Err(Error::DegenerateSupport(_))
        ));
    }
}
