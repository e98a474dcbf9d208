//! Point sets in the unit cube: generators, validation and the plain-text format.

use std::fmt::Write as _;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};

/// Deterministic uniform generator shared by every randomized routine.
///
/// The state is the raw 64-bit seed and advances by the SplitMix64 update
/// (`state += 0x9E3779B97F4A7C15`, then the usual xor-shift/multiply finalizer).
/// Uniform reals take the top 53 bits: `(x >> 11) · 2⁻⁵³`, so values lie in `[0, 1)`.
#[derive(Debug, Clone)]
pub struct UniformStream(SplitMix64);

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        UniformStream(SplitMix64::from_seed(seed.to_le_bytes()))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// The atoms of an empirical measure `(1/N) Σ δ_{x_k}` in `[0,1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    label: String,
}

impl PointSet {
    /// Builds a point set from flattened coordinates, checking the cube invariant.
    pub fn new(dim: usize, coords: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("d", "dimension must be at least 1"));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::arg(
                "points",
                format!("{} coordinates do not form a nonempty set of {dim}-vectors", coords.len()),
            ));
        }
        if let Some(bad) = coords.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::arg("points", format!("coordinate {bad} lies outside [0,1]")));
        }
        Ok(PointSet {
            dim,
            coords,
            label: label.into(),
        })
    }

    pub fn from_points(points: &[Vec<f64>], label: impl Into<String>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::arg("points", "points have differing dimensions"));
        }
        PointSet::new(dim, points.concat(), label)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Applies a map to every point, e.g. a symmetry of the cube.
    pub fn map_points(&self, f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<PointSet> {
        let coords: Vec<f64> = self.iter().flat_map(f).collect();
        PointSet::new(self.dim, coords, self.label.clone())
    }

    /// Serializes to the text format: header `d=<d> n=<N>`, then one point per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("d={} n={}\n", self.dim, self.len());
        for p in self.iter() {
            let line: Vec<String> = p.iter().map(|&x| format_coord(x)).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_text(text: &str, label: impl Into<String>) -> Result<PointSet> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "empty point file".into(),
        })?;
        let mut dim = None;
        let mut n = None;
        for tok in header.split_whitespace() {
            let parse = |v: &str| {
                v.parse::<usize>().map_err(|_| Error::Parse {
                    line: hl + 1,
                    reason: format!("bad header value `{v}`"),
                })
            };
            match tok.split_once('=') {
                Some(("d", v)) => dim = Some(parse(v)?),
                Some(("n", v)) => n = Some(parse(v)?),
                _ => {
                    return Err(Error::Parse {
                        line: hl + 1,
                        reason: format!("unexpected header token `{tok}`"),
                    })
                }
            }
        }
        let (Some(dim), Some(n)) = (dim, n) else {
            return Err(Error::Parse {
                line: hl + 1,
                reason: "header must read `d=<d> n=<N>`".into(),
            });
        };
        let mut coords = Vec::with_capacity(dim * n);
        let mut count = 0;
        for (i, line) in lines {
            let row: std::result::Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse::<f64>).collect();
            let row = row.map_err(|e| Error::Parse {
                line: i + 1,
                reason: e.to_string(),
            })?;
            if row.len() != dim {
                return Err(Error::Parse {
                    line: i + 1,
                    reason: format!("expected {dim} coordinates, found {}", row.len()),
                });
            }
            coords.extend(row);
            count += 1;
        }
        if count != n {
            return Err(Error::Parse {
                line: hl + 1,
                reason: format!("header announces {n} points, file has {count}"),
            });
        }
        PointSet::new(dim, coords, label)
    }
}

/// Fixed-point decimal with at least 17 significant digits (round-trips every f64 in [0,1]).
fn format_coord(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000000000".into();
    }
    let lead = -x.abs().log10().floor() as i32;
    let decimals = (17 + lead.max(0)) as usize;
    format!("{x:.decimals$}")
}

/// Point-set generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointSetKind {
    /// Centers of the `k^d` congruent subcubes; needs `N = k^d`.
    MidpointGrid,
    /// Independent uniform points.
    FullRandom,
    /// One uniform point inside each of the `k^d` subcubes; needs `N = k^d`.
    Jittered,
    /// Uniform points in `[0, 0.1]^d`.
    Clustered,
    /// The cube center; needs `N = 1`.
    Single,
}

impl PointSetKind {
    pub fn name(&self) -> &'static str {
        match self {
            PointSetKind::MidpointGrid => "midpoint_grid",
            PointSetKind::FullRandom => "full_random",
            PointSetKind::Jittered => "jittered",
            PointSetKind::Clustered => "clustered",
            PointSetKind::Single => "single",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "midpoint_grid" => PointSetKind::MidpointGrid,
            "full_random" => PointSetKind::FullRandom,
            "jittered" => PointSetKind::Jittered,
            "clustered" => PointSetKind::Clustered,
            "single" => PointSetKind::Single,
            _ => return None,
        })
    }
}

/// Integer `k` with `k^d = n`, if any.
pub fn exact_root(n: usize, d: usize) -> Option<usize> {
    let guess = (n as f64).powf(1.0 / d as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&k| k.checked_pow(d as u32) == Some(n))
}

pub fn gen_point_set(kind: PointSetKind, d: usize, n: usize, seed: u64) -> Result<PointSet> {
    if d == 0 {
        return Err(Error::arg("d", "dimension must be at least 1"));
    }
    if n == 0 {
        return Err(Error::arg("N", "need at least one point"));
    }
    let mut rng = UniformStream::new(seed);
    let coords: Vec<f64> = match kind {
        PointSetKind::MidpointGrid | PointSetKind::Jittered => {
            let k = exact_root(n, d).ok_or_else(|| {
                Error::arg("N", format!("{n} is not a perfect {d}-th power"))
            })?;
            let mut idx = vec![0usize; d];
            let mut coords = Vec::with_capacity(n * d);
            for _ in 0..n {
                for &i in &idx {
                    let offset = match kind {
                        PointSetKind::Jittered => rng.next_f64(),
                        _ => 0.5,
                    };
                    coords.push((i as f64 + offset) / k as f64);
                }
                // odometer, last axis fastest
                for a in (0..d).rev() {
                    idx[a] += 1;
                    if idx[a] < k {
                        break;
                    }
                    idx[a] = 0;
                }
            }
            coords
        }
        PointSetKind::FullRandom => (0..n * d).map(|_| rng.next_f64()).collect(),
        PointSetKind::Clustered => (0..n * d).map(|_| 0.1 * rng.next_f64()).collect(),
        PointSetKind::Single => {
            if n != 1 {
                return Err(Error::arg("N", "the `single` generator produces exactly one point"));
            }
            vec![0.5; d]
        }
    };
    let label = format!("{}(d={d},N={n},seed={seed})", kind.name());
    PointSet::new(d, coords, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_output() {
        // First two SplitMix64 outputs for state 0.
        let mut r = UniformStream::new(0);
        assert_eq!(r.next_u64(), 0xE220A8397B1DCDAF);
        assert_eq!(r.next_u64(), 0x6E789E6AA1B965F4);
    }

    #[test]
    fn midpoint_grid_2d() {
        let p = gen_point_set(PointSetKind::MidpointGrid, 2, 4, 0).unwrap();
        let pts: Vec<&[f64]> = p.iter().collect();
        assert_eq!(
            pts,
            vec![&[0.25, 0.25][..], &[0.25, 0.75], &[0.75, 0.25], &[0.75, 0.75]]
        );
    }

    #[test]
    fn midpoint_grid_rejects_non_powers() {
        assert!(matches!(
            gen_point_set(PointSetKind::MidpointGrid, 2, 5, 0),
            Err(Error::Argument { name: "N", .. })
        ));
    }

    #[test]
    fn random_is_deterministic() {
        let a = gen_point_set(PointSetKind::FullRandom, 2, 16, 7).unwrap();
        let b = gen_point_set(PointSetKind::FullRandom, 2, 16, 7).unwrap();
        assert_eq!(a, b);
        let c = gen_point_set(PointSetKind::FullRandom, 2, 16, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn clustered_and_jittered_ranges() {
        let c = gen_point_set(PointSetKind::Clustered, 3, 20, 1).unwrap();
        assert!(c.coords().iter().all(|&x| (0.0..=0.1).contains(&x)));
        let j = gen_point_set(PointSetKind::Jittered, 2, 9, 3).unwrap();
        for (k, p) in j.iter().enumerate() {
            let (r, c) = (k / 3, k % 3);
            assert!(p[0] >= r as f64 / 3.0 && p[0] < (r + 1) as f64 / 3.0);
            assert!(p[1] >= c as f64 / 3.0 && p[1] < (c + 1) as f64 / 3.0);
        }
    }

    #[test]
    fn single_point() {
        let s = gen_point_set(PointSetKind::Single, 3, 1, 0).unwrap();
        assert_eq!(s.point(0), &[0.5, 0.5, 0.5]);
        assert!(gen_point_set(PointSetKind::Single, 3, 2, 0).is_err());
    }

    #[test]
    fn text_roundtrip_is_exact() {
        let a = gen_point_set(PointSetKind::FullRandom, 3, 11, 42).unwrap();
        let text = a.to_text();
        assert!(text.starts_with("d=3 n=11\n"));
        let b = PointSet::from_text(&text, a.label()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn text_errors() {
        assert!(PointSet::from_text("d=2 n=2\n0.1 0.2\n", "").is_err());
        assert!(PointSet::from_text("d=2 n=1\n0.1\n", "").is_err());
        assert!(PointSet::from_text("d=2 n=1\n0.1 1.5\n", "").is_err());
        assert!(PointSet::from_text("", "").is_err());
    }

    #[test]
    fn rejects_out_of_cube() {
        assert!(PointSet::new(2, vec![0.1, -0.1], "").is_err());
        assert!(PointSet::new(2, vec![0.1], "").is_err());
    }
}
