//! Small Euclidean helpers used across modules.

use std::f64::consts::PI;

/// Volume of the Euclidean unit ball in `d` dimensions.
///
/// Uses the recursion `ω_d = ω_{d-2} · 2π / d` with `ω_0 = 1`, `ω_1 = 2`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * PI / d as f64,
    }
}

/// The explicit overlap constant `ω_d · 2^d`: volume of a ball of radius 2.
pub fn overlap_constant(d: usize) -> f64 {
    unit_ball_volume(d) * 2f64.powi(d as i32)
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
