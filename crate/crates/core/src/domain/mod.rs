//! Inputs of every experiment: point sets, grid measures and sampled test functions.

mod field;
mod grid;
mod points;

pub use field::{build_field, finite_diff_gradient, Anchor, FieldFamily, ScalarField};
pub use grid::{
    make_grid_measure, make_grid_measure_with_budget, restrict_to_ball, restrict_to_cone, Cube,
    GridGeometry, GridMeasure, DEFAULT_CELL_BUDGET,
};
pub use points::{exact_root, gen_point_set, PointSet, PointSetKind, UniformStream};
