//! Formal solutions of `f(pz) = G(f(z))`, their growth bounds, and the
//! crossing-symmetry map.

mod crossing;
pub mod fixtures;
mod germ;
mod series;
mod solver;

pub use crossing::{
    crossing_map, crossing_map_series, gl2_crossing_params, inverse_crossing_map, inverse_crossing_map_series,
    oriented_map, oriented_map_series, partial_transpose, trigonometric_gl2, trigonometric_gl2_series,
    verify_crossing_series, ybe_residual, CrossingParams, CrossingReport, Orientation, FIXED_POINT_TOLERANCE,
};
pub use germ::{AnalyticGerm, Composer, HomogeneousTerm};
pub use series::{scalar_series_div, scalar_series_mul, MatrixSeries};
pub use solver::{
    difference_residuals, growth_bound_check, resolvent, seed_residual, solve_difference, solve_difference_with,
    GrowthEntry, GrowthReport, SolveOptions, Strategy, RESONANCE_THRESHOLD, SEED_TOLERANCE,
};
