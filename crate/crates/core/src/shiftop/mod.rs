//! Assembly and application of `T = T[a, φ, Δ]` in each construction.

pub mod build;
pub mod functional;
pub mod operator;

pub use build::{
    build_block_method, build_cantor_set, build_complex_family, build_composition, build_composition_with,
    build_golden_arc, default_cantor_points, radian_rotation, standard_variants, tau, zeta, BlockMethodParams,
    BlockMethodShift, ComplexFamilyParams, ComplexFamilyShift, CompositionParams, CompositionShift, FamilySpec,
    GoldenForm, GoldenParams, GoldenShift,
};
pub use functional::{arc_integral, ArcSpec, Functional};
pub use operator::{InverseMode, IsometryReport, RangeMembership, ShiftOperator, WeightFunction, RANGE_TOL};
