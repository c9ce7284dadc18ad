//! Certificates of the shift property at truncation scale: constraint systems
//! for elements of `∩ Tⁿ(C(X))` with numerical rank, the arc mechanism of the
//! golden rotation model, explicit non-shift witnesses and generator counts.

pub mod block;
pub mod composition;
pub mod counterexamples;
pub mod generators;
pub mod golden;
pub mod rank;
pub mod system;

pub use block::{block_constraint_system, block_kernel_check, inverse_orbit_identity, BlockTruncation};
pub use composition::{
    composition_constraint_system, composition_kernel_check, CompositionKernelReport, CompositionTruncation,
};
pub use counterexamples::{
    check_component_pair, check_fixed_point, counterexample_suite, odd_multiple_fixture, parity_fixture, Counterexample,
    CounterexampleReport, WITNESS_TOL, WITNESS_VERDICT,
};
pub use generators::{estimate_generators, GeneratorEstimate};
pub use golden::{
    fibonacci, fibonacci_recursion_check, golden_arc_kernel, golden_arc_kernel_phi, normalized_arc_weight,
    random_trig_poly, FibonacciReport, GoldenKernelReport,
};
pub use rank::{rank_certificate, DecayReport, Verdict, DEFAULT_GAP};
pub use system::{CoefficientLayout, ConstraintRow, ConstraintSystem, RowKind};
