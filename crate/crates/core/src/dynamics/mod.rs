//! Homeomorphisms of block fibers, the assembled map on a block space and
//! finite-budget transitivity certificates.

pub mod assembled;
pub mod homeo;
pub mod orbit;
pub mod symbolic;

pub use assembled::{cyclic_block_moves, AssembledMap, BlockMove};
pub use homeo::{conjugate_flow, make_cantor_flow, make_rotation_flow, padic_point, Homeo};
pub use orbit::{
    approaches, certify_l_transitivity, orbit_density, LTransitivityEntry, LTransitivityReport, OrbitReport,
    ProbeGrid, Resolution, TransitiveSeed,
};
pub use symbolic::{bilateral_schedule, make_bilateral_shift, Placement, ShiftSchedule};

/// Fractional parts of `√q` for the first `count` primes `q`.
pub fn default_phases(count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut q = 2u64;
    while out.len() < count {
        if (2..q).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d)) {
            let s = (q as f64).sqrt();
            out.push(s - s.floor());
        }
        q += 1;
    }
    out
}
