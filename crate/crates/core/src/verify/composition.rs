use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::rank::DecayReport;
use super::system::{CoefficientLayout, ConstraintRow, ConstraintSystem, RowKind};
use crate::field::re;
use crate::funcspace::{CantorPoint, Fiber};
use crate::shiftop::CompositionShift;
use crate::{Error, Result};

/// Windows of the composition system: cylinder depth of the unknowns,
/// sequence values `f(1..=seq_len)` and the orbit length used by the
/// equal-modulus rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionTruncation {
    pub depth: usize,
    pub seq_len: usize,
    pub orbit_len: usize,
}

impl CompositionTruncation {
    pub fn default_for(c: &CompositionShift) -> Self {
        let depth = c.params.depth;
        let orbit_len = 2 * (c.params.alphabet as usize).pow(depth as u32);
        CompositionTruncation { depth, seq_len: 16, orbit_len }
    }
}

/// Rank certificate plus the scalar that multiplies the limit values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionKernelReport {
    pub decay: DecayReport,
    /// `1 − (δ₁+δ₂)^N`.
    pub scaling_factor: f64,
    /// The scaling rows alone force `f(∞_k) = 0`.
    pub limits_annihilated: bool,
    pub equal_modulus: bool,
}

/// Necessary conditions on `f ∈ ∩ Tⁿ(C(X))` for the composition operator on
/// cylinder functions of depth `D`.
pub fn composition_constraint_system(c: &CompositionShift, trunc: CompositionTruncation) -> Result<ConstraintSystem> {
    let space = c.op.space();
    let shape = &space.blocks[0].shape;
    let p = shape.cantor.ok_or_else(|| Error::Domain("composition block has no Cantor factor".into()))?;
    let (d1, d2, big_n) = (c.params.d1, c.params.d2, c.params.period);
    let layout = CoefficientLayout::new(space, vec![trunc.depth], trunc.seq_len)?;
    let mut rows = Vec::new();

    // two-point relation on every cylinder of the input depth of χ^N
    let mut in_depth = trunc.depth;
    for _ in 0..big_n {
        in_depth = c.chi.input_depth(in_depth, true);
    }
    let count = shape.cylinders(in_depth);
    let mut pairs = HashSet::new();
    for u in 0..count {
        let x = Fiber::cantor(CantorPoint::from_prefix_index(p, u, in_depth));
        let y = c.chi.iterate(&x, big_n as i64);
        let a = x.cantor.as_ref().expect("cantor").prefix_index(trunc.depth);
        let b = y.cantor.as_ref().expect("cantor").prefix_index(trunc.depth);
        if pairs.insert((a, b)) {
            rows.push(ConstraintRow::new(
                RowKind::TwoPoint,
                None,
                vec![(layout.block_coeff(0, 0, a, 0), d1), (layout.block_coeff(0, 0, b, 0), d2)],
            ));
        }
    }
    let scale = re(1.0) - (d1 + d2).powu(big_n as u32);
    for k in 0..big_n {
        rows.push(ConstraintRow::new(RowKind::Scaling, None, vec![(layout.limit(k), scale)]));
        let z = c.chi.iterate(&c.zero, k as i64);
        let mut e = vec![(layout.limit(k), re(1.0))];
        e.extend(layout.point(0, &z).into_iter().map(|(i, v)| (i, -v)));
        rows.push(ConstraintRow::new(RowKind::Glue, Some(0), e));
    }
    let orbit_len = trunc.seq_len + big_n;
    let mut orbit = Vec::with_capacity(orbit_len + 1);
    orbit.push(c.one.clone());
    c.chi.orbit(&c.one, 1, orbit_len as u64, &mut |_, z| {
        orbit.push(z.clone());
        true
    });
    for n in 1..=trunc.seq_len {
        let mut e = vec![(layout.seq(n), re(1.0))];
        e.extend(layout.point(0, &orbit[n]).into_iter().map(|(i, v)| (i, -d1 * v)));
        e.extend(layout.point(0, &orbit[n + big_n]).into_iter().map(|(i, v)| (i, -d2 * v)));
        rows.push(ConstraintRow::new(RowKind::SequenceTwoPoint, Some(n), e));
    }
    let equal_modulus = (d1.norm() - d2.norm()).abs() <= 1e-12;
    if equal_modulus {
        let mut seen = HashSet::new();
        let mut emit = |z: &Fiber, rows: &mut Vec<ConstraintRow>| {
            let e = layout.point(0, z);
            if seen.insert(e[0].0) {
                rows.push(ConstraintRow::new(RowKind::OrbitVanishing, None, e));
            }
        };
        emit(&c.one, &mut rows);
        c.chi.orbit(&c.one, 1, trunc.orbit_len as u64, &mut |_, z| {
            emit(z, &mut rows);
            true
        });
    }
    let truncation = BTreeMap::from([
        ("depth".to_string(), trunc.depth),
        ("input_depth".to_string(), in_depth),
        ("seq_len".to_string(), trunc.seq_len),
        ("orbit_len".to_string(), if equal_modulus { trunc.orbit_len } else { 0 }),
    ]);
    Ok(ConstraintSystem { layout, rows, truncation })
}

pub fn composition_kernel_check(c: &CompositionShift, trunc: CompositionTruncation, gap: f64) -> Result<CompositionKernelReport> {
    let sys = composition_constraint_system(c, trunc)?;
    let scale = (re(1.0) - (c.params.d1 + c.params.d2).powu(c.params.period as u32)).norm();
    Ok(CompositionKernelReport {
        decay: sys.certify(gap),
        scaling_factor: scale,
        limits_annihilated: scale > 1e-12,
        equal_modulus: (c.params.d1.norm() - c.params.d2.norm()).abs() <= 1e-12,
    })
}
