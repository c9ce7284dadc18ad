use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rank::DecayReport;
use super::system::{CoefficientLayout, ConstraintRow, ConstraintSystem, RowKind};
use crate::blockmethod::v_vector;
use crate::field::re;
use crate::funcspace::{BlockFunction, PointRef};
use crate::shiftop::BlockMethodShift;
use crate::{Error, Result, Scalar};

/// Windows of the block-method system: residues `k ∈ [0, k_window]`, orbit
/// steps `N ∈ [1, n_window]` and sequence values `f(1..=seq_len)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockTruncation {
    pub k_window: usize,
    pub n_window: usize,
    pub seq_len: usize,
}

impl BlockTruncation {
    /// `k ≤ 4·max 2p_n`, `N ≤ max(4·max 2p_n, (2M+1)^c)` so that every block
    /// polynomial is sampled at enough orbit points to be determined.
    pub fn default_for(bm: &BlockMethodShift) -> Self {
        let k_window = 4 * 2 * bm.seq.max_p();
        let modes = bm.op.space().blocks.iter().map(|b| b.shape.modes()).max().unwrap_or(1);
        BlockTruncation { k_window, n_window: k_window.max(modes), seq_len: k_window }
    }
}

/// `f_N^n = (f(a_j^n, h_n^N(1_n)))_j` as sparse rows, one per block of the run.
fn orbit_vector(bm: &BlockMethodShift, layout: &CoefficientLayout, n: usize, steps: usize) -> Vec<Vec<(usize, Scalar)>> {
    let fam = &bm.families[n - 1];
    let z = fam.flow.iterate(&fam.base, steps as i64);
    bm.index.run(n).into_iter().map(|m| layout.point(bm.block_of(m), &z)).collect()
}

/// `Σ_j v_j · row_j`.
fn dot(v: &[Scalar], rows: &[Vec<(usize, Scalar)>], out: &mut Vec<(usize, Scalar)>, sign: f64) {
    for (vj, row) in v.iter().zip(rows) {
        if vj.norm() == 0.0 {
            continue;
        }
        out.extend(row.iter().map(|(i, e)| (*i, sign * vj * e)));
    }
}

/// Necessary conditions on `f ∈ ∩ Tⁿ(C(X))` for the block construction:
/// constancy on the sequence closure, equality of `f(∞)` with every
/// `Σ_n v^n_{[k mod 2p_n]}·f_N^n`, the block relations `M^γ_n f_N^n = 0`
/// and the finite-depth identities `f(k) = Σ_n v^n_{[k mod 2p_n]}·f_k^n`.
pub fn block_constraint_system(bm: &BlockMethodShift, trunc: BlockTruncation) -> Result<ConstraintSystem> {
    if trunc.n_window == 0 {
        return Err(Error::Truncation("orbit window contains no base-point sample".into()));
    }
    let space = bm.op.space();
    let layout = CoefficientLayout::new(space, vec![0; space.blocks.len()], trunc.seq_len)?;
    let fams = bm.index.families();
    let mut rows = Vec::new();
    let l = trunc.seq_len;
    for k in 1..l {
        rows.push(ConstraintRow::new(
            RowKind::Constancy,
            None,
            vec![(layout.seq(k), re(1.0)), (layout.seq(k + 1), re(-1.0))],
        ));
    }
    if l >= 1 {
        rows.push(ConstraintRow::new(RowKind::Constancy, None, vec![(layout.seq(l), re(1.0)), (layout.limit(0), re(-1.0))]));
    }
    let orbit_steps = trunc.n_window.max(trunc.seq_len);
    let orbits: Vec<Vec<Vec<Vec<(usize, Scalar)>>>> = (0..=orbit_steps)
        .map(|steps| (1..=fams).map(|n| orbit_vector(bm, &layout, n, steps)).collect())
        .collect();
    let v = |n: usize, i: usize| v_vector(&bm.gamma, &bm.index, n, i % (2 * bm.index.p(n)));
    for steps in 1..=trunc.n_window {
        for k in 0..=trunc.k_window {
            let mut e = vec![(layout.limit(0), re(1.0))];
            for n in 1..=fams {
                dot(&v(n, k)?, &orbits[steps][n - 1], &mut e, -1.0);
            }
            rows.push(ConstraintRow::new(RowKind::Equality, None, e));
        }
        for n in 1..=fams {
            for i in 0..bm.index.p(n) {
                let mut e = Vec::new();
                dot(&v(n, i)?, &orbits[steps][n - 1], &mut e, 1.0);
                rows.push(ConstraintRow::new(RowKind::BlockNull, None, e));
            }
        }
    }
    for k in 1..=l {
        let mut e = vec![(layout.seq(k), re(1.0))];
        for n in 1..=fams {
            dot(&v(n, k)?, &orbits[k][n - 1], &mut e, -1.0);
        }
        rows.push(ConstraintRow::new(RowKind::SequenceIdentity, Some(k), e));
    }
    let truncation = BTreeMap::from([
        ("degree".to_string(), space.blocks.iter().map(|b| b.shape.degree).max().unwrap_or(0)),
        ("k_window".to_string(), trunc.k_window),
        ("n_window".to_string(), trunc.n_window),
        ("seq_len".to_string(), trunc.seq_len),
    ]);
    Ok(ConstraintSystem { layout, rows, truncation })
}

/// Rank certificate of [`block_constraint_system`].
pub fn block_kernel_check(bm: &BlockMethodShift, trunc: BlockTruncation, gap: f64) -> Result<DecayReport> {
    Ok(block_constraint_system(bm, trunc)?.certify(gap))
}

/// Both sides of `Σ_{m ∈ A_n} γ_m (T^{−k}f)(m, 1_n) = v^n_{[k mod 2p_n]}·f_k^n`
/// for every family `n`.
pub fn inverse_orbit_identity(bm: &BlockMethodShift, f: &BlockFunction, k: usize) -> Result<Vec<(Scalar, Scalar)>> {
    let g = bm.op.apply_inverse_n(f, k)?;
    let mut out = Vec::with_capacity(bm.index.families());
    for n in 1..=bm.index.families() {
        let fam = &bm.families[n - 1];
        let mut lhs = re(0.0);
        for m in bm.index.run(n) {
            lhs += bm.gamma.at(m) * g.eval(&PointRef::block(bm.block_of(m), fam.base.clone()))?;
        }
        let z = fam.flow.iterate(&fam.base, k as i64);
        let v = v_vector(&bm.gamma, &bm.index, n, k % (2 * bm.index.p(n)))?;
        let mut rhs = re(0.0);
        for (vj, m) in v.iter().zip(bm.index.run(n)) {
            rhs += vj * f.eval(&PointRef::block(bm.block_of(m), z.clone()))?;
        }
        out.push((lhs, rhs));
    }
    Ok(out)
}
