use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rank::{rank_certificate, DecayReport};
use crate::funcspace::{BlockFunction, BlockSpace, Fiber};
use crate::{Error, Result, Scalar};

/// Coordinates of the truncated coefficient space: block tables at fixed
/// cylinder depths, the sequence values `f(1),…,f(L)` and the limit values.
#[derive(Clone, Debug)]
pub struct CoefficientLayout {
    space: Arc<BlockSpace>,
    depths: Vec<usize>,
    offsets: Vec<usize>,
    seq_offset: usize,
    seq_len: usize,
    limit_offset: usize,
    dim: usize,
}

impl CoefficientLayout {
    pub fn new(space: &Arc<BlockSpace>, depths: Vec<usize>, seq_len: usize) -> Result<Self> {
        if depths.len() != space.blocks.len() {
            return Err(Error::Structural(format!("{} depths for {} blocks", depths.len(), space.blocks.len())));
        }
        let mut offsets = Vec::with_capacity(depths.len());
        let mut next = 0;
        for (d, desc) in depths.iter().zip(&space.blocks) {
            offsets.push(next);
            let s = &desc.shape;
            next += s.tags * s.cylinders(*d) * s.modes();
        }
        let seq_offset = next;
        let limit_offset = seq_offset + seq_len;
        let dim = limit_offset + space.limit_count();
        Ok(CoefficientLayout { space: space.clone(), depths, offsets, seq_offset, seq_len, limit_offset, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seq_len(&self) -> usize {
        self.seq_len
    }

    pub fn depth(&self, block: usize) -> usize {
        self.depths[block]
    }

    /// Coordinate of the Fourier mode `mode` in cell `(tag, cylinder)` of a block.
    pub fn block_coeff(&self, block: usize, tag: usize, cylinder: usize, mode: usize) -> usize {
        let s = &self.space.blocks[block].shape;
        self.offsets[block] + (tag * s.cylinders(self.depths[block]) + cylinder) * s.modes() + mode
    }

    /// Coordinate of `f(n)`, `1 ≤ n ≤ L`.
    pub fn seq(&self, n: usize) -> usize {
        debug_assert!(n >= 1 && n <= self.seq_len);
        self.seq_offset + n - 1
    }

    pub fn limit(&self, k: usize) -> usize {
        self.limit_offset + k
    }

    /// Evaluation at a block point as a sparse row.
    pub fn point(&self, block: usize, z: &Fiber) -> Vec<(usize, Scalar)> {
        let s = &self.space.blocks[block].shape;
        let cyl = match &z.cantor {
            Some(x) if s.cantor.is_some() => x.prefix_index(self.depths[block]),
            _ => 0,
        };
        (0..s.modes())
            .map(|i| {
                let k = s.multi_degree(i);
                let t: f64 = k.iter().zip(&z.angles).map(|(kj, a)| *kj as f64 * a).sum();
                (self.block_coeff(block, z.tag, cyl, i), Complex64::from_polar(1.0, t))
            })
            .collect()
    }

    /// Coordinates of `f`; fails when a table is finer than the layout.
    pub fn vectorize(&self, f: &BlockFunction) -> Result<Vec<Scalar>> {
        let mut x = vec![Scalar::new(0.0, 0.0); self.dim];
        for (b, desc) in self.space.blocks.iter().enumerate() {
            let t = f.table(b);
            if t.depth > self.depths[b] {
                return Err(Error::Truncation(format!(
                    "block {} has depth {}, layout holds {}",
                    desc.id, t.depth, self.depths[b]
                )));
            }
            let lifted = t.lift(&desc.shape, self.depths[b]);
            let o = self.offsets[b];
            x[o..o + lifted.coeffs.len()].copy_from_slice(&lifted.coeffs);
        }
        for n in 1..=self.seq_len {
            x[self.seq(n)] = f.seq_value(n as u64);
        }
        for (k, v) in f.limit_values().iter().enumerate() {
            x[self.limit(k)] = *v;
        }
        Ok(x)
    }
}

/// What a constraint row expresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RowKind {
    /// `f(k) − f(k+1)` and `f(L) − f(∞)`.
    Constancy,
    /// `f(∞) − Σ_n v^n_{[k mod 2p_n]}·f_N^n`.
    Equality,
    /// `v_i^n·f_N^n` for `i < p_n`.
    BlockNull,
    /// `f(k) − Σ_n v^n_{[k mod 2p_n]}·f_k^n`.
    SequenceIdentity,
    /// `δ₁ f(x) + δ₂ f(χ^N x)`.
    TwoPoint,
    /// `(1 − (δ₁+δ₂)^N) f(∞_k)`.
    Scaling,
    /// `f(∞_k) − f(χ^k 0_Y)`.
    Glue,
    /// `f(n) − δ₁ f(χⁿ 1_Y) − δ₂ f(χ^{n+N} 1_Y)`.
    SequenceTwoPoint,
    /// `f(χ^j 1_Y)`.
    OrbitVanishing,
    /// Golden arc integral at a sampled start angle.
    ArcIntegral,
}

/// Sparse linear functional on the layout coordinates. `depth` is the least
/// `n` for which the row vanishes on every element of `Tⁿ(C(X))`; `None`
/// means it is only implied by membership in every `Tⁿ(C(X))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintRow {
    pub kind: RowKind,
    pub depth: Option<usize>,
    pub entries: Vec<(usize, Scalar)>,
}

impl ConstraintRow {
    pub fn new(kind: RowKind, depth: Option<usize>, entries: Vec<(usize, Scalar)>) -> Self {
        let mut row = ConstraintRow { kind, depth, entries };
        row.merge();
        row
    }

    fn merge(&mut self) {
        self.entries.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, Scalar)> = Vec::with_capacity(self.entries.len());
        for (i, v) in self.entries.drain(..) {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|e| e.1.norm() != 0.0);
        self.entries = out;
    }

    pub fn apply(&self, x: &[Scalar]) -> Scalar {
        self.entries.iter().map(|(i, v)| v * x[*i]).sum()
    }

    /// Whether the row is a necessary condition on `Tⁿ(C(X))`.
    pub fn holds_at(&self, n: usize) -> bool {
        self.depth.is_some_and(|d| d <= n)
    }
}

/// Finite constraint system derived for `f ∈ ∩ Tⁿ(C(X))`.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub layout: CoefficientLayout,
    pub rows: Vec<ConstraintRow>,
    pub truncation: BTreeMap<String, usize>,
}

impl ConstraintSystem {
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn count(&self, kind: RowKind) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }

    /// Largest `|row(f)|` over rows that must vanish on `Tⁿ(C(X))`.
    pub fn residual_at_depth(&self, f: &BlockFunction, n: usize) -> Result<f64> {
        let x = self.layout.vectorize(f)?;
        Ok(self.rows.iter().filter(|r| r.holds_at(n)).map(|r| r.apply(&x).norm()).fold(0.0, f64::max))
    }

    pub fn dense_rows(&self) -> Vec<Vec<Scalar>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![Scalar::new(0.0, 0.0); self.dim()];
                for (i, v) in &r.entries {
                    d[*i] = *v;
                }
                d
            })
            .collect()
    }

    /// Remove exact duplicate rows.
    pub fn dedup(&mut self) {
        let mut seen = std::collections::HashSet::new();
        self.rows.retain(|r| {
            let key: Vec<(usize, u64, u64)> = r.entries.iter().map(|(i, v)| (*i, v.re.to_bits(), v.im.to_bits())).collect();
            seen.insert((r.kind, key))
        });
    }

    pub fn certify(&self, gap: f64) -> DecayReport {
        rank_certificate(&self.dense_rows(), self.dim(), gap, self.truncation.clone())
    }
}
