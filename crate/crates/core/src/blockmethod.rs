//! Combinatorics of the block construction: compatible sequences `p_n`, the
//! index runs `A_n` with their cyclic maps, weight sequences `γ` and the
//! signed circulant matrices `M^γ_n`.

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::field::{c, re};
use crate::{Error, Result, Scalar, ScalarField};

/// Number of families kept when the index set is infinite.
pub const DEFAULT_HORIZON: usize = 6;

/// `p_n` for `n ∈ ℙ₀ = {1,…,len}`; `infinite` marks a truncation of an
/// infinite sequence at its horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibleSequence {
    p: Vec<usize>,
    infinite: bool,
}

impl CompatibleSequence {
    pub fn p(&self) -> &[usize] {
        &self.p
    }

    pub fn is_infinite(&self) -> bool {
        self.infinite
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn max_p(&self) -> usize {
        self.p.iter().copied().max().unwrap_or(0)
    }

    /// Sequence accepted without the compatibility checks (for fixtures
    /// that deliberately break them).
    pub fn unchecked(p: Vec<usize>) -> Self {
        CompatibleSequence { p, infinite: false }
    }

    /// `p_n = 2^n·p_1` truncated at `horizon` families.
    pub fn doubling(p1: usize, horizon: usize) -> Result<Self> {
        let p = (0..horizon).map(|n| p1 << n).collect();
        let mut s = validate_compatible_sequence(p)?;
        s.infinite = true;
        Ok(s)
    }
}

pub fn validate_compatible_sequence(p: Vec<usize>) -> Result<CompatibleSequence> {
    if p.is_empty() {
        return Err(Error::Sequence("empty sequence".into()));
    }
    if let Some(i) = p.iter().position(|&x| x == 0) {
        return Err(Error::Sequence(format!("p_{} = 0", i + 1)));
    }
    if p.len() == 1 && p[0] == 1 {
        return Err(Error::Sequence("single family needs p_1 > 1".into()));
    }
    for (n, w) in p.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if b % a != 0 || (b / a) % 2 != 0 {
            return Err(Error::Sequence(format!(
                "p_{} / p_{} = {}/{} is not an even integer",
                n + 2,
                n + 1,
                b,
                a
            )));
        }
    }
    Ok(CompatibleSequence { p, infinite: false })
}

/// Runs `A_n = {a_1^n,…,a_{p_n}^n}` of consecutive block ids starting at 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockIndex {
    starts: Vec<usize>,
    p: Vec<usize>,
}

pub fn build_block_index(seq: &CompatibleSequence) -> BlockIndex {
    let mut starts = Vec::with_capacity(seq.len());
    let mut next = 1;
    for &pn in seq.p() {
        starts.push(next);
        next += pn;
    }
    BlockIndex { starts, p: seq.p().to_vec() }
}

impl BlockIndex {
    pub fn families(&self) -> usize {
        self.p.len()
    }

    pub fn total(&self) -> usize {
        self.p.iter().sum()
    }

    pub fn p(&self, n: usize) -> usize {
        self.p[n - 1]
    }

    /// Id of `a_j^n` (both 1-based).
    pub fn member(&self, n: usize, j: usize) -> usize {
        self.starts[n - 1] + j - 1
    }

    /// The run `A_n` as block ids.
    pub fn run(&self, n: usize) -> Vec<usize> {
        (1..=self.p(n)).map(|j| self.member(n, j)).collect()
    }

    /// `π(k)`: the family containing block id `k`.
    pub fn family(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.total() {
            return Err(Error::OutOfRange(format!("block id {k} outside 1..={}", self.total())));
        }
        Ok(self.starts.partition_point(|&s| s <= k))
    }

    /// Position `j` of `k = a_j^{π(k)}`.
    pub fn position(&self, k: usize) -> Result<usize> {
        let n = self.family(k)?;
        Ok(k - self.starts[n - 1] + 1)
    }

    /// `s_n(k)`: `a_1 ↦ a_{p_n}`, `a_j ↦ a_{j−1}`.
    pub fn s(&self, k: usize) -> Result<usize> {
        let n = self.family(k)?;
        let j = self.position(k)?;
        Ok(if j == 1 { self.member(n, self.p(n)) } else { k - 1 })
    }

    pub fn s_inverse(&self, k: usize) -> Result<usize> {
        let n = self.family(k)?;
        let j = self.position(k)?;
        Ok(if j == self.p(n) { self.member(n, 1) } else { k + 1 })
    }
}

/// `γ_m` for block ids `m = 1,…,len`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaConfig {
    gamma: Vec<Scalar>,
    field: ScalarField,
    /// `Σ_{m > len} |γ_m|` for truncated infinite families.
    tail_mass: f64,
}

/// Relative tolerance on the smallest eigenvalue modulus of `M^γ_n` against its row norm.
pub const DET_TOL: f64 = 1e-10;

impl GammaConfig {
    /// Validated weights: at least two nonzero entries, `Σ|γ| ≤ 1`, scalars
    /// in the field and `det M^γ_n ≠ 0` for every family.
    pub fn new(gamma: Vec<Scalar>, field: ScalarField, index: &BlockIndex) -> Result<Self> {
        let g = Self::unchecked(gamma, field);
        g.validate(index)?;
        Ok(g)
    }

    pub fn unchecked(gamma: Vec<Scalar>, field: ScalarField) -> Self {
        GammaConfig { gamma, field, tail_mass: 0.0 }
    }

    pub fn with_tail_mass(mut self, tail: f64) -> Self {
        self.tail_mass = tail;
        self
    }

    pub fn validate(&self, index: &BlockIndex) -> Result<()> {
        if self.gamma.len() != index.total() {
            return Err(Error::Gamma(format!("{} weights for {} blocks", self.gamma.len(), index.total())));
        }
        if let Some(z) = self.gamma.iter().find(|z| !self.field.admits(**z)) {
            return Err(Error::Gamma(format!("{z} is not a scalar of the field")));
        }
        if self.gamma.iter().filter(|z| z.norm() != 0.0).count() < 2 {
            return Err(Error::Gamma("fewer than two nonzero weights".into()));
        }
        let mass = self.mass();
        if mass > 1.0 + 1e-15 {
            return Err(Error::Gamma(format!("Σ|γ| = {mass} exceeds 1")));
        }
        for n in 1..=index.families() {
            let m = build_skew_circulant(&self.restrict(index, n));
            if !m.is_invertible() {
                return Err(Error::Gamma(format!("det M^γ_{n} = {} vanishes at tolerance", m.det)));
            }
        }
        Ok(())
    }

    pub fn gamma(&self) -> &[Scalar] {
        &self.gamma
    }

    /// `γ_m` for block id `m`.
    pub fn at(&self, m: usize) -> Scalar {
        self.gamma[m - 1]
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn mass(&self) -> f64 {
        self.gamma.iter().map(|z| z.norm()).sum::<f64>() + self.tail_mass
    }

    /// `(γ_{a_1^n},…,γ_{a_{p_n}^n})`.
    pub fn restrict(&self, index: &BlockIndex, n: usize) -> Vec<Scalar> {
        index.run(n).into_iter().map(|m| self.at(m)).collect()
    }
}

/// `M^γ_n`: row `i` is row `i−1` rotated right by one with the wrapped entry negated.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewCirculant {
    pub order: usize,
    pub entries: DMatrix<Scalar>,
    /// Determinant by LU factorization.
    pub det: Scalar,
    /// Determinant as `Π_{ω^p = −1} Σ_k γ_k ω^k`.
    pub det_spectral: Scalar,
    pub row_norm_product: f64,
    /// `min_r |Σ_k γ_k ω_r^k|` over the roots `ω_r^p = −1`, the moduli of the eigenvalues.
    pub min_eigenvalue: f64,
    pub row_norm: f64,
}

pub fn build_skew_circulant(gamma: &[Scalar]) -> SkewCirculant {
    let p = gamma.len();
    let entries = DMatrix::from_fn(p, p, |i, j| if j >= i { gamma[j - i] } else { -gamma[p + j - i] });
    let det = if p == 0 { re(1.0) } else { entries.clone().lu().determinant() };
    let eigen: Vec<Scalar> = (0..p)
        .map(|r| {
            let w = Scalar::from_polar(1.0, std::f64::consts::PI * (2 * r + 1) as f64 / p as f64);
            gamma.iter().enumerate().map(|(k, g)| g * w.powu(k as u32)).sum::<Scalar>()
        })
        .collect();
    let row = gamma.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    SkewCirculant {
        order: p,
        entries,
        det,
        det_spectral: eigen.iter().product(),
        row_norm_product: row.powi(p as i32),
        min_eigenvalue: eigen.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min),
        row_norm: row,
    }
}

impl SkewCirculant {
    /// Every eigenvalue is nonzero relative to the row norm. Equivalent to
    /// `det ≠ 0`, but neither underflows nor shrinks with the order.
    pub fn is_invertible(&self) -> bool {
        self.row_norm > 0.0 && self.min_eigenvalue > DET_TOL * self.row_norm
    }

    /// Exact check of the signed cyclic row structure.
    pub fn check_structure(&self) -> bool {
        let p = self.order;
        (1..p).all(|i| {
            (0..p).all(|j| {
                let expect = if j == 0 { -self.entries[(i - 1, p - 1)] } else { self.entries[(i - 1, j - 1)] };
                self.entries[(i, j)] == expect
            })
        })
    }
}

/// `v_i^n` for `0 ≤ i < 2p_n`: row `i` of `M^γ_n`, negated for `i ≥ p_n`.
pub fn v_vector(config: &GammaConfig, index: &BlockIndex, n: usize, i: usize) -> Result<Vec<Scalar>> {
    if n == 0 || n > index.families() {
        return Err(Error::OutOfRange(format!("family {n} outside 1..={}", index.families())));
    }
    let p = index.p(n);
    if i >= 2 * p {
        return Err(Error::OutOfRange(format!("v index {i} outside 0..{}", 2 * p)));
    }
    Ok(v_row(&config.restrict(index, n), i))
}

/// `v_i` from the restricted weights, `i` taken mod `2p`.
pub fn v_row(gamma: &[Scalar], i: usize) -> Vec<Scalar> {
    let p = gamma.len();
    let i = i % (2 * p);
    let (r, sign) = if i < p { (i, 1.0) } else { (i - p, -1.0) };
    (0..p).map(|j| sign * if j >= r { gamma[j - r] } else { -gamma[p + j - r] }).collect()
}

/// `γ_m = c·2^{−m}` with `c = 1`, so `Σ|γ| < 1`; on a singular matrix the
/// weights are perturbed by a seeded random factor and retried.
pub fn default_gamma_search(seq: &CompatibleSequence, field: ScalarField, seed: u64) -> Result<GammaConfig> {
    let index = build_block_index(seq);
    let total = index.total();
    let base: Vec<Scalar> = (1..=total).map(|m| re(0.5f64.powi(m as i32))).collect();
    let tail = if seq.is_infinite() { 0.5f64.powi(total as i32) } else { 0.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gamma = base.clone();
    for _ in 0..64 {
        let g = GammaConfig::unchecked(gamma.clone(), field).with_tail_mass(tail);
        if g.validate(&index).is_ok() {
            return Ok(g);
        }
        gamma = base
            .iter()
            .map(|z| {
                let t: f64 = rng.random_range(0.5..1.0);
                match field {
                    ScalarField::Real => z * t,
                    ScalarField::Complex => z * Scalar::from_polar(t, rng.random_range(0.0..crate::TAU)),
                }
            })
            .collect();
    }
    Err(Error::Budget("no admissible γ found in 64 attempts".into()))
}

/// Weights `γ_m` attached to the block points `(m, 1_{π(m)})`: the terms of
/// `Δ(f) = Σ_n Σ_{m ∈ A_n} γ_m f(m, 1_n)`, as `(block id, family, weight)`.
pub fn block_delta_terms(config: &GammaConfig, index: &BlockIndex) -> Vec<(usize, usize, Scalar)> {
    (1..=index.families())
        .flat_map(|n| index.run(n).into_iter().map(move |m| (m, n, config.at(m))))
        .collect()
}

/// `Σ_{k=1}^{len} v_{k mod 2p}` entrywise.
pub fn telescoping_sum(gamma: &[Scalar], len: usize) -> Vec<Scalar> {
    let mut acc = vec![c(0.0, 0.0); gamma.len()];
    for k in 1..=len {
        for (a, v) in acc.iter_mut().zip(v_row(gamma, k)) {
            *a += v;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_circulant_rows() {
        let g = [re(1.0), re(2.0), re(3.0)];
        let m = build_skew_circulant(&g);
        assert!(m.check_structure());
        assert_eq!(v_row(&g, 1), vec![re(-3.0), re(1.0), re(2.0)]);
        assert!((m.det - m.det_spectral).norm() < 1e-10);
    }

    #[test]
    fn index_lookup() {
        let seq = validate_compatible_sequence(vec![2, 4]).unwrap();
        let idx = build_block_index(&seq);
        assert_eq!(idx.run(2), vec![3, 4, 5, 6]);
        assert_eq!(idx.family(3).unwrap(), 2);
        assert_eq!(idx.s(3).unwrap(), 6);
        assert_eq!(idx.s(5).unwrap(), 4);
        assert_eq!(idx.s_inverse(6).unwrap(), 3);
    }
}
