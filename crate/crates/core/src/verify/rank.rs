use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Default relative gap `σ_min / σ_max` required for a trivial kernel.
pub const DEFAULT_GAP: f64 = 1e-6;
/// Singular values below `ZERO_REL · σ_max` count as kernel directions.
pub const ZERO_REL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    TrivialKernel,
    Nontrivial,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::TrivialKernel => "TRIVIAL_KERNEL",
            Verdict::Nontrivial => "NONTRIVIAL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Numerical rank certificate of a constraint system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub kernel_dim: usize,
    /// `σ_min / σ_max`.
    pub ratio: f64,
    pub gap: f64,
    pub rows: usize,
    pub cols: usize,
    pub truncation: BTreeMap<String, usize>,
    pub verdict: Verdict,
    /// Singular values in nonincreasing order.
    pub singular_values: Vec<f64>,
    /// Right singular vector of the smallest singular value when the kernel
    /// is nontrivial.
    #[serde(skip)]
    pub kernel_vector: Option<Vec<Scalar>>,
}

/// Singular value decomposition of the row-normalized system `rows × cols`,
/// padded with zero rows so that every column direction is measured.
pub fn rank_certificate(rows: &[Vec<Scalar>], cols: usize, gap: f64, truncation: BTreeMap<String, usize>) -> DecayReport {
    let normalized: Vec<Vec<Scalar>> = rows
        .iter()
        .filter_map(|r| {
            let n = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            (n > 0.0).then(|| r.iter().map(|z| z / n).collect())
        })
        .collect();
    let m = normalized.len().max(cols);
    let real = normalized.iter().all(|r| r.iter().all(|z| z.im == 0.0));
    let (sigma, v_small) = if cols == 0 {
        (Vec::new(), None)
    } else if real {
        let a = DMatrix::<f64>::from_fn(m, cols, |i, j| normalized.get(i).map_or(0.0, |r| r[j].re));
        let svd = a.svd(false, true);
        let s: Vec<f64> = svd.singular_values.iter().cloned().collect();
        let i = argmin(&s);
        let vt = svd.v_t.expect("right singular vectors");
        (s, Some(vt.row(i).iter().map(|x| Scalar::new(*x, 0.0)).collect::<Vec<_>>()))
    } else {
        let a = DMatrix::<Scalar>::from_fn(m, cols, |i, j| {
            normalized.get(i).map_or(Scalar::new(0.0, 0.0), |r| r[j])
        });
        let svd = a.svd(false, true);
        let s: Vec<f64> = svd.singular_values.iter().cloned().collect();
        let i = argmin(&s);
        let vt = svd.v_t.expect("right singular vectors");
        (s, Some(vt.row(i).iter().map(|z| z.conj()).collect::<Vec<_>>()))
    };
    let mut singular_values = sigma;
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let smax = singular_values.first().cloned().unwrap_or(0.0);
    let smin = singular_values.last().cloned().unwrap_or(0.0);
    let kernel_dim = if smax == 0.0 { cols } else { singular_values.iter().filter(|s| **s < ZERO_REL * smax).count() };
    let ratio = if smax == 0.0 { 0.0 } else { smin / smax };
    let verdict = if kernel_dim > 0 {
        Verdict::Nontrivial
    } else if ratio >= gap {
        Verdict::TrivialKernel
    } else {
        Verdict::Inconclusive
    };
    DecayReport {
        kernel_dim,
        ratio,
        gap,
        rows: rows.len(),
        cols,
        truncation,
        verdict,
        singular_values,
        kernel_vector: if kernel_dim > 0 { v_small } else { None },
    }
}

fn argmin(s: &[f64]) -> usize {
    s.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{c, re};

    #[test]
    fn identity_is_trivial() {
        let rows = vec![vec![re(1.0), re(0.0)], vec![re(0.0), re(2.0)]];
        let r = rank_certificate(&rows, 2, DEFAULT_GAP, BTreeMap::new());
        assert_eq!(r.verdict, Verdict::TrivialKernel);
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_kernel_vector() {
        // x₁ + i x₂ = 0 has kernel spanned by (1, i)
        let rows = vec![vec![c(1.0, 0.0), c(0.0, 1.0)]];
        let r = rank_certificate(&rows, 2, DEFAULT_GAP, BTreeMap::new());
        assert_eq!(r.verdict, Verdict::Nontrivial);
        assert_eq!(r.kernel_dim, 1);
        let v = r.kernel_vector.unwrap();
        assert!((v[0] * c(1.0, 0.0) + v[1] * c(0.0, 1.0)).norm() < 1e-12);
        assert!((v[1] - c(0.0, 1.0) * v[0]).norm() < 1e-12);
    }

    #[test]
    fn underdetermined_system_has_kernel() {
        let rows = vec![vec![re(1.0), re(1.0), re(0.0)]];
        let r = rank_certificate(&rows, 3, DEFAULT_GAP, BTreeMap::new());
        assert_eq!(r.kernel_dim, 2);
    }
}
