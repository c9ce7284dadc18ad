use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use super::rank::{rank_certificate, DecayReport};
use crate::field::re;
use crate::funcspace::supnorm::trig_sup;
use crate::shiftop::arc_integral;
use crate::{Scalar, PHI, TAU};

/// `(1/2π) ∫_0^{2πρ} e^{ikθ} dθ`.
pub fn normalized_arc_weight(k: i64, rho: f64) -> Scalar {
    arc_integral(k, 0.0, TAU * rho) / TAU
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenKernelReport {
    pub decay: DecayReport,
    pub rotation: f64,
    /// `min_{0<|k|≤M} |e^{ik2πρ} − 1|`.
    pub min_phase_gap: f64,
    pub worst_mode: i64,
}

/// Map from the coefficients `c_k`, `|k| ≤ M`, to the arc integrals
/// `α ↦ (1/2π) ∫_{A(α, α+2πρ)} f` sampled at `α_j = 2πj/(4M+2)`.
pub fn golden_arc_kernel(degree: usize, rotation: f64, gap: f64) -> GoldenKernelReport {
    let m = degree as i64;
    let weights: Vec<Scalar> = (-m..=m).map(|k| normalized_arc_weight(k, rotation)).collect();
    let samples = 4 * degree + 2;
    let rows: Vec<Vec<Scalar>> = (0..samples)
        .map(|j| {
            let alpha = TAU * j as f64 / samples as f64;
            (-m..=m)
                .zip(&weights)
                .map(|(k, w)| w * Complex64::from_polar(1.0, k as f64 * alpha))
                .collect()
        })
        .collect();
    let (mut min_phase_gap, mut worst_mode) = (f64::INFINITY, 0);
    for k in 1..=m {
        let g = (Complex64::from_polar(1.0, k as f64 * TAU * rotation) - 1.0).norm();
        if g < min_phase_gap {
            min_phase_gap = g;
            worst_mode = k;
        }
    }
    let truncation = BTreeMap::from([("degree".to_string(), degree), ("samples".to_string(), samples)]);
    GoldenKernelReport {
        decay: rank_certificate(&rows, weights.len(), gap, truncation),
        rotation,
        min_phase_gap,
        worst_mode,
    }
}

/// Golden-arc kernel at the rotation `Φ`.
pub fn golden_arc_kernel_phi(degree: usize, gap: f64) -> GoldenKernelReport {
    golden_arc_kernel(degree, PHI, gap)
}

/// Fibonacci numbers with `F(0) = 0`, `F(1) = F(2) = 1`.
pub fn fibonacci(n: usize) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FibonacciReport {
    pub n_max: usize,
    /// `|Φ + Φ² − 1|`.
    pub golden_identity: f64,
    /// Largest residual of the arc splitting `Φ^{k−1} = Φ^{k+1} + Φ^k`.
    pub additivity_residual: f64,
    /// Largest per-mode residual of `𝕋 = A(0, 2πΦ) ∪ A(2πΦ, 2π)`.
    pub base_case_residual: f64,
    /// `E_n = sup_α |(1/2π)∫_{A(α,α+2πΦⁿ)} f − (−1)ⁿ F(n−1) (1/2π)∫_𝕋 f|`, `n = 1..=n_max`.
    pub arc_defects: Vec<f64>,
    /// `E_n ≤ F(n)·E_1` up to sampling slack, for every `n`.
    pub implication_holds: bool,
}

/// `(1/2π) ∫_α^{α+len} f` for `f = Σ c_k e^{ikθ}`, coefficients indexed by `k + M`.
fn arc_value(coeffs: &[Scalar], alpha: f64, len: f64) -> Scalar {
    let m = (coeffs.len() / 2) as i64;
    (-m..=m).zip(coeffs).map(|(k, c)| c * arc_integral(k, alpha, alpha + len)).sum::<Scalar>() / TAU
}

/// Checks the arc decomposition behind the Fibonacci law on the trig
/// polynomial `coeffs` (`Σ_{|k|≤M} c_k e^{ikθ}`, indexed by `k + M`).
pub fn fibonacci_recursion_check(coeffs: &[Scalar], n_max: usize, alphas: &[f64], resolution: usize) -> FibonacciReport {
    let n_max = n_max.max(2);
    let m = coeffs.len() / 2;
    let scale = 1.0 + coeffs.iter().map(|c| c.norm()).sum::<f64>();
    let mut additivity_residual: f64 = 0.0;
    for k in 1..=n_max {
        for &alpha in alphas {
            let whole = arc_value(coeffs, alpha, TAU * PHI.powi(k as i32 - 1));
            let first = arc_value(coeffs, alpha, TAU * PHI.powi(k as i32 + 1));
            let second = arc_value(coeffs, alpha + TAU * PHI.powi(k as i32 + 1), TAU * PHI.powi(k as i32));
            additivity_residual = additivity_residual.max((whole - first - second).norm() / scale);
        }
    }
    let mut base_case_residual: f64 = 0.0;
    for k in -(m as i64)..=m as i64 {
        let lhs = normalized_arc_weight(k, PHI)
            + Complex64::from_polar(1.0, k as f64 * TAU * PHI) * normalized_arc_weight(k, PHI * PHI);
        base_case_residual = base_case_residual.max((lhs - normalized_arc_weight(k, 1.0)).norm());
    }
    let mean = coeffs.get(m).cloned().unwrap_or(re(0.0));
    let arc_defects: Vec<f64> = (1..=n_max)
        .map(|n| {
            let len = PHI.powi(n as i32);
            let mut cell: Vec<Scalar> = (-(m as i64)..=m as i64)
                .zip(coeffs)
                .map(|(k, c)| c * normalized_arc_weight(k, len))
                .collect();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            cell[m] -= sign * fibonacci(n - 1) as f64 * mean;
            trig_sup(&cell, 1, m, resolution)
        })
        .collect();
    let e1 = arc_defects[0];
    let implication_holds = arc_defects
        .iter()
        .enumerate()
        .all(|(i, e)| *e <= fibonacci(i + 1) as f64 * e1 * (1.0 + 1e-9) + 1e-9);
    FibonacciReport {
        n_max,
        golden_identity: (PHI + PHI * PHI - 1.0).abs(),
        additivity_residual,
        base_case_residual,
        arc_defects,
        implication_holds,
    }
}

/// Random trig polynomial of degree `degree` with coefficients in the unit box.
pub fn random_trig_poly(degree: usize, rng: &mut impl Rng) -> Vec<Scalar> {
    (0..2 * degree + 1)
        .map(|_| Scalar::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}
