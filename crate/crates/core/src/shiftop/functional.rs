use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::re;
use crate::funcspace::{BlockFunction, BlockSpace, Fiber, PointRef};
use crate::{Error, Result, Scalar, ScalarField, TAU};

/// Normalized arc integral `prefactor · ∫_{start}^{start+length} f(θ) dθ` on
/// circle 0 of a torus block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub block: usize,
    pub start: f64,
    pub length: f64,
    pub prefactor: f64,
}

impl ArcSpec {
    /// `(1/2π) ∫_{A(α, α+2πΦ)}`.
    pub fn golden(block: usize, start: f64) -> Self {
        ArcSpec { block, start, length: TAU * crate::PHI, prefactor: 1.0 / TAU }
    }

    /// `prefactor · ∫_{start}^{start+length} e^{ikθ} dθ`.
    pub fn mode_weight(&self, k: i64) -> Scalar {
        self.prefactor * arc_integral(k, self.start, self.start + self.length)
    }
}

/// `∫_α^β e^{ikθ} dθ` in closed form.
pub fn arc_integral(k: i64, alpha: f64, beta: f64) -> Scalar {
    if k == 0 {
        return re(beta - alpha);
    }
    let kf = k as f64;
    let num = Complex64::from_polar(1.0, kf * beta) - Complex64::from_polar(1.0, kf * alpha);
    num / Complex64::new(0.0, kf)
}

/// Continuous linear functional `Δ` on the represented functions.
#[derive(Clone, Debug, PartialEq)]
pub enum Functional {
    /// `Σ w_i f(x_i)`.
    PointCombo { terms: Vec<(PointRef, Scalar)> },
    /// Arc integral on a one-circle block.
    GoldenArc(ArcSpec),
    /// Arc integral on circle 0 times evaluation of the remaining circles at `at`.
    ProductWithEvaluation { arc: ArcSpec, at: Vec<f64> },
    /// `δ₁ f(b, first) + δ₂ f(b, second)`.
    CompositionPair { d1: Scalar, d2: Scalar, block: usize, first: Fiber, second: Fiber },
    /// `Σ c_i Δ_i`.
    Composite(Vec<(Scalar, Functional)>),
}

impl Functional {
    pub fn evaluate(&self, f: &BlockFunction) -> Result<Scalar> {
        let v = match self {
            Functional::PointCombo { terms } => {
                let mut acc = re(0.0);
                for (x, w) in terms {
                    acc += w * f.eval(x)?;
                }
                acc
            }
            Functional::GoldenArc(arc) => arc_value(f, arc, &[])?,
            Functional::ProductWithEvaluation { arc, at } => arc_value(f, arc, at)?,
            Functional::CompositionPair { d1, d2, block, first, second } => {
                d1 * f.eval(&PointRef::block(*block, first.clone()))?
                    + d2 * f.eval(&PointRef::block(*block, second.clone()))?
            }
            Functional::Composite(parts) => {
                let mut acc = re(0.0);
                for (c, d) in parts {
                    acc += c * d.evaluate(f)?;
                }
                acc
            }
        };
        Ok(match f.field() {
            ScalarField::Real => re(v.re),
            ScalarField::Complex => v,
        })
    }

    /// Upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        match self {
            Functional::PointCombo { terms } => terms.iter().map(|(_, w)| w.norm()).sum(),
            Functional::GoldenArc(arc) | Functional::ProductWithEvaluation { arc, .. } => {
                arc.prefactor.abs() * arc.length.abs()
            }
            Functional::CompositionPair { d1, d2, .. } => d1.norm() + d2.norm(),
            Functional::Composite(parts) => parts.iter().map(|(c, d)| c.norm() * d.norm_bound()).sum(),
        }
    }

    /// Check that every referenced point and block exists with the right shape.
    pub fn check_space(&self, space: &BlockSpace) -> Result<()> {
        match self {
            Functional::PointCombo { terms } => terms.iter().try_for_each(|(x, _)| space.check_point(x)),
            Functional::GoldenArc(arc) => check_arc(space, arc, 0),
            Functional::ProductWithEvaluation { arc, at } => check_arc(space, arc, at.len()),
            Functional::CompositionPair { block, first, second, .. } => {
                let shape = space.shape(*block)?;
                shape.check_fiber(first)?;
                shape.check_fiber(second)
            }
            Functional::Composite(parts) => parts.iter().try_for_each(|(_, d)| d.check_space(space)),
        }
    }
}

fn check_arc(space: &BlockSpace, arc: &ArcSpec, extra: usize) -> Result<()> {
    let shape = space.shape(arc.block)?;
    if shape.circles != extra + 1 || shape.cantor.is_some() || shape.tags != 1 {
        return Err(Error::Domain(format!(
            "arc functional needs a torus block with {} circles, block {} has {}",
            extra + 1,
            arc.block,
            shape.circles
        )));
    }
    Ok(())
}

fn arc_value(f: &BlockFunction, arc: &ArcSpec, at: &[f64]) -> Result<Scalar> {
    check_arc(f.space(), arc, at.len())?;
    let shape = &f.space().blocks[arc.block].shape;
    let cell = f.table(arc.block).cell(shape, 0, 0);
    let m = shape.degree as i64;
    let weights: Vec<Scalar> = (-m..=m).map(|k| arc.mode_weight(k)).collect();
    let mut acc = re(0.0);
    for (i, c) in cell.iter().enumerate() {
        if *c == re(0.0) {
            continue;
        }
        let k = shape.multi_degree(i);
        let mut w = weights[(k[0] + m) as usize];
        for (kj, th) in k[1..].iter().zip(at) {
            w *= Complex64::from_polar(1.0, *kj as f64 * th);
        }
        acc += c * w;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mode_weights() {
        let a = ArcSpec::golden(0, 0.0);
        assert!((a.mode_weight(0) - re(crate::PHI)).norm() < 1e-15);
        let k = 3;
        let expect = (Complex64::from_polar(1.0, k as f64 * TAU * crate::PHI) - 1.0)
            / Complex64::new(0.0, TAU * k as f64);
        assert!((a.mode_weight(k) - expect).norm() < 1e-15);
    }
}
