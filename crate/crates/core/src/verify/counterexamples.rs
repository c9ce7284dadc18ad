use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::blockmethod::{validate_compatible_sequence, CompatibleSequence, GammaConfig};
use crate::dynamics::{default_phases, AssembledMap, BlockMove, Homeo};
use crate::field::re;
use crate::funcspace::{
    assemble_block_function, sup_norm, BlockFunction, BlockPart, BlockShape, BlockSpace, Fiber, LimitPoint, PointRef,
};
use crate::shiftop::{
    build_block_method, BlockMethodParams, FamilySpec, Functional, ShiftOperator, WeightFunction,
};
use crate::{Error, Result, Scalar, ScalarField};

/// Residual tolerance of every witness identity.
pub const WITNESS_TOL: f64 = 1e-12;
pub const WITNESS_VERDICT: &str = "NOT_A_SHIFT witness verified";

/// Isometries of the represented spaces that fail to be shifts, each with an
/// explicit nonzero witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Counterexample {
    /// `a ≡ 1` on a block plus the sequence closure: `T` has a fixed point.
    FixedPoint,
    /// Three components mapped to themselves with `a = ±1`: two share a sign
    /// and a combination killed by `Δ` is an eigenvector.
    ComponentPair,
    /// Block construction whose flow swaps two tags: `T²f = −f`.
    Parity,
    /// Block construction with `p₂ / p₁` odd: `Tf = −f`.
    OddMultiple,
}

impl Counterexample {
    pub const ALL: [Counterexample; 4] =
        [Counterexample::FixedPoint, Counterexample::ComponentPair, Counterexample::Parity, Counterexample::OddMultiple];

    pub fn name(self) -> &'static str {
        match self {
            Counterexample::FixedPoint => "FIXED_POINT",
            Counterexample::ComponentPair => "COMPONENT_PAIR",
            Counterexample::Parity => "PARITY",
            Counterexample::OddMultiple => "ODD_MULTIPLE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub which: Counterexample,
    /// The identity checked, e.g. `T f = f`.
    pub identity: String,
    pub residual: f64,
    pub witness_norm: f64,
    /// Components `(i, j)` with equal weight, for the component pair.
    pub pair: Option<(usize, usize)>,
    pub verified: bool,
    pub verdict: String,
}

fn report(which: Counterexample, identity: &str, residual: f64, witness_norm: f64, pair: Option<(usize, usize)>) -> CounterexampleReport {
    let verified = residual <= WITNESS_TOL && witness_norm > 1e-9;
    CounterexampleReport {
        which,
        identity: identity.into(),
        residual,
        witness_norm,
        pair,
        verified,
        verdict: if verified { WITNESS_VERDICT.into() } else { "witness identity failed".into() },
    }
}

const RES: usize = 1 << 10;

/// Fixed-point fixture: `X = 𝕋 + 𝒩 ∪ {∞}`, `a ≡ 1`, `φ` a rotation and
/// `Δ(f) = δ₁ f(x₁) + δ₂ f(∞)`.
pub fn fixed_point_operator(d1: Scalar, d2: Scalar, degree: usize) -> Result<ShiftOperator> {
    let space = Arc::new(BlockSpace::new(
        vec![("X1".into(), BlockShape::torus(1, degree))],
        8,
        vec![LimitPoint::Free],
        ScalarField::Real,
    )?);
    let map = AssembledMap::new(&space, vec![BlockMove { target: 0, fiber: Homeo::Rotation { phases: default_phases(1) } }])?;
    let delta = Functional::PointCombo {
        terms: vec![(PointRef::block(0, Fiber::angles(vec![0.0])), d1), (PointRef::Limit(0), d2)],
    };
    ShiftOperator::new(space, WeightFunction::ones(1), map, delta, "FIXED_POINT")
}

/// `f₀ = γ ξ_{X₁} + ξ_{𝒩∪{∞}}` with `γ = (1 − α₁)/α₀`, or `ξ_{X₁}` when `α₀ = 0`.
pub fn fixed_point_witness(op: &ShiftOperator) -> Result<BlockFunction> {
    let space = op.space();
    let x1 = BlockFunction::block_indicator(space, 0)?;
    let x2 = BlockFunction::sequence_indicator(space)?;
    let a0 = op.delta().evaluate(&x1)?;
    let a1 = op.delta().evaluate(&x2)?;
    if a0.norm() == 0.0 {
        return Ok(x1);
    }
    BlockFunction::combine((re(1.0) - a1) / a0, &x1, re(1.0), &x2)
}

pub fn check_fixed_point(d1: Scalar, d2: Scalar) -> Result<CounterexampleReport> {
    let op = fixed_point_operator(d1, d2, 2)?;
    let f0 = fixed_point_witness(&op)?;
    let residual = sup_norm(&op.apply(&f0)?.sub(&f0)?, RES);
    Ok(report(Counterexample::FixedPoint, "T f0 = f0", residual, sup_norm(&f0, RES), None))
}

/// Components `𝕋, 𝕋², 𝕋³`, each rotated into itself, with weights `signs`
/// and `Δ(f) = Σ d_i f(0_i)`.
pub fn component_pair_operator(signs: [f64; 3], d: [f64; 3], degree: usize) -> Result<ShiftOperator> {
    if signs.iter().any(|s| s.abs() != 1.0) {
        return Err(Error::Precondition("component weights must be ±1".into()));
    }
    let shapes = (1..=3).map(|c| (format!("T^{c}"), BlockShape::torus(c, degree))).collect();
    let space = Arc::new(BlockSpace::new(shapes, 8, vec![LimitPoint::Free], ScalarField::Real)?);
    let phases = default_phases(6);
    let moves = (0..3)
        .map(|i| BlockMove { target: i, fiber: Homeo::Rotation { phases: phases[i * (i + 1) / 2..][..i + 1].to_vec() } })
        .collect();
    let map = AssembledMap::new(&space, moves)?;
    let terms = (0..3).map(|i| (PointRef::block(i, Fiber::angles(vec![0.0; i + 1])), re(d[i]))).collect();
    ShiftOperator::new(space, WeightFunction { block: signs.map(re).to_vec() }, map, Functional::PointCombo { terms }, "COMPONENT_PAIR")
}

/// Pigeonhole pair `i < j` with `a(X_i) = a(X_j)`.
pub fn equal_weight_pair(op: &ShiftOperator) -> Result<(usize, usize)> {
    let w = &op.weights().block;
    if w.len() < 3 {
        return Err(Error::Precondition(format!("{} components, at least 3 required", w.len())));
    }
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if (w[i] - w[j]).norm() == 0.0 {
                return Ok((i, j));
            }
        }
    }
    Err(Error::Precondition("weights are not ±1".into()))
}

pub fn check_component_pair(signs: [f64; 3], d: [f64; 3]) -> Result<CounterexampleReport> {
    let op = component_pair_operator(signs, d, 2)?;
    let (i, j) = equal_weight_pair(&op)?;
    let space = op.space();
    let (xi, xj) = (BlockFunction::block_indicator(space, i)?, BlockFunction::block_indicator(space, j)?);
    let di = op.delta().evaluate(&xi)?;
    let dj = op.delta().evaluate(&xj)?;
    let f0 = if di.norm() == 0.0 && dj.norm() == 0.0 { xi } else { BlockFunction::combine(dj, &xi, -di, &xj)? };
    let s = op.weights().block[i];
    let residual = sup_norm(&op.apply(&f0)?.sub(&f0.scale(s))?, RES);
    let identity = format!("T f0 = {} f0", if s.re > 0.0 { "+" } else { "-" });
    Ok(report(Counterexample::ComponentPair, &identity, residual, sup_norm(&f0, RES), Some((i + 1, j + 1))))
}

/// Block construction with `p = (2)` on `ℤ/2 × 𝕋`, the flow swapping tags.
pub fn parity_fixture(degree: usize) -> Result<crate::shiftop::BlockMethodShift> {
    let seq = validate_compatible_sequence(vec![2])?;
    let gamma = crate::blockmethod::default_gamma_search(&seq, ScalarField::Real, 0)?;
    let family = FamilySpec {
        shape: BlockShape::torus(1, degree).with_tags(2),
        flow: Homeo::Product(vec![Homeo::TagCycle { modulus: 2 }, Homeo::Rotation { phases: default_phases(1) }]),
        base: Fiber { tag: 0, cantor: None, angles: vec![0.0] },
    };
    build_block_method(BlockMethodParams { seq, gamma, families: vec![family], sequence_len: 8 })
}

pub fn check_parity() -> Result<CounterexampleReport> {
    let bm = parity_fixture(2)?;
    let (g1, g2) = (bm.gamma.at(1), bm.gamma.at(2));
    let space = bm.op.space();
    let f = assemble_block_function(
        space,
        vec![
            BlockPart::Cylinders { depth: 0, values: vec![-g2, re(0.0)] },
            BlockPart::Cylinders { depth: 0, values: vec![g1, re(0.0)] },
        ],
        vec![],
        vec![re(0.0)],
    )?;
    let t2 = bm.op.apply_n(&f, 2)?;
    let residual = sup_norm(&t2.add(&f)?, RES);
    Ok(report(Counterexample::Parity, "T^2 f = -f", residual, sup_norm(&f, RES), None))
}

/// Block construction with `p = (3, 9)` and `γ` supported on `a_1^1, a_1^2`.
pub fn odd_multiple_fixture(degree: usize) -> Result<crate::shiftop::BlockMethodShift> {
    let seq = CompatibleSequence::unchecked(vec![3, 9]);
    let mut gamma = vec![re(0.0); 12];
    gamma[0] = re(0.5);
    gamma[3] = re(0.5);
    let mut params = BlockMethodParams::torus_with(seq, GammaConfig::unchecked(gamma, ScalarField::Real), 1, degree);
    params.sequence_len = 8;
    build_block_method(params)
}

pub fn check_odd_multiple() -> Result<CounterexampleReport> {
    let bm = odd_multiple_fixture(2)?;
    let space = bm.op.space();
    let alt = |j: usize, first: f64| re(if j.is_multiple_of(2) { first } else { -first });
    let mut parts = Vec::new();
    for n in 1..=2 {
        let first = if n == 1 { 1.0 } else { -1.0 };
        for j in 0..bm.index.p(n) {
            parts.push(BlockPart::Constant(alt(j, first)));
        }
    }
    let f = assemble_block_function(space, parts, vec![], vec![re(0.0)])?;
    let residual = sup_norm(&bm.op.apply(&f)?.add(&f)?, RES);
    Ok(report(Counterexample::OddMultiple, "T f = -f", residual, sup_norm(&f, RES), None))
}

/// Run one counterexample at its default parameters.
pub fn counterexample_suite(which: Counterexample) -> Result<CounterexampleReport> {
    match which {
        Counterexample::FixedPoint => check_fixed_point(re(0.5), re(0.25)),
        Counterexample::ComponentPair => check_component_pair([1.0, -1.0, 1.0], [0.25, 0.25, 0.5]),
        Counterexample::Parity => check_parity(),
        Counterexample::OddMultiple => check_odd_multiple(),
    }
}
