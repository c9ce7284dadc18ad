use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::functional::{ArcSpec, Functional};
use super::operator::{ShiftOperator, WeightFunction};
use crate::blockmethod::{
    block_delta_terms, build_block_index, default_gamma_search, validate_compatible_sequence, BlockIndex,
    CompatibleSequence, GammaConfig,
};
use crate::dynamics::{
    cyclic_block_moves, default_phases, make_bilateral_shift, make_cantor_flow, padic_point, AssembledMap, BlockMove,
    Homeo, TransitiveSeed,
};
use crate::field::re;
use crate::funcspace::{
    BlockShape, BlockSpace, CantorPoint, Fiber, LimitPoint, PointRef, DEFAULT_DEGREE, DEFAULT_SEQUENCE_LEN,
};
use crate::{Error, Result, Scalar, ScalarField, TAU};

/// One cyclic family of identical blocks with its flow `h_n` and base point `1_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub shape: BlockShape,
    pub flow: Homeo,
    pub base: Fiber,
}

/// Parameters of the block construction.
#[derive(Clone, Debug)]
pub struct BlockMethodParams {
    pub seq: CompatibleSequence,
    pub gamma: GammaConfig,
    pub families: Vec<FamilySpec>,
    pub sequence_len: usize,
}

impl BlockMethodParams {
    /// Torus blocks `𝕋^circles` truncated at `degree`, rotations by distinct
    /// irrational phases, base points at the origin and the default weights.
    pub fn torus(p: Vec<usize>, circles: usize, degree: usize, field: ScalarField, seed: u64) -> Result<Self> {
        let seq = validate_compatible_sequence(p)?;
        let gamma = default_gamma_search(&seq, field, seed)?;
        Ok(Self::torus_with(seq, gamma, circles, degree))
    }

    /// Torus families for an explicit sequence and weights (no validation).
    pub fn torus_with(seq: CompatibleSequence, gamma: GammaConfig, circles: usize, degree: usize) -> Self {
        let phases = default_phases(seq.len() * circles);
        let families = (0..seq.len())
            .map(|n| FamilySpec {
                shape: BlockShape::torus(circles, degree),
                flow: Homeo::Rotation { phases: phases[n * circles..(n + 1) * circles].to_vec() },
                base: Fiber::angles(vec![0.0; circles]),
            })
            .collect();
        BlockMethodParams { seq, gamma, families, sequence_len: DEFAULT_SEQUENCE_LEN }
    }
}

/// The block-method operator with the data its certificates need.
#[derive(Clone, Debug)]
pub struct BlockMethodShift {
    pub op: ShiftOperator,
    pub seq: CompatibleSequence,
    pub index: BlockIndex,
    pub gamma: GammaConfig,
    pub families: Vec<FamilySpec>,
}

impl BlockMethodShift {
    /// Zero-based block position of the id `m`.
    pub fn block_of(&self, m: usize) -> usize {
        m - 1
    }

    pub fn seeds(&self) -> Vec<TransitiveSeed> {
        self.families.iter().map(|f| TransitiveSeed::uncertified(f.flow.clone(), f.base.clone())).collect()
    }
}

/// `X = Σ_n A_n × Z_n + 𝒩 ∪ {∞}` with `φ(a_j, z) = (s_n(a_j), h_n⁻¹ z)`,
/// `a = −1` on `a_1^n × Z_n` and `Δ(f) = Σ γ_m f(m, 1_{π(m)})`.
pub fn build_block_method(params: BlockMethodParams) -> Result<BlockMethodShift> {
    let BlockMethodParams { seq, gamma, families, sequence_len } = params;
    let index = build_block_index(&seq);
    if families.len() != seq.len() {
        return Err(Error::InvalidParameter(format!("{} families for {} entries of p", families.len(), seq.len())));
    }
    if gamma.gamma().len() != index.total() {
        return Err(Error::Gamma(format!("{} weights for {} blocks", gamma.gamma().len(), index.total())));
    }
    let mut shapes = Vec::with_capacity(index.total());
    for n in 1..=seq.len() {
        let fam = &families[n - 1];
        fam.shape.check_fiber(&fam.base)?;
        fam.flow.check_domain(&fam.shape)?;
        for j in 1..=index.p(n) {
            shapes.push((format!("a_{j}^{n}"), fam.shape.clone()));
        }
    }
    let space = Arc::new(BlockSpace::new(shapes, sequence_len, vec![LimitPoint::Free], gamma.field())?);
    let mut moves: Vec<Option<BlockMove>> = vec![None; index.total()];
    let mut weights = WeightFunction::ones(index.total());
    for n in 1..=seq.len() {
        let run: Vec<usize> = index.run(n).into_iter().map(|m| m - 1).collect();
        for (b, mv) in cyclic_block_moves(&run, &families[n - 1].flow) {
            moves[b] = Some(mv);
        }
        weights.block[run[0]] = re(-1.0);
    }
    let moves = moves.into_iter().map(|m| m.expect("every block lies in a run")).collect();
    let map = AssembledMap::new(&space, moves)?;
    let terms = block_delta_terms(&gamma, &index)
        .into_iter()
        .map(|(m, n, g)| (PointRef::block(m - 1, families[n - 1].base.clone()), g))
        .collect();
    let delta = Functional::PointCombo { terms };
    let op = ShiftOperator::new(space, weights, map, delta, "BLOCK_METHOD")?;
    Ok(BlockMethodShift { op, seq, index, gamma, families })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionParams {
    pub d1: Scalar,
    pub d2: Scalar,
    /// Prime period `N` of `0_Y`.
    pub period: usize,
    pub alphabet: u8,
    /// Cylinder depth of the Cantor block `Y`.
    pub depth: usize,
    /// Cylinder depth at which `1_Y` is certified transitive.
    pub seed_depth: usize,
    pub seed_budget: usize,
    pub field: ScalarField,
    pub sequence_len: usize,
}

impl CompositionParams {
    pub fn new(d1: Scalar, d2: Scalar, period: usize, depth: usize) -> Self {
        CompositionParams {
            d1,
            d2,
            period,
            alphabet: 2,
            depth,
            seed_depth: 6,
            seed_budget: 1 << 20,
            field: if d1.im == 0.0 && d2.im == 0.0 { ScalarField::Real } else { ScalarField::Complex },
            sequence_len: DEFAULT_SEQUENCE_LEN,
        }
    }
}

/// Composition operator on `Y ∪ 𝒩` with limits glued to a periodic orbit.
#[derive(Clone, Debug)]
pub struct CompositionShift {
    pub op: ShiftOperator,
    pub params: CompositionParams,
    /// The transitive flow `χ` on `Y`; `φ = χ⁻¹`.
    pub chi: Homeo,
    pub one: Fiber,
    pub zero: Fiber,
    pub seed: TransitiveSeed,
}

impl CompositionShift {
    pub const BLOCK: usize = 0;
}

fn check_guards(d1: Scalar, d2: Scalar, period: usize, field: ScalarField) -> Result<()> {
    if d1.norm() == 0.0 || d2.norm() == 0.0 {
        return Err(Error::Guard("both δ₁ and δ₂ must be nonzero".into()));
    }
    if !field.admits(d1) || !field.admits(d2) {
        return Err(Error::Guard("δ values must be scalars of the field".into()));
    }
    if d1.norm() + d2.norm() > 1.0 + 1e-15 {
        return Err(Error::Guard(format!("|δ₁| + |δ₂| = {} exceeds 1", d1.norm() + d2.norm())));
    }
    if period == 0 {
        return Err(Error::Guard("period must be positive".into()));
    }
    if ((d1 + d2).powu(period as u32) - 1.0).norm() <= 1e-12 {
        return Err(Error::Guard(format!("(δ₁+δ₂)^{period} = 1")));
    }
    Ok(())
}

/// `χ`-orbit of `0_Y` has prime period `N` and avoids `1_Y`.
fn check_periodic(chi: &Homeo, zero: &Fiber, one: &Fiber, period: usize) -> Result<()> {
    let same = |a: &Fiber, b: &Fiber| match (&a.cantor, &b.cantor) {
        (Some(x), Some(y)) => a.tag == b.tag && x.same_point(y),
        _ => a == b,
    };
    if same(zero, one) {
        return Err(Error::Precondition("0_Y coincides with 1_Y".into()));
    }
    let mut x = zero.clone();
    for k in 1..=period {
        x = chi.forward(&x);
        if same(&x, zero) != (k == period) {
            return Err(Error::Precondition(format!("0_Y does not have prime period {period}")));
        }
    }
    Ok(())
}

/// Assemble the composition operator for a given flow, seed and periodic point.
pub fn build_composition_with(
    params: CompositionParams,
    chi: Homeo,
    seed: TransitiveSeed,
    zero: Fiber,
    label: &str,
) -> Result<CompositionShift> {
    check_guards(params.d1, params.d2, params.period, params.field)?;
    let shape = BlockShape::cantor(params.alphabet, params.depth);
    chi.check_domain(&shape)?;
    let one = seed.base.clone();
    check_periodic(&chi, &zero, &one, params.period)?;
    let limits = (0..params.period)
        .map(|k| LimitPoint::Identified { block: 0, fiber: chi.iterate(&zero, k as i64) })
        .collect();
    let space = Arc::new(BlockSpace::new(vec![("Y".into(), shape)], params.sequence_len, limits, params.field)?);
    let map = AssembledMap::new(&space, vec![BlockMove { target: 0, fiber: chi.inverse() }])?;
    let delta = Functional::CompositionPair {
        d1: params.d1,
        d2: params.d2,
        block: 0,
        first: one.clone(),
        second: chi.iterate(&one, params.period as i64),
    };
    let op = ShiftOperator::new(space, WeightFunction::ones(1), map, delta, label)?;
    Ok(CompositionShift { op, params, chi, one, zero, seed })
}

/// `Y = {0,…,p−1}^ℤ` with the bilateral shift, `1_Y` the scheduled transitive
/// point and `0_Y` the periodic point with `x_j = 1` iff `j ≡ 0 mod N`.
pub fn build_composition(params: CompositionParams) -> Result<CompositionShift> {
    check_guards(params.d1, params.d2, params.period, params.field)?;
    let (chi, seed) = make_bilateral_shift(params.alphabet, params.seed_depth, params.seed_budget)?;
    let mut pattern = vec![0u8; params.period];
    pattern[0] = 1;
    let zero = Fiber::cantor(CantorPoint::periodic(params.alphabet, &pattern)?);
    build_composition_with(params, chi, seed, zero, "COMPOSITION")
}

/// Composition on `ℤ_p` with `χ` the shift conjugated to fix `L₀` (via `M₀`),
/// `0_Y = L₀` and `N = 1`.
pub fn build_cantor_set(mut params: CompositionParams, l0: &[u8], m0: &[u8]) -> Result<CompositionShift> {
    params.period = 1;
    check_guards(params.d1, params.d2, 1, params.field)?;
    let p = params.alphabet;
    let chi = make_cantor_flow(p, l0.len(), l0, m0)?;
    let (_, shift_seed) = make_bilateral_shift(p, params.seed_depth, params.seed_budget)?;
    let s = Homeo::Translation { p, add: m0.to_vec(), sub: l0.to_vec() };
    let u = Homeo::Translation { p, add: Vec::new(), sub: m0.to_vec() };
    let seed = shift_seed.conjugate(&u).conjugate(&s);
    debug_assert_eq!(seed.flow, chi);
    let zero = Fiber::cantor(padic_point(p, l0)?);
    build_composition_with(params, chi, seed, zero, "CANTOR_SET")
}

/// Default `L₀`, `M₀` digits for the Cantor construction.
pub fn default_cantor_points(depth: usize) -> (Vec<u8>, Vec<u8>) {
    let l0 = (0..depth).map(|i| (i % 3 == 0) as u8).collect();
    let m0 = (0..depth).map(|i| (i % 2 == 1) as u8).collect();
    (l0, m0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GoldenForm {
    /// `X = 𝕋 + 𝒩 ∪ {∞}`, `Tf = −f∘ψ` on `𝕋`, `Δ` the golden arc integral.
    Plain,
    /// `𝕋 × 𝕋` with rotation `(ψ, ρ)`, `Δ` the arc integral times evaluation at `v`.
    Product,
    /// Two swapped copies of `𝕋` plus an extra torus rotated by `ρ`.
    Twin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenParams {
    pub form: GoldenForm,
    pub degree: usize,
    /// Rotation number of the extra circle factor.
    pub rho: f64,
    pub field: ScalarField,
    pub sequence_len: usize,
}

impl GoldenParams {
    pub fn new(form: GoldenForm, degree: usize) -> Self {
        GoldenParams {
            form,
            degree,
            rho: default_phases(1)[0],
            field: ScalarField::Real,
            sequence_len: DEFAULT_SEQUENCE_LEN,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GoldenShift {
    pub op: ShiftOperator,
    pub params: GoldenParams,
}

/// Rotation by one radian, `ψ(θ) = θ + 1`.
pub fn radian_rotation() -> Homeo {
    Homeo::Rotation { phases: vec![1.0 / TAU] }
}

pub fn build_golden_arc(params: GoldenParams) -> Result<GoldenShift> {
    let m = params.degree;
    let arc = |block| ArcSpec::golden(block, 0.0);
    let (shapes, moves, weights, delta) = match params.form {
        GoldenForm::Plain => (
            vec![("T".to_string(), BlockShape::torus(1, m))],
            vec![BlockMove { target: 0, fiber: radian_rotation() }],
            vec![re(-1.0)],
            Functional::GoldenArc(arc(0)),
        ),
        GoldenForm::Product => (
            vec![("T x T".to_string(), BlockShape::torus(2, m))],
            vec![BlockMove { target: 0, fiber: Homeo::Rotation { phases: vec![1.0 / TAU, params.rho] } }],
            vec![re(-1.0)],
            Functional::ProductWithEvaluation { arc: arc(0), at: vec![0.0] },
        ),
        GoldenForm::Twin => {
            let third = re(1.0 / 3.0);
            (
                vec![
                    ("T x {0}".to_string(), BlockShape::torus(1, m)),
                    ("T x {1}".to_string(), BlockShape::torus(1, m)),
                    ("R".to_string(), BlockShape::torus(1, m)),
                ],
                vec![
                    BlockMove { target: 1, fiber: radian_rotation() },
                    BlockMove { target: 0, fiber: radian_rotation() },
                    BlockMove { target: 2, fiber: Homeo::Rotation { phases: vec![params.rho] } },
                ],
                vec![re(-1.0), re(1.0), re(-1.0)],
                Functional::Composite(vec![
                    (third, Functional::GoldenArc(arc(0))),
                    (third, Functional::GoldenArc(arc(1))),
                    (third, Functional::PointCombo { terms: vec![(PointRef::block(2, Fiber::angles(vec![0.0])), re(1.0))] }),
                ]),
            )
        }
    };
    let space = Arc::new(BlockSpace::new(shapes, params.sequence_len, vec![LimitPoint::Free], params.field)?);
    let map = AssembledMap::new(&space, moves)?;
    let op = ShiftOperator::new(space, WeightFunction { block: weights }, map, delta, "GOLDEN_ARC_MODEL")?;
    Ok(GoldenShift { op, params })
}

/// `τ(k) = (k(k−1) mod 4)/2`, the sign exponent of the twin form.
pub fn tau(k: u64) -> u64 {
    (k * (k.wrapping_sub(1)) % 4) / 2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFamilyParams {
    pub n: usize,
    pub degree: usize,
    /// `z_i`; defaults to `2^{−i}`.
    pub z: Vec<Scalar>,
    pub sequence_len: usize,
}

impl ComplexFamilyParams {
    pub fn new(n: usize, degree: usize) -> Self {
        ComplexFamilyParams {
            n,
            degree,
            z: (1..=n).map(|i| re(0.5f64.powi(i as i32))).collect(),
            sequence_len: DEFAULT_SEQUENCE_LEN,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComplexFamilyShift {
    pub op: ShiftOperator,
    pub params: ComplexFamilyParams,
    pub zeta: Vec<Scalar>,
    pub seeds: Vec<TransitiveSeed>,
}

/// `ζ_i = e^{iπ/2^{i−1}}`.
pub fn zeta(i: usize) -> Scalar {
    Scalar::from_polar(1.0, std::f64::consts::PI / 2f64.powi(i as i32 - 1))
}

/// `X_n = 𝕋 + … + 𝕋 + 𝒩 ∪ {∞}` over ℂ, `a = ζ_i` and `φ = σ_i` on the
/// `i`-th circle, `Δ(f) = Σ z_i f(v_i)`.
pub fn build_complex_family(params: ComplexFamilyParams) -> Result<ComplexFamilyShift> {
    let n = params.n;
    if n == 0 {
        return Err(Error::InvalidParameter("complex family needs n ≥ 1".into()));
    }
    if params.z.len() != n {
        return Err(Error::InvalidParameter(format!("{} values of z for n = {n}", params.z.len())));
    }
    for (i, z) in params.z.iter().enumerate() {
        let bound = 0.5f64.powi(i as i32 + 1);
        if z.norm() == 0.0 || z.norm() > bound * (1.0 + 1e-15) {
            return Err(Error::Guard(format!("z_{} = {z} violates 0 < |z| ≤ {bound}", i + 1)));
        }
    }
    let phases = default_phases(n);
    let shapes = (1..=n).map(|i| (format!("T_{i}"), BlockShape::torus(1, params.degree))).collect();
    let space = Arc::new(BlockSpace::new(shapes, params.sequence_len, vec![LimitPoint::Free], ScalarField::Complex)?);
    let flows: Vec<Homeo> = phases.iter().map(|&r| Homeo::Rotation { phases: vec![r] }).collect();
    let moves = flows.iter().enumerate().map(|(i, h)| BlockMove { target: i, fiber: h.clone() }).collect();
    let map = AssembledMap::new(&space, moves)?;
    let zeta: Vec<Scalar> = (1..=n).map(zeta).collect();
    let origin = Fiber::angles(vec![0.0]);
    let terms = params.z.iter().enumerate().map(|(i, z)| (PointRef::block(i, origin.clone()), *z)).collect();
    let op = ShiftOperator::new(
        space,
        WeightFunction { block: zeta.clone() },
        map,
        Functional::PointCombo { terms },
        "COMPLEX_FAMILY",
    )?;
    let seeds = flows.into_iter().map(|h| TransitiveSeed::uncertified(h, origin.clone())).collect();
    Ok(ComplexFamilyShift { op, params, zeta, seeds })
}

/// The five standard variants at the sizes used by the acceptance runs.
pub fn standard_variants(seed: u64) -> Result<Vec<(&'static str, ShiftOperator)>> {
    let block = build_block_method(BlockMethodParams::torus(vec![2, 4], 1, DEFAULT_DEGREE, ScalarField::Real, seed)?)?;
    let comp = build_composition(CompositionParams::new(re(0.25), re(0.25), 2, 10))?;
    let golden = build_golden_arc(GoldenParams::new(GoldenForm::Plain, 16))?;
    let complex = build_complex_family(ComplexFamilyParams::new(2, DEFAULT_DEGREE))?;
    let (l0, m0) = default_cantor_points(8);
    let cantor = build_cantor_set(CompositionParams::new(re(0.25), re(0.25), 1, 8), &l0, &m0)?;
    Ok(vec![
        ("BLOCK_METHOD", block.op),
        ("COMPOSITION", comp.op),
        ("GOLDEN_ARC_MODEL", golden.op),
        ("COMPLEX_FAMILY", complex.op),
        ("CANTOR_SET", cantor.op),
    ])
}
