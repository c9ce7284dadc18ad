use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::functional::Functional;
use crate::dynamics::{AssembledMap, Homeo};
use crate::field::re;
use crate::funcspace::{random_function, sup_norm, BlockFunction, BlockShape, BlockSpace, BlockTable, CantorPoint, Fiber, PointRef};
use crate::{Error, Result, Scalar, ScalarField};

/// Default tolerance on the range defect `f(𝟏) − Δ(g)`.
pub const RANGE_TOL: f64 = 1e-12;

/// Per-block constant weights; `a ≡ 1` on the sequence and its limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    pub block: Vec<Scalar>,
}

impl WeightFunction {
    pub fn ones(blocks: usize) -> Self {
        WeightFunction { block: vec![re(1.0); blocks] }
    }

    pub fn check_unimodular(&self) -> Result<()> {
        for (b, a) in self.block.iter().enumerate() {
            if (a.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("weight on block {b} has modulus {}", a.norm())));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InverseMode {
    /// Invert on `X∖{𝟏}` and drop the value at `𝟏`.
    Lenient,
    /// Fail with [`Error::NotInRange`] when the defect exceeds [`RANGE_TOL`].
    Strict,
}

/// Source cell and Fourier phase for one output cell of a pullback.
struct Plan {
    depth: usize,
    cells: Vec<(usize, Vec<Scalar>)>,
}

type PlanKey = (usize, usize, bool);

/// `T = T[a, φ, Δ]`: `(Tf)(x) = a(x) f(φ(x))` for `x ≠ 𝟏`, `(Tf)(𝟏) = Δ(f)`.
pub struct ShiftOperator {
    space: Arc<BlockSpace>,
    weights: WeightFunction,
    map: AssembledMap,
    delta: Functional,
    label: String,
    plans: Mutex<HashMap<PlanKey, Arc<Plan>>>,
}

impl Clone for ShiftOperator {
    fn clone(&self) -> Self {
        ShiftOperator {
            space: self.space.clone(),
            weights: self.weights.clone(),
            map: self.map.clone(),
            delta: self.delta.clone(),
            label: self.label.clone(),
            plans: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for ShiftOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShiftOperator")
            .field("label", &self.label)
            .field("blocks", &self.space.blocks.len())
            .field("limits", &self.space.limit_count())
            .field("weights", &self.weights)
            .field("delta", &self.delta)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub struct RangeMembership {
    pub preimage: BlockFunction,
    pub defect: Scalar,
    pub in_range: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub trials: usize,
    pub resolution: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ShiftOperator {
    pub fn new(
        space: Arc<BlockSpace>,
        weights: WeightFunction,
        map: AssembledMap,
        delta: Functional,
        label: impl Into<String>,
    ) -> Result<Self> {
        if weights.block.len() != space.blocks.len() {
            return Err(Error::Structural(format!(
                "{} weights for {} blocks",
                weights.block.len(),
                space.blocks.len()
            )));
        }
        weights.check_unimodular()?;
        if let Some(a) = weights.block.iter().find(|a| !space.field.admits(**a)) {
            return Err(Error::InvalidParameter(format!("weight {a} is not a scalar of the field")));
        }
        delta.check_space(&space)?;
        if delta.norm_bound() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!("‖Δ‖ bound {} exceeds 1", delta.norm_bound())));
        }
        Ok(Self::new_unchecked(space, weights, map, delta, label))
    }

    fn new_unchecked(
        space: Arc<BlockSpace>,
        weights: WeightFunction,
        map: AssembledMap,
        delta: Functional,
        label: impl Into<String>,
    ) -> Self {
        ShiftOperator { space, weights, map, delta, label: label.into(), plans: Mutex::new(HashMap::new()) }
    }

    /// Same operator with the weight on one block replaced, skipping
    /// validation. Used to check that the isometry test detects faults.
    pub fn with_weight(&self, block: usize, a: Scalar) -> Self {
        let mut weights = self.weights.clone();
        weights.block[block] = a;
        Self::new_unchecked(self.space.clone(), weights, self.map.clone(), self.delta.clone(), self.label.clone())
    }

    pub fn space(&self) -> &Arc<BlockSpace> {
        &self.space
    }

    pub fn weights(&self) -> &WeightFunction {
        &self.weights
    }

    pub fn map(&self) -> &AssembledMap {
        &self.map
    }

    pub fn delta(&self) -> &Functional {
        &self.delta
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn field(&self) -> ScalarField {
        self.space.field
    }

    /// `a(x)`.
    pub fn weight_at(&self, x: &PointRef) -> Scalar {
        match x {
            PointRef::Block { block, .. } => self.weights.block[*block],
            _ => re(1.0),
        }
    }

    /// `(Tf)(x)` by direct evaluation of `a`, `φ` and `Δ`.
    pub fn eval_image(&self, f: &BlockFunction, x: &PointRef) -> Result<Scalar> {
        self.space.check_point(x)?;
        if *x == PointRef::Seq(1) {
            return self.delta.evaluate(f);
        }
        let y = self.map.forward(x)?;
        let v = self.weight_at(x) * f.eval(&y)?;
        Ok(match self.field() {
            ScalarField::Real => re(v.re),
            ScalarField::Complex => v,
        })
    }

    fn check_function(&self, f: &BlockFunction) -> Result<()> {
        if Arc::ptr_eq(f.space(), &self.space) || **f.space() == *self.space {
            Ok(())
        } else {
            Err(Error::Domain("function does not live on the operator's space".into()))
        }
    }

    fn plan(&self, block: usize, depth: usize, forward: bool) -> Arc<Plan> {
        let key = (block, depth, forward);
        if let Some(p) = self.plans.lock().expect("plan cache").get(&key) {
            return p.clone();
        }
        let shape = &self.space.blocks[block].shape;
        let plan = Arc::new(build_plan(shape, &self.map.block_move(block).fiber, depth, forward));
        self.plans.lock().expect("plan cache").insert(key, plan.clone());
        plan
    }

    /// Table of `z ↦ scale · g(h^{±1}(z))` where `h` is the fiber map of `block`.
    fn pullback(&self, block: usize, source: &BlockTable, forward: bool, scale: Scalar) -> BlockTable {
        let shape = &self.space.blocks[block].shape;
        let plan = self.plan(block, source.depth, forward);
        let m = shape.modes();
        let mut coeffs = Vec::with_capacity(plan.cells.len() * m);
        for (src, phases) in &plan.cells {
            let cell = &source.coeffs[src * m..(src + 1) * m];
            if phases.is_empty() {
                coeffs.extend(cell.iter().map(|c| scale * c));
            } else {
                coeffs.extend(cell.iter().zip(phases).map(|(c, e)| scale * c * e));
            }
        }
        BlockTable { depth: plan.depth, coeffs }
    }

    pub fn apply(&self, f: &BlockFunction) -> Result<BlockFunction> {
        self.check_function(f)?;
        let blocks = (0..self.space.blocks.len())
            .map(|b| {
                let mv = self.map.block_move(b);
                self.pullback(b, f.table(mv.target), true, self.weights.block[b])
            })
            .collect();
        let mut head = Vec::with_capacity(f.head().len() + 1);
        head.push(self.delta.evaluate(f)?);
        head.extend_from_slice(f.head());
        let lim = f.limit_values();
        let n = lim.len();
        let limits = (0..n).map(|k| lim[(k + n - 1) % n]).collect();
        Ok(BlockFunction::from_raw(self.space.clone(), blocks, head, limits))
    }

    /// `T^n f`.
    pub fn apply_n(&self, f: &BlockFunction, n: usize) -> Result<BlockFunction> {
        let mut g = f.clone();
        for _ in 0..n {
            g = self.apply(&g)?;
        }
        Ok(g)
    }

    /// The unique `g` with `(Tg)(x) = f(x)` for `x ≠ 𝟏`.
    pub fn apply_inverse(&self, f: &BlockFunction, mode: InverseMode) -> Result<BlockFunction> {
        self.check_function(f)?;
        let g = self.lenient_inverse(f);
        if mode == InverseMode::Strict {
            let defect = (f.seq_value(1) - self.delta.evaluate(&g)?).norm();
            if defect > RANGE_TOL {
                return Err(Error::NotInRange(defect));
            }
        }
        Ok(g)
    }

    /// `T^{−n} f` in lenient mode.
    pub fn apply_inverse_n(&self, f: &BlockFunction, n: usize) -> Result<BlockFunction> {
        self.check_function(f)?;
        let mut g = f.clone();
        for _ in 0..n {
            g = self.lenient_inverse(&g);
        }
        Ok(g)
    }

    fn lenient_inverse(&self, f: &BlockFunction) -> BlockFunction {
        let blocks = (0..self.space.blocks.len())
            .map(|c| {
                let b = self.map.preimage_block(c);
                self.pullback(b, f.table(b), false, 1.0 / self.weights.block[b])
            })
            .collect();
        let head = f.head().get(1..).unwrap_or(&[]).to_vec();
        let lim = f.limit_values();
        let n = lim.len();
        let limits = (0..n).map(|k| lim[(k + 1) % n]).collect();
        BlockFunction::from_raw(self.space.clone(), blocks, head, limits)
    }

    /// Preimage candidate and defect `f(𝟏) − Δ(g)`; `f ∈ T(C(X))` iff the defect vanishes.
    pub fn range_membership(&self, f: &BlockFunction) -> Result<RangeMembership> {
        self.range_membership_tol(f, RANGE_TOL)
    }

    pub fn range_membership_tol(&self, f: &BlockFunction, tol: f64) -> Result<RangeMembership> {
        let g = self.apply_inverse(f, InverseMode::Lenient)?;
        let defect = f.seq_value(1) - self.delta.evaluate(&g)?;
        Ok(RangeMembership { in_range: defect.norm() <= tol, defect, preimage: g })
    }

    /// Compare `‖Tf‖` with `‖f‖` on random functions.
    pub fn check_isometry(&self, trials: usize, resolution: usize, tolerance: f64, rng: &mut impl Rng) -> Result<IsometryReport> {
        let mut max_deviation: f64 = 0.0;
        for _ in 0..trials {
            let f = random_function(&self.space, rng);
            let tf = self.apply(&f)?;
            let d = (sup_norm(&tf, resolution) - sup_norm(&f, resolution)).abs();
            max_deviation = max_deviation.max(d);
        }
        Ok(IsometryReport { trials, resolution, max_deviation, tolerance, passed: max_deviation <= tolerance })
    }

    /// Isometry check on the indicator of one block.
    pub fn isometry_deviation_on(&self, f: &BlockFunction, resolution: usize) -> Result<f64> {
        let tf = self.apply(f)?;
        Ok((sup_norm(&tf, resolution) - sup_norm(f, resolution)).abs())
    }
}

fn build_plan(shape: &BlockShape, h: &Homeo, depth: usize, forward: bool) -> Plan {
    let out_depth = if shape.cantor.is_some() { h.input_depth(depth, forward) } else { 0 };
    let cyl_out = shape.cylinders(out_depth);
    let cyl_in = shape.cylinders(depth);
    let modes = shape.modes();
    let degrees: Vec<Vec<i64>> = (0..modes).map(|i| shape.multi_degree(i)).collect();
    let mut cells = Vec::with_capacity(shape.tags * cyl_out);
    for tag in 0..shape.tags {
        for u in 0..cyl_out {
            let x = Fiber {
                tag,
                cantor: shape.cantor.map(|p| CantorPoint::from_prefix_index(p, u, out_depth)),
                angles: vec![0.0; shape.circles],
            };
            let y = if forward { h.forward(&x) } else { h.backward(&x) };
            let src_cyl = y.cantor.as_ref().map_or(0, |c| c.prefix_index(depth));
            let phases = if shape.circles == 0 || y.angles.iter().all(|a| *a == 0.0) {
                Vec::new()
            } else {
                degrees
                    .iter()
                    .map(|k| {
                        let t: f64 = k.iter().zip(&y.angles).map(|(kj, a)| *kj as f64 * a).sum();
                        Complex64::from_polar(1.0, t)
                    })
                    .collect()
            };
            cells.push((y.tag * cyl_in + src_cyl, phases));
        }
    }
    Plan { depth: out_depth, cells }
}
