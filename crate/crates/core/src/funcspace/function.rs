use std::sync::Arc;

use num_complex::Complex64;

use super::space::{BlockShape, BlockSpace, Fiber, LimitPoint, PointRef};
use super::supnorm::trig_sup;
use crate::field::re;
use crate::{Error, Result, Scalar, ScalarField};

const GLUE_TOL: f64 = 1e-12;

/// Coefficients of one block: `tags × p^depth × (2M+1)^circles`, row-major in
/// that order. Cylinder index `u` encodes the first `depth` p-adic digits,
/// little-endian.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTable {
    pub depth: usize,
    pub coeffs: Vec<Scalar>,
}

impl BlockTable {
    pub fn zeros(shape: &BlockShape, depth: usize) -> Self {
        let depth = if shape.cantor.is_some() { depth } else { 0 };
        let n = shape.tags * shape.cylinders(depth) * shape.modes();
        BlockTable { depth, coeffs: vec![Scalar::new(0.0, 0.0); n] }
    }

    pub fn expected_len(&self, shape: &BlockShape) -> usize {
        shape.tags * shape.cylinders(self.depth) * shape.modes()
    }

    pub fn cell_offset(&self, shape: &BlockShape, tag: usize, cylinder: usize) -> usize {
        (tag * shape.cylinders(self.depth) + cylinder) * shape.modes()
    }

    pub fn cell<'a>(&'a self, shape: &BlockShape, tag: usize, cylinder: usize) -> &'a [Scalar] {
        let o = self.cell_offset(shape, tag, cylinder);
        &self.coeffs[o..o + shape.modes()]
    }

    pub fn eval(&self, shape: &BlockShape, z: &Fiber) -> Scalar {
        let cyl = match &z.cantor {
            Some(x) if shape.cantor.is_some() => x.prefix_index(self.depth),
            _ => 0,
        };
        eval_modes(self.cell(shape, z.tag, cyl), shape, &z.angles)
    }

    /// Same function written at a larger cylinder depth.
    pub fn lift(&self, shape: &BlockShape, depth: usize) -> BlockTable {
        if shape.cantor.is_none() || depth <= self.depth {
            return self.clone();
        }
        let old_cyl = shape.cylinders(self.depth);
        let new_cyl = shape.cylinders(depth);
        let m = shape.modes();
        let mut coeffs = Vec::with_capacity(shape.tags * new_cyl * m);
        for t in 0..shape.tags {
            for u in 0..new_cyl {
                coeffs.extend_from_slice(self.cell(shape, t, u % old_cyl));
            }
        }
        BlockTable { depth, coeffs }
    }

    /// Drop trailing digits the table does not depend on.
    pub fn compress(&self, shape: &BlockShape) -> BlockTable {
        let Some(p) = shape.cantor else { return self.clone() };
        let p = p as usize;
        let m = shape.modes();
        let mut table = self.clone();
        while table.depth > 0 {
            let low = shape.cylinders(table.depth - 1);
            let full = low * p;
            let independent = (0..shape.tags).all(|t| {
                let base = t * full * m;
                let first = &table.coeffs[base..base + low * m];
                (1..p).all(|d| {
                    let o = base + d * low * m;
                    &table.coeffs[o..o + low * m] == first
                })
            });
            if !independent {
                break;
            }
            let mut coeffs = Vec::with_capacity(shape.tags * low * m);
            for t in 0..shape.tags {
                let base = t * full * m;
                coeffs.extend_from_slice(&table.coeffs[base..base + low * m]);
            }
            table = BlockTable { depth: table.depth - 1, coeffs };
        }
        table
    }
}

/// Evaluate `Σ_k c_k e^{i k·θ}` over the dense mode box of `shape`.
pub fn eval_modes(cell: &[Scalar], shape: &BlockShape, angles: &[f64]) -> Scalar {
    if shape.circles == 0 {
        return cell[0];
    }
    let m = shape.degree as i64;
    let w = (2 * m + 1) as usize;
    let phases: Vec<Vec<Complex64>> = angles
        .iter()
        .map(|&th| (-m..=m).map(|k| Complex64::from_polar(1.0, k as f64 * th)).collect())
        .collect();
    if shape.circles == 1 {
        return cell.iter().zip(&phases[0]).map(|(c, e)| c * e).sum();
    }
    let mut total = Scalar::new(0.0, 0.0);
    for (idx, c) in cell.iter().enumerate() {
        if *c == Scalar::new(0.0, 0.0) {
            continue;
        }
        let mut rest = idx;
        let mut e = Complex64::new(1.0, 0.0);
        for ph in &phases {
            e *= ph[rest % w];
            rest /= w;
        }
        total += c * e;
    }
    total
}

/// Element of C(X) represented exactly on the discretized space: a table per
/// block, explicit values on the first sequence points, and eventually
/// periodic behavior along `𝒩` given by the limit values.
#[derive(Clone, Debug)]
pub struct BlockFunction {
    space: Arc<BlockSpace>,
    pub(crate) blocks: Vec<BlockTable>,
    pub(crate) head: Vec<Scalar>,
    pub(crate) limits: Vec<Scalar>,
}

/// Per-block input to [`assemble_block_function`].
#[derive(Clone, Debug)]
pub enum BlockPart {
    Constant(Scalar),
    /// Sparse Fourier modes, applied to every tag and cylinder.
    Modes(Vec<(Vec<i64>, Scalar)>),
    /// Values per (tag, cylinder) at the given depth, constant along circles.
    Cylinders { depth: usize, values: Vec<Scalar> },
    Table(BlockTable),
}

fn zero() -> Scalar {
    Scalar::new(0.0, 0.0)
}

impl BlockFunction {
    pub(crate) fn from_raw(
        space: Arc<BlockSpace>,
        blocks: Vec<BlockTable>,
        head: Vec<Scalar>,
        limits: Vec<Scalar>,
    ) -> Self {
        let mut f = BlockFunction { space, blocks, head, limits };
        f.normalize();
        f
    }

    pub fn zero(space: &Arc<BlockSpace>) -> Self {
        let blocks = space.blocks.iter().map(|b| BlockTable::zeros(&b.shape, 0)).collect();
        BlockFunction::from_raw(space.clone(), blocks, Vec::new(), vec![zero(); space.limit_count()])
    }

    pub fn constant(space: &Arc<BlockSpace>, c: Scalar) -> Self {
        let mut f = Self::zero(space);
        for (t, b) in f.blocks.iter_mut().zip(&space.blocks) {
            set_constant(t, &b.shape, c);
        }
        f.limits = vec![c; space.limit_count()];
        f
    }

    /// Characteristic function of one block.
    pub fn block_indicator(space: &Arc<BlockSpace>, block: usize) -> Result<Self> {
        let shape = space.shape(block)?.clone();
        let mut f = Self::zero(space);
        set_constant(&mut f.blocks[block], &shape, re(1.0));
        // limit values identified with this block must follow
        for (k, l) in space.limits.iter().enumerate() {
            if let LimitPoint::Identified { block: b, .. } = l {
                if *b == block {
                    f.limits[k] = re(1.0);
                }
            }
        }
        Ok(f)
    }

    /// Characteristic function of the closure of the sequence, `𝒩 ∪ {∞_k}`.
    /// Only meaningful when every limit point is free.
    pub fn sequence_indicator(space: &Arc<BlockSpace>) -> Result<Self> {
        if space.limits.iter().any(|l| !matches!(l, LimitPoint::Free)) {
            return Err(Error::Structural("sequence closure meets a block".into()));
        }
        let mut f = Self::zero(space);
        f.limits = vec![re(1.0); space.limit_count()];
        Ok(f)
    }

    /// Indicator of the sequence point `n` (continuous since `n` is isolated).
    pub fn point_indicator(space: &Arc<BlockSpace>, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Structural("sequence points start at 1".into()));
        }
        let mut f = Self::zero(space);
        f.head = vec![zero(); n as usize];
        f.head[n as usize - 1] = re(1.0);
        Ok(f)
    }

    pub fn space(&self) -> &Arc<BlockSpace> {
        &self.space
    }

    pub fn field(&self) -> ScalarField {
        self.space.field
    }

    pub fn table(&self, block: usize) -> &BlockTable {
        &self.blocks[block]
    }

    pub fn head(&self) -> &[Scalar] {
        &self.head
    }

    pub fn limit_values(&self) -> &[Scalar] {
        &self.limits
    }

    /// Value at the sequence point `n ≥ 1`.
    pub fn seq_value(&self, n: u64) -> Scalar {
        if (n as usize) <= self.head.len() {
            self.head[n as usize - 1]
        } else {
            self.limits[(n % self.limits.len() as u64) as usize]
        }
    }

    pub fn eval(&self, x: &PointRef) -> Result<Scalar> {
        self.space.check_point(x)?;
        let v = match x {
            PointRef::Block { block, fiber } => self.blocks[*block].eval(&self.space.blocks[*block].shape, fiber),
            PointRef::Seq(n) => self.seq_value(*n),
            PointRef::Limit(k) => self.limits[*k],
        };
        Ok(self.project(v))
    }

    pub(crate) fn eval_block_unchecked(&self, block: usize, z: &Fiber) -> Scalar {
        self.project(self.blocks[block].eval(&self.space.blocks[block].shape, z))
    }

    fn project(&self, v: Scalar) -> Scalar {
        match self.space.field {
            ScalarField::Real => re(v.re),
            ScalarField::Complex => v,
        }
    }

    pub(crate) fn normalize(&mut self) {
        let n = self.limits.len() as u64;
        while let Some(&last) = self.head.last() {
            let idx = self.head.len() as u64;
            if last == self.limits[(idx % n) as usize] {
                self.head.pop();
            } else {
                break;
            }
        }
        for (t, b) in self.blocks.iter_mut().zip(&self.space.blocks) {
            *t = t.compress(&b.shape);
        }
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space {
            Ok(())
        } else {
            Err(Error::Domain("functions live on different spaces".into()))
        }
    }

    /// `a·f + b·g`.
    pub fn combine(a: Scalar, f: &Self, b: Scalar, g: &Self) -> Result<Self> {
        f.same_space(g)?;
        let blocks = f
            .blocks
            .iter()
            .zip(&g.blocks)
            .zip(&f.space.blocks)
            .map(|((tf, tg), desc)| {
                let d = tf.depth.max(tg.depth);
                let (lf, lg) = (tf.lift(&desc.shape, d), tg.lift(&desc.shape, d));
                let coeffs = lf.coeffs.iter().zip(&lg.coeffs).map(|(x, y)| a * x + b * y).collect();
                BlockTable { depth: d, coeffs }
            })
            .collect();
        let len = f.head.len().max(g.head.len());
        let head = (1..=len as u64).map(|n| a * f.seq_value(n) + b * g.seq_value(n)).collect();
        let limits = f.limits.iter().zip(&g.limits).map(|(x, y)| a * x + b * y).collect();
        Ok(BlockFunction::from_raw(f.space.clone(), blocks, head, limits))
    }

    pub fn scale(&self, a: Scalar) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|t| BlockTable { depth: t.depth, coeffs: t.coeffs.iter().map(|x| a * x).collect() })
            .collect();
        let head = self.head.iter().map(|x| a * x).collect();
        let limits = self.limits.iter().map(|x| a * x).collect();
        BlockFunction::from_raw(self.space.clone(), blocks, head, limits)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::combine(re(1.0), self, re(-1.0), other)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::combine(re(1.0), self, re(1.0), other)
    }

    /// Verify that identified limit values agree with the block values.
    pub fn check_glue(&self) -> Result<()> {
        for (k, l) in self.space.limits.iter().enumerate() {
            if let LimitPoint::Identified { block, fiber } = l {
                let v = self.eval_block_unchecked(*block, fiber);
                let lim = self.project(self.limits[k]);
                if (v - lim).norm() > GLUE_TOL * (1.0 + v.norm()) {
                    return Err(Error::Glue { index: k, limit: format!("{lim}"), block: format!("{v}") });
                }
            }
        }
        Ok(())
    }

    pub fn check_field(&self) -> Result<()> {
        if self.space.field == ScalarField::Complex {
            return Ok(());
        }
        let scalars_real =
            self.head.iter().chain(&self.limits).all(|z| z.im == 0.0);
        if !scalars_real {
            return Err(Error::Structural("REAL function has complex sequence values".into()));
        }
        for (t, desc) in self.blocks.iter().zip(&self.space.blocks) {
            let shape = &desc.shape;
            let modes = shape.modes();
            for cell in t.coeffs.chunks(modes) {
                for (i, c) in cell.iter().enumerate() {
                    let k: Vec<i64> = shape.multi_degree(i).iter().map(|x| -x).collect();
                    let j = shape.flat_degree(&k).expect("mirror mode in range");
                    let d = (cell[j] - c.conj()).norm();
                    if d > 1e-14 * (1.0 + c.norm()) {
                        return Err(Error::Structural("REAL function lacks conjugate symmetry".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Largest Fourier degree with a nonzero coefficient, per block.
    pub fn max_depth(&self) -> usize {
        self.blocks.iter().map(|t| t.depth).max().unwrap_or(0)
    }
}

fn set_constant(t: &mut BlockTable, shape: &BlockShape, c: Scalar) {
    *t = BlockTable::zeros(shape, 0);
    let k0 = shape.flat_degree(&vec![0; shape.circles]).expect("zero mode");
    let m = shape.modes();
    for cell in t.coeffs.chunks_mut(m) {
        cell[k0] = c;
    }
}

pub fn eval_function(f: &BlockFunction, x: &PointRef) -> Result<Scalar> {
    f.eval(x)
}

/// Result of a sup-norm computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupNorm {
    pub value: f64,
    /// True when some block needed grid sampling (circle factors present).
    pub sampled: bool,
}

/// Sup norm: exact on sequence, limit and cylinder values, grid-sampled and
/// locally refined on circle factors.
pub fn sup_norm(f: &BlockFunction, resolution: usize) -> f64 {
    sup_norm_detail(f, resolution).value
}

pub fn sup_norm_detail(f: &BlockFunction, resolution: usize) -> SupNorm {
    let resolution = resolution.max(2);
    let mut value = f.head.iter().chain(&f.limits).map(|z| f.project(*z).norm()).fold(0.0, f64::max);
    let mut sampled = false;
    for (t, desc) in f.blocks.iter().zip(&f.space.blocks) {
        let shape = &desc.shape;
        let modes = shape.modes();
        for cell in t.coeffs.chunks(modes) {
            let v = if shape.circles == 0 {
                f.project(cell[0]).norm()
            } else {
                sampled = true;
                trig_sup(cell, shape.circles, shape.degree, resolution)
            };
            value = value.max(v);
        }
    }
    SupNorm { value, sampled }
}

/// Build a function from per-block parts, validating truncation and glue.
pub fn assemble_block_function(
    space: &Arc<BlockSpace>,
    parts: Vec<BlockPart>,
    seq: Vec<Scalar>,
    limits: Vec<Scalar>,
) -> Result<BlockFunction> {
    if parts.len() < space.blocks.len() {
        return Err(Error::MissingBlock(space.blocks[parts.len()].id));
    }
    if parts.len() > space.blocks.len() {
        return Err(Error::Structural(format!("{} parts for {} blocks", parts.len(), space.blocks.len())));
    }
    if limits.len() != space.limit_count() {
        return Err(Error::Structural(format!(
            "{} limit values for {} limit points",
            limits.len(),
            space.limit_count()
        )));
    }
    let mut tables = Vec::with_capacity(parts.len());
    for (part, desc) in parts.into_iter().zip(&space.blocks) {
        let shape = &desc.shape;
        let table = match part {
            BlockPart::Constant(c) => {
                let mut t = BlockTable::zeros(shape, 0);
                set_constant(&mut t, shape, c);
                t
            }
            BlockPart::Modes(modes) => {
                let mut t = BlockTable::zeros(shape, 0);
                for (k, c) in modes {
                    if k.len() != shape.circles {
                        return Err(Error::Structural(format!(
                            "mode {:?} has wrong arity for block {}",
                            k, desc.id
                        )));
                    }
                    let j = shape.flat_degree(&k).ok_or_else(|| {
                        Error::Truncation(format!("mode {:?} exceeds degree {} on block {}", k, shape.degree, desc.id))
                    })?;
                    for cell in t.coeffs.chunks_mut(shape.modes()) {
                        cell[j] += c;
                    }
                }
                t
            }
            BlockPart::Cylinders { depth, values } => {
                let depth = if shape.cantor.is_some() { depth } else { 0 };
                let cells = shape.tags * shape.cylinders(depth);
                if values.len() != cells {
                    return Err(Error::Truncation(format!(
                        "block {} expects {} cylinder values, got {}",
                        desc.id,
                        cells,
                        values.len()
                    )));
                }
                let mut t = BlockTable::zeros(shape, depth);
                let k0 = shape.flat_degree(&vec![0; shape.circles]).expect("zero mode");
                for (cell, v) in t.coeffs.chunks_mut(shape.modes()).zip(values) {
                    cell[k0] = v;
                }
                t
            }
            BlockPart::Table(t) => {
                if t.coeffs.len() != t.expected_len(shape) {
                    return Err(Error::Truncation(format!(
                        "block {} table has {} coefficients, expected {}",
                        desc.id,
                        t.coeffs.len(),
                        t.expected_len(shape)
                    )));
                }
                t
            }
        };
        tables.push(table);
    }
    let f = BlockFunction::from_raw(space.clone(), tables, seq, limits);
    f.check_field()?;
    f.check_glue()?;
    Ok(f)
}
