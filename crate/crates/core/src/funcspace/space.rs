use serde::{Deserialize, Serialize};

use super::cantor::CantorPoint;
use crate::{Error, Result, ScalarField, TAU};

/// Factor structure of one block: `tags × (Cantor factor) × 𝕋^circles`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockShape {
    /// Number of circle factors.
    pub circles: usize,
    /// Fourier truncation degree M, shared by all circle factors.
    pub degree: usize,
    /// Alphabet size of the Cantor factor, if present.
    pub cantor: Option<u8>,
    /// Default cylinder depth used when generating functions.
    pub cantor_depth: usize,
    /// Size of the finite discrete factor (1 when absent).
    pub tags: usize,
}

impl BlockShape {
    pub fn torus(circles: usize, degree: usize) -> Self {
        BlockShape { circles, degree, cantor: None, cantor_depth: 0, tags: 1 }
    }

    pub fn cantor(p: u8, depth: usize) -> Self {
        BlockShape { circles: 0, degree: 0, cantor: Some(p), cantor_depth: depth, tags: 1 }
    }

    pub fn with_tags(mut self, tags: usize) -> Self {
        self.tags = tags;
        self
    }

    /// Number of Fourier modes per (tag, cylinder) cell.
    pub fn modes(&self) -> usize {
        (2 * self.degree + 1).pow(self.circles as u32)
    }

    /// Number of cylinders at the given depth (1 without a Cantor factor).
    pub fn cylinders(&self, depth: usize) -> usize {
        match self.cantor {
            Some(p) => (p as usize).pow(depth as u32),
            None => 1,
        }
    }

    /// Integer multi-degree of the flat Fourier index.
    pub fn multi_degree(&self, mut index: usize) -> Vec<i64> {
        let w = 2 * self.degree + 1;
        (0..self.circles)
            .map(|_| {
                let k = (index % w) as i64 - self.degree as i64;
                index /= w;
                k
            })
            .collect()
    }

    pub fn flat_degree(&self, k: &[i64]) -> Option<usize> {
        let w = (2 * self.degree + 1) as i64;
        let mut acc = 0i64;
        for &kj in k.iter().rev() {
            if kj.unsigned_abs() as usize > self.degree {
                return None;
            }
            acc = acc * w + kj + self.degree as i64;
        }
        Some(acc as usize)
    }

    /// Point of this block with all coordinates at their origin.
    pub fn origin(&self) -> Fiber {
        Fiber {
            tag: 0,
            cantor: self.cantor.map(CantorPoint::zero),
            angles: vec![0.0; self.circles],
        }
    }

    pub fn check_fiber(&self, z: &Fiber) -> Result<()> {
        if z.angles.len() != self.circles {
            return Err(Error::Structural(format!(
                "fiber has {} angles, block has {} circle factors",
                z.angles.len(),
                self.circles
            )));
        }
        if z.tag >= self.tags {
            return Err(Error::Structural(format!("tag {} outside 0..{}", z.tag, self.tags)));
        }
        match (&z.cantor, self.cantor) {
            (None, None) => Ok(()),
            (Some(x), Some(p)) if x.alphabet() == p => Ok(()),
            _ => Err(Error::Structural("Cantor coordinate does not match block".into())),
        }
    }
}

/// Coordinates of a point inside one block.
#[derive(Clone, Debug, PartialEq)]
pub struct Fiber {
    pub tag: usize,
    pub cantor: Option<CantorPoint>,
    /// Angles in `[0, 2π)`, one per circle factor.
    pub angles: Vec<f64>,
}

impl Fiber {
    pub fn angles(angles: Vec<f64>) -> Self {
        Fiber { tag: 0, cantor: None, angles }
    }

    pub fn cantor(x: CantorPoint) -> Self {
        Fiber { tag: 0, cantor: Some(x), angles: Vec::new() }
    }
}

pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

pub(crate) fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Distance between fibers of the same block: maximum over factors, with the
/// ultrametric `p^{−k}` on the Cantor factor; infinite across tags.
pub fn fiber_distance(a: &Fiber, b: &Fiber, cantor_cap: usize) -> f64 {
    if a.tag != b.tag {
        return f64::INFINITY;
    }
    let mut d = a
        .angles
        .iter()
        .zip(&b.angles)
        .map(|(x, y)| circle_distance(*x, *y))
        .fold(0.0, f64::max);
    if let (Some(x), Some(y)) = (&a.cantor, &b.cantor) {
        d = d.max(x.distance(y, cantor_cap));
    }
    d
}

/// Address of a point of the space.
#[derive(Clone, Debug, PartialEq)]
pub enum PointRef {
    /// Block index (0-based position in the block list) and fiber coordinates.
    Block { block: usize, fiber: Fiber },
    /// Sequence point `n ≥ 1`; `n = 1` is the isolated point `𝟏`.
    Seq(u64),
    /// Limit point `∞_k`.
    Limit(usize),
}

impl PointRef {
    pub fn block(block: usize, fiber: Fiber) -> Self {
        PointRef::Block { block, fiber }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LimitPoint {
    Free,
    /// Identified with a point of a block.
    Identified { block: usize, fiber: Fiber },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockDescriptor {
    /// Block id `m ∈ {1,…,|blocks|}`.
    pub id: usize,
    pub label: String,
    pub shape: BlockShape,
}

/// Topological sum of blocks, the sequence `𝒩` and its limit points.
///
/// Sequence point `n` converges to `∞_{n mod N}` where `N` is the number of
/// limit points.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpace {
    pub blocks: Vec<BlockDescriptor>,
    pub sequence_len: usize,
    pub limits: Vec<LimitPoint>,
    pub field: ScalarField,
}

pub const DEFAULT_DEGREE: usize = 16;
pub const DEFAULT_CANTOR_DEPTH: usize = 10;
pub const DEFAULT_SEQUENCE_LEN: usize = 256;
pub const DEFAULT_RESOLUTION: usize = 1 << 12;

impl BlockSpace {
    pub fn new(
        shapes: Vec<(String, BlockShape)>,
        sequence_len: usize,
        limits: Vec<LimitPoint>,
        field: ScalarField,
    ) -> Result<Self> {
        if sequence_len < 1 {
            return Err(Error::InvalidParameter("sequence_len must be at least 1".into()));
        }
        if limits.is_empty() {
            return Err(Error::InvalidParameter("at least one limit point is required".into()));
        }
        let blocks: Vec<BlockDescriptor> = shapes
            .into_iter()
            .enumerate()
            .map(|(i, (label, shape))| BlockDescriptor { id: i + 1, label, shape })
            .collect();
        for b in &blocks {
            if b.shape.tags == 0 {
                return Err(Error::InvalidParameter(format!("block {} has no tags", b.id)));
            }
            if let Some(p) = b.shape.cantor {
                if p < 2 {
                    return Err(Error::InvalidParameter(format!("block {} alphabet {p} < 2", b.id)));
                }
            }
        }
        let space = BlockSpace { blocks, sequence_len, limits, field };
        for (k, l) in space.limits.iter().enumerate() {
            if let LimitPoint::Identified { block, fiber } = l {
                let shape = space
                    .shape(*block)
                    .map_err(|_| Error::Structural(format!("limit point {k} refers to missing block {block}")))?;
                shape.check_fiber(fiber)?;
            }
        }
        Ok(space)
    }

    pub fn shape(&self, block: usize) -> Result<&BlockShape> {
        self.blocks
            .get(block)
            .map(|b| &b.shape)
            .ok_or_else(|| Error::Structural(format!("block index {block} out of range")))
    }

    pub fn limit_count(&self) -> usize {
        self.limits.len()
    }

    pub fn check_point(&self, x: &PointRef) -> Result<()> {
        match x {
            PointRef::Block { block, fiber } => self.shape(*block)?.check_fiber(fiber),
            PointRef::Seq(n) if *n >= 1 => Ok(()),
            PointRef::Seq(_) => Err(Error::Structural("sequence points start at 1".into())),
            PointRef::Limit(k) if *k < self.limits.len() => Ok(()),
            PointRef::Limit(k) => Err(Error::Structural(format!("limit point {k} does not exist"))),
        }
    }
}
