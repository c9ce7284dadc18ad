use super::homeo::Homeo;
use crate::funcspace::{BlockSpace, Fiber, PointRef};
use crate::{Error, Result};

/// `φ(b, z) = (target, fiber(z))` on one block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMove {
    pub target: usize,
    pub fiber: Homeo,
}

/// Homeomorphism `φ : X∖{𝟏} → X` assembled from block moves, the sequence
/// shift `n+1 ↦ n`, and the cyclic limit action `∞_k ↦ ∞_{k−1 mod N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AssembledMap {
    moves: Vec<BlockMove>,
    preimage: Vec<usize>,
    limit_count: usize,
}

/// Moves of one cyclic block family: `χ(a_j, z) = (s(a_j), h⁻¹(z))` where
/// `s(a_1) = a_p` and `s(a_j) = a_{j−1}`. `blocks` lists `a_1,…,a_p`.
pub fn cyclic_block_moves(blocks: &[usize], h: &Homeo) -> Vec<(usize, BlockMove)> {
    let p = blocks.len();
    let inner = h.inverse();
    blocks
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            let target = if j == 0 { blocks[p - 1] } else { blocks[j - 1] };
            (b, BlockMove { target, fiber: inner.clone() })
        })
        .collect()
}

impl AssembledMap {
    pub fn new(space: &BlockSpace, moves: Vec<BlockMove>) -> Result<Self> {
        let n = space.blocks.len();
        if moves.len() != n {
            return Err(Error::Structural(format!("{} moves for {} blocks", moves.len(), n)));
        }
        let mut preimage = vec![usize::MAX; n];
        for (b, mv) in moves.iter().enumerate() {
            if mv.target >= n {
                return Err(Error::Structural(format!("block {b} maps to missing block {}", mv.target)));
            }
            if preimage[mv.target] != usize::MAX {
                return Err(Error::Structural(format!("block {} has two preimages", mv.target)));
            }
            preimage[mv.target] = b;
            let (src, dst) = (&space.blocks[b].shape, &space.blocks[mv.target].shape);
            if src != dst {
                return Err(Error::Domain(format!("block {b} and its image {} differ in shape", mv.target)));
            }
            mv.fiber.check_domain(src)?;
        }
        Ok(AssembledMap { moves, preimage, limit_count: space.limit_count() })
    }

    pub fn moves(&self) -> &[BlockMove] {
        &self.moves
    }

    pub fn block_move(&self, block: usize) -> &BlockMove {
        &self.moves[block]
    }

    /// Block mapped onto `block`.
    pub fn preimage_block(&self, block: usize) -> usize {
        self.preimage[block]
    }

    pub fn limit_count(&self) -> usize {
        self.limit_count
    }

    pub fn forward(&self, x: &PointRef) -> Result<PointRef> {
        match x {
            PointRef::Block { block, fiber } => {
                let mv = self
                    .moves
                    .get(*block)
                    .ok_or_else(|| Error::Structural(format!("block {block} out of range")))?;
                Ok(PointRef::Block { block: mv.target, fiber: mv.fiber.forward(fiber) })
            }
            PointRef::Seq(1) => Err(Error::Domain("φ is not defined at the isolated point 𝟏".into())),
            PointRef::Seq(0) => Err(Error::Structural("sequence points start at 1".into())),
            PointRef::Seq(n) => Ok(PointRef::Seq(n - 1)),
            PointRef::Limit(k) => {
                let n = self.limit_count;
                Ok(PointRef::Limit((k + n - 1) % n))
            }
        }
    }

    pub fn backward(&self, x: &PointRef) -> Result<PointRef> {
        match x {
            PointRef::Block { block, fiber } => {
                let b = *self
                    .preimage
                    .get(*block)
                    .ok_or_else(|| Error::Structural(format!("block {block} out of range")))?;
                Ok(PointRef::Block { block: b, fiber: self.moves[b].fiber.backward(fiber) })
            }
            PointRef::Seq(0) => Err(Error::Structural("sequence points start at 1".into())),
            PointRef::Seq(n) => Ok(PointRef::Seq(n + 1)),
            PointRef::Limit(k) => Ok(PointRef::Limit((k + 1) % self.limit_count)),
        }
    }

    /// Cycles of the block permutation, each listed from its smallest block.
    pub fn block_cycles(&self) -> Vec<Vec<usize>> {
        let n = self.moves.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut b = start;
            while !seen[b] {
                seen[b] = true;
                cycle.push(b);
                b = self.moves[b].target;
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Visit the orbit `φ^{±j}(b, z)`, `j = 1..=count`, in the given direction.
    pub fn orbit(&self, block: usize, z: &Fiber, forward: bool, count: u64, visit: &mut dyn FnMut(usize, &Fiber)) {
        let mv = &self.moves[block];
        if mv.target == block {
            let h = if forward { mv.fiber.clone() } else { mv.fiber.inverse() };
            h.orbit(z, 1, count, &mut |_, y| {
                visit(block, y);
                true
            });
            return;
        }
        let mut b = block;
        let mut y = z.clone();
        for _ in 0..count {
            if forward {
                let m = &self.moves[b];
                y = m.fiber.forward(&y);
                b = m.target;
            } else {
                let pb = self.preimage[b];
                y = self.moves[pb].fiber.backward(&y);
                b = pb;
            }
            visit(b, &y);
        }
    }
}
