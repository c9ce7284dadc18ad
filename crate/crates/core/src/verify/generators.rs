use serde::{Deserialize, Serialize};

use crate::dynamics::{ProbeGrid, Resolution};
use crate::funcspace::{Fiber, LimitPoint};
use crate::shiftop::ShiftOperator;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorEstimate {
    /// Number of block cycles of `φ`; an orbit never leaves its cycle.
    pub lower: usize,
    /// Number of orbits picked by the greedy cover.
    pub upper: usize,
    /// Chosen seeds as `(block, tag, angles)`; Cantor coordinates omitted.
    pub seeds: Vec<(usize, usize, Vec<f64>)>,
    pub eps: f64,
    pub budget: u64,
    pub probes: usize,
    pub covered: usize,
    /// Every probe was covered by the chosen orbits.
    pub complete: bool,
}

/// Greedy cover of `X ∖ cl(𝒩)` by full `φ`-orbits of the candidate points,
/// each followed `budget` steps in both directions and compared with a
/// probe grid at resolution `eps` on every block.
pub fn estimate_generators(op: &ShiftOperator, candidates: &[(usize, Fiber)], eps: f64, budget: u64) -> Result<GeneratorEstimate> {
    let space = op.space();
    let map = op.map();
    for (b, z) in candidates {
        space.shape(*b)?.check_fiber(z)?;
        let on_limit = space.limits.iter().any(|l| match l {
            LimitPoint::Identified { block, fiber } => {
                block == b && fiber.tag == z.tag && match (&fiber.cantor, &z.cantor) {
                    (Some(x), Some(y)) => x.same_point(y),
                    _ => fiber.angles == z.angles,
                }
            }
            LimitPoint::Free => false,
        });
        if on_limit {
            return Err(Error::Precondition(format!("candidate on block {b} lies in the closure of the sequence")));
        }
    }
    let grids: Vec<ProbeGrid> = space
        .blocks
        .iter()
        .map(|d| {
            let s = &d.shape;
            ProbeGrid::new(s.tags, s.cantor, s.circles, Resolution::from_eps(eps, s.cantor.unwrap_or(2)))
        })
        .collect();
    let mut offsets = Vec::with_capacity(grids.len());
    let mut total = 0;
    for g in &grids {
        offsets.push(total);
        total += g.len();
    }
    let mut buf = Vec::new();
    let covers: Vec<Vec<bool>> = candidates
        .iter()
        .map(|(b, z)| {
            let mut hit = vec![false; total];
            let mut mark = |blk: usize, y: &Fiber| {
                grids[blk].hits(y, &mut buf);
                for (i, _) in &buf {
                    hit[offsets[blk] + i] = true;
                }
            };
            mark(*b, z);
            map.orbit(*b, z, true, budget, &mut mark);
            map.orbit(*b, z, false, budget, &mut mark);
            hit
        })
        .collect();
    let mut covered = vec![false; total];
    let mut count = 0;
    let mut chosen: Vec<usize> = Vec::new();
    loop {
        let best = covers
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(i, c)| (i, c.iter().zip(&covered).filter(|(h, done)| **h && !**done).count()))
            .max_by_key(|(i, gain)| (*gain, usize::MAX - i));
        match best {
            Some((i, gain)) if gain > 0 => {
                for (c, h) in covered.iter_mut().zip(&covers[i]) {
                    *c |= *h;
                }
                count += gain;
                chosen.push(i);
            }
            _ => break,
        }
        if count == total {
            break;
        }
    }
    if chosen.is_empty() && total > 0 {
        return Err(Error::Budget("no candidate orbit reached any probe".into()));
    }
    Ok(GeneratorEstimate {
        lower: map.block_cycles().len(),
        upper: chosen.len(),
        seeds: chosen.iter().map(|&i| (candidates[i].0, candidates[i].1.tag, candidates[i].1.angles.clone())).collect(),
        eps,
        budget,
        probes: total,
        covered: count,
        complete: count == total,
    })
}
