use serde::{Deserialize, Serialize};

use super::homeo::Homeo;
use crate::funcspace::space::circle_distance;
use crate::funcspace::Fiber;
use crate::TAU;

/// Scale at which orbits are compared: angular radius on circle factors and
/// cylinder depth (shared leading p-adic digits) on the Cantor factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub eps: f64,
    pub depth: usize,
}

impl Resolution {
    pub fn angle(eps: f64) -> Self {
        Resolution { eps, depth: 0 }
    }

    pub fn cylinders(depth: usize) -> Self {
        Resolution { eps: TAU, depth }
    }

    /// Angular `eps` and the cylinder depth of radius `eps` in the metric `p^{−k}`.
    pub fn from_eps(eps: f64, p: u8) -> Self {
        let depth = ((1.0 / eps).ln() / (p as f64).ln()).ceil().max(0.0) as usize;
        Resolution { eps, depth }
    }
}

/// Whether `x` lies within the resolution of `y`.
pub fn approaches(x: &Fiber, y: &Fiber, res: Resolution) -> bool {
    if x.tag != y.tag {
        return false;
    }
    if x.angles.iter().zip(&y.angles).any(|(a, b)| circle_distance(*a, *b) > res.eps) {
        return false;
    }
    match (&x.cantor, &y.cantor) {
        (Some(a), Some(b)) => a.agreement(b, res.depth) == res.depth,
        _ => true,
    }
}

/// Uniform probes on `tags × cylinders(depth) × 𝕋^c`, spaced `eps/2` on circles.
#[derive(Clone, Debug)]
pub struct ProbeGrid {
    pub tags: usize,
    pub cylinders: usize,
    pub alphabet: Option<u8>,
    pub circles: usize,
    pub per_axis: usize,
    pub res: Resolution,
}

impl ProbeGrid {
    pub fn new(tags: usize, alphabet: Option<u8>, circles: usize, res: Resolution) -> Self {
        let per_axis = if circles == 0 { 1 } else { (TAU / (0.5 * res.eps)).ceil().max(1.0) as usize };
        let cylinders = alphabet.map_or(1, |p| (p as usize).pow(res.depth as u32));
        ProbeGrid { tags, cylinders, alphabet, circles, per_axis, res }
    }

    pub fn len(&self) -> usize {
        self.tags * self.cylinders * self.per_axis.pow(self.circles as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Probes within resolution of `z`, with their angular distance.
    pub fn hits(&self, z: &Fiber, out: &mut Vec<(usize, f64)>) {
        out.clear();
        if z.tag >= self.tags {
            return;
        }
        let cyl = match (&z.cantor, self.alphabet) {
            (Some(x), Some(_)) => x.prefix_index(self.res.depth),
            _ => 0,
        };
        let base = (z.tag * self.cylinders + cyl) * self.per_axis.pow(self.circles as u32);
        if self.circles == 0 {
            out.push((base, 0.0));
            return;
        }
        let n = self.per_axis as i64;
        let h = TAU / self.per_axis as f64;
        let axes: Vec<Vec<(usize, f64)>> = z
            .angles
            .iter()
            .take(self.circles)
            .map(|&theta| {
                let lo = ((theta - self.res.eps) / h).ceil() as i64;
                let hi = ((theta + self.res.eps) / h).floor() as i64;
                let mut v = Vec::new();
                for j in lo..=hi.min(lo + n - 1) {
                    let jj = j.rem_euclid(n);
                    let d = circle_distance(theta, jj as f64 * h);
                    if d <= self.res.eps {
                        v.push((jj as usize, d));
                    }
                }
                v
            })
            .collect();
        let mut idx = vec![0usize; self.circles];
        if axes.iter().any(|a| a.is_empty()) {
            return;
        }
        loop {
            let mut pos = 0usize;
            let mut stride = 1usize;
            let mut d: f64 = 0.0;
            for (a, &i) in axes.iter().zip(&idx) {
                pos += a[i].0 * stride;
                d = d.max(a[i].1);
                stride *= self.per_axis;
            }
            out.push((base + pos, d));
            let mut ax = 0;
            loop {
                if ax == self.circles {
                    return;
                }
                idx[ax] += 1;
                if idx[ax] < axes[ax].len() {
                    break;
                }
                idx[ax] = 0;
                ax += 1;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub resolution: Resolution,
    pub power: u64,
    pub budget: u64,
    pub probes: usize,
    pub hits: usize,
    pub coverage: f64,
    pub iterations_used: u64,
    pub certified: bool,
    /// Largest distance from a probe to its nearest observed orbit point,
    /// when every probe was hit.
    pub eps_achieved: Option<f64>,
    pub first_hits: Vec<Option<u64>>,
    /// Coverage fraction against iteration count.
    pub curve: Vec<(u64, f64)>,
}

/// Scan `Orb⁺(flow^k, start)` for `budget` steps against the probe grid.
pub fn orbit_density(flow: &Homeo, start: &Fiber, res: Resolution, budget: u64, k: u64) -> OrbitReport {
    let alphabet = start.cantor.as_ref().map(|x| x.alphabet());
    let grid = ProbeGrid::new(flow.tag_modulus().max(start.tag + 1), alphabet, start.angles.len(), res);
    let n = grid.len();
    let mut first = vec![None; n];
    let mut best = vec![f64::INFINITY; n];
    let mut hits = 0usize;
    let mut used = budget;
    let mut curve = Vec::new();
    let mut next_mark = 1u64;
    let mut buf = Vec::new();
    flow.orbit(start, k as i64, budget, &mut |j, z| {
        grid.hits(z, &mut buf);
        for &(i, d) in &buf {
            if first[i].is_none() {
                first[i] = Some(j);
                hits += 1;
            }
            best[i] = best[i].min(d);
        }
        let done = hits == n;
        if j == next_mark || done {
            curve.push((j, hits as f64 / n.max(1) as f64));
            next_mark = next_mark.saturating_mul(2);
        }
        if done {
            used = j;
        }
        !done
    });
    if curve.last().map(|c| c.0) != Some(used) {
        curve.push((used, hits as f64 / n.max(1) as f64));
    }
    let certified = hits == n;
    OrbitReport {
        resolution: res,
        power: k,
        budget,
        probes: n,
        hits,
        coverage: hits as f64 / n.max(1) as f64,
        iterations_used: used,
        certified,
        eps_achieved: certified.then(|| best.iter().cloned().fold(0.0, f64::max)),
        first_hits: first,
        curve,
    }
}

/// A flow with a base point whose forward orbit was certified dense at the
/// recorded resolution using `budget` iterations.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitiveSeed {
    pub flow: Homeo,
    pub base: Fiber,
    pub resolution: Resolution,
    pub budget: u64,
    pub certified: bool,
}

impl TransitiveSeed {
    pub fn certify(flow: Homeo, base: Fiber, res: Resolution, budget: u64) -> (Self, OrbitReport) {
        let report = orbit_density(&flow, &base, res, budget, 1);
        let seed = TransitiveSeed {
            flow,
            base,
            resolution: res,
            budget: report.iterations_used,
            certified: report.certified,
        };
        (seed, report)
    }

    /// Seed recorded without running a certification.
    pub fn uncertified(flow: Homeo, base: Fiber) -> Self {
        TransitiveSeed { flow, base, resolution: Resolution::angle(TAU), budget: 0, certified: false }
    }

    /// Transport along `ψ`: the seed of `ψ⁻¹ ∘ φ ∘ ψ` is `ψ⁻¹(w)`.
    pub fn conjugate(&self, psi: &Homeo) -> Self {
        TransitiveSeed {
            flow: super::homeo::conjugate_flow(psi.clone(), self.flow.clone()),
            base: psi.backward(&self.base),
            resolution: self.resolution,
            budget: self.budget,
            certified: self.certified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LTransitivityEntry {
    pub k: u64,
    pub i: u64,
    pub first_hit: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LTransitivityReport {
    pub resolution: Resolution,
    pub budget: u64,
    pub horizon: u64,
    pub entries: Vec<LTransitivityEntry>,
    pub passed: bool,
}

/// For each `k ∈ L` and `i ≤ horizon`, search `j ∈ 1..=budget` with
/// `(h_n^{kj}(1_n))_n` within resolution of `(h_n^i(1_n))_n`.
pub fn certify_l_transitivity(
    family: &[TransitiveSeed],
    l: &[u64],
    res: Resolution,
    budget: u64,
    horizon: u64,
) -> LTransitivityReport {
    let mut entries = Vec::new();
    for &k in l {
        let targets: Vec<Vec<Fiber>> = (0..=horizon)
            .map(|i| family.iter().map(|s| s.flow.iterate(&s.base, i as i64)).collect())
            .collect();
        let mut found: Vec<Option<u64>> = vec![None; targets.len()];
        let mut open = targets.len();
        let mut current: Vec<Fiber> = family.iter().map(|s| s.base.clone()).collect();
        for j in 1..=budget {
            if open == 0 || family.is_empty() {
                break;
            }
            for (x, s) in current.iter_mut().zip(family) {
                *x = s.flow.iterate(x, k as i64);
            }
            for (t, slot) in targets.iter().zip(found.iter_mut()) {
                if slot.is_none() && current.iter().zip(t).all(|(x, y)| approaches(x, y, res)) {
                    *slot = Some(j);
                    open -= 1;
                }
            }
        }
        for (i, hit) in found.into_iter().enumerate() {
            entries.push(LTransitivityEntry { k, i: i as u64, first_hit: hit });
        }
    }
    let passed = !family.is_empty() && !l.is_empty() && entries.iter().all(|e| e.first_hit.is_some());
    LTransitivityReport { resolution: res, budget, horizon, entries, passed }
}
