use super::homeo::Homeo;
use super::orbit::{Resolution, TransitiveSeed};
use crate::funcspace::{CantorPoint, Fiber};
use crate::{Error, Result};

/// One scheduled word: `word` is written at coordinates `start..start+len`
/// where `start − 1 ≡ residue (mod modulus)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub residue: i64,
    pub modulus: u64,
    pub word: Vec<u8>,
    pub start: i64,
}

/// Positive half of the constructed transitive point.
#[derive(Clone, Debug)]
pub struct ShiftSchedule {
    pub alphabet: u8,
    /// Every shell up to this depth is fully placed.
    pub depth: usize,
    pub placements: Vec<Placement>,
    /// Coordinates `1..=letters.len()`; everything else holds the fill letter.
    pub letters: Vec<u8>,
    pub fill: u8,
}

impl ShiftSchedule {
    pub fn point(&self) -> CantorPoint {
        CantorPoint::from_window(self.alphabet, &self.letters, 1, self.fill).expect("letters checked at build")
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// All words of length `len` over the first `letters` symbols, in lexicographic order.
fn words(len: usize, letters: u8) -> impl Iterator<Item = Vec<u8>> {
    let total = (letters as usize).pow(len as u32);
    (0..total).map(move |mut idx| {
        let mut w = vec![0u8; len];
        for slot in w.iter_mut().rev() {
            *slot = (idx % letters as usize) as u8;
            idx /= letters as usize;
        }
        w
    })
}

/// Items `(r, q, j)` of shell `h`: those with `max(|r| + 1, q, j) = h`.
fn shell(h: usize) -> Vec<(i64, u64, usize)> {
    let hi = h as i64;
    let mut out = Vec::new();
    for j in 1..=h {
        for q in 1..=h as u64 {
            for r in -(hi - 1)..=(hi - 1) {
                if (r.unsigned_abs() as usize + 1).max(q as usize).max(j) == h {
                    out.push((r, q, j));
                }
            }
        }
    }
    out
}

/// Place the shells `1..=depth` of the diagonal enumeration of
/// `ℤ × ℕ × {words}`. A word of length `j` uses the first `min(j, p)` letters.
/// Fails when the schedule would need more than `budget` coordinates.
pub fn bilateral_schedule(alphabet: u8, depth: usize, budget: usize) -> Result<ShiftSchedule> {
    if alphabet < 2 {
        return Err(Error::InvalidParameter(format!("alphabet size {alphabet} < 2")));
    }
    if budget < 1 {
        return Err(Error::InvalidParameter("schedule budget must be positive".into()));
    }
    let fill = 0u8;
    let mut letters: Vec<u8> = Vec::new();
    let mut placements = Vec::new();
    let mut end: i64 = 0;
    for h in 1..=depth {
        for (r, q, j) in shell(h) {
            let used = (j as u8).min(alphabet);
            for word in words(j, used) {
                let qi = q as i64;
                let n = end + (r - end).rem_euclid(qi);
                let stop = n + j as i64;
                if stop as usize > budget {
                    return Err(Error::Capacity { requested: depth, achieved: h - 1 });
                }
                letters.resize(stop as usize, fill);
                letters[n as usize..stop as usize].copy_from_slice(&word);
                placements.push(Placement { residue: r, modulus: q, word, start: n + 1 });
                end = stop;
            }
        }
    }
    Ok(ShiftSchedule { alphabet, depth, placements, letters, fill })
}

/// Bilateral shift on `{0,…,p−1}^ℤ` with the transitive point built from
/// [`bilateral_schedule`]; the seed is certified at cylinder depth `depth`.
pub fn make_bilateral_shift(alphabet: u8, depth: usize, budget: usize) -> Result<(Homeo, TransitiveSeed)> {
    let schedule = bilateral_schedule(alphabet, depth, budget)?;
    let flow = Homeo::SymbolShift { alphabet };
    let base = Fiber::cantor(schedule.point());
    let (seed, _) = TransitiveSeed::certify(flow.clone(), base, Resolution::cylinders(depth), schedule.len() as u64 + 1);
    Ok((flow, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_partition_items() {
        let mut all: Vec<_> = (1..=4).flat_map(shell).collect();
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
        // 7 residues × 4 moduli × 4 lengths
        assert_eq!(n, 7 * 4 * 4);
    }

    #[test]
    fn placements_respect_residues() {
        let s = bilateral_schedule(2, 3, 1 << 20).unwrap();
        for pl in &s.placements {
            let n = pl.start - 1;
            assert_eq!((n - pl.residue).rem_euclid(pl.modulus as i64), 0);
            let got = &s.letters[(pl.start - 1) as usize..(pl.start - 1) as usize + pl.word.len()];
            assert_eq!(got, &pl.word[..]);
        }
    }

    #[test]
    fn small_budget_reports_achieved_depth() {
        match bilateral_schedule(2, 4, 50) {
            Err(Error::Capacity { requested, achieved }) => {
                assert_eq!(requested, 4);
                assert!(achieved < 4);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }
}
