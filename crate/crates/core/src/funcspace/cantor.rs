//! Points of the Cantor factor.
//!
//! A point is a bi-infinite sequence `x ∈ {0,…,p−1}^ℤ` that is eventually
//! periodic in both directions. The same point is read as a p-adic integer
//! through the interleaving `t_{2j} = x_j`, `t_{2j+1} = x_{−j−1}`, so the
//! bilateral shift and p-adic translations both act exactly.

use std::sync::Arc;

use crate::{Error, Result};

const MAX_PATCH_DEPTH: usize = 12;

#[derive(Debug)]
enum Layer {
    Base { core: Vec<u8>, start: i64, left: Vec<u8>, right: Vec<u8> },
    Patch { lo: i64, values: Vec<u8>, below: Arc<Layer>, depth: usize },
}

impl Layer {
    fn at(&self, m: i64) -> u8 {
        let mut layer = self;
        loop {
            match layer {
                Layer::Base { core, start, left, right } => {
                    let rel = m - start;
                    return if rel < 0 {
                        left[m.rem_euclid(left.len() as i64) as usize]
                    } else if rel >= core.len() as i64 {
                        right[m.rem_euclid(right.len() as i64) as usize]
                    } else {
                        core[rel as usize]
                    };
                }
                Layer::Patch { lo, values, below, .. } => {
                    let rel = m - lo;
                    if rel >= 0 && rel < values.len() as i64 {
                        return values[rel as usize];
                    }
                    layer = below;
                }
            }
        }
    }

    fn extent(&self) -> (i64, i64) {
        match self {
            Layer::Base { core, start, .. } => (*start, start + core.len() as i64),
            Layer::Patch { lo, values, below, .. } => {
                let (a, b) = below.extent();
                (a.min(*lo), b.max(lo + values.len() as i64))
            }
        }
    }

    fn cycles(&self) -> (&[u8], &[u8]) {
        match self {
            Layer::Base { left, right, .. } => (left, right),
            Layer::Patch { below, .. } => below.cycles(),
        }
    }

    fn depth(&self) -> usize {
        match self {
            Layer::Base { .. } => 0,
            Layer::Patch { depth, .. } => *depth,
        }
    }
}

/// A point of `{0,…,p−1}^ℤ ≅ ℤ_p` with eventually periodic coordinates.
#[derive(Clone, Debug)]
pub struct CantorPoint {
    p: u8,
    layer: Arc<Layer>,
    offset: i64,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Sequence coordinate holding p-adic digit `i`.
pub fn digit_coordinate(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        (i / 2) as i64
    } else {
        -(i.div_ceil(2) as i64)
    }
}

/// p-adic digit index stored at sequence coordinate `m`.
pub fn coordinate_digit(m: i64) -> usize {
    if m >= 0 {
        (2 * m) as usize
    } else {
        (-2 * m - 1) as usize
    }
}

impl CantorPoint {
    fn check_alphabet(p: u8) -> Result<()> {
        if p < 2 {
            return Err(Error::InvalidParameter(format!("alphabet size {p} < 2")));
        }
        Ok(())
    }

    fn check_letters(p: u8, letters: &[u8]) -> Result<()> {
        if let Some(bad) = letters.iter().find(|&&d| d >= p) {
            return Err(Error::InvalidParameter(format!("letter {bad} outside alphabet of size {p}")));
        }
        Ok(())
    }

    /// The constant sequence `c̄`.
    pub fn constant(p: u8, c: u8) -> Result<Self> {
        Self::check_alphabet(p)?;
        Self::check_letters(p, &[c])?;
        Ok(Self::from_base(p, Vec::new(), 0, vec![c], vec![c]))
    }

    /// The all-zero point, fixed by the shift and the p-adic zero.
    pub fn zero(p: u8) -> Self {
        Self::from_base(p, Vec::new(), 0, vec![0], vec![0])
    }

    /// Sequence with `x_m = word[m − start]` on the word and `fill` elsewhere.
    pub fn from_window(p: u8, word: &[u8], start: i64, fill: u8) -> Result<Self> {
        Self::check_alphabet(p)?;
        Self::check_letters(p, word)?;
        Self::check_letters(p, &[fill])?;
        Ok(Self::from_base(p, word.to_vec(), start, vec![fill], vec![fill]))
    }

    /// Periodic sequence `x_m = pattern[m mod |pattern|]`.
    pub fn periodic(p: u8, pattern: &[u8]) -> Result<Self> {
        Self::check_alphabet(p)?;
        if pattern.is_empty() {
            return Err(Error::InvalidParameter("empty periodic pattern".into()));
        }
        Self::check_letters(p, pattern)?;
        Ok(Self::from_base(p, Vec::new(), 0, pattern.to_vec(), pattern.to_vec()))
    }

    /// p-adic integer with the given little-endian digits followed by the
    /// periodic digit tail `tail` (aligned right after the prefix).
    pub fn from_digits(p: u8, digits: &[u8], tail: &[u8]) -> Result<Self> {
        Self::check_alphabet(p)?;
        Self::check_letters(p, digits)?;
        if tail.is_empty() {
            return Err(Error::InvalidParameter("empty digit tail".into()));
        }
        Self::check_letters(p, tail)?;
        Ok(Self::build_from_digits(p, digits, tail))
    }

    fn build_from_digits(p: u8, digits: &[u8], tail: &[u8]) -> Self {
        let len = digits.len();
        let q = tail.len();
        let digit = |i: usize| if i < len { digits[i] } else { tail[(i - len) % q] };
        let half = len.div_ceil(2) as i64;
        let (lo, hi) = (-half, half);
        let core: Vec<u8> = (lo..hi).map(|m| digit(coordinate_digit(m))).collect();
        let qi = q as i64;
        let right = (0..qi)
            .map(|r| {
                let m = hi + (r - hi).rem_euclid(qi);
                digit(coordinate_digit(m))
            })
            .collect();
        let left = (0..qi)
            .map(|r| {
                let m = lo - 1 - (lo - 1 - r).rem_euclid(qi);
                digit(coordinate_digit(m))
            })
            .collect();
        Self::from_base(p, core, lo, left, right)
    }

    fn from_base(p: u8, core: Vec<u8>, start: i64, left: Vec<u8>, right: Vec<u8>) -> Self {
        CantorPoint { p, layer: Arc::new(Layer::Base { core, start, left, right }), offset: 0 }
    }

    /// Point whose first `depth` digits encode `index` in base p (little-endian), tail 0.
    pub fn from_prefix_index(p: u8, index: usize, depth: usize) -> Self {
        let mut digits = Vec::with_capacity(depth);
        let mut rest = index;
        for _ in 0..depth {
            digits.push((rest % p as usize) as u8);
            rest /= p as usize;
        }
        Self::build_from_digits(p, &digits, &[0])
    }

    pub fn alphabet(&self) -> u8 {
        self.p
    }

    /// Sequence coordinate `x_m`.
    pub fn coord(&self, m: i64) -> u8 {
        self.layer.at(m + self.offset)
    }

    /// p-adic digit `t_i`.
    pub fn digit(&self, i: usize) -> u8 {
        self.coord(digit_coordinate(i))
    }

    pub fn prefix(&self, depth: usize) -> Vec<u8> {
        (0..depth).map(|i| self.digit(i)).collect()
    }

    /// Base-p value of the first `depth` digits (little-endian).
    pub fn prefix_index(&self, depth: usize) -> usize {
        let p = self.p as usize;
        let mut acc = 0usize;
        for i in (0..depth).rev() {
            acc = acc * p + self.digit(i) as usize;
        }
        acc
    }

    /// `Σ^n`, where `(Σx)_m = x_{m+1}`.
    pub fn shift(&self, n: i64) -> Self {
        CantorPoint { p: self.p, layer: self.layer.clone(), offset: self.offset + n }
    }

    fn extent(&self) -> (i64, i64) {
        let (a, b) = self.layer.extent();
        (a - self.offset, b - self.offset)
    }

    fn period(&self) -> usize {
        let (l, r) = self.layer.cycles();
        lcm(l.len(), r.len())
    }

    /// Digit index beyond which the digit sequence is periodic with period `2·period()`.
    fn periodic_digit_bound(&self) -> usize {
        let (a, b) = self.extent();
        let reach = b.max(-a).max(0) as usize;
        2 * reach + 2
    }

    /// p-adic translation `t ↦ t + add − sub` for finite digit strings.
    pub fn translate(&self, add: &[u8], sub: &[u8]) -> Self {
        let mut out = self.clone();
        if add.iter().any(|&d| d != 0) {
            out = out.add_digits(add, false);
        }
        if sub.iter().any(|&d| d != 0) {
            out = out.add_digits(sub, true);
        }
        out
    }

    fn add_digits(&self, c: &[u8], subtract: bool) -> Self {
        let p = self.p as i32;
        let bound = self.periodic_digit_bound().max(c.len()) + 2 * self.period();
        let mut digits: Vec<u8> = Vec::new();
        let mut carry = 0i32;
        let mut i = 0usize;
        loop {
            if i >= c.len() && carry == 0 {
                break;
            }
            if i >= bound {
                // carry runs through a full period of the tail: it never stops
                let fill = if subtract { self.p - 1 } else { 0 };
                return Self::build_from_digits(self.p, &digits, &[fill]);
            }
            let d = self.digit(i) as i32;
            let ci = c.get(i).copied().unwrap_or(0) as i32;
            let v = if subtract { d - ci - carry } else { d + ci + carry };
            let (digit, next) = if v < 0 {
                (v + p, 1)
            } else if v >= p {
                (v - p, 1)
            } else {
                (v, 0)
            };
            digits.push(digit as u8);
            carry = next;
            i += 1;
        }
        self.patch_digits(&digits)
    }

    /// Replace digits `0..digits.len()`, keeping the rest.
    fn patch_digits(&self, digits: &[u8]) -> Self {
        if digits.is_empty() {
            return self.clone();
        }
        let k = digits.len();
        let mlo = -((k / 2) as i64);
        let mhi = k.div_ceil(2) as i64;
        let values: Vec<u8> = (mlo..mhi)
            .map(|m| {
                let idx = coordinate_digit(m);
                if idx < k {
                    digits[idx]
                } else {
                    self.coord(m)
                }
            })
            .collect();
        let depth = self.layer.depth() + 1;
        let layer = Layer::Patch { lo: mlo + self.offset, values, below: self.layer.clone(), depth };
        let point = CantorPoint { p: self.p, layer: Arc::new(layer), offset: self.offset };
        if depth > MAX_PATCH_DEPTH {
            point.flatten()
        } else {
            point
        }
    }

    fn flatten(&self) -> Self {
        let (a, b) = self.layer.extent();
        let core: Vec<u8> = (a..b).map(|m| self.layer.at(m)).collect();
        let (l, r) = self.layer.cycles();
        let layer = Layer::Base { core, start: a, left: l.to_vec(), right: r.to_vec() };
        CantorPoint { p: self.p, layer: Arc::new(layer), offset: self.offset }
    }

    /// Exact equality of the two infinite sequences.
    pub fn same_point(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        let (a1, b1) = self.extent();
        let (a2, b2) = other.extent();
        let span = lcm(self.period(), other.period()) as i64;
        let lo = a1.min(a2) - span;
        let hi = b1.max(b2) + span;
        (lo..hi).all(|m| self.coord(m) == other.coord(m))
    }

    /// Number of leading p-adic digits shared with `other`, capped at `cap`.
    pub fn agreement(&self, other: &Self, cap: usize) -> usize {
        (0..cap).find(|&i| self.digit(i) != other.digit(i)).unwrap_or(cap)
    }

    /// Ultrametric distance `p^{−agreement}` (0 when all `cap` digits agree).
    pub fn distance(&self, other: &Self, cap: usize) -> f64 {
        let k = self.agreement(other, cap);
        if k == cap {
            0.0
        } else {
            (self.p as f64).powi(-(k as i32))
        }
    }
}

impl PartialEq for CantorPoint {
    fn eq(&self, other: &Self) -> bool {
        self.same_point(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_roundtrip_through_sequence_coordinates() {
        let t = CantorPoint::from_digits(3, &[2, 0, 1, 1, 2], &[1, 2]).unwrap();
        let expect = [2, 0, 1, 1, 2, 1, 2, 1, 2, 1, 2];
        for (i, &d) in expect.iter().enumerate() {
            assert_eq!(t.digit(i), d, "digit {i}");
        }
    }

    #[test]
    fn translation_small_integers() {
        // 7 - 3 + 5 = 9 in Z/16
        let t = CantorPoint::from_digits(2, &[1, 1, 1, 0], &[0]).unwrap();
        let s = t.translate(&[1, 0, 1, 0], &[1, 1, 0, 0]);
        assert_eq!(s.prefix(4), vec![1, 0, 0, 1]);
    }

    #[test]
    fn subtraction_below_zero_gives_minus_one() {
        let z = CantorPoint::zero(2);
        let m = z.translate(&[], &[1]);
        assert!(m.same_point(&CantorPoint::constant(2, 1).unwrap()));
        let back = m.translate(&[1], &[]);
        assert!(back.same_point(&z));
    }

    #[test]
    fn shift_moves_coordinates() {
        let x = CantorPoint::from_window(2, &[1, 0, 1], 0, 0).unwrap();
        let y = x.shift(1);
        assert_eq!(y.coord(-1), 1);
        assert_eq!(y.coord(0), 0);
        assert_eq!(y.coord(1), 1);
        assert!(y.shift(-1).same_point(&x));
    }

    #[test]
    fn many_patches_flatten_without_changing_the_point() {
        let mut x = CantorPoint::from_window(2, &[1, 1, 0, 1, 0, 0, 1], -3, 0).unwrap();
        let orig = x.clone();
        for _ in 0..40 {
            x = x.translate(&[1, 0, 1], &[]);
        }
        for _ in 0..40 {
            x = x.translate(&[], &[1, 0, 1]);
        }
        assert!(x.same_point(&orig));
    }
}
