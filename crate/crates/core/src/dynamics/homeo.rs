use crate::funcspace::space::{wrap_angle, BlockShape, Fiber};
use crate::funcspace::CantorPoint;
use crate::{Error, Result, TAU};

/// Homeomorphism of a block fiber `tags × Cantor × 𝕋^c`.
///
/// Every variant acts on the three parts independently: by a translation on
/// the angles, by a homeomorphism of the Cantor factor, and by a permutation
/// of tags. Pullbacks of block tables rely on this separability.
#[derive(Clone, Debug, PartialEq)]
pub enum Homeo {
    Identity,
    /// `θ_α ↦ θ_α + 2πρ_α`.
    Rotation { phases: Vec<f64> },
    /// Bilateral shift `(Σx)_m = x_{m+1}` on the Cantor factor.
    SymbolShift { alphabet: u8 },
    /// p-adic translation `t ↦ t + add − sub`.
    Translation { p: u8, add: Vec<u8>, sub: Vec<u8> },
    /// `ā ↦ ā + 1 mod modulus` on the tag.
    TagCycle { modulus: usize },
    /// Maps acting on disjoint parts.
    Product(Vec<Homeo>),
    /// `ψ⁻¹ ∘ φ ∘ ψ`.
    Conjugated { psi: Box<Homeo>, phi: Box<Homeo> },
    Inverse(Box<Homeo>),
}

pub fn make_rotation_flow(phases: &[f64]) -> Result<Homeo> {
    if phases.is_empty() {
        return Err(Error::InvalidParameter("rotation needs at least one phase".into()));
    }
    Ok(Homeo::Rotation { phases: phases.to_vec() })
}

/// `ψ⁻¹ ∘ φ ∘ ψ`; the transitive seed `w` of `φ` becomes `ψ⁻¹(w)`.
pub fn conjugate_flow(psi: Homeo, phi: Homeo) -> Homeo {
    if psi == Homeo::Identity {
        return phi;
    }
    Homeo::Conjugated { psi: Box::new(psi), phi: Box::new(phi) }
}

impl Homeo {
    pub fn inverse(&self) -> Homeo {
        match self {
            Homeo::Inverse(h) => (**h).clone(),
            Homeo::Identity => Homeo::Identity,
            h => Homeo::Inverse(Box::new(h.clone())),
        }
    }

    pub fn forward(&self, z: &Fiber) -> Fiber {
        self.iterate(z, 1)
    }

    pub fn backward(&self, z: &Fiber) -> Fiber {
        self.iterate(z, -1)
    }

    /// `h^n(z)` for any integer `n`.
    pub fn iterate(&self, z: &Fiber, n: i64) -> Fiber {
        if n == 0 {
            return z.clone();
        }
        match self {
            Homeo::Identity => z.clone(),
            Homeo::Rotation { phases } => {
                let mut out = z.clone();
                for (theta, rho) in out.angles.iter_mut().zip(phases) {
                    let turns = if n.abs() == 1 { n as f64 * rho } else { (n as f64 * rho).rem_euclid(1.0) };
                    *theta = wrap_angle(*theta + TAU * turns);
                }
                out
            }
            Homeo::SymbolShift { .. } => {
                let mut out = z.clone();
                out.cantor = z.cantor.as_ref().map(|x| x.shift(n));
                out
            }
            Homeo::Translation { add, sub, .. } => {
                let mut out = z.clone();
                out.cantor = z.cantor.as_ref().map(|x| {
                    let mut y = x.clone();
                    for _ in 0..n.abs() {
                        y = if n > 0 { y.translate(add, sub) } else { y.translate(sub, add) };
                    }
                    y
                });
                out
            }
            Homeo::TagCycle { modulus } => {
                let mut out = z.clone();
                let m = *modulus as i64;
                out.tag = (z.tag as i64 + n).rem_euclid(m) as usize;
                out
            }
            Homeo::Product(parts) => parts.iter().fold(z.clone(), |acc, h| h.iterate(&acc, n)),
            Homeo::Conjugated { psi, phi } => {
                let y = psi.forward(z);
                psi.backward(&phi.iterate(&y, n))
            }
            Homeo::Inverse(h) => h.iterate(z, -n),
        }
    }

    /// Visit `h^{k·j}(start)` for `j = 1..=count`; stops early when `visit`
    /// returns false. Conjugations iterate the inner flow and map back
    /// pointwise, so representation sizes stay bounded along the orbit.
    pub fn orbit(&self, start: &Fiber, k: i64, count: u64, visit: &mut dyn FnMut(u64, &Fiber) -> bool) {
        match self {
            Homeo::Conjugated { psi, phi } => {
                let y = psi.forward(start);
                phi.orbit(&y, k, count, &mut |j, yj| visit(j, &psi.backward(yj)));
            }
            Homeo::Inverse(h) => h.orbit(start, -k, count, visit),
            _ => {
                let mut x = start.clone();
                for j in 1..=count {
                    x = self.iterate(&x, k);
                    if !visit(j, &x) {
                        return;
                    }
                }
            }
        }
    }

    /// Constant angle increment of `h^n` (mod 2π, unreduced).
    pub fn angle_increment(&self, circles: usize, n: i64) -> Vec<f64> {
        match self {
            Homeo::Rotation { phases } => (0..circles)
                .map(|i| phases.get(i).map_or(0.0, |rho| TAU * (n as f64 * rho).rem_euclid(1.0)))
                .collect(),
            Homeo::Product(parts) => parts.iter().fold(vec![0.0; circles], |acc, h| {
                acc.iter().zip(h.angle_increment(circles, n)).map(|(a, b)| a + b).collect()
            }),
            Homeo::Conjugated { phi, .. } => phi.angle_increment(circles, n),
            Homeo::Inverse(h) => h.angle_increment(circles, -n),
            _ => vec![0.0; circles],
        }
    }

    /// Number of leading p-adic digits of `z` that determine the first
    /// `depth` digits of `h^{±1}(z)`.
    pub fn input_depth(&self, depth: usize, forward: bool) -> usize {
        match self {
            Homeo::SymbolShift { .. } => depth + 2,
            Homeo::Product(parts) => parts.iter().fold(depth, |d, h| h.input_depth(d, forward)),
            Homeo::Conjugated { psi, phi } => {
                let d = psi.input_depth(depth, !forward);
                let d = phi.input_depth(d, forward);
                psi.input_depth(d, forward)
            }
            Homeo::Inverse(h) => h.input_depth(depth, !forward),
            _ => depth,
        }
    }

    /// Largest tag modulus the map permutes (1 when tags are untouched).
    pub fn tag_modulus(&self) -> usize {
        match self {
            Homeo::TagCycle { modulus } => *modulus,
            Homeo::Product(parts) => parts.iter().map(Homeo::tag_modulus).max().unwrap_or(1),
            Homeo::Conjugated { psi, phi } => psi.tag_modulus().max(phi.tag_modulus()),
            Homeo::Inverse(h) => h.tag_modulus(),
            _ => 1,
        }
    }

    /// Alphabet of the Cantor factor the map acts on, if any.
    pub fn alphabet(&self) -> Option<u8> {
        match self {
            Homeo::SymbolShift { alphabet } => Some(*alphabet),
            Homeo::Translation { p, .. } => Some(*p),
            Homeo::Product(parts) => parts.iter().find_map(Homeo::alphabet),
            Homeo::Conjugated { psi, phi } => phi.alphabet().or_else(|| psi.alphabet()),
            Homeo::Inverse(h) => h.alphabet(),
            _ => None,
        }
    }

    /// Number of circle factors the map rotates.
    pub fn circles(&self) -> usize {
        match self {
            Homeo::Rotation { phases } => phases.len(),
            Homeo::Product(parts) => parts.iter().map(Homeo::circles).max().unwrap_or(0),
            Homeo::Conjugated { psi, phi } => psi.circles().max(phi.circles()),
            Homeo::Inverse(h) => h.circles(),
            _ => 0,
        }
    }

    /// Check that the map acts within a block of the given shape.
    pub fn check_domain(&self, shape: &BlockShape) -> Result<()> {
        if self.circles() > shape.circles {
            return Err(Error::Domain(format!(
                "map rotates {} circles, block has {}",
                self.circles(),
                shape.circles
            )));
        }
        if let Some(p) = self.alphabet() {
            if shape.cantor != Some(p) {
                return Err(Error::Domain(format!("map acts on alphabet {p}, block has {:?}", shape.cantor)));
            }
        }
        let m = self.tag_modulus();
        if m > 1 && m != shape.tags {
            return Err(Error::Domain(format!("map cycles {m} tags, block has {}", shape.tags)));
        }
        Ok(())
    }
}

/// Conjugated flow on `ℤ_p` fixing `L₀`: with `s(t) = t − L₀ + M₀` and
/// `u(t) = t − M₀`, the result is `s⁻¹ ∘ u⁻¹ ∘ Σ ∘ u ∘ s`. The inner map
/// `u⁻¹ Σ u` fixes `M₀` because `Σ` fixes `0̄`.
pub fn make_cantor_flow(p: u8, depth: usize, l0: &[u8], m0: &[u8]) -> Result<Homeo> {
    if p < 2 || !(2..p).all(|d| !p.is_multiple_of(d)) {
        return Err(Error::InvalidParameter(format!("{p} is not a prime")));
    }
    for (name, s) in [("L0", l0), ("M0", m0)] {
        if s.len() != depth {
            return Err(Error::InvalidParameter(format!("{name} has {} digits, expected {depth}", s.len())));
        }
        if let Some(d) = s.iter().find(|&&d| d >= p) {
            return Err(Error::InvalidParameter(format!("{name} has digit {d} outside 0..{p}")));
        }
    }
    let s = Homeo::Translation { p, add: m0.to_vec(), sub: l0.to_vec() };
    let u = Homeo::Translation { p, add: Vec::new(), sub: m0.to_vec() };
    let inner = conjugate_flow(u, Homeo::SymbolShift { alphabet: p });
    Ok(conjugate_flow(s, inner))
}

/// Point of `ℤ_p` with the given little-endian digits and zero tail.
pub fn padic_point(p: u8, digits: &[u8]) -> Result<CantorPoint> {
    CantorPoint::from_digits(p, digits, &[0])
}
