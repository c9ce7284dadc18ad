//! Experiment configuration: one construction, its parameters and the check
//! settings, read from UTF-8 JSON.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use shiftlab::blockmethod::{build_block_index, validate_compatible_sequence, GammaConfig};
use shiftlab::shiftop::{default_cantor_points, GoldenForm};
use shiftlab::verify::Counterexample;
use shiftlab::ScalarField;

use crate::CliError;

/// A scalar written either as a number or as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarInput {
    Real(f64),
    Pair([f64; 2]),
}

impl ScalarInput {
    pub fn value(self) -> Complex64 {
        match self {
            ScalarInput::Real(x) => Complex64::new(x, 0.0),
            ScalarInput::Pair([a, b]) => Complex64::new(a, b),
        }
    }
}

fn one() -> usize {
    1
}

fn degree_8() -> usize {
    8
}

fn degree_16() -> usize {
    16
}

fn depth_8() -> usize {
    8
}

fn alphabet_2() -> u8 {
    2
}

fn real() -> ScalarField {
    ScalarField::Real
}

fn plain() -> GoldenForm {
    GoldenForm::Plain
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE", deny_unknown_fields)]
pub enum Construction {
    /// Cyclic families of torus blocks with weights `γ`.
    BlockMethod {
        p: Vec<usize>,
        #[serde(default = "one")]
        circles: usize,
        #[serde(default = "degree_8")]
        degree: usize,
        #[serde(default = "real")]
        field: ScalarField,
        /// Explicit weights, one per block; the default search is used when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<Vec<ScalarInput>>,
        #[serde(default)]
        gamma_seed: u64,
    },
    /// Composition operator on a symbolic Cantor block with `N` limit points.
    Composition {
        delta: [ScalarInput; 2],
        period: usize,
        #[serde(default = "depth_8")]
        depth: usize,
        #[serde(default = "alphabet_2")]
        alphabet: u8,
    },
    /// Trigonometric model with the golden arc functional.
    GoldenArcModel {
        #[serde(default = "plain")]
        form: GoldenForm,
        #[serde(default = "degree_16")]
        degree: usize,
    },
    /// `n` rotated circles with weights `ζ_i` over ℂ.
    ComplexFamily {
        n: usize,
        #[serde(default = "degree_16")]
        degree: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        z: Option<Vec<ScalarInput>>,
    },
    /// Composition on `ℤ_p` with the shift conjugated to fix `L₀`.
    CantorSet {
        delta: [ScalarInput; 2],
        #[serde(default = "depth_8")]
        depth: usize,
        #[serde(default = "alphabet_2")]
        alphabet: u8,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l0: Option<Vec<u8>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m0: Option<Vec<u8>>,
    },
    Counterexample {
        which: Counterexample,
    },
}

impl Construction {
    pub fn tag(&self) -> &'static str {
        match self {
            Construction::BlockMethod { .. } => "BLOCK_METHOD",
            Construction::Composition { .. } => "COMPOSITION",
            Construction::GoldenArcModel { .. } => "GOLDEN_ARC_MODEL",
            Construction::ComplexFamily { .. } => "COMPLEX_FAMILY",
            Construction::CantorSet { .. } => "CANTOR_SET",
            Construction::Counterexample { .. } => "COUNTEREXAMPLE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSettings {
    /// Random functions per operator check.
    pub trials: usize,
    /// Samples per circle factor for sup norms.
    pub resolution: usize,
    pub isometry_tolerance: f64,
    pub defect_tolerance: f64,
    /// Smallest defect accepted for the range witness.
    pub witness_threshold: f64,
    pub round_trip_tolerance: f64,
    /// Relative singular-value gap for kernel verdicts.
    pub gap: f64,
    /// Angular probe radius for orbit and generator checks.
    pub eps: f64,
    pub budget: u64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings {
            trials: 100,
            resolution: 1 << 12,
            isometry_tolerance: 1e-9,
            defect_tolerance: 1e-12,
            witness_threshold: 1e-3,
            round_trip_tolerance: 1e-10,
            gap: 1e-6,
            eps: 0.05,
            budget: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub construction: Construction,
    #[serde(default)]
    pub checks: CheckSettings,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every parameter against the preconditions of its construction.
    /// Operator-level guards are re-checked when the construction is built.
    pub fn validate(&self) -> Result<(), CliError> {
        let c = &self.checks;
        if c.trials == 0 || c.resolution < 2 || c.budget == 0 {
            return Err(invalid("trials and budget must be positive and resolution at least 2"));
        }
        if !(c.eps > 0.0) || !(c.gap > 0.0) {
            return Err(invalid("eps and gap must be positive"));
        }
        match &self.construction {
            Construction::BlockMethod { p, circles, degree, field, gamma, .. } => {
                if *circles == 0 || *circles > 2 {
                    return Err(invalid("block method supports 1 or 2 circles"));
                }
                if *degree == 0 {
                    return Err(invalid("degree must be positive"));
                }
                let seq = validate_compatible_sequence(p.clone()).map_err(|e| invalid(e.to_string()))?;
                if let Some(g) = gamma {
                    let values = g.iter().map(|s| s.value()).collect();
                    GammaConfig::new(values, *field, &build_block_index(&seq)).map_err(|e| invalid(e.to_string()))?;
                }
            }
            Construction::Composition { delta, period, depth, alphabet } => {
                check_delta(delta, *period)?;
                if *depth == 0 || *alphabet < 2 {
                    return Err(invalid("depth must be positive and alphabet at least 2"));
                }
            }
            Construction::GoldenArcModel { degree, .. } => {
                if *degree == 0 {
                    return Err(invalid("degree must be positive"));
                }
            }
            Construction::ComplexFamily { n, degree, z } => {
                if *n == 0 || *degree == 0 {
                    return Err(invalid("n and degree must be positive"));
                }
                if let Some(z) = z {
                    if z.len() != *n {
                        return Err(invalid(format!("{} values of z for n = {n}", z.len())));
                    }
                    for (i, v) in z.iter().enumerate() {
                        let bound = 0.5f64.powi(i as i32 + 1);
                        let m = v.value().norm();
                        if m == 0.0 || m > bound {
                            return Err(invalid(format!("z_{} violates 0 < |z| ≤ {bound}", i + 1)));
                        }
                    }
                }
            }
            Construction::CantorSet { delta, depth, alphabet, l0, m0 } => {
                check_delta(delta, 1)?;
                let p = *alphabet;
                if p < 2 || !(2..p).all(|d| p % d != 0) {
                    return Err(invalid(format!("alphabet {p} is not a prime")));
                }
                let (dl, dm) = default_cantor_points(*depth);
                for (name, digits) in [("l0", l0.as_ref().unwrap_or(&dl)), ("m0", m0.as_ref().unwrap_or(&dm))] {
                    if digits.len() != *depth || digits.iter().any(|&d| d >= p) {
                        return Err(invalid(format!("{name} must have {depth} digits below {p}")));
                    }
                }
            }
            Construction::Counterexample { .. } => {}
        }
        Ok(())
    }
}

fn check_delta(delta: &[ScalarInput; 2], period: usize) -> Result<(), CliError> {
    let (d1, d2) = (delta[0].value(), delta[1].value());
    if d1.norm() == 0.0 || d2.norm() == 0.0 {
        return Err(invalid("both δ values must be nonzero"));
    }
    if d1.norm() + d2.norm() > 1.0 {
        return Err(invalid("|δ₁| + |δ₂| must not exceed 1"));
    }
    if period == 0 {
        return Err(invalid("period must be positive"));
    }
    if ((d1 + d2).powu(period as u32) - 1.0).norm() <= 1e-12 {
        return Err(invalid(format!("(δ₁+δ₂)^{period} = 1")));
    }
    Ok(())
}
