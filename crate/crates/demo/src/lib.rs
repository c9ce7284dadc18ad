//! Browser bindings for three small experiments: orbit coverage of a circle
//! rotation, phase gaps of the golden arc model and the determinant of a
//! signed circulant weight matrix.

use num_complex::Complex64;
use shiftlab::blockmethod::build_skew_circulant;
use shiftlab::dynamics::{make_rotation_flow, orbit_density, Resolution};
use shiftlab::funcspace::Fiber;
use shiftlab::verify::{golden_arc_kernel, DEFAULT_GAP};
use wasm_bindgen::prelude::*;

/// Coverage curve of the orbit of 0 under rotation by `2π·phase`, flattened
/// as `[iterations₀, coverage₀, iterations₁, coverage₁, …]`.
#[wasm_bindgen]
pub fn orbit_coverage(phase: f64, eps: f64, budget: u32) -> Result<Vec<f64>, JsError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(JsError::new("eps must lie in (0, 1)"));
    }
    let flow = make_rotation_flow(&[phase]).map_err(|e| JsError::new(&e.to_string()))?;
    let r = orbit_density(&flow, &Fiber::angles(vec![0.0]), Resolution::angle(eps), budget as u64, 1);
    Ok(r.curve.iter().flat_map(|(i, c)| [*i as f64, *c]).collect())
}

/// For `M = 1..=max_degree`, the smallest `|e^{ik2πρ} − 1|` over
/// `0 < |k| ≤ M`, followed by the kernel ratio, as `[gap₁, ratio₁, …]`.
#[wasm_bindgen]
pub fn golden_phase_gaps(rotation: f64, max_degree: u32) -> Vec<f64> {
    (1..=max_degree as usize)
        .flat_map(|m| {
            let r = golden_arc_kernel(m, rotation, DEFAULT_GAP);
            [r.min_phase_gap, r.decay.ratio]
        })
        .collect()
}

/// Determinant of the signed circulant built from `γ = re + i·im`, returned
/// as `[det_re, det_im, smallest eigenvalue modulus, invertible ? 1 : 0]`.
#[wasm_bindgen]
pub fn skew_circulant_det(re: Vec<f64>, im: Vec<f64>) -> Result<Vec<f64>, JsError> {
    if re.is_empty() || re.len() != im.len() {
        return Err(JsError::new("need equally many real and imaginary parts"));
    }
    let gamma: Vec<Complex64> = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
    let m = build_skew_circulant(&gamma);
    Ok(vec![m.det.re, m.det.im, m.min_eigenvalue, f64::from(u8::from(m.is_invertible()))])
}
