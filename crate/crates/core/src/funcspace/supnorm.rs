//! Sup norm of trigonometric polynomials on `𝕋^c`: FFT grid evaluation, then
//! local refinement of every grid peak that could hold the maximum.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::TAU;

/// Cap on the total grid size for multi-circle blocks.
const MAX_GRID: usize = 1 << 20;

/// `max_θ |Σ_k c_k e^{i k·θ}|` for the dense mode box of degree `degree`.
pub fn trig_sup(cell: &[Complex64], circles: usize, degree: usize, resolution: usize) -> f64 {
    if cell.iter().all(|c| c.norm() == 0.0) {
        return 0.0;
    }
    if circles == 0 {
        return cell[0].norm();
    }
    if degree == 0 {
        return cell[0].norm();
    }
    let per_axis = if circles == 1 {
        resolution
    } else {
        let cap = (MAX_GRID as f64).powf(1.0 / circles as f64).floor() as usize;
        resolution.min(cap).max(2)
    };
    let grid = grid_values(cell, circles, degree, per_axis);
    let mags: Vec<f64> = grid.iter().map(|z| z.norm_sqr()).collect();
    let grid_max = mags.iter().cloned().fold(0.0, f64::max);
    let threshold = 0.25 * grid_max;
    let mut best = grid_max;
    for (idx, &v) in mags.iter().enumerate() {
        if v < threshold || !is_local_max(&mags, idx, circles, per_axis) {
            continue;
        }
        let theta = grid_point(idx, circles, per_axis);
        let refined = if circles == 1 {
            refine_1d(cell, degree, theta[0], TAU / per_axis as f64)
        } else {
            refine_nd(cell, circles, degree, theta)
        };
        best = best.max(refined);
    }
    best.sqrt()
}

fn grid_point(mut idx: usize, circles: usize, n: usize) -> Vec<f64> {
    (0..circles)
        .map(|_| {
            let j = idx % n;
            idx /= n;
            TAU * j as f64 / n as f64
        })
        .collect()
}

fn is_local_max(mags: &[f64], idx: usize, circles: usize, n: usize) -> bool {
    let v = mags[idx];
    let mut stride = 1;
    for _ in 0..circles {
        let j = (idx / stride) % n;
        let base = idx - j * stride;
        let up = base + ((j + 1) % n) * stride;
        let down = base + ((j + n - 1) % n) * stride;
        if mags[up] > v || mags[down] > v {
            return false;
        }
        stride *= n;
    }
    true
}

/// Values on the uniform grid of `n` points per axis, via separable FFTs.
fn grid_values(cell: &[Complex64], circles: usize, degree: usize, n: usize) -> Vec<Complex64> {
    let w = 2 * degree + 1;
    let total = n.pow(circles as u32);
    let mut buf = vec![Complex64::new(0.0, 0.0); total];
    for (i, c) in cell.iter().enumerate() {
        let mut rest = i;
        let mut pos = 0usize;
        let mut stride = 1usize;
        for _ in 0..circles {
            let k = (rest % w) as i64 - degree as i64;
            rest /= w;
            pos += (k.rem_euclid(n as i64) as usize) * stride;
            stride *= n;
        }
        buf[pos] += c;
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(n);
    let mut stride = 1usize;
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..circles {
        let outer = total / (n * stride);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * n * stride + s;
                for j in 0..n {
                    line[j] = buf[base + j * stride];
                }
                fft.process(&mut line);
                for j in 0..n {
                    buf[base + j * stride] = line[j];
                }
            }
        }
        stride *= n;
    }
    buf
}

/// `(p, p', p'')` at `θ` for a one-variable polynomial.
fn derivs_1d(cell: &[Complex64], degree: usize, theta: f64) -> (Complex64, Complex64, Complex64) {
    let m = degree as i64;
    let mut p = Complex64::new(0.0, 0.0);
    let mut d1 = p;
    let mut d2 = p;
    for (i, c) in cell.iter().enumerate() {
        let k = i as i64 - m;
        let e = c * Complex64::from_polar(1.0, k as f64 * theta);
        let kf = k as f64;
        p += e;
        d1 += e * Complex64::new(0.0, kf);
        d2 += e * (-kf * kf);
    }
    (p, d1, d2)
}

fn slope(cell: &[Complex64], degree: usize, theta: f64) -> f64 {
    let (p, d1, _) = derivs_1d(cell, degree, theta);
    2.0 * (p.conj() * d1).re
}

/// Maximize `|p|²` near a grid peak: safeguarded Newton on the derivative
/// inside one grid cell on each side, golden-section search as fallback.
fn refine_1d(cell: &[Complex64], degree: usize, theta: f64, h: f64) -> f64 {
    let value = |t: f64| derivs_1d(cell, degree, t).0.norm_sqr();
    let (mut a, mut b) = (theta - h, theta + h);
    let (ga, gb) = (slope(cell, degree, a), slope(cell, degree, b));
    if !(ga >= 0.0 && gb <= 0.0) {
        return golden_section(&value, a, b).max(value(theta));
    }
    let mut t = theta;
    for _ in 0..80 {
        let (p, d1, d2) = derivs_1d(cell, degree, t);
        let g = 2.0 * (p.conj() * d1).re;
        let gg = 2.0 * (d1.norm_sqr() + (p.conj() * d2).re);
        if g > 0.0 {
            a = t;
        } else {
            b = t;
        }
        let newton = if gg < 0.0 { t - g / gg } else { f64::NAN };
        let next = if newton.is_finite() && newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if (next - t).abs() < 1e-15 * (1.0 + t.abs()) || b - a < 1e-15 {
            t = next;
            break;
        }
        t = next;
    }
    value(t).max(value(theta))
}

fn golden_section(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// Damped Newton ascent of `|p|²` on `𝕋^c`.
fn refine_nd(cell: &[Complex64], circles: usize, degree: usize, start: Vec<f64>) -> f64 {
    let w = 2 * degree + 1;
    let eval = |theta: &[f64]| -> (f64, Vec<f64>, Vec<f64>) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = vec![Complex64::new(0.0, 0.0); circles];
        let mut ddp = vec![Complex64::new(0.0, 0.0); circles * circles];
        for (i, c) in cell.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let mut rest = i;
            let ks: Vec<f64> = (0..circles)
                .map(|_| {
                    let k = (rest % w) as f64 - degree as f64;
                    rest /= w;
                    k
                })
                .collect();
            let phase: f64 = ks.iter().zip(theta).map(|(k, t)| k * t).sum();
            let e = c * Complex64::from_polar(1.0, phase);
            p += e;
            for a in 0..circles {
                dp[a] += e * Complex64::new(0.0, ks[a]);
                for b in 0..circles {
                    ddp[a * circles + b] += e * (-ks[a] * ks[b]);
                }
            }
        }
        let g: Vec<f64> = dp.iter().map(|d| 2.0 * (p.conj() * d).re).collect();
        let mut hess = vec![0.0; circles * circles];
        for a in 0..circles {
            for b in 0..circles {
                hess[a * circles + b] =
                    2.0 * ((dp[a].conj() * dp[b]).re + (p.conj() * ddp[a * circles + b]).re);
            }
        }
        (p.norm_sqr(), g, hess)
    };
    let mut theta = start;
    let (mut val, mut g, mut hess) = eval(&theta);
    for _ in 0..60 {
        let step = newton_step(&g, &hess, circles).unwrap_or_else(|| g.iter().map(|x| x * 1e-3).collect());
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let trial: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + scale * s).collect();
            let (v, g2, h2) = eval(&trial);
            if v >= val {
                let moved = step.iter().map(|s| (scale * s).abs()).fold(0.0, f64::max);
                theta = trial;
                val = v;
                g = g2;
                hess = h2;
                improved = moved > 1e-15;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    val
}

/// Solve `H s = −g` when `H` is negative definite (small dense system).
fn newton_step(g: &[f64], hess: &[f64], n: usize) -> Option<Vec<f64>> {
    let h = nalgebra::DMatrix::from_row_slice(n, n, hess);
    let neg = -h;
    let chol = neg.cholesky()?;
    let rhs = nalgebra::DVector::from_column_slice(g);
    let s = chol.solve(&rhs);
    Some(s.iter().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(degree: usize, coeffs: &[(i64, Complex64)]) -> Vec<Complex64> {
        let mut cell = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        for (k, c) in coeffs {
            cell[(*k + degree as i64) as usize] = *c;
        }
        cell
    }

    #[test]
    fn single_mode_has_unit_sup() {
        let cell = poly(16, &[(7, Complex64::new(1.0, 0.0))]);
        assert!((trig_sup(&cell, 1, 16, 1 << 12) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refined_sup_beats_grid_for_off_grid_peak() {
        // 1 + cos(θ − 0.123456) peaks at 2 between grid points
        let a = Complex64::from_polar(0.5, -0.123456);
        let cell = poly(1, &[(0, Complex64::new(1.0, 0.0)), (1, a), (-1, a.conj())]);
        let s = trig_sup(&cell, 1, 1, 16);
        assert!((s - 2.0).abs() < 1e-13, "{s}");
    }

    #[test]
    fn two_circle_product_peak() {
        // (1 + cos(θ₁ − 0.3))(1 + cos(θ₂ + 0.7)) has sup 4
        let d = 1usize;
        let w = 2 * d + 1;
        let f1 = [Complex64::from_polar(0.5, 0.3), Complex64::new(1.0, 0.0), Complex64::from_polar(0.5, -0.3)];
        let f2 = [Complex64::from_polar(0.5, -0.7), Complex64::new(1.0, 0.0), Complex64::from_polar(0.5, 0.7)];
        let mut cell = vec![Complex64::new(0.0, 0.0); w * w];
        for i in 0..w {
            for j in 0..w {
                cell[i + w * j] = f1[i] * f2[j];
            }
        }
        let s = trig_sup(&cell, 2, d, 32);
        assert!((s - 4.0).abs() < 1e-12, "{s}");
    }
}
