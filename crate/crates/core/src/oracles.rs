//! Brute-force validators, written independently of the main code paths.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Spiral membership via `atan2` and floor reduction of the congruence.
pub fn membership_oracle(z: Complex64, z1: Complex64, z2: Complex64, delta: f64, r: f64, tol: f64) -> bool {
    if z == z1 || z == z2 {
        return true;
    }
    let num = z - z1;
    let den = z - z2;
    // (num / den) written out.
    let d2 = den.re * den.re + den.im * den.im;
    let wr = (num.re * den.re + num.im * den.im) / d2;
    let wi = (num.im * den.re - num.re * den.im) / d2;
    let angle = wi.atan2(wr);
    let logmod = 0.5 * (wr * wr + wi * wi).ln();
    let two_pi = 2.0 * std::f64::consts::PI;
    let x = (angle - delta * logmod) / two_pi - r;
    let frac = x - x.floor();
    frac.min(1.0 - frac) <= tol
}

/// Point of `S(z1, z2; delta, r)` at spiral parameter `s`, as `(w z2 - z1) / (w - 1)`.
pub fn spiral_point_oracle(z1: Complex64, z2: Complex64, delta: f64, r: f64, s: f64) -> Complex64 {
    let theta = delta * s + 2.0 * std::f64::consts::PI * r;
    let w = Complex64::new(s.exp() * theta.cos(), s.exp() * theta.sin());
    (w * z2 - z1) / (w - Complex64::new(1.0, 0.0))
}

/// Sum of principal argument increments around the closed sample list.
pub fn arg_increment_sum(samples: &[Complex64]) -> Result<f64> {
    if samples.iter().any(|z| z.re == 0.0 && z.im == 0.0) {
        return Err(Error::CurveNearZero { distance: 0.0 });
    }
    let n = samples.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = samples[i];
        let b = samples[(i + 1) % n];
        let prev = a.im.atan2(a.re);
        let next = b.im.atan2(b.re);
        let mut d = next - prev;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d <= -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
    }
    Ok(total)
}

/// Winding number about 0 of the closed sample list and the rounding
/// residue in radians.
pub fn winding_oracle(samples: &[Complex64]) -> Result<(i64, f64)> {
    if samples.is_empty() {
        return Err(Error::TooFewNodes { needed: 1, found: 0 });
    }
    let total = arg_increment_sum(samples)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let k = (total / two_pi).round();
    Ok((k as i64, (total - two_pi * k).abs()))
}

/// Luxemburg norm of samples `|f|` with exponents `p` and quadrature
/// weights `w`, by a doubling scan for a bracket and golden-section search
/// on `|log m(lambda)|` in `log lambda`.
pub fn modular_bisect_oracle(abs_f: &[f64], p: &[f64], w: &[f64]) -> Result<f64> {
    if abs_f.len() != p.len() || abs_f.len() != w.len() {
        return Err(Error::LengthMismatch { expected: abs_f.len(), found: p.len().min(w.len()) });
    }
    let m = |lambda: f64| -> f64 {
        let mut sum = 0.0;
        for i in 0..abs_f.len() {
            if abs_f[i] > 0.0 {
                sum += (abs_f[i] / lambda).powf(p[i]) * w[i];
            }
        }
        sum
    };
    if m(1.0) == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 1.0;
    while m(lo) <= 1.0 {
        lo /= 2.0;
    }
    let mut hi = 1.0;
    while m(hi) > 1.0 {
        hi *= 2.0;
    }
    let g = |x: f64| m(x.exp()).ln().abs();
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..200 {
        if b - a < 1e-15 {
            break;
        }
        if g1 <= g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - phi * (b - a);
            g1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + phi * (b - a);
            g2 = g(x2);
        }
    }
    Ok((0.5 * (a + b)).exp())
}
