//! Double logarithmic spiral sets `S(z1, z2; delta, r)`.
//!
//! A point `z` outside `{z1, z2}` belongs to the set when, with
//! `w = (z - z1) / (z - z2)`,
//!
//! ```text
//! arg w - delta * log|w|  is congruent to  2*pi*r  (mod 2*pi).
//! ```
//!
//! The set is traced by the single smooth branch
//! `z(s) = z1 + (z2 - z1) * w(s) / (w(s) - 1)` with
//! `w(s) = exp(s + i*(delta*s + 2*pi*r))`, which tends to `z1` as
//! `s -> -inf` and to `z2` as `s -> +inf`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance on the fractional part of the congruence.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralSet {
    pub z1: Complex64,
    pub z2: Complex64,
    pub delta: f64,
    /// Class parameter, meaningful modulo 1.
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralPoint {
    pub z: Complex64,
    pub s: f64,
}

/// Output of [`spiral_sample`]; parameters where `w(s) = 1` are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct SpiralSamples {
    pub points: Vec<SpiralPoint>,
    pub skipped: Vec<f64>,
}

impl SpiralSet {
    pub fn new(z1: Complex64, z2: Complex64, delta: f64, r: f64) -> Result<Self> {
        let sp = SpiralSet { z1, z2, delta, r };
        sp.validate()?;
        Ok(sp)
    }

    /// The normalized set `S(0, 1; delta, r)`.
    pub fn unit(delta: f64, r: f64) -> Result<Self> {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), delta, r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(is_finite(self.z1) && is_finite(self.z2) && self.delta.is_finite() && self.r.is_finite())
        {
            return Err(Error::NonFinite("spiral parameters"));
        }
        if self.z1 == self.z2 {
            return Err(Error::InvalidSpiral);
        }
        Ok(())
    }

    /// `w(s)` of the canonical parametrization.
    pub fn ratio_at(&self, s: f64) -> Complex64 {
        Complex64::from_polar(s.exp(), self.delta * s + TAU * self.r)
    }

    /// The point `z(s)`, or `None` where `w(s) = 1`.
    pub fn point_at(&self, s: f64) -> Option<Complex64> {
        let w = self.ratio_at(s);
        let den = w - 1.0;
        if den.norm() < 1e-14 {
            return None;
        }
        let d = self.z2 - self.z1;
        // Anchor at the nearer endpoint to keep the offset accurate.
        Some(if s <= 0.0 {
            self.z1 + d * w / den
        } else {
            self.z2 + d / den
        })
    }

    /// Smallest `S >= 1` with `|z(-S) - z1| < eps` and `|z(S) - z2| < eps`.
    pub fn tail_parameter(&self, eps: f64) -> f64 {
        // |z(s) - z1| = |d| e^s / |w - 1| <= |d| e^s / (1 - e^s) for s < 0.
        let d = (self.z2 - self.z1).norm();
        let mut s = (2.0 * d / eps).ln().max(1.0);
        while d * (-s).exp() / (1.0 - (-s).exp()) >= eps {
            s += 1.0;
        }
        s
    }
}

fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Membership test for `S(z1, z2; delta, r)` with absolute tolerance `tol`
/// on the fractional part of the normalized congruence.
pub fn spiral_membership(z: Complex64, sp: &SpiralSet, tol: f64) -> Result<bool> {
    if !is_finite(z) {
        return Err(Error::NonFinite("z"));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    sp.validate()?;
    if z == sp.z1 || z == sp.z2 {
        return Ok(true);
    }
    let w = (z - sp.z1) / (z - sp.z2);
    let val = (w.arg() - sp.delta * w.norm().ln() - TAU * sp.r) / TAU;
    let frac = val - val.floor();
    Ok(frac <= tol || frac >= 1.0 - tol)
}

/// Samples `count` equally spaced parameters in `[s_min, s_max]`.
pub fn spiral_sample(sp: &SpiralSet, s_min: f64, s_max: f64, count: usize) -> Result<SpiralSamples> {
    sp.validate()?;
    if count < 2 {
        return Err(Error::InvalidArgument("count must be at least 2".into()));
    }
    if !(s_min < s_max) || !s_min.is_finite() || !s_max.is_finite() {
        return Err(Error::InvalidArgument("need finite s_min < s_max".into()));
    }
    let step = (s_max - s_min) / (count - 1) as f64;
    let mut points = Vec::with_capacity(count);
    let mut skipped = Vec::new();
    for i in 0..count {
        let s = if i + 1 == count { s_max } else { s_min + step * i as f64 };
        match sp.point_at(s) {
            Some(z) => points.push(SpiralPoint { z, s }),
            None => skipped.push(s),
        }
    }
    Ok(SpiralSamples { points, skipped })
}

/// Image of `S(0, 1; delta, r)` under `mu -> a_minus + mu * (a_plus - a_minus)`.
///
/// Since `(z - a_minus) / (z - a_plus) = mu / (mu - 1)` under that map, the
/// image is `S(a_minus, a_plus; delta, r)`.
pub fn spiral_affine_image(sp01: &SpiralSet, a_minus: Complex64, a_plus: Complex64) -> Result<SpiralSet> {
    if sp01.z1 != Complex64::new(0.0, 0.0) || sp01.z2 != Complex64::new(1.0, 0.0) {
        return Err(Error::InvalidArgument("expected a spiral with endpoints 0 and 1".into()));
    }
    if !(is_finite(a_minus) && is_finite(a_plus)) {
        return Err(Error::NonFinite("jump limits"));
    }
    if a_minus == a_plus {
        return Err(Error::DegenerateJump);
    }
    SpiralSet::new(a_minus, a_plus, sp01.delta, sp01.r)
}
