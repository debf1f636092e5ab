use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scalar::fredholm_scalar;
use super::SweepConfig;
use crate::error::{Error, Result};
use crate::geometry::{spiral_affine_image, SpiralSet};
use crate::spaces::Space;
use crate::symbols::PCSymbol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub index: i64,
    /// Accumulated argument divided by `2 pi`.
    pub winding: f64,
    /// `|accumulated argument - 2 pi * winding number|` in radians.
    pub residue: f64,
    /// Number of argument increments summed.
    pub increments: usize,
}

/// Largest accepted argument increment along a spiral piece.
const MAX_STEP: f64 = 0.5;
/// Initial spacing of the spiral parameter.
const INITIAL_DS: f64 = 0.05;

struct Accumulator {
    total: f64,
    count: usize,
    zero_tol: f64,
}

impl Accumulator {
    fn check(&self, z: Complex64) -> Result<()> {
        if z.norm() <= self.zero_tol {
            return Err(Error::CurveNearZero { distance: z.norm() });
        }
        Ok(())
    }

    /// Straight segment: its principal increment is exact when it misses 0.
    fn segment(&mut self, a: Complex64, b: Complex64) -> Result<()> {
        let d = b - a;
        if d.norm_sqr() > 0.0 {
            let s = (-(a * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
            self.check(a + d * s)?;
        }
        self.check(a)?;
        self.total += (b / a).arg();
        self.count += 1;
        Ok(())
    }

    fn spiral_piece(&mut self, sp: &SpiralSet, s0: f64, z0: Complex64, s1: f64, z1: Complex64, depth: usize) -> Result<()> {
        self.check(z1)?;
        let whole = (z1 / z0).arg();
        let sm = 0.5 * (s0 + s1);
        let zm = sp.point_at(sm).ok_or(Error::RefinementExhausted)?;
        self.check(zm)?;
        let halves = (zm / z0).arg() + (z1 / zm).arg();
        if whole.abs() < MAX_STEP && (halves - whole).abs() < 1e-9 {
            self.total += whole;
            self.count += 1;
            return Ok(());
        }
        if depth == 0 {
            return Err(Error::RefinementExhausted);
        }
        self.spiral_piece(sp, s0, z0, sm, zm, depth - 1)?;
        self.spiral_piece(sp, sm, zm, s1, z1, depth - 1)
    }

    /// Spiral completion from `a_minus` to `a_plus`, with short chords at
    /// both tails.
    fn jump(&mut self, a_minus: Complex64, a_plus: Complex64, delta: f64, r: f64, sweep: &SweepConfig) -> Result<()> {
        let sp = spiral_affine_image(&SpiralSet::unit(delta, r)?, a_minus, a_plus)?;
        let eps = sweep.tail_eps.min(0.25 * a_minus.norm().min(a_plus.norm()));
        let tail = sp.tail_parameter(eps);
        let steps = ((2.0 * tail / INITIAL_DS).ceil() as usize).max(2);
        let at = |k: usize| -tail + 2.0 * tail * k as f64 / steps as f64;
        let mut prev_s = at(0);
        let mut prev = sp.point_at(prev_s).ok_or(Error::RefinementExhausted)?;
        self.segment(a_minus, prev)?;
        for k in 1..=steps {
            let s = at(k);
            let z = sp.point_at(s).ok_or(Error::RefinementExhausted)?;
            self.spiral_piece(&sp, prev_s, prev, s, z, sweep.refine_depth)?;
            prev_s = s;
            prev = z;
        }
        self.segment(prev, a_plus)
    }
}

/// Index of `aP + Q` as minus the winding number of the symbol curve
/// completed by spiral arcs at the jumps.
pub fn index_scalar(a: &PCSymbol, space: &Space, sweep: &SweepConfig) -> Result<IndexReport> {
    let rep = fredholm_scalar(a, space, sweep)?;
    if !rep.fredholm {
        return Err(Error::NotFredholm(format!("{} failing point(s), margin {}", rep.witnesses.len(), rep.margin)));
    }
    let mut acc = Accumulator { total: 0.0, count: 0, zero_tol: sweep.det_tol };
    let scalar = |m: &crate::CMatrix| m[(0, 0)];
    let jumps = a.jumps();
    for (i, arc) in a.arcs().iter().enumerate() {
        for w in arc.windows(2) {
            acc.segment(scalar(&w[0].value), scalar(&w[1].value))?;
        }
        if !jumps.is_empty() {
            let j = &jumps[(i + 1) % jumps.len()];
            acc.jump(scalar(&j.left), scalar(&j.right), space.delta_at(j.t), space.r_at(j.t), sweep)?;
        }
    }
    let winding = acc.total / TAU;
    let k = winding.round();
    let residue = (acc.total - TAU * k).abs();
    if residue >= 1e-6 * TAU {
        return Err(Error::RefinementExhausted);
    }
    Ok(IndexReport { index: -(k as i64), winding, residue, increments: acc.count })
}
