//! The symbol map `sigma_{t,mu}`, Fredholm tests, essential spectra, and the
//! index of `aP + Q`.

mod algebra;
mod index;
pub mod linalg;
mod scalar;
mod sigma;
mod spectrum;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{spiral_membership, SpiralSet, MEMBERSHIP_TOL};
use crate::spaces::Space;

pub use algebra::{fredholm_algebra, AlgebraReport};
pub use index::{index_scalar, IndexReport};
pub use scalar::{
    classify_jump, fredholm_quantity, fredholm_scalar, local_spectrum, nearest_integer_gap, JumpClassifier,
    ScalarReport, Witness, WitnessKind,
};
pub use sigma::{sigma_eval, sigma_eval_n, LocalSymbol, SymbolMatrix};
pub use spectrum::{essential_spectrum, SpectrumPoint, MAX_SPECTRUM_SIZE};

/// Sampling and tolerance parameters of the bundle sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    /// Spiral samples per special point (endpoints `mu = 0, 1` are added).
    pub mu_samples: usize,
    /// Spiral parameter range `[-s_range, s_range]`.
    pub s_range: f64,
    /// Uniform grid size for continuity points.
    pub continuity_samples: usize,
    /// `fredholm = min |det| > det_tol`.
    pub det_tol: f64,
    /// Distance to the nearest integer counted as "integer".
    pub integer_tol: f64,
    /// Tail length of the spiral completion in the index engine.
    pub tail_eps: f64,
    /// Maximum bisection depth of adaptive refinement.
    pub refine_depth: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            mu_samples: 512,
            s_range: 12.0,
            continuity_samples: 1024,
            det_tol: 1e-9,
            integer_tol: 1e-9,
            tail_eps: 1e-6,
            refine_depth: 40,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if self.mu_samples < 2 || self.continuity_samples < 1 {
            return Err(Error::InvalidArgument("sample counts too small".into()));
        }
        if !(pos(self.s_range) && pos(self.det_tol) && pos(self.integer_tol) && pos(self.tail_eps)) {
            return Err(Error::InvalidArgument("sweep tolerances and ranges must be positive".into()));
        }
        if self.refine_depth == 0 {
            return Err(Error::InvalidArgument("refine_depth must be positive".into()));
        }
        Ok(())
    }
}

/// A point `(t, mu)` of the spiral bundle: `mu` lies on `S(0, 1; delta(t), r(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundlePoint {
    /// Curve parameter of `t`.
    pub t: f64,
    pub mu: Complex64,
    pub delta: f64,
    /// `r(t) = 1/p(t) + lambda(t)`.
    pub r: f64,
}

impl BundlePoint {
    pub fn new(t: f64, mu: Complex64, delta: f64, r: f64) -> Result<Self> {
        let bp = BundlePoint { t, mu, delta, r };
        bp.validate()?;
        Ok(bp)
    }

    /// Bundle point over `t` in `space`.
    pub fn in_space(space: &Space, t: f64, mu: Complex64) -> Result<Self> {
        Self::new(t, mu, space.delta_at(t), space.r_at(t))
    }

    pub fn fibre(&self) -> Result<SpiralSet> {
        SpiralSet::unit(self.delta, self.r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t.is_finite() && (0.0..1.0).contains(&self.t)) {
            return Err(Error::InvalidArgument("bundle point parameter must lie in [0, 1)".into()));
        }
        if !spiral_membership(self.mu, &self.fibre()?, MEMBERSHIP_TOL)? {
            return Err(Error::OffBundle { t: self.t, mu: self.mu });
        }
        Ok(())
    }
}

/// Special points of a sweep: jumps of the expression plus weight points.
pub(crate) fn special_points(jumps: &[f64], space: &Space) -> Vec<f64> {
    let mut pts: Vec<f64> = jumps.to_vec();
    pts.extend(space.weight.points().iter().map(|w| w.at.u.rem_euclid(1.0)));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| crate::spaces::same_param(*a, *b));
    if pts.len() > 1 && crate::spaces::same_param(pts[0], pts[pts.len() - 1]) {
        pts.pop();
    }
    pts
}

/// Continuity grid: a uniform grid plus the knot parameters of the symbols,
/// with special points removed.
pub(crate) fn continuity_grid(e: &crate::symbols::OperatorExpr, specials: &[f64], count: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..count).map(|k| k as f64 / count as f64).collect();
    e.for_each_symbol(&mut |s| {
        for arc in s.arcs() {
            grid.extend(arc.iter().map(|k| k.u.rem_euclid(1.0)));
        }
    });
    grid.retain(|u| !specials.iter().any(|t| crate::spaces::same_param(*t, *u)));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}
