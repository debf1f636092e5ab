use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linalg::eigenvalues;
use super::sigma::LocalSymbol;
use super::{continuity_grid, special_points, SweepConfig};
use crate::error::{Error, Result};
use crate::geometry::{spiral_sample, SpiralSet};
use crate::spaces::Space;
use crate::symbols::{jump_point_set, OperatorExpr};

/// Largest supported block size `n`.
pub const MAX_SPECTRUM_SIZE: usize = 4;

/// An eigenvalue of `sigma_{t,mu}(e)` tagged by its bundle point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub lambda: Complex64,
    pub t: f64,
    pub mu: Complex64,
    /// Spiral parameter of `mu`: `-inf` for `mu = 0`, `+inf` for `mu = 1`,
    /// `None` at continuity points.
    pub s: Option<f64>,
}

/// Eigenvalues of `sigma_{t,mu}(e)` over the swept bundle, in sweep order.
pub fn essential_spectrum(e: &OperatorExpr, space: &Space, sweep: &SweepConfig) -> Result<Vec<SpectrumPoint>> {
    sweep.validate()?;
    let n = e.matrix_size()?.unwrap_or(1);
    if n > MAX_SPECTRUM_SIZE {
        return Err(Error::UnsupportedSize { n, max: MAX_SPECTRUM_SIZE });
    }
    space.require_bounded()?;
    let specials = special_points(&jump_point_set(e), space);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    let mut push = |local: &LocalSymbol, mu: Complex64, s: Option<f64>| {
        for lambda in eigenvalues(&local.eval(mu)) {
            out.push(SpectrumPoint { lambda, t: local.t(), mu, s });
        }
    };
    for &t in &specials {
        let local = LocalSymbol::new(e, t, n)?;
        let fibre = SpiralSet::unit(space.delta_at(t), space.r_at(t))?;
        push(&local, zero, Some(f64::NEG_INFINITY));
        for p in spiral_sample(&fibre, -sweep.s_range, sweep.s_range, sweep.mu_samples)?.points {
            push(&local, p.z, Some(p.s));
        }
        push(&local, one, Some(f64::INFINITY));
    }
    for u in continuity_grid(e, &specials, sweep.continuity_samples) {
        push(&LocalSymbol::new(e, u, n)?, zero, None);
    }
    Ok(out)
}
