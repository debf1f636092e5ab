use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sigma::LocalSymbol;
use super::{continuity_grid, special_points, BundlePoint, SweepConfig};
use crate::error::Result;
use crate::geometry::{spiral_sample, SpiralSet};
use crate::spaces::Space;
use crate::symbols::{jump_point_set, OperatorExpr};

/// Outcome of the bundle sweep. The verdict is certified only up to the
/// sampling: `det` could vanish between samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub fredholm: bool,
    pub min_abs_det: f64,
    pub argmin: BundlePoint,
    pub det_tol: f64,
    pub evaluations: usize,
    /// Special points swept with the full fibre.
    pub special_points: Vec<f64>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
/// Local minima of each fibre that get refined.
const REFINED_MINIMA: usize = 8;

struct Best {
    value: f64,
    at: BundlePoint,
    evaluations: usize,
}

impl Best {
    fn offer(&mut self, value: f64, at: BundlePoint) {
        self.evaluations += 1;
        if value < self.value {
            self.value = value;
            self.at = at;
        }
    }
}

/// Sweeps `|det sigma_{t,mu}(e)|` over the fibre of each special point and
/// over a continuity grid, refining around sampled minima of both.
pub fn fredholm_algebra(e: &OperatorExpr, space: &Space, sweep: &SweepConfig) -> Result<AlgebraReport> {
    sweep.validate()?;
    space.require_bounded()?;
    let n = e.matrix_size()?.unwrap_or(1);
    let specials = special_points(&jump_point_set(e), space);
    let zero = Complex64::new(0.0, 0.0);
    let mut best = Best {
        value: f64::INFINITY,
        at: BundlePoint { t: 0.0, mu: zero, delta: space.delta_at(0.0), r: space.r_at(0.0) },
        evaluations: 0,
    };
    for &t in &specials {
        let local = LocalSymbol::new(e, t, n)?;
        let (delta, r) = (space.delta_at(t), space.r_at(t));
        let at = |mu| BundlePoint { t, mu, delta, r };
        let fibre = SpiralSet::unit(delta, r)?;
        for mu in [zero, Complex64::new(1.0, 0.0)] {
            best.offer(local.det(mu).norm(), at(mu));
        }
        let samples = spiral_sample(&fibre, -sweep.s_range, sweep.s_range, sweep.mu_samples)?;
        let vals: Vec<(f64, f64)> = samples
            .points
            .iter()
            .map(|p| {
                let v = local.det(p.z).norm();
                best.offer(v, at(p.z));
                (p.s, v)
            })
            .collect();
        let mut minima: Vec<usize> = (0..vals.len())
            .filter(|&i| {
                (i == 0 || vals[i].1 <= vals[i - 1].1) && (i + 1 == vals.len() || vals[i].1 <= vals[i + 1].1)
            })
            .collect();
        minima.sort_by(|&a, &b| vals[a].1.total_cmp(&vals[b].1));
        for &i in minima.iter().take(REFINED_MINIMA) {
            let lo = if i > 0 { vals[i - 1].0 } else { vals[i].0 };
            let hi = if i + 1 < vals.len() { vals[i + 1].0 } else { vals[i].0 };
            if hi <= lo {
                continue;
            }
            let f = |s: f64| fibre.point_at(s).map(|mu| (local.det(mu).norm(), mu));
            let (mut a, mut b) = (lo, hi);
            for _ in 0..sweep.refine_depth {
                let x1 = b - GOLDEN * (b - a);
                let x2 = a + GOLDEN * (b - a);
                match (f(x1), f(x2)) {
                    (Some((v1, m1)), Some((v2, m2))) => {
                        best.offer(v1, at(m1));
                        best.offer(v2, at(m2));
                        if v1 <= v2 {
                            b = x2;
                        } else {
                            a = x1;
                        }
                    }
                    _ => break,
                }
            }
        }
    }
    let at_u = |u: f64| -> Result<(f64, BundlePoint)> {
        let local = LocalSymbol::new(e, u, n)?;
        Ok((local.det(zero).norm(), BundlePoint { t: u, mu: zero, delta: space.delta_at(u), r: space.r_at(u) }))
    };
    let grid = continuity_grid(e, &specials, sweep.continuity_samples);
    let mut vals = Vec::with_capacity(grid.len());
    for &u in &grid {
        let (v, bp) = at_u(u)?;
        best.offer(v, bp);
        vals.push(v);
    }
    let m = vals.len();
    if m >= 3 {
        let mut minima: Vec<usize> =
            (0..m).filter(|&i| vals[i] <= vals[(i + m - 1) % m] && vals[i] <= vals[(i + 1) % m]).collect();
        minima.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        for &i in minima.iter().take(REFINED_MINIMA) {
            let mut a = if i > 0 { grid[i - 1] } else { grid[m - 1] - 1.0 };
            let mut b = if i + 1 < m { grid[i + 1] } else { grid[0] + 1.0 };
            for _ in 0..sweep.refine_depth {
                let x1 = b - GOLDEN * (b - a);
                let x2 = a + GOLDEN * (b - a);
                let (v1, p1) = at_u(x1.rem_euclid(1.0))?;
                let (v2, p2) = at_u(x2.rem_euclid(1.0))?;
                best.offer(v1, p1);
                best.offer(v2, p2);
                if v1 <= v2 {
                    b = x2;
                } else {
                    a = x1;
                }
            }
        }
    }
    Ok(AlgebraReport {
        fredholm: best.value > sweep.det_tol,
        min_abs_det: best.value,
        argmin: best.at,
        det_tol: sweep.det_tol,
        evaluations: best.evaluations,
        special_points: specials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{CurveModel, ExponentFunction, KhvedelidzeWeight};
    use crate::symbols::{parse_expr, Bindings, PCSymbol};
    use crate::CMatrix;
    use std::sync::Arc;

    fn space() -> Space {
        let mut curve = CurveModel::unit_circle(128).unwrap();
        curve.set_whirl(0.4, 1.0).unwrap();
        Space::new(curve, ExponentFunction::constant(2.0).unwrap(), KhvedelidzeWeight::unweighted())
    }

    fn run(text: &str, b: &Bindings) -> AlgebraReport {
        let cfg = SweepConfig { continuity_samples: 64, mu_samples: 128, ..SweepConfig::default() };
        fredholm_algebra(&parse_expr(text, b).unwrap(), &space(), &cfg).unwrap()
    }

    #[test]
    fn identity_and_projection() {
        let b = Bindings::new();
        let r = run("I", &b);
        assert!(r.fredholm);
        assert_eq!(r.min_abs_det, 1.0);
        let r = run("P", &b);
        assert!(!r.fredholm);
        assert_eq!(r.min_abs_det, 0.0);
    }

    #[test]
    fn quarter_turn_jump_agrees_with_scalar_test() {
        let a = PCSymbol::jump_ramp(
            0.4,
            CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)),
            CMatrix::from_element(1, 1, Complex64::new(0.0, 1.0)),
        )
        .unwrap();
        let mut b = Bindings::new();
        b.insert("a".into(), Arc::new(a));
        let r = run("a*P + Q", &b);
        assert!(r.fredholm);
        assert!(r.min_abs_det > 1e-3);
    }
}
