use num_complex::Complex64;

use super::curve::{CurveModel, CurvePoint};
use super::exponent::{conjugate_exponent, ExponentFunction};
use super::weight::KhvedelidzeWeight;
use crate::error::{Error, Result};

/// Default tolerance on the modular at the computed norm.
pub const NORM_TOL: f64 = 1e-10;

/// Function values at curve nodes with their arc-length weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    nodes: Vec<CurvePoint>,
    values: Vec<Complex64>,
    measure: Vec<f64>,
}

impl SampledFunction {
    pub fn new(nodes: Vec<CurvePoint>, values: Vec<Complex64>, measure: Vec<f64>) -> Result<Self> {
        if values.len() != nodes.len() {
            return Err(Error::LengthMismatch { expected: nodes.len(), found: values.len() });
        }
        if measure.len() != nodes.len() {
            return Err(Error::LengthMismatch { expected: nodes.len(), found: measure.len() });
        }
        if measure.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidArgument("quadrature weights must be positive".into()));
        }
        Ok(SampledFunction { nodes, values, measure })
    }

    pub fn on_curve(curve: &CurveModel, f: impl Fn(&CurvePoint) -> Complex64) -> Self {
        SampledFunction {
            nodes: curve.nodes().to_vec(),
            values: curve.nodes().iter().map(f).collect(),
            measure: curve.measure().to_vec(),
        }
    }

    pub fn from_values(curve: &CurveModel, values: Vec<Complex64>) -> Result<Self> {
        Self::new(curve.nodes().to_vec(), values, curve.measure().to_vec())
    }

    pub fn nodes(&self) -> &[CurvePoint] {
        &self.nodes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn map(&self, f: impl Fn(&CurvePoint, Complex64) -> Complex64) -> Self {
        SampledFunction {
            nodes: self.nodes.clone(),
            values: self.nodes.iter().zip(&self.values).map(|(n, v)| f(n, *v)).collect(),
            measure: self.measure.clone(),
        }
    }
}

/// `sum_i |f_i|^{p_i} w_i` over matching node arrays.
pub fn modular_raw(abs_f: &[f64], p: &[f64], measure: &[f64]) -> Result<f64> {
    if p.len() != abs_f.len() {
        return Err(Error::LengthMismatch { expected: abs_f.len(), found: p.len() });
    }
    if measure.len() != abs_f.len() {
        return Err(Error::LengthMismatch { expected: abs_f.len(), found: measure.len() });
    }
    Ok(abs_f
        .iter()
        .zip(p)
        .zip(measure)
        .map(|((f, p), w)| if *f == 0.0 { 0.0 } else { f.powf(*p) * w })
        .sum())
}

/// Quadrature value of `m(f, p) = integral |f|^p |dtau|`.
pub fn modular(f: &SampledFunction, p: &ExponentFunction) -> Result<f64> {
    let (abs_f, pv) = prepare(f, p)?;
    modular_raw(&abs_f, &pv, &f.measure)
}

fn prepare(f: &SampledFunction, p: &ExponentFunction) -> Result<(Vec<f64>, Vec<f64>)> {
    if f.values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite("function samples"));
    }
    let abs_f = f.values.iter().map(|v| v.norm()).collect();
    let pv = f.nodes.iter().map(|n| p.at(n)).collect();
    Ok((abs_f, pv))
}

/// Luxemburg-Nakano norm `inf { lambda > 0 : m(f / lambda, p) <= 1 }`.
///
/// Bisection on the strictly decreasing map `lambda -> m(f / lambda, p)`,
/// carried to machine resolution; the returned value satisfies
/// `m(f / lambda, p) <= 1` and is within `tol` of the level set in the
/// modular.
pub fn luxemburg_norm(f: &SampledFunction, p: &ExponentFunction, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let (abs_f, pv) = prepare(f, p)?;
    let fmax = abs_f.iter().copied().fold(0.0, f64::max);
    if fmax == 0.0 {
        return Ok(0.0);
    }
    let m = |lambda: f64| -> f64 {
        abs_f
            .iter()
            .zip(&pv)
            .zip(&f.measure)
            .map(|((a, p), w)| if *a == 0.0 { 0.0 } else { (a / lambda).powf(*p) * w })
            .sum()
    };
    let length: f64 = f.measure.iter().sum();
    // m(f / hi) <= 1 holds for hi = max|f| * max(1, L).
    let mut hi = fmax * length.max(1.0);
    let mut lo = hi;
    while m(lo) <= 1.0 {
        hi = lo;
        lo *= 0.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if m(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Weighted norm `||f rho||` in `L^{p(.)}`.
pub fn weighted_norm(f: &SampledFunction, p: &ExponentFunction, w: &KhvedelidzeWeight, tol: f64) -> Result<f64> {
    let g = f.map(|n, v| v * w.eval(n.z));
    luxemburg_norm(&g, p, tol)
}

/// Grid diagnostic for `sup_{t,R} R^{-1} ||w chi|| ||chi / w||` over balls
/// `Gamma(t, R)` centred at nodes; nodes that coincide with weight points
/// are skipped. A finite lower estimate, not a decision procedure.
pub fn ap_estimate(curve: &CurveModel, p: &ExponentFunction, w: &KhvedelidzeWeight, grid: usize) -> Result<f64> {
    let q = conjugate_exponent(p)?;
    let nodes = curve.nodes();
    let wv: Vec<f64> = nodes.iter().map(|n| w.eval(n.z)).collect();
    let usable: Vec<usize> = (0..nodes.len()).filter(|&i| wv[i].is_finite() && wv[i] > 0.0).collect();
    let r_max = diameter(curve);
    let r_min = min_spacing(curve);
    let centers: Vec<usize> = (0..nodes.len()).step_by((nodes.len() / grid.max(1)).max(1)).collect();
    let mut best: f64 = 0.0;
    for &c in &centers {
        for j in 0..grid.max(2) {
            let r = r_max * (r_min / r_max).powf(j as f64 / (grid.max(2) - 1) as f64);
            let inside: Vec<usize> = usable.iter().copied().filter(|&i| (nodes[i].z - nodes[c].z).norm() < r).collect();
            if inside.is_empty() {
                continue;
            }
            let sub = |vals: Vec<f64>| -> Result<SampledFunction> {
                SampledFunction::new(
                    inside.iter().map(|&i| nodes[i]).collect(),
                    vals.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
                    inside.iter().map(|&i| curve.measure()[i]).collect(),
                )
            };
            let a = luxemburg_norm(&sub(inside.iter().map(|&i| wv[i]).collect())?, p, NORM_TOL)?;
            let b = luxemburg_norm(&sub(inside.iter().map(|&i| 1.0 / wv[i]).collect())?, &q, NORM_TOL)?;
            best = best.max(a * b / r);
        }
    }
    Ok(best)
}

pub(crate) fn diameter(curve: &CurveModel) -> f64 {
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for n in curve.nodes() {
        lo_x = lo_x.min(n.z.re);
        hi_x = hi_x.max(n.z.re);
        lo_y = lo_y.min(n.z.im);
        hi_y = hi_y.max(n.z.im);
    }
    ((hi_x - lo_x).powi(2) + (hi_y - lo_y).powi(2)).sqrt()
}

pub(crate) fn min_spacing(curve: &CurveModel) -> f64 {
    curve
        .segments()
        .map(|(a, b)| (b - a).norm())
        .filter(|l| *l > 0.0)
        .fold(f64::INFINITY, f64::min)
}
