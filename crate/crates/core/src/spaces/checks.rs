use num_complex::Complex64;
use serde::Serialize;

use super::curve::CurveModel;
use super::exponent::ExponentFunction;
use super::norm::{diameter, min_spacing};
use super::weight::KhvedelidzeWeight;
use crate::error::{Error, Result};

/// Tolerance for "weight point lies on the curve".
pub const ON_CURVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiniReport {
    pub pass: bool,
    /// Largest `|p(s) - p(t)| * (-log|s - t|)` over the checked pairs.
    pub worst_a: f64,
    pub pairs_checked: usize,
    /// No pair with `|s - t| < 1/2` was available.
    pub vacuous: bool,
}

/// Probe distances around the exponent's feature points: `2^-k`.
const PROBE_OCTAVES: std::ops::RangeInclusive<i32> = 3..=44;

/// Samples pairs with `|s - t| < 1/2` and compares the required modulus
/// constant with the stored one. Pairs straddling the exponent's feature
/// points (breaks, knots, log-modulus centre) at geometric distances come
/// first, then node pairs, nearest index offsets first.
pub fn dini_lipschitz_check(curve: &CurveModel, p: &ExponentFunction, pair_budget: usize) -> Result<DiniReport> {
    if pair_budget == 0 {
        return Err(Error::InvalidArgument("pair budget must be at least 1".into()));
    }
    let nodes = curve.nodes();
    let n = nodes.len();
    let values: Vec<f64> = nodes.iter().map(|t| p.at(t)).collect();
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    let mut pair = |a: f64, b: f64, d: f64| {
        worst = worst.max((a - b).abs() * (-d.ln()));
        checked += 1;
        checked >= pair_budget
    };
    for u in p.feature_points() {
        for k in PROBE_OCTAVES {
            let h = (-k as f64).exp2();
            let (a, b, c) = (curve.point(u - h), curve.point(u), curve.point(u + h));
            for (x, y) in [(&a, &c), (&a, &b), (&b, &c)] {
                let d = (x.z - y.z).norm();
                if d < 0.5 && d > 0.0 && pair(p.at(x), p.at(y), d) {
                    return Ok(DiniReport { pass: worst <= p.dini_constant(), worst_a: worst, pairs_checked: checked, vacuous: false });
                }
            }
        }
    }
    let max_offset = if curve.is_closed() { n / 2 } else { n - 1 };
    'outer: for k in 1..=max_offset {
        for i in 0..n {
            let j = i + k;
            if j >= n && !curve.is_closed() {
                break;
            }
            let j = j % n;
            if curve.is_closed() && 2 * k == n && j < i {
                continue;
            }
            let d = (nodes[i].z - nodes[j].z).norm();
            if !(d < 0.5) || d == 0.0 {
                continue;
            }
            if pair(values[i], values[j], d) {
                break 'outer;
            }
        }
    }
    Ok(DiniReport { pass: worst <= p.dini_constant(), worst_a: worst, pairs_checked: checked, vacuous: checked == 0 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KhvedelidzeReport {
    pub bounded: bool,
    /// `(k, 1/p(tau_k) + lambda_k)` for every point outside `(0, 1)`.
    pub violations: Vec<(usize, f64)>,
    pub values: Vec<f64>,
}

/// Exact open-interval test `0 < 1/p(tau_k) + lambda_k < 1` for all `k`.
pub fn khvedelidze_check(curve: &CurveModel, p: &ExponentFunction, w: &KhvedelidzeWeight) -> Result<KhvedelidzeReport> {
    let mut values = Vec::with_capacity(w.points().len());
    let mut violations = Vec::new();
    for (k, wp) in w.points().iter().enumerate() {
        let on = curve.point(wp.at.u);
        let dist = (on.z - wp.at.z).norm();
        if dist > ON_CURVE_TOL * curve.length().max(1.0) {
            return Err(Error::OffCurve { distance: dist });
        }
        let v = 1.0 / p.at(&wp.at) + wp.lambda;
        if !(0.0 < v && v < 1.0) {
            violations.push((k, v));
        }
        values.push(v);
    }
    Ok(KhvedelidzeReport { bounded: violations.is_empty(), violations, values })
}

/// Length of the part of segment `[a, b]` inside the open disk `|z - c| < r`.
fn segment_in_disk(a: Complex64, b: Complex64, c: Complex64, r: f64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return 0.0;
    }
    let f = a - c;
    // |f + t d|^2 = r^2  =>  len2 t^2 + 2 (f.d) t + |f|^2 - r^2 = 0
    let bq = (f * d.conj()).re;
    let cq = f.norm_sqr() - r * r;
    let disc = bq * bq - len2 * cq;
    if disc <= 0.0 {
        return 0.0;
    }
    let sq = disc.sqrt();
    let t0 = ((-bq - sq) / len2).max(0.0);
    let t1 = ((-bq + sq) / len2).min(1.0);
    if t1 <= t0 {
        0.0
    } else {
        (t1 - t0) * len2.sqrt()
    }
}

/// Max over node centres and a geometric radius grid of `|Gamma(t, R)| / R`.
///
/// Radii are `R_j = D (h / D)^{j / (grid - 1)}` between the smallest node
/// spacing `h` and the bounding-box diagonal `D`, so the grid for
/// `2 * grid - 1` contains the grid for `grid`.
pub fn carleson_estimate(curve: &CurveModel, grid: usize) -> Result<f64> {
    if grid < 2 {
        return Err(Error::InvalidArgument("grid must be at least 2".into()));
    }
    let r_max = diameter(curve);
    let r_min = min_spacing(curve);
    let segs: Vec<(Complex64, Complex64)> = curve.segments().collect();
    let mut best: f64 = 0.0;
    for t in curve.nodes() {
        for j in 0..grid {
            let r = r_max * (r_min / r_max).powf(j as f64 / (grid - 1) as f64);
            let inside: f64 = segs.iter().map(|&(a, b)| segment_in_disk(a, b, t.z, r)).sum();
            best = best.max(inside / r);
        }
    }
    Ok(best)
}

/// Least-squares estimate of the whirl exponent at the curve point with
/// parameter `t`: the slope of the unwound `arg(tau - t)` against
/// `-log|tau - t|` over nodes within `window`, with a separate intercept for
/// each approach direction.
pub fn estimate_whirl(curve: &CurveModel, t: f64, window: f64) -> Result<f64> {
    if !(window > 0.0) {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let center = curve.point(t);
    let nodes = curve.nodes();
    let n = nodes.len();
    // Nearest node in parameter.
    let dist_u = |u: f64| {
        let d = (u - center.u).abs();
        if curve.is_closed() { d.min(1.0 - d) } else { d }
    };
    let start = (0..n).min_by(|&a, &b| dist_u(nodes[a].u).total_cmp(&dist_u(nodes[b].u))).unwrap();
    let mut groups: Vec<Vec<(f64, f64)>> = Vec::new();
    for dir in [1isize, -1] {
        let mut pts = Vec::new();
        let mut prev_arg: Option<f64> = None;
        for step in 0..n as isize {
            let idx = start as isize + dir * step;
            let idx = if curve.is_closed() {
                idx.rem_euclid(n as isize) as usize
            } else if idx < 0 || idx >= n as isize {
                break;
            } else {
                idx as usize
            };
            if step > 0 && idx == start {
                break;
            }
            let v = nodes[idx].z - center.z;
            let r = v.norm();
            if r == 0.0 {
                continue;
            }
            if r >= window {
                if step == 0 {
                    continue;
                }
                break;
            }
            // Only nodes on this side of the centre.
            if step == 0 {
                let ahead = if curve.is_closed() {
                    (nodes[idx].u - center.u).rem_euclid(1.0) < 0.5
                } else {
                    nodes[idx].u > center.u
                };
                if ahead != (dir > 0) {
                    continue;
                }
            }
            let raw = v.arg();
            let a = match prev_arg {
                None => raw,
                Some(pa) => pa + (raw - pa + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI,
            };
            prev_arg = Some(a);
            pts.push((-r.ln(), a));
        }
        if !pts.is_empty() {
            groups.push(pts);
        }
    }
    let usable: usize = groups.iter().map(|g| g.len()).sum();
    if usable < 3 {
        return Err(Error::TooFewNodes { needed: 3, found: usable });
    }
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for g in &groups {
        let m = g.len() as f64;
        let mx = g.iter().map(|p| p.0).sum::<f64>() / m;
        let my = g.iter().map(|p| p.1).sum::<f64>() / m;
        for &(x, y) in g {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
    }
    if sxx == 0.0 {
        return Err(Error::TooFewNodes { needed: 3, found: 0 });
    }
    Ok(sxy / sxx)
}
