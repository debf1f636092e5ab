use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for identifying two curve parameters.
pub const PARAM_TOL: f64 = 1e-9;

/// A point of the curve together with its parameter `u` in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub u: f64,
    pub z: Complex64,
}

/// Named curve families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CurveFamily {
    Circle {
        center: Complex64,
        radius: f64,
    },
    Ellipse {
        center: Complex64,
        semi_x: f64,
        semi_y: f64,
    },
    Polyline {
        points: Vec<Complex64>,
        #[serde(default = "default_closed")]
        closed: bool,
    },
    /// Closed curve made of two interleaved logarithmic spiral arms meeting
    /// at a whirl point with exponent `delta`, closed by a semicircle of the
    /// given radius. Translated so that the origin lies inside.
    SpiralPatch {
        delta: f64,
        #[serde(default = "default_radius")]
        radius: f64,
    },
}

fn default_closed() -> bool {
    true
}

fn default_radius() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhirlMark {
    pub u: f64,
    pub delta: f64,
}

/// Discretized curve: nodes, per-node arc measure, and whirl data.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveModel {
    family: CurveFamily,
    closed: bool,
    /// Vertices and parameters of the interpolating polyline (polyline-based
    /// families only).
    vertices: Vec<CurvePoint>,
    nodes: Vec<CurvePoint>,
    measure: Vec<f64>,
    whirl: Vec<WhirlMark>,
}

impl CurveModel {
    pub fn circle(center: Complex64, radius: f64, node_count: usize) -> Result<Self> {
        Self::from_family(CurveFamily::Circle { center, radius }, node_count)
    }

    pub fn unit_circle(node_count: usize) -> Result<Self> {
        Self::circle(Complex64::new(0.0, 0.0), 1.0, node_count)
    }

    pub fn ellipse(center: Complex64, semi_x: f64, semi_y: f64, node_count: usize) -> Result<Self> {
        Self::from_family(CurveFamily::Ellipse { center, semi_x, semi_y }, node_count)
    }

    pub fn polyline(points: Vec<Complex64>, closed: bool, node_count: usize) -> Result<Self> {
        Self::from_family(CurveFamily::Polyline { points, closed }, node_count)
    }

    pub fn spiral_patch(delta: f64, radius: f64, node_count: usize) -> Result<Self> {
        Self::from_family(CurveFamily::SpiralPatch { delta, radius }, node_count)
    }

    pub fn from_family(family: CurveFamily, node_count: usize) -> Result<Self> {
        if node_count < 3 && !matches!(family, CurveFamily::Polyline { .. }) {
            return Err(Error::TooFewNodes { needed: 3, found: node_count });
        }
        let model = match &family {
            CurveFamily::Circle { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidCurve("radius must be positive".into()));
                }
                let (c, r) = (*center, *radius);
                Self::analytic(family.clone(), node_count, |u| {
                    (c + Complex64::from_polar(r, TAU * u), TAU * r)
                })
            }
            CurveFamily::Ellipse { center, semi_x, semi_y } => {
                if !(*semi_x > 0.0 && *semi_y > 0.0 && semi_x.is_finite() && semi_y.is_finite()) {
                    return Err(Error::InvalidCurve("semi-axes must be positive".into()));
                }
                let (c, a, b) = (*center, *semi_x, *semi_y);
                Self::analytic(family.clone(), node_count, |u| {
                    let th = TAU * u;
                    let z = c + Complex64::new(a * th.cos(), b * th.sin());
                    let speed = TAU * (a * a * th.sin().powi(2) + b * b * th.cos().powi(2)).sqrt();
                    (z, speed)
                })
            }
            CurveFamily::Polyline { points, closed } => {
                Self::from_vertices(family.clone(), points.clone(), *closed, node_count)?
            }
            CurveFamily::SpiralPatch { delta, radius } => {
                if !(delta.is_finite() && radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidCurve("spiral patch needs finite delta, radius > 0".into()));
                }
                Self::spiral_patch_model(family.clone(), *delta, *radius, node_count)?
            }
        };
        model.validate()?;
        Ok(model)
    }

    fn analytic(family: CurveFamily, n: usize, f: impl Fn(f64) -> (Complex64, f64)) -> Self {
        let mut nodes = Vec::with_capacity(n);
        let mut measure = Vec::with_capacity(n);
        for i in 0..n {
            let u = i as f64 / n as f64;
            let (z, speed) = f(u);
            nodes.push(CurvePoint { u, z });
            // Periodic trapezoid rule for the arc-length measure.
            measure.push(speed / n as f64);
        }
        CurveModel { family, closed: true, vertices: Vec::new(), nodes, measure, whirl: Vec::new() }
    }

    fn from_vertices(family: CurveFamily, points: Vec<Complex64>, closed: bool, node_count: usize) -> Result<Self> {
        if points.len() < 2 || (closed && points.len() < 3) {
            return Err(Error::TooFewNodes { needed: if closed { 3 } else { 2 }, found: points.len() });
        }
        if points.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("polyline vertex"));
        }
        let m = points.len();
        let seg_count = if closed { m } else { m - 1 };
        let seg_len: Vec<f64> = (0..seg_count).map(|i| (points[(i + 1) % m] - points[i]).norm()).collect();
        let total: f64 = seg_len.iter().sum();
        if !(total > 0.0) || seg_len.contains(&0.0) {
            return Err(Error::InvalidCurve("polyline has repeated vertices".into()));
        }
        let mut vertices = Vec::with_capacity(m);
        let mut acc = 0.0;
        for (i, z) in points.iter().enumerate() {
            vertices.push(CurvePoint { u: acc / total, z: *z });
            if i < seg_count {
                acc += seg_len[i];
            }
        }
        let mut nodes = Vec::new();
        for i in 0..seg_count {
            let k = ((seg_len[i] / total * node_count as f64).round() as usize).max(1);
            let (a, b) = (vertices[i], vertices[(i + 1) % m]);
            let ub = if i + 1 == m { 1.0 } else { b.u };
            for j in 0..k {
                let t = j as f64 / k as f64;
                nodes.push(CurvePoint { u: a.u + (ub - a.u) * t, z: a.z + (b.z - a.z) * t });
            }
        }
        if !closed {
            nodes.push(vertices[m - 1]);
        }
        let measure = chord_measure(&nodes, closed);
        Ok(CurveModel { family, closed, vertices, nodes, measure, whirl: Vec::new() })
    }

    fn spiral_patch_model(family: CurveFamily, delta: f64, radius: f64, node_count: usize) -> Result<Self> {
        let per_part = (node_count / 3).max(8);
        let depth = 12.0;
        // Arm A runs inward from radius R at angle 0 to the whirl point; arm B is
        // its point reflection, run outward.
        let arm = |k: usize| -> Complex64 {
            let s = depth * k as f64 / per_part as f64;
            let rho = radius * (-s).exp();
            Complex64::from_polar(rho, -delta * (rho / radius).ln())
        };
        let mut pts = Vec::with_capacity(3 * per_part + 1);
        for k in 0..per_part {
            pts.push(arm(k));
        }
        pts.push(Complex64::new(0.0, 0.0));
        for k in (0..per_part).rev() {
            pts.push(-arm(k));
        }
        // Lower semicircle from -R back towards +R.
        for k in 1..per_part {
            let th = PI + PI * k as f64 / per_part as f64;
            pts.push(Complex64::from_polar(radius, th));
        }
        let interior = Complex64::new(0.0, -0.9 * radius);
        for z in pts.iter_mut() {
            *z -= interior;
        }
        let mut model = Self::from_vertices(family, pts.clone(), true, 0)?;
        if model.winding_about(Complex64::new(0.0, 0.0))? < 0 {
            pts.reverse();
            model = Self::from_vertices(model.family.clone(), pts.clone(), true, 0)?;
        }
        let whirl_z = -interior;
        let whirl_u = model
            .vertices
            .iter()
            .find(|v| (v.z - whirl_z).norm() < 1e-14)
            .map(|v| v.u)
            .ok_or_else(|| Error::InvalidCurve("whirl point lost".into()))?;
        model.whirl.push(WhirlMark { u: whirl_u, delta });
        Ok(model)
    }

    /// Checks closedness, sampled simplicity, and (for closed curves) that
    /// the origin lies in the bounded component with positive orientation.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if n < 3 {
            return Err(Error::TooFewNodes { needed: 3, found: n });
        }
        if self.closed {
            let gap = (self.point(1.0 - 1e-12).z - self.point(0.0).z).norm();
            if gap > 1e-6 * self.length().max(1.0) {
                return Err(Error::InvalidCurve("parametrization is not closed".into()));
            }
        }
        let spacing: Vec<f64> = (0..n)
            .map(|i| {
                let next = if i + 1 < n { Some(i + 1) } else if self.closed { Some(0) } else { None };
                let prev = if i > 0 { Some(i - 1) } else if self.closed { Some(n - 1) } else { None };
                [next, prev]
                    .iter()
                    .flatten()
                    .map(|&j| (self.nodes[j].z - self.nodes[i].z).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        for i in 0..n {
            for j in (i + 2)..n {
                if self.closed && i == 0 && j == n - 1 {
                    continue;
                }
                let d = (self.nodes[i].z - self.nodes[j].z).norm();
                if d < 0.25 * spacing[i].min(spacing[j]) {
                    return Err(Error::InvalidCurve(format!(
                        "nodes {i} and {j} nearly coincide; curve is not simple"
                    )));
                }
            }
        }
        if let Some((i, j)) = crossing_pair(&self.vertices, self.closed) {
            return Err(Error::InvalidCurve(format!("edges {i} and {j} cross; curve is not simple")));
        }
        if self.closed && self.winding_about(Complex64::new(0.0, 0.0))? != 1 {
            return Err(Error::InvalidCurve(
                "origin must lie inside a counter-clockwise curve".into(),
            ));
        }
        Ok(())
    }

    pub fn family(&self) -> &CurveFamily {
        &self.family
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn nodes(&self) -> &[CurvePoint] {
        &self.nodes
    }

    /// Arc-length quadrature weights, one per node.
    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn length(&self) -> f64 {
        self.measure.iter().sum()
    }

    /// Curve point at parameter `u` (wrapped into `[0, 1)` for closed curves).
    pub fn point(&self, u: f64) -> CurvePoint {
        let u = if self.closed { u.rem_euclid(1.0) } else { u.clamp(0.0, 1.0) };
        let z = match &self.family {
            CurveFamily::Circle { center, radius } => center + Complex64::from_polar(*radius, TAU * u),
            CurveFamily::Ellipse { center, semi_x, semi_y } => {
                let th = TAU * u;
                center + Complex64::new(semi_x * th.cos(), semi_y * th.sin())
            }
            _ => self.interpolate_vertices(u),
        };
        CurvePoint { u, z }
    }

    fn interpolate_vertices(&self, u: f64) -> Complex64 {
        let v = &self.vertices;
        let m = v.len();
        let idx = v.partition_point(|p| p.u <= u).saturating_sub(1);
        let a = v[idx];
        let (bz, bu) = if idx + 1 < m {
            (v[idx + 1].z, v[idx + 1].u)
        } else if self.closed {
            (v[0].z, 1.0)
        } else {
            return a.z;
        };
        if bu <= a.u {
            return a.z;
        }
        a.z + (bz - a.z) * ((u - a.u) / (bu - a.u))
    }

    /// Segments of the node polyline, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.nodes.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |i| (self.nodes[i].z, self.nodes[(i + 1) % n].z))
    }

    pub fn whirl_marks(&self) -> &[WhirlMark] {
        &self.whirl
    }

    /// Marks a whirl point with spiral exponent `delta` (replacing any mark at `u`).
    pub fn set_whirl(&mut self, u: f64, delta: f64) -> Result<()> {
        if !(u.is_finite() && delta.is_finite()) {
            return Err(Error::NonFinite("whirl mark"));
        }
        let u = u.rem_euclid(1.0);
        self.whirl.retain(|m| !same_param(m.u, u));
        self.whirl.push(WhirlMark { u, delta });
        self.whirl.sort_by(|a, b| a.u.total_cmp(&b.u));
        Ok(())
    }

    /// `delta(t)`: the marked value at `u`, zero elsewhere.
    pub fn delta_at(&self, u: f64) -> f64 {
        self.whirl.iter().find(|m| same_param(m.u, u)).map_or(0.0, |m| m.delta)
    }

    /// Winding number of the node polygon about `z0`.
    pub fn winding_about(&self, z0: Complex64) -> Result<i64> {
        let mut total = 0.0;
        for (a, b) in self.segments() {
            let (da, db) = (a - z0, b - z0);
            if da.norm() == 0.0 {
                return Err(Error::InvalidCurve("curve passes through the reference point".into()));
            }
            total += (db / da).arg();
        }
        if !self.closed {
            return Err(Error::InvalidCurve("winding requires a closed curve".into()));
        }
        Ok((total / TAU).round() as i64)
    }

    /// Nearest point of the node polyline to `z`: (distance, parameter).
    pub fn nearest(&self, z: Complex64) -> (f64, f64) {
        let n = self.nodes.len();
        let count = if self.closed { n } else { n - 1 };
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..count {
            let a = self.nodes[i];
            let b = self.nodes[(i + 1) % n];
            let bu = if i + 1 == n { 1.0 } else { b.u };
            let d = b.z - a.z;
            let t = (((z - a.z) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
            let dist = (a.z + d * t - z).norm();
            if dist < best.0 {
                best = (dist, a.u + (bu - a.u) * t);
            }
        }
        best
    }

    /// Locates `z` on the curve, failing when it is farther than `tol`.
    pub fn locate(&self, z: Complex64, tol: f64) -> Result<CurvePoint> {
        let (dist, u) = self.nearest(z);
        if dist > tol {
            return Err(Error::OffCurve { distance: dist });
        }
        Ok(CurvePoint { u: if self.closed { u.rem_euclid(1.0) } else { u }, z })
    }
}

fn chord_measure(nodes: &[CurvePoint], closed: bool) -> Vec<f64> {
    let n = nodes.len();
    let seg = |i: usize| (nodes[(i + 1) % n].z - nodes[i].z).norm();
    (0..n)
        .map(|i| {
            let left = if i > 0 { seg(i - 1) } else if closed { seg(n - 1) } else { 0.0 };
            let right = if i + 1 < n || closed { seg(i) } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// First pair of non-adjacent polygon edges that properly cross.
fn crossing_pair(vertices: &[CurvePoint], closed: bool) -> Option<(usize, usize)> {
    let n = vertices.len();
    if n < 4 {
        return None;
    }
    let edges = if closed { n } else { n - 1 };
    let edge = |i: usize| (vertices[i].z, vertices[(i + 1) % n].z);
    for i in 0..edges {
        let (a, b) = edge(i);
        for j in (i + 2)..edges {
            if closed && i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = edge(j);
            let d1 = cross(b - a, c - a);
            let d2 = cross(b - a, d - a);
            let d3 = cross(d - c, a - c);
            let d4 = cross(d - c, b - c);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                return Some((i, j));
            }
        }
    }
    None
}

/// Whether two parameters denote the same point of a closed curve.
pub fn same_param(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(1.0);
    d < PARAM_TOL || d > 1.0 - PARAM_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_measure_sums_to_length() {
        let c = CurveModel::unit_circle(256).unwrap();
        assert!((c.length() - TAU).abs() < 1e-12);
        assert!(c.measure().iter().all(|&w| w > 0.0));
        assert_eq!(c.winding_about(Complex64::new(0.0, 0.0)).unwrap(), 1);
    }

    #[test]
    fn ellipse_perimeter() {
        // Perimeter of the (2, 1) ellipse: 9.688448220547675...
        let c = CurveModel::ellipse(Complex64::new(0.0, 0.0), 2.0, 1.0, 512).unwrap();
        assert!((c.length() - 9.688_448_220_547_675).abs() < 1e-9);
    }

    #[test]
    fn clockwise_or_excluding_origin_is_rejected() {
        let square = vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(-1.0, -1.0),
            Complex64::new(1.0, -1.0),
        ];
        assert!(CurveModel::polyline(square.clone(), true, 64).is_ok());
        let mut cw = square.clone();
        cw.reverse();
        assert!(CurveModel::polyline(cw, true, 64).is_err());
        assert!(CurveModel::circle(Complex64::new(3.0, 0.0), 1.0, 64).is_err());
    }

    #[test]
    fn self_intersecting_polyline_is_rejected() {
        let bowtie = vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(-1.0, -1.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(1.0, -1.0),
        ];
        assert!(CurveModel::polyline(bowtie, true, 200).is_err());
    }

    #[test]
    fn polyline_point_interpolation() {
        let square = vec![
            Complex64::new(1.0, -1.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(-1.0, -1.0),
        ];
        let c = CurveModel::polyline(square, true, 64).unwrap();
        assert!((c.length() - 8.0).abs() < 1e-12);
        assert!((c.point(0.125).z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((c.point(0.875).z - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        let p = c.locate(Complex64::new(0.3, 1.0), 1e-9).unwrap();
        assert!((c.point(p.u).z - Complex64::new(0.3, 1.0)).norm() < 1e-12);
        assert!(c.locate(Complex64::new(0.0, 0.0), 1e-9).is_err());
    }

    #[test]
    fn spiral_patch_is_valid_and_marked() {
        for delta in [-2.0, 0.0, 0.7, 2.0] {
            let c = CurveModel::spiral_patch(delta, 1.0, 900).unwrap();
            assert_eq!(c.whirl_marks().len(), 1);
            let m = c.whirl_marks()[0];
            assert_eq!(c.delta_at(m.u), delta);
            assert_eq!(c.delta_at(m.u + 0.1), 0.0);
        }
    }
}
