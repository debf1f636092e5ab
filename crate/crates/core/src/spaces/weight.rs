use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::curve::{same_param, CurveModel, CurvePoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPoint {
    pub at: CurvePoint,
    pub lambda: f64,
}

/// Power weight `rho(t) = prod_k |t - tau_k|^{lambda_k}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KhvedelidzeWeight {
    points: Vec<WeightPoint>,
}

impl KhvedelidzeWeight {
    pub fn new(points: Vec<WeightPoint>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !(p.lambda.is_finite() && p.at.u.is_finite() && p.at.z.re.is_finite() && p.at.z.im.is_finite()) {
                return Err(Error::NonFinite("weight point"));
            }
            if points[..i].iter().any(|q| same_param(q.at.u, p.at.u)) {
                return Err(Error::InvalidArgument(format!("weight point {i} repeats an earlier point")));
            }
        }
        Ok(KhvedelidzeWeight { points })
    }

    /// Builds a weight from `(u, lambda)` pairs on `curve`.
    pub fn on_curve(curve: &CurveModel, pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(u, lambda)| WeightPoint { at: curve.point(u), lambda })
                .collect(),
        )
    }

    pub fn unweighted() -> Self {
        Self::default()
    }

    pub fn points(&self) -> &[WeightPoint] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `lambda(t)`: `lambda_k` at `tau_k`, zero elsewhere.
    pub fn lambda_at(&self, u: f64) -> f64 {
        self.points.iter().find(|p| same_param(p.at.u, u)).map_or(0.0, |p| p.lambda)
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        self.points.iter().map(|p| (z - p.at.z).norm().powf(p.lambda)).product()
    }
}
