use serde::{Deserialize, Serialize};

use super::curve::{CurveModel, CurvePoint};
use crate::error::{Error, Result};

/// How `p(t)` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExponentSpec {
    Constant { value: f64 },
    /// Piecewise constant in the curve parameter: `values[i]` on
    /// `[breaks[i], breaks[i + 1])`, cyclically.
    Piecewise { breaks: Vec<f64>, values: Vec<f64> },
    /// Periodic linear interpolation of `values` at parameters `u`.
    Sampled { u: Vec<f64>, values: Vec<f64> },
    /// `base + amplitude * min(1, 1 / (1 - log|tau - c|))` around the curve
    /// point with parameter `center`.
    LogModulus { base: f64, amplitude: f64, center: f64 },
    /// `q = p / (p - 1)` of the inner exponent.
    Conjugate { inner: Box<ExponentSpec> },
}

/// A variable exponent resolved against a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFunction {
    spec: ExponentSpec,
    center: Option<CurvePoint>,
    ess_inf: f64,
    ess_sup: f64,
    dini_constant: f64,
}

impl ExponentFunction {
    pub fn constant(value: f64) -> Result<Self> {
        check_value(value)?;
        Ok(ExponentFunction {
            spec: ExponentSpec::Constant { value },
            center: None,
            ess_inf: value,
            ess_sup: value,
            dini_constant: 0.0,
        })
    }

    /// Resolves `spec` on `curve`; essential bounds are taken over the curve
    /// nodes, and `dini_constant` is the stored modulus constant `A`.
    pub fn new(spec: ExponentSpec, curve: &CurveModel, dini_constant: f64) -> Result<Self> {
        if !(dini_constant.is_finite() && dini_constant >= 0.0) {
            return Err(Error::InvalidArgument("Dini-Lipschitz constant must be finite and >= 0".into()));
        }
        validate_spec(&spec)?;
        let center = match &spec {
            ExponentSpec::LogModulus { center, .. } => Some(curve.point(*center)),
            _ => None,
        };
        let mut f = ExponentFunction { spec, center, ess_inf: f64::INFINITY, ess_sup: 0.0, dini_constant };
        for node in curve.nodes() {
            let v = f.eval_raw(node);
            check_value(v)?;
            f.ess_inf = f.ess_inf.min(v);
            f.ess_sup = f.ess_sup.max(v);
        }
        if let ExponentSpec::Piecewise { values, .. } = &f.spec {
            f.ess_inf = values.iter().copied().fold(f64::INFINITY, f64::min);
            f.ess_sup = values.iter().copied().fold(0.0, f64::max);
        }
        Ok(f)
    }

    pub fn spec(&self) -> &ExponentSpec {
        &self.spec
    }

    pub fn ess_inf(&self) -> f64 {
        self.ess_inf
    }

    pub fn ess_sup(&self) -> f64 {
        self.ess_sup
    }

    pub fn dini_constant(&self) -> f64 {
        self.dini_constant
    }

    /// Curve parameters where `p` is least regular: breaks, knots, centre.
    pub fn feature_points(&self) -> Vec<f64> {
        fn walk(spec: &ExponentSpec, centre: Option<f64>) -> Vec<f64> {
            match spec {
                ExponentSpec::Constant { .. } => Vec::new(),
                ExponentSpec::Piecewise { breaks, .. } => breaks.clone(),
                ExponentSpec::Sampled { u, .. } => u.clone(),
                ExponentSpec::LogModulus { .. } => centre.into_iter().collect(),
                ExponentSpec::Conjugate { inner } => walk(inner, centre),
            }
        }
        walk(&self.spec, self.center.map(|c| c.u))
    }

    /// `p(t)` at a curve point.
    pub fn at(&self, t: &CurvePoint) -> f64 {
        self.eval_raw(t)
    }

    fn eval_raw(&self, t: &CurvePoint) -> f64 {
        eval_spec(&self.spec, self.center.as_ref(), t)
    }
}

fn check_value(v: f64) -> Result<()> {
    if v.is_finite() && v > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent { value: v })
    }
}

fn validate_spec(spec: &ExponentSpec) -> Result<()> {
    match spec {
        ExponentSpec::Constant { value } => check_value(*value),
        ExponentSpec::Piecewise { breaks, values } | ExponentSpec::Sampled { u: breaks, values } => {
            if breaks.is_empty() || breaks.len() != values.len() {
                return Err(Error::LengthMismatch { expected: breaks.len(), found: values.len() });
            }
            if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks[0] < 0.0 || breaks[breaks.len() - 1] >= 1.0 {
                return Err(Error::InvalidArgument("parameters must increase within [0, 1)".into()));
            }
            values.iter().try_for_each(|v| check_value(*v))
        }
        ExponentSpec::LogModulus { base, amplitude, center } => {
            if !(center.is_finite() && amplitude.is_finite()) {
                return Err(Error::NonFinite("log-modulus parameters"));
            }
            check_value(*base)?;
            check_value(base + amplitude.min(0.0))
        }
        ExponentSpec::Conjugate { inner } => validate_spec(inner),
    }
}

fn eval_spec(spec: &ExponentSpec, center: Option<&CurvePoint>, t: &CurvePoint) -> f64 {
    match spec {
        ExponentSpec::Constant { value } => *value,
        ExponentSpec::Piecewise { breaks, values } => {
            let u = t.u.rem_euclid(1.0);
            let i = breaks.partition_point(|b| *b <= u);
            if i == 0 {
                values[values.len() - 1]
            } else {
                values[i - 1]
            }
        }
        ExponentSpec::Sampled { u: knots, values } => {
            let u = t.u.rem_euclid(1.0);
            let m = knots.len();
            if m == 1 {
                return values[0];
            }
            let i = knots.partition_point(|k| *k <= u);
            let (a, b) = if i == 0 {
                ((knots[m - 1] - 1.0, values[m - 1]), (knots[0], values[0]))
            } else if i == m {
                ((knots[m - 1], values[m - 1]), (knots[0] + 1.0, values[0]))
            } else {
                ((knots[i - 1], values[i - 1]), (knots[i], values[i]))
            };
            a.1 + (b.1 - a.1) * (u - a.0) / (b.0 - a.0)
        }
        ExponentSpec::LogModulus { base, amplitude, .. } => {
            let c = center.expect("log-modulus exponent resolved without a center");
            let d = (t.z - c.z).norm();
            let bump = if d == 0.0 { 0.0 } else { (1.0 / (1.0 - d.ln())).min(1.0) };
            base + amplitude * bump
        }
        ExponentSpec::Conjugate { inner } => {
            let p = eval_spec(inner, center, t);
            p / (p - 1.0)
        }
    }
}

fn conj(p: f64) -> f64 {
    p / (p - 1.0)
}

/// `q(t) = p(t) / (p(t) - 1)`.
///
/// The modulus constant transfers as `A / (ess_inf p - 1)^2`, since
/// `|q(s) - q(t)| = |p(s) - p(t)| / ((p(s) - 1)(p(t) - 1))`.
pub fn conjugate_exponent(p: &ExponentFunction) -> Result<ExponentFunction> {
    check_value(p.ess_inf)?;
    let spec = match &p.spec {
        ExponentSpec::Constant { value } => ExponentSpec::Constant { value: conj(*value) },
        ExponentSpec::Piecewise { breaks, values } => ExponentSpec::Piecewise {
            breaks: breaks.clone(),
            values: values.iter().map(|v| conj(*v)).collect(),
        },
        ExponentSpec::Sampled { u, values } => ExponentSpec::Sampled {
            u: u.clone(),
            values: values.iter().map(|v| conj(*v)).collect(),
        },
        ExponentSpec::Conjugate { inner } => (**inner).clone(),
        other => ExponentSpec::Conjugate { inner: Box::new(other.clone()) },
    };
    let (lo, hi) = (conj(p.ess_sup), conj(p.ess_inf));
    check_value(lo)?;
    Ok(ExponentFunction {
        spec,
        center: p.center,
        ess_inf: lo,
        ess_sup: hi,
        dini_constant: p.dini_constant / (p.ess_inf - 1.0).powi(2),
    })
}
