//! Curves, variable exponents, power weights, Luxemburg-Nakano norms, and
//! the boundedness and regularity checkers.

mod checks;
mod curve;
mod exponent;
mod norm;
mod weight;

pub use checks::{
    carleson_estimate, dini_lipschitz_check, estimate_whirl, khvedelidze_check, DiniReport,
    KhvedelidzeReport, ON_CURVE_TOL,
};
pub use curve::{same_param, CurveFamily, CurveModel, CurvePoint, WhirlMark, PARAM_TOL};
pub use exponent::{conjugate_exponent, ExponentFunction, ExponentSpec};
pub use norm::{ap_estimate, luxemburg_norm, modular, modular_raw, weighted_norm, SampledFunction, NORM_TOL};
pub use weight::{KhvedelidzeWeight, WeightPoint};

/// Curve, exponent, and weight defining the space `L^{p(.)}_rho(Gamma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    pub curve: CurveModel,
    pub exponent: ExponentFunction,
    pub weight: KhvedelidzeWeight,
}

impl Space {
    pub fn new(curve: CurveModel, exponent: ExponentFunction, weight: KhvedelidzeWeight) -> Self {
        Space { curve, exponent, weight }
    }

    pub fn p_at(&self, u: f64) -> f64 {
        self.exponent.at(&self.curve.point(u))
    }

    pub fn delta_at(&self, u: f64) -> f64 {
        self.curve.delta_at(u)
    }

    pub fn lambda_at(&self, u: f64) -> f64 {
        self.weight.lambda_at(u)
    }

    /// Class parameter `r(t) = 1/p(t) + lambda(t)` of the spiral fibre over `t`.
    pub fn r_at(&self, u: f64) -> f64 {
        1.0 / self.p_at(u) + self.lambda_at(u)
    }

    pub fn khvedelidze(&self) -> crate::Result<KhvedelidzeReport> {
        khvedelidze_check(&self.curve, &self.exponent, &self.weight)
    }

    /// Fails with [`crate::Error::NotBounded`] unless the weight condition holds.
    pub fn require_bounded(&self) -> crate::Result<()> {
        let rep = self.khvedelidze()?;
        if rep.bounded {
            Ok(())
        } else {
            let list: Vec<String> = rep.violations.iter().map(|(k, v)| format!("k={k}: 1/p+lambda={v}")).collect();
            Err(crate::Error::NotBounded(list.join(", ")))
        }
    }
}
