use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{special_points, SweepConfig};
use crate::error::{Error, Result};
use crate::geometry::SpiralSet;
use crate::spaces::Space;
use crate::symbols::PCSymbol;

/// Integer tolerance used by [`classify_jump`].
pub const CLASSIFY_INTEGER_TOL: f64 = 1e-9;

/// `-(1/2pi) arg(rho) + (delta/2pi) log|rho| + r` with `rho = a_minus / a_plus`
/// and the principal argument.
pub fn fredholm_quantity(a_minus: Complex64, a_plus: Complex64, delta: f64, r: f64) -> f64 {
    let rho = a_minus / a_plus;
    -rho.arg() / TAU + delta * rho.norm().ln() / TAU + r
}

/// Distance from `x` to the nearest integer.
pub fn nearest_integer_gap(x: f64) -> f64 {
    (x - x.round()).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// A one-sided limit vanishes.
    ZeroLimit,
    /// A continuous arc of the symbol meets zero.
    ArcVanishes,
    /// The jump quantity is an integer.
    IntegerQuantity,
}

/// A point where the scalar criterion fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: f64,
    pub kind: WitnessKind,
    /// The jump quantity or the offending modulus.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarReport {
    pub fredholm: bool,
    /// Smallest distance of a jump quantity to the integers.
    pub margin: f64,
    /// Smallest modulus of the symbol on its arcs and limits.
    pub min_abs_value: f64,
    /// `(t, quantity)` at every jump and weight point.
    pub quantities: Vec<(f64, f64)>,
    pub witnesses: Vec<Witness>,
    pub integer_tol: f64,
    pub zero_tol: f64,
}

/// `gamma_t`, `m_t` and the jump quantity at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpClassifier {
    pub t: f64,
    pub gamma: Complex64,
    pub m: i64,
    pub fredholm_quantity: f64,
}

fn scalar_limits(a: &PCSymbol, t: f64) -> Result<(Complex64, Complex64)> {
    if a.size() != 1 {
        return Err(Error::InvalidArgument(format!("expected a scalar symbol, found {0}x{0}", a.size())));
    }
    let (l, r) = a.one_sided_limits(t.rem_euclid(1.0))?;
    Ok((l[(0, 0)], r[(0, 0)]))
}

fn segment_distance_to_origin(a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    if d.norm_sqr() == 0.0 {
        return a.norm();
    }
    let s = (-(a * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (a + d * s).norm()
}

/// Fredholm test for `aP + Q` with scalar `a` by the closed-form criterion.
pub fn fredholm_scalar(a: &PCSymbol, space: &Space, sweep: &SweepConfig) -> Result<ScalarReport> {
    sweep.validate()?;
    if a.size() != 1 {
        return Err(Error::InvalidArgument(format!("expected a scalar symbol, found {0}x{0}", a.size())));
    }
    space.require_bounded()?;
    let zero_tol = sweep.det_tol;
    let mut witnesses = Vec::new();
    let mut min_abs = f64::INFINITY;
    for arc in a.arcs() {
        for w in arc.windows(2) {
            let d = segment_distance_to_origin(w[0].value[(0, 0)], w[1].value[(0, 0)]);
            min_abs = min_abs.min(d);
            if d <= zero_tol {
                witnesses.push(Witness { t: w[0].u.rem_euclid(1.0), kind: WitnessKind::ArcVanishes, value: d });
            }
        }
        if arc.len() == 1 {
            min_abs = min_abs.min(arc[0].value[(0, 0)].norm());
        }
    }
    let mut quantities = Vec::new();
    let mut margin = f64::INFINITY;
    for t in special_points(&a.jump_points(), space) {
        let (l, r) = scalar_limits(a, t)?;
        let small = l.norm().min(r.norm());
        min_abs = min_abs.min(small);
        if small <= zero_tol {
            witnesses.push(Witness { t, kind: WitnessKind::ZeroLimit, value: small });
            continue;
        }
        let q = fredholm_quantity(l, r, space.delta_at(t), space.r_at(t));
        let gap = nearest_integer_gap(q);
        margin = margin.min(gap);
        quantities.push((t, q));
        if gap <= sweep.integer_tol {
            witnesses.push(Witness { t, kind: WitnessKind::IntegerQuantity, value: q });
        }
    }
    Ok(ScalarReport {
        fredholm: witnesses.is_empty(),
        margin,
        min_abs_value: min_abs,
        quantities,
        witnesses,
        integer_tol: sweep.integer_tol,
        zero_tol,
    })
}

/// `gamma_t` (principal argument) and the unique `m_t` with
/// `0 < m_t + quantity < 1`.
pub fn classify_jump(a: &PCSymbol, t: f64, space: &Space) -> Result<JumpClassifier> {
    let (l, r) = scalar_limits(a, t)?;
    if l.norm() == 0.0 || r.norm() == 0.0 {
        return Err(Error::InvalidSymbol(format!("one-sided limit vanishes at t={t}")));
    }
    let rho = l / r;
    let gamma = Complex64::new(rho.arg() / TAU, -rho.norm().ln() / TAU);
    let q = fredholm_quantity(l, r, space.delta_at(t), space.r_at(t));
    if nearest_integer_gap(q) <= CLASSIFY_INTEGER_TOL {
        return Err(Error::NoIntegerExists { quantity: q });
    }
    let m = (-q).floor() as i64 + 1;
    let v = m as f64 + q;
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::NoIntegerExists { quantity: q });
    }
    Ok(JumpClassifier { t, gamma, m, fredholm_quantity: q })
}

/// The local spectrum `S(0, 1; delta(t), 1/p(t) + lambda(t))` at `t`.
pub fn local_spectrum(t: f64, space: &Space) -> Result<SpiralSet> {
    space.require_bounded()?;
    SpiralSet::unit(space.delta_at(t), space.r_at(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{CurveModel, ExponentFunction, KhvedelidzeWeight};
    use crate::symbols::make_chi;
    use crate::CMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn space(p: f64, whirl: Option<(f64, f64)>) -> Space {
        let mut curve = CurveModel::unit_circle(256).unwrap();
        if let Some((u, d)) = whirl {
            curve.set_whirl(u, d).unwrap();
        }
        Space::new(curve, ExponentFunction::constant(p).unwrap(), KhvedelidzeWeight::unweighted())
    }

    fn jump(t: f64, l: Complex64, r: Complex64) -> PCSymbol {
        PCSymbol::jump_ramp(t, CMatrix::from_element(1, 1, l), CMatrix::from_element(1, 1, r)).unwrap()
    }

    #[test]
    fn shifted_chi_on_segment_is_not_fredholm() {
        let a = make_chi(0.3, 1).unwrap().map(|m| m.add_scalar(c(-0.5, 0.0))).unwrap();
        let rep = fredholm_scalar(&a, &space(2.0, None), &SweepConfig::default()).unwrap();
        assert!(!rep.fredholm);
        assert!(rep.witnesses.iter().any(|w| w.kind == WitnessKind::IntegerQuantity && w.value.abs() < 1e-15));
    }

    #[test]
    fn constant_one_is_fredholm() {
        let a = PCSymbol::scalar_constant(c(1.0, 0.0));
        let rep = fredholm_scalar(&a, &space(2.0, None), &SweepConfig::default()).unwrap();
        assert!(rep.fredholm);
        assert!(rep.quantities.is_empty());
    }

    #[test]
    fn quarter_turn_jump_with_whirl() {
        let a = jump(0.4, c(1.0, 0.0), c(0.0, 1.0));
        let sp = space(2.0, Some((0.4, 1.0)));
        let rep = fredholm_scalar(&a, &sp, &SweepConfig::default()).unwrap();
        assert!(rep.fredholm);
        // arg(1/i) = -pi/2, log|1/i| = 0.
        assert!((rep.quantities[0].1 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn classifier_examples() {
        let sp = space(2.0, None);
        let k = classify_jump(&PCSymbol::scalar_constant(c(2.0, 0.0)), 0.1, &sp).unwrap();
        assert_eq!((k.gamma, k.m), (c(0.0, 0.0), 0));
        let k = classify_jump(&jump(0.4, c(1.0, 0.0), c(0.0, 1.0)), 0.4, &sp).unwrap();
        assert!((k.gamma - c(-0.25, 0.0)).norm() < 1e-15);
        let e = std::f64::consts::E;
        let k = classify_jump(&jump(0.4, c(e, 0.0), c(1.0, 0.0)), 0.4, &sp).unwrap();
        assert!((k.gamma - c(0.0, -1.0 / TAU)).norm() < 1e-15);
        let bad = make_chi(0.3, 1).unwrap().map(|m| m.add_scalar(c(-0.5, 0.0))).unwrap();
        assert!(matches!(classify_jump(&bad, 0.3, &sp), Err(Error::NoIntegerExists { .. })));
    }

    #[test]
    fn refuses_unbounded_space() {
        let curve = CurveModel::unit_circle(64).unwrap();
        let w = KhvedelidzeWeight::on_curve(&curve, &[(0.2, 0.5)]).unwrap();
        let sp = Space::new(curve, ExponentFunction::constant(2.0).unwrap(), w);
        let a = PCSymbol::scalar_constant(c(1.0, 0.0));
        assert!(matches!(fredholm_scalar(&a, &sp, &SweepConfig::default()), Err(Error::NotBounded(_))));
    }

    #[test]
    fn local_spectrum_is_segment_for_p2() {
        let s = local_spectrum(0.0, &space(2.0, None)).unwrap();
        assert_eq!((s.delta, s.r), (0.0, 0.5));
    }
}
