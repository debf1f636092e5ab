//! Fixtures shared by the benchmarks.

use num_complex::Complex64;
use pcsio_core::spaces::{CurveModel, ExponentFunction, KhvedelidzeWeight, Space};
use pcsio_core::symbols::{OperatorExpr, PCSymbol};
use pcsio_core::CMatrix;

/// Unit circle with a whirl point and a weight at `t`.
pub fn whirl_space(t: f64, delta: f64, p: f64, lambda: f64) -> Space {
    let mut curve = CurveModel::unit_circle(256).expect("circle");
    curve.set_whirl(t, delta).expect("whirl");
    let weight = KhvedelidzeWeight::on_curve(&curve, &[(t, lambda)]).expect("weight");
    Space::new(curve, ExponentFunction::constant(p).expect("exponent"), weight)
}

/// `a*P + Q` with one jump of `a` from `left` to `right` at `t`.
pub fn scalar_jump(t: f64, left: Complex64, right: Complex64) -> (PCSymbol, OperatorExpr) {
    let a = PCSymbol::jump_ramp(t, CMatrix::from_element(1, 1, left), CMatrix::from_element(1, 1, right)).expect("jump");
    let e = OperatorExpr::scalar_sio("a", a.clone());
    (a, e)
}

/// Block-diagonal `n x n` jump symbol in `a*P + Q`.
pub fn diagonal_jump(n: usize, t: f64) -> OperatorExpr {
    let left = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(1.0 + i as f64, 0.0) } else { Complex64::new(0.0, 0.0) });
    let right = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(0.0, 1.0 + 0.5 * i as f64) } else { Complex64::new(0.0, 0.0) });
    let a = PCSymbol::jump_ramp(t, left, right).expect("jump");
    OperatorExpr::scalar_sio("a", a)
}
