use std::sync::Arc;

use num_complex::Complex64;
use pcsio_core::calculus::{sigma_eval, sigma_eval_n, BundlePoint};
use pcsio_core::geometry::SpiralSet;
use pcsio_core::symbols::{jump_point_set, parse_expr, Bindings, OperatorExpr, PCSymbol};
use pcsio_core::CMatrix;
use proptest::prelude::*;

const JUMPS: [f64; 3] = [0.125, 0.5, 0.75];

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), n * n).prop_map(move |v| CMatrix::from_vec(n, n, v))
}

fn symbol(n: usize) -> impl Strategy<Value = PCSymbol> {
    (0..JUMPS.len(), matrix(n), matrix(n), any::<bool>()).prop_map(move |(j, l, r, jump)| {
        if jump && l != r {
            PCSymbol::jump_ramp(JUMPS[j], l, r).unwrap()
        } else {
            PCSymbol::constant(l).unwrap()
        }
    })
}

fn leaf(n: usize) -> impl Strategy<Value = OperatorExpr> {
    prop_oneof![
        Just(OperatorExpr::S),
        Just(OperatorExpr::Compact),
        Just(OperatorExpr::identity()),
        complex().prop_map(OperatorExpr::Scalar),
        (0..4usize, symbol(n)).prop_map(|(k, s)| OperatorExpr::mul(format!("s{k}"), s)),
    ]
}

fn expr(n: usize) -> impl Strategy<Value = OperatorExpr> {
    leaf(n).prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(OperatorExpr::Sum),
            prop::collection::vec(inner.clone(), 2..4).prop_map(OperatorExpr::Product),
            (complex(), inner).prop_map(|(c, e)| OperatorExpr::Scale(c, Box::new(e))),
        ]
    })
}

/// A bundle point over one of the jump parameters or over a generic point.
fn bundle_point() -> impl Strategy<Value = BundlePoint> {
    (0..JUMPS.len() + 1, -2.0..2.0f64, 0.05..0.95f64, -10.0..10.0f64).prop_map(|(j, delta, r, s)| {
        let t = if j < JUMPS.len() { JUMPS[j] } else { 0.3 };
        let mu = SpiralSet::unit(delta, r).unwrap().point_at(s).unwrap();
        BundlePoint::new(t, mu, delta, r).unwrap()
    })
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Bindings under which a printed tree names its symbols.
fn bindings_of(e: &OperatorExpr) -> Bindings {
    let mut b = Bindings::new();
    collect(e, &mut b);
    b
}

fn collect(e: &OperatorExpr, b: &mut Bindings) {
    match e {
        OperatorExpr::Mul { name, symbol } => {
            b.insert(name.clone(), Arc::clone(symbol));
        }
        OperatorExpr::Sum(v) | OperatorExpr::Product(v) => v.iter().for_each(|c| collect(c, b)),
        OperatorExpr::Scale(_, c) => collect(c, b),
        _ => {}
    }
}

/// Gives every leaf a distinct name so that re-binding is unambiguous.
fn rename(e: OperatorExpr, next: &mut usize) -> OperatorExpr {
    match e {
        OperatorExpr::Mul { symbol, .. } => {
            *next += 1;
            OperatorExpr::Mul { name: format!("a{next}"), symbol }
        }
        OperatorExpr::Sum(v) => OperatorExpr::Sum(v.into_iter().map(|c| rename(c, next)).collect()),
        OperatorExpr::Product(v) => OperatorExpr::Product(v.into_iter().map(|c| rename(c, next)).collect()),
        OperatorExpr::Scale(c, inner) => OperatorExpr::Scale(c, Box::new(rename(*inner, next))),
        other => other,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_round_trip(e in expr(1)) {
        let e = rename(e, &mut 0);
        let b = bindings_of(&e);
        let once = parse_expr(&e.to_string(), &b).unwrap();
        prop_assert_eq!(&once, &e);
        let twice = parse_expr(&once.to_string(), &b).unwrap();
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn jump_points_of_sum_are_union(e1 in expr(1), e2 in expr(1)) {
        let mut want = jump_point_set(&e1);
        want.extend(jump_point_set(&e2));
        want.sort_by(f64::total_cmp);
        want.dedup();
        let sum = OperatorExpr::Sum(vec![e1.clone(), e2.clone()]);
        prop_assert_eq!(jump_point_set(&sum), want.clone());
        prop_assert_eq!(jump_point_set(&OperatorExpr::Product(vec![e1, e2])), want);
    }

    #[test]
    fn sigma_is_multiplicative_and_additive(
        (n, e1, e2, bp) in (1..3usize).prop_flat_map(|n| (Just(n), expr(n), expr(n), bundle_point())),
    ) {
        let s1 = sigma_eval_n(&e1, &bp, n).unwrap().matrix;
        let s2 = sigma_eval_n(&e2, &bp, n).unwrap().matrix;
        let prod = sigma_eval_n(&OperatorExpr::Product(vec![e1.clone(), e2.clone()]), &bp, n).unwrap().matrix;
        let sum = sigma_eval_n(&OperatorExpr::Sum(vec![e1, e2]), &bp, n).unwrap().matrix;
        prop_assert!(max_diff(&prod, &(&s1 * &s2)) <= 1e-12);
        prop_assert!(max_diff(&sum, &(&s1 + &s2)) <= 1e-12);
    }

    #[test]
    fn sigma_of_folded_product_symbol(a in symbol(2), b in symbol(2), bp in bundle_point()) {
        // Folding is exact at the jumps of the factors; between knots it interpolates.
        prop_assume!(a.jump_points().contains(&bp.t) || b.jump_points().contains(&bp.t));
        let ab = OperatorExpr::Product(vec![OperatorExpr::mul("a", a.clone()), OperatorExpr::mul("b", b.clone())]);
        let folded = ab.multiplier_symbol(2).unwrap().unwrap();
        let lhs = sigma_eval(&OperatorExpr::mul("ab", folded), &bp).unwrap().matrix;
        let rhs = sigma_eval(&ab, &bp).unwrap().matrix;
        let scale = 1.0 + rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-12 * scale);
    }

    #[test]
    fn projections_and_reflection(bp in bundle_point()) {
        let b = Bindings::new();
        let p = sigma_eval(&parse_expr("P", &b).unwrap(), &bp).unwrap().matrix;
        prop_assert!(max_diff(&(&p * &p), &p) <= 1e-12);
        let s = sigma_eval(&OperatorExpr::S, &bp).unwrap().matrix;
        prop_assert_eq!(&s * &s, CMatrix::identity(2, 2));
    }

    #[test]
    fn chi_generator_is_idempotent(bp in bundle_point()) {
        // sigma of chi at its own jump is the projection (mu, r; r, 1 - mu).
        let chi = pcsio_core::symbols::make_chi(bp.t, 1).unwrap();
        let q = sigma_eval(&OperatorExpr::mul("chi", chi), &bp).unwrap().matrix;
        prop_assert!(max_diff(&(&q * &q), &q) <= 1e-12);
    }

    #[test]
    fn sqrt_branch_does_not_change_det(e in expr(1), bp in bundle_point()) {
        let m = sigma_eval_n(&e, &bp, 1).unwrap().matrix;
        // The other branch of the square root is the conjugation by diag(1, -1).
        let j = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]));
        let flipped = &j * &m * &j;
        let (d1, d2) = (m.determinant(), flipped.determinant());
        prop_assert!((d1 - d2).norm() <= 1e-9 * (1.0 + d1.norm()));
    }

    #[test]
    fn continuity_limits_are_equal(s in symbol(2), u in 0.0..1.0f64) {
        prop_assume!(!JUMPS.iter().any(|t| (t - u).abs() < 1e-6));
        let (l, r) = s.one_sided_limits(u).unwrap();
        prop_assert_eq!(l, r);
    }
}
