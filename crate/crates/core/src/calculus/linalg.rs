//! Determinants and eigenvalues of small dense complex matrices.

use num_complex::Complex64;

use crate::CMatrix;

pub fn det(m: &CMatrix) -> Complex64 {
    match m.nrows() {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => m.clone().determinant(),
    }
}

/// Coefficients `c[0..=k]` of `det(x I - m) = sum c[j] x^{k-j}`, `c[0] = 1`,
/// by the Faddeev-LeVerrier recursion.
pub fn char_poly(m: &CMatrix) -> Vec<Complex64> {
    let k = m.nrows();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut mk = CMatrix::zeros(k, k);
    for j in 1..=k {
        // M_j = A M_{j-1} + c_{j-1} I, c_j = -tr(A M_j) / j.
        let mut next = m * &mk;
        for i in 0..k {
            next[(i, i)] += coeffs[j - 1];
        }
        mk = next;
        let am = m * &mk;
        coeffs.push(-am.trace() / j as f64);
    }
    coeffs
}

fn horner(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = c[0];
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in &c[1..] {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

/// Roots of the monic polynomial `c` (leading coefficient first) by
/// Aberth-Ehrlich iteration.
pub fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let k = c.len() - 1;
    if k == 0 {
        return Vec::new();
    }
    // Cauchy bound for the initial circle.
    let bound = 1.0 + c[1..].iter().map(|a| a.norm() / c[0].norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..k)
        .map(|j| Complex64::from_polar(bound, std::f64::consts::TAU * (j as f64 + 0.25) / k as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..k {
            let (p, dp) = horner(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let rep: Complex64 = (0..k).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * rep);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Eigenvalues of a square matrix: closed form up to `2 x 2`, otherwise the
/// roots of the characteristic polynomial polished by Newton steps on
/// `det(x I - m)`.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let k = m.nrows();
    match k {
        0 => Vec::new(),
        1 => vec![m[(0, 0)]],
        2 => {
            let tr = m[(0, 0)] + m[(1, 1)];
            let d = det(m);
            let disc = (tr * tr - 4.0 * d).sqrt();
            let big = if (tr + disc).norm() >= (tr - disc).norm() { (tr + disc) / 2.0 } else { (tr - disc) / 2.0 };
            let small = if big.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { d / big };
            vec![big, small]
        }
        _ => {
            let c = char_poly(m);
            let mut roots = poly_roots(&c);
            for z in roots.iter_mut() {
                for _ in 0..3 {
                    let (p, dp) = horner(&c, *z);
                    if dp.norm() == 0.0 {
                        break;
                    }
                    let step = p / dp;
                    if !(step.re.is_finite() && step.im.is_finite()) || step.norm() > 1e-6 * (1.0 + z.norm()) {
                        break;
                    }
                    *z -= step;
                }
            }
            roots
        }
    }
}
