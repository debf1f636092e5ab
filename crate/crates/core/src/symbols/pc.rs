use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spaces::{same_param, CurveModel};
use crate::CMatrix;

/// A jump point with its one-sided limits `a(t - 0)` and `a(t + 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub t: f64,
    pub left: CMatrix,
    pub right: CMatrix,
}

/// A sample of a continuous arc. Parameters increase along the arc and may
/// exceed 1 on the arc that wraps past `u = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Knot {
    pub u: f64,
    pub value: CMatrix,
}

/// Piecewise continuous `n x n` symbol with finitely many jumps.
///
/// Arc `i` runs from `jumps[i].t` to the next jump (cyclically) and is the
/// piecewise linear interpolant of its knots. Without jumps there is a single
/// closed arc whose first and last knots carry the same value.
#[derive(Debug, Clone, PartialEq)]
pub struct PCSymbol {
    n: usize,
    jumps: Vec<Jump>,
    arcs: Vec<Vec<Knot>>,
}

fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn scalar_matrix(n: usize, c: Complex64) -> CMatrix {
    CMatrix::from_diagonal_element(n, n, c)
}

impl PCSymbol {
    pub fn new(n: usize, jumps: Vec<Jump>, arcs: Vec<Vec<Knot>>) -> Result<Self> {
        let s = PCSymbol { n, jumps, arcs };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSymbol(m));
        if self.n == 0 {
            return bad("matrix size must be positive".into());
        }
        let shape_ok = |m: &CMatrix| m.nrows() == self.n && m.ncols() == self.n;
        for (i, j) in self.jumps.iter().enumerate() {
            if !(j.t.is_finite() && (0.0..1.0).contains(&j.t)) {
                return bad(format!("jump {i} parameter must lie in [0, 1)"));
            }
            if !shape_ok(&j.left) || !shape_ok(&j.right) {
                return Err(Error::SizeMismatch { expected: self.n, found: j.left.nrows() });
            }
            if !is_finite(&j.left) || !is_finite(&j.right) {
                return Err(Error::NonFinite("one-sided limit"));
            }
            if j.left == j.right {
                return bad(format!("jump {i} has equal one-sided limits"));
            }
            if i > 0 && !(self.jumps[i - 1].t < j.t) {
                return bad("jump parameters must be strictly increasing".into());
            }
        }
        if self.jumps.len() > 1 && same_param(self.jumps[0].t, self.jumps[self.jumps.len() - 1].t) {
            return bad("jump parameters coincide".into());
        }
        let expected_arcs = self.jumps.len().max(1);
        if self.arcs.len() != expected_arcs {
            return Err(Error::LengthMismatch { expected: expected_arcs, found: self.arcs.len() });
        }
        for (i, arc) in self.arcs.iter().enumerate() {
            if arc.len() < 2 {
                return bad(format!("arc {i} needs at least two knots"));
            }
            for k in arc {
                if !shape_ok(&k.value) {
                    return Err(Error::SizeMismatch { expected: self.n, found: k.value.nrows() });
                }
                if !is_finite(&k.value) || !k.u.is_finite() {
                    return Err(Error::NonFinite("arc sample"));
                }
            }
            if arc.windows(2).any(|w| !(w[0].u < w[1].u)) {
                return bad(format!("arc {i} knots must be strictly increasing"));
            }
            let (first, last) = (&arc[0], &arc[arc.len() - 1]);
            if self.jumps.is_empty() {
                if !(first.u >= 0.0 && first.u < 1.0) || (last.u - first.u - 1.0).abs() > 1e-12 {
                    return bad("closed arc must span exactly one turn".into());
                }
                if first.value != last.value {
                    return bad("closed arc must end where it starts".into());
                }
            } else {
                let j0 = &self.jumps[i];
                let j1 = &self.jumps[(i + 1) % self.jumps.len()];
                let end = if i + 1 == self.jumps.len() { j1.t + 1.0 } else { j1.t };
                if (first.u - j0.t).abs() > 1e-12 || (last.u - end).abs() > 1e-12 {
                    return bad(format!("arc {i} must run between its jump points"));
                }
                if first.value != j0.right || last.value != j1.left {
                    return bad(format!("arc {i} endpoints must equal the adjacent one-sided limits"));
                }
            }
        }
        Ok(())
    }

    pub fn constant(value: CMatrix) -> Result<Self> {
        let n = value.nrows();
        if value.ncols() != n {
            return Err(Error::InvalidSymbol("value must be square".into()));
        }
        Self::new(n, Vec::new(), vec![vec![Knot { u: 0.0, value: value.clone() }, Knot { u: 1.0, value }]])
    }

    pub fn scalar_constant(c: Complex64) -> Self {
        Self::constant(scalar_matrix(1, c)).expect("finite scalar")
    }

    /// Continuous symbol sampled from `f` at `count` equally spaced parameters.
    pub fn continuous_from_fn(n: usize, count: usize, f: impl Fn(f64) -> CMatrix) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidArgument("need at least two samples".into()));
        }
        let mut knots: Vec<Knot> = (0..count)
            .map(|i| {
                let u = i as f64 / count as f64;
                Knot { u, value: f(u) }
            })
            .collect();
        knots.push(Knot { u: 1.0, value: knots[0].value.clone() });
        Self::new(n, Vec::new(), vec![knots])
    }

    /// `a(tau) = scale * tau^k` sampled at the curve nodes.
    pub fn power(curve: &CurveModel, k: i32, scale: Complex64) -> Result<Self> {
        if !curve.is_closed() {
            return Err(Error::InvalidCurve("power symbols need a closed curve".into()));
        }
        let mut knots: Vec<Knot> = curve
            .nodes()
            .iter()
            .map(|p| Knot { u: p.u, value: scalar_matrix(1, scale * p.z.powi(k)) })
            .collect();
        if knots[0].u != 0.0 {
            return Err(Error::InvalidCurve("first node must sit at u = 0".into()));
        }
        knots.push(Knot { u: 1.0, value: knots[0].value.clone() });
        Self::new(1, Vec::new(), vec![knots])
    }

    /// `left + (right - left) * chi_t`: a single jump at `t` with a linear
    /// ramp from `right` back to `left` once around the curve.
    pub fn jump_ramp(t: f64, left: CMatrix, right: CMatrix) -> Result<Self> {
        if !(t.is_finite() && (0.0..1.0).contains(&t)) {
            return Err(Error::InvalidArgument("jump parameter must lie in [0, 1)".into()));
        }
        let n = left.nrows();
        Self::new(
            n,
            vec![Jump { t, left: left.clone(), right: right.clone() }],
            vec![vec![Knot { u: t, value: right }, Knot { u: t + 1.0, value: left }]],
        )
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn arcs(&self) -> &[Vec<Knot>] {
        &self.arcs
    }

    pub fn jump_points(&self) -> Vec<f64> {
        self.jumps.iter().map(|j| j.t).collect()
    }

    fn jump_at(&self, u: f64) -> Option<&Jump> {
        self.jumps.iter().find(|j| same_param(j.t, u))
    }

    /// Interpolated value at a parameter that is not a jump point.
    pub fn value_at(&self, u: f64) -> CMatrix {
        let u = u.rem_euclid(1.0);
        for arc in &self.arcs {
            let (a, b) = (arc[0].u, arc[arc.len() - 1].u);
            for shift in [0.0, 1.0] {
                let x = u + shift;
                if x >= a && x <= b {
                    return interpolate(arc, x);
                }
            }
        }
        // Unreachable for valid symbols: arcs cover the whole turn.
        interpolate(&self.arcs[0], self.arcs[0][0].u)
    }

    /// `(a(t - 0), a(t + 0))`; equal matrices at continuity points.
    pub fn one_sided_limits(&self, t: f64) -> Result<(CMatrix, CMatrix)> {
        if !(t.is_finite() && (0.0..1.0).contains(&t)) {
            return Err(Error::OffCurve { distance: f64::NAN });
        }
        Ok(match self.jump_at(t) {
            Some(j) => (j.left.clone(), j.right.clone()),
            None => {
                let v = self.value_at(t);
                (v.clone(), v)
            }
        })
    }

    fn limit(&self, u: f64, right: bool) -> CMatrix {
        match self.jump_at(u) {
            Some(j) if right => j.right.clone(),
            Some(j) => j.left.clone(),
            None => self.value_at(u),
        }
    }

    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        combine(&[self], |v| f(v[0]))
    }

    pub fn zip_with(&self, other: &PCSymbol, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        combine(&[self, other], |v| f(v[0], v[1]))
    }

    /// Block-diagonal symbol `diag(parts[0], parts[1], ...)`.
    pub fn diag(parts: &[PCSymbol]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("diag needs at least one block".into()));
        }
        let refs: Vec<&PCSymbol> = parts.iter().collect();
        let total: usize = parts.iter().map(|p| p.n).sum();
        combine(&refs, |vals| {
            let mut m = CMatrix::zeros(total, total);
            let mut off = 0;
            for v in vals {
                m.view_mut((off, off), (v.nrows(), v.ncols())).copy_from(v);
                off += v.nrows();
            }
            m
        })
    }
}

fn interpolate(arc: &[Knot], x: f64) -> CMatrix {
    let i = arc.partition_point(|k| k.u <= x);
    if i == 0 {
        return arc[0].value.clone();
    }
    if i >= arc.len() {
        return arc[arc.len() - 1].value.clone();
    }
    let (a, b) = (&arc[i - 1], &arc[i]);
    let t = (x - a.u) / (b.u - a.u);
    if t == 0.0 {
        return a.value.clone();
    }
    &a.value + (&b.value - &a.value) * Complex64::new(t, 0.0)
}

/// The `chi_t` model symbol: continuous off `t`, `chi_t(t - 0) = 0`,
/// `chi_t(t + 0) = 1`, ramping linearly from 1 back to 0 around the curve.
/// For `n > 1` the diagonal lift.
pub fn make_chi(t: f64, n: usize) -> Result<PCSymbol> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    PCSymbol::jump_ramp(t, CMatrix::zeros(n, n), CMatrix::identity(n, n))
}

/// `(a(t - 0), a(t + 0))` of `sym` at `t`.
pub fn one_sided_limits(sym: &PCSymbol, t: f64) -> Result<(CMatrix, CMatrix)> {
    sym.one_sided_limits(t)
}

/// Pointwise combination of symbols on the union of their jump points and
/// knot parameters. Jumps that disappear are merged into arcs.
pub fn combine(symbols: &[&PCSymbol], f: impl Fn(&[&CMatrix]) -> CMatrix) -> Result<PCSymbol> {
    let mut cuts: Vec<f64> = symbols.iter().flat_map(|s| s.jump_points()).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| same_param(*a, *b));
    if cuts.len() > 1 && same_param(cuts[0], cuts[cuts.len() - 1]) {
        cuts.pop();
    }
    let mut knot_us: Vec<f64> = symbols
        .iter()
        .flat_map(|s| s.arcs.iter().flatten().map(|k| k.u.rem_euclid(1.0)))
        .collect();
    knot_us.sort_by(f64::total_cmp);
    knot_us.dedup();

    let apply = |u: f64, right: bool| -> CMatrix {
        let vals: Vec<CMatrix> = symbols.iter().map(|s| s.limit(u.rem_euclid(1.0), right)).collect();
        let refs: Vec<&CMatrix> = vals.iter().collect();
        f(&refs)
    };
    let interior = |a: f64, b: f64| -> Vec<f64> {
        // Knot parameters strictly inside (a, b), lifted to the same turn.
        let mut v: Vec<f64> = knot_us
            .iter()
            .flat_map(|&u| [u, u + 1.0])
            .filter(|&x| x > a + 1e-12 && x < b - 1e-12)
            .collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let build_arc = |a: f64, b: f64, closed: bool| -> Vec<Knot> {
        let mut arc = vec![Knot { u: a, value: apply(a, true) }];
        for x in interior(a, b) {
            arc.push(Knot { u: x, value: apply(x, true) });
        }
        let end = if closed { arc[0].value.clone() } else { apply(b, false) };
        arc.push(Knot { u: b, value: end });
        arc
    };

    // Keep only cuts where the combined limits differ.
    cuts.retain(|&u| apply(u, false) != apply(u, true));
    let n = apply(0.0, true).nrows();
    if cuts.is_empty() {
        return PCSymbol::new(n, Vec::new(), vec![build_arc(0.0, 1.0, true)]);
    }
    let m = cuts.len();
    let arcs: Vec<Vec<Knot>> = (0..m)
        .map(|i| {
            let b = if i + 1 == m { cuts[0] + 1.0 } else { cuts[i + 1] };
            build_arc(cuts[i], b, false)
        })
        .collect();
    let jumps: Vec<Jump> = (0..m)
        .map(|i| {
            let prev = &arcs[(i + m - 1) % m];
            Jump { t: cuts[i], left: prev[prev.len() - 1].value.clone(), right: arcs[i][0].value.clone() }
        })
        .collect();
    PCSymbol::new(n, jumps, arcs)
}
