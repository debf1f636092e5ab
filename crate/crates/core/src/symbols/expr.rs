use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::pc::{combine, PCSymbol};
use crate::error::{Error, Result};
use crate::spaces::same_param;
use crate::CMatrix;

/// Expression over the generators of `alg(PC^{n x n}, S^{(n)})`.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorExpr {
    /// The singular integral operator `S^{(n)}`.
    S,
    /// Multiplication by a piecewise continuous symbol.
    Mul { name: String, symbol: Arc<PCSymbol> },
    /// `c * I^{(n)}`.
    Scalar(Complex64),
    /// Placeholder for a compact operator.
    Compact,
    Sum(Vec<OperatorExpr>),
    /// Ordered product, left to right.
    Product(Vec<OperatorExpr>),
    Scale(Complex64, Box<OperatorExpr>),
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);
const MINUS_ONE: Complex64 = Complex64::new(-1.0, 0.0);

impl OperatorExpr {
    pub fn identity() -> Self {
        OperatorExpr::Scalar(ONE)
    }

    /// `P = (I + S) / 2`.
    pub fn p() -> Self {
        OperatorExpr::Scale(HALF, Box::new(OperatorExpr::Sum(vec![Self::identity(), OperatorExpr::S])))
    }

    /// `Q = (I - S) / 2`.
    pub fn q() -> Self {
        OperatorExpr::Scale(
            HALF,
            Box::new(OperatorExpr::Sum(vec![
                Self::identity(),
                OperatorExpr::Scale(MINUS_ONE, Box::new(OperatorExpr::S)),
            ])),
        )
    }

    pub fn mul(name: impl Into<String>, symbol: PCSymbol) -> Self {
        OperatorExpr::Mul { name: name.into(), symbol: Arc::new(symbol) }
    }

    /// `a P + Q`, structured exactly as the parser builds `"a*P + Q"`.
    pub fn scalar_sio(name: impl Into<String>, a: PCSymbol) -> Self {
        OperatorExpr::Sum(vec![OperatorExpr::Product(vec![Self::mul(name, a), Self::p()]), Self::q()])
    }

    /// Visits every multiplication leaf.
    pub fn for_each_symbol<'a>(&'a self, f: &mut impl FnMut(&'a PCSymbol)) {
        match self {
            OperatorExpr::Mul { symbol, .. } => f(symbol),
            OperatorExpr::Sum(v) | OperatorExpr::Product(v) => v.iter().for_each(|c| c.for_each_symbol(f)),
            OperatorExpr::Scale(_, c) => c.for_each_symbol(f),
            _ => {}
        }
    }

    /// Common matrix size of the symbols, `None` when there are none.
    pub fn matrix_size(&self) -> Result<Option<usize>> {
        let mut size = None;
        let mut err = None;
        self.for_each_symbol(&mut |s| match size {
            None => size = Some(s.size()),
            Some(n) if n != s.size() && err.is_none() => err = Some(Error::SizeMismatch { expected: n, found: s.size() }),
            _ => {}
        });
        match err {
            Some(e) => Err(e),
            None => Ok(size),
        }
    }

    fn contains_operator(&self) -> bool {
        match self {
            OperatorExpr::S | OperatorExpr::Compact => true,
            OperatorExpr::Mul { .. } | OperatorExpr::Scalar(_) => false,
            OperatorExpr::Sum(v) | OperatorExpr::Product(v) => v.iter().any(|c| c.contains_operator()),
            OperatorExpr::Scale(_, c) => c.contains_operator(),
        }
    }

    /// Folds an expression free of `S` and `K` into the symbol of the
    /// multiplication operator it denotes.
    pub fn multiplier_symbol(&self, n: usize) -> Option<Result<PCSymbol>> {
        if self.contains_operator() {
            return None;
        }
        Some(self.fold_multiplier(n))
    }

    fn fold_multiplier(&self, n: usize) -> Result<PCSymbol> {
        match self {
            OperatorExpr::Mul { symbol, .. } => {
                if symbol.size() != n {
                    return Err(Error::SizeMismatch { expected: n, found: symbol.size() });
                }
                Ok((**symbol).clone())
            }
            OperatorExpr::Scalar(c) => PCSymbol::constant(CMatrix::from_diagonal_element(n, n, *c)),
            OperatorExpr::Scale(c, inner) => {
                let c = *c;
                inner.fold_multiplier(n)?.map(|m| m * c)
            }
            OperatorExpr::Sum(v) | OperatorExpr::Product(v) => {
                let parts = v.iter().map(|c| c.fold_multiplier(n)).collect::<Result<Vec<_>>>()?;
                let refs: Vec<&PCSymbol> = parts.iter().collect();
                let is_sum = matches!(self, OperatorExpr::Sum(_));
                combine(&refs, |vals| {
                    let mut acc = vals[0].clone();
                    for m in &vals[1..] {
                        acc = if is_sum { acc + *m } else { acc * *m };
                    }
                    acc
                })
            }
            OperatorExpr::S | OperatorExpr::Compact => unreachable!("checked by contains_operator"),
        }
    }

    /// Recognizes `M*P + Q` (as parsed) with a multiplier expression `M` and
    /// returns the symbol of `M`.
    pub fn as_scalar_sio(&self, n: usize) -> Option<Result<PCSymbol>> {
        let OperatorExpr::Sum(terms) = self else { return None };
        let [OperatorExpr::Product(factors), q] = terms.as_slice() else { return None };
        if *q != Self::q() || factors.len() < 2 || factors[factors.len() - 1] != Self::p() {
            return None;
        }
        let rest = &factors[..factors.len() - 1];
        if rest.len() == 1 {
            rest[0].multiplier_symbol(n)
        } else {
            OperatorExpr::Product(rest.to_vec()).multiplier_symbol(n)
        }
    }
}

/// Union of the jump points of all multiplication leaves, sorted by curve
/// parameter and deduplicated within the parameter tolerance.
pub fn jump_point_set(e: &OperatorExpr) -> Vec<f64> {
    let mut pts = Vec::new();
    e.for_each_symbol(&mut |s| pts.extend(s.jump_points()));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| same_param(*a, *b));
    if pts.len() > 1 && same_param(pts[0], pts[pts.len() - 1]) {
        pts.pop();
    }
    pts
}

pub(crate) fn fmt_literal(c: Complex64) -> String {
    if c.im == 0.0 && !c.re.is_sign_negative() && !c.im.is_sign_negative() {
        format!("{:?}", c.re)
    } else {
        format!("[{:?},{:?}]", c.re, c.im)
    }
}

fn fmt_leaf(e: &OperatorExpr) -> Option<String> {
    Some(match e {
        OperatorExpr::S => "S".into(),
        OperatorExpr::Compact => "K".into(),
        OperatorExpr::Scalar(c) if *c == ONE => "I".into(),
        OperatorExpr::Scalar(c) => fmt_literal(*c),
        OperatorExpr::Mul { name, .. } => name.clone(),
        _ => return None,
    })
}

fn fmt_expr(e: &OperatorExpr) -> String {
    match e {
        OperatorExpr::Sum(children) => {
            let mut out = String::new();
            for (i, c) in children.iter().enumerate() {
                match c {
                    OperatorExpr::Scale(k, inner) if *k == MINUS_ONE => {
                        out.push_str(if i == 0 { "-" } else { " - " });
                        out.push_str(&fmt_term(inner));
                    }
                    _ => {
                        if i > 0 {
                            out.push_str(" + ");
                        }
                        out.push_str(&fmt_term(c));
                    }
                }
            }
            out
        }
        OperatorExpr::Scale(k, inner) if *k == MINUS_ONE => format!("-{}", fmt_term(inner)),
        other => fmt_term(other),
    }
}

fn fmt_term(e: &OperatorExpr) -> String {
    match e {
        OperatorExpr::Sum(_) => format!("({})", fmt_expr(e)),
        OperatorExpr::Product(fs) => fs.iter().map(fmt_factor).collect::<Vec<_>>().join("*"),
        OperatorExpr::Scale(k, inner) => {
            let rest = match &**inner {
                OperatorExpr::Product(_) | OperatorExpr::Scale(..) => fmt_term(inner),
                other => fmt_factor(other),
            };
            format!("{}*{}", fmt_literal(*k), rest)
        }
        leaf => fmt_leaf(leaf).expect("leaf"),
    }
}

fn fmt_factor(e: &OperatorExpr) -> String {
    match e {
        OperatorExpr::Scalar(c) if *c != ONE => format!("({})", fmt_literal(*c)),
        OperatorExpr::Sum(_) | OperatorExpr::Product(_) | OperatorExpr::Scale(..) => format!("({})", fmt_expr(e)),
        leaf => fmt_leaf(leaf).expect("leaf"),
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_expr(self))
    }
}
