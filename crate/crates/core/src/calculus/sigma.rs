use num_complex::Complex64;

use super::BundlePoint;
use crate::error::{Error, Result};
use crate::symbols::OperatorExpr;
use crate::CMatrix;

/// `sigma_{t,mu}(A)`, a `2n x 2n` matrix, with its bundle point.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix {
    pub matrix: CMatrix,
    pub at: BundlePoint,
}

#[derive(Debug, Clone)]
enum Node {
    S,
    Mul(CMatrix, CMatrix),
    Scalar(Complex64),
    Compact,
    Sum(Vec<Node>),
    Product(Vec<Node>),
    Scale(Complex64, Box<Node>),
}

/// An expression with every symbol replaced by its one-sided limits at a
/// fixed `t`; evaluates `sigma_{t,mu}` for many `mu` without re-walking the
/// symbols.
#[derive(Debug, Clone)]
pub struct LocalSymbol {
    n: usize,
    t: f64,
    root: Node,
}

impl LocalSymbol {
    pub fn new(e: &OperatorExpr, t: f64, n: usize) -> Result<Self> {
        Ok(LocalSymbol { n, t, root: localize(e, t, n)? })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `sigma_{t,mu}` without the bundle membership check.
    pub fn eval(&self, mu: Complex64) -> CMatrix {
        let root = (mu * (1.0 - mu)).sqrt();
        eval(&self.root, self.n, mu, root)
    }

    /// Determinant of `sigma_{t,mu}`.
    pub fn det(&self, mu: Complex64) -> Complex64 {
        super::linalg::det(&self.eval(mu))
    }
}

fn localize(e: &OperatorExpr, t: f64, n: usize) -> Result<Node> {
    Ok(match e {
        OperatorExpr::S => Node::S,
        OperatorExpr::Compact => Node::Compact,
        OperatorExpr::Scalar(c) => Node::Scalar(*c),
        OperatorExpr::Mul { symbol, .. } => {
            if symbol.size() != n {
                return Err(Error::SizeMismatch { expected: n, found: symbol.size() });
            }
            let (l, r) = symbol.one_sided_limits(t)?;
            Node::Mul(l, r)
        }
        OperatorExpr::Sum(v) => Node::Sum(v.iter().map(|c| localize(c, t, n)).collect::<Result<_>>()?),
        OperatorExpr::Product(v) => Node::Product(v.iter().map(|c| localize(c, t, n)).collect::<Result<_>>()?),
        OperatorExpr::Scale(c, inner) => Node::Scale(*c, Box::new(localize(inner, t, n)?)),
    })
}

fn eval(node: &Node, n: usize, mu: Complex64, root: Complex64) -> CMatrix {
    let one = Complex64::new(1.0, 0.0);
    match node {
        Node::S => {
            let mut m = CMatrix::identity(2 * n, 2 * n);
            for i in n..2 * n {
                m[(i, i)] = -one;
            }
            m
        }
        Node::Scalar(c) => CMatrix::from_diagonal_element(2 * n, 2 * n, *c),
        Node::Compact => CMatrix::zeros(2 * n, 2 * n),
        Node::Mul(l, r) => {
            let mut m = CMatrix::zeros(2 * n, 2 * n);
            let off = (r - l) * root;
            m.view_mut((0, 0), (n, n)).copy_from(&(r * mu + l * (one - mu)));
            m.view_mut((0, n), (n, n)).copy_from(&off);
            m.view_mut((n, 0), (n, n)).copy_from(&off);
            m.view_mut((n, n), (n, n)).copy_from(&(r * (one - mu) + l * mu));
            m
        }
        Node::Sum(v) => {
            let mut it = v.iter();
            let mut acc = eval(it.next().expect("non-empty sum"), n, mu, root);
            for c in it {
                acc += eval(c, n, mu, root);
            }
            acc
        }
        Node::Product(v) => {
            let mut it = v.iter();
            let mut acc = eval(it.next().expect("non-empty product"), n, mu, root);
            for c in it {
                acc *= eval(c, n, mu, root);
            }
            acc
        }
        Node::Scale(c, inner) => eval(inner, n, mu, root) * *c,
    }
}

/// `sigma_{t,mu}(e)` with `n` taken from the symbols of `e` (1 if none).
pub fn sigma_eval(e: &OperatorExpr, bp: &BundlePoint) -> Result<SymbolMatrix> {
    let n = e.matrix_size()?.unwrap_or(1);
    sigma_eval_n(e, bp, n)
}

/// `sigma_{t,mu}(e)` for an explicit block size `n`.
pub fn sigma_eval_n(e: &OperatorExpr, bp: &BundlePoint, n: usize) -> Result<SymbolMatrix> {
    bp.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let local = LocalSymbol::new(e, bp.t, n)?;
    Ok(SymbolMatrix { matrix: local.eval(bp.mu), at: *bp })
}
