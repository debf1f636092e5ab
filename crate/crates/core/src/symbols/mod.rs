mod expr;
mod parse;
mod pc;

pub use expr::{jump_point_set, OperatorExpr};
pub use parse::{parse_expr, Bindings, RESERVED};
pub use pc::{combine, make_chi, one_sided_limits, Jump, Knot, PCSymbol};
