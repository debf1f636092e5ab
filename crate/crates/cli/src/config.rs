//! The JSON analysis document.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use pcsio_core::calculus::SweepConfig;
use pcsio_core::spaces::{CurveFamily, CurveModel, ExponentFunction, ExponentSpec, KhvedelidzeWeight, Space};
use pcsio_core::symbols::{make_chi, parse_expr, Bindings, Jump, Knot, OperatorExpr, PCSymbol, RESERVED};
use pcsio_core::CMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

fn default_nodes() -> usize {
    512
}

fn default_scale() -> Value {
    Value::from(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub curve: CurveFamily,
    /// Discretization size of the curve.
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default)]
    pub whirl: Vec<WhirlSpec>,
    pub exponent: ExponentSpec,
    #[serde(default)]
    pub dini_constant: f64,
    #[serde(default)]
    pub weights: Vec<WeightSpec>,
    /// Matrix size of the symbols; inferred from the symbols when absent.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub symbols: BTreeMap<String, SymbolSpec>,
    #[serde(default)]
    pub expression: Option<String>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhirlSpec {
    pub t: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub t: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    pub t: f64,
    pub left: Value,
    pub right: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnotSpec {
    pub u: f64,
    pub value: Value,
}

/// Matrix values are a complex scalar (`1.5` or `[re, im]`, meaning a
/// multiple of the identity) or a list of rows of complex entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    Constant { value: Value },
    /// The model symbol `chi_t`.
    Chi { t: f64 },
    /// `left + (right - left) chi_t`.
    Jump { t: f64, left: Value, right: Value },
    /// `scale * tau^k`.
    Power { k: i32, #[serde(default = "default_scale")] scale: Value },
    /// Explicit jumps and arc knots.
    Arcs { jumps: Vec<JumpSpec>, arcs: Vec<Vec<KnotSpec>> },
    /// Block-diagonal symbol.
    Diag { blocks: Vec<SymbolSpec> },
}

/// A configuration resolved into library objects.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: AnalysisConfig,
    pub space: Space,
    pub bindings: Bindings,
    pub expression: Option<OperatorExpr>,
    pub n: usize,
}

/// Configuration errors: always reported with exit code 64.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn cfg_err(context: &str, e: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{context}: {e}"))
}

pub fn parse_complex(v: &Value) -> Result<Complex64, String> {
    match v {
        Value::Number(x) => x.as_f64().map(|re| Complex64::new(re, 0.0)).ok_or_else(|| "bad number".to_string()),
        Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number) => {
            Ok(Complex64::new(a[0].as_f64().unwrap_or(f64::NAN), a[1].as_f64().unwrap_or(f64::NAN)))
        }
        other => Err(format!("expected a number or [re, im], found {other}")),
    }
}

/// Parses a matrix value of size `n` (`None`: infer from the rows, scalars are 1x1).
pub fn parse_matrix(v: &Value, n: Option<usize>) -> Result<CMatrix, String> {
    if let Value::Array(rows) = v {
        if rows.first().is_some_and(Value::is_array) && !(rows.len() == 2 && rows.iter().all(Value::is_number)) {
            let m = rows.len();
            if n.is_some_and(|n| n != m) {
                return Err(format!("expected {} rows, found {m}", n.unwrap_or(0)));
            }
            let mut out = CMatrix::zeros(m, m);
            for (i, row) in rows.iter().enumerate() {
                let Value::Array(entries) = row else { return Err(format!("row {i} is not a list")) };
                if entries.len() != m {
                    return Err(format!("row {i} has {} entries, expected {m}", entries.len()));
                }
                for (j, e) in entries.iter().enumerate() {
                    out[(i, j)] = parse_complex(e).map_err(|e| format!("entry ({i},{j}): {e}"))?;
                }
            }
            return Ok(out);
        }
    }
    let c = parse_complex(v)?;
    let n = n.unwrap_or(1);
    Ok(CMatrix::from_diagonal_element(n, n, c))
}

fn infer_size(spec: &SymbolSpec) -> Option<usize> {
    let rows = |v: &Value| match v {
        Value::Array(r) if r.first().is_some_and(Value::is_array) => Some(r.len()),
        _ => None,
    };
    match spec {
        SymbolSpec::Constant { value } => rows(value),
        SymbolSpec::Jump { left, right, .. } => rows(left).or_else(|| rows(right)),
        SymbolSpec::Arcs { jumps, arcs } => jumps
            .iter()
            .find_map(|j| rows(&j.left).or_else(|| rows(&j.right)))
            .or_else(|| arcs.iter().flatten().find_map(|k| rows(&k.value))),
        SymbolSpec::Diag { blocks } => blocks.iter().map(|b| infer_size(b).unwrap_or(1)).sum::<usize>().into(),
        SymbolSpec::Chi { .. } | SymbolSpec::Power { .. } => None,
    }
}

fn build_symbol(spec: &SymbolSpec, n: usize, curve: &CurveModel) -> Result<PCSymbol, String> {
    let mat = |v: &Value| parse_matrix(v, Some(n));
    let lib = |e: pcsio_core::Error| e.to_string();
    match spec {
        SymbolSpec::Constant { value } => PCSymbol::constant(mat(value)?).map_err(lib),
        SymbolSpec::Chi { t } => make_chi(*t, n).map_err(lib),
        SymbolSpec::Jump { t, left, right } => PCSymbol::jump_ramp(*t, mat(left)?, mat(right)?).map_err(lib),
        SymbolSpec::Power { k, scale } => {
            if n != 1 {
                return Err("power symbols are scalar".into());
            }
            PCSymbol::power(curve, *k, parse_complex(scale)?).map_err(lib)
        }
        SymbolSpec::Arcs { jumps, arcs } => {
            let jumps = jumps
                .iter()
                .map(|j| Ok(Jump { t: j.t, left: mat(&j.left)?, right: mat(&j.right)? }))
                .collect::<Result<Vec<_>, String>>()?;
            let arcs = arcs
                .iter()
                .map(|arc| arc.iter().map(|k| Ok(Knot { u: k.u, value: mat(&k.value)? })).collect())
                .collect::<Result<Vec<Vec<_>>, String>>()?;
            PCSymbol::new(n, jumps, arcs).map_err(lib)
        }
        SymbolSpec::Diag { blocks } => {
            let parts = blocks
                .iter()
                .map(|b| build_symbol(b, infer_size(b).unwrap_or(1), curve))
                .collect::<Result<Vec<_>, String>>()?;
            let d = PCSymbol::diag(&parts).map_err(lib)?;
            if d.size() != n {
                return Err(format!("blocks add up to {0}x{0}, expected {n}x{n}", d.size()));
            }
            Ok(d)
        }
    }
}

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| cfg_err("malformed config", e))
    }

    /// Resolves curve, exponent, weights, symbols, and expression.
    pub fn load(&self) -> Result<Loaded, ConfigError> {
        self.sweep.validate().map_err(|e| cfg_err("sweep", e))?;
        let mut curve = CurveModel::from_family(self.curve.clone(), self.nodes).map_err(|e| cfg_err("curve", e))?;
        for w in &self.whirl {
            curve.set_whirl(w.t, w.delta).map_err(|e| cfg_err("whirl", e))?;
        }
        let exponent =
            ExponentFunction::new(self.exponent.clone(), &curve, self.dini_constant).map_err(|e| cfg_err("exponent", e))?;
        let pairs: Vec<(f64, f64)> = self.weights.iter().map(|w| (w.t, w.lambda)).collect();
        let weight = KhvedelidzeWeight::on_curve(&curve, &pairs).map_err(|e| cfg_err("weights", e))?;
        let n = match self.n {
            Some(0) => return Err(ConfigError("n must be positive".into())),
            Some(n) => n,
            None => self.symbols.values().find_map(infer_size).unwrap_or(1),
        };
        let mut bindings = Bindings::new();
        for (name, spec) in &self.symbols {
            if RESERVED.contains(&name.as_str()) {
                return Err(ConfigError(format!("symbol name '{name}' is reserved")));
            }
            let sym = build_symbol(spec, n, &curve).map_err(|e| cfg_err(&format!("symbol '{name}'"), e))?;
            bindings.insert(name.clone(), Arc::new(sym));
        }
        let expression = match &self.expression {
            Some(text) => Some(parse_expr(text, &bindings).map_err(|e| cfg_err("expression", e))?),
            None => None,
        };
        Ok(Loaded { config: self.clone(), space: Space::new(curve, exponent, weight), bindings, expression, n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_forms() {
        let v: Value = serde_json::from_str("[[1, [0, 2]], [0, 1]]").unwrap();
        let m = parse_matrix(&v, None).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 2.0));
        let v: Value = serde_json::from_str("[0.5, -1]").unwrap();
        assert_eq!(parse_matrix(&v, Some(2)).unwrap(), CMatrix::from_diagonal_element(2, 2, Complex64::new(0.5, -1.0)));
        assert!(parse_matrix(&serde_json::from_str("[[1, 2]]").unwrap(), None).is_err());
        assert!(parse_matrix(&serde_json::from_str("\"x\"").unwrap(), None).is_err());
    }

    #[test]
    fn minimal_document() {
        let cfg = AnalysisConfig::from_json(
            r#"{"curve": {"family": "circle", "center": [0, 0], "radius": 1},
                "exponent": {"kind": "constant", "value": 2},
                "symbols": {"a": {"kind": "jump", "t": 0.25, "left": 1, "right": [0, 1]}},
                "expression": "a*P + Q"}"#,
        )
        .unwrap();
        let loaded = cfg.load().unwrap();
        assert_eq!(loaded.n, 1);
        assert!(loaded.expression.unwrap().as_scalar_sio(1).is_some());
    }

    #[test]
    fn reserved_and_unknown() {
        let base = r#""curve": {"family": "circle", "center": [0, 0], "radius": 1}, "exponent": {"kind": "constant", "value": 2}"#;
        let cfg = AnalysisConfig::from_json(&format!(r#"{{{base}, "symbols": {{"S": {{"kind": "chi", "t": 0}}}}}}"#)).unwrap();
        assert!(cfg.load().is_err());
        assert!(AnalysisConfig::from_json(&format!(r#"{{{base}, "bogus": 1}}"#)).is_err());
    }
}
