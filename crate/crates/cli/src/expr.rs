//! Parameter parsing: complex literals and real expressions.

use std::str::FromStr;

use evalexpr::{
    build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node, Value,
};
use num_complex::Complex64;

use crate::{CliError, CliResult};

/// A complex literal such as `0.5`, `-1+2i` or `i`.
pub fn complex(s: &str) -> CliResult<Complex64> {
    let t = s.trim().replace(' ', "");
    Complex64::from_str(&t).map_err(|_| CliError::Usage(format!("cannot parse '{s}' as a complex number")))
}

pub fn real(s: &str) -> CliResult<f64> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot parse '{s}' as a number")))
}

/// Coefficients `c0;c1;...` of a polynomial in `z`.
pub fn polynomial(s: &str) -> CliResult<Vec<Complex64>> {
    let c: Vec<Complex64> = s.split(';').map(complex).collect::<CliResult<_>>()?;
    if c.is_empty() {
        return Err(CliError::Usage("empty polynomial".into()));
    }
    Ok(c)
}

pub fn eval_polynomial(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

/// A real-valued expression in the given variables, compiled once.
pub struct RealExpr {
    tree: Node<DefaultNumericTypes>,
    vars: Vec<String>,
    source: String,
}

impl RealExpr {
    pub fn parse(source: &str, vars: &[&str]) -> CliResult<Self> {
        let tree = build_operator_tree::<DefaultNumericTypes>(source)
            .map_err(|e| CliError::Usage(format!("cannot parse expression '{source}': {e}")))?;
        let e = Self {
            tree,
            vars: vars.iter().map(|v| v.to_string()).collect(),
            source: source.into(),
        };
        // Fail on unknown identifiers now rather than per node.
        e.eval(&vec![0.5; vars.len()])?;
        Ok(e)
    }

    pub fn eval(&self, values: &[f64]) -> CliResult<f64> {
        let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
        let bind = |ctx: &mut HashMapContext<DefaultNumericTypes>, k: &str, v: f64| {
            ctx.set_value(k.into(), Value::Float(v))
                .map_err(|e| CliError::Usage(e.to_string()))
        };
        bind(&mut ctx, "pi", std::f64::consts::PI)?;
        for (k, v) in self.vars.iter().zip(values) {
            bind(&mut ctx, k, *v)?;
        }
        self.tree
            .eval_number_with_context(&ctx)
            .map_err(|e| CliError::Usage(format!("cannot evaluate '{}': {e}", self.source)))
    }
}
