//! A small expression language for one-parameter families `f_n(z)`.
//!
//! Reserved identifiers are `z` (the variable), `n` (the family index), `i`,
//! `exp` and `log`. `log` is the principal branch. Powers take integer literal
//! exponents only, and multiplication is always explicit (`n*z`, never `nz`).

mod ast;
mod parser;
pub mod random;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::jet::{Jet3, JetConfig, JetError};

pub use ast::{BinOp, Func, Node, NodeKind, Span};
pub use parser::{parse_complex, ParseError};

/// A parsed family definition. Immutable once built.
#[derive(Debug, Clone)]
pub struct FamilyExpr {
    root: Node,
    source: Option<String>,
}

/// Structural equality of the trees; source text is not compared.
impl PartialEq for FamilyExpr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl FamilyExpr {
    pub fn from_node(root: Node) -> Self {
        FamilyExpr { root, source: None }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    /// Source text of a node's span, or its pretty-printed form when the tree
    /// was not parsed from text.
    pub fn snippet(&self, node: &Node) -> String {
        match &self.source {
            Some(src) if node.span.end <= src.len() && node.span.start < node.span.end => {
                src[node.span.start..node.span.end].to_string()
            }
            _ => node.to_string(),
        }
    }

    pub fn uses_var(&self) -> bool {
        self.root.uses_var()
    }

    /// Evaluates the jet of `f_n` at `z`.
    pub fn eval_jet(&self, n: f64, z: Complex64) -> Result<Jet3, EvalError> {
        self.eval_with(n, Jet3::var(z), &JetConfig::default())
    }

    /// Evaluates with the variable seeded by an arbitrary jet. Seeding with the
    /// jet of an inner function `g` at `z` yields the jet of `f_n ∘ g` at `z`.
    pub fn eval_with(&self, n: f64, var: Jet3, cfg: &JetConfig) -> Result<Jet3, EvalError> {
        let ctx = EvalCtx { expr: self, n, var, cfg };
        ctx.eval(&self.root)
    }
}

impl fmt::Display for FamilyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl FromStr for FamilyExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

pub fn parse(source: &str) -> Result<FamilyExpr, ParseError> {
    let root = parser::parse_node(source)?;
    Ok(FamilyExpr { root, source: Some(source.to_string()) })
}

/// A jet failure located at a subexpression.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} in '{snippet}' (bytes {}..{}) at n = {n}, z = {z}", span.start, span.end)]
pub struct EvalError {
    pub kind: JetError,
    pub span: Span,
    pub snippet: String,
    pub n: f64,
    pub z: Complex64,
}

impl EvalError {
    pub fn is_pole(&self) -> bool {
        self.kind.is_pole()
    }
}

struct EvalCtx<'a> {
    expr: &'a FamilyExpr,
    n: f64,
    var: Jet3,
    cfg: &'a JetConfig,
}

impl EvalCtx<'_> {
    fn fail(&self, node: &Node, kind: JetError) -> EvalError {
        EvalError { kind, span: node.span, snippet: self.expr.snippet(node), n: self.n, z: self.var.v }
    }

    fn eval(&self, node: &Node) -> Result<Jet3, EvalError> {
        let out = match &node.kind {
            NodeKind::Var => Ok(self.var),
            NodeKind::Param => Ok(Jet3::constant(Complex64::new(self.n, 0.0))),
            NodeKind::Const(x) => Ok(Jet3::constant(Complex64::new(*x, 0.0))),
            NodeKind::ImagUnit => Ok(Jet3::constant(Complex64::i())),
            NodeKind::Neg(a) => Ok(-self.eval(a)?),
            NodeKind::Binary(op, l, r) => {
                let (a, b) = (self.eval(l)?, self.eval(r)?);
                match op {
                    BinOp::Add => a.checked_add(b),
                    BinOp::Sub => a.checked_sub(b),
                    BinOp::Mul => a.checked_mul(b),
                    BinOp::Div => self.cfg.div(a, b),
                }
            }
            NodeKind::PowInt(a, k) => self.cfg.powi(self.eval(a)?, *k),
            NodeKind::Call(Func::Exp, a) => self.cfg.exp(self.eval(a)?),
            NodeKind::Call(Func::Log, a) => self.cfg.ln(self.eval(a)?),
        };
        out.map_err(|kind| self.fail(node, kind))
    }
}
