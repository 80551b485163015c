//! Oracles shared by the integration tests. Nothing here goes through the
//! jet arithmetic: values come from plain complex evaluation and derivatives
//! from finite differences.
#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use schwarzian_lab::expr::{BinOp, Func, Node, NodeKind};
use schwarzian_lab::FamilyExpr;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Direct evaluation with `num_complex`. `None` on division by zero or a
/// non-finite result.
pub fn eval_plain(node: &Node, n: f64, z: Complex64) -> Option<Complex64> {
    let v = match &node.kind {
        NodeKind::Var => z,
        NodeKind::Param => c(n, 0.0),
        NodeKind::Const(x) => c(*x, 0.0),
        NodeKind::ImagUnit => c(0.0, 1.0),
        NodeKind::Neg(a) => -eval_plain(a, n, z)?,
        NodeKind::Binary(op, a, b) => {
            let (a, b) = (eval_plain(a, n, z)?, eval_plain(b, n, z)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == c(0.0, 0.0) {
                        return None;
                    }
                    a / b
                }
            }
        }
        NodeKind::PowInt(a, k) => {
            let a = eval_plain(a, n, z)?;
            if *k < 0 && a == c(0.0, 0.0) {
                return None;
            }
            a.powi(*k)
        }
        NodeKind::Call(Func::Exp, a) => eval_plain(a, n, z)?.exp(),
        NodeKind::Call(Func::Log, a) => {
            let a = eval_plain(a, n, z)?;
            if a == c(0.0, 0.0) {
                return None;
            }
            a.ln()
        }
    };
    (v.re.is_finite() && v.im.is_finite()).then_some(v)
}

pub fn plain(f: &FamilyExpr, n: f64) -> impl Fn(Complex64) -> Option<Complex64> + '_ {
    move |z| eval_plain(f.root(), n, z)
}

/// Central differences of order 1..3 along direction `e`, step `h`.
fn central(f: &dyn Fn(Complex64) -> Option<Complex64>, z: Complex64, e: Complex64, h: f64) -> Option<[Complex64; 3]> {
    let s = e * h;
    let p1 = f(z + s)?;
    let m1 = f(z - s)?;
    let p2 = f(z + 2.0 * s)?;
    let m2 = f(z - 2.0 * s)?;
    let f0 = f(z)?;
    let d1 = (p1 - m1) / (2.0 * s);
    let d2 = (p1 - 2.0 * f0 + m1) / (s * s);
    let d3 = (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * s * s * s);
    Some([d1, d2, d3])
}

/// Richardson-extrapolated derivative estimates, averaged over four
/// directions. Also returns the spread between the step `h` and `h/2`
/// estimates, a convergence indicator per order.
pub fn fd_derivatives(
    f: &dyn Fn(Complex64) -> Option<Complex64>,
    z: Complex64,
) -> Option<([Complex64; 4], [f64; 3])> {
    const STEPS: [f64; 3] = [1e-3, 4e-3, 1e-2];
    let mut est = [c(0.0, 0.0); 3];
    let mut spread = [0.0f64; 3];
    for k in 0..4 {
        let e = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * k as f64);
        for order in 0..3 {
            let h = STEPS[order];
            let coarse = central(f, z, e, h)?[order];
            let fine = central(f, z, e, h / 2.0)?[order];
            est[order] += (4.0 * fine - coarse) / 3.0 / 4.0;
            spread[order] = spread[order].max((fine - coarse).norm());
        }
    }
    Some(([f(z)?, est[0], est[1], est[2]], spread))
}

pub fn rel_gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

pub fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1.0)
}

pub fn arb_complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(x, y)| c(x, y))
}

fn leaf() -> impl Strategy<Value = Node> {
    prop_oneof![
        3 => Just(Node::var()),
        1 => Just(Node::param()),
        1 => Just(Node::imag()),
        2 => (0u32..300).prop_map(|k| Node::constant(k as f64 / 100.0)),
    ]
}

/// Random ASTs over the full grammar, optionally without `log`.
pub fn arb_node(allow_log: bool) -> impl Strategy<Value = Node> {
    leaf().prop_recursive(4, 24, 2, move |inner| {
        let ops = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div)];
        let func = if allow_log { prop_oneof![Just(Func::Exp), Just(Func::Log)].boxed() } else { Just(Func::Exp).boxed() };
        prop_oneof![
            3 => (ops, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Node::binary(op, a, b)),
            1 => inner.clone().prop_map(Node::neg),
            1 => (inner.clone(), -3i32..=3).prop_map(|(a, k)| Node::pow(a, k)),
            1 => (func, inner).prop_map(|(f, a)| Node::call(f, a)),
        ]
    })
}

pub fn arb_family(allow_log: bool) -> impl Strategy<Value = FamilyExpr> {
    arb_node(allow_log).prop_filter("depends on z", Node::uses_var).prop_map(FamilyExpr::from_node)
}
