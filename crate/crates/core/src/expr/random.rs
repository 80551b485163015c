//! Seeded generation of random well-formed families, used for property checks.

use rand::Rng;

use super::ast::{BinOp, Func, Node};
use super::FamilyExpr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub max_depth: usize,
    /// Include `log` nodes. Families with `log` have branch cuts, so segment
    /// integrals across them are not analytic.
    pub allow_log: bool,
    pub allow_div: bool,
    /// Literal constants are drawn from `[0, max_const]` at two decimals.
    pub max_const: f64,
    /// Largest absolute integer exponent.
    pub max_power: i32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_depth: 4, allow_log: true, allow_div: true, max_const: 3.0, max_power: 3 }
    }
}

/// Draws a family that depends on `z`.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> FamilyExpr {
    loop {
        let node = gen_node(rng, cfg, cfg.max_depth.max(1));
        if node.uses_var() {
            return FamilyExpr::from_node(node);
        }
    }
}

fn gen_leaf<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Node {
    match rng.random_range(0..10) {
        0..=4 => Node::var(),
        5 | 6 => Node::param(),
        7 => Node::imag(),
        _ => {
            let x = (rng.random_range(0.0..=cfg.max_const) * 100.0).round() / 100.0;
            Node::constant(x)
        }
    }
}

fn gen_node<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, depth: usize) -> Node {
    if depth <= 1 || rng.random_bool(0.25) {
        return gen_leaf(rng, cfg);
    }
    let d = depth - 1;
    loop {
        let node = match rng.random_range(0..9) {
            0 => Node::binary(BinOp::Add, gen_node(rng, cfg, d), gen_node(rng, cfg, d)),
            1 => Node::binary(BinOp::Sub, gen_node(rng, cfg, d), gen_node(rng, cfg, d)),
            2 | 3 => Node::binary(BinOp::Mul, gen_node(rng, cfg, d), gen_node(rng, cfg, d)),
            4 if cfg.allow_div => Node::binary(BinOp::Div, gen_node(rng, cfg, d), gen_node(rng, cfg, d)),
            5 => Node::neg(gen_node(rng, cfg, d)),
            6 => {
                let mut k = rng.random_range(-cfg.max_power..=cfg.max_power);
                if k == 0 {
                    k = 2;
                }
                if k < 0 && !cfg.allow_div {
                    k = -k;
                }
                Node::pow(gen_node(rng, cfg, d), k)
            }
            7 => Node::call(Func::Exp, gen_node(rng, cfg, d)),
            8 if cfg.allow_log => Node::call(Func::Log, gen_node(rng, cfg, d)),
            _ => continue,
        };
        return node;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, NodeKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn contains_log_or_div(node: &Node) -> bool {
        match &node.kind {
            NodeKind::Call(Func::Log, _) | NodeKind::Binary(BinOp::Div, _, _) => true,
            NodeKind::PowInt(_, k) if *k < 0 => true,
            NodeKind::Binary(_, l, r) => contains_log_or_div(l) || contains_log_or_div(r),
            NodeKind::Neg(a) | NodeKind::PowInt(a, _) | NodeKind::Call(_, a) => contains_log_or_div(a),
            _ => false,
        }
    }

    #[test]
    fn respects_config_and_seed() {
        let cfg = GenConfig { allow_log: false, allow_div: false, ..GenConfig::default() };
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let f = random_family(&mut a, &cfg);
            assert_eq!(f, random_family(&mut b, &cfg));
            assert!(f.uses_var());
            assert!(f.root().depth() <= cfg.max_depth);
            assert!(!contains_log_or_div(f.root()), "{f}");
            assert_eq!(parse(&f.to_string()).unwrap(), f);
        }
    }
}
