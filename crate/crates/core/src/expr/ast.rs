use std::fmt;

/// Byte range `[start, end)` of a node in its source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone)]
pub enum NodeKind {
    /// The variable `z`.
    Var,
    /// The family index `n`.
    Param,
    /// A nonnegative real literal.
    Const(f64),
    /// The imaginary unit `i`.
    ImagUnit,
    Binary(BinOp, Box<Node>, Box<Node>),
    Neg(Box<Node>),
    PowInt(Box<Node>, i32),
    Call(Func, Box<Node>),
}

/// An AST node. Equality is structural: spans are ignored.
#[derive(Debug, Clone)]
pub struct Node {
    pub kind: NodeKind,
    pub span: Span,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        use NodeKind::*;
        match (&self.kind, &other.kind) {
            (Var, Var) | (Param, Param) | (ImagUnit, ImagUnit) => true,
            (Const(a), Const(b)) => a.to_bits() == b.to_bits(),
            (Binary(o1, l1, r1), Binary(o2, l2, r2)) => o1 == o2 && l1 == l2 && r1 == r2,
            (Neg(a), Neg(b)) => a == b,
            (PowInt(a, k1), PowInt(b, k2)) => k1 == k2 && a == b,
            (Call(f1, a), Call(f2, b)) => f1 == f2 && a == b,
            _ => false,
        }
    }
}

impl Node {
    pub fn new(kind: NodeKind, span: Span) -> Self {
        Node { kind, span }
    }

    /// Node with an empty span, for programmatically built trees.
    pub fn synthetic(kind: NodeKind) -> Self {
        Node::new(kind, Span::default())
    }

    pub fn var() -> Self {
        Node::synthetic(NodeKind::Var)
    }

    pub fn param() -> Self {
        Node::synthetic(NodeKind::Param)
    }

    pub fn constant(x: f64) -> Self {
        Node::synthetic(NodeKind::Const(x))
    }

    pub fn imag() -> Self {
        Node::synthetic(NodeKind::ImagUnit)
    }

    pub fn binary(op: BinOp, lhs: Node, rhs: Node) -> Self {
        Node::synthetic(NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    pub fn neg(inner: Node) -> Self {
        Node::synthetic(NodeKind::Neg(Box::new(inner)))
    }

    pub fn pow(base: Node, k: i32) -> Self {
        Node::synthetic(NodeKind::PowInt(Box::new(base), k))
    }

    pub fn call(f: Func, arg: Node) -> Self {
        Node::synthetic(NodeKind::Call(f, Box::new(arg)))
    }

    pub fn depth(&self) -> usize {
        match &self.kind {
            NodeKind::Var | NodeKind::Param | NodeKind::Const(_) | NodeKind::ImagUnit => 1,
            NodeKind::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
            NodeKind::Neg(a) | NodeKind::PowInt(a, _) | NodeKind::Call(_, a) => 1 + a.depth(),
        }
    }

    /// True if the subtree mentions `z`.
    pub fn uses_var(&self) -> bool {
        match &self.kind {
            NodeKind::Var => true,
            NodeKind::Param | NodeKind::Const(_) | NodeKind::ImagUnit => false,
            NodeKind::Binary(_, l, r) => l.uses_var() || r.uses_var(),
            NodeKind::Neg(a) | NodeKind::PowInt(a, _) | NodeKind::Call(_, a) => a.uses_var(),
        }
    }

    fn is_atom(&self) -> bool {
        matches!(
            self.kind,
            NodeKind::Var | NodeKind::Param | NodeKind::Const(_) | NodeKind::ImagUnit | NodeKind::Call(..)
        )
    }
}

/// Prints a form that re-parses to a structurally identical tree.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            NodeKind::Var => f.write_str("z"),
            NodeKind::Param => f.write_str("n"),
            // `Display` for f64 never uses exponent notation and round-trips.
            NodeKind::Const(x) => write!(f, "{x}"),
            NodeKind::ImagUnit => f.write_str("i"),
            NodeKind::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            NodeKind::Neg(a) if a.is_atom() => write!(f, "-{a}"),
            NodeKind::Neg(a) => write!(f, "-({a})"),
            NodeKind::PowInt(b, k) if b.is_atom() => write!(f, "{b}^{k}"),
            NodeKind::PowInt(b, k) => write!(f, "({b})^{k}"),
            NodeKind::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
