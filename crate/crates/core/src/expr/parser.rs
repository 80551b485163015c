//! Recursive-descent parser for family expressions.
//!
//! ```text
//! expr    := term { ("+" | "-") term } ;
//! term    := unary { ("*" | "/") unary } ;
//! unary   := "-" unary | power ;
//! power   := primary [ "^" ["-"] digits ] ;
//! primary := number | "z" | "n" | "i" | func "(" expr ")" | "(" expr ")" ;
//! func    := "exp" | "log" ;
//! number  := digits [ "." digits ] ;
//! ```
//!
//! `^` binds tighter than unary minus (`-z^2` is `-(z^2)`) and does not chain.

use num_complex::Complex64;
use thiserror::Error;

use super::ast::{BinOp, Func, Node, NodeKind, Span};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {position}: {message} (expected {expected})")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
    pub expected: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>, expected: impl Into<String>) -> Self {
        ParseError { position, message: message.into(), expected: expected.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number { value: f64, integer: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number { value, .. } => format!("number {value}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

/// Scans `digits [ "." digits ]` at the start of `s`. Returns the byte length
/// consumed, or the offset of the malformed character.
pub(crate) fn scan_number(s: &str) -> Result<usize, usize> {
    let bytes = s.as_bytes();
    let int_len = bytes.iter().take_while(|b| b.is_ascii_digit()).count();
    if int_len == 0 {
        return Err(0);
    }
    if bytes.get(int_len) != Some(&b'.') {
        return Ok(int_len);
    }
    let frac_len = bytes[int_len + 1..].iter().take_while(|b| b.is_ascii_digit()).count();
    if frac_len == 0 {
        return Err(int_len + 1);
    }
    Ok(int_len + 1 + frac_len)
}

fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let single = match b {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, Span::new(i, i + 1)));
            i += 1;
        } else if b.is_ascii_digit() {
            let len = scan_number(&src[i..])
                .map_err(|off| ParseError::new(i + off, "malformed number", "digit"))?;
            let value: f64 = src[i..i + len].parse().expect("scanned digits parse as f64");
            let integer = !src[i..i + len].contains('.');
            out.push((Tok::Number { value, integer }, Span::new(i, i + len)));
            i += len;
        } else if b.is_ascii_alphabetic() {
            let len = bytes[i..].iter().take_while(|c| c.is_ascii_alphanumeric() || **c == b'_').count();
            out.push((Tok::Ident(src[i..i + len].to_string()), Span::new(i, i + len)));
            i += len;
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(ParseError::new(i, format!("unexpected character '{ch}'"), "token"));
        }
    }
    out.push((Tok::End, Span::new(src.len(), src.len())));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let tok = self.peek();
        ParseError::new(self.span().start, format!("unexpected {}", tok.describe()), expected)
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let span = lhs.span.join(rhs.span);
            lhs = Node::new(NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            let span = lhs.span.join(rhs.span);
            lhs = Node::new(NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Tok::Minus {
            let (_, minus) = self.bump();
            let inner = self.unary()?;
            let span = minus.join(inner.span);
            return Ok(Node::new(NodeKind::Neg(Box::new(inner)), span));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let (tok, span) = (self.peek().clone(), self.span());
        let k = match tok {
            Tok::Number { value, integer: true } if value <= i32::MAX as f64 => value as i32,
            Tok::Number { .. } => {
                return Err(ParseError::new(span.start, "exponent must be an integer literal", "integer exponent"))
            }
            _ => return Err(self.unexpected("integer exponent")),
        };
        self.bump();
        let k = if negative { -k } else { k };
        if *self.peek() == Tok::Caret {
            return Err(ParseError::new(self.span().start, "'^' is non-associative; parenthesize", "operator"));
        }
        let span = base.span.join(span);
        Ok(Node::new(NodeKind::PowInt(Box::new(base), k), span))
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let (tok, span) = (self.peek().clone(), self.span());
        match tok {
            Tok::Number { value, .. } => {
                self.bump();
                Ok(Node::new(NodeKind::Const(value), span))
            }
            Tok::LParen => {
                self.bump();
                let mut inner = self.expr()?;
                let close = self.expect_rparen()?;
                inner.span = span.join(close);
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "z" => {
                    self.bump();
                    Ok(Node::new(NodeKind::Var, span))
                }
                "n" => {
                    self.bump();
                    Ok(Node::new(NodeKind::Param, span))
                }
                "i" => {
                    self.bump();
                    Ok(Node::new(NodeKind::ImagUnit, span))
                }
                "exp" | "log" => {
                    let func = if name == "exp" { Func::Exp } else { Func::Log };
                    self.bump();
                    if *self.peek() != Tok::LParen {
                        return Err(self.unexpected("'('"));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    let close = self.expect_rparen()?;
                    Ok(Node::new(NodeKind::Call(func, Box::new(arg)), span.join(close)))
                }
                other => Err(ParseError::new(span.start, format!("unknown identifier '{other}'"), "primary")),
            },
            _ => Err(self.unexpected("primary")),
        }
    }

    fn expect_rparen(&mut self) -> Result<Span, ParseError> {
        if *self.peek() == Tok::RParen {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected("')'"))
        }
    }
}

pub(crate) fn parse_node(src: &str) -> Result<Node, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let node = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(node)
}

/// Parses a complex literal of the form `a`, `bi`, `a+bi` or `a-bi`, with an
/// optional leading sign. Numbers follow the DSL number grammar; a bare `i`
/// stands for `1i`.
pub fn parse_complex(s: &str) -> Result<Complex64, ParseError> {
    let bad = |pos: usize, msg: &str| ParseError::new(pos, msg, "complex literal a+bi");
    let bytes = s.as_bytes();
    let mut pos = 0;

    let signed = |pos: &mut usize| -> Result<(f64, bool), ParseError> {
        let mut sign = 1.0;
        if let Some(&c) = bytes.get(*pos) {
            if c == b'+' || c == b'-' {
                if c == b'-' {
                    sign = -1.0;
                }
                *pos += 1;
            }
        }
        let (mag, len) = match scan_number(&s[*pos..]) {
            Ok(len) => (s[*pos..*pos + len].parse::<f64>().expect("scanned digits"), len),
            Err(0) if bytes.get(*pos) == Some(&b'i') => (1.0, 0),
            Err(off) => return Err(bad(*pos + off, "malformed number")),
        };
        *pos += len;
        let imag = bytes.get(*pos) == Some(&b'i');
        if imag {
            *pos += 1;
        }
        Ok((sign * mag, imag))
    };

    let (first, first_imag) = signed(&mut pos)?;
    if pos == s.len() {
        return Ok(if first_imag { Complex64::new(0.0, first) } else { Complex64::new(first, 0.0) });
    }
    if first_imag || !matches!(bytes[pos], b'+' | b'-') {
        return Err(bad(pos, "unexpected trailing characters"));
    }
    let (second, second_imag) = signed(&mut pos)?;
    if !second_imag {
        return Err(bad(pos, "imaginary part must end in 'i'"));
    }
    if pos != s.len() {
        return Err(bad(pos, "unexpected trailing characters"));
    }
    Ok(Complex64::new(first, second))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Node {
        parse_node(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn example_families() {
        let e1 = Node::call(Func::Exp, Node::binary(BinOp::Mul, Node::param(), Node::var()));
        assert_eq!(p("exp(n*z)"), e1);
        let inner = Node::binary(
            BinOp::Div,
            Node::var(),
            Node::binary(BinOp::Add, Node::binary(BinOp::Mul, Node::param(), Node::var()), Node::constant(1.0)),
        );
        assert_eq!(p("exp(z/(n*z+1))"), Node::call(Func::Exp, inner));
    }

    #[test]
    fn incomplete_expression() {
        let e = parse_node("z +").unwrap_err();
        assert_eq!(e.position, 3);
        assert_eq!(e.expected, "primary");
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(p("-z^2"), Node::neg(Node::pow(Node::var(), 2)));
        assert_eq!(p("(-z)^2"), Node::pow(Node::neg(Node::var()), 2));
        assert_eq!(p("z^-1"), Node::pow(Node::var(), -1));
        assert_eq!(p("2*-z"), Node::binary(BinOp::Mul, Node::constant(2.0), Node::neg(Node::var())));
    }

    #[test]
    fn precedence_and_associativity() {
        // a - b - c is (a - b) - c
        let got = p("z - n - 1");
        let want = Node::binary(
            BinOp::Sub,
            Node::binary(BinOp::Sub, Node::var(), Node::param()),
            Node::constant(1.0),
        );
        assert_eq!(got, want);
        let got = p("1 + z * n");
        let want = Node::binary(BinOp::Add, Node::constant(1.0), Node::binary(BinOp::Mul, Node::var(), Node::param()));
        assert_eq!(got, want);
    }

    #[test]
    fn power_rules() {
        assert!(parse_node("z^2^3").is_err());
        assert!(parse_node("z^1.5").is_err());
        assert!(parse_node("z^2.0").is_err());
        assert!(parse_node("z^n").is_err());
        assert_eq!(p("(z^2)^3"), Node::pow(Node::pow(Node::var(), 2), 3));
    }

    #[test]
    fn rejects_unknown_identifiers_and_implicit_products() {
        let e = parse_node("nz").unwrap_err();
        assert_eq!(e.position, 0);
        assert!(parse_node("n z").is_err());
        assert!(parse_node("sin(z)").is_err());
        assert!(parse_node("exp z").is_err());
        assert!(parse_node("1.").is_err());
        assert!(parse_node("z @ 2").unwrap_err().position == 2);
        assert!(parse_node("(z").is_err());
        assert!(parse_node("").is_err());
    }

    #[test]
    fn spans_cover_source() {
        let src = "exp(z) + n";
        let node = p(src);
        assert_eq!(node.span, Span::new(0, src.len()));
        if let NodeKind::Binary(_, l, _) = &node.kind {
            assert_eq!(&src[l.span.start..l.span.end], "exp(z)");
        } else {
            panic!("expected binary");
        }
    }

    #[test]
    fn complex_literals() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("1+0i").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("1.5-2i").unwrap(), c(1.5, -2.0));
        assert_eq!(parse_complex("-0.5").unwrap(), c(-0.5, 0.0));
        assert_eq!(parse_complex("3i").unwrap(), c(0.0, 3.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2+i").unwrap(), c(2.0, 1.0));
        assert_eq!(parse_complex("0+0i").unwrap(), c(0.0, 0.0));
        assert!(parse_complex("1 + 2i").is_err());
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }
}
