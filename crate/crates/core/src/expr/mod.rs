//! Immutable symbolic expressions over coordinates and parameters.
//!
//! Trees are built from sums, products, integer powers, the elementary
//! functions `sinh`, `cosh`, `exp`, `tanh`, exact complex-rational constants
//! and symbols. Construction flattens nested sums/products and sorts their
//! children; [`Expr::simplify`] brings a tree to canonical form.

mod calculus;
mod eval;
mod number;
mod parse;
mod poly;
mod precise;
mod print;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

pub use eval::{equality_probe, Bindings, Probe, ProbeOutcome};
pub use number::Number;
pub use parse::parse;
pub use precise::PRECISION;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("multi-precision evaluation failed: {0}")]
    Precision(String),
}

const RESERVED: [&str; 5] = ["i", "sinh", "cosh", "exp", "tanh"];

/// A validated identifier (`[A-Za-z_][A-Za-z0-9_]*`, not a reserved word).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Result<Symbol, ExprError> {
        let mut chars = name.chars();
        let head_ok = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        let tail_ok = chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !head_ok || !tail_ok || RESERVED.contains(&name) {
            return Err(ExprError::UnknownSymbol(name.to_string()));
        }
        Ok(Symbol(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sinh,
    Cosh,
    Exp,
    Tanh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sinh" => Some(Func::Sinh),
            "cosh" => Some(Func::Cosh),
            "exp" => Some(Func::Exp),
            "tanh" => Some(Func::Tanh),
            _ => None,
        }
    }
}

/// Node kinds. The variant order fixes the canonical ordering of children.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Const(Number),
    Symbol(Symbol),
    Func(Func, Expr),
    Pow(Expr, i32),
    Product(Vec<Expr>),
    Sum(Vec<Expr>),
}

/// Shared, immutable expression tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(n: Number) -> Expr {
        Expr::from_node(Node::Const(n))
    }

    pub fn zero() -> Expr {
        Expr::constant(Number::zero())
    }

    pub fn one() -> Expr {
        Expr::constant(Number::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Number::integer(n))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::constant(Number::rational(num, den))
    }

    /// The imaginary unit.
    pub fn i() -> Expr {
        Expr::constant(Number::i())
    }

    pub fn symbol(s: &Symbol) -> Expr {
        Expr::from_node(Node::Symbol(s.clone()))
    }

    /// Symbol from a literal name. Panics on an invalid identifier; use
    /// [`Symbol::new`] for untrusted input.
    pub fn sym(name: &str) -> Expr {
        Expr::symbol(&Symbol::new(name).expect("invalid symbol name"))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::from_node(Node::Func(f, arg))
    }

    pub fn sinh(self) -> Expr {
        Expr::func(Func::Sinh, self)
    }

    pub fn cosh(self) -> Expr {
        Expr::func(Func::Cosh, self)
    }

    pub fn exp(self) -> Expr {
        Expr::func(Func::Exp, self)
    }

    pub fn tanh(self) -> Expr {
        Expr::func(Func::Tanh, self)
    }

    pub fn pow(self, n: i32) -> Expr {
        match n {
            0 => Expr::one(),
            1 => self,
            _ => Expr::from_node(Node::Pow(self, n)),
        }
    }

    pub fn recip(self) -> Expr {
        self.pow(-1)
    }

    /// Flattened, sorted sum. Empty sums are zero.
    pub fn sum(items: impl IntoIterator<Item = Expr>) -> Expr {
        let mut children = Vec::new();
        for e in items {
            match e.node() {
                Node::Sum(inner) => children.extend(inner.iter().cloned()),
                _ => children.push(e),
            }
        }
        match children.len() {
            0 => Expr::zero(),
            1 => children.pop().unwrap(),
            _ => {
                children.sort();
                Expr::from_node(Node::Sum(children))
            }
        }
    }

    /// Flattened, sorted product. Empty products are one.
    pub fn product(items: impl IntoIterator<Item = Expr>) -> Expr {
        let mut children = Vec::new();
        for e in items {
            match e.node() {
                Node::Product(inner) => children.extend(inner.iter().cloned()),
                _ => children.push(e),
            }
        }
        match children.len() {
            0 => Expr::one(),
            1 => children.pop().unwrap(),
            _ => {
                children.sort();
                Expr::from_node(Node::Product(children))
            }
        }
    }

    pub fn as_number(&self) -> Option<&Number> {
        match self.node() {
            Node::Const(n) => Some(n),
            _ => None,
        }
    }

    /// Structural zero test; call on simplified expressions.
    pub fn is_zero(&self) -> bool {
        self.as_number().is_some_and(Number::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_number().is_some_and(Number::is_one)
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Symbol(s) => {
                out.insert(s.clone());
            }
            Node::Func(_, a) | Node::Pow(a, _) => a.collect_symbols(out),
            Node::Product(cs) | Node::Sum(cs) => {
                cs.iter().for_each(|c| c.collect_symbols(out));
            }
        }
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Symbol(t) => t == s,
            Node::Func(_, a) | Node::Pow(a, _) => a.contains_symbol(s),
            Node::Product(cs) | Node::Sum(cs) => cs.iter().any(|c| c.contains_symbol(s)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Symbol(_) => 0,
            Node::Func(_, a) | Node::Pow(a, _) => a.size(),
            Node::Product(cs) | Node::Sum(cs) => cs.iter().map(Expr::size).sum(),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl From<Number> for Expr {
    fn from(n: Number) -> Expr {
        Expr::constant(n)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Expr {
        Expr::symbol(s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (self, rhs.clone());
                $body
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let ($a, $b) = (self.clone(), rhs);
                $body
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (self.clone(), rhs.clone());
                $body
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a, b]));
binop!(Sub, sub, |a, b| Expr::sum([a, -b]));
binop!(Mul, mul, |a, b| Expr::product([a, b]));
binop!(Div, div, |a, b| Expr::product([a, b.recip()]));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product([Expr::int(-1), self])
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbols_are_validated() {
        assert!(Symbol::new("z0").is_ok());
        assert!(Symbol::new("theta_01").is_ok());
        for bad in ["", "0z", "i", "sinh", "a b", "x-1"] {
            assert!(Symbol::new(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn construction_flattens_and_sorts() {
        let (x, y, z) = (Expr::sym("x"), Expr::sym("y"), Expr::sym("z"));
        let left = (&x + &y) + &z;
        let right = &z + (&y + &x);
        assert_eq!(left, right);
        match left.node() {
            Node::Sum(cs) => assert!(cs.iter().all(|c| !matches!(c.node(), Node::Sum(_)))),
            _ => panic!("expected a sum"),
        }
        assert_eq!(&x * &y, &y * &x);
    }

    #[test]
    fn free_symbols_walks_the_tree() {
        let e = (Expr::sym("a") * Expr::sym("z0")).sinh() + Expr::sym("z1").pow(-1);
        let names: Vec<_> = e.free_symbols().iter().map(|s| s.name().to_string()).collect();
        assert_eq!(names, ["a", "z0", "z1"]);
    }
}
