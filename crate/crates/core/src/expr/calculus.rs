use std::collections::BTreeMap;

use super::{Expr, ExprError, Func, Node, Symbol};

fn diff_raw(e: &Expr, v: &Symbol) -> Expr {
    if !e.contains_symbol(v) {
        return Expr::zero();
    }
    match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Symbol(s) => {
            if s == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Sum(cs) => Expr::sum(cs.iter().map(|c| diff_raw(c, v))),
        Node::Product(cs) => Expr::sum((0..cs.len()).map(|k| {
            Expr::product(cs.iter().enumerate().map(|(j, c)| {
                if j == k {
                    diff_raw(c, v)
                } else {
                    c.clone()
                }
            }))
        })),
        Node::Pow(base, n) => Expr::product([
            Expr::int(*n as i64),
            base.clone().pow(n - 1),
            diff_raw(base, v),
        ]),
        Node::Func(f, arg) => {
            let outer = match f {
                Func::Sinh => arg.clone().cosh(),
                Func::Cosh => arg.clone().sinh(),
                Func::Exp => arg.clone().exp(),
                Func::Tanh => Expr::one() - arg.clone().tanh().pow(2),
            };
            outer * diff_raw(arg, v)
        }
    }
}

fn substitute_raw(e: &Expr, map: &BTreeMap<Symbol, Expr>) -> Expr {
    match e.node() {
        Node::Const(_) => e.clone(),
        Node::Symbol(s) => map.get(s).cloned().unwrap_or_else(|| e.clone()),
        Node::Sum(cs) => Expr::sum(cs.iter().map(|c| substitute_raw(c, map))),
        Node::Product(cs) => Expr::product(cs.iter().map(|c| substitute_raw(c, map))),
        Node::Pow(b, n) => substitute_raw(b, map).pow(*n),
        Node::Func(f, a) => Expr::func(*f, substitute_raw(a, map)),
    }
}

impl Expr {
    /// Exact partial derivative, simplified.
    pub fn diff(&self, v: &Symbol) -> Expr {
        diff_raw(self, v).simplify()
    }

    /// Partial derivative by symbol name; fails when `var` is not a valid symbol.
    pub fn differentiate(&self, var: &str) -> Result<Expr, ExprError> {
        Ok(self.diff(&Symbol::new(var)?))
    }

    /// Repeated partial derivative.
    pub fn diff_n(&self, v: &Symbol, order: u32) -> Expr {
        (0..order).fold(self.clone(), |acc, _| acc.diff(v))
    }

    /// Simultaneous substitution followed by simplification.
    pub fn substitute(&self, map: &BTreeMap<Symbol, Expr>) -> Expr {
        substitute_raw(self, map).simplify()
    }

    pub fn substitute_one(&self, s: &Symbol, value: &Expr) -> Expr {
        let mut map = BTreeMap::new();
        map.insert(s.clone(), value.clone());
        self.substitute(&map)
    }

    /// First-order Taylor polynomial in `p` around `p = 0`.
    pub fn linearize(&self, p: &Symbol) -> Expr {
        let at_zero = self.substitute_one(p, &Expr::zero());
        let slope = self.diff(p).substitute_one(p, &Expr::zero());
        (at_zero + Expr::symbol(p) * slope).simplify()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(name: &str) -> Symbol {
        Symbol::new(name).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let (a, z0, z1) = (Expr::sym("a"), Expr::sym("z0"), Expr::sym("z1"));
        let az0 = &a * &z0;
        assert_eq!(
            az0.clone().sinh().diff(&s("z0")),
            (&a * az0.clone().cosh()).simplify()
        );
        assert_eq!((&z1 * az0.clone().cosh()).diff(&s("z1")), az0.cosh().simplify());
        let tau = Expr::sym("tau");
        let decay = (-(&a * &tau)).exp();
        assert_eq!(decay.diff(&s("tau")), (-(&a * &decay)).simplify());
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        let e = Expr::sym("z0");
        assert!(matches!(e.differentiate("sinh"), Err(ExprError::UnknownSymbol(_))));
        assert!(matches!(e.differentiate("2x"), Err(ExprError::UnknownSymbol(_))));
        assert_eq!(e.differentiate("z0").unwrap(), Expr::one());
    }

    #[test]
    fn tanh_derivative_at_zero() {
        let xi = Expr::sym("xi");
        let e = (&xi / Expr::int(2)).tanh();
        assert_eq!(e.linearize(&s("xi")), (Expr::rational(1, 2) * &xi).simplify());
    }

    #[test]
    fn substitution_examples() {
        let (a, z0, z1) = (Expr::sym("a"), Expr::sym("z0"), Expr::sym("z1"));
        let az0 = &a * &z0;
        let mut map = BTreeMap::new();
        map.insert(s("x0"), &z1 * az0.clone().sinh());
        map.insert(s("x1"), &z1 * az0.clone().cosh());
        map.insert(s("x2"), Expr::sym("z2"));
        assert_eq!(Expr::sym("x0").substitute(&map), (&z1 * az0.sinh()).simplify());
        assert_eq!(Expr::sym("x2").substitute(&map), Expr::sym("z2"));
        let interval = Expr::sym("x0").pow(2) - Expr::sym("x1").pow(2);
        assert_eq!(interval.substitute(&map), (-(z1.pow(2))).simplify());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let mut map = BTreeMap::new();
        map.insert(s("x"), Expr::sym("y"));
        map.insert(s("y"), Expr::sym("x"));
        let e = Expr::sym("x") - Expr::int(2) * Expr::sym("y");
        assert_eq!(e.substitute(&map), (Expr::sym("y") - Expr::int(2) * Expr::sym("x")).simplify());
    }
}
