//! Infix printer. Output re-parses to the same canonical form.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{Expr, Func, Node, Number};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const POWER: u8 = 3;
const ATOM: u8 = 4;

fn const_prec(n: &Number) -> u8 {
    let s = n.to_string();
    if s.starts_with('(') {
        ATOM
    } else if s.starts_with('-') || s.contains('/') || s.contains('*') {
        PRODUCT
    } else {
        ATOM
    }
}

fn wrap(s: String, prec: u8, min: u8) -> String {
    if prec < min {
        format!("({s})")
    } else {
        s
    }
}

fn render(e: &Expr) -> (String, u8) {
    match e.node() {
        Node::Const(n) => (n.to_string(), const_prec(n)),
        Node::Symbol(s) => (s.name().to_string(), ATOM),
        Node::Func(f, arg) => (format!("{}({})", f.name(), render(arg).0), ATOM),
        Node::Pow(_, n) if *n < 0 => (render_product(std::slice::from_ref(e)), PRODUCT),
        Node::Pow(b, n) => {
            let (s, p) = render(b);
            (format!("{}^{}", wrap(s, p, ATOM), n), POWER)
        }
        Node::Product(cs) => (render_product(cs), PRODUCT),
        Node::Sum(cs) => {
            let mut out = String::new();
            for (k, c) in cs.iter().enumerate() {
                let s = render(c).0;
                if k == 0 {
                    out.push_str(&s);
                } else if let Some(rest) = s.strip_prefix('-') {
                    out.push_str(" - ");
                    out.push_str(rest);
                } else {
                    out.push_str(" + ");
                    out.push_str(&s);
                }
            }
            (out, SUM)
        }
    }
}

/// Split a product into `sign`, numerator and denominator factor strings.
fn render_product(cs: &[Expr]) -> String {
    let mut negative = false;
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    for (k, c) in cs.iter().enumerate() {
        match c.node() {
            Node::Const(n) if k == 0 => split_coefficient(n, &mut negative, &mut num, &mut den),
            // `1/cosh(u)^2` and `1/(1 + x)^2` would re-parse through the expanded power,
            // and `1/(4*0)` would fold its denominator to `0`.
            Node::Pow(b, p)
                if (*p <= -2 && matches!(b.node(), Node::Sum(_) | Node::Func(Func::Cosh, _)))
                    || matches!(b.node(), Node::Const(n) if n.is_zero()) =>
            {
                let (s, prec) = render(b);
                num.push(format!("{}^{}", wrap(s, prec, ATOM), p));
            }
            Node::Pow(b, p) if *p < 0 => {
                let (s, prec) = render(&b.clone().pow(-p));
                den.push(wrap(s, prec, POWER));
            }
            _ => {
                let (s, prec) = render(c);
                num.push(wrap(s, prec, POWER));
            }
        }
    }
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if num.is_empty() {
        out.push('1');
    } else {
        out.push_str(&num.join("*"));
    }
    match den.len() {
        0 => {}
        1 => {
            out.push('/');
            out.push_str(&den[0]);
        }
        _ => {
            out.push_str("/(");
            out.push_str(&den.join("*"));
            out.push(')');
        }
    }
    out
}

fn split_coefficient(n: &Number, negative: &mut bool, num: &mut Vec<String>, den: &mut Vec<String>) {
    let (mag, imaginary) = if n.im().is_zero() {
        (n.re().clone(), false)
    } else if n.re().is_zero() {
        (n.im().clone(), true)
    } else {
        num.push(n.to_string());
        return;
    };
    *negative = mag.is_negative();
    let mag = mag.abs();
    if !mag.numer().is_one() {
        num.push(mag.numer().to_string());
    }
    if imaginary {
        num.push("i".to_string());
    }
    if !mag.denom().is_one() {
        den.push(mag.denom().to_string());
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self).0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readable_forms() {
        let (a, z0, z1) = (Expr::sym("a"), Expr::sym("z0"), Expr::sym("z1"));
        let e = (Expr::i() * (&a * &z0).cosh() / (&a * &z1)).simplify();
        assert_eq!(e.to_string(), "i*cosh(a*z0)/(a*z1)");
        let e = (-(&z1 * (&a * &z0).sinh())).simplify();
        assert_eq!(e.to_string(), "-z1*sinh(a*z0)");
        let e = (Expr::sym("x") - Expr::rational(3, 2) * Expr::sym("y")).simplify();
        assert_eq!(e.to_string(), "x - 3*y/2");
        assert_eq!(Expr::sym("x").pow(-2).to_string(), "1/x^2");
        assert_eq!((Expr::sym("x") + Expr::one()).pow(3).to_string(), "(1 + x)^3");
        let e = (Expr::int(2) * (Expr::sym("x") + Expr::one()).pow(-3) / Expr::sym("a")).simplify();
        assert_eq!(e.to_string(), "2*(1 + x)^-3/a");
        assert_eq!(Expr::sym("u").cosh().pow(-2).simplify().to_string(), "cosh(u)^-2");
        let e = (Expr::int(0).pow(-1) * Expr::rational(3, 4)).simplify();
        assert_eq!(e.to_string(), "3*0^-1/4");
        assert_eq!(crate::expr::parse(&e.to_string()).unwrap(), e);
    }
}
