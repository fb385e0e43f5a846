//! Canonical form: expressions are normalized into Laurent polynomials over
//! atoms (symbols, function applications, reciprocal powers of irreducible
//! sums) with exact complex coefficients, then rebuilt as a tree.
//!
//! Normalization rules beyond polynomial arithmetic:
//! * `cosh(u)^k` with `k >= 2` is rewritten through `cosh^2 = 1 + sinh^2`;
//! * all `exp` factors of a monomial merge into a single `exp(sum of args)`;
//! * `sinh`, `tanh` are odd and `cosh` is even in an argument whose leading
//!   coefficient is negative; `f(0)` folds to its value;
//! * a reciprocal power of a multi-term sum is kept as an opaque atom with
//!   the sum scaled to leading coefficient one.

use std::collections::BTreeMap;

use super::{Expr, Func, Node, Number, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Atom {
    Symbol(Symbol),
    Func(Func, Expr),
    /// A canonical multi-term sum (or zero), only ever raised to negative powers.
    Opaque(Expr),
}

impl Atom {
    /// `1/0` has no finite value, so every power of it is the same `1/0`.
    fn clamp_power(&self, k: i32) -> i32 {
        match self {
            Atom::Opaque(e) if e.is_zero() && k != 0 => -1,
            _ => k,
        }
    }
}

type Monomial = BTreeMap<Atom, i32>;

#[derive(Clone, Debug, Default, PartialEq)]
struct Poly {
    terms: BTreeMap<Monomial, Number>,
}

impl Poly {
    fn zero() -> Poly {
        Poly::default()
    }

    fn constant(n: Number) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Monomial::new(), n);
        p
    }

    fn monomial(atom: Atom, k: i32) -> Poly {
        let mut m = Monomial::new();
        if k != 0 {
            let k = atom.clamp_power(k);
            m.insert(atom, k);
        }
        let mut p = Poly::zero();
        p.add_term(m, Number::one());
        p
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: Number) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn add(mut self, other: Poly) -> Poly {
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
        self
    }

    fn scale(&self, c: &Number) -> Poly {
        let mut out = Poly::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1 * c2;
                for (m, k) in mul_monomials(m1, m2).terms {
                    out.add_term(m, &k * &c);
                }
            }
        }
        reduce_hyperbolic(out)
    }

    fn powi(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(Number::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    fn leading(&self) -> Option<(&Monomial, &Number)> {
        self.terms.iter().next()
    }

    fn single_term(&self) -> Option<(&Monomial, &Number)> {
        (self.terms.len() == 1).then(|| self.leading()).flatten()
    }
}

/// Product of two monomials. The result is a polynomial only because merged
/// `exp` arguments may cancel to `exp(0) = 1`; it always has one term.
fn mul_monomials(a: &Monomial, b: &Monomial) -> Poly {
    let mut merged = a.clone();
    for (atom, k) in b {
        let e = merged.entry(atom.clone()).or_insert(0);
        *e = atom.clamp_power(*e + k);
        if *e == 0 {
            merged.remove(atom);
        }
    }
    let exp_args: Vec<(Expr, i32)> = merged
        .iter()
        .filter_map(|(atom, k)| match atom {
            Atom::Func(Func::Exp, arg) => Some((arg.clone(), *k)),
            _ => None,
        })
        .collect();
    if exp_args.len() > 1 || exp_args.iter().any(|(_, k)| *k != 1) {
        let exp_args = exp_args.into_iter().map(|(arg, _)| arg);
        let mut combined = Vec::new();
        for arg in exp_args {
            let k = merged.remove(&Atom::Func(Func::Exp, arg.clone())).unwrap_or(0);
            combined.push(Expr::product([Expr::int(k as i64), arg]));
        }
        let arg = simplify(&Expr::sum(combined));
        if !arg.is_zero() {
            merged.insert(Atom::Func(Func::Exp, arg), 1);
        }
    }
    let mut p = Poly::zero();
    p.add_term(merged, Number::one());
    p
}

/// `atom^k` as a polynomial, honoring the exp and opaque conventions.
fn atom_pow(atom: Atom, k: i32) -> Poly {
    match atom {
        Atom::Func(Func::Exp, arg) => {
            let scaled = simplify(&Expr::product([Expr::int(k as i64), arg]));
            if scaled.is_zero() {
                Poly::constant(Number::one())
            } else {
                Poly::monomial(Atom::Func(Func::Exp, scaled), 1)
            }
        }
        Atom::Opaque(q) if k > 0 => from_expr(&q).powi(k as u32),
        other => Poly::monomial(other, k),
    }
}

fn reduce_hyperbolic(p: Poly) -> Poly {
    let needs = p.terms.keys().any(|m| {
        m.iter()
            .any(|(a, k)| matches!(a, Atom::Func(Func::Cosh, _)) && *k >= 2)
    });
    if !needs {
        return p;
    }
    let mut out = Poly::zero();
    let mut work: Vec<(Monomial, Number)> = p.terms.into_iter().collect();
    while let Some((m, c)) = work.pop() {
        let hit = m.iter().find_map(|(a, k)| match a {
            Atom::Func(Func::Cosh, arg) if *k >= 2 => Some((arg.clone(), *k)),
            _ => None,
        });
        let Some((arg, k)) = hit else {
            out.add_term(m, c);
            continue;
        };
        let mut lowered = m.clone();
        if k == 2 {
            lowered.remove(&Atom::Func(Func::Cosh, arg.clone()));
        } else {
            lowered.insert(Atom::Func(Func::Cosh, arg.clone()), k - 2);
        }
        let mut with_sinh = lowered.clone();
        let sinh = Atom::Func(Func::Sinh, arg);
        let e = with_sinh.get(&sinh).copied().unwrap_or(0) + 2;
        if e == 0 {
            with_sinh.remove(&sinh);
        } else {
            with_sinh.insert(sinh, e);
        }
        work.push((lowered, c.clone()));
        work.push((with_sinh, c));
    }
    out
}

fn func_poly(f: Func, arg: &Expr) -> Poly {
    let pa = from_expr(arg);
    if pa.is_zero() {
        return match f {
            Func::Sinh | Func::Tanh => Poly::zero(),
            Func::Cosh | Func::Exp => Poly::constant(Number::one()),
        };
    }
    if f == Func::Exp {
        return Poly::monomial(Atom::Func(f, to_expr(&pa)), 1);
    }
    let negative = pa.leading().is_some_and(|(_, c)| c.is_negative());
    if !negative {
        return Poly::monomial(Atom::Func(f, to_expr(&pa)), 1);
    }
    let flipped = to_expr(&pa.scale(&Number::integer(-1)));
    let p = Poly::monomial(Atom::Func(f, flipped), 1);
    match f {
        Func::Cosh => p,
        _ => p.scale(&Number::integer(-1)),
    }
}

fn pow_poly(base: &Expr, n: i32) -> Poly {
    let pb = from_expr(base);
    if n >= 0 {
        return pb.powi(n as u32);
    }
    if pb.is_zero() {
        return Poly::monomial(Atom::Opaque(Expr::zero()), n);
    }
    if let Some((m, c)) = pb.single_term() {
        let c = c.powi(n).expect("nonzero coefficient");
        let mut acc = Poly::constant(c);
        for (atom, k) in m {
            acc = acc.mul(&atom_pow(atom.clone(), k * n));
        }
        return acc;
    }
    let (_, lead) = pb.leading().expect("nonempty");
    let lead = lead.clone();
    let inv = lead.recip().expect("nonzero coefficient");
    let normalized = to_expr(&pb.scale(&inv));
    Poly::monomial(Atom::Opaque(normalized), n).scale(&lead.powi(n).expect("nonzero"))
}

fn from_expr(e: &Expr) -> Poly {
    match e.node() {
        Node::Const(n) => Poly::constant(n.clone()),
        Node::Symbol(s) => Poly::monomial(Atom::Symbol(s.clone()), 1),
        Node::Func(f, arg) => func_poly(*f, arg),
        Node::Pow(base, n) => pow_poly(base, *n),
        Node::Product(cs) => cs
            .iter()
            .fold(Poly::constant(Number::one()), |acc, c| acc.mul(&from_expr(c))),
        Node::Sum(cs) => cs
            .iter()
            .fold(Poly::zero(), |acc, c| acc.add(from_expr(c))),
    }
}

fn atom_expr(atom: &Atom) -> Expr {
    match atom {
        Atom::Symbol(s) => Expr::symbol(s),
        Atom::Func(f, arg) => Expr::func(*f, arg.clone()),
        Atom::Opaque(q) => q.clone(),
    }
}

fn to_expr(p: &Poly) -> Expr {
    let terms = p.terms.iter().map(|(m, c)| {
        let factors = m.iter().map(|(a, k)| atom_expr(a).pow(*k));
        if c.is_one() {
            Expr::product(factors)
        } else {
            Expr::product(std::iter::once(Expr::constant(c.clone())).chain(factors))
        }
    });
    Expr::sum(terms)
}

pub(super) fn simplify(e: &Expr) -> Expr {
    to_expr(&from_expr(e))
}

impl Expr {
    /// Canonical form. Idempotent and value-preserving.
    pub fn simplify(&self) -> Expr {
        simplify(self)
    }
}
