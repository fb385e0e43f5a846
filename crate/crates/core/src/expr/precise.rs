//! Evaluation in multi-precision binary floating point.
//!
//! Two algebraically equal trees can disagree by far more than `1e-12` in
//! `f64` when one of them cancels (an expanded `(x - 1)^12`) or feeds a large
//! argument to `cosh`. Evaluating both at `PRECISION` bits and rounding once
//! at the end removes that noise from value-preservation checks.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use super::{Bindings, Expr, ExprError, Func, Node, Number, Probe, ProbeOutcome};

/// Working precision in bits.
pub const PRECISION: usize = 192;

/// Function arguments must stay below `2^MAX_ARG_EXPONENT` in modulus.
const MAX_ARG_EXPONENT: i32 = 14;

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Clone, Debug)]
struct Cx {
    re: BigFloat,
    im: BigFloat,
}

struct Ctx {
    p: usize,
    cc: Consts,
}

impl Ctx {
    fn new(p: usize) -> Result<Ctx, ExprError> {
        let cc = Consts::new().map_err(|e| ExprError::Precision(e.to_string()))?;
        Ok(Ctx { p, cc })
    }

    fn int(&mut self, n: &BigInt) -> BigFloat {
        match i64::try_from(n) {
            Ok(k) => BigFloat::from_i64(k, self.p),
            Err(_) => BigFloat::parse(&n.to_string(), Radix::Dec, self.p, RM, &mut self.cc),
        }
    }

    fn rational(&mut self, q: &BigRational) -> BigFloat {
        let n = self.int(q.numer());
        if q.is_integer() {
            return n;
        }
        let d = self.int(q.denom());
        n.div(&d, self.p, RM)
    }

    fn number(&mut self, n: &Number) -> Cx {
        Cx {
            re: self.rational(n.re()),
            im: self.rational(n.im()),
        }
    }

    fn real(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    fn add(&self, a: &Cx, b: &Cx) -> Cx {
        Cx {
            re: a.re.add(&b.re, self.p, RM),
            im: a.im.add(&b.im, self.p, RM),
        }
    }

    fn mul(&self, a: &Cx, b: &Cx) -> Cx {
        let p = self.p;
        Cx {
            re: a.re.mul(&b.re, p, RM).sub(&a.im.mul(&b.im, p, RM), p, RM),
            im: a.re.mul(&b.im, p, RM).add(&a.im.mul(&b.re, p, RM), p, RM),
        }
    }

    fn recip(&self, a: &Cx) -> Result<Cx, ExprError> {
        let p = self.p;
        let d = a.re.mul(&a.re, p, RM).add(&a.im.mul(&a.im, p, RM), p, RM);
        if d.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(Cx {
            re: a.re.div(&d, p, RM),
            im: a.im.neg().div(&d, p, RM),
        })
    }

    fn div(&self, a: &Cx, b: &Cx) -> Result<Cx, ExprError> {
        Ok(self.mul(a, &self.recip(b)?))
    }

    fn powi(&self, a: &Cx, n: i32) -> Result<Cx, ExprError> {
        let mut base = if n < 0 { self.recip(a)? } else { a.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Cx {
            re: self.real(1.0),
            im: self.real(0.0),
        };
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// `(cosh x cos y, sinh x sin y)` and `(sinh x cos y, cosh x sin y)`.
    fn hyperbolic(&mut self, a: &Cx) -> (Cx, Cx) {
        let p = self.p;
        let (ch, sh) = (a.re.cosh(p, RM, &mut self.cc), a.re.sinh(p, RM, &mut self.cc));
        let (c, s) = (a.im.cos(p, RM, &mut self.cc), a.im.sin(p, RM, &mut self.cc));
        let cosh = Cx {
            re: ch.mul(&c, p, RM),
            im: sh.mul(&s, p, RM),
        };
        let sinh = Cx {
            re: sh.mul(&c, p, RM),
            im: ch.mul(&s, p, RM),
        };
        (cosh, sinh)
    }

    fn func(&mut self, f: Func, a: &Cx) -> Result<Cx, ExprError> {
        // Beyond this the f64 evaluator overflows anyway; the probe treats
        // the point as singular and draws another.
        let huge = |x: &BigFloat| x.exponent().is_some_and(|e| e > MAX_ARG_EXPONENT);
        if huge(&a.re) || huge(&a.im) {
            return Err(ExprError::Precision("function argument out of range".into()));
        }
        let p = self.p;
        Ok(match f {
            Func::Exp => {
                let m = a.re.exp(p, RM, &mut self.cc);
                Cx {
                    re: m.mul(&a.im.cos(p, RM, &mut self.cc), p, RM),
                    im: m.mul(&a.im.sin(p, RM, &mut self.cc), p, RM),
                }
            }
            Func::Sinh => self.hyperbolic(a).1,
            Func::Cosh => self.hyperbolic(a).0,
            Func::Tanh => {
                let (c, s) = self.hyperbolic(a);
                self.div(&s, &c)?
            }
        })
    }

    fn eval(&mut self, e: &Expr, b: &Bindings) -> Result<Cx, ExprError> {
        match e.node() {
            Node::Const(n) => Ok(self.number(n)),
            Node::Symbol(s) => {
                let v = b
                    .get(s.name())
                    .ok_or_else(|| ExprError::UnboundSymbol(s.name().to_string()))?;
                Ok(Cx {
                    re: self.real(v.re),
                    im: self.real(v.im),
                })
            }
            Node::Sum(cs) => {
                let mut acc = self.number(&Number::zero());
                for c in cs {
                    let v = self.eval(c, b)?;
                    acc = self.add(&acc, &v);
                }
                Ok(acc)
            }
            Node::Product(cs) => {
                let mut acc = self.number(&Number::one());
                for c in cs {
                    let v = self.eval(c, b)?;
                    acc = self.mul(&acc, &v);
                }
                Ok(acc)
            }
            Node::Pow(base, n) => {
                let v = self.eval(base, b)?;
                self.powi(&v, *n)
            }
            Node::Func(f, arg) => {
                let v = self.eval(arg, b)?;
                self.func(*f, &v)
            }
        }
    }
}

fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_zero() {
        return 0.0;
    }
    x.to_string().parse().unwrap_or(f64::NAN)
}

impl Expr {
    /// Value at `PRECISION` bits, rounded to `f64` once at the end.
    pub fn eval_precise(&self, b: &Bindings) -> Result<Complex64, ExprError> {
        let mut ctx = Ctx::new(PRECISION)?;
        let v = ctx.eval(self, b)?;
        Ok(Complex64::new(to_f64(&v.re), to_f64(&v.im)))
    }
}

impl Probe {
    /// [`Probe::compare`] with both sides evaluated at `PRECISION` bits and the
    /// difference taken before rounding.
    pub fn compare_precise(&self, e1: &Expr, e2: &Expr) -> ProbeOutcome {
        let mut ctx = match Ctx::new(PRECISION) {
            Ok(c) => c,
            Err(_) => {
                return ProbeOutcome {
                    equal: false,
                    max_residual: f64::NAN,
                    trials_run: 0,
                    resampled: 0,
                }
            }
        };
        self.sample(e1, e2, |b| {
            let v1 = ctx.eval(e1, b)?;
            let v2 = ctx.eval(e2, b)?;
            let diff = Cx {
                re: v1.re.sub(&v2.re, ctx.p, RM),
                im: v1.im.sub(&v2.im, ctx.p, RM),
            };
            Ok((
                Complex64::new(to_f64(&v1.re), to_f64(&v1.im)),
                Complex64::new(to_f64(&diff.re), to_f64(&diff.im)),
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn agrees_with_f64_on_tame_input() {
        let e = parse("i*sinh(a*z0)/z1 + exp(-a*z0)*cosh(z1) - tanh(1/3 + i*z0)").unwrap();
        let b = Bindings::new().with("a", 0.7).with("z0", 1.3).with("z1", 0.4);
        let (v, w) = (e.eval(&b).unwrap(), e.eval_precise(&b).unwrap());
        assert!((v - w).norm() < 1e-14 * w.norm());
    }

    #[test]
    fn exact_rationals_survive() {
        let e = parse("1/3 + 2/3").unwrap();
        assert_eq!(e.eval_precise(&Bindings::new()).unwrap(), Complex64::new(1.0, 0.0));
        let third = parse("1/3").unwrap().eval_precise(&Bindings::new()).unwrap();
        assert_eq!(third.re, 1.0 / 3.0);
    }

    #[test]
    fn removes_cancellation_noise() {
        let f = parse("(w + z0 - 1)^12").unwrap();
        let g = f.simplify();
        let p = Probe::default().with_trials(100).with_tol(1e-12);
        assert!(p.compare_precise(&f, &g).equal);
        assert!(p.compare_precise(&f, &(g + parse("1/10^9").unwrap())).max_residual > 1e-12);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(parse("1/(z0 - z0)").unwrap().eval_precise(&Bindings::new().with("z0", 1.0)).is_err());
    }
}
