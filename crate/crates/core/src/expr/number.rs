//! Exact complex rationals used as expression constants.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `re + im*i` with both parts exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Number {
    re: BigRational,
    im: BigRational,
}

impl Number {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Number { re, im }
    }

    pub fn zero() -> Self {
        Number::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Number::integer(1)
    }

    pub fn i() -> Self {
        Number::new(BigRational::zero(), BigRational::one())
    }

    pub fn integer(n: i64) -> Self {
        Number::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// `num/den`; panics when `den == 0`.
    pub fn rational(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Number::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn real(re: BigRational) -> Self {
        Number::new(re, BigRational::zero())
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Sign used for canonical orientation: the sign of the real part, or of
    /// the imaginary part when the real part vanishes.
    pub fn is_negative(&self) -> bool {
        if self.re.is_zero() {
            self.im.is_negative()
        } else {
            self.re.is_negative()
        }
    }

    pub fn conj(&self) -> Number {
        Number::new(self.re.clone(), -self.im.clone())
    }

    fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Number> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Number::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn checked_div(&self, rhs: &Number) -> Option<Number> {
        rhs.recip().map(|r| self * &r)
    }

    /// Integer power; `None` for a negative power of zero.
    pub fn powi(&self, n: i32) -> Option<Number> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Number::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Some(acc)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Exact conversion of a finite double (every finite f64 is a dyadic rational).
    pub fn from_f64(x: f64) -> Option<Number> {
        BigRational::from_float(x).map(Number::real)
    }

    /// Real part as a plain integer, when the number is a real integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        (self.is_real() && self.re.is_integer()).then(|| self.re.to_integer())
    }
}

impl Add for &Number {
    type Output = Number;
    fn add(self, rhs: &Number) -> Number {
        Number::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &Number {
    type Output = Number;
    fn sub(self, rhs: &Number) -> Number {
        Number::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &Number {
    type Output = Number;
    fn mul(self, rhs: &Number) -> Number {
        Number::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &Number {
    type Output = Number;
    fn neg(self) -> Number {
        Number::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for Number {
    type Output = Number;
    fn neg(self) -> Number {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Number {
    /// Parser-compatible form: `3/2`, `-i`, `2*i/3`, `(1/2 + 3*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let imag = {
            let mag = self.im.abs();
            let body = if mag.is_one() {
                "i".to_string()
            } else if mag.is_integer() {
                format!("{}*i", mag.numer())
            } else if mag.numer().is_one() {
                format!("i/{}", mag.denom())
            } else {
                format!("{}*i/{}", mag.numer(), mag.denom())
            };
            (self.im.is_negative(), body)
        };
        if self.re.is_zero() {
            let (neg, body) = imag;
            write!(f, "{}{}", if neg { "-" } else { "" }, body)
        } else {
            let (neg, body) = imag;
            write!(
                f,
                "({} {} {})",
                fmt_rational(&self.re),
                if neg { "-" } else { "+" },
                body
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let half = Number::rational(1, 2);
        let third = Number::rational(1, 3);
        assert_eq!(&half + &third, Number::rational(5, 6));
        let i = Number::i();
        assert_eq!(&i * &i, Number::integer(-1));
        let z = Number::new(half.re().clone(), third.re().clone());
        assert_eq!(&z * &z.recip().unwrap(), Number::one());
    }

    #[test]
    fn powers_and_zero() {
        assert_eq!(Number::integer(2).powi(-3), Some(Number::rational(1, 8)));
        assert_eq!(Number::zero().powi(-1), None);
        assert_eq!(Number::i().powi(4), Some(Number::one()));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Number::rational(-3, 2).to_string(), "-3/2");
        assert_eq!(Number::i().to_string(), "i");
        assert_eq!((-Number::i()).to_string(), "-i");
        let z = &Number::rational(1, 2) + &(&Number::i() * &Number::integer(3));
        assert_eq!(z.to_string(), "(1/2 + 3*i)");
        let w = &Number::i() * &Number::rational(2, 3);
        assert_eq!(w.to_string(), "2*i/3");
    }

    #[test]
    fn from_f64_is_exact() {
        let x = Number::from_f64(0.75).unwrap();
        assert_eq!(x, Number::rational(3, 4));
        assert!(Number::from_f64(f64::NAN).is_none());
    }
}
