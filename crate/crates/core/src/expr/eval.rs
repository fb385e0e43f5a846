//! Numeric evaluation and the randomized equality probe.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Expr, ExprError, Func, Node, Symbol};

/// Symbol name to complex value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bindings(BTreeMap<String, Complex64>);

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn set(&mut self, name: &str, value: impl Into<Complex64>) {
        self.0.insert(name.to_string(), value.into());
    }

    pub fn with(mut self, name: &str, value: impl Into<Complex64>) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.0.get(name).copied()
    }
}

impl Expr {
    pub fn eval(&self, b: &Bindings) -> Result<Complex64, ExprError> {
        match self.node() {
            Node::Const(n) => Ok(n.to_complex()),
            Node::Symbol(s) => b
                .get(s.name())
                .ok_or_else(|| ExprError::UnboundSymbol(s.name().to_string())),
            Node::Sum(cs) => cs.iter().try_fold(Complex64::new(0.0, 0.0), |acc, c| {
                Ok(acc + c.eval(b)?)
            }),
            Node::Product(cs) => cs.iter().try_fold(Complex64::new(1.0, 0.0), |acc, c| {
                Ok(acc * c.eval(b)?)
            }),
            Node::Pow(base, n) => {
                let v = base.eval(b)?;
                if *n < 0 && v.norm() == 0.0 {
                    return Err(ExprError::DivisionByZero);
                }
                Ok(v.powi(*n))
            }
            Node::Func(f, arg) => {
                let v = arg.eval(b)?;
                Ok(match f {
                    Func::Sinh => v.sinh(),
                    Func::Cosh => v.cosh(),
                    Func::Exp => v.exp(),
                    Func::Tanh => v.tanh(),
                })
            }
        }
    }
}

/// Pseudo-random numeric equality test.
///
/// Coordinates (`x0..x3`, `z0..z3`) are drawn from `coord_range`, every other
/// symbol from `param_range`, unless `ranges` overrides a name. Both boxes
/// exclude `z1 = 0`.
#[derive(Clone, Debug)]
pub struct Probe {
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
    pub coord_range: (f64, f64),
    pub param_range: (f64, f64),
    pub ranges: BTreeMap<String, (f64, f64)>,
    pub max_retries: usize,
}

impl Default for Probe {
    fn default() -> Self {
        Probe {
            trials: 20,
            tol: 1e-10,
            seed: 0x5eed,
            coord_range: (0.5, 2.0),
            param_range: (0.01, 1.0),
            ranges: BTreeMap::new(),
            max_retries: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeOutcome {
    pub equal: bool,
    /// Largest `|e1 - e2| / (1 + |e1|)` seen.
    pub max_residual: f64,
    pub trials_run: usize,
    pub resampled: usize,
}

fn is_coordinate(name: &str) -> bool {
    let b = name.as_bytes();
    b.len() == 2 && (b[0] == b'x' || b[0] == b'z') && (b'0'..=b'3').contains(&b[1])
}

impl Probe {
    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_range(mut self, name: &str, lo: f64, hi: f64) -> Self {
        self.ranges.insert(name.to_string(), (lo, hi));
        self
    }

    fn range_for(&self, name: &str) -> (f64, f64) {
        if let Some(r) = self.ranges.get(name) {
            *r
        } else if is_coordinate(name) {
            self.coord_range
        } else {
            self.param_range
        }
    }

    fn draw(&self, symbols: &[Symbol], rng: &mut ChaCha8Rng) -> Bindings {
        let mut b = Bindings::new();
        for s in symbols {
            let (lo, hi) = self.range_for(s.name());
            b.set(s.name(), rng.gen_range(lo..=hi));
        }
        b
    }

    /// Random bindings for `symbols`, reproducible for a given seed.
    pub fn bindings(&self, symbols: &[Symbol], count: usize) -> Vec<Bindings> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..count).map(|_| self.draw(symbols, &mut rng)).collect()
    }

    pub fn compare(&self, e1: &Expr, e2: &Expr) -> ProbeOutcome {
        self.sample(e1, e2, |b| {
            let v1 = e1.eval(b)?;
            let v2 = e2.eval(b)?;
            Ok((v1, v1 - v2))
        })
    }

    /// Sampling loop shared by the comparisons; `values` returns `(e1, e1 - e2)`.
    pub(super) fn sample<F>(&self, e1: &Expr, e2: &Expr, mut values: F) -> ProbeOutcome
    where
        F: FnMut(&Bindings) -> Result<(Complex64, Complex64), ExprError>,
    {
        let mut symbols = e1.free_symbols();
        symbols.extend(e2.free_symbols());
        let symbols: Vec<Symbol> = symbols.into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = ProbeOutcome {
            equal: true,
            max_residual: 0.0,
            trials_run: 0,
            resampled: 0,
        };
        while out.trials_run < self.trials.max(1) {
            let b = self.draw(&symbols, &mut rng);
            match values(&b) {
                Ok((v1, diff)) if v1.is_finite() && diff.is_finite() => {
                    let r = diff.norm() / (1.0 + v1.norm());
                    out.max_residual = out.max_residual.max(r);
                    if r > self.tol {
                        out.equal = false;
                    }
                    out.trials_run += 1;
                }
                _ => {
                    out.resampled += 1;
                    if out.resampled > self.max_retries {
                        out.equal = false;
                        break;
                    }
                }
            }
        }
        out
    }
}

/// `true` iff the expressions agree at `trials` seeded random points.
pub fn equality_probe(e1: &Expr, e2: &Expr, trials: usize, tol: f64) -> bool {
    Probe::default()
        .with_trials(trials)
        .with_tol(tol)
        .compare(e1, e2)
        .equal
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        let (a, z0, z1) = (Expr::sym("a"), Expr::sym("z0"), Expr::sym("z1"));
        let e = (&a * &z0).cosh() / (&a * &z1);
        let b = Bindings::new().with("a", 1.0).with("z0", 0.0).with("z1", 2.0);
        assert!((e.eval(&b).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-15);

        let e = Expr::i() * Expr::sym("theta");
        let v = e.eval(&Bindings::new().with("theta", 0.1)).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.1));

        let e = &z1 * (&a * &z0).sinh();
        let b = Bindings::new().with("a", 1.0).with("z0", 1.0).with("z1", 1.0);
        assert!((e.eval(&b).unwrap().re - 1.1752011936438014).abs() < 1e-15);
    }

    #[test]
    fn evaluation_errors() {
        let e = Expr::sym("q") + Expr::one();
        assert_eq!(
            e.eval(&Bindings::new()),
            Err(ExprError::UnboundSymbol("q".into()))
        );
        let e = Expr::sym("q").recip();
        assert_eq!(
            e.eval(&Bindings::new().with("q", 0.0)),
            Err(ExprError::DivisionByZero)
        );
    }

    #[test]
    fn probe_examples() {
        let u = Expr::sym("u");
        let id = u.clone().cosh().pow(2) - u.sinh().pow(2);
        assert!(equality_probe(&id, &Expr::one(), 10, 1e-12));
        assert!(!equality_probe(&Expr::sym("z0"), &Expr::sym("z1"), 10, 1e-12));
    }

    #[test]
    fn probe_resamples_singular_points() {
        // 1/(z0 - 1) is singular inside the coordinate box but almost surely
        // never hit exactly; a genuinely always-singular expression fails.
        let bad = Expr::zero().recip();
        let out = Probe::default().compare(&bad, &Expr::one());
        assert!(!out.equal);
        assert!(out.resampled > 0);
    }

    #[test]
    fn probe_is_reproducible() {
        let p = Probe::default().with_seed(7);
        let syms = [Symbol::new("z0").unwrap(), Symbol::new("kappa").unwrap()];
        assert_eq!(p.bindings(&syms, 3), p.bindings(&syms, 3));
        for b in p.bindings(&syms, 50) {
            let z0 = b.get("z0").unwrap().re;
            let k = b.get("kappa").unwrap().re;
            assert!((0.5..=2.0).contains(&z0));
            assert!((0.01..=1.0).contains(&k));
        }
    }
}
