//! Commutative Rindler geometry: coordinate map, Jacobian and metric pullback.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diffop::{is_coordinate_name, Chart};
use crate::expr::{Bindings, Expr, ExprError, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RindlerError {
    #[error("lapse must depend on z1 and parameters only, found {0}")]
    BadLapse(String),
    #[error("point ({0}, {1}) is outside the right wedge x1 > |x0|")]
    OutsideWedge(f64, f64),
    #[error("inverse map did not converge for N(z1) = {0}")]
    NoConvergence(f64),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// `x0 = N(z1) sinh(a z0)`, `x1 = N(z1) cosh(a z0)`, `x2 = z2`, `x3 = z3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RindlerMap {
    lapse: Expr,
    accel: Symbol,
}

impl Default for RindlerMap {
    fn default() -> Self {
        RindlerMap::standard()
    }
}

impl RindlerMap {
    /// `N(z1) = z1` with acceleration `a`.
    pub fn standard() -> RindlerMap {
        RindlerMap {
            lapse: Expr::sym("z1"),
            accel: Symbol::new("a").expect("valid symbol"),
        }
    }

    pub fn new(lapse: Expr, accel: &str) -> Result<RindlerMap, RindlerError> {
        let accel = Symbol::new(accel)?;
        if is_coordinate_name(accel.name()) {
            return Err(RindlerError::BadLapse(format!("acceleration symbol {accel}")));
        }
        let lapse = lapse.simplify();
        for s in lapse.free_symbols() {
            if is_coordinate_name(s.name()) && s.name() != "z1" {
                return Err(RindlerError::BadLapse(lapse.to_string()));
            }
        }
        Ok(RindlerMap { lapse, accel })
    }

    pub fn lapse(&self) -> &Expr {
        &self.lapse
    }

    /// `N'(z1)`.
    pub fn lapse_prime(&self) -> Expr {
        self.lapse.diff(&z(1))
    }

    pub fn accel(&self) -> &Symbol {
        &self.accel
    }

    pub fn chart(&self) -> Chart {
        Chart::rindler(&self.accel)
    }

    fn a(&self) -> Expr {
        Expr::symbol(&self.accel)
    }

    /// Image of arbitrary expressions `zs` under the map.
    pub fn forward(&self, zs: &[Expr; 4]) -> [Expr; 4] {
        let n = self.lapse.substitute_one(&z(1), &zs[1]);
        let arg = self.a() * &zs[0];
        [
            (&n * arg.clone().sinh()).simplify(),
            (&n * arg.cosh()).simplify(),
            zs[2].simplify(),
            zs[3].simplify(),
        ]
    }

    /// `x_mu -> x_mu(z)` for use with `Expr::substitute`.
    pub fn substitution(&self) -> BTreeMap<Symbol, Expr> {
        let zs = [0, 1, 2, 3].map(|k| Expr::symbol(&z(k)));
        let xs = self.forward(&zs);
        (0..4).map(|mu| (x(mu), xs[mu].clone())).collect()
    }

    /// Express a Minkowski-chart function in Rindler coordinates.
    pub fn to_rindler(&self, f: &Expr) -> Expr {
        f.substitute(&self.substitution())
    }

    /// Jacobian `dx_mu / dz_j`, rows indexed by `mu`.
    pub fn jacobian(&self) -> [[Expr; 4]; 4] {
        let xs = self.forward(&[0, 1, 2, 3].map(|k| Expr::symbol(&z(k))));
        [0, 1, 2, 3].map(|mu| [0, 1, 2, 3].map(|j| xs[mu].diff(&z(j))))
    }

    /// `dz_j / dx_mu`, rows indexed by `mu`: the chain-rule image of `d/dx_mu`.
    pub fn inverse_jacobian(&self) -> [[Expr; 4]; 4] {
        let a = self.a();
        let n = self.lapse.clone();
        let np = self.lapse_prime();
        let u = &a * Expr::sym("z0");
        let sh = u.clone().sinh();
        let ch = u.cosh();
        let mut m = [0, 1, 2, 3].map(|_| [0, 1, 2, 3].map(|_| Expr::zero()));
        m[0][0] = (&ch / (&a * &n)).simplify();
        m[0][1] = (-(&sh / &np)).simplify();
        m[1][0] = (-(&sh / (&a * &n))).simplify();
        m[1][1] = (&ch / &np).simplify();
        m[2][2] = Expr::one();
        m[3][3] = Expr::one();
        m
    }

    /// Full pulled-back metric `g_jk = sum_mu eta_mu (dx_mu/dz_j)(dx_mu/dz_k)`.
    pub fn metric_tensor(&self) -> [[Expr; 4]; 4] {
        let jac = self.jacobian();
        [0, 1, 2, 3].map(|j| {
            [0, 1, 2, 3].map(|k| {
                Expr::sum((0..4).map(|mu| {
                    Expr::int(Chart::eta(mu)) * &jac[mu][j] * &jac[mu][k]
                }))
                .simplify()
            })
        })
    }

    /// Diagonal of the computed pullback: `(-a^2 N^2, N'^2, 1, 1)`.
    pub fn metric_pullback(&self) -> [Expr; 4] {
        let g = self.metric_tensor();
        [0, 1, 2, 3].map(|j| g[j][j].clone())
    }

    /// The diagonal as printed in the source, `(-a N^2, N'^2, 1, 1)`.
    pub fn printed_metric(&self) -> [Expr; 4] {
        let n = &self.lapse;
        [
            (-(self.a() * n * n)).simplify(),
            self.lapse_prime().pow(2).simplify(),
            Expr::one(),
            Expr::one(),
        ]
    }

    /// Numeric forward map at `zs` with parameters from `params`.
    pub fn forward_numeric(&self, zs: [f64; 4], params: &Bindings) -> Result<[f64; 4], RindlerError> {
        let mut b = params.clone();
        for (k, v) in zs.iter().enumerate() {
            b.set(z(k).name(), *v);
        }
        let exprs = self.forward(&[0, 1, 2, 3].map(|k| Expr::symbol(&z(k))));
        let mut out = [0.0; 4];
        for (o, e) in out.iter_mut().zip(&exprs) {
            *o = e.eval(&b)?.re;
        }
        Ok(out)
    }

    /// Numeric inverse on the right wedge; Newton iteration solves `N(z1) = sqrt(x1^2 - x0^2)`.
    pub fn inverse_numeric(&self, xs: [f64; 4], params: &Bindings) -> Result<[f64; 4], RindlerError> {
        let [x0, x1, x2, x3] = xs;
        if x1 <= x0.abs() {
            return Err(RindlerError::OutsideWedge(x0, x1));
        }
        let a = params
            .get(self.accel.name())
            .ok_or_else(|| ExprError::UnboundSymbol(self.accel.name().to_string()))?
            .re;
        let r = (x1 * x1 - x0 * x0).sqrt();
        let z0 = (x0 / x1).atanh() / a;
        let z1 = if self.lapse == Expr::sym("z1") {
            r
        } else {
            self.solve_lapse(r, params)?
        };
        Ok([z0, z1, x2, x3])
    }

    fn solve_lapse(&self, r: f64, params: &Bindings) -> Result<f64, RindlerError> {
        let np = self.lapse_prime();
        let mut t = r;
        for _ in 0..100 {
            let b = params.clone().with("z1", t);
            let f = self.lapse.eval(&b)?.re - r;
            let d = np.eval(&b)?.re;
            if d == 0.0 || !d.is_finite() {
                break;
            }
            let step = f / d;
            t -= step;
            if step.abs() <= 1e-15 * t.abs().max(1.0) {
                return Ok(t);
            }
        }
        Err(RindlerError::NoConvergence(r))
    }
}

fn z(k: usize) -> Symbol {
    Chart::rindler(&Symbol::new("a").expect("valid symbol")).coord(k)
}

fn x(k: usize) -> Symbol {
    Chart::minkowski().coord(k)
}
