//! Linearized twist operators: canonical, Lie-algebraic and quadratic.
//!
//! Each twist is stored as its linear part `O`, so that the inverse twist is
//! `1 + O` to first order. The prefactor of every `O` is `-i/2`; with it the
//! Minkowski star commutators come out as `[x_mu, x_nu] = i theta^{mu nu}`,
//! `i C^rho_{mu nu} x_rho` and the linearized quadratic relation.

use std::fmt;

use thiserror::Error;

use crate::diffop::{is_coordinate_name, pullback, wedge, BidiffOp, Chart, DiffOp, DiffOpError};
use crate::expr::Expr;
use crate::rindler::RindlerMap;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwistError {
    #[error("theta is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("zeta^{0} must vanish: lambda may not equal alpha or beta")]
    ForbiddenZeta(usize),
    #[error("twist indices must be pairwise distinct, got {0:?}")]
    RepeatedIndex(Vec<usize>),
    #[error("index {0} out of range 0..4")]
    BadIndex(usize),
    #[error("deformation parameter depends on coordinates: {0}")]
    CoordinateParameter(String),
    #[error("expected a {expected} twist, found {found}")]
    WrongKind { expected: TwistKind, found: TwistKind },
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TwistKind {
    Canonical,
    LieAlgebraic,
    Quadratic,
}

impl TwistKind {
    pub fn name(self) -> &'static str {
        match self {
            TwistKind::Canonical => "canonical",
            TwistKind::LieAlgebraic => "lie",
            TwistKind::Quadratic => "quadratic",
        }
    }
}

impl fmt::Display for TwistKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Twist parameters. Entries are coordinate-free expressions (numbers or parameter symbols).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistSpec {
    /// Antisymmetric `theta^{mu nu}`.
    Canonical { theta: [[Expr; 4]; 4] },
    /// `1/kappa`, the four-vector `zeta^lambda` and the boost/rotation plane `(alpha, beta)`.
    LieAlgebraic {
        kappa_inv: Expr,
        zeta: [Expr; 4],
        alpha: usize,
        beta: usize,
    },
    /// `xi` and two disjoint planes `(alpha, beta)`, `(gamma, delta)`.
    Quadratic { xi: Expr, indices: [usize; 4] },
}

fn check_param(e: &Expr) -> Result<Expr, TwistError> {
    let e = e.simplify();
    if e.free_symbols().iter().any(|s| is_coordinate_name(s.name())) {
        return Err(TwistError::CoordinateParameter(e.to_string()));
    }
    Ok(e)
}

fn check_index(k: usize) -> Result<usize, TwistError> {
    if k < 4 {
        Ok(k)
    } else {
        Err(TwistError::BadIndex(k))
    }
}

impl TwistSpec {
    /// From a full matrix; fails unless `theta^{mu nu} = -theta^{nu mu}`.
    pub fn canonical(theta: [[Expr; 4]; 4]) -> Result<TwistSpec, TwistError> {
        let mut t = theta.clone();
        for mu in 0..4 {
            for nu in 0..4 {
                t[mu][nu] = check_param(&theta[mu][nu])?;
            }
        }
        for mu in 0..4 {
            for nu in mu..4 {
                if !(&t[mu][nu] + &t[nu][mu]).simplify().is_zero() {
                    return Err(TwistError::NotAntisymmetric(mu, nu));
                }
            }
        }
        Ok(TwistSpec::Canonical { theta: t })
    }

    /// From the six upper entries `theta^{01}, theta^{02}, theta^{03}, theta^{12}, theta^{13}, theta^{23}`.
    pub fn canonical_upper(upper: [Expr; 6]) -> Result<TwistSpec, TwistError> {
        let mut theta = [0, 1, 2, 3].map(|_| [0, 1, 2, 3].map(|_| Expr::zero()));
        for (k, (mu, nu)) in PAIRS.iter().enumerate() {
            theta[*mu][*nu] = upper[k].clone();
            theta[*nu][*mu] = -&upper[k];
        }
        TwistSpec::canonical(theta)
    }

    pub fn lie(kappa_inv: Expr, zeta: [Expr; 4], alpha: usize, beta: usize) -> Result<TwistSpec, TwistError> {
        check_index(alpha)?;
        check_index(beta)?;
        if alpha == beta {
            return Err(TwistError::RepeatedIndex(vec![alpha, beta]));
        }
        let kappa_inv = check_param(&kappa_inv)?;
        let mut z = zeta.clone();
        for (lambda, e) in zeta.iter().enumerate() {
            z[lambda] = check_param(e)?;
            if (lambda == alpha || lambda == beta) && !z[lambda].is_zero() {
                return Err(TwistError::ForbiddenZeta(lambda));
            }
        }
        Ok(TwistSpec::LieAlgebraic {
            kappa_inv,
            zeta: z,
            alpha,
            beta,
        })
    }

    pub fn quadratic(xi: Expr, indices: [usize; 4]) -> Result<TwistSpec, TwistError> {
        for k in indices {
            check_index(k)?;
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if indices[i] == indices[j] {
                    return Err(TwistError::RepeatedIndex(indices.to_vec()));
                }
            }
        }
        Ok(TwistSpec::Quadratic {
            xi: check_param(&xi)?,
            indices,
        })
    }

    pub fn kind(&self) -> TwistKind {
        match self {
            TwistSpec::Canonical { .. } => TwistKind::Canonical,
            TwistSpec::LieAlgebraic { .. } => TwistKind::LieAlgebraic,
            TwistSpec::Quadratic { .. } => TwistKind::Quadratic,
        }
    }

    /// Same twist with the deformation parameter multiplied by `s`.
    pub fn scaled(&self, s: &Expr) -> TwistSpec {
        match self {
            TwistSpec::Canonical { theta } => TwistSpec::Canonical {
                theta: theta.clone().map(|row| row.map(|e| (s * e).simplify())),
            },
            TwistSpec::LieAlgebraic {
                kappa_inv,
                zeta,
                alpha,
                beta,
            } => TwistSpec::LieAlgebraic {
                kappa_inv: (s * kappa_inv).simplify(),
                zeta: zeta.clone(),
                alpha: *alpha,
                beta: *beta,
            },
            TwistSpec::Quadratic { xi, indices } => TwistSpec::Quadratic {
                xi: (s * xi).simplify(),
                indices: *indices,
            },
        }
    }

    /// Same twist with the deformation parameter set to zero.
    pub fn classical_limit(&self) -> TwistSpec {
        self.scaled(&Expr::zero())
    }
}

/// The six index pairs `mu < nu` in table order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Prefactor of every linear twist operator.
pub fn normalization() -> Expr {
    (-Expr::i() / Expr::int(2)).simplify()
}

/// Ratio between this normalization and the exponent prefactor of the source twist factor.
///
/// The canonical factor `exp(i theta^{mu nu} P_mu ^ P_nu)` summed over all
/// index pairs gives a prefactor `-2i` per `mu < nu` pair, four times ours.
pub fn source_normalization_ratio(kind: TwistKind) -> Expr {
    match kind {
        TwistKind::Canonical => Expr::rational(1, 4),
        TwistKind::LieAlgebraic | TwistKind::Quadratic => Expr::one(),
    }
}

/// Where the generators live.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    Minkowski,
    Rindler(RindlerMap),
}

impl Frame {
    pub fn chart(&self) -> Chart {
        match self {
            Frame::Minkowski => Chart::minkowski(),
            Frame::Rindler(m) => m.chart(),
        }
    }

    /// `P_mu` on Minkowski, its pullback (`f0`, `f1`, `i d/dz2`, `i d/dz3`) on Rindler.
    pub fn momentum(&self, mu: usize) -> Result<DiffOp, TwistError> {
        let p = DiffOp::momentum(&Chart::minkowski(), check_index(mu)?)?;
        self.transport(p)
    }

    /// `M_ab` on Minkowski, its pullback on Rindler.
    pub fn lorentz(&self, a: usize, b: usize) -> Result<DiffOp, TwistError> {
        let m = DiffOp::lorentz(&Chart::minkowski(), check_index(a)?, check_index(b)?)?;
        self.transport(m)
    }

    fn transport(&self, d: DiffOp) -> Result<DiffOp, TwistError> {
        match self {
            Frame::Minkowski => Ok(d),
            Frame::Rindler(map) => Ok(pullback(&d, map)?),
        }
    }
}

/// A twist together with its linear operator `O` on a given chart.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearTwist {
    spec: TwistSpec,
    frame: Frame,
    op: BidiffOp,
}

impl LinearTwist {
    pub fn new(spec: &TwistSpec, frame: &Frame) -> Result<LinearTwist, TwistError> {
        let op = match spec {
            TwistSpec::Canonical { theta } => canonical_op(theta, frame)?,
            TwistSpec::LieAlgebraic {
                kappa_inv,
                zeta,
                alpha,
                beta,
            } => lie_op(kappa_inv, zeta, *alpha, *beta, frame)?,
            TwistSpec::Quadratic { xi, indices } => quadratic_op(xi, indices, frame)?,
        };
        Ok(LinearTwist {
            spec: spec.clone(),
            frame: frame.clone(),
            op,
        })
    }

    pub fn minkowski(spec: &TwistSpec) -> Result<LinearTwist, TwistError> {
        LinearTwist::new(spec, &Frame::Minkowski)
    }

    pub fn rindler(spec: &TwistSpec, map: &RindlerMap) -> Result<LinearTwist, TwistError> {
        LinearTwist::new(spec, &Frame::Rindler(map.clone()))
    }

    pub fn spec(&self) -> &TwistSpec {
        &self.spec
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn chart(&self) -> Chart {
        self.frame.chart()
    }

    pub fn op(&self) -> &BidiffOp {
        &self.op
    }

    /// Pull a Minkowski twist back to Rindler leg by leg.
    pub fn pullback(&self, map: &RindlerMap) -> Result<LinearTwist, TwistError> {
        if self.frame != Frame::Minkowski {
            return Err(DiffOpError::ChartMismatch {
                expected: Chart::minkowski().to_string(),
                found: self.chart().to_string(),
            }
            .into());
        }
        Ok(LinearTwist {
            spec: self.spec.clone(),
            frame: Frame::Rindler(map.clone()),
            op: self.op.pullback(map)?,
        })
    }
}

pub fn canonical_twist_linear(theta: &[[Expr; 4]; 4], frame: &Frame) -> Result<LinearTwist, TwistError> {
    LinearTwist::new(&TwistSpec::canonical(theta.clone())?, frame)
}

pub fn lie_twist_linear(
    kappa_inv: &Expr,
    zeta: &[Expr; 4],
    alpha: usize,
    beta: usize,
    frame: &Frame,
) -> Result<LinearTwist, TwistError> {
    LinearTwist::new(&TwistSpec::lie(kappa_inv.clone(), zeta.clone(), alpha, beta)?, frame)
}

pub fn quadratic_twist_linear(xi: &Expr, indices: [usize; 4], frame: &Frame) -> Result<LinearTwist, TwistError> {
    LinearTwist::new(&TwistSpec::quadratic(xi.clone(), indices)?, frame)
}

fn canonical_op(theta: &[[Expr; 4]; 4], frame: &Frame) -> Result<BidiffOp, TwistError> {
    let mut op = BidiffOp::zero(&frame.chart());
    for (mu, nu) in PAIRS {
        if theta[mu][nu].is_zero() {
            continue;
        }
        let w = wedge(&frame.momentum(mu)?, &frame.momentum(nu)?)?;
        op = op.add(&w.scale(&(normalization() * &theta[mu][nu]))?)?;
    }
    Ok(op)
}

fn lie_op(kappa_inv: &Expr, zeta: &[Expr; 4], alpha: usize, beta: usize, frame: &Frame) -> Result<BidiffOp, TwistError> {
    let mut op = BidiffOp::zero(&frame.chart());
    if kappa_inv.is_zero() {
        return Ok(op);
    }
    let m = frame.lorentz(alpha, beta)?;
    for (lambda, z) in zeta.iter().enumerate() {
        if z.is_zero() {
            continue;
        }
        // zeta_lambda = eta_{lambda lambda} zeta^lambda
        let lowered = Expr::int(Chart::eta(lambda)) * z;
        let w = wedge(&frame.momentum(lambda)?, &m)?;
        op = op.add(&w.scale(&(normalization() * kappa_inv * lowered))?)?;
    }
    Ok(op)
}

fn quadratic_op(xi: &Expr, idx: &[usize; 4], frame: &Frame) -> Result<BidiffOp, TwistError> {
    if xi.is_zero() {
        return Ok(BidiffOp::zero(&frame.chart()));
    }
    let w = wedge(&frame.lorentz(idx[0], idx[1])?, &frame.lorentz(idx[2], idx[3])?)?;
    Ok(w.scale(&(normalization() * xi))?)
}
