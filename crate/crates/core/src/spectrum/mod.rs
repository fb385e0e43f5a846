//! Unruh spectrum of a Minkowski plane wave seen in Rindler time, with the
//! canonical-twist correction. Natural units, `T = a / 2 pi`.
//!
//! `f(omega) = int dtau exp(i w z e^(-a tau)) e^(i omega tau)`
//! `         = (1/a) Gamma(-i omega/a) (w z)^(i omega/a) e^(pi omega / 2a)`.

pub mod gamma;
pub mod quad;

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::expr::{parse, Expr};
use crate::rindler::RindlerMap;
use crate::twists::{LinearTwist, TwistSpec};

pub use gamma::complex_gamma;
pub use quad::{QuadOptions, QuadResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("Gamma pole at {0} + {1}i")]
    GammaPole(f64, f64),
    #[error("invalid spectrum parameters: {0}")]
    InvalidParams(String),
    #[error("quadrature did not converge: estimate {estimate:e} above tolerance {tol:e}")]
    NonConvergence { estimate: f64, tol: f64 },
    #[error("empty frequency grid")]
    EmptyGrid,
    #[error("symbolic correction failed: {0}")]
    Symbolic(String),
}

/// One Rindler mode: plane-wave frequency `omega_hat`, position `z`, acceleration `a`, frequency `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeParams {
    pub omega_hat: f64,
    pub z: f64,
    pub a: f64,
    pub omega: f64,
}

impl ModeParams {
    pub fn new(omega_hat: f64, z: f64, a: f64, omega: f64) -> Result<ModeParams, SpectrumError> {
        let m = ModeParams {
            omega_hat,
            z,
            a,
            omega,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), SpectrumError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.omega_hat) || !positive(self.z) || !positive(self.a) || !self.omega.is_finite() {
            return Err(SpectrumError::InvalidParams(format!(
                "need omega_hat > 0, z > 0, a > 0 and finite omega (got {}, {}, {}, {})",
                self.omega_hat, self.z, self.a, self.omega
            )));
        }
        Ok(())
    }

    pub fn with_omega(&self, omega: f64) -> ModeParams {
        ModeParams { omega, ..*self }
    }

    fn nu(&self) -> f64 {
        self.omega / self.a
    }

    fn beta(&self) -> f64 {
        self.omega_hat * self.z
    }
}

/// Canonical deformation entering the spectrum: the lower-index component `theta_01`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeformationInput {
    pub theta01: f64,
}

impl DeformationInput {
    /// `theta^{01} = eta_00 eta_11 theta_01 = -theta_01`.
    pub fn theta_upper(&self) -> f64 {
        -self.theta01
    }
}

pub fn hawking_temperature(a: f64) -> f64 {
    a / (2.0 * PI)
}

/// `(2 pi / a) / (e^(2 pi omega / a) - 1)`.
pub fn planck(a: f64, omega: f64) -> f64 {
    (2.0 * PI / a) / (2.0 * PI * omega / a).exp_m1()
}

/// Closed form of `f(omega)`; `omega = 0` hits the Gamma pole.
pub fn f_closed(m: &ModeParams) -> Result<Complex64, SpectrumError> {
    m.validate()?;
    let nu = m.nu();
    let g = complex_gamma(Complex64::new(0.0, -nu))?;
    let phase = Complex64::new(0.0, nu * m.beta().ln()).exp();
    Ok(g * phase * (PI * nu / 2.0).exp() / m.a)
}

/// Closed form of `int dtau exp(i w z e^(-a tau)) e^(i omega tau) e^(-a tau)`
/// `= (1/a) Gamma(1 - i omega/a) (-i w z)^(-(1 - i omega/a))`.
pub fn f_shifted_closed(m: &ModeParams) -> Result<Complex64, SpectrumError> {
    m.validate()?;
    let s = Complex64::new(1.0, -m.nu());
    let log_b = Complex64::new(m.beta().ln(), -PI / 2.0);
    Ok(complex_gamma(s)? * (-s * log_b).exp() / m.a)
}

fn scaled(r: QuadResult, a: f64) -> QuadResult {
    QuadResult {
        value: r.value / a,
        error: r.error / a,
        ..r
    }
}

/// `f(omega)` by damped quadrature after `u = e^(-a tau)`.
pub fn f_quadrature(m: &ModeParams, opts: &QuadOptions) -> Result<QuadResult, SpectrumError> {
    m.validate()?;
    let r = quad::damped_mellin(Complex64::new(0.0, -m.nu()), m.beta(), opts)?;
    Ok(scaled(r, m.a))
}

/// The shifted integral (extra `e^(-a tau)`) by quadrature.
pub fn f_shifted_quadrature(m: &ModeParams, opts: &QuadOptions) -> Result<QuadResult, SpectrumError> {
    m.validate()?;
    let r = quad::damped_mellin(Complex64::new(1.0, -m.nu()), m.beta(), opts)?;
    Ok(scaled(r, m.a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerValue {
    /// `omega |f(-omega)|^2`.
    pub from_amplitude: f64,
    /// `(2 pi / a) / (e^(2 pi omega / a) - 1)`.
    pub planck: f64,
}

fn require_positive_omega(m: &ModeParams) -> Result<(), SpectrumError> {
    if m.omega > 0.0 {
        Ok(())
    } else {
        Err(SpectrumError::InvalidParams(format!(
            "power at negative frequency needs omega > 0 (got {})",
            m.omega
        )))
    }
}

/// `omega P(-omega)` from the amplitude and from the Planck form.
pub fn power_spectrum(m: &ModeParams) -> Result<PowerValue, SpectrumError> {
    require_positive_omega(m)?;
    let f = f_closed(&m.with_omega(-m.omega))?;
    Ok(PowerValue {
        from_amplitude: m.omega * f.norm_sqr(),
        planck: planck(m.a, m.omega),
    })
}

/// `f_theta / f = (2 theta^{01} omega / (a z^2)) (i omega / a - 1)`.
pub fn deformation_bracket(m: &ModeParams, d: &DeformationInput) -> Complex64 {
    let c = 2.0 * d.theta_upper() * m.omega / (m.a * m.z * m.z);
    Complex64::new(-c, c * m.nu())
}

/// `f(omega) + f_theta(omega)` at linear order in theta.
pub fn deformed_f_theta(m: &ModeParams, d: &DeformationInput) -> Result<Complex64, SpectrumError> {
    let f = f_closed(m)?;
    Ok(f * (1.0 + deformation_bracket(m, d)))
}

/// `-2 theta_01 omega / (pi T z^2)`.
pub fn relative_deviation(m: &ModeParams, d: &DeformationInput) -> f64 {
    -2.0 * d.theta01 * m.omega / (PI * hawking_temperature(m.a) * m.z * m.z)
}

/// Deformed `omega P(-omega)` by both routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeformedPower {
    /// `(1/T) (e^(omega/T) - 1)^-1 (1 - 2 theta_01 omega / (pi T z^2))`.
    pub closed_form: f64,
    /// `omega |f_tw(-omega)|^2` truncated at linear order in theta.
    pub from_amplitude: f64,
    /// `omega |f_tw(-omega)|^2` without truncation.
    pub from_amplitude_full: f64,
    /// Set when `|2 theta_01 omega / (pi T z^2)| > 0.1`.
    pub linear_regime_violated: bool,
}

pub fn deformed_power(m: &ModeParams, d: &DeformationInput) -> Result<DeformedPower, SpectrumError> {
    require_positive_omega(m)?;
    let neg = m.with_omega(-m.omega);
    let f = f_closed(&neg)?;
    let bracket = deformation_bracket(&neg, d);
    let base = m.omega * f.norm_sqr();
    let dev = relative_deviation(m, d);
    let t = hawking_temperature(m.a);
    Ok(DeformedPower {
        closed_form: (1.0 / t) / (m.omega / t).exp_m1() * (1.0 + dev),
        from_amplitude: base * (1.0 + 2.0 * bracket.re),
        from_amplitude_full: base * (1.0 + bracket).norm_sqr(),
        linear_regime_violated: dev.abs() > 0.1,
    })
}

/// `f_theta` assembled from the two shifted integrals as in the source derivation:
/// `(2 i theta^{01} omega w / (a z)) J - (2 theta^{01} w / z) J`, with `J` from quadrature.
pub fn correction_by_quadrature(
    m: &ModeParams,
    d: &DeformationInput,
    opts: &QuadOptions,
) -> Result<(Complex64, f64), SpectrumError> {
    let j = f_shifted_quadrature(m, opts)?;
    let th = d.theta_upper();
    let c1 = Complex64::new(0.0, 2.0 * th * m.omega * m.omega_hat / (m.a * m.z));
    let c2 = Complex64::new(-2.0 * th * m.omega_hat / m.z, 0.0);
    let coeff = c1 + c2;
    Ok((coeff * j.value, coeff.norm() * j.error))
}

/// Coefficients multiplying `e^(-a tau)` in the two correction integrands.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionCoefficients {
    /// From `O(phi, e^(i omega tau)) / (phi e^(i omega tau))`.
    pub engine_wave: Expr,
    /// From `O(i w z, e^(-a tau))`.
    pub engine_exponent: Expr,
    /// `2 i theta^{01} omega w / (a z)`.
    pub source_wave: Expr,
    /// `-2 theta^{01} w / z`.
    pub source_exponent: Expr,
}

impl CorrectionCoefficients {
    /// Paper coefficient over engine coefficient, per integral.
    pub fn ratios(&self) -> (Expr, Expr) {
        (
            (&self.source_wave / &self.engine_wave).simplify(),
            (&self.source_exponent / &self.engine_exponent).simplify(),
        )
    }
}

fn symbolic(e: impl std::fmt::Display) -> SpectrumError {
    SpectrumError::Symbolic(e.to_string())
}

/// Apply the canonical Rindler twist (`theta^{01}` only) to the plane wave and
/// to `i w z (x) e^(-a tau)`, and strip the common factors.
///
/// Symbols: `omega`, `omega_hat`, `theta01` (upper), `a`, `z0 = tau`, `z1 = z`.
pub fn twist_correction_coefficients() -> Result<CorrectionCoefficients, SpectrumError> {
    let p = |s: &str| parse(s).map_err(symbolic);
    let spec = TwistSpec::canonical_upper([
        p("theta01")?,
        Expr::zero(),
        Expr::zero(),
        Expr::zero(),
        Expr::zero(),
        Expr::zero(),
    ])
    .map_err(symbolic)?;
    let t = LinearTwist::rindler(&spec, &RindlerMap::standard()).map_err(symbolic)?;
    let phi = p("exp(i*omega_hat*z1*exp(-a*z0))")?;
    let wave = p("exp(i*omega*z0)")?;
    let decay = p("exp(-a*z0)")?;
    let exponent = p("i*omega_hat*z1")?;

    let first = t.op().apply(&phi, &wave).map_err(symbolic)?;
    let engine_wave = (first / (&phi * &wave * &decay)).simplify();
    let second = t.op().apply(&exponent, &decay).map_err(symbolic)?;
    let engine_exponent = (second / &decay).simplify();
    let tau = crate::diffop::Chart::rindler(RindlerMap::standard().accel()).coord(0);
    for e in [&engine_wave, &engine_exponent] {
        if e.contains_symbol(&tau) {
            return Err(SpectrumError::Symbolic(format!("coefficient depends on tau: {e}")));
        }
    }
    Ok(CorrectionCoefficients {
        engine_wave,
        engine_exponent,
        source_wave: p("2*i*theta01*omega*omega_hat/(a*z1)")?,
        source_exponent: p("-2*theta01*omega_hat/z1")?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// One grid point; `f` is `f(-omega)` and powers are `omega P(-omega)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub omega: f64,
    pub re_f: f64,
    pub im_f: f64,
    pub power: f64,
    pub planck: f64,
    pub power_deformed: f64,
    pub power_deformed_closed_form: f64,
    pub method: Method,
    pub eps: Option<f64>,
    pub error: Option<f64>,
    pub converged: bool,
    pub linear_regime_violated: bool,
}

impl SpectrumRow {
    pub fn method_tag(&self) -> &'static str {
        match (self.method, self.converged) {
            (Method::ClosedForm, _) => "closed_form",
            (Method::Quadrature, true) => "quadrature",
            (Method::Quadrature, false) => "quadrature_unconverged",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRequest {
    pub a: f64,
    pub omega_hat: f64,
    pub z: f64,
    pub omegas: Vec<f64>,
    pub theta01: f64,
    pub quadrature: bool,
    #[serde(skip)]
    pub quad: QuadOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub request: SpectrumRequest,
    pub temperature: f64,
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumResult {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,re_f,im_f,power,power_deformed,method,eps\n");
        for r in &self.rows {
            let eps = r.eps.map(|e| e.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.omega,
                r.re_f,
                r.im_f,
                r.power,
                r.power_deformed,
                r.method_tag(),
                eps
            );
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let q = &self.request.quad;
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = serde_json::to_value(r).unwrap_or(Value::Null);
                v["method"] = json!(r.method_tag());
                v
            })
            .collect();
        json!({
            "parameters": {
                "a": self.request.a,
                "omega_hat": self.request.omega_hat,
                "z": self.request.z,
                "theta01": self.request.theta01,
                "temperature": self.temperature,
                "quadrature": self.request.quadrature,
                "eps0": q.eps0,
                "eps_levels": q.levels,
                "panel_tol": q.panel_tol,
                "max_refine": q.max_refine,
            },
            "rows": rows,
        })
    }
}

fn closed_row(m: &ModeParams, d: &DeformationInput) -> Result<SpectrumRow, SpectrumError> {
    let f = f_closed(&m.with_omega(-m.omega))?;
    let dp = deformed_power(m, d)?;
    Ok(SpectrumRow {
        omega: m.omega,
        re_f: f.re,
        im_f: f.im,
        power: m.omega * f.norm_sqr(),
        planck: planck(m.a, m.omega),
        power_deformed: dp.from_amplitude,
        power_deformed_closed_form: dp.closed_form,
        method: Method::ClosedForm,
        eps: None,
        error: None,
        converged: true,
        linear_regime_violated: dp.linear_regime_violated,
    })
}

fn quadrature_row(m: &ModeParams, d: &DeformationInput, opts: &QuadOptions) -> Result<SpectrumRow, SpectrumError> {
    let neg = m.with_omega(-m.omega);
    let dp = deformed_power(m, d)?;
    let (f, eps, error, converged) = match f_quadrature(&neg, opts) {
        Ok(r) => (r.value, Some(r.eps), Some(r.error), true),
        Err(SpectrumError::NonConvergence { estimate, .. }) => {
            (Complex64::new(f64::NAN, f64::NAN), None, Some(estimate), false)
        }
        Err(e) => return Err(e),
    };
    let power = m.omega * f.norm_sqr();
    let bracket = deformation_bracket(&neg, d);
    Ok(SpectrumRow {
        omega: m.omega,
        re_f: f.re,
        im_f: f.im,
        power,
        planck: planck(m.a, m.omega),
        power_deformed: power * (1.0 + 2.0 * bracket.re),
        power_deformed_closed_form: dp.closed_form,
        method: Method::Quadrature,
        eps,
        error,
        converged,
        linear_regime_violated: dp.linear_regime_violated,
    })
}

/// Closed-form rows for every grid point, then quadrature rows when requested.
pub fn compute_spectrum(req: &SpectrumRequest) -> Result<SpectrumResult, SpectrumError> {
    if req.omegas.is_empty() {
        return Err(SpectrumError::EmptyGrid);
    }
    if !req.theta01.is_finite() {
        return Err(SpectrumError::InvalidParams("theta01 must be finite".into()));
    }
    let modes: Vec<ModeParams> = req
        .omegas
        .iter()
        .map(|w| {
            let m = ModeParams::new(req.omega_hat, req.z, req.a, *w)?;
            require_positive_omega(&m)?;
            Ok(m)
        })
        .collect::<Result<_, SpectrumError>>()?;
    let d = DeformationInput { theta01: req.theta01 };
    let mut rows: Vec<SpectrumRow> = modes
        .par_iter()
        .map(|m| closed_row(m, &d))
        .collect::<Result<_, _>>()?;
    if req.quadrature {
        let quad: Vec<SpectrumRow> = modes
            .par_iter()
            .map(|m| quadrature_row(m, &d, &req.quad))
            .collect::<Result<_, _>>()?;
        rows.extend(quad);
    }
    Ok(SpectrumResult {
        request: req.clone(),
        temperature: hawking_temperature(req.a),
        rows,
    })
}
