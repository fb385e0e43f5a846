//! Damped quadrature for `int_0^inf u^(s0 - 1) e^(i beta u) du`.
//!
//! The integral converges only conditionally. It is regularized as
//! `I(eps) = int_0^inf u^(s0 + eps - 1) e^(-(eps - i beta) u) du`, evaluated
//! on Gauss-Kronrod panels, and extrapolated to `eps -> 0` with Richardson
//! steps over `eps_k = eps0 / 2^k`, where `eps0` is capped at a quarter of
//! `min(|s0|, beta)` so that every damping lies inside the analytic radius.
//!
//! The `[0, 1]` piece subtracts `int_0^1 u^(s-1) du = 1/s` and substitutes
//! `u = e^-t`; the `[1, inf)` piece is cut at `1 + 38/eps` and split into
//! panels of half an oscillation period.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::SpectrumError;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Upper limit of the `t = -ln u` integral.
const T_MAX: f64 = 40.0;
/// `e^(-eps U)` at the cut is `e^-38`.
const TAIL: f64 = 38.0;

/// 15-point Kronrod value and `|K - G|` on `[a, b]`.
pub fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        k += pair * WGK[j];
        if j % 2 == 1 {
            g += pair * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Composite rule over `n` equal panels.
pub fn composite<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, n: usize) -> (Complex64, f64) {
    let n = n.max(1);
    let w = (b - a) / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for k in 0..n {
        let lo = a + w * k as f64;
        let hi = if k + 1 == n { b } else { lo + w };
        let (v, e) = gk15(f, lo, hi);
        sum += v;
        err += e;
    }
    (sum, err)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadOptions {
    /// First damping value.
    pub eps0: f64,
    /// Number of damping values `eps0 / 2^k` in the Richardson table.
    pub levels: usize,
    /// Target for the per-`eps` panel error estimate.
    pub panel_tol: f64,
    /// Largest panel refinement factor tried before giving up.
    pub max_refine: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            eps0: 0.1,
            levels: 6,
            panel_tol: 1e-11,
            max_refine: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// Extrapolation difference plus the worst panel estimate.
    pub error: f64,
    /// Smallest damping used.
    pub eps: f64,
    /// Refinement factor needed at the smallest damping.
    pub refine: usize,
}

/// `I(eps)` at a fixed damping and panel refinement, with the panel error estimate.
pub fn damped_integral(s0: Complex64, beta: f64, eps: f64, refine: usize) -> (Complex64, f64) {
    let s = s0 + eps;
    let b = Complex64::new(eps, -beta);
    let refine = refine.max(1);

    let lower = |t: f64| {
        let u = (-t).exp();
        (-s * t).exp() * ((-b * u).exp() - 1.0)
    };
    let n_lower = ((T_MAX * (s.im.abs() + 1.0) / PI).ceil() as usize).max(16) * refine;
    let (lv, le) = composite(&lower, 0.0, T_MAX, n_lower);

    let upper = |u: f64| (s - 1.0).scale(u.ln()).exp() * (-b * u).exp();
    let u_max = 1.0 + TAIL / eps;
    let half_period = PI / beta.abs().max(1e-3);
    let n_upper = (((u_max - 1.0) / half_period).ceil() as usize).max(8) * refine;
    let (uv, ue) = composite(&upper, 1.0, u_max, n_upper);

    (1.0 / s + lv + uv, le + ue)
}

/// `I(eps)` with panel refinement doubled until the estimate meets `tol`.
fn adaptive(s0: Complex64, beta: f64, eps: f64, opts: &QuadOptions) -> Result<(Complex64, f64, usize), SpectrumError> {
    let mut refine = 1;
    loop {
        let (v, e) = damped_integral(s0, beta, eps, refine);
        if e <= opts.panel_tol {
            return Ok((v, e, refine));
        }
        if refine * 2 > opts.max_refine {
            return Err(SpectrumError::NonConvergence {
                estimate: e,
                tol: opts.panel_tol,
            });
        }
        refine *= 2;
    }
}

/// `int_0^inf u^(s0 - 1) e^(i beta u) du` for `0 <= Re s0 <= 1`, `s0 != 0`, `beta > 0`.
pub fn damped_mellin(s0: Complex64, beta: f64, opts: &QuadOptions) -> Result<QuadResult, SpectrumError> {
    if !(opts.eps0 > 0.0) || opts.levels == 0 || !(beta > 0.0) || s0.norm() == 0.0 {
        return Err(SpectrumError::InvalidParams(format!(
            "quadrature needs eps0 > 0, levels >= 1, beta > 0, s0 != 0 (got {}, {}, {}, {})",
            opts.eps0, opts.levels, beta, s0
        )));
    }
    let mut row: Vec<Complex64> = Vec::with_capacity(opts.levels);
    let mut prev_row: Vec<Complex64> = Vec::new();
    let mut panel_err: f64 = 0.0;
    // I(eps) is analytic in eps within min(|s0|, beta) of the origin
    // (Gamma pole at s = 0, branch point of b^-s); Richardson needs eps inside it.
    let eps_start = opts.eps0.min(0.25 * s0.norm().min(beta));
    let mut eps = eps_start;
    let mut refine = 1;
    for k in 0..opts.levels {
        eps = eps_start / 2f64.powi(k as i32);
        let (v, e, r) = adaptive(s0, beta, eps, opts)?;
        panel_err = panel_err.max(e);
        refine = r;
        row.clear();
        row.push(v);
        for j in 1..=k {
            let factor = 2f64.powi(j as i32) - 1.0;
            let next = row[j - 1] + (row[j - 1] - prev_row[j - 1]) / factor;
            row.push(next);
        }
        std::mem::swap(&mut row, &mut prev_row);
    }
    let top = prev_row[prev_row.len() - 1];
    let extrap_err = if prev_row.len() >= 2 {
        (top - prev_row[prev_row.len() - 2]).norm()
    } else {
        f64::INFINITY
    };
    Ok(QuadResult {
        value: top,
        error: extrap_err + panel_err,
        eps,
        refine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::gamma::complex_gamma;

    /// `Gamma(s) (-i beta)^-s` on the principal branch.
    fn exact(s: Complex64, beta: f64) -> Complex64 {
        let log_b = Complex64::new(beta.ln(), -PI / 2.0);
        complex_gamma(s).unwrap() * (-s * log_b).exp()
    }

    #[test]
    fn gk15_is_exact_for_polynomials() {
        let f = |x: f64| Complex64::new(x.powi(20) - 3.0 * x.powi(7), x);
        let (v, _) = gk15(&f, -1.0, 2.0);
        let expected = (2f64.powi(21) + 1.0) / 21.0 - 3.0 * (2f64.powi(8) - 1.0) / 8.0;
        assert!((v.re - expected).abs() < 1e-9 * expected.abs());
        assert!((v.im - 1.5).abs() < 1e-14);
    }

    #[test]
    fn panel_refinement_reduces_estimate() {
        let s0 = Complex64::new(0.0, -1.0);
        let mut last = f64::INFINITY;
        for refine in [1, 2, 4] {
            let (_, e) = damped_integral(s0, 1.0, 0.05, refine);
            assert!(e < last, "refine {refine}: {e} !< {last}");
            last = e;
        }
    }

    #[test]
    fn matches_gamma_closed_form() {
        for (s0, beta) in [
            (Complex64::new(0.0, -1.0), 1.0),
            (Complex64::new(0.0, 2.0), 0.5),
            (Complex64::new(1.0, -0.5), 3.0),
            (Complex64::new(0.5, 0.0), 1.0),
            (Complex64::new(0.0, 0.08), 1.0),
            (Complex64::new(0.0, -5.0), 0.5),
        ] {
            let r = damped_mellin(s0, beta, &QuadOptions::default()).unwrap();
            let ex = exact(s0, beta);
            let rel = (r.value - ex).norm() / ex.norm();
            assert!(rel < 1e-7, "s0={s0} beta={beta}: {} vs {ex} ({rel:e})", r.value);
            assert!(r.error < 1e-5);
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = QuadOptions {
            panel_tol: 1e-30,
            max_refine: 2,
            ..QuadOptions::default()
        };
        assert!(matches!(
            damped_mellin(Complex64::new(0.0, -1.0), 1.0, &opts),
            Err(SpectrumError::NonConvergence { .. })
        ));
    }

    #[test]
    fn invalid_options_are_rejected() {
        let opts = QuadOptions {
            eps0: 0.0,
            ..QuadOptions::default()
        };
        assert!(damped_mellin(Complex64::new(0.0, -1.0), 1.0, &opts).is_err());
    }
}
