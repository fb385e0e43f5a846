//! Run configuration: a TOML file, every section optional, unknown keys rejected.
//!
//! ```toml
//! seed = 7
//!
//! [twist]
//! kind = "lie"              # canonical | lie | quadratic
//! chart = "rindler"         # minkowski | rindler
//! kappa_inv = "1/kappa"
//! zeta = [0, 0, 1, 0]
//! alpha = 0
//! beta = 1
//!
//! [spectrum]
//! a = 6.283185307179586
//! omega = [0.5, 1.0, 2.0]   # or omega_range = { start = 0.1, stop = 5.0, count = 20 }
//! theta01 = 1e-4
//! quadrature = true
//! ```
//!
//! Twist parameters are numbers or expression strings (`"theta01"`, `"1/kappa"`).
//! Numbers are read through their decimal form, so `0.1` becomes exactly `1/10`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::expr::{parse, Expr};
use crate::rindler::RindlerMap;
use crate::spectrum::{QuadOptions, SpectrumRequest};
use crate::twists::{Frame, TwistSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    /// Unreadable file, bad TOML, unknown key, bad value.
    #[error("config error: {0}")]
    Parse(String),
    /// Well-formed but contradictory (forbidden zeta, repeated index, bad lapse).
    #[error("inconsistent twist specification: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Param {
    pub fn to_expr(&self) -> Result<Expr, ConfigError> {
        let text = match self {
            Param::Int(n) => return Ok(Expr::int(*n)),
            Param::Float(x) if !x.is_finite() => {
                return Err(ConfigError::Parse(format!("non-finite parameter {x}")))
            }
            Param::Float(x) => format!("{x:?}"),
            Param::Text(s) => s.clone(),
        };
        parse(&text).map_err(|e| ConfigError::Parse(format!("parameter `{text}`: {e}")))
    }
}

impl From<&str> for Param {
    fn from(s: &str) -> Param {
        Param::Text(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwistBlock {
    pub kind: String,
    pub chart: String,
    pub accel: String,
    pub lapse: String,
    pub theta01: Param,
    pub theta02: Param,
    pub theta03: Param,
    pub theta12: Param,
    pub theta13: Param,
    pub theta23: Param,
    pub kappa_inv: Param,
    pub zeta: Vec<Param>,
    pub alpha: usize,
    pub beta: usize,
    pub xi: Param,
    pub indices: Vec<usize>,
}

impl Default for TwistBlock {
    fn default() -> Self {
        TwistBlock {
            kind: "canonical".into(),
            chart: "minkowski".into(),
            accel: "a".into(),
            lapse: "z1".into(),
            theta01: "theta01".into(),
            theta02: "theta02".into(),
            theta03: "theta03".into(),
            theta12: "theta12".into(),
            theta13: "theta13".into(),
            theta23: "theta23".into(),
            kappa_inv: "kappa_inv".into(),
            zeta: vec![Param::Int(0), Param::Int(0), "zeta2".into(), "zeta3".into()],
            alpha: 0,
            beta: 1,
            xi: "xi".into(),
            indices: vec![0, 1, 2, 3],
        }
    }
}

impl TwistBlock {
    fn frame(&self) -> Result<Frame, ConfigError> {
        match self.chart.as_str() {
            "minkowski" => Ok(Frame::Minkowski),
            "rindler" => {
                let lapse = Param::Text(self.lapse.clone()).to_expr()?;
                let map = RindlerMap::new(lapse, &self.accel)
                    .map_err(|e| ConfigError::Inconsistent(e.to_string()))?;
                Ok(Frame::Rindler(map))
            }
            other => Err(ConfigError::Parse(format!(
                "unknown chart `{other}` (expected minkowski or rindler)"
            ))),
        }
    }

    pub fn spec(&self) -> Result<TwistSpec, ConfigError> {
        let inconsistent = |e: crate::twists::TwistError| ConfigError::Inconsistent(e.to_string());
        match self.kind.as_str() {
            "canonical" => {
                let upper = [
                    &self.theta01,
                    &self.theta02,
                    &self.theta03,
                    &self.theta12,
                    &self.theta13,
                    &self.theta23,
                ];
                let mut exprs = Vec::with_capacity(6);
                for p in upper {
                    exprs.push(p.to_expr()?);
                }
                let exprs: [Expr; 6] = exprs.try_into().expect("six entries");
                TwistSpec::canonical_upper(exprs).map_err(inconsistent)
            }
            "lie" => {
                if self.zeta.len() != 4 {
                    return Err(ConfigError::Parse(format!(
                        "zeta needs 4 components, got {}",
                        self.zeta.len()
                    )));
                }
                let mut zeta = Vec::with_capacity(4);
                for p in &self.zeta {
                    zeta.push(p.to_expr()?);
                }
                let zeta: [Expr; 4] = zeta.try_into().expect("four entries");
                TwistSpec::lie(self.kappa_inv.to_expr()?, zeta, self.alpha, self.beta).map_err(inconsistent)
            }
            "quadratic" => {
                let idx: [usize; 4] = self.indices.clone().try_into().map_err(|_| {
                    ConfigError::Parse(format!("indices needs 4 entries, got {}", self.indices.len()))
                })?;
                TwistSpec::quadratic(self.xi.to_expr()?, idx).map_err(inconsistent)
            }
            other => Err(ConfigError::Parse(format!(
                "unknown twist kind `{other}` (expected canonical, lie or quadratic)"
            ))),
        }
    }

    /// Twist parameters and the chart they act on.
    pub fn resolve(&self) -> Result<(TwistSpec, Frame), ConfigError> {
        let frame = self.frame()?;
        Ok((self.spec()?, frame))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumBlock {
    pub a: f64,
    pub omega_hat: f64,
    pub z: f64,
    pub omega: Option<Vec<f64>>,
    pub omega_range: Option<OmegaRange>,
    pub theta01: f64,
    pub quadrature: bool,
    pub eps0: f64,
    pub eps_levels: usize,
    pub panel_tol: f64,
    pub max_refine: usize,
}

impl Default for SpectrumBlock {
    fn default() -> Self {
        let q = QuadOptions::default();
        SpectrumBlock {
            a: 2.0 * PI,
            omega_hat: 1.0,
            z: 1.0,
            omega: None,
            omega_range: None,
            theta01: 1e-4,
            quadrature: true,
            eps0: q.eps0,
            eps_levels: q.levels,
            panel_tol: q.panel_tol,
            max_refine: q.max_refine,
        }
    }
}

impl SpectrumBlock {
    pub fn quad_options(&self) -> QuadOptions {
        QuadOptions {
            eps0: self.eps0,
            levels: self.eps_levels,
            panel_tol: self.panel_tol,
            max_refine: self.max_refine,
        }
    }

    /// The frequency grid: explicit list, else a linear range, else `0.5, 1, 2`.
    pub fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        match (&self.omega, &self.omega_range) {
            (Some(_), Some(_)) => Err(ConfigError::Parse("give either omega or omega_range, not both".into())),
            (Some(list), None) => Ok(list.clone()),
            (None, Some(r)) => {
                if r.count == 0 {
                    return Ok(Vec::new());
                }
                if r.count == 1 {
                    return Ok(vec![r.start]);
                }
                let step = (r.stop - r.start) / (r.count - 1) as f64;
                Ok((0..r.count).map(|k| r.start + step * k as f64).collect())
            }
            (None, None) => Ok(vec![0.5, 1.0, 2.0]),
        }
    }

    pub fn request(&self) -> Result<SpectrumRequest, ConfigError> {
        Ok(SpectrumRequest {
            a: self.a,
            omega_hat: self.omega_hat,
            z: self.z,
            omegas: self.grid()?,
            theta01: self.theta01,
            quadrature: self.quadrature,
            quad: self.quad_options(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: Option<String>,
    pub format: Option<Format>,
}

/// Pass/fail thresholds used by `verify`.
#[derive(Debug, Clone, PartialEq, Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub probe_trials: usize,
    pub probe: f64,
    pub simplify: f64,
    pub gamma: f64,
    pub planck: f64,
    pub quadrature: f64,
    pub deformed_closed: f64,
    pub deformed_fd: f64,
    pub geometry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            probe_trials: 50,
            probe: 1e-12,
            simplify: 1e-12,
            gamma: 1e-12,
            planck: 1e-10,
            quadrature: 1e-6,
            deformed_closed: 1e-6,
            deformed_fd: 1e-4,
            geometry: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub twist: TwistBlock,
    pub spectrum: SpectrumBlock,
    pub output: OutputBlock,
    pub tolerances: Tolerances,
}

pub const DEFAULT_SEED: u64 = 20_240_531;

impl RunConfig {
    pub fn from_toml_str(src: &str) -> Result<RunConfig, ConfigError> {
        toml::from_str(src).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml_str(&src)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twists::TwistKind;

    #[test]
    fn empty_config_uses_defaults() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        let (spec, frame) = c.twist.resolve().unwrap();
        assert_eq!(spec.kind(), TwistKind::Canonical);
        assert!(matches!(frame, Frame::Minkowski));
        assert_eq!(c.spectrum.grid().unwrap(), vec![0.5, 1.0, 2.0]);
    }

    #[test]
    fn numeric_parameters_are_exact_decimals() {
        assert_eq!(Param::Float(0.1).to_expr().unwrap(), parse("1/10").unwrap());
        assert_eq!(Param::Float(-1e-4).to_expr().unwrap(), parse("-1/10000").unwrap());
        assert_eq!(Param::Int(-3).to_expr().unwrap(), Expr::int(-3));
        assert_eq!(Param::from("1/kappa").to_expr().unwrap(), parse("kappa^-1").unwrap());
        assert!(Param::Float(f64::NAN).to_expr().is_err());
        assert!(Param::from("1 +").to_expr().is_err());
    }

    #[test]
    fn partial_blocks_fill_defaults() {
        let c = RunConfig::from_toml_str(
            "seed = 3\n[twist]\nkind = \"lie\"\nchart = \"rindler\"\nzeta = [0, 0, 1, 0]\nkappa_inv = 0.5\n",
        )
        .unwrap();
        assert_eq!(c.seed(), 3);
        let (spec, frame) = c.twist.resolve().unwrap();
        assert_eq!(spec.kind(), TwistKind::LieAlgebraic);
        assert!(matches!(frame, Frame::Rindler(_)));
    }

    #[test]
    fn unknown_keys_and_bad_values_are_parse_errors() {
        for src in [
            "[twist]\nkappa = 1\n",
            "colour = 1\n",
            "[spectrum]\na = \"fast\"\n",
            "[twist]\nkind = \"cubic\"\n",
            "[output]\nformat = \"xml\"\n",
            "[twist\n",
        ] {
            let parsed = RunConfig::from_toml_str(src).and_then(|c| c.twist.resolve().map(|_| ()));
            assert!(matches!(parsed, Err(ConfigError::Parse(_))), "{src}: {parsed:?}");
        }
    }

    #[test]
    fn contradictory_twists_are_inconsistent() {
        for src in [
            "[twist]\nkind = \"lie\"\nzeta = [1, 0, 0, 0]\n",
            "[twist]\nkind = \"quadratic\"\nindices = [0, 1, 1, 2]\n",
            "[twist]\nchart = \"rindler\"\nlapse = \"z0*z1\"\n",
        ] {
            let c = RunConfig::from_toml_str(src).unwrap();
            assert!(matches!(c.twist.resolve(), Err(ConfigError::Inconsistent(_))), "{src}");
        }
    }

    #[test]
    fn omega_grids() {
        let c = RunConfig::from_toml_str("[spectrum]\nomega_range = { start = 1.0, stop = 2.0, count = 5 }\n").unwrap();
        assert_eq!(c.spectrum.grid().unwrap(), vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        let c = RunConfig::from_toml_str("[spectrum]\nomega = []\n").unwrap();
        assert!(c.spectrum.grid().unwrap().is_empty());
        let both = "[spectrum]\nomega = [1.0]\nomega_range = { start = 1.0, stop = 2.0, count = 2 }\n";
        assert!(RunConfig::from_toml_str(both).unwrap().spectrum.grid().is_err());
    }
}
