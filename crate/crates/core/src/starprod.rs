//! Linearized star products, commutator tables and the Minkowski relation checks.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::diffop::{Chart, DiffOp, DiffOpError};
use crate::expr::{Expr, Probe, Symbol};
use crate::twists::{Frame, LinearTwist, TwistError, TwistKind, TwistSpec, PAIRS};

/// `f * g = f g + O(f, g)`.
pub fn star(f: &Expr, g: &Expr, t: &LinearTwist) -> Result<Expr, DiffOpError> {
    let corr = t.op().apply(f, g)?;
    Ok((f * g + corr).simplify())
}

/// `[f, g] = f * g - g * f`.
pub fn commutator(f: &Expr, g: &Expr, t: &LinearTwist) -> Result<Expr, DiffOpError> {
    Ok((star(f, g, t)? - star(g, f, t)?).simplify())
}

/// `{f, g} = f * g + g * f`.
pub fn anticommutator(f: &Expr, g: &Expr, t: &LinearTwist) -> Result<Expr, DiffOpError> {
    Ok((star(f, g, t)? + star(g, f, t)?).simplify())
}

/// The six independent coordinate commutators of a twist.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorTable {
    pub spec: TwistSpec,
    pub chart: Chart,
    pub entries: BTreeMap<(usize, usize), Expr>,
}

impl CommutatorTable {
    /// `[c_mu, c_nu]` for any pair; antisymmetric by construction.
    pub fn get(&self, mu: usize, nu: usize) -> Expr {
        use std::cmp::Ordering;
        match mu.cmp(&nu) {
            Ordering::Equal => Expr::zero(),
            Ordering::Less => self.entries[&(mu, nu)].clone(),
            Ordering::Greater => (-&self.entries[&(nu, mu)]).simplify(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(Expr::is_zero)
    }

    pub fn to_json(&self) -> Value {
        let p = self.chart.prefix();
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|((mu, nu), e)| {
                json!({
                    "lhs": format!("[{p}{mu}, {p}{nu}]"),
                    "mu": mu,
                    "nu": nu,
                    "value": e.to_string(),
                })
            })
            .collect();
        json!({
            "twist": spec_json(&self.spec),
            "chart": self.chart.to_string(),
            "entries": entries,
        })
    }

    /// One aligned line per entry, e.g. `[z0, z2] = i*t02*cosh(a*z0)/(a*z1)`.
    pub fn to_text(&self) -> String {
        let p = self.chart.prefix();
        let mut out = String::new();
        let _ = writeln!(out, "# {} twist, {} chart", self.spec.kind(), self.chart);
        for ((mu, nu), e) in &self.entries {
            let _ = writeln!(out, "[{p}{mu}, {p}{nu}] = {e}");
        }
        out
    }
}

/// Parameters of a twist as JSON, expressions printed in the infix grammar.
pub fn spec_json(spec: &TwistSpec) -> Value {
    match spec {
        TwistSpec::Canonical { theta } => {
            let mut m = serde_json::Map::new();
            m.insert("kind".into(), json!("canonical"));
            for (mu, nu) in PAIRS {
                m.insert(format!("theta{mu}{nu}"), json!(theta[mu][nu].to_string()));
            }
            Value::Object(m)
        }
        TwistSpec::LieAlgebraic {
            kappa_inv,
            zeta,
            alpha,
            beta,
        } => json!({
            "kind": "lie",
            "kappa_inv": kappa_inv.to_string(),
            "zeta": zeta.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "alpha": alpha,
            "beta": beta,
        }),
        TwistSpec::Quadratic { xi, indices } => json!({
            "kind": "quadratic",
            "xi": xi.to_string(),
            "indices": indices,
        }),
    }
}

/// All six commutators, computed in parallel and merged in pair order.
pub fn build_table(t: &LinearTwist) -> Result<CommutatorTable, DiffOpError> {
    let chart = t.chart();
    let values: Vec<Expr> = PAIRS
        .par_iter()
        .map(|(mu, nu)| commutator(&chart.coord_expr(*mu), &chart.coord_expr(*nu), t))
        .collect::<Result<_, _>>()?;
    Ok(CommutatorTable {
        spec: t.spec().clone(),
        chart,
        entries: PAIRS.iter().copied().zip(values).collect(),
    })
}

/// Result of comparing one table entry against its closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryCheck {
    pub mu: usize,
    pub nu: usize,
    pub engine: String,
    pub expected: String,
    /// Simplified difference; `"0"` when the check passes structurally.
    pub residual: String,
    pub structural: bool,
    pub numeric: bool,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    pub kind: String,
    pub entries: Vec<EntryCheck>,
    pub passed: bool,
}

impl RelationReport {
    pub fn failures(&self) -> impl Iterator<Item = &EntryCheck> {
        self.entries.iter().filter(|e| !(e.structural && e.numeric))
    }
}

fn x(mu: usize) -> Expr {
    Chart::minkowski().coord_expr(mu)
}

fn eta(a: usize, b: usize) -> Expr {
    if a == b {
        Expr::int(Chart::eta(a))
    } else {
        Expr::zero()
    }
}

/// `i C^rho_{mu nu} x_rho` with `zeta_mu = eta_{mu mu} zeta^mu`.
pub fn lie_closed_form(kappa_inv: &Expr, zeta: &[Expr; 4], alpha: usize, beta: usize, mu: usize, nu: usize) -> Expr {
    let low = |l: usize| Expr::int(Chart::eta(l)) * &zeta[l];
    let c_mu = low(mu) * (eta(beta, nu) * x(alpha) - eta(alpha, nu) * x(beta));
    let c_nu = low(nu) * (eta(alpha, mu) * x(beta) - eta(beta, mu) * x(alpha));
    (Expr::i() * kappa_inv * (c_mu + c_nu)).simplify()
}

/// `m^{ab}_mu = x_a eta_{b mu} - x_b eta_{a mu}`.
fn plane(a: usize, b: usize, mu: usize) -> Expr {
    x(a) * eta(b, mu) - x(b) * eta(a, mu)
}

/// Right-hand side of the quadratic relation for the ordered pair `(mu, nu)`,
/// with the anticommutators supplied by `anti(p, q) = {x_p, x_q}`.
fn quadratic_rhs(
    idx: &[usize; 4],
    mu: usize,
    nu: usize,
    anti: &mut dyn FnMut(usize, usize) -> Result<Expr, DiffOpError>,
) -> Result<Expr, DiffOpError> {
    let [a, b, c, d] = *idx;
    Ok(Expr::sum([
        eta(a, mu) * eta(c, nu) * anti(b, d)?,
        -(eta(a, mu) * eta(d, nu) * anti(b, c)?),
        -(eta(b, mu) * eta(c, nu) * anti(a, d)?),
        eta(b, mu) * eta(d, nu) * anti(a, c)?,
    ]))
}

/// Linear-order quadratic commutator `i xi (m^{ab}_mu m^{cd}_nu - m^{cd}_mu m^{ab}_nu)`.
pub fn quadratic_closed_form(xi: &Expr, idx: &[usize; 4], mu: usize, nu: usize) -> Expr {
    let [a, b, c, d] = *idx;
    let e = plane(a, b, mu) * plane(c, d, nu) - plane(c, d, mu) * plane(a, b, nu);
    (Expr::i() * xi * e).simplify()
}

fn deformation_scale() -> Symbol {
    Symbol::new("s_lin").expect("valid symbol")
}

/// Both sides of the quadratic relation at first order in `xi`.
///
/// The anticommutators come from the engine's star product; `tanh(xi/2)` is
/// expanded to first order. The relation as written is not antisymmetric in
/// `(mu, nu)`, so the right-hand side is antisymmetrized.
pub fn quadratic_relation_sides(spec: &TwistSpec, mu: usize, nu: usize) -> Result<(Expr, Expr), TwistError> {
    let TwistSpec::Quadratic { xi, indices } = spec else {
        return Err(TwistError::WrongKind {
            expected: TwistKind::Quadratic,
            found: spec.kind(),
        });
    };
    let s = deformation_scale();
    let se = Expr::symbol(&s);
    let t = LinearTwist::minkowski(&spec.scaled(&se))?;
    let lhs = commutator(&x(mu), &x(nu), &t)?.linearize(&s);
    let mut anti = |p: usize, q: usize| anticommutator(&x(p), &x(q), &t);
    let r = quadratic_rhs(indices, mu, nu, &mut anti)? - quadratic_rhs(indices, nu, mu, &mut anti)?;
    let half = (&se * xi / Expr::int(2)).tanh();
    let rhs = (Expr::i() * half * r).linearize(&s);
    let one = Expr::one();
    Ok((lhs.substitute_one(&s, &one), rhs.substitute_one(&s, &one)))
}

fn check_entry(mu: usize, nu: usize, engine: &Expr, expected: &Expr, probe: &Probe) -> EntryCheck {
    let residual = (engine - expected).simplify();
    let outcome = probe.compare(engine, expected);
    EntryCheck {
        mu,
        nu,
        engine: engine.to_string(),
        expected: expected.to_string(),
        residual: residual.to_string(),
        structural: residual.is_zero(),
        numeric: outcome.equal,
        max_residual: outcome.max_residual,
    }
}

/// Compare a Minkowski twist's table with the closed-form relations entry by entry.
pub fn verify_minkowski_relations(t: &LinearTwist, probe: &Probe) -> Result<RelationReport, TwistError> {
    if t.chart() != Chart::minkowski() {
        return Err(DiffOpError::ChartMismatch {
            expected: Chart::minkowski().to_string(),
            found: t.chart().to_string(),
        }
        .into());
    }
    let table = build_table(t)?;
    let mut entries = Vec::new();
    for (mu, nu) in PAIRS {
        let engine = table.get(mu, nu);
        let check = match t.spec() {
            TwistSpec::Canonical { theta } => {
                let expected = (Expr::i() * &theta[mu][nu]).simplify();
                check_entry(mu, nu, &engine, &expected, probe)
            }
            TwistSpec::LieAlgebraic {
                kappa_inv,
                zeta,
                alpha,
                beta,
            } => {
                let expected = lie_closed_form(kappa_inv, zeta, *alpha, *beta, mu, nu);
                check_entry(mu, nu, &engine, &expected, probe)
            }
            TwistSpec::Quadratic { .. } => {
                let (lhs, rhs) = quadratic_relation_sides(t.spec(), mu, nu)?;
                let mut c = check_entry(mu, nu, &lhs, &rhs, probe);
                c.engine = engine.to_string();
                c
            }
        };
        entries.push(check);
    }
    let passed = entries.iter().all(|e| e.structural && e.numeric);
    Ok(RelationReport {
        kind: t.spec().kind().to_string(),
        entries,
        passed,
    })
}

/// Commutator assembled by hand from the chart generators:
/// `-(i/2) theta^{rho tau} [(F_rho c_mu)(F_tau c_nu) - (F_tau c_mu)(F_rho c_nu)]` summed over all `rho, tau`,
/// `-(i/kappa) zeta_lambda [(A_lambda c_mu)(A_ab c_nu) - (A_ab c_mu)(A_lambda c_nu)]`, and
/// `-i xi [(A_ab c_mu)(A_cd c_nu) - (A_cd c_mu)(A_ab c_nu)]`.
pub fn hand_commutator(t: &LinearTwist, mu: usize, nu: usize) -> Result<Expr, TwistError> {
    let frame = t.frame();
    let chart = frame.chart();
    let (cm, cn) = (chart.coord_expr(mu), chart.coord_expr(nu));
    let pair = |p: &DiffOp, q: &DiffOp| -> Result<Expr, DiffOpError> {
        Ok(p.apply(&cm)? * q.apply(&cn)? - q.apply(&cm)? * p.apply(&cn)?)
    };
    let value = match t.spec() {
        TwistSpec::Canonical { theta } => {
            let mut terms = Vec::new();
            for rho in 0..4 {
                for tau in 0..4 {
                    if theta[rho][tau].is_zero() {
                        continue;
                    }
                    let br = pair(&frame.momentum(rho)?, &frame.momentum(tau)?)?;
                    terms.push(&theta[rho][tau] * br);
                }
            }
            -(Expr::i() / Expr::int(2)) * Expr::sum(terms)
        }
        TwistSpec::LieAlgebraic {
            kappa_inv,
            zeta,
            alpha,
            beta,
        } => {
            let m = frame.lorentz(*alpha, *beta)?;
            let mut terms = Vec::new();
            for (lambda, z) in zeta.iter().enumerate() {
                if z.is_zero() {
                    continue;
                }
                let low = Expr::int(Chart::eta(lambda)) * z;
                terms.push(low * pair(&frame.momentum(lambda)?, &m)?);
            }
            -(Expr::i() * kappa_inv) * Expr::sum(terms)
        }
        TwistSpec::Quadratic { xi, indices } => {
            let [a, b, c, d] = *indices;
            -(Expr::i() * xi) * pair(&frame.lorentz(a, b)?, &frame.lorentz(c, d)?)?
        }
    };
    Ok(value.simplify())
}

/// Hand formula with the literal operator `A_ab = g_a F_b - g_b F_a` (no metric signs),
/// where `g` are the forward coordinate functions on Rindler and the coordinates on Minkowski.
pub fn literal_plane_operator(frame: &Frame, a: usize, b: usize) -> Result<DiffOp, TwistError> {
    let g = |k: usize| -> Expr {
        match frame {
            Frame::Minkowski => x(k),
            Frame::Rindler(map) => map.to_rindler(&x(k)),
        }
    };
    let fa = frame.momentum(a)?;
    let fb = frame.momentum(b)?;
    Ok(fb.scale(&g(a)).sub(&fa.scale(&g(b)))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equality_probe, parse};
    use crate::rindler::RindlerMap;

    fn sym(s: &str) -> Expr {
        Expr::sym(s)
    }

    fn theta_syms() -> TwistSpec {
        TwistSpec::canonical_upper(["t01", "t02", "t03", "t12", "t13", "t23"].map(sym)).unwrap()
    }

    #[test]
    fn canonical_minkowski_table() {
        let t = LinearTwist::minkowski(&theta_syms()).unwrap();
        let table = build_table(&t).unwrap();
        for (mu, nu) in PAIRS {
            let expected = (Expr::i() * sym(&format!("t{mu}{nu}"))).simplify();
            assert_eq!(table.get(mu, nu), expected);
            assert_eq!(table.get(nu, mu), (-expected).simplify());
        }
        assert_eq!(table.get(2, 2), Expr::zero());
        let report = verify_minkowski_relations(&t, &Probe::default()).unwrap();
        assert!(report.passed);
    }

    #[test]
    fn canonical_rindler_examples() {
        let spec = TwistSpec::canonical_upper(
            [Expr::zero(), sym("t02"), Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()],
        )
        .unwrap();
        let t = LinearTwist::rindler(&spec, &RindlerMap::standard()).unwrap();
        let c = commutator(&sym("z0"), &sym("z2"), &t).unwrap();
        assert_eq!(c, parse("i*t02*cosh(a*z0)/(a*z1)").unwrap());
        assert_eq!(commutator(&sym("z2"), &sym("z2"), &t).unwrap(), Expr::zero());
        let spec = TwistSpec::canonical_upper(
            [Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero(), sym("t23")],
        )
        .unwrap();
        let t = LinearTwist::rindler(&spec, &RindlerMap::standard()).unwrap();
        assert_eq!(commutator(&sym("z2"), &sym("z3"), &t).unwrap(), parse("i*t23").unwrap());
    }

    #[test]
    fn star_unit_and_zero_twist() {
        let t = LinearTwist::minkowski(&theta_syms()).unwrap();
        let g = parse("x0*x1^2 + x3").unwrap();
        assert_eq!(star(&Expr::one(), &g, &t).unwrap(), g);
        assert_eq!(star(&g, &Expr::one(), &t).unwrap(), g);
        let zero = LinearTwist::minkowski(&theta_syms().classical_limit()).unwrap();
        let f = parse("x2*x3").unwrap();
        assert_eq!(star(&f, &g, &zero).unwrap(), (&f * &g).simplify());
    }

    #[test]
    fn lie_example_pattern() {
        let zeta = [Expr::zero(), Expr::zero(), Expr::one(), Expr::zero()];
        let spec = TwistSpec::lie(sym("k"), zeta, 0, 1).unwrap();
        let t = LinearTwist::minkowski(&spec).unwrap();
        let table = build_table(&t).unwrap();
        // zeta_2 = 1: [x2, x0] = (i k) x1, [x2, x1] = (i k) x0
        assert_eq!(table.get(2, 0), parse("i*k*x1").unwrap());
        assert_eq!(table.get(2, 1), parse("i*k*x0").unwrap());
        assert_eq!(table.get(0, 1), Expr::zero());
        assert_eq!(table.get(2, 3), Expr::zero());
        assert!(verify_minkowski_relations(&t, &Probe::default()).unwrap().passed);
    }

    #[test]
    fn quadratic_example_pattern() {
        let spec = TwistSpec::quadratic(sym("xi"), [0, 1, 2, 3]).unwrap();
        let t = LinearTwist::minkowski(&spec).unwrap();
        let table = build_table(&t).unwrap();
        assert_eq!(table.get(0, 2), parse("-i*xi*x1*x3").unwrap());
        for (mu, nu) in PAIRS {
            assert_eq!(table.get(mu, nu), quadratic_closed_form(&sym("xi"), &[0, 1, 2, 3], mu, nu));
        }
        let report = verify_minkowski_relations(&t, &Probe::default()).unwrap();
        assert!(report.passed, "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn report_pinpoints_failures() {
        let spec = TwistSpec::quadratic(sym("xi"), [0, 1, 2, 3]).unwrap();
        let (lhs, rhs) = quadratic_relation_sides(&spec, 0, 2).unwrap();
        let bad = check_entry(0, 2, &lhs, &(rhs + sym("x0")), &Probe::default());
        assert!(!bad.structural && !bad.numeric);
        assert_eq!(bad.residual, "-x0");
    }

    #[test]
    fn verify_rejects_rindler_twists() {
        let t = LinearTwist::rindler(&theta_syms(), &RindlerMap::standard()).unwrap();
        assert!(verify_minkowski_relations(&t, &Probe::default()).is_err());
    }

    #[test]
    fn rindler_coordinate_functions_reproduce_minkowski() {
        // The Rindler star commutator of x_mu(z) equals the Minkowski entry
        // written in Rindler coordinates, for every twist.
        let map = RindlerMap::standard();
        let specs = [
            theta_syms(),
            TwistSpec::lie(sym("k"), [Expr::zero(), Expr::zero(), sym("w2"), sym("w3")], 0, 1).unwrap(),
            TwistSpec::lie(sym("k"), [sym("w0"), Expr::zero(), Expr::zero(), sym("w3")], 1, 2).unwrap(),
            TwistSpec::quadratic(sym("xi"), [0, 2, 1, 3]).unwrap(),
        ];
        for spec in &specs {
            let tm = LinearTwist::minkowski(spec).unwrap();
            let tr = LinearTwist::rindler(spec, &map).unwrap();
            let table = build_table(&tm).unwrap();
            for (mu, nu) in PAIRS {
                let gm = map.to_rindler(&x(mu));
                let gn = map.to_rindler(&x(nu));
                let lhs = commutator(&gm, &gn, &tr).unwrap();
                let rhs = map.to_rindler(&table.get(mu, nu));
                assert!(equality_probe(&lhs, &rhs, 20, 1e-10), "{:?} ({mu},{nu}): {lhs} vs {rhs}", spec.kind());
            }
        }
    }

    #[test]
    fn hand_formula_matches_engine() {
        let map = RindlerMap::standard();
        let specs = [
            theta_syms(),
            TwistSpec::lie(sym("k"), [Expr::zero(), sym("w1"), Expr::zero(), sym("w3")], 0, 2).unwrap(),
            TwistSpec::quadratic(sym("xi"), [1, 3, 0, 2]).unwrap(),
        ];
        for spec in &specs {
            for frame in [Frame::Minkowski, Frame::Rindler(map.clone())] {
                let t = LinearTwist::new(spec, &frame).unwrap();
                let table = build_table(&t).unwrap();
                for (mu, nu) in PAIRS {
                    assert_eq!(table.get(mu, nu), hand_commutator(&t, mu, nu).unwrap());
                }
            }
        }
    }

    #[test]
    fn literal_plane_operator_agrees_on_spatial_planes() {
        let map = RindlerMap::standard();
        for frame in [Frame::Minkowski, Frame::Rindler(map)] {
            for (a, b) in [(1, 2), (1, 3), (2, 3)] {
                assert_eq!(literal_plane_operator(&frame, a, b).unwrap(), frame.lorentz(a, b).unwrap());
            }
            let lit = literal_plane_operator(&frame, 0, 1).unwrap();
            assert_ne!(lit, frame.lorentz(0, 1).unwrap());
        }
    }

    #[test]
    fn leibniz_at_linear_order() {
        let spec = TwistSpec::lie(sym("k"), [Expr::zero(), Expr::zero(), sym("w"), Expr::zero()], 0, 1).unwrap();
        for t in [
            LinearTwist::minkowski(&theta_syms()).unwrap(),
            LinearTwist::minkowski(&spec).unwrap(),
            LinearTwist::minkowski(&TwistSpec::quadratic(sym("xi"), [0, 1, 2, 3]).unwrap()).unwrap(),
        ] {
            for (f, g, h) in [("x0", "x1", "x2"), ("x2", "x3", "x0"), ("x1", "x1", "x3")] {
                let (f, g, h) = (sym(f), sym(g), sym(h));
                let lhs = commutator(&(&f * &g), &h, &t).unwrap();
                let rhs = &f * commutator(&g, &h, &t).unwrap() + commutator(&f, &h, &t).unwrap() * &g;
                assert_eq!(lhs, rhs.simplify());
            }
        }
    }

    #[test]
    fn table_exports() {
        let spec = TwistSpec::canonical_upper(["1/10", "0", "0", "0", "0", "-2"].map(|s| parse(s).unwrap())).unwrap();
        let table = build_table(&LinearTwist::minkowski(&spec).unwrap()).unwrap();
        let text = table.to_text();
        assert!(text.contains("[x0, x1] = i/10"), "{text}");
        assert!(text.contains("[x2, x3] = -2*i"), "{text}");
        let j = table.to_json();
        assert_eq!(j["entries"][0]["value"], "i/10");
        assert_eq!(j["twist"]["theta23"], "-2");
        assert_eq!(j["chart"], "minkowski");
    }
}
