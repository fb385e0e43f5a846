//! Invariant suites behind the `verify` command.
//!
//! Every suite returns named checks with the measured quantity and the
//! tolerance it was held to. Random inputs come from a ChaCha stream seeded
//! by the run seed, so a report is a pure function of config and seed.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::config::{RunConfig, Tolerances};
use crate::diffop::{pullback, wedge, Chart, DiffOp};
use crate::expr::{parse, Bindings, Expr, Probe, Symbol};
use crate::rindler::RindlerMap;
use crate::spectrum::{
    self, compute_spectrum, deformation_bracket, deformed_f_theta, f_closed, f_quadrature, gamma, planck,
    relative_deviation, DeformationInput, ModeParams, QuadOptions,
};
use crate::starprod::{
    anticommutator, build_table, commutator, hand_commutator, lie_closed_form, verify_minkowski_relations,
};
use crate::twists::{Frame, LinearTwist, TwistSpec, PAIRS};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst residual seen, when the check is numeric.
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Check {
    fn exact(name: &str, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            passed,
            measured: None,
            tolerance: None,
            detail: detail.into(),
        }
    }

    fn numeric(name: &str, measured: f64, tol: f64, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            passed: measured <= tol,
            measured: Some(measured),
            tolerance: Some(tol),
            detail: detail.into(),
        }
    }

    fn error(name: &str, e: impl std::fmt::Display) -> Check {
        Check::exact(name, false, format!("error: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suite {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Suite {
    fn new(name: &str, checks: Vec<Check>) -> Suite {
        Suite {
            name: name.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub passed: bool,
    /// `suite.check` names of every failing check.
    pub failures: Vec<String>,
    pub suites: Vec<Suite>,
}

impl VerifyReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("seed {}\n", self.seed);
        for s in &self.suites {
            for c in &s.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                let num = match (c.measured, c.tolerance) {
                    (Some(m), Some(t)) => format!(" ({m:.3e} <= {t:.0e})"),
                    _ => String::new(),
                };
                out.push_str(&format!("{mark} {}.{}{num}", s.name, c.name));
                if !c.passed && !c.detail.is_empty() {
                    out.push_str(&format!(": {}", c.detail));
                }
                out.push('\n');
            }
        }
        out.push_str(if self.passed { "all invariants hold\n" } else { "FAILED\n" });
        out
    }
}

/// Run every suite with the config's tolerances, quadrature budget and seed.
pub fn run(config: &RunConfig) -> VerifyReport {
    let seed = config.seed();
    let tol = &config.tolerances;
    let quad = config.spectrum.quad_options();
    let suites = vec![
        expr_suite(seed, tol),
        diffop_suite(seed, tol),
        twist_suite(seed, tol),
        starprod_suite(seed, tol),
        spectrum_suite(tol, &quad),
        rindler_suite(seed, tol),
        output_suite(config),
    ];
    let failures = suites
        .iter()
        .flat_map(|s| {
            s.checks
                .iter()
                .filter(|c| !c.passed)
                .map(move |c| format!("{}.{}", s.name, c.name))
        })
        .collect::<Vec<_>>();
    VerifyReport {
        seed,
        tolerances: tol.clone(),
        passed: failures.is_empty(),
        failures,
        suites,
    }
}

/// Independent stream per suite so adding checks to one leaves the others unchanged.
fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn probe(seed: u64, tol: &Tolerances) -> Probe {
    Probe::default()
        .with_trials(tol.probe_trials)
        .with_tol(tol.probe)
        .with_seed(seed)
}

// ---------------------------------------------------------------- expressions

fn leaf(rng: &mut ChaCha8Rng) -> Expr {
    match rng.gen_range(0..7) {
        0 => Expr::sym("z0"),
        1 => Expr::sym("z1"),
        2 => Expr::sym("a"),
        3 => Expr::sym("w"),
        4 => Expr::int(rng.gen_range(-3..=3)),
        5 => Expr::rational(rng.gen_range(1..=4), rng.gen_range(2..=5)),
        _ => Expr::i(),
    }
}

/// Random tree of depth at most `depth` and at most `size` nodes over sums,
/// products, powers and the hyperbolic functions.
pub fn random_tree(rng: &mut ChaCha8Rng, depth: u32, size: usize) -> Expr {
    let mut budget = size;
    grow(rng, depth, &mut budget)
}

fn grow(rng: &mut ChaCha8Rng, depth: u32, budget: &mut usize) -> Expr {
    *budget = budget.saturating_sub(1);
    if depth == 0 || *budget == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    let mut sub = |rng: &mut ChaCha8Rng| grow(rng, depth - 1, budget);
    match rng.gen_range(0..7) {
        0 => {
            let n = rng.gen_range(2..=3);
            Expr::sum((0..n).map(|_| sub(rng)).collect::<Vec<_>>())
        }
        1 => {
            let n = rng.gen_range(2..=3);
            Expr::product((0..n).map(|_| sub(rng)).collect::<Vec<_>>())
        }
        2 => {
            let n = [-1, 2, 3][rng.gen_range(0..3)];
            sub(rng).pow(n)
        }
        3 => sub(rng).sinh(),
        4 => sub(rng).cosh(),
        5 => (sub(rng) * Expr::rational(1, 4)).exp(),
        _ => sub(rng).tanh(),
    }
}

const TREES: usize = 40;
const TREE_DEPTH: u32 = 6;
const TREE_SIZE: usize = 24;

fn expr_suite(seed: u64, tol: &Tolerances) -> Suite {
    let mut rng = rng_for(seed, 1);
    let z0 = Symbol::new("z0").expect("symbol");
    let trials = 100;
    let value_probe = Probe::default()
        .with_trials(trials)
        .with_tol(tol.simplify)
        .with_seed(seed);

    let mut worst_simplify: f64 = 0.0;
    let mut informative = 0;
    let mut idempotent = true;
    let mut round_trip = true;
    let mut linear_structural = true;
    let mut linear_numeric: f64 = 0.0;
    let mut product_structural = true;
    let mut product_numeric: f64 = 0.0;
    let mut first_failure = String::new();
    let mut note = |ok: bool, what: &str, e: &Expr| {
        if !ok && first_failure.is_empty() {
            first_failure = format!("{what}: {e}");
        }
    };

    for _ in 0..TREES {
        let f = random_tree(&mut rng, TREE_DEPTH, TREE_SIZE);
        let g = random_tree(&mut rng, TREE_DEPTH, TREE_SIZE);
        let k = Expr::int(rng.gen_range(-3..=3));
        let s = f.simplify();

        let out = value_probe.compare_precise(&f, &s);
        // Trees with no regular sample point carry no information.
        if out.trials_run == trials {
            informative += 1;
            worst_simplify = worst_simplify.max(out.max_residual);
        }
        let ok = s.simplify() == s;
        idempotent &= ok;
        note(ok, "simplify not idempotent", &f);
        let ok = parse(&s.to_string()).map(|b| b == s).unwrap_or(false);
        round_trip &= ok;
        note(ok, "print/parse mismatch", &f);

        let lhs = (&f + &k * &g).diff(&z0);
        let rhs = (f.diff(&z0) + &k * g.diff(&z0)).simplify();
        let ok = lhs == rhs;
        linear_structural &= ok;
        note(ok, "linearity", &f);
        let out = value_probe.clone().with_tol(f64::INFINITY).compare(&lhs, &rhs);
        linear_numeric = linear_numeric.max(out.max_residual);

        let lhs = (&f * &g).diff(&z0);
        let rhs = (f.diff(&z0) * &g + &f * g.diff(&z0)).simplify();
        let ok = lhs == rhs;
        product_structural &= ok;
        note(ok, "product rule", &f);
        let out = value_probe.clone().with_tol(f64::INFINITY).compare(&lhs, &rhs);
        product_numeric = product_numeric.max(out.max_residual);
    }

    let ident = parse("cosh(a*z0)^2 - sinh(a*z0)^2").expect("parses");
    let identity_ok = ident.simplify().is_one()
        && Probe::default().compare(&ident, &Expr::one()).equal
        && !Probe::default().compare(&Expr::sym("z0"), &Expr::sym("z1")).equal;
    let unbound = Expr::sym("z0").eval(&Bindings::new()).is_err();

    let mut checks = vec![
        Check::numeric(
            "simplify_preserves_value",
            worst_simplify,
            tol.simplify,
            format!("{informative}/{TREES} trees sampled at {trials} points"),
        ),
        Check::exact("simplify_idempotent", idempotent, first_failure.clone()),
        Check::exact("print_parse_round_trip", round_trip, first_failure.clone()),
        Check::exact("derivative_linear_structural", linear_structural, first_failure.clone()),
        Check::numeric("derivative_linear_numeric", linear_numeric, tol.probe, ""),
        Check::exact("product_rule_structural", product_structural, first_failure.clone()),
        Check::numeric("product_rule_numeric", product_numeric, tol.probe, ""),
        Check::exact(
            "canonical_form_identities",
            identity_ok,
            "cosh^2 - sinh^2 reduces to 1; distinct symbols differ",
        ),
        Check::exact("unbound_symbol_is_error", unbound, ""),
    ];
    checks.push(canonical_soundness(&mut rng, tol));
    Suite::new("expr_core", checks)
}

/// Structurally equal canonical forms must agree numerically.
fn canonical_soundness(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Check {
    let atoms = ["z0", "z1", "sinh(a*z0)", "cosh(a*z0)", "exp(-a*z0)"];
    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for _ in 0..TREES {
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..=4) {
            let c = Expr::int(rng.gen_range(-3..=3));
            let m: Vec<Expr> = (0..rng.gen_range(1..=3))
                .map(|_| parse(atoms[rng.gen_range(0..atoms.len())]).expect("atom"))
                .collect();
            terms.push(c * Expr::product(m));
        }
        let e = Expr::sum(terms);
        // Same polynomial, written with cosh^2 expanded and the terms reversed.
        let rewritten = parse(&e.to_string().replace("cosh(a*z0)^2", "(1 + sinh(a*z0)^2)"))
            .expect("re-parses");
        if rewritten.simplify() == e.simplify() {
            matched += 1;
            let out = Probe::default()
                .with_tol(f64::INFINITY)
                .compare(&rewritten, &e);
            worst = worst.max(out.max_residual);
        }
    }
    let mut c = Check::numeric(
        "canonical_form_sound",
        worst,
        tol.probe,
        format!("{matched}/{TREES} rewritten forms matched structurally"),
    );
    c.passed &= matched == TREES;
    c
}

// ------------------------------------------------------------ operators

fn coordinate_polynomial(rng: &mut ChaCha8Rng, chart: &Chart) -> Expr {
    let mut atoms: Vec<Expr> = chart.coords().iter().map(Expr::symbol).collect();
    if let Some(a) = chart.accel() {
        let az0 = Expr::symbol(a) * chart.coord_expr(0);
        atoms.push(az0.clone().sinh());
        atoms.push(az0.clone().cosh());
        atoms.push((-az0).exp());
    }
    let mut terms = vec![Expr::int(rng.gen_range(-2..=2))];
    for _ in 0..rng.gen_range(1..=3) {
        let c = Expr::int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
        let m: Vec<Expr> = (0..rng.gen_range(1..=2))
            .map(|_| atoms[rng.gen_range(0..atoms.len())].clone())
            .collect();
        terms.push(c * Expr::product(m));
    }
    Expr::sum(terms).simplify()
}

fn generators(chart: &Chart, map: Option<&RindlerMap>) -> Vec<(String, DiffOp)> {
    let mut out = Vec::new();
    let frame = match map {
        Some(m) => Frame::Rindler(m.clone()),
        None => Frame::Minkowski,
    };
    for mu in 0..4 {
        out.push((format!("P{mu}"), frame.momentum(mu).expect("generator")));
    }
    for (a, b) in PAIRS {
        out.push((format!("M{a}{b}"), frame.lorentz(a, b).expect("generator")));
    }
    debug_assert!(out.iter().all(|(_, d)| d.chart() == chart));
    out
}

fn diffop_suite(seed: u64, tol: &Tolerances) -> Suite {
    let mut rng = rng_for(seed, 2);
    let mink = Chart::minkowski();
    let map = RindlerMap::standard();
    let gens = generators(&mink, None);
    let probe = probe(seed, tol);

    // apply is linear in the operator and in the function
    let mut linear = true;
    let mut linear_detail = String::new();
    for _ in 0..10 {
        let (na, da) = &gens[rng.gen_range(0..gens.len())];
        let (nb, db) = &gens[rng.gen_range(0..gens.len())];
        let k = Expr::int(rng.gen_range(-3..=3));
        let f = coordinate_polynomial(&mut rng, &mink);
        let g = coordinate_polynomial(&mut rng, &mink);
        let sum_op = da.add(&db.scale(&k)).expect("same chart");
        let op_side = (sum_op.apply(&f).expect("applies")
            - da.apply(&f).expect("applies")
            - &k * db.apply(&f).expect("applies"))
        .simplify();
        let fn_side = (da.apply(&(&f + &k * &g)).expect("applies")
            - da.apply(&f).expect("applies")
            - &k * da.apply(&g).expect("applies"))
        .simplify();
        if !(op_side.is_zero() && fn_side.is_zero()) {
            linear = false;
            linear_detail = format!("{na} + {k}*{nb} on {f}");
        }
    }

    // chain rule through the Rindler map
    let mut chain_worst: f64 = 0.0;
    let mut chain_structural = true;
    let mut chain_detail = String::new();
    for (name, d) in &gens {
        let pulled = match pullback(d, &map) {
            Ok(p) => p,
            Err(e) => return Suite::new("diffop", vec![Check::error("chain_rule", e)]),
        };
        for _ in 0..3 {
            let f = coordinate_polynomial(&mut rng, &mink);
            let lhs = pulled.apply(&map.to_rindler(&f)).expect("applies");
            let rhs = map.to_rindler(&d.apply(&f).expect("applies"));
            if (&lhs - &rhs).simplify().is_zero() {
                let out = probe.compare(&lhs, &rhs);
                chain_worst = chain_worst.max(out.max_residual);
            } else {
                chain_structural = false;
                chain_detail = format!("{name} on {f}");
            }
        }
    }
    let boost = pullback(&gens[4].1, &map).expect("pulls back");
    let expected_boost = DiffOp::partial(&map.chart(), 0)
        .expect("index")
        .scale(&parse("i/a").expect("parses"));
    let boost_ok = boost == expected_boost;

    // wedge: antisymmetric and bilinear
    let mut wedge_ok = true;
    for _ in 0..10 {
        let a = &gens[rng.gen_range(0..gens.len())].1;
        let b = &gens[rng.gen_range(0..gens.len())].1;
        let c = &gens[rng.gen_range(0..gens.len())].1;
        let k = Expr::int(rng.gen_range(-3..=3));
        let ab = wedge(a, b).expect("wedge");
        let ba = wedge(b, a).expect("wedge");
        wedge_ok &= ab.add(&ba).expect("same chart").is_zero();
        let lhs = wedge(&a.add(&c.scale(&k)).expect("same chart"), b).expect("wedge");
        let rhs = ab
            .add(&wedge(c, b).expect("wedge").scale(&k).expect("scalar"))
            .expect("same chart");
        wedge_ok &= lhs.expanded() == rhs.expanded();
    }

    let chain_check = {
        let mut c = Check::numeric("chain_rule", chain_worst, tol.probe, chain_detail);
        c.passed &= chain_structural;
        c
    };
    Suite::new(
        "diffop",
        vec![
            Check::exact("apply_linear", linear, linear_detail),
            chain_check,
            Check::exact("boost_is_time_translation", boost_ok, format!("pullback(M01) = {boost}")),
            Check::exact("wedge_bilinear_antisymmetric", wedge_ok, ""),
        ],
    )
}

// ---------------------------------------------------------------- twists

fn symbolic_specs() -> Vec<TwistSpec> {
    let p = |s: &str| parse(s).expect("parses");
    vec![
        TwistSpec::canonical_upper(["t01", "t02", "t03", "t12", "t13", "t23"].map(p)).expect("valid"),
        TwistSpec::lie(p("k"), [Expr::zero(), Expr::zero(), p("zeta2"), p("zeta3")], 0, 1).expect("valid"),
        TwistSpec::lie(p("k"), [p("zeta0"), p("zeta1"), Expr::zero(), Expr::zero()], 2, 3).expect("valid"),
        TwistSpec::quadratic(p("xi"), [0, 1, 2, 3]).expect("valid"),
    ]
}

fn frames() -> [Frame; 2] {
    [Frame::Minkowski, Frame::Rindler(RindlerMap::standard())]
}

fn twist_suite(seed: u64, _tol: &Tolerances) -> Suite {
    let mut rng = rng_for(seed, 3);
    let map = RindlerMap::standard();
    let s = Expr::sym("s_scale");
    let mut constants = true;
    let mut consistent = true;
    let mut linear = true;
    let mut detail = String::new();
    for spec in symbolic_specs() {
        for frame in frames() {
            let t = match LinearTwist::new(&spec, &frame) {
                Ok(t) => t,
                Err(e) => return Suite::new("twists", vec![Check::error("construction", e)]),
            };
            let chart = t.chart();
            let f = coordinate_polynomial(&mut rng, &chart);
            let g = coordinate_polynomial(&mut rng, &chart);
            let one = Expr::one();
            let ok = t.op().apply(&one, &g).map(|v| v.is_zero()).unwrap_or(false)
                && t.op().apply(&f, &one).map(|v| v.is_zero()).unwrap_or(false);
            constants &= ok;
            let scaled = LinearTwist::new(&spec.scaled(&s), &frame).expect("scaled twist");
            let lhs = scaled.op().apply(&f, &g).expect("applies");
            let rhs = (&s * t.op().apply(&f, &g).expect("applies")).simplify();
            let ok2 = lhs == rhs;
            linear &= ok2;
            if !(ok && ok2) && detail.is_empty() {
                detail = format!("{} twist on {}", spec.kind(), chart);
            }
        }
        let direct = LinearTwist::rindler(&spec, &map).expect("rindler twist");
        let pulled = LinearTwist::minkowski(&spec)
            .and_then(|m| m.pullback(&map))
            .expect("pullback");
        let ok = direct.op().expanded() == pulled.op().expanded();
        consistent &= ok;
        if !ok && detail.is_empty() {
            detail = format!("{} twist: pullback differs", spec.kind());
        }
    }
    Suite::new(
        "twists",
        vec![
            Check::exact("constants_annihilated", constants, detail.clone()),
            Check::exact("chart_consistency", consistent, detail.clone()),
            Check::exact("parameter_linearity", linear, detail),
        ],
    )
}

// ------------------------------------------------------------ star products

fn random_rational(rng: &mut ChaCha8Rng) -> Expr {
    let n = rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
    Expr::rational(n, rng.gen_range(1..=7))
}

fn starprod_suite(seed: u64, tol: &Tolerances) -> Suite {
    let mut rng = rng_for(seed, 4);
    let probe = probe(seed, tol);
    let map = RindlerMap::standard();
    let mut checks = Vec::new();

    let mut antisym = true;
    let mut leibniz = true;
    let mut limit = true;
    let mut detail = String::new();
    for spec in symbolic_specs() {
        for frame in frames() {
            let t = LinearTwist::new(&spec, &frame).expect("twist");
            let chart = t.chart();
            let f = coordinate_polynomial(&mut rng, &chart);
            let g = coordinate_polynomial(&mut rng, &chart);
            let fg = commutator(&f, &g, &t).expect("commutator");
            let gf = commutator(&g, &f, &t).expect("commutator");
            let ok = (&fg + &gf).simplify().is_zero();
            antisym &= ok;

            let c = |m: usize| chart.coord_expr(m);
            let (p, q, r) = (rng.gen_range(0..4), rng.gen_range(0..4), rng.gen_range(0..4));
            let lhs = commutator(&(c(p) * c(q)), &c(r), &t).expect("commutator");
            let rhs = &c(p) * commutator(&c(q), &c(r), &t).expect("commutator")
                + commutator(&c(p), &c(r), &t).expect("commutator") * &c(q);
            let ok2 = (lhs - rhs).simplify().is_zero();
            leibniz &= ok2;

            let classical = LinearTwist::new(&spec.classical_limit(), &frame).expect("twist");
            let ok3 = build_table(&classical).map(|tb| tb.is_zero()).unwrap_or(false);
            limit &= ok3;
            if !(ok && ok2 && ok3) && detail.is_empty() {
                detail = format!("{} twist on {chart}", spec.kind());
            }
        }
    }
    checks.push(Check::exact("antisymmetry", antisym, detail.clone()));
    checks.push(Check::exact("leibniz_linear_order", leibniz, detail.clone()));
    checks.push(Check::exact("classical_limit", limit, detail));

    // Rindler tables against the Minkowski tables through the coordinate map,
    // and against the hand-applied generator formula.
    let mut worst: f64 = 0.0;
    let mut structural = true;
    let mut hand = true;
    let mut rdetail = String::new();
    let zs: [Expr; 4] = std::array::from_fn(|m| map.chart().coord_expr(m));
    let xs = map.forward(&zs);
    for spec in symbolic_specs() {
        let mt = LinearTwist::minkowski(&spec).and_then(|m| build_table(&m).map_err(Into::into));
        let rt = LinearTwist::rindler(&spec, &map).expect("twist");
        let rtable = build_table(&rt);
        let (Ok(mtable), Ok(rtable)) = (mt, rtable) else {
            structural = false;
            continue;
        };
        for (mu, nu) in PAIRS {
            let lhs = commutator(&xs[mu], &xs[nu], &rt).expect("commutator");
            let rhs = map.to_rindler(&mtable.get(mu, nu));
            if (&lhs - &rhs).simplify().is_zero() {
                worst = worst.max(probe.compare(&lhs, &rhs).max_residual);
            } else {
                structural = false;
                rdetail = format!("{} twist ({mu},{nu})", spec.kind());
            }
            let by_hand = hand_commutator(&rt, mu, nu).map(|h| (h - rtable.get(mu, nu)).simplify().is_zero());
            hand &= by_hand.unwrap_or(false);
        }
    }
    let mut c = Check::numeric("rindler_minkowski_consistency", worst, tol.probe, rdetail);
    c.passed &= structural;
    checks.push(c);
    checks.push(Check::exact("rindler_hand_formula", hand, ""));

    let canonical = TwistSpec::canonical_upper(["t01", "t02", "t03", "t12", "t13", "t23"].map(Expr::sym))
        .expect("valid");
    let transverse = LinearTwist::rindler(&canonical, &map)
        .and_then(|t| build_table(&t).map_err(Into::into))
        .map(|tb| tb.get(2, 3) == parse("i*t23").expect("parses"))
        .unwrap_or(false);
    checks.push(Check::exact("rindler_transverse_constant", transverse, "[z2, z3] = i*t23"));

    checks.push(canonical_relations(&mut rng, &probe));
    checks.push(lie_relations(&mut rng, &probe));
    checks.push(quadratic_relations(&probe));
    Suite::new("starprod", checks)
}

fn relation_check(name: &str, reports: Vec<Result<crate::starprod::RelationReport, String>>) -> Check {
    let mut worst: f64 = 0.0;
    let mut passed = true;
    let mut detail = String::new();
    for r in &reports {
        match r {
            Ok(rep) => {
                for e in &rep.entries {
                    worst = worst.max(e.max_residual);
                }
                if !rep.passed {
                    passed = false;
                    if let Some(e) = rep.failures().next() {
                        detail = format!("entry ({},{}): residual {}", e.mu, e.nu, e.residual);
                    }
                }
            }
            Err(e) => {
                passed = false;
                detail = e.clone();
            }
        }
    }
    Check {
        name: name.into(),
        passed,
        measured: Some(worst),
        tolerance: None,
        detail: if passed {
            format!("{} twists, structural and numeric", reports.len())
        } else {
            detail
        },
    }
}

fn canonical_relations(rng: &mut ChaCha8Rng, probe: &Probe) -> Check {
    let reports = (0..20)
        .map(|_| {
            let upper: [Expr; 6] = std::array::from_fn(|_| random_rational(rng));
            let spec = TwistSpec::canonical_upper(upper).map_err(|e| e.to_string())?;
            let t = LinearTwist::minkowski(&spec).map_err(|e| e.to_string())?;
            verify_minkowski_relations(&t, probe).map_err(|e| e.to_string())
        })
        .collect();
    relation_check("canonical_relations", reports)
}

fn lie_relations(rng: &mut ChaCha8Rng, probe: &Probe) -> Check {
    let mut reports = Vec::new();
    for (alpha, beta) in PAIRS {
        let zeta: [Expr; 4] = std::array::from_fn(|l| {
            if l == alpha || l == beta {
                Expr::zero()
            } else {
                random_rational(rng)
            }
        });
        let run = || {
            let spec = TwistSpec::lie(Expr::sym("k"), zeta.clone(), alpha, beta).map_err(|e| e.to_string())?;
            let t = LinearTwist::minkowski(&spec).map_err(|e| e.to_string())?;
            let rep = verify_minkowski_relations(&t, probe).map_err(|e| e.to_string())?;
            // The reference formula is evaluated independently of the report.
            let table = build_table(&t).map_err(|e| e.to_string())?;
            for (mu, nu) in PAIRS {
                let cf = lie_closed_form(&Expr::sym("k"), &zeta, alpha, beta, mu, nu);
                if (table.get(mu, nu) - cf).simplify() != Expr::zero() {
                    return Err(format!("({alpha},{beta}) entry ({mu},{nu}) differs"));
                }
            }
            Ok(rep)
        };
        reports.push(run());
    }
    relation_check("lie_relations", reports)
}

fn quadratic_relations(probe: &Probe) -> Check {
    let reports = [[0, 1, 2, 3], [0, 2, 1, 3], [1, 3, 0, 2]]
        .into_iter()
        .map(|idx| {
            let spec = TwistSpec::quadratic(Expr::sym("xi"), idx).map_err(|e| e.to_string())?;
            let t = LinearTwist::minkowski(&spec).map_err(|e| e.to_string())?;
            // anticommutators of coordinates are 2 x_p x_q at zeroth order
            let two_x0x1 = anticommutator(&Expr::sym("x0"), &Expr::sym("x1"), &t).map_err(|e| e.to_string())?;
            if !(two_x0x1 - parse("2*x0*x1").expect("parses")).simplify().is_zero() {
                return Err("anticommutator is not 2 x0 x1".into());
            }
            verify_minkowski_relations(&t, probe).map_err(|e| e.to_string())
        })
        .collect();
    relation_check("quadratic_relations", reports)
}

// ---------------------------------------------------------------- spectrum

/// `n` points spaced evenly in `ln x` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (l0 + (l1 - l0) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn spectrum_suite(tol: &Tolerances, quad: &QuadOptions) -> Suite {
    let a = 2.0 * PI;
    let grid = log_grid(0.1, 5.0, 20);
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    for &y in &grid {
        match gamma::complex_gamma(Complex64::new(0.0, y)) {
            Ok(g) => {
                let ex = gamma::gamma_imaginary_modulus_sq(y);
                worst = worst.max((g.norm_sqr() - ex).abs() / ex);
            }
            Err(e) => return Suite::new("spectrum", vec![Check::error("gamma_modulus_identity", e)]),
        }
    }
    checks.push(Check::numeric("gamma_modulus_identity", worst, tol.gamma, "20-point log grid, omega/a in [0.1, 5]"));

    let mut worst: f64 = 0.0;
    let mut positive = true;
    for w_hat in [0.5, 1.0, 3.0] {
        for &nu in &grid {
            let m = ModeParams::new(w_hat, 1.0, a, nu * a).expect("valid");
            let p = spectrum::power_spectrum(&m).expect("omega > 0");
            positive &= p.from_amplitude >= 0.0;
            worst = worst.max((p.from_amplitude - p.planck).abs() / p.planck);
        }
    }
    let mut c = Check::numeric("planck_equivalence", worst, tol.planck, "omega_hat z in {0.5, 1, 3}");
    c.passed &= positive;
    checks.push(c);

    let t_ok = (spectrum::hawking_temperature(a) - 1.0).abs() < 1e-15
        && (spectrum::hawking_temperature(2.0 * a) - 2.0).abs() < 1e-15
        && (planck(a, 1.0) - 1.0 / 1f64.exp_m1()).abs() < 1e-15;
    checks.push(Check::exact("temperature", t_ok, "T = a / 2 pi"));

    let mut worst: f64 = 0.0;
    let mut failure = String::new();
    for nu in [0.5, 1.0, 2.0] {
        let m = ModeParams::new(1.0, 1.0, a, nu * a).expect("valid");
        let closed = f_closed(&m).expect("no pole");
        match f_quadrature(&m, quad) {
            Ok(q) => worst = worst.max(rel(q.value, closed)),
            Err(e) => {
                worst = f64::INFINITY;
                failure = format!("omega/a = {nu}: {e}");
            }
        }
    }
    checks.push(Check::numeric(
        "oracle_agreement",
        worst,
        tol.quadrature,
        if failure.is_empty() { "omega/a in {0.5, 1, 2}".into() } else { failure },
    ));

    checks.extend(deformed_checks(tol, quad));
    Suite::new("spectrum", checks)
}

fn deformed_checks(tol: &Tolerances, quad: &QuadOptions) -> Vec<Check> {
    let a = 2.0 * PI;
    let z = 1.0;
    let h = 1e-4;
    let mut closed_worst: f64 = 0.0;
    let mut fd_worst: f64 = 0.0;
    let mut slope_worst: f64 = 0.0;
    for omega in [0.5, 1.0, 2.0] {
        let m = ModeParams::new(1.0, z, a, omega).expect("valid");
        let base = planck(a, omega);
        let power = |th: f64| {
            let d = DeformationInput { theta01: th };
            let f = deformed_f_theta(&m.with_omega(-omega), &d).expect("no pole");
            omega * f.norm_sqr()
        };
        for theta01 in [1e-4, -1e-4] {
            let d = DeformationInput { theta01 };
            let expected = relative_deviation(&m, &d);
            let dp = spectrum::deformed_power(&m, &d).expect("omega > 0");
            let closed = dp.closed_form / base - 1.0;
            closed_worst = closed_worst.max((closed - expected).abs() / expected.abs());
            // theta-derivative at zero, scaled back to theta01
            let slope = (power(h) - power(-h)) / (2.0 * h);
            let fd = slope * theta01 / base;
            fd_worst = fd_worst.max((fd - expected).abs() / expected.abs());
        }
        let closed_slope = -2.0 * omega / (PI * spectrum::hawking_temperature(a) * z * z) * base;
        let fd_slope = (power(h) - power(-h)) / (2.0 * h);
        slope_worst = slope_worst.max((fd_slope - closed_slope).abs() / closed_slope.abs());
    }

    // intermediate route: two shifted integrals by quadrature against the bracket
    let m = ModeParams::new(1.0, z, a, -1.0).expect("valid");
    let d = DeformationInput { theta01: 1e-4 };
    let route = spectrum::correction_by_quadrature(&m, &d, quad).map(|(v, _)| {
        let expected = deformation_bracket(&m, &d) * f_closed(&m).expect("no pole");
        rel(v, expected)
    });
    let route_check = match route {
        Ok(r) => Check::numeric("correction_integrals", r, tol.quadrature, "shifted integrals vs closed bracket"),
        Err(e) => Check::error("correction_integrals", e),
    };
    let factor = match spectrum::twist_correction_coefficients() {
        Ok(c) => {
            let (r1, r2) = c.ratios();
            let ok = r1 == r2 && r1.as_number().is_some();
            Check::exact(
                "correction_normalization",
                ok,
                format!("source coefficients / engine coefficients = {r1}, {r2}"),
            )
        }
        Err(e) => Check::error("correction_normalization", e),
    };

    vec![
        Check::numeric("deformed_closed_form", closed_worst, tol.deformed_closed, "theta01 = +-1e-4, a = 2 pi, z = 1"),
        Check::numeric("deformed_finite_difference", fd_worst, tol.deformed_fd, "central difference, h = 1e-4"),
        Check::numeric("deformed_slope", slope_worst, tol.deformed_closed, "d/dtheta at 0"),
        route_check,
        factor,
    ]
}

// ---------------------------------------------------------------- geometry

fn rindler_suite(seed: u64, tol: &Tolerances) -> Suite {
    let mut rng = rng_for(seed, 6);
    let map = RindlerMap::standard();
    let mut worst: f64 = 0.0;
    let mut failure = String::new();
    for _ in 0..100 {
        let a = rng.gen_range(0.1..3.0);
        let zs = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        ];
        let b = Bindings::new().with("a", a);
        let back = map
            .forward_numeric(zs, &b)
            .and_then(|xs| map.inverse_numeric(xs, &b));
        match back {
            Ok(back) => {
                for k in 0..4 {
                    worst = worst.max((back[k] - zs[k]).abs() / (1.0 + zs[k].abs()));
                }
            }
            Err(e) => failure = e.to_string(),
        }
    }
    let mut round = Check::numeric("round_trip", worst, tol.geometry, failure.clone());
    round.passed &= failure.is_empty();

    let g = map.metric_tensor();
    let diag = map.metric_pullback();
    let mut structural = true;
    let mut numeric: f64 = 0.0;
    let probe = probe(seed, tol);
    for mu in 0..4 {
        for nu in 0..4 {
            let expected = if mu == nu { diag[mu].clone() } else { Expr::zero() };
            structural &= (&g[mu][nu] - &expected).simplify().is_zero();
            numeric = numeric.max(probe.compare(&g[mu][nu], &expected).max_residual);
        }
    }
    let mut pull = Check::numeric(
        "metric_pullback",
        numeric,
        tol.geometry,
        format!(
            "g00 computed {}, printed {}",
            diag[0],
            map.printed_metric()[0]
        ),
    );
    pull.passed &= structural;

    let zs: [Expr; 4] = std::array::from_fn(|m| map.chart().coord_expr(m));
    let xs = map.forward(&zs);
    let hyper = (&xs[1] * &xs[1] - &xs[0] * &xs[0] - map.lapse() * map.lapse()).simplify().is_zero();
    let transverse = xs[2] == zs[2] && xs[3] == zs[3];
    Suite::new(
        "rindler",
        vec![
            round,
            pull,
            Check::exact("hyperbola", hyper && transverse, "x1^2 - x0^2 = N^2, transverse passthrough"),
        ],
    )
}

// ---------------------------------------------------------------- outputs

/// Table and spectrum exports are pure functions of their inputs.
fn output_suite(config: &RunConfig) -> Suite {
    let table_json = || -> Result<String, String> {
        let (spec, frame) = config.twist.resolve().map_err(|e| e.to_string())?;
        let t = LinearTwist::new(&spec, &frame).map_err(|e| e.to_string())?;
        let table = build_table(&t).map_err(|e| e.to_string())?;
        Ok(table.to_json().to_string())
    };
    let spectrum_json = || -> Result<String, String> {
        let mut req = config.spectrum.request().map_err(|e| e.to_string())?;
        req.quadrature = false;
        let res = compute_spectrum(&req).map_err(|e| e.to_string())?;
        Ok(format!("{}{}", res.to_json(), res.to_csv()))
    };
    let same = |f: &dyn Fn() -> Result<String, String>| match (f(), f()) {
        (Ok(x), Ok(y)) => (x == y, String::new()),
        (Err(e), _) | (_, Err(e)) => (false, e),
    };
    let (t_ok, t_err) = same(&table_json);
    let (s_ok, s_err) = same(&spectrum_json);
    Suite::new(
        "outputs",
        vec![
            Check::exact("table_deterministic", t_ok, t_err),
            Check::exact("spectrum_deterministic", s_ok, s_err),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.1, 5.0, 20);
        assert_eq!(g.len(), 20);
        assert!((g[0] - 0.1).abs() < 1e-15);
        assert!((g[19] - 5.0).abs() < 1e-13);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn random_trees_respect_depth_and_seed() {
        let mut r1 = rng_for(9, 1);
        let mut r2 = rng_for(9, 1);
        for _ in 0..20 {
            assert_eq!(random_tree(&mut r1, 3, 24), random_tree(&mut r2, 3, 24));
        }
    }

    #[test]
    fn geometry_and_twist_suites_pass() {
        let tol = Tolerances::default();
        for s in [rindler_suite(1, &tol), twist_suite(1, &tol), diffop_suite(1, &tol)] {
            assert!(s.passed, "{s:#?}");
        }
    }

    #[test]
    fn impossible_tolerance_fails_by_name() {
        let tol = Tolerances {
            geometry: 0.0,
            ..Tolerances::default()
        };
        let s = rindler_suite(1, &tol);
        assert!(!s.checks[0].passed);
        assert!(s.checks[0].measured.unwrap() > 0.0);
    }
}
