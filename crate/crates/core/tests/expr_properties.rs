use ncrindler::expr::{parse, Expr, Probe, Symbol};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::sym("z0")),
        Just(Expr::sym("z1")),
        Just(Expr::sym("a")),
        Just(Expr::sym("w")),
        (-3i64..=3).prop_map(Expr::int),
        (1i64..=4, 2i64..=5).prop_map(|(n, d)| Expr::rational(n, d)),
        Just(Expr::i()),
    ]
}

fn tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(6, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::sum),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::product),
            (inner.clone(), prop_oneof![Just(-1i32), Just(2), Just(3)])
                .prop_map(|(e, n)| e.pow(n)),
            inner.clone().prop_map(Expr::sinh),
            inner.clone().prop_map(Expr::cosh),
            inner.clone().prop_map(|e| (e * Expr::rational(1, 4)).exp()),
            inner.prop_map(Expr::tanh),
        ]
    })
}

fn probe() -> Probe {
    Probe::default().with_trials(100).with_tol(1e-12)
}

fn z0() -> Symbol {
    Symbol::new("z0").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simplify_is_idempotent(e in tree()) {
        let s = e.simplify();
        prop_assert_eq!(s.simplify(), s);
    }

    #[test]
    fn simplify_preserves_value(e in tree()) {
        let out = probe().compare_precise(&e, &e.simplify());
        // Probes that cannot find a regular point carry no information.
        prop_assume!(out.trials_run == 100);
        prop_assert!(out.equal, "{} residual {}", e, out.max_residual);
    }

    #[test]
    fn print_parse_round_trip(e in tree()) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(back, e.simplify(), "printed: {}", printed);
    }

    #[test]
    fn derivative_is_linear(f in tree(), g in tree(), k in -3i64..=3) {
        let v = z0();
        let lhs = (&f + Expr::int(k) * &g).diff(&v);
        let rhs = (f.diff(&v) + Expr::int(k) * g.diff(&v)).simplify();
        prop_assert_eq!(&lhs, &rhs);
        let out = Probe::default().with_tol(1e-9).compare(&lhs, &rhs);
        prop_assert!(out.equal || out.trials_run == 0);
    }

    #[test]
    fn product_rule(f in tree(), g in tree()) {
        let v = z0();
        let lhs = (&f * &g).diff(&v);
        let rhs = (f.diff(&v) * &g + &f * g.diff(&v)).simplify();
        prop_assert_eq!(&lhs, &rhs);
    }
}
