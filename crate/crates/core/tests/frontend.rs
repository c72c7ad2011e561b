use consfree::gen::{random_program, rng, GenConfig};
use consfree::{
    alpha, call_shape_report, is_cftr, parse_input, parse_ncf_program, parse_program, pretty_print,
    AlphaClass, BaseOp, CallShape, Definition, Dialect, Expr, ParseError, Program,
};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

/// Expressions over the parameters `a`, `b` and calls to `g/2`, `k/0`.
fn arb_expr(allow_choose: bool) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::True),
        Just(Expr::False),
        Just(Expr::Nil),
        Just(Expr::var("a")),
        Just(Expr::var("b")),
        Just(Expr::call("k", vec![])),
    ];
    leaf.prop_recursive(5, 48, 3, move |inner| {
        let op = prop::sample::select(BaseOp::ALL.to_vec());
        let choose = if allow_choose { 1 } else { 0 };
        prop_oneof![
            3 => (op, inner.clone()).prop_map(|(o, e)| Expr::base(o, e)),
            3 => (inner.clone(), inner.clone(), inner.clone()).prop_map(|(c, t, f)| Expr::ite(c, t, f)),
            3 => (inner.clone(), inner.clone()).prop_map(|(x, y)| Expr::call("g", vec![x, y])),
            choose => (inner.clone(), inner).prop_map(|(l, r)| Expr::choose(l, r)),
        ]
    })
}

fn host(body: Expr, dialect: Dialect) -> Program {
    Program::new(
        vec![
            Definition::new(
                "main",
                &["x"],
                Expr::call("g", vec![Expr::var("x"), Expr::call("k", vec![])]),
            ),
            Definition::new("g", &["a", "b"], body),
            Definition::new("k", &[], Expr::True),
        ],
        dialect,
    )
    .unwrap()
}

/// Reference classification: collect every call with whether it sits in
/// tail position, then read the class off the collection.
fn alpha_reference(e: &Expr) -> AlphaClass {
    fn sites(e: &Expr, tail: bool, out: &mut Vec<bool>) {
        match e {
            Expr::True | Expr::False | Expr::Nil | Expr::Var(_) => {}
            Expr::Base(_, a) => sites(a, false, out),
            Expr::If(c, t, f) => {
                sites(c, false, out);
                sites(t, tail, out);
                sites(f, tail, out);
            }
            Expr::Choose(l, r) => {
                sites(l, tail, out);
                sites(r, tail, out);
            }
            Expr::Call(_, args) => {
                out.push(tail);
                args.iter().for_each(|a| sites(a, false, out));
            }
        }
    }
    let mut out = Vec::new();
    sites(e, true, &mut out);
    if out.is_empty() {
        AlphaClass::X
    } else if out.iter().all(|&t| t) {
        AlphaClass::T
    } else {
        AlphaClass::N
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn pretty_print_round_trips(body in arb_expr(false)) {
        let p = host(body, Dialect::Deterministic);
        let text = pretty_print(&p);
        prop_assert_eq!(parse_program(&text).unwrap(), p);
    }

    #[test]
    fn pretty_print_round_trips_with_choose(body in arb_expr(true)) {
        let p = host(body, Dialect::Nondeterministic);
        prop_assert_eq!(parse_ncf_program(&pretty_print(&p)).unwrap(), p);
    }

    #[test]
    fn pretty_print_is_a_fixed_point(seed in any::<u64>()) {
        let p = random_program(&mut rng(seed), GenConfig::default());
        let once = pretty_print(&p);
        prop_assert_eq!(pretty_print(&parse_program(&once).unwrap()), once);
    }

    #[test]
    fn cftr_reports_only_tail_sites(body in arb_expr(true)) {
        let p = host(body, Dialect::Nondeterministic);
        let r = call_shape_report(&p);
        let only_tail = r.sites.iter().all(|s| s.shape == CallShape::Tail);
        prop_assert_eq!(only_tail, is_cftr(&p));
        prop_assert_eq!(r.is_cftr, is_cftr(&p));
    }
}

#[test]
fn alpha_matches_reference_on_1000_expressions() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strat = arb_expr(true);
    for _ in 0..1000 {
        let e = strat.new_tree(&mut runner).unwrap().current();
        assert_eq!(alpha(&e), alpha_reference(&e), "{e:?}");
    }
}

#[test]
fn parity_alpha_values() {
    let z = || Expr::var("z");
    assert_eq!(alpha(&Expr::null(z())), AlphaClass::X);
    assert_eq!(alpha(&Expr::tail(z())), AlphaClass::X);
    assert_eq!(
        alpha(&Expr::call("even", vec![Expr::var("x")])),
        AlphaClass::T
    );
    assert_eq!(
        alpha(&Expr::call("even", vec![Expr::tail(z())])),
        AlphaClass::T
    );
    assert_eq!(
        alpha(&Expr::not(Expr::call("even", vec![Expr::tail(z())]))),
        AlphaClass::N
    );
}

#[test]
fn parse_errors_carry_positions() {
    match parse_program("main x = if x then") {
        Err(ParseError::Syntax { line: 1, .. }) => {}
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_program("main x = f x"),
        Err(ParseError::Validation(_))
    ));
    assert!(matches!(
        parse_program("main x = choose x x"),
        Err(ParseError::Validation(_))
    ));
    assert!(parse_ncf_program("main x = choose True (null x)").is_ok());
    assert!(parse_input("10a1").is_err());
    assert_eq!(
        parse_input("[1, 0,1]").unwrap(),
        parse_input("101").unwrap()
    );
}

#[test]
fn nested_call_is_reported() {
    let p = parse_program("main x = f (f x)\nf y = y").unwrap();
    let r = call_shape_report(&p);
    assert_eq!(r.count(CallShape::Nested), 1);
    assert!(!r.all_calls_linear);
}
