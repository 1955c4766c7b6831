// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use cohana::model::{AggFunc, CmpOp};
use cohana::query::{parse, ClauseOrder, Expr, Literal, QuerySpec, SelectItem, Term};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::sample::select;

fn ident() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z_][a-zA-Z0-9_]{0,8}",
        select(vec![
            "select", "from", "Birth", "AGE", "cohort", "and", "in", "between", "not"
        ])
        .prop_map(String::from),
        "[ -~]{1,8}",
        "\\PC{1,6}",
    ]
}

fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        any::<i64>().prop_map(Literal::Int),
        "\\PC{0,10}".prop_map(Literal::Str),
        "[\"'\\\\ a]{0,6}".prop_map(Literal::Str),
    ]
}

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        ident().prop_map(Term::Attr),
        ident().prop_map(Term::Birth),
        Just(Term::Age),
        literal().prop_map(Term::Lit),
    ]
}

fn cmp() -> impl Strategy<Value = CmpOp> {
    select(vec![CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge])
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (term(), cmp(), term()).prop_map(|(left, op, right)| Expr::Compare { left, op, right }),
        (term(), vec(literal(), 1..4), any::<bool>()).prop_map(|(term, list, negated)| Expr::In {
            term,
            list,
            negated
        }),
        (term(), literal(), literal(), any::<bool>()).prop_map(|(term, low, high, negated)| Expr::Between {
            term,
            low,
            high,
            negated
        }),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Or(Box::new(a), Box::new(b))),
            inner.prop_map(|a| Expr::Not(Box::new(a))),
        ]
    })
}

fn select_item() -> impl Strategy<Value = SelectItem> {
    prop_oneof![
        ident().prop_map(SelectItem::Attr),
        Just(SelectItem::CohortSize),
        Just(SelectItem::Age),
        (
            select(AggFunc::ALL.to_vec()),
            proptest::option::of(ident()),
            proptest::option::of(ident())
        )
            .prop_map(|(func, arg, alias)| SelectItem::Agg { func, arg, alias }),
    ]
}

fn query() -> impl Strategy<Value = QuerySpec> {
    (
        vec(select_item(), 1..5),
        ident(),
        ident(),
        "\\PC{0,8}",
        proptest::option::of(expr()),
        proptest::option::of(expr()),
        vec(ident(), 1..3),
        prop_oneof![Just(ClauseOrder::BirthFirst), Just(ClauseOrder::AgeFirst)],
    )
        .prop_map(
            |(select, table, birth_attr, birth_action, birth_predicate, age_predicate, cohort_by, clause_order)| {
                // Without an age clause there is nothing to order.
                let clause_order = if age_predicate.is_some() {
                    clause_order
                } else {
                    ClauseOrder::BirthFirst
                };
                QuerySpec {
                    select,
                    table,
                    birth_attr,
                    birth_action,
                    birth_predicate,
                    age_predicate,
                    cohort_by,
                    clause_order,
                    age_unit: Default::default(),
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn print_then_parse_is_identity(q in query()) {
        let text = q.to_string();
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &q, "{}", text);
        prop_assert_eq!(back.to_string(), text);
    }
}

#[test]
fn benchmark_queries_round_trip() {
    use cohana::bench::{benchmark_query, BenchParams, QUERY_NAMES};
    for name in QUERY_NAMES {
        let q = parse(&benchmark_query(name, &BenchParams::default()).unwrap()).unwrap();
        assert_eq!(parse(&q.to_string()).unwrap(), q, "{name}");
    }
}
