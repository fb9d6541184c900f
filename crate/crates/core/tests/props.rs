mod support;

use dynscope_core::lang::parser::parse_model;
use dynscope_core::lang::pretty::pretty_model;
use dynscope_core::relational::TupleSet;
use dynscope_core::sat::{solve, to_cnf, SolveResult};
use dynscope_core::{check, check_soundness, load, Bounds, CheckOptions, TraceJson, Verdict};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::interp::Oracle;
use support::{brute, gen};

const HEADER: &str = "sig A {}
action flip[x: A, y: A] { pre { true } post { x' = y and y' = x } }
action grab[x: A, s: set A] { pre { some s } post { x' in s and s' = s } }
";

fn formula() -> impl Strategy<Value = String> {
    prop::sample::select(vec![
        "x = y",
        "x != y",
        "x in s",
        "x !in s",
        "no s",
        "some s",
        "x = a",
        "#s = 1",
        "x = a or y = a",
        "s in a + x",
        "true",
    ])
    .prop_map(str::to_string)
}

fn program() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        prop::sample::select(vec![
            "x := y",
            "x := a",
            "y := x",
            "s := s + x",
            "s := s - x",
            "s := a",
            "skip",
            "flip[x, y]",
            "grab[x, s]",
        ])
        .prop_map(str::to_string),
        formula().prop_map(|f| format!("[{f}]?")),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("{p}; {q}")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p}) + ({q})")),
            inner.clone().prop_map(|p| format!("({p})*")),
            (formula(), inner.clone(), inner.clone()).prop_map(|(f, p, q)| format!("if {f} {{ {p} }} else {{ {q} }}")),
            (formula(), inner.clone()).prop_map(|(f, p)| format!("if {f} {{ {p} }}")),
            (formula(), inner).prop_map(|(f, p)| format!("while {f} do {{ {p} }}")),
        ]
    })
}

fn model_text() -> impl Strategy<Value = String> {
    (formula(), program(), formula()).prop_map(|(pre, p, post)| {
        format!(
            "{HEADER}assertCorrectness t[x: A, y: A, a: A, s: set A] {{\n  pre {{ {pre} }}\n  program {{ {p} }}\n  post {{ {post} }}\n}}\n"
        )
    })
}

fn relation(n: u32) -> impl Strategy<Value = TupleSet> {
    prop::collection::btree_set((0..n, 0..n), 0..=(n * n) as usize)
        .prop_map(|pairs| TupleSet::from_tuples(2, pairs.into_iter().map(|(a, b)| vec![a, b])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pretty_printing_round_trips(src in model_text()) {
        let m = parse_model(&src).unwrap();
        let once = pretty_model(&m);
        let again = pretty_model(&parse_model(&once).unwrap());
        prop_assert_eq!(once, again);
    }

    #[test]
    fn sat_verdict_matches_interpreter(src in model_text(), scope in 1usize..=2, unroll in 1usize..=3) {
        let m = load(&src).unwrap();
        let b = Bounds::new(scope, unroll, 3);
        let r = check(&m, "t", &b, &CheckOptions::default()).unwrap();
        let expected = Oracle::new(&m, "t", &b).valid();
        prop_assert_eq!(r.verdict.is_valid(), expected, "{}", src);
        if let Verdict::Counterexample(cx) = &r.verdict {
            prop_assert!(check_soundness(&m, cx).is_empty());
            let json = cx.trace.to_json();
            prop_assert_eq!(&TraceJson::from_json(&json).unwrap(), &cx.trace);
        }
    }

    #[test]
    fn closure_is_the_union_of_powers(r in relation(4)) {
        let mut acc = r.clone();
        let mut power = r.clone();
        for _ in 1..4 {
            power = power.join(&r);
            acc = acc.union(&power);
        }
        prop_assert_eq!(r.closure(), acc);
    }

    #[test]
    fn closure_is_transitive_and_contains_the_relation(r in relation(4)) {
        let c = r.closure();
        prop_assert!(r.is_subset(&c));
        prop_assert!(c.join(&c).is_subset(&c));
    }

    #[test]
    fn override_replaces_rows_of_the_right_domain(r in relation(3), s in relation(3)) {
        let o = r.override_with(&s);
        prop_assert!(o.is_subset(&r.union(&s)));
        prop_assert!(s.is_subset(&o));
        for t in o.iter() {
            let in_dom_s = s.iter().any(|u| u[0] == t[0]);
            let owner = if in_dom_s { &s } else { &r };
            prop_assert!(owner.contains(t));
        }
    }

    #[test]
    fn cardinality_of_union_and_difference(r in relation(3), s in relation(3)) {
        prop_assert_eq!(r.union(&s).len() + r.intersection(&s).len(), r.len() + s.len());
        prop_assert_eq!(r.difference(&s).len() + r.intersection(&s).len(), r.len());
    }

    #[test]
    fn tseitin_preserves_satisfiability(seed in any::<u64>(), leaves in 1u32..=12, gates in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, root) = gen::circuit(&mut rng, leaves, gates);
        let cnf = to_cnf(&c, root);
        let got = match solve(&cnf) {
            SolveResult::Sat(m) => {
                prop_assert!(c.evaluate(&m[..leaves as usize])[root.index()]);
                true
            }
            _ => false,
        };
        prop_assert_eq!(got, brute::circuit_sat(&c, root));
    }

    #[test]
    fn cdcl_agrees_with_enumeration(seed in any::<u64>(), vars in 3u32..=12, clauses in 1usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cnf = gen::three_cnf(&mut rng, vars, clauses);
        let got = matches!(solve(&cnf), SolveResult::Sat(_));
        prop_assert_eq!(got, brute::cnf_sat(&cnf));
    }
}
