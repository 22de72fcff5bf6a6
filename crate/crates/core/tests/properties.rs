mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::{account, account_system};
use otsc_core::interp::{DataValue, ScenarioStep, StateValue};
use otsc_core::parser::{parse_source, pretty::print_module};
use otsc_core::Term;

fn step(transition: &str, args: Vec<serde_json::Value>) -> ScenarioStep {
    ScenarioStep {
        transition: transition.into(),
        args,
    }
}

fn account_state(amounts: &[i64]) -> StateValue {
    amounts
        .iter()
        .fold(StateValue::initial("ACCOUNT", "init"), |s, &x| {
            s.then("add", vec![DataValue::Int(x)])
        })
}

/// Balance after applying `add` steps that only take effect when the
/// balance stays non-negative.
fn balance_oracle(amounts: &[i64]) -> i64 {
    amounts
        .iter()
        .fold(0, |b, &x| if b + x >= 0 { b + x } else { b })
}

#[derive(Clone, Debug)]
enum SysOp {
    Add(i64, i64),
    Del(i64),
    Deposit(i64, i64),
    Withdraw(i64, i64),
}

fn sys_op() -> impl Strategy<Value = SysOp> {
    let id = 0i64..=2;
    let n = 0i64..=20;
    prop_oneof![
        (id.clone(), n.clone()).prop_map(|(u, n)| SysOp::Add(u, n)),
        id.clone().prop_map(SysOp::Del),
        (id.clone(), n.clone()).prop_map(|(u, n)| SysOp::Deposit(u, n)),
        (id, n).prop_map(|(u, n)| SysOp::Withdraw(u, n)),
    ]
}

/// Integer expressions printed with full parentheses, with their value.
fn int_expr() -> impl Strategy<Value = (String, i64)> {
    let leaf = (0i64..50).prop_map(|n| (n.to_string(), n));
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|((a, x), (b, y))| (format!("({a} + {b})"), x + y)),
            (inner.clone(), inner.clone())
                .prop_map(|((a, x), (b, y))| (format!("({a} - {b})"), x - y)),
            inner.prop_map(|(a, x)| (format!("(- {a})"), -x)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn account_matches_balance_oracle(amounts in prop::collection::vec(-20i64..=20, 0..8)) {
        let i = account();
        let steps: Vec<ScenarioStep> = amounts.iter().map(|&x| step("add", vec![x.into()])).collect();
        let trace = i.run_scenario(&steps).unwrap();
        let expected: Vec<Option<i64>> = (0..=amounts.len()).map(|k| Some(balance_oracle(&amounts[..k]))).collect();
        prop_assert_eq!(trace.series("read"), expected);
    }

    #[test]
    fn account_system_matches_map_oracle(ops in prop::collection::vec(sys_op(), 0..8)) {
        let i = account_system();
        let mut model: BTreeMap<i64, Option<i64>> = (0..=2).map(|u| (u, None)).collect();
        let mut steps = Vec::new();
        let mut failing_step = None;
        for (k, op) in ops.iter().enumerate() {
            let uid = |u: &i64| serde_json::Value::from(format!("u{u}"));
            let (s, absent) = match op {
                SysOp::Add(u, n) => { model.insert(*u, Some(*n)); (step("add", vec![uid(u), (*n).into()]), false) }
                SysOp::Del(u) => { model.insert(*u, None); (step("del", vec![uid(u)]), false) }
                SysOp::Deposit(u, n) => {
                    let b = model[u];
                    if let Some(b) = b { model.insert(*u, Some(b + n)); }
                    (step("deposit", vec![uid(u), (*n).into()]), b.is_none())
                }
                SysOp::Withdraw(u, n) => {
                    let b = model[u];
                    if let Some(b) = b { if b - n >= 0 { model.insert(*u, Some(b - n)); } }
                    (step("withdraw", vec![uid(u), (*n).into()]), b.is_none())
                }
            };
            steps.push(s);
            if absent {
                failing_step = Some(k + 1);
                break;
            }
        }
        match (i.run_scenario(&steps), failing_step) {
            (Ok(trace), None) => {
                for (u, b) in &model {
                    prop_assert_eq!(trace.series(&format!("balance({u})")).last().copied().flatten(), *b);
                }
            }
            (Err(e), Some(k)) => {
                prop_assert!(e.is_projection_absent(), "{}", e);
                let prefix = format!("after step {k}:");
                prop_assert!(e.to_string().starts_with(&prefix), "{}", e);
            }
            (r, k) => prop_assert!(false, "unexpected outcome {:?} (oracle failing step {:?})", r.map(|t| t.steps.len()), k),
        }
    }

    #[test]
    fn equivalence_agrees_with_balance(a in prop::collection::vec(-3i64..=3, 0..5), b in prop::collection::vec(-3i64..=3, 0..5)) {
        let i = account();
        let (s, t) = (account_state(&a), account_state(&b));
        let st = i.behaviorally_equal(&s, &t).unwrap();
        let ts = i.behaviorally_equal(&t, &s).unwrap();
        prop_assert!(i.behaviorally_equal(&s, &s).unwrap().equal);
        prop_assert_eq!(st.equal, ts.equal);
        prop_assert_eq!(st.equal, balance_oracle(&a) == balance_oracle(&b));
        if let (Some(w1), Some(w2)) = (st.witness, ts.witness) {
            prop_assert_eq!((w1.left, w1.right), (w2.right, w2.left));
        }
    }

    #[test]
    fn printed_modules_reparse_and_evaluate((text, value) in int_expr()) {
        let src = format!("mod* P {{ pr(INT) *[ S ]* op s0 : -> S bop v : S -> Int eq v(s0) = {text} . }}");
        let first = parse_source(&src, "p").unwrap();
        let printed = print_module(&first[0]);
        let second = parse_source(&printed, "p").unwrap();
        prop_assert_eq!(&printed, &print_module(&second[0]));

        let set = otsc_core::parser::parse_sources(&[("p".into(), printed)]).unwrap();
        let i = otsc_core::interp::Interpreter::new(&set, "P", Default::default()).unwrap();
        let got = i.reduce(&Term::app("v", vec![Term::constant("s0")])).unwrap();
        prop_assert_eq!(got, Term::Int(value));
    }
}
