mod common;

use common::{account, account_system, interpreter, read};
use otsc_core::exec::ExecMode;
use otsc_core::interp::{parse_scenario, DataValue, DomainBounds, InterpError};

#[test]
fn account_scenario_point_values() {
    // read(init) = 0; add 5 -> 5; add -10 is ineffective (5 - 10 < 0) -> 5; add 3 -> 8.
    let trace = account()
        .run_scenario(&parse_scenario(&read("scenarios/account.json")).unwrap())
        .unwrap();
    assert_eq!(
        trace.series("read"),
        vec![Some(0), Some(5), Some(5), Some(8)]
    );
    let eff: Vec<Option<bool>> = trace.steps.iter().map(|s| s.effective).collect();
    assert_eq!(eff, vec![None, Some(true), Some(false), Some(true)]);
}

#[test]
fn account_system_scenario_point_values() {
    // add(u1, 10) makes account 1 = add(init, 10); deposit 5 -> 15; withdraw 3 -> add(.., -3) = 12.
    let trace = account_system()
        .run_scenario(&parse_scenario(&read("scenarios/account_sys.json")).unwrap())
        .unwrap();
    assert_eq!(
        trace.series("balance(1)"),
        vec![None, Some(10), Some(15), Some(12)]
    );
    assert_eq!(trace.series("balance(0)"), vec![None; 4]);
}

#[test]
fn empty_scenario_is_the_initial_snapshot() {
    let trace = account().run_scenario(&[]).unwrap();
    assert_eq!(trace.steps.len(), 1);
    assert_eq!(trace.to_text(), "step 0: init\n  read = 0\n");
}

#[test]
fn deposit_to_absent_account_is_reported() {
    let steps = parse_scenario(&read("scenarios/deposit_absent.json")).unwrap();
    let err = account_system().run_scenario(&steps).unwrap_err();
    assert!(err.is_projection_absent(), "{err}");
    assert!(err.to_string().starts_with("after step 1:"), "{err}");
}

#[test]
fn ineffective_withdraw_stutters() {
    let i = account_system();
    let s = i
        .initial()
        .unwrap()
        .then("add", vec![DataValue::Int(1), DataValue::Int(2)]);
    let t = s.then("withdraw", vec![DataValue::Int(1), DataValue::Int(3)]);
    assert_eq!(
        i.observe(&t, "balance", &[DataValue::Int(1)])
            .unwrap()
            .as_int(),
        Some(2)
    );
    assert!(i.behaviorally_equal(&s, &t).unwrap().equal);
}

#[test]
fn reachable_state_counts() {
    // One initial state and seven `add` instances per step.
    let i = account();
    let counts: Vec<usize> = (0..=3)
        .map(|d| i.reachable_states(d).unwrap().len())
        .collect();
    assert_eq!(counts, vec![1, 8, 57, 400]);
}

#[test]
fn stuttering_and_congruence_hold_for_account() {
    let i = account();
    let st = i.check_stuttering(3).unwrap();
    assert!(st.holds(), "{:?}", st.violations);
    // 400 states times the ineffective `add` instances among 7 arguments.
    assert!(st.checked > 0 && st.checked < 400 * 7);
    let cg = i.check_congruence(3).unwrap();
    assert!(cg.holds(), "{:?}", cg.violations);
    assert!(cg.checked > 0);
}

#[test]
fn properties_hold_for_account_system() {
    let bounds = DomainBounds {
        int_range: (1, 2),
        id_range: (0, 1),
        ..Default::default()
    };
    let i = interpreter(
        &["account.cafe", "account_sys.cafe"],
        "ACCOUNT-SYSTEM",
        bounds,
    );
    let st = i.check_stuttering(2).unwrap();
    assert!(st.holds(), "{:?}", st.violations);
    let cg = i.check_congruence(2).unwrap();
    assert!(cg.holds(), "{:?}", cg.violations);
    assert!(cg.skipped > 0, "deposits on absent accounts are skipped");
}

#[test]
fn stuttering_violation_is_found() {
    // `add` claims to be ineffective on negative arguments but still changes `read`.
    let src = "mod* BAD { pr(INT) *[ B ]* op b0 : -> B bop v : B -> Int bop inc : B Int -> B \
               op c-inc : B Int -> Bool var S : B var I : Int \
               eq v(b0) = 0 . eq c-inc(S, I) = I >= 0 . eq v(inc(S, I)) = v(S) + 1 . }";
    let set = otsc_core::parser::parse_sources(&[("bad".into(), src.into())]).unwrap();
    let i = otsc_core::interp::Interpreter::new(&set, "BAD", DomainBounds::default()).unwrap();
    let st = i.check_stuttering(1).unwrap();
    assert!(!st.holds());
    assert_eq!(
        st.violations.len(),
        8 * 3,
        "three negative arguments on each of eight states"
    );
}

#[test]
fn confluence_on_observation_terms() {
    for (i, depth) in [(account(), 2), (account_system(), 1)] {
        let terms = i.observation_terms(depth).unwrap();
        assert!(!terms.is_empty());
        let bad = i.check_confluence(&terms);
        assert!(bad.is_empty(), "{:?}", bad.first());
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let mut i = account();
    let a = i.check_congruence(2).unwrap();
    i.set_mode(ExecMode::Sequential);
    let b = i.check_congruence(2).unwrap();
    assert_eq!(
        (a.checked, a.skipped, a.violations.len()),
        (b.checked, b.skipped, b.violations.len())
    );
}

#[test]
fn fuel_exhaustion_is_an_error() {
    let bounds = DomainBounds {
        max_rewrite_steps: 2,
        ..Default::default()
    };
    let i = interpreter(&["account.cafe"], "ACCOUNT", bounds);
    let s = (0..5).fold(i.initial().unwrap(), |s, _| {
        s.then("add", vec![DataValue::Int(1)])
    });
    assert!(matches!(
        i.observe(&s, "read", &[]),
        Err(InterpError::Reduce(_))
    ));
}

#[test]
fn invalid_bounds_rejected() {
    let bounds = DomainBounds {
        int_range: (1, 0),
        ..Default::default()
    };
    assert!(matches!(
        bounds.validate(),
        Err(InterpError::InvalidBounds(_))
    ));
}
