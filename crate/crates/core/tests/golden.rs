mod common;

use common::{listing_options, load, read};
use otsc_core::analyzer::{classify, dump_model, dump_model_json, SCHEMA};
use otsc_core::codegen::{emit_java_jml, normalize_java, translate_modules, MethodKind};
use otsc_core::exec::ExecMode;

fn java(files: &[&str], module: &str) -> String {
    let set = load(files);
    let t = translate_modules(
        &set,
        &[module.to_string()],
        &listing_options(),
        ExecMode::Parallel,
    )
    .unwrap();
    emit_java_jml(&t[0].class)
}

#[test]
fn account_listing_is_reproduced() {
    let out = java(&["account.cafe"], "ACCOUNT");
    assert_eq!(out, read("golden/Account.java"));
}

#[test]
fn account_system_listing_is_reproduced() {
    let out = java(&["account.cafe", "account_sys.cafe"], "ACCOUNT-SYSTEM");
    assert_eq!(out, read("golden/AccountSystem.java"));
}

#[test]
fn account_contract_elements() {
    let n = normalize_java(&java(&["account.cafe"], "ACCOUNT"));
    for piece in [
        "ensures balance() == 0; public Account()",
        "requires this.balance() + x >= 0;",
        "requires this.balance() + x < 0;",
        "assignable \\nothing;",
        "ensures (this.balance() == another.balance()) ==> (\\result == true);",
        "requires another != null;",
        "ensures (this.balance() == another.balance()) && (this != another);",
    ] {
        assert!(n.contains(piece), "missing `{piece}` in\n{n}");
    }
}

#[test]
fn account_system_contract_elements() {
    let n = normalize_java(&java(
        &["account.cafe", "account_sys.cafe"],
        "ACCOUNT-SYSTEM",
    ));
    for piece in [
        "ensures (\\forall int j; ((getAcc(i) != null) && (i != j)) ==> (getAcc(i) != getAcc(j)));",
        "requires this.getAcc(id) != null; ensures \\result == this.getAcc(id).balance();",
        "\\result.getAcc(id).equals(temp.getAcc(id).add(n))",
        "\\result.getAcc(id).equals(temp.getAcc(id).add(-n))",
        "requires (this.getAcc(id) == null) && (n >= 0);",
        "\\result.getAcc(id).equals(new Account().add(n))",
        "\\result.getAcc(id) == null",
    ] {
        assert!(n.contains(piece), "missing `{piece}` in\n{n}");
    }
}

#[test]
fn layout_independent_comparison() {
    let out = java(&["account.cafe"], "ACCOUNT");
    let reflowed = out
        .replace("    /*@ ", "/*@\n@ ")
        .replace("      @ ", "  @   ");
    assert_ne!(out, reflowed);
    assert_eq!(normalize_java(&out), normalize_java(&reflowed));
}

#[test]
fn model_dumps_are_frozen() {
    let set = load(&["account.cafe", "account_sys.cafe"]);
    let acc = classify(&set, "ACCOUNT").unwrap();
    let sys = classify(&set, "ACCOUNT-SYSTEM").unwrap();
    assert_eq!(dump_model(&acc), read("golden/account.model.json"));
    assert_eq!(dump_model(&sys), read("golden/account_sys.model.json"));
}

#[test]
fn model_dump_shape() {
    let set = load(&["account.cafe", "account_sys.cafe"]);
    let acc = dump_model_json(&classify(&set, "ACCOUNT").unwrap());
    assert_eq!(acc["schema"], SCHEMA);
    assert_eq!(acc["observers"].as_array().unwrap().len(), 1);
    assert_eq!(acc["projections"].as_array().unwrap().len(), 0);
    let sys = dump_model_json(&classify(&set, "ACCOUNT-SYSTEM").unwrap());
    assert_eq!(sys["projections"].as_array().unwrap().len(), 1);
    assert_eq!(sys["projections"][0]["component_module"], "ACCOUNT");
    assert_eq!(sys["transitions"].as_array().unwrap().len(), 4);
}

#[test]
fn json_rendering_mirrors_the_class() {
    let set = load(&["account.cafe"]);
    let t = translate_modules(
        &set,
        &["ACCOUNT".into()],
        &listing_options(),
        ExecMode::Sequential,
    )
    .unwrap();
    let v: serde_json::Value = serde_json::from_str(&t[0].class.to_json()).unwrap();
    assert_eq!(v["name"], "Account");
    let kinds: Vec<&str> = v["methods"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["kind"].as_str().unwrap())
        .collect();
    assert_eq!(
        kinds,
        [
            "observer",
            "constructor",
            "equals",
            "deep_copy",
            "transition"
        ]
    );
    let add = &v["methods"][4];
    assert_eq!(add["cases"].as_array().unwrap().len(), 2);
    assert_eq!(add["cases"][1]["assignable"], "nothing");
    assert_eq!(
        t[0].class
            .methods
            .iter()
            .filter(|m| m.kind == MethodKind::Transition)
            .count(),
        1
    );
}

#[test]
fn full_corpus_translates_identically_in_both_modes() {
    let files = [
        "account.cafe",
        "account_sys.cafe",
        "extra/grid.cafe",
        "extra/pair.cafe",
        "extra/savings.cafe",
        "extra/savings_redeclared.cafe",
    ];
    let set = load(&files);
    let modules: Vec<String> = otsc_core::analyzer::object_modules(&set)
        .map(|m| m.name.clone())
        .collect();
    assert_eq!(modules.len(), 6);
    let run = |mode| {
        translate_modules(&set, &modules, &listing_options(), mode)
            .unwrap()
            .iter()
            .map(|t| emit_java_jml(&t.class))
            .collect::<Vec<_>>()
    };
    assert_eq!(run(ExecMode::Sequential), run(ExecMode::Parallel));
}
