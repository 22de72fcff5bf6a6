//! Translation of OTS models into contract-annotated class skeletons.
//!
//! A model becomes a [`ContractClass`]: pure methods for observers and
//! projections, constructors for initial states, behavioral equality, a deep
//! copy constructor and one method per transition with its contract cases.
//! [`emit_java_jml`] renders the class as Java with JML comments.

pub mod expr;
mod java;
mod model;
mod naming;
mod translate;
mod validate;

pub use java::{emit_java_jml, normalize_java};
pub use model::{
    Assignable, ContractCase, ContractClass, ContractMethod, GhostField, MethodKind, Param,
};
pub use naming::{
    default_sort_mapping, lower_camel, upper_camel, CodegenOptions, SortMapping, TargetType,
};
pub use translate::{
    translate_composite, translate_inheritance, translate_single, CodegenError, Translation,
};
pub use validate::validate;

use std::collections::BTreeMap;

use crate::analyzer::{classify, OtsModel};
use crate::ast::ModuleSet;
use crate::exec::ExecMode;

/// Translates one model and checks its contracts. `known` holds the classes
/// of its components and parent.
pub fn translate_model(
    set: &ModuleSet,
    model: &OtsModel,
    known: &[&ContractClass],
    opts: &CodegenOptions,
) -> Result<Translation, CodegenError> {
    let t = if model.is_composite() {
        translate_composite(set, model, known, opts)?
    } else {
        translate_single(set, model, known, opts)?
    };
    validate(&t.class, known)?;
    Ok(t)
}

fn dependencies(model: &OtsModel) -> Vec<String> {
    let mut deps: Vec<String> = model
        .projections
        .iter()
        .map(|p| p.component_module.clone())
        .collect();
    deps.extend(model.extends_module.clone());
    deps.sort();
    deps.dedup();
    deps
}

/// Translates `modules` and whatever they depend on. Independent classes
/// are translated together in `mode`; the result follows the order of
/// `modules` and does not depend on the mode.
pub fn translate_modules(
    set: &ModuleSet,
    modules: &[String],
    opts: &CodegenOptions,
    mode: ExecMode,
) -> Result<Vec<Translation>, (String, CodegenError)> {
    let mut models: BTreeMap<String, OtsModel> = BTreeMap::new();
    let mut queue: Vec<String> = modules.to_vec();
    while let Some(name) = queue.pop() {
        if models.contains_key(&name) {
            continue;
        }
        let model = classify(set, &name)
            .map_err(|_| (name.clone(), CodegenError::Unclassified(name.clone())))?;
        queue.extend(dependencies(&model));
        models.insert(name, model);
    }

    let mut done: BTreeMap<String, Translation> = BTreeMap::new();
    while done.len() < models.len() {
        let ready: Vec<&OtsModel> = models
            .values()
            .filter(|m| {
                !done.contains_key(&m.module_name)
                    && dependencies(m).iter().all(|d| done.contains_key(d))
            })
            .collect();
        if ready.is_empty() {
            let stuck = models
                .keys()
                .find(|k| !done.contains_key(*k))
                .unwrap()
                .clone();
            return Err((stuck.clone(), CodegenError::Unclassified(stuck)));
        }
        let results = {
            let known: Vec<&ContractClass> = done.values().map(|t| &t.class).collect();
            mode.map(&ready, |m| translate_model(set, m, &known, opts))
        };
        for (m, r) in ready.iter().zip(results) {
            done.insert(
                m.module_name.clone(),
                r.map_err(|e| (m.module_name.clone(), e))?,
            );
        }
    }
    Ok(modules.iter().map(|m| done[m].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::tests::corpus;

    fn corpus_options() -> CodegenOptions {
        let mut o = CodegenOptions::default();
        for (k, v) in [
            ("ACCOUNT.read", "balance"),
            ("ACCOUNT-SYSTEM.account", "getAcc"),
            ("ACCOUNT-SYSTEM.balance", "getBalance"),
        ] {
            o.method_names.insert(k.into(), v.into());
        }
        o
    }

    fn translate(files: &[&str], module: &str) -> Translation {
        let set = corpus(files);
        translate_modules(
            &set,
            &[module.to_string()],
            &corpus_options(),
            ExecMode::Sequential,
        )
        .unwrap()
        .remove(0)
    }

    fn golden(name: &str) -> String {
        std::fs::read_to_string(format!(
            "{}/../../corpus/golden/{name}",
            env!("CARGO_MANIFEST_DIR")
        ))
        .unwrap()
    }

    #[test]
    fn account_matches_golden() {
        let t = translate(&["account.cafe"], "ACCOUNT");
        assert_eq!(emit_java_jml(&t.class), golden("Account.java"));
        assert!(t.warnings.is_empty(), "{:?}", t.warnings);
    }

    #[test]
    fn account_system_matches_golden() {
        let t = translate(&["account.cafe", "account_sys.cafe"], "ACCOUNT-SYSTEM");
        assert_eq!(emit_java_jml(&t.class), golden("AccountSystem.java"));
    }

    #[test]
    fn schema_counts() {
        let t = translate(&["account.cafe"], "ACCOUNT");
        let kinds: Vec<MethodKind> = t.class.methods.iter().map(|m| m.kind).collect();
        use MethodKind::*;
        assert_eq!(
            kinds,
            vec![Observer, Constructor, Equals, DeepCopy, Transition]
        );
        assert_eq!(t.class.method("add").unwrap().cases.len(), 2);
        let sys = translate(&["account.cafe", "account_sys.cafe"], "ACCOUNT-SYSTEM");
        assert_eq!(
            sys.class
                .methods
                .iter()
                .filter(|m| m.kind == Transition)
                .count(),
            4
        );
        assert!(sys
            .class
            .methods
            .iter()
            .filter(|m| m.kind == Transition)
            .all(|m| m.cases.len() == 1));
    }

    #[test]
    fn inheritance_extends_parent() {
        let t = translate(&["account.cafe", "extra/savings.cafe"], "SAVINGS");
        let text = emit_java_jml(&t.class);
        assert!(
            text.starts_with("public class Savings extends Account {"),
            "{text}"
        );
        assert!(
            !text.contains("int balance()"),
            "inherited observer re-emitted:\n{text}"
        );
        assert!(text.contains("//@ ensures balance() == 0;"), "{text}");
        assert!(
            text.contains("\\result.balance() == temp.balance()"),
            "{text}"
        );
        let t2 = translate(
            &["account.cafe", "extra/savings_redeclared.cafe"],
            "SAVINGS2",
        );
        let text = emit_java_jml(&t2.class);
        assert!(text.contains("public /*@ pure @*/ int balance()"), "{text}");
        assert!(text.contains("//@ ensures balance() == 100;"), "{text}");
    }

    #[test]
    fn no_subsort_no_extends() {
        let t = translate(&["account.cafe"], "ACCOUNT");
        assert!(t.class.extends.is_none());
    }

    #[test]
    fn two_parameter_observer() {
        let t = translate(&["extra/grid.cafe"], "GRID");
        let cell = t.class.method("cell").unwrap();
        assert_eq!(cell.params.len(), 2);
        let eq = t.class.method("equals").unwrap();
        assert_eq!(
            eq.cases[0].ensures[0].to_string(),
            "(\\forall int d1, d2; this.cell(d1, d2) == another.cell(d1, d2)) ==> (\\result == true)"
        );
        let text = emit_java_jml(&t.class);
        assert!(
            text.contains("public Grid put(int x1, int x2, int x3)"),
            "{text}"
        );
        assert!(
            text.contains("//@ ensures (\\forall int d1, d2; cell(d1, d2) == 0);"),
            "{text}"
        );
    }

    #[test]
    fn static_composite() {
        let t = translate(&["account.cafe", "extra/pair.cafe"], "PAIR");
        let text = emit_java_jml(&t.class);
        assert!(
            text.contains("public /*@ pure @*/ Account getLeft() {"),
            "{text}"
        );
        assert!(
            text.contains("//@ requires this.getLeft() != null;"),
            "{text}"
        );
        assert!(
            text.contains("\\result.getLeft().equals(temp.getLeft().add(x))"),
            "{text}"
        );
        assert!(
            text.contains("\\result == this.getLeft().balance() + this.getRight().balance()"),
            "{text}"
        );
        assert!(
            text.contains("//@ ensures this.getLeft().equals(new Account());"),
            "{text}"
        );
    }

    #[test]
    fn missing_component_class() {
        let set = corpus(&["account.cafe", "account_sys.cafe"]);
        let model = classify(&set, "ACCOUNT-SYSTEM").unwrap();
        let err = translate_composite(&set, &model, &[], &CodegenOptions::default()).unwrap_err();
        assert_eq!(err, CodegenError::ComponentClassMissing("ACCOUNT".into()));
    }

    #[test]
    fn unmapped_sort() {
        let src =
            "mod* M { pr(INT) [ Money ] op m0 : -> Money *[ H ]* op h : -> H bop v : H -> Money }";
        let set = crate::parser::parse_sources(&[("m".into(), src.into())]).unwrap();
        let err = translate_modules(
            &set,
            &["M".into()],
            &CodegenOptions::default(),
            ExecMode::Sequential,
        )
        .unwrap_err();
        assert!(
            matches!(err.1, CodegenError::UnmappedSort { ref sort, .. } if sort == "Money"),
            "{err:?}"
        );
        let mut opts = CodegenOptions::default();
        opts.sorts.insert("Money", "long");
        let t = translate_modules(&set, &["M".into()], &opts, ExecMode::Sequential).unwrap();
        assert!(emit_java_jml(&t[0].class).contains("public /*@ pure @*/ long v() {"));
    }

    #[test]
    fn zero_transitions_have_no_ghost() {
        let src = "mod* M { pr(INT) *[ H ]* op h : -> H bop v : H -> Int eq v(h) = 1 . }";
        let set = crate::parser::parse_sources(&[("m".into(), src.into())]).unwrap();
        let t = translate_modules(
            &set,
            &["M".into()],
            &CodegenOptions::default(),
            ExecMode::Sequential,
        )
        .unwrap();
        assert!(t[0].class.ghosts.is_empty());
        assert!(!emit_java_jml(&t[0].class).contains("ghost"));
    }

    #[test]
    fn impure_contract_rejected() {
        let t = translate(&["account.cafe"], "ACCOUNT");
        let mut cls = t.class.clone();
        let bad = expr::Expr::This
            .method("add", vec![expr::Expr::int(1)])
            .eq(expr::Expr::This);
        cls.methods[1].cases[0].ensures.push(bad);
        assert!(matches!(
            validate(&cls, &[]),
            Err(CodegenError::Impure { .. })
        ));
        assert!(validate(&t.class, &[]).is_ok());
    }

    #[test]
    fn modes_agree() {
        let set = corpus(&["account.cafe", "account_sys.cafe", "extra/pair.cafe"]);
        let mods: Vec<String> = ["ACCOUNT", "ACCOUNT-SYSTEM", "PAIR"]
            .map(String::from)
            .to_vec();
        let a = translate_modules(&set, &mods, &corpus_options(), ExecMode::Sequential).unwrap();
        let b = translate_modules(&set, &mods, &corpus_options(), ExecMode::Parallel).unwrap();
        let text = |v: &[Translation]| {
            v.iter()
                .map(|t| emit_java_jml(&t.class))
                .collect::<Vec<_>>()
        };
        assert_eq!(text(&a), text(&b));
    }
}
