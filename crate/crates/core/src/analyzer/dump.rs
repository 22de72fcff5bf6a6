//! Versioned JSON rendering of an [`OtsModel`]. Field order is fixed by the
//! struct declarations below; see `docs/model-dump.md` for the schema.

use serde::Serialize;

use super::{ObserverSpec, OtsModel, StateOp};
use crate::ast::EquationRef;
use crate::parser::pretty::print_equation;

pub const SCHEMA: &str = "ots-model/1";

#[derive(Serialize)]
struct Doc<'a> {
    schema: &'static str,
    module: &'a str,
    hidden_sort: &'a str,
    extends: Option<Extends<'a>>,
    observers: Vec<Observer<'a>>,
    inherited_observers: Vec<Observer<'a>>,
    initial_states: &'a [String],
    transitions: Vec<Transition<'a>>,
    projections: Vec<Projection<'a>>,
    absent_values: Vec<Absent<'a>>,
    auxiliary_ops: Vec<Aux<'a>>,
}

#[derive(Serialize)]
struct Extends<'a> {
    module: &'a str,
    sort: &'a str,
}

#[derive(Serialize)]
struct Observer<'a> {
    name: &'a str,
    declared_in: &'a str,
    params: Vec<String>,
    result: &'a str,
    chain_defined: bool,
    equations: Vec<Eq<'a>>,
}

#[derive(Serialize)]
struct Transition<'a> {
    name: &'a str,
    params: Vec<String>,
    effective_condition: Option<Condition<'a>>,
    equations: Vec<Eq<'a>>,
}

#[derive(Serialize)]
struct Condition<'a> {
    op: &'a str,
    equation: Option<Eq<'a>>,
}

#[derive(Serialize)]
struct Projection<'a> {
    name: &'a str,
    id_sorts: Vec<String>,
    component_module: &'a str,
    component_sort: &'a str,
    equations: Vec<Eq<'a>>,
}

#[derive(Serialize)]
struct Absent<'a> {
    name: &'a str,
    sort: &'a str,
    component_module: &'a str,
}

#[derive(Serialize)]
struct Aux<'a> {
    name: &'a str,
    arity: &'a [String],
    coarity: &'a str,
}

#[derive(Serialize)]
struct Eq<'a> {
    module: &'a str,
    index: usize,
    text: String,
}

fn eqs(list: &[EquationRef]) -> Vec<Eq<'_>> {
    list.iter().map(eq).collect()
}

fn eq(e: &EquationRef) -> Eq<'_> {
    Eq {
        module: &e.module,
        index: e.index,
        text: print_equation(&e.equation),
    }
}

fn params(op: &StateOp) -> Vec<String> {
    op.param_sorts()
}

fn observer(o: &ObserverSpec) -> Observer<'_> {
    Observer {
        name: &o.op.name,
        declared_in: &o.op.module,
        params: params(&o.op),
        result: &o.op.coarity,
        chain_defined: o.chain_defined,
        equations: eqs(&o.equations),
    }
}

/// The model as a JSON value.
pub fn dump_model_json(m: &OtsModel) -> serde_json::Value {
    let doc = Doc {
        schema: SCHEMA,
        module: &m.module_name,
        hidden_sort: &m.hidden_sort,
        extends: m
            .extends_module
            .as_deref()
            .zip(m.extends_sort.as_deref())
            .map(|(module, sort)| Extends { module, sort }),
        observers: m.observers.iter().map(observer).collect(),
        inherited_observers: m.inherited_observers.iter().map(observer).collect(),
        initial_states: &m.initial_states,
        transitions: m
            .transitions
            .iter()
            .map(|t| Transition {
                name: &t.op.name,
                params: params(&t.op),
                effective_condition: t.effective_condition.as_ref().map(|c| Condition {
                    op: &c.op,
                    equation: c.equation.as_ref().map(eq),
                }),
                equations: eqs(&t.equations),
            })
            .collect(),
        projections: m
            .projections
            .iter()
            .map(|p| Projection {
                name: &p.op.name,
                id_sorts: p.id_sorts(),
                component_module: &p.component_module,
                component_sort: &p.component_hidden_sort,
                equations: eqs(&p.equations),
            })
            .collect(),
        absent_values: m
            .absent_values
            .iter()
            .map(|a| Absent {
                name: &a.name,
                sort: &a.sort,
                component_module: &a.component_module,
            })
            .collect(),
        auxiliary_ops: m
            .auxiliary_ops
            .iter()
            .map(|o| Aux {
                name: &o.name,
                arity: &o.arity,
                coarity: &o.coarity,
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("model serializes")
}

/// Pretty-printed JSON with a trailing newline.
pub fn dump_model(m: &OtsModel) -> String {
    let mut s = serde_json::to_string_pretty(&dump_model_json(m)).expect("model serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::classify;
    use crate::analyzer::tests::corpus;

    #[test]
    fn account_dump_shape() {
        let set = corpus(&["account.cafe"]);
        let v = dump_model_json(&classify(&set, "ACCOUNT").unwrap());
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["observers"].as_array().unwrap().len(), 1);
        assert_eq!(v["transitions"][0]["effective_condition"]["op"], "c-add");
        assert_eq!(
            v["transitions"][0]["effective_condition"]["equation"]["text"],
            "eq c-add(A, I) = read(A) + I >= 0 ."
        );
    }

    #[test]
    fn empty_model_has_empty_arrays() {
        let set =
            crate::parser::parse_sources(&[("e".into(), "mod* E { *[ H ]* }".into())]).unwrap();
        let v = dump_model_json(&classify(&set, "E").unwrap());
        for key in [
            "observers",
            "initial_states",
            "transitions",
            "projections",
            "absent_values",
            "auxiliary_ops",
        ] {
            assert_eq!(v[key], serde_json::json!([]), "{key}");
        }
        assert!(v["extends"].is_null());
    }

    #[test]
    fn deterministic() {
        let set = corpus(&["account.cafe", "account_sys.cafe"]);
        let a = dump_model(&classify(&set, "ACCOUNT-SYSTEM").unwrap());
        let b = dump_model(&classify(&set, "ACCOUNT-SYSTEM").unwrap());
        assert_eq!(a, b);
        assert!(a.contains("\"component_module\": \"ACCOUNT\""));
    }
}
