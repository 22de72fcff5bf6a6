//! Builtin data modules: BOOL, INT and NAT.
//!
//! Their operators have no equations; the rewriter evaluates them natively.
//! `_==_` and `_=/=_` are polymorphic over visible sorts and are not listed
//! in any operator table.

use crate::ast::{
    Import, OperatorDecl, Semantics, SortDecl, SortKind, SpecModule, Term, BOOL, EQ_OP, INT, NAT,
    NE_OP,
};
use crate::diag::SourceSpan;

pub const PRELUDE_MODULES: &[&str] = &["BOOL", "INT", "NAT"];

pub fn is_prelude_module(name: &str) -> bool {
    PRELUDE_MODULES.contains(&name)
}

pub fn is_builtin_sort(sort: &str) -> bool {
    matches!(sort, BOOL | INT | NAT)
}

/// Operators with native evaluation, by name and argument count.
pub fn is_builtin_op(op: &str, argc: usize) -> bool {
    matches!(
        (op, argc),
        ("true" | "false", 0)
            | ("not" | "-_", 1)
            | (
                "_and_" | "_or_" | "_+_" | "_-_" | "_>=_" | "_>_" | "_<=_" | "_<_",
                2
            )
    ) || (argc == 2 && (op == EQ_OP || op == NE_OP))
}

/// Evaluates a builtin application whose arguments are already values.
/// Returns `None` when the arguments are not (yet) values of the right kind.
pub fn eval_builtin(op: &str, args: &[Term]) -> Option<Term> {
    let int = |t: &Term| match t {
        Term::Int(n) => Some(*n),
        _ => None,
    };
    match (op, args) {
        ("not", [a]) => a.as_bool().map(|b| Term::bool(!b)),
        ("-_", [a]) => int(a).and_then(i64::checked_neg).map(Term::Int),
        ("_and_", [a, b]) => Some(Term::bool(a.as_bool()? && b.as_bool()?)),
        ("_or_", [a, b]) => Some(Term::bool(a.as_bool()? || b.as_bool()?)),
        ("_+_", [a, b]) => int(a)?.checked_add(int(b)?).map(Term::Int),
        ("_-_", [a, b]) => int(a)?.checked_sub(int(b)?).map(Term::Int),
        ("_>=_", [a, b]) => Some(Term::bool(int(a)? >= int(b)?)),
        ("_>_", [a, b]) => Some(Term::bool(int(a)? > int(b)?)),
        ("_<=_", [a, b]) => Some(Term::bool(int(a)? <= int(b)?)),
        ("_<_", [a, b]) => Some(Term::bool(int(a)? < int(b)?)),
        (EQ_OP | NE_OP, [a, b]) => {
            let equal = value_eq(a, b)?;
            Some(Term::bool(if op == EQ_OP { equal } else { !equal }))
        }
        _ => None,
    }
}

fn value_eq(a: &Term, b: &Term) -> Option<bool> {
    match (a, b) {
        (Term::Int(x), Term::Int(y)) => Some(x == y),
        (Term::Ident { value: x, .. }, Term::Ident { value: y, .. }) => Some(x == y),
        (Term::Ident { value: x, .. }, Term::Int(y))
        | (Term::Int(y), Term::Ident { value: x, .. }) => Some(x == y),
        _ => match (a.as_bool(), b.as_bool()) {
            (Some(x), Some(y)) => Some(x == y),
            _ => None,
        },
    }
}

pub fn modules() -> Vec<SpecModule> {
    let span = SourceSpan::builtin();
    let sort = |name: &str, supers: &[&str]| SortDecl {
        name: name.to_string(),
        kind: SortKind::Visible,
        supersorts: supers.iter().map(|s| s.to_string()).collect(),
        span: span.clone(),
    };
    let op = |name: &str, arity: &[&str], coarity: &str| OperatorDecl {
        name: name.to_string(),
        arity: arity.iter().map(|s| s.to_string()).collect(),
        coarity: coarity.to_string(),
        behavioral: false,
        span: span.clone(),
    };
    let import = |name: &str| Import {
        module: name.to_string(),
        span: span.clone(),
    };

    let mut bool_mod = SpecModule::new("BOOL", Semantics::Tight, span.clone());
    bool_mod.sorts.push(sort(BOOL, &[]));
    bool_mod.operators.extend([
        op("true", &[], BOOL),
        op("false", &[], BOOL),
        op("not", &[BOOL], BOOL),
        op("_and_", &[BOOL, BOOL], BOOL),
        op("_or_", &[BOOL, BOOL], BOOL),
    ]);

    let mut int_mod = SpecModule::new("INT", Semantics::Tight, span.clone());
    int_mod.imports.push(import("BOOL"));
    int_mod.sorts.push(sort(INT, &[]));
    int_mod.sorts.push(sort(NAT, &[INT]));
    int_mod.operators.extend([
        op("-_", &[INT], INT),
        op("_+_", &[INT, INT], INT),
        op("_-_", &[INT, INT], INT),
        op("_>=_", &[INT, INT], BOOL),
        op("_>_", &[INT, INT], BOOL),
        op("_<=_", &[INT, INT], BOOL),
        op("_<_", &[INT, INT], BOOL),
    ]);

    let mut nat_mod = SpecModule::new("NAT", Semantics::Tight, span.clone());
    nat_mod.imports.push(import("INT"));

    vec![bool_mod, int_mod, nat_mod]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_comparison() {
        assert_eq!(
            eval_builtin("_+_", &[Term::Int(2), Term::Int(3)]),
            Some(Term::Int(5))
        );
        assert_eq!(eval_builtin("-_", &[Term::Int(3)]), Some(Term::Int(-3)));
        assert_eq!(
            eval_builtin("_>=_", &[Term::Int(-1), Term::Int(0)]),
            Some(Term::bool(false))
        );
        assert_eq!(
            eval_builtin(EQ_OP, &[Term::bool(true), Term::bool(true)]),
            Some(Term::bool(true))
        );
        assert_eq!(
            eval_builtin(NE_OP, &[Term::Int(1), Term::Int(2)]),
            Some(Term::bool(true))
        );
    }

    #[test]
    fn non_values_do_not_evaluate() {
        assert_eq!(
            eval_builtin("_+_", &[Term::constant("x"), Term::Int(3)]),
            None
        );
        assert_eq!(
            eval_builtin("_+_", &[Term::Int(i64::MAX), Term::Int(1)]),
            None
        );
    }
}
