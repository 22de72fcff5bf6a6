//! Source printer. Output re-parses to a structurally equal module.

use std::fmt::Write;

use crate::ast::{Equation, Semantics, SortKind, SpecModule};

pub fn print_module(m: &SpecModule) -> String {
    let mut out = String::new();
    let kw = match m.semantics {
        Semantics::Loose => "mod*",
        Semantics::Tight => "mod!",
    };
    writeln!(out, "{kw} {} {{", m.name).unwrap();
    for i in &m.imports {
        writeln!(out, "  pr({})", i.module).unwrap();
    }
    for s in &m.sorts {
        let (open, close) = match s.kind {
            SortKind::Visible => ("[", "]"),
            SortKind::Hidden => ("*[", "]*"),
        };
        if s.supersorts.is_empty() {
            writeln!(out, "  {open} {} {close}", s.name).unwrap();
        } else {
            writeln!(
                out,
                "  {open} {} < {} {close}",
                s.name,
                s.supersorts.join(" ")
            )
            .unwrap();
        }
    }
    for o in &m.operators {
        let kw = if o.behavioral { "bop" } else { "op" };
        let arity = if o.arity.is_empty() {
            String::new()
        } else {
            format!("{} ", o.arity.join(" "))
        };
        writeln!(out, "  {kw} {} : {arity}-> {}", o.name, o.coarity).unwrap();
    }
    for v in &m.variables {
        writeln!(out, "  var {} : {}", v.name, v.sort).unwrap();
    }
    for e in &m.equations {
        writeln!(out, "  {}", print_equation(e)).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn print_equation(e: &Equation) -> String {
    let label = e
        .label
        .as_ref()
        .map(|l| format!("[{l}]: "))
        .unwrap_or_default();
    match &e.condition {
        None => format!("eq {label}{} = {} .", e.lhs, e.rhs),
        Some(c) => format!("ceq {label}{} = {} if {c} .", e.lhs, e.rhs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_source;

    #[test]
    fn corpus_round_trips() {
        for src in [
            include_str!("../../../../corpus/account.cafe"),
            include_str!("../../../../corpus/account_sys.cafe"),
        ] {
            let m = &parse_source(src, "a.cafe").unwrap()[0];
            let again = &parse_source(&print_module(m), "b.cafe").unwrap()[0];
            assert_eq!(m.without_spans(), again.without_spans());
        }
    }

    #[test]
    fn labels_and_subsorts_round_trip() {
        let src =
            "mod! M { pr(INT) [ A < Int ] op f : A -> Int var X : A eq [one]: f(X) = -(1 - 2) . }";
        let m = &parse_source(src, "a.cafe").unwrap()[0];
        let printed = print_module(m);
        assert!(printed.contains("eq [one]: f(X) = -(1 - 2) ."), "{printed}");
        assert_eq!(
            parse_source(&printed, "b").unwrap()[0].without_spans(),
            m.without_spans()
        );
    }
}
