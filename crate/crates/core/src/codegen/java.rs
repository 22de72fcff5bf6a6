//! Java source with JML annotations.

use std::fmt::Write as _;

use super::model::{Assignable, ContractClass, ContractMethod, MethodKind};

const INDENT: &str = "    ";

fn contract_lines(m: &ContractMethod) -> Vec<String> {
    let mut lines = Vec::new();
    for (i, case) in m.cases.iter().enumerate() {
        if i > 0 {
            lines.push("also".to_string());
        }
        for r in &case.requires {
            lines.push(format!("requires {r};"));
        }
        for e in &case.ensures {
            lines.push(format!("ensures {e};"));
        }
        match &case.assignable {
            Some(Assignable::Nothing) => lines.push("assignable \\nothing;".to_string()),
            Some(Assignable::Fields(fs)) => lines.push(format!("assignable {};", fs.join(", "))),
            None => {}
        }
    }
    lines
}

fn write_contract(out: &mut String, m: &ContractMethod) {
    let mut lines = contract_lines(m);
    if lines.is_empty() {
        return;
    }
    if m.cases.len() == 1 && !m.normal_behavior {
        for l in lines {
            writeln!(out, "{INDENT}//@ {l}").unwrap();
        }
        return;
    }
    if m.normal_behavior {
        lines.insert(0, "public normal_behavior".to_string());
    }
    writeln!(out, "{INDENT}/*@ {}", lines[0]).unwrap();
    for l in &lines[1..] {
        writeln!(out, "{INDENT}  @ {l}").unwrap();
    }
    writeln!(out, "{INDENT}  @*/").unwrap();
}

fn signature(cls: &ContractClass, m: &ContractMethod) -> String {
    let params: Vec<String> = m
        .params
        .iter()
        .map(|p| format!("{} {}", p.ty, p.name))
        .collect();
    let params = params.join(", ");
    let ret = m.return_type.as_deref().unwrap_or("void");
    match m.kind {
        MethodKind::Constructor | MethodKind::DeepCopy => format!("public {}({params})", cls.name),
        MethodKind::Factory => format!("public static {ret} {}({params})", m.name),
        _ if m.pure => format!("public /*@ pure @*/ {ret} {}({params})", m.name),
        _ => format!("public {ret} {}({params})", m.name),
    }
}

fn write_method(out: &mut String, cls: &ContractClass, m: &ContractMethod) {
    write_contract(out, m);
    writeln!(out, "{INDENT}{} {{", signature(cls, m)).unwrap();
    for stmt in &m.preamble {
        writeln!(out, "{INDENT}{INDENT}//@ {stmt}").unwrap();
    }
    writeln!(out, "{INDENT}{INDENT}// TODO: implement").unwrap();
    if let Some(p) = &m.placeholder {
        writeln!(out, "{INDENT}{INDENT}return {p};").unwrap();
    }
    writeln!(out, "{INDENT}}}").unwrap();
}

/// One compilation unit: LF line endings, four-space indentation, members
/// separated by blank lines.
pub fn emit_java_jml(cls: &ContractClass) -> String {
    let mut out = String::new();
    match &cls.extends {
        Some(p) => writeln!(out, "public class {} extends {p} {{", cls.name).unwrap(),
        None => writeln!(out, "public class {} {{", cls.name).unwrap(),
    }
    for g in &cls.ghosts {
        writeln!(out).unwrap();
        writeln!(out, "{INDENT}//@ public ghost {} {};", g.ty, g.name).unwrap();
    }
    for m in &cls.methods {
        writeln!(out).unwrap();
        write_method(&mut out, cls, m);
    }
    out.push_str("}\n");
    out
}

/// Collapses layout differences: comment markers, leading `@`, and runs of
/// whitespace. Two renderings of the same contracts normalize equally.
pub fn normalize_java(text: &str) -> String {
    let mut words = Vec::new();
    for line in text.lines() {
        let mut l = line.trim();
        for marker in ["//@", "/*@", "@*/"] {
            if let Some(rest) = l.strip_prefix(marker) {
                l = rest.trim_start();
            }
        }
        if let Some(rest) = l.strip_prefix('@') {
            l = rest.trim_start();
        }
        let l = l.strip_suffix("@*/").unwrap_or(l);
        words.extend(l.split_whitespace().map(str::to_string));
    }
    words.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::expr::Expr;
    use crate::codegen::model::{ContractCase, Param};

    #[test]
    fn empty_class() {
        assert_eq!(
            emit_java_jml(&ContractClass::new("Empty", "EMPTY")),
            "public class Empty {\n}\n"
        );
    }

    #[test]
    fn block_contract_for_two_cases() {
        let mut cls = ContractClass::new("C", "C");
        let mut m = ContractMethod::new("t", MethodKind::Transition);
        m.return_type = Some("C".into());
        m.params.push(Param {
            name: "x".into(),
            ty: "int".into(),
        });
        m.placeholder = Some("this".into());
        let p = Expr::name("p");
        m.cases.push(ContractCase {
            requires: vec![p.clone()],
            ensures: vec![Expr::Result.eq(Expr::This)],
            assignable: None,
        });
        m.cases.push(ContractCase {
            requires: vec![p.negate()],
            ensures: vec![],
            assignable: Some(Assignable::Nothing),
        });
        cls.methods.push(m);
        let text = emit_java_jml(&cls);
        let expected = "public class C {\n\n    /*@ requires p;\n      @ ensures \\result == this;\n      @ also\n      @ requires !p;\n      @ assignable \\nothing;\n      @*/\n    public C t(int x) {\n        // TODO: implement\n        return this;\n    }\n}\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn normalization_ignores_comment_style() {
        let a = "    /*@ requires p;\n      @ ensures q;\n      @*/\n    public void m() {}";
        let b = "//@ requires p;\n//@ ensures   q;\npublic void m() {}";
        assert_eq!(normalize_java(a), normalize_java(b));
        assert_ne!(
            normalize_java(a),
            normalize_java("//@ requires q;\npublic void m() {}")
        );
    }
}
