//! Backend-neutral contract expressions and their JML rendering.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BinOp {
    Add,
    Sub,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "==>",
        }
    }

    fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }

    fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub)
    }

    /// The comparison that holds exactly when this one does not.
    fn complement(self) -> Option<BinOp> {
        Some(match self {
            BinOp::Eq => BinOp::Ne,
            BinOp::Ne => BinOp::Eq,
            BinOp::Lt => BinOp::Ge,
            BinOp::Ge => BinOp::Lt,
            BinOp::Gt => BinOp::Le,
            BinOp::Le => BinOp::Gt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expr {
    Int {
        value: i64,
    },
    Bool {
        value: bool,
    },
    Null,
    This,
    Result,
    /// A method parameter, quantifier binder or ghost field.
    Name {
        name: String,
    },
    /// `receiver.method(args)`, or an unqualified call without receiver.
    Call {
        receiver: Option<Box<Expr>>,
        method: String,
        args: Vec<Expr>,
    },
    New {
        class: String,
        args: Vec<Expr>,
    },
    Not {
        operand: Box<Expr>,
    },
    Neg {
        operand: Box<Expr>,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Forall {
        binders: Vec<Binder>,
        body: Box<Expr>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Binder {
    pub ty: String,
    pub name: String,
}

impl Expr {
    pub fn int(value: i64) -> Expr {
        Expr::Int { value }
    }

    pub fn name(name: &str) -> Expr {
        Expr::Name {
            name: name.to_string(),
        }
    }

    pub fn call(receiver: Option<Expr>, method: &str, args: Vec<Expr>) -> Expr {
        Expr::Call {
            receiver: receiver.map(Box::new),
            method: method.to_string(),
            args,
        }
    }

    pub fn method(self, method: &str, args: Vec<Expr>) -> Expr {
        Expr::call(Some(self), method, args)
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn eq(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Eq, self, rhs)
    }

    pub fn ne(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Ne, self, rhs)
    }

    pub fn implies(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Implies, self, rhs)
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn and_all(items: Vec<Expr>) -> Option<Expr> {
        items
            .into_iter()
            .reduce(|a, b| Expr::binary(BinOp::And, a, b))
    }

    pub fn forall(binders: Vec<Binder>, body: Expr) -> Expr {
        if binders.is_empty() {
            body
        } else {
            Expr::Forall {
                binders,
                body: Box::new(body),
            }
        }
    }

    /// Logical negation, pushing through comparisons and double negation.
    pub fn negate(self) -> Expr {
        match self {
            Expr::Binary { op, lhs, rhs } if op.complement().is_some() => Expr::Binary {
                op: op.complement().unwrap(),
                lhs,
                rhs,
            },
            Expr::Not { operand } => *operand,
            Expr::Bool { value } => Expr::Bool { value: !value },
            e => Expr::Not {
                operand: Box::new(e),
            },
        }
    }

    /// Pre-order walk over every node.
    pub fn visit<'e>(&'e self, f: &mut dyn FnMut(&'e Expr)) {
        f(self);
        match self {
            Expr::Call { receiver, args, .. } => {
                if let Some(r) = receiver {
                    r.visit(f);
                }
                args.iter().for_each(|a| a.visit(f));
            }
            Expr::New { args, .. } => args.iter().for_each(|a| a.visit(f)),
            Expr::Not { operand } | Expr::Neg { operand } => operand.visit(f),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.visit(f);
                rhs.visit(f);
            }
            Expr::Forall { body, .. } => body.visit(f),
            _ => {}
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, parent: BinOp, right: bool) -> fmt::Result {
        let wrap = match self {
            Expr::Binary { op, .. } if parent.is_logical() => {
                !(*op == parent && matches!(op, BinOp::And | BinOp::Or))
            }
            Expr::Binary { op, .. } if parent.is_arithmetic() => !op.is_arithmetic() || right,
            Expr::Binary { op, .. } => !op.is_arithmetic(),
            _ => false,
        };
        if wrap {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int { value } => write!(f, "{value}"),
            Expr::Bool { value } => write!(f, "{value}"),
            Expr::Null => f.write_str("null"),
            Expr::This => f.write_str("this"),
            Expr::Result => f.write_str("\\result"),
            Expr::Name { name } => f.write_str(name),
            Expr::Call {
                receiver,
                method,
                args,
            } => {
                if let Some(r) = receiver {
                    match **r {
                        Expr::Binary { .. } | Expr::Not { .. } | Expr::Neg { .. } => {
                            write!(f, "({r}).")
                        }
                        _ => write!(f, "{r}."),
                    }?;
                }
                write!(f, "{method}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Expr::New { class, args } => {
                write!(f, "new {class}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Expr::Not { operand } => match **operand {
                Expr::Binary { .. } => write!(f, "!({operand})"),
                _ => write!(f, "!{operand}"),
            },
            Expr::Neg { operand } => match **operand {
                Expr::Binary { .. } | Expr::Neg { .. } => write!(f, "-({operand})"),
                Expr::Int { value } if value < 0 => write!(f, "-({operand})"),
                _ => write!(f, "-{operand}"),
            },
            Expr::Binary { op, lhs, rhs } => {
                lhs.write_operand(f, *op, false)?;
                write!(f, " {} ", op.symbol())?;
                rhs.write_operand(f, *op, true)
            }
            Expr::Forall { binders, body } => {
                // One declaration per quantifier: a run of same-typed binders,
                // nesting for the next type.
                let ty = &binders[0].ty;
                let n = binders.iter().take_while(|b| &b.ty == ty).count();
                let names: Vec<&str> = binders[..n].iter().map(|b| b.name.as_str()).collect();
                write!(f, "(\\forall {ty} {}; ", names.join(", "))?;
                if n < binders.len() {
                    let inner = Expr::Forall {
                        binders: binders[n..].to_vec(),
                        body: body.clone(),
                    };
                    write!(f, "{inner})")
                } else {
                    write!(f, "{body})")
                }
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, args: &[Expr]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn this_call(m: &str) -> Expr {
        Expr::This.method(m, vec![])
    }

    #[test]
    fn comparison_over_arithmetic() {
        let e = Expr::binary(
            BinOp::Ge,
            Expr::binary(BinOp::Add, this_call("balance"), Expr::name("x")),
            Expr::int(0),
        );
        assert_eq!(e.to_string(), "this.balance() + x >= 0");
        assert_eq!(e.negate().to_string(), "this.balance() + x < 0");
    }

    #[test]
    fn logical_operands_are_parenthesized() {
        let a = this_call("a").eq(Expr::int(1));
        let b = Expr::This.ne(Expr::name("another"));
        let c = Expr::call(None, "ok", vec![]);
        let e = Expr::and_all(vec![c, a, b]).unwrap();
        assert_eq!(
            e.to_string(),
            "ok() && (this.a() == 1) && (this != another)"
        );
        let imp = e
            .clone()
            .implies(Expr::Result.eq(Expr::Bool { value: true }));
        assert_eq!(
            imp.to_string(),
            "(ok() && (this.a() == 1) && (this != another)) ==> (\\result == true)"
        );
    }

    #[test]
    fn forall_groups_binders() {
        let b = |n: &str| Binder {
            ty: "int".into(),
            name: n.into(),
        };
        let body = Expr::call(None, "f", vec![Expr::name("d1"), Expr::name("d2")]).eq(Expr::int(0));
        let e = Expr::forall(vec![b("d1"), b("d2")], body.clone());
        assert_eq!(e.to_string(), "(\\forall int d1, d2; f(d1, d2) == 0)");
        let mixed = Expr::forall(
            vec![
                b("d1"),
                Binder {
                    ty: "boolean".into(),
                    name: "b".into(),
                },
            ],
            body,
        );
        assert_eq!(
            mixed.to_string(),
            "(\\forall int d1; (\\forall boolean b; f(d1, d2) == 0))"
        );
    }

    #[test]
    fn subtraction_and_negation() {
        let n = Expr::name("n");
        let sub = Expr::binary(
            BinOp::Sub,
            Expr::name("a"),
            Expr::binary(BinOp::Add, n.clone(), Expr::int(1)),
        );
        assert_eq!(sub.to_string(), "a - (n + 1)");
        assert_eq!(
            Expr::Neg {
                operand: Box::new(n)
            }
            .to_string(),
            "-n"
        );
        assert_eq!(
            Expr::Neg {
                operand: Box::new(Expr::int(-2))
            }
            .to_string(),
            "-(-2)"
        );
        let not = Expr::Not {
            operand: Box::new(Expr::binary(BinOp::And, Expr::name("p"), Expr::name("q"))),
        };
        assert_eq!(not.clone().negate().to_string(), "p && q");
        assert_eq!(not.to_string(), "!(p && q)");
    }
}
