//! Contracts may only query: every call must reach a pure method, except
//! transition calls on the ghost pre-state or on freshly built objects.

use super::expr::Expr;
use super::model::{ContractClass, ContractMethod, MethodKind};
use super::translate::CodegenError;

struct Checker<'a> {
    cls: &'a ContractClass,
    known: &'a [&'a ContractClass],
    ghosts: Vec<&'a str>,
}

/// Where a receiver chain starts. Only `Ghost` and `Fresh` chains may call
/// transitions.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Root {
    Live,
    Ghost,
    Fresh,
}

impl<'a> Checker<'a> {
    fn class(&self, name: &str) -> Option<&'a ContractClass> {
        if name == self.cls.name {
            return Some(self.cls);
        }
        self.known.iter().copied().find(|c| c.name == name)
    }

    /// Looks a method up in `class` and its ancestors.
    fn lookup(&self, class: &str, method: &str, argc: usize) -> Option<&'a ContractMethod> {
        let mut cur = self.class(class);
        while let Some(c) = cur {
            if let Some(m) = c
                .methods
                .iter()
                .find(|m| m.name == method && m.params.len() == argc && !m.is_constructor())
            {
                return Some(m);
            }
            cur = c.extends.as_deref().and_then(|p| self.class(p));
        }
        None
    }

    /// Static type and root of a receiver expression.
    fn receiver(
        &self,
        e: &Expr,
        m: &ContractMethod,
        scope: &[String],
    ) -> Result<(Option<String>, Root), String> {
        match e {
            Expr::This | Expr::Result => Ok((Some(self.cls.name.clone()), Root::Live)),
            Expr::Name { name } if self.ghosts.contains(&name.as_str()) => {
                Ok((Some(self.cls.name.clone()), Root::Ghost))
            }
            Expr::Name { name } => match m.params.iter().find(|p| p.name == *name) {
                Some(p) => Ok((Some(p.ty.clone()), Root::Live)),
                None if scope.contains(name) => Ok((None, Root::Live)),
                // A class name: static factory call.
                None if self.class(name).is_some() => Ok((Some(name.clone()), Root::Fresh)),
                None => Err(format!("unknown name `{name}`")),
            },
            Expr::New { class, .. } => Ok((Some(class.clone()), Root::Fresh)),
            Expr::Call {
                receiver,
                method,
                args,
            } => {
                let (class, root) = match receiver {
                    Some(r) => self.receiver(r, m, scope)?,
                    None => (Some(self.cls.name.clone()), Root::Live),
                };
                let class = class.ok_or_else(|| format!("`{method}` called on a value"))?;
                let target = self
                    .lookup(&class, method, args.len())
                    .ok_or_else(|| format!("`{class}` has no method `{method}`"))?;
                let query = target.pure || target.kind == MethodKind::Equals;
                let fresh = target.kind == MethodKind::Factory;
                if !query && !fresh && root == Root::Live {
                    return Err(format!("`{e}` calls `{method}`, which may change state"));
                }
                let root = if fresh { Root::Fresh } else { root };
                Ok((target.return_type.clone(), root))
            }
            _ => Ok((None, Root::Live)),
        }
    }

    fn check(&self, e: &Expr, m: &ContractMethod, scope: &mut Vec<String>) -> Result<(), String> {
        match e {
            Expr::Call { args, .. } => {
                self.receiver(e, m, scope)?;
                for a in args {
                    self.check(a, m, scope)?;
                }
                if let Expr::Call {
                    receiver: Some(r), ..
                } = e
                {
                    self.check(r, m, scope)?;
                }
                Ok(())
            }
            Expr::Name { .. } => self.receiver(e, m, scope).map(|_| ()),
            Expr::New { args, .. } => args.iter().try_for_each(|a| self.check(a, m, scope)),
            Expr::Not { operand } | Expr::Neg { operand } => self.check(operand, m, scope),
            Expr::Binary { lhs, rhs, .. } => {
                self.check(lhs, m, scope)?;
                self.check(rhs, m, scope)
            }
            Expr::Forall { binders, body } => {
                let n = scope.len();
                scope.extend(binders.iter().map(|b| b.name.clone()));
                let r = self.check(body, m, scope);
                scope.truncate(n);
                r
            }
            _ => Ok(()),
        }
    }
}

/// Checks every clause of `cls`; `known` holds the classes it may call into.
pub fn validate(cls: &ContractClass, known: &[&ContractClass]) -> Result<(), CodegenError> {
    let checker = Checker {
        cls,
        known,
        ghosts: cls.ghosts.iter().map(|g| g.name.as_str()).collect(),
    };
    for m in &cls.methods {
        for case in &m.cases {
            for e in case.requires.iter().chain(&case.ensures) {
                let mut scope = Vec::new();
                checker
                    .check(e, m, &mut scope)
                    .map_err(|detail| CodegenError::Impure {
                        class: cls.name.clone(),
                        method: m.name.clone(),
                        detail,
                    })?;
            }
        }
    }
    Ok(())
}
