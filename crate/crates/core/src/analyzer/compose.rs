//! Syntactic checks of the composition conditions and method grouping.
//!
//! The checks only look at equation shapes; they do not prove that the
//! composite behaves as the conjunction of its components.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{OtsModel, ProjectionSpec};
use crate::ast::{ModuleSet, Signature, Term};
use crate::diag::{DiagCode, Diagnostic, Diagnostics};

pub fn check_composition(
    composite: &OtsModel,
    components: &[OtsModel],
    set: &ModuleSet,
) -> Diagnostics {
    let mut diags = Diagnostics::new();
    let span = set
        .get(&composite.module_name)
        .map(|m| m.span.clone())
        .unwrap_or_else(crate::diag::SourceSpan::builtin);
    if composite.projections.is_empty() {
        diags.push(Diagnostic::error(
            DiagCode::CompositionPrecondition,
            span,
            format!(
                "`{}` has no projection, so it composes no objects",
                composite.module_name
            ),
        ));
        return diags;
    }
    for p in &composite.projections {
        if !components
            .iter()
            .any(|c| c.module_name == p.component_module)
        {
            diags.push(Diagnostic::error(
                DiagCode::CompositionPrecondition,
                span.clone(),
                format!(
                    "projection `{}` targets `{}`, which is not among the components",
                    p.op.name, p.component_module
                ),
            ));
        }
    }
    if diags.has_errors() {
        return diags;
    }
    let Ok(sig) = set.signature(&composite.module_name) else {
        return diags;
    };
    let module = set.get(&composite.module_name).expect("classified module");
    let ctx = Ctx {
        composite,
        components,
        sig: &sig,
        module,
    };
    for p in &composite.projections {
        ctx.projection_equations(p, &mut diags);
    }
    ctx.observer_equations(&mut diags);
    diags.sort();
    diags
}

struct Ctx<'a> {
    composite: &'a OtsModel,
    components: &'a [OtsModel],
    sig: &'a Signature,
    module: &'a crate::ast::SpecModule,
}

impl Ctx<'_> {
    fn component(&self, module: &str) -> &OtsModel {
        self.components
            .iter()
            .find(|c| c.module_name == module)
            .expect("checked above")
    }

    /// Conditions 1 and 3.
    fn projection_equations(&self, p: &ProjectionSpec, diags: &mut Diagnostics) {
        let comp = self.component(&p.component_module);
        for init in &self.composite.initial_states {
            let covered = p.equations.iter().any(|e| {
                p.op.split(&e.equation.lhs)
                    .is_some_and(|(s, _)| s.op_name() == Some(init))
            });
            if !covered {
                diags.push(Diagnostic::warning(
                    DiagCode::CompositionCondition3,
                    self.op_span(&p.op.name),
                    format!(
                        "no equation gives `{}` of initial state `{init}`",
                        p.op.name
                    ),
                ));
            }
        }
        for t in &self.composite.transitions {
            let covered = p.equations.iter().any(|e| {
                p.op.split(&e.equation.lhs)
                    .is_some_and(|(s, _)| t.op.split(s).is_some())
            });
            if !covered {
                diags.push(Diagnostic::warning(
                    DiagCode::CompositionCondition1,
                    self.op_span(&t.op.name),
                    format!(
                        "no equation says how transition `{}` changes `{}`",
                        t.op.name, p.op.name
                    ),
                ));
            }
        }
        for e in &p.equations {
            let eq = &e.equation;
            let (state, _) = p.op.split(&eq.lhs).expect("attached by head");
            if let Some(init) = state.op_name().filter(|n| {
                state.args().is_empty() && self.composite.initial_states.iter().any(|i| i == n)
            }) {
                if !self.is_component_constant(&eq.rhs, comp) {
                    diags.push(Diagnostic::warning(
                        DiagCode::CompositionCondition3,
                        eq.span.clone(),
                        format!(
                            "initial state `{init}` projects to `{}`, which is neither an initial state of {} nor an absent value",
                            eq.rhs, comp.module_name
                        ),
                    ));
                }
            } else if let Some(t) = self
                .composite
                .transitions
                .iter()
                .find(|t| t.op.split(state).is_some())
            {
                let (inner, _) = t.op.split(state).unwrap();
                if !self.is_component_update(&eq.rhs, inner, comp) {
                    diags.push(Diagnostic::warning(
                        DiagCode::CompositionCondition1,
                        eq.span.clone(),
                        format!(
                            "under transition `{}`, `{}` becomes `{}`, which is not a transition of {} applied to a projection",
                            t.op.name, p.op.name, eq.rhs, comp.module_name
                        ),
                    ));
                }
            } else {
                diags.push(Diagnostic::warning(
                    DiagCode::CompositionCondition1,
                    eq.span.clone(),
                    format!(
                        "cannot match `{}` to an initial-state or transition equation",
                        eq.lhs
                    ),
                ));
            }
        }
    }

    /// Condition 2.
    fn observer_equations(&self, diags: &mut Diagnostics) {
        for ob in &self.composite.observers {
            for e in &ob.equations {
                let eq = &e.equation;
                let (state, _) = ob.op.split(&eq.lhs).expect("attached by head");
                if !matches!(state, Term::Var { .. }) {
                    continue;
                }
                let mut uses_projection = false;
                let ok = self.is_observation(&eq.rhs, state, &mut uses_projection);
                if !ok || !uses_projection {
                    let why = if ok {
                        "mentions no projection"
                    } else {
                        "is not built from projections and component chains"
                    };
                    diags.push(Diagnostic::warning(
                        DiagCode::CompositionCondition2,
                        eq.span.clone(),
                        format!(
                            "definition of observer `{}` {why}: `{}`",
                            ob.op.name, eq.rhs
                        ),
                    ));
                }
            }
        }
    }

    fn op_span(&self, name: &str) -> crate::diag::SourceSpan {
        self.module
            .operators
            .iter()
            .find(|o| o.name == name)
            .map(|o| o.span.clone())
            .unwrap_or_else(|| self.module.span.clone())
    }

    fn is_component_constant(&self, t: &Term, comp: &OtsModel) -> bool {
        match t {
            Term::App { op, args } if args.is_empty() => {
                comp.initial_states.contains(op)
                    || self.composite.absent_values.iter().any(|a| &a.name == op)
            }
            _ => false,
        }
    }

    /// A component term reachable from the pre-state: a projection of it,
    /// a component constant, or component transitions applied to either.
    fn is_component_update(&self, t: &Term, pre: &Term, comp: &OtsModel) -> bool {
        if self.is_component_constant(t, comp) {
            return true;
        }
        if self.composite.projections.iter().any(|p| {
            p.op.split(t)
                .is_some_and(|(s, ids)| s == pre && ids.iter().all(|i| self.is_data(i)))
        }) {
            return true;
        }
        comp.transitions.iter().any(|ct| {
            ct.op.split(t).is_some_and(|(s, params)| {
                params.iter().all(|a| self.is_data(a)) && self.is_component_update(s, pre, comp)
            })
        })
    }

    /// A visible-sorted combination of component observations of chains.
    fn is_observation(&self, t: &Term, state: &Term, uses_projection: &mut bool) -> bool {
        for comp in self.components {
            for ob in comp.all_observers() {
                if let Some((s, params)) = ob.op.split(t) {
                    return self.is_chain(s, state, comp, uses_projection)
                        && params
                            .iter()
                            .all(|a| self.is_observation(a, state, uses_projection));
                }
            }
        }
        match t {
            Term::Var { sort, .. } => !self.sig.is_hidden(sort),
            Term::Int(_) | Term::Ident { .. } => true,
            Term::App { op, args } => {
                let hidden_result = self
                    .sig
                    .sort_of(t)
                    .map(|s| self.sig.is_hidden(&s))
                    .unwrap_or(true);
                !hidden_result
                    && self.composite.transition(op).is_none()
                    && args
                        .iter()
                        .all(|a| self.is_observation(a, state, uses_projection))
            }
        }
    }

    fn is_chain(
        &self,
        t: &Term,
        state: &Term,
        comp: &OtsModel,
        uses_projection: &mut bool,
    ) -> bool {
        if self.composite.projections.iter().any(|p| {
            p.op.split(t)
                .is_some_and(|(s, ids)| s == state && ids.iter().all(|i| self.is_data(i)))
        }) {
            *uses_projection = true;
            return true;
        }
        comp.transitions.iter().any(|ct| {
            ct.op.split(t).is_some_and(|(s, params)| {
                params.iter().all(|a| self.is_data(a))
                    && self.is_chain(s, state, comp, uses_projection)
            })
        })
    }

    fn is_data(&self, t: &Term) -> bool {
        self.sig
            .sort_of(t)
            .map(|s| !self.sig.is_hidden(&s))
            .unwrap_or(false)
    }
}

/// Transitions that change the same set of components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MethodGroup {
    /// Projection names whose projected state the transitions change.
    pub components: Vec<String>,
    pub transitions: Vec<String>,
    /// The transitions change several components at once.
    pub synchronized: bool,
    /// Some new component state is computed from another component's state.
    pub cross_dependent: bool,
}

pub fn method_groups(composite: &OtsModel) -> Vec<MethodGroup> {
    let mut groups: Vec<MethodGroup> = Vec::new();
    for t in &composite.transitions {
        let mut changed = BTreeSet::new();
        let mut cross = false;
        for p in &composite.projections {
            for e in &p.equations {
                let Some((state, ids)) = p.op.split(&e.equation.lhs) else {
                    continue;
                };
                let Some((inner, _)) = t.op.split(state) else {
                    continue;
                };
                let ids: Vec<Term> = ids.into_iter().cloned().collect();
                if e.equation.rhs != p.op.apply(inner.clone(), &ids) {
                    changed.insert(p.op.name.clone());
                }
                cross |= composite
                    .projections
                    .iter()
                    .any(|q| q.op.name != p.op.name && e.equation.rhs.contains_op(&q.op.name));
            }
        }
        let components: Vec<String> = changed.into_iter().collect();
        match groups.iter_mut().find(|g| g.components == components) {
            Some(g) => {
                g.transitions.push(t.op.name.clone());
                g.cross_dependent |= cross;
            }
            None => groups.push(MethodGroup {
                synchronized: components.len() > 1,
                components,
                transitions: vec![t.op.name.clone()],
                cross_dependent: cross,
            }),
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::classify;
    use crate::analyzer::tests::corpus;

    fn check(files: &[&str], composite: &str) -> Diagnostics {
        let set = corpus(files);
        let c = classify(&set, composite).unwrap();
        let account = classify(&set, "ACCOUNT").unwrap();
        check_composition(&c, &[account], &set)
    }

    #[test]
    fn account_system_is_clean() {
        assert!(check(&["account.cafe", "account_sys.cafe"], "ACCOUNT-SYSTEM").is_empty());
        assert!(check(&["account.cafe", "extra/pair.cafe"], "PAIR").is_empty());
    }

    #[test]
    fn negative_fixtures_hit_their_condition() {
        let cases = [
            (
                "negative/observer_ignores_projection.cafe",
                "BAD-OBSERVER",
                DiagCode::CompositionCondition2,
            ),
            (
                "negative/unmatched_transition.cafe",
                "BAD-TRANSITION",
                DiagCode::CompositionCondition1,
            ),
            (
                "negative/initial_not_constant.cafe",
                "BAD-INITIAL",
                DiagCode::CompositionCondition3,
            ),
        ];
        for (file, module, code) in cases {
            let d = check(&["account.cafe", file], module);
            assert_eq!(d.codes(), [code], "{module}: {d}");
            assert!(!d.has_errors());
        }
    }

    #[test]
    fn vacuous_composite() {
        let set = corpus(&["account.cafe"]);
        let m = classify(&set, "ACCOUNT").unwrap();
        assert_eq!(
            check_composition(&m, &[], &set).codes(),
            [DiagCode::CompositionPrecondition]
        );
    }

    #[test]
    fn groups() {
        let set = corpus(&["account.cafe", "account_sys.cafe", "extra/pair.cafe"]);
        let sys = method_groups(&classify(&set, "ACCOUNT-SYSTEM").unwrap());
        assert_eq!(sys.len(), 1);
        assert_eq!(sys[0].transitions, ["add", "del", "deposit", "withdraw"]);
        assert_eq!(sys[0].components, ["account"]);
        assert!(!sys[0].synchronized);

        let pair = method_groups(&classify(&set, "PAIR").unwrap());
        let shape: Vec<(Vec<String>, bool)> = pair
            .iter()
            .map(|g| (g.components.clone(), g.synchronized))
            .collect();
        assert_eq!(
            shape,
            vec![
                (vec!["left".to_string()], false),
                (vec!["right".to_string()], false),
                (vec!["left".to_string(), "right".to_string()], true)
            ]
        );
        let plain = method_groups(&classify(&set, "ACCOUNT").unwrap());
        assert_eq!((plain.len(), plain[0].components.len()), (1, 0));
        let empty =
            crate::parser::parse_sources(&[("e".into(), "mod* E { *[ H ]* }".into())]).unwrap();
        assert!(method_groups(&classify(&empty, "E").unwrap()).is_empty());
    }
}
