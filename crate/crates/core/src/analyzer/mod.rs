//! Recovers the OTS structure ⟨O, I, T⟩ of a checked module: observers,
//! initial states, transitions with their effective conditions, projections
//! onto component objects and the inheritance edge.

mod compose;
mod dump;

pub use compose::{check_composition, method_groups, MethodGroup};
pub use dump::{dump_model, dump_model_json, SCHEMA};

use std::collections::BTreeMap;

use crate::ast::{
    EquationRef, ModuleSet, OperatorDecl, Semantics, Signature, SpecModule, Term, BOOL,
};
use crate::diag::{DiagCode, Diagnostic, Diagnostics};

/// Shared shape of every behavioral operator with one state argument.
#[derive(Clone, Debug)]
pub struct StateOp {
    pub name: String,
    /// Full declared arity, state sort included.
    pub arity: Vec<String>,
    pub coarity: String,
    /// Position of the state argument in `arity`.
    pub state_index: usize,
    /// Module that declares the operator.
    pub module: String,
}

impl StateOp {
    /// The data parameters, in declaration order.
    pub fn param_sorts(&self) -> Vec<String> {
        self.arity
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.state_index)
            .map(|(_, s)| s.clone())
            .collect()
    }

    /// Builds `name(...)` with `state` at the state position and `params`
    /// filling the other slots in order.
    pub fn apply(&self, state: Term, params: &[Term]) -> Term {
        let mut params = params.iter().cloned();
        let mut state = Some(state);
        let args = (0..self.arity.len())
            .map(|i| {
                if i == self.state_index {
                    state.take().unwrap()
                } else {
                    params.next().expect("parameter count")
                }
            })
            .collect();
        Term::App {
            op: self.name.clone(),
            args,
        }
    }

    /// Splits an application of this operator into (state, params).
    pub fn split<'t>(&self, t: &'t Term) -> Option<(&'t Term, Vec<&'t Term>)> {
        match t {
            Term::App { op, args } if *op == self.name && args.len() == self.arity.len() => {
                let params = args
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != self.state_index)
                    .map(|(_, a)| a)
                    .collect();
                Some((&args[self.state_index], params))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ObserverSpec {
    pub op: StateOp,
    pub equations: Vec<EquationRef>,
    /// Defined through projections (a composite observer built from chains).
    pub chain_defined: bool,
}

#[derive(Clone, Debug)]
pub struct EffectiveCondition {
    pub op: String,
    pub equation: Option<EquationRef>,
}

#[derive(Clone, Debug)]
pub struct TransitionSpec {
    pub op: StateOp,
    pub effective_condition: Option<EffectiveCondition>,
    /// Equations whose left-hand side observes or projects this transition.
    pub equations: Vec<EquationRef>,
}

#[derive(Clone, Debug)]
pub struct ProjectionSpec {
    pub op: StateOp,
    pub component_module: String,
    pub component_hidden_sort: String,
    pub equations: Vec<EquationRef>,
}

impl ProjectionSpec {
    pub fn id_sorts(&self) -> Vec<String> {
        self.op.param_sorts()
    }
}

/// A nullary operator standing for a missing component (mapped to `null`).
#[derive(Clone, Debug)]
pub struct AbsentValue {
    pub name: String,
    pub sort: String,
    pub component_module: String,
}

#[derive(Clone, Debug)]
pub struct OtsModel {
    pub module_name: String,
    pub hidden_sort: String,
    pub observers: Vec<ObserverSpec>,
    /// Parent observers the module gives equations for (or merely inherits).
    pub inherited_observers: Vec<ObserverSpec>,
    pub initial_states: Vec<String>,
    pub transitions: Vec<TransitionSpec>,
    pub projections: Vec<ProjectionSpec>,
    pub absent_values: Vec<AbsentValue>,
    pub extends_module: Option<String>,
    pub extends_sort: Option<String>,
    pub auxiliary_ops: Vec<OperatorDecl>,
}

impl OtsModel {
    pub fn observer(&self, name: &str) -> Option<&ObserverSpec> {
        self.observers
            .iter()
            .chain(&self.inherited_observers)
            .find(|o| o.op.name == name)
    }

    pub fn transition(&self, name: &str) -> Option<&TransitionSpec> {
        self.transitions.iter().find(|t| t.op.name == name)
    }

    pub fn projection(&self, name: &str) -> Option<&ProjectionSpec> {
        self.projections.iter().find(|p| p.op.name == name)
    }

    pub fn is_composite(&self) -> bool {
        !self.projections.is_empty()
    }

    /// Own observers followed by inherited ones; every observation the
    /// model's states support.
    pub fn all_observers(&self) -> impl Iterator<Item = &ObserverSpec> {
        self.observers.iter().chain(&self.inherited_observers)
    }

    pub fn absent_for(&self, component_module: &str) -> Option<&AbsentValue> {
        self.absent_values
            .iter()
            .find(|a| a.component_module == component_module)
    }
}

/// Classifies a module, discarding warnings.
pub fn classify(set: &ModuleSet, module: &str) -> Result<OtsModel, Diagnostics> {
    classify_with_warnings(set, module).map(|(m, _)| m)
}

/// Modules that describe objects: every loose (`mod*`) user module.
/// Tight (`mod!`) modules are data modules and have no state space.
pub fn object_modules(set: &ModuleSet) -> impl Iterator<Item = &SpecModule> {
    set.user_modules()
        .filter(|m| m.semantics == Semantics::Loose)
}

pub fn classify_with_warnings(
    set: &ModuleSet,
    module: &str,
) -> Result<(OtsModel, Diagnostics), Diagnostics> {
    let Some(m) = set.get(module) else {
        return Err(Diagnostic::error(
            DiagCode::UnknownModule,
            crate::diag::SourceSpan::builtin(),
            format!("unknown module `{module}`"),
        )
        .into());
    };
    let sig = set.signature(module).map_err(|e| {
        Diagnostics::from(Diagnostic::error(
            DiagCode::UnknownModule,
            m.span.clone(),
            e.to_string(),
        ))
    })?;
    Classifier {
        sig: &sig,
        module: m,
        errors: Diagnostics::new(),
        warnings: Diagnostics::new(),
    }
    .run()
}

struct Classifier<'a> {
    sig: &'a Signature,
    module: &'a SpecModule,
    errors: Diagnostics,
    warnings: Diagnostics,
}

impl Classifier<'_> {
    fn run(mut self) -> Result<(OtsModel, Diagnostics), Diagnostics> {
        let m = self.module;
        let hidden: Vec<_> = m.hidden_sorts().collect();
        let hidden_sort = match hidden.as_slice() {
            [h] => h.name.clone(),
            [] => {
                return Err(Diagnostic::error(
                    DiagCode::NoHiddenSort,
                    m.span.clone(),
                    format!(
                        "module `{}` declares no hidden sort, so it has no state space",
                        m.name
                    ),
                )
                .into())
            }
            [_, second, ..] => {
                return Err(Diagnostic::error(
                    DiagCode::MultipleHiddenSorts,
                    second.span.clone(),
                    format!(
                        "module `{}` declares {} hidden sorts; an object has exactly one",
                        m.name,
                        hidden.len()
                    ),
                )
                .into())
            }
        };
        let own = |s: &str| self.sig.leq(s, &hidden_sort);

        let (mut extends_module, mut extends_sort) = (None, None);
        for sup in &hidden[0].supersorts {
            if let Some(info) = self.sig.sort(sup) {
                if info.module != m.name && self.sig.is_hidden(sup) {
                    extends_module = Some(info.module.clone());
                    extends_sort = Some(sup.clone());
                    break;
                }
            }
        }

        let mut observers = Vec::new();
        let mut transitions = Vec::new();
        let mut projections = Vec::new();
        for o in m.operators.iter().filter(|o| o.behavioral) {
            let own_args: Vec<usize> = (0..o.arity.len()).filter(|&i| own(&o.arity[i])).collect();
            let other_hidden = o
                .arity
                .iter()
                .filter(|s| self.sig.is_hidden(s) && !own(s))
                .count();
            let state_op = |i: usize| StateOp {
                name: o.name.clone(),
                arity: o.arity.clone(),
                coarity: o.coarity.clone(),
                state_index: i,
                module: m.name.clone(),
            };
            if !self.sig.is_hidden(&o.coarity) {
                if own_args.len() != 1 || other_hidden > 0 {
                    self.errors.push(Diagnostic::error(
                        DiagCode::InvalidBehavioralOperator,
                        o.span.clone(),
                        format!("observer `{}` must take exactly one state of sort {hidden_sort} and data otherwise", o.name),
                    ));
                    continue;
                }
                observers.push(ObserverSpec {
                    op: state_op(own_args[0]),
                    equations: Vec::new(),
                    chain_defined: false,
                });
            } else if own(&o.coarity) {
                if own_args.len() != 1 || other_hidden > 0 {
                    self.errors.push(Diagnostic::error(
                        DiagCode::NoStateArgument,
                        o.span.clone(),
                        format!(
                            "transition `{}` must take exactly one state of sort {hidden_sort}",
                            o.name
                        ),
                    ));
                    continue;
                }
                transitions.push(TransitionSpec {
                    op: state_op(own_args[0]),
                    effective_condition: None,
                    equations: Vec::new(),
                });
            } else {
                if own_args.len() != 1 || other_hidden > 0 {
                    self.errors.push(Diagnostic::error(
                        DiagCode::InvalidBehavioralOperator,
                        o.span.clone(),
                        format!("projection `{}` must take exactly one state of sort {hidden_sort} and identifiers otherwise", o.name),
                    ));
                    continue;
                }
                let component_module = self
                    .sig
                    .sort(&o.coarity)
                    .map(|s| s.module.clone())
                    .unwrap_or_default();
                projections.push(ProjectionSpec {
                    op: state_op(own_args[0]),
                    component_module,
                    component_hidden_sort: o.coarity.clone(),
                    equations: Vec::new(),
                });
            }
        }

        // Inherited observers: every parent observer not redeclared here.
        let mut inherited_observers = Vec::new();
        if let Some(parent_sort) = &extends_sort {
            for info in self.sig.ops() {
                let o = &info.decl;
                if !o.behavioral || info.module == m.name || self.sig.is_hidden(&o.coarity) {
                    continue;
                }
                let Some(i) = o
                    .arity
                    .iter()
                    .position(|s| s == parent_sort || self.sig.leq(parent_sort, s))
                else {
                    continue;
                };
                if o.arity.iter().filter(|s| self.sig.is_hidden(s)).count() != 1
                    || observers.iter().any(|ob: &ObserverSpec| {
                        ob.op.name == o.name && ob.op.arity.len() == o.arity.len()
                    })
                {
                    continue;
                }
                inherited_observers.push(ObserverSpec {
                    op: StateOp {
                        name: o.name.clone(),
                        arity: o.arity.clone(),
                        coarity: o.coarity.clone(),
                        state_index: i,
                        module: info.module.clone(),
                    },
                    equations: Vec::new(),
                    chain_defined: false,
                });
            }
        }

        let mut initial_states = Vec::new();
        let mut absent_values = Vec::new();
        let mut auxiliary_ops = Vec::new();
        let mut conditions: BTreeMap<String, &OperatorDecl> = BTreeMap::new();
        for o in m.operators.iter().filter(|o| !o.behavioral) {
            if o.arity.is_empty() && own(&o.coarity) {
                initial_states.push(o.name.clone());
            } else if let Some(target) = o.name.strip_prefix("c-").filter(|t| !t.is_empty()) {
                match transitions.iter().find(|t| t.op.name == target) {
                    None => self.errors.push(Diagnostic::error(
                        DiagCode::DanglingEffectiveCondition,
                        o.span.clone(),
                        format!("`{}` looks like an effective condition but there is no transition `{target}`", o.name),
                    )),
                    Some(t) if o.coarity != BOOL || o.arity != t.op.arity => self.errors.push(Diagnostic::error(
                        DiagCode::EffectiveConditionSignature,
                        o.span.clone(),
                        format!(
                            "effective condition `{}` must be declared `{} -> Bool` to match transition `{target}`",
                            o.name,
                            t.op.arity.join(" ")
                        ),
                    )),
                    Some(_) => {
                        conditions.insert(target.to_string(), o);
                    }
                }
            } else if let Some(p) = projections
                .iter()
                .find(|p| o.arity.is_empty() && p.component_hidden_sort == o.coarity)
            {
                absent_values.push(AbsentValue {
                    name: o.name.clone(),
                    sort: o.coarity.clone(),
                    component_module: p.component_module.clone(),
                });
            } else {
                auxiliary_ops.push(o.clone());
            }
        }
        if !self.errors.is_empty() {
            return Err(self.errors);
        }

        for t in &mut transitions {
            if let Some(c) = conditions.get(&t.op.name) {
                let equation = self
                    .own_equations()
                    .find(|e| e.equation.lhs.op_name() == Some(c.name.as_str()));
                t.effective_condition = Some(EffectiveCondition {
                    op: c.name.clone(),
                    equation,
                });
            }
        }

        // Attach equations by the head of their left-hand side.
        for e in self.own_equations() {
            let lhs = &e.equation.lhs;
            let state = if let Some(ob) = observers
                .iter_mut()
                .chain(inherited_observers.iter_mut())
                .find(|o| o.op.split(lhs).is_some())
            {
                ob.equations.push(e.clone());
                ob.op.split(lhs).map(|(s, _)| s.clone())
            } else if let Some(p) = projections.iter_mut().find(|p| p.op.split(lhs).is_some()) {
                p.equations.push(e.clone());
                p.op.split(lhs).map(|(s, _)| s.clone())
            } else {
                None
            };
            if let Some(t) =
                state.and_then(|s| transitions.iter_mut().find(|t| t.op.split(&s).is_some()))
            {
                t.equations.push(e.clone());
            }
        }

        let projection_names: Vec<&str> = projections.iter().map(|p| p.op.name.as_str()).collect();
        for ob in &mut observers {
            ob.chain_defined = !projections.is_empty()
                && ob.equations.iter().any(|e| {
                    projection_names
                        .iter()
                        .any(|p| e.equation.rhs.contains_op(p))
                });
        }

        for t in &transitions {
            let Some(c) = &t.effective_condition else {
                continue;
            };
            for e in &t.equations {
                if let Some(guard) = &e.equation.condition {
                    if !guard.contains_op(&c.op) {
                        self.warnings.push(Diagnostic::warning(
                            DiagCode::UnboundGuard,
                            e.equation.span.clone(),
                            format!("equation for transition `{}` is guarded by `{guard}` rather than `{}`", t.op.name, c.op),
                        ));
                    }
                }
            }
        }

        Ok((
            OtsModel {
                module_name: m.name.clone(),
                hidden_sort,
                observers,
                inherited_observers,
                initial_states,
                transitions,
                projections,
                absent_values,
                extends_module,
                extends_sort,
                auxiliary_ops,
            },
            self.warnings,
        ))
    }

    fn own_equations(&self) -> impl Iterator<Item = EquationRef> + '_ {
        self.module
            .equations
            .iter()
            .enumerate()
            .map(|(index, equation)| EquationRef {
                module: self.module.name.clone(),
                index,
                equation: equation.clone(),
            })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::parser::parse_sources;

    pub(crate) fn corpus(files: &[&str]) -> ModuleSet {
        let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/");
        let sources: Vec<(String, String)> = files
            .iter()
            .map(|f| {
                (
                    f.to_string(),
                    std::fs::read_to_string(format!("{root}{f}")).unwrap(),
                )
            })
            .collect();
        parse_sources(&sources).unwrap()
    }

    fn names<T>(items: &[T], f: impl Fn(&T) -> &str) -> Vec<String> {
        items.iter().map(|i| f(i).to_string()).collect()
    }

    #[test]
    fn account() {
        let set = corpus(&["account.cafe"]);
        let m = classify(&set, "ACCOUNT").unwrap();
        assert_eq!(m.hidden_sort, "Account");
        assert_eq!(names(&m.observers, |o| &o.op.name), ["read"]);
        assert_eq!(m.observers[0].op.coarity, "Int");
        assert_eq!(m.initial_states, ["init"]);
        assert_eq!(names(&m.transitions, |t| &t.op.name), ["add"]);
        let add = &m.transitions[0];
        assert_eq!(add.op.param_sorts(), ["Int"]);
        assert_eq!(add.effective_condition.as_ref().unwrap().op, "c-add");
        assert_eq!(add.equations.len(), 1);
        assert!(m.projections.is_empty() && m.extends_module.is_none());
        assert_eq!(m.observers[0].equations.len(), 2);
    }

    #[test]
    fn account_system() {
        let set = corpus(&["account.cafe", "account_sys.cafe"]);
        let m = classify(&set, "ACCOUNT-SYSTEM").unwrap();
        assert_eq!(names(&m.projections, |p| &p.op.name), ["account"]);
        let p = &m.projections[0];
        assert_eq!(
            (p.id_sorts(), p.component_module.as_str()),
            (vec!["UId".to_string()], "ACCOUNT")
        );
        assert_eq!(
            names(&m.transitions, |t| &t.op.name),
            ["add", "del", "deposit", "withdraw"]
        );
        assert!(m
            .transitions
            .iter()
            .all(|t| t.effective_condition.is_none() && t.equations.len() == 2));
        assert_eq!(names(&m.observers, |o| &o.op.name), ["balance"]);
        assert!(m.observers[0].chain_defined);
        assert_eq!(names(&m.absent_values, |a| &a.name), ["no-account"]);
        assert_eq!(m.initial_states, ["init-account-sys"]);
    }

    #[test]
    fn partition_of_behavioral_operators() {
        let set = corpus(&["account.cafe", "account_sys.cafe"]);
        for name in ["ACCOUNT", "ACCOUNT-SYSTEM"] {
            let m = classify(&set, name).unwrap();
            let mut classified: Vec<String> = m
                .observers
                .iter()
                .map(|o| o.op.name.clone())
                .chain(m.transitions.iter().map(|t| t.op.name.clone()))
                .chain(m.projections.iter().map(|p| p.op.name.clone()))
                .collect();
            classified.sort();
            let mut bops: Vec<String> = set
                .get(name)
                .unwrap()
                .operators
                .iter()
                .filter(|o| o.behavioral)
                .map(|o| o.name.clone())
                .collect();
            bops.sort();
            assert_eq!(classified, bops);
        }
    }

    #[test]
    fn degenerate_module() {
        let set = parse_sources(&[("d".into(), "mod* D { *[ H ]* op h : -> H }".into())]).unwrap();
        let m = classify(&set, "D").unwrap();
        assert!(m.observers.is_empty() && m.transitions.is_empty());
        assert_eq!(m.initial_states, ["h"]);
    }

    #[test]
    fn inheritance() {
        let set = corpus(&[
            "account.cafe",
            "extra/savings.cafe",
            "extra/savings_redeclared.cafe",
        ]);
        let s = classify(&set, "SAVINGS").unwrap();
        assert_eq!(s.extends_module.as_deref(), Some("ACCOUNT"));
        assert_eq!(names(&s.observers, |o| &o.op.name), ["rate"]);
        assert_eq!(names(&s.inherited_observers, |o| &o.op.name), ["read"]);
        assert_eq!(s.inherited_observers[0].equations.len(), 2);
        let s2 = classify(&set, "SAVINGS2").unwrap();
        assert_eq!(names(&s2.observers, |o| &o.op.name), ["read"]);
        assert!(s2.inherited_observers.is_empty());
        assert!(classify(&set, "ACCOUNT").unwrap().extends_module.is_none());
    }

    #[test]
    fn classification_errors() {
        let err = |src: &str| {
            let set = parse_sources(&[("e".into(), src.into())]).unwrap();
            let name = set.user_modules().last().unwrap().name.clone();
            classify(&set, &name).unwrap_err().codes()
        };
        assert_eq!(
            err("mod* E { pr(INT) op f : Int -> Int }"),
            [DiagCode::NoHiddenSort]
        );
        assert_eq!(
            err("mod* E { *[ H ]* *[ G ]* }"),
            [DiagCode::MultipleHiddenSorts]
        );
        assert_eq!(
            err("mod* E { pr(INT) *[ H ]* bop t : -> H }"),
            [DiagCode::NoStateArgument]
        );
        assert_eq!(
            err("mod* E { pr(INT) *[ H ]* bop t : H H -> H }"),
            [DiagCode::NoStateArgument]
        );
        assert_eq!(
            err("mod* E { pr(INT) *[ H ]* op c-t : H -> Bool }"),
            [DiagCode::DanglingEffectiveCondition]
        );
        assert_eq!(
            err("mod* E { pr(INT) *[ H ]* bop t : H Int -> H op c-t : H -> Bool }"),
            [DiagCode::EffectiveConditionSignature]
        );
    }

    #[test]
    fn unbound_guard_is_a_warning() {
        let src = "mod* E { pr(INT) *[ H ]* op h : -> H bop o : H -> Int bop t : H Int -> H op c-t : H Int -> Bool \
                   var S : H var I : Int eq c-t(S, I) = I > 0 . eq o(h) = 0 . ceq o(t(S, I)) = I if I > 1 . }";
        let set = parse_sources(&[("e".into(), src.into())]).unwrap();
        let (_, warnings) = classify_with_warnings(&set, "E").unwrap();
        assert_eq!(warnings.codes(), [DiagCode::UnboundGuard]);
    }
}
