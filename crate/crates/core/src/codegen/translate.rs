//! OTS models to contract classes.

use std::cell::RefCell;
use std::collections::HashMap;

use thiserror::Error;

use super::expr::{BinOp, Binder, Expr};
use super::model::{
    Assignable, ContractCase, ContractClass, ContractMethod, GhostField, MethodKind, Param,
};
use super::naming::{lower_camel, upper_camel, CodegenOptions, SortMapping};
use crate::analyzer::{classify, ObserverSpec, OtsModel, ProjectionSpec, StateOp, TransitionSpec};
use crate::ast::{Equation, ModuleSet, Signature, Term, EQ_OP, NAT, NE_OP};
use crate::diag::{DiagCode, Diagnostic, SourceSpan};
use crate::interp::{Rewriter, Strategy};
use crate::parser::pretty::print_equation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodegenError {
    #[error("no target type for sort `{sort}` (used by `{context}`); map it in the configuration")]
    UnmappedSort { sort: String, context: String },
    #[error("cannot translate `{equation}`: {reason}")]
    Untranslatable { equation: String, reason: String },
    #[error("effective condition `{0}` has no defining equation")]
    UndefinedCondition(String),
    #[error("class for component module `{0}` has not been translated")]
    ComponentClassMissing(String),
    #[error("class for parent module `{0}` has not been translated")]
    ParentNotTranslated(String),
    #[error("contract of `{class}.{method}` is not side-effect free: {detail}")]
    Impure {
        class: String,
        method: String,
        detail: String,
    },
    #[error("module `{0}` cannot be classified")]
    Unclassified(String),
}

/// A generated class and the warnings raised while generating it.
#[derive(Clone, Debug)]
pub struct Translation {
    pub class: ContractClass,
    pub warnings: Vec<Diagnostic>,
}

struct Component<'a> {
    model: OtsModel,
    class: &'a ContractClass,
}

/// Variable bindings for translating one equation side.
#[derive(Default)]
struct Env {
    vars: HashMap<String, Expr>,
    state_var: Option<String>,
    /// What the state variable denotes; `None` for unqualified calls.
    state: Option<Expr>,
    /// A component transition was translated.
    used_transition: bool,
    /// Projection calls met, in order, without duplicates.
    projections: Vec<Expr>,
}

impl Env {
    fn with_state(var: &Term, state: Option<Expr>) -> Result<Env, String> {
        match var {
            Term::Var { name, .. } => Ok(Env {
                state_var: Some(name.clone()),
                state,
                ..Env::default()
            }),
            other => Err(format!("state argument `{other}` is not a variable")),
        }
    }
}

enum Case {
    Effective,
    Ineffective,
    Both,
}

struct Ctx<'a> {
    model: &'a OtsModel,
    sig: Signature,
    opts: &'a CodegenOptions,
    class: String,
    parent: Option<&'a ContractClass>,
    components: Vec<Component<'a>>,
    rewriter: Rewriter,
    warnings: RefCell<Vec<Diagnostic>>,
    span: SourceSpan,
}

fn untranslatable(e: &Equation, reason: impl Into<String>) -> CodegenError {
    CodegenError::Untranslatable {
        equation: print_equation(e),
        reason: reason.into(),
    }
}

fn conjuncts(t: &Term) -> Vec<&Term> {
    match t {
        Term::App { op, args } if op == "_and_" && args.len() == 2 => {
            let mut v = conjuncts(&args[0]);
            v.extend(conjuncts(&args[1]));
            v
        }
        t => vec![t],
    }
}

/// Numbers repeated stems: `(Int, Int)` gives `x1, x2`.
fn number_names(stems: Vec<String>) -> Vec<String> {
    let count = |s: &String| stems.iter().filter(|t| *t == s).count();
    let mut seen: HashMap<&String, usize> = HashMap::new();
    stems
        .iter()
        .map(|s| {
            if count(s) == 1 {
                s.clone()
            } else {
                let n = seen.entry(s).or_insert(0);
                *n += 1;
                format!("{s}{n}")
            }
        })
        .collect()
}

impl<'a> Ctx<'a> {
    fn new(
        set: &ModuleSet,
        model: &'a OtsModel,
        known: &[&'a ContractClass],
        opts: &'a CodegenOptions,
    ) -> Result<Ctx<'a>, CodegenError> {
        let sig = set
            .signature(&model.module_name)
            .map_err(|_| CodegenError::Unclassified(model.module_name.clone()))?;
        let find = |module: &str| known.iter().copied().find(|c| c.module == module);
        let mut components = Vec::new();
        for p in &model.projections {
            if components
                .iter()
                .any(|c: &Component| c.model.module_name == p.component_module)
            {
                continue;
            }
            let class = find(&p.component_module)
                .ok_or_else(|| CodegenError::ComponentClassMissing(p.component_module.clone()))?;
            let cm = classify(set, &p.component_module)
                .map_err(|_| CodegenError::Unclassified(p.component_module.clone()))?;
            components.push(Component { model: cm, class });
        }
        let parent = match &model.extends_module {
            Some(m) => Some(find(m).ok_or_else(|| CodegenError::ParentNotTranslated(m.clone()))?),
            None => None,
        };
        let rewriter = Rewriter::new(sig.clone(), &[model], false);
        Ok(Ctx {
            model,
            sig,
            opts,
            class: opts.class_name(&model.module_name),
            parent,
            components,
            rewriter,
            warnings: RefCell::new(Vec::new()),
            span: set
                .get(&model.module_name)
                .map(|m| m.span.clone())
                .unwrap_or_else(SourceSpan::builtin),
        })
    }

    fn warn(&self, code: DiagCode, msg: String) {
        self.warnings
            .borrow_mut()
            .push(Diagnostic::warning(code, self.span.clone(), msg));
    }

    fn ghost(&self) -> Expr {
        Expr::name(&self.opts.ghost_name)
    }

    // ----- names and types -----

    fn observer_name(&self, op: &StateOp) -> String {
        if let Some(n) = self.opts.method_override(&op.module, &op.name) {
            return n.clone();
        }
        if let Some(m) = self
            .parent
            .and_then(|p| p.method_for(&op.name, &[MethodKind::Observer]))
        {
            return m.name.clone();
        }
        lower_camel(&op.name)
    }

    fn transition_name(&self, op: &StateOp) -> String {
        if let Some(n) = self.opts.method_override(&op.module, &op.name) {
            return n.clone();
        }
        if let Some(m) = self
            .parent
            .and_then(|p| p.method_for(&op.name, &[MethodKind::Transition]))
        {
            return m.name.clone();
        }
        lower_camel(&op.name)
    }

    fn getter_name(&self, op: &StateOp) -> String {
        self.opts
            .method_override(&op.module, &op.name)
            .cloned()
            .unwrap_or_else(|| format!("get{}", upper_camel(&op.name)))
    }

    fn java_type(&self, sort: &str, context: &str) -> Result<String, CodegenError> {
        if let Some(t) = self.opts.sorts.get(sort) {
            return Ok(t.ty.clone());
        }
        if self.sig.is_identifier_sort(sort) {
            return Ok(SortMapping::identifier().ty);
        }
        if sort == self.model.hidden_sort {
            return Ok(self.class.clone());
        }
        if let Some(c) = self.components.iter().find(|c| c.model.hidden_sort == sort) {
            return Ok(c.class.name.clone());
        }
        if let (Some(p), Some(s)) = (self.parent, &self.model.extends_sort) {
            if s == sort {
                return Ok(p.name.clone());
            }
        }
        Err(CodegenError::UnmappedSort {
            sort: sort.to_string(),
            context: context.to_string(),
        })
    }

    fn default_value(&self, sort: &str) -> String {
        self.opts
            .sorts
            .get(sort)
            .map(|t| t.default.clone())
            .unwrap_or_else(|| {
                if self.sig.is_identifier_sort(sort) {
                    "0".into()
                } else {
                    "null".into()
                }
            })
    }

    fn params(&self, op: &StateOp) -> Result<Vec<Param>, CodegenError> {
        let sorts = op.param_sorts();
        let stems = sorts
            .iter()
            .map(|s| match self.opts.sorts.get(s) {
                Some(t) => t.param.clone(),
                None if self.sig.is_identifier_sort(s) => SortMapping::identifier().param,
                None => s
                    .chars()
                    .next()
                    .map(|c| c.to_ascii_lowercase().to_string())
                    .unwrap_or_else(|| "v".into()),
            })
            .collect();
        number_names(stems)
            .into_iter()
            .zip(&sorts)
            .map(|(name, s)| {
                Ok(Param {
                    name,
                    ty: self.java_type(s, &op.name)?,
                })
            })
            .collect()
    }

    /// Quantifier binders `d1..dm` over an observer's parameters.
    fn binders(&self, op: &StateOp, stem: &str) -> Result<Vec<Binder>, CodegenError> {
        let sorts = op.param_sorts();
        sorts
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let name = if stem == "i" && sorts.len() == 1 {
                    "i".to_string()
                } else {
                    format!("{stem}{}", i + 1)
                };
                Ok(Binder {
                    ty: self.java_type(s, &op.name)?,
                    name,
                })
            })
            .collect()
    }

    fn names(binders: &[Binder]) -> Vec<Expr> {
        binders.iter().map(|b| Expr::name(&b.name)).collect()
    }

    // ----- term translation -----

    fn receiver(&self, t: &Term, env: &mut Env) -> Result<Option<Expr>, String> {
        match t {
            Term::Var { name, .. } if env.state_var.as_deref() == Some(name) => {
                Ok(env.state.clone())
            }
            t => self.expr(t, env).map(Some),
        }
    }

    fn args(&self, ps: &[&Term], env: &mut Env) -> Result<Vec<Expr>, String> {
        ps.iter().map(|p| self.expr(p, env)).collect()
    }

    fn expr(&self, t: &Term, env: &mut Env) -> Result<Expr, String> {
        let (op, args) = match t {
            Term::Int(n) => return Ok(Expr::int(*n)),
            Term::Ident { value, .. } => return Ok(Expr::int(*value)),
            Term::Var { name, .. } => {
                if env.state_var.as_deref() == Some(name) {
                    return Ok(env.state.clone().unwrap_or(Expr::This));
                }
                return env.vars.get(name).cloned().ok_or_else(|| {
                    format!("variable `{name}` is not bound by the left-hand side")
                });
            }
            Term::App { op, args } => (op.as_str(), args.as_slice()),
        };
        if let Some(b) = t.as_bool() {
            return Ok(Expr::Bool { value: b });
        }
        let binop = match (op, args.len()) {
            ("_+_", 2) => Some(BinOp::Add),
            ("_-_", 2) => Some(BinOp::Sub),
            ("_>=_", 2) => Some(BinOp::Ge),
            ("_>_", 2) => Some(BinOp::Gt),
            ("_<=_", 2) => Some(BinOp::Le),
            ("_<_", 2) => Some(BinOp::Lt),
            ("_and_", 2) => Some(BinOp::And),
            ("_or_", 2) => Some(BinOp::Or),
            (o, 2) if o == EQ_OP => Some(BinOp::Eq),
            (o, 2) if o == NE_OP => Some(BinOp::Ne),
            _ => None,
        };
        if let Some(b) = binop {
            return Ok(Expr::binary(
                b,
                self.expr(&args[0], env)?,
                self.expr(&args[1], env)?,
            ));
        }
        match (op, args.len()) {
            ("-_", 1) => {
                return Ok(match self.expr(&args[0], env)? {
                    Expr::Int { value } if value > 0 => Expr::int(-value),
                    e => Expr::Neg {
                        operand: Box::new(e),
                    },
                })
            }
            ("not", 1) => return Ok(self.expr(&args[0], env)?.negate()),
            _ => {}
        }

        let m = self.model;
        if let Some(ob) = m.all_observers().find(|o| o.op.split(t).is_some()) {
            let (s, ps) = ob.op.split(t).unwrap();
            let recv = self.receiver(s, env)?;
            return Ok(Expr::call(
                recv,
                &self.observer_name(&ob.op),
                self.args(&ps, env)?,
            ));
        }
        if let Some(p) = m.projections.iter().find(|p| p.op.split(t).is_some()) {
            let (s, ps) = p.op.split(t).unwrap();
            let recv = self.receiver(s, env)?;
            let call = Expr::call(recv, &self.getter_name(&p.op), self.args(&ps, env)?);
            if !env.projections.contains(&call) {
                env.projections.push(call.clone());
            }
            return Ok(call);
        }
        if let Some(tr) = m.transitions.iter().find(|tr| tr.op.split(t).is_some()) {
            let (s, ps) = tr.op.split(t).unwrap();
            let recv = self.receiver(s, env)?;
            return Ok(Expr::call(
                recv,
                &self.transition_name(&tr.op),
                self.args(&ps, env)?,
            ));
        }
        if args.is_empty() {
            if let Some(i) = m.initial_states.iter().position(|s| s == op) {
                return Ok(self.initial_expr(&self.class, i, op));
            }
            if m.absent_values.iter().any(|a| a.name == op) {
                return Ok(Expr::Null);
            }
        }
        for c in &self.components {
            let cm = &c.model;
            let missing = || format!("class `{}` has no method for `{op}`", c.class.name);
            if let Some(ob) = cm.all_observers().find(|o| o.op.split(t).is_some()) {
                let method = c
                    .class
                    .method_for(&ob.op.name, &[MethodKind::Observer])
                    .ok_or_else(missing)?
                    .name
                    .clone();
                let (s, ps) = ob.op.split(t).unwrap();
                let recv = self.expr(s, env)?;
                return Ok(recv.method(&method, self.args(&ps, env)?));
            }
            if let Some(tr) = cm.transitions.iter().find(|tr| tr.op.split(t).is_some()) {
                let method = c
                    .class
                    .method_for(&tr.op.name, &[MethodKind::Transition])
                    .ok_or_else(missing)?
                    .name
                    .clone();
                let (s, ps) = tr.op.split(t).unwrap();
                env.used_transition = true;
                let recv = self.expr(s, env)?;
                return Ok(recv.method(&method, self.args(&ps, env)?));
            }
            if args.is_empty() {
                if let Some(i) = cm.initial_states.iter().position(|s| s == op) {
                    return Ok(self.initial_expr(&c.class.name, i, op));
                }
            }
        }
        Err(format!(
            "operator `{op}` has no pure-method counterpart and no builtin mapping"
        ))
    }

    /// The first initial state is the no-argument constructor; later ones
    /// are static factories.
    fn initial_expr(&self, class: &str, index: usize, name: &str) -> Expr {
        if index == 0 {
            Expr::New {
                class: class.to_string(),
                args: Vec::new(),
            }
        } else {
            Expr::name(class).method(&lower_camel(name), Vec::new())
        }
    }

    /// Binds the data arguments of a left-hand side to `names`; arguments
    /// that are not fresh variables become equality guards.
    fn bind(
        &self,
        pats: &[&Term],
        names: &[Expr],
        env: &mut Env,
        guards: &mut Vec<Expr>,
    ) -> Result<(), String> {
        for (p, n) in pats.iter().zip(names) {
            match p {
                Term::Var { name, .. } if !env.vars.contains_key(name) => {
                    env.vars.insert(name.clone(), n.clone());
                }
                p => {
                    let e = self.expr(p, env)?;
                    guards.push(n.clone().eq(e));
                }
            }
        }
        Ok(())
    }

    fn guarded(guards: Vec<Expr>, body: Expr) -> Expr {
        match Expr::and_all(guards) {
            Some(g) => g.implies(body),
            None => body,
        }
    }

    // ----- members -----

    fn observer_method(&self, ob: &ObserverSpec) -> Result<ContractMethod, CodegenError> {
        let mut m = ContractMethod::new(&self.observer_name(&ob.op), MethodKind::Observer);
        m.source = Some(ob.op.name.clone());
        m.params = self.params(&ob.op)?;
        m.return_type = Some(self.java_type(&ob.op.coarity, &ob.op.name)?);
        m.pure = true;
        m.placeholder = Some(self.default_value(&ob.op.coarity));
        if ob.chain_defined {
            m.cases = self.chain_contract(ob, &m.params)?;
        }
        Ok(m)
    }

    /// Contract of a composite observer: its projections exist, and the
    /// result is the translated chain.
    fn chain_contract(
        &self,
        ob: &ObserverSpec,
        params: &[Param],
    ) -> Result<Vec<ContractCase>, CodegenError> {
        let mut case = ContractCase::default();
        let mut requires = Vec::new();
        for eref in &ob.equations {
            let e = &eref.equation;
            let (s, qs) = ob.op.split(&e.lhs).expect("attached by head");
            if !matches!(s, Term::Var { .. }) {
                continue;
            }
            let names: Vec<Expr> = params.iter().map(|p| Expr::name(&p.name)).collect();
            let translate = |state: Expr| -> Result<(Expr, Env), String> {
                let mut env = Env::with_state(s, Some(state))?;
                let mut guards = Vec::new();
                self.bind(&qs, &names, &mut env, &mut guards)?;
                if let Some(c) = &e.condition {
                    guards.push(self.expr(c, &mut env)?);
                }
                let rhs = self.expr(&e.rhs, &mut env)?;
                Ok((Self::guarded(guards, Expr::Result.eq(rhs)), env))
            };
            let (mut clause, mut env) = translate(Expr::This).map_err(|r| untranslatable(e, r))?;
            if env.used_transition {
                self.warn(
                    DiagCode::ChainWithTransition,
                    format!(
                    "observer `{}` applies a component transition; its contract reads the pre-state `{}`",
                    ob.op.name, self.opts.ghost_name
                ),
                );
                (clause, env) = translate(self.ghost()).map_err(|r| untranslatable(e, r))?;
            }
            for p in env.projections {
                let r = p.ne(Expr::Null);
                if !requires.contains(&r) {
                    requires.push(r);
                }
            }
            case.ensures.push(clause);
        }
        case.requires.extend(Expr::and_all(requires));
        Ok(if case.ensures.is_empty() {
            Vec::new()
        } else {
            vec![case]
        })
    }

    fn getter(&self, p: &ProjectionSpec) -> Result<ContractMethod, CodegenError> {
        let name = self.getter_name(&p.op);
        let mut m = ContractMethod::new(&name, MethodKind::Getter);
        m.source = Some(p.op.name.clone());
        let is = self.binders(&p.op, "i")?;
        m.params = is
            .iter()
            .map(|b| Param {
                name: b.name.clone(),
                ty: b.ty.clone(),
            })
            .collect();
        m.return_type = Some(self.java_type(&p.component_hidden_sort, &p.op.name)?);
        m.pure = true;
        m.placeholder = Some("null".into());
        if is.is_empty() {
            return Ok(m);
        }
        let js: Vec<Binder> = is
            .iter()
            .map(|b| Binder {
                ty: b.ty.clone(),
                name: b.name.replacen('i', "j", 1),
            })
            .collect();
        let gi = Expr::call(None, &name, Self::names(&is));
        let gj = Expr::call(None, &name, Self::names(&js));
        let differ = Self::distinct(&is, &js);
        let body = Expr::binary(BinOp::And, gi.clone().ne(Expr::Null), differ).implies(gi.ne(gj));
        let requires = p
            .id_sorts()
            .iter()
            .zip(&is)
            .filter(|(s, _)| self.sig.is_identifier_sort(s) || s.as_str() == NAT)
            .map(|(_, b)| Expr::binary(BinOp::Ge, Expr::name(&b.name), Expr::int(0)))
            .collect();
        m.normal_behavior = true;
        m.cases.push(ContractCase {
            requires: Expr::and_all(requires).into_iter().collect(),
            ensures: vec![Expr::forall(js, body)],
            assignable: None,
        });
        Ok(m)
    }

    /// `i != j`, or a disjunction over several identifiers.
    fn distinct(a: &[Binder], b: &[Binder]) -> Expr {
        a.iter()
            .zip(b)
            .map(|(x, y)| Expr::name(&x.name).ne(Expr::name(&y.name)))
            .reduce(|l, r| Expr::binary(BinOp::Or, l, r))
            .expect("at least one identifier")
    }

    /// `o(d..) == v` clauses for an initial state; `recv` qualifies the
    /// observer calls.
    fn initial_clauses(
        &self,
        ob: &ObserverSpec,
        init: &str,
        recv: Option<Expr>,
    ) -> Result<Vec<Expr>, CodegenError> {
        let name = self.observer_name(&ob.op);
        let ds = self.binders(&ob.op, "d")?;
        let init_term = Term::constant(init);
        let mut out = Vec::new();
        for eref in &ob.equations {
            let e = &eref.equation;
            let (s, qs) = ob.op.split(&e.lhs).expect("attached by head");
            if *s != init_term {
                continue;
            }
            let mut env = Env::default();
            let mut guards = Vec::new();
            self.bind(&qs, &Self::names(&ds), &mut env, &mut guards)
                .map_err(|r| untranslatable(e, r))?;
            if let Some(c) = &e.condition {
                guards.push(self.expr(c, &mut env).map_err(|r| untranslatable(e, r))?);
            }
            let rhs = if e.rhs.is_ground() {
                self.value_of(&e.rhs).unwrap_or_else(|| e.rhs.clone())
            } else {
                e.rhs.clone()
            };
            let rhs = self
                .expr(&rhs, &mut env)
                .map_err(|r| untranslatable(e, r))?;
            let lhs = Expr::call(recv.clone(), &name, Self::names(&ds));
            out.push(Expr::forall(ds.clone(), Self::guarded(guards, lhs.eq(rhs))));
        }
        if out.is_empty() && ds.is_empty() {
            if let Some(v) = self.value_of(&ob.op.apply(init_term, &[])) {
                let mut env = Env::default();
                if let Ok(v) = self.expr(&v, &mut env) {
                    out.push(Expr::call(recv, &name, Vec::new()).eq(v));
                }
            }
        }
        if out.is_empty() {
            self.warn(
                DiagCode::Codegen,
                format!("no initial value of `{}` for `{init}`", ob.op.name),
            );
        }
        Ok(out)
    }

    fn value_of(&self, t: &Term) -> Option<Term> {
        let v = self
            .rewriter
            .normal_form(t, 10_000, Strategy::LeftmostInnermost)
            .ok()?;
        self.rewriter.is_value(&v).then_some(v)
    }

    fn projection_initial(
        &self,
        p: &ProjectionSpec,
        init: &str,
    ) -> Result<Vec<Expr>, CodegenError> {
        let name = self.getter_name(&p.op);
        let is = self.binders(&p.op, "i")?;
        let init_term = Term::constant(init);
        let mut out = Vec::new();
        for eref in &p.equations {
            let e = &eref.equation;
            let (s, qs) = p.op.split(&e.lhs).expect("attached by head");
            if *s != init_term {
                continue;
            }
            let mut env = Env::default();
            let mut guards = Vec::new();
            self.bind(&qs, &Self::names(&is), &mut env, &mut guards)
                .map_err(|r| untranslatable(e, r))?;
            let get = Expr::This.method(&name, Self::names(&is));
            let body = match self
                .expr(&e.rhs, &mut env)
                .map_err(|r| untranslatable(e, r))?
            {
                Expr::Null => get.eq(Expr::Null),
                v => get.method("equals", vec![v]),
            };
            out.push(Expr::forall(is.clone(), Self::guarded(guards, body)));
        }
        Ok(out)
    }

    fn constructors(&self) -> Result<Vec<ContractMethod>, CodegenError> {
        let mut out = Vec::new();
        for (i, init) in self.model.initial_states.iter().enumerate() {
            let recv = if i == 0 { None } else { Some(Expr::Result) };
            let mut ensures = Vec::new();
            for p in &self.model.projections {
                ensures.extend(self.projection_initial(p, init)?);
            }
            for ob in self.model.all_observers().filter(|o| !o.chain_defined) {
                ensures.extend(self.initial_clauses(ob, init, recv.clone())?);
            }
            let mut m = if i == 0 {
                ContractMethod::new(&self.class, MethodKind::Constructor)
            } else {
                let mut m = ContractMethod::new(&lower_camel(init), MethodKind::Factory);
                m.return_type = Some(self.class.clone());
                m.placeholder = Some("null".into());
                m
            };
            m.source = Some(init.clone());
            if !ensures.is_empty() {
                m.cases.push(ContractCase {
                    ensures,
                    ..Default::default()
                });
            }
            out.push(m);
        }
        Ok(out)
    }

    /// `this.o(d..) == another.o(d..)`, quantified over the parameters.
    fn observer_agreement(&self, ob: &ObserverSpec) -> Result<Expr, CodegenError> {
        let name = self.observer_name(&ob.op);
        let ds = self.binders(&ob.op, "d")?;
        let eq = Expr::This
            .method(&name, Self::names(&ds))
            .eq(Expr::name("another").method(&name, Self::names(&ds)));
        Ok(Expr::forall(ds, eq))
    }

    fn equals(&self) -> Result<ContractMethod, CodegenError> {
        let mut m = ContractMethod::new("equals", MethodKind::Equals);
        m.params = vec![Param {
            name: "another".into(),
            ty: self.class.clone(),
        }];
        m.return_type = Some("boolean".into());
        m.placeholder = Some("false".into());
        let result_true = || Expr::Result.eq(Expr::Bool { value: true });
        let mut ensures = Vec::new();
        for p in &self.model.projections {
            let is = self.binders(&p.op, "i")?;
            let name = self.getter_name(&p.op);
            let same = Expr::This.method(&name, Self::names(&is)).method(
                "equals",
                vec![Expr::name("another").method(&name, Self::names(&is))],
            );
            ensures.push(Expr::forall(is, same).implies(result_true()));
        }
        for ob in self.model.all_observers().filter(|o| !o.chain_defined) {
            ensures.push(self.observer_agreement(ob)?.implies(result_true()));
        }
        if !ensures.is_empty() {
            m.cases.push(ContractCase {
                ensures,
                ..Default::default()
            });
        }
        Ok(m)
    }

    /// Deep copy: observers agree, the copy is a new object, and every
    /// existing component is copied into a distinct equal object.
    fn deep_copy(&self) -> Result<ContractMethod, CodegenError> {
        let mut m = ContractMethod::new(&self.class, MethodKind::DeepCopy);
        m.params = vec![Param {
            name: "another".into(),
            ty: self.class.clone(),
        }];
        let mut first = Vec::new();
        let mut folded: HashMap<String, Vec<Expr>> = HashMap::new();
        for ob in self.model.all_observers() {
            match ob.chain_defined.then(|| self.fold_target(ob)).flatten() {
                Some((proj, clause)) => folded.entry(proj).or_default().push(clause?),
                None => first.push(self.observer_agreement(ob)?),
            }
        }
        first.push(Expr::This.ne(Expr::name("another")));
        let mut ensures = vec![Expr::and_all(first).unwrap()];
        for p in &self.model.projections {
            let is = self.binders(&p.op, "i")?;
            let name = self.getter_name(&p.op);
            let this_get = Expr::This.method(&name, Self::names(&is));
            let other_get = Expr::name("another").method(&name, Self::names(&is));
            let mut parts = vec![
                this_get.clone().method("equals", vec![other_get.clone()]),
                this_get.clone().ne(other_get),
            ];
            parts.extend(folded.remove(&p.op.name).unwrap_or_default());
            let body = this_get
                .ne(Expr::Null)
                .implies(Expr::and_all(parts).unwrap());
            ensures.push(Expr::forall(is, body));
        }
        m.cases.push(ContractCase {
            requires: vec![Expr::name("another").ne(Expr::Null)],
            ensures,
            assignable: None,
        });
        Ok(m)
    }

    /// A composite observer reading a single projection through its own
    /// parameters is compared inside that projection's deep-copy clause.
    fn fold_target(&self, ob: &ObserverSpec) -> Option<(String, Result<Expr, CodegenError>)> {
        let [eref] = ob.equations.as_slice() else {
            return None;
        };
        let e = &eref.equation;
        let (s, qs) = ob.op.split(&e.lhs)?;
        let Term::Var { name: state, .. } = s else {
            return None;
        };
        let mut apps = Vec::new();
        collect_projection_apps(&e.rhs, &self.model.projections, &mut apps);
        let (p, first_ids) = *apps.first()?;
        if apps
            .iter()
            .any(|(q, ids)| q.op.name != p.op.name || *ids != first_ids)
        {
            return None;
        }
        let (st, ids) = p.op.split(first_ids)?;
        if !matches!(st, Term::Var { name, .. } if name == state) {
            return None;
        }
        // Observer parameter position of every projection identifier.
        let positions: Vec<usize> = ids
            .iter()
            .map(|id| {
                qs.iter()
                    .position(|q| matches!(q, Term::Var { .. }) && q == id)
            })
            .collect::<Option<_>>()?;
        let p_name = p.op.name.clone();
        let build = || -> Result<Expr, CodegenError> {
            let is = self.binders(&p.op, "i")?;
            let ds = self.binders(&ob.op, "d")?;
            let mut extra = Vec::new();
            let args: Vec<Expr> = (0..qs.len())
                .map(|k| match positions.iter().position(|&p| p == k) {
                    Some(idx) => Expr::name(&is[idx].name),
                    None => {
                        extra.push(ds[k].clone());
                        Expr::name(&ds[k].name)
                    }
                })
                .collect();
            let name = self.observer_name(&ob.op);
            let eq = Expr::This
                .method(&name, args.clone())
                .eq(Expr::name("another").method(&name, args));
            Ok(Expr::forall(extra, eq))
        };
        Some((p_name, build()))
    }

    // ----- transitions -----

    fn effective_requires(
        &self,
        tr: &TransitionSpec,
        names: &[Expr],
    ) -> Result<Option<Expr>, CodegenError> {
        let Some(c) = &tr.effective_condition else {
            return Ok(None);
        };
        let eref = c
            .equation
            .as_ref()
            .ok_or_else(|| CodegenError::UndefinedCondition(c.op.clone()))?;
        let e = &eref.equation;
        let cop = StateOp {
            name: c.op.clone(),
            coarity: crate::ast::BOOL.into(),
            ..tr.op.clone()
        };
        let (s, ps) = cop
            .split(&e.lhs)
            .ok_or_else(|| untranslatable(e, "left-hand side does not match the transition"))?;
        if e.condition.is_some() {
            return Err(untranslatable(
                e,
                "conditional effective conditions are not supported",
            ));
        }
        let mut env = Env::with_state(s, Some(Expr::This)).map_err(|r| untranslatable(e, r))?;
        let mut guards = Vec::new();
        self.bind(&ps, names, &mut env, &mut guards)
            .map_err(|r| untranslatable(e, r))?;
        let rhs = self
            .expr(&e.rhs, &mut env)
            .map_err(|r| untranslatable(e, r))?;
        Ok(Some(Self::guarded(guards, rhs)))
    }

    /// Splits a condition into guards and the effective-condition case it
    /// selects.
    fn split_condition<'t>(
        &self,
        cond: Option<&'t Term>,
        tr: &TransitionSpec,
    ) -> (Vec<&'t Term>, Case) {
        let cop = tr.effective_condition.as_ref().map(|c| c.op.as_str());
        let mut rest = Vec::new();
        let mut case = Case::Both;
        for c in cond.map(conjuncts).unwrap_or_default() {
            match c {
                Term::App { op, .. } if Some(op.as_str()) == cop => case = Case::Effective,
                Term::App { op, args }
                    if op == "not" && args[0].op_name() == cop && cop.is_some() =>
                {
                    case = Case::Ineffective
                }
                c => rest.push(c),
            }
        }
        (rest, case)
    }

    fn observer_clause(
        &self,
        ob: &ObserverSpec,
        tr: &TransitionSpec,
        names: &[Expr],
        e: &Equation,
    ) -> Result<Option<(Expr, Case)>, CodegenError> {
        let Some((st, qs)) = ob.op.split(&e.lhs) else {
            return Ok(None);
        };
        let Some((sv, ps)) = tr.op.split(st) else {
            return Ok(None);
        };
        let ds = self.binders(&ob.op, "d")?;
        let fail = |r: String| untranslatable(e, r);
        let mut env = Env::with_state(sv, Some(self.ghost())).map_err(fail)?;
        let mut guards = Vec::new();
        self.bind(&ps, names, &mut env, &mut guards).map_err(fail)?;
        self.bind(&qs, &Self::names(&ds), &mut env, &mut guards)
            .map_err(fail)?;
        let (rest, case) = self.split_condition(e.condition.as_ref(), tr);
        for c in rest {
            guards.push(self.expr(c, &mut env).map_err(fail)?);
        }
        let rhs = self.expr(&e.rhs, &mut env).map_err(fail)?;
        let lhs = Expr::Result.method(&self.observer_name(&ob.op), Self::names(&ds));
        Ok(Some((
            Expr::forall(ds, Self::guarded(guards, lhs.eq(rhs))),
            case,
        )))
    }

    /// Requires and ensures contributed by one projection equation of a
    /// transition; `None` when the component is left unchanged.
    fn projection_clause(
        &self,
        p: &ProjectionSpec,
        tr: &TransitionSpec,
        names: &[Expr],
        e: &Equation,
    ) -> Result<Option<(Option<Expr>, Expr)>, CodegenError> {
        let Some((st, ids)) = p.op.split(&e.lhs) else {
            return Ok(None);
        };
        let Some((sv, ps)) = tr.op.split(st) else {
            return Ok(None);
        };
        if e.rhs
            == p.op.apply(
                sv.clone(),
                &ids.iter().map(|t| (*t).clone()).collect::<Vec<_>>(),
            )
        {
            return Ok(None);
        }
        let fail = |r: String| untranslatable(e, r);
        let mut env = Env::with_state(sv, Some(self.ghost())).map_err(fail)?;
        let mut guards = Vec::new();
        self.bind(&ps, names, &mut env, &mut guards).map_err(fail)?;
        let (rest, _) = self.split_condition(e.condition.as_ref(), tr);
        // `U == U'` with U an identifier of the projection fixes it.
        let id_names: Vec<&str> = ids
            .iter()
            .filter_map(|t| match t {
                Term::Var { name, .. } => Some(name.as_str()),
                _ => None,
            })
            .collect();
        let id_var = |t: &Term, env: &Env| match t {
            Term::Var { name, .. }
                if id_names.contains(&name.as_str()) && !env.vars.contains_key(name) =>
            {
                Some(name.clone())
            }
            _ => None,
        };
        let mut pending = Vec::new();
        for c in rest {
            match c {
                Term::App { op, args } if op == EQ_OP => {
                    if let (Some(v), Ok(x)) = (
                        id_var(&args[0], &env),
                        self.expr(
                            &args[1],
                            &mut Env {
                                vars: env.vars.clone(),
                                ..Env::default()
                            },
                        ),
                    ) {
                        env.vars.insert(v, x);
                        continue;
                    }
                    if let (Some(v), Ok(x)) = (
                        id_var(&args[1], &env),
                        self.expr(
                            &args[0],
                            &mut Env {
                                vars: env.vars.clone(),
                                ..Env::default()
                            },
                        ),
                    ) {
                        env.vars.insert(v, x);
                        continue;
                    }
                    pending.push(c);
                }
                c => pending.push(c),
            }
        }
        let is = self.binders(&p.op, "i")?;
        let mut binders = Vec::new();
        let mut id_exprs = Vec::new();
        for (t, b) in ids.iter().zip(&is) {
            match t {
                Term::Var { name, .. } if !env.vars.contains_key(name) => {
                    env.vars.insert(name.clone(), Expr::name(&b.name));
                    binders.push(b.clone());
                    id_exprs.push(Expr::name(&b.name));
                }
                t => id_exprs.push(self.expr(t, &mut env).map_err(fail)?),
            }
        }
        for c in pending {
            guards.push(self.expr(c, &mut env).map_err(fail)?);
        }
        let getter = self.getter_name(&p.op);
        let this_get = Expr::This.method(&getter, id_exprs.clone());
        let result_get = Expr::Result.method(&getter, id_exprs.clone());
        let rhs = self.expr(&e.rhs, &mut env).map_err(fail)?;
        let reads_pre = contains_projection(&e.rhs, &p.op, sv);
        let (requires, ensures) = match rhs {
            Expr::Null => (this_get.ne(Expr::Null), result_get.eq(Expr::Null)),
            rhs if reads_pre => (
                this_get.ne(Expr::Null),
                result_get.method("equals", vec![rhs]),
            ),
            rhs => {
                let mut parts = vec![result_get.clone().method("equals", vec![rhs])];
                if binders.is_empty() && !is.is_empty() {
                    let js: Vec<Binder> = is
                        .iter()
                        .map(|b| Binder {
                            ty: b.ty.clone(),
                            name: b.name.replacen('i', "j", 1),
                        })
                        .collect();
                    let differ = id_exprs
                        .iter()
                        .zip(&js)
                        .map(|(x, j)| Expr::name(&j.name).ne(x.clone()))
                        .reduce(|l, r| Expr::binary(BinOp::Or, l, r))
                        .unwrap();
                    let other = Expr::Result.method(&getter, Self::names(&js));
                    parts.push(Expr::forall(js, differ.implies(result_get.ne(other))));
                }
                (this_get.eq(Expr::Null), Expr::and_all(parts).unwrap())
            }
        };
        if binders.is_empty() && guards.is_empty() {
            Ok(Some((Some(requires), ensures)))
        } else {
            Ok(Some((
                None,
                Expr::forall(binders, Self::guarded(guards, ensures)),
            )))
        }
    }

    fn transition_method(&self, tr: &TransitionSpec) -> Result<ContractMethod, CodegenError> {
        let mut m = ContractMethod::new(&self.transition_name(&tr.op), MethodKind::Transition);
        m.source = Some(tr.op.name.clone());
        m.params = self.params(&tr.op)?;
        m.return_type = Some(self.class.clone());
        m.preamble = vec![format!(
            "set {} = new {}(this);",
            self.opts.ghost_name, self.class
        )];
        m.placeholder = Some("this".into());
        let names: Vec<Expr> = m.params.iter().map(|p| Expr::name(&p.name)).collect();

        let naturals: Vec<Expr> = tr
            .op
            .param_sorts()
            .iter()
            .zip(&names)
            .filter(|(s, _)| s.as_str() == NAT)
            .map(|(_, n)| Expr::binary(BinOp::Ge, n.clone(), Expr::int(0)))
            .collect();
        let effective = self.effective_requires(tr, &names)?;

        let mut req1: Vec<Expr> = effective.iter().cloned().collect();
        let mut ens1 = Vec::new();
        let mut ens2 = Vec::new();
        for p in &self.model.projections {
            for eref in &p.equations {
                if let Some((req, ens)) = self.projection_clause(p, tr, &names, &eref.equation)? {
                    req1.extend(req);
                    ens1.push(ens);
                }
            }
        }
        for ob in self.model.all_observers().filter(|o| !o.chain_defined) {
            for eref in tr
                .equations
                .iter()
                .filter(|e| ob.op.split(&e.equation.lhs).is_some())
            {
                match self.observer_clause(ob, tr, &names, &eref.equation)? {
                    Some((c, Case::Effective)) => ens1.push(c),
                    Some((c, Case::Ineffective)) => ens2.push(c),
                    Some((c, Case::Both)) => {
                        ens1.push(c.clone());
                        ens2.push(c);
                    }
                    None => {}
                }
            }
        }
        let result_this = || Expr::Result.eq(Expr::This);
        req1.extend(naturals.iter().cloned());
        ens1.push(result_this());
        m.cases.push(ContractCase {
            requires: Expr::and_all(req1).into_iter().collect(),
            ensures: Expr::and_all(ens1).into_iter().collect(),
            assignable: None,
        });
        if let Some(c) = effective {
            let mut req2 = vec![c.negate()];
            req2.extend(naturals);
            ens2.push(result_this());
            m.cases.push(ContractCase {
                requires: Expr::and_all(req2).into_iter().collect(),
                ensures: Expr::and_all(ens2).into_iter().collect(),
                assignable: Some(Assignable::Nothing),
            });
        }
        Ok(m)
    }

    fn translate(self) -> Result<Translation, CodegenError> {
        let model = self.model;
        let mut cls = ContractClass::new(&self.class, &model.module_name);
        if let Some(p) = self.parent {
            cls.extends = Some(p.name.clone());
        }
        if !model.transitions.is_empty() {
            cls.ghosts.push(GhostField {
                name: self.opts.ghost_name.clone(),
                ty: self.class.clone(),
            });
        }
        for p in &model.projections {
            cls.methods.push(self.getter(p)?);
        }
        for ob in &model.observers {
            cls.methods.push(self.observer_method(ob)?);
        }
        cls.methods.extend(self.constructors()?);
        cls.methods.push(self.equals()?);
        cls.methods.push(self.deep_copy()?);
        for tr in &model.transitions {
            cls.methods.push(self.transition_method(tr)?);
        }
        Ok(Translation {
            class: cls,
            warnings: self.warnings.into_inner(),
        })
    }
}

fn collect_projection_apps<'t>(
    t: &'t Term,
    projections: &'t [ProjectionSpec],
    out: &mut Vec<(&'t ProjectionSpec, &'t Term)>,
) {
    if let Some(p) = projections.iter().find(|p| p.op.split(t).is_some()) {
        out.push((p, t));
    }
    for a in t.args() {
        collect_projection_apps(a, projections, out);
    }
}

fn contains_projection(t: &Term, op: &StateOp, state: &Term) -> bool {
    op.split(t).is_some_and(|(s, _)| s == state)
        || t.args().iter().any(|a| contains_projection(a, op, state))
}

/// Translates a model without projections.
pub fn translate_single(
    set: &ModuleSet,
    model: &OtsModel,
    known: &[&ContractClass],
    opts: &CodegenOptions,
) -> Result<Translation, CodegenError> {
    Ctx::new(set, model, known, opts)?.translate()
}

/// Translates a composite model; `components` must hold the class of every
/// component module (and of the parent module, if any).
pub fn translate_composite(
    set: &ModuleSet,
    model: &OtsModel,
    components: &[&ContractClass],
    opts: &CodegenOptions,
) -> Result<Translation, CodegenError> {
    Ctx::new(set, model, components, opts)?.translate()
}

/// Records the inheritance edge from a child class to its parent's class.
pub fn translate_inheritance(
    child: &mut ContractClass,
    model: &OtsModel,
    parent: &ContractClass,
) -> Result<(), CodegenError> {
    match &model.extends_module {
        Some(m) if *m == parent.module => {
            child.extends = Some(parent.name.clone());
            Ok(())
        }
        Some(m) => Err(CodegenError::ParentNotTranslated(m.clone())),
        None => {
            child.extends = None;
            Ok(())
        }
    }
}
