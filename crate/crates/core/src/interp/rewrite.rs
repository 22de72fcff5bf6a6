//! Conditional term rewriting with native builtins.
//!
//! Equations are used left to right. Conditions must reduce to `true` for a
//! rule to fire; a condition that reduces to neither boolean makes the rule
//! inapplicable and is recorded as a warning.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;

use thiserror::Error;

use crate::analyzer::{OtsModel, StateOp};
use crate::ast::{OpKey, Signature, Term};
use crate::prelude;

/// Bound on nested rewriting; deeper terms are reported like fuel exhaustion.
const MAX_DEPTH: usize = 2_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostInnermost,
    LeftmostOutermost,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("rewrite fuel exhausted after {steps} steps while reducing `{term}` (possible nontermination)")]
    FuelExhausted { term: String, steps: u64 },
    #[error("term nesting deeper than {MAX_DEPTH} while reducing `{term}`")]
    TooDeep { term: String },
    #[error("`{term}` is stuck at `{subterm}`: no equation applies and it is not a value")]
    Stuck {
        term: String,
        subterm: String,
        involves_absent: bool,
    },
    #[error("term `{0}` is not ground")]
    NotGround(String),
}

struct Rule {
    lhs: Term,
    rhs: Term,
    condition: Option<Term>,
    origin: String,
}

struct Stutter {
    /// Observation operators (observers and projections) by key, with
    /// their state position.
    observations: HashMap<OpKey, usize>,
    /// Transitions with an effective condition.
    transitions: HashMap<OpKey, (StateOp, String)>,
}

pub struct Rewriter {
    sig: Signature,
    rules: HashMap<OpKey, Vec<Rule>>,
    /// Operators whose applications are values of hidden sorts.
    constructors: BTreeSet<OpKey>,
    absent: BTreeSet<String>,
    stutter: Option<Stutter>,
    warnings: Mutex<BTreeSet<String>>,
}

struct Run {
    steps: u64,
    fuel: u64,
    depth: usize,
    strategy: Strategy,
    /// Innermost normal forms already computed in this run. Conditions and
    /// right-hand sides often repeat a subterm (`read(A)` in both), which
    /// would otherwise cost time exponential in the history length.
    memo: HashMap<Term, Term>,
}

impl Rewriter {
    /// Rules are every equation visible from the signature's module.
    /// `models` are the object modules in scope; they define which operators
    /// build states and, with `implicit_stutter`, how ineffective
    /// transitions are observed.
    pub fn new(sig: Signature, models: &[&OtsModel], implicit_stutter: bool) -> Rewriter {
        let mut rules: HashMap<OpKey, Vec<Rule>> = HashMap::new();
        for e in sig.equations() {
            let Some(key) = e.equation.lhs.head() else {
                continue;
            };
            rules.entry(key).or_default().push(Rule {
                lhs: e.equation.lhs.clone(),
                rhs: e.equation.rhs.clone(),
                condition: e.equation.condition.clone(),
                origin: format!("{}:{}", e.equation.span, e.module),
            });
        }
        let mut constructors = BTreeSet::new();
        for o in sig.ops() {
            let d = &o.decl;
            if sig.is_hidden(&d.coarity) && (d.behavioral || d.arity.is_empty()) {
                constructors.insert(d.key());
            }
        }
        let absent = models
            .iter()
            .flat_map(|m| m.absent_values.iter().map(|a| a.name.clone()))
            .collect();
        let stutter = implicit_stutter.then(|| {
            let mut observations = HashMap::new();
            let mut transitions = HashMap::new();
            for m in models {
                for o in m.all_observers() {
                    observations.insert(OpKey::new(&o.op.name, o.op.arity.len()), o.op.state_index);
                }
                for p in &m.projections {
                    observations.insert(OpKey::new(&p.op.name, p.op.arity.len()), p.op.state_index);
                }
                for t in &m.transitions {
                    if let Some(c) = &t.effective_condition {
                        transitions.insert(
                            OpKey::new(&t.op.name, t.op.arity.len()),
                            (t.op.clone(), c.op.clone()),
                        );
                    }
                }
            }
            Stutter {
                observations,
                transitions,
            }
        });
        Rewriter {
            sig,
            rules,
            constructors,
            absent,
            stutter,
            warnings: Mutex::new(BTreeSet::new()),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn is_absent(&self, name: &str) -> bool {
        self.absent.contains(name)
    }

    /// Warnings about stuck conditions seen so far, sorted.
    pub fn warnings(&self) -> Vec<String> {
        self.warnings.lock().unwrap().iter().cloned().collect()
    }

    /// Reduces a ground term to a value.
    pub fn reduce(&self, term: &Term, fuel: u64) -> Result<Term, ReduceError> {
        self.reduce_with(term, fuel, Strategy::LeftmostInnermost)
    }

    pub fn reduce_with(
        &self,
        term: &Term,
        fuel: u64,
        strategy: Strategy,
    ) -> Result<Term, ReduceError> {
        let nf = self.normal_form(term, fuel, strategy)?;
        match self.first_non_value(&nf) {
            None => Ok(nf),
            Some(sub) => Err(ReduceError::Stuck {
                term: term.to_string(),
                subterm: sub.to_string(),
                involves_absent: self.mentions_absent(sub),
            }),
        }
    }

    /// Normal form without the value check.
    pub fn normal_form(
        &self,
        term: &Term,
        fuel: u64,
        strategy: Strategy,
    ) -> Result<Term, ReduceError> {
        if let Some((name, _)) = term.vars().into_iter().next() {
            return Err(ReduceError::NotGround(name));
        }
        let mut run = Run {
            steps: 0,
            fuel,
            depth: 0,
            strategy,
            memo: HashMap::new(),
        };
        self.normalize(term.clone(), &mut run)
    }

    pub fn is_value(&self, t: &Term) -> bool {
        self.first_non_value(t).is_none()
    }

    fn first_non_value<'t>(&self, t: &'t Term) -> Option<&'t Term> {
        match t {
            Term::Int(_) | Term::Ident { .. } => None,
            Term::Var { .. } => Some(t),
            Term::App { op, args } => {
                if let Some(bad) = args.iter().find_map(|a| self.first_non_value(a)) {
                    return Some(bad);
                }
                let value = (args.is_empty() && (op == "true" || op == "false"))
                    || self.constructors.contains(&OpKey::new(op, args.len()));
                (!value).then_some(t)
            }
        }
    }

    fn mentions_absent(&self, t: &Term) -> bool {
        match t {
            Term::App { op, args } => {
                (args.is_empty() && self.absent.contains(op))
                    || args.iter().any(|a| self.mentions_absent(a))
            }
            _ => false,
        }
    }

    fn tick(&self, run: &mut Run, t: &Term) -> Result<(), ReduceError> {
        run.steps += 1;
        if run.steps > run.fuel {
            return Err(ReduceError::FuelExhausted {
                term: t.to_string(),
                steps: run.fuel,
            });
        }
        Ok(())
    }

    fn normalize(&self, t: Term, run: &mut Run) -> Result<Term, ReduceError> {
        run.depth += 1;
        if run.depth > MAX_DEPTH {
            return Err(ReduceError::TooDeep {
                term: t.to_string(),
            });
        }
        let r = match run.strategy {
            Strategy::LeftmostInnermost => match run.memo.get(&t) {
                Some(nf) => Ok(nf.clone()),
                None => self.innermost(t.clone(), run).inspect(|nf| {
                    run.memo.insert(t, nf.clone());
                }),
            },
            Strategy::LeftmostOutermost => self.outermost(t, run),
        };
        run.depth -= 1;
        r
    }

    fn innermost(&self, t: Term, run: &mut Run) -> Result<Term, ReduceError> {
        let mut t = match t {
            Term::App { op, args } => {
                let args = args
                    .into_iter()
                    .map(|a| self.normalize(a, run))
                    .collect::<Result<Vec<_>, _>>()?;
                Term::App { op, args }
            }
            other => return Ok(other),
        };
        // Loop at the root while rules keep firing; right-hand sides are
        // normalized below the root first.
        loop {
            match self.rewrite_root(&t, run)? {
                None => return Ok(t),
                Some(next) => {
                    t = match next {
                        Term::App { op, args } => {
                            let args = args
                                .into_iter()
                                .map(|a| self.normalize(a, run))
                                .collect::<Result<Vec<_>, _>>()?;
                            Term::App { op, args }
                        }
                        other => return Ok(other),
                    };
                }
            }
        }
    }

    fn outermost(&self, mut t: Term, run: &mut Run) -> Result<Term, ReduceError> {
        loop {
            match self.step_outermost(&t, run)? {
                Some(next) => t = next,
                None => return Ok(t),
            }
        }
    }

    fn step_outermost(&self, t: &Term, run: &mut Run) -> Result<Option<Term>, ReduceError> {
        if let Some(next) = self.rewrite_root(t, run)? {
            return Ok(Some(next));
        }
        if let Term::App { op, args } = t {
            for (i, a) in args.iter().enumerate() {
                if let Some(next) = self.step_outermost(a, run)? {
                    let mut args = args.clone();
                    args[i] = next;
                    return Ok(Some(Term::App {
                        op: op.clone(),
                        args,
                    }));
                }
            }
        }
        Ok(None)
    }

    /// One rewrite step at the root, if any rule, builtin or implicit
    /// stuttering step applies.
    fn rewrite_root(&self, t: &Term, run: &mut Run) -> Result<Option<Term>, ReduceError> {
        let Term::App { op, args } = t else {
            return Ok(None);
        };
        if prelude::is_builtin_op(op, args.len()) && args.iter().all(|a| self.is_value(a)) {
            if let Some(v) = prelude::eval_builtin(op, args) {
                if v != *t {
                    self.tick(run, t)?;
                    return Ok(Some(v));
                }
            }
        }
        let key = OpKey::new(op, args.len());
        if let Some(rules) = self.rules.get(&key) {
            for rule in rules {
                let mut subst = BTreeMap::new();
                if !self.matches(&rule.lhs, t, &mut subst) {
                    continue;
                }
                if let Some(c) = &rule.condition {
                    let c = c.substitute(&subst);
                    let value = self.normalize(c.clone(), run)?;
                    match value.as_bool() {
                        Some(true) => {}
                        Some(false) => continue,
                        None => {
                            self.warnings.lock().unwrap().insert(format!(
                                "condition `{c}` of equation at {} is stuck at `{value}`; equation skipped",
                                rule.origin
                            ));
                            continue;
                        }
                    }
                }
                self.tick(run, t)?;
                return Ok(Some(rule.rhs.substitute(&subst)));
            }
        }
        if let Some(st) = &self.stutter {
            let target = st
                .observations
                .get(&key)
                .and_then(|&pos| Some((pos, st.transitions.get(&args[pos].head()?)?)));
            if let Some((pos, (top, cond))) = target {
                if let Some((inner, params)) = top.split(&args[pos]) {
                    let mut cargs: Vec<Term> = params.into_iter().cloned().collect();
                    cargs.insert(top.state_index, inner.clone());
                    let c = self.normalize(Term::app(cond, cargs), run)?;
                    if c.as_bool() == Some(false) {
                        self.tick(run, t)?;
                        let mut args = args.clone();
                        args[pos] = inner.clone();
                        return Ok(Some(Term::App {
                            op: op.clone(),
                            args,
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    fn matches(&self, pat: &Term, t: &Term, subst: &mut BTreeMap<String, Term>) -> bool {
        match (pat, t) {
            (Term::Var { name, sort }, _) => {
                if let Some(bound) = subst.get(name) {
                    return bound == t;
                }
                let fits = match self.sig.sort_of(t) {
                    Ok(s) => self.sig.leq(&s, sort),
                    Err(_) => false,
                };
                if fits {
                    subst.insert(name.clone(), t.clone());
                }
                fits
            }
            (Term::App { op: po, args: pa }, Term::App { op, args }) => {
                po == op
                    && pa.len() == args.len()
                    && pa.iter().zip(args).all(|(p, a)| self.matches(p, a, subst))
            }
            (Term::Int(a), Term::Int(b)) => a == b,
            (Term::Ident { value: a, .. }, Term::Ident { value: b, .. }) => a == b,
            _ => false,
        }
    }
}
