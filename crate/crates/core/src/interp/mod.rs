//! Executes OTS specifications by rewriting and checks behavioral
//! equivalence over bounded data domains.

mod props;
pub mod rewrite;
mod scenario;
mod value;

pub use props::{ConfluenceMismatch, PropertyReport, Violation};
pub use rewrite::{ReduceError, Rewriter, Strategy};
pub use scenario::{parse_scenario, ObsValue, Observation, ScenarioStep, Trace, TraceStep};
pub use value::{DataValue, DomainBounds, HistoryEntry, InterpError, StateValue};

use std::collections::BTreeMap;
use std::fmt;

use crate::analyzer::{classify, object_modules, OtsModel, StateOp};
use crate::ast::{ModuleSet, Term, BOOL, INT, NAT};
use crate::diag::Diagnostics;
use crate::exec::ExecMode;

#[derive(Clone, Copy, Debug, Default)]
pub struct InterpOptions {
    /// Observe `o(tau(S, a))` as `o(S)` when no equation applies and the
    /// effective condition of `tau` reduces to false.
    pub implicit_stutter: bool,
    pub mode: ExecMode,
}

/// One observation of a state: an observer or projection with fixed data
/// arguments.
#[derive(Clone, Debug)]
pub struct Probe {
    pub op: StateOp,
    pub args: Vec<DataValue>,
    pub projection: bool,
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.op.name)?;
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
            write!(f, "({})", args.join(", "))?;
        }
        Ok(())
    }
}

/// What a probe sees. Stuck observations are `Undefined`, and two
/// undefined observations count as equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Obs {
    Value(String),
    Absent,
    Undefined,
    /// Every probe of a component state, in probe order.
    Component(Vec<Obs>),
}

impl fmt::Display for Obs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obs::Value(v) => f.write_str(v),
            Obs::Absent => f.write_str("absent"),
            Obs::Undefined => f.write_str("undefined"),
            Obs::Component(_) => f.write_str("component"),
        }
    }
}

/// The first observation that tells two states apart.
#[derive(Clone, Debug)]
pub struct Witness {
    pub observer: String,
    pub args: Vec<DataValue>,
    pub left: String,
    pub right: String,
    /// For projections: the component observation that differs.
    pub inner: Option<Box<Witness>>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
        write!(f, "{}({})", self.observer, args.join(", "))?;
        match &self.inner {
            Some(inner) => write!(f, " . {inner}"),
            None => write!(f, ": {} vs {}", self.left, self.right),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Equivalence {
    pub equal: bool,
    pub witness: Option<Witness>,
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => f.write_str("equal over tested domains"),
            Some(w) => write!(f, "distinguished by {w}"),
        }
    }
}

pub struct Interpreter {
    module: String,
    models: BTreeMap<String, OtsModel>,
    probes: BTreeMap<String, Vec<Probe>>,
    rewriter: Rewriter,
    bounds: DomainBounds,
    mode: ExecMode,
}

impl Interpreter {
    pub fn new(
        set: &ModuleSet,
        module: &str,
        bounds: DomainBounds,
    ) -> Result<Interpreter, Diagnostics> {
        Self::with_options(set, module, bounds, InterpOptions::default())
    }

    /// Classifies `module` and every object module it imports.
    pub fn with_options(
        set: &ModuleSet,
        module: &str,
        bounds: DomainBounds,
        options: InterpOptions,
    ) -> Result<Interpreter, Diagnostics> {
        let span = set
            .get(module)
            .map(|m| m.span.clone())
            .unwrap_or_else(crate::diag::SourceSpan::builtin);
        let to_diag = |e: InterpError| -> Diagnostics {
            crate::diag::Diagnostic::error(
                crate::diag::DiagCode::Interpreter,
                span.clone(),
                e.to_string(),
            )
            .into()
        };
        bounds.validate().map_err(to_diag)?;
        let main = classify(set, module)?;
        let scope: Vec<String> = set
            .scope(module)
            .map(|s| s.iter().map(|m| m.name.clone()).collect())
            .unwrap_or_default();
        let mut models = BTreeMap::new();
        for m in object_modules(set).filter(|m| scope.contains(&m.name) && m.name != module) {
            if let Ok(model) = classify(set, &m.name) {
                models.insert(m.name.clone(), model);
            }
        }
        models.insert(module.to_string(), main);
        let sig = set
            .signature(module)
            .expect("classified module has a signature");
        let refs: Vec<&OtsModel> = models.values().collect();
        let rewriter = Rewriter::new(sig, &refs, options.implicit_stutter);
        let mut interp = Interpreter {
            module: module.to_string(),
            models,
            probes: BTreeMap::new(),
            rewriter,
            bounds,
            mode: options.mode,
        };
        let mut probes = BTreeMap::new();
        for (name, model) in &interp.models {
            match interp.make_probes(model) {
                Ok(p) => {
                    probes.insert(name.clone(), p);
                }
                Err(e) if name == module => return Err(to_diag(e)),
                Err(_) => {}
            }
        }
        interp.probes = probes;
        Ok(interp)
    }

    pub fn model(&self) -> &OtsModel {
        &self.models[&self.module]
    }

    pub fn bounds(&self) -> &DomainBounds {
        &self.bounds
    }

    pub fn mode(&self) -> ExecMode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: ExecMode) {
        self.mode = mode;
    }

    pub fn rewriter(&self) -> &Rewriter {
        &self.rewriter
    }

    /// Probes of the interpreted module: observers then projections, each
    /// over every argument tuple in the bounds.
    pub fn probes(&self) -> &[Probe] {
        &self.probes[&self.module]
    }

    /// The first initial state.
    pub fn initial(&self) -> Result<StateValue, InterpError> {
        let m = self.model();
        m.initial_states
            .first()
            .map(|i| StateValue::initial(&m.module_name, i))
            .ok_or_else(|| InterpError::NoInitialState(m.module_name.clone()))
    }

    pub fn initial_states(&self) -> Vec<StateValue> {
        let m = self.model();
        m.initial_states
            .iter()
            .map(|i| StateValue::initial(&m.module_name, i))
            .collect()
    }

    pub fn reduce(&self, term: &Term) -> Result<Term, InterpError> {
        Ok(self.rewriter.reduce(term, self.bounds.max_rewrite_steps)?)
    }

    /// All values of a data sort within the bounds.
    pub fn domain(&self, sort: &str) -> Result<Vec<DataValue>, InterpError> {
        let (lo, hi) = self.bounds.int_range;
        let sig = self.rewriter.signature();
        Ok(match sort {
            INT => (lo..=hi).map(DataValue::Int).collect(),
            NAT => (lo.max(0)..=hi).map(DataValue::Int).collect(),
            BOOL => vec![DataValue::Bool(false), DataValue::Bool(true)],
            s if sig.is_identifier_sort(s) => (self.bounds.id_range.0..=self.bounds.id_range.1)
                .map(DataValue::Int)
                .collect(),
            s => return Err(InterpError::Unenumerable(s.to_string())),
        })
    }

    /// Every argument tuple for the given sorts, in lexicographic order.
    pub fn tuples(&self, sorts: &[String]) -> Result<Vec<Vec<DataValue>>, InterpError> {
        let mut out = vec![Vec::new()];
        for s in sorts {
            let dom = self.domain(s)?;
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    dom.iter().map(move |v| {
                        let mut t = prefix.clone();
                        t.push(v.clone());
                        t
                    })
                })
                .collect();
        }
        Ok(out)
    }

    fn make_probes(&self, model: &OtsModel) -> Result<Vec<Probe>, InterpError> {
        let mut probes = Vec::new();
        let ops = model
            .all_observers()
            .map(|o| (&o.op, false))
            .chain(model.projections.iter().map(|p| (&p.op, true)));
        for (op, projection) in ops {
            for args in self.tuples(&op.param_sorts())? {
                probes.push(Probe {
                    op: op.clone(),
                    args,
                    projection,
                });
            }
        }
        Ok(probes)
    }

    fn model_of(&self, state: &StateValue) -> Result<&OtsModel, InterpError> {
        self.models
            .get(&state.module)
            .ok_or_else(|| InterpError::ForeignState {
                expected: self.module.clone(),
                found: state.module.clone(),
            })
    }

    fn check_args(&self, op: &StateOp, args: &[DataValue]) -> Result<(), InterpError> {
        let sorts = op.param_sorts();
        if sorts.len() != args.len() {
            return Err(InterpError::ArityMismatch {
                op: op.name.clone(),
                expected: sorts.len(),
                got: args.len(),
            });
        }
        let sig = self.rewriter.signature();
        for (i, (s, v)) in sorts.iter().zip(args).enumerate() {
            let ok = match (s.as_str(), v) {
                (NAT, DataValue::Int(n)) => *n >= 0,
                (INT, DataValue::Int(_)) => true,
                (BOOL, DataValue::Bool(_)) => true,
                (s, DataValue::Int(_)) => sig.is_identifier_sort(s),
                _ => false,
            };
            if !ok {
                return Err(InterpError::SortMismatch {
                    op: op.name.clone(),
                    position: i + 1,
                    expected: s.clone(),
                    value: v.to_string(),
                });
            }
        }
        Ok(())
    }

    fn data_term(&self, v: &DataValue, sort: &str) -> Result<Term, InterpError> {
        Ok(match v {
            DataValue::Int(n) if self.rewriter.signature().is_identifier_sort(sort) => {
                Term::Ident {
                    sort: sort.to_string(),
                    value: *n,
                }
            }
            DataValue::Int(n) => Term::Int(*n),
            DataValue::Bool(b) => Term::bool(*b),
            DataValue::State(s) => self.state_term(s)?,
            DataValue::Absent => {
                let a = self
                    .models
                    .values()
                    .flat_map(|m| &m.absent_values)
                    .find(|a| a.sort == sort);
                Term::constant(
                    &a.ok_or_else(|| InterpError::Unenumerable(sort.to_string()))?
                        .name,
                )
            }
        })
    }

    fn data_terms(&self, op: &StateOp, args: &[DataValue]) -> Result<Vec<Term>, InterpError> {
        op.param_sorts()
            .iter()
            .zip(args)
            .map(|(s, v)| self.data_term(v, s))
            .collect()
    }

    /// The ground term denoted by a state.
    pub fn state_term(&self, state: &StateValue) -> Result<Term, InterpError> {
        let model = self.model_of(state)?;
        let mut t = Term::constant(&state.initial);
        for h in &state.history {
            let tr = model
                .transition(&h.transition)
                .ok_or_else(|| InterpError::UnknownTransition(h.transition.clone()))?;
            let params = self.data_terms(&tr.op, &h.args)?;
            t = tr.op.apply(t, &params);
        }
        Ok(t)
    }

    /// Reads a reduced term back as data of the given sort.
    fn term_data(&self, t: &Term, sort: &str) -> Result<DataValue, InterpError> {
        match t {
            Term::Int(n) | Term::Ident { value: n, .. } => Ok(DataValue::Int(*n)),
            _ if t.as_bool().is_some() => Ok(DataValue::Bool(t.as_bool().unwrap())),
            Term::App { op, args } if args.is_empty() && self.rewriter.is_absent(op) => {
                Ok(DataValue::Absent)
            }
            _ if self.rewriter.signature().is_hidden(sort) => {
                Ok(DataValue::State(self.term_state(t)?))
            }
            _ => Err(ReduceError::Stuck {
                term: t.to_string(),
                subterm: t.to_string(),
                involves_absent: false,
            }
            .into()),
        }
    }

    fn term_state(&self, t: &Term) -> Result<StateValue, InterpError> {
        let mut entries = Vec::new();
        let mut cur = t;
        while let Term::App { op, args } = cur {
            if args.is_empty() {
                if self.rewriter.is_absent(op) {
                    let first = entries
                        .last()
                        .map(|(n, _): &(String, _)| n.clone())
                        .unwrap_or_default();
                    return Err(InterpError::ProjectionAbsent(format!(
                        "`{t}` applies transition `{first}` to the absent component `{op}`"
                    )));
                }
                if let Some(m) = self.models.values().find(|m| m.initial_states.contains(op)) {
                    let mut s = StateValue::initial(&m.module_name, op);
                    for (name, data) in entries.into_iter().rev() {
                        s = s.then(&name, data);
                    }
                    return Ok(s);
                }
                break;
            }
            let Some(tr) = self
                .models
                .values()
                .flat_map(|m| &m.transitions)
                .find(|tr| tr.op.split(cur).is_some())
            else {
                break;
            };
            let (inner, params) = tr.op.split(cur).unwrap();
            let data = params
                .iter()
                .zip(tr.op.param_sorts())
                .map(|(p, s)| self.term_data(p, &s))
                .collect::<Result<Vec<_>, _>>()?;
            entries.push((tr.op.name.clone(), data));
            cur = inner;
        }
        Err(ReduceError::Stuck {
            term: t.to_string(),
            subterm: cur.to_string(),
            involves_absent: false,
        }
        .into())
    }

    fn find_observation<'m>(&self, model: &'m OtsModel, name: &str) -> Option<&'m StateOp> {
        model
            .observer(name)
            .map(|o| &o.op)
            .or_else(|| model.projection(name).map(|p| &p.op))
    }

    /// Reduces `o(state, args)`.
    pub fn observe(
        &self,
        state: &StateValue,
        observer: &str,
        args: &[DataValue],
    ) -> Result<DataValue, InterpError> {
        let model = self.model_of(state)?;
        let op = self
            .find_observation(model, observer)
            .ok_or_else(|| InterpError::UnknownObserver(observer.to_string()))?;
        self.check_args(op, args)?;
        let term = op.apply(self.state_term(state)?, &self.data_terms(op, args)?);
        let value = self.reduce(&term)?;
        self.term_data(&value, &op.coarity)
    }

    /// Value of the effective condition; transitions without one are always
    /// effective.
    pub fn check_effective(
        &self,
        state: &StateValue,
        transition: &str,
        args: &[DataValue],
    ) -> Result<bool, InterpError> {
        let model = self.model_of(state)?;
        let tr = model
            .transition(transition)
            .ok_or_else(|| InterpError::UnknownTransition(transition.to_string()))?;
        self.check_args(&tr.op, args)?;
        let Some(c) = &tr.effective_condition else {
            return Ok(true);
        };
        let term = tr
            .op
            .apply(self.state_term(state)?, &self.data_terms(&tr.op, args)?);
        let Term::App { args: cargs, .. } = term else {
            unreachable!()
        };
        let value = self.reduce(&Term::App {
            op: c.op.clone(),
            args: cargs,
        })?;
        value.as_bool().ok_or_else(|| InterpError::NonBoolean {
            op: c.op.clone(),
            value: value.to_string(),
        })
    }

    /// The successor state; defined whether or not the transition is
    /// effective.
    pub fn apply_transition(
        &self,
        state: &StateValue,
        transition: &str,
        args: &[DataValue],
    ) -> Result<StateValue, InterpError> {
        let model = self.model_of(state)?;
        let tr = model
            .transition(transition)
            .ok_or_else(|| InterpError::UnknownTransition(transition.to_string()))?;
        self.check_args(&tr.op, args)?;
        Ok(state.then(transition, args.to_vec()))
    }

    /// Observation of a probe on a state term.
    fn probe_obs(&self, probe: &Probe, state: &Term) -> Result<Obs, InterpError> {
        let params = self.data_terms(&probe.op, &probe.args)?;
        let term = probe.op.apply(state.clone(), &params);
        match self.reduce(&term) {
            Ok(v) => self.obs_of(&v, &probe.op.coarity),
            Err(InterpError::Reduce(ReduceError::Stuck { .. })) => Ok(Obs::Undefined),
            Err(e) => Err(e),
        }
    }

    fn obs_of(&self, v: &Term, sort: &str) -> Result<Obs, InterpError> {
        match v {
            Term::App { op, args } if args.is_empty() && self.rewriter.is_absent(op) => {
                Ok(Obs::Absent)
            }
            _ if self.rewriter.signature().is_hidden(sort) => {
                let component = self.term_state(v)?;
                Ok(Obs::Component(self.fingerprint_term(&component.module, v)?))
            }
            Term::Ident { value, .. } => Ok(Obs::Value(value.to_string())),
            other => Ok(Obs::Value(other.to_string())),
        }
    }

    fn fingerprint_term(&self, module: &str, state: &Term) -> Result<Vec<Obs>, InterpError> {
        let probes = self
            .probes
            .get(module)
            .ok_or_else(|| InterpError::Unenumerable(module.to_string()))?;
        probes.iter().map(|p| self.probe_obs(p, state)).collect()
    }

    /// Every probe's observation, recursing into component states.
    pub fn fingerprint(&self, state: &StateValue) -> Result<Vec<Obs>, InterpError> {
        let term = self.state_term(state)?;
        let probes = self
            .probes
            .get(&state.module)
            .ok_or_else(|| InterpError::Unenumerable(state.module.clone()))?;
        let results = self.mode.map(probes, |p| self.probe_obs(p, &term));
        results.into_iter().collect()
    }

    /// Behavioral equality over the bounded domains. The witness is the
    /// first distinguishing probe in enumeration order, whatever the
    /// execution mode.
    pub fn behaviorally_equal(
        &self,
        s1: &StateValue,
        s2: &StateValue,
    ) -> Result<Equivalence, InterpError> {
        if s1.module != s2.module {
            return Err(InterpError::ForeignState {
                expected: s1.module.clone(),
                found: s2.module.clone(),
            });
        }
        let (t1, t2) = (self.state_term(s1)?, self.state_term(s2)?);
        let probes = self
            .probes
            .get(&s1.module)
            .ok_or_else(|| InterpError::Unenumerable(s1.module.clone()))?;
        let hit = self
            .mode
            .find_first(probes, |p| match self.compare_probe(p, &t1, &t2) {
                Ok(None) => None,
                Ok(Some(w)) => Some(Ok(w)),
                Err(e) => Some(Err(e)),
            });
        match hit {
            None => Ok(Equivalence {
                equal: true,
                witness: None,
            }),
            Some((_, Ok(w))) => Ok(Equivalence {
                equal: false,
                witness: Some(w),
            }),
            Some((_, Err(e))) => Err(e),
        }
    }

    fn compare_probe(
        &self,
        p: &Probe,
        t1: &Term,
        t2: &Term,
    ) -> Result<Option<Witness>, InterpError> {
        let (o1, o2) = (self.probe_obs(p, t1)?, self.probe_obs(p, t2)?);
        if o1 == o2 {
            return Ok(None);
        }
        let mut w = Witness {
            observer: p.op.name.clone(),
            args: p.args.clone(),
            left: o1.to_string(),
            right: o2.to_string(),
            inner: None,
        };
        if let (Obs::Component(_), Obs::Component(_)) = (&o1, &o2) {
            let params = self.data_terms(&p.op, &p.args)?;
            let c1 = self.reduce(&p.op.apply(t1.clone(), &params))?;
            let c2 = self.reduce(&p.op.apply(t2.clone(), &params))?;
            let module = self.term_state(&c1)?.module;
            for cp in &self.probes[&module] {
                if let Some(inner) = self.compare_probe(cp, &c1, &c2)? {
                    w.inner = Some(Box::new(inner));
                    break;
                }
            }
        }
        Ok(Some(w))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::analyzer::tests::corpus;

    pub(crate) fn account(stutter: bool) -> Interpreter {
        let set = corpus(&["account.cafe"]);
        let opts = InterpOptions {
            implicit_stutter: stutter,
            ..Default::default()
        };
        Interpreter::with_options(&set, "ACCOUNT", DomainBounds::default(), opts).unwrap()
    }

    pub(crate) fn account_system() -> Interpreter {
        let set = corpus(&["account.cafe", "account_sys.cafe"]);
        let opts = InterpOptions {
            implicit_stutter: true,
            ..Default::default()
        };
        Interpreter::with_options(&set, "ACCOUNT-SYSTEM", DomainBounds::default(), opts).unwrap()
    }

    fn int(n: i64) -> DataValue {
        DataValue::Int(n)
    }

    #[test]
    fn observe_account() {
        let it = account(true);
        let init = it.initial().unwrap();
        assert_eq!(it.observe(&init, "read", &[]).unwrap().as_int(), Some(0));
        let s = it.apply_transition(&init, "add", &[int(5)]).unwrap();
        let s = it.apply_transition(&s, "add", &[int(3)]).unwrap();
        assert_eq!(it.observe(&s, "read", &[]).unwrap().as_int(), Some(8));
        let stutter = it.apply_transition(&init, "add", &[int(-1)]).unwrap();
        assert_eq!(it.observe(&stutter, "read", &[]).unwrap().as_int(), Some(0));
    }

    #[test]
    fn effective_conditions() {
        let it = account(false);
        let init = it.initial().unwrap();
        assert!(it.check_effective(&init, "add", &[int(5)]).unwrap());
        assert!(!it.check_effective(&init, "add", &[int(-1)]).unwrap());
        let sys = account_system();
        let s = sys.initial().unwrap();
        for n in 0..3 {
            assert!(sys
                .check_effective(&s, "deposit", &[int(1), int(n)])
                .unwrap());
        }
    }

    #[test]
    fn argument_checks() {
        let it = account(false);
        let init = it.initial().unwrap();
        assert!(matches!(
            it.apply_transition(&init, "add", &[]),
            Err(InterpError::ArityMismatch { .. })
        ));
        assert!(matches!(
            it.apply_transition(&init, "sub", &[int(1)]),
            Err(InterpError::UnknownTransition(_))
        ));
        assert!(matches!(
            it.apply_transition(&init, "add", &[DataValue::Bool(true)]),
            Err(InterpError::SortMismatch { .. })
        ));
        let sys = account_system();
        let s = sys.initial().unwrap();
        assert!(matches!(
            sys.apply_transition(&s, "add", &[int(1), int(-1)]),
            Err(InterpError::SortMismatch { .. })
        ));
    }

    #[test]
    fn account_system_projection() {
        let it = account_system();
        let init = it.initial().unwrap();
        assert!(it.observe(&init, "account", &[int(1)]).unwrap().is_absent());
        let s = it
            .apply_transition(&init, "add", &[int(1), int(10)])
            .unwrap();
        let s = it
            .apply_transition(&s, "deposit", &[int(1), int(5)])
            .unwrap();
        assert_eq!(
            it.observe(&s, "balance", &[int(1)]).unwrap().as_int(),
            Some(15)
        );
        match it.observe(&s, "account", &[int(1)]).unwrap() {
            DataValue::State(c) => assert_eq!(c.to_string(), "init ; add(10) ; add(5)"),
            other => panic!("{other:?}"),
        }
        let bad = it
            .apply_transition(&init, "deposit", &[int(1), int(5)])
            .unwrap();
        assert!(it
            .observe(&bad, "account", &[int(1)])
            .unwrap_err()
            .is_projection_absent());
    }

    #[test]
    fn equivalence_examples() {
        let it = account(true);
        let init = it.initial().unwrap();
        let neg = it.apply_transition(&init, "add", &[int(-1)]).unwrap();
        assert!(it.behaviorally_equal(&init, &neg).unwrap().equal);
        let pos = it.apply_transition(&init, "add", &[int(5)]).unwrap();
        let eq = it.behaviorally_equal(&init, &pos).unwrap();
        assert!(!eq.equal);
        let w = eq.witness.unwrap();
        assert_eq!(
            (
                w.observer.as_str(),
                w.args.len(),
                w.left.as_str(),
                w.right.as_str()
            ),
            ("read", 0, "0", "5")
        );
        assert!(it.behaviorally_equal(&pos, &pos).unwrap().equal);
    }

    #[test]
    fn component_witness_recurses() {
        let it = account_system();
        let init = it.initial().unwrap();
        let a = it
            .apply_transition(&init, "add", &[int(1), int(1)])
            .unwrap();
        let b = it
            .apply_transition(&init, "add", &[int(1), int(2)])
            .unwrap();
        let w = it.behaviorally_equal(&a, &b).unwrap().witness.unwrap();
        assert_eq!(w.observer, "balance");
        let c = it
            .apply_transition(&init, "add", &[int(2), int(0)])
            .unwrap();
        let w = it.behaviorally_equal(&init, &c).unwrap().witness.unwrap();
        assert_eq!(w.to_string(), "balance(2): undefined vs 0");

        let p = it
            .probes()
            .iter()
            .find(|p| p.op.name == "account" && p.args[0].as_int() == Some(1))
            .unwrap();
        let (ta, tb) = (it.state_term(&a).unwrap(), it.state_term(&b).unwrap());
        let w = it.compare_probe(p, &ta, &tb).unwrap().unwrap();
        assert_eq!(w.to_string(), "account(1) . read(): 1 vs 2");
    }

    #[test]
    fn modes_agree_on_witnesses() {
        let mut it = account_system();
        let init = it.initial().unwrap();
        let a = it
            .apply_transition(&init, "add", &[int(2), int(3)])
            .unwrap();
        let par = it
            .behaviorally_equal(&init, &a)
            .unwrap()
            .witness
            .unwrap()
            .to_string();
        it.set_mode(ExecMode::Sequential);
        let seq = it
            .behaviorally_equal(&init, &a)
            .unwrap()
            .witness
            .unwrap()
            .to_string();
        assert_eq!(par, seq);
    }
}
