//! Bounded checks of stuttering, congruence and confluence over reachable
//! states.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::{DataValue, InterpError, Interpreter, Obs, StateValue, Strategy};
use crate::ast::Term;

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub description: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PropertyReport {
    /// Number of individual checks performed.
    pub checked: usize,
    /// Checks skipped because a state could not be observed (e.g. a
    /// transition applied to an absent component).
    pub skipped: usize,
    pub violations: Vec<Violation>,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} checked, {} skipped, {} violation(s)",
            self.checked,
            self.skipped,
            self.violations.len()
        )
    }
}

#[derive(Clone, Debug)]
pub struct ConfluenceMismatch {
    pub term: String,
    pub innermost: String,
    pub outermost: String,
}

type Step = (String, Vec<DataValue>);

fn step_text(name: &str, args: &[DataValue]) -> String {
    let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
    format!("{name}({})", args.join(", "))
}

impl Interpreter {
    /// Every transition instance within the bounds, in declaration order.
    pub fn transition_steps(&self) -> Result<Vec<Step>, InterpError> {
        let mut out = Vec::new();
        for tr in &self.model().transitions {
            for args in self.tuples(&tr.op.param_sorts())? {
                out.push((tr.op.name.clone(), args));
            }
        }
        Ok(out)
    }

    /// States reachable from the initial states in at most `depth` steps,
    /// breadth first.
    pub fn reachable_states(&self, depth: usize) -> Result<Vec<StateValue>, InterpError> {
        let steps = self.transition_steps()?;
        let mut all = self.initial_states();
        let mut frontier = all.clone();
        for _ in 0..depth {
            let mut next = Vec::with_capacity(frontier.len() * steps.len());
            for s in &frontier {
                for (name, args) in &steps {
                    next.push(s.then(name, args.clone()));
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        Ok(all)
    }

    /// Every ineffective transition instance on a reachable state must leave
    /// the state behaviorally unchanged.
    pub fn check_stuttering(&self, depth: usize) -> Result<PropertyReport, InterpError> {
        let states = self.reachable_states(depth)?;
        let steps = self.transition_steps()?;
        let mode = self.mode;
        let results = mode.map(&states, |s| -> Result<PropertyReport, InterpError> {
            let mut r = PropertyReport::default();
            let before = match self.fingerprint_seq(s) {
                Ok(fp) => fp,
                Err(e) if e.is_projection_absent() => {
                    r.skipped += steps.len();
                    return Ok(r);
                }
                Err(e) => return Err(e),
            };
            for (name, args) in &steps {
                if self.check_effective(s, name, args)? {
                    continue;
                }
                let next = s.then(name, args.clone());
                match self.fingerprint_seq(&next) {
                    Ok(after) => {
                        r.checked += 1;
                        if after != before {
                            let eq = self.behaviorally_equal_seq(s, &next)?;
                            r.violations.push(Violation {
                                description: format!(
                                    "`{}` is ineffective on `{s}` but changes the state: {eq}",
                                    step_text(name, args)
                                ),
                            });
                        }
                    }
                    Err(e) if e.is_projection_absent() => r.skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(r)
        });
        merge(results)
    }

    /// Behaviorally equal reachable states must stay equal under every
    /// transition instance.
    pub fn check_congruence(&self, depth: usize) -> Result<PropertyReport, InterpError> {
        let states = self.reachable_states(depth)?;
        let steps = self.transition_steps()?;
        let mode = self.mode;
        let prints = mode.map(&states, |s| observe_or_skip(self.fingerprint_seq(s)));
        let succs = mode.map(&states, |s| {
            steps
                .iter()
                .map(|(name, args)| {
                    observe_or_skip(self.fingerprint_seq(&s.then(name, args.clone())))
                })
                .collect::<Result<Vec<_>, _>>()
        });
        let mut report = PropertyReport::default();
        let mut buckets: HashMap<&Vec<Obs>, Vec<usize>> = HashMap::new();
        let mut order = Vec::new();
        for (i, p) in prints.iter().enumerate() {
            match p {
                Err(e) => return Err(e.clone()),
                Ok(None) => report.skipped += 1,
                Ok(Some(fp)) => {
                    let bucket = buckets.entry(fp).or_default();
                    if bucket.is_empty() {
                        order.push(fp);
                    }
                    bucket.push(i);
                }
            }
        }
        let succs = succs.into_iter().collect::<Result<Vec<_>, _>>()?;
        for fp in order {
            let members = &buckets[fp];
            let rep = members[0];
            for &j in &members[1..] {
                for (k, (name, args)) in steps.iter().enumerate() {
                    match (&succs[rep][k], &succs[j][k]) {
                        (Some(a), Some(b)) => {
                            report.checked += 1;
                            if a != b {
                                report.violations.push(Violation {
                                    description: format!(
                                        "`{}` and `{}` are equal but differ after `{}`",
                                        states[rep],
                                        states[j],
                                        step_text(name, args)
                                    ),
                                });
                            }
                        }
                        _ => report.skipped += 1,
                    }
                }
            }
        }
        Ok(report)
    }

    /// Observation terms over the reachable states: the terms whose normal
    /// forms the confluence check compares.
    pub fn observation_terms(&self, depth: usize) -> Result<Vec<Term>, InterpError> {
        let mut out = Vec::new();
        for s in self.reachable_states(depth)? {
            let t = self.state_term(&s)?;
            for p in self.probes() {
                let params = self.data_terms(&p.op, &p.args)?;
                out.push(p.op.apply(t.clone(), &params));
            }
        }
        Ok(out)
    }

    /// Terms whose innermost and outermost normal forms differ. Terms on
    /// which either strategy fails are reported when the failures differ.
    pub fn check_confluence(&self, terms: &[Term]) -> Vec<ConfluenceMismatch> {
        let fuel = self.bounds.max_rewrite_steps;
        let results = self.mode.map(terms, |t| {
            let inner = self
                .rewriter
                .normal_form(t, fuel, Strategy::LeftmostInnermost);
            let outer = self
                .rewriter
                .normal_form(t, fuel, Strategy::LeftmostOutermost);
            let show = |r: Result<Term, _>| match r {
                Ok(t) => t.to_string(),
                Err(super::ReduceError::Stuck { .. }) => "undefined".to_string(),
                Err(e) => format!("error: {e}"),
            };
            let (i, o) = (show(inner), show(outer));
            (i != o).then(|| ConfluenceMismatch {
                term: t.to_string(),
                innermost: i,
                outermost: o,
            })
        });
        results.into_iter().flatten().collect()
    }

    fn fingerprint_seq(&self, s: &StateValue) -> Result<Vec<Obs>, InterpError> {
        let term = self.state_term(s)?;
        let probes = self
            .probes
            .get(&s.module)
            .ok_or_else(|| InterpError::Unenumerable(s.module.clone()))?;
        probes.iter().map(|p| self.probe_obs(p, &term)).collect()
    }

    fn behaviorally_equal_seq(
        &self,
        a: &StateValue,
        b: &StateValue,
    ) -> Result<super::Equivalence, InterpError> {
        let (ta, tb) = (self.state_term(a)?, self.state_term(b)?);
        for p in &self.probes[&a.module] {
            if let Some(w) = self.compare_probe(p, &ta, &tb)? {
                return Ok(super::Equivalence {
                    equal: false,
                    witness: Some(w),
                });
            }
        }
        Ok(super::Equivalence {
            equal: true,
            witness: None,
        })
    }
}

fn observe_or_skip(r: Result<Vec<Obs>, InterpError>) -> Result<Option<Vec<Obs>>, InterpError> {
    match r {
        Ok(fp) => Ok(Some(fp)),
        Err(e) if e.is_projection_absent() => Ok(None),
        Err(e) => Err(e),
    }
}

fn merge(results: Vec<Result<PropertyReport, InterpError>>) -> Result<PropertyReport, InterpError> {
    let mut total = PropertyReport::default();
    for r in results {
        let r = r?;
        total.checked += r.checked;
        total.skipped += r.skipped;
        total.violations.extend(r.violations);
    }
    Ok(total)
}
