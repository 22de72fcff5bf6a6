//! Scenario files and execution traces.
//!
//! A scenario is a JSON array of steps:
//! `[{"transition": "add", "args": ["u1", 10]}]`. Identifier arguments may
//! be written as numbers or as strings ending in digits (`"u1"` is 1).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{DataValue, InterpError, Interpreter, ReduceError, StateValue};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioStep {
    pub transition: String,
    #[serde(default)]
    pub args: Vec<serde_json::Value>,
}

pub fn parse_scenario(json: &str) -> Result<Vec<ScenarioStep>, serde_json::Error> {
    serde_json::from_str(json)
}

#[derive(Clone, Debug)]
pub enum ObsValue {
    Value(DataValue),
    /// No equation applies; the stuck subterm is kept for display.
    Undefined(String),
}

impl ObsValue {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            ObsValue::Value(v) => v.as_int(),
            ObsValue::Undefined(_) => None,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            ObsValue::Value(v) => v.to_json(),
            ObsValue::Undefined(_) => serde_json::json!("undefined"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Observation {
    pub observer: String,
    pub args: Vec<DataValue>,
    pub value: ObsValue,
}

impl Observation {
    pub fn label(&self) -> String {
        if self.args.is_empty() {
            self.observer.clone()
        } else {
            let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
            format!("{}({})", self.observer, args.join(", "))
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub index: usize,
    /// `None` for the initial snapshot.
    pub transition: Option<String>,
    pub args: Vec<DataValue>,
    pub effective: Option<bool>,
    pub state: StateValue,
    pub observations: Vec<Observation>,
}

impl TraceStep {
    pub fn observation(&self, label: &str) -> Option<&ObsValue> {
        self.observations
            .iter()
            .find(|o| o.label() == label)
            .map(|o| &o.value)
    }
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub module: String,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    /// Values of one observation label across all steps.
    pub fn series(&self, label: &str) -> Vec<Option<i64>> {
        self.steps
            .iter()
            .map(|s| s.observation(label).and_then(|v| v.as_int()))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            match &s.transition {
                None => writeln!(out, "step {}: {}", s.index, s.state.initial).unwrap(),
                Some(t) => {
                    let args: Vec<String> = s.args.iter().map(|a| a.to_string()).collect();
                    let eff = if s.effective == Some(true) {
                        "effective"
                    } else {
                        "ineffective"
                    };
                    writeln!(out, "step {}: {}({}) [{eff}]", s.index, t, args.join(", ")).unwrap();
                }
            }
            for o in &s.observations {
                let v = match &o.value {
                    ObsValue::Value(v) => v.to_string(),
                    ObsValue::Undefined(_) => "undefined".to_string(),
                };
                writeln!(out, "  {} = {v}", o.label()).unwrap();
            }
        }
        out
    }

    /// One JSON object per step, newline terminated.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let observations: Vec<serde_json::Value> = s
                .observations
                .iter()
                .map(|o| {
                    serde_json::json!({
                        "observer": o.observer,
                        "args": o.args.iter().map(DataValue::to_json).collect::<Vec<_>>(),
                        "value": o.value.to_json(),
                    })
                })
                .collect();
            let line = serde_json::json!({
                "step": s.index,
                "transition": s.transition,
                "args": s.args.iter().map(DataValue::to_json).collect::<Vec<_>>(),
                "effective": s.effective,
                "state": s.state.to_string(),
                "observations": observations,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

impl Interpreter {
    fn json_arg(
        &self,
        v: &serde_json::Value,
        sort: &str,
        op: &str,
        position: usize,
    ) -> Result<DataValue, InterpError> {
        let mismatch = || InterpError::SortMismatch {
            op: op.to_string(),
            position,
            expected: sort.to_string(),
            value: v.to_string(),
        };
        match v {
            serde_json::Value::Number(n) => n.as_i64().map(DataValue::Int).ok_or_else(mismatch),
            serde_json::Value::Bool(b) => Ok(DataValue::Bool(*b)),
            serde_json::Value::String(s) if self.rewriter.signature().is_identifier_sort(sort) => {
                let digits = s.trim_start_matches(|c: char| !c.is_ascii_digit());
                if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                    return Err(mismatch());
                }
                digits.parse().map(DataValue::Int).map_err(|_| mismatch())
            }
            _ => Err(mismatch()),
        }
    }

    /// Observes every probe of the state. Stuck observations are shown as
    /// undefined; a projection onto a transition of an absent component is
    /// an error.
    pub fn snapshot(&self, state: &StateValue) -> Result<Vec<super::Observation>, InterpError> {
        let results = self.mode.map(self.probes(), |p| {
            match self.observe(state, &p.op.name, &p.args) {
                Ok(v) => Ok(ObsValue::Value(v)),
                Err(InterpError::Reduce(ReduceError::Stuck { subterm, .. })) => {
                    Ok(ObsValue::Undefined(subterm))
                }
                Err(e) => Err(e),
            }
        });
        self.probes()
            .iter()
            .zip(results)
            .map(|(p, r)| {
                Ok(Observation {
                    observer: p.op.name.clone(),
                    args: p.args.clone(),
                    value: r?,
                })
            })
            .collect()
    }

    /// Runs the steps from the first initial state, observing after each.
    pub fn run_scenario(&self, steps: &[ScenarioStep]) -> Result<Trace, InterpError> {
        let mut state = self.initial()?;
        let mut trace = Trace {
            module: self.module.clone(),
            steps: vec![TraceStep {
                index: 0,
                transition: None,
                args: Vec::new(),
                effective: None,
                observations: self.snapshot(&state)?,
                state: state.clone(),
            }],
        };
        for (i, step) in steps.iter().enumerate() {
            let tr = self
                .model()
                .transition(&step.transition)
                .ok_or_else(|| InterpError::UnknownTransition(step.transition.clone()))?;
            let sorts = tr.op.param_sorts();
            if sorts.len() != step.args.len() {
                return Err(InterpError::ArityMismatch {
                    op: step.transition.clone(),
                    expected: sorts.len(),
                    got: step.args.len(),
                });
            }
            let args = step
                .args
                .iter()
                .zip(&sorts)
                .enumerate()
                .map(|(k, (v, s))| self.json_arg(v, s, &step.transition, k + 1))
                .collect::<Result<Vec<_>, _>>()?;
            let effective = self.check_effective(&state, &step.transition, &args)?;
            state = self.apply_transition(&state, &step.transition, &args)?;
            let observations = self.snapshot(&state).map_err(|e| match e {
                InterpError::ProjectionAbsent(m) => {
                    InterpError::ProjectionAbsent(format!("after step {}: {m}", i + 1))
                }
                e => e,
            })?;
            trace.steps.push(TraceStep {
                index: i + 1,
                transition: Some(step.transition.clone()),
                args,
                effective: Some(effective),
                state: state.clone(),
                observations,
            });
        }
        Ok(trace)
    }
}
