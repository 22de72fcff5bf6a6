use serde::Serialize;

use super::expr::Expr;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assignable {
    Nothing,
    Fields(Vec<String>),
}

/// One contract case; a method's cases are joined with `also`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ContractCase {
    pub requires: Vec<Expr>,
    pub ensures: Vec<Expr>,
    pub assignable: Option<Assignable>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    /// Projection getter.
    Getter,
    Observer,
    Constructor,
    /// Additional initial state as a static factory.
    Factory,
    Equals,
    DeepCopy,
    Transition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Param {
    pub name: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractMethod {
    pub name: String,
    pub kind: MethodKind,
    /// Operator the method was generated from.
    pub source: Option<String>,
    pub params: Vec<Param>,
    /// `None` for constructors.
    pub return_type: Option<String>,
    pub pure: bool,
    /// Render the contract as `public normal_behavior`.
    pub normal_behavior: bool,
    pub cases: Vec<ContractCase>,
    /// Ghost statements run first in the body, e.g. `set temp = new C(this)`.
    pub preamble: Vec<String>,
    /// Placeholder returned by the generated body.
    pub placeholder: Option<String>,
}

impl ContractMethod {
    pub fn new(name: &str, kind: MethodKind) -> ContractMethod {
        ContractMethod {
            name: name.to_string(),
            kind,
            source: None,
            params: Vec::new(),
            return_type: None,
            pure: false,
            normal_behavior: false,
            cases: Vec::new(),
            preamble: Vec::new(),
            placeholder: None,
        }
    }

    pub fn is_constructor(&self) -> bool {
        matches!(self.kind, MethodKind::Constructor | MethodKind::DeepCopy)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhostField {
    pub name: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractClass {
    pub name: String,
    /// Module the class was generated from.
    pub module: String,
    pub extends: Option<String>,
    pub ghosts: Vec<GhostField>,
    pub methods: Vec<ContractMethod>,
}

impl ContractClass {
    pub fn new(name: &str, module: &str) -> ContractClass {
        ContractClass {
            name: name.to_string(),
            module: module.to_string(),
            extends: None,
            ghosts: Vec::new(),
            methods: Vec::new(),
        }
    }

    pub fn method(&self, name: &str) -> Option<&ContractMethod> {
        self.methods.iter().find(|m| m.name == name)
    }

    /// The method generated from operator `op` with the given kinds.
    pub fn method_for(&self, op: &str, kinds: &[MethodKind]) -> Option<&ContractMethod> {
        self.methods
            .iter()
            .find(|m| m.source.as_deref() == Some(op) && kinds.contains(&m.kind))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("contract class serializes");
        s.push('\n');
        s
    }
}
