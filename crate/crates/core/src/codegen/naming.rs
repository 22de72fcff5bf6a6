use std::collections::BTreeMap;

use serde::Serialize;

use crate::ast::{BOOL, INT, NAT};

/// Java rendering of one visible sort.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TargetType {
    pub ty: String,
    /// Placeholder value returned by generated bodies.
    pub default: String,
    /// Stem for generated parameter names.
    pub param: String,
}

impl TargetType {
    pub fn new(ty: &str, param: &str) -> TargetType {
        let default = match ty {
            "int" | "long" | "short" | "byte" => "0",
            "double" | "float" => "0.0",
            "boolean" => "false",
            "char" => "'\\0'",
            _ => "null",
        };
        TargetType {
            ty: ty.to_string(),
            default: default.to_string(),
            param: param.to_string(),
        }
    }
}

/// Visible sort to target type. Identifier sorts (visible sorts without
/// constructors) map to `int` without an entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SortMapping {
    table: BTreeMap<String, TargetType>,
}

pub fn default_sort_mapping() -> SortMapping {
    let mut table = BTreeMap::new();
    table.insert(INT.to_string(), TargetType::new("int", "x"));
    table.insert(NAT.to_string(), TargetType::new("int", "n"));
    table.insert(BOOL.to_string(), TargetType::new("boolean", "b"));
    SortMapping { table }
}

impl Default for SortMapping {
    fn default() -> Self {
        default_sort_mapping()
    }
}

impl SortMapping {
    pub fn get(&self, sort: &str) -> Option<&TargetType> {
        self.table.get(sort)
    }

    /// Maps `sort` to the Java type `ty`, replacing any existing entry.
    pub fn insert(&mut self, sort: &str, ty: &str) {
        let param = self
            .table
            .get(sort)
            .map(|t| t.param.clone())
            .unwrap_or_else(|| {
                sort.chars()
                    .next()
                    .map(|c| c.to_ascii_lowercase().to_string())
                    .unwrap_or_else(|| "v".into())
            });
        self.table
            .insert(sort.to_string(), TargetType::new(ty, &param));
    }

    pub fn identifier() -> TargetType {
        TargetType::new("int", "id")
    }
}

/// Naming and mapping choices for a translation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodegenOptions {
    /// Ghost field holding the pre-state.
    pub ghost_name: String,
    /// Module name to class name.
    pub class_names: BTreeMap<String, String>,
    /// `MODULE.op` to method name.
    pub method_names: BTreeMap<String, String>,
    pub sorts: SortMapping,
}

impl Default for CodegenOptions {
    fn default() -> Self {
        CodegenOptions {
            ghost_name: "temp".into(),
            class_names: BTreeMap::new(),
            method_names: BTreeMap::new(),
            sorts: default_sort_mapping(),
        }
    }
}

impl CodegenOptions {
    pub fn class_name(&self, module: &str) -> String {
        self.class_names
            .get(module)
            .cloned()
            .unwrap_or_else(|| upper_camel(module))
    }

    pub fn method_override(&self, module: &str, op: &str) -> Option<&String> {
        self.method_names.get(&format!("{module}.{op}"))
    }
}

fn words(s: &str) -> impl Iterator<Item = &str> {
    s.split(['-', '_', '\'']).filter(|w| !w.is_empty())
}

fn capitalize(w: &str) -> String {
    let mut cs = w.chars();
    match cs.next() {
        Some(c) => c.to_ascii_uppercase().to_string() + &cs.as_str().to_ascii_lowercase(),
        None => String::new(),
    }
}

/// `ACCOUNT-SYSTEM` to `AccountSystem`.
pub fn upper_camel(s: &str) -> String {
    words(s).map(capitalize).collect()
}

/// `set-rate` to `setRate`.
pub fn lower_camel(s: &str) -> String {
    let mut out = String::new();
    for (i, w) in words(s).enumerate() {
        if i == 0 {
            out.push_str(&w.to_ascii_lowercase());
        } else {
            out.push_str(&capitalize(w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn camel_case() {
        assert_eq!(upper_camel("ACCOUNT-SYSTEM"), "AccountSystem");
        assert_eq!(upper_camel("ACCOUNT"), "Account");
        assert_eq!(upper_camel("SAVINGS2"), "Savings2");
        assert_eq!(lower_camel("set-rate"), "setRate");
        assert_eq!(lower_camel("read"), "read");
        assert_eq!(lower_camel("c-add"), "cAdd");
    }

    #[test]
    fn defaults() {
        let m = default_sort_mapping();
        assert_eq!(m.get("Int").unwrap().ty, "int");
        assert_eq!(m.get("Nat").unwrap().ty, "int");
        assert_eq!(m.get("Bool").unwrap().ty, "boolean");
        assert!(m.get("UId").is_none());
        assert_eq!(SortMapping::identifier().ty, "int");
    }

    #[test]
    fn overrides() {
        let mut m = default_sort_mapping();
        m.insert("Money", "long");
        assert_eq!(
            m.get("Money").unwrap(),
            &TargetType {
                ty: "long".into(),
                default: "0".into(),
                param: "m".into()
            }
        );
        m.insert("Int", "Integer");
        assert_eq!(m.get("Int").unwrap().param, "x");
        assert_eq!(m.get("Int").unwrap().default, "null");
        let mut o = CodegenOptions::default();
        o.class_names
            .insert("ACCOUNT-SYSTEM".into(), "AccountSYS".into());
        assert_eq!(o.class_name("ACCOUNT-SYSTEM"), "AccountSYS");
        assert_eq!(o.class_name("ACCOUNT"), "Account");
    }
}
