#![allow(dead_code)]

use std::path::PathBuf;

use otsc_core::codegen::CodegenOptions;
use otsc_core::interp::{DomainBounds, InterpOptions, Interpreter};
use otsc_core::parser::parse_spec;
use otsc_core::ModuleSet;

pub fn corpus_path(rel: &str) -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus")).join(rel)
}

pub fn load(files: &[&str]) -> ModuleSet {
    let paths: Vec<PathBuf> = files.iter().map(|f| corpus_path(f)).collect();
    parse_spec(&paths).unwrap_or_else(|d| panic!("{d}"))
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(corpus_path(rel)).unwrap()
}

/// Method names used by the reference listings.
pub fn listing_options() -> CodegenOptions {
    let mut o = CodegenOptions::default();
    for (k, v) in [
        ("ACCOUNT.read", "balance"),
        ("ACCOUNT-SYSTEM.account", "getAcc"),
        ("ACCOUNT-SYSTEM.balance", "getBalance"),
    ] {
        o.method_names.insert(k.into(), v.into());
    }
    o
}

pub fn interpreter(files: &[&str], module: &str, bounds: DomainBounds) -> Interpreter {
    let set = load(files);
    let opts = InterpOptions {
        implicit_stutter: true,
        ..Default::default()
    };
    Interpreter::with_options(&set, module, bounds, opts).unwrap_or_else(|d| panic!("{d}"))
}

pub fn account() -> Interpreter {
    interpreter(&["account.cafe"], "ACCOUNT", DomainBounds::default())
}

pub fn account_system() -> Interpreter {
    interpreter(
        &["account.cafe", "account_sys.cafe"],
        "ACCOUNT-SYSTEM",
        DomainBounds::default(),
    )
}
