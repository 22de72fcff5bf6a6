//! Parsing, analysis, execution and contract generation for observational
//! transition system (OTS) specifications written in a CafeOBJ subset.
//!
//! The pipeline is `parser` -> `ast::ModuleSet` -> `analyzer::OtsModel`,
//! which then feeds either the rewriting `interp`reter or `codegen`.

pub mod analyzer;
pub mod ast;
pub mod codegen;
pub mod diag;
pub mod exec;
pub mod interp;
pub mod parser;
pub mod prelude;

pub use ast::{ModuleSet, SpecModule, Term};
pub use diag::{DiagCode, Diagnostic, Diagnostics, Severity, SourceSpan};
