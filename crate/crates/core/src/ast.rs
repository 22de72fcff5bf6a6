//! Typed syntax shared by the parser, analyzer, interpreter and code generator.
//!
//! A [`ModuleSet`] is the checked, import-closed unit everything downstream
//! works on. Per-module views of it are [`Signature`]s: the sorts, operators
//! and equations visible from one module through its transitive imports.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diag::{DiagCode, Diagnostic, Diagnostics, SourceSpan};
use crate::prelude;

pub const EQ_OP: &str = "_==_";
pub const NE_OP: &str = "_=/=_";
pub const BOOL: &str = "Bool";
pub const INT: &str = "Int";
pub const NAT: &str = "Nat";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SortKind {
    Visible,
    Hidden,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortDecl {
    pub name: String,
    pub kind: SortKind,
    pub supersorts: Vec<String>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorDecl {
    pub name: String,
    pub arity: Vec<String>,
    pub coarity: String,
    pub behavioral: bool,
    pub span: SourceSpan,
}

impl OperatorDecl {
    /// Binary infix operators are declared as `_sym_`.
    pub fn is_infix(&self) -> bool {
        is_infix_name(&self.name)
    }

    /// Argument positions marked by underscores in a mixfix name.
    pub fn mixfix_slots(&self) -> Vec<usize> {
        self.name
            .char_indices()
            .filter(|(_, c)| *c == '_')
            .map(|(i, _)| i)
            .collect()
    }

    pub fn key(&self) -> OpKey {
        OpKey::new(&self.name, self.arity.len())
    }
}

pub fn is_infix_name(name: &str) -> bool {
    name.len() > 2
        && name.starts_with('_')
        && name.ends_with('_')
        && name[1..name.len() - 1].find('_').is_none()
}

/// Operators are identified by name and argument count.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpKey {
    pub name: String,
    pub argc: usize,
}

impl OpKey {
    pub fn new(name: &str, argc: usize) -> Self {
        OpKey {
            name: name.to_string(),
            argc,
        }
    }
}

impl fmt::Display for OpKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.argc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var {
        name: String,
        sort: String,
    },
    App {
        op: String,
        args: Vec<Term>,
    },
    /// Integer literal; non-negative literals have sort Nat.
    Int(i64),
    /// Value of an identifier sort (a visible sort without constructors).
    Ident {
        sort: String,
        value: i64,
    },
}

impl Term {
    pub fn var(name: &str, sort: &str) -> Term {
        Term::Var {
            name: name.to_string(),
            sort: sort.to_string(),
        }
    }

    pub fn app(op: &str, args: Vec<Term>) -> Term {
        Term::App {
            op: op.to_string(),
            args,
        }
    }

    pub fn constant(op: &str) -> Term {
        Term::app(op, Vec::new())
    }

    pub fn bool(b: bool) -> Term {
        Term::constant(if b { "true" } else { "false" })
    }

    pub fn head(&self) -> Option<OpKey> {
        match self {
            Term::App { op, args } => Some(OpKey::new(op, args.len())),
            _ => None,
        }
    }

    pub fn op_name(&self) -> Option<&str> {
        match self {
            Term::App { op, .. } => Some(op),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App { args, .. } => args,
            _ => &[],
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Term::App { op, args } if args.is_empty() && op == "true" => Some(true),
            Term::App { op, args } if args.is_empty() && op == "false" => Some(false),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var { .. } => false,
            Term::App { args, .. } => args.iter().all(Term::is_ground),
            _ => true,
        }
    }

    /// Variables in first-occurrence order.
    pub fn vars(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<(String, String)>) {
        match self {
            Term::Var { name, sort } => {
                if !out.iter().any(|(n, _)| n == name) {
                    out.push((name.clone(), sort.clone()));
                }
            }
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    pub fn contains_op(&self, name: &str) -> bool {
        match self {
            Term::App { op, args } => op == name || args.iter().any(|a| a.contains_op(name)),
            _ => false,
        }
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.args().get(*i)?.subterm(rest),
        }
    }

    pub fn substitute(&self, subst: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var { name, .. } => subst.get(name).cloned().unwrap_or_else(|| self.clone()),
            Term::App { op, args } => Term::App {
                op: op.clone(),
                args: args.iter().map(|a| a.substitute(subst)).collect(),
            },
            _ => self.clone(),
        }
    }

    /// Number of application nodes; used for fuel heuristics and tests.
    pub fn size(&self) -> usize {
        match self {
            Term::App { args, .. } => 1 + args.iter().map(Term::size).sum::<usize>(),
            _ => 1,
        }
    }
}

/// Binding strength of infix operators; higher binds tighter.
pub fn infix_precedence(op: &str) -> Option<u8> {
    if !is_infix_name(op) {
        return None;
    }
    Some(match &op[1..op.len() - 1] {
        "or" => 1,
        "and" => 2,
        "==" | "=/=" => 3,
        ">=" | ">" | "<=" | "<" => 4,
        _ => 5,
    })
}

pub const PREFIX_PRECEDENCE: u8 = 7;

impl Term {
    fn precedence(&self) -> u8 {
        match self {
            Term::App { op, args } if args.len() == 2 => infix_precedence(op).unwrap_or(u8::MAX),
            Term::App { op, args } if args.len() == 1 && op == "-_" => PREFIX_PRECEDENCE,
            Term::Int(n) if *n < 0 => PREFIX_PRECEDENCE,
            _ => u8::MAX,
        }
    }

    fn starts_with_minus(&self) -> bool {
        match self {
            Term::Int(n) => *n < 0,
            Term::App { op, args } if args.len() == 1 && op == "-_" => true,
            Term::App { op, args } if args.len() == 2 && infix_precedence(op).is_some() => {
                args[0].starts_with_minus()
            }
            _ => false,
        }
    }
}

/// Concrete syntax that the parser reads back to the same tree.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var { name, .. } => f.write_str(name),
            Term::Int(n) => write!(f, "{n}"),
            Term::Ident { value, .. } => write!(f, "{value}"),
            Term::App { op, args } if args.len() == 2 && infix_precedence(op).is_some() => {
                let prec = infix_precedence(op).unwrap();
                let sym = &op[1..op.len() - 1];
                if args[0].precedence() < prec {
                    write!(f, "({})", args[0])?;
                } else {
                    write!(f, "{}", args[0])?;
                }
                write!(f, " {sym} ")?;
                if args[1].precedence() <= prec {
                    write!(f, "({})", args[1])
                } else {
                    write!(f, "{}", args[1])
                }
            }
            Term::App { op, args } if args.len() == 1 && op == "-_" => {
                let inner = &args[0];
                if inner.precedence() < u8::MAX || inner.starts_with_minus() {
                    write!(f, "-({inner})")
                } else {
                    write!(f, "-{inner}")
                }
            }
            Term::App { op, args } if args.is_empty() => f.write_str(op),
            Term::App { op, args } => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub condition: Option<Term>,
    pub label: Option<String>,
    pub span: SourceSpan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Loose,
    Tight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Import {
    pub module: String,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub sort: String,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecModule {
    pub name: String,
    pub semantics: Semantics,
    pub imports: Vec<Import>,
    pub sorts: Vec<SortDecl>,
    pub operators: Vec<OperatorDecl>,
    pub variables: Vec<VarDecl>,
    pub equations: Vec<Equation>,
    pub span: SourceSpan,
}

impl SpecModule {
    pub fn new(name: &str, semantics: Semantics, span: SourceSpan) -> Self {
        SpecModule {
            name: name.to_string(),
            semantics,
            imports: Vec::new(),
            sorts: Vec::new(),
            operators: Vec::new(),
            variables: Vec::new(),
            equations: Vec::new(),
            span,
        }
    }

    pub fn is_builtin(&self) -> bool {
        prelude::is_prelude_module(&self.name)
    }

    pub fn hidden_sorts(&self) -> impl Iterator<Item = &SortDecl> {
        self.sorts.iter().filter(|s| s.kind == SortKind::Hidden)
    }

    pub fn find_operator(&self, key: &OpKey) -> Option<&OperatorDecl> {
        self.operators.iter().find(|o| &o.key() == key)
    }

    /// Copy with every span replaced by the builtin span; used to compare
    /// modules structurally.
    pub fn without_spans(&self) -> SpecModule {
        let b = SourceSpan::builtin();
        let mut m = self.clone();
        m.span = b.clone();
        m.imports.iter_mut().for_each(|i| i.span = b.clone());
        m.sorts.iter_mut().for_each(|s| s.span = b.clone());
        m.operators.iter_mut().for_each(|o| o.span = b.clone());
        m.variables.iter_mut().for_each(|v| v.span = b.clone());
        m.equations.iter_mut().for_each(|e| e.span = b.clone());
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("sort `{name}` is declared in unrelated modules {first} and {second}")]
    AmbiguousSort {
        name: String,
        first: String,
        second: String,
    },
    #[error("unknown module `{0}`")]
    UnknownModule(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ill-sorted term at {path:?}: {message}")]
pub struct IllSorted {
    /// Argument positions from the root to the offending subterm.
    pub path: Vec<usize>,
    pub message: String,
}

/// A checked, import-closed set of modules in dependency order, with the
/// builtin prelude first.
#[derive(Clone, Debug)]
pub struct ModuleSet {
    modules: Vec<SpecModule>,
}

impl ModuleSet {
    /// Resolves imports against the set plus the prelude, orders modules by
    /// dependency (ties by name) and checks every user module.
    pub fn new(user_modules: Vec<SpecModule>) -> Result<ModuleSet, Diagnostics> {
        let set = Self::link(user_modules)?;
        let diags = set.check();
        if diags.has_errors() {
            Err(diags)
        } else {
            Ok(set)
        }
    }

    /// Import resolution and ordering only; no sort checking.
    pub fn link(user_modules: Vec<SpecModule>) -> Result<ModuleSet, Diagnostics> {
        let mut diags = Diagnostics::new();
        let prelude = prelude::modules();
        let mut by_name: BTreeMap<String, SpecModule> = BTreeMap::new();
        for m in prelude.iter().cloned().chain(user_modules) {
            if let Some(prev) = by_name.get(&m.name) {
                diags.push(Diagnostic::error(
                    DiagCode::DuplicateModuleName,
                    m.span.clone(),
                    format!("module `{}` already declared at {}", m.name, prev.span),
                ));
                continue;
            }
            by_name.insert(m.name.clone(), m);
        }
        for m in by_name.values() {
            for imp in &m.imports {
                if !by_name.contains_key(&imp.module) {
                    diags.push(Diagnostic::error(
                        DiagCode::UnresolvedImport,
                        imp.span.clone(),
                        format!(
                            "module `{}` imports unknown module `{}`",
                            m.name, imp.module
                        ),
                    ));
                }
            }
        }
        if diags.has_errors() {
            return Err(diags);
        }

        // Kahn's algorithm; the ready set is ordered so ties break by name.
        let mut indegree: BTreeMap<&str, usize> = BTreeMap::new();
        let mut dependents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for m in by_name.values() {
            let deps: BTreeSet<&str> = m.imports.iter().map(|i| i.module.as_str()).collect();
            indegree.insert(&m.name, deps.len());
            for d in deps {
                dependents.entry(d).or_default().push(&m.name);
            }
        }
        let mut ready: BTreeSet<(bool, &str)> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(n, _)| (!prelude::is_prelude_module(n), *n))
            .collect();
        let mut order: Vec<String> = Vec::new();
        while let Some(next) = ready.pop_first() {
            let name = next.1;
            order.push(name.to_string());
            for dep in dependents.get(name).cloned().unwrap_or_default() {
                let d = indegree.get_mut(dep).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert((!prelude::is_prelude_module(dep), dep));
                }
            }
        }
        if order.len() != by_name.len() {
            let cyclic: Vec<&str> = indegree
                .iter()
                .filter(|(n, _)| !order.iter().any(|o| o == *n))
                .map(|(n, _)| *n)
                .collect();
            for name in &cyclic {
                let m = &by_name[*name];
                diags.push(Diagnostic::error(
                    DiagCode::CyclicImport,
                    m.span.clone(),
                    format!(
                        "module `{}` is part of an import cycle among {}",
                        m.name,
                        cyclic.join(", ")
                    ),
                ));
            }
            return Err(diags);
        }
        let modules = order
            .into_iter()
            .map(|n| by_name.remove(&n).unwrap())
            .collect();
        Ok(ModuleSet { modules })
    }

    pub fn modules(&self) -> &[SpecModule] {
        &self.modules
    }

    pub fn user_modules(&self) -> impl Iterator<Item = &SpecModule> {
        self.modules.iter().filter(|m| !m.is_builtin())
    }

    pub fn get(&self, name: &str) -> Option<&SpecModule> {
        self.modules.iter().find(|m| m.name == name)
    }

    /// The module followed by its transitive imports, in set order.
    pub fn scope(&self, name: &str) -> Result<Vec<&SpecModule>, SortError> {
        let root = self
            .get(name)
            .ok_or_else(|| SortError::UnknownModule(name.to_string()))?;
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut queue = VecDeque::from([root]);
        while let Some(m) = queue.pop_front() {
            if !seen.insert(&m.name) {
                continue;
            }
            for imp in &m.imports {
                if let Some(dep) = self.get(&imp.module) {
                    queue.push_back(dep);
                }
            }
        }
        let mut out = vec![root];
        out.extend(
            self.modules
                .iter()
                .filter(|m| m.name != name && seen.contains(m.name.as_str())),
        );
        Ok(out)
    }

    /// Finds the unique declaration of `sort` visible from `module`.
    pub fn resolve_sort(&self, module: &str, sort: &str) -> Result<&SortDecl, SortError> {
        let scope = self.scope(module)?;
        let mut found: Option<(&SpecModule, &SortDecl)> = None;
        for m in scope {
            for s in m.sorts.iter().filter(|s| s.name == sort) {
                match found {
                    None => found = Some((m, s)),
                    Some((fm, _)) if fm.name == m.name => {}
                    Some((fm, _)) => {
                        return Err(SortError::AmbiguousSort {
                            name: sort.to_string(),
                            first: fm.name.clone(),
                            second: m.name.clone(),
                        })
                    }
                }
            }
        }
        found
            .map(|(_, s)| s)
            .ok_or_else(|| SortError::UnknownSort(sort.to_string()))
    }

    pub fn signature(&self, module: &str) -> Result<Signature, SortError> {
        Signature::build(self, module)
    }

    fn check(&self) -> Diagnostics {
        let mut diags = Diagnostics::new();
        for m in self.user_modules() {
            diags.extend(check_module(self, m));
        }
        diags.sort();
        diags
    }
}

#[derive(Clone, Debug)]
pub struct SortInfo {
    pub decl: SortDecl,
    pub module: String,
}

#[derive(Clone, Debug)]
pub struct OpInfo {
    pub decl: OperatorDecl,
    pub module: String,
}

#[derive(Clone, Debug)]
pub struct EquationRef {
    pub module: String,
    pub index: usize,
    pub equation: Equation,
}

/// Everything visible from one module.
#[derive(Clone, Debug)]
pub struct Signature {
    pub module: String,
    sorts: BTreeMap<String, SortInfo>,
    /// Reflexive-transitive supersort closure.
    above: BTreeMap<String, BTreeSet<String>>,
    /// All declarations per name and argument count, imports first.
    ops: BTreeMap<OpKey, Vec<OpInfo>>,
    equations: Vec<EquationRef>,
}

impl Signature {
    /// Later declarations of the same sort are ignored here; duplicates are
    /// reported by module checking. Operators may be overloaded on argument
    /// sorts (a subsort redeclaring an inherited observer).
    pub fn build(set: &ModuleSet, module: &str) -> Result<Signature, SortError> {
        let scope = set.scope(module)?;
        let mut sorts = BTreeMap::new();
        let mut ops = BTreeMap::new();
        let mut equations = Vec::new();
        // Imports first so a set in dependency order gives stable equation order.
        for m in scope.iter().rev() {
            for s in &m.sorts {
                sorts.entry(s.name.clone()).or_insert_with(|| SortInfo {
                    decl: s.clone(),
                    module: m.name.clone(),
                });
            }
            for o in &m.operators {
                let decls: &mut Vec<OpInfo> = ops.entry(o.key()).or_default();
                if !decls.iter().any(|d| d.decl.arity == o.arity) {
                    decls.push(OpInfo {
                        decl: o.clone(),
                        module: m.name.clone(),
                    });
                }
            }
            for (i, e) in m.equations.iter().enumerate() {
                equations.push(EquationRef {
                    module: m.name.clone(),
                    index: i,
                    equation: e.clone(),
                });
            }
        }
        let mut above = BTreeMap::new();
        for name in sorts.keys() {
            let mut seen = BTreeSet::new();
            let mut stack = vec![name.clone()];
            while let Some(s) = stack.pop() {
                if seen.insert(s.clone()) {
                    if let Some(info) = sorts.get(&s) {
                        stack.extend(info.decl.supersorts.iter().cloned());
                    }
                }
            }
            above.insert(name.clone(), seen);
        }
        Ok(Signature {
            module: module.to_string(),
            sorts,
            above,
            ops,
            equations,
        })
    }

    pub fn sort(&self, name: &str) -> Option<&SortInfo> {
        self.sorts.get(name)
    }

    pub fn sorts(&self) -> impl Iterator<Item = &SortInfo> {
        self.sorts.values()
    }

    pub fn is_hidden(&self, sort: &str) -> bool {
        self.sorts
            .get(sort)
            .is_some_and(|s| s.decl.kind == SortKind::Hidden)
    }

    /// `sub <= sup` in the subsort order.
    pub fn leq(&self, sub: &str, sup: &str) -> bool {
        sub == sup || self.above.get(sub).is_some_and(|a| a.contains(sup))
    }

    pub fn comparable(&self, a: &str, b: &str) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// The first (outermost-imported) declaration for a name and argument count.
    pub fn op(&self, key: &OpKey) -> Option<&OpInfo> {
        self.ops.get(key).and_then(|v| v.first())
    }

    pub fn op_named(&self, name: &str, argc: usize) -> Option<&OpInfo> {
        self.op(&OpKey::new(name, argc))
    }

    /// Every declaration for a name and argument count.
    pub fn overloads(&self, name: &str, argc: usize) -> &[OpInfo] {
        self.ops
            .get(&OpKey::new(name, argc))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// The most specific declaration accepting the given argument sorts.
    pub fn resolve_op(&self, name: &str, arg_sorts: &[String]) -> Option<&OpInfo> {
        let fits = |o: &&OpInfo| {
            arg_sorts
                .iter()
                .zip(&o.decl.arity)
                .all(|(a, w)| self.leq(a, w))
        };
        let applicable: Vec<&OpInfo> = self
            .overloads(name, arg_sorts.len())
            .iter()
            .filter(fits)
            .collect();
        applicable
            .iter()
            .find(|o| {
                applicable.iter().all(|p| {
                    o.decl
                        .arity
                        .iter()
                        .zip(&p.decl.arity)
                        .all(|(x, y)| self.leq(x, y))
                })
            })
            .or(applicable.first())
            .copied()
    }

    pub fn ops(&self) -> impl Iterator<Item = &OpInfo> {
        self.ops.values().flatten()
    }

    pub fn equations(&self) -> &[EquationRef] {
        &self.equations
    }

    /// A visible sort no visible operator produces, e.g. `UId`.
    pub fn is_identifier_sort(&self, sort: &str) -> bool {
        match self.sorts.get(sort) {
            Some(info)
                if info.decl.kind == SortKind::Visible && !prelude::is_builtin_sort(sort) =>
            {
                !self.ops().any(|o| self.leq(&o.decl.coarity, sort))
            }
            _ => false,
        }
    }

    /// Least sort of `term`.
    pub fn sort_of(&self, term: &Term) -> Result<String, IllSorted> {
        self.sort_at(term, &mut Vec::new())
    }

    fn sort_at(&self, term: &Term, path: &mut Vec<usize>) -> Result<String, IllSorted> {
        let fail = |path: &Vec<usize>, message: String| {
            Err(IllSorted {
                path: path.clone(),
                message,
            })
        };
        match term {
            Term::Var { sort, name } => {
                if self.sorts.contains_key(sort) {
                    Ok(sort.clone())
                } else {
                    fail(path, format!("variable `{name}` has unknown sort `{sort}`"))
                }
            }
            Term::Int(n) => Ok(if *n >= 0 { NAT } else { INT }.to_string()),
            Term::Ident { sort, .. } => Ok(sort.clone()),
            Term::App { op, args } => {
                let mut arg_sorts = Vec::with_capacity(args.len());
                for (i, a) in args.iter().enumerate() {
                    path.push(i);
                    arg_sorts.push(self.sort_at(a, path)?);
                    path.pop();
                }
                if (op == EQ_OP || op == NE_OP) && args.len() == 2 {
                    let (a, b) = (&arg_sorts[0], &arg_sorts[1]);
                    if self.is_hidden(a) || self.is_hidden(b) {
                        return fail(
                            path,
                            format!("`{op}` compares visible values only, got {a} and {b}"),
                        );
                    }
                    if !self.comparable(a, b) {
                        return fail(
                            path,
                            format!("`{op}` applied to unrelated sorts {a} and {b}"),
                        );
                    }
                    return Ok(BOOL.to_string());
                }
                let Some(first) = self.op_named(op, args.len()) else {
                    return fail(
                        path,
                        format!("no operator `{op}` with {} argument(s)", args.len()),
                    );
                };
                if let Some(info) = self.resolve_op(op, &arg_sorts) {
                    return Ok(info.decl.coarity.clone());
                }
                for (i, (got, want)) in arg_sorts.iter().zip(&first.decl.arity).enumerate() {
                    if !self.leq(got, want) {
                        path.push(i);
                        let r = fail(
                            path,
                            format!(
                                "argument {} of `{op}` has sort {got}, expected {want}",
                                i + 1
                            ),
                        );
                        path.pop();
                        return r;
                    }
                }
                fail(
                    path,
                    format!(
                        "no declaration of `{op}` accepts ({})",
                        arg_sorts.join(", ")
                    ),
                )
            }
        }
    }
}

fn check_module(set: &ModuleSet, module: &SpecModule) -> Diagnostics {
    let mut diags = Diagnostics::new();
    let scope = match set.scope(&module.name) {
        Ok(s) => s,
        Err(e) => {
            diags.push(Diagnostic::error(
                DiagCode::UnknownModule,
                module.span.clone(),
                e.to_string(),
            ));
            return diags;
        }
    };
    let imported: Vec<&SpecModule> = scope[1..].to_vec();

    // Sorts: new, unique, related to sorts of the same kind.
    let mut local: BTreeMap<&str, &SortDecl> = BTreeMap::new();
    for s in &module.sorts {
        if let Some(prev) = local.get(s.name.as_str()) {
            diags.push(Diagnostic::error(
                DiagCode::DuplicateSort,
                s.span.clone(),
                format!("sort `{}` already declared at {}", s.name, prev.span),
            ));
            continue;
        }
        if let Some(m) = imported
            .iter()
            .find(|m| m.sorts.iter().any(|d| d.name == s.name))
        {
            diags.push(Diagnostic::error(
                DiagCode::DuplicateSort,
                s.span.clone(),
                format!(
                    "sort `{}` is already declared in imported module {}",
                    s.name, m.name
                ),
            ));
            continue;
        }
        local.insert(&s.name, s);
    }
    for s in &module.sorts {
        for sup in &s.supersorts {
            match set.resolve_sort(&module.name, sup) {
                Ok(d) if d.kind != s.kind => diags.push(Diagnostic::error(
                    DiagCode::SortKindMismatch,
                    s.span.clone(),
                    format!(
                        "{:?} sort `{}` cannot be below {:?} sort `{}`",
                        s.kind, s.name, d.kind, sup
                    )
                    .to_lowercase(),
                )),
                Ok(_) => {}
                Err(e) => diags.push(sort_error(e, s.span.clone())),
            }
        }
    }
    if diags.has_errors() {
        return diags;
    }

    let sig = match Signature::build(set, &module.name) {
        Ok(s) => s,
        Err(e) => {
            diags.push(sort_error(e, module.span.clone()));
            return diags;
        }
    };
    let mut seen_ops: BTreeMap<(String, Vec<String>), SourceSpan> = imported
        .iter()
        .flat_map(|m| m.operators.iter())
        .map(|o| ((o.name.clone(), o.arity.clone()), o.span.clone()))
        .collect();
    for o in &module.operators {
        let mut ok = true;
        for s in o.arity.iter().chain(std::iter::once(&o.coarity)) {
            if let Err(e) = set.resolve_sort(&module.name, s) {
                diags.push(sort_error(e, o.span.clone()));
                ok = false;
            }
        }
        let sig_key = (o.name.clone(), o.arity.clone());
        if let Some(prev) = seen_ops.get(&sig_key) {
            diags.push(Diagnostic::error(
                DiagCode::DuplicateOperator,
                o.span.clone(),
                format!(
                    "operator `{} : {}` already declared at {}",
                    o.name,
                    o.arity.join(" "),
                    prev
                ),
            ));
        } else {
            seen_ops.insert(sig_key, o.span.clone());
        }
        if ok && o.behavioral {
            let has_hidden_arg = o.arity.iter().any(|s| sig.is_hidden(s));
            let hidden_constant = o.arity.is_empty() && sig.is_hidden(&o.coarity);
            if !has_hidden_arg && !hidden_constant {
                diags.push(Diagnostic::error(
                    DiagCode::InvalidBehavioralOperator,
                    o.span.clone(),
                    format!(
                        "behavioral operator `{}` has no hidden-sort argument",
                        o.name
                    ),
                ));
            }
        }
    }
    for v in &module.variables {
        if let Err(e) = set.resolve_sort(&module.name, &v.sort) {
            diags.push(sort_error(e, v.span.clone()));
        }
    }
    if diags.has_errors() {
        return diags;
    }

    for eq in &module.equations {
        check_equation(&sig, eq, &mut diags);
    }
    diags
}

fn sort_error(e: SortError, span: SourceSpan) -> Diagnostic {
    let code = match e {
        SortError::UnknownSort(_) => DiagCode::UnknownSort,
        SortError::AmbiguousSort { .. } => DiagCode::AmbiguousSort,
        SortError::UnknownModule(_) => DiagCode::UnknownModule,
    };
    Diagnostic::error(code, span, e.to_string())
}

fn check_equation(sig: &Signature, eq: &Equation, diags: &mut Diagnostics) {
    let mut sorted = |t: &Term, what: &str| match sig.sort_of(t) {
        Ok(s) => Some(s),
        Err(e) => {
            let code = if e.message.starts_with("no operator") {
                DiagCode::UnknownOperator
            } else {
                DiagCode::IllSortedTerm
            };
            let sub = t
                .subterm(&e.path)
                .map(|s| s.to_string())
                .unwrap_or_default();
            diags.push(Diagnostic::error(
                code,
                eq.span.clone(),
                format!("{what} `{sub}`: {}", e.message),
            ));
            None
        }
    };
    let lhs = sorted(&eq.lhs, "in left-hand side");
    let rhs = sorted(&eq.rhs, "in right-hand side");
    let cond = eq.condition.as_ref().map(|c| sorted(c, "in condition"));
    if !matches!(eq.lhs, Term::App { .. }) {
        diags.push(Diagnostic::error(
            DiagCode::NonExecutableEquation,
            eq.span.clone(),
            format!(
                "left-hand side `{}` must be an operator application",
                eq.lhs
            ),
        ));
        return;
    }
    if let (Some(l), Some(r)) = (&lhs, &rhs) {
        if !sig.leq(r, l) {
            diags.push(Diagnostic::error(
                DiagCode::IllSortedTerm,
                eq.span.clone(),
                format!(
                    "right-hand side has sort {r}, which is not below the left-hand side sort {l}"
                ),
            ));
        }
    }
    if let Some(Some(c)) = &cond {
        if c != BOOL {
            diags.push(Diagnostic::error(
                DiagCode::IllSortedTerm,
                eq.span.clone(),
                format!("condition has sort {c}, expected Bool"),
            ));
        }
    }
    let lhs_vars: BTreeSet<String> = eq.lhs.vars().into_iter().map(|(n, _)| n).collect();
    let mut extra: Vec<String> = eq.rhs.vars().into_iter().map(|(n, _)| n).collect();
    if let Some(c) = &eq.condition {
        extra.extend(c.vars().into_iter().map(|(n, _)| n));
    }
    let mut missing: Vec<String> = extra
        .into_iter()
        .filter(|v| !lhs_vars.contains(v))
        .collect();
    missing.dedup();
    if !missing.is_empty() {
        diags.push(Diagnostic::error(
            DiagCode::NonExecutableEquation,
            eq.span.clone(),
            format!(
                "variable(s) {} do not occur in the left-hand side",
                missing.join(", ")
            ),
        ));
    }
}
