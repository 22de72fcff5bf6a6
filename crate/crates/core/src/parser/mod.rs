//! Recursive-descent parser for the CafeOBJ subset described in
//! `docs/grammar.md`.
//!
//! Module items are parsed first; equation bodies are parsed afterwards so
//! that every `var` declaration of the module is known when an identifier
//! has to be read as a variable or as a constant.

pub mod lexer;
pub mod pretty;

use std::collections::BTreeMap;
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::ast::{
    Equation, Import, ModuleSet, OperatorDecl, Semantics, SortDecl, SortKind, SpecModule, Term,
};
use crate::diag::{DiagCode, Diagnostic, Diagnostics, SourceSpan};
use lexer::{Keyword, Token, TokenKind};

pub use lexer::tokenize;

type PResult<T> = Result<T, Diagnostic>;

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    file: String,
}

struct PendingEquation {
    conditional: bool,
    label: Option<String>,
    start: usize,
    end: usize,
    span: SourceSpan,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, offset: usize) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| &t.kind)
    }

    fn span_here(&self) -> SourceSpan {
        match self.tokens.get(self.pos) {
            Some(t) => t.span.clone(),
            None => match self.tokens.last() {
                Some(t) => SourceSpan::point(self.file.clone(), t.span.end_line, t.span.end_col),
                None => SourceSpan::point(self.file.clone(), 1, 1),
            },
        }
    }

    fn prev_span(&self) -> SourceSpan {
        self.tokens[self.pos.saturating_sub(1)].span.clone()
    }

    fn expected(&self, what: &[&str]) -> Diagnostic {
        let found = match self.peek() {
            Some(k) => k.to_string(),
            None => "end of input".to_string(),
        };
        Diagnostic::error(
            DiagCode::SyntaxError,
            self.span_here(),
            format!("expected {}, found {found}", what.join(" or ")),
        )
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> PResult<()> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(self.expected(&[what]))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(TokenKind::Ident(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.expected(&[what])),
        }
    }

    fn modules(&mut self) -> Result<Vec<SpecModule>, Diagnostics> {
        let mut out = Vec::new();
        let mut diags = Diagnostics::new();
        while self.peek().is_some() {
            match self.module() {
                Ok(m) => out.push(m),
                Err(d) => {
                    let unterminated = d.code == DiagCode::UnterminatedModule;
                    diags.push(d);
                    if unterminated {
                        break;
                    }
                    self.skip_module();
                }
            }
        }
        if diags.is_empty() {
            Ok(out)
        } else {
            Err(diags)
        }
    }

    /// Skips to the token after the `}` closing the current module.
    fn skip_module(&mut self) {
        while let Some(k) = self.peek() {
            self.pos += 1;
            if *k == TokenKind::RBrace {
                return;
            }
            if matches!(k, TokenKind::Keyword(Keyword::ModLoose | Keyword::ModTight)) {
                self.pos -= 1;
                return;
            }
        }
    }

    fn module(&mut self) -> PResult<SpecModule> {
        let start = self.span_here();
        let semantics = match self.peek() {
            Some(TokenKind::Keyword(Keyword::ModLoose)) => Semantics::Loose,
            Some(TokenKind::Keyword(Keyword::ModTight)) => Semantics::Tight,
            _ => {
                let d = self.expected(&["`mod*`", "`mod!`"]);
                self.pos += 1;
                return Err(d);
            }
        };
        self.pos += 1;
        let name = self.ident("module name")?;
        self.expect(&TokenKind::LBrace, "`{`")?;
        let mut module = SpecModule::new(&name, semantics, start.clone());
        let mut pending = Vec::new();
        loop {
            match self.peek() {
                None => {
                    return Err(Diagnostic::error(
                        DiagCode::UnterminatedModule,
                        start,
                        format!("module `{name}` is missing its closing `}}`"),
                    ))
                }
                Some(TokenKind::RBrace) => {
                    self.pos += 1;
                    break;
                }
                Some(TokenKind::Keyword(Keyword::Pr)) => {
                    let kw = self.span_here();
                    self.pos += 1;
                    self.expect(&TokenKind::LParen, "`(`")?;
                    let target = self.ident("module name")?;
                    self.expect(&TokenKind::RParen, "`)`")?;
                    module.imports.push(Import {
                        module: target,
                        span: kw.to(&self.prev_span()),
                    });
                }
                Some(TokenKind::LBracket) => self.sort_decl(SortKind::Visible, &mut module)?,
                Some(TokenKind::HiddenOpen) => self.sort_decl(SortKind::Hidden, &mut module)?,
                Some(TokenKind::Keyword(
                    k @ (Keyword::Op | Keyword::Ops | Keyword::Bop | Keyword::Bops),
                )) => {
                    let k = *k;
                    self.op_decl(k, &mut module)?
                }
                Some(TokenKind::Keyword(k @ (Keyword::Var | Keyword::Vars))) => {
                    let many = *k == Keyword::Vars;
                    let kw = self.span_here();
                    self.pos += 1;
                    let mut names = vec![self.ident("variable name")?];
                    if many {
                        while let Some(TokenKind::Ident(_)) = self.peek() {
                            names.push(self.ident("variable name")?);
                        }
                    }
                    self.expect(&TokenKind::Colon, "`:`")?;
                    let sort = self.ident("sort name")?;
                    let span = kw.to(&self.prev_span());
                    for n in names {
                        module.variables.push(crate::ast::VarDecl {
                            name: n,
                            sort: sort.clone(),
                            span: span.clone(),
                        });
                    }
                }
                Some(TokenKind::Keyword(k @ (Keyword::Eq | Keyword::Ceq))) => {
                    let conditional = *k == Keyword::Ceq;
                    pending.push(self.equation_extent(conditional)?);
                }
                Some(_) => {
                    return Err(self.expected(&[
                        "`pr`", "`[`", "`*[`", "`op`", "`ops`", "`bop`", "`bops`", "`var`",
                        "`vars`", "`eq`", "`ceq`", "`}`",
                    ]))
                }
            }
        }
        module.span = start.to(&self.prev_span());

        let vars: BTreeMap<String, String> = module
            .variables
            .iter()
            .map(|v| (v.name.clone(), v.sort.clone()))
            .collect();
        for p in pending {
            module.equations.push(self.equation_body(p, &vars)?);
        }
        Ok(module)
    }

    fn sort_decl(&mut self, kind: SortKind, module: &mut SpecModule) -> PResult<()> {
        let open = self.span_here();
        self.pos += 1;
        let close = match kind {
            SortKind::Visible => TokenKind::RBracket,
            SortKind::Hidden => TokenKind::HiddenClose,
        };
        let mut groups: Vec<Vec<(String, SourceSpan)>> = vec![Vec::new()];
        loop {
            match self.peek() {
                Some(TokenKind::Ident(s)) => {
                    let span = self.span_here();
                    self.pos += 1;
                    groups.last_mut().unwrap().push((s.clone(), span));
                }
                Some(TokenKind::Symbol(s)) if s == "<" => {
                    if groups.last().unwrap().is_empty() {
                        return Err(self.expected(&["sort name"]));
                    }
                    self.pos += 1;
                    groups.push(Vec::new());
                }
                Some(k) if *k == close => {
                    self.pos += 1;
                    break;
                }
                _ => {
                    let closing = if kind == SortKind::Hidden {
                        "`]*`"
                    } else {
                        "`]`"
                    };
                    return Err(self.expected(&["sort name", "`<`", closing]));
                }
            }
        }
        if groups.last().unwrap().is_empty() {
            return Err(Diagnostic::error(
                DiagCode::SyntaxError,
                open.to(&self.prev_span()),
                "empty sort declaration",
            ));
        }
        // Every group but the last declares sorts; the last is only referenced
        // when a `<` is present.
        let declaring = if groups.len() == 1 {
            1
        } else {
            groups.len() - 1
        };
        for (i, group) in groups.iter().take(declaring).enumerate() {
            let supers: Vec<String> = groups
                .get(i + 1)
                .map(|g| g.iter().map(|(n, _)| n.clone()).collect())
                .unwrap_or_default();
            for (name, span) in group {
                module.sorts.push(SortDecl {
                    name: name.clone(),
                    kind,
                    supersorts: supers.clone(),
                    span: span.clone(),
                });
            }
        }
        Ok(())
    }

    fn op_decl(&mut self, kw: Keyword, module: &mut SpecModule) -> PResult<()> {
        let start = self.span_here();
        self.pos += 1;
        let behavioral = matches!(kw, Keyword::Bop | Keyword::Bops);
        let many = matches!(kw, Keyword::Ops | Keyword::Bops);
        let mut names = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::Ident(s)) | Some(TokenKind::Mixfix(s)) => {
                    names.push(s.clone());
                    self.pos += 1;
                }
                _ => return Err(self.expected(&["operator name"])),
            }
            if !many || self.peek() == Some(&TokenKind::Colon) {
                break;
            }
        }
        self.expect(&TokenKind::Colon, "`:`")?;
        let mut arity = Vec::new();
        while let Some(TokenKind::Ident(s)) = self.peek() {
            arity.push(s.clone());
            self.pos += 1;
        }
        self.expect(&TokenKind::Arrow, "`->` or argument sort")?;
        let coarity = self.ident("result sort")?;
        let span = start.to(&self.prev_span());
        for name in names {
            if name.starts_with('_') && arity.len() != 2 {
                return Err(Diagnostic::error(
                    DiagCode::SyntaxError,
                    span,
                    format!("infix operator `{name}` must take exactly two arguments"),
                ));
            }
            module.operators.push(OperatorDecl {
                name,
                arity: arity.clone(),
                coarity: coarity.clone(),
                behavioral,
                span: span.clone(),
            });
        }
        Ok(())
    }

    /// Records where an equation's tokens are; the body is parsed later.
    fn equation_extent(&mut self, conditional: bool) -> PResult<PendingEquation> {
        let start_span = self.span_here();
        self.pos += 1;
        let mut label = None;
        if self.peek() == Some(&TokenKind::LBracket)
            && self.peek_at(2) == Some(&TokenKind::RBracket)
        {
            self.pos += 1;
            label = Some(self.ident("equation label")?);
            self.expect(&TokenKind::RBracket, "`]`")?;
            self.expect(&TokenKind::Colon, "`:`")?;
        }
        let start = self.pos;
        let mut depth = 0usize;
        loop {
            match self.peek() {
                None => {
                    return Err(Diagnostic::error(
                        DiagCode::SyntaxError,
                        start_span,
                        "equation is missing its ` .` terminator",
                    ))
                }
                Some(TokenKind::LParen) => depth += 1,
                Some(TokenKind::RParen) => depth = depth.saturating_sub(1),
                Some(TokenKind::Dot) if depth == 0 => break,
                Some(TokenKind::RBrace) | Some(TokenKind::Keyword(Keyword::Eq | Keyword::Ceq))
                    if depth == 0 =>
                {
                    return Err(self.expected(&["` .`"]));
                }
                _ => {}
            }
            self.pos += 1;
        }
        let end = self.pos;
        self.pos += 1;
        Ok(PendingEquation {
            conditional,
            label,
            start,
            end,
            span: start_span.to(&self.prev_span()),
        })
    }

    fn equation_body(
        &self,
        p: PendingEquation,
        vars: &BTreeMap<String, String>,
    ) -> PResult<Equation> {
        let mut tp = TermParser {
            tokens: &self.tokens[..p.end],
            pos: p.start,
            vars,
            file: &self.file,
        };
        let lhs = tp.term(0)?;
        match tp.peek() {
            Some(TokenKind::Symbol(s)) if s == "=" => tp.pos += 1,
            _ => return Err(tp.expected(&["`=`"])),
        }
        let rhs = tp.term(0)?;
        let condition = if p.conditional {
            if tp.peek() != Some(&TokenKind::Keyword(Keyword::If)) {
                return Err(tp.expected(&["`if`"]));
            }
            tp.pos += 1;
            Some(tp.term(0)?)
        } else {
            None
        };
        if tp.pos != p.end {
            let what: &[&str] = if p.conditional {
                &["` .`"]
            } else {
                &["` .`", "infix operator"]
            };
            return Err(tp.expected(what));
        }
        Ok(Equation {
            lhs,
            rhs,
            condition,
            label: p.label,
            span: p.span,
        })
    }
}

struct TermParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    vars: &'a BTreeMap<String, String>,
    file: &'a str,
}

impl<'a> TermParser<'a> {
    fn peek(&self) -> Option<&'a TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn expected(&self, what: &[&str]) -> Diagnostic {
        let (span, found) = match self.tokens.get(self.pos) {
            Some(t) => (t.span.clone(), t.kind.to_string()),
            None => {
                let last = self
                    .tokens
                    .last()
                    .map(|t| t.span.clone())
                    .unwrap_or_else(|| SourceSpan::point(self.file, 1, 1));
                (
                    SourceSpan::point(self.file, last.end_line, last.end_col),
                    "` .`".to_string(),
                )
            }
        };
        Diagnostic::error(
            DiagCode::SyntaxError,
            span,
            format!("expected {}, found {found}", what.join(" or ")),
        )
    }

    /// The infix operator at the cursor, as its declared name.
    fn infix_here(&self) -> Option<String> {
        match self.peek()? {
            TokenKind::Symbol(s) if s != "=" => Some(format!("_{s}_")),
            TokenKind::Ident(s) if s == "and" || s == "or" => Some(format!("_{s}_")),
            _ => None,
        }
    }

    /// Precedence climbing; all infix operators associate to the left.
    fn term(&mut self, min_prec: u8) -> PResult<Term> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.infix_here() {
            let prec = crate::ast::infix_precedence(&op).unwrap();
            if prec < min_prec || prec == 0 {
                break;
            }
            self.pos += 1;
            let rhs = self.term(prec + 1)?;
            lhs = Term::App {
                op,
                args: vec![lhs, rhs],
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Term> {
        if let Some(TokenKind::Symbol(s)) = self.peek() {
            if s == "-" {
                self.pos += 1;
                let inner = self.unary()?;
                return Ok(Term::app("-_", vec![inner]));
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Term> {
        match self.peek() {
            Some(TokenKind::Int(n)) => {
                self.pos += 1;
                Ok(Term::Int(*n))
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let t = self.term(0)?;
                if self.peek() != Some(&TokenKind::RParen) {
                    return Err(self.expected(&["`)`"]));
                }
                self.pos += 1;
                Ok(t)
            }
            Some(TokenKind::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&TokenKind::LParen) {
                    self.pos += 1;
                    let mut args = Vec::new();
                    if self.peek() != Some(&TokenKind::RParen) {
                        loop {
                            args.push(self.term(0)?);
                            match self.peek() {
                                Some(TokenKind::Comma) => self.pos += 1,
                                Some(TokenKind::RParen) => break,
                                _ => return Err(self.expected(&["`,`", "`)`"])),
                            }
                        }
                    }
                    self.pos += 1;
                    Ok(Term::App {
                        op: name.clone(),
                        args,
                    })
                } else if let Some(sort) = self.vars.get(name) {
                    Ok(Term::Var {
                        name: name.clone(),
                        sort: sort.clone(),
                    })
                } else {
                    Ok(Term::constant(name))
                }
            }
            _ => Err(self.expected(&["term"])),
        }
    }
}

/// Parses every module in a token stream.
pub fn parse_modules(tokens: &[Token], file: &str) -> Result<Vec<SpecModule>, Diagnostics> {
    Parser {
        tokens,
        pos: 0,
        file: file.to_string(),
    }
    .modules()
}

/// Parses a token stream holding exactly one module.
pub fn parse_module(tokens: &[Token], file: &str) -> Result<SpecModule, Diagnostics> {
    let mut modules = parse_modules(tokens, file)?;
    match modules.len() {
        1 => Ok(modules.pop().unwrap()),
        n => Err(Diagnostic::error(
            DiagCode::SyntaxError,
            SourceSpan::point(file, 1, 1),
            format!("expected exactly one module, found {n}"),
        )
        .into()),
    }
}

/// Tokenizes and parses one source text.
pub fn parse_source(text: &str, file: &str) -> Result<Vec<SpecModule>, Diagnostics> {
    let tokens = tokenize(text, file)?;
    parse_modules(&tokens, file)
}

/// Parses in-memory sources `(file name, text)` into a checked module set.
pub fn parse_sources(sources: &[(String, String)]) -> Result<ModuleSet, Diagnostics> {
    let parse_one = |(file, text): &(String, String)| parse_source(text, file);
    #[cfg(feature = "parallel")]
    let results: Vec<_> = sources.par_iter().map(parse_one).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = sources.iter().map(parse_one).collect();

    let mut modules = Vec::new();
    let mut diags = Diagnostics::new();
    for r in results {
        match r {
            Ok(ms) => modules.extend(ms),
            Err(d) => diags.extend(d),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    ModuleSet::new(modules)
}

/// Reads, parses and checks spec files. Modules come back in dependency
/// order with ties broken by name.
pub fn parse_spec<P: AsRef<Path>>(files: &[P]) -> Result<ModuleSet, Diagnostics> {
    let mut sources = Vec::new();
    let mut diags = Diagnostics::new();
    for f in files {
        let path = f.as_ref();
        let name = path.display().to_string();
        match std::fs::read_to_string(path) {
            Ok(text) => sources.push((name, text)),
            Err(e) => diags.push(Diagnostic::error(
                DiagCode::Io,
                SourceSpan::point(name, 1, 1),
                format!("cannot read file: {e}"),
            )),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    parse_sources(&sources)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ACCOUNT: &str = include_str!("../../../../corpus/account.cafe");
    const ACCOUNT_SYS: &str = include_str!("../../../../corpus/account_sys.cafe");

    #[test]
    fn account_module_shape() {
        let ms = parse_source(ACCOUNT, "account.cafe").unwrap();
        assert_eq!(ms.len(), 1);
        let m = &ms[0];
        assert_eq!(m.name, "ACCOUNT");
        assert_eq!(m.semantics, Semantics::Loose);
        assert_eq!(m.hidden_sorts().count(), 1);
        assert_eq!(m.operators.len(), 4);
        assert_eq!(m.equations.len(), 3);
        let init = m.operators.iter().find(|o| o.name == "init").unwrap();
        assert!(init.arity.is_empty() && !init.behavioral);
        let ceq = &m.equations[2];
        assert_eq!(ceq.lhs.to_string(), "read(add(A, I))");
        assert_eq!(ceq.rhs.to_string(), "I + read(A)");
        assert_eq!(ceq.condition.as_ref().unwrap().to_string(), "c-add(A, I)");
        assert_eq!(m.equations[0].rhs.to_string(), "read(A) + I >= 0");
    }

    #[test]
    fn account_system_module_shape() {
        let ms = parse_source(ACCOUNT_SYS, "account_sys.cafe").unwrap();
        let m = &ms[0];
        assert_eq!(m.equations.len(), 10);
        assert!(m
            .operators
            .iter()
            .any(|o| o.name == "account" && o.behavioral && o.coarity == "Account"));
        assert_eq!(
            m.variables
                .iter()
                .map(|v| v.name.as_str())
                .collect::<Vec<_>>(),
            ["U", "U'", "A", "N"]
        );
        let withdraw = &m.equations[7];
        assert_eq!(
            withdraw.rhs,
            Term::app(
                "add",
                vec![
                    Term::app(
                        "account",
                        vec![Term::var("U", "UId"), Term::var("A", "AccountSys")]
                    ),
                    Term::app("-_", vec![Term::var("N", "Nat")]),
                ]
            )
        );
    }

    #[test]
    fn minimal_module() {
        let ms = parse_source("mod* M { [V] }", "m.cafe").unwrap();
        assert_eq!(ms[0].name, "M");
        assert_eq!(ms[0].sorts.len(), 1);
        assert_eq!(ms[0].sorts[0].kind, SortKind::Visible);
        assert!(ms[0].operators.is_empty() && ms[0].equations.is_empty());
    }

    #[test]
    fn subsort_brackets() {
        let ms = parse_source("mod* M { [ A B < C ] *[ H < G ]* }", "m.cafe").unwrap();
        let names: Vec<_> = ms[0]
            .sorts
            .iter()
            .map(|s| (s.name.as_str(), s.supersorts.clone()))
            .collect();
        assert_eq!(
            names,
            vec![
                ("A", vec!["C".to_string()]),
                ("B", vec!["C".to_string()]),
                ("H", vec!["G".to_string()])
            ]
        );
    }

    #[test]
    fn precedence() {
        let src =
            "mod* M { pr(INT) vars A B : Int eq f(A, B) = A + B - 1 >= 0 == true and A > B . }";
        let ms = parse_source(src, "m.cafe").unwrap();
        let rhs = &ms[0].equations[0].rhs;
        assert_eq!(rhs.op_name(), Some("_and_"));
        assert_eq!(rhs.args()[0].op_name(), Some("_==_"));
        assert_eq!(rhs.args()[0].args()[0].to_string(), "A + B - 1 >= 0");
        let minus = &rhs.args()[0].args()[0].args()[0];
        assert_eq!(minus.op_name(), Some("_-_"));
    }

    #[test]
    fn unterminated_module() {
        let err = parse_source("mod* M { [V]", "m.cafe").unwrap_err();
        assert_eq!(err.codes(), vec![DiagCode::UnterminatedModule]);
    }

    #[test]
    fn syntax_error_names_expected_tokens() {
        let err = parse_source("mod* M { op f -> V }", "m.cafe").unwrap_err();
        assert_eq!(err.codes(), vec![DiagCode::SyntaxError]);
        assert!(err.0[0].message.contains("`:`"), "{}", err.0[0].message);
        assert_eq!((err.0[0].span.start_line, err.0[0].span.start_col), (1, 15));
    }

    #[test]
    fn keywords_are_not_operator_names() {
        assert!(parse_source("mod* M { [V] op eq : -> V }", "m.cafe").is_err());
    }

    #[test]
    fn missing_terminator() {
        let err = parse_source("mod* M { [V] op a : -> V eq a = a }", "m.cafe").unwrap_err();
        assert_eq!(err.codes(), vec![DiagCode::SyntaxError]);
    }

    #[test]
    fn one_error_per_module_then_continue() {
        let err = parse_source("mod* A { op } mod* B { [ ] }", "m.cafe").unwrap_err();
        assert_eq!(err.len(), 2);
    }

    #[test]
    fn module_order_and_import_errors() {
        let sources = vec![
            ("account_sys.cafe".to_string(), ACCOUNT_SYS.to_string()),
            ("account.cafe".to_string(), ACCOUNT.to_string()),
        ];
        let set = parse_sources(&sources).unwrap();
        let names: Vec<_> = set.user_modules().map(|m| m.name.as_str()).collect();
        assert_eq!(names, ["ACCOUNT", "ACCOUNT-SYSTEM"]);

        assert_eq!(parse_sources(&[]).unwrap().user_modules().count(), 0);

        let missing = vec![(
            "f.cafe".to_string(),
            "mod* X { pr(FOO) *[ H ]* }".to_string(),
        )];
        assert_eq!(
            parse_sources(&missing).unwrap_err().codes(),
            vec![DiagCode::UnresolvedImport]
        );

        let cyclic = vec![(
            "c.cafe".to_string(),
            "mod* A { pr(B) } mod* B { pr(A) }".to_string(),
        )];
        let err = parse_sources(&cyclic).unwrap_err();
        assert!(err.codes().iter().all(|c| *c == DiagCode::CyclicImport));

        let dup = vec![("d.cafe".to_string(), "mod* A { } mod* A { }".to_string())];
        assert_eq!(
            parse_sources(&dup).unwrap_err().codes(),
            vec![DiagCode::DuplicateModuleName]
        );
    }

    #[test]
    fn checking_rejects_bad_modules() {
        let check = |src: &str| {
            parse_sources(&[("m.cafe".to_string(), src.to_string())])
                .unwrap_err()
                .codes()
        };
        assert_eq!(
            check("mod* M { pr(INT) *[ H ]* bop v : H -> Money }"),
            vec![DiagCode::UnknownSort]
        );
        assert_eq!(
            check("mod* M { pr(INT) *[ H ]* op i : -> H var X : Int eq i = i . eq i = i . op f : Int -> Int eq f(1) = X . }"),
            vec![DiagCode::NonExecutableEquation]
        );
        assert_eq!(
            check("mod* M { pr(INT) *[ H ]* bop v : Int -> Int }"),
            vec![DiagCode::InvalidBehavioralOperator]
        );
        assert_eq!(
            check("mod* M { pr(INT) [ S ] [ S ] }"),
            vec![DiagCode::DuplicateSort]
        );
        assert_eq!(
            check("mod* M { pr(INT) *[ H < Int ]* }"),
            vec![DiagCode::SortKindMismatch]
        );
        assert_eq!(
            check("mod* M { pr(INT) op f : Int -> Int op f : Int -> Nat }"),
            vec![DiagCode::DuplicateOperator]
        );
        assert_eq!(
            check("mod* M { pr(INT) op f : Int -> Bool eq f(0) = 1 . }"),
            vec![DiagCode::IllSortedTerm]
        );
        assert_eq!(
            check("mod* M { pr(INT) op f : Int -> Int eq g(0) = 1 . }"),
            vec![DiagCode::UnknownOperator]
        );
    }
}
