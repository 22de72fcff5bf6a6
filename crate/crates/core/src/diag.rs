//! Source spans and diagnostics shared by every pipeline stage.

use std::fmt;

use serde::Serialize;

/// A 1-based, inclusive region of a source file.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(file: impl Into<String>, start: (u32, u32), end: (u32, u32)) -> Self {
        SourceSpan {
            file: file.into(),
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    /// Span for things that have no source text, such as the builtin prelude.
    pub fn builtin() -> Self {
        SourceSpan::new("<prelude>", (1, 1), (1, 1))
    }

    pub fn point(file: impl Into<String>, line: u32, col: u32) -> Self {
        SourceSpan::new(file, (line, col), (line, col))
    }

    /// Smallest span covering both `self` and `other` (same file assumed).
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        let start = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let end = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        SourceSpan::new(self.file.clone(), start, end)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

macro_rules! diag_codes {
    ($($variant:ident => $text:literal,)*) => {
        /// The closed set of diagnostic codes. The string form is stable and
        /// is what the CLI prints.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum DiagCode {
            $($variant,)*
        }

        impl DiagCode {
            pub const ALL: &'static [DiagCode] = &[$(DiagCode::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(DiagCode::$variant => $text,)*
                }
            }
        }
    };
}

diag_codes! {
    Io => "io-error",
    LexicalError => "lexical-error",
    SyntaxError => "syntax-error",
    UnterminatedModule => "unterminated-module",
    UnresolvedImport => "unresolved-import",
    DuplicateModuleName => "duplicate-module-name",
    CyclicImport => "cyclic-import",
    UnknownSort => "unknown-sort",
    AmbiguousSort => "ambiguous-sort",
    DuplicateSort => "duplicate-sort",
    SortKindMismatch => "sort-kind-mismatch",
    UnknownOperator => "unknown-operator",
    DuplicateOperator => "duplicate-operator",
    InvalidBehavioralOperator => "invalid-behavioral-operator",
    IllSortedTerm => "ill-sorted-term",
    NonExecutableEquation => "non-executable-equation",
    NoHiddenSort => "no-hidden-sort",
    MultipleHiddenSorts => "multiple-hidden-sorts",
    NoStateArgument => "transition-without-state-argument",
    DanglingEffectiveCondition => "dangling-effective-condition",
    EffectiveConditionSignature => "effective-condition-signature",
    UnboundGuard => "unbound-guard",
    CompositionPrecondition => "composition-precondition",
    CompositionCondition1 => "composition-condition-1",
    CompositionCondition2 => "composition-condition-2",
    CompositionCondition3 => "composition-condition-3",
    UnknownModule => "unknown-module",
    Codegen => "codegen-error",
    ChainWithTransition => "chain-with-transition",
    Interpreter => "interpreter-error",
    ProjectionAbsent => "projection-absent",
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for DiagCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn error(code: DiagCode, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn warning(code: DiagCode, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// `file:line:col: severity[code]: message`
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}[{}]: {}",
            self.span, self.severity, self.code, self.message
        )
    }
}

/// An ordered batch of diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn new() -> Self {
        Diagnostics(Vec::new())
    }

    pub fn push(&mut self, d: Diagnostic) {
        self.0.push(d);
    }

    pub fn extend(&mut self, other: Diagnostics) {
        self.0.extend(other.0);
    }

    pub fn has_errors(&self) -> bool {
        self.0.iter().any(Diagnostic::is_error)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Diagnostic> {
        self.0.iter()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(|d| d.is_error())
    }

    pub fn codes(&self) -> Vec<DiagCode> {
        self.0.iter().map(|d| d.code).collect()
    }

    /// Stable order: by file, position, then code.
    pub fn sort(&mut self) {
        self.0.sort_by(|a, b| {
            (&a.span.file, a.span.start_line, a.span.start_col, a.code).cmp(&(
                &b.span.file,
                b.span.start_line,
                b.span.start_col,
                b.code,
            ))
        });
    }
}

impl From<Diagnostic> for Diagnostics {
    fn from(d: Diagnostic) -> Self {
        Diagnostics(vec![d])
    }
}

impl From<Vec<Diagnostic>> for Diagnostics {
    fn from(v: Vec<Diagnostic>) -> Self {
        Diagnostics(v)
    }
}

impl IntoIterator for Diagnostics {
    type Item = Diagnostic;
    type IntoIter = std::vec::IntoIter<Diagnostic>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostics {}
