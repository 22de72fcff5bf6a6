use std::fmt;

use crate::diag::{DiagCode, Diagnostic, Diagnostics, SourceSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keyword {
    ModLoose,
    ModTight,
    Op,
    Ops,
    Bop,
    Bops,
    Eq,
    Ceq,
    Var,
    Vars,
    Pr,
    If,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "op" => Keyword::Op,
            "ops" => Keyword::Ops,
            "bop" => Keyword::Bop,
            "bops" => Keyword::Bops,
            "eq" => Keyword::Eq,
            "ceq" => Keyword::Ceq,
            "var" => Keyword::Var,
            "vars" => Keyword::Vars,
            "pr" => Keyword::Pr,
            "if" => Keyword::If,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::ModLoose => "mod*",
            Keyword::ModTight => "mod!",
            Keyword::Op => "op",
            Keyword::Ops => "ops",
            Keyword::Bop => "bop",
            Keyword::Bops => "bops",
            Keyword::Eq => "eq",
            Keyword::Ceq => "ceq",
            Keyword::Var => "var",
            Keyword::Vars => "vars",
            Keyword::Pr => "pr",
            Keyword::If => "if",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Int(i64),
    /// A run of operator symbols such as `+`, `>=`, `=/=` or `=`.
    Symbol(String),
    /// An infix operator name in a declaration, e.g. `_+_`.
    Mixfix(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    /// `*[`
    HiddenOpen,
    /// `]*`
    HiddenClose,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    Arrow,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Int(n) => write!(f, "integer `{n}`"),
            TokenKind::Symbol(s) => write!(f, "`{s}`"),
            TokenKind::Mixfix(s) => write!(f, "`{s}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::LBracket => f.write_str("`[`"),
            TokenKind::RBracket => f.write_str("`]`"),
            TokenKind::HiddenOpen => f.write_str("`*[`"),
            TokenKind::HiddenClose => f.write_str("`]*`"),
            TokenKind::LBrace => f.write_str("`{`"),
            TokenKind::RBrace => f.write_str("`}`"),
            TokenKind::Colon => f.write_str("`:`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Dot => f.write_str("`.`"),
            TokenKind::Arrow => f.write_str("`->`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

fn is_symbol_char(c: char) -> bool {
    matches!(
        c,
        '+' | '-' | '*' | '/' | '<' | '>' | '=' | '~' | '!' | '&' | '|' | '^' | '%' | '\\'
    )
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '\''
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|(_, c)| *c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars
            .peek()
            .map(|(i, _)| *i)
            .unwrap_or(self.text.len())
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> (u32, u32) {
        (self.line, self.col)
    }
}

/// Splits `text` into tokens; `--` comments and whitespace are dropped.
pub fn tokenize(text: &str, file: &str) -> Result<Vec<Token>, Diagnostics> {
    let mut cur = Cursor {
        chars: text.char_indices().peekable(),
        text,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    let mut diags = Diagnostics::new();
    let mut after_space = true;

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            after_space = true;
            continue;
        }
        if c == '-' && cur.peek2() == Some('-') {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            after_space = true;
            continue;
        }
        let start = cur.pos();
        let start_off = cur.offset();
        let mut end = start;
        let take = |cur: &mut Cursor, end: &mut (u32, u32)| {
            *end = cur.pos();
            cur.bump();
        };
        let kind = match c {
            '(' => {
                take(&mut cur, &mut end);
                TokenKind::LParen
            }
            ')' => {
                take(&mut cur, &mut end);
                TokenKind::RParen
            }
            '{' => {
                take(&mut cur, &mut end);
                TokenKind::LBrace
            }
            '}' => {
                take(&mut cur, &mut end);
                TokenKind::RBrace
            }
            ':' => {
                take(&mut cur, &mut end);
                TokenKind::Colon
            }
            ',' => {
                take(&mut cur, &mut end);
                TokenKind::Comma
            }
            '[' => {
                take(&mut cur, &mut end);
                TokenKind::LBracket
            }
            ']' => {
                take(&mut cur, &mut end);
                if cur.peek() == Some('*') {
                    take(&mut cur, &mut end);
                    TokenKind::HiddenClose
                } else {
                    TokenKind::RBracket
                }
            }
            '*' if cur.peek2() == Some('[') => {
                take(&mut cur, &mut end);
                take(&mut cur, &mut end);
                TokenKind::HiddenOpen
            }
            '.' => {
                take(&mut cur, &mut end);
                if !after_space {
                    diags.push(Diagnostic::error(
                        DiagCode::LexicalError,
                        SourceSpan::new(file, start, end),
                        "`.` terminator must be preceded by whitespace",
                    ));
                }
                TokenKind::Dot
            }
            '_' => {
                take(&mut cur, &mut end);
                let mut inner = String::new();
                while let Some(c) = cur.peek() {
                    if c == '_' || c.is_whitespace() || "()[]{},:.".contains(c) {
                        break;
                    }
                    inner.push(c);
                    take(&mut cur, &mut end);
                }
                if cur.peek() == Some('_') && !inner.is_empty() {
                    take(&mut cur, &mut end);
                    TokenKind::Mixfix(format!("_{inner}_"))
                } else {
                    diags.push(Diagnostic::error(
                        DiagCode::LexicalError,
                        SourceSpan::new(file, start, end),
                        "only binary infix operator names of the form `_op_` are supported",
                    ));
                    continue;
                }
            }
            c if c.is_ascii_digit() => {
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    take(&mut cur, &mut end);
                }
                let lexeme = &text[start_off..cur.offset()];
                match lexeme.parse::<i64>() {
                    Ok(n) => TokenKind::Int(n),
                    Err(_) => {
                        diags.push(Diagnostic::error(
                            DiagCode::LexicalError,
                            SourceSpan::new(file, start, end),
                            format!("integer literal `{lexeme}` is out of range"),
                        ));
                        continue;
                    }
                }
            }
            c if c.is_ascii_alphabetic() => {
                while cur.peek().is_some_and(is_ident_char) {
                    // `--` starts a comment even right after an identifier.
                    if cur.peek() == Some('-') && cur.peek2() == Some('-') {
                        break;
                    }
                    take(&mut cur, &mut end);
                }
                let lexeme = &text[start_off..cur.offset()];
                if lexeme == "mod" && matches!(cur.peek(), Some('*') | Some('!')) {
                    let tight = cur.peek() == Some('!');
                    take(&mut cur, &mut end);
                    TokenKind::Keyword(if tight {
                        Keyword::ModTight
                    } else {
                        Keyword::ModLoose
                    })
                } else if let Some(k) = Keyword::from_ident(lexeme) {
                    TokenKind::Keyword(k)
                } else {
                    TokenKind::Ident(lexeme.to_string())
                }
            }
            c if is_symbol_char(c) => {
                while cur.peek().is_some_and(is_symbol_char) {
                    if cur.offset() > start_off
                        && cur.peek() == Some('-')
                        && cur.peek2() == Some('-')
                    {
                        break;
                    }
                    take(&mut cur, &mut end);
                }
                let lexeme = &text[start_off..cur.offset()];
                if lexeme == "->" {
                    TokenKind::Arrow
                } else {
                    TokenKind::Symbol(lexeme.to_string())
                }
            }
            other => {
                take(&mut cur, &mut end);
                diags.push(Diagnostic::error(
                    DiagCode::LexicalError,
                    SourceSpan::new(file, start, end),
                    format!("illegal character {other:?}"),
                ));
                continue;
            }
        };
        after_space = false;
        tokens.push(Token {
            kind,
            span: SourceSpan::new(file, start, end),
        });
    }
    if diags.is_empty() {
        Ok(tokens)
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text, "t.cafe")
            .unwrap()
            .into_iter()
            .map(|t| t.kind)
            .collect()
    }

    #[test]
    fn op_declaration() {
        assert_eq!(
            kinds("op initAcc : -> Account"),
            vec![
                TokenKind::Keyword(Keyword::Op),
                TokenKind::Ident("initAcc".into()),
                TokenKind::Colon,
                TokenKind::Arrow,
                TokenKind::Ident("Account".into()),
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert!(kinds("").is_empty());
    }

    #[test]
    fn comments_are_dropped() {
        assert_eq!(
            kinds("-- initial states\nop f : -> H"),
            kinds("op f : -> H")
        );
        assert_eq!(kinds("op f : -> H -- trailing"), kinds("op f : -> H"));
    }

    #[test]
    fn hidden_brackets_and_identifiers() {
        assert_eq!(
            kinds("*[ Account ]* c-add U' mod* mod!"),
            vec![
                TokenKind::HiddenOpen,
                TokenKind::Ident("Account".into()),
                TokenKind::HiddenClose,
                TokenKind::Ident("c-add".into()),
                TokenKind::Ident("U'".into()),
                TokenKind::Keyword(Keyword::ModLoose),
                TokenKind::Keyword(Keyword::ModTight),
            ]
        );
    }

    #[test]
    fn symbols() {
        assert_eq!(
            kinds("read(A)+I >= -(N) =/= _+_"),
            vec![
                TokenKind::Ident("read".into()),
                TokenKind::LParen,
                TokenKind::Ident("A".into()),
                TokenKind::RParen,
                TokenKind::Symbol("+".into()),
                TokenKind::Ident("I".into()),
                TokenKind::Symbol(">=".into()),
                TokenKind::Symbol("-".into()),
                TokenKind::LParen,
                TokenKind::Ident("N".into()),
                TokenKind::RParen,
                TokenKind::Symbol("=/=".into()),
                TokenKind::Mixfix("_+_".into()),
            ]
        );
    }

    #[test]
    fn spans_are_one_based() {
        let toks = tokenize("op\n  f", "t.cafe").unwrap();
        assert_eq!((toks[1].span.start_line, toks[1].span.start_col), (2, 3));
    }

    #[test]
    fn illegal_character_is_reported() {
        let err = tokenize("vars U U’ : UId", "t.cafe").unwrap_err();
        assert_eq!(err.codes(), vec![DiagCode::LexicalError]);
        assert_eq!(err.0[0].span.start_col, 9);
    }

    #[test]
    fn dot_needs_whitespace() {
        assert!(tokenize("eq a = b .", "t").is_ok());
        assert!(tokenize("eq a = b.", "t").is_err());
    }
}
