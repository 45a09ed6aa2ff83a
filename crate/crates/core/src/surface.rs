//! Concrete syntax: lexer, parser with name resolution, and printer.
//!
//! ```text
//! inductive Nat params 0 { nat : Set := zero : nat; succ : nat -> nat }.
//! def two : nat := succ (succ zero).
//! #eval Elim(two; Nat.nat; fun _ : nat => nat; zero, fun (p r : nat) => succ r).
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::error::Span;
use crate::syntax::{Context, Entry, Hint, InductiveBlock, Name, Term};

const KEYWORDS: &[&str] = &[
    "axiom",
    "def",
    "inductive",
    "params",
    "forall",
    "fun",
    "let",
    "in",
    "Prop",
    "Set",
    "Type",
    "Elim",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    UnknownIdentifier,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Axiom { name: Name, ty: Term },
    Def { name: Name, ty: Term, body: Term },
    Inductive { name: Name, block: InductiveBlock },
    /// `#check t.` or `#check t : T.`
    Check { term: Term, ty: Option<Term> },
    Eval(Term),
    Conv(Term, Term),
    Sub(Term, Term),
}

impl Decl {
    pub fn keyword(&self) -> &'static str {
        match self {
            Decl::Axiom { .. } => "axiom",
            Decl::Def { .. } => "def",
            Decl::Inductive { .. } => "inductive",
            Decl::Check { .. } => "#check",
            Decl::Eval(_) => "#eval",
            Decl::Conv(..) => "#conv",
            Decl::Sub(..) => "#sub",
        }
    }

    pub fn name(&self) -> Option<&Name> {
        match self {
            Decl::Axiom { name, .. } | Decl::Def { name, .. } | Decl::Inductive { name, .. } => {
                Some(name)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub decl: Decl,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceFile {
    pub declarations: Vec<Declaration>,
}

// ---------------------------------------------------------------------------
// Scope

#[derive(Debug, Clone, PartialEq, Eq)]
enum ScopeItem {
    Term(Name),
    Block(Name, Vec<Name>),
}

/// Global names visible to the parser and printer, in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scope {
    items: Vec<ScopeItem>,
}

impl Scope {
    pub fn new() -> Self {
        Scope::default()
    }

    pub fn from_context(ctx: &Context) -> Self {
        let mut s = Scope::new();
        for e in ctx.entries() {
            match e {
                Entry::Hyp { name, .. } | Entry::Def { name, .. } => s.add_term(name.clone()),
                Entry::Block { name, block } => s.add_block(name.clone(), block),
            }
        }
        s
    }

    pub fn add_term(&mut self, name: Name) {
        self.items.push(ScopeItem::Term(name));
    }

    pub fn add_block(&mut self, name: Name, block: &InductiveBlock) {
        self.items.push(ScopeItem::Block(
            name,
            block.member_names().cloned().collect(),
        ));
    }

    /// Resolves a bare global identifier; the most recent declaration wins.
    pub fn resolve(&self, x: &str) -> Option<Term> {
        self.items.iter().rev().find_map(|item| match item {
            ScopeItem::Term(n) if n.as_str() == x => Some(Term::Var(n.clone())),
            ScopeItem::Block(b, ms) => ms
                .iter()
                .find(|m| m.as_str() == x)
                .map(|m| Term::ind(b.clone(), m.clone())),
            _ => None,
        })
    }

    /// Number of scope items binding `x`.
    fn bindings(&self, x: &str) -> usize {
        self.items
            .iter()
            .filter(|item| match item {
                ScopeItem::Term(n) => n.as_str() == x,
                ScopeItem::Block(_, ms) => ms.iter().any(|m| m.as_str() == x),
            })
            .count()
    }

    pub fn resolve_qualified(&self, block: &str, member: &str) -> Option<Term> {
        self.items.iter().rev().find_map(|item| match item {
            ScopeItem::Block(b, ms) if b.as_str() == block => ms
                .iter()
                .find(|m| m.as_str() == member)
                .map(|m| Term::ind(b.clone(), m.clone())),
            _ => None,
        })
    }

    fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for item in &self.items {
            match item {
                ScopeItem::Term(n) => {
                    out.insert(n.as_str().to_owned());
                }
                ScopeItem::Block(_, ms) => out.extend(ms.iter().map(|m| m.as_str().to_owned())),
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Qual(String, String),
    Num(u64),
    Level(u32),
    Cmd(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Qual(a, b) => write!(f, "`{a}.{b}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Level(n) => write!(f, "`Type@{{{n}}}`"),
            Tok::Cmd(s) => write!(f, "`#{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
    end_line: usize,
    end_col: usize,
}

const SYMBOLS: &[&str] = &[":=", "->", "=>", "==", "<=", "(", ")", "{", "}", ";", ",", ":", "."];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, col: usize, message: String) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Lexical,
            message,
            line,
            col,
        }
    }

    fn skip_trivia(&mut self) -> Result<(), ParseError> {
        loop {
            match (self.peek(0), self.peek(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('('), Some('*')) => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    let mut depth = 1;
                    while depth > 0 {
                        match (self.peek(0), self.peek(1)) {
                            (Some('('), Some('*')) => {
                                self.bump();
                                self.bump();
                                depth += 1;
                            }
                            (Some('*'), Some(')')) => {
                                self.bump();
                                self.bump();
                                depth -= 1;
                            }
                            (Some(_), _) => {
                                self.bump();
                            }
                            (None, _) => {
                                return Err(self.error(line, col, "unterminated comment".into()))
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek(0).filter(|c| is_ident_char(*c)) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn number(&mut self, line: usize, col: usize) -> Result<u64, ParseError> {
        let mut s = String::new();
        while let Some(c) = self.peek(0).filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        s.parse()
            .map_err(|_| self.error(line, col, format!("number `{s}` out of range")))
    }

    fn tokens(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia()?;
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek(0) else {
                out.push(Token {
                    tok: Tok::Eof,
                    line,
                    col,
                    end_line: line,
                    end_col: col,
                });
                return Ok(out);
            };
            let tok = if is_ident_start(c) {
                let s = self.ident();
                if s == "Type" && self.peek(0) == Some('@') && self.peek(1) == Some('{') {
                    self.bump();
                    self.bump();
                    if !self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
                        return Err(self.error(line, col, "expected a universe level".into()));
                    }
                    let n = self.number(line, col)?;
                    if self.bump() != Some('}') {
                        return Err(self.error(line, col, "expected `}` after universe level".into()));
                    }
                    let n = u32::try_from(n)
                        .map_err(|_| self.error(line, col, "universe level too large".into()))?;
                    Tok::Level(n)
                } else if self.peek(0) == Some('.') && self.peek(1).is_some_and(is_ident_start) {
                    self.bump();
                    let m = self.ident();
                    Tok::Qual(s, m)
                } else {
                    Tok::Ident(s)
                }
            } else if c.is_ascii_digit() {
                Tok::Num(self.number(line, col)?)
            } else if c == '#' {
                self.bump();
                if !self.peek(0).is_some_and(is_ident_start) {
                    return Err(self.error(line, col, "expected a command after `#`".into()));
                }
                Tok::Cmd(self.ident())
            } else if let Some(sym) = SYMBOLS.iter().find(|s| {
                s.chars().enumerate().all(|(i, sc)| self.peek(i) == Some(sc))
            }) {
                for _ in 0..sym.len() {
                    self.bump();
                }
                Tok::Sym(sym)
            } else {
                return Err(self.error(line, col, format!("unexpected character `{c}`")));
            };
            out.push(Token {
                tok,
                line,
                col,
                end_line: self.line,
                end_col: self.col,
            });
        }
    }
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Scope,
    locals: Vec<Name>,
    block_locals: BTreeSet<Name>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str, scope: Scope) -> PResult<Self> {
        Ok(Parser {
            toks: Lexer::new(src).tokens()?,
            pos: 0,
            scope,
            locals: Vec::new(),
            block_locals: BTreeSet::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, tok: &Token, kind: ParseErrorKind, message: String) -> ParseError {
        ParseError {
            kind,
            message,
            line: tok.line,
            col: tok.col,
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let t = &self.toks[self.pos];
        self.error_at(
            t,
            ParseErrorKind::Syntax,
            format!("expected {what}, found {}", t.tok),
        )
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Token> {
        if self.is_sym(s) {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.is_kw(s) {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    /// A user identifier (not a keyword).
    fn ident(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) && s != "_" => {
                self.advance();
                Ok(Name::new(&s))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    /// A binder name: an identifier or `_`.
    fn binder_name(&mut self) -> PResult<Name> {
        if matches!(self.peek(), Tok::Ident(s) if s == "_") {
            self.advance();
            Ok(Hint::anon().0)
        } else {
            self.ident()
        }
    }

    fn number(&mut self) -> PResult<u64> {
        match self.peek() {
            Tok::Num(n) => {
                let n = *n;
                self.advance();
                Ok(n)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn file(&mut self) -> PResult<SourceFile> {
        let mut declarations = Vec::new();
        while *self.peek() != Tok::Eof {
            declarations.push(self.declaration()?);
        }
        Ok(SourceFile { declarations })
    }

    fn declaration(&mut self) -> PResult<Declaration> {
        let start = self.toks[self.pos].clone();
        let decl = match self.peek().clone() {
            Tok::Ident(k) if k == "axiom" => {
                self.advance();
                let name = self.ident()?;
                self.expect_sym(":")?;
                let ty = self.term()?;
                Decl::Axiom { name, ty }
            }
            Tok::Ident(k) if k == "def" => {
                self.advance();
                let name = self.ident()?;
                self.expect_sym(":")?;
                let ty = self.term()?;
                self.expect_sym(":=")?;
                let body = self.term()?;
                Decl::Def { name, ty, body }
            }
            Tok::Ident(k) if k == "inductive" => {
                self.advance();
                let (name, block) = self.block()?;
                Decl::Inductive { name, block }
            }
            Tok::Cmd(c) => {
                self.advance();
                match c.as_str() {
                    "check" => {
                        let term = self.term()?;
                        let ty = if self.is_sym(":") {
                            self.advance();
                            Some(self.term()?)
                        } else {
                            None
                        };
                        Decl::Check { term, ty }
                    }
                    "eval" => Decl::Eval(self.term()?),
                    "conv" => {
                        let a = self.term()?;
                        self.expect_sym("==")?;
                        Decl::Conv(a, self.term()?)
                    }
                    "sub" => {
                        let a = self.term()?;
                        self.expect_sym("<=")?;
                        Decl::Sub(a, self.term()?)
                    }
                    _ => {
                        return Err(self.error_at(
                            &start,
                            ParseErrorKind::Syntax,
                            format!("unknown command `#{c}`"),
                        ))
                    }
                }
            }
            _ => return Err(self.unexpected("a declaration")),
        };
        let end = self.expect_sym(".")?;
        match &decl {
            Decl::Axiom { name, .. } | Decl::Def { name, .. } => self.scope.add_term(name.clone()),
            Decl::Inductive { name, block } => self.scope.add_block(name.clone(), block),
            _ => {}
        }
        Ok(Declaration {
            decl,
            span: Span {
                line: start.line,
                col: start.col,
                end_line: end.end_line,
                end_col: end.end_col,
            },
        })
    }

    fn block(&mut self) -> PResult<(Name, InductiveBlock)> {
        let name = self.ident()?;
        self.expect_kw("params")?;
        let params = self.number()? as usize;
        self.expect_sym("{")?;
        let inds = self.sigs()?;
        self.expect_sym(":=")?;
        self.block_locals = inds.iter().map(|(n, _)| n.clone()).collect();
        let constrs = if self.is_sym("}") {
            Ok(Vec::new())
        } else {
            self.sigs()
        };
        self.block_locals.clear();
        let constrs = constrs?;
        self.expect_sym("}")?;
        Ok((
            name,
            InductiveBlock {
                params,
                inds,
                constrs,
            },
        ))
    }

    fn sigs(&mut self) -> PResult<Vec<(Name, Term)>> {
        let mut out = Vec::new();
        loop {
            let n = self.ident()?;
            self.expect_sym(":")?;
            out.push((n, self.term()?));
            if self.is_sym(";") {
                self.advance();
            } else {
                return Ok(out);
            }
        }
    }

    fn term(&mut self) -> PResult<Term> {
        if self.is_kw("forall") || self.is_kw("fun") {
            let is_pi = self.is_kw("forall");
            self.advance();
            let binders = self.binders()?;
            self.expect_sym(if is_pi { "," } else { "=>" })?;
            let body = self.term();
            self.locals.truncate(self.locals.len() - binders.len());
            let body = body?;
            Ok(binders.iter().rev().fold(body, |acc, (x, ty)| {
                if is_pi {
                    Term::pi(x, ty.clone(), &acc)
                } else {
                    Term::lam(x, ty.clone(), &acc)
                }
            }))
        } else if self.is_kw("let") {
            self.advance();
            let x = self.binder_name()?;
            self.expect_sym(":=")?;
            let v = self.term()?;
            self.expect_sym(":")?;
            let ty = self.term()?;
            self.expect_kw("in")?;
            self.locals.push(x.clone());
            let body = self.term();
            self.locals.pop();
            Ok(Term::let_in(&x, v, ty, &body?))
        } else {
            let lhs = self.app()?;
            if self.is_sym("->") {
                self.advance();
                let rhs = self.term()?;
                Ok(Term::arrow(lhs, rhs))
            } else {
                Ok(lhs)
            }
        }
    }

    /// `x : A` or `(x y : A) (z : B)`; the names are pushed as locals.
    fn binders(&mut self) -> PResult<Vec<(Name, Term)>> {
        let start = self.locals.len();
        let res = self.binders_inner();
        if res.is_err() {
            self.locals.truncate(start);
        }
        res
    }

    fn binders_inner(&mut self) -> PResult<Vec<(Name, Term)>> {
        let mut out = Vec::new();
        if !self.is_sym("(") {
            let x = self.binder_name()?;
            self.expect_sym(":")?;
            let ty = self.term()?;
            self.locals.push(x.clone());
            out.push((x, ty));
            return Ok(out);
        }
        while self.is_sym("(") {
            self.advance();
            let mut names = vec![self.binder_name()?];
            while !self.is_sym(":") {
                names.push(self.binder_name()?);
            }
            self.advance();
            let ty = self.term()?;
            self.expect_sym(")")?;
            for x in names {
                // Later names in a group must not see earlier ones in the type.
                self.locals.push(x.clone());
                out.push((x, ty.clone()));
            }
        }
        Ok(out)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !is_keyword(s) || matches!(s.as_str(), "Prop" | "Set" | "Elim"),
            Tok::Qual(..) | Tok::Level(_) => true,
            Tok::Sym(s) => *s == "(",
            _ => false,
        }
    }

    fn app(&mut self) -> PResult<Term> {
        if !self.starts_atom() {
            return Err(self.unexpected("a term"));
        }
        let mut t = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn atom(&mut self) -> PResult<Term> {
        let tok = self.toks[self.pos].clone();
        match &tok.tok {
            Tok::Level(i) => {
                self.advance();
                Ok(Term::ty(*i))
            }
            Tok::Sym("(") => {
                self.advance();
                let t = self.term()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Qual(b, m) => {
                self.advance();
                self.scope.resolve_qualified(b, m).ok_or_else(|| {
                    self.error_at(
                        &tok,
                        ParseErrorKind::UnknownIdentifier,
                        format!("unknown block member `{b}.{m}`"),
                    )
                })
            }
            Tok::Ident(s) => match s.as_str() {
                "Prop" => {
                    self.advance();
                    Ok(Term::prop())
                }
                "Set" => {
                    self.advance();
                    Ok(Term::ty(0))
                }
                "Elim" => self.elim(),
                _ => {
                    self.advance();
                    self.resolve(&tok, s)
                }
            },
            _ => Err(self.unexpected("a term")),
        }
    }

    fn resolve(&self, tok: &Token, s: &str) -> PResult<Term> {
        if s == "_" {
            return Err(self.error_at(
                tok,
                ParseErrorKind::Syntax,
                "`_` cannot be used as a term".into(),
            ));
        }
        if let Some(x) = self.locals.iter().rev().find(|x| x.as_str() == s) {
            return Ok(Term::Var(x.clone()));
        }
        if let Some(x) = self.block_locals.iter().find(|x| x.as_str() == s) {
            return Ok(Term::Var(x.clone()));
        }
        self.scope.resolve(s).ok_or_else(|| {
            self.error_at(
                tok,
                ParseErrorKind::UnknownIdentifier,
                format!("unknown identifier `{s}`"),
            )
        })
    }

    fn elim(&mut self) -> PResult<Term> {
        self.advance();
        self.expect_sym("(")?;
        let scrutinee = self.term()?;
        self.expect_sym(";")?;
        let tok = self.toks[self.pos].clone();
        let target = match &tok.tok {
            Tok::Qual(b, m) => self.scope.resolve_qualified(b, m),
            Tok::Ident(s) if !is_keyword(s) => self.scope.resolve(s),
            _ => return Err(self.unexpected("an inductive type")),
        };
        self.advance();
        let Some(Term::Ind(r)) = target else {
            return Err(self.error_at(
                &tok,
                ParseErrorKind::UnknownIdentifier,
                format!("{} is not an inductive type of a declared block", tok.tok),
            ));
        };
        self.expect_sym(";")?;
        let motives = self.term_list()?;
        self.expect_sym(";")?;
        let cases = self.term_list()?;
        self.expect_sym(")")?;
        Ok(Term::elim(scrutinee, r.block, r.member, motives, cases))
    }

    fn term_list(&mut self) -> PResult<Vec<Term>> {
        let mut out = Vec::new();
        if self.is_sym(";") || self.is_sym(")") {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.is_sym(",") {
                self.advance();
            } else {
                return Ok(out);
            }
        }
    }
}

/// Parses a whole file.
pub fn parse(text: &str) -> Result<SourceFile, ParseError> {
    Parser::new(text, Scope::new())?.file()
}

/// Parses a file whose declarations may refer to the names in `scope`.
pub fn parse_in(scope: &Scope, text: &str) -> Result<SourceFile, ParseError> {
    Parser::new(text, scope.clone())?.file()
}

/// Parses a single term, resolving identifiers against `scope`.
pub fn parse_term(scope: &Scope, text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, scope.clone())?;
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Printer

struct Printer<'a> {
    scope: &'a Scope,
    avoid: BTreeSet<String>,
    locals: Vec<String>,
    block_locals: BTreeSet<Name>,
}

const ARROW: u8 = 0;
const APP: u8 = 1;
const ATOM: u8 = 2;

impl<'a> Printer<'a> {
    fn new(scope: &'a Scope, terms: &[&Term]) -> Self {
        let mut avoid = scope.names();
        for t in terms {
            avoid.extend(t.free_vars().into_iter().map(|n| n.as_str().to_owned()));
        }
        Printer {
            scope,
            avoid,
            locals: Vec::new(),
            block_locals: BTreeSet::new(),
        }
    }

    fn pick(&self, hint: &Hint, used: bool) -> String {
        let base = hint.name().base();
        let base = if base.is_empty() || base == "_" || base.contains('#') {
            if !used {
                return "_".into();
            }
            "x"
        } else {
            base
        };
        let taken = |s: &str| {
            is_keyword(s) || self.avoid.contains(s) || self.locals.iter().any(|l| l == s)
        };
        if !taken(base) {
            return base.to_owned();
        }
        (1..)
            .map(|k| format!("{base}{k}"))
            .find(|s| !taken(s))
            .expect("unbounded")
    }

    fn with_local<T>(&mut self, name: String, f: impl FnOnce(&mut Self) -> T) -> T {
        self.locals.push(name);
        let r = f(self);
        self.locals.pop();
        r
    }

    fn term(&mut self, t: &Term, prec: u8, out: &mut String) {
        match t {
            Term::Var(x) => out.push_str(x.as_str()),
            Term::Bound(i) => {
                let i = *i as usize;
                match self.locals.len().checked_sub(i + 1) {
                    Some(k) => out.push_str(&self.locals[k]),
                    None => out.push_str(&format!("#{i}")),
                }
            }
            Term::Sort(s) => out.push_str(&s.to_string()),
            Term::Ind(r) => {
                let bare = Term::Ind(r.clone());
                if self.scope.bindings(r.member.as_str()) == 1
                    && self.scope.resolve(r.member.as_str()).as_ref() == Some(&bare)
                    && !self.locals.iter().any(|l| l == r.member.as_str())
                    && !self.block_locals.contains(&r.member)
                {
                    out.push_str(r.member.as_str());
                } else {
                    out.push_str(&format!("{}.{}", r.block, r.member));
                }
            }
            Term::Pi(h, a, b) => {
                let used = b.mentions_bound(0);
                paren(out, prec > ARROW, |out| {
                    if !used {
                        self.term(a, APP, out);
                        out.push_str(" -> ");
                        self.with_local("_".into(), |p| p.term(b, ARROW, out));
                    } else {
                        let x = self.pick(h, true);
                        out.push_str(&format!("forall {x} : "));
                        self.term(a, ARROW, out);
                        out.push_str(", ");
                        self.with_local(x, |p| p.term(b, ARROW, out));
                    }
                });
            }
            Term::Lam(h, a, b) => {
                let x = self.pick(h, b.mentions_bound(0));
                paren(out, prec > ARROW, |out| {
                    out.push_str(&format!("fun {x} : "));
                    self.term(a, ARROW, out);
                    out.push_str(" => ");
                    self.with_local(x, |p| p.term(b, ARROW, out));
                });
            }
            Term::Let(h, v, ty, b) => {
                let x = self.pick(h, b.mentions_bound(0));
                paren(out, prec > ARROW, |out| {
                    out.push_str(&format!("let {x} := "));
                    self.term(v, ARROW, out);
                    out.push_str(" : ");
                    self.term(ty, ARROW, out);
                    out.push_str(" in ");
                    self.with_local(x, |p| p.term(b, ARROW, out));
                });
            }
            Term::App(f, a) => paren(out, prec > APP, |out| {
                self.term(f, APP, out);
                out.push(' ');
                self.term(a, ATOM, out);
            }),
            Term::Elim(e) => {
                out.push_str("Elim(");
                self.term(&e.scrutinee, ARROW, out);
                out.push_str("; ");
                self.term(&Term::ind(e.block.clone(), e.target.clone()), ATOM, out);
                out.push_str("; ");
                self.list(&e.motives, out);
                out.push_str("; ");
                self.list(&e.cases, out);
                out.push(')');
            }
        }
    }

    fn list(&mut self, ts: &[Term], out: &mut String) {
        for (i, t) in ts.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            self.term(t, ARROW, out);
        }
    }
}

fn paren(out: &mut String, wrap: bool, f: impl FnOnce(&mut String)) {
    if wrap {
        out.push('(');
    }
    f(out);
    if wrap {
        out.push(')');
    }
}

/// Prints a term so that it reparses to an alpha-equivalent term in `scope`.
pub fn print_term_in(scope: &Scope, t: &Term) -> String {
    let mut p = Printer::new(scope, &[t]);
    let mut out = String::new();
    p.term(t, ARROW, &mut out);
    out
}

/// Prints a term using the names of `ctx`.
pub fn print_term(ctx: &Context, t: &Term) -> String {
    print_term_in(&Scope::from_context(ctx), t)
}

/// Prints a block as an `inductive` declaration.
pub fn print_block_in(scope: &Scope, name: &Name, b: &InductiveBlock) -> String {
    let terms: Vec<&Term> = b.inds.iter().chain(&b.constrs).map(|(_, t)| t).collect();
    let mut p = Printer::new(scope, &terms);
    let sig = |p: &mut Printer<'_>, (n, t): &(Name, Term)| {
        let mut s = format!("{n} : ");
        p.term(t, ARROW, &mut s);
        s
    };
    let inds: Vec<String> = b.inds.iter().map(|s| sig(&mut p, s)).collect();
    p.block_locals = b.ind_names();
    let constrs: Vec<String> = b.constrs.iter().map(|s| sig(&mut p, s)).collect();
    let constrs = if constrs.is_empty() {
        String::new()
    } else {
        format!("\n  {}\n", constrs.join(";\n  "))
    };
    format!(
        "inductive {name} params {} {{\n  {}\n:={constrs}}}.",
        b.params,
        inds.join(";\n  "),
    )
}

pub fn print_block(ctx: &Context, name: &Name, b: &InductiveBlock) -> String {
    print_block_in(&Scope::from_context(ctx), name, b)
}

/// Prints a context as a sequence of declarations.
pub fn print_context(ctx: &Context) -> String {
    let mut scope = Scope::new();
    let mut out = Vec::new();
    for e in ctx.entries() {
        match e {
            Entry::Hyp { name, ty } => {
                out.push(format!("axiom {name} : {}.", print_term_in(&scope, ty)));
                scope.add_term(name.clone());
            }
            Entry::Def { name, body, ty } => {
                out.push(format!(
                    "def {name} : {} := {}.",
                    print_term_in(&scope, ty),
                    print_term_in(&scope, body)
                ));
                scope.add_term(name.clone());
            }
            Entry::Block { name, block } => {
                out.push(print_block_in(&scope, name, block));
                scope.add_block(name.clone(), block);
            }
        }
    }
    out.join("\n")
}

/// Replays the entries of a parsed file's axioms, definitions and blocks as
/// a context, without checking them.
pub fn context_of(file: &SourceFile) -> Context {
    let mut ctx = Context::new();
    for d in &file.declarations {
        ctx = match &d.decl {
            Decl::Axiom { name, ty } => ctx.with_hyp(name.clone(), ty.clone()),
            Decl::Def { name, ty, body } => ctx.with_def(name.clone(), body.clone(), ty.clone()),
            Decl::Inductive { name, block } => ctx.with_block(name.clone(), block.clone()),
            _ => ctx,
        };
    }
    ctx
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term_in(&Scope::new(), self))
    }
}
