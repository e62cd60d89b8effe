//! Concrete syntax for both languages.
//!
//! ```text
//! ty ::= "Unit" | "Bool" | ty "->" ty | ty "*" ty | ty "+" ty | "(" ty ")"
//!        -- "*" binds tighter than "+" binds tighter than "->"; all right-assoc
//! tm ::= "unit" | "true" | "false" | ident
//!      | "\" ident ":" ty "." tm            -- source; the target drops ":ty"
//!      | tm tm                              -- application, left-assoc, tightest
//!      | "fst" tm | "snd" tm | "inl" tm | "inr" tm
//!      | "<" tm "," tm ">"
//!      | "case" tm "of" "inl" ident "=>" tm "|" "inr" ident "=>" tm
//!      | tm ";" tm                          -- right-assoc, loosest
//!      | "if" tm "then" tm "else" tm
//!      | "fix" "[" ty "]" tm                -- source only; ty must be an arrow
//!      | "wrong"                            -- target only
//!      | "HOLE" | "(" tm ")"
//! ```
//!
//! A text with exactly one `HOLE` is a context, zero holes a term, two or
//! more a parse error.

use crate::ctx::{SrcCtx, TgtCtx};
use crate::source::{SrcTerm, SrcType, TyKind};
use crate::target::TgtTerm;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
#[error("parse error at {line}:{col}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    KwUnitV,
    KwTrue,
    KwFalse,
    KwFst,
    KwSnd,
    KwInl,
    KwInr,
    KwCase,
    KwOf,
    KwIf,
    KwThen,
    KwElse,
    KwFix,
    KwWrong,
    KwHole,
    TyUnit,
    TyBool,
    Backslash,
    Colon,
    Dot,
    Semi,
    Comma,
    Lt,
    Gt,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Arrow,
    FatArrow,
    Pipe,
    Star,
    Plus,
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(i) => return write!(f, "`{i}`"),
            Tok::KwUnitV => "`unit`",
            Tok::KwTrue => "`true`",
            Tok::KwFalse => "`false`",
            Tok::KwFst => "`fst`",
            Tok::KwSnd => "`snd`",
            Tok::KwInl => "`inl`",
            Tok::KwInr => "`inr`",
            Tok::KwCase => "`case`",
            Tok::KwOf => "`of`",
            Tok::KwIf => "`if`",
            Tok::KwThen => "`then`",
            Tok::KwElse => "`else`",
            Tok::KwFix => "`fix`",
            Tok::KwWrong => "`wrong`",
            Tok::KwHole => "`HOLE`",
            Tok::TyUnit => "`Unit`",
            Tok::TyBool => "`Bool`",
            Tok::Backslash => "`\\`",
            Tok::Colon => "`:`",
            Tok::Dot => "`.`",
            Tok::Semi => "`;`",
            Tok::Comma => "`,`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Arrow => "`->`",
            Tok::FatArrow => "`=>`",
            Tok::Pipe => "`|`",
            Tok::Star => "`*`",
            Tok::Plus => "`+`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

type Spanned = (Tok, u32, u32);

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut lx = Lexer { src, pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        lx.skip_ws();
        let (line, col) = (lx.line, lx.col);
        let Some(c) = lx.peek() else {
            out.push((Tok::Eof, line, col));
            return Ok(out);
        };
        let tok = match c {
            '\\' => lx.single(Tok::Backslash),
            ':' => lx.single(Tok::Colon),
            '.' => lx.single(Tok::Dot),
            ';' => lx.single(Tok::Semi),
            ',' => lx.single(Tok::Comma),
            '<' => lx.single(Tok::Lt),
            '>' => lx.single(Tok::Gt),
            '(' => lx.single(Tok::LParen),
            ')' => lx.single(Tok::RParen),
            '[' => lx.single(Tok::LBracket),
            ']' => lx.single(Tok::RBracket),
            '*' => lx.single(Tok::Star),
            '+' => lx.single(Tok::Plus),
            '|' => lx.single(Tok::Pipe),
            '-' => {
                lx.advance();
                if lx.peek() == Some('>') {
                    lx.advance();
                    Tok::Arrow
                } else {
                    return Err(ParseError {
                        line,
                        col,
                        expected: vec!["`->`".into()],
                        found: "`-`".into(),
                    });
                }
            }
            '=' => {
                lx.advance();
                if lx.peek() == Some('>') {
                    lx.advance();
                    Tok::FatArrow
                } else {
                    return Err(ParseError {
                        line,
                        col,
                        expected: vec!["`=>`".into()],
                        found: "`=`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let word = lx.word();
                match word.as_str() {
                    "unit" => Tok::KwUnitV,
                    "true" => Tok::KwTrue,
                    "false" => Tok::KwFalse,
                    "fst" => Tok::KwFst,
                    "snd" => Tok::KwSnd,
                    "inl" => Tok::KwInl,
                    "inr" => Tok::KwInr,
                    "case" => Tok::KwCase,
                    "of" => Tok::KwOf,
                    "if" => Tok::KwIf,
                    "then" => Tok::KwThen,
                    "else" => Tok::KwElse,
                    "fix" => Tok::KwFix,
                    "wrong" => Tok::KwWrong,
                    "HOLE" => Tok::KwHole,
                    "Unit" => Tok::TyUnit,
                    "Bool" => Tok::TyBool,
                    _ => Tok::Ident(word),
                }
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    expected: vec!["a token".into()],
                    found: format!("`{other}`"),
                })
            }
        };
        out.push((tok, line, col));
    }
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn advance(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
    }

    fn single(&mut self, t: Tok) -> Tok {
        self.advance();
        t
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => self.advance(),
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.advance();
                    }
                }
                _ => return,
            }
        }
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                self.advance();
            } else {
                break;
            }
        }
        self.src[start..self.pos].to_string()
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    typed: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (u32, u32) {
        let (_, l, c) = self.toks[self.pos];
        (l, c)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &[&str]) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&[what]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.err(&["an identifier"])),
        }
    }

    // -- types ------------------------------------------------------------

    fn ty(&mut self) -> Result<SrcType, ParseError> {
        let lhs = self.ty_sum()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.ty()?;
            Ok(SrcType::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn ty_sum(&mut self) -> Result<SrcType, ParseError> {
        let lhs = self.ty_prod()?;
        if *self.peek() == Tok::Plus {
            self.bump();
            let rhs = self.ty_sum()?;
            Ok(SrcType::sum(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn ty_prod(&mut self) -> Result<SrcType, ParseError> {
        let lhs = self.ty_atom()?;
        if *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.ty_prod()?;
            Ok(SrcType::prod(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn ty_atom(&mut self) -> Result<SrcType, ParseError> {
        match self.peek() {
            Tok::TyUnit => {
                self.bump();
                Ok(SrcType::unit())
            }
            Tok::TyBool => {
                self.bump();
                Ok(SrcType::bool_())
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.err(&["`Unit`", "`Bool`", "`(`"])),
        }
    }

    // -- terms (generic over the language via `Build`) ---------------------

    fn term<B: Build>(&mut self) -> Result<B::Out, ParseError> {
        let head = self.headed::<B>()?;
        if *self.peek() == Tok::Semi {
            self.bump();
            let rest = self.term::<B>()?;
            Ok(B::seq(head, rest))
        } else {
            Ok(head)
        }
    }

    fn headed<B: Build>(&mut self) -> Result<B::Out, ParseError> {
        match self.peek() {
            Tok::Backslash => {
                self.bump();
                let x = self.ident()?;
                let ann = if self.typed {
                    self.expect(Tok::Colon, "`:`")?;
                    Some(self.ty()?)
                } else {
                    None
                };
                self.expect(Tok::Dot, "`.`")?;
                let body = self.term::<B>()?;
                B::lam(self, x, ann, body)
            }
            Tok::KwIf => {
                self.bump();
                let c = self.term::<B>()?;
                self.expect(Tok::KwThen, "`then`")?;
                let t = self.term::<B>()?;
                self.expect(Tok::KwElse, "`else`")?;
                let e = self.headed::<B>()?;
                Ok(B::ite(c, t, e))
            }
            Tok::KwCase => {
                self.bump();
                let s = self.term::<B>()?;
                self.expect(Tok::KwOf, "`of`")?;
                self.expect(Tok::KwInl, "`inl`")?;
                let nl = self.ident()?;
                self.expect(Tok::FatArrow, "`=>`")?;
                let bl = self.term::<B>()?;
                self.expect(Tok::Pipe, "`|`")?;
                self.expect(Tok::KwInr, "`inr`")?;
                let nr = self.ident()?;
                self.expect(Tok::FatArrow, "`=>`")?;
                let br = self.headed::<B>()?;
                Ok(B::case_of(s, nl, bl, nr, br))
            }
            Tok::KwFix => {
                self.bump();
                B::fix(self)
            }
            _ => self.unary::<B>(),
        }
    }

    fn unary<B: Build>(&mut self) -> Result<B::Out, ParseError> {
        match self.peek() {
            Tok::KwFst => {
                self.bump();
                Ok(B::proj1(self.unary::<B>()?))
            }
            Tok::KwSnd => {
                self.bump();
                Ok(B::proj2(self.unary::<B>()?))
            }
            Tok::KwInl => {
                self.bump();
                Ok(B::inl(self.unary::<B>()?))
            }
            Tok::KwInr => {
                self.bump();
                Ok(B::inr(self.unary::<B>()?))
            }
            _ => self.app_chain::<B>(),
        }
    }

    fn app_chain<B: Build>(&mut self) -> Result<B::Out, ParseError> {
        let mut acc = self.atom::<B>()?;
        while self.starts_atom() {
            let arg = self.atom::<B>()?;
            acc = B::app(acc, arg);
        }
        Ok(acc)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::KwUnitV
                | Tok::KwTrue
                | Tok::KwFalse
                | Tok::Ident(_)
                | Tok::KwHole
                | Tok::KwWrong
                | Tok::Lt
                | Tok::LParen
        )
    }

    fn atom<B: Build>(&mut self) -> Result<B::Out, ParseError> {
        match self.peek().clone() {
            Tok::KwUnitV => {
                self.bump();
                Ok(B::unit())
            }
            Tok::KwTrue => {
                self.bump();
                Ok(B::tru())
            }
            Tok::KwFalse => {
                self.bump();
                Ok(B::fls())
            }
            Tok::Ident(x) => {
                self.bump();
                Ok(B::var(x))
            }
            Tok::KwHole => {
                self.bump();
                Ok(B::hole())
            }
            Tok::KwWrong => {
                self.bump();
                B::wrong(self)
            }
            Tok::Lt => {
                self.bump();
                let l = self.term::<B>()?;
                self.expect(Tok::Comma, "`,`")?;
                let r = self.term::<B>()?;
                self.expect(Tok::Gt, "`>`")?;
                Ok(B::pair(l, r))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term::<B>()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.err(&["a term"])),
        }
    }
}

trait Build: Sized {
    type Out;
    fn unit() -> Self::Out;
    fn tru() -> Self::Out;
    fn fls() -> Self::Out;
    fn var(x: String) -> Self::Out;
    fn hole() -> Self::Out;
    fn app(f: Self::Out, a: Self::Out) -> Self::Out;
    fn pair(l: Self::Out, r: Self::Out) -> Self::Out;
    fn proj1(t: Self::Out) -> Self::Out;
    fn proj2(t: Self::Out) -> Self::Out;
    fn inl(t: Self::Out) -> Self::Out;
    fn inr(t: Self::Out) -> Self::Out;
    fn case_of(s: Self::Out, nl: String, bl: Self::Out, nr: String, br: Self::Out) -> Self::Out;
    fn seq(a: Self::Out, b: Self::Out) -> Self::Out;
    fn ite(c: Self::Out, t: Self::Out, e: Self::Out) -> Self::Out;
    fn lam(p: &mut Parser, x: String, ann: Option<SrcType>, body: Self::Out)
        -> Result<Self::Out, ParseError>;
    fn fix(p: &mut Parser) -> Result<Self::Out, ParseError>;
    fn wrong(p: &mut Parser) -> Result<Self::Out, ParseError>;
}

struct SrcBuild;

impl Build for SrcBuild {
    type Out = SrcTerm;
    fn unit() -> SrcTerm {
        SrcTerm::unit()
    }
    fn tru() -> SrcTerm {
        SrcTerm::tru()
    }
    fn fls() -> SrcTerm {
        SrcTerm::fls()
    }
    fn var(x: String) -> SrcTerm {
        SrcTerm::var(x)
    }
    fn hole() -> SrcTerm {
        SrcTerm::hole()
    }
    fn app(f: SrcTerm, a: SrcTerm) -> SrcTerm {
        SrcTerm::app(f, a)
    }
    fn pair(l: SrcTerm, r: SrcTerm) -> SrcTerm {
        SrcTerm::pair(l, r)
    }
    fn proj1(t: SrcTerm) -> SrcTerm {
        SrcTerm::proj1(t)
    }
    fn proj2(t: SrcTerm) -> SrcTerm {
        SrcTerm::proj2(t)
    }
    fn inl(t: SrcTerm) -> SrcTerm {
        SrcTerm::inl(t)
    }
    fn inr(t: SrcTerm) -> SrcTerm {
        SrcTerm::inr(t)
    }
    fn case_of(s: SrcTerm, nl: String, bl: SrcTerm, nr: String, br: SrcTerm) -> SrcTerm {
        SrcTerm::case_of(s, nl, bl, nr, br)
    }
    fn seq(a: SrcTerm, b: SrcTerm) -> SrcTerm {
        SrcTerm::seq(a, b)
    }
    fn ite(c: SrcTerm, t: SrcTerm, e: SrcTerm) -> SrcTerm {
        SrcTerm::ite(c, t, e)
    }
    fn lam(
        _p: &mut Parser,
        x: String,
        ann: Option<SrcType>,
        body: SrcTerm,
    ) -> Result<SrcTerm, ParseError> {
        Ok(SrcTerm::lam(x, ann.expect("typed parser supplies annotations"), body))
    }
    fn fix(p: &mut Parser) -> Result<SrcTerm, ParseError> {
        let (line, col) = p.here();
        p.expect(Tok::LBracket, "`[`")?;
        let ty = p.ty()?;
        p.expect(Tok::RBracket, "`]`")?;
        let TyKind::Arrow(d, c) = ty.kind() else {
            return Err(ParseError {
                line,
                col,
                expected: vec!["an arrow type in `fix [...]`".into()],
                found: ty.to_string(),
            });
        };
        let arg = p.headed::<SrcBuild>()?;
        Ok(SrcTerm::fix(d.clone(), c.clone(), arg))
    }
    fn wrong(p: &mut Parser) -> Result<SrcTerm, ParseError> {
        Err(p.err(&["a source term (`wrong` is target-only)"]))
    }
}

struct TgtBuild;

impl Build for TgtBuild {
    type Out = TgtTerm;
    fn unit() -> TgtTerm {
        TgtTerm::unit()
    }
    fn tru() -> TgtTerm {
        TgtTerm::tru()
    }
    fn fls() -> TgtTerm {
        TgtTerm::fls()
    }
    fn var(x: String) -> TgtTerm {
        TgtTerm::var(x)
    }
    fn hole() -> TgtTerm {
        TgtTerm::hole()
    }
    fn app(f: TgtTerm, a: TgtTerm) -> TgtTerm {
        TgtTerm::app(f, a)
    }
    fn pair(l: TgtTerm, r: TgtTerm) -> TgtTerm {
        TgtTerm::pair(l, r)
    }
    fn proj1(t: TgtTerm) -> TgtTerm {
        TgtTerm::proj1(t)
    }
    fn proj2(t: TgtTerm) -> TgtTerm {
        TgtTerm::proj2(t)
    }
    fn inl(t: TgtTerm) -> TgtTerm {
        TgtTerm::inl(t)
    }
    fn inr(t: TgtTerm) -> TgtTerm {
        TgtTerm::inr(t)
    }
    fn case_of(s: TgtTerm, nl: String, bl: TgtTerm, nr: String, br: TgtTerm) -> TgtTerm {
        TgtTerm::case_of(s, nl, bl, nr, br)
    }
    fn seq(a: TgtTerm, b: TgtTerm) -> TgtTerm {
        TgtTerm::seq(a, b)
    }
    fn ite(c: TgtTerm, t: TgtTerm, e: TgtTerm) -> TgtTerm {
        TgtTerm::ite(c, t, e)
    }
    fn lam(
        _p: &mut Parser,
        x: String,
        _ann: Option<SrcType>,
        body: TgtTerm,
    ) -> Result<TgtTerm, ParseError> {
        Ok(TgtTerm::lam(x, body))
    }
    fn fix(p: &mut Parser) -> Result<TgtTerm, ParseError> {
        Err(p.err(&["a target term (`fix` is source-only; use the Z combinator)"]))
    }
    fn wrong(_p: &mut Parser) -> Result<TgtTerm, ParseError> {
        Ok(TgtTerm::wrong())
    }
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedSrc {
    Term(SrcTerm),
    Ctx(SrcCtx),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedTgt {
    Term(TgtTerm),
    Ctx(TgtCtx),
}

fn finish<T>(p: &mut Parser, out: T) -> Result<T, ParseError> {
    if *p.peek() == Tok::Eof {
        Ok(out)
    } else {
        Err(p.err(&["end of input"]))
    }
}

/// Parses source text; one `HOLE` yields a context, none a term.
pub fn parse_src(text: &str) -> Result<ParsedSrc, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, typed: true };
    let t = p.term::<SrcBuild>()?;
    let t = finish(&mut p, t)?;
    match t.holes() {
        0 => Ok(ParsedSrc::Term(t)),
        1 => Ok(ParsedSrc::Ctx(SrcCtx::new(t).unwrap())),
        k => Err(ParseError {
            line: 1,
            col: 1,
            expected: vec!["at most one HOLE".into()],
            found: format!("{k} holes"),
        }),
    }
}

pub fn parse_src_term(text: &str) -> Result<SrcTerm, ParseError> {
    match parse_src(text)? {
        ParsedSrc::Term(t) => Ok(t),
        ParsedSrc::Ctx(_) => Err(ParseError {
            line: 1,
            col: 1,
            expected: vec!["a term without holes".into()],
            found: "a context".into(),
        }),
    }
}

pub fn parse_src_ctx(text: &str) -> Result<SrcCtx, ParseError> {
    match parse_src(text)? {
        ParsedSrc::Ctx(c) => Ok(c),
        ParsedSrc::Term(_) => Err(ParseError {
            line: 1,
            col: 1,
            expected: vec!["a context with one HOLE".into()],
            found: "a term".into(),
        }),
    }
}

/// Parses target text; one `HOLE` yields a context, none a term.
pub fn parse_tgt(text: &str) -> Result<ParsedTgt, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, typed: false };
    let t = p.term::<TgtBuild>()?;
    let t = finish(&mut p, t)?;
    match t.holes() {
        0 => Ok(ParsedTgt::Term(t)),
        1 => Ok(ParsedTgt::Ctx(TgtCtx::new(t).unwrap())),
        k => Err(ParseError {
            line: 1,
            col: 1,
            expected: vec!["at most one HOLE".into()],
            found: format!("{k} holes"),
        }),
    }
}

pub fn parse_tgt_term(text: &str) -> Result<TgtTerm, ParseError> {
    match parse_tgt(text)? {
        ParsedTgt::Term(t) => Ok(t),
        ParsedTgt::Ctx(_) => Err(ParseError {
            line: 1,
            col: 1,
            expected: vec!["a term without holes".into()],
            found: "a context".into(),
        }),
    }
}

pub fn parse_tgt_ctx(text: &str) -> Result<TgtCtx, ParseError> {
    match parse_tgt(text)? {
        ParsedTgt::Ctx(c) => Ok(c),
        ParsedTgt::Term(_) => Err(ParseError {
            line: 1,
            col: 1,
            expected: vec!["a context with one HOLE".into()],
            found: "a term".into(),
        }),
    }
}

/// Parses a source type.
pub fn parse_src_type(text: &str) -> Result<SrcType, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, typed: true };
    let t = p.ty()?;
    finish(&mut p, t)
}
