//! Concrete syntax: parsing and printing for types and terms.
//!
//! Types: atoms are lowercase identifiers, `omega` is the universal type,
//! `->` is right-associative and `&` binds tighter than `->`.
//!
//! Terms: `\x:T. t` for annotated abstractions, juxtaposition for
//! application, `<t1, t2>` for strong pairs, `pr1 t` / `pr2 t` for
//! projections, postfix `t ^ T` for coercions (the type argument is an
//! atom, `omega`, or parenthesized) and `u[t]` for indexed constants.
//! Pure terms use the same grammar without annotations, pairs or
//! coercions: `\x. t`.
//!
//! Printing is the inverse up to whitespace and binder names.

use crate::lambda::LambdaTerm;
use crate::term::{Proj, Term};
use crate::ty::TypeExpr;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Omega,
    Pr(Proj),
    Lambda,
    Colon,
    Dot,
    Comma,
    Arrow,
    Amp,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let offset = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '\\' => {
                out.push(Token { tok: Tok::Lambda, offset });
                i += 1;
            }
            ':' => {
                out.push(Token { tok: Tok::Colon, offset });
                i += 1;
            }
            '.' => {
                out.push(Token { tok: Tok::Dot, offset });
                i += 1;
            }
            ',' => {
                out.push(Token { tok: Tok::Comma, offset });
                i += 1;
            }
            '&' => {
                out.push(Token { tok: Tok::Amp, offset });
                i += 1;
            }
            '^' => {
                out.push(Token { tok: Tok::Caret, offset });
                i += 1;
            }
            '(' => {
                out.push(Token { tok: Tok::LParen, offset });
                i += 1;
            }
            ')' => {
                out.push(Token { tok: Tok::RParen, offset });
                i += 1;
            }
            '[' => {
                out.push(Token { tok: Tok::LBracket, offset });
                i += 1;
            }
            ']' => {
                out.push(Token { tok: Tok::RBracket, offset });
                i += 1;
            }
            '<' => {
                out.push(Token { tok: Tok::LAngle, offset });
                i += 1;
            }
            '>' => {
                out.push(Token { tok: Tok::RAngle, offset });
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push(Token { tok: Tok::Arrow, offset });
                    i += 2;
                } else {
                    return Err(ParseError {
                        offset,
                        message: "expected `->`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric()
                        || bytes[i] == b'_'
                        || bytes[i] == b'\'')
                {
                    i += 1;
                }
                let word = &src[start..i];
                let tok = match word {
                    "omega" => Tok::Omega,
                    "pr1" => Tok::Pr(Proj::Fst),
                    "pr2" => Tok::Pr(Proj::Snd),
                    _ => Tok::Ident(word.to_owned()),
                };
                out.push(Token { tok, offset });
            }
            other => {
                return Err(ParseError {
                    offset,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            tokens: lex(src)?,
            pos: 0,
            len: src.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |t| t.offset)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    // ---- types ----

    fn ty(&mut self) -> Result<TypeExpr, ParseError> {
        let left = self.ty_inter()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let right = self.ty()?;
            Ok(TypeExpr::arrow(left, right))
        } else {
            Ok(left)
        }
    }

    fn ty_inter(&mut self) -> Result<TypeExpr, ParseError> {
        let left = self.ty_atom()?;
        if self.peek() == Some(&Tok::Amp) {
            self.bump();
            let right = self.ty_inter()?;
            Ok(TypeExpr::inter(left, right))
        } else {
            Ok(left)
        }
    }

    fn ty_atom(&mut self) -> Result<TypeExpr, ParseError> {
        match self.bump() {
            Some(Tok::Ident(name)) => Ok(TypeExpr::Atom(name)),
            Some(Tok::Omega) => Ok(TypeExpr::Omega),
            Some(Tok::LParen) => {
                let t = self.ty()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.fail("expected a type")
            }
        }
    }

    // ---- annotated terms ----

    fn term(&mut self) -> Result<Term, ParseError> {
        if self.peek() == Some(&Tok::Lambda) {
            self.bump();
            let Some(Tok::Ident(name)) = self.bump() else {
                return self.fail("expected a binder name");
            };
            self.expect(Tok::Colon, "`:` and a binder annotation")?;
            let annot = self.ty()?;
            self.expect(Tok::Dot, "`.`")?;
            let body = self.term()?;
            return Ok(Term::bind(&name, annot, body));
        }
        self.term_app()
    }

    fn term_app(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.term_prefix()?;
        while self.starts_prefix() {
            let arg = self.term_prefix()?;
            acc = Term::app(acc, arg);
        }
        Ok(acc)
    }

    fn starts_prefix(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_)) | Some(Tok::Pr(_)) | Some(Tok::LParen) | Some(Tok::LAngle)
        )
    }

    fn term_prefix(&mut self) -> Result<Term, ParseError> {
        if let Some(Tok::Pr(p)) = self.peek().cloned() {
            self.bump();
            let body = self.term_prefix()?;
            return Ok(Term::proj(p, body));
        }
        self.term_postfix()
    }

    fn term_postfix(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.term_atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.bump();
            let target = self.ty_atom()?;
            acc = Term::coerce(acc, target);
        }
        Ok(acc)
    }

    fn term_atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.bump();
                if name == "u" && self.peek() == Some(&Tok::LBracket) {
                    self.bump();
                    let index = self.term()?;
                    self.expect(Tok::RBracket, "`]`")?;
                    return Ok(Term::uconst(index));
                }
                Ok(Term::free(name))
            }
            Some(Tok::LParen) => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::LAngle) => {
                self.bump();
                let l = self.term()?;
                self.expect(Tok::Comma, "`,`")?;
                let r = self.term()?;
                self.expect(Tok::RAngle, "`>`")?;
                Ok(Term::pair(l, r))
            }
            _ => self.fail("expected a term"),
        }
    }

    // ---- pure terms ----

    fn lterm(&mut self) -> Result<LambdaTerm, ParseError> {
        if self.peek() == Some(&Tok::Lambda) {
            self.bump();
            let Some(Tok::Ident(name)) = self.bump() else {
                return self.fail("expected a binder name");
            };
            self.expect(Tok::Dot, "`.`")?;
            let body = self.lterm()?;
            return Ok(LambdaTerm::bind(&name, body));
        }
        let mut acc = self.latom()?;
        while matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::LParen)) {
            let arg = self.latom()?;
            acc = LambdaTerm::app(acc, arg);
        }
        Ok(acc)
    }

    fn latom(&mut self) -> Result<LambdaTerm, ParseError> {
        match self.bump() {
            Some(Tok::Ident(name)) => Ok(LambdaTerm::Free(name)),
            Some(Tok::LParen) => {
                let t = self.lterm()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.fail("expected a term")
            }
        }
    }
}

pub fn parse_type(src: &str) -> Result<TypeExpr, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    if !p.done() {
        return p.fail("trailing input after type");
    }
    Ok(t)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    if !p.done() {
        return p.fail("trailing input after term");
    }
    Ok(t)
}

pub fn parse_lambda(src: &str) -> Result<LambdaTerm, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.lterm()?;
    if !p.done() {
        return p.fail("trailing input after term");
    }
    Ok(t)
}

/// Parses a basis of the shape `x:T, y:S`; empty input or `-` gives the
/// empty basis.
pub fn parse_basis(src: &str) -> Result<Vec<(String, TypeExpr)>, ParseError> {
    let trimmed = src.trim();
    if trimmed.is_empty() || trimmed == "-" {
        return Ok(Vec::new());
    }
    let mut p = Parser::new(trimmed)?;
    let mut out = Vec::new();
    loop {
        let Some(Tok::Ident(name)) = p.bump() else {
            return p.fail("expected a variable name");
        };
        p.expect(Tok::Colon, "`:`")?;
        let ty = p.ty()?;
        out.push((name, ty));
        if p.done() {
            return Ok(out);
        }
        p.expect(Tok::Comma, "`,` between bindings")?;
    }
}

// ---- printing ----

fn type_prec(t: &TypeExpr) -> u8 {
    match t {
        TypeExpr::Arrow(..) => 0,
        TypeExpr::Inter(..) => 1,
        TypeExpr::Atom(_) | TypeExpr::Omega => 2,
    }
}

fn fmt_type(t: &TypeExpr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let wrap = type_prec(t) < min;
    if wrap {
        f.write_str("(")?;
    }
    match t {
        TypeExpr::Atom(a) => f.write_str(a)?,
        TypeExpr::Omega => f.write_str("omega")?,
        TypeExpr::Arrow(l, r) => {
            fmt_type(l, 1, f)?;
            f.write_str(" -> ")?;
            fmt_type(r, 0, f)?;
        }
        TypeExpr::Inter(l, r) => {
            fmt_type(l, 2, f)?;
            f.write_str(" & ")?;
            fmt_type(r, 1, f)?;
        }
    }
    if wrap {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_type(self, 0, f)
    }
}

fn pick_name(hint: &str, avoid: &BTreeSet<String>) -> String {
    let base = if hint.is_empty() { "x" } else { hint };
    if !avoid.contains(base) {
        return base.to_owned();
    }
    let mut n = 1usize;
    loop {
        let cand = format!("{base}{n}");
        if !avoid.contains(&cand) {
            return cand;
        }
        n += 1;
    }
}

// precedence levels: 0 lambda, 1 application, 2 projection, 3 coercion, 4 atom
fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Abs(..) => 0,
        Term::App(..) => 1,
        Term::Proj(..) => 2,
        Term::Coerce(..) => 3,
        Term::Free(_) | Term::Bound(_) | Term::UConst(_) | Term::Pair(..) => 4,
    }
}

struct TermPrinter {
    avoid: BTreeSet<String>,
    scope: Vec<String>,
}

impl TermPrinter {
    fn print(&mut self, t: &Term, min: u8, out: &mut String) {
        let wrap = term_prec(t) < min;
        if wrap {
            out.push('(');
        }
        match t {
            Term::Free(x) => out.push_str(x),
            Term::Bound(i) => {
                // indices count binders inward; scope is outermost-first
                let idx = self.scope.len().checked_sub(i + 1);
                match idx.and_then(|k| self.scope.get(k)) {
                    Some(name) => out.push_str(name),
                    None => out.push_str(&format!("#{i}")),
                }
            }
            Term::UConst(ix) => {
                out.push_str("u[");
                self.print(ix, 0, out);
                out.push(']');
            }
            Term::Abs(hint, annot, body) => {
                let mut avoid = self.avoid.clone();
                avoid.extend(self.scope.iter().cloned());
                let name = pick_name(hint, &avoid);
                out.push('\\');
                out.push_str(&name);
                out.push(':');
                out.push_str(&annot.to_string());
                out.push_str(". ");
                self.scope.push(name);
                self.print(body, 0, out);
                self.scope.pop();
            }
            Term::App(fun, arg) => {
                self.print(fun, 1, out);
                out.push(' ');
                self.print(arg, 2, out);
            }
            Term::Pair(l, r) => {
                out.push('<');
                self.print(l, 0, out);
                out.push_str(", ");
                self.print(r, 0, out);
                out.push('>');
            }
            Term::Proj(p, body) => {
                out.push_str(match p {
                    Proj::Fst => "pr1 ",
                    Proj::Snd => "pr2 ",
                });
                self.print(body, 2, out);
            }
            Term::Coerce(body, target) => {
                self.print(body, 3, out);
                out.push_str(" ^ ");
                let bare = matches!(target, TypeExpr::Atom(_) | TypeExpr::Omega);
                if bare {
                    out.push_str(&target.to_string());
                } else {
                    out.push('(');
                    out.push_str(&target.to_string());
                    out.push(')');
                }
            }
        }
        if wrap {
            out.push(')');
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut printer = TermPrinter {
            avoid: crate::term::free_vars(self),
            scope: Vec::new(),
        };
        let mut out = String::new();
        printer.print(self, 0, &mut out);
        f.write_str(&out)
    }
}

fn lambda_prec(t: &LambdaTerm) -> u8 {
    match t {
        LambdaTerm::Abs(..) => 0,
        LambdaTerm::App(..) => 1,
        LambdaTerm::Free(_) | LambdaTerm::Bound(_) => 2,
    }
}

struct LambdaPrinter {
    avoid: BTreeSet<String>,
    scope: Vec<String>,
}

impl LambdaPrinter {
    fn print(&mut self, t: &LambdaTerm, min: u8, out: &mut String) {
        let wrap = lambda_prec(t) < min;
        if wrap {
            out.push('(');
        }
        match t {
            LambdaTerm::Free(x) => out.push_str(x),
            LambdaTerm::Bound(i) => {
                let idx = self.scope.len().checked_sub(i + 1);
                match idx.and_then(|k| self.scope.get(k)) {
                    Some(name) => out.push_str(name),
                    None => out.push_str(&format!("#{i}")),
                }
            }
            LambdaTerm::Abs(hint, body) => {
                let mut avoid = self.avoid.clone();
                avoid.extend(self.scope.iter().cloned());
                let name = pick_name(hint, &avoid);
                out.push('\\');
                out.push_str(&name);
                out.push_str(". ");
                self.scope.push(name);
                self.print(body, 0, out);
                self.scope.pop();
            }
            LambdaTerm::App(fun, arg) => {
                self.print(fun, 1, out);
                out.push(' ');
                self.print(arg, 2, out);
            }
        }
        if wrap {
            out.push(')');
        }
    }
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut printer = LambdaPrinter {
            avoid: self.free_vars(),
            scope: Vec::new(),
        };
        let mut out = String::new();
        printer.print(self, 0, &mut out);
        f.write_str(&out)
    }
}
