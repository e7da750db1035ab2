//! Recursive-descent parser for the declaration language:
//!
//! ```text
//! decl   := ("mu" | "nu") IDENT "(" IDENT,* ")" "=" expr
//! expr   := term ("+" term)*
//! term   := factor ("*" factor)*
//! factor := "0" | "1" | IDENT | "rec" | "(" expr ")" | "[" NAT "]" "->" factor
//! ```

use alloc::{
    format,
    string::{String, ToString},
    sync::Arc,
    vec::Vec,
};
use core::fmt;

use super::expr::{Decl, Fixity, FunctorExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    Sym(&'static str),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    at: usize,
    params: Vec<Arc<str>>,
}

fn error_at(src: &str, offset: usize, message: String) -> ParseError {
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    ParseError { offset, line, col, message }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut toks = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            toks.push((Tok::Ident(src[start..i].to_string()), start));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i]
                .parse()
                .map_err(|_| error_at(src, start, format!("number `{}` is too large", &src[start..i])))?;
            toks.push((Tok::Nat(n), start));
        } else if src[i..].starts_with("->") {
            toks.push((Tok::Sym("->"), i));
            i += 2;
        } else {
            let sym = match c {
                b'(' => "(",
                b')' => ")",
                b'[' => "[",
                b']' => "]",
                b',' => ",",
                b'=' => "=",
                b'+' => "+",
                b'*' => "*",
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    return Err(error_at(src, i, format!("unexpected character `{ch}`")));
                }
            };
            toks.push((Tok::Sym(sym), i));
            i += 1;
        }
    }
    toks.push((Tok::End, src.len()));
    Ok(toks)
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, message: String) -> Result<T, ParseError> {
        Err(error_at(self.src, self.offset(), message))
    }

    fn expected<T>(&self, what: &str) -> Result<T, ParseError> {
        self.fail(format!("expected {what}, found {}", self.peek()))
    }

    fn expect(&mut self, sym: &'static str) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(sym) {
            self.bump();
            Ok(())
        } else {
            self.expected(&format!("`{sym}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.expected(what),
        }
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let fixity = match self.peek() {
            Tok::Ident(s) if s == "mu" => Fixity::Mu,
            Tok::Ident(s) if s == "nu" => Fixity::Nu,
            _ => return self.expected("`mu` or `nu`"),
        };
        self.bump();
        let name = self.ident("a declaration name")?;
        self.expect("(")?;
        if *self.peek() != Tok::Sym(")") {
            loop {
                let at = self.offset();
                let p = self.ident("a parameter name")?;
                if self.params.iter().any(|q| **q == *p) {
                    return Err(error_at(self.src, at, format!("parameter `{p}` is declared twice")));
                }
                self.params.push(Arc::from(p.as_str()));
                if *self.peek() == Tok::Sym(",") {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(")")?;
        self.expect("=")?;
        let body = self.expr()?;
        if *self.peek() != Tok::End {
            return self.expected("`+`, `*` or end of input");
        }
        Ok(Decl { fixity, name: Arc::from(name.as_str()), params: self.params.clone(), body })
    }

    fn expr(&mut self) -> Result<FunctorExpr, ParseError> {
        let mut e = self.term()?;
        while *self.peek() == Tok::Sym("+") {
            self.bump();
            e = FunctorExpr::sum(e, self.term()?);
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<FunctorExpr, ParseError> {
        let mut e = self.factor()?;
        while *self.peek() == Tok::Sym("*") {
            self.bump();
            e = FunctorExpr::prod(e, self.factor()?);
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<FunctorExpr, ParseError> {
        match self.peek().clone() {
            Tok::Nat(0) => {
                self.bump();
                Ok(FunctorExpr::Zero)
            }
            Tok::Nat(1) => {
                self.bump();
                Ok(FunctorExpr::One)
            }
            Tok::Nat(n) => {
                self.fail(format!("only `0` and `1` are constants, found `{n}`; write `[{n}] -> F` for a power"))
            }
            Tok::Ident(s) if s == "rec" => {
                self.bump();
                Ok(FunctorExpr::Rec)
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                if !self.params.iter().any(|p| **p == *s) {
                    return self.fail(format!("unbound identifier `{s}`"));
                }
                self.bump();
                Ok(FunctorExpr::param(&s))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Sym("[") => {
                self.bump();
                let n = match self.peek() {
                    Tok::Nat(n) => *n,
                    _ => return self.expected("a natural number"),
                };
                self.bump();
                self.expect("]")?;
                self.expect("->")?;
                Ok(FunctorExpr::exp(n, self.factor()?))
            }
            _ => self.expected("a functor expression"),
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "mu" | "nu" | "rec")
}

/// Parses a single declaration.
pub fn parse_decl(text: &str) -> Result<Decl, ParseError> {
    let toks = lex(text)?;
    Parser { src: text, toks, at: 0, params: Vec::new() }.decl()
}

/// Parses a declaration file: one declaration per line, `#` starts a
/// comment, blank lines are ignored. Errors carry file positions.
pub fn parse_decls(text: &str) -> Result<Vec<Decl>, ParseError> {
    let mut out = Vec::new();
    let mut base = 0;
    for (n, line) in text.split('\n').enumerate() {
        let code = line.split('#').next().unwrap_or("");
        if !code.trim().is_empty() {
            let d = parse_decl(code).map_err(|e| ParseError { offset: base + e.offset, line: n + 1, ..e })?;
            if out.iter().any(|o: &Decl| o.name == d.name) {
                let col = code.find(&*d.name).unwrap_or(0);
                return Err(error_at(text, base + col, format!("declaration `{}` is defined twice", d.name)));
            }
            out.push(d);
        }
        base += line.len() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn list_declaration() {
        let d = parse_decl("mu List(A) = 1 + A * rec").unwrap();
        assert_eq!(d.fixity, Fixity::Mu);
        assert_eq!(
            d.body,
            FunctorExpr::sum(FunctorExpr::One, FunctorExpr::prod(FunctorExpr::param("A"), FunctorExpr::Rec))
        );
    }

    #[test]
    fn conat_declaration() {
        let d = parse_decl("nu CoNat() = 1 + rec").unwrap();
        assert_eq!(d.fixity, Fixity::Nu);
        assert!(d.params.is_empty());
        assert_eq!(d.body, FunctorExpr::sum(FunctorExpr::One, FunctorExpr::Rec));
    }

    #[test]
    fn dangling_plus_fails_at_end() {
        let e = parse_decl("mu T(A) = rec +").unwrap_err();
        assert_eq!(e.offset, 15);
        assert!(e.message.contains("end of input"), "{e}");
    }

    #[test]
    fn unbound_identifier_is_reported() {
        let e = parse_decl("mu T(A) = B").unwrap_err();
        assert_eq!((e.line, e.col), (1, 11));
        assert!(e.message.contains("unbound"));
    }

    #[test]
    fn precedence_and_associativity() {
        let d = parse_decl("mu T(A, B) = A + B * A * rec + 1").unwrap();
        let a = || FunctorExpr::param("A");
        let b = || FunctorExpr::param("B");
        let expected = FunctorExpr::sum(
            FunctorExpr::sum(a(), FunctorExpr::prod(FunctorExpr::prod(b(), a()), FunctorExpr::Rec)),
            FunctorExpr::One,
        );
        assert_eq!(d.body, expected);
        assert_eq!(d.to_string(), "mu T(A, B) = A + B * A * rec + 1");
    }

    #[test]
    fn exponent_binds_a_factor() {
        let d = parse_decl("mu Rose(A) = A * [2] -> rec * 1").unwrap();
        let expected = FunctorExpr::prod(
            FunctorExpr::prod(FunctorExpr::param("A"), FunctorExpr::exp(2, FunctorExpr::Rec)),
            FunctorExpr::One,
        );
        assert_eq!(d.body, expected);
        let d = parse_decl("mu T() = [3] -> (1 + rec)").unwrap();
        assert_eq!(d.to_string(), "mu T() = [3] -> (1 + rec)");
    }

    #[test]
    fn file_errors_carry_lines() {
        let text = "# lists\nmu List(A) = 1 + A * rec\n\nnu S(A) = A * (rec\n";
        let e = parse_decls(text).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("`)`"));
        let ok = parse_decls("mu N() = 1 + rec # naturals\nnu C() = 1 + rec\n").unwrap();
        assert_eq!(ok.len(), 2);
    }

    #[test]
    fn duplicate_parameters_rejected() {
        assert!(parse_decl("mu T(A, A) = A").is_err());
        assert!(parse_decl("mu T(rec) = 1").is_err());
    }
}
