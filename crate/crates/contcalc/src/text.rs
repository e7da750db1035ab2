//! The term language shared by values, machine files, algebras and
//! coalgebras.
//!
//! ```text
//! term := "unit" | "inl" term | "inr" term | "(" term "," term ")" | "(" term ")"
//!       | "[" term,* "]" | NAT | "nat:" NAT | "fin:" NAT "/" NAT | "atom:" NAME
//!       | "_" | IDENT | IDENT "(" term,* ")"
//! ```
//!
//! Plain values are the terms without variables, wildcards and calls; their
//! syntax is the canonical rendering of [`Value`].

use contcalc_core::Value;

use crate::error::{CliError, Located};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Unit,
    Inl(Box<Term>),
    Inr(Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Table(Vec<Term>),
    Lit(Value),
    Var(String),
    Call(String, Vec<Term>),
    Wild,
}

impl Term {
    /// The value of a closed term.
    pub fn to_value(&self) -> Option<Value> {
        Some(match self {
            Term::Unit => Value::Unit,
            Term::Inl(t) => Value::inl(t.to_value()?),
            Term::Inr(t) => Value::inr(t.to_value()?),
            Term::Pair(a, b) => Value::pair(a.to_value()?, b.to_value()?),
            Term::Table(items) => Value::table(items.iter().map(Term::to_value).collect::<Option<_>>()?),
            Term::Lit(v) => v.clone(),
            Term::Var(_) | Term::Call(..) | Term::Wild => return None,
        })
    }

    /// Replaces every variable by `f(name)`.
    pub fn close(&self, f: &dyn Fn(&str) -> Option<Value>) -> Option<Value> {
        Some(match self {
            Term::Var(x) => f(x)?,
            Term::Inl(t) => Value::inl(t.close(f)?),
            Term::Inr(t) => Value::inr(t.close(f)?),
            Term::Pair(a, b) => Value::pair(a.close(f)?, b.close(f)?),
            Term::Table(items) => Value::table(items.iter().map(|t| t.close(f)).collect::<Option<_>>()?),
            Term::Call(..) | Term::Wild => return None,
            other => other.to_value()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Nat(u64),
    Lit(Value),
    Sym(&'static str),
    End,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Lit(v) => write!(f, "`{v}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn is_name(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

const SYMBOLS: [&str; 12] = ["=>", "->", "(", ")", "[", "]", ",", ":", ";", "=", "/", "."];

/// Splits `src` into tokens with their byte offsets.
pub(crate) fn lex(src: &str) -> Result<Vec<(Tok, usize)>, Located> {
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |at: usize, m: String| Located { offset: at, message: m };
    while i < src.len() {
        let rest = &src[i..];
        let c = rest.chars().next().unwrap_or(' ');
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c.is_ascii_digit() {
            let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            let n = rest[..len].parse().map_err(|_| err(i, format!("number `{}` is too large", &rest[..len])))?;
            toks.push((Tok::Nat(n), i));
            i += len;
            continue;
        }
        if is_name(c) {
            let len = rest.find(|c: char| !is_name(c)).unwrap_or(rest.len());
            let word = &rest[..len];
            if rest[len..].starts_with(':') && matches!(word, "nat" | "fin" | "atom") {
                let start = i;
                i += len + 1;
                let body = &src[i..];
                let blen = body.find(|c: char| !(is_name(c) || c == '/' || c == '-')).unwrap_or(body.len());
                let text = &body[..blen];
                let v = match word {
                    "nat" => text.parse().ok().map(Value::Nat),
                    "fin" => text
                        .split_once('/')
                        .and_then(|(k, n)| Some((k.parse().ok()?, n.parse().ok()?)))
                        .filter(|(k, n)| k < n)
                        .map(|(k, n)| Value::fin(k, n)),
                    _ => (!text.is_empty()).then(|| Value::atom(text)),
                };
                let v = v.ok_or_else(|| err(start, format!("malformed literal `{word}:{text}`")))?;
                toks.push((Tok::Lit(v), start));
                i += blen;
                continue;
            }
            toks.push((Tok::Ident(word.to_string()), i));
            i += len;
            continue;
        }
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                toks.push((Tok::Sym(s), i));
                i += s.len();
            }
            None => return Err(err(i, format!("unexpected character `{c}`"))),
        }
    }
    toks.push((Tok::End, src.len()));
    Ok(toks)
}

/// A token cursor.
pub(crate) struct Cursor {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Cursor {
    pub(crate) fn new(src: &str) -> Result<Self, Located> {
        Ok(Cursor { toks: lex(src)?, at: 0 })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    pub(crate) fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub(crate) fn fail<T>(&self, what: &str) -> Result<T, Located> {
        Err(Located { offset: self.offset(), message: format!("expected {what}, found {}", self.peek()) })
    }

    pub(crate) fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, sym: &str) -> Result<(), Located> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.fail(&format!("`{sym}`"))
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        *self.peek() == Tok::End
    }

    /// A state or machine name: an identifier or a number.
    pub(crate) fn name(&mut self, what: &str) -> Result<String, Located> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            Tok::Nat(n) => {
                self.bump();
                Ok(n.to_string())
            }
            _ => self.fail(what),
        }
    }

    pub(crate) fn term(&mut self) -> Result<Term, Located> {
        let start = self.at;
        match self.bump() {
            Tok::Nat(n) => Ok(Term::Lit(Value::Nat(n))),
            Tok::Lit(v) => Ok(Term::Lit(v)),
            Tok::Ident(w) => match w.as_str() {
                "unit" => Ok(Term::Unit),
                "inl" => Ok(Term::Inl(Box::new(self.term()?))),
                "inr" => Ok(Term::Inr(Box::new(self.term()?))),
                "_" => Ok(Term::Wild),
                _ if self.eat("(") => {
                    let args = self.list(")")?;
                    Ok(Term::Call(w, args))
                }
                _ => Ok(Term::Var(w)),
            },
            Tok::Sym("(") => {
                let a = self.term()?;
                if self.eat(",") {
                    let b = self.term()?;
                    self.expect(")")?;
                    Ok(Term::Pair(Box::new(a), Box::new(b)))
                } else {
                    self.expect(")")?;
                    Ok(a)
                }
            }
            Tok::Sym("[") => Ok(Term::Table(self.list("]")?)),
            _ => {
                self.at = start;
                self.fail("a term")
            }
        }
    }

    fn list(&mut self, close: &str) -> Result<Vec<Term>, Located> {
        let mut items = Vec::new();
        if self.eat(close) {
            return Ok(items);
        }
        loop {
            items.push(self.term()?);
            if self.eat(close) {
                return Ok(items);
            }
            self.expect(",")?;
        }
    }
}

/// Parses a complete term.
pub fn parse_term(src: &str) -> Result<Term, Located> {
    let mut c = Cursor::new(src)?;
    let t = c.term()?;
    if !c.at_end() {
        return c.fail("end of input");
    }
    Ok(t)
}

/// Parses a closed value.
pub fn parse_value(src: &str) -> Result<Value, CliError> {
    let t = parse_term(src).map_err(|e| e.in_text("<value>", src))?;
    t.to_value().ok_or_else(|| CliError::Usage(format!("`{src}` is not a closed value")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_renderings_parse_back() {
        let vals = [
            Value::inr(Value::pair(Value::atom("r"), Value::inl(Value::Unit))),
            Value::fin(2, 3),
            Value::Nat(12),
            Value::table(vec![Value::Unit, Value::inl(Value::inr(Value::Unit))]),
            Value::table(vec![]),
            Value::pair(Value::pair(Value::Unit, Value::Unit), Value::atom("x'1")),
        ];
        for v in vals {
            assert_eq!(parse_value(&v.to_string()).unwrap(), v, "{v}");
        }
    }

    #[test]
    fn bare_numbers_are_naturals() {
        assert_eq!(parse_value("(3 , nat:3)").unwrap(), Value::pair(Value::Nat(3), Value::Nat(3)));
    }

    #[test]
    fn patterns_and_calls() {
        let t = parse_term("inr (_ , succ(n))").unwrap();
        assert_eq!(
            t,
            Term::Inr(Box::new(Term::Pair(
                Box::new(Term::Wild),
                Box::new(Term::Call("succ".into(), vec![Term::Var("n".into())]))
            )))
        );
        assert!(t.to_value().is_none());
    }

    #[test]
    fn errors_have_offsets() {
        let e = parse_term("inr (unit , ").unwrap_err();
        assert_eq!(e.offset, 12);
        assert!(parse_term("fin:3/2").is_err());
        assert!(parse_term("inl unit unit").is_err());
    }
}
