//! Functor expressions to containers by the closure combinators:
//!
//! | expression | shapes          | positions at index `j`                       |
//! |------------|-----------------|----------------------------------------------|
//! | `0`        | empty           | none                                         |
//! | `1`        | `unit`          | none                                         |
//! | param `i`  | `unit`          | `unit` if `j = i`                            |
//! | `F + G`    | `inl s`/`inr s` | those of the summand                         |
//! | `F * G`    | `(s , t)`       | `inl p` for `p` of `s`, `inr p` for `p` of `t` |
//! | `[n] -> F` | tables `[s_k]`  | `(fin:k/n , p)` for `p` of `s_k`             |
//!
//! The same recursion gives the translation between set-semantic terms and
//! container elements.

use alloc::{format, string::ToString, sync::Arc, vec::Vec};

use super::expr::FunctorExpr;
use crate::container::{Container, IndexSet, PosFn};
use crate::domain::Domain;
use crate::error::Error;
use crate::value::Value;
use crate::Result;

fn compile(e: &FunctorExpr, indices: &IndexSet) -> Result<(Domain, PosFn)> {
    let none: PosFn = Arc::new(|_, _| Domain::Empty);
    let at = |i: usize| -> PosFn { Arc::new(move |j, _| if j == i { Domain::Unit } else { Domain::Empty }) };
    Ok(match e {
        FunctorExpr::Zero => (Domain::Empty, none),
        FunctorExpr::One => (Domain::Unit, none),
        FunctorExpr::Const(c) => (c.domain(), none),
        FunctorExpr::Param(name) => {
            let i = indices.position(name).ok_or_else(|| Error::UnboundName(name.to_string()))?;
            (Domain::Unit, at(i))
        }
        FunctorExpr::Rec => {
            let i = indices.len().checked_sub(1).ok_or(Error::NoIndices)?;
            (Domain::Unit, at(i))
        }
        FunctorExpr::Sum(a, b) => {
            let (sa, pa) = compile(a, indices)?;
            let (sb, pb) = compile(b, indices)?;
            let pos: PosFn = Arc::new(move |j, s| match s {
                Value::Inl(x) => pa(j, x),
                Value::Inr(y) => pb(j, y),
                _ => Domain::Empty,
            });
            (Domain::sum(sa, sb), pos)
        }
        FunctorExpr::Prod(a, b) => {
            let (sa, pa) = compile(a, indices)?;
            let (sb, pb) = compile(b, indices)?;
            let pos: PosFn = Arc::new(move |j, s| match s {
                Value::Pair(x, y) => Domain::sum(pa(j, x), pb(j, y)),
                _ => Domain::Empty,
            });
            (Domain::prod(sa, sb), pos)
        }
        FunctorExpr::Exp(n, body) => {
            let (sb, pb) = compile(body, indices)?;
            let n = *n;
            let pos: PosFn = Arc::new(move |j, s| match s {
                Value::Table(items) if items.len() as u64 == n => {
                    Domain::Tagged(items.iter().enumerate().map(|(k, v)| (Value::fin(k as u64, n), pb(j, v))).collect())
                }
                _ => Domain::Empty,
            });
            (Domain::table(Domain::Fin(n), sb), pos)
        }
    })
}

/// The container of `e` over `indices`; the recursive variable is the last
/// index.
pub fn to_container(e: &FunctorExpr, indices: &IndexSet) -> Result<Container> {
    let (shapes, pos) = compile(e, indices)?;
    Ok(Container::new(indices.clone(), shapes, pos))
}

/// Data found at one position while encoding a term.
pub(crate) type Entry = (usize, Value, Value);

/// Splits a set-semantic term of `e` into its shape and the data at each
/// position. Recursive occurrences land on the last index.
pub(crate) fn encode(e: &FunctorExpr, indices: &IndexSet, term: &Value, out: &mut Vec<Entry>) -> Result<Value> {
    let mismatch = || Error::TermMismatch { term: term.clone(), expected: e.to_string() };
    match e {
        FunctorExpr::Zero => Err(mismatch()),
        FunctorExpr::One => match term {
            Value::Unit => Ok(Value::Unit),
            _ => Err(mismatch()),
        },
        FunctorExpr::Const(c) => {
            if c.domain().contains(term) {
                Ok(term.clone())
            } else {
                Err(mismatch())
            }
        }
        FunctorExpr::Param(name) => {
            let i = indices.position(name).ok_or_else(|| Error::UnboundName(name.to_string()))?;
            out.push((i, Value::Unit, term.clone()));
            Ok(Value::Unit)
        }
        FunctorExpr::Rec => {
            out.push((indices.len() - 1, Value::Unit, term.clone()));
            Ok(Value::Unit)
        }
        FunctorExpr::Sum(a, b) => match term {
            Value::Inl(t) => Ok(Value::inl(encode(a, indices, t, out)?)),
            Value::Inr(t) => Ok(Value::inr(encode(b, indices, t, out)?)),
            _ => Err(mismatch()),
        },
        FunctorExpr::Prod(a, b) => match term {
            Value::Pair(x, y) => {
                let mut left = Vec::new();
                let sa = encode(a, indices, x, &mut left)?;
                out.extend(left.into_iter().map(|(i, p, v)| (i, Value::inl(p), v)));
                let mut right = Vec::new();
                let sb = encode(b, indices, y, &mut right)?;
                out.extend(right.into_iter().map(|(i, p, v)| (i, Value::inr(p), v)));
                Ok(Value::pair(sa, sb))
            }
            _ => Err(mismatch()),
        },
        FunctorExpr::Exp(n, body) => match term {
            Value::Table(items) if items.len() as u64 == *n => {
                let mut shapes = Vec::with_capacity(items.len());
                for (k, t) in items.iter().enumerate() {
                    let mut sub = Vec::new();
                    shapes.push(encode(body, indices, t, &mut sub)?);
                    let tag = Value::fin(k as u64, *n);
                    out.extend(sub.into_iter().map(|(i, p, v)| (i, Value::pair(tag.clone(), p), v)));
                }
                Ok(Value::table(shapes))
            }
            _ => Err(mismatch()),
        },
    }
}

/// Rebuilds a term from a shape and a position lookup; the inverse of
/// [`encode`].
pub(crate) fn decode(
    e: &FunctorExpr,
    indices: &IndexSet,
    shape: &Value,
    lookup: &dyn Fn(usize, &Value) -> Option<Value>,
) -> Result<Value> {
    let mismatch = || Error::TermMismatch { term: shape.clone(), expected: format!("a shape of {e}") };
    let missing = |i: usize| Error::MissingPosition { index: i, position: Value::Unit };
    match (e, shape) {
        (FunctorExpr::One, Value::Unit) => Ok(Value::Unit),
        (FunctorExpr::Const(c), s) if c.domain().contains(s) => Ok(s.clone()),
        (FunctorExpr::Param(name), Value::Unit) => {
            let i = indices.position(name).ok_or_else(|| Error::UnboundName(name.to_string()))?;
            lookup(i, &Value::Unit).ok_or_else(|| missing(i))
        }
        (FunctorExpr::Rec, Value::Unit) => {
            let i = indices.len() - 1;
            lookup(i, &Value::Unit).ok_or_else(|| missing(i))
        }
        (FunctorExpr::Sum(a, _), Value::Inl(s)) => Ok(Value::inl(decode(a, indices, s, lookup)?)),
        (FunctorExpr::Sum(_, b), Value::Inr(s)) => Ok(Value::inr(decode(b, indices, s, lookup)?)),
        (FunctorExpr::Prod(a, b), Value::Pair(x, y)) => {
            let l = decode(a, indices, x, &|i, p| lookup(i, &Value::inl(p.clone())))?;
            let r = decode(b, indices, y, &|i, p| lookup(i, &Value::inr(p.clone())))?;
            Ok(Value::pair(l, r))
        }
        (FunctorExpr::Exp(n, body), Value::Table(items)) if items.len() as u64 == *n => {
            let mut out = Vec::with_capacity(items.len());
            for (k, s) in items.iter().enumerate() {
                let tag = Value::fin(k as u64, *n);
                out.push(decode(body, indices, s, &|i, p| lookup(i, &Value::pair(tag.clone(), p.clone())))?);
            }
            Ok(Value::table(out))
        }
        _ => Err(mismatch()),
    }
}
