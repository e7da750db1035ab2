//! Brute-force set semantics of functor expressions, used as ground truth.
//!
//! Nothing here goes through containers: terms are built directly from the
//! expression, parameter values are listed from the assignment's domains by
//! a local enumerator, and fixed points are approximated by iterating the
//! functor on explicit finite sets.

use alloc::{boxed::Box, sync::Arc, vec::Vec};
use core::fmt;

use crate::container::FamilyAssignment;
use crate::domain::Domain;
use crate::elaborator::{ConstDomain, FunctorExpr};
use crate::value::Value;

/// A set-semantic term of a functor expression.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SemValue {
    Unit,
    Inl(Box<SemValue>),
    Inr(Box<SemValue>),
    Pair(Box<SemValue>, Box<SemValue>),
    /// A parameter or constant value.
    Leaf(Value),
    /// A recursive occurrence.
    Rec(Box<SemValue>),
    Table(Vec<SemValue>),
    /// Truncation marker for unrollings.
    Cut,
}

impl SemValue {
    /// The term as a [`Value`]: recursive occurrences are inlined and
    /// `Cut` becomes `atom:cut`.
    pub fn to_value(&self) -> Value {
        match self {
            SemValue::Unit => Value::Unit,
            SemValue::Inl(v) => Value::inl(v.to_value()),
            SemValue::Inr(v) => Value::inr(v.to_value()),
            SemValue::Pair(a, b) => Value::pair(a.to_value(), b.to_value()),
            SemValue::Leaf(v) => v.clone(),
            SemValue::Rec(v) => v.to_value(),
            SemValue::Table(items) => Value::table(items.iter().map(SemValue::to_value).collect()),
            SemValue::Cut => Value::atom("cut"),
        }
    }

    /// Constructor height: leaves and units count 0, each recursive
    /// occurrence adds one level.
    pub fn rec_height(&self) -> usize {
        match self {
            SemValue::Inl(v) | SemValue::Inr(v) => v.rec_height(),
            SemValue::Pair(a, b) => a.rec_height().max(b.rec_height()),
            SemValue::Rec(v) => 1 + v.rec_height(),
            SemValue::Table(items) => items.iter().map(SemValue::rec_height).max().unwrap_or(0),
            _ => 0,
        }
    }
}

impl fmt::Display for SemValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_value())
    }
}

/// Some domain of the input is infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotFinite;

impl fmt::Display for NotFinite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("the oracle needs finite domains")
    }
}

/// Parameter names with their finite value lists.
#[derive(Clone, Debug)]
pub struct Env {
    params: Vec<(Arc<str>, Vec<Value>)>,
}

impl Env {
    /// Pairs `names` with the leading domains of `x`.
    pub fn new(names: &[Arc<str>], x: &FamilyAssignment) -> Result<Env, NotFinite> {
        let mut params = Vec::with_capacity(names.len());
        for (j, n) in names.iter().enumerate() {
            let d = x.assign.get(j).ok_or(NotFinite)?;
            params.push((n.clone(), list(d)?));
        }
        Ok(Env { params })
    }

    /// Every parameter ranges over `unit` alone.
    pub fn unit(names: &[Arc<str>]) -> Env {
        Env { params: names.iter().map(|n| (n.clone(), alloc::vec![Value::Unit])).collect() }
    }

    fn lookup(&self, name: &str) -> &[Value] {
        self.params.iter().find(|(n, _)| &**n == name).map_or(&[], |(_, v)| v)
    }
}

/// Lists a finite first-order domain.
fn list(d: &Domain) -> Result<Vec<Value>, NotFinite> {
    Ok(match d {
        Domain::Empty => Vec::new(),
        Domain::Unit => alloc::vec![Value::Unit],
        Domain::Fin(n) => (0..*n).map(|k| Value::Fin { k, n: *n }).collect(),
        Domain::Atoms(names) => names.iter().map(|n| Value::Atom(n.clone())).collect(),
        Domain::Sum(a, b) => {
            let mut out: Vec<Value> = list(a)?.into_iter().map(|v| Value::Inl(Arc::new(v))).collect();
            out.extend(list(b)?.into_iter().map(|v| Value::Inr(Arc::new(v))));
            out
        }
        Domain::Prod(a, b) => {
            let (la, lb) = (list(a)?, list(b)?);
            let mut out = Vec::with_capacity(la.len() * lb.len());
            for x in &la {
                for y in &lb {
                    out.push(Value::Pair(Arc::new(x.clone()), Arc::new(y.clone())));
                }
            }
            out
        }
        _ => return Err(NotFinite),
    })
}

fn const_values(c: &ConstDomain) -> Result<Vec<SemValue>, NotFinite> {
    match c {
        ConstDomain::Fin(n) => Ok((0..*n).map(|k| SemValue::Leaf(Value::Fin { k, n: *n })).collect()),
        ConstDomain::Atoms(names) => Ok(names.iter().map(|n| SemValue::Leaf(Value::Atom(n.clone()))).collect()),
        ConstDomain::Nat => Err(NotFinite),
    }
}

/// All terms of `F(X, rec_set)`, in a fixed order.
pub fn semantic_enumerate(e: &FunctorExpr, env: &Env, rec_set: &[SemValue]) -> Result<Vec<SemValue>, NotFinite> {
    Ok(match e {
        FunctorExpr::Zero => Vec::new(),
        FunctorExpr::One => alloc::vec![SemValue::Unit],
        FunctorExpr::Param(name) => env.lookup(name).iter().cloned().map(SemValue::Leaf).collect(),
        FunctorExpr::Rec => rec_set.iter().cloned().map(|v| SemValue::Rec(Box::new(v))).collect(),
        FunctorExpr::Const(c) => const_values(c)?,
        FunctorExpr::Sum(a, b) => {
            let mut out: Vec<SemValue> =
                semantic_enumerate(a, env, rec_set)?.into_iter().map(|v| SemValue::Inl(Box::new(v))).collect();
            out.extend(semantic_enumerate(b, env, rec_set)?.into_iter().map(|v| SemValue::Inr(Box::new(v))));
            out
        }
        FunctorExpr::Prod(a, b) => {
            let la = semantic_enumerate(a, env, rec_set)?;
            let lb = semantic_enumerate(b, env, rec_set)?;
            let mut out = Vec::with_capacity(la.len() * lb.len());
            for x in &la {
                for y in &lb {
                    out.push(SemValue::Pair(Box::new(x.clone()), Box::new(y.clone())));
                }
            }
            out
        }
        FunctorExpr::Exp(n, body) => {
            let choices = semantic_enumerate(body, env, rec_set)?;
            let mut rows: Vec<Vec<SemValue>> = alloc::vec![Vec::new()];
            for _ in 0..*n {
                let mut next = Vec::with_capacity(rows.len() * choices.len());
                for r in &rows {
                    for c in &choices {
                        let mut r = r.clone();
                        r.push(c.clone());
                        next.push(r);
                    }
                }
                rows = next;
            }
            rows.into_iter().map(SemValue::Table).collect()
        }
    })
}

/// `F^h(∅)`: the terms of the least fixed point with at most `h` levels.
pub fn mu_iterate(e: &FunctorExpr, env: &Env, h: usize) -> Result<Vec<SemValue>, NotFinite> {
    let mut set = Vec::new();
    for _ in 0..h {
        set = semantic_enumerate(e, env, &set)?;
    }
    Ok(set)
}

/// Depth-`k` unrollings: `F^k({Cut})`. Each element is one behaviour class
/// of the greatest fixed point observed to depth `k`.
pub fn nu_truncate(e: &FunctorExpr, env: &Env, k: usize) -> Result<Vec<SemValue>, NotFinite> {
    let mut set = alloc::vec![SemValue::Cut];
    for _ in 0..k {
        set = semantic_enumerate(e, env, &set)?;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elaborator::parse_decl;

    fn body(src: &str) -> (FunctorExpr, Vec<Arc<str>>) {
        let d = parse_decl(src).unwrap();
        (d.body, d.params)
    }

    fn atoms(names: &[Arc<str>], n: usize) -> Env {
        let a: Vec<Value> = (0..n).map(|k| Value::atom(&alloc::format!("a{k}"))).collect();
        Env { params: names.iter().map(|p| (p.clone(), a.clone())).collect() }
    }

    #[test]
    fn list_body_on_three_recursive_values() {
        let (e, ps) = body("mu List(A) = 1 + A * rec");
        let rec = alloc::vec![SemValue::Cut, SemValue::Unit, SemValue::Leaf(Value::Nat(0))];
        assert_eq!(semantic_enumerate(&e, &atoms(&ps, 2), &rec).unwrap().len(), 7);
    }

    #[test]
    fn zero_and_one() {
        let env = Env::unit(&[]);
        assert!(semantic_enumerate(&FunctorExpr::Zero, &env, &[]).unwrap().is_empty());
        assert_eq!(semantic_enumerate(&FunctorExpr::One, &env, &[]).unwrap().len(), 1);
    }

    #[test]
    fn mu_iteration_counts() {
        let (e, ps) = body("mu List(A) = 1 + A * rec");
        assert_eq!(mu_iterate(&e, &atoms(&ps, 2), 4).unwrap().len(), 15);
        let (n, _) = body("mu Nat() = 1 + rec");
        let env = Env::unit(&[]);
        assert_eq!(mu_iterate(&n, &env, 3).unwrap().len(), 3);
        assert!(mu_iterate(&n, &env, 0).unwrap().is_empty());
    }

    #[test]
    fn nu_truncation_counts() {
        let (e, _) = body("nu CoNat() = 1 + rec");
        let env = Env::unit(&[]);
        assert_eq!(nu_truncate(&e, &env, 0).unwrap().len(), 1);
        assert_eq!(nu_truncate(&e, &env, 1).unwrap().len(), 2);
        assert_eq!(nu_truncate(&e, &env, 3).unwrap().len(), 4);
    }

    #[test]
    fn infinite_parameters_are_refused() {
        let x = FamilyAssignment::new(alloc::vec![Domain::Nat]);
        assert_eq!(Env::new(&[Arc::from("A")], &x).unwrap_err(), NotFinite);
    }
}
