use alloc::{boxed::Box, sync::Arc, vec::Vec};
use core::fmt;

use crate::domain::Domain;

/// A constant factor with a fixed domain. There is no surface syntax for
/// constants; they are built programmatically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstDomain {
    Fin(u64),
    Nat,
    Atoms(Vec<Arc<str>>),
}

impl ConstDomain {
    pub fn domain(&self) -> Domain {
        match self {
            ConstDomain::Fin(n) => Domain::Fin(*n),
            ConstDomain::Nat => Domain::Nat,
            ConstDomain::Atoms(names) => Domain::atoms(names),
        }
    }
}

/// Strictly positive functor expressions in the parameters and one
/// recursive variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorExpr {
    Zero,
    One,
    Param(Arc<str>),
    Rec,
    Sum(Box<FunctorExpr>, Box<FunctorExpr>),
    Prod(Box<FunctorExpr>, Box<FunctorExpr>),
    Const(ConstDomain),
    /// `[n] -> F`: `n`-fold product of `F`.
    Exp(u64, Box<FunctorExpr>),
}

impl FunctorExpr {
    pub fn param(name: &str) -> Self {
        FunctorExpr::Param(Arc::from(name))
    }

    pub fn sum(a: FunctorExpr, b: FunctorExpr) -> Self {
        FunctorExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn prod(a: FunctorExpr, b: FunctorExpr) -> Self {
        FunctorExpr::Prod(Box::new(a), Box::new(b))
    }

    pub fn exp(n: u64, body: FunctorExpr) -> Self {
        FunctorExpr::Exp(n, Box::new(body))
    }

    pub fn mentions_rec(&self) -> bool {
        match self {
            FunctorExpr::Rec => true,
            FunctorExpr::Sum(a, b) | FunctorExpr::Prod(a, b) => a.mentions_rec() || b.mentions_rec(),
            FunctorExpr::Exp(_, b) => b.mentions_rec(),
            _ => false,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: expr, 1: term, 2: factor
        match self {
            FunctorExpr::Zero => f.write_str("0"),
            FunctorExpr::One => f.write_str("1"),
            FunctorExpr::Param(name) => f.write_str(name),
            FunctorExpr::Rec => f.write_str("rec"),
            FunctorExpr::Const(c) => match c {
                ConstDomain::Fin(n) => write!(f, "<fin {n}>"),
                ConstDomain::Nat => f.write_str("<nat>"),
                ConstDomain::Atoms(names) => {
                    f.write_str("<atoms")?;
                    for n in names {
                        write!(f, " {n}")?;
                    }
                    f.write_str(">")
                }
            },
            FunctorExpr::Exp(n, body) => {
                write!(f, "[{n}] -> ")?;
                body.fmt_prec(f, 2)
            }
            FunctorExpr::Sum(a, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 0)?;
                f.write_str(" + ")?;
                b.fmt_prec(f, 1)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            FunctorExpr::Prod(a, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" * ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Renders in the declaration syntax with the fewest parentheses.
impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixity {
    Mu,
    Nu,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub fixity: Fixity,
    pub name: Arc<str>,
    pub params: Vec<Arc<str>>,
    pub body: FunctorExpr,
}

impl Decl {
    /// Name of the recursion binder.
    pub const BINDER: &'static str = "rec";
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kw = match self.fixity {
            Fixity::Mu => "mu",
            Fixity::Nu => "nu",
        };
        write!(f, "{kw} {}(", self.name)?;
        for (j, p) in self.params.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            f.write_str(p)?;
        }
        write!(f, ") = {}", self.body)
    }
}
