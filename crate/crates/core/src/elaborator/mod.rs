//! The declaration language: parsing, compilation of functor expressions to
//! containers, and the dispatch of `mu`/`nu` declarations to their fixed
//! points.

mod compile;
mod expr;
mod parse;

use alloc::{sync::Arc, vec::Vec};

pub use compile::to_container;
pub use expr::{ConstDomain, Decl, Fixity, FunctorExpr};
pub use parse::{parse_decl, parse_decls, ParseError};

use crate::container::{
    split_last, Container, ExtElement, FElement, FamilyAssignment, IndexSet, Payload, SplitContainer,
};
use crate::m::{nu_container, MachineRegistry};
use crate::value::Value;
use crate::w::{self, Algebra};
use crate::Result;

/// A compiled declaration.
///
/// Fields are public so that callers (and tests) can substitute a
/// hand-built container for any stage.
#[derive(Clone, Debug)]
pub struct Elaboration {
    pub decl: Decl,
    /// Declared parameters followed by the recursion binder.
    pub indices: IndexSet,
    /// The body over `indices`.
    pub body: Container,
    /// The body split at the binder.
    pub signature: SplitContainer,
    /// The fixed-point container over the parameters.
    pub fixed: Container,
}

/// Elaborates with an empty machine registry.
pub fn elaborate(d: &Decl) -> Result<Elaboration> {
    elaborate_with(d, Arc::new(MachineRegistry::new()))
}

/// Elaborates a declaration; `nu` shapes range over the seeds of `registry`.
/// A `mu` declaration with infinitely many recursive positions at some
/// shape is rejected.
pub fn elaborate_with(d: &Decl, registry: Arc<MachineRegistry>) -> Result<Elaboration> {
    let mut names: Vec<&str> = d.params.iter().map(|p| &**p).collect();
    names.push(Decl::BINDER);
    let indices = IndexSet::new(&names)?;
    let body = to_container(&d.body, &indices)?;
    let signature = split_last(&body)?;
    let fixed = match d.fixity {
        Fixity::Mu => w::mu_container(&signature)?,
        Fixity::Nu => nu_container(&signature, registry),
    };
    Ok(Elaboration { decl: d.clone(), indices, body, signature, fixed })
}

impl Elaboration {
    /// Index of the recursion binder in `indices`.
    pub fn rec_index(&self) -> usize {
        self.indices.len() - 1
    }

    /// A term of the body (recursive occurrences holding arbitrary values)
    /// as an element of the split signature.
    pub fn encode(&self, term: &Value) -> Result<FElement<Value>> {
        let mut entries = Vec::new();
        let shape = compile::encode(&self.decl.body, &self.indices, term, &mut entries)?;
        let last = self.rec_index();
        let mut rec: Vec<(Value, Value)> = Vec::new();
        let mut params = Vec::new();
        for (i, p, v) in entries {
            if i == last {
                rec.push((p, v));
            } else {
                params.push(((i, p), v));
            }
        }
        rec.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(FElement { shape, params: Payload::table(params), rec })
    }

    /// The inverse of [`Elaboration::encode`].
    pub fn decode(&self, fe: &FElement<Value>) -> Result<Value> {
        let last = self.rec_index();
        compile::decode(&self.decl.body, &self.indices, &fe.shape, &|i, p| {
            if i == last {
                fe.child(p).cloned()
            } else {
                fe.params.get(i, p)
            }
        })
    }

    /// A nested term of a `mu` declaration as an element of its fixed point.
    pub fn mu_from_term(&self, x: &FamilyAssignment, term: &Value) -> Result<ExtElement> {
        let fe = self.encode(term)?;
        let mut rec = Vec::with_capacity(fe.rec.len());
        for (q, t) in fe.rec {
            rec.push((q, self.mu_from_term(x, &t)?));
        }
        w::into(&self.signature, x, FElement { shape: fe.shape, params: fe.params, rec })
    }

    /// An element of a `mu` fixed point as a nested term, by folding with
    /// [`Elaboration::decode`].
    pub fn mu_to_term(&self, x: &FamilyAssignment, e: &ExtElement) -> Result<Value> {
        let this = self.clone();
        let alg: Algebra<Result<Value>> = Algebra::new(move |fe: FElement<Result<Value>>| {
            let mut rec = Vec::with_capacity(fe.rec.len());
            for (q, r) in fe.rec {
                rec.push((q, r?));
            }
            this.decode(&FElement { shape: fe.shape, params: fe.params, rec })
        });
        w::fold(&self.signature, x, &alg, e)?
    }
}
