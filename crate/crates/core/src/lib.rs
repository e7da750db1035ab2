//! Executable container calculus.
//!
//! A container `S ◁ P` is a domain of shapes together with, for every index
//! and shape, a domain of positions. This crate builds the functor extension
//! of containers, their least fixed points (finite W-trees whose positions
//! are finite paths) and greatest fixed points (regular M-trees presented by
//! finite coalgebra machines), the universal `fold` and `unfold` maps, and
//! bisimulation checks on machines.
//!
//! Everything is computed over a closed universe of first-order [`Value`]s,
//! so equality is decidable and every infinite domain is explored under an
//! explicit [`Budget`].
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bisim;
pub mod container;
pub mod domain;
pub mod elaborator;
mod error;
pub mod iso;
pub mod m;
pub mod oracle;
pub mod value;
pub mod w;

pub use bisim::{bisim_bounded, bisim_exact, BoundedBisim, ExactBisim, Witness};
pub use container::{
    ext_contains, ext_enumerate, ext_equal, extend_mor, split_last, Container, ExtElement, ExtEquality, FElement,
    FamilyAssignment, FamilyMorphism, IndexSet, Payload, SplitContainer,
};
pub use domain::{Budget, Domain, Enumeration};
pub use error::Error;
pub use m::{Coalgebra, CoalgebraMachine, MSeed, MachineRegistry, MachineRow};
pub use value::{PosPath, Value};
pub use w::{Algebra, WTree};

pub type Result<T, E = Error> = core::result::Result<T, E>;
