//! The universal term representation.
//!
//! Shapes, positions, payload data, W-trees, machine seeds and position paths
//! are all [`Value`]s. The derived order is the canonical structural order
//! used for sorting; it is *not* the semantic equality for seeds, which is
//! bisimilarity (see [`Value::semantic_eq`]).
//!
//! Canonical rendering:
//!
//! | value            | text                                   |
//! |------------------|----------------------------------------|
//! | unit             | `unit`                                 |
//! | injections       | `inl v`, `inr v`                       |
//! | pairs            | `(v , w)`                              |
//! | naturals         | `nat:k`                                |
//! | finite ordinals  | `fin:k/n`                              |
//! | atoms            | `atom:x`                               |
//! | tables           | `[v0, v1, ...]`                        |
//! | W-trees          | `sup s [q0 -> t0, q1 -> t1, ...]`      |
//! | seeds            | `seed:machine.state`                   |
//! | paths            | `below q1 . below q2 . here(i, p)`     |

use alloc::{sync::Arc, vec::Vec};
use core::cmp::Ordering;
use core::fmt;

use crate::bisim::{bisim_exact, ExactBisim};
use crate::m::MSeed;
use crate::w::WTree;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Value {
    Unit,
    Fin { k: u64, n: u64 },
    Nat(u64),
    Inl(Arc<Value>),
    Inr(Arc<Value>),
    Pair(Arc<Value>, Arc<Value>),
    Atom(Arc<str>),
    Table(Arc<[Value]>),
    Tree(WTree),
    Seed(MSeed),
    Path(Arc<PosPath>),
}

impl Value {
    pub fn inl(v: Value) -> Value {
        Value::Inl(Arc::new(v))
    }

    pub fn inr(v: Value) -> Value {
        Value::Inr(Arc::new(v))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn atom(name: &str) -> Value {
        Value::Atom(Arc::from(name))
    }

    pub fn fin(k: u64, n: u64) -> Value {
        Value::Fin { k, n }
    }

    pub fn table(items: Vec<Value>) -> Value {
        Value::Table(Arc::from(items))
    }

    pub fn path(p: PosPath) -> Value {
        Value::Path(Arc::new(p))
    }

    pub fn as_tree(&self) -> Option<&WTree> {
        match self {
            Value::Tree(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_seed(&self) -> Option<&MSeed> {
        match self {
            Value::Seed(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_path(&self) -> Option<&PosPath> {
        match self {
            Value::Path(p) => Some(p),
            _ => None,
        }
    }

    /// Equality of the denoted objects: structural everywhere except for
    /// machine seeds, which are equal iff they are bisimilar.
    pub fn semantic_eq(&self, other: &Value) -> bool {
        let mut stack = alloc::vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            match (a, b) {
                (Value::Seed(x), Value::Seed(y)) => {
                    if !matches!(bisim_exact(x, y), ExactBisim::Equal) {
                        return false;
                    }
                }
                (Value::Inl(x), Value::Inl(y)) | (Value::Inr(x), Value::Inr(y)) => stack.push((x, y)),
                (Value::Pair(x0, x1), Value::Pair(y0, y1)) => {
                    stack.push((x0, y0));
                    stack.push((x1, y1));
                }
                (Value::Table(xs), Value::Table(ys)) => {
                    if xs.len() != ys.len() {
                        return false;
                    }
                    stack.extend(xs.iter().zip(ys.iter()));
                }
                _ => {
                    if a != b {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// A finite path into a W- or M-tree: a sequence of recursive positions
/// followed by a parameter position at some index.
///
/// The nested `here`/`below` view is available through [`PosPath::here`],
/// [`PosPath::below`] and [`PosPath::split_first`]. Paths are ordered
/// shortlex: fewer steps first, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosPath {
    pub steps: Vec<Value>,
    pub index: usize,
    pub position: Value,
}

impl PosPath {
    pub fn here(index: usize, position: Value) -> Self {
        PosPath { steps: Vec::new(), index, position }
    }

    pub fn below(q: Value, rest: PosPath) -> Self {
        let mut steps = Vec::with_capacity(rest.steps.len() + 1);
        steps.push(q);
        steps.extend(rest.steps);
        PosPath { steps, index: rest.index, position: rest.position }
    }

    /// Number of constructors, counting the final `here`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn is_here(&self) -> bool {
        self.steps.is_empty()
    }

    /// `below q rest` ↦ `Some((q, rest))`; `here` ↦ `None`.
    pub fn split_first(&self) -> Option<(&Value, PosPath)> {
        let (q, rest) = self.steps.split_first()?;
        Some((q, PosPath { steps: rest.to_vec(), index: self.index, position: self.position.clone() }))
    }
}

impl Ord for PosPath {
    fn cmp(&self, other: &Self) -> Ordering {
        self.steps
            .len()
            .cmp(&other.steps.len())
            .then_with(|| self.steps.cmp(&other.steps))
            .then_with(|| self.index.cmp(&other.index))
            .then_with(|| self.position.cmp(&other.position))
    }
}

impl PartialOrd for PosPath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PosPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.steps {
            write!(f, "below {q} . ")?;
        }
        write!(f, "here({}, {})", self.index, self.position)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => f.write_str("unit"),
            Value::Fin { k, n } => write!(f, "fin:{k}/{n}"),
            Value::Nat(k) => write!(f, "nat:{k}"),
            Value::Inl(v) => write!(f, "inl {v}"),
            Value::Inr(v) => write!(f, "inr {v}"),
            Value::Pair(a, b) => write!(f, "({a} , {b})"),
            Value::Atom(x) => write!(f, "atom:{x}"),
            Value::Table(items) => {
                f.write_str("[")?;
                for (j, v) in items.iter().enumerate() {
                    if j > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Tree(t) => write!(f, "{t}"),
            Value::Seed(m) => write!(f, "{m}"),
            Value::Path(p) => write!(f, "{p}"),
        }
    }
}
