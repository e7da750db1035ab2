//! The closed universe of domains and their bounded enumeration.

use alloc::{sync::Arc, vec::Vec};
use core::fmt;

use crate::container::SplitContainer;
use crate::m::{self, MachineRegistry};
use crate::value::Value;
use crate::w;

/// Exploration limits. `depth` bounds the structural rank of enumerated
/// values (largest natural, tree height, number of path steps); `count`
/// bounds how many values any single enumeration may return.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub depth: usize,
    pub count: usize,
}

impl Budget {
    pub const DEFAULT_COUNT: usize = 100_000;

    pub const fn new(depth: usize, count: usize) -> Self {
        Budget { depth, count }
    }

    pub const fn depth(depth: usize) -> Self {
        Budget { depth, count: Self::DEFAULT_COUNT }
    }
}

/// Result of a bounded enumeration.
///
/// `complete` means the items are the whole domain. `truncated` means the
/// count bound was hit, or some element could not be produced because a
/// domain it depends on could not be listed; it is never set silently.
#[derive(Clone, Debug)]
pub struct Enumeration<T> {
    pub items: Vec<T>,
    pub complete: bool,
    pub truncated: bool,
}

impl<T> Enumeration<T> {
    pub fn complete(items: Vec<T>) -> Self {
        Enumeration { items, complete: true, truncated: false }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn capped(mut items: Vec<T>, complete: bool, truncated: bool, count: usize) -> Self {
        let over = items.len() > count;
        items.truncate(count);
        Enumeration { items, complete: complete && !over && !truncated, truncated: truncated || over }
    }
}

/// Which fixed point a path domain walks.
#[derive(Clone)]
pub enum Fixpoint {
    Mu(Arc<SplitContainer>),
    Nu(Arc<SplitContainer>),
}

impl Fixpoint {
    pub fn signature(&self) -> &SplitContainer {
        match self {
            Fixpoint::Mu(f) | Fixpoint::Nu(f) => f,
        }
    }
}

/// Positions at `index` in the tree or seed `anchor`: all finite paths.
#[derive(Clone)]
pub struct PosDomain {
    pub fixpoint: Fixpoint,
    pub index: usize,
    pub anchor: Value,
}

/// The machine seeds of a ν-container. Membership accepts every seed whose
/// machine is well-typed for `signature`; enumeration lists the registered
/// seeds, one per bisimilarity class.
#[derive(Clone)]
pub struct SeedPool {
    pub signature: Arc<SplitContainer>,
    pub registry: Arc<MachineRegistry>,
}

#[derive(Clone)]
pub enum Domain {
    Empty,
    Unit,
    Fin(u64),
    Nat,
    Sum(Arc<Domain>, Arc<Domain>),
    Prod(Arc<Domain>, Arc<Domain>),
    /// Named symbols, enumerated in the listed order.
    Atoms(Arc<[Arc<str>]>),
    /// Total tables from a finite domain, one entry per element in
    /// enumeration order.
    Table(Arc<Domain>, Arc<Domain>),
    /// Finite tagged union: values are `(tag , v)` with `v` in the tag's
    /// domain.
    Tagged(Arc<[(Value, Domain)]>),
    W(Arc<SplitContainer>),
    M(Arc<SeedPool>),
    Pos(Arc<PosDomain>),
}

/// Largest domain `finite_elements` will materialise.
const FINITE_CAP: usize = 1 << 20;

impl Domain {
    pub fn sum(a: Domain, b: Domain) -> Domain {
        Domain::Sum(Arc::new(a), Arc::new(b))
    }

    pub fn prod(a: Domain, b: Domain) -> Domain {
        Domain::Prod(Arc::new(a), Arc::new(b))
    }

    pub fn atoms<S: AsRef<str>>(names: &[S]) -> Domain {
        Domain::Atoms(names.iter().map(|s| Arc::from(s.as_ref())).collect())
    }

    pub fn table(dom: Domain, cod: Domain) -> Domain {
        Domain::Table(Arc::new(dom), Arc::new(cod))
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Domain::Empty, _) => false,
            (Domain::Unit, Value::Unit) => true,
            (Domain::Fin(n), Value::Fin { k, n: m }) => m == n && k < n,
            (Domain::Nat, Value::Nat(_)) => true,
            (Domain::Sum(a, _), Value::Inl(x)) => a.contains(x),
            (Domain::Sum(_, b), Value::Inr(x)) => b.contains(x),
            (Domain::Prod(a, b), Value::Pair(x, y)) => a.contains(x) && b.contains(y),
            (Domain::Atoms(names), Value::Atom(x)) => names.iter().any(|n| n == x),
            (Domain::Table(a, b), Value::Table(items)) => match a.finite_elements() {
                Some(keys) => keys.len() == items.len() && items.iter().all(|v| b.contains(v)),
                None => false,
            },
            (Domain::Tagged(entries), Value::Pair(tag, x)) => entries.iter().any(|(t, d)| t == &**tag && d.contains(x)),
            (Domain::W(f), Value::Tree(t)) => w::tree_valid(f, t),
            (Domain::M(pool), Value::Seed(s)) => s.machine().validate(&pool.signature).is_ok(),
            (Domain::Pos(pd), Value::Path(p)) => pos_contains(pd, p),
            _ => false,
        }
    }

    /// Semantic equality of two members; decidable in this universe, so no
    /// budget is needed.
    pub fn equal(&self, a: &Value, b: &Value) -> bool {
        a.semantic_eq(b)
    }

    /// True when the domain is finite by construction (W, M and natural
    /// numbers are treated as infinite).
    pub fn is_finite(&self) -> bool {
        match self {
            Domain::Empty | Domain::Unit | Domain::Fin(_) | Domain::Atoms(_) => true,
            Domain::Nat | Domain::W(_) | Domain::M(_) => false,
            Domain::Sum(a, b) | Domain::Prod(a, b) => a.is_finite() && b.is_finite(),
            Domain::Table(a, b) => a.is_finite() && b.is_finite(),
            Domain::Tagged(entries) => entries.iter().all(|(_, d)| d.is_finite()),
            Domain::Pos(pd) => match (&pd.fixpoint, &pd.anchor) {
                (Fixpoint::Mu(f), Value::Tree(t)) => w::pos_paths_w(t, pd.index, f).is_ok(),
                _ => false,
            },
        }
    }

    /// Every element, in enumeration order, when the domain is finite and
    /// small enough to materialise.
    pub fn finite_elements(&self) -> Option<Vec<Value>> {
        if !self.is_finite() {
            return None;
        }
        let e = self.enumerate(Budget::new(usize::MAX, FINITE_CAP));
        (e.complete && !e.truncated).then_some(e.items)
    }

    /// Deterministic bounded enumeration. Orders: `Fin` and `Nat`
    /// ascending, sums left then right, products and tables
    /// lexicographic, trees by height then structurally, paths shortlex.
    /// The listing is a prefix of any listing with a larger `count`.
    pub fn enumerate(&self, budget: Budget) -> Enumeration<Value> {
        let count = budget.count;
        match self {
            Domain::Empty => Enumeration::complete(Vec::new()),
            Domain::Unit => Enumeration::capped(alloc::vec![Value::Unit], true, false, count),
            Domain::Fin(n) => {
                let take = (*n).min(count as u64 + 1);
                let items = (0..take).map(|k| Value::fin(k, *n)).collect();
                Enumeration::capped(items, true, false, count)
            }
            Domain::Nat => {
                let top = (budget.depth as u64).min(count as u64);
                let items = (0..=top).map(Value::Nat).collect();
                Enumeration::capped(items, false, false, count)
            }
            Domain::Atoms(names) => {
                let items = names.iter().take(count.saturating_add(1)).map(|n| Value::Atom(n.clone())).collect();
                Enumeration::capped(items, true, false, count)
            }
            Domain::Sum(a, b) => {
                let left = a.enumerate(budget);
                let right = b.enumerate(budget);
                let complete = left.complete && right.complete;
                let truncated = left.truncated || right.truncated;
                let items = left
                    .items
                    .into_iter()
                    .map(Value::inl)
                    .chain(right.items.into_iter().map(Value::inr))
                    .take(count.saturating_add(1))
                    .collect();
                Enumeration::capped(items, complete, truncated, count)
            }
            Domain::Prod(a, b) => {
                let left = a.enumerate(budget);
                let right = b.enumerate(budget);
                let complete = left.complete && right.complete;
                let truncated = left.truncated || right.truncated;
                let (rows, over) = product(&[left.items, right.items], count);
                let items = rows.into_iter().map(|mut r| {
                    let y = r.pop().unwrap();
                    let x = r.pop().unwrap();
                    Value::pair(x, y)
                });
                Enumeration::capped(items.collect(), complete, truncated || over, count)
            }
            Domain::Table(a, b) => {
                let Some(keys) = a.finite_elements() else {
                    return Enumeration { items: Vec::new(), complete: false, truncated: true };
                };
                let cod = b.enumerate(budget);
                let lists: Vec<Vec<Value>> = keys.iter().map(|_| cod.items.clone()).collect();
                let (rows, over) = product(&lists, count);
                let items = rows.into_iter().map(Value::table).collect();
                Enumeration::capped(items, cod.complete, cod.truncated || over, count)
            }
            Domain::Tagged(entries) => {
                let mut items = Vec::new();
                let mut complete = true;
                let mut truncated = false;
                for (tag, d) in entries.iter() {
                    let e = d.enumerate(budget);
                    complete &= e.complete;
                    truncated |= e.truncated;
                    items.extend(e.items.into_iter().map(|v| Value::pair(tag.clone(), v)));
                    if items.len() > count {
                        break;
                    }
                }
                Enumeration::capped(items, complete, truncated, count)
            }
            Domain::W(f) => w::enumerate_trees(f, budget),
            Domain::M(pool) => m::enumerate_seeds(pool, budget),
            Domain::Pos(pd) => match (&pd.fixpoint, &pd.anchor) {
                (Fixpoint::Mu(f), Value::Tree(t)) => {
                    let e = w::pos_paths_w_bounded(t, pd.index, f, budget);
                    e.map(Value::path)
                }
                (Fixpoint::Nu(f), Value::Seed(s)) => {
                    let e = m::pos_paths_m(f, s, pd.index, budget);
                    e.map(Value::path)
                }
                _ => Enumeration::complete(Vec::new()),
            },
        }
    }
}

impl<T> Enumeration<T> {
    /// Same flags, no items.
    pub fn map<U>(self, f: impl FnMut(T) -> U) -> Enumeration<U> {
        Enumeration {
            items: self.items.into_iter().map(f).collect(),
            complete: self.complete,
            truncated: self.truncated,
        }
    }
}

fn pos_contains(pd: &PosDomain, p: &crate::value::PosPath) -> bool {
    if p.index != pd.index {
        return false;
    }
    match (&pd.fixpoint, &pd.anchor) {
        (Fixpoint::Mu(f), Value::Tree(t)) => w::path_valid(f, t, p),
        (Fixpoint::Nu(f), Value::Seed(s)) => matches!(m::pos_eval(f, s, p), m::PosEval::Valid { .. }),
        _ => false,
    }
}

/// Cartesian product of `lists` in lexicographic order (first list most
/// significant). Stops after `cap + 1` rows and reports whether it did.
pub(crate) fn product<T: Clone>(lists: &[Vec<T>], cap: usize) -> (Vec<Vec<T>>, bool) {
    if lists.iter().any(|l| l.is_empty()) {
        return (Vec::new(), false);
    }
    let mut rows = Vec::new();
    let mut digits = alloc::vec![0usize; lists.len()];
    loop {
        if rows.len() > cap {
            return (rows, true);
        }
        rows.push(digits.iter().zip(lists).map(|(&d, l)| l[d].clone()).collect());
        let mut j = lists.len();
        loop {
            if j == 0 {
                return (rows, false);
            }
            j -= 1;
            digits[j] += 1;
            if digits[j] < lists[j].len() {
                break;
            }
            digits[j] = 0;
        }
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Empty => f.write_str("Empty"),
            Domain::Unit => f.write_str("Unit"),
            Domain::Fin(n) => write!(f, "Fin({n})"),
            Domain::Nat => f.write_str("Nat"),
            Domain::Sum(a, b) => write!(f, "Sum({a:?}, {b:?})"),
            Domain::Prod(a, b) => write!(f, "Prod({a:?}, {b:?})"),
            Domain::Atoms(names) => write!(f, "Atoms({names:?})"),
            Domain::Table(a, b) => write!(f, "Table({a:?}, {b:?})"),
            Domain::Tagged(entries) => {
                f.write_str("Tagged[")?;
                for (j, (t, d)) in entries.iter().enumerate() {
                    if j > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t} : {d:?}")?;
                }
                f.write_str("]")
            }
            Domain::W(_) => f.write_str("W"),
            Domain::M(_) => f.write_str("M"),
            Domain::Pos(pd) => write!(f, "Pos({}, {})", pd.index, pd.anchor),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vals(d: &Domain, depth: usize, count: usize) -> Vec<Value> {
        d.enumerate(Budget::new(depth, count)).items
    }

    #[test]
    fn finite_domains_are_complete() {
        let d = Domain::prod(Domain::Fin(2), Domain::sum(Domain::Unit, Domain::Unit));
        let e = d.enumerate(Budget::depth(0));
        assert!(e.complete && !e.truncated);
        assert_eq!(e.len(), 4);
        assert_eq!(e.items[0], Value::pair(Value::fin(0, 2), Value::inl(Value::Unit)));
        assert_eq!(e.items[3], Value::pair(Value::fin(1, 2), Value::inr(Value::Unit)));
        for v in &e.items {
            assert!(d.contains(v));
        }
    }

    #[test]
    fn nat_is_never_complete() {
        let e = Domain::Nat.enumerate(Budget::depth(3));
        assert_eq!(e.items, (0..=3).map(Value::Nat).collect::<Vec<_>>());
        assert!(!e.complete);
        assert!(!e.truncated);
    }

    #[test]
    fn count_bound_truncates_as_a_prefix() {
        let d = Domain::prod(Domain::Fin(3), Domain::Fin(3));
        let all = vals(&d, 0, 100);
        for c in 0..=9 {
            let e = d.enumerate(Budget::new(0, c));
            assert_eq!(e.items[..], all[..c]);
            assert_eq!(e.truncated, c < 9);
        }
    }

    #[test]
    fn tables_and_tags() {
        let t = Domain::table(Domain::Fin(2), Domain::atoms(&["a", "b"]));
        let items = vals(&t, 0, 100);
        assert_eq!(items.len(), 4);
        assert!(t.contains(&Value::table(alloc::vec![Value::atom("b"), Value::atom("a")])));
        assert!(!t.contains(&Value::table(alloc::vec![Value::atom("b")])));
        let g =
            Domain::Tagged(Arc::from(alloc::vec![(Value::fin(0, 2), Domain::Unit), (Value::fin(1, 2), Domain::Empty)]));
        assert_eq!(vals(&g, 0, 10), alloc::vec![Value::pair(Value::fin(0, 2), Value::Unit)]);
    }

    #[test]
    fn finite_elements_refuses_infinite() {
        assert!(Domain::Nat.finite_elements().is_none());
        assert_eq!(Domain::Fin(3).finite_elements().unwrap().len(), 3);
        assert_eq!(Domain::Empty.finite_elements().unwrap().len(), 0);
    }
}
