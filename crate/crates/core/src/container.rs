//! Containers `S ◁ P` over an index set and their functor extension.

use alloc::{collections::BTreeMap, string::String, sync::Arc, vec::Vec};
use core::fmt;

use crate::domain::{product, Budget, Domain, Enumeration};
use crate::error::Error;
use crate::value::{PosPath, Value};
use crate::Result;

/// Ordered, duplicate-free index names. The order fixes the argument order
/// of payloads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    names: Arc<[Arc<str>]>,
}

impl IndexSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut seen: Vec<&str> = Vec::new();
        for n in names {
            if seen.contains(&n.as_ref()) {
                return Err(Error::DuplicateIndex(String::from(n.as_ref())));
            }
            seen.push(n.as_ref());
        }
        Ok(IndexSet { names: names.iter().map(|n| Arc::from(n.as_ref())).collect() })
    }

    pub fn unary() -> Self {
        IndexSet { names: Arc::from([Arc::from("X")]) }
    }

    pub fn empty() -> Self {
        IndexSet { names: Arc::from([]) }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[Arc<str>] {
        &self.names
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| &**n == name)
    }

    pub fn push(&self, name: &str) -> Result<Self> {
        let mut names: Vec<&str> = self.names.iter().map(|n| &**n).collect();
        names.push(name);
        IndexSet::new(&names)
    }

    fn without_last(&self) -> Self {
        IndexSet { names: self.names[..self.names.len().saturating_sub(1)].into() }
    }
}

pub type PosFn = Arc<dyn Fn(usize, &Value) -> Domain + Send + Sync>;
pub type RecFn = Arc<dyn Fn(&Value) -> Domain + Send + Sync>;

/// `S ◁ P`: shapes and, per index and shape, a domain of positions.
#[derive(Clone)]
pub struct Container {
    indices: IndexSet,
    shapes: Domain,
    pos: PosFn,
}

impl Container {
    pub fn new(indices: IndexSet, shapes: Domain, pos: PosFn) -> Self {
        Container { indices, shapes, pos }
    }

    pub fn from_fn<F>(indices: IndexSet, shapes: Domain, pos: F) -> Self
    where
        F: Fn(usize, &Value) -> Domain + Send + Sync + 'static,
    {
        Container::new(indices, shapes, Arc::new(pos))
    }

    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    pub fn shapes(&self) -> &Domain {
        &self.shapes
    }

    pub fn pos_fn(&self) -> &PosFn {
        &self.pos
    }

    /// `P i s`, checked: the index must exist and the shape must be a member.
    pub fn positions(&self, index: usize, shape: &Value) -> Result<Domain> {
        if index >= self.indices.len() {
            return Err(Error::UnknownIndex(index));
        }
        if !self.shapes.contains(shape) {
            return Err(Error::ShapeNotInDomain(shape.clone()));
        }
        Ok((self.pos)(index, shape))
    }

    /// `P i s` without the membership check.
    pub fn positions_unchecked(&self, index: usize, shape: &Value) -> Domain {
        (self.pos)(index, shape)
    }
}

impl fmt::Debug for Container {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Container").field("indices", &self.indices).field("shapes", &self.shapes).finish()
    }
}

/// `(S ◁ P, Q)`: an `(I+1)`-ary container with the last index singled out
/// as the recursive slot.
#[derive(Clone)]
pub struct SplitContainer {
    base: Container,
    rec: RecFn,
}

impl fmt::Debug for SplitContainer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SplitContainer").field("params", &self.base.indices).field("shapes", &self.base.shapes).finish()
    }
}

impl SplitContainer {
    pub fn new(base: Container, rec: RecFn) -> Self {
        SplitContainer { base, rec }
    }

    pub fn from_fns<P, Q>(indices: IndexSet, shapes: Domain, pos: P, rec: Q) -> Self
    where
        P: Fn(usize, &Value) -> Domain + Send + Sync + 'static,
        Q: Fn(&Value) -> Domain + Send + Sync + 'static,
    {
        SplitContainer { base: Container::from_fn(indices, shapes, pos), rec: Arc::new(rec) }
    }

    pub fn base(&self) -> &Container {
        &self.base
    }

    pub fn shapes(&self) -> &Domain {
        self.base.shapes()
    }

    pub fn indices(&self) -> &IndexSet {
        self.base.indices()
    }

    /// `P i s`, unchecked.
    pub fn params(&self, index: usize, shape: &Value) -> Domain {
        self.base.positions_unchecked(index, shape)
    }

    /// `Q s`, unchecked.
    pub fn rec_positions(&self, shape: &Value) -> Domain {
        (self.rec)(shape)
    }

    /// `Q s` listed exhaustively; errors if infinite.
    pub fn rec_list(&self, shape: &Value) -> Result<Vec<Value>> {
        self.rec_positions(shape).finite_elements().ok_or_else(|| Error::InfiniteRecursion(shape.clone()))
    }

    /// Glue `Q` back on as the last index named `rec_name`.
    pub fn reassemble(&self, rec_name: &str) -> Result<Container> {
        let indices = self.base.indices.push(rec_name)?;
        let last = self.base.indices.len();
        let pos = self.base.pos.clone();
        let rec = self.rec.clone();
        Ok(Container::from_fn(
            indices,
            self.base.shapes.clone(),
            move |i, s| {
                if i == last {
                    rec(s)
                } else {
                    pos(i, s)
                }
            },
        ))
    }
}

/// The family `X : I → Type`, one domain per index.
#[derive(Clone, Debug)]
pub struct FamilyAssignment {
    pub assign: Vec<Domain>,
}

impl FamilyAssignment {
    pub fn new(assign: Vec<Domain>) -> Self {
        FamilyAssignment { assign }
    }

    fn check(&self, indices: &IndexSet) -> Result<()> {
        if self.assign.len() != indices.len() {
            return Err(Error::ArityMismatch { expected: indices.len(), found: self.assign.len() });
        }
        Ok(())
    }
}

pub type OracleFn = Arc<dyn Fn(usize, &Value) -> Option<Value> + Send + Sync>;

/// Payload of an extension element: an assignment of data to positions,
/// either as a finite table or as a pure oracle. `None` means undefined.
#[derive(Clone)]
pub enum Payload {
    Table(Arc<BTreeMap<(usize, Value), Value>>),
    Oracle(OracleFn),
}

impl Payload {
    pub fn table(entries: impl IntoIterator<Item = ((usize, Value), Value)>) -> Self {
        Payload::Table(Arc::new(entries.into_iter().collect()))
    }

    pub fn oracle<F>(f: F) -> Self
    where
        F: Fn(usize, &Value) -> Option<Value> + Send + Sync + 'static,
    {
        Payload::Oracle(Arc::new(f))
    }

    pub fn empty() -> Self {
        Payload::Table(Arc::new(BTreeMap::new()))
    }

    pub fn get(&self, index: usize, position: &Value) -> Option<Value> {
        match self {
            Payload::Table(t) => t.get(&(index, position.clone())).cloned(),
            Payload::Oracle(f) => f(index, position),
        }
    }

    /// Reads `here(i, p)` of a path-indexed payload.
    pub fn at_here(&self, index: usize, p: &Value) -> Option<Value> {
        self.get(index, &Value::path(PosPath::here(index, p.clone())))
    }
}

impl fmt::Debug for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Table(t) => {
                f.write_str("{")?;
                for (j, ((i, p), v)) in t.iter().enumerate() {
                    if j > 0 {
                        f.write_str(" ; ")?;
                    }
                    write!(f, "{i}:{p} -> {v}")?;
                }
                f.write_str("}")
            }
            Payload::Oracle(_) => f.write_str("<oracle>"),
        }
    }
}

/// An element `(s , g)` of `⟦S ◁ P⟧ X`.
#[derive(Clone, Debug)]
pub struct ExtElement {
    pub shape: Value,
    pub payload: Payload,
}

impl ExtElement {
    pub fn new(shape: Value, payload: Payload) -> Self {
        ExtElement { shape, payload }
    }
}

/// An element `(s , g , h)` of `⟦S ◁ P, Q⟧(X, Y)` in split form: parameter
/// payload `g` and the recursive part `h` as a table in position order.
#[derive(Clone, Debug)]
pub struct FElement<Y> {
    pub shape: Value,
    pub params: Payload,
    pub rec: Vec<(Value, Y)>,
}

impl<Y> FElement<Y> {
    pub fn child(&self, q: &Value) -> Option<&Y> {
        self.rec.iter().find(|(k, _)| k == q).map(|(_, y)| y)
    }

    pub fn map<Z>(self, mut f: impl FnMut(Y) -> Z) -> FElement<Z> {
        FElement { shape: self.shape, params: self.params, rec: self.rec.into_iter().map(|(q, y)| (q, f(y))).collect() }
    }
}

pub type ValueFn = Arc<dyn Fn(&Value) -> Value + Send + Sync>;

/// A morphism `Π_i X i → Y i`, one function per index.
#[derive(Clone)]
pub struct FamilyMorphism {
    pub maps: Vec<ValueFn>,
}

impl FamilyMorphism {
    pub fn identity(arity: usize) -> Self {
        FamilyMorphism { maps: (0..arity).map(|_| Arc::new(|v: &Value| v.clone()) as ValueFn).collect() }
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &FamilyMorphism) -> FamilyMorphism {
        let maps = self
            .maps
            .iter()
            .zip(&inner.maps)
            .map(|(f, g)| {
                let (f, g) = (f.clone(), g.clone());
                Arc::new(move |v: &Value| f(&g(v))) as ValueFn
            })
            .collect();
        FamilyMorphism { maps }
    }
}

/// `e ∈ ⟦c⟧ x`, checking payloads on every position listed within `budget`.
///
/// Returns `Ok(false)` when the shape is not a member; payload problems are
/// errors naming the offending `(index, position)`.
pub fn ext_contains(c: &Container, x: &FamilyAssignment, e: &ExtElement, budget: Budget) -> Result<bool> {
    x.check(c.indices())?;
    if !c.shapes().contains(&e.shape) {
        return Ok(false);
    }
    for (i, xi) in x.assign.iter().enumerate() {
        let positions = c.positions_unchecked(i, &e.shape).enumerate(budget);
        for p in positions.items {
            match e.payload.get(i, &p) {
                None => return Err(Error::MissingPosition { index: i, position: p }),
                Some(v) if !xi.contains(&v) => return Err(Error::IllTypedPayload { index: i, position: p, value: v }),
                Some(_) => {}
            }
        }
    }
    Ok(true)
}

/// All elements of `⟦c⟧ x` within `budget`: shapes in enumeration order,
/// then payload tables lexicographically over `(index, position)` slots.
///
/// Elements whose positions cannot be listed completely are skipped and
/// flagged as `truncated`.
pub fn ext_enumerate(c: &Container, x: &FamilyAssignment, budget: Budget) -> Result<Enumeration<ExtElement>> {
    x.check(c.indices())?;
    let shapes = c.shapes().enumerate(budget);
    let data: Vec<Enumeration<Value>> = x.assign.iter().map(|d| d.enumerate(budget)).collect();
    let mut complete = shapes.complete;
    let mut truncated = shapes.truncated;
    let mut out = Vec::new();
    'shapes: for s in shapes.items {
        let mut slots = Vec::new();
        let mut lists = Vec::new();
        for (i, xi) in data.iter().enumerate() {
            let ps = c.positions_unchecked(i, &s).enumerate(budget);
            if !ps.complete {
                truncated = true;
                complete = false;
                continue 'shapes;
            }
            if !ps.items.is_empty() {
                complete &= xi.complete;
                truncated |= xi.truncated;
            }
            for p in ps.items {
                slots.push((i, p));
                lists.push(xi.items.clone());
            }
        }
        let room = budget.count - out.len().min(budget.count);
        let (rows, over) = product(&lists, room);
        for row in rows {
            if out.len() == budget.count {
                truncated = true;
                complete = false;
                break 'shapes;
            }
            out.push(ExtElement::new(s.clone(), Payload::table(slots.iter().cloned().zip(row))));
        }
        if over {
            truncated = true;
            complete = false;
            break;
        }
    }
    Ok(Enumeration { items: out, complete, truncated })
}

/// `⟦c⟧ f (s , g) = (s , f ∘ g)`.
pub fn extend_mor(c: &Container, f: &FamilyMorphism, e: &ExtElement) -> Result<ExtElement> {
    if f.maps.len() != c.indices().len() {
        return Err(Error::ArityMismatch { expected: c.indices().len(), found: f.maps.len() });
    }
    let payload = match &e.payload {
        Payload::Table(t) => Payload::table(t.iter().map(|((i, p), v)| ((*i, p.clone()), (f.maps[*i])(v)))),
        Payload::Oracle(g) => {
            let (g, maps) = (g.clone(), f.maps.clone());
            Payload::oracle(move |i, p| g(i, p).map(|v| (maps[i])(&v)))
        }
    };
    Ok(ExtElement::new(e.shape.clone(), payload))
}

/// Singles out the last index of `c` as the recursive slot.
pub fn split_last(c: &Container) -> Result<SplitContainer> {
    let n = c.indices().len();
    if n == 0 {
        return Err(Error::NoIndices);
    }
    let last = n - 1;
    let pos = c.pos.clone();
    let base = Container::new(c.indices.without_last(), c.shapes.clone(), c.pos.clone());
    Ok(SplitContainer::new(base, Arc::new(move |s| pos(last, s))))
}

/// Why two extension elements differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Discrepancy {
    Shape,
    Position { index: usize, position: Value },
}

/// Bounded extensional equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtEquality {
    Equal,
    Distinct(Discrepancy),
    /// Agreement on everything listed, but some position domain was not
    /// exhausted within the budget.
    Unknown,
}

pub fn ext_equal(c: &Container, x: &FamilyAssignment, e1: &ExtElement, e2: &ExtElement, budget: Budget) -> ExtEquality {
    if !e1.shape.semantic_eq(&e2.shape) {
        return ExtEquality::Distinct(Discrepancy::Shape);
    }
    let mut exhausted = true;
    for i in 0..x.assign.len().min(c.indices().len()) {
        let ps = c.positions_unchecked(i, &e1.shape).enumerate(budget);
        exhausted &= ps.complete;
        for p in ps.items {
            let same = match (e1.payload.get(i, &p), e2.payload.get(i, &p)) {
                (Some(a), Some(b)) => a.semantic_eq(&b),
                (None, None) => true,
                _ => false,
            };
            if !same {
                return ExtEquality::Distinct(Discrepancy::Position { index: i, position: p });
            }
        }
    }
    if exhausted {
        ExtEquality::Equal
    } else {
        ExtEquality::Unknown
    }
}

/// `(s , g) ↦ (s , g|_I , g|_Q)`: an element of `c` as an element of its
/// split form. Requires `Q s` to be finite.
pub fn split_element(f: &SplitContainer, e: &ExtElement) -> Result<FElement<Value>> {
    let last = f.indices().len();
    let rec = f
        .rec_list(&e.shape)?
        .into_iter()
        .map(|q| match e.payload.get(last, &q) {
            Some(y) => Ok((q, y)),
            None => Err(Error::MissingPosition { index: last, position: q }),
        })
        .collect::<Result<Vec<_>>>()?;
    let g = e.payload.clone();
    Ok(FElement {
        shape: e.shape.clone(),
        params: Payload::oracle(move |i, p| if i < last { g.get(i, p) } else { None }),
        rec,
    })
}

/// Inverse of [`split_element`].
pub fn join_element(f: &SplitContainer, fe: &FElement<Value>) -> ExtElement {
    let last = f.indices().len();
    let g = fe.params.clone();
    let h: BTreeMap<Value, Value> = fe.rec.iter().cloned().collect();
    ExtElement::new(
        fe.shape.clone(),
        Payload::oracle(move |i, p| if i == last { h.get(p).cloned() } else { g.get(i, p) }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// ℕ ◁ Fin over one index.
    fn lists() -> Container {
        Container::from_fn(IndexSet::unary(), Domain::Nat, |_, s| match s {
            Value::Nat(n) => Domain::Fin(*n),
            _ => Domain::Empty,
        })
    }

    fn red() -> ExtElement {
        ExtElement::new(
            Value::Nat(3),
            Payload::table([
                ((0, Value::fin(0, 3)), Value::atom("r")),
                ((0, Value::fin(1, 3)), Value::atom("e")),
                ((0, Value::fin(2, 3)), Value::atom("d")),
            ]),
        )
    }

    fn rgb() -> FamilyAssignment {
        FamilyAssignment::new(vec![Domain::atoms(&["r", "e", "d"])])
    }

    #[test]
    fn red_is_a_list_element() {
        assert_eq!(ext_contains(&lists(), &rgb(), &red(), Budget::depth(8)), Ok(true));
    }

    #[test]
    fn missing_position_is_reported() {
        let e = ExtElement::new(
            Value::Nat(3),
            Payload::table([((0, Value::fin(0, 3)), Value::atom("r")), ((0, Value::fin(1, 3)), Value::atom("e"))]),
        );
        assert_eq!(
            ext_contains(&lists(), &rgb(), &e, Budget::depth(8)),
            Err(Error::MissingPosition { index: 0, position: Value::fin(2, 3) })
        );
    }

    #[test]
    fn ill_typed_payload_is_reported() {
        let e = ExtElement::new(Value::Nat(1), Payload::table([((0, Value::fin(0, 1)), Value::atom("z"))]));
        assert!(matches!(
            ext_contains(&lists(), &rgb(), &e, Budget::depth(8)),
            Err(Error::IllTypedPayload { index: 0, .. })
        ));
    }

    #[test]
    fn nat_encoding_zero_is_member() {
        let nat = Container::from_fn(IndexSet::unary(), Domain::sum(Domain::Unit, Domain::Unit), |_, s| match s {
            Value::Inr(_) => Domain::Unit,
            _ => Domain::Empty,
        });
        let x = FamilyAssignment::new(vec![Domain::Unit]);
        let zero = ExtElement::new(Value::inl(Value::Unit), Payload::empty());
        assert_eq!(ext_contains(&nat, &x, &zero, Budget::depth(4)), Ok(true));
    }

    #[test]
    fn enumerates_short_lists() {
        let x = FamilyAssignment::new(vec![Domain::atoms(&["a", "b"])]);
        let e = ext_enumerate(&lists(), &x, Budget::depth(3)).unwrap();
        assert_eq!(e.len(), 15);
        assert!(!e.complete);
        assert!(!e.truncated);
    }

    #[test]
    fn unit_and_empty_containers() {
        let unit = Container::from_fn(IndexSet::unary(), Domain::Unit, |_, _| Domain::Empty);
        let x = FamilyAssignment::new(vec![Domain::Nat]);
        let e = ext_enumerate(&unit, &x, Budget::depth(5)).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e.complete);
        let empty = Container::from_fn(IndexSet::unary(), Domain::Empty, |_, _| Domain::Empty);
        assert!(ext_enumerate(&empty, &x, Budget::depth(5)).unwrap().is_empty());
    }

    #[test]
    fn enumeration_count_bound_flags_truncation() {
        let x = FamilyAssignment::new(vec![Domain::atoms(&["a", "b"])]);
        let e = ext_enumerate(&lists(), &x, Budget::new(3, 10)).unwrap();
        assert_eq!(e.len(), 10);
        assert!(e.truncated);
    }

    #[test]
    fn uppercase_morphism() {
        let upper = FamilyMorphism {
            maps: vec![Arc::new(|v: &Value| match v {
                Value::Atom(a) => Value::atom(&a.to_uppercase()),
                other => other.clone(),
            })],
        };
        let out = extend_mor(&lists(), &upper, &red()).unwrap();
        assert_eq!(out.shape, Value::Nat(3));
        let got: Vec<Value> = (0..3).map(|k| out.payload.get(0, &Value::fin(k, 3)).unwrap()).collect();
        assert_eq!(got, vec![Value::atom("R"), Value::atom("E"), Value::atom("D")]);
    }

    #[test]
    fn ext_equal_reports_witness() {
        let x = rgb();
        let mut other = BTreeMap::new();
        other.insert((0, Value::fin(0, 3)), Value::atom("r"));
        other.insert((0, Value::fin(1, 3)), Value::atom("e"));
        other.insert((0, Value::fin(2, 3)), Value::atom("x"));
        let rex = ExtElement::new(Value::Nat(3), Payload::Table(Arc::new(other)));
        assert_eq!(ext_equal(&lists(), &x, &red(), &red(), Budget::depth(4)), ExtEquality::Equal);
        assert_eq!(
            ext_equal(&lists(), &x, &red(), &rex, Budget::depth(4)),
            ExtEquality::Distinct(Discrepancy::Position { index: 0, position: Value::fin(2, 3) })
        );
        let short = ExtElement::new(Value::Nat(2), Payload::empty());
        assert_eq!(
            ext_equal(&lists(), &x, &red(), &short, Budget::depth(4)),
            ExtEquality::Distinct(Discrepancy::Shape)
        );
    }

    #[test]
    fn split_of_zero_indices_fails() {
        let c = Container::from_fn(IndexSet::empty(), Domain::Unit, |_, _| Domain::Empty);
        assert!(matches!(split_last(&c), Err(Error::NoIndices)));
    }

    #[test]
    fn unary_split_has_constant_base() {
        let f = split_last(&lists()).unwrap();
        assert!(f.indices().is_empty());
        assert_eq!(f.rec_list(&Value::Nat(2)).unwrap().len(), 2);
    }
}
