//! Least fixed points: finite W-trees, the μ-container `W S Q ◁ Pos`, the
//! algebra map `into` and the fold out of it.

use alloc::{boxed::Box, sync::Arc, vec::Vec};
use core::cmp::Ordering;
use core::fmt;

use crate::container::{Container, ExtElement, FElement, FamilyAssignment, Payload, SplitContainer};
use crate::domain::{Budget, Domain, Enumeration, Fixpoint, PosDomain};
use crate::error::Error;
use crate::value::{PosPath, Value};
use crate::Result;

/// A well-founded tree: a shape and one subtree per recursive position, in
/// the enumeration order of `Q s`.
#[derive(Clone)]
pub struct WTree(Arc<WNode>);

struct WNode {
    shape: Value,
    children: Vec<(Value, WTree)>,
}

impl WTree {
    /// `sup s t`, checked against the signature.
    pub fn sup(f: &SplitContainer, shape: Value, children: Vec<(Value, WTree)>) -> Result<WTree> {
        if !f.shapes().contains(&shape) {
            return Err(Error::ShapeNotInDomain(shape));
        }
        let qs = f.rec_list(&shape)?;
        let mut ordered = Vec::with_capacity(qs.len());
        for q in &qs {
            match children.iter().find(|(k, _)| k == q) {
                Some((_, t)) => ordered.push((q.clone(), t.clone())),
                None => return Err(Error::ChildrenMismatch { shape }),
            }
        }
        if children.len() != qs.len() {
            return Err(Error::ChildrenMismatch { shape });
        }
        Ok(WTree::sup_unchecked(shape, ordered))
    }

    pub(crate) fn sup_unchecked(shape: Value, children: Vec<(Value, WTree)>) -> WTree {
        WTree(Arc::new(WNode { shape, children }))
    }

    pub fn leaf(f: &SplitContainer, shape: Value) -> Result<WTree> {
        WTree::sup(f, shape, Vec::new())
    }

    pub fn shape(&self) -> &Value {
        &self.0.shape
    }

    pub fn children(&self) -> &[(Value, WTree)] {
        &self.0.children
    }

    pub fn child(&self, q: &Value) -> Option<&WTree> {
        self.0.children.iter().find(|(k, _)| k == q).map(|(_, t)| t)
    }

    /// Number of node levels; a leaf has height 1.
    pub fn height(&self) -> usize {
        let mut best = 0;
        let mut stack = alloc::vec![(self, 1usize)];
        while let Some((t, h)) = stack.pop() {
            best = best.max(h);
            stack.extend(t.children().iter().map(|(_, c)| (c, h + 1)));
        }
        best
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        let mut stack = alloc::vec![self];
        while let Some(t) = stack.pop() {
            n += 1;
            stack.extend(t.children().iter().map(|(_, c)| c));
        }
        n
    }
}

impl Drop for WNode {
    fn drop(&mut self) {
        let mut stack: Vec<WTree> = core::mem::take(&mut self.children).into_iter().map(|(_, t)| t).collect();
        while let Some(t) = stack.pop() {
            if let Ok(mut node) = Arc::try_unwrap(t.0) {
                stack.extend(core::mem::take(&mut node.children).into_iter().map(|(_, t)| t));
            }
        }
    }
}

enum CmpItem<'a> {
    Trees(&'a WTree, &'a WTree),
    Values(&'a Value, &'a Value),
    Lens(usize, usize),
}

impl Ord for WTree {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut stack = alloc::vec![CmpItem::Trees(self, other)];
        while let Some(item) = stack.pop() {
            let ord = match item {
                CmpItem::Lens(a, b) => a.cmp(&b),
                CmpItem::Values(a, b) => a.cmp(b),
                CmpItem::Trees(a, b) => {
                    if Arc::ptr_eq(&a.0, &b.0) {
                        continue;
                    }
                    let ord = a.shape().cmp(b.shape());
                    if ord == Ordering::Equal {
                        let (ca, cb) = (a.children(), b.children());
                        stack.push(CmpItem::Lens(ca.len(), cb.len()));
                        for ((qa, ta), (qb, tb)) in ca.iter().zip(cb).rev() {
                            stack.push(CmpItem::Trees(ta, tb));
                            stack.push(CmpItem::Values(qa, qb));
                        }
                    }
                    ord
                }
            };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for WTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for WTree {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for WTree {}

impl fmt::Debug for WTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for WTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sup {} [", self.shape())?;
        for (j, (q, t)) in self.children().iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{q} -> {t}")?;
        }
        f.write_str("]")
    }
}

pub(crate) fn tree_valid(f: &SplitContainer, t: &WTree) -> bool {
    let mut stack = alloc::vec![t];
    while let Some(t) = stack.pop() {
        if !f.shapes().contains(t.shape()) {
            return false;
        }
        let Ok(qs) = f.rec_list(t.shape()) else { return false };
        if qs.len() != t.children().len() || qs.iter().zip(t.children()).any(|(q, (k, _))| q != k) {
            return false;
        }
        stack.extend(t.children().iter().map(|(_, c)| c));
    }
    true
}

/// Trees of height at most `budget.depth`, ordered by height and then
/// structurally.
pub(crate) fn enumerate_trees(f: &SplitContainer, budget: Budget) -> Enumeration<Value> {
    let shapes = f.shapes().enumerate(budget);
    let mut truncated = shapes.truncated;
    let mut complete = shapes.complete;
    let mut info: Vec<(Value, Vec<Value>)> = Vec::new();
    for s in shapes.items {
        match f.rec_list(&s) {
            Ok(qs) => info.push((s, qs)),
            Err(_) => {
                truncated = true;
                complete = false;
            }
        }
    }
    info.sort();

    let mut out: Vec<WTree> = Vec::new();
    // Trees of height <= h - 1, structurally sorted, with their heights.
    let mut below: Vec<(WTree, usize)> = Vec::new();
    let mut last_level_nonempty = false;
    'levels: for h in 1..=budget.depth {
        let mut level = Vec::new();
        for (s, qs) in &info {
            if qs.is_empty() {
                if h == 1 {
                    level.push(WTree::sup_unchecked(s.clone(), Vec::new()));
                }
                continue;
            }
            if h == 1 || below.is_empty() {
                continue;
            }
            let mut digits = alloc::vec![0usize; qs.len()];
            loop {
                if digits.iter().any(|&d| below[d].1 == h - 1) {
                    let children = qs.iter().zip(&digits).map(|(q, &d)| (q.clone(), below[d].0.clone())).collect();
                    level.push(WTree::sup_unchecked(s.clone(), children));
                    if out.len() + level.len() > budget.count {
                        out.extend(level);
                        truncated = true;
                        complete = false;
                        break 'levels;
                    }
                }
                let mut j = qs.len();
                let mut done = true;
                while j > 0 {
                    j -= 1;
                    digits[j] += 1;
                    if digits[j] < below.len() {
                        done = false;
                        break;
                    }
                    digits[j] = 0;
                }
                if done {
                    break;
                }
            }
        }
        last_level_nonempty = !level.is_empty();
        below.extend(level.iter().map(|t| (t.clone(), h)));
        below.sort_by(|a, b| a.0.cmp(&b.0));
        out.extend(level);
    }
    let taller_exist = if budget.depth == 0 {
        info.iter().any(|(_, qs)| qs.is_empty())
    } else {
        last_level_nonempty && info.iter().any(|(_, qs)| !qs.is_empty())
    };
    if taller_exist {
        complete = false;
    }
    out.truncate(budget.count);
    Enumeration { items: out.into_iter().map(Value::Tree).collect(), complete, truncated }
}

/// The μ-container `W S Q ◁ Pos` over the parameter indices of `f`.
///
/// Rejects signatures where some probed shape has infinitely many recursive
/// positions, since trees must be materialised.
pub fn mu_container(f: &SplitContainer) -> Result<Container> {
    for s in f.shapes().enumerate(Budget::new(4, 256)).items {
        if !f.rec_positions(&s).is_finite() {
            return Err(Error::InfiniteRecursion(s));
        }
    }
    let sig = Arc::new(f.clone());
    let shapes = Domain::W(sig.clone());
    Ok(Container::from_fn(f.indices().clone(), shapes, move |i, w| {
        Domain::Pos(Arc::new(PosDomain { fixpoint: Fixpoint::Mu(sig.clone()), index: i, anchor: w.clone() }))
    }))
}

/// Every path to an `i`-position of `w`, shortlex. Errors if some parameter
/// domain is infinite.
pub fn pos_enumerate_w(w: &WTree, i: usize, f: &SplitContainer) -> Result<Vec<PosPath>> {
    pos_paths_w(w, i, f)
}

pub(crate) fn pos_paths_w(w: &WTree, i: usize, f: &SplitContainer) -> Result<Vec<PosPath>> {
    let mut out = Vec::new();
    let mut stack = alloc::vec![(w, Vec::<Value>::new())];
    while let Some((t, prefix)) = stack.pop() {
        let ps = f
            .params(i, t.shape())
            .finite_elements()
            .ok_or_else(|| Error::NotEnumerable(alloc::format!("positions at {}", t.shape())))?;
        out.extend(ps.into_iter().map(|p| PosPath { steps: prefix.clone(), index: i, position: p }));
        for (q, c) in t.children() {
            let mut next = prefix.clone();
            next.push(q.clone());
            stack.push((c, next));
        }
    }
    out.sort();
    Ok(out)
}

pub(crate) fn pos_paths_w_bounded(w: &WTree, i: usize, f: &SplitContainer, budget: Budget) -> Enumeration<PosPath> {
    let mut out = Vec::new();
    let mut complete = true;
    let mut truncated = false;
    let mut stack = alloc::vec![(w, Vec::<Value>::new())];
    while let Some((t, prefix)) = stack.pop() {
        let ps = f.params(i, t.shape()).enumerate(budget);
        if prefix.len() <= budget.depth {
            complete &= ps.complete;
            truncated |= ps.truncated;
            out.extend(ps.items.into_iter().map(|p| PosPath { steps: prefix.clone(), index: i, position: p }));
        } else if !ps.items.is_empty() || !ps.complete {
            complete = false;
        }
        for (q, c) in t.children() {
            let mut next = prefix.clone();
            next.push(q.clone());
            stack.push((c, next));
        }
    }
    out.sort();
    let over = out.len() > budget.count;
    out.truncate(budget.count);
    Enumeration { items: out, complete: complete && !over, truncated: truncated || over }
}

pub(crate) fn path_valid(f: &SplitContainer, w: &WTree, p: &PosPath) -> bool {
    let mut t = w;
    for q in &p.steps {
        match t.child(q) {
            Some(c) => t = c,
            None => return false,
        }
    }
    p.index < f.indices().len() && f.params(p.index, t.shape()).contains(&p.position)
}

/// Reads a path-indexed payload one level down: `b ↦ payload(below q b)`.
fn shifted(payload: &Payload, q: &Value) -> Payload {
    let (payload, q) = (payload.clone(), q.clone());
    Payload::oracle(move |i, b| {
        let b = b.as_path()?;
        payload.get(i, &Value::path(PosPath::below(q.clone(), b.clone())))
    })
}

/// `into : ⟦F⟧(X, ⟦W ◁ Pos⟧X) → ⟦W ◁ Pos⟧X`.
///
/// The new tree is `sup s (q ↦ shape of child q)`; its payload answers
/// `here p` from `g` and `below q b` from child `q`.
pub fn into(f: &SplitContainer, x: &FamilyAssignment, fe: FElement<ExtElement>) -> Result<ExtElement> {
    if x.assign.len() != f.indices().len() {
        return Err(Error::ArityMismatch { expected: f.indices().len(), found: x.assign.len() });
    }
    if !f.shapes().contains(&fe.shape) {
        return Err(Error::ShapeNotInDomain(fe.shape));
    }
    for (i, xi) in x.assign.iter().enumerate() {
        let Some(ps) = f.params(i, &fe.shape).finite_elements() else { continue };
        for p in ps {
            match fe.params.get(i, &p) {
                Some(v) if xi.contains(&v) => {}
                Some(v) => {
                    return Err(Error::IllTypedPayload {
                        index: i,
                        position: Value::path(PosPath::here(i, p)),
                        value: v,
                    })
                }
                None => return Err(Error::MissingPosition { index: i, position: Value::path(PosPath::here(i, p)) }),
            }
        }
    }
    let mut children = Vec::with_capacity(fe.rec.len());
    let mut subs = Vec::with_capacity(fe.rec.len());
    for (q, sub) in fe.rec {
        let t = sub.shape.as_tree().cloned().ok_or_else(|| Error::NotATree(sub.shape.clone()))?;
        children.push((q.clone(), t));
        subs.push((q, sub.payload));
    }
    let tree = WTree::sup(f, fe.shape, children)?;
    let g = fe.params;
    let payload = Payload::oracle(move |i, p| {
        let path = p.as_path()?;
        if path.index != i {
            return None;
        }
        match path.split_first() {
            None => g.get(i, &path.position),
            Some((q, rest)) => {
                let (_, sub) = subs.iter().find(|(k, _)| k == q)?;
                sub.get(i, &Value::path(rest))
            }
        }
    });
    Ok(ExtElement::new(Value::Tree(tree), payload))
}

/// The inverse of [`into`]: `(sup s t , k) ↦ (s , here ∘ k , q ↦ (t q , below q ∘ k))`.
pub fn out_of(e: &ExtElement) -> Result<FElement<ExtElement>> {
    let t = e.shape.as_tree().ok_or_else(|| Error::NotATree(e.shape.clone()))?;
    let k = e.payload.clone();
    let params = Payload::oracle(move |i, p| k.at_here(i, p));
    let rec = t
        .children()
        .iter()
        .map(|(q, c)| (q.clone(), ExtElement::new(Value::Tree(c.clone()), shifted(&e.payload, q))))
        .collect();
    Ok(FElement { shape: t.shape().clone(), params, rec })
}

pub type ActFn<Y> = Arc<dyn Fn(FElement<Y>) -> Y + Send + Sync>;

/// An `⟦F⟧(X, -)`-algebra with carrier `Y`.
pub struct Algebra<Y = Value> {
    /// When set, fold results are checked for membership.
    pub carrier: Option<Domain>,
    act: ActFn<Y>,
}

impl<Y> Clone for Algebra<Y> {
    fn clone(&self) -> Self {
        Algebra { carrier: self.carrier.clone(), act: self.act.clone() }
    }
}

impl<Y> Algebra<Y> {
    pub fn new<F>(act: F) -> Self
    where
        F: Fn(FElement<Y>) -> Y + Send + Sync + 'static,
    {
        Algebra { carrier: None, act: Arc::new(act) }
    }

    pub fn act(&self, fe: FElement<Y>) -> Y {
        (self.act)(fe)
    }
}

impl Algebra<Value> {
    pub fn with_carrier(mut self, carrier: Domain) -> Self {
        self.carrier = Some(carrier);
        self
    }
}

/// The unique algebra morphism `⟦W ◁ Pos⟧X → Y`:
/// `fold (sup s t , k) = act (s , here ∘ k , q ↦ fold (t q , below q ∘ k))`.
///
/// Runs bottom-up over an explicit node list, so tree height is not limited
/// by the call stack.
pub fn fold<Y>(_f: &SplitContainer, _x: &FamilyAssignment, alg: &Algebra<Y>, e: &ExtElement) -> Result<Y> {
    let root = e.shape.as_tree().ok_or_else(|| Error::NotATree(e.shape.clone()))?;
    // Pre-order node list; parents precede children.
    let mut nodes: Vec<(WTree, usize)> = alloc::vec![(root.clone(), usize::MAX)];
    let mut steps: Vec<(usize, Value)> = alloc::vec![(usize::MAX, Value::Unit)];
    let mut kids: Vec<Vec<usize>> = alloc::vec![Vec::new()];
    let mut j = 0;
    while j < nodes.len() {
        let t = nodes[j].0.clone();
        for (q, c) in t.children() {
            let id = nodes.len();
            nodes.push((c.clone(), j));
            steps.push((j, q.clone()));
            kids.push(Vec::new());
            kids[j].push(id);
        }
        j += 1;
    }
    let steps = Arc::new(steps);
    let mut results: Vec<Option<Y>> = (0..nodes.len()).map(|_| None).collect();
    for n in (0..nodes.len()).rev() {
        let t = &nodes[n].0;
        let rec =
            kids[n].iter().map(|&c| (steps[c].1.clone(), results[c].take().expect("children folded first"))).collect();
        let (arena, k) = (steps.clone(), e.payload.clone());
        let params = Payload::oracle(move |i, p| {
            let mut prefix = Vec::new();
            let mut cur = n;
            while cur != 0 {
                let (parent, q) = &arena[cur];
                prefix.push(q.clone());
                cur = *parent;
            }
            prefix.reverse();
            k.get(i, &Value::path(PosPath { steps: prefix, index: i, position: p.clone() }))
        });
        results[n] = Some(alg.act(FElement { shape: t.shape().clone(), params, rec }));
    }
    let out = results[0].take().expect("root folded");
    Ok(out)
}

/// Folds into a value carrier and checks the result against the carrier.
pub fn fold_checked(f: &SplitContainer, x: &FamilyAssignment, alg: &Algebra<Value>, e: &ExtElement) -> Result<Value> {
    let v = fold(f, x, alg, e)?;
    if let Some(c) = &alg.carrier {
        if !c.contains(&v) {
            return Err(Error::IllTypedPayload { index: 0, position: e.shape.clone(), value: v });
        }
    }
    Ok(v)
}

/// Which check a candidate failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeFailure {
    /// `candidate ∘ into ≠ act ∘ ⟦F⟧(X, candidate)` at the witness.
    Square,
    /// The square held everywhere but the candidate differs from `fold`.
    DisagreesWithFold,
}

#[derive(Clone, Debug)]
pub enum ProbeVerdict {
    Consistent,
    Violation { witness: Box<ExtElement>, failure: ProbeFailure },
}

impl ProbeVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ProbeVerdict::Consistent)
    }
}

/// Tests whether `candidate` is an algebra morphism on `samples` and all of
/// their subtrees, and if so whether it coincides with [`fold`].
///
/// Subelements are checked lowest first, so a perturbation is reported at
/// the smallest tree where it occurs.
pub fn uniqueness_probe<Y: PartialEq>(
    f: &SplitContainer,
    x: &FamilyAssignment,
    alg: &Algebra<Y>,
    candidate: &dyn Fn(&ExtElement) -> Y,
    samples: &[ExtElement],
) -> Result<ProbeVerdict> {
    let mut all: Vec<(usize, ExtElement)> = Vec::new();
    for s in samples {
        let mut stack = alloc::vec![s.clone()];
        while let Some(e) = stack.pop() {
            let h = e.shape.as_tree().ok_or_else(|| Error::NotATree(e.shape.clone()))?.height();
            let fe = out_of(&e)?;
            stack.extend(fe.rec.into_iter().map(|(_, c)| c));
            all.push((h, e));
        }
    }
    all.sort_by_key(|(h, _)| *h);
    for (_, e) in &all {
        let fe = out_of(e)?;
        let lhs = candidate(e);
        let rhs = alg.act(fe.map(|c| candidate(&c)));
        if lhs != rhs {
            return Ok(ProbeVerdict::Violation { witness: Box::new(e.clone()), failure: ProbeFailure::Square });
        }
    }
    for (_, e) in &all {
        if candidate(e) != fold(f, x, alg, e)? {
            return Ok(ProbeVerdict::Violation {
                witness: Box::new(e.clone()),
                failure: ProbeFailure::DisagreesWithFold,
            });
        }
    }
    Ok(ProbeVerdict::Consistent)
}
