//! Greatest fixed points: regular M-trees presented by finite coalgebra
//! machines, the ν-container `M S Q ◁ Pos`, `out`, `unfold`, generalised
//! path induction and the coalgebra-morphism check.

use alloc::{
    collections::{BTreeMap, BTreeSet},
    format,
    string::ToString,
    sync::Arc,
    vec::Vec,
};
use core::fmt;

use crate::bisim::{bisim_exact, classes, ExactBisim, Witness};
use crate::container::{
    ext_equal, Container, Discrepancy, ExtElement, ExtEquality, FElement, FamilyAssignment, Payload, SplitContainer,
};
use crate::domain::{Budget, Domain, Enumeration, Fixpoint, PosDomain, SeedPool};
use crate::error::Error;
use crate::value::{PosPath, Value};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MachineState {
    pub id: Arc<str>,
    pub shape: Value,
    /// Child state per recursive position, sorted by position.
    pub next: Vec<(Value, usize)>,
}

/// A finite set of states, each stepping to a shape and a child state per
/// recursive position. A state presents the regular tree obtained by
/// unrolling it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoalgebraMachine {
    name: Arc<str>,
    states: Vec<MachineState>,
}

/// One machine state: `(id, shape, [(position, target)])`.
pub type MachineRow<S> = (S, Value, Vec<(Value, S)>);

/// Reachable carrier values with shapes and transition indices.
type Explored = Vec<(Value, Value, Vec<(Value, usize)>)>;

impl CoalgebraMachine {
    /// Builds a machine from `(state, shape, [(position, target)])` rows.
    pub fn new<S: AsRef<str>>(name: &str, rows: Vec<MachineRow<S>>) -> Result<Self> {
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (k, (id, _, _)) in rows.iter().enumerate() {
            if index.insert(id.as_ref(), k).is_some() {
                return Err(Error::DuplicateState { machine: name.to_string(), state: id.as_ref().to_string() });
            }
        }
        let mut states = Vec::with_capacity(rows.len());
        for (id, shape, next) in &rows {
            let mut resolved = Vec::with_capacity(next.len());
            for (q, target) in next {
                let t = *index.get(target.as_ref()).ok_or_else(|| Error::UnknownState {
                    machine: name.to_string(),
                    state: target.as_ref().to_string(),
                })?;
                resolved.push((q.clone(), t));
            }
            resolved.sort();
            states.push(MachineState { id: Arc::from(id.as_ref()), shape: shape.clone(), next: resolved });
        }
        Ok(CoalgebraMachine { name: Arc::from(name), states })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[MachineState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.states.iter().position(|s| &*s.id == id)
    }

    /// Every state carries a shape of `f` and exactly one child per
    /// recursive position of that shape.
    pub fn validate(&self, f: &SplitContainer) -> Result<()> {
        for s in &self.states {
            if !f.shapes().contains(&s.shape) {
                return Err(Error::ShapeNotInDomain(s.shape.clone()));
            }
            let mut qs = f.rec_list(&s.shape)?;
            qs.sort();
            if qs.len() != s.next.len() || qs.iter().zip(&s.next).any(|(q, (k, _))| q != k) {
                return Err(Error::ChildrenMismatch { shape: s.shape.clone() });
            }
        }
        Ok(())
    }

    pub fn with_name(&self, name: &str) -> Self {
        CoalgebraMachine { name: Arc::from(name), states: self.states.clone() }
    }

    /// The same machine with states renamed `s0, s1, ...` in breadth-first
    /// order from `root`; unreachable states are dropped.
    pub fn canonical_from(&self, root: usize) -> (CoalgebraMachine, usize) {
        let mut order = alloc::vec![root];
        let mut seen = BTreeMap::new();
        seen.insert(root, 0usize);
        let mut j = 0;
        while j < order.len() {
            for (_, t) in &self.states[order[j]].next {
                if !seen.contains_key(t) {
                    seen.insert(*t, order.len());
                    order.push(*t);
                }
            }
            j += 1;
        }
        let states = order
            .iter()
            .enumerate()
            .map(|(k, &old)| {
                let s = &self.states[old];
                MachineState {
                    id: Arc::from(format!("s{k}").as_str()),
                    shape: s.shape.clone(),
                    next: s.next.iter().map(|(q, t)| (q.clone(), seen[t])).collect(),
                }
            })
            .collect();
        (CoalgebraMachine { name: self.name.clone(), states }, 0)
    }
}

/// Textual machine format: a `machine <name>` header, then one line per
/// state, `<state> : shape <value> ; <q> -> <state> ; ...`.
impl fmt::Display for CoalgebraMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "machine {}", self.name)?;
        for s in &self.states {
            write!(f, "{} : shape {}", s.id, s.shape)?;
            for (q, t) in &s.next {
                write!(f, " ; {} -> {}", q, self.states[*t].id)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A state of a machine: the regular M-tree it unrolls to.
///
/// `Eq`/`Ord` compare presentations; the semantic equality of seeds is
/// [`bisim_exact`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MSeed {
    machine: Arc<CoalgebraMachine>,
    state: usize,
}

impl MSeed {
    pub fn new(machine: Arc<CoalgebraMachine>, state: usize) -> Result<Self> {
        if state >= machine.len() {
            return Err(Error::UnknownState { machine: machine.name().to_string(), state: state.to_string() });
        }
        Ok(MSeed { machine, state })
    }

    pub fn named(machine: Arc<CoalgebraMachine>, id: &str) -> Result<Self> {
        let state = machine
            .state_index(id)
            .ok_or_else(|| Error::UnknownState { machine: machine.name().to_string(), state: id.to_string() })?;
        Ok(MSeed { machine, state })
    }

    pub fn machine(&self) -> &CoalgebraMachine {
        &self.machine
    }

    pub fn machine_arc(&self) -> &Arc<CoalgebraMachine> {
        &self.machine
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn id(&self) -> &str {
        &self.machine.states[self.state].id
    }

    /// `ξ₀`: the root shape.
    pub fn shape(&self) -> &Value {
        &self.machine.states[self.state].shape
    }

    /// `ξ₁`: the subtree at a recursive position.
    pub fn child(&self, q: &Value) -> Option<MSeed> {
        let s = &self.machine.states[self.state];
        s.next.iter().find(|(k, _)| k == q).map(|(_, t)| MSeed { machine: self.machine.clone(), state: *t })
    }

    pub fn children(&self) -> Vec<(Value, MSeed)> {
        self.machine.states[self.state]
            .next
            .iter()
            .map(|(q, t)| (q.clone(), MSeed { machine: self.machine.clone(), state: *t }))
            .collect()
    }

    /// Identity of the generated presentations: both seeds reach states with
    /// the same ids, shapes and transitions. Stronger than bisimilarity.
    pub fn same_presentation(&self, other: &MSeed) -> bool {
        let (ma, mb) = (&self.machine, &other.machine);
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![(self.state, other.state)];
        while let Some((a, b)) = stack.pop() {
            if !seen.insert((a, b)) {
                continue;
            }
            let (sa, sb) = (&ma.states[a], &mb.states[b]);
            if sa.id != sb.id || sa.shape != sb.shape || sa.next.len() != sb.next.len() {
                return false;
            }
            for ((qa, ta), (qb, tb)) in sa.next.iter().zip(&sb.next) {
                if qa != qb {
                    return false;
                }
                stack.push((*ta, *tb));
            }
        }
        true
    }
}

impl fmt::Display for MSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seed:{}.{}", self.machine.name, self.id())
    }
}

/// Named machines; registration is the only mutation.
#[derive(Clone, Debug, Default)]
pub struct MachineRegistry {
    machines: Vec<Arc<CoalgebraMachine>>,
}

impl MachineRegistry {
    pub fn new() -> Self {
        MachineRegistry::default()
    }

    pub fn register(&mut self, m: CoalgebraMachine) -> Result<Arc<CoalgebraMachine>> {
        if self.get(m.name()).is_some() {
            return Err(Error::DuplicateMachine(m.name().to_string()));
        }
        let m = Arc::new(m);
        self.machines.push(m.clone());
        Ok(m)
    }

    pub fn get(&self, name: &str) -> Option<&Arc<CoalgebraMachine>> {
        self.machines.iter().find(|m| m.name() == name)
    }

    pub fn machines(&self) -> &[Arc<CoalgebraMachine>] {
        &self.machines
    }

    /// All seeds, machine by machine in registration order.
    pub fn seeds(&self) -> Vec<MSeed> {
        self.machines.iter().flat_map(|m| (0..m.len()).map(move |k| MSeed { machine: m.clone(), state: k })).collect()
    }
}

pub(crate) fn enumerate_seeds(pool: &SeedPool, budget: Budget) -> Enumeration<Value> {
    let seeds: Vec<MSeed> =
        pool.registry.seeds().into_iter().filter(|s| s.machine.validate(&pool.signature).is_ok()).collect();
    let ids = classes(&seeds);
    let mut seen = BTreeSet::new();
    let mut items = Vec::new();
    let mut truncated = false;
    for (s, id) in seeds.into_iter().zip(ids) {
        if seen.insert(id) {
            if items.len() == budget.count {
                truncated = true;
                break;
            }
            items.push(Value::Seed(s));
        }
    }
    Enumeration { items, complete: false, truncated }
}

/// The ν-container `M S Q ◁ Pos` over the parameter indices of `f`.
/// Shapes enumerate the seeds registered in `registry`.
pub fn nu_container(f: &SplitContainer, registry: Arc<MachineRegistry>) -> Container {
    let sig = Arc::new(f.clone());
    let shapes = Domain::M(Arc::new(SeedPool { signature: sig.clone(), registry }));
    Container::from_fn(f.indices().clone(), shapes, move |i, m| {
        Domain::Pos(Arc::new(PosDomain { fixpoint: Fixpoint::Nu(sig.clone()), index: i, anchor: m.clone() }))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PosEval {
    Valid {
        shape: Value,
        position: Value,
    },
    /// The failing step; `steps.len()` means the final position.
    Invalid {
        step: usize,
    },
}

/// Walks `path` from `m` through the child map and checks the final
/// parameter position at the landing shape.
pub fn pos_eval(f: &SplitContainer, m: &MSeed, path: &PosPath) -> PosEval {
    let mut cur = m.clone();
    for (k, q) in path.steps.iter().enumerate() {
        match cur.child(q) {
            Some(c) => cur = c,
            None => return PosEval::Invalid { step: k },
        }
    }
    let shape = cur.shape().clone();
    if path.index < f.indices().len() && f.params(path.index, &shape).contains(&path.position) {
        PosEval::Valid { shape, position: path.position.clone() }
    } else {
        PosEval::Invalid { step: path.steps.len() }
    }
}

/// Paths to `i`-positions of `m` with at most `budget.depth` steps, shortlex.
pub fn pos_enumerate_m(f: &SplitContainer, m: &MSeed, i: usize, max_steps: usize) -> Enumeration<PosPath> {
    pos_paths_m(f, m, i, Budget::depth(max_steps))
}

pub(crate) fn pos_paths_m(f: &SplitContainer, m: &MSeed, i: usize, budget: Budget) -> Enumeration<PosPath> {
    let machine = m.machine();
    let mut out = Vec::new();
    let mut complete = true;
    let mut truncated = false;
    let mut level: Vec<(usize, Vec<Value>)> = alloc::vec![(m.state, Vec::new())];
    let mut steps = 0;
    loop {
        for (s, prefix) in &level {
            let ps = f.params(i, &machine.states[*s].shape).enumerate(budget);
            complete &= ps.complete;
            truncated |= ps.truncated;
            out.extend(ps.items.into_iter().map(|p| PosPath { steps: prefix.clone(), index: i, position: p }));
        }
        if out.len() > budget.count {
            truncated = true;
            break;
        }
        let mut next = Vec::new();
        for (s, prefix) in &level {
            for (q, t) in &machine.states[*s].next {
                let mut p = prefix.clone();
                p.push(q.clone());
                next.push((*t, p));
            }
        }
        if steps == budget.depth {
            // Anything deeper that carries an i-position makes the listing partial.
            let mut seen: BTreeSet<usize> = next.iter().map(|(t, _)| *t).collect();
            let mut stack: Vec<usize> = seen.iter().copied().collect();
            while let Some(s) = stack.pop() {
                let st = &machine.states[s];
                let ps = f.params(i, &st.shape);
                if !ps.is_finite() || ps.finite_elements().is_some_and(|v| !v.is_empty()) {
                    complete = false;
                    break;
                }
                for (_, t) in &st.next {
                    if seen.insert(*t) {
                        stack.push(*t);
                    }
                }
            }
            break;
        }
        if next.is_empty() {
            break;
        }
        if next.len() > budget.count {
            truncated = true;
            break;
        }
        level = next;
        steps += 1;
    }
    out.sort();
    let over = out.len() > budget.count;
    out.truncate(budget.count);
    Enumeration { items: out, complete: complete && !truncated && !over, truncated: truncated || over }
}

fn seed_of(e: &ExtElement) -> Result<&MSeed> {
    e.shape.as_seed().ok_or_else(|| Error::NotASeed(e.shape.clone()))
}

fn shifted(payload: &Payload, q: &Value) -> Payload {
    let (payload, q) = (payload.clone(), q.clone());
    Payload::oracle(move |i, b| {
        let b = b.as_path()?;
        payload.get(i, &Value::path(PosPath::below(q.clone(), b.clone())))
    })
}

/// `out : ⟦M ◁ Pos⟧X → ⟦F⟧(X, ⟦M ◁ Pos⟧X)`.
pub fn out(e: &ExtElement) -> Result<FElement<ExtElement>> {
    let m = seed_of(e)?;
    let k = e.payload.clone();
    let params = Payload::oracle(move |i, p| k.at_here(i, p));
    let rec = m.children().into_iter().map(|(q, c)| {
        let payload = shifted(&e.payload, &q);
        (q, ExtElement::new(Value::Seed(c), payload))
    });
    Ok(FElement { shape: m.shape().clone(), params, rec: rec.collect() })
}

/// The inverse of [`out`]: a fresh root state over the children's machines.
pub fn into_nu(f: &SplitContainer, fe: FElement<ExtElement>) -> Result<ExtElement> {
    if !f.shapes().contains(&fe.shape) {
        return Err(Error::ShapeNotInDomain(fe.shape));
    }
    let mut qs = f.rec_list(&fe.shape)?;
    qs.sort();
    let mut keys: Vec<&Value> = fe.rec.iter().map(|(q, _)| q).collect();
    keys.sort();
    if qs.len() != keys.len() || qs.iter().zip(&keys).any(|(a, b)| a != *b) {
        return Err(Error::ChildrenMismatch { shape: fe.shape });
    }
    let mut machines: Vec<Arc<CoalgebraMachine>> = Vec::new();
    let mut offsets = Vec::new();
    let mut states = alloc::vec![MachineState { id: Arc::from("into"), shape: fe.shape.clone(), next: Vec::new() }];
    let mut root_next = Vec::new();
    for (q, sub) in &fe.rec {
        let s = seed_of(sub)?;
        let k = match machines.iter().position(|m| Arc::ptr_eq(m, &s.machine)) {
            Some(k) => k,
            None => {
                let off = states.len();
                let k = machines.len();
                for st in s.machine.states() {
                    states.push(MachineState {
                        id: Arc::from(format!("m{k}_{}", st.id).as_str()),
                        shape: st.shape.clone(),
                        next: st.next.iter().map(|(q, t)| (q.clone(), off + t)).collect(),
                    });
                }
                machines.push(s.machine.clone());
                offsets.push(off);
                k
            }
        };
        root_next.push((q.clone(), offsets[k] + s.state));
    }
    root_next.sort();
    states[0].next = root_next;
    let machine = Arc::new(CoalgebraMachine { name: Arc::from("into"), states });
    let subs: Vec<(Value, Payload)> = fe.rec.iter().map(|(q, e)| (q.clone(), e.payload.clone())).collect();
    let g = fe.params;
    let payload = Payload::oracle(move |i, p| {
        let path = p.as_path()?;
        if path.index != i {
            return None;
        }
        match path.split_first() {
            None => g.get(i, &path.position),
            Some((q, rest)) => subs.iter().find(|(k, _)| k == q)?.1.get(i, &Value::path(rest)),
        }
    });
    Ok(ExtElement::new(Value::Seed(MSeed { machine, state: 0 }), payload))
}

type ShapeFn = Arc<dyn Fn(&Value) -> Value + Send + Sync>;
type ParamFn = Arc<dyn Fn(&Value, usize, &Value) -> Value + Send + Sync>;
type NextFn = Arc<dyn Fn(&Value, &Value) -> Value + Send + Sync>;

/// `β : Y → ⟦F⟧(X, Y)` by components: shape `βs`, parameters `βg` and
/// successors `βh`.
#[derive(Clone)]
pub struct Coalgebra {
    pub carrier: Domain,
    shape: ShapeFn,
    param: ParamFn,
    next: NextFn,
}

impl Coalgebra {
    pub fn new<S, G, H>(carrier: Domain, shape: S, param: G, next: H) -> Self
    where
        S: Fn(&Value) -> Value + Send + Sync + 'static,
        G: Fn(&Value, usize, &Value) -> Value + Send + Sync + 'static,
        H: Fn(&Value, &Value) -> Value + Send + Sync + 'static,
    {
        Coalgebra { carrier, shape: Arc::new(shape), param: Arc::new(param), next: Arc::new(next) }
    }

    pub fn shape(&self, y: &Value) -> Value {
        (self.shape)(y)
    }

    pub fn param(&self, y: &Value, i: usize, p: &Value) -> Value {
        (self.param)(y, i, p)
    }

    pub fn next(&self, y: &Value, q: &Value) -> Value {
        (self.next)(y, q)
    }
}

pub const DEFAULT_STATE_CAP: usize = 10_000;

/// Carrier values reachable from `y` through `βh`, breadth first, with
/// the transition table. Validates every component on the way.
fn explore(f: &SplitContainer, co: &Coalgebra, y: &Value, cap: usize) -> Result<Explored> {
    if !co.carrier.contains(y) {
        return Err(Error::IllTypedCoalgebra { at: y.clone(), detail: "not in the carrier".to_string() });
    }
    let mut index: BTreeMap<Value, usize> = BTreeMap::new();
    let mut order = alloc::vec![y.clone()];
    index.insert(y.clone(), 0);
    let mut rows = Vec::new();
    let mut j = 0;
    while j < order.len() {
        let cur = order[j].clone();
        let s = co.shape(&cur);
        if !f.shapes().contains(&s) {
            return Err(Error::IllTypedCoalgebra { at: cur, detail: format!("shape {s} is not in the shape domain") });
        }
        let mut next = Vec::new();
        for q in f.rec_list(&s)? {
            let y2 = co.next(&cur, &q);
            if !co.carrier.contains(&y2) {
                return Err(Error::IllTypedCoalgebra {
                    at: cur,
                    detail: format!("successor {y2} at {q} is not in the carrier"),
                });
            }
            let t = match index.get(&y2) {
                Some(t) => *t,
                None => {
                    if order.len() == cap {
                        return Err(Error::NonRegular { cap });
                    }
                    index.insert(y2.clone(), order.len());
                    order.push(y2);
                    order.len() - 1
                }
            };
            next.push((q, t));
        }
        next.sort();
        rows.push((cur, s, next));
        j += 1;
    }
    Ok(rows)
}

/// The carrier values reachable from `y`.
pub fn reachable(f: &SplitContainer, co: &Coalgebra, y: &Value, cap: usize) -> Result<Vec<Value>> {
    Ok(explore(f, co, y, cap)?.into_iter().map(|(y, _, _)| y).collect())
}

/// `unfold : Y → ⟦M ◁ Pos⟧X`, the unique coalgebra morphism.
///
/// The seed is the machine on the values reachable from `y` (states named
/// by the canonical rendering of their carrier value), stepping by
/// `(βs, βh)`. The payload walks a path through `βh` and reads `βg` at the
/// landing value. Fails with [`Error::NonRegular`] past `DEFAULT_STATE_CAP`.
pub fn unfold(f: &SplitContainer, co: &Coalgebra, y: &Value) -> Result<ExtElement> {
    unfold_capped(f, co, y, DEFAULT_STATE_CAP)
}

pub fn unfold_capped(f: &SplitContainer, co: &Coalgebra, y: &Value, cap: usize) -> Result<ExtElement> {
    let rows = explore(f, co, y, cap)?;
    let mut used = BTreeSet::new();
    let states = rows
        .into_iter()
        .enumerate()
        .map(|(k, (y, shape, next))| {
            let mut id = y.to_string();
            if !used.insert(id.clone()) {
                id = format!("{id}#{k}");
                used.insert(id.clone());
            }
            MachineState { id: Arc::from(id.as_str()), shape, next }
        })
        .collect();
    let machine = Arc::new(CoalgebraMachine { name: Arc::from("unfold"), states });
    let (sig, co, root) = (f.clone(), co.clone(), y.clone());
    let payload = Payload::oracle(move |i, p| {
        let path = p.as_path()?;
        if path.index != i {
            return None;
        }
        let mut cur = root.clone();
        for q in &path.steps {
            if !sig.rec_positions(&co.shape(&cur)).contains(q) {
                return None;
            }
            cur = co.next(&cur, q);
        }
        if i >= sig.indices().len() || !sig.params(i, &co.shape(&cur)).contains(&path.position) {
            return None;
        }
        Some(co.param(&cur, i, &path.position))
    });
    Ok(ExtElement::new(Value::Seed(MSeed { machine, state: 0 }), payload))
}

type MapFn = Arc<dyn Fn(&Value) -> MSeed + Send + Sync>;
type LiftFn = Arc<dyn Fn(&Value, &Value) -> Value + Send + Sync>;

/// A map `D → M` with, for each `d` and recursive position `q`, a lift
/// `d' = lift(d, q)` such that `map d'` is the child `q` of `map d`.
#[derive(Clone)]
pub struct Retraction {
    map: MapFn,
    lift: LiftFn,
}

impl Retraction {
    pub fn new<F, L>(map: F, lift: L) -> Self
    where
        F: Fn(&Value) -> MSeed + Send + Sync + 'static,
        L: Fn(&Value, &Value) -> Value + Send + Sync + 'static,
    {
        Retraction { map: Arc::new(map), lift: Arc::new(lift) }
    }

    /// `D = M` itself, `lift = ξ₁`.
    pub fn identity() -> Self {
        Retraction::new(
            |d| d.as_seed().cloned().expect("identity retraction on seeds"),
            |d, q| Value::Seed(d.as_seed().and_then(|m| m.child(q)).expect("valid child")),
        )
    }

    pub fn map(&self, d: &Value) -> MSeed {
        (self.map)(d)
    }

    pub fn lift(&self, d: &Value, q: &Value) -> Value {
        (self.lift)(d, q)
    }
}

/// Generalised path induction over a retraction: `here p` at `d` goes to
/// `on_here(d, i, p)`, `below q b` at `d` to `on_below(d, q, result at
/// (lift d q, b))`. The commuting evidence is checked with [`bisim_exact`]
/// at every step taken.
pub fn pos_induct<A>(
    f: &SplitContainer,
    r: &Retraction,
    on_here: &dyn Fn(&Value, usize, &Value) -> A,
    on_below: &dyn Fn(&Value, &Value, A) -> A,
    d: &Value,
    path: &PosPath,
) -> Result<A> {
    let mut trail = Vec::with_capacity(path.steps.len());
    let mut cur = d.clone();
    for (k, q) in path.steps.iter().enumerate() {
        let child = r.map(&cur).child(q).ok_or(Error::InvalidPath { step: k })?;
        let lifted = r.lift(&cur, q);
        if !matches!(bisim_exact(&r.map(&lifted), &child), ExactBisim::Equal) {
            return Err(Error::RetractionFailure { point: cur, position: q.clone() });
        }
        trail.push((cur, q));
        cur = lifted;
    }
    let landing = r.map(&cur);
    if path.index >= f.indices().len() || !f.params(path.index, landing.shape()).contains(&path.position) {
        return Err(Error::InvalidPath { step: path.steps.len() });
    }
    let mut acc = on_here(&cur, path.index, &path.position);
    for (dk, q) in trail.into_iter().rev() {
        acc = on_below(&dk, q, acc);
    }
    Ok(acc)
}

/// Components of the square `out ∘ candidate = ⟦F⟧(X, candidate) ∘ β`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Comm {
    /// Root shape equals `βs y`.
    Shape,
    /// Children bisimilar to the candidate at `βh y q`.
    Children,
    /// `here` payloads equal `βg y`.
    Here,
    /// `below q b` payloads equal the candidate's at `βh y q`.
    Below,
    /// All four held, but the candidate differs from `unfold`.
    Final,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    Node(Witness),
    Position(PosPath),
    Shape { found: Value, expected: Value },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommStatus {
    Holds,
    Fails(Evidence),
}

impl CommStatus {
    pub fn holds(&self) -> bool {
        matches!(self, CommStatus::Holds)
    }
}

/// Per-value evidence for the four square components. `children`,
/// `here` and `below` are only evaluated when `shape` holds, since they
/// compare along the shape identification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareWitness {
    pub at: Value,
    pub shape: CommStatus,
    pub children: CommStatus,
    pub here: CommStatus,
    pub below: CommStatus,
}

impl SquareWitness {
    pub fn first_failure(&self) -> Option<(Comm, &Evidence)> {
        [
            (Comm::Shape, &self.shape),
            (Comm::Children, &self.children),
            (Comm::Here, &self.here),
            (Comm::Below, &self.below),
        ]
        .into_iter()
        .find_map(|(c, s)| match s {
            CommStatus::Fails(e) => Some((c, e)),
            CommStatus::Holds => None,
        })
    }
}

/// Checks the square components at `y`; payload comparisons cover paths
/// with at most `budget.depth` steps.
pub fn square_witness(
    f: &SplitContainer,
    co: &Coalgebra,
    candidate: &dyn Fn(&Value) -> ExtElement,
    y: &Value,
    budget: Budget,
) -> Result<SquareWitness> {
    let here_unchecked = CommStatus::Holds;
    let c = candidate(y);
    let mut w = SquareWitness {
        at: y.clone(),
        shape: CommStatus::Holds,
        children: CommStatus::Holds,
        here: here_unchecked.clone(),
        below: here_unchecked,
    };
    let expected = co.shape(y);
    let Some(seed) = c.shape.as_seed() else {
        w.shape = CommStatus::Fails(Evidence::Shape { found: c.shape.clone(), expected });
        return Ok(w);
    };
    if seed.shape() != &expected {
        w.shape = CommStatus::Fails(Evidence::Shape { found: seed.shape().clone(), expected });
        return Ok(w);
    }
    let qs = f.rec_list(&expected)?;
    for q in &qs {
        let other = candidate(&co.next(y, q));
        let Some(other_seed) = other.shape.as_seed() else { continue };
        let verdict = match seed.child(q) {
            Some(child) => bisim_exact(&child, other_seed),
            None => ExactBisim::Distinct(Witness {
                steps: Vec::new(),
                left: seed.shape().clone(),
                right: seed.shape().clone(),
            }),
        };
        if let ExactBisim::Distinct(mut wit) = verdict {
            wit.steps.insert(0, q.clone());
            w.children = CommStatus::Fails(Evidence::Node(wit));
            break;
        }
    }
    'here: for i in 0..f.indices().len() {
        let ps = f.params(i, &expected).enumerate(budget);
        for p in ps.items {
            let path = PosPath::here(i, p.clone());
            let got = c.payload.get(i, &Value::path(path.clone()));
            let want = co.param(y, i, &p);
            if !got.is_some_and(|g| g.semantic_eq(&want)) {
                w.here = CommStatus::Fails(Evidence::Position(path));
                break 'here;
            }
        }
    }
    if budget.depth > 0 {
        'below: for q in &qs {
            let other = candidate(&co.next(y, q));
            let Some(child) = seed.child(q) else { continue };
            for i in 0..f.indices().len() {
                for b in pos_paths_m(f, &child, i, Budget::new(budget.depth - 1, budget.count)).items {
                    let full = PosPath::below(q.clone(), b.clone());
                    let got = c.payload.get(i, &Value::path(full.clone()));
                    let want = other.payload.get(i, &Value::path(b));
                    let same = match (got, want) {
                        (Some(a), Some(b)) => a.semantic_eq(&b),
                        _ => false,
                    };
                    if !same {
                        w.below = CommStatus::Fails(Evidence::Position(full));
                        break 'below;
                    }
                }
            }
        }
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismVerdict {
    Consistent,
    Violation { component: Comm, at: Value, evidence: Evidence },
}

impl MorphismVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, MorphismVerdict::Consistent)
    }
}

/// Checks that `candidate` is a coalgebra morphism on every value
/// reachable from `y`, and then that it agrees with [`unfold`] there.
pub fn coalg_morphism_check(
    f: &SplitContainer,
    x: &FamilyAssignment,
    co: &Coalgebra,
    candidate: &dyn Fn(&Value) -> ExtElement,
    y: &Value,
    budget: Budget,
) -> Result<MorphismVerdict> {
    let ys = reachable(f, co, y, DEFAULT_STATE_CAP)?;
    for yk in &ys {
        let w = square_witness(f, co, candidate, yk, budget)?;
        if let Some((component, evidence)) = w.first_failure() {
            return Ok(MorphismVerdict::Violation { component, at: yk.clone(), evidence: evidence.clone() });
        }
    }
    let nu = nu_container(f, Arc::new(MachineRegistry::new()));
    for yk in &ys {
        let c = candidate(yk);
        let u = unfold(f, co, yk)?;
        if let ExtEquality::Distinct(d) = ext_equal(&nu, x, &c, &u, budget) {
            let evidence = match d {
                Discrepancy::Shape => Evidence::Shape { found: c.shape.clone(), expected: u.shape.clone() },
                Discrepancy::Position { position, .. } => match position {
                    Value::Path(p) => Evidence::Position((*p).clone()),
                    other => Evidence::Shape { found: other, expected: Value::Unit },
                },
            };
            return Ok(MorphismVerdict::Violation { component: Comm::Final, at: yk.clone(), evidence });
        }
    }
    Ok(MorphismVerdict::Consistent)
}

/// Coalgebra on the seeds of `f`: `βs = ξ₀`, `βh = ξ₁`, parameters from
/// `param`.
pub fn seed_coalgebra<G>(f: &SplitContainer, param: G) -> Coalgebra
where
    G: Fn(&Value, usize, &Value) -> Value + Send + Sync + 'static,
{
    let pool = SeedPool { signature: Arc::new(f.clone()), registry: Arc::new(MachineRegistry::new()) };
    Coalgebra::new(
        Domain::M(Arc::new(pool)),
        |y| y.as_seed().map(|s| s.shape().clone()).unwrap_or(Value::Unit),
        param,
        |y, q| y.as_seed().and_then(|s| s.child(q)).map(Value::Seed).unwrap_or(Value::Unit),
    )
}
