//! Executable isomorphism suites for an elaborated declaration.
//!
//! Each suite compares the engine against the [`oracle`](crate::oracle) and
//! checks the fixed-point laws on enumerated elements: adequacy of the
//! container presentation, Lambek round trips, the functor laws, the fold
//! square and uniqueness probe (`mu`), and for `nu` the agreement of the
//! two bisimulation checks, the truncation classes, the unfold child law
//! and the position counts.

use alloc::{
    collections::BTreeSet,
    format,
    string::{String, ToString},
    sync::Arc,
    vec::Vec,
};
use core::fmt;

use crate::bisim::{bisim_bounded, bisim_exact, BoundedBisim, ExactBisim};
use crate::container::{
    ext_enumerate, ext_equal, extend_mor, split_element, Container, ExtElement, ExtEquality, FElement,
    FamilyAssignment, FamilyMorphism, Payload, ValueFn,
};
use crate::domain::{Budget, Domain};
use crate::elaborator::{Elaboration, Fixity};
use crate::m::{self, CoalgebraMachine, MSeed, MachineRegistry, MachineRow, PosEval};
use crate::oracle::{self, Env, SemValue};
use crate::value::Value;
use crate::w::{self, Algebra};

/// Budgets for a suite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsoBudget {
    /// Tree height for `mu` enumeration.
    pub height: usize,
    /// Step budget for path-indexed comparisons.
    pub paths: usize,
    /// Bisimulation depth.
    pub depth: usize,
    /// Cap on enumerated elements.
    pub count: usize,
}

impl Default for IsoBudget {
    fn default() -> Self {
        IsoBudget { height: 6, paths: 16, depth: 16, count: Budget::DEFAULT_COUNT }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Summary on success, witness on failure.
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn record(&mut self, name: &'static str, r: Result<String, String>) {
        let (passed, detail) = match r {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(CheckOutcome { name, passed, detail });
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        let failed = self.failures().count();
        if failed == 0 {
            writeln!(f, "all {} checks passed", self.checks.len())
        } else {
            writeln!(f, "{failed} of {} checks failed", self.checks.len())
        }
    }
}

type Check = Result<String, String>;

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Runs the suite matching the declaration's fixity. `registry` supplies the
/// machines for `nu`; when it is empty, all machines with at most two
/// states over the signature are used.
pub fn check_iso(
    elab: &Elaboration,
    x: &FamilyAssignment,
    registry: &MachineRegistry,
    budget: IsoBudget,
) -> SuiteReport {
    match elab.decl.fixity {
        Fixity::Mu => check_mu(elab, x, budget),
        Fixity::Nu => check_nu(elab, x, registry, budget),
    }
}

fn param_env(elab: &Elaboration, x: &FamilyAssignment) -> Result<Env, String> {
    Env::new(&elab.decl.params, x).map_err(err)
}

/// Distinct atoms standing in for the recursive argument of the body.
fn rec_atoms() -> Vec<Value> {
    alloc::vec![Value::atom("y0"), Value::atom("y1")]
}

/// The body's extension against one application of the oracle.
pub fn body_adequacy(elab: &Elaboration, x: &FamilyAssignment, budget: IsoBudget) -> Check {
    let env = param_env(elab, x)?;
    let ys = rec_atoms();
    let rec_set: Vec<SemValue> = ys.iter().cloned().map(SemValue::Leaf).collect();
    let expected: Vec<Value> = oracle::semantic_enumerate(&elab.decl.body, &env, &rec_set)
        .map_err(err)?
        .iter()
        .map(SemValue::to_value)
        .collect();
    let mut assign = x.assign.clone();
    assign.truncate(elab.decl.params.len());
    assign.push(Domain::atoms(&["y0", "y1"]));
    let xy = FamilyAssignment::new(assign);
    let got = ext_enumerate(&elab.body, &xy, Budget::new(budget.height, budget.count)).map_err(err)?;
    let sig = &elab.signature;
    let mut terms = BTreeSet::new();
    for e in &got.items {
        let fe = split_element(sig, e).map_err(err)?;
        let t = elab.decode(&fe).map_err(err)?;
        if !terms.insert(t.clone()) {
            return Err(format!("two elements decode to {t}"));
        }
    }
    let want: BTreeSet<Value> = expected.iter().cloned().collect();
    if terms != want || expected.len() != got.items.len() {
        let extra = terms.difference(&want).next().map(|v| format!("engine-only {v}"));
        let missing = want.difference(&terms).next().map(|v| format!("oracle-only {v}"));
        return Err(format!(
            "engine has {} elements, oracle {}; {}",
            got.items.len(),
            expected.len(),
            extra.or(missing).unwrap_or_default()
        ));
    }
    Ok(format!("{} elements in bijection", expected.len()))
}

/// Rotates every listed `X i` by one, and the constant map to its first
/// element; used as sample morphisms for the functor laws.
fn sample_morphisms(x: &FamilyAssignment, arity: usize) -> (FamilyMorphism, FamilyMorphism) {
    let mut rot: Vec<ValueFn> = Vec::new();
    let mut first: Vec<ValueFn> = Vec::new();
    for i in 0..arity {
        let xs: Vec<Value> = x.assign.get(i).and_then(Domain::finite_elements).unwrap_or_default();
        let xs = Arc::new(xs);
        let a = xs.clone();
        rot.push(Arc::new(move |v: &Value| match a.iter().position(|w| w == v) {
            Some(k) => a[(k + 1) % a.len()].clone(),
            None => v.clone(),
        }));
        first.push(Arc::new(move |v: &Value| xs.first().cloned().unwrap_or_else(|| v.clone())));
    }
    (FamilyMorphism { maps: rot }, FamilyMorphism { maps: first })
}

fn not_distinct(
    c: &Container,
    x: &FamilyAssignment,
    a: &ExtElement,
    b: &ExtElement,
    budget: Budget,
) -> Result<(), String> {
    match ext_equal(c, x, a, b, budget) {
        ExtEquality::Distinct(d) => Err(format!("{} differs at {d:?}", a.shape)),
        _ => Ok(()),
    }
}

/// `⟦c⟧ id = id` and `⟦c⟧(g ∘ f) = ⟦c⟧ g ∘ ⟦c⟧ f` on `samples`.
pub fn functor_laws(c: &Container, x: &FamilyAssignment, samples: &[ExtElement], budget: Budget) -> Check {
    let arity = c.indices().len();
    let id = FamilyMorphism::identity(arity);
    let (f, g) = sample_morphisms(x, arity);
    let gf = g.after(&f);
    for e in samples {
        let same = extend_mor(c, &id, e).map_err(err)?;
        not_distinct(c, x, &same, e, budget).map_err(|w| format!("identity law: {w}"))?;
        let lhs = extend_mor(c, &gf, e).map_err(err)?;
        let rhs = extend_mor(c, &g, &extend_mor(c, &f, e).map_err(err)?).map_err(err)?;
        not_distinct(c, x, &lhs, &rhs, budget).map_err(|w| format!("composition law: {w}"))?;
        let lhs = extend_mor(c, &f.after(&f), e).map_err(err)?;
        let rhs = extend_mor(c, &f, &extend_mor(c, &f, e).map_err(err)?).map_err(err)?;
        not_distinct(c, x, &lhs, &rhs, budget).map_err(|w| format!("composition law: {w}"))?;
    }
    Ok(format!("{} samples", samples.len()))
}

fn check_mu(elab: &Elaboration, x: &FamilyAssignment, budget: IsoBudget) -> SuiteReport {
    let mut report = SuiteReport::default();
    report.record("body-adequacy", body_adequacy(elab, x, budget));
    let elements = match ext_enumerate(&elab.fixed, x, Budget::new(budget.height, budget.count)) {
        Ok(e) => e.items,
        Err(e) => {
            report.record("enumerate", Err(err(e)));
            return report;
        }
    };
    report.record("mu-adequacy", mu_adequacy(elab, x, &elements, budget));
    report.record("lambek-mu", lambek_mu(elab, x, &elements));
    report.record("path-counts-mu", path_counts_mu(elab, budget));
    report.record("fold-uniqueness", fold_uniqueness(elab, x, &elements));
    let exact = Budget::new(budget.height, budget.count);
    report.record("functor-laws", functor_laws(&elab.fixed, x, &elements, exact));
    report
}

/// The fixed point's extension at height `h` against `F^h(∅)`.
pub fn mu_adequacy(elab: &Elaboration, x: &FamilyAssignment, elements: &[ExtElement], budget: IsoBudget) -> Check {
    let env = param_env(elab, x)?;
    let oracle: Vec<Value> =
        oracle::mu_iterate(&elab.decl.body, &env, budget.height).map_err(err)?.iter().map(SemValue::to_value).collect();
    let want: BTreeSet<Value> = oracle.iter().cloned().collect();
    let mut got = BTreeSet::new();
    for e in elements {
        let t = elab.mu_to_term(x, e).map_err(err)?;
        if !want.contains(&t) {
            return Err(format!("engine element {t} is not in the oracle set"));
        }
        if !got.insert(t.clone()) {
            return Err(format!("two engine elements denote {t}"));
        }
    }
    if got.len() != want.len() {
        let missing = want.difference(&got).next().map(|v| v.to_string()).unwrap_or_default();
        return Err(format!("engine has {} elements, oracle {}; missing {missing}", got.len(), want.len()));
    }
    Ok(format!("{} elements in bijection at height {}", got.len(), budget.height))
}

/// `into ∘ out = id` on elements and `out ∘ into = id` on their unfoldings.
pub fn lambek_mu(elab: &Elaboration, x: &FamilyAssignment, elements: &[ExtElement]) -> Check {
    let f = &elab.signature;
    let exact = Budget::new(usize::MAX, usize::MAX);
    for e in elements {
        let fe = w::out_of(e).map_err(err)?;
        let back = w::into(f, x, fe.clone()).map_err(err)?;
        match ext_equal(&elab.fixed, x, &back, e, exact) {
            ExtEquality::Equal => {}
            other => return Err(format!("into (out e) vs e at {}: {other:?}", e.shape)),
        }
        let again = w::out_of(&back).map_err(err)?;
        same_unfolding(f, &again, &fe, |a, b| matches!(ext_equal(&elab.fixed, x, a, b, exact), ExtEquality::Equal))
            .map_err(|w| format!("out (into u) vs u at {}: {w}", e.shape))?;
    }
    Ok(format!("{} elements, both composites", elements.len()))
}

/// Compares two elements of `⟦F⟧(X, Y)` in split form: shapes, `here`
/// parameters and recursive components.
fn same_unfolding(
    f: &crate::container::SplitContainer,
    a: &FElement<ExtElement>,
    b: &FElement<ExtElement>,
    eq: impl Fn(&ExtElement, &ExtElement) -> bool,
) -> Result<(), String> {
    if a.shape != b.shape {
        return Err("shapes differ".into());
    }
    for i in 0..f.indices().len() {
        for p in f.params(i, &a.shape).enumerate(Budget::depth(0)).items {
            let (u, v) = (a.params.get(i, &p), b.params.get(i, &p));
            if u != v {
                return Err(format!("parameter {i} at {p}"));
            }
        }
    }
    if a.rec.len() != b.rec.len() {
        return Err("recursive components differ".into());
    }
    for ((q, u), (r, v)) in a.rec.iter().zip(&b.rec) {
        if q != r || !eq(u, v) {
            return Err(format!("recursive component {q}"));
        }
    }
    Ok(())
}

/// Marker atom for parameter `i`.
fn marker(i: usize) -> Value {
    Value::atom(&format!("p{i}"))
}

fn count_occurrences(v: &Value, needle: &Value) -> usize {
    let mut stack = alloc::vec![v];
    let mut n = 0;
    while let Some(v) = stack.pop() {
        if v == needle {
            n += 1;
            continue;
        }
        match v {
            Value::Inl(a) | Value::Inr(a) => stack.push(a),
            Value::Pair(a, b) => {
                stack.push(a);
                stack.push(b);
            }
            Value::Table(items) => stack.extend(items.iter()),
            _ => {}
        }
    }
    n
}

/// With each parameter a single marker, the number of `Pos` paths at index
/// `i` equals the number of `i`-markers in the oracle's term.
pub fn path_counts_mu(elab: &Elaboration, budget: IsoBudget) -> Check {
    let n = elab.decl.params.len();
    let markers = FamilyAssignment::new((0..n).map(|i| Domain::atoms(&[format!("p{i}")])).collect());
    let env = Env::new(&elab.decl.params, &markers).map_err(err)?;
    let terms: BTreeSet<Value> =
        oracle::mu_iterate(&elab.decl.body, &env, budget.height).map_err(err)?.iter().map(SemValue::to_value).collect();
    let elements = ext_enumerate(&elab.fixed, &markers, Budget::new(budget.height, budget.count)).map_err(err)?;
    for el in &elements.items {
        let tree = el.shape.as_tree().ok_or("shape is not a tree")?;
        let term = elab.mu_to_term(&markers, el).map_err(err)?;
        if !terms.contains(&term) {
            return Err(format!("{term} is not an oracle term"));
        }
        for i in 0..n {
            let paths = w::pos_enumerate_w(tree, i, &elab.signature).map_err(err)?.len();
            let expected = count_occurrences(&term, &marker(i));
            if paths != expected {
                return Err(format!("{}: {paths} paths at index {i}, oracle term has {expected}", el.shape));
            }
        }
    }
    Ok(format!("{} shapes", elements.items.len()))
}

/// The fold square and uniqueness probe for the term-building algebra, and
/// for the node-counting algebra against a direct count.
pub fn fold_uniqueness(elab: &Elaboration, x: &FamilyAssignment, elements: &[ExtElement]) -> Check {
    let this = elab.clone();
    let decode: Algebra<Option<Value>> = Algebra::new(move |fe: FElement<Option<Value>>| {
        let rec: Option<Vec<(Value, Value)>> = fe.rec.into_iter().map(|(q, v)| v.map(|v| (q, v))).collect();
        this.decode(&FElement { shape: fe.shape, params: fe.params, rec: rec? }).ok()
    });
    let term = |e: &ExtElement| elab.mu_to_term(x, e).ok();
    let v = w::uniqueness_probe(&elab.signature, x, &decode, &term, elements).map_err(err)?;
    if !v.is_consistent() {
        return Err(format!("term algebra: {v:?}"));
    }
    let size: Algebra<usize> = Algebra::new(|fe: FElement<usize>| 1 + fe.rec.iter().map(|(_, n)| n).sum::<usize>());
    let count = |e: &ExtElement| e.shape.as_tree().map_or(0, |t| t.node_count());
    let v = w::uniqueness_probe(&elab.signature, x, &size, &count, elements).map_err(err)?;
    if !v.is_consistent() {
        return Err(format!("size algebra: {v:?}"));
    }
    Ok(format!("{} samples, two algebras", elements.len()))
}

/// All machines with one or two states over the finite shapes of the
/// signature, at most `cap` of them.
pub fn fixture_machines(elab: &Elaboration, cap: usize) -> Vec<CoalgebraMachine> {
    let f = &elab.signature;
    let Some(shapes) = f.shapes().finite_elements() else { return Vec::new() };
    let mut out = Vec::new();
    for n in 1..=2usize {
        // Each state picks a shape and a target per recursive position.
        let mut per_state: Vec<(Value, Vec<Value>, usize)> = Vec::new();
        for s in &shapes {
            let Ok(qs) = f.rec_list(s) else { continue };
            let combos = n.checked_pow(qs.len() as u32).unwrap_or(usize::MAX);
            if combos <= cap {
                per_state.push((s.clone(), qs, combos));
            }
        }
        let choices: Vec<(Value, Vec<(Value, usize)>)> = per_state
            .iter()
            .flat_map(|(s, qs, combos)| {
                (0..*combos).map(move |mut c| {
                    let mut next = Vec::new();
                    for q in qs {
                        next.push((q.clone(), c % n));
                        c /= n;
                    }
                    (s.clone(), next)
                })
            })
            .collect();
        let mut idx = alloc::vec![0usize; n];
        loop {
            if out.len() >= cap || choices.is_empty() {
                return out;
            }
            let rows: Vec<MachineRow<String>> = (0..n)
                .map(|k| {
                    let (s, next) = &choices[idx[k]];
                    (format!("s{k}"), s.clone(), next.iter().map(|(q, t)| (q.clone(), format!("s{t}"))).collect())
                })
                .collect();
            if let Ok(m) = CoalgebraMachine::new(&format!("fix{}", out.len()), rows) {
                out.push(m);
            }
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < choices.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }
    out
}

fn fixture_seeds(elab: &Elaboration, registry: &MachineRegistry) -> Result<Vec<MSeed>, String> {
    let mut seeds: Vec<MSeed> =
        registry.seeds().into_iter().filter(|s| s.machine().validate(&elab.signature).is_ok()).collect();
    if seeds.is_empty() {
        for m in fixture_machines(elab, 64) {
            let m = Arc::new(m);
            for k in 0..m.len() {
                seeds.push(MSeed::new(m.clone(), k).map_err(err)?);
            }
        }
    }
    Ok(seeds)
}

/// The depth-`k` unrolling of `m` as a term, parameters read from `param`.
pub fn unroll(elab: &Elaboration, m: &MSeed, k: usize, param: &dyn Fn(usize) -> Value) -> Result<Value, String> {
    if k == 0 {
        return Ok(Value::atom("cut"));
    }
    let mut rec = Vec::new();
    for (q, c) in m.children() {
        rec.push((q, unroll(elab, &c, k - 1, param)?));
    }
    let params = {
        let n = elab.decl.params.len();
        let vals: Vec<Value> = (0..n).map(param).collect();
        Payload::oracle(move |i, _| vals.get(i).cloned())
    };
    elab.decode(&FElement { shape: m.shape().clone(), params, rec }).map_err(err)
}

/// An element over `m` whose payload at a path is chosen from `X i` by the
/// path's step count.
pub fn sample_element(elab: &Elaboration, x: &FamilyAssignment, m: &MSeed) -> Option<ExtElement> {
    let lists: Vec<Vec<Value>> = (0..elab.decl.params.len())
        .map(|i| x.assign.get(i).and_then(Domain::finite_elements).unwrap_or_default())
        .collect();
    let (sig, seed) = (elab.signature.clone(), m.clone());
    if lists
        .iter()
        .enumerate()
        .any(|(i, l)| l.is_empty() && !m::pos_paths_m(&sig, &seed, i, Budget::new(4, 1)).items.is_empty())
    {
        return None;
    }
    let lists = Arc::new(lists);
    let payload = Payload::oracle(move |i, p| {
        let path = p.as_path()?;
        if path.index != i || !matches!(m::pos_eval(&sig, &seed, path), PosEval::Valid { .. }) {
            return None;
        }
        let l = lists.get(i)?;
        Some(l[path.steps.len() % l.len()].clone())
    });
    Some(ExtElement::new(Value::Seed(m.clone()), payload))
}

fn check_nu(elab: &Elaboration, x: &FamilyAssignment, registry: &MachineRegistry, budget: IsoBudget) -> SuiteReport {
    let mut report = SuiteReport::default();
    report.record("body-adequacy", body_adequacy(elab, x, budget));
    let seeds = match fixture_seeds(elab, registry) {
        Ok(s) => s,
        Err(e) => {
            report.record("fixtures", Err(e));
            return report;
        }
    };
    let elements: Vec<ExtElement> = seeds.iter().filter_map(|m| sample_element(elab, x, m)).collect();
    let paths = Budget::new(budget.paths, budget.count);
    report.record("lambek-nu", lambek_nu(elab, x, &elements, paths));
    report.record("bisim-agreement", bisim_agreement(&seeds, budget.depth));
    report.record("truncation-classes", truncation_classes(elab, &seeds, budget.depth.min(6)));
    report.record("unfold-child-law", unfold_child_law(elab, &seeds));
    report.record("path-counts-nu", path_counts_nu(elab, &seeds, budget.paths.min(8)));
    report.record("unfold-square", unfold_square(elab, x, &seeds, paths));
    report.record("functor-laws", functor_laws(&elab.fixed, x, &elements, paths));
    report
}

/// `into ∘ out` and `out ∘ into` are identities up to the path budget.
pub fn lambek_nu(elab: &Elaboration, x: &FamilyAssignment, elements: &[ExtElement], budget: Budget) -> Check {
    let f = &elab.signature;
    for e in elements {
        let fe = m::out(e).map_err(err)?;
        let back = m::into_nu(f, fe.clone()).map_err(err)?;
        if let ExtEquality::Distinct(d) = ext_equal(&elab.fixed, x, &back, e, budget) {
            return Err(format!("into (out e) vs e at {}: {d:?}", e.shape));
        }
        let again = m::out(&back).map_err(err)?;
        same_unfolding(f, &again, &fe, |a, b| {
            !matches!(ext_equal(&elab.fixed, x, a, b, budget), ExtEquality::Distinct(_))
        })
        .map_err(|w| format!("out (into u) vs u at {}: {w}", e.shape))?;
    }
    Ok(format!("{} elements at path budget {}", elements.len(), budget.depth))
}

/// Exact and bounded bisimulation agree on every pair: exact equality
/// implies bounded equality at `depth`, and bounded equality at the total
/// state count implies exact equality.
pub fn bisim_agreement(seeds: &[MSeed], depth: usize) -> Check {
    let mut pairs = 0;
    for a in seeds {
        for b in seeds {
            let n = a.machine().len() + b.machine().len();
            let exact = bisim_exact(a, b);
            let at_n = bisim_bounded(a, b, n);
            let at_depth = bisim_bounded(a, b, depth);
            match (&exact, &at_n) {
                (ExactBisim::Equal, BoundedBisim::BisimilarTo(_)) => {
                    if !matches!(at_depth, BoundedBisim::BisimilarTo(_)) {
                        return Err(format!("{a} and {b} are equal but distinct at depth {depth}"));
                    }
                }
                (ExactBisim::Distinct(w), BoundedBisim::Distinct(v)) => {
                    if w.len() != v.len() {
                        return Err(format!("{a} vs {b}: witnesses of length {} and {}", w.len(), v.len()));
                    }
                }
                _ => return Err(format!("{a} vs {b}: exact {exact:?}, bounded {at_n:?}")),
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs"))
}

/// Bounded bisimilarity at depth `k` holds exactly when the depth-`k`
/// unrollings coincide, and every unrolling is an oracle class.
pub fn truncation_classes(elab: &Elaboration, seeds: &[MSeed], max_depth: usize) -> Check {
    let env = Env::unit(&elab.decl.params);
    let unit = |_| Value::Unit;
    for k in 0..=max_depth {
        let classes: BTreeSet<Value> =
            oracle::nu_truncate(&elab.decl.body, &env, k).map_err(err)?.iter().map(SemValue::to_value).collect();
        let unrolled: Vec<Value> = seeds.iter().map(|m| unroll(elab, m, k, &unit)).collect::<Result<_, _>>()?;
        for (m, u) in seeds.iter().zip(&unrolled) {
            if !classes.contains(u) {
                return Err(format!("unrolling of {m} at depth {k} is not an oracle class"));
            }
        }
        for (a, ua) in seeds.iter().zip(&unrolled) {
            for (b, ub) in seeds.iter().zip(&unrolled) {
                let bisimilar = matches!(bisim_bounded(a, b, k), BoundedBisim::BisimilarTo(_));
                if bisimilar != (ua == ub) {
                    return Err(format!(
                        "{a} vs {b} at depth {k}: bisimilar {bisimilar}, unrollings equal {}",
                        ua == ub
                    ));
                }
            }
        }
    }
    Ok(format!("{} seeds, depths 0..={max_depth}", seeds.len()))
}

/// Child `q` of `unfold y` is the seed `unfold (βh y q)`, for the seed
/// coalgebra on each fixture seed.
pub fn unfold_child_law(elab: &Elaboration, seeds: &[MSeed]) -> Check {
    let f = &elab.signature;
    let co = m::seed_coalgebra(f, |_, _, _| Value::Unit);
    let mut checked = 0;
    for s in seeds {
        let y = Value::Seed(s.clone());
        for yk in m::reachable(f, &co, &y, m::DEFAULT_STATE_CAP).map_err(err)? {
            let top = m::unfold(f, &co, &yk).map_err(err)?;
            let top = top.shape.as_seed().ok_or("unfold did not produce a seed")?.clone();
            for q in f.rec_list(&co.shape(&yk)).map_err(err)? {
                let child = top.child(&q).ok_or_else(|| format!("unfold {yk} has no child {q}"))?;
                let direct = m::unfold(f, &co, &co.next(&yk, &q)).map_err(err)?;
                let direct = direct.shape.as_seed().ok_or("unfold did not produce a seed")?.clone();
                if !child.same_presentation(&direct) {
                    return Err(format!("child {q} of unfold {yk} differs from unfold of its successor"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} children"))
}

/// With each parameter a single marker, the paths at step budget `k` match
/// the markers in the depth-`k+1` unrolling.
pub fn path_counts_nu(elab: &Elaboration, seeds: &[MSeed], max_steps: usize) -> Check {
    let f = &elab.signature;
    let mark = |i: usize| marker(i);
    for s in seeds {
        for k in 0..=max_steps {
            let term = unroll(elab, s, k + 1, &mark)?;
            for i in 0..elab.decl.params.len() {
                let paths = m::pos_enumerate_m(f, s, i, k).items.len();
                let expected = count_occurrences(&term, &marker(i));
                if paths != expected {
                    return Err(format!(
                        "{s} at step budget {k}: {paths} paths at index {i}, unrolling has {expected}"
                    ));
                }
            }
        }
    }
    Ok(format!("{} seeds, step budgets 0..={max_steps}", seeds.len()))
}

/// `unfold` passes the coalgebra-morphism check for the seed coalgebra.
pub fn unfold_square(elab: &Elaboration, x: &FamilyAssignment, seeds: &[MSeed], budget: Budget) -> Check {
    let f = &elab.signature;
    let lists: Vec<Vec<Value>> = (0..elab.decl.params.len())
        .map(|i| x.assign.get(i).and_then(Domain::finite_elements).unwrap_or_default())
        .collect();
    if lists.iter().any(Vec::is_empty) && !lists.is_empty() {
        return Ok("skipped: some parameter domain is empty".into());
    }
    let co = m::seed_coalgebra(f, move |_, i, _| lists[i][0].clone());
    let unfold = |y: &Value| m::unfold(f, &co, y).expect("fixture seeds unfold");
    for s in seeds {
        let v = m::coalg_morphism_check(f, x, &co, &unfold, &Value::Seed(s.clone()), budget).map_err(err)?;
        if !v.is_consistent() {
            return Err(format!("{s}: {v:?}"));
        }
    }
    Ok(format!("{} seeds", seeds.len()))
}
