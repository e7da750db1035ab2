//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the
//! process fails if any criterion fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use contcalc_core::bisim::{bisim_bounded, bisim_exact, BoundedBisim, ExactBisim};
use contcalc_core::iso::{self, functor_laws, IsoBudget};
use contcalc_core::m::{self, coalg_morphism_check, Coalgebra, Comm, Evidence, MorphismVerdict};
use contcalc_core::w::{self, Algebra, ProbeVerdict};
use contcalc_core::{
    ext_enumerate, Budget, CoalgebraMachine, Container, Domain, ExtElement, FElement, FamilyAssignment, MSeed,
    MachineRow, Payload, PosPath, Value,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn mu_adequacy() -> Outcome {
    let start = Instant::now();
    let e = elab("mu List(A) = 1 + A * rec");
    let x = x(vec![atoms(&["a", "b"])]);
    let els = ext_enumerate(&e.fixed, &x, Budget::new(4, Budget::DEFAULT_COUNT)).map_err(|e| e.to_string())?;
    ensure(els.items.len() == 15, || format!("{} elements", els.items.len()))?;
    let budget = IsoBudget { height: 4, ..Default::default() };
    let detail = iso::mu_adequacy(&e, &x, &els.items, budget)?;
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("{detail} in {t:?}"))
}

fn nat_fin_correspondence() -> Outcome {
    let e = elab("mu List(A) = 1 + A * rec");
    let x = x(vec![atoms(&["a"])]);
    for n in 0..=5 {
        let items = vec!["a"; n];
        let el = e.mu_from_term(&x, &list_term(&items)).map_err(|e| e.to_string())?;
        let tree = el.shape.as_tree().ok_or("not a tree")?;
        let paths = w::pos_enumerate_w(tree, 0, &e.signature).map_err(|e| e.to_string())?;
        ensure(paths.len() == n, || format!("length {n}: {} positions", paths.len()))?;
        let pos = e.fixed.positions(0, &el.shape).map_err(|e| e.to_string())?;
        let listed = pos.enumerate(Budget::depth(10));
        ensure(listed.complete && listed.items.len() == n, || {
            format!("length {n}: position domain lists {}", listed.items.len())
        })?;
    }
    Ok("lengths 0..=5 have 0..=5 positions".into())
}

/// One parameter position at every node over the conatural shapes.
fn conat_with_data() -> contcalc_core::elaborator::Elaboration {
    elab("nu CoNat(A) = A * (1 + rec)")
}

fn counter(steps: Option<u64>) -> Coalgebra {
    let shape =
        |succ: bool| Value::pair(Value::Unit, if succ { Value::inr(Value::Unit) } else { Value::inl(Value::Unit) });
    Coalgebra::new(
        Domain::Nat,
        move |y| match (steps, y) {
            (None, _) => shape(true),
            (Some(_), Value::Nat(k)) => shape(*k > 0),
            _ => shape(false),
        },
        |_, _, _| Value::atom("a"),
        move |y, _| match (steps, y) {
            (Some(_), Value::Nat(k)) => Value::Nat(k.saturating_sub(1)),
            _ => Value::Nat(0),
        },
    )
}

fn nu_pos_counts() -> Outcome {
    let e = conat_with_data();
    let f = &e.signature;
    for n in [0u64, 1, 2, 5, 10] {
        let seed = unfold_seed(f, &counter(Some(n)), &Value::Nat(n));
        let paths = m::pos_enumerate_m(f, &seed, 0, 1000);
        ensure(paths.complete && paths.items.len() as u64 == n + 1, || {
            format!("seed {n}: {} paths", paths.items.len())
        })?;
    }
    let inf = unfold_seed(f, &counter(None), &Value::Nat(0));
    ensure(inf.machine().len() == 1, || "the infinite seed is not one state".into())?;
    for k in 0..=50 {
        let paths = m::pos_enumerate_m(f, &inf, 0, k);
        ensure(paths.items.len() == k + 1, || format!("infinity at step budget {k}: {} paths", paths.items.len()))?;
        ensure(!paths.complete, || "infinite path set reported complete".into())?;
    }
    Ok("seeds 0,1,2,5,10 have n+1 paths; infinity has k+1 at k = 0..=50".into())
}

fn lambek() -> Outcome {
    let start = Instant::now();
    let e = elab("mu List(A) = 1 + A * rec");
    let xs = x(vec![atoms(&["a", "b"])]);
    let els = ext_enumerate(&e.fixed, &xs, Budget::new(7, Budget::DEFAULT_COUNT)).map_err(|e| e.to_string())?;
    ensure(els.items.len() >= 100, || format!("only {} mu elements", els.items.len()))?;
    let mu = iso::lambek_mu(&e, &xs, &els.items)?;
    let nu = elab("nu CoList(A) = 1 + A * rec");
    let mut elements = Vec::new();
    for machine in iso::fixture_machines(&nu, 64) {
        let machine = Arc::new(machine);
        for k in 0..machine.len() {
            let seed = MSeed::new(machine.clone(), k).map_err(|e| e.to_string())?;
            elements.extend(iso::sample_element(&nu, &xs, &seed));
        }
    }
    let red = unfold_seed(&nu.signature, &cycle(&["r", "e", "d"]), &Value::atom("y0"));
    elements.push(m::unfold(&nu.signature, &cycle(&["r", "e", "d"]), &Value::atom("y0")).map_err(|e| e.to_string())?);
    elements.extend(iso::sample_element(&nu, &xs, &red));
    ensure(elements.len() >= 20, || format!("only {} nu elements", elements.len()))?;
    let nu_detail =
        iso::lambek_nu(&nu, &x(vec![atoms(&["a", "b", "r", "e", "d"])]), &elements, Budget::new(10, 100_000))?;
    let t = within(start, Duration::from_secs(5))?;
    Ok(format!("mu: {mu}; nu: {nu_detail}; {t:?}"))
}

fn bisim_soundness() -> Outcome {
    let one = conat(None);
    let two = infinity_two();
    ensure(matches!(bisim_exact(&one, &two), ExactBisim::Equal), || "infinities differ exactly".into())?;
    ensure(matches!(bisim_bounded(&one, &two, 100), BoundedBisim::BisimilarTo(100)), || {
        "infinities differ at 100".into()
    })?;
    for n in 0..=10 {
        for k in 0..=10 {
            if n == k {
                continue;
            }
            let (a, b) = (conat(Some(n)), conat(Some(k)));
            let want = n.min(k) + 1;
            match (bisim_exact(&a, &b), bisim_bounded(&a, &b, 12)) {
                (ExactBisim::Distinct(w), BoundedBisim::Distinct(v)) => {
                    ensure(w.len() == want && v.len() == want, || {
                        format!("seed {n} vs {k}: witness lengths {} and {}, want {want}", w.len(), v.len())
                    })?;
                }
                other => return Err(format!("seed {n} vs {k}: {other:?}")),
            }
        }
    }
    // Fixture machines up to 12 states: chains, loops and all small
    // machines over the conatural signature.
    let nat = elab("nu CoNat() = 1 + rec");
    let mut seeds: Vec<MSeed> = (0..=10).map(|n| conat(Some(n))).collect();
    seeds.push(one);
    seeds.push(two);
    for machine in iso::fixture_machines(&nat, 64) {
        let machine = Arc::new(machine);
        for k in 0..machine.len() {
            seeds.push(MSeed::new(machine.clone(), k).unwrap());
        }
    }
    let mut pairs = 0;
    for a in &seeds {
        for b in &seeds {
            let states = a.machine().len() + b.machine().len();
            let exact = bisim_exact(a, b);
            for depth in 0..=states {
                let bounded = bisim_bounded(a, b, depth);
                let agree = match (&exact, &bounded) {
                    (ExactBisim::Equal, BoundedBisim::BisimilarTo(_)) => true,
                    (ExactBisim::Distinct(w), BoundedBisim::Distinct(v)) => w.len() <= depth && v.len() == w.len(),
                    (ExactBisim::Distinct(w), BoundedBisim::BisimilarTo(_)) => w.len() > depth,
                    _ => false,
                };
                ensure(agree, || format!("{a} vs {b} at depth {depth}: exact {exact:?}, bounded {bounded:?}"))?;
            }
            pairs += 1;
        }
    }
    Ok(format!("witness lengths min(n,m)+1 for n != m <= 10; {pairs} fixture pairs agree at every depth"))
}

fn fold_uniqueness() -> Outcome {
    let e = elab("mu List(A) = 1 + A * rec");
    let xs = x(vec![atoms(&["a", "b"])]);
    let els = ext_enumerate(&e.fixed, &xs, Budget::new(4, Budget::DEFAULT_COUNT)).map_err(|e| e.to_string())?.items;
    let length: Algebra<u64> = Algebra::new(|fe: FElement<u64>| fe.rec.first().map_or(0, |(_, n)| n + 1));
    let f = &e.signature;
    let fold = |el: &ExtElement| w::fold(f, &xs, &length, el).unwrap();
    let v = w::uniqueness_probe(f, &xs, &length, &fold, &els).map_err(|e| e.to_string())?;
    ensure(v.is_consistent(), || format!("fold rejected: {v:?}"))?;
    let terms: Vec<Value> = els.iter().map(|el| e.mu_to_term(&xs, el).unwrap()).collect();
    for target in &terms {
        let bent = |el: &ExtElement| fold(el) + u64::from(&e.mu_to_term(&xs, el).unwrap() == target);
        match w::uniqueness_probe(f, &xs, &length, &bent, &els).map_err(|e| e.to_string())? {
            ProbeVerdict::Violation { witness, .. } => {
                let got = e.mu_to_term(&xs, &witness).unwrap();
                ensure(&got == target, || format!("perturbation at {target} reported at {got}"))?;
            }
            ProbeVerdict::Consistent => return Err(format!("perturbation at {target} not detected")),
        }
    }
    Ok(format!(
        "fold consistent on {} trees; all {} single-point perturbations detected at their point",
        els.len(),
        terms.len()
    ))
}

fn below_k(k: usize, q: &Value, here: PosPath) -> PosPath {
    (0..k).fold(here, |p, _| PosPath::below(q.clone(), p))
}

fn unfold_uniqueness() -> Outcome {
    let nu = elab("nu CoList(A) = 1 + A * rec");
    let f = nu.signature.clone();
    let xs = x(vec![atoms(&["r", "e", "d"])]);
    let co = cycle(&["r", "e", "d"]);
    let budget = Budget::depth(8);
    let honest = |y: &Value| m::unfold(&f, &co, y).unwrap();
    let y0 = Value::atom("y0");
    let v = coalg_morphism_check(&f, &xs, &co, &honest, &y0, budget).map_err(|e| e.to_string())?;
    ensure(v.is_consistent(), || format!("unfold rejected: {v:?}"))?;

    // The same colist presented by a six-state cycle.
    let cons = Value::inr(Value::pair(Value::Unit, Value::Unit));
    let q = Value::inr(Value::Unit);
    let rows: Vec<MachineRow<String>> =
        (0..6).map(|k| (format!("t{k}"), cons.clone(), vec![(q.clone(), format!("t{}", (k + 1) % 6))])).collect();
    let six = Arc::new(CoalgebraMachine::new("six", rows).unwrap());
    let alternative = |y: &Value| {
        let k: usize = y.to_string()["atom:y".len()..].parse().unwrap();
        let base = m::unfold(&f, &co, y).unwrap();
        ExtElement::new(Value::Seed(MSeed::new(six.clone(), k).unwrap()), base.payload)
    };
    let v = coalg_morphism_check(&f, &xs, &co, &alternative, &y0, budget).map_err(|e| e.to_string())?;
    ensure(v.is_consistent(), || format!("bisimilar presentation rejected: {v:?}"))?;

    let target = below_k(2, &q, PosPath::here(0, Value::inl(Value::Unit)));
    let tv = Value::path(target.clone());
    let bent = |y: &Value| {
        let e = m::unfold(&f, &co, y).unwrap();
        if *y != y0 {
            return e;
        }
        let (k, tv) = (e.payload.clone(), tv.clone());
        ExtElement::new(
            e.shape,
            Payload::oracle(move |i, p| if *p == tv { Some(Value::atom("e")) } else { k.get(i, p) }),
        )
    };
    match coalg_morphism_check(&f, &xs, &co, &bent, &y0, budget).map_err(|e| e.to_string())? {
        MorphismVerdict::Violation { component, evidence: Evidence::Position(p), .. } => {
            ensure(matches!(component, Comm::Below | Comm::Final), || format!("reported as {component:?}"))?;
            ensure(p == target, || format!("witness {p}, perturbed {target}"))?;
            Ok(format!("unfold and a six-state presentation pass; perturbation caught by {component:?} at {p}"))
        }
        v => Err(format!("perturbation not detected: {v:?}")),
    }
}

fn check_child_law(f: &contcalc_core::SplitContainer, co: &Coalgebra, start: &Value) -> Result<usize, String> {
    let ys = m::reachable(f, co, start, 50).map_err(|e| e.to_string())?;
    let mut n = 0;
    for y in &ys {
        let top = unfold_seed(f, co, y);
        for q in f.rec_list(&co.shape(y)).map_err(|e| e.to_string())? {
            let child = top.child(&q).ok_or_else(|| format!("no child {q} at {y}"))?;
            let direct = unfold_seed(f, co, &co.next(y, &q));
            ensure(child.same_presentation(&direct), || format!("child {q} of unfold {y} differs"))?;
            n += 1;
        }
    }
    Ok(n)
}

fn unfold_child_law() -> Outcome {
    let mut checked = 0;
    let colist = elab("nu CoList(A) = 1 + A * rec");
    for letters in [&["r", "e", "d"][..], &["a"][..], &["a", "b", "a", "b", "c"][..]] {
        let letters: &'static [&'static str] = Box::leak(letters.to_vec().into_boxed_slice());
        checked += check_child_law(&colist.signature, &cycle(letters), &Value::atom("y0"))?;
    }
    let counting = conat_with_data();
    for n in [0u64, 1, 7, 49] {
        checked += check_child_law(&counting.signature, &counter(Some(n)), &Value::Nat(n))?;
    }
    checked += check_child_law(&counting.signature, &counter(None), &Value::Nat(0))?;
    // Binary trees over residues: y steps to 2y+1 and 2y+2 mod n.
    let tree = elab("nu Tree(A) = A * [2] -> rec");
    for n in [1u64, 5, 17, 50] {
        let co = Coalgebra::new(
            Domain::Fin(n),
            |_| Value::pair(Value::Unit, Value::table(vec![Value::Unit, Value::Unit])),
            |y, _, _| y.clone(),
            move |y, q| match (y, q) {
                (Value::Fin { k, .. }, Value::Pair(tag, _)) => {
                    let j = match &**tag {
                        Value::Fin { k, .. } => *k,
                        _ => 0,
                    };
                    Value::fin((2 * k + j + 1) % n, n)
                }
                _ => Value::fin(0, n),
            },
        );
        checked += check_child_law(&tree.signature, &co, &Value::fin(0, n))?;
    }
    let nat = elab("nu CoNat() = 1 + rec");
    for machine in iso::fixture_machines(&nat, 64) {
        let machine = Arc::new(machine);
        let co = m::seed_coalgebra(&nat.signature, |_, _, _| Value::Unit);
        for k in 0..machine.len() {
            checked += check_child_law(&nat.signature, &co, &Value::Seed(MSeed::new(machine.clone(), k).unwrap()))?;
        }
    }
    Ok(format!("{checked} children identical to the unfolding of their successor"))
}

fn colist_example() -> Outcome {
    let nu = elab("nu CoList(A) = 1 + A * rec");
    let f = &nu.signature;
    // The cyclic machine, with its letters attached by a seed coalgebra.
    let cons = Value::inr(Value::pair(Value::Unit, Value::Unit));
    let q = Value::inr(Value::Unit);
    let machine = Arc::new(
        CoalgebraMachine::new(
            "red",
            vec![
                ("r", cons.clone(), vec![(q.clone(), "e")]),
                ("e", cons.clone(), vec![(q.clone(), "d")]),
                ("d", cons, vec![(q.clone(), "r")]),
            ],
        )
        .unwrap(),
    );
    let co = m::seed_coalgebra(f, |y, _, _| Value::atom(y.as_seed().map_or("?", |s| s.id())));
    let start = Value::Seed(MSeed::named(machine, "r").unwrap());
    let e = m::unfold(f, &co, &start).map_err(|e| e.to_string())?;
    let got: Vec<String> = (0..6)
        .map(|k| {
            let p = below_k(k, &q, PosPath::here(0, Value::inl(Value::Unit)));
            e.payload.get(0, &Value::path(p)).map_or("-".into(), |v| v.to_string())
        })
        .collect();
    let want: Vec<String> = ["r", "e", "d", "r", "e", "d"].iter().map(|s| format!("atom:{s}")).collect();
    ensure(got == want, || format!("payloads {got:?}"))?;
    Ok(format!("payloads {}", got.join(" ")))
}

/// Sample elements of every fixture container.
fn law_fixtures() -> Vec<(Container, FamilyAssignment, Vec<ExtElement>)> {
    let mut out = Vec::new();
    for src in DECLS {
        let e = elab(src);
        let n = e.decl.params.len();
        let xs = x((0..n).map(|i| if i == 0 { atoms(&["a", "b"]) } else { atoms(&["c"]) }).collect());
        let fixed = ext_enumerate(&e.fixed, &xs, Budget::new(3, 2000)).unwrap().items;
        out.push((e.fixed.clone(), xs.clone(), fixed));
        let mut with_rec = xs.assign.clone();
        with_rec.push(atoms(&["y0", "y1"]));
        let xy = FamilyAssignment::new(with_rec);
        let body = ext_enumerate(&e.body, &xy, Budget::new(3, 2000)).unwrap().items;
        out.push((e.body.clone(), xy, body));
    }
    let colist = elab("nu CoList(A) = 1 + A * rec");
    let xs = x(vec![atoms(&["a", "b"])]);
    let mut seeds = Vec::new();
    for machine in iso::fixture_machines(&colist, 64) {
        let machine = Arc::new(machine);
        for k in 0..machine.len() {
            seeds.extend(iso::sample_element(&colist, &xs, &MSeed::new(machine.clone(), k).unwrap()));
        }
    }
    out.push((colist.fixed.clone(), xs, seeds));
    out.retain(|(_, _, els)| !els.is_empty());
    out
}

fn functor_law_suite() -> Outcome {
    let fixtures = law_fixtures();
    let sizes: Vec<usize> = fixtures.iter().map(|(_, _, e)| e.len()).collect();
    let mut runner = TestRunner::new(Config { cases: 500, failure_persistence: None, ..Config::default() });
    let strategy = (0..fixtures.len()).prop_flat_map(|c| (Just(c), 0..sizes[c]));
    let mut seen = 0usize;
    let counter = std::cell::Cell::new(0usize);
    runner
        .run(&strategy, |(c, k)| {
            counter.set(counter.get() + 1);
            let (container, xs, els) = &fixtures[c];
            functor_laws(container, xs, std::slice::from_ref(&els[k]), Budget::new(6, 10_000))
                .map(|_| ())
                .map_err(TestCaseError::fail)
        })
        .map_err(|e| e.to_string())?;
    seen += counter.get();
    ensure(seen >= 500, || format!("only {seen} samples"))?;
    Ok(format!("{seen} random samples over {} containers", fixtures.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("mu adequacy", mu_adequacy),
        ("list shapes and Fin positions", nat_fin_correspondence),
        ("nu Pos counts", nu_pos_counts),
        ("Lambek round trips", lambek),
        ("bisimulation soundness", bisim_soundness),
        ("fold uniqueness probe", fold_uniqueness),
        ("unfold uniqueness at budget", unfold_uniqueness),
        ("unfold child law", unfold_child_law),
        ("colist example", colist_example),
        ("functor laws", functor_law_suite),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
