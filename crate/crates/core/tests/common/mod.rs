//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use contcalc_core::elaborator::{elaborate, elaborate_with, parse_decl, Elaboration};
use contcalc_core::m::{unfold, Coalgebra};
use contcalc_core::{
    CoalgebraMachine, Domain, FamilyAssignment, MSeed, MachineRegistry, MachineRow, SplitContainer, Value,
};

pub fn elab(src: &str) -> Elaboration {
    elaborate(&parse_decl(src).expect("fixture parses")).expect("fixture elaborates")
}

pub fn elab_with(src: &str, registry: MachineRegistry) -> Elaboration {
    elaborate_with(&parse_decl(src).unwrap(), Arc::new(registry)).unwrap()
}

pub fn atoms(names: &[&str]) -> Domain {
    Domain::atoms(names)
}

pub fn x(domains: Vec<Domain>) -> FamilyAssignment {
    FamilyAssignment::new(domains)
}

/// The declarations used across suites.
pub const DECLS: &[&str] = &[
    "mu List(A) = 1 + A * rec",
    "mu Nat() = 1 + rec",
    "mu Bin(A) = A + [2] -> rec",
    "mu Rose(A, B) = A * (1 + B * rec) + [2] -> (1 + rec)",
    "mu Z() = 0",
    "mu Opt(A) = 1 + A",
];

/// A list term from atoms.
pub fn list_term(items: &[&str]) -> Value {
    items.iter().rev().fold(Value::inl(Value::Unit), |acc, a| Value::inr(Value::pair(Value::atom(a), acc)))
}

/// Colist coalgebra on `{0..n}` reading `letters[y]` and stepping to
/// `y + 1 mod n`.
pub fn cycle(letters: &'static [&'static str]) -> Coalgebra {
    let names: Vec<String> = (0..letters.len()).map(|k| format!("y{k}")).collect();
    let n = letters.len();
    let index = |y: &Value| match y {
        Value::Atom(a) => a[1..].parse::<usize>().ok(),
        _ => None,
    };
    Coalgebra::new(
        Domain::atoms(&names),
        |_| Value::inr(Value::pair(Value::Unit, Value::Unit)),
        move |y, _, _| Value::atom(letters[index(y).unwrap_or(0)]),
        move |y, _| Value::atom(&format!("y{}", (index(y).unwrap_or(0) + 1) % n)),
    )
}

pub fn unfold_seed(f: &SplitContainer, co: &Coalgebra, y: &Value) -> MSeed {
    unfold(f, co, y).unwrap().shape.as_seed().unwrap().clone()
}

/// Conaturals over shapes `inl unit` / `inr unit`: `n` as a chain, and
/// `None` as the one-state loop.
pub fn conat(n: Option<usize>) -> MSeed {
    let succ = Value::inr(Value::Unit);
    let rows: Vec<MachineRow<String>> = match n {
        None => vec![("i".into(), succ, vec![(Value::Unit, "i".into())])],
        Some(n) => (0..=n)
            .map(|k| {
                if k == n {
                    (format!("n{k}"), Value::inl(Value::Unit), vec![])
                } else {
                    (format!("n{k}"), succ.clone(), vec![(Value::Unit, format!("n{}", k + 1))])
                }
            })
            .collect(),
    };
    let name = n.map_or("inf".to_string(), |n| format!("c{n}"));
    MSeed::new(Arc::new(CoalgebraMachine::new(&name, rows).unwrap()), 0).unwrap()
}

pub fn infinity_two() -> MSeed {
    let succ = Value::inr(Value::Unit);
    let m = CoalgebraMachine::new(
        "inf2",
        vec![("a", succ.clone(), vec![(Value::Unit, "b")]), ("b", succ, vec![(Value::Unit, "a")])],
    )
    .unwrap();
    MSeed::new(Arc::new(m), 0).unwrap()
}
