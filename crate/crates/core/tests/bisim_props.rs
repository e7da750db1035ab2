mod common;

use std::sync::Arc;

use common::conat;
use contcalc_core::bisim::classes;
use contcalc_core::{bisim_bounded, bisim_exact, BoundedBisim, CoalgebraMachine, ExactBisim, MSeed, MachineRow, Value};
use proptest::prelude::*;

/// A random machine over the conatural shapes, as (succ?, target) rows.
fn machine() -> impl Strategy<Value = Arc<CoalgebraMachine>> {
    (1usize..7).prop_flat_map(|n| proptest::collection::vec((any::<bool>(), 0..n), n)).prop_map(|rows| {
        let rows: Vec<MachineRow<String>> = rows
            .iter()
            .enumerate()
            .map(|(k, &(succ, t))| {
                if succ {
                    (format!("s{k}"), Value::inr(Value::Unit), vec![(Value::Unit, format!("s{t}"))])
                } else {
                    (format!("s{k}"), Value::inl(Value::Unit), vec![])
                }
            })
            .collect();
        Arc::new(CoalgebraMachine::new("r", rows).unwrap())
    })
}

fn seed() -> impl Strategy<Value = MSeed> {
    machine().prop_flat_map(|m| {
        let n = m.len();
        (Just(m), 0..n).prop_map(|(m, k)| MSeed::new(m, k).unwrap())
    })
}

proptest! {
    #[test]
    fn exact_is_reflexive_and_symmetric(a in seed(), b in seed()) {
        prop_assert!(matches!(bisim_exact(&a, &a), ExactBisim::Equal));
        let ab = matches!(bisim_exact(&a, &b), ExactBisim::Equal);
        let ba = matches!(bisim_exact(&b, &a), ExactBisim::Equal);
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn bounded_converges_to_exact(a in seed(), b in seed()) {
        let depth = a.machine().len() + b.machine().len();
        match (bisim_exact(&a, &b), bisim_bounded(&a, &b, depth)) {
            (ExactBisim::Equal, BoundedBisim::BisimilarTo(_)) => {}
            (ExactBisim::Distinct(w), BoundedBisim::Distinct(v)) => prop_assert_eq!(w.len(), v.len()),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn bounded_is_monotone(a in seed(), b in seed(), d in 0usize..14) {
        if let BoundedBisim::Distinct(_) = bisim_bounded(&a, &b, d) {
            let further = bisim_bounded(&a, &b, d + 1);
            prop_assert!(matches!(further, BoundedBisim::Distinct(_)));
        }
    }

    #[test]
    fn classes_agree_with_pairwise_checks(seeds in proptest::collection::vec(seed(), 1..5)) {
        let cls = classes(&seeds);
        for i in 0..seeds.len() {
            for j in 0..seeds.len() {
                let eq = matches!(bisim_exact(&seeds[i], &seeds[j]), ExactBisim::Equal);
                prop_assert_eq!(cls[i] == cls[j], eq);
            }
        }
    }
}

#[test]
fn finite_conaturals_are_pairwise_distinct() {
    let seeds: Vec<MSeed> = (0..8).map(|n| conat(Some(n))).chain([conat(None)]).collect();
    let cls = classes(&seeds);
    let distinct: std::collections::BTreeSet<_> = cls.iter().collect();
    assert_eq!(distinct.len(), seeds.len());
}
