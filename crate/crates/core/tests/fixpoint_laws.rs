mod common;

use common::*;
use contcalc_core::iso::{check_iso, IsoBudget};
use contcalc_core::MachineRegistry;

#[test]
fn every_inductive_fixture_passes_its_suite() {
    for src in DECLS {
        let e = elab(src);
        let n = e.decl.params.len();
        let xs = x((0..n).map(|j| if j == 0 { atoms(&["a", "b"]) } else { atoms(&["c"]) }).collect());
        let budget = IsoBudget { height: 3, ..Default::default() };
        let report = check_iso(&e, &xs, &MachineRegistry::new(), budget);
        assert!(report.passed(), "{src}\n{report}");
    }
}

#[test]
fn coinductive_fixtures_pass_their_suite() {
    for src in
        ["nu CoNat() = 1 + rec", "nu CoList(A) = 1 + A * rec", "nu Stream(A) = A * rec", "nu Tree(A) = A * [2] -> rec"]
    {
        let e = elab(src);
        let xs = x(e.decl.params.iter().map(|_| atoms(&["a", "b"])).collect());
        let budget = IsoBudget { height: 3, paths: 6, depth: 6, ..Default::default() };
        let report = check_iso(&e, &xs, &MachineRegistry::new(), budget);
        assert!(report.passed(), "{src}\n{report}");
    }
}
