//! Bisimulation on machine seeds: bounded breadth-first comparison and
//! exact equivalence by partition refinement.

use alloc::{
    collections::{BTreeMap, BTreeSet, VecDeque},
    sync::Arc,
    vec::Vec,
};
use core::fmt;

use crate::m::{CoalgebraMachine, MSeed};
use crate::value::Value;

/// A node where two trees carry different shapes, reached by `steps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub steps: Vec<Value>,
    pub left: Value,
    pub right: Value,
}

impl Witness {
    /// Nodes on the path, counting the root.
    pub fn len(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.steps {
            write!(f, "below {q} . ")?;
        }
        write!(f, "node ({} vs {})", self.left, self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedBisim {
    /// Every node on a path of length at most `k` has equal shapes.
    BisimilarTo(usize),
    Distinct(Witness),
    /// The pair-state cap was hit before the depth was covered.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactBisim {
    Equal,
    Distinct(Witness),
}

pub const DEFAULT_PAIR_CAP: usize = 1_000_000;

/// Compares the trees presented by two seeds on all paths of length at most
/// `depth` (`depth` nodes from the root). A distinction comes with a
/// shortest witness.
pub fn bisim_bounded(m0: &MSeed, m1: &MSeed, depth: usize) -> BoundedBisim {
    bisim_bounded_capped(m0, m1, depth, DEFAULT_PAIR_CAP)
}

pub fn bisim_bounded_capped(m0: &MSeed, m1: &MSeed, depth: usize, cap: usize) -> BoundedBisim {
    if depth == 0 {
        return BoundedBisim::BisimilarTo(0);
    }
    let (ma, mb) = (m0.machine(), m1.machine());
    let mut seen = BTreeSet::new();
    seen.insert((m0.state(), m1.state()));
    let mut queue = VecDeque::new();
    queue.push_back((m0.state(), m1.state(), Vec::new()));
    while let Some((a, b, steps)) = queue.pop_front() {
        let (sa, sb) = (&ma.states()[a], &mb.states()[b]);
        let keys_match = sa.next.len() == sb.next.len() && sa.next.iter().zip(&sb.next).all(|(x, y)| x.0 == y.0);
        if sa.shape != sb.shape || !keys_match {
            return BoundedBisim::Distinct(Witness { steps, left: sa.shape.clone(), right: sb.shape.clone() });
        }
        if steps.len() + 1 >= depth {
            continue;
        }
        for ((q, ta), (_, tb)) in sa.next.iter().zip(&sb.next) {
            if seen.insert((*ta, *tb)) {
                if seen.len() > cap {
                    return BoundedBisim::Exhausted;
                }
                let mut next = steps.clone();
                next.push(q.clone());
                queue.push_back((*ta, *tb, next));
            }
        }
    }
    BoundedBisim::BisimilarTo(depth)
}

/// Exact bisimilarity: the two seeds are related by the coarsest
/// bisimulation on the disjoint union of their machines.
pub fn bisim_exact(m0: &MSeed, m1: &MSeed) -> ExactBisim {
    let same_machine = Arc::ptr_eq(m0.machine_arc(), m1.machine_arc());
    if same_machine && m0.state() == m1.state() {
        return ExactBisim::Equal;
    }
    let (blocks, b) = if same_machine {
        let blocks = refine(&[m0.machine()]);
        let b = blocks[0][m1.state()];
        (blocks, b)
    } else {
        let blocks = refine(&[m0.machine(), m1.machine()]);
        let b = blocks[1][m1.state()];
        (blocks, b)
    };
    if blocks[0][m0.state()] == b {
        return ExactBisim::Equal;
    }
    let total = m0.machine().len() + m1.machine().len();
    match bisim_bounded(m0, m1, total + 1) {
        BoundedBisim::Distinct(w) => ExactBisim::Distinct(w),
        _ => unreachable!("refinement separated states that agree to depth {}", total + 1),
    }
}

/// Coarsest stable partition of the states of `machines`, as a block id per
/// state of each machine. Block ids are comparable across machines.
pub fn refine(machines: &[&CoalgebraMachine]) -> Vec<Vec<usize>> {
    let mut offsets = Vec::with_capacity(machines.len());
    let mut total = 0;
    for m in machines {
        offsets.push(total);
        total += m.len();
    }
    let states: Vec<(usize, &crate::m::MachineState)> =
        machines.iter().enumerate().flat_map(|(k, m)| m.states().iter().map(move |s| (k, s))).collect();

    let mut ids: BTreeMap<&Value, usize> = BTreeMap::new();
    let mut block: Vec<usize> = states
        .iter()
        .map(|(_, s)| {
            let n = ids.len();
            *ids.entry(&s.shape).or_insert(n)
        })
        .collect();
    let mut count = ids.len();
    loop {
        type Signature<'a> = (usize, Vec<(&'a Value, usize)>);
        let mut sigs: BTreeMap<Signature, usize> = BTreeMap::new();
        let next: Vec<usize> = states
            .iter()
            .enumerate()
            .map(|(g, (k, s))| {
                let sig = (block[g], s.next.iter().map(|(q, t)| (q, block[offsets[*k] + t])).collect());
                let n = sigs.len();
                *sigs.entry(sig).or_insert(n)
            })
            .collect();
        let new_count = sigs.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    machines.iter().zip(&offsets).map(|(m, &o)| block[o..o + m.len()].to_vec()).collect()
}

/// Bisimilarity class of each seed; equal ids mean bisimilar seeds.
pub fn classes(seeds: &[MSeed]) -> Vec<usize> {
    let mut machines: Vec<&Arc<CoalgebraMachine>> = Vec::new();
    let mut which = Vec::with_capacity(seeds.len());
    for s in seeds {
        let k = match machines.iter().position(|m| Arc::ptr_eq(m, s.machine_arc())) {
            Some(k) => k,
            None => {
                machines.push(s.machine_arc());
                machines.len() - 1
            }
        };
        which.push(k);
    }
    let refs: Vec<&CoalgebraMachine> = machines.iter().map(|m| &***m).collect();
    let blocks = refine(&refs);
    seeds.iter().zip(which).map(|(s, k)| blocks[k][s.state()]).collect()
}
