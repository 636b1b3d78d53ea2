//! State minimization and isomorphism of deterministic generators.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::event::Event;
use crate::generator::{Generator, StateId};
use crate::ops::reachable;

/// Minimal-state generator with the same closed and marked languages.
///
/// Works on the reachable part. Blocking states are kept: two states are
/// merged only when they agree on marking and on which strings are defined.
/// States of the result are numbered in breadth-first order from the
/// initial state, so language-equivalent inputs give identical outputs.
pub fn minimize(g: &Generator) -> Generator {
    let g = reachable(g);
    let n = g.num_states();
    if n == 0 {
        return g;
    }

    // Moore refinement: block ids are recomputed from signatures until the
    // number of blocks stops growing.
    let mut block: Vec<usize> = (0..n).map(|s| g.is_marked(s) as usize).collect();
    let mut count = renumber(&mut block);
    loop {
        let mut sig_index: HashMap<(usize, Vec<(Event, usize)>), usize> = HashMap::new();
        let mut next = vec![0; n];
        for s in 0..n {
            let sig: Vec<(Event, usize)> = g
                .transitions_from(s)
                .iter()
                .map(|&(e, t)| (e, block[t]))
                .collect();
            let len = sig_index.len();
            next[s] = *sig_index.entry((block[s], sig)).or_insert(len);
        }
        let new_count = sig_index.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }

    // canonical numbering by BFS over blocks
    let q0 = g.initial().unwrap();
    let mut order = vec![usize::MAX; count];
    let mut rep = Vec::with_capacity(count);
    order[block[q0]] = 0;
    rep.push(q0);
    let mut queue = VecDeque::from([q0]);
    while let Some(s) = queue.pop_front() {
        for &(_, t) in g.transitions_from(s) {
            if order[block[t]] == usize::MAX {
                order[block[t]] = rep.len();
                rep.push(t);
                queue.push_back(t);
            }
        }
    }
    let mut trans = Vec::with_capacity(count);
    let mut marked = FixedBitSet::with_capacity(count);
    for (i, &s) in rep.iter().enumerate() {
        if g.is_marked(s) {
            marked.insert(i);
        }
        trans.push(
            g.transitions_from(s)
                .iter()
                .map(|&(e, t)| (e, order[block[t]]))
                .collect(),
        );
    }
    Generator::from_raw(g.alphabet().clone(), trans, 0, marked)
}

fn renumber(block: &mut [usize]) -> usize {
    let mut ids = HashMap::new();
    for b in block.iter_mut() {
        let len = ids.len();
        *b = *ids.entry(*b).or_insert(len);
    }
    ids.len()
}

/// Why two generators failed to be isomorphic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoMismatch {
    /// Offending state pair, when the traversal got that far.
    pub states: Option<(StateId, StateId)>,
    pub reason: MismatchReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MismatchReason {
    StateCount(usize, usize),
    /// Exactly one generator is empty.
    Emptiness,
    Marking,
    EventSet { left: Vec<Event>, right: Vec<Event> },
    /// Two distinct states of one side map to a single state of the other.
    NotInjective,
}

impl fmt::Display for IsoMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            MismatchReason::StateCount(a, b) => write!(f, "state counts differ ({a} vs {b})")?,
            MismatchReason::Emptiness => write!(f, "exactly one generator is empty")?,
            MismatchReason::Marking => write!(f, "marking differs")?,
            MismatchReason::EventSet { left, right } => {
                write!(f, "enabled events differ ({left:?} vs {right:?})")?
            }
            MismatchReason::NotInjective => write!(f, "state correspondence is not a bijection")?,
        }
        if let Some((a, b)) = self.states {
            write!(f, " at state pair ({a}, {b})")?;
        }
        Ok(())
    }
}

/// Finds the state bijection between two deterministic reachable
/// generators by a single parallel breadth-first traversal.
///
/// Returns `mapping[a_state] = b_state` on success. Declared but unused
/// alphabet events are not compared. Inputs that are not reachable should
/// be passed through [`minimize`] or [`reachable`] first.
pub fn isomorphism(a: &Generator, b: &Generator) -> Result<Vec<StateId>, IsoMismatch> {
    let fail = |states, reason| Err(IsoMismatch { states, reason });
    match (a.initial(), b.initial()) {
        (None, None) => return Ok(Vec::new()),
        (Some(_), None) | (None, Some(_)) => return fail(None, MismatchReason::Emptiness),
        _ => {}
    }
    if a.num_states() != b.num_states() {
        return fail(
            None,
            MismatchReason::StateCount(a.num_states(), b.num_states()),
        );
    }
    let n = a.num_states();
    let mut fwd = vec![usize::MAX; n];
    let mut bwd = vec![usize::MAX; n];
    let (a0, b0) = (a.initial().unwrap(), b.initial().unwrap());
    fwd[a0] = b0;
    bwd[b0] = a0;
    let mut queue = VecDeque::from([(a0, b0)]);
    while let Some((x, y)) = queue.pop_front() {
        if a.is_marked(x) != b.is_marked(y) {
            return fail(Some((x, y)), MismatchReason::Marking);
        }
        let (ox, oy) = (a.transitions_from(x), b.transitions_from(y));
        if ox.len() != oy.len() || ox.iter().zip(oy).any(|(p, q)| p.0 != q.0) {
            return fail(
                Some((x, y)),
                MismatchReason::EventSet {
                    left: ox.iter().map(|t| t.0).collect(),
                    right: oy.iter().map(|t| t.0).collect(),
                },
            );
        }
        for (&(_, tx), &(_, ty)) in ox.iter().zip(oy) {
            match (fwd[tx], bwd[ty]) {
                (usize::MAX, usize::MAX) => {
                    fwd[tx] = ty;
                    bwd[ty] = tx;
                    queue.push_back((tx, ty));
                }
                (fy, fx) if fy == ty && fx == tx => {}
                _ => return fail(Some((tx, ty)), MismatchReason::NotInjective),
            }
        }
    }
    if fwd.contains(&usize::MAX) {
        // unreachable states on one side
        return fail(None, MismatchReason::StateCount(n, n));
    }
    Ok(fwd)
}

pub fn isomorphic(a: &Generator, b: &Generator) -> bool {
    isomorphism(a, b).is_ok()
}

/// Closed and marked language equality, decided on minimal forms.
pub fn language_equivalent(a: &Generator, b: &Generator) -> bool {
    isomorphic(&minimize(a), &minimize(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::sync;

    #[test]
    fn minimize_merges_equivalent_states() {
        // two copies of the feeder loop
        let g = Generator::from_transitions(
            4,
            0,
            &[0, 2],
            &[(0, 11, 1), (1, 12, 2), (2, 11, 3), (3, 12, 0)],
        )
        .unwrap();
        let m = minimize(&g);
        assert_eq!(m.size(), (2, 2));
        assert!(isomorphic(&minimize(&m), &m));
    }

    #[test]
    fn minimize_keeps_blocking_state_distinct() {
        // 0 -1-> 1 marked, 0 -2-> 2 dead: the dead state is not the same as
        // "undefined", and must survive
        let g = Generator::from_transitions(3, 0, &[1], &[(0, 1, 1), (0, 2, 2)]).unwrap();
        assert_eq!(minimize(&g).num_states(), 3);
        // two unmarked dead ends collapse
        let g = Generator::from_transitions(3, 0, &[], &[(0, 1, 1), (0, 2, 2)]).unwrap();
        assert_eq!(minimize(&g).num_states(), 2);
    }

    #[test]
    fn iso_reflexive_and_permutation() {
        let g = Generator::from_transitions(
            3,
            2,
            &[2],
            &[(2, 13, 0), (0, 14, 2), (2, 15, 1), (1, 16, 2)],
        )
        .unwrap();
        assert_eq!(isomorphism(&g, &g).unwrap()[2], 2);
        let h = Generator::from_transitions(
            3,
            0,
            &[0],
            &[(0, 13, 1), (1, 14, 0), (0, 15, 2), (2, 16, 0)],
        )
        .unwrap();
        assert_eq!(isomorphism(&g, &h).unwrap(), vec![1, 2, 0]);
    }

    #[test]
    fn iso_mismatch_witness() {
        let g = Generator::from_transitions(2, 0, &[0], &[(0, 11, 1), (1, 12, 0)]).unwrap();
        let h = Generator::from_transitions(2, 0, &[0, 1], &[(0, 11, 1), (1, 12, 0)]).unwrap();
        let err = isomorphism(&g, &h).unwrap_err();
        assert_eq!(err.reason, MismatchReason::Marking);
        assert_eq!(err.states, Some((1, 1)));
    }

    #[test]
    fn sync_is_commutative_up_to_iso() {
        let a = Generator::from_transitions(2, 0, &[0], &[(0, 11, 1), (1, 12, 0)]).unwrap();
        let b = Generator::from_transitions(2, 0, &[0], &[(0, 12, 1), (1, 13, 0)]).unwrap();
        let ab = sync(&[&a, &b]).unwrap();
        let ba = sync(&[&b, &a]).unwrap();
        assert!(isomorphic(&ab, &ba));
    }
}
