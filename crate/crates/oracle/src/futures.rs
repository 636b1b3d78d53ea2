//! Projected futures of states, compared exactly by exploring pairs of
//! state sets.

use std::collections::{BTreeSet, HashSet, VecDeque};

use dsc_core::{Event, Generator, StateId};

type Set = BTreeSet<StateId>;

struct View<'a> {
    g: &'a Generator,
    nulled: &'a BTreeSet<Event>,
}

impl View<'_> {
    fn close(&self, mut set: Set) -> Set {
        let mut stack: Vec<StateId> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &(e, t) in self.g.transitions_from(q) {
                if self.nulled.contains(&e) && set.insert(t) {
                    stack.push(t);
                }
            }
        }
        set
    }

    fn after(&self, set: &Set, e: Event) -> Set {
        self.close(
            set.iter()
                .flat_map(|&q| {
                    self.g
                        .transitions_from(q)
                        .iter()
                        .filter(move |t| t.0 == e)
                        .map(|t| t.1)
                })
                .collect(),
        )
    }

    fn marked(&self, set: &Set) -> bool {
        set.iter().any(|&q| self.g.is_marked(q))
    }

    fn observed(&self) -> Vec<Event> {
        self.g
            .alphabet()
            .events()
            .iter()
            .copied()
            .filter(|e| !self.nulled.contains(e))
            .collect()
    }

    /// Every projected future of `a` is one of `b`: closed futures when
    /// `closed`, and marked futures always.
    fn included(&self, a: Set, b: Set, closed: bool) -> bool {
        let events = self.observed();
        let mut seen: HashSet<(Set, Set)> = HashSet::new();
        let mut queue = VecDeque::from([(a, b)]);
        while let Some((a, b)) = queue.pop_front() {
            if a.is_empty() || !seen.insert((a.clone(), b.clone())) {
                continue;
            }
            if closed && b.is_empty() {
                return false;
            }
            if self.marked(&a) && !self.marked(&b) {
                return false;
            }
            for &e in &events {
                queue.push_back((self.after(&a, e), self.after(&b, e)));
            }
        }
        true
    }

    /// Sets of states reached by the projections of reachable strings.
    fn reachable_sets(&self) -> Vec<Set> {
        let Some(q0) = self.g.initial() else {
            return Vec::new();
        };
        let events = self.observed();
        let start = self.close(Set::from([q0]));
        let mut seen: HashSet<Set> = HashSet::from([start.clone()]);
        let mut out = vec![start.clone()];
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for &e in &events {
                let t = self.after(&s, e);
                if !t.is_empty() && seen.insert(t.clone()) {
                    out.push(t.clone());
                    queue.push_back(t);
                }
            }
        }
        out
    }

    fn uniform(&self, closed: bool) -> bool {
        self.reachable_sets().into_iter().all(|s| {
            s.iter()
                .all(|&x| self.included(s.clone(), self.close(Set::from([x])), closed))
        })
    }
}

/// Same projected closed and marked futures.
pub fn future_equivalent(g: &Generator, nulled: &BTreeSet<Event>, x: StateId, y: StateId) -> bool {
    let v = View { g, nulled };
    let (a, b) = (v.close(Set::from([x])), v.close(Set::from([y])));
    v.included(a.clone(), b.clone(), true) && v.included(b, a, true)
}

/// Every two reachable states entered by strings with a common
/// projection have the same projected closed and marked futures.
pub fn projection_loses_no_future(g: &Generator, nulled: &BTreeSet<Event>) -> bool {
    View { g, nulled }.uniform(true)
}

/// The `Lm(g)`-observer property: whenever `P(s)·t` is in `P(Lm(g))` for
/// a reachable `s`, some `u` with `P(u) = t` has `s·u` in `Lm(g)`.
///
/// Every state entered by strings projecting to some `w` must then have
/// all the marked futures of the whole set entered by `w`.
pub fn lm_observer(g: &Generator, nulled: &BTreeSet<Event>) -> bool {
    View { g, nulled }.uniform(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hidden_choice_breaks_observer() {
        // two hidden branches, then 2; only the second version leaves
        // one branch unmarked
        let g = Generator::from_transitions(
            4,
            0,
            &[2],
            &[(0, 1, 1), (0, 3, 3), (1, 2, 2), (3, 2, 2)],
        )
        .unwrap();
        let nulled = BTreeSet::from([Event(1), Event(3)]);
        assert!(projection_loses_no_future(&g, &nulled));
        let g = Generator::from_transitions(
            5,
            0,
            &[2],
            &[(0, 1, 1), (0, 3, 3), (1, 2, 2), (3, 2, 4)],
        )
        .unwrap();
        assert!(!projection_loses_no_future(&g, &nulled));
        assert!(!lm_observer(&g, &nulled));
    }

    #[test]
    fn equivalent_states() {
        let g = Generator::from_transitions(3, 0, &[1, 2], &[(0, 1, 1), (0, 3, 2), (0, 2, 0)]).unwrap();
        let nulled = BTreeSet::from([Event(1), Event(3)]);
        assert!(future_equivalent(&g, &nulled, 1, 2));
        assert!(!future_equivalent(&g, &nulled, 0, 1));
    }
}
