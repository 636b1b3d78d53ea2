//! Bounded language enumeration and shortest-string searches.
//!
//! Enumeration is exponential in the depth and only meant for small
//! generators; it is the brute-force reference that the automaton-level
//! algorithms are checked against.

use std::collections::{BTreeSet, VecDeque};

use crate::event::Event;
use crate::generator::{Generator, Label, NondetGenerator, StateId};

/// Closed and marked strings of length at most some bound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Language {
    pub closed: BTreeSet<Vec<Event>>,
    pub marked: BTreeSet<Vec<Event>>,
}

impl Language {
    /// Applies a string homomorphism that erases `nulled` events, keeping
    /// results of length at most `max_len`.
    pub fn project(&self, nulled: &BTreeSet<Event>, max_len: usize) -> Language {
        let p = |set: &BTreeSet<Vec<Event>>| {
            set.iter()
                .map(|s| erase(s, nulled))
                .filter(|s| s.len() <= max_len)
                .collect()
        };
        Language {
            closed: p(&self.closed),
            marked: p(&self.marked),
        }
    }

    pub fn truncate(&self, max_len: usize) -> Language {
        Language {
            closed: self.closed.iter().filter(|s| s.len() <= max_len).cloned().collect(),
            marked: self.marked.iter().filter(|s| s.len() <= max_len).cloned().collect(),
        }
    }
}

/// Natural projection of a single string.
pub fn erase(s: &[Event], nulled: &BTreeSet<Event>) -> Vec<Event> {
    s.iter().copied().filter(|e| !nulled.contains(e)).collect()
}

/// Exact `L(g)` and `Lm(g)` truncated at `max_len`.
pub fn enumerate_language(g: &Generator, max_len: usize) -> Language {
    let mut lang = Language::default();
    let Some(q0) = g.initial() else {
        return lang;
    };
    let mut stack: Vec<(StateId, Vec<Event>)> = vec![(q0, Vec::new())];
    while let Some((q, s)) = stack.pop() {
        if g.is_marked(q) {
            lang.marked.insert(s.clone());
        }
        if s.len() < max_len {
            for &(e, t) in g.transitions_from(q) {
                let mut next = s.clone();
                next.push(e);
                stack.push((t, next));
            }
        }
        lang.closed.insert(s);
    }
    lang
}

/// Observable language of a nondeterministic generator (silent moves
/// erased), truncated at `max_len` observable events.
pub fn enumerate_nondet_language(g: &NondetGenerator, max_len: usize) -> Language {
    let mut lang = Language::default();
    let Some(q0) = g.initial() else {
        return lang;
    };
    let closure = |set: BTreeSet<StateId>| {
        let mut out = set.clone();
        let mut queue: VecDeque<StateId> = set.into_iter().collect();
        while let Some(q) = queue.pop_front() {
            for t in g.successors(q, Label::Silent) {
                if out.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        out
    };
    let events: Vec<Event> = g.alphabet().events().iter().copied().collect();
    let mut stack = vec![(closure(BTreeSet::from([q0])), Vec::new())];
    while let Some((set, s)) = stack.pop() {
        if set.iter().any(|&q| g.is_marked(q)) {
            lang.marked.insert(s.clone());
        }
        if s.len() < max_len {
            for &e in &events {
                let next: BTreeSet<StateId> = set
                    .iter()
                    .flat_map(|&q| g.successors(q, Label::Event(e)))
                    .collect();
                if !next.is_empty() {
                    let mut ns = s.clone();
                    ns.push(e);
                    stack.push((closure(next), ns));
                }
            }
        }
        lang.closed.insert(s);
    }
    lang
}

/// Shortest string from the initial state to a state satisfying `goal`,
/// exploring in label order so the result is deterministic.
pub fn shortest_string_to<F>(g: &Generator, goal: F) -> Option<Vec<Event>>
where
    F: Fn(StateId) -> bool,
{
    let q0 = g.initial()?;
    let n = g.num_states();
    let mut parent: Vec<Option<(StateId, Event)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[q0] = true;
    let mut queue = VecDeque::from([q0]);
    while let Some(q) = queue.pop_front() {
        if goal(q) {
            let mut s = Vec::new();
            let mut cur = q;
            while let Some((p, e)) = parent[cur] {
                s.push(e);
                cur = p;
            }
            s.reverse();
            return Some(s);
        }
        for &(e, t) in g.transitions_from(q) {
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some((q, e));
                queue.push_back(t);
            }
        }
    }
    None
}

/// Shortest marked string of `g`.
pub fn shortest_marked_string(g: &Generator) -> Option<Vec<Event>> {
    shortest_string_to(g, |q| g.is_marked(q))
}
