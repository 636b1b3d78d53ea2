//! Bounded languages by enumeration.

use std::collections::BTreeSet;

use dsc_core::{Event, Generator, StateId};

pub type Word = Vec<Event>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lang {
    pub closed: BTreeSet<Word>,
    pub marked: BTreeSet<Word>,
}

impl Lang {
    /// First word in the symmetric difference, closed behavior first.
    pub fn first_difference(&self, other: &Lang) -> Option<(Word, &'static str)> {
        let diff = |a: &BTreeSet<Word>, b: &BTreeSet<Word>| {
            a.symmetric_difference(b).min_by_key(|w| (w.len(), (*w).clone())).cloned()
        };
        diff(&self.closed, &other.closed)
            .map(|w| (w, "closed"))
            .or_else(|| diff(&self.marked, &other.marked).map(|w| (w, "marked")))
    }
}

/// Runs `w` from the initial state, one transition at a time.
pub fn run(g: &Generator, w: &[Event]) -> Option<StateId> {
    let mut q = g.initial()?;
    for &e in w {
        q = g.transitions_from(q).iter().find(|t| t.0 == e)?.1;
    }
    Some(q)
}

/// `L(g)` and `Lm(g)` up to length `depth`.
pub fn words(g: &Generator, depth: usize) -> Lang {
    let mut out = Lang::default();
    let Some(q0) = g.initial() else {
        return out;
    };
    fn go(g: &Generator, q: StateId, w: &mut Word, depth: usize, out: &mut Lang) {
        out.closed.insert(w.clone());
        if g.is_marked(q) {
            out.marked.insert(w.clone());
        }
        if w.len() == depth {
            return;
        }
        for &(e, t) in g.transitions_from(q) {
            w.push(e);
            go(g, t, w, depth, out);
            w.pop();
        }
    }
    go(g, q0, &mut Vec::new(), depth, &mut out);
    out
}

pub fn restrict(w: &[Event], keep: &BTreeSet<Event>) -> Word {
    w.iter().copied().filter(|e| keep.contains(e)).collect()
}

/// Strings over the union alphabet whose restriction to each component's
/// alphabet is in that component's language.
pub fn sync_words(gs: &[&Generator], depth: usize) -> Lang {
    let alphabets: Vec<BTreeSet<Event>> =
        gs.iter().map(|g| g.alphabet().events().clone()).collect();
    let union: BTreeSet<Event> = alphabets.iter().flatten().copied().collect();
    let mut out = Lang::default();
    let mut stack: Vec<Word> = vec![Vec::new()];
    while let Some(w) = stack.pop() {
        let states: Vec<Option<StateId>> = gs
            .iter()
            .zip(&alphabets)
            .map(|(g, a)| run(g, &restrict(&w, a)))
            .collect();
        if states.iter().any(Option::is_none) {
            continue;
        }
        if states
            .iter()
            .zip(gs)
            .all(|(q, g)| g.is_marked(q.unwrap()))
        {
            out.marked.insert(w.clone());
        }
        if w.len() < depth {
            for &e in &union {
                let mut v = w.clone();
                v.push(e);
                stack.push(v);
            }
        }
        out.closed.insert(w);
    }
    out
}

fn silent_closure(g: &Generator, nulled: &BTreeSet<Event>, set: &BTreeSet<StateId>) -> BTreeSet<StateId> {
    let mut out = set.clone();
    let mut stack: Vec<StateId> = set.iter().copied().collect();
    while let Some(q) = stack.pop() {
        for &(e, t) in g.transitions_from(q) {
            if nulled.contains(&e) && out.insert(t) {
                stack.push(t);
            }
        }
    }
    out
}

/// `P(L(g))` and `P(Lm(g))` up to length `depth`, by simulating the
/// projected behavior as a nondeterministic automaton.
pub fn projected_words(g: &Generator, nulled: &BTreeSet<Event>, depth: usize) -> Lang {
    let observed: Vec<Event> = g
        .alphabet()
        .events()
        .iter()
        .copied()
        .filter(|e| !nulled.contains(e))
        .collect();
    let mut out = Lang::default();
    let Some(q0) = g.initial() else {
        return out;
    };
    let start = silent_closure(g, nulled, &BTreeSet::from([q0]));
    let mut stack: Vec<(Word, BTreeSet<StateId>)> = vec![(Vec::new(), start)];
    while let Some((w, reached)) = stack.pop() {
        if reached.is_empty() {
            continue;
        }
        if reached.iter().any(|&q| g.is_marked(q)) {
            out.marked.insert(w.clone());
        }
        if w.len() < depth {
            for &e in &observed {
                let next: BTreeSet<StateId> = reached
                    .iter()
                    .flat_map(|&q| g.transitions_from(q).iter().filter(|t| t.0 == e).map(|t| t.1))
                    .collect();
                let mut v = w.clone();
                v.push(e);
                stack.push((v, silent_closure(g, nulled, &next)));
            }
        }
        out.closed.insert(w);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use dsc_core::event::events;

    #[test]
    fn words_of_a_cycle() {
        let g = Generator::from_transitions(2, 0, &[0], &[(0, 1, 1), (1, 2, 0)]).unwrap();
        let l = words(&g, 3);
        assert_eq!(l.closed.len(), 4);
        assert_eq!(l.marked, BTreeSet::from([vec![], events(&[1, 2])]));
    }

    #[test]
    fn shared_events_synchronize() {
        let a = Generator::from_transitions(2, 0, &[1], &[(0, 1, 1)]).unwrap();
        let b = Generator::from_transitions(2, 0, &[0, 1], &[(0, 2, 1), (1, 1, 1)]).unwrap();
        let l = sync_words(&[&a, &b], 3);
        assert_eq!(
            l.closed,
            BTreeSet::from([vec![], events(&[2]), events(&[2, 1])])
        );
        assert_eq!(l.marked, BTreeSet::from([events(&[2, 1])]));
    }

    #[test]
    fn projection_erases() {
        let g = Generator::from_transitions(3, 0, &[2], &[(0, 1, 1), (1, 2, 2)]).unwrap();
        let l = projected_words(&g, &BTreeSet::from([Event(1)]), 3);
        assert_eq!(l.closed, BTreeSet::from([vec![], events(&[2])]));
        assert_eq!(l.marked, BTreeSet::from([events(&[2])]));
    }
}
