//! Supremal controllable sublanguage by a direct fixpoint, and the three
//! properties any supervisor must have.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use dsc_core::{Event, Generator, StateId};

use crate::lang::{restrict, run, words, Lang};

type Pair = (StateId, StateId);

/// The supervisor as a set of admissible plant/spec state pairs.
pub struct NaiveSupervisor<'a> {
    plant: &'a Generator,
    spec: &'a Generator,
    good: HashSet<Pair>,
}

impl<'a> NaiveSupervisor<'a> {
    pub fn new(plant: &'a Generator, spec: &'a Generator) -> Self {
        let mut me = NaiveSupervisor {
            plant,
            spec,
            good: HashSet::new(),
        };
        let (Some(p0), Some(s0)) = (plant.initial(), spec.initial()) else {
            return me;
        };
        let mut good: HashSet<Pair> = HashSet::from([(p0, s0)]);
        let mut queue = VecDeque::from([(p0, s0)]);
        while let Some(x) = queue.pop_front() {
            for (_, y) in me.moves(x) {
                if let Some(y) = y {
                    if good.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
        }
        loop {
            let before = good.len();
            let uncontrollable_ok = |x: &Pair, good: &HashSet<Pair>| {
                me.moves(*x).into_iter().all(|(e, y)| {
                    plant.alphabet().is_controllable(e) || y.is_some_and(|y| good.contains(&y))
                })
            };
            good = good
                .iter()
                .filter(|x| uncontrollable_ok(x, &good))
                .copied()
                .collect();
            // keep only pairs that can still reach a marked pair
            let mut alive: HashSet<Pair> = good
                .iter()
                .filter(|&&(p, s)| plant.is_marked(p) && spec.is_marked(s))
                .copied()
                .collect();
            loop {
                let n = alive.len();
                for x in &good {
                    if !alive.contains(x)
                        && me
                            .moves(*x)
                            .iter()
                            .any(|(_, y)| y.is_some_and(|y| alive.contains(&y)))
                    {
                        alive.insert(*x);
                    }
                }
                if alive.len() == n {
                    break;
                }
            }
            good = alive;
            if good.len() == before {
                break;
            }
        }
        me.good = good;
        me
    }

    /// Plant moves from `x`, with the joint target or `None` when the spec
    /// refuses the event.
    fn moves(&self, (p, s): Pair) -> Vec<(Event, Option<Pair>)> {
        self.plant
            .transitions_from(p)
            .iter()
            .map(|&(e, pt)| {
                let st = if self.spec.alphabet().contains(e) {
                    self.spec.step(s, e)
                } else {
                    Some(s)
                };
                (e, st.map(|st| (pt, st)))
            })
            .collect()
    }

    /// Closed and marked membership of `w`.
    pub fn accepts(&self, w: &[Event]) -> (bool, bool) {
        let (Some(mut p), Some(mut s)) = (self.plant.initial(), self.spec.initial()) else {
            return (false, false);
        };
        if !self.good.contains(&(p, s)) {
            return (false, false);
        }
        for &e in w {
            match self.moves((p, s)).into_iter().find(|m| m.0 == e) {
                Some((_, Some(y))) if self.good.contains(&y) => (p, s) = y,
                _ => return (false, false),
            }
        }
        (true, self.plant.is_marked(p) && self.spec.is_marked(s))
    }

    pub fn words(&self, depth: usize) -> Lang {
        let mut out = Lang::default();
        for w in words(self.plant, depth).closed {
            let (c, m) = self.accepts(&w);
            if c {
                out.closed.insert(w.clone());
            }
            if m {
                out.marked.insert(w);
            }
        }
        out
    }
}

/// A string of `k` extended by an uncontrollable event the plant allows
/// but `k` does not, among strings up to `depth`.
pub fn uncontrollable_escape(k: &Generator, plant: &Generator, depth: usize) -> Option<Vec<Event>> {
    for w in words(k, depth).closed {
        let Some(p) = run(plant, &w) else {
            return Some(w);
        };
        for &(e, _) in plant.transitions_from(p) {
            if !plant.alphabet().is_controllable(e) {
                let mut v = w.clone();
                v.push(e);
                if run(k, &v).is_none() {
                    return Some(v);
                }
            }
        }
    }
    None
}

/// A reachable state of `k` from which no marker state is reachable.
pub fn blocking_state(k: &Generator) -> Option<StateId> {
    let q0 = k.initial()?;
    let mut reach = BTreeSet::from([q0]);
    let mut stack = vec![q0];
    while let Some(q) = stack.pop() {
        for &(_, t) in k.transitions_from(q) {
            if reach.insert(t) {
                stack.push(t);
            }
        }
    }
    let mut co: BTreeSet<StateId> = (0..k.num_states()).filter(|&q| k.is_marked(q)).collect();
    loop {
        let n = co.len();
        for q in 0..k.num_states() {
            if k.transitions_from(q).iter().any(|t| co.contains(&t.1)) {
                co.insert(q);
            }
        }
        if co.len() == n {
            break;
        }
    }
    reach.into_iter().find(|q| !co.contains(q))
}

/// A string of `k` outside `L(plant) ∩ L(spec)` or a marked one outside
/// `Lm(plant) ∩ Lm(spec)`, among strings up to `depth`.
pub fn outside_spec(k: &Generator, plant: &Generator, spec: &Generator, depth: usize) -> Option<Vec<Event>> {
    let spec_events = spec.alphabet().events();
    let l = words(k, depth);
    let mut memo: HashMap<Vec<Event>, (bool, bool)> = HashMap::new();
    let mut member = |w: &Vec<Event>| {
        *memo.entry(w.clone()).or_insert_with(|| {
            let p = run(plant, w);
            let s = run(spec, &restrict(w, spec_events));
            (
                p.is_some() && s.is_some(),
                p.is_some_and(|p| plant.is_marked(p)) && s.is_some_and(|s| spec.is_marked(s)),
            )
        })
    };
    for w in &l.closed {
        if !member(w).0 {
            return Some(w.clone());
        }
    }
    l.marked.iter().find(|w| !member(w).1).cloned()
}
