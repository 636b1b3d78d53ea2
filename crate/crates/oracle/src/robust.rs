//! Channeled behavior built from its description, and delay-robustness
//! decided from the definition.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use dsc_core::robustness::ChannelSpec;
use dsc_core::{Alphabet, Event, Generator, StateId};

use crate::futures::projection_loses_no_future;

/// Joint state: one state per controller, one busy flag per channel.
pub type Joint = (Vec<StateId>, Vec<bool>);

/// The controllers with channeled imports renamed to their signals,
/// running alongside one single-slot channel per spec.
pub struct Channeled<'a> {
    pub sups: &'a [Generator],
    pub channels: &'a [ChannelSpec],
}

impl Channeled<'_> {
    /// Label controller `i` uses for its own transition on `e`.
    fn seen_as(&self, i: usize, e: Event) -> Event {
        self.channels
            .iter()
            .find(|c| c.recipient == i && c.event == e)
            .map_or(e, |c| c.signal)
    }

    pub fn events(&self) -> BTreeSet<Event> {
        let mut out = BTreeSet::new();
        for (i, g) in self.sups.iter().enumerate() {
            for &e in g.alphabet().events() {
                out.insert(self.seen_as(i, e));
            }
        }
        for c in self.channels {
            out.insert(c.event);
            out.insert(c.signal);
        }
        out
    }

    pub fn signals(&self) -> BTreeSet<Event> {
        self.channels.iter().map(|c| c.signal).collect()
    }

    pub fn initial(&self) -> Option<Joint> {
        let qs: Option<Vec<StateId>> = self.sups.iter().map(Generator::initial).collect();
        Some((qs?, vec![false; self.channels.len()]))
    }

    /// Step of the controllers alone, ignoring every channel except for
    /// the renaming of imports.
    pub fn step_controllers(&self, qs: &[StateId], x: Event) -> Option<Vec<StateId>> {
        let mut next = qs.to_vec();
        for (i, g) in self.sups.iter().enumerate() {
            let own = g
                .alphabet()
                .events()
                .iter()
                .find(|&&e| self.seen_as(i, e) == x);
            if let Some(&e) = own {
                next[i] = g.transitions_from(qs[i]).iter().find(|t| t.0 == e)?.1;
            }
        }
        Some(next)
    }

    /// Step of channel `k` alone.
    pub fn step_channel(&self, k: usize, busy: bool, x: Event) -> Option<bool> {
        let c = &self.channels[k];
        if x == c.event {
            (!busy).then_some(true)
        } else if x == c.signal {
            busy.then_some(false)
        } else {
            Some(busy)
        }
    }

    pub fn step(&self, (qs, busy): &Joint, x: Event) -> Option<Joint> {
        let qs = self.step_controllers(qs, x)?;
        let busy: Option<Vec<bool>> = busy
            .iter()
            .enumerate()
            .map(|(k, &b)| self.step_channel(k, b, x))
            .collect();
        Some((qs, busy?))
    }

    pub fn is_marked(&self, (qs, busy): &Joint) -> bool {
        qs.iter().zip(self.sups).all(|(&q, g)| g.is_marked(q)) && busy.iter().all(|b| !b)
    }

    /// Reachable joint states as an explicit generator.
    pub fn explore(&self) -> Generator {
        let events: Vec<Event> = self.events().into_iter().collect();
        let alphabet = Alphabet::with_parity(events.iter().copied());
        let Some(start) = self.initial() else {
            return Generator::empty(alphabet);
        };
        let mut index: HashMap<Joint, usize> = HashMap::from([(start.clone(), 0)]);
        let mut states = vec![start];
        let mut trans = Vec::new();
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for &x in &events {
                if let Some(y) = self.step(&states[i].clone(), x) {
                    let j = *index.entry(y.clone()).or_insert_with(|| {
                        states.push(y);
                        queue.push_back(states.len() - 1);
                        states.len() - 1
                    });
                    trans.push((i, x, j));
                }
            }
        }
        let marked: Vec<usize> = (0..states.len()).filter(|&i| self.is_marked(&states[i])).collect();
        Generator::new(alphabet, states.len(), 0, &marked, trans).unwrap()
    }
}

/// `P(L(g)) = L(h)` and `P(Lm(g)) = Lm(h)`, walking state sets of `g`
/// alongside `h`.
pub fn same_projected_behavior(g: &Generator, nulled: &BTreeSet<Event>, h: &Generator) -> bool {
    let close = |mut set: BTreeSet<StateId>| {
        let mut stack: Vec<StateId> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &(e, t) in g.transitions_from(q) {
                if nulled.contains(&e) && set.insert(t) {
                    stack.push(t);
                }
            }
        }
        set
    };
    let events: BTreeSet<Event> = g
        .alphabet()
        .events()
        .iter()
        .chain(h.alphabet().events())
        .copied()
        .filter(|e| !nulled.contains(e))
        .collect();
    let start = (g.initial().map(|q| close(BTreeSet::from([q]))).unwrap_or_default(), h.initial());
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((set, x)) = queue.pop_front() {
        let Some(x) = x else {
            if set.is_empty() {
                continue;
            }
            return false;
        };
        if set.is_empty() || set.iter().any(|&q| g.is_marked(q)) != h.is_marked(x) {
            return false;
        }
        for &e in &events {
            let next: BTreeSet<StateId> = set
                .iter()
                .flat_map(|&q| g.transitions_from(q).iter().filter(|t| t.0 == e).map(|t| t.1))
                .collect();
            let y = (close(next), h.step(x, e));
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    true
}

/// Delay-robust: with signals erased, the channeled behavior has exactly
/// the closed and marked behavior of `sup`, and strings with the same
/// erased image lead to states with the same erased futures.
pub fn delay_robust(sup: &Generator, sups: &[Generator], channels: &[ChannelSpec]) -> bool {
    let sys = Channeled { sups, channels };
    let g = sys.explore();
    let signals = sys.signals();
    same_projected_behavior(&g, &signals, sup) && projection_loses_no_future(&g, &signals)
}
