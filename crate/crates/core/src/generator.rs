use std::collections::{BTreeSet, VecDeque};

use fixedbitset::FixedBitSet;

use crate::error::AutomataError;
use crate::event::{Alphabet, Event};

pub type StateId = usize;

/// Deterministic finite-state generator `(Q, Σ, δ, q0, Qm)`.
///
/// States are dense indices `0..n`. A generator with zero states is the
/// empty generator; it is a legal value (for instance the result of trimming
/// a generator whose initial state cannot reach a marker) and every
/// operation accepts it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    alphabet: Alphabet,
    // per-state outgoing transitions, sorted by event, at most one per event
    trans: Vec<Vec<(Event, StateId)>>,
    initial: StateId,
    marked: FixedBitSet,
}

impl Generator {
    /// Builds a generator, rejecting out-of-range states, events outside the
    /// alphabet, and duplicate `(state, event)` pairs.
    pub fn new<I>(
        alphabet: Alphabet,
        states: usize,
        initial: StateId,
        marked: &[StateId],
        transitions: I,
    ) -> Result<Self, AutomataError>
    where
        I: IntoIterator<Item = (StateId, Event, StateId)>,
    {
        let check = |s: StateId| {
            if s >= states {
                Err(AutomataError::StateOutOfRange { state: s, states })
            } else {
                Ok(())
            }
        };
        if states > 0 {
            check(initial)?;
        }
        let mut trans = vec![Vec::new(); states];
        for (from, ev, to) in transitions {
            check(from)?;
            check(to)?;
            if !alphabet.contains(ev) {
                return Err(AutomataError::EventNotInAlphabet(ev));
            }
            trans[from].push((ev, to));
        }
        for (s, out) in trans.iter_mut().enumerate() {
            out.sort_unstable();
            for w in out.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(AutomataError::Nondeterministic {
                        state: s,
                        event: w[0].0,
                    });
                }
            }
        }
        let mut bits = FixedBitSet::with_capacity(states);
        for &m in marked {
            check(m)?;
            bits.insert(m);
        }
        Ok(Generator {
            alphabet,
            trans,
            initial: if states == 0 { 0 } else { initial },
            marked: bits,
        })
    }

    /// Same as [`Generator::new`] with a parity alphabet inferred from the
    /// transition labels.
    pub fn from_transitions(
        states: usize,
        initial: StateId,
        marked: &[StateId],
        transitions: &[(StateId, u32, StateId)],
    ) -> Result<Self, AutomataError> {
        let alphabet = Alphabet::with_parity(transitions.iter().map(|t| Event(t.1)));
        Self::new(
            alphabet,
            states,
            initial,
            marked,
            transitions.iter().map(|&(a, e, b)| (a, Event(e), b)),
        )
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Generator {
            alphabet,
            trans: Vec::new(),
            initial: 0,
            marked: FixedBitSet::new(),
        }
    }

    pub(crate) fn from_raw(
        alphabet: Alphabet,
        mut trans: Vec<Vec<(Event, StateId)>>,
        initial: StateId,
        marked: FixedBitSet,
    ) -> Self {
        for out in trans.iter_mut() {
            out.sort_unstable();
            debug_assert!(out.windows(2).all(|w| w[0].0 != w[1].0));
        }
        let n = trans.len();
        let mut marked = marked;
        marked.grow(n);
        Generator {
            alphabet,
            trans,
            initial: if n == 0 { 0 } else { initial },
            marked,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub(crate) fn alphabet_mut(&mut self) -> &mut Alphabet {
        &mut self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    /// `(states, transitions)`, the size figure TCT reports.
    pub fn size(&self) -> (usize, usize) {
        (self.num_states(), self.num_transitions())
    }

    pub fn is_empty(&self) -> bool {
        self.trans.is_empty()
    }

    pub fn initial(&self) -> Option<StateId> {
        if self.is_empty() {
            None
        } else {
            Some(self.initial)
        }
    }

    pub fn is_marked(&self, s: StateId) -> bool {
        self.marked.contains(s)
    }

    pub fn marked_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.marked.ones()
    }

    pub(crate) fn marked_bits(&self) -> &FixedBitSet {
        &self.marked
    }

    pub fn transitions_from(&self, s: StateId) -> &[(Event, StateId)] {
        &self.trans[s]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Event, StateId)> + '_ {
        self.trans
            .iter()
            .enumerate()
            .flat_map(|(s, out)| out.iter().map(move |&(e, t)| (s, e, t)))
    }

    pub fn step(&self, s: StateId, e: Event) -> Option<StateId> {
        let out = &self.trans[s];
        out.binary_search_by_key(&e, |t| t.0).ok().map(|i| out[i].1)
    }

    pub fn is_defined(&self, s: StateId, e: Event) -> bool {
        self.step(s, e).is_some()
    }

    /// State reached from the initial state by `s`, if defined.
    pub fn run(&self, s: &[Event]) -> Option<StateId> {
        let mut q = self.initial()?;
        for &e in s {
            q = self.step(q, e)?;
        }
        Some(q)
    }

    pub fn accepts_closed(&self, s: &[Event]) -> bool {
        self.run(s).is_some()
    }

    pub fn accepts_marked(&self, s: &[Event]) -> bool {
        self.run(s).is_some_and(|q| self.is_marked(q))
    }

    /// Events labelling at least one transition.
    pub fn events_used(&self) -> BTreeSet<Event> {
        self.trans.iter().flatten().map(|t| t.0).collect()
    }

    pub fn reachable_states(&self) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.num_states());
        let Some(q0) = self.initial() else {
            return seen;
        };
        let mut queue = VecDeque::from([q0]);
        seen.insert(q0);
        while let Some(q) = queue.pop_front() {
            for &(_, t) in &self.trans[q] {
                if !seen.put(t) {
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// States from which some marker state is reachable.
    pub fn coreachable_states(&self) -> FixedBitSet {
        let n = self.num_states();
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (s, _, t) in self.transitions() {
            preds[t].push(s);
        }
        let mut seen = FixedBitSet::with_capacity(n);
        let mut queue: VecDeque<StateId> = self.marked.ones().collect();
        for &m in &queue {
            seen.insert(m);
        }
        while let Some(q) = queue.pop_front() {
            for &p in &preds[q] {
                if !seen.put(p) {
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// Restricts the generator to `keep`, renumbering states in increasing
    /// order. The initial state must be kept unless the result is empty.
    pub(crate) fn restrict(&self, keep: &FixedBitSet) -> Generator {
        let Some(q0) = self.initial() else {
            return self.clone();
        };
        if !keep.contains(q0) {
            return Generator::empty(self.alphabet.clone());
        }
        let mut index = vec![usize::MAX; self.num_states()];
        for (i, s) in keep.ones().enumerate() {
            index[s] = i;
        }
        let n = keep.count_ones(..);
        let mut trans = vec![Vec::new(); n];
        let mut marked = FixedBitSet::with_capacity(n);
        for s in keep.ones() {
            let i = index[s];
            if self.is_marked(s) {
                marked.insert(i);
            }
            trans[i] = self.trans[s]
                .iter()
                .filter(|(_, t)| keep.contains(*t))
                .map(|&(e, t)| (e, index[t]))
                .collect();
        }
        Generator {
            alphabet: self.alphabet.clone(),
            trans,
            initial: index[q0],
            marked,
        }
    }

    /// Same generator started from `s`, keeping all states.
    pub fn with_initial(&self, s: StateId) -> Result<Generator, AutomataError> {
        if s >= self.num_states() {
            return Err(AutomataError::StateOutOfRange {
                state: s,
                states: self.num_states(),
            });
        }
        let mut g = self.clone();
        g.initial = s;
        Ok(g)
    }

    /// View as a nondeterministic generator.
    pub fn to_nondet(&self) -> NondetGenerator {
        NondetGenerator::from_raw(
            self.alphabet.clone(),
            self.trans
                .iter()
                .map(|out| out.iter().map(|&(e, t)| (Label::Event(e), t)).collect())
                .collect(),
            self.initial,
            self.marked.clone(),
        )
    }
}

/// Transition label of a nondeterministic generator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Label {
    Silent,
    Event(Event),
}

/// Generator with a transition relation and silent moves. Produced by
/// quotienting modulo a quasi-congruence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondetGenerator {
    alphabet: Alphabet,
    trans: Vec<Vec<(Label, StateId)>>,
    initial: StateId,
    marked: FixedBitSet,
}

impl NondetGenerator {
    pub fn new<I>(
        alphabet: Alphabet,
        states: usize,
        initial: StateId,
        marked: &[StateId],
        transitions: I,
    ) -> Result<Self, AutomataError>
    where
        I: IntoIterator<Item = (StateId, Label, StateId)>,
    {
        let check = |s: StateId| {
            if s >= states {
                Err(AutomataError::StateOutOfRange { state: s, states })
            } else {
                Ok(())
            }
        };
        if states > 0 {
            check(initial)?;
        }
        let mut trans = vec![Vec::new(); states];
        for (from, label, to) in transitions {
            check(from)?;
            check(to)?;
            if let Label::Event(e) = label {
                if !alphabet.contains(e) {
                    return Err(AutomataError::EventNotInAlphabet(e));
                }
            }
            trans[from].push((label, to));
        }
        let mut bits = FixedBitSet::with_capacity(states);
        for &m in marked {
            check(m)?;
            bits.insert(m);
        }
        Ok(Self::from_raw(alphabet, trans, initial, bits))
    }

    pub(crate) fn from_raw(
        alphabet: Alphabet,
        mut trans: Vec<Vec<(Label, StateId)>>,
        initial: StateId,
        mut marked: FixedBitSet,
    ) -> Self {
        for out in trans.iter_mut() {
            out.sort_unstable();
            out.dedup();
        }
        marked.grow(trans.len());
        NondetGenerator {
            alphabet,
            initial: if trans.is_empty() { 0 } else { initial },
            trans,
            marked,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    pub fn size(&self) -> (usize, usize) {
        (self.num_states(), self.num_transitions())
    }

    pub fn is_empty(&self) -> bool {
        self.trans.is_empty()
    }

    pub fn initial(&self) -> Option<StateId> {
        if self.is_empty() {
            None
        } else {
            Some(self.initial)
        }
    }

    pub fn is_marked(&self, s: StateId) -> bool {
        self.marked.contains(s)
    }

    pub fn transitions_from(&self, s: StateId) -> &[(Label, StateId)] {
        &self.trans[s]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Label, StateId)> + '_ {
        self.trans
            .iter()
            .enumerate()
            .flat_map(|(s, out)| out.iter().map(move |&(l, t)| (s, l, t)))
    }

    pub fn successors(&self, s: StateId, label: Label) -> impl Iterator<Item = StateId> + '_ {
        self.trans[s]
            .iter()
            .filter(move |(l, _)| *l == label)
            .map(|t| t.1)
    }
}
