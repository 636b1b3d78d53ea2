//! Natural projection, supremal quasi-congruence quotients and the
//! observer test built on them.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::error::AutomataError;
use crate::event::{Alphabet, Event};
use crate::generator::{Generator, Label, NondetGenerator, StateId};
use crate::minimize::minimize;
use crate::ops::reachable;

/// Default cap on subset-construction states.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "DSC_BUDGET";

/// State budget from the environment, falling back to the default.
pub fn default_budget() -> usize {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Events a natural projection maps to the empty string.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProjectionSpec {
    pub nulled: BTreeSet<Event>,
}

impl ProjectionSpec {
    pub fn null<I: IntoIterator<Item = Event>>(events: I) -> Self {
        ProjectionSpec {
            nulled: events.into_iter().collect(),
        }
    }

    pub fn is_nulled(&self, e: Event) -> bool {
        self.nulled.contains(&e)
    }

    fn observed(&self, g: &Generator) -> Alphabet {
        g.alphabet().without(&self.nulled)
    }
}

fn silent_closure<F>(seed: &mut BTreeSet<StateId>, silent_succ: F)
where
    F: Fn(StateId) -> Vec<StateId>,
{
    let mut queue: VecDeque<StateId> = seed.iter().copied().collect();
    while let Some(q) = queue.pop_front() {
        for t in silent_succ(q) {
            if seed.insert(t) {
                queue.push_back(t);
            }
        }
    }
}

/// Minimal deterministic generator for `P(L(g))` and `P(Lm(g))`, by
/// subset construction over silent closures.
pub fn project(g: &Generator, spec: &ProjectionSpec) -> Result<Generator, AutomataError> {
    project_with_budget(g, spec, default_budget())
}

pub fn project_with_budget(
    g: &Generator,
    spec: &ProjectionSpec,
    budget: usize,
) -> Result<Generator, AutomataError> {
    let alphabet = spec.observed(g);
    let Some(q0) = g.initial() else {
        return Ok(Generator::empty(alphabet));
    };
    let silent = |q: StateId| {
        g.transitions_from(q)
            .iter()
            .filter(|(e, _)| spec.is_nulled(*e))
            .map(|&(_, t)| t)
            .collect::<Vec<_>>()
    };
    let mut start = BTreeSet::from([q0]);
    silent_closure(&mut start, silent);

    let mut index: HashMap<BTreeSet<StateId>, StateId> = HashMap::new();
    let mut subsets = vec![start.clone()];
    index.insert(start, 0);
    let mut trans: Vec<Vec<(Event, StateId)>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(q) = queue.pop_front() {
        let mut moves: BTreeMap<Event, BTreeSet<StateId>> = BTreeMap::new();
        for &x in &subsets[q] {
            for &(e, t) in g.transitions_from(x) {
                if !spec.is_nulled(e) {
                    moves.entry(e).or_default().insert(t);
                }
            }
        }
        let mut out = Vec::with_capacity(moves.len());
        for (e, mut target) in moves {
            silent_closure(&mut target, silent);
            let id = match index.get(&target) {
                Some(&id) => id,
                None => {
                    if subsets.len() >= budget {
                        return Err(AutomataError::BudgetExceeded { budget });
                    }
                    let id = subsets.len();
                    index.insert(target.clone(), id);
                    subsets.push(target);
                    queue.push_back(id);
                    id
                }
            };
            out.push((e, id));
        }
        trans.resize(trans.len().max(q + 1), Vec::new());
        trans[q] = out;
    }
    trans.resize(subsets.len(), Vec::new());
    let mut marked = FixedBitSet::with_capacity(subsets.len());
    for (i, set) in subsets.iter().enumerate() {
        if set.iter().any(|&x| g.is_marked(x)) {
            marked.insert(i);
        }
    }
    Ok(minimize(&Generator::from_raw(alphabet, trans, 0, marked)))
}

/// Saturated observable moves: for each state and each observed event,
/// the states reachable by `silent* σ silent*`, plus the marker move
/// `silent*` into a marker state.
struct Saturation {
    events: Vec<Event>,
    /// `moves[y][k]` for `events[k]`; the last slot is the marker move.
    moves: Vec<Vec<Vec<StateId>>>,
    silent: Vec<Vec<StateId>>,
}

fn saturate(g: &Generator, spec: &ProjectionSpec) -> Saturation {
    let n = g.num_states();
    let events: Vec<Event> = spec.observed(g).events().iter().copied().collect();
    let slot: HashMap<Event, usize> = events.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let silent: Vec<Vec<StateId>> = (0..n)
        .map(|q| {
            g.transitions_from(q)
                .iter()
                .filter(|(e, _)| spec.is_nulled(*e))
                .map(|&(_, t)| t)
                .collect()
        })
        .collect();
    let closure: Vec<Vec<StateId>> = (0..n)
        .map(|q| {
            let mut set = BTreeSet::from([q]);
            silent_closure(&mut set, |x| silent[x].clone());
            set.into_iter().collect()
        })
        .collect();
    let k = events.len();
    let mut moves = vec![vec![Vec::new(); k + 1]; n];
    for y in 0..n {
        let mut acc: Vec<BTreeSet<StateId>> = vec![BTreeSet::new(); k + 1];
        for &x in &closure[y] {
            if g.is_marked(x) {
                acc[k].extend(&closure[x]);
            }
            for &(e, t) in g.transitions_from(x) {
                if let Some(&i) = slot.get(&e) {
                    acc[i].extend(&closure[t]);
                }
            }
        }
        moves[y] = acc.into_iter().map(|s| s.into_iter().collect()).collect();
    }
    Saturation {
        events,
        moves,
        silent,
    }
}

/// Coarsest partition of the states of `g` such that equivalent states
/// have the same saturated observable moves into blocks, marker move
/// included. Blocks are numbered by their smallest state.
pub fn supremal_quasi_congruence(g: &Generator, spec: &ProjectionSpec) -> Vec<usize> {
    let sat = saturate(g, spec);
    quasi_congruence_blocks(&sat, g.num_states())
}

fn quasi_congruence_blocks(sat: &Saturation, n: usize) -> Vec<usize> {
    let mut block = vec![0usize; n];
    let mut count = usize::from(n > 0);
    loop {
        let mut index: HashMap<(usize, Vec<Vec<usize>>), usize> = HashMap::new();
        let mut next = vec![0; n];
        for y in 0..n {
            let sig: Vec<Vec<usize>> = sat.moves[y]
                .iter()
                .map(|targets| {
                    let mut b: Vec<usize> = targets.iter().map(|&t| block[t]).collect();
                    b.sort_unstable();
                    b.dedup();
                    b
                })
                .collect();
            let len = index.len();
            next[y] = *index.entry((block[y], sig)).or_insert(len);
        }
        let new_count = index.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    // first-seen numbering over increasing state index
    let mut ids: HashMap<usize, usize> = HashMap::new();
    for b in block.iter_mut() {
        let len = ids.len();
        *b = *ids.entry(*b).or_insert(len);
    }
    block
}

/// Quotient of the reachable part of `g` by its supremal quasi-congruence.
///
/// Observable transitions of a block are the saturated moves of its
/// members mapped to blocks. Silent transitions remain only between
/// distinct blocks. The result is structurally deterministic exactly when
/// projection onto the observed events loses no future information.
pub fn supqc(g: &Generator, spec: &ProjectionSpec) -> NondetGenerator {
    let g = reachable(g);
    let alphabet = spec.observed(&g);
    let n = g.num_states();
    if n == 0 {
        return NondetGenerator::from_raw(alphabet, Vec::new(), 0, FixedBitSet::new());
    }
    let sat = saturate(&g, spec);
    let block = quasi_congruence_blocks(&sat, n);
    let m = block.iter().max().map_or(0, |b| b + 1);
    let k = sat.events.len();
    let mut trans: Vec<BTreeSet<(Label, StateId)>> = vec![BTreeSet::new(); m];
    let mut marked = FixedBitSet::with_capacity(m);
    for y in 0..n {
        let b = block[y];
        if g.is_marked(y) {
            marked.insert(b);
        }
        for (i, &e) in sat.events.iter().enumerate() {
            for &t in &sat.moves[y][i] {
                trans[b].insert((Label::Event(e), block[t]));
            }
        }
        debug_assert_eq!(sat.moves[y].len(), k + 1);
        for &t in &sat.silent[y] {
            if block[t] != b {
                trans[b].insert((Label::Silent, block[t]));
            }
        }
    }
    let trans = trans.into_iter().map(|s| s.into_iter().collect()).collect();
    NondetGenerator::from_raw(alphabet, trans, block[g.initial().unwrap()], marked)
}

/// Evidence that a quotient is not structurally deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondetWitness {
    pub state: StateId,
    pub label: Label,
    pub targets: Vec<StateId>,
}

impl std::fmt::Display for NondetWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.label {
            Label::Silent => write!(
                f,
                "silent transition from block {} to {:?}",
                self.state, self.targets
            ),
            Label::Event(e) => write!(
                f,
                "block {} has {} successors on event {}: {:?}",
                self.state,
                self.targets.len(),
                e,
                self.targets
            ),
        }
    }
}

fn nondeterminism(q: &NondetGenerator) -> Option<NondetWitness> {
    for s in 0..q.num_states() {
        let out = q.transitions_from(s);
        let mut i = 0;
        while i < out.len() {
            let label = out[i].0;
            let mut j = i;
            while j < out.len() && out[j].0 == label {
                j += 1;
            }
            if label == Label::Silent || j - i > 1 {
                return Some(NondetWitness {
                    state: s,
                    label,
                    targets: out[i..j].iter().map(|t| t.1).collect(),
                });
            }
            i = j;
        }
    }
    None
}

/// No silent transitions and at most one successor per event.
pub fn is_structurally_deterministic(q: &NondetGenerator) -> bool {
    nondeterminism(q).is_none()
}

/// Re-types a structurally deterministic generator, or names the first
/// offending transition.
pub fn determinize_if_possible(q: &NondetGenerator) -> Result<Generator, NondetWitness> {
    if let Some(w) = nondeterminism(q) {
        return Err(w);
    }
    let trans: Vec<Vec<(Event, StateId)>> = (0..q.num_states())
        .map(|s| {
            q.transitions_from(s)
                .iter()
                .map(|&(l, t)| match l {
                    Label::Event(e) => (e, t),
                    Label::Silent => unreachable!(),
                })
                .collect()
        })
        .collect();
    let mut marked = FixedBitSet::with_capacity(q.num_states());
    for s in 0..q.num_states() {
        if q.is_marked(s) {
            marked.insert(s);
        }
    }
    Ok(Generator::from_raw(
        q.alphabet().clone(),
        trans,
        q.initial().unwrap_or(0),
        marked,
    ))
}

/// Structural determinism of the quasi-congruence quotient. On a trim
/// generator this is the `Lm(g)`-observer property of the projection.
pub fn has_observer_property(g: &Generator, spec: &ProjectionSpec) -> bool {
    is_structurally_deterministic(&supqc(g, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::events;
    use crate::language::enumerate_language;
    use crate::minimize::isomorphic;

    #[test]
    fn project_without_nulled_is_minimize() {
        let g = Generator::from_transitions(
            4,
            0,
            &[0, 2],
            &[(0, 11, 1), (1, 12, 2), (2, 11, 3), (3, 12, 0)],
        )
        .unwrap();
        let p = project(&g, &ProjectionSpec::default()).unwrap();
        assert!(isomorphic(&p, &minimize(&g)));
    }

    #[test]
    fn project_erases_and_merges() {
        // 0 -11-> 1 -100-> 2 -12-> 0 ; projecting 100 gives the feeder loop
        let g = Generator::from_transitions(3, 0, &[0], &[(0, 11, 1), (1, 100, 2), (2, 12, 0)])
            .unwrap();
        let p = project(&g, &ProjectionSpec::null([Event(100)])).unwrap();
        assert_eq!(p.size(), (2, 2));
        assert!(!p.alphabet().contains(Event(100)));
        let l = enumerate_language(&p, 4);
        assert!(l.marked.contains(&events(&[11, 12, 11, 12])));
    }

    #[test]
    fn budget_exceeded() {
        let g = Generator::from_transitions(3, 0, &[0], &[(0, 11, 1), (1, 100, 2), (2, 12, 0)])
            .unwrap();
        let err = project_with_budget(&g, &ProjectionSpec::null([Event(100)]), 1).unwrap_err();
        assert_eq!(err, AutomataError::BudgetExceeded { budget: 1 });
    }

    #[test]
    fn supqc_without_nulled_is_minimal() {
        let g = Generator::from_transitions(
            4,
            0,
            &[0, 2],
            &[(0, 11, 1), (1, 12, 2), (2, 11, 3), (3, 12, 0)],
        )
        .unwrap();
        let q = supqc(&g, &ProjectionSpec::default());
        let d = determinize_if_possible(&q).unwrap();
        assert!(isomorphic(&d, &minimize(&g)));
    }

    #[test]
    fn silent_choice_is_nondeterministic() {
        // 0 -τ-> 1, 0 -a-> 2 (marked), 1 -b-> 3 (marked), 0 -b-> 3
        let g = Generator::from_transitions(
            4,
            0,
            &[2, 3],
            &[(0, 100, 1), (0, 11, 2), (1, 13, 3), (0, 13, 3)],
        )
        .unwrap();
        let spec = ProjectionSpec::null([Event(100)]);
        let q = supqc(&g, &spec);
        let w = determinize_if_possible(&q).unwrap_err();
        assert_eq!(w.label, Label::Silent);
        assert!(!has_observer_property(&g, &spec));
    }

    #[test]
    fn lifted_deterministic_is_deterministic() {
        let g = Generator::from_transitions(2, 0, &[0], &[(0, 11, 1), (1, 12, 0)]).unwrap();
        assert!(is_structurally_deterministic(&g.to_nondet()));
        let q = NondetGenerator::new(
            Alphabet::default(),
            2,
            0,
            &[1],
            [(0, Label::Silent, 1)],
        )
        .unwrap();
        assert!(!is_structurally_deterministic(&q));
    }
}
