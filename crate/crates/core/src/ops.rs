//! Language-level operations on generators: synchronous product, trim,
//! marking, relabeling and selfloop augmentation.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::error::AutomataError;
use crate::event::{Alphabet, Event};
use crate::generator::{Generator, StateId};

/// Synchronous product of `components`, restricted to its reachable part.
///
/// Events shared by several components synchronize; private events
/// interleave. A product state is marked iff every component state is
/// marked. States are numbered in breadth-first discovery order.
pub fn sync(components: &[&Generator]) -> Result<Generator, AutomataError> {
    let Some(first) = components.first() else {
        return Err(AutomataError::NoComponents);
    };
    let mut alphabet = first.alphabet().clone();
    for g in &components[1..] {
        alphabet = alphabet.union(g.alphabet())?;
    }
    if components.iter().any(|g| g.is_empty()) {
        return Ok(Generator::empty(alphabet));
    }
    if components.len() == 1 {
        let mut g = first.restrict(&first.reachable_states());
        *g.alphabet_mut() = alphabet;
        return Ok(g);
    }

    // owners[e] = indices of components whose alphabet contains e
    let owners: BTreeMap<Event, Vec<usize>> = alphabet
        .events()
        .iter()
        .map(|&e| {
            let idx = components
                .iter()
                .enumerate()
                .filter(|(_, g)| g.alphabet().contains(e))
                .map(|(i, _)| i)
                .collect();
            (e, idx)
        })
        .collect();

    let start: Vec<StateId> = components.iter().map(|g| g.initial().unwrap()).collect();
    let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut tuples = vec![start.clone()];
    index.insert(start, 0);
    let mut trans: Vec<Vec<(Event, StateId)>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut candidates = BTreeSet::new();

    while let Some(q) = queue.pop_front() {
        let tuple = tuples[q].clone();
        candidates.clear();
        for (g, &s) in components.iter().zip(&tuple) {
            candidates.extend(g.transitions_from(s).iter().map(|t| t.0));
        }
        let mut out = Vec::new();
        'event: for &e in &candidates {
            let mut next = tuple.clone();
            for &i in &owners[&e] {
                match components[i].step(tuple[i], e) {
                    Some(t) => next[i] = t,
                    None => continue 'event,
                }
            }
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = tuples.len();
                    index.insert(next.clone(), id);
                    tuples.push(next);
                    queue.push_back(id);
                    id
                }
            };
            out.push((e, id));
        }
        if trans.len() <= q {
            trans.resize(q + 1, Vec::new());
        }
        trans[q] = out;
    }
    trans.resize(tuples.len(), Vec::new());

    let mut marked = FixedBitSet::with_capacity(tuples.len());
    for (i, t) in tuples.iter().enumerate() {
        if components.iter().zip(t).all(|(g, &s)| g.is_marked(s)) {
            marked.insert(i);
        }
    }
    Ok(Generator::from_raw(alphabet, trans, 0, marked))
}

/// Synchronous product of two generators.
pub fn sync2(a: &Generator, b: &Generator) -> Result<Generator, AutomataError> {
    sync(&[a, b])
}

/// Reachable part of `g`.
pub fn reachable(g: &Generator) -> Generator {
    g.restrict(&g.reachable_states())
}

/// Keeps the states that are both reachable and coreachable. Returns the
/// empty generator when the initial state cannot reach a marker.
pub fn trim(g: &Generator) -> Generator {
    let mut keep = g.reachable_states();
    keep.intersect_with(&g.coreachable_states());
    let r = g.restrict(&keep);
    // restricting may cut reachability through removed states
    let again = r.reachable_states();
    if again.count_ones(..) == r.num_states() {
        r
    } else {
        r.restrict(&again)
    }
}

/// Same transition structure with every state marked.
pub fn mark_all(g: &Generator) -> Generator {
    let n = g.num_states();
    let mut marked = FixedBitSet::with_capacity(n);
    marked.insert_range(..);
    Generator::from_raw(
        g.alphabet().clone(),
        (0..n).map(|s| g.transitions_from(s).to_vec()).collect(),
        g.initial().unwrap_or(0),
        marked,
    )
}

/// Substitutes event labels according to `map`. Moved events keep their
/// controllability, and each `r -> r'` is recorded as a signal pair.
///
/// Targets must be fresh and the map injective.
pub fn relabel(g: &Generator, map: &BTreeMap<Event, Event>) -> Result<Generator, AutomataError> {
    let mut seen = BTreeSet::new();
    for &dst in map.values() {
        if !seen.insert(dst) {
            return Err(AutomataError::RelabelNotInjective(dst));
        }
        if g.alphabet().contains(dst) && !map.contains_key(&dst) {
            return Err(AutomataError::RelabelCollision(dst));
        }
    }
    let old = g.alphabet();
    let mut alphabet = Alphabet::default();
    for &e in old.events() {
        let target = map.get(&e).copied().unwrap_or(e);
        alphabet.insert(target, old.is_controllable(e))?;
    }
    for (&sig, &src) in old.signals() {
        let sig = map.get(&sig).copied().unwrap_or(sig);
        alphabet.add_signal_pair(src, sig)?;
    }
    for (&src, &dst) in map {
        if old.contains(src) {
            alphabet.add_signal_pair(src, dst)?;
        }
    }
    let n = g.num_states();
    let trans = (0..n)
        .map(|s| {
            g.transitions_from(s)
                .iter()
                .map(|&(e, t)| (map.get(&e).copied().unwrap_or(e), t))
                .collect()
        })
        .collect();
    Ok(Generator::from_raw(
        alphabet,
        trans,
        g.initial().unwrap_or(0),
        g.marked_bits().clone(),
    ))
}

/// Adds a `σ`-selfloop at every state where `σ` is undefined, for each `σ`
/// in `events`. Events not yet in the alphabet are added with parity
/// controllability unless `statuses` supplies one.
pub fn add_selfloops(
    g: &Generator,
    events: &BTreeSet<Event>,
    statuses: &Alphabet,
) -> Result<Generator, AutomataError> {
    let mut alphabet = g.alphabet().clone();
    for &e in events {
        let c = if statuses.contains(e) {
            statuses.is_controllable(e)
        } else if g.alphabet().contains(e) {
            g.alphabet().is_controllable(e)
        } else {
            e.parity_controllable()
        };
        alphabet.insert(e, c)?;
    }
    let n = g.num_states();
    let trans = (0..n)
        .map(|s| {
            let mut out = g.transitions_from(s).to_vec();
            for &e in events {
                if g.step(s, e).is_none() {
                    out.push((e, s));
                }
            }
            out
        })
        .collect();
    Ok(Generator::from_raw(
        alphabet,
        trans,
        g.initial().unwrap_or(0),
        g.marked_bits().clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::events;
    use crate::minimize::isomorphic;

    fn feeder() -> Generator {
        Generator::from_transitions(2, 0, &[0], &[(0, 11, 1), (1, 12, 0)]).unwrap()
    }

    fn lathe() -> Generator {
        Generator::from_transitions(2, 0, &[0], &[(0, 19, 1), (1, 20, 0)]).unwrap()
    }

    #[test]
    fn disjoint_shuffle() {
        let p = sync(&[&feeder(), &lathe()]).unwrap();
        assert_eq!(p.size(), (4, 8));
        assert!(p.accepts_marked(&events(&[11, 19, 12, 20])));
    }

    #[test]
    fn sync_idempotent() {
        let f = feeder();
        assert!(isomorphic(&sync(&[&f, &f]).unwrap(), &f));
    }

    #[test]
    fn sync_controllability_conflict() {
        let a = feeder();
        let alpha = Alphabet::new(events(&[12]), events(&[12])).unwrap();
        let b = Generator::new(alpha, 1, 0, &[0], [(0, Event(12), 0)]).unwrap();
        assert_eq!(
            sync(&[&a, &b]).unwrap_err(),
            AutomataError::ControllabilityConflict(Event(12))
        );
    }

    #[test]
    fn sync_with_empty_is_empty() {
        let e = Generator::empty(Alphabet::default());
        assert!(sync(&[&feeder(), &e]).unwrap().is_empty());
        assert_eq!(sync(&[]).unwrap_err(), AutomataError::NoComponents);
    }

    #[test]
    fn trim_drops_blocking_and_unreachable() {
        // 0 -1-> 1 (marked), 0 -2-> 2 (dead), 3 unreachable
        let g = Generator::from_transitions(4, 0, &[1, 3], &[(0, 1, 1), (0, 2, 2), (3, 1, 1)])
            .unwrap();
        let t = trim(&g);
        assert_eq!(t.size(), (2, 1));
        assert!(isomorphic(&trim(&t), &t));
    }

    #[test]
    fn trim_to_empty() {
        let g = Generator::from_transitions(2, 0, &[], &[(0, 1, 1)]).unwrap();
        assert!(trim(&g).is_empty());
    }

    #[test]
    fn mark_all_marks_everything() {
        let m = mark_all(&feeder());
        assert!(m.is_marked(0) && m.is_marked(1));
        assert!(m.accepts_marked(&events(&[11])));
    }

    #[test]
    fn relabel_moves_label_and_status() {
        let g = relabel(&feeder(), &BTreeMap::from([(Event(12), Event(212))])).unwrap();
        assert!(g.alphabet().contains(Event(212)));
        assert!(!g.alphabet().contains(Event(12)));
        assert!(!g.alphabet().is_controllable(Event(212)));
        assert_eq!(g.alphabet().signals().get(&Event(212)), Some(&Event(12)));
        assert_eq!(g.size(), feeder().size());

        let err = relabel(&feeder(), &BTreeMap::from([(Event(12), Event(11))])).unwrap_err();
        assert_eq!(err, AutomataError::RelabelCollision(Event(11)));
        let err = relabel(
            &feeder(),
            &BTreeMap::from([(Event(11), Event(5)), (Event(12), Event(5))]),
        )
        .unwrap_err();
        assert_eq!(err, AutomataError::RelabelNotInjective(Event(5)));
    }

    #[test]
    fn selfloops_define_event_everywhere() {
        let g = add_selfloops(&feeder(), &BTreeSet::from([Event(13)]), &Alphabet::default())
            .unwrap();
        assert!(g.is_defined(0, Event(13)) && g.is_defined(1, Event(13)));
        assert!(g.alphabet().is_controllable(Event(13)));
        let again = add_selfloops(&g, &BTreeSet::from([Event(13)]), &Alphabet::default()).unwrap();
        assert_eq!(again, g);
    }
}
