//! Whether uncontrollable channeled events can be held up by their own
//! channel, and what that means for the delay-robust supervisor.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::AutomataError;
use crate::event::{Alphabet, Event};
use crate::generator::{Generator, StateId};
use crate::language::shortest_marked_string;
use crate::ops::{mark_all, sync, trim};
use crate::robustness::{ChannelSpec, ChanneledSystem, RobustnessError};

/// The channel variant whose marker state is reached exactly when `r`
/// occurs while the channel is still occupied.
pub fn make_nchnl(spec: &ChannelSpec, controllable: bool) -> Generator {
    let (r, s) = (spec.event, spec.signal);
    let mut alphabet = Alphabet::default();
    alphabet.insert(r, controllable).unwrap();
    alphabet.insert(s, controllable).unwrap();
    alphabet.add_signal_pair(r, s).unwrap();
    Generator::new(
        alphabet,
        3,
        0,
        &[2],
        [(0, r, 1), (1, s, 0), (1, r, 2), (2, r, 2)],
    )
    .unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// The event is controllable; its own controller can hold it back.
    NotApplicable,
    Unbounded,
    /// Blocked; robustness holds only while at most `n` events separate
    /// consecutive occurrences of the event, `None` if it never recurs.
    Bounded(Option<usize>),
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::NotApplicable => f.write_str("not-applicable"),
            Classification::Unbounded => f.write_str("unbounded"),
            Classification::Bounded(Some(n)) => write!(f, "{n}-bounded"),
            Classification::Bounded(None) => f.write_str("bounded"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockReport {
    pub channel: ChannelSpec,
    pub blocked: bool,
    /// `s·r` with `s` in the channeled behavior, `s·r` allowed by the
    /// controllers but refused by the occupied channel.
    pub witness: Option<Vec<Event>>,
    pub classification: Classification,
    /// Size of the trimmed test generator.
    pub test_size: (usize, usize),
}

fn find_channel(system: &ChanneledSystem, target: &ChannelSpec) -> Result<usize, RobustnessError> {
    system
        .specs
        .iter()
        .position(|c| c == target)
        .ok_or(RobustnessError::UnknownChannel(*target))
}

/// Controllers composed without any channel.
pub fn nsup(system: &ChanneledSystem) -> Result<Generator, AutomataError> {
    sync(&system.sup_primes.iter().collect::<Vec<_>>())
}

/// Trimmed test generator for `target`: all-marked controllers, the
/// blocking detector for `target`, and every other channel with all its
/// states marked.
pub fn ttest(system: &ChanneledSystem, target: &ChannelSpec) -> Result<Generator, RobustnessError> {
    let idx = find_channel(system, target)?;
    let controllable = system.channels[idx]
        .alphabet()
        .is_controllable(target.event);
    let mnsup = mark_all(&nsup(system)?);
    let detector = make_nchnl(target, controllable);
    let others: Vec<Generator> = system
        .channels
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, c)| mark_all(c))
        .collect();
    let mut parts = vec![&mnsup, &detector];
    parts.extend(others.iter());
    Ok(trim(&sync(&parts)?))
}

/// Prefix of `t` up to and including the first `r` issued while the
/// channel of `r` is occupied.
fn first_blocked_prefix(t: &[Event], target: &ChannelSpec) -> Vec<Event> {
    let mut busy = false;
    for (i, &e) in t.iter().enumerate() {
        if e == target.event {
            if busy {
                return t[..=i].to_vec();
            }
            busy = true;
        } else if e == target.signal {
            busy = false;
        }
    }
    t.to_vec()
}

/// Decides whether the channel of `target` can block its event. Only
/// meaningful for uncontrollable events; controllable ones are reported
/// as not applicable.
pub fn blocked_test(
    system: &ChanneledSystem,
    target: &ChannelSpec,
) -> Result<BlockReport, RobustnessError> {
    let idx = find_channel(system, target)?;
    if system.channels[idx]
        .alphabet()
        .is_controllable(target.event)
    {
        return Ok(BlockReport {
            channel: *target,
            blocked: false,
            witness: None,
            classification: Classification::NotApplicable,
            test_size: (0, 0),
        });
    }
    let t = ttest(system, target)?;
    let witness = shortest_marked_string(&t).map(|s| first_blocked_prefix(&s, target));
    Ok(BlockReport {
        channel: *target,
        blocked: witness.is_some(),
        classification: if witness.is_some() {
            Classification::Bounded(None)
        } else {
            Classification::Unbounded
        },
        witness,
        test_size: t.size(),
    })
}

/// Fewest events strictly between two consecutive occurrences of `r` in
/// `sup`, or `None` when `r` never recurs.
pub fn delay_bound_estimate(sup: &Generator, r: Event) -> Option<usize> {
    let n = sup.num_states();
    let reach = sup.reachable_states();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for q in reach.ones() {
        for &(e, t) in sup.transitions_from(q) {
            if e == r && dist[t] != 0 {
                dist[t] = 0;
                queue.push_back(t);
            }
        }
    }
    while let Some(q) = queue.pop_front() {
        if sup.is_defined(q, r) {
            return Some(dist[q]);
        }
        for &(_, t) in sup.transitions_from(q) {
            if dist[t] == usize::MAX {
                dist[t] = dist[q] + 1;
                queue.push_back(t);
            }
        }
    }
    None
}

/// Result of the bounded search for implementation faults that escape
/// the supervisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultCheck {
    pub admissible: bool,
    /// `s·r` whose projection leaves the supervisor although the plant
    /// allows it.
    pub certificate: Option<Vec<Event>>,
    pub depth: usize,
    /// Whether the search stopped at `depth` with states left unexplored.
    pub truncated: bool,
}

/// Default search depth: twice the number of channeled states.
pub fn default_fault_depth(system: &ChanneledSystem) -> usize {
    2 * system.sup_prime.num_states()
}

/// Searches strings `s` of the channeled behavior, up to `depth` events,
/// for which the controllers allow `s·r` and the plant allows `P(s)·r`
/// but the supervisor does not.
pub fn fault_admissibility(
    sup: &Generator,
    plant: &Generator,
    system: &ChanneledSystem,
    target: &ChannelSpec,
    depth: usize,
) -> Result<FaultCheck, RobustnessError> {
    find_channel(system, target)?;
    let r = target.event;
    let g = &system.sup_prime;
    let ns = nsup(system)?;
    let nulled = &system.nulled;
    let mut out = FaultCheck {
        admissible: true,
        certificate: None,
        depth,
        truncated: false,
    };
    let (Some(y0), Some(n0)) = (g.initial(), ns.initial()) else {
        return Ok(out);
    };
    type Node = (StateId, StateId, Option<StateId>, Option<StateId>);
    let start: Node = (y0, n0, sup.initial(), plant.initial());
    let mut parent: HashMap<Node, Option<(Node, Event)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((node @ (y, x, k, p), d)) = queue.pop_front() {
        let Some(p) = p else {
            continue;
        };
        if ns.is_defined(x, r) && plant.is_defined(p, r) && !k.is_some_and(|k| sup.is_defined(k, r)) {
            let mut s = vec![r];
            let mut cur = node;
            while let Some(Some((prev, e))) = parent.get(&cur) {
                s.push(*e);
                cur = *prev;
            }
            s.reverse();
            out.admissible = false;
            out.certificate = Some(s);
            return Ok(out);
        }
        if d == depth {
            out.truncated |= !g.transitions_from(y).is_empty();
            continue;
        }
        for &(e, y2) in g.transitions_from(y) {
            let Some(x2) = ns.step(x, e) else {
                continue;
            };
            let (k2, p2) = if nulled.contains(&e) {
                (k, Some(p))
            } else {
                (k.and_then(|k| sup.step(k, e)), plant.step(p, e))
            };
            let next = (y2, x2, k2, p2);
            if let std::collections::hash_map::Entry::Vacant(v) = parent.entry(next) {
                v.insert(Some((node, e)));
                queue.push_back((next, d + 1));
            }
        }
    }
    Ok(out)
}

/// Blocking, fault admissibility and delay bound for one channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventAnalysis {
    pub block: BlockReport,
    /// `None` for controllable events.
    pub fault: Option<FaultCheck>,
    pub delay_bound: Option<usize>,
}

pub fn analyze_channel(
    sup: &Generator,
    plant: &Generator,
    system: &ChanneledSystem,
    target: &ChannelSpec,
    fault_depth: usize,
) -> Result<EventAnalysis, RobustnessError> {
    let mut block = blocked_test(system, target)?;
    if block.classification == Classification::NotApplicable {
        return Ok(EventAnalysis {
            block,
            fault: None,
            delay_bound: None,
        });
    }
    let delay_bound = delay_bound_estimate(sup, target.event);
    if block.blocked {
        block.classification = Classification::Bounded(delay_bound);
    }
    let fault = fault_admissibility(sup, plant, system, target, fault_depth)?;
    Ok(EventAnalysis {
        block,
        fault: Some(fault),
        delay_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::events;
    use crate::robustness::build_channeled;

    #[test]
    fn nchnl_structure() {
        let c = make_nchnl(&ChannelSpec::new(0, Event(12), 1), false);
        assert_eq!(c.size(), (3, 4));
        assert_eq!(shortest_marked_string(&c), Some(events(&[12, 12])));
        assert!(c.accepts_marked(&events(&[12, 212, 12, 12])));
        assert!(!c.accepts_marked(&events(&[12, 212])));
        assert!(!c.accepts_closed(&events(&[12, 12, 212])));
    }

    #[test]
    fn bound_counts_intermediate_events() {
        let g = Generator::from_transitions(2, 0, &[0], &[(0, 11, 1), (1, 12, 0)]).unwrap();
        assert_eq!(delay_bound_estimate(&g, Event(12)), Some(1));
        let once = Generator::from_transitions(2, 0, &[1], &[(0, 12, 1)]).unwrap();
        assert_eq!(delay_bound_estimate(&once, Event(12)), None);
        let loop_ = Generator::from_transitions(1, 0, &[0], &[(0, 12, 0)]).unwrap();
        assert_eq!(delay_bound_estimate(&loop_, Event(12)), Some(0));
    }

    #[test]
    fn prefix_cut_at_second_occurrence() {
        let c = ChannelSpec::new(0, Event(12), 1);
        assert_eq!(
            first_blocked_prefix(&events(&[11, 12, 212, 11, 12, 11, 12, 13]), &c),
            events(&[11, 12, 212, 11, 12, 11, 12])
        );
    }

    #[test]
    fn producer_without_acknowledgement_is_blocked() {
        // agent 0 emits 12 repeatedly; agent 1 only watches it
        let a = Generator::from_transitions(2, 0, &[0], &[(0, 11, 1), (1, 12, 0)]).unwrap();
        let b = Generator::from_transitions(1, 0, &[0], &[(0, 12, 0)]).unwrap();
        let ch = ChannelSpec::new(0, Event(12), 1);
        let sys = build_channeled(&[a, b], &[ch]).unwrap();
        let rep = blocked_test(&sys, &ch).unwrap();
        assert!(rep.blocked);
        assert_eq!(rep.witness, Some(events(&[11, 12, 11, 12])));
    }

    #[test]
    fn controllable_target_not_applicable() {
        let a = Generator::from_transitions(2, 0, &[0], &[(0, 11, 1), (1, 12, 0)]).unwrap();
        let b = Generator::from_transitions(1, 0, &[0], &[(0, 11, 0)]).unwrap();
        let ch = ChannelSpec::new(0, Event(11), 1);
        let sys = build_channeled(&[a, b], &[ch]).unwrap();
        let rep = blocked_test(&sys, &ch).unwrap();
        assert_eq!(rep.classification, Classification::NotApplicable);
        assert!(!rep.blocked);
    }
}
