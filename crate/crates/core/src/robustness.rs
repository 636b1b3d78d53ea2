//! Channel models, channeled behavior and the delay-robustness verdict.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::abstraction::{
    default_budget, determinize_if_possible, project, supqc, NondetWitness, ProjectionSpec,
};
use crate::error::AutomataError;
use crate::event::{Alphabet, Event};
use crate::generator::{Generator, StateId};
use crate::language::erase;
use crate::minimize::{isomorphism, minimize, IsoMismatch};
use crate::ops::{relabel, sync};
use crate::synthesis::PlantModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RobustnessError {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("channel {0} is not part of the system")]
    UnknownChannel(ChannelSpec),
    #[error("channel recipient {0} does not exist")]
    UnknownRecipient(usize),
    #[error("controller {recipient} does not use channeled event {event}")]
    EventNotImported { event: Event, recipient: usize },
    #[error("signal event {0} is already in use")]
    SignalNotFresh(Event),
    #[error("event {event} is channeled to controller {recipient} twice")]
    DuplicateChannel { event: Event, recipient: usize },
    #[error("event {event} is not private to agent {agent}")]
    NotPrivate { event: Event, agent: usize },
}

/// One delayed link: occurrences of `event` in agent `source_agent` reach
/// controller `recipient` as `signal`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelSpec {
    pub source_agent: usize,
    pub event: Event,
    pub recipient: usize,
    pub signal: Event,
}

impl ChannelSpec {
    /// Channel with the conventional signal label `r + 100 * (recipient + 1)`.
    pub fn new(source_agent: usize, event: Event, recipient: usize) -> Self {
        ChannelSpec {
            source_agent,
            event,
            recipient,
            signal: conventional_signal(event, recipient),
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}@{} -> {} as {}",
            self.event, self.source_agent, self.recipient, self.signal
        )
    }
}

pub fn conventional_signal(event: Event, recipient: usize) -> Event {
    Event(event.0 + 100 * (recipient as u32 + 1))
}

/// The two-state channel: `r` occupies it, `r'` releases it. The signal
/// takes the controllability of the channeled event.
pub fn make_channel(spec: &ChannelSpec, controllable: bool) -> Generator {
    let (r, s) = (spec.event, spec.signal);
    let mut alphabet = Alphabet::default();
    alphabet.insert(r, controllable).unwrap();
    alphabet.insert(s, controllable).unwrap();
    alphabet.add_signal_pair(r, s).unwrap();
    Generator::new(alphabet, 2, 0, &[0], [(0, r, 1), (1, s, 0)]).unwrap()
}

/// Controllers with channeled imports relabeled to signals, the channel
/// generators, and their synchronous product.
#[derive(Clone, Debug)]
pub struct ChanneledSystem {
    pub sup_primes: Vec<Generator>,
    pub channels: Vec<Generator>,
    pub specs: Vec<ChannelSpec>,
    pub sup_prime: Generator,
    /// All signal events; these are erased when comparing with the
    /// delay-free behavior.
    pub nulled: BTreeSet<Event>,
}

impl ChanneledSystem {
    pub fn projection(&self) -> ProjectionSpec {
        ProjectionSpec {
            nulled: self.nulled.clone(),
        }
    }

    pub fn channeled_events(&self) -> BTreeSet<Event> {
        self.specs.iter().map(|c| c.event).collect()
    }
}

fn controllability_of(sups: &[Generator], e: Event) -> bool {
    sups.iter()
        .find(|g| g.alphabet().contains(e))
        .map(|g| g.alphabet().is_controllable(e))
        .unwrap_or_else(|| e.parity_controllable())
}

/// Checks channel specs against the controllers they attach to.
pub fn validate_channels(
    sups: &[Generator],
    channels: &[ChannelSpec],
) -> Result<(), RobustnessError> {
    let mut used: BTreeSet<Event> = BTreeSet::new();
    for g in sups {
        used.extend(g.alphabet().events());
    }
    let mut seen = BTreeSet::new();
    for c in channels {
        let sup = sups
            .get(c.recipient)
            .ok_or(RobustnessError::UnknownRecipient(c.recipient))?;
        if !sup.alphabet().contains(c.event) {
            return Err(RobustnessError::EventNotImported {
                event: c.event,
                recipient: c.recipient,
            });
        }
        if !seen.insert((c.event, c.recipient)) {
            return Err(RobustnessError::DuplicateChannel {
                event: c.event,
                recipient: c.recipient,
            });
        }
        if !used.insert(c.signal) {
            return Err(RobustnessError::SignalNotFresh(c.signal));
        }
    }
    Ok(())
}

/// Relabels each recipient's channeled imports to their signals and
/// composes everything with one channel per spec.
pub fn build_channeled(
    sups: &[Generator],
    channels: &[ChannelSpec],
) -> Result<ChanneledSystem, RobustnessError> {
    validate_channels(sups, channels)?;
    let mut sup_primes = Vec::with_capacity(sups.len());
    for (j, g) in sups.iter().enumerate() {
        let map: BTreeMap<Event, Event> = channels
            .iter()
            .filter(|c| c.recipient == j)
            .map(|c| (c.event, c.signal))
            .collect();
        sup_primes.push(if map.is_empty() {
            g.clone()
        } else {
            relabel(g, &map)?
        });
    }
    let chans: Vec<Generator> = channels
        .iter()
        .map(|c| make_channel(c, controllability_of(sups, c.event)))
        .collect();
    let mut parts: Vec<&Generator> = sup_primes.iter().collect();
    parts.extend(chans.iter());
    let sup_prime = sync(&parts)?;
    Ok(ChanneledSystem {
        sup_primes,
        channels: chans,
        specs: channels.to_vec(),
        sup_prime,
        nulled: channels.iter().map(|c| c.signal).collect(),
    })
}

/// Every event a controlled agent observes from another agent, channeled
/// to that agent's controller. `controlled[i]` is the behavior of agent
/// `i` under its controller.
pub fn all_imports(controlled: &[Generator], model: &PlantModel) -> Vec<ChannelSpec> {
    let mut out = Vec::new();
    for (i, g) in controlled.iter().enumerate() {
        let own = model.agents()[i].alphabet();
        for &e in g.alphabet().events() {
            if own.contains(e) {
                continue;
            }
            if let Some(src) = model.owner_of(e) {
                out.push(ChannelSpec::new(src, e, i));
            }
        }
    }
    out.sort();
    out
}

/// How the projected channeled behavior departs from the reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discrepancy {
    /// The projection of a channeled string is not generated by the
    /// reference.
    ExtraString,
    /// A reference string is not the projection of any channeled string.
    MissingString,
    /// The projection of a marked channeled string is not marked in the
    /// reference.
    ExtraMarking,
    MissingMarking,
    /// After `string` the reference can complete `continuation` but the
    /// channeled system cannot.
    Observer,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Discrepancy::ExtraString => "projection not allowed by the supervisor",
            Discrepancy::MissingString => "supervisor behavior lost under delay",
            Discrepancy::ExtraMarking => "projection marked but supervisor string is not",
            Discrepancy::MissingMarking => "supervisor marking lost under delay",
            Discrepancy::Observer => "continuation of the supervisor not realizable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub kind: Discrepancy,
    /// String of the channeled system, over the signal-augmented alphabet.
    /// For [`Discrepancy::MissingString`] and
    /// [`Discrepancy::MissingMarking`] this is the reference string.
    pub string: Vec<Event>,
    pub projection: Vec<Event>,
    /// For [`Discrepancy::Observer`], the reference continuation with no
    /// channeled counterpart.
    pub continuation: Vec<Event>,
    /// Shortest way for the channeled system to reach a marker state
    /// after `string`, when one exists.
    pub completion: Option<Vec<Event>>,
}

impl Counterexample {
    /// `string` followed by `completion`, projected.
    pub fn completed_projection(&self, nulled: &BTreeSet<Event>) -> Vec<Event> {
        self.string
            .iter()
            .chain(self.completion.iter().flatten())
            .copied()
            .filter(|e| !nulled.contains(e))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    Language(Discrepancy),
    Nondeterministic(NondetWitness),
    NotIsomorphic(IsoMismatch),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Language(d) => write!(f, "projected behavior differs: {d}"),
            Failure::Nondeterministic(w) => write!(f, "quotient not deterministic: {w}"),
            Failure::NotIsomorphic(m) => write!(f, "quotient differs from supervisor: {m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub robust: bool,
    pub channeled_events: BTreeSet<Event>,
    pub channels: Vec<ChannelSpec>,
    pub channeled_size: (usize, usize),
    /// Size of the quasi-congruence quotient; not computed when the
    /// projected languages already differ.
    pub reduced_size: Option<(usize, usize)>,
    pub reference_size: (usize, usize),
    pub failure: Option<Failure>,
    pub counterexample: Option<Counterexample>,
}

/// Delay-robustness of `sup` under the channels of `system`.
///
/// The projected channeled behavior is first compared with `sup` on the
/// fly, which settles most non-robust cases without building the quotient.
/// Otherwise the quotient of the channeled behavior modulo the signal
/// events must be structurally deterministic and isomorphic to the
/// (minimized) reference.
pub fn check_delay_robustness(
    sup: &Generator,
    system: &ChanneledSystem,
) -> Result<Verdict, RobustnessError> {
    check_delay_robustness_with_budget(sup, system, default_budget())
}

/// [`check_delay_robustness`] with an explicit cap on subset states.
pub fn check_delay_robustness_with_budget(
    sup: &Generator,
    system: &ChanneledSystem,
    budget: usize,
) -> Result<Verdict, RobustnessError> {
    let spec = system.projection();
    let reference = minimize(sup);
    let g = &system.sup_prime;
    let mut verdict = Verdict {
        robust: false,
        channeled_events: system.channeled_events(),
        channels: system.specs.clone(),
        channeled_size: g.size(),
        reduced_size: None,
        reference_size: sup.size(),
        failure: None,
        counterexample: None,
    };
    if let Some((t, kind)) = projected_difference(g, &spec, &reference, budget)? {
        verdict.failure = Some(Failure::Language(kind));
        verdict.counterexample = Some(language_counterexample(g, &spec, t, kind));
        return Ok(verdict);
    }
    let q = supqc(g, &spec);
    verdict.reduced_size = Some(q.size());
    verdict.failure = match determinize_if_possible(&q) {
        Err(w) => Some(Failure::Nondeterministic(w)),
        Ok(d) => isomorphism(&minimize(&d), &reference)
            .err()
            .map(Failure::NotIsomorphic),
    };
    verdict.robust = verdict.failure.is_none();
    if !verdict.robust {
        verdict.counterexample = observer_failure(g, &spec, &reference)?.map(|(string, w)| {
            let projection = erase(&string, &spec.nulled);
            let completion = completion_after(g, &string);
            Counterexample {
                kind: Discrepancy::Observer,
                string,
                projection,
                continuation: w,
                completion,
            }
        });
    }
    Ok(verdict)
}

/// Channels `channels` over `sups` and checks against their product.
pub fn check_channels(
    sups: &[Generator],
    channels: &[ChannelSpec],
) -> Result<Verdict, RobustnessError> {
    let sup = sync(&sups.iter().collect::<Vec<_>>())?;
    let system = build_channeled(sups, channels)?;
    check_delay_robustness(&sup, &system)
}

fn language_counterexample(
    g: &Generator,
    spec: &ProjectionSpec,
    t: Vec<Event>,
    kind: Discrepancy,
) -> Counterexample {
    let extra = matches!(kind, Discrepancy::ExtraString | Discrepancy::ExtraMarking);
    let string = if extra {
        lift(g, spec, &t, kind == Discrepancy::ExtraMarking).expect("projected string has a preimage")
    } else {
        t.clone()
    };
    let completion = if extra {
        completion_after(g, &string)
    } else {
        None
    };
    Counterexample {
        kind,
        string,
        projection: t,
        continuation: Vec::new(),
        completion,
    }
}

/// Shortest string on which `P(L(g))`, `P(Lm(g))` differ from the closed
/// and marked behavior of the deterministic `reference`, found by a lazy
/// subset construction in step with `reference`.
pub fn projected_difference(
    g: &Generator,
    spec: &ProjectionSpec,
    reference: &Generator,
    budget: usize,
) -> Result<Option<(Vec<Event>, Discrepancy)>, AutomataError> {
    let closure = |mut seed: Vec<StateId>| {
        let mut stack = seed.clone();
        let mut seen: BTreeSet<StateId> = seed.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &(e, t) in g.transitions_from(q) {
                if spec.is_nulled(e) && seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seed.clear();
        seed.extend(seen);
        seed
    };
    let start = g.initial().map(|q| closure(vec![q])).unwrap_or_default();
    type Node = (Vec<StateId>, Option<StateId>);
    let mut index: HashMap<Node, usize> = HashMap::new();
    let mut nodes: Vec<(Node, Option<(usize, Event)>)> = Vec::new();
    let root: Node = (start, reference.initial());
    index.insert(root.clone(), 0);
    nodes.push((root, None));
    let path = |nodes: &Vec<(Node, Option<(usize, Event)>)>, mut i: usize| {
        let mut s = Vec::new();
        while let Some((p, e)) = nodes[i].1 {
            s.push(e);
            i = p;
        }
        s.reverse();
        s
    };
    let mut head = 0;
    while head < nodes.len() {
        let (subset, r) = nodes[head].0.clone();
        match (subset.is_empty(), r) {
            (true, None) => {
                head += 1;
                continue;
            }
            (false, None) => return Ok(Some((path(&nodes, head), Discrepancy::ExtraString))),
            (true, Some(_)) => return Ok(Some((path(&nodes, head), Discrepancy::MissingString))),
            (false, Some(r)) => {
                let marked = subset.iter().any(|&q| g.is_marked(q));
                if marked != reference.is_marked(r) {
                    let kind = if marked {
                        Discrepancy::ExtraMarking
                    } else {
                        Discrepancy::MissingMarking
                    };
                    return Ok(Some((path(&nodes, head), kind)));
                }
                let mut moves: BTreeMap<Event, Vec<StateId>> = BTreeMap::new();
                for &q in &subset {
                    for &(e, t) in g.transitions_from(q) {
                        if !spec.is_nulled(e) {
                            moves.entry(e).or_default().push(t);
                        }
                    }
                }
                for &(e, _) in reference.transitions_from(r) {
                    moves.entry(e).or_default();
                }
                for (e, targets) in moves {
                    let next = if targets.is_empty() {
                        Vec::new()
                    } else {
                        closure(targets)
                    };
                    let node = (next, reference.step(r, e));
                    if !index.contains_key(&node) {
                        if nodes.len() >= budget {
                            return Err(AutomataError::BudgetExceeded { budget });
                        }
                        index.insert(node.clone(), nodes.len());
                        nodes.push((node, Some((head, e))));
                    }
                }
            }
        }
        head += 1;
    }
    Ok(None)
}

/// Shortest string on which two deterministic generators over the same
/// events disagree, in closed or marked behavior.
pub fn language_difference(a: &Generator, b: &Generator) -> Option<(Vec<Event>, Discrepancy)> {
    let (a0, b0) = (a.initial(), b.initial());
    let (a0, b0) = match (a0, b0) {
        (None, None) => return None,
        (Some(_), None) => return Some((Vec::new(), Discrepancy::ExtraString)),
        (None, Some(_)) => return Some((Vec::new(), Discrepancy::MissingString)),
        (Some(x), Some(y)) => (x, y),
    };
    let mut parent: HashMap<(StateId, StateId), Option<((StateId, StateId), Event)>> =
        HashMap::new();
    parent.insert((a0, b0), None);
    let mut queue = VecDeque::from([(a0, b0)]);
    let path = |parent: &HashMap<_, Option<((StateId, StateId), Event)>>, mut cur| {
        let mut s = Vec::new();
        while let Some(Some((prev, e))) = parent.get(&cur) {
            s.push(*e);
            cur = *prev;
        }
        s.reverse();
        s
    };
    while let Some((x, y)) = queue.pop_front() {
        if a.is_marked(x) != b.is_marked(y) {
            let kind = if a.is_marked(x) {
                Discrepancy::ExtraMarking
            } else {
                Discrepancy::MissingMarking
            };
            return Some((path(&parent, (x, y)), kind));
        }
        let events: BTreeSet<Event> = a
            .transitions_from(x)
            .iter()
            .chain(b.transitions_from(y))
            .map(|t| t.0)
            .collect();
        for e in events {
            match (a.step(x, e), b.step(y, e)) {
                (Some(tx), Some(ty)) => {
                    if let std::collections::hash_map::Entry::Vacant(v) = parent.entry((tx, ty)) {
                        v.insert(Some(((x, y), e)));
                        queue.push_back((tx, ty));
                    }
                }
                (Some(_), None) => {
                    let mut s = path(&parent, (x, y));
                    s.push(e);
                    return Some((s, Discrepancy::ExtraString));
                }
                (None, Some(_)) => {
                    let mut s = path(&parent, (x, y));
                    s.push(e);
                    return Some((s, Discrepancy::MissingString));
                }
                (None, None) => {}
            }
        }
    }
    None
}

/// Shortest string of `g` whose projection is `t`, ending in a marker
/// state when `marked` is set.
fn lift(g: &Generator, spec: &ProjectionSpec, t: &[Event], marked: bool) -> Option<Vec<Event>> {
    let q0 = g.initial()?;
    // states: (g state, matched prefix length)
    let mut parent: HashMap<(StateId, usize), Option<((StateId, usize), Event)>> = HashMap::new();
    parent.insert((q0, 0), None);
    let mut queue = VecDeque::from([(q0, 0usize)]);
    while let Some((q, i)) = queue.pop_front() {
        if i == t.len() && (!marked || g.is_marked(q)) {
            let mut s = Vec::new();
            let mut cur = (q, i);
            while let Some(Some((prev, e))) = parent.get(&cur) {
                s.push(*e);
                cur = *prev;
            }
            s.reverse();
            return Some(s);
        }
        for &(e, next) in g.transitions_from(q) {
            let j = if spec.is_nulled(e) {
                i
            } else if i < t.len() && t[i] == e {
                i + 1
            } else {
                continue;
            };
            if let std::collections::hash_map::Entry::Vacant(v) = parent.entry((next, j)) {
                v.insert(Some(((q, i), e)));
                queue.push_back((next, j));
            }
        }
    }
    None
}

/// Shortest continuation from the state reached by `s` to a marker state.
fn completion_after(g: &Generator, s: &[Event]) -> Option<Vec<Event>> {
    let q = g.run(s)?;
    let rooted = g.with_initial(q).ok()?;
    crate::language::shortest_marked_string(&rooted)
}

/// Shortest `s` in the channeled behavior after which the reference can
/// generate or complete some `w` that no continuation of `s` realizes.
fn observer_failure(
    g: &Generator,
    spec: &ProjectionSpec,
    d: &Generator,
) -> Result<Option<(Vec<Event>, Vec<Event>)>, RobustnessError> {
    let (Some(y0), Some(d0)) = (g.initial(), d.initial()) else {
        return Ok(None);
    };
    let mut parent: HashMap<(StateId, StateId), Option<((StateId, StateId), Event)>> =
        HashMap::new();
    parent.insert((y0, d0), None);
    let mut queue = VecDeque::from([(y0, d0)]);
    let mut cache: HashMap<StateId, Generator> = HashMap::new();
    while let Some((y, x)) = queue.pop_front() {
        let future = match cache.get(&y) {
            Some(f) => f.clone(),
            None => {
                let f = project(&g.with_initial(y)?, spec)?;
                cache.insert(y, f.clone());
                f
            }
        };
        let expected = d.with_initial(x)?;
        if let Some(w) = future_difference(&expected, &future) {
            let mut s = Vec::new();
            let mut cur = (y, x);
            while let Some(Some((prev, e))) = parent.get(&cur) {
                s.push(*e);
                cur = *prev;
            }
            s.reverse();
            return Ok(Some((s, w)));
        }
        for &(e, t) in g.transitions_from(y) {
            let xt = if spec.is_nulled(e) {
                Some(x)
            } else {
                d.step(x, e)
            };
            if let Some(xt) = xt {
                if let std::collections::hash_map::Entry::Vacant(v) = parent.entry((t, xt)) {
                    v.insert(Some(((y, x), e)));
                    queue.push_back((t, xt));
                }
            }
        }
    }
    Ok(None)
}

/// Shortest string generated or marked by `a` but not by `b`.
fn future_difference(a: &Generator, b: &Generator) -> Option<Vec<Event>> {
    let a0 = a.initial()?;
    let b0 = b.initial();
    let mut parent: HashMap<(StateId, Option<StateId>), Option<((StateId, Option<StateId>), Event)>> =
        HashMap::new();
    parent.insert((a0, b0), None);
    let mut queue = VecDeque::from([(a0, b0)]);
    while let Some((x, y)) = queue.pop_front() {
        if y.is_none() || (a.is_marked(x) && !y.is_some_and(|y| b.is_marked(y))) {
            let mut s = Vec::new();
            let mut cur = (x, y);
            while let Some(Some((prev, e))) = parent.get(&cur) {
                s.push(*e);
                cur = *prev;
            }
            s.reverse();
            return Some(s);
        }
        for &(e, tx) in a.transitions_from(x) {
            let ty = y.and_then(|y| b.step(y, e));
            if let std::collections::hash_map::Entry::Vacant(v) = parent.entry((tx, ty)) {
                v.insert(Some(((x, y), e)));
                queue.push_back((tx, ty));
            }
        }
    }
    None
}

/// Whether some `v` with `P(v) = w` has `s·v` marked in `g`.
pub fn observer_extension_exists(
    g: &Generator,
    spec: &ProjectionSpec,
    s: &[Event],
    w: &[Event],
) -> bool {
    let Some(q) = g.run(s) else {
        return false;
    };
    let Ok(rooted) = g.with_initial(q) else {
        return false;
    };
    lift(&rooted, spec, w, true).is_some()
}

/// Outcome of checking robustness over subsets of a channel set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub full_robust: bool,
    /// Each checked subset with its verdict.
    pub checked: Vec<(Vec<ChannelSpec>, bool)>,
    /// Subsets that failed although the full set is robust.
    pub violations: Vec<Vec<ChannelSpec>>,
}

/// If `full` is robust, checks that every subset is too: all subsets when
/// there are at most four channels, otherwise `samples` random ones drawn
/// with `seed`.
pub fn check_subset_monotonicity(
    sup: &Generator,
    sups: &[Generator],
    full: &[ChannelSpec],
    samples: usize,
    seed: u64,
) -> Result<MonotonicityReport, RobustnessError> {
    let system = build_channeled(sups, full)?;
    let full_robust = check_delay_robustness(sup, &system)?.robust;
    let mut report = MonotonicityReport {
        full_robust,
        ..Default::default()
    };
    if !full_robust {
        return Ok(report);
    }
    let n = full.len();
    let masks: Vec<u64> = if n <= 4 {
        (0..(1u64 << n)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut all: Vec<u64> = (0..samples)
            .map(|_| {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.shuffle(&mut rng);
                let k = rand::Rng::gen_range(&mut rng, 0..n);
                idx[..k].iter().fold(0u64, |m, &i| m | (1 << i))
            })
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    };
    for mask in masks {
        let subset: Vec<ChannelSpec> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| full[i])
            .collect();
        let system = build_channeled(sups, &subset)?;
        let robust = check_delay_robustness(sup, &system)?.robust;
        if !robust {
            report.violations.push(subset.clone());
        }
        report.checked.push((subset, robust));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::events;
    use crate::language::enumerate_language;
    use crate::minimize::isomorphic;

    #[test]
    fn channel_structure() {
        let c = make_channel(&ChannelSpec::new(1, Event(13), 0), true);
        assert_eq!(c.size(), (2, 2));
        let l = enumerate_language(&c, 4);
        assert_eq!(l.closed.len(), 5);
        assert!(l.closed.contains(&events(&[13, 113, 13, 113])));
        assert!(c.alphabet().is_controllable(Event(113)));
        assert!(isomorphic(&sync(&[&c, &c]).unwrap(), &c));
    }

    #[test]
    fn conventional_labels() {
        assert_eq!(ChannelSpec::new(1, Event(13), 0).signal, Event(113));
        assert_eq!(ChannelSpec::new(0, Event(12), 1).signal, Event(212));
    }

    #[test]
    fn empty_channel_set_is_robust() {
        let a = Generator::from_transitions(2, 0, &[0], &[(0, 11, 1), (1, 12, 0)]).unwrap();
        let b = Generator::from_transitions(2, 0, &[0], &[(0, 12, 1), (1, 13, 0)]).unwrap();
        let sys = build_channeled(&[a.clone(), b.clone()], &[]).unwrap();
        assert!(isomorphic(&sys.sup_prime, &sync(&[&a, &b]).unwrap()));
        assert!(check_channels(&[a, b], &[]).unwrap().robust);
    }

    #[test]
    fn channel_validation() {
        let a = Generator::from_transitions(1, 0, &[0], &[(0, 11, 0)]).unwrap();
        let b = Generator::from_transitions(1, 0, &[0], &[(0, 12, 0)]).unwrap();
        let sups = [a, b];
        assert_eq!(
            build_channeled(&sups, &[ChannelSpec::new(1, Event(12), 0)]).unwrap_err(),
            RobustnessError::EventNotImported {
                event: Event(12),
                recipient: 0
            }
        );
        assert_eq!(
            build_channeled(&sups, &[ChannelSpec::new(1, Event(12), 5)]).unwrap_err(),
            RobustnessError::UnknownRecipient(5)
        );
        let clash = ChannelSpec {
            source_agent: 0,
            event: Event(11),
            recipient: 0,
            signal: Event(12),
        };
        assert_eq!(
            build_channeled(&sups, &[clash]).unwrap_err(),
            RobustnessError::SignalNotFresh(Event(12))
        );
    }

    #[test]
    fn language_difference_kinds() {
        let a = Generator::from_transitions(2, 0, &[0], &[(0, 11, 1), (1, 12, 0)]).unwrap();
        let b = Generator::from_transitions(2, 0, &[0], &[(0, 11, 1)]).unwrap();
        assert_eq!(
            language_difference(&a, &b),
            Some((events(&[11, 12]), Discrepancy::ExtraString))
        );
        assert_eq!(
            language_difference(&b, &a),
            Some((events(&[11, 12]), Discrepancy::MissingString))
        );
        assert_eq!(language_difference(&a, &a), None);
    }
}
