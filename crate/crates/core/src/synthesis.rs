//! Supervisor synthesis, controllability and nonblocking checks, and
//! localization of a monolithic supervisor into per-agent controllers.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::error::AutomataError;
use crate::event::{Alphabet, Event};
use crate::generator::{Generator, StateId};
use crate::minimize::{isomorphism, minimize, IsoMismatch};
use crate::ops::{add_selfloops, sync, trim};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("specification event {0} is not in the plant alphabet")]
    SpecEventNotInPlant(Event),
    #[error("agent alphabets overlap on event {0}")]
    OverlappingAgents(Event),
    #[error("agent index {0} out of range")]
    NoSuchAgent(usize),
    #[error("localization for agent {agent} is not control equivalent: {reason}")]
    Localization { agent: usize, reason: String },
}

/// Supremal controllable sublanguage of `Lm(plant) ∩ Lm(spec)`, as a trim
/// generator.
///
/// Computed on the product state space by alternately deleting states that
/// would have to disable an uncontrollable plant event and states that
/// cannot reach a marker, until nothing changes. The result may be empty.
pub fn supcon(plant: &Generator, spec: &Generator) -> Result<Generator, SynthesisError> {
    if let Some(&e) = spec
        .alphabet()
        .events()
        .iter()
        .find(|e| !plant.alphabet().contains(**e))
    {
        return Err(SynthesisError::SpecEventNotInPlant(e));
    }
    let alphabet = plant.alphabet().union(spec.alphabet())?;
    let (Some(p0), Some(s0)) = (plant.initial(), spec.initial()) else {
        return Ok(Generator::empty(alphabet));
    };

    // reachable product, remembering the plant component of each state
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = vec![(p0, s0)];
    index.insert((p0, s0), 0);
    let mut trans: Vec<Vec<(Event, StateId)>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(q) = queue.pop_front() {
        let (p, s) = pairs[q];
        let mut out = Vec::new();
        for &(e, pt) in plant.transitions_from(p) {
            let st = if spec.alphabet().contains(e) {
                match spec.step(s, e) {
                    Some(t) => t,
                    None => continue,
                }
            } else {
                s
            };
            let id = *index.entry((pt, st)).or_insert_with(|| {
                pairs.push((pt, st));
                queue.push_back(pairs.len() - 1);
                pairs.len() - 1
            });
            out.push((e, id));
        }
        trans.resize(trans.len().max(q + 1), Vec::new());
        trans[q] = out;
    }
    let n = pairs.len();
    trans.resize(n, Vec::new());
    let mut marked = FixedBitSet::with_capacity(n);
    for (i, &(p, s)) in pairs.iter().enumerate() {
        if plant.is_marked(p) && spec.is_marked(s) {
            marked.insert(i);
        }
    }
    let product = Generator::from_raw(alphabet.clone(), trans, 0, marked);

    let mut good = FixedBitSet::with_capacity(n);
    good.insert_range(..);
    loop {
        let mut changed = false;
        // controllability: an uncontrollable plant move must stay inside good
        for q in 0..n {
            if !good.contains(q) {
                continue;
            }
            let p = pairs[q].0;
            let bad = plant.transitions_from(p).iter().any(|&(e, _)| {
                !alphabet.is_controllable(e)
                    && product.step(q, e).is_none_or(|t| !good.contains(t))
            });
            if bad {
                good.set(q, false);
                changed = true;
            }
        }
        // nonblocking: keep states that reach a marker inside good
        let co = coreachable_within(&product, &good);
        if co != good {
            good = co;
            changed = true;
        }
        if !changed || !good.contains(0) {
            break;
        }
    }
    if !good.contains(0) {
        return Ok(Generator::empty(alphabet));
    }
    Ok(trim(&product.restrict(&good)))
}

fn coreachable_within(g: &Generator, within: &FixedBitSet) -> FixedBitSet {
    let n = g.num_states();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (s, _, t) in g.transitions() {
        if within.contains(s) && within.contains(t) {
            preds[t].push(s);
        }
    }
    let mut seen = FixedBitSet::with_capacity(n);
    let mut queue = VecDeque::new();
    for m in g.marked_states() {
        if within.contains(m) {
            seen.insert(m);
            queue.push_back(m);
        }
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

/// Shortest string `s·σ` with `s ∈ L(k)`, `σ` uncontrollable,
/// `s·σ ∈ L(plant)` and `s·σ ∉ L(k)`; `None` when `L(k)` is controllable
/// with respect to `plant`.
pub fn controllability_violation(k: &Generator, plant: &Generator) -> Option<Vec<Event>> {
    let (k0, p0) = (k.initial()?, plant.initial()?);
    let mut parent: HashMap<(StateId, StateId), Option<((StateId, StateId), Event)>> =
        HashMap::new();
    parent.insert((k0, p0), None);
    let mut queue = VecDeque::from([(k0, p0)]);
    let path = |parent: &HashMap<_, Option<((StateId, StateId), Event)>>, mut cur| {
        let mut s = Vec::new();
        while let Some(Some((prev, e))) = parent.get(&cur) {
            s.push(*e);
            cur = *prev;
        }
        s.reverse();
        s
    };
    while let Some((x, p)) = queue.pop_front() {
        for &(e, pt) in plant.transitions_from(p) {
            let in_k = k.alphabet().contains(e);
            let kt = if in_k { k.step(x, e) } else { Some(x) };
            match kt {
                None if !plant.alphabet().is_controllable(e) => {
                    let mut s = path(&parent, (x, p));
                    s.push(e);
                    return Some(s);
                }
                None => {}
                Some(kt) => {
                    if let std::collections::hash_map::Entry::Vacant(v) = parent.entry((kt, pt)) {
                        v.insert(Some(((x, p), e)));
                        queue.push_back((kt, pt));
                    }
                }
            }
        }
    }
    None
}

pub fn is_controllable(k: &Generator, plant: &Generator) -> bool {
    controllability_violation(k, plant).is_none()
}

/// Every reachable state can reach a marker state.
pub fn nonblocking(g: &Generator) -> bool {
    let mut reach = g.reachable_states();
    let co = g.coreachable_states();
    reach.difference_with(&co);
    reach.is_clear()
}

/// Plant given as independent agents plus the specifications that link
/// them.
#[derive(Clone, Debug)]
pub struct PlantModel {
    agents: Vec<Generator>,
    specs: Vec<Generator>,
}

impl PlantModel {
    pub fn new(agents: Vec<Generator>, specs: Vec<Generator>) -> Result<Self, SynthesisError> {
        let mut seen = BTreeSet::new();
        for a in &agents {
            for &e in a.alphabet().events() {
                if !seen.insert(e) {
                    return Err(SynthesisError::OverlappingAgents(e));
                }
            }
        }
        Ok(PlantModel { agents, specs })
    }

    pub fn agents(&self) -> &[Generator] {
        &self.agents
    }

    pub fn specs(&self) -> &[Generator] {
        &self.specs
    }

    pub fn plant(&self) -> Result<Generator, AutomataError> {
        sync(&self.agents.iter().collect::<Vec<_>>())
    }

    /// Product of all specifications; the one-state generator over no events
    /// when there are none.
    pub fn spec(&self) -> Result<Generator, AutomataError> {
        if self.specs.is_empty() {
            return Generator::new(Alphabet::default(), 1, 0, &[0], []);
        }
        sync(&self.specs.iter().collect::<Vec<_>>())
    }

    /// Index of the agent owning `e`.
    pub fn owner_of(&self, e: Event) -> Option<usize> {
        self.agents.iter().position(|a| a.alphabet().contains(e))
    }

    /// Monolithic supervisor for this model.
    pub fn supervisor(&self) -> Result<Generator, SynthesisError> {
        supcon(&self.plant()?, &self.spec()?)
    }
}

/// Controller attached to one agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalController {
    pub controller: Generator,
    pub owner: usize,
    /// Events of other agents this controller observes.
    pub imported: BTreeSet<Event>,
}

impl LocalController {
    /// Wraps `controller` for agent `owner`, computing its imported events
    /// and selflooping each one wherever it is undefined, so the controller
    /// never disables another agent's events.
    pub fn new(
        controller: Generator,
        owner: usize,
        model: &PlantModel,
    ) -> Result<Self, SynthesisError> {
        let agent = model
            .agents
            .get(owner)
            .ok_or(SynthesisError::NoSuchAgent(owner))?;
        let imported: BTreeSet<Event> = controller
            .alphabet()
            .events()
            .iter()
            .copied()
            .filter(|e| !agent.alphabet().contains(*e))
            .collect();
        let controller = add_selfloops(&controller, &imported, &Alphabet::default())?;
        Ok(LocalController {
            controller,
            owner,
            imported,
        })
    }

    /// Controlled behavior of the owning agent, `Sync(G_i, LOC_i)`.
    pub fn controlled_agent(&self, model: &PlantModel) -> Result<Generator, AutomataError> {
        sync(&[&model.agents[self.owner], &self.controller])
    }
}

/// Joint behavior of the plant under all controllers agrees with `sup` in
/// both closed and marked behavior.
pub fn control_equivalent(locals: &[LocalController], plant: &Generator, sup: &Generator) -> bool {
    control_equivalence_mismatch(locals, plant, sup).is_none()
}

/// Like [`control_equivalent`], returning the isomorphism failure.
pub fn control_equivalence_mismatch(
    locals: &[LocalController],
    plant: &Generator,
    sup: &Generator,
) -> Option<IsoMismatch> {
    let mut comps = vec![plant];
    comps.extend(locals.iter().map(|l| &l.controller));
    let joint = match sync(&comps) {
        Ok(j) => j,
        Err(_) => {
            return Some(IsoMismatch {
                states: None,
                reason: crate::minimize::MismatchReason::Emptiness,
            })
        }
    };
    isomorphism(&minimize(&joint), &minimize(sup)).err()
}

/// Control and marking information of each supervisor state.
struct ControlData {
    enabled: Vec<BTreeSet<Event>>,
    disabled: Vec<BTreeSet<Event>>,
    plant_marked: Vec<bool>,
}

fn control_data(plant: &Generator, sup: &Generator) -> ControlData {
    let n = sup.num_states();
    let mut data = ControlData {
        enabled: (0..n)
            .map(|x| sup.transitions_from(x).iter().map(|t| t.0).collect())
            .collect(),
        disabled: vec![BTreeSet::new(); n],
        plant_marked: vec![false; n],
    };
    let (Some(x0), Some(p0)) = (sup.initial(), plant.initial()) else {
        return data;
    };
    let mut seen = BTreeSet::from([(x0, p0)]);
    let mut queue = VecDeque::from([(x0, p0)]);
    while let Some((x, p)) = queue.pop_front() {
        if plant.is_marked(p) {
            data.plant_marked[x] = true;
        }
        for &(e, pt) in plant.transitions_from(p) {
            match sup.step(x, e) {
                Some(xt) => {
                    if seen.insert((xt, pt)) {
                        queue.push_back((xt, pt));
                    }
                }
                None if plant.alphabet().is_controllable(e) => {
                    data.disabled[x].insert(e);
                }
                None => {}
            }
        }
    }
    data
}

/// Decomposes `sup` into one controller per agent by greedily merging
/// control-consistent supervisor states into a control congruence.
///
/// Two states are consistent for agent `i` when neither enables an event of
/// agent `i` that the other disables, and they agree on marking whenever
/// the plant agrees on marking. Merging is closed under common successors,
/// so each cell partition yields a deterministic controller. Foreign
/// events that never change cell are dropped; the rest are imported and
/// selflooped where undefined. The result is checked for control
/// equivalence before it is returned.
pub fn localize(model: &PlantModel, sup: &Generator) -> Result<Vec<LocalController>, SynthesisError> {
    let plant = model.plant()?;
    let data = control_data(&plant, sup);
    let mut locals = Vec::with_capacity(model.agents.len());
    for (i, agent) in model.agents.iter().enumerate() {
        let own = agent.alphabet();
        let cells = control_cover(sup, &data, own);
        let controller = cover_to_controller(sup, &data, own, &cells)?;
        locals.push(LocalController::new(controller, i, model)?);
    }
    if let Some(m) = control_equivalence_mismatch(&locals, &plant, sup) {
        return Err(SynthesisError::Localization {
            agent: usize::MAX,
            reason: m.to_string(),
        });
    }
    Ok(locals)
}

fn control_cover(sup: &Generator, data: &ControlData, own: &Alphabet) -> Vec<usize> {
    let n = sup.num_states();
    let own_disabled: Vec<BTreeSet<Event>> = data
        .disabled
        .iter()
        .map(|d| d.iter().copied().filter(|e| own.contains(*e)).collect())
        .collect();
    let consistent = |x: usize, y: usize| {
        own_disabled[y].is_disjoint(&data.enabled[x])
            && own_disabled[x].is_disjoint(&data.enabled[y])
            && (data.plant_marked[x] != data.plant_marked[y]
                || sup.is_marked(x) == sup.is_marked(y))
    };
    let mut compat = vec![FixedBitSet::with_capacity(n); n];
    for x in 0..n {
        for y in 0..n {
            if consistent(x, y) {
                compat[x].insert(y);
            }
        }
    }

    let mut cell: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if cell[i] == cell[j] {
                continue;
            }
            if let Some(merged) = try_merge(sup, &compat, &cell, i, j) {
                cell = merged;
            }
        }
    }
    cell
}

/// Merges the cells of `a` and `b`, closing under common successors.
/// Returns `None` if some merged pair is inconsistent.
fn try_merge(
    sup: &Generator,
    compat: &[FixedBitSet],
    cell: &[usize],
    a: usize,
    b: usize,
) -> Option<Vec<usize>> {
    let mut cell = cell.to_vec();
    let n = cell.len();
    let mut work = vec![(a, b)];
    while let Some((x, y)) = work.pop() {
        let (cx, cy) = (cell[x], cell[y]);
        if cx == cy {
            continue;
        }
        let left: Vec<usize> = (0..n).filter(|&s| cell[s] == cx).collect();
        let right: Vec<usize> = (0..n).filter(|&s| cell[s] == cy).collect();
        if left
            .iter()
            .any(|&l| right.iter().any(|&r| !compat[l].contains(r)))
        {
            return None;
        }
        let (keep, gone) = (cx.min(cy), cx.max(cy));
        for c in cell.iter_mut() {
            if *c == gone {
                *c = keep;
            }
        }
        let mut succ: BTreeMap<Event, StateId> = BTreeMap::new();
        for &s in left.iter().chain(&right) {
            for &(e, t) in sup.transitions_from(s) {
                match succ.get(&e) {
                    Some(&u) if cell[u] != cell[t] => work.push((u, t)),
                    Some(_) => {}
                    None => {
                        succ.insert(e, t);
                    }
                }
            }
        }
    }
    Some(cell)
}

fn cover_to_controller(
    sup: &Generator,
    data: &ControlData,
    own: &Alphabet,
    cell: &[usize],
) -> Result<Generator, AutomataError> {
    let reps: BTreeSet<usize> = cell.iter().copied().collect();
    let id: BTreeMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let m = reps.len();
    let mut edges: Vec<BTreeMap<Event, usize>> = vec![BTreeMap::new(); m];
    let mut marked = Vec::new();
    let mut disabled_in_cell: Vec<BTreeSet<Event>> = vec![BTreeSet::new(); m];
    for (x, &c) in cell.iter().enumerate() {
        let ci = id[&c];
        if sup.is_marked(x) {
            marked.push(ci);
        }
        disabled_in_cell[ci].extend(data.disabled[x].iter().filter(|e| own.contains(**e)));
        for &(e, t) in sup.transitions_from(x) {
            edges[ci].insert(e, id[&cell[t]]);
        }
    }
    marked.sort_unstable();
    marked.dedup();

    // foreign events that move between cells somewhere
    let imported: BTreeSet<Event> = edges
        .iter()
        .enumerate()
        .flat_map(|(c, out)| {
            out.iter()
                .filter(move |(e, t)| !own.contains(**e) && **t != c)
                .map(|(e, _)| *e)
        })
        .collect();

    let sup_alpha = sup.alphabet();
    let mut events: BTreeSet<Event> = own.events().clone();
    events.extend(&imported);
    let controllable = events.iter().copied().filter(|&e| {
        if sup_alpha.contains(e) {
            sup_alpha.is_controllable(e)
        } else {
            own.is_controllable(e)
        }
    });
    let alphabet = Alphabet::new(events.iter().copied(), controllable)?;

    let mut transitions = Vec::new();
    for (c, out) in edges.iter().enumerate() {
        for &e in &events {
            match out.get(&e) {
                Some(&t) => transitions.push((c, e, t)),
                // only private controllable events disabled somewhere in
                // the cell stay undefined
                None => {
                    let keep_undefined = own.contains(e)
                        && alphabet.is_controllable(e)
                        && disabled_in_cell[c].contains(&e);
                    if !keep_undefined {
                        transitions.push((c, e, c));
                    }
                }
            }
        }
    }
    let initial = sup.initial().map(|x0| id[&cell[x0]]).unwrap_or(0);
    Generator::new(alphabet, m, initial, &marked, transitions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::events;
    use crate::minimize::isomorphic;

    #[test]
    fn spec_equal_to_plant_disables_nothing() {
        let g = Generator::from_transitions(3, 0, &[0], &[(0, 1, 1), (1, 2, 0), (1, 3, 2)])
            .unwrap();
        let sup = supcon(&g, &g).unwrap();
        assert!(isomorphic(&minimize(&sup), &minimize(&trim(&g))));
    }

    #[test]
    fn uncontrollable_escape_prunes_back() {
        // plant: 0 -1-> 1 -2-> 2 ; spec forbids reaching 2 by event 2
        let plant =
            Generator::from_transitions(3, 0, &[0, 1, 2], &[(0, 1, 1), (1, 2, 2)]).unwrap();
        let spec = Generator::new(
            Alphabet::with_parity(events(&[1, 2])),
            2,
            0,
            &[0, 1],
            [(0, Event(1), 1)],
        )
        .unwrap();
        let sup = supcon(&plant, &spec).unwrap();
        // event 1 must be disabled at the start
        assert_eq!(sup.size(), (1, 0));
    }

    #[test]
    fn empty_supervisor_is_legal() {
        let plant = Generator::from_transitions(2, 0, &[1], &[(0, 2, 1)]).unwrap();
        let spec = Generator::new(Alphabet::with_parity(events(&[2])), 1, 0, &[0], []).unwrap();
        assert!(supcon(&plant, &spec).unwrap().is_empty());
    }

    #[test]
    fn spec_event_outside_plant() {
        let plant = Generator::from_transitions(1, 0, &[0], &[(0, 1, 0)]).unwrap();
        let spec = Generator::from_transitions(1, 0, &[0], &[(0, 3, 0)]).unwrap();
        assert_eq!(
            supcon(&plant, &spec).unwrap_err(),
            SynthesisError::SpecEventNotInPlant(Event(3))
        );
    }

    #[test]
    fn controllability_counterexample() {
        // plant 0 -1-> 1 -2-> 2 ; k stops after 1, so 2 escapes
        let plant = Generator::from_transitions(3, 0, &[2], &[(0, 1, 1), (1, 2, 2)]).unwrap();
        let k = Generator::new(
            plant.alphabet().clone(),
            2,
            0,
            &[1],
            [(0, Event(1), 1)],
        )
        .unwrap();
        assert_eq!(controllability_violation(&k, &plant), Some(events(&[1, 2])));
        assert!(is_controllable(&plant, &plant));
    }

    #[test]
    fn nonblocking_detects_deadlock() {
        let g = Generator::from_transitions(3, 0, &[1], &[(0, 1, 1), (0, 2, 2)]).unwrap();
        assert!(!nonblocking(&g));
        assert!(nonblocking(&trim(&g)));
    }

    #[test]
    fn overlapping_agents_rejected() {
        let a = Generator::from_transitions(1, 0, &[0], &[(0, 1, 0)]).unwrap();
        assert_eq!(
            PlantModel::new(vec![a.clone(), a], vec![]).unwrap_err(),
            SynthesisError::OverlappingAgents(Event(1))
        );
    }

    #[test]
    fn single_agent_localization() {
        let a = Generator::from_transitions(2, 0, &[0], &[(0, 1, 1), (1, 2, 0), (0, 3, 0)])
            .unwrap();
        let spec = Generator::new(
            Alphabet::with_parity(events(&[1, 2, 3])),
            2,
            0,
            &[0, 1],
            [(0, Event(1), 1), (1, Event(2), 0), (1, Event(3), 1)],
        )
        .unwrap();
        let model = PlantModel::new(vec![a], vec![spec]).unwrap();
        let sup = model.supervisor().unwrap();
        let locals = localize(&model, &sup).unwrap();
        assert_eq!(locals.len(), 1);
        assert!(locals[0].imported.is_empty());
        assert!(control_equivalent(&locals, &model.plant().unwrap(), &sup));
    }
}
