//! Seeded random generators and distributed systems.

use std::collections::BTreeSet;

use dsc_core::robustness::ChannelSpec;
use dsc_core::{sync, trim, Alphabet, Event, Generator};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Between 1 and `max_states` states over `events` (odd labels
/// controllable), each event present at each state with probability
/// `density`, each state marked with probability `marking`.
pub fn generator<R: Rng>(
    rng: &mut R,
    max_states: usize,
    events: &[u32],
    density: f64,
    marking: f64,
) -> Generator {
    let n = rng.gen_range(1..=max_states);
    let mut trans = Vec::new();
    for q in 0..n {
        for &e in events {
            if rng.gen_bool(density) {
                trans.push((q, Event(e), rng.gen_range(0..n)));
            }
        }
    }
    let marked: Vec<usize> = (0..n).filter(|_| rng.gen_bool(marking)).collect();
    Generator::new(
        Alphabet::with_parity(events.iter().map(|&e| Event(e))),
        n,
        0,
        &marked,
        trans,
    )
    .unwrap()
}

/// Random nonempty subset of `events`, keeping at least `keep` out.
pub fn subset<R: Rng>(rng: &mut R, events: &[u32], keep: usize) -> BTreeSet<Event> {
    let mut v: Vec<u32> = events.to_vec();
    v.shuffle(rng);
    let k = rng.gen_range(1..=events.len() - keep);
    v[..k].iter().map(|&e| Event(e)).collect()
}

/// Controllers of a distributed system with their product, and every
/// import that could be channeled.
#[derive(Clone, Debug)]
pub struct System {
    pub sups: Vec<Generator>,
    pub sup: Generator,
    /// Events owned by each agent.
    pub owned: Vec<Vec<u32>>,
    pub imports: Vec<ChannelSpec>,
}

impl System {
    pub fn imports_from(&self, source: usize, recipient: usize) -> Vec<ChannelSpec> {
        self.imports
            .iter()
            .filter(|c| c.source_agent == source && c.recipient == recipient)
            .copied()
            .collect()
    }
}

/// Agent `i` owns the events `10(i+1)+1 ..= 10(i+1)+k`. `imports[i]` lists,
/// per other agent, how many of its events controller `i` observes.
///
/// A controller starts from a random generator over its own events; each
/// imported event then appears at each state with probability 1/2, as a
/// selfloop or a jump. Returns `None` when the product is empty or
/// blocking.
pub fn system<R: Rng>(
    rng: &mut R,
    owned_counts: &[usize],
    imports: &[Vec<(usize, usize)>],
    max_states: usize,
) -> Option<System> {
    let owned: Vec<Vec<u32>> = owned_counts
        .iter()
        .enumerate()
        .map(|(i, &k)| (1..=k as u32).map(|j| 10 * (i as u32 + 1) + j).collect())
        .collect();
    let mut sups = Vec::new();
    let mut specs = Vec::new();
    for (i, own) in owned.iter().enumerate() {
        let base = generator(rng, max_states, own, 0.6, 0.5);
        let n = base.num_states();
        let mut trans: Vec<(usize, Event, usize)> = base.transitions().collect();
        let mut alphabet: Vec<u32> = own.clone();
        for &(src, count) in &imports[i] {
            let mut theirs = owned[src].clone();
            theirs.shuffle(rng);
            for &e in &theirs[..count] {
                alphabet.push(e);
                specs.push(ChannelSpec::new(src, Event(e), i));
                for q in 0..n {
                    if rng.gen_bool(0.5) {
                        let t = if rng.gen_bool(0.5) { q } else { rng.gen_range(0..n) };
                        trans.push((q, Event(e), t));
                    }
                }
            }
        }
        let marked: Vec<usize> = (0..n).filter(|&q| base.is_marked(q)).collect();
        sups.push(
            Generator::new(
                Alphabet::with_parity(alphabet.iter().map(|&e| Event(e))),
                n,
                0,
                &marked,
                trans,
            )
            .unwrap(),
        );
    }
    let sup = sync(&sups.iter().collect::<Vec<_>>()).unwrap();
    if sup.is_empty() || trim(&sup).size() != sup.size() || sup.num_transitions() == 0 {
        return None;
    }
    Some(System {
        sups,
        sup,
        owned,
        imports: specs,
    })
}
