//! Randomized comparisons of `dsc-core` against the reference semantics.
//! Each suite is deterministic in its seed.

use std::collections::BTreeSet;
use std::fmt;

use dsc_core::abstraction::{
    determinize_if_possible, has_observer_property, project, supqc, supremal_quasi_congruence,
    ProjectionSpec,
};
use dsc_core::blocking::blocked_test;
use dsc_core::robustness::{build_channeled, check_delay_robustness, check_subset_monotonicity, ChannelSpec};
use dsc_core::{format_string, isomorphic, supcon, sync, trim, Event, Generator};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::blocked::{blocked_witness, is_blocking_witness};
use crate::futures::{lm_observer, projection_loses_no_future};
use crate::lang::{projected_words, sync_words, words};
use crate::partition::supremality_failure;
use crate::random::{self, generator, System};
use crate::robust::{delay_robust, Channeled};
use crate::supcon::{blocking_state, outside_spec, uncontrollable_escape, NaiveSupervisor};

/// String length up to which languages are compared.
pub const DEPTH: usize = 8;
pub const MAX_STATES: usize = 6;

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: &'static str,
    pub instances: usize,
    /// Named counters, e.g. how many instances were nontrivial.
    pub counts: Vec<(&'static str, usize)>,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            ..Default::default()
        }
    }

    fn count(&mut self, key: &'static str) {
        match self.counts.iter_mut().find(|c| c.0 == key) {
            Some(c) => c.1 += 1,
            None => self.counts.push((key, 1)),
        }
    }

    pub fn get(&self, key: &str) -> usize {
        self.counts.iter().find(|c| c.0 == key).map_or(0, |c| c.1)
    }

    fn fail(&mut self, instance: usize, msg: String) {
        self.failures.push(format!("#{instance}: {msg}"));
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} instances", self.name, self.instances)?;
        for (k, v) in &self.counts {
            write!(f, ", {v} {k}")?;
        }
        write!(f, ", {} failures", self.failures.len())?;
        for m in self.failures.iter().take(5) {
            write!(f, "\n  {m}")?;
        }
        Ok(())
    }
}

fn nulled_events(g: &Generator, nulled: &BTreeSet<Event>) -> ProjectionSpec {
    ProjectionSpec::null(nulled.iter().copied().filter(|e| g.alphabet().contains(*e)))
}

/// Products of two or three generators over overlapping alphabets.
pub fn sync_suite(seed: u64, n: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("sync");
    let mut rng = random::rng(seed);
    let alphabets: [&[u32]; 3] = [&[1, 2, 3], &[2, 3, 4], &[1, 4, 5]];
    for i in 0..n {
        let k = rng.gen_range(2..=3);
        let gs: Vec<Generator> = alphabets[..k]
            .iter()
            .map(|a| generator(&mut rng, MAX_STATES, a, 0.5, 0.4))
            .collect();
        let refs: Vec<&Generator> = gs.iter().collect();
        let got = words(&sync(&refs).unwrap(), DEPTH);
        let want = sync_words(&refs, DEPTH);
        if let Some((w, kind)) = got.first_difference(&want) {
            rep.fail(i, format!("{kind} behavior differs on {}", format_string(&w)));
        }
        if !got.closed.iter().any(|w| w.len() == DEPTH) {
            rep.count("short");
        }
        rep.instances += 1;
    }
    rep
}

/// Natural projections erasing one to three of five events.
pub fn project_suite(seed: u64, n: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("project");
    let mut rng = random::rng(seed);
    let events = [1, 2, 3, 4, 5];
    for i in 0..n {
        let g = generator(&mut rng, MAX_STATES, &events, 0.4, 0.4);
        let nulled = random::subset(&mut rng, &events, 2);
        let p = project(&g, &ProjectionSpec::null(nulled.iter().copied())).unwrap();
        if let Some((w, kind)) = words(&p, DEPTH).first_difference(&projected_words(&g, &nulled, DEPTH)) {
            rep.fail(i, format!("{kind} behavior differs on {}", format_string(&w)));
        }
        rep.instances += 1;
    }
    rep
}

/// Quasi-congruences, their quotients and the observer test, with the
/// quotient compared against the projection whenever it is deterministic.
pub fn supqc_suite(seed: u64, n: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("supqc");
    let mut rng = random::rng(seed);
    let events = [1, 2, 3, 4];
    for i in 0..n {
        let g = generator(&mut rng, MAX_STATES, &events, 0.45, 0.5);
        let nulled = random::subset(&mut rng, &events, 1);
        let spec = nulled_events(&g, &nulled);
        let block = supremal_quasi_congruence(&g, &spec);
        if let Some(why) = supremality_failure(&g, &nulled, &block) {
            rep.fail(i, why);
        }
        let q = supqc(&g, &spec);
        let det = determinize_if_possible(&q);
        if det.is_ok() != projection_loses_no_future(&g, &nulled) {
            rep.fail(
                i,
                format!("quotient deterministic {} but oracle says {}", det.is_ok(), !det.is_ok()),
            );
        }
        if let Ok(d) = det {
            rep.count("deterministic");
            if !isomorphic(&d, &project(&g, &spec).unwrap()) {
                rep.fail(i, "deterministic quotient is not the projection".into());
            }
        }
        let t = trim(&g);
        if !t.is_empty() {
            rep.count("trim nonempty");
            if has_observer_property(&t, &spec) != lm_observer(&t, &nulled) {
                rep.fail(i, "observer verdict on the trim part disagrees".into());
            }
        }
        rep.instances += 1;
    }
    rep
}

/// Supervisors for random plants and specifications over a subset of the
/// plant events.
pub fn supcon_suite(seed: u64, n: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("supcon");
    let mut rng = random::rng(seed);
    let events = [1, 2, 3, 4];
    for i in 0..n {
        let plant = generator(&mut rng, MAX_STATES, &events, 0.5, 0.5);
        let spec_events: Vec<u32> = random::subset(&mut rng, &events, 0).iter().map(|e| e.0).collect();
        let spec = generator(&mut rng, MAX_STATES, &spec_events, 0.6, 0.6);
        let k = supcon(&plant, &spec).unwrap();
        let naive = NaiveSupervisor::new(&plant, &spec);
        if let Some((w, kind)) = words(&k, DEPTH).first_difference(&naive.words(DEPTH)) {
            rep.fail(i, format!("{kind} behavior differs on {}", format_string(&w)));
        }
        if let Some(w) = uncontrollable_escape(&k, &plant, DEPTH) {
            rep.fail(i, format!("not controllable at {}", format_string(&w)));
        }
        if let Some(q) = blocking_state(&k) {
            rep.fail(i, format!("blocking at state {q}"));
        }
        if let Some(w) = outside_spec(&k, &plant, &spec, DEPTH) {
            rep.fail(i, format!("outside the specification at {}", format_string(&w)));
        }
        if !k.is_empty() {
            rep.count("nonempty");
        }
        rep.instances += 1;
    }
    rep
}

fn channels_label(cs: &[ChannelSpec]) -> String {
    let v: Vec<String> = cs.iter().map(|c| format!("{}->{}", c.event, c.recipient)).collect();
    format!("{{{}}}", v.join(","))
}

fn random_system<R: Rng>(rng: &mut R, owned: &[usize], imports: &[Vec<(usize, usize)>]) -> System {
    loop {
        if let Some(s) = random::system(rng, owned, imports, 4) {
            return s;
        }
    }
}

/// Robustness for every subset of two or three channels carrying events
/// of the second agent to the first controller. When the full set is
/// robust every subset must be; each verdict is also compared with the
/// reference decision. Draws systems until `n` are robust on the full set.
pub fn monotonicity_suite(seed: u64, n: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("monotonicity");
    let mut rng = random::rng(seed);
    while rep.get("robust on the full set") < n {
        let i = rep.instances;
        let k = rng.gen_range(2..=3);
        let back = rng.gen_range(0..=1);
        let sys = random_system(&mut rng, &[2, 3], &[vec![(1, k)], vec![(0, back)]]);
        let full = sys.imports_from(1, 0);
        let report = check_subset_monotonicity(&sys.sup, &sys.sups, &full, 0, seed).unwrap();
        if delay_robust(&sys.sup, &sys.sups, &full) != report.full_robust {
            rep.fail(i, format!("verdict for {} disagrees with reference", channels_label(&full)));
        }
        if report.full_robust {
            rep.count("robust on the full set");
            for (subset, robust) in &report.checked {
                rep.count("subsets checked");
                if *robust != delay_robust(&sys.sup, &sys.sups, subset) {
                    rep.fail(i, format!("verdict for {} disagrees with reference", channels_label(subset)));
                }
            }
            for v in &report.violations {
                rep.fail(i, format!("{} robust but {} is not", channels_label(&full), channels_label(v)));
            }
        }
        rep.instances += 1;
    }
    rep
}

/// Blocking of each uncontrollable channeled event by its channel, from
/// the test generator and from a direct search, on systems of two agents
/// that import events from each other.
pub fn blocked_suite(seed: u64, n: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("blocked");
    let mut rng = random::rng(seed);
    while rep.instances < n {
        let i = rep.instances;
        let a = rng.gen_range(1..=2);
        let b = rng.gen_range(1..=2);
        let sys = random_system(&mut rng, &[2, 2], &[vec![(1, a)], vec![(0, b)]]);
        let mut channels = sys.imports.clone();
        channels.shuffle(&mut rng);
        channels.truncate(rng.gen_range(1..=channels.len()));
        if channels.iter().all(|c| c.event.parity_controllable()) {
            continue;
        }
        let system = build_channeled(&sys.sups, &channels).unwrap();
        let reference = Channeled {
            sups: &sys.sups,
            channels: &channels,
        };
        if !isomorphic(&trim(&system.sup_prime), &trim(&reference.explore())) {
            rep.fail(i, format!("channeled behavior of {} differs", channels_label(&channels)));
        }
        let robust = check_delay_robustness(&sys.sup, &system).unwrap().robust;
        if robust != delay_robust(&sys.sup, &sys.sups, &channels) {
            rep.fail(i, format!("verdict for {} disagrees with reference", channels_label(&channels)));
        }
        if robust {
            rep.count("robust");
        }
        for c in channels.iter().filter(|c| !c.event.parity_controllable()) {
            let got = blocked_test(&system, c).unwrap();
            let want = blocked_witness(&reference, c);
            if got.blocked != want.is_some() {
                rep.fail(
                    i,
                    format!(
                        "{} in {}: test says blocked={}, search found {:?}",
                        c.event,
                        channels_label(&channels),
                        got.blocked,
                        want.map(|w| format_string(&w))
                    ),
                );
            }
            // other channels only matter once robustness is already lost
            let alone = build_channeled(&sys.sups, &[*c]).unwrap();
            if blocked_test(&alone, c).unwrap().blocked != got.blocked {
                if robust {
                    rep.fail(i, format!("{} blocked={} changes without the other channels", c.event, got.blocked));
                } else {
                    rep.count("changed alone while not robust");
                }
            }
            if let Some(w) = &got.witness {
                rep.count("blocked");
                if !is_blocking_witness(&reference, c, w) {
                    rep.fail(i, format!("witness {} for {} is not valid", format_string(w), c.event));
                }
            } else {
                rep.count("not blocked");
            }
        }
        rep.instances += 1;
    }
    rep
}

/// Every suite with its default size.
pub fn all(seed: u64) -> Vec<SuiteReport> {
    vec![
        sync_suite(seed, 500),
        project_suite(seed + 1, 500),
        supqc_suite(seed + 2, 500),
        supcon_suite(seed + 3, 500),
        monotonicity_suite(seed + 4, 200),
        blocked_suite(seed + 5, 200),
    ]
}
