use std::collections::BTreeSet;

use dsc_core::abstraction::{project, ProjectionSpec};
use dsc_core::language::enumerate_language;
use dsc_core::minimize::language_equivalent;
use dsc_core::synthesis::{is_controllable, nonblocking};
use dsc_core::{isomorphic, minimize, supcon, sync, trim, Alphabet, Event, Generator};
use proptest::prelude::*;

fn gen(events: &'static [u32]) -> impl Strategy<Value = Generator> {
    (1usize..=5).prop_flat_map(move |n| {
        let trans = proptest::collection::vec(
            (0..n, proptest::sample::select(events), 0..n),
            0..(n * events.len()),
        );
        let marked = proptest::collection::vec(any::<bool>(), n);
        (trans, marked).prop_map(move |(trans, marked)| {
            let mut seen = BTreeSet::new();
            let trans: Vec<_> = trans
                .into_iter()
                .filter(|&(a, e, _)| seen.insert((a, e)))
                .map(|(a, e, b)| (a, Event(e), b))
                .collect();
            let marked: Vec<usize> = (0..n).filter(|&i| marked[i]).collect();
            Generator::new(
                Alphabet::with_parity(events.iter().map(|&e| Event(e))),
                n,
                0,
                &marked,
                trans,
            )
            .unwrap()
        })
    })
}

proptest! {
    #[test]
    fn sync_commutes(a in gen(&[1, 2, 3]), b in gen(&[2, 3, 4])) {
        let ab = sync(&[&a, &b]).unwrap();
        let ba = sync(&[&b, &a]).unwrap();
        prop_assert!(language_equivalent(&ab, &ba));
    }

    #[test]
    fn sync_with_itself_changes_nothing(a in gen(&[1, 2, 3])) {
        prop_assert!(language_equivalent(&sync(&[&a, &a]).unwrap(), &a));
    }

    #[test]
    fn minimize_keeps_language_and_is_idempotent(a in gen(&[1, 2, 3])) {
        let m = minimize(&a);
        prop_assert_eq!(enumerate_language(&m, 6), enumerate_language(&a, 6));
        prop_assert!(isomorphic(&minimize(&m), &m));
    }

    #[test]
    fn projection_is_idempotent(a in gen(&[1, 2, 3, 4]), k in 1u32..=4) {
        let spec = ProjectionSpec::null([Event(k)]);
        let p = project(&a, &spec).unwrap();
        prop_assert!(isomorphic(&project(&p, &spec).unwrap(), &p));
    }

    #[test]
    fn supervisor_is_controllable_nonblocking_and_within_spec(
        plant in gen(&[1, 2, 3, 4]),
        spec in gen(&[1, 2, 3, 4]),
    ) {
        let k = supcon(&plant, &spec).unwrap();
        prop_assert!(nonblocking(&k));
        if !k.is_empty() {
            prop_assert!(is_controllable(&k, &plant));
            let both = trim(&sync(&[&plant, &spec]).unwrap());
            let lk = enumerate_language(&k, 6);
            let lb = enumerate_language(&sync(&[&plant, &spec]).unwrap(), 6);
            prop_assert!(lk.closed.is_subset(&lb.closed));
            prop_assert!(lk.marked.is_subset(&lb.marked));
            prop_assert!(isomorphic(&minimize(&supcon(&k, &both).unwrap()), &minimize(&k)));
        }
    }
}
