//! Randomized agreement with the reference semantics, on seeds distinct
//! from the ones the acceptance run uses.

use dsc_oracle::suites::{self, SuiteReport};

const SEED: u64 = 0x5eed_2024;

fn check(r: SuiteReport) {
    println!("{r}");
    assert!(r.passed(), "{r}");
}

#[test]
fn sync_matches_componentwise_membership() {
    check(suites::sync_suite(SEED, 500));
}

#[test]
fn projection_matches_set_simulation() {
    check(suites::project_suite(SEED, 500));
}

#[test]
fn supqc_is_the_coarsest_quasi_congruence() {
    let r = suites::supqc_suite(SEED, 500);
    assert!(r.get("deterministic") > 100);
    check(r);
}

#[test]
fn supcon_matches_naive_fixpoint() {
    let r = suites::supcon_suite(SEED, 500);
    assert!(r.get("nonempty") > 50);
    check(r);
}

#[test]
fn robustness_is_inherited_by_channel_subsets() {
    let r = suites::monotonicity_suite(SEED, 200);
    assert_eq!(r.get("robust on the full set"), 200);
    check(r);
}

#[test]
fn blocked_test_matches_direct_search() {
    let r = suites::blocked_suite(SEED, 200);
    assert!(r.get("blocked") > 0 && r.get("not blocked") > 0);
    check(r);
}
