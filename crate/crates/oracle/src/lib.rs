//! Reference semantics for the automaton operations in `dsc-core`, written
//! directly from the definitions and with no shared code, plus seeded
//! random instances to compare the two on.
//!
//! Everything here is exponential somewhere and only meant for small
//! generators.

pub mod blocked;
pub mod futures;
pub mod lang;
pub mod partition;
pub mod random;
pub mod robust;
pub mod supcon;
pub mod suites;

pub use lang::{projected_words, sync_words, words, Lang};
