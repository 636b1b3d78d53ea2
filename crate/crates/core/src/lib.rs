//! Finite-automaton toolkit for checking whether distributed supervisory
//! control survives communication delay.

pub mod abstraction;
pub mod blocking;
pub mod error;
pub mod event;
pub mod generator;
pub mod language;
pub mod minimize;
pub mod ops;
pub mod robustness;
pub mod synthesis;

pub use error::AutomataError;
pub use event::{format_string, Alphabet, Event};
pub use generator::{Generator, Label, NondetGenerator, StateId};
pub use minimize::{isomorphic, isomorphism, minimize};
pub use ops::{mark_all, relabel, sync, trim};
pub use synthesis::{supcon, LocalController, PlantModel};
