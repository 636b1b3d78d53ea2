use thiserror::Error;

use crate::event::Event;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("state {state} out of range (generator has {states} states)")]
    StateOutOfRange { state: usize, states: usize },
    #[error("event {0} is not in the alphabet")]
    EventNotInAlphabet(Event),
    #[error("nondeterministic transition: state {state} has two targets on event {event}")]
    Nondeterministic { state: usize, event: Event },
    #[error("event {0} has conflicting controllability status")]
    ControllabilityConflict(Event),
    #[error("relabel target {0} collides with an existing event")]
    RelabelCollision(Event),
    #[error("relabel map is not injective on target {0}")]
    RelabelNotInjective(Event),
    #[error("invalid signal pairing {origin} -> {signal}")]
    SignalPair { origin: Event, signal: Event },
    #[error("subset construction exceeded the state budget of {budget}")]
    BudgetExceeded { budget: usize },
    #[error("synchronous product of an empty component list")]
    NoComponents,
}
