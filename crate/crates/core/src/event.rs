use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::AutomataError;

/// An integer event label.
///
/// Labels follow the usual TCT convention: odd labels are controllable and
/// even labels uncontrollable, unless an [`Alphabet`] says otherwise.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Event(pub u32);

impl Event {
    pub fn parity_controllable(self) -> bool {
        self.0 % 2 == 1
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Event {
    fn from(v: u32) -> Self {
        Event(v)
    }
}

/// Formats a string of events the way TCT prints them: `11.12.13`.
/// The empty string is printed as `ε`.
pub fn format_string(s: &[Event]) -> String {
    if s.is_empty() {
        return "ε".to_string();
    }
    s.iter()
        .map(|e| e.0.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

/// Builds an event string from raw labels.
pub fn events(labels: &[u32]) -> Vec<Event> {
    labels.iter().copied().map(Event).collect()
}

/// Event set with controllability status and signal-event pairing.
///
/// `signals` maps a signal event `r'` to the channeled event `r` it stands
/// for. Keying by the signal keeps the map well defined when one event is
/// channeled to several recipients under different signal labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    events: BTreeSet<Event>,
    controllable: BTreeSet<Event>,
    signals: BTreeMap<Event, Event>,
}

impl Alphabet {
    /// Alphabet whose controllability follows label parity.
    pub fn with_parity<I: IntoIterator<Item = Event>>(events: I) -> Self {
        let events: BTreeSet<Event> = events.into_iter().collect();
        let controllable = events
            .iter()
            .copied()
            .filter(|e| e.parity_controllable())
            .collect();
        Alphabet {
            events,
            controllable,
            signals: BTreeMap::new(),
        }
    }

    /// Alphabet with an explicit controllable subset.
    pub fn new<I, J>(events: I, controllable: J) -> Result<Self, AutomataError>
    where
        I: IntoIterator<Item = Event>,
        J: IntoIterator<Item = Event>,
    {
        let events: BTreeSet<Event> = events.into_iter().collect();
        let controllable: BTreeSet<Event> = controllable.into_iter().collect();
        if let Some(e) = controllable.iter().find(|e| !events.contains(e)) {
            return Err(AutomataError::EventNotInAlphabet(*e));
        }
        Ok(Alphabet {
            events,
            controllable,
            signals: BTreeMap::new(),
        })
    }

    pub fn contains(&self, e: Event) -> bool {
        self.events.contains(&e)
    }

    pub fn is_controllable(&self, e: Event) -> bool {
        self.controllable.contains(&e)
    }

    pub fn events(&self) -> &BTreeSet<Event> {
        &self.events
    }

    pub fn controllable(&self) -> &BTreeSet<Event> {
        &self.controllable
    }

    pub fn uncontrollable(&self) -> impl Iterator<Item = Event> + '_ {
        self.events
            .iter()
            .copied()
            .filter(move |e| !self.controllable.contains(e))
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Signal events mapped to the channeled event they report.
    pub fn signals(&self) -> &BTreeMap<Event, Event> {
        &self.signals
    }

    /// Adds `e` with the given status. Fails if `e` is present with the
    /// opposite status.
    pub fn insert(&mut self, e: Event, controllable: bool) -> Result<(), AutomataError> {
        if self.events.contains(&e) {
            if self.controllable.contains(&e) != controllable {
                return Err(AutomataError::ControllabilityConflict(e));
            }
            return Ok(());
        }
        self.events.insert(e);
        if controllable {
            self.controllable.insert(e);
        }
        Ok(())
    }

    pub fn remove(&mut self, e: Event) {
        self.events.remove(&e);
        self.controllable.remove(&e);
        self.signals.remove(&e);
    }

    /// Records `signal` as the channel output of `source`.
    pub fn add_signal_pair(&mut self, source: Event, signal: Event) -> Result<(), AutomataError> {
        if source == signal
            || self.signals.contains_key(&source)
            || self.signals.values().any(|s| *s == signal)
        {
            return Err(AutomataError::SignalPair { origin: source, signal });
        }
        if let Some(prev) = self.signals.get(&signal) {
            if *prev != source {
                return Err(AutomataError::SignalPair { origin: source, signal });
            }
        }
        self.signals.insert(signal, source);
        Ok(())
    }

    /// Union of two alphabets; shared events must agree on controllability.
    pub fn union(&self, other: &Alphabet) -> Result<Alphabet, AutomataError> {
        let mut out = self.clone();
        for &e in &other.events {
            out.insert(e, other.is_controllable(e))?;
        }
        for (&sig, &src) in &other.signals {
            match out.signals.get(&sig) {
                Some(prev) if *prev != src => {
                    return Err(AutomataError::SignalPair {
                        origin: src,
                        signal: sig,
                    })
                }
                _ => {
                    out.signals.insert(sig, src);
                }
            }
        }
        Ok(out)
    }

    /// Copy of this alphabet without the given events.
    pub fn without<'a, I: IntoIterator<Item = &'a Event>>(&self, removed: I) -> Alphabet {
        let mut out = self.clone();
        for e in removed {
            out.remove(*e);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_default() {
        let a = Alphabet::with_parity(events(&[11, 12, 13]));
        assert!(a.is_controllable(Event(11)));
        assert!(!a.is_controllable(Event(12)));
        assert_eq!(a.uncontrollable().collect::<Vec<_>>(), events(&[12]));
    }

    #[test]
    fn explicit_controllable_must_be_subset() {
        assert!(Alphabet::new(events(&[1, 2]), events(&[3])).is_err());
        let a = Alphabet::new(events(&[120, 121]), events(&[120])).unwrap();
        assert!(a.is_controllable(Event(120)));
        assert!(!a.is_controllable(Event(121)));
    }

    #[test]
    fn union_detects_conflict() {
        let a = Alphabet::with_parity(events(&[1, 2]));
        let b = Alphabet::new(events(&[2]), events(&[2])).unwrap();
        assert_eq!(
            a.union(&b).unwrap_err(),
            AutomataError::ControllabilityConflict(Event(2))
        );
    }

    #[test]
    fn signal_pairs_are_injective() {
        let mut a = Alphabet::with_parity(events(&[113]));
        a.add_signal_pair(Event(13), Event(113)).unwrap();
        assert!(a.add_signal_pair(Event(15), Event(113)).is_err());
        // a signal cannot itself be channeled
        assert!(a.add_signal_pair(Event(113), Event(213)).is_err());
    }

    #[test]
    fn string_formatting() {
        assert_eq!(format_string(&events(&[11, 12])), "11.12");
        assert_eq!(format_string(&[]), "ε");
    }
}
