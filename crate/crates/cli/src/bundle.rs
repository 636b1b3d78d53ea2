//! Plain-text project bundles: agents, specifications, optional local
//! controllers, channel presets and event descriptions.
//!
//! ```text
//! # comment
//! option budget 1000000
//! event 11 FEEDER imports new part
//! agent FEEDER
//!   states 2
//!   initial 0
//!   marked 0
//!   0 11 1
//!   1 12 0
//! end
//! local FEEDERLOC for FEEDER
//!   ...
//! end
//! channel 13 to FEEDER
//! preset case2
//!   channel 13 to FEEDER
//!   channel 15 to FEEDER signal 115
//! end
//! preset case6 all
//! ```
//!
//! `supervisor NAME for AGENT` blocks give the controlled behavior of each
//! agent outright. The delay-free reference is then their product, and no
//! controller is localized or selflooped.
//!
//! Inside a generator block, `controllable` lists the controllable events
//! (all others become uncontrollable) and `events` adds alphabet events
//! that label no transition. Without `controllable`, odd labels are
//! controllable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use dsc_core::event::{Alphabet, Event};
use dsc_core::robustness::ChannelSpec;
use dsc_core::synthesis::{LocalController, PlantModel, SynthesisError};
use dsc_core::Generator;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("no agent named {0}")]
    UnknownAgent(String),
    #[error("event {0} belongs to no agent")]
    UnownedEvent(Event),
    #[error("no preset named {0}")]
    UnknownPreset(String),
    #[error("agent {0} has more than one local controller")]
    DuplicateLocal(String),
    #[error("agent {0} has more than one supervisor")]
    DuplicateSupervisor(String),
    #[error("agent {0} has no supervisor")]
    MissingSupervisor(String),
    #[error("bad channel list entry {0:?}; expected EVENT:AGENT or EVENT:AGENT:SIGNAL")]
    BadChannel(String),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedGenerator {
    pub name: String,
    pub generator: Generator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDecl {
    pub name: String,
    pub agent: String,
    pub generator: Generator,
}

/// A channel as written in a bundle; the sending agent is the owner of
/// the event and the signal defaults to the conventional label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelDecl {
    pub event: Event,
    pub recipient: String,
    pub signal: Option<Event>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresetChannels {
    /// Every event imported by some local controller.
    All,
    List(Vec<ChannelDecl>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preset {
    pub name: String,
    pub channels: PresetChannels,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub budget: Option<usize>,
    pub depth: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bundle {
    pub options: Options,
    pub events: BTreeMap<Event, String>,
    pub agents: Vec<NamedGenerator>,
    pub specs: Vec<NamedGenerator>,
    pub locals: Vec<LocalDecl>,
    /// Controlled agent behaviors given outright.
    pub supervisors: Vec<LocalDecl>,
    pub channels: Vec<ChannelDecl>,
    pub presets: Vec<Preset>,
}

impl Bundle {
    pub fn model(&self) -> Result<PlantModel, BundleError> {
        Ok(PlantModel::new(
            self.agents.iter().map(|a| a.generator.clone()).collect(),
            self.specs.iter().map(|s| s.generator.clone()).collect(),
        )?)
    }

    pub fn agent_index(&self, name: &str) -> Result<usize, BundleError> {
        self.agents
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| BundleError::UnknownAgent(name.to_string()))
    }

    pub fn preset(&self, name: &str) -> Result<&Preset, BundleError> {
        self.presets
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| BundleError::UnknownPreset(name.to_string()))
    }

    fn owner_of(&self, e: Event) -> Option<usize> {
        self.agents
            .iter()
            .position(|a| a.generator.alphabet().contains(e))
    }

    pub fn resolve_channel(&self, c: &ChannelDecl) -> Result<ChannelSpec, BundleError> {
        let source = self.owner_of(c.event).ok_or(BundleError::UnownedEvent(c.event))?;
        let recipient = self.agent_index(&c.recipient)?;
        let mut spec = ChannelSpec::new(source, c.event, recipient);
        if let Some(s) = c.signal {
            spec.signal = s;
        }
        Ok(spec)
    }

    pub fn resolve_channels(&self, cs: &[ChannelDecl]) -> Result<Vec<ChannelSpec>, BundleError> {
        cs.iter().map(|c| self.resolve_channel(c)).collect()
    }

    /// Local controllers declared in the bundle, one per agent in agent
    /// order, or `None` when there are none. Agents without a declared
    /// controller get one that restricts nothing.
    pub fn local_controllers(
        &self,
        model: &PlantModel,
    ) -> Result<Option<Vec<LocalController>>, BundleError> {
        if self.locals.is_empty() {
            return Ok(None);
        }
        let mut slots: Vec<Option<Generator>> = vec![None; self.agents.len()];
        for l in &self.locals {
            let i = self.agent_index(&l.agent)?;
            if slots[i].replace(l.generator.clone()).is_some() {
                return Err(BundleError::DuplicateLocal(l.agent.clone()));
            }
        }
        let trivial = || Generator::new(Alphabet::default(), 1, 0, &[0], []).unwrap();
        let locals = slots
            .into_iter()
            .enumerate()
            .map(|(i, g)| LocalController::new(g.unwrap_or_else(trivial), i, model))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(locals))
    }

    /// Declared controlled behaviors, one per agent in agent order, or
    /// `None` when the bundle has none.
    pub fn controlled_agents(&self) -> Result<Option<Vec<Generator>>, BundleError> {
        if self.supervisors.is_empty() {
            return Ok(None);
        }
        let mut slots: Vec<Option<Generator>> = vec![None; self.agents.len()];
        for s in &self.supervisors {
            let i = self.agent_index(&s.agent)?;
            if slots[i].replace(s.generator.clone()).is_some() {
                return Err(BundleError::DuplicateSupervisor(s.agent.clone()));
            }
        }
        slots
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.ok_or_else(|| BundleError::MissingSupervisor(self.agents[i].name.clone())))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    /// Name of the local controller for agent `i`.
    pub fn local_name(&self, i: usize) -> String {
        let agent = &self.agents[i].name;
        self.locals
            .iter()
            .find(|l| &l.agent == agent)
            .map(|l| l.name.clone())
            .unwrap_or_else(|| format!("{agent}LOC"))
    }
}

/// Parses `EVENT:AGENT[:SIGNAL]` items separated by commas.
pub fn parse_channel_list(s: &str) -> Result<Vec<ChannelDecl>, BundleError> {
    s.split(',')
        .map(str::trim)
        .filter(|item| !item.is_empty())
        .map(|item| {
            let bad = || BundleError::BadChannel(item.to_string());
            let parts: Vec<&str> = item.split(':').collect();
            if !(2..=3).contains(&parts.len()) || parts[1].is_empty() {
                return Err(bad());
            }
            let event = parts[0].parse().map(Event).map_err(|_| bad())?;
            let signal = match parts.get(2) {
                Some(p) => Some(p.parse().map(Event).map_err(|_| bad())?),
                None => None,
            };
            Ok(ChannelDecl {
                event,
                recipient: parts[1].to_string(),
                signal,
            })
        })
        .collect()
}

struct Lines<'a> {
    iter: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with comments stripped, numbered from 1.
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.iter.by_ref() {
            let text = raw.split('#').next().unwrap_or("");
            let words: Vec<&str> = text.split_whitespace().collect();
            if !words.is_empty() {
                return Some((i + 1, words));
            }
        }
        None
    }
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn number<T: std::str::FromStr>(line: usize, word: &str, what: &str) -> Result<T, ParseError> {
    word.parse()
        .or_else(|_| err(line, format!("expected {what}, found {word:?}")))
}

fn numbers<T: std::str::FromStr>(line: usize, words: &[&str], what: &str) -> Result<Vec<T>, ParseError> {
    words.iter().map(|w| number(line, w, what)).collect()
}

fn expect_args(line: usize, words: &[&str], n: usize) -> Result<(), ParseError> {
    if words.len() != n + 1 {
        return err(
            line,
            format!("{} takes {n} argument{}", words[0], if n == 1 { "" } else { "s" }),
        );
    }
    Ok(())
}

/// Reads a generator block up to its `end` line. `header` is the line of
/// the block keyword.
fn parse_generator(lines: &mut Lines, header: usize) -> Result<Generator, ParseError> {
    let mut states: Option<(usize, usize)> = None;
    let mut initial: Option<(usize, usize)> = None;
    let mut marked: Vec<(usize, usize)> = Vec::new();
    let mut controllable: Option<(usize, Vec<Event>)> = None;
    let mut extra: Vec<(usize, Event)> = Vec::new();
    let mut trans: Vec<(usize, usize, Event, usize)> = Vec::new();
    loop {
        let Some((line, words)) = lines.next() else {
            return err(header, "block is missing its `end`");
        };
        match words[0] {
            "end" => {
                expect_args(line, &words, 0)?;
                break;
            }
            "states" => {
                expect_args(line, &words, 1)?;
                if states.is_some() {
                    return err(line, "duplicate `states`");
                }
                states = Some((line, number(line, words[1], "a state count")?));
            }
            "initial" => {
                expect_args(line, &words, 1)?;
                if initial.is_some() {
                    return err(line, "duplicate `initial`");
                }
                initial = Some((line, number(line, words[1], "a state")?));
            }
            "marked" => {
                for q in numbers::<usize>(line, &words[1..], "a state")? {
                    marked.push((line, q));
                }
            }
            "controllable" => {
                if controllable.is_some() {
                    return err(line, "duplicate `controllable`");
                }
                let es = numbers::<u32>(line, &words[1..], "an event")?;
                controllable = Some((line, es.into_iter().map(Event).collect()));
            }
            "events" => {
                for e in numbers::<u32>(line, &words[1..], "an event")? {
                    extra.push((line, Event(e)));
                }
            }
            w if w.starts_with(|c: char| c.is_ascii_digit()) => {
                if words.len() != 3 {
                    return err(line, "a transition is `FROM EVENT TO`");
                }
                let from = number(line, words[0], "a state")?;
                let ev = number(line, words[1], "an event")?;
                let to = number(line, words[2], "a state")?;
                trans.push((line, from, Event(ev), to));
            }
            w => return err(line, format!("unknown keyword {w:?} in generator block")),
        }
    }
    let Some((_, n)) = states else {
        return err(header, "generator has no `states` line");
    };
    let check = |line: usize, q: usize| {
        if q >= n {
            err(line, format!("state {q} out of range (generator has {n} states)"))
        } else {
            Ok(())
        }
    };
    let init = match initial {
        Some((line, q)) => {
            check(line, q)?;
            q
        }
        None => 0,
    };
    for &(line, q) in &marked {
        check(line, q)?;
    }
    let mut events: BTreeSet<Event> = extra.iter().map(|e| e.1).collect();
    let mut seen: BTreeMap<(usize, Event), usize> = BTreeMap::new();
    for &(line, from, ev, to) in &trans {
        check(line, from)?;
        check(line, to)?;
        if let Some(prev) = seen.insert((from, ev), line) {
            return err(
                line,
                format!("state {from} already has a transition on event {ev} (line {prev})"),
            );
        }
        events.insert(ev);
    }
    let alphabet = match controllable {
        None => Alphabet::with_parity(events),
        Some((line, cs)) => {
            if let Some(e) = cs.iter().find(|e| !events.contains(e)) {
                return err(line, format!("controllable event {e} is not in the alphabet"));
            }
            Alphabet::new(events, cs).expect("controllable subset checked")
        }
    };
    let marked: Vec<usize> = marked.iter().map(|m| m.1).collect();
    Generator::new(
        alphabet,
        n,
        init,
        &marked,
        trans.iter().map(|&(_, a, e, b)| (a, e, b)),
    )
    .or_else(|e| err(header, e.to_string()))
}

fn parse_channel(line: usize, words: &[&str]) -> Result<ChannelDecl, ParseError> {
    // channel EVENT to AGENT [signal SIGNAL]
    let ok_shape = (words.len() == 4 || words.len() == 6)
        && words[2] == "to"
        && (words.len() == 4 || words[4] == "signal");
    if !ok_shape {
        return err(line, "a channel is `channel EVENT to AGENT [signal SIGNAL]`");
    }
    Ok(ChannelDecl {
        event: Event(number(line, words[1], "an event")?),
        recipient: words[3].to_string(),
        signal: match words.get(5) {
            Some(w) => Some(Event(number(line, w, "a signal event")?)),
            None => None,
        },
    })
}

fn check_name(
    line: usize,
    name: &str,
    names: &mut BTreeMap<String, usize>,
) -> Result<(), ParseError> {
    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return err(line, format!("invalid name {name:?}"));
    }
    if let Some(prev) = names.insert(name.to_string(), line) {
        return err(line, format!("name {name} already used on line {prev}"));
    }
    Ok(())
}

/// Parses and validates a bundle. Every error carries the line it refers
/// to.
pub fn parse_bundle(text: &str) -> Result<Bundle, ParseError> {
    parse_with_base(text, None)
}

/// Parses a file of `local` blocks whose agents are declared in `base`.
pub fn parse_locals(text: &str, base: &Bundle) -> Result<Vec<LocalDecl>, ParseError> {
    let b = parse_with_base(text, Some(base))?;
    if let Some((line, _)) = first_line_of_non_local(text) {
        return err(line, "a controller file may only contain `local` blocks");
    }
    Ok(b.locals)
}

fn first_line_of_non_local(text: &str) -> Option<(usize, String)> {
    let mut lines = Lines {
        iter: text.lines().enumerate().peekable(),
    };
    let mut depth = 0;
    while let Some((line, words)) = lines.next() {
        match (depth, words[0]) {
            (0, "local") => depth = 1,
            (0, w) => return Some((line, w.to_string())),
            (_, "end") => depth = 0,
            _ => {}
        }
    }
    None
}

fn parse_with_base(text: &str, base: Option<&Bundle>) -> Result<Bundle, ParseError> {
    let mut lines = Lines {
        iter: text.lines().enumerate().peekable(),
    };
    let mut b = Bundle::default();
    let mut names = BTreeMap::new();
    let mut preset_names = BTreeMap::new();
    // (line, recipient name) of every channel and local, checked at the end
    let mut agent_refs: Vec<(usize, String)> = Vec::new();
    let mut event_refs: Vec<(usize, Event)> = Vec::new();
    while let Some((line, words)) = lines.next() {
        match words[0] {
            "agent" | "spec" => {
                expect_args(line, &words, 1)?;
                check_name(line, words[1], &mut names)?;
                let generator = parse_generator(&mut lines, line)?;
                let named = NamedGenerator {
                    name: words[1].to_string(),
                    generator,
                };
                if words[0] == "agent" {
                    if let Some(e) = named.generator.alphabet().events().iter().find(|e| {
                        b.agents
                            .iter()
                            .any(|a| a.generator.alphabet().contains(**e))
                    }) {
                        return err(line, format!("event {e} already belongs to another agent"));
                    }
                    b.agents.push(named);
                } else {
                    b.specs.push(named);
                }
            }
            "local" | "supervisor" => {
                if words.len() != 4 || words[2] != "for" {
                    return err(line, format!("expected `{} NAME for AGENT`", words[0]));
                }
                check_name(line, words[1], &mut names)?;
                agent_refs.push((line, words[3].to_string()));
                let generator = parse_generator(&mut lines, line)?;
                let decl = LocalDecl {
                    name: words[1].to_string(),
                    agent: words[3].to_string(),
                    generator,
                };
                if words[0] == "local" {
                    b.locals.push(decl);
                } else {
                    b.supervisors.push(decl);
                }
            }
            "event" => {
                if words.len() < 3 {
                    return err(line, "an event description is `event LABEL TEXT`");
                }
                let e = Event(number(line, words[1], "an event")?);
                if b.events.insert(e, words[2..].join(" ")).is_some() {
                    return err(line, format!("event {e} described twice"));
                }
            }
            "channel" => {
                let c = parse_channel(line, &words)?;
                agent_refs.push((line, c.recipient.clone()));
                event_refs.push((line, c.event));
                b.channels.push(c);
            }
            "preset" => {
                if words.len() < 2 || words.len() > 3 || (words.len() == 3 && words[2] != "all") {
                    return err(line, "a preset is `preset NAME` or `preset NAME all`");
                }
                check_name(line, words[1], &mut preset_names)?;
                let channels = if words.len() == 3 {
                    PresetChannels::All
                } else {
                    let mut list = Vec::new();
                    loop {
                        let Some((l, ws)) = lines.next() else {
                            return err(line, "preset is missing its `end`");
                        };
                        match ws[0] {
                            "end" => {
                                expect_args(l, &ws, 0)?;
                                break;
                            }
                            "channel" => {
                                let c = parse_channel(l, &ws)?;
                                agent_refs.push((l, c.recipient.clone()));
                                event_refs.push((l, c.event));
                                list.push(c);
                            }
                            w => return err(l, format!("unknown keyword {w:?} in preset")),
                        }
                    }
                    PresetChannels::List(list)
                };
                b.presets.push(Preset {
                    name: words[1].to_string(),
                    channels,
                });
            }
            "option" => {
                expect_args(line, &words, 2)?;
                let v = number(line, words[2], "a number")?;
                match words[1] {
                    "budget" => b.options.budget = Some(v),
                    "depth" => b.options.depth = Some(v),
                    w => return err(line, format!("unknown option {w:?}")),
                }
            }
            w => return err(line, format!("unknown keyword {w:?}")),
        }
    }
    let known = |name: &str| {
        b.agents.iter().chain(base.iter().flat_map(|x| &x.agents)).any(|a| a.name == name)
    };
    for (line, name) in agent_refs {
        if !known(&name) {
            return err(line, format!("no agent named {name}"));
        }
    }
    for (line, e) in event_refs {
        if b.owner_of(e).is_none() && base.is_none_or(|x| x.owner_of(e).is_none()) {
            return err(line, format!("event {e} belongs to no agent"));
        }
    }
    Ok(b)
}

fn write_generator(out: &mut String, g: &Generator) {
    let a = g.alphabet();
    writeln!(out, "  states {}", g.num_states()).unwrap();
    if let Some(q) = g.initial() {
        if q != 0 {
            writeln!(out, "  initial {q}").unwrap();
        }
    }
    let marked: Vec<String> = g.marked_states().map(|q| q.to_string()).collect();
    if !marked.is_empty() {
        writeln!(out, "  marked {}", marked.join(" ")).unwrap();
    }
    let parity = a.events().iter().all(|e| a.is_controllable(*e) == e.parity_controllable());
    if !parity {
        let cs: Vec<String> = a.controllable().iter().map(|e| e.to_string()).collect();
        writeln!(out, "  controllable {}", cs.join(" ")).unwrap();
    }
    let used = g.events_used();
    let unused: Vec<String> = a
        .events()
        .iter()
        .filter(|e| !used.contains(e))
        .map(|e| e.to_string())
        .collect();
    if !unused.is_empty() {
        writeln!(out, "  events {}", unused.join(" ")).unwrap();
    }
    for (p, e, q) in g.transitions() {
        writeln!(out, "  {p} {e} {q}").unwrap();
    }
    out.push_str("end\n");
}

fn write_channel(out: &mut String, indent: &str, c: &ChannelDecl) {
    write!(out, "{indent}channel {} to {}", c.event, c.recipient).unwrap();
    if let Some(s) = c.signal {
        write!(out, " signal {s}").unwrap();
    }
    out.push('\n');
}

/// Writes one `local` block per controller.
pub fn serialize_locals(names: &[(String, String)], gens: &[&Generator]) -> String {
    let mut out = String::new();
    for ((name, agent), g) in names.iter().zip(gens) {
        writeln!(out, "local {name} for {agent}").unwrap();
        write_generator(&mut out, g);
    }
    out
}

/// Canonical text of a bundle; parsing it gives back an equal bundle.
pub fn serialize_bundle(b: &Bundle) -> String {
    let mut out = String::new();
    if let Some(v) = b.options.budget {
        writeln!(out, "option budget {v}").unwrap();
    }
    if let Some(v) = b.options.depth {
        writeln!(out, "option depth {v}").unwrap();
    }
    for (e, text) in &b.events {
        writeln!(out, "event {e} {text}").unwrap();
    }
    for a in &b.agents {
        writeln!(out, "agent {}", a.name).unwrap();
        write_generator(&mut out, &a.generator);
    }
    for s in &b.specs {
        writeln!(out, "spec {}", s.name).unwrap();
        write_generator(&mut out, &s.generator);
    }
    for l in &b.locals {
        writeln!(out, "local {} for {}", l.name, l.agent).unwrap();
        write_generator(&mut out, &l.generator);
    }
    for l in &b.supervisors {
        writeln!(out, "supervisor {} for {}", l.name, l.agent).unwrap();
        write_generator(&mut out, &l.generator);
    }
    for c in &b.channels {
        write_channel(&mut out, "", c);
    }
    for p in &b.presets {
        match &p.channels {
            PresetChannels::All => writeln!(out, "preset {} all", p.name).unwrap(),
            PresetChannels::List(list) => {
                writeln!(out, "preset {}", p.name).unwrap();
                for c in list {
                    write_channel(&mut out, "  ", c);
                }
                out.push_str("end\n");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# two agents
event 11 first agent starts
agent A
  states 2
  marked 0
  0 11 1
  1 12 0
end
agent B
  states 1
  marked 0
  controllable 14
  0 13 0
  0 14 0
end
channel 12 to B
preset p
  channel 12 to B signal 912
end
preset everything all
";

    #[test]
    fn parses_small_bundle() {
        let b = parse_bundle(SMALL).unwrap();
        assert_eq!(b.agents.len(), 2);
        assert_eq!(b.agents[0].generator.size(), (2, 2));
        let bg = &b.agents[1].generator;
        assert!(bg.alphabet().is_controllable(Event(14)));
        assert!(!bg.alphabet().is_controllable(Event(13)));
        assert_eq!(b.events[&Event(11)], "first agent starts");
        let spec = b.resolve_channel(&b.channels[0]).unwrap();
        assert_eq!((spec.source_agent, spec.recipient, spec.signal), (0, 1, Event(212)));
        let PresetChannels::List(l) = &b.preset("p").unwrap().channels else {
            panic!()
        };
        assert_eq!(b.resolve_channel(&l[0]).unwrap().signal, Event(912));
    }

    #[test]
    fn round_trip() {
        let b = parse_bundle(SMALL).unwrap();
        let text = serialize_bundle(&b);
        assert_eq!(parse_bundle(&text).unwrap(), b);
        assert_eq!(serialize_bundle(&parse_bundle(&text).unwrap()), text);
    }

    #[test]
    fn epsilon_generator() {
        let b = parse_bundle("spec E\n states 1\n marked 0\nend\n").unwrap();
        let g = &b.specs[0].generator;
        assert_eq!(g.size(), (1, 0));
        assert!(g.accepts_marked(&[]));
    }

    fn line_of(text: &str) -> usize {
        parse_bundle(text).unwrap_err().line
    }

    #[test]
    fn errors_point_at_the_line() {
        assert_eq!(line_of("agent A\n states 2\n 0 11\nend\n"), 3);
        assert_eq!(line_of("agent A\n states 2\n 0 11 1\n\n 0 11 0\nend\n"), 5);
        assert_eq!(line_of("agent A\n states 2\n 0 11 7\nend\n"), 3);
        assert_eq!(line_of("agent A\n states 1\n controllable 3\n 0 11 0\nend\n"), 3);
        assert_eq!(line_of("agent A\n states 1\n 0 11 0\nend\nchannel 99 to A\n"), 5);
        assert_eq!(line_of("agent A\n states 1\n 0 11 0\nend\nchannel 11 to Z\n"), 5);
        assert_eq!(line_of("agent A\n states 1\n"), 1);
        assert_eq!(line_of("# x\nbogus\n"), 2);
        assert_eq!(line_of("agent A\n states 1\nend\nspec A\n states 1\nend\n"), 4);
    }

    #[test]
    fn controller_files_resolve_against_base() {
        let base = parse_bundle(SMALL).unwrap();
        let ls = parse_locals("local L for B\n states 1\n marked 0\n 0 12 0\nend\n", &base).unwrap();
        assert_eq!(ls[0].agent, "B");
        assert_eq!(
            parse_locals("local L for Q\n states 1\nend\n", &base).unwrap_err().line,
            1
        );
        assert_eq!(
            parse_locals("local L for B\n states 1\nend\nchannel 12 to B\n", &base)
                .unwrap_err()
                .line,
            4
        );
    }

    #[test]
    fn channel_lists() {
        let cs = parse_channel_list("13:FEEDER, 15:FEEDER:715").unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[1].signal, Some(Event(715)));
        assert!(parse_channel_list("13").is_err());
        assert!(parse_channel_list("x:FEEDER").is_err());
    }
}
