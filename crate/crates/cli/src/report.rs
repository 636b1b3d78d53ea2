//! Machine-readable verification report and its text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Size {
    pub states: usize,
    pub transitions: usize,
}

impl From<(usize, usize)> for Size {
    fn from((states, transitions): (usize, usize)) -> Self {
        Size {
            states,
            transitions,
        }
    }
}

impl std::fmt::Display for Size {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.states, self.transitions)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupervisorSection {
    pub plant: Size,
    pub spec: Size,
    pub supervisor: Size,
    pub nonblocking: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSection {
    pub name: String,
    pub agent: String,
    pub size: Size,
    pub imports: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControllersSection {
    /// `bundle` when read from the input, `localized` when computed.
    pub source: String,
    pub control_equivalent: bool,
    pub locals: Vec<LocalSection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSection {
    pub event: u32,
    pub from: String,
    pub to: String,
    pub signal: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleSection {
    pub kind: String,
    pub string: Vec<u32>,
    pub projection: Vec<u32>,
    pub continuation: Vec<u32>,
    pub completion: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobustnessSection {
    pub robust: bool,
    pub channeled: Size,
    pub quotient: Option<Size>,
    pub failure: Option<String>,
    pub counterexample: Option<CounterexampleSection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingSection {
    pub event: u32,
    pub signal: u32,
    pub to: String,
    pub classification: String,
    pub blocked: bool,
    pub witness: Option<Vec<u32>>,
    pub delay_bound: Option<usize>,
    pub fault_admissible: Option<bool>,
    pub fault_certificate: Option<Vec<u32>>,
    pub fault_depth: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub synthesis: SupervisorSection,
    pub controllers: Option<ControllersSection>,
    pub channels: Vec<ChannelSection>,
    pub robustness: Option<RobustnessSection>,
    pub blocking: Vec<BlockingSection>,
    /// Descriptions of the events that appear in the report.
    pub annotations: BTreeMap<u32, String>,
    pub passed: bool,
    pub timing_ms: BTreeMap<String, f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }

    /// Copy without timing, for comparing runs.
    pub fn without_timing(&self) -> Report {
        Report {
            timing_ms: BTreeMap::new(),
            ..self.clone()
        }
    }
}

pub fn dotted(s: &[u32]) -> String {
    if s.is_empty() {
        return "ε".to_string();
    }
    s.iter().map(u32::to_string).collect::<Vec<_>>().join(".")
}

/// Short human-readable summary.
pub fn summary(r: &Report) -> String {
    let mut out = String::new();
    let s = &r.synthesis;
    writeln!(
        out,
        "plant {}  spec {}  supervisor {}{}",
        s.plant,
        s.spec,
        s.supervisor,
        if s.nonblocking { "" } else { "  BLOCKING" }
    )
    .unwrap();
    if let Some(c) = &r.controllers {
        writeln!(
            out,
            "controllers ({}){}",
            c.source,
            if c.control_equivalent {
                ""
            } else {
                "  NOT control-equivalent"
            }
        )
        .unwrap();
        for l in &c.locals {
            writeln!(out, "  {} for {}: {} imports {:?}", l.name, l.agent, l.size, l.imports).unwrap();
        }
    }
    if !r.channels.is_empty() {
        let cs: Vec<String> = r
            .channels
            .iter()
            .map(|c| format!("{}:{}->{} as {}", c.event, c.from, c.to, c.signal))
            .collect();
        writeln!(out, "channels {}", cs.join(", ")).unwrap();
    }
    if let Some(rb) = &r.robustness {
        write!(out, "channeled {}", rb.channeled).unwrap();
        if let Some(q) = rb.quotient {
            write!(out, "  quotient {q}").unwrap();
        }
        writeln!(out).unwrap();
        if rb.robust {
            writeln!(out, "verdict: delay-robust").unwrap();
        } else {
            writeln!(out, "verdict: delay-critical").unwrap();
            if let Some(f) = &rb.failure {
                writeln!(out, "  {f}").unwrap();
            }
            if let Some(c) = &rb.counterexample {
                writeln!(out, "  string     {}", dotted(&c.string)).unwrap();
                writeln!(out, "  projection {}", dotted(&c.projection)).unwrap();
                if !c.continuation.is_empty() {
                    writeln!(out, "  missing    {}", dotted(&c.continuation)).unwrap();
                }
                if let Some(k) = &c.completion {
                    writeln!(out, "  completion {}", dotted(k)).unwrap();
                }
            }
        }
    }
    for b in &r.blocking {
        write!(out, "event {} -> {}: {}", b.event, b.to, b.classification).unwrap();
        if let Some(w) = &b.witness {
            write!(out, "  witness {}", dotted(w)).unwrap();
        }
        if let Some(n) = b.delay_bound {
            write!(out, "  bound {n}").unwrap();
        }
        match b.fault_admissible {
            Some(true) => write!(out, "  faults admissible").unwrap(),
            Some(false) => write!(out, "  FAULT NOT ADMISSIBLE").unwrap(),
            None => {}
        }
        writeln!(out).unwrap();
    }
    writeln!(out, "{}", if r.passed { "PASS" } else { "FAIL" }).unwrap();
    out
}

fn describe(r: &Report, e: u32) -> String {
    if let Some(d) = r.annotations.get(&e) {
        return d.clone();
    }
    if let Some(c) = r.channels.iter().find(|c| c.signal == e) {
        let base = r
            .annotations
            .get(&c.event)
            .map(|d| format!(": {d}"))
            .unwrap_or_default();
        return format!("{} learns of {}{base}", c.to, c.event);
    }
    String::new()
}

fn annotate(out: &mut String, r: &Report, title: &str, s: &[u32]) {
    writeln!(out, "{title} {}", dotted(s)).unwrap();
    for &e in s {
        let d = describe(r, e);
        if d.is_empty() {
            writeln!(out, "  {e}").unwrap();
        } else {
            writeln!(out, "  {e:<5} {d}").unwrap();
        }
    }
}

/// Walks through each counterexample and witness event by event, using
/// the report's event descriptions.
pub fn explain(r: &Report) -> String {
    let mut out = String::new();
    if let Some(c) = r.robustness.as_ref().and_then(|rb| rb.counterexample.as_ref()) {
        writeln!(out, "delay-critical: {}", c.kind).unwrap();
        annotate(&mut out, r, "string", &c.string);
        if !c.continuation.is_empty() {
            annotate(&mut out, r, "unrealizable continuation", &c.continuation);
        }
        if let Some(k) = &c.completion {
            if !k.is_empty() {
                annotate(&mut out, r, "then", k);
            }
        }
    }
    for b in &r.blocking {
        if let Some(w) = &b.witness {
            if !out.is_empty() {
                out.push('\n');
            }
            writeln!(out, "event {} blocked by its channel to {}", b.event, b.to).unwrap();
            annotate(&mut out, r, "witness", w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_explains_to_nothing() {
        assert_eq!(explain(&Report::default()), "");
    }

    #[test]
    fn json_round_trip() {
        let mut r = Report::default();
        r.annotations.insert(11, "start".into());
        r.timing_ms.insert("synthesis".into(), 1.5);
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn signals_are_described_through_their_event() {
        let mut r = Report::default();
        r.annotations.insert(13, "robot takes part".into());
        r.channels.push(ChannelSection {
            event: 13,
            from: "ROBOT".into(),
            to: "FEEDER".into(),
            signal: 113,
        });
        assert_eq!(describe(&r, 113), "FEEDER learns of 13: robot takes part");
    }
}
