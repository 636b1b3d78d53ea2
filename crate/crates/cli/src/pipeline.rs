//! Synthesis, localization, channeling and the robustness and blocking
//! checks, run in sequence over a bundle.

use std::collections::BTreeSet;
use std::time::Instant;

use dsc_core::abstraction::default_budget;
use dsc_core::blocking::{analyze_channel, default_fault_depth};
use dsc_core::robustness::{
    all_imports, build_channeled, check_delay_robustness_with_budget, ChannelSpec,
    ChanneledSystem, Verdict,
};
use dsc_core::synthesis::{control_equivalent, localize, nonblocking, supcon, LocalController, PlantModel};
use dsc_core::{isomorphic, minimize, sync, Event, Generator};
use thiserror::Error;

use crate::bundle::{
    parse_channel_list, Bundle, BundleError, ChannelDecl, LocalDecl, PresetChannels,
};
use crate::report::{
    BlockingSection, ChannelSection, ControllersSection, CounterexampleSection, LocalSection,
    Report, RobustnessSection, SupervisorSection,
};

#[derive(Debug, Error)]
#[error("{stage}: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub message: String,
}

fn stage<E: std::fmt::Display>(stage: &'static str) -> impl Fn(E) -> PipelineError {
    move |e| PipelineError {
        stage,
        message: e.to_string(),
    }
}

/// Which channels to install.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ChannelSelection {
    /// The bundle's top-level `channel` lines.
    #[default]
    Bundle,
    /// Every imported event of every local controller.
    All,
    Preset(String),
    List(Vec<ChannelDecl>),
}

impl ChannelSelection {
    /// `all`, a preset name, or a list such as `13:FEEDER,15:FEEDER`.
    pub fn parse(s: &str) -> Result<ChannelSelection, BundleError> {
        let s = s.trim();
        if s == "all" {
            Ok(ChannelSelection::All)
        } else if s.contains(':') {
            Ok(ChannelSelection::List(parse_channel_list(s)?))
        } else {
            Ok(ChannelSelection::Preset(s.to_string()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checks {
    pub robustness: bool,
    pub blocking: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            robustness: true,
            blocking: true,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct PipelineOptions {
    pub channels: ChannelSelection,
    pub budget: Option<usize>,
    /// Search depth for fault admissibility.
    pub depth: Option<usize>,
    /// Controllers replacing the bundle's own or localization's.
    pub locals: Option<Vec<LocalDecl>>,
    pub checks: Checks,
}

/// Intermediate results, for callers that want more than the report.
pub struct Run {
    pub model: PlantModel,
    pub plant: Generator,
    pub sup: Generator,
    pub locals: Vec<LocalController>,
    pub controlled: Vec<Generator>,
    pub channels: Vec<ChannelSpec>,
    pub system: Option<ChanneledSystem>,
    pub verdict: Option<Verdict>,
    pub report: Report,
}

/// Monolithic supervisor of the bundle: the supremal controllable
/// sublanguage when there are specifications, otherwise the product of the
/// declared supervisors.
pub fn synthesize(bundle: &Bundle) -> Result<(PlantModel, Generator, Generator, Report), PipelineError> {
    let t = Instant::now();
    let model = bundle.model().map_err(stage("model"))?;
    let plant = model.plant().map_err(stage("synthesis"))?;
    let spec = model.spec().map_err(stage("synthesis"))?;
    let given = bundle.controlled_agents().map_err(stage("synthesis"))?;
    let sup = match given {
        Some(sups) if bundle.specs.is_empty() => {
            sync(&sups.iter().collect::<Vec<_>>()).map_err(stage("synthesis"))?
        }
        _ => supcon(&plant, &spec).map_err(stage("synthesis"))?,
    };
    let mut report = Report {
        synthesis: SupervisorSection {
            plant: plant.size().into(),
            spec: spec.size().into(),
            supervisor: sup.size().into(),
            nonblocking: nonblocking(&sup),
        },
        ..Default::default()
    };
    report.timing_ms.insert("synthesis".into(), ms(t));
    report.passed = !sup.is_empty();
    Ok((model, plant, sup, report))
}

fn ms(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

/// Local controllers (empty when supervisors are given outright) and the
/// controlled behavior of every agent.
#[allow(clippy::type_complexity)]
fn controllers(
    bundle: &Bundle,
    opts: &PipelineOptions,
    model: &PlantModel,
    plant: &Generator,
    sup: &Generator,
) -> Result<(Vec<LocalController>, Vec<Generator>, ControllersSection), PipelineError> {
    let section = |source: &str, equivalent: bool, names: Vec<String>, gens: Vec<(&Generator, BTreeSet<Event>)>| {
        ControllersSection {
            source: source.into(),
            control_equivalent: equivalent,
            locals: gens
                .into_iter()
                .enumerate()
                .map(|(i, (g, imports))| LocalSection {
                    name: names[i].clone(),
                    agent: bundle.agents[i].name.clone(),
                    size: g.size().into(),
                    imports: imports.iter().map(|e| e.0).collect(),
                })
                .collect(),
        }
    };
    if opts.locals.is_none() {
        if let Some(sups) = bundle.controlled_agents().map_err(stage("controllers"))? {
            let joint = sync(&sups.iter().collect::<Vec<_>>()).map_err(stage("controllers"))?;
            let equivalent = isomorphic(&minimize(&joint), &minimize(sup));
            let names = (0..sups.len())
                .map(|i| {
                    let agent = &bundle.agents[i].name;
                    let decl = bundle.supervisors.iter().find(|s| &s.agent == agent);
                    decl.map(|d| d.name.clone()).unwrap_or_default()
                })
                .collect();
            let gens = sups
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let own = model.agents()[i].alphabet();
                    let imports = g.alphabet().events().iter().copied().filter(|e| !own.contains(*e)).collect();
                    (g, imports)
                })
                .collect();
            let sec = section("supervisors", equivalent, names, gens);
            return Ok((Vec::new(), sups, sec));
        }
    }
    let merged;
    let source = match &opts.locals {
        Some(extra) => {
            merged = Bundle {
                locals: extra.clone(),
                ..bundle.clone()
            };
            &merged
        }
        None => bundle,
    };
    let declared = source.local_controllers(model).map_err(stage("controllers"))?;
    let (locals, from_bundle) = match declared {
        Some(l) => (l, true),
        None => (localize(model, sup).map_err(stage("localization"))?, false),
    };
    let equivalent = control_equivalent(&locals, plant, sup);
    let controlled = locals
        .iter()
        .map(|l| l.controlled_agent(model))
        .collect::<Result<Vec<_>, _>>()
        .map_err(stage("controllers"))?;
    let names = (0..locals.len()).map(|i| source.local_name(i)).collect();
    let gens = locals.iter().map(|l| (&l.controller, l.imported.clone())).collect();
    let sec = section(
        if from_bundle { "bundle" } else { "localized" },
        equivalent,
        names,
        gens,
    );
    Ok((locals, controlled, sec))
}

fn select_channels(
    bundle: &Bundle,
    sel: &ChannelSelection,
    controlled: &[Generator],
    model: &PlantModel,
) -> Result<Vec<ChannelSpec>, PipelineError> {
    let resolve = |cs: &[ChannelDecl]| bundle.resolve_channels(cs).map_err(stage("channels"));
    match sel {
        ChannelSelection::Bundle => resolve(&bundle.channels),
        ChannelSelection::All => Ok(all_imports(controlled, model)),
        ChannelSelection::List(cs) => resolve(cs),
        ChannelSelection::Preset(name) => {
            match &bundle.preset(name).map_err(stage("channels"))?.channels {
                PresetChannels::All => Ok(all_imports(controlled, model)),
                PresetChannels::List(cs) => resolve(cs),
            }
        }
    }
}

/// Runs everything the options ask for and assembles the report.
pub fn run_pipeline(bundle: &Bundle, opts: &PipelineOptions) -> Result<Run, PipelineError> {
    let (model, plant, sup, mut report) = synthesize(bundle)?;

    let t = Instant::now();
    let (locals, controlled, section) = controllers(bundle, opts, &model, &plant, &sup)?;
    report.passed &= section.control_equivalent;
    report.controllers = Some(section);
    report.timing_ms.insert("controllers".into(), ms(t));

    let channels = select_channels(bundle, &opts.channels, &controlled, &model)?;
    report.channels = channels
        .iter()
        .map(|c| ChannelSection {
            event: c.event.0,
            from: bundle.agents[c.source_agent].name.clone(),
            to: bundle.agents[c.recipient].name.clone(),
            signal: c.signal.0,
        })
        .collect();

    let mut run = Run {
        model,
        plant,
        sup,
        locals,
        controlled,
        channels,
        system: None,
        verdict: None,
        report,
    };
    if !(opts.checks.robustness || opts.checks.blocking) {
        finish(bundle, &mut run.report);
        return Ok(run);
    }

    let t = Instant::now();
    let system = build_channeled(&run.controlled, &run.channels).map_err(stage("channels"))?;
    run.report.timing_ms.insert("channeling".into(), ms(t));

    if opts.checks.robustness {
        let t = Instant::now();
        let budget = opts.budget.or(bundle.options.budget).unwrap_or_else(default_budget);
        let v = check_delay_robustness_with_budget(&run.sup, &system, budget)
            .map_err(stage("robustness"))?;
        run.report.robustness = Some(RobustnessSection {
            robust: v.robust,
            channeled: v.channeled_size.into(),
            quotient: v.reduced_size.map(Into::into),
            failure: v.failure.as_ref().map(|f| f.to_string()),
            counterexample: v.counterexample.as_ref().map(|c| CounterexampleSection {
                kind: c.kind.to_string(),
                string: raw(&c.string),
                projection: raw(&c.projection),
                continuation: raw(&c.continuation),
                completion: c.completion.as_deref().map(raw),
            }),
        });
        run.report.passed &= v.robust;
        run.report.timing_ms.insert("robustness".into(), ms(t));
        run.verdict = Some(v);
    }

    if opts.checks.blocking {
        let t = Instant::now();
        let depth = opts
            .depth
            .or(bundle.options.depth)
            .unwrap_or_else(|| default_fault_depth(&system));
        for c in &run.channels {
            let a = analyze_channel(&run.sup, &run.plant, &system, c, depth)
                .map_err(stage("blocking"))?;
            let fault = a.fault.as_ref();
            run.report.passed &= fault.is_none_or(|f| f.admissible);
            run.report.blocking.push(BlockingSection {
                event: c.event.0,
                signal: c.signal.0,
                to: bundle.agents[c.recipient].name.clone(),
                classification: a.block.classification.to_string(),
                blocked: a.block.blocked,
                witness: a.block.witness.as_deref().map(raw),
                delay_bound: a.delay_bound,
                fault_admissible: fault.map(|f| f.admissible),
                fault_certificate: fault.and_then(|f| f.certificate.as_deref()).map(raw),
                fault_depth: fault.map(|f| f.depth),
            });
        }
        run.report.timing_ms.insert("blocking".into(), ms(t));
    }
    run.system = Some(system);
    finish(bundle, &mut run.report);
    Ok(run)
}

fn raw(s: &[Event]) -> Vec<u32> {
    s.iter().map(|e| e.0).collect()
}

/// Copies the descriptions of every event mentioned in the report.
fn finish(bundle: &Bundle, report: &mut Report) {
    let mut mentioned: BTreeSet<u32> = BTreeSet::new();
    for c in &report.channels {
        mentioned.insert(c.event);
    }
    if let Some(c) = report.robustness.as_ref().and_then(|r| r.counterexample.as_ref()) {
        mentioned.extend(c.string.iter().chain(&c.continuation));
        mentioned.extend(c.completion.iter().flatten());
    }
    for b in &report.blocking {
        mentioned.extend(b.witness.iter().flatten());
    }
    for e in mentioned {
        if let Some(d) = bundle.events.get(&Event(e)) {
            report.annotations.insert(e, d.clone());
        }
    }
}
