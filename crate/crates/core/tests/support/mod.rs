//! Shared test support: a generator for valid specifications and slicing
//! cases, plus independent oracles the library is checked against.
//!
//! Each test target uses a different subset of these helpers.
#![allow(dead_code)]
//!
//! The oracles deliberately take different routes from the library: path
//! enumeration builds suffixes bottom-up instead of prefixes top-down,
//! and reachability is a transitive-closure matrix rather than a
//! traversal.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::sample::subsequence;

use archslice::aifg::{Aifg, Vertex, VertexKind};
use archslice::flow::classify_element;
use archslice::model::{
    validate, Attachment, AttachmentEnd, ComponentType, Configuration, ConnectorType, Event,
    EventDirection, Instance, InterfaceElement, ProcessExpr, Specification, TypeDef,
};
use archslice::parser::{parse, render};
use archslice::slicer::{
    backward_slice_graph, forward_slice_graph, resolve_criterion, slice, GraphSlice,
    SliceDirection, SlicingCriterion,
};

const COMPONENT_NAMES: [&str; 3] = ["Alpha", "Beta", "Gamma"];
const CONNECTOR_NAMES: [&str; 3] = ["Link", "Pipe", "Bus"];
const PORT_NAMES: [&str; 3] = ["P1", "P2", "P3"];
const ROLE_NAMES: [&str; 2] = ["R1", "R2"];
const EVENT_NAMES: [&str; 4] = ["go", "put", "ack", "req"];
const VARS: [&str; 2] = ["x", "y"];

/// A generated specification together with a slicing criterion pair
/// `e1 ⊆ e2` on one of its instances and a direction.
#[derive(Debug, Clone)]
pub struct SliceCase {
    pub spec: Specification,
    pub instance: String,
    pub e1: BTreeSet<String>,
    pub e2: BTreeSet<String>,
    pub direction: SliceDirection,
}

impl SliceCase {
    pub fn criterion(&self) -> SlicingCriterion {
        SlicingCriterion {
            instance: self.instance.clone(),
            elements: self.e1.clone(),
        }
    }
}

type RawEvent = (usize, bool, Option<usize>);

fn raw_event() -> impl Strategy<Value = RawEvent> {
    (
        0..EVENT_NAMES.len(),
        any::<bool>(),
        proptest::option::of(0..VARS.len()),
    )
}

fn materialize(raw: RawEvent, qualifier: Option<&str>) -> Event {
    let (name, initiated, var) = raw;
    Event {
        name: EVENT_NAMES[name].to_string(),
        direction: if initiated {
            EventDirection::Initiated
        } else {
            EventDirection::Observed
        },
        data: var.map(|v| VARS[v].to_string()),
        qualifier: qualifier.map(String::from),
    }
}

/// Folds events into a prefix chain ending in recursion or stop.
fn chain(events: Vec<Event>, recurse: bool, def_name: &str) -> ProcessExpr {
    let mut p = if recurse {
        ProcessExpr::Ref(def_name.to_string())
    } else {
        ProcessExpr::Stop
    };
    for event in events.into_iter().rev() {
        p = ProcessExpr::prefix(event, p);
    }
    p
}

type RawChain = (Vec<RawEvent>, bool);

fn raw_chain() -> impl Strategy<Value = RawChain> {
    (proptest::collection::vec(raw_event(), 1..=2), any::<bool>())
}

/// A computation or glue over the given qualifiers: either a straight
/// sequence or a prefixed choice of short branches.
pub fn body_strategy(
    qualifiers: Vec<String>,
    def_name: &'static str,
) -> BoxedStrategy<ProcessExpr> {
    let make_event = move || {
        let quals = qualifiers.clone();
        (0..quals.len(), raw_event()).prop_map(move |(q, raw)| materialize(raw, Some(&quals[q])))
    };
    let branch = (
        proptest::collection::vec(make_event(), 1..=2),
        any::<bool>(),
    );
    prop_oneof![
        (
            proptest::collection::vec(make_event(), 1..=4),
            any::<bool>()
        )
            .prop_map(move |(events, recurse)| chain(events, recurse, def_name)),
        (
            proptest::collection::vec(make_event(), 0..=2),
            proptest::collection::vec(branch, 2..=3),
        )
            .prop_map(move |(prefix_events, branches)| {
                let mut p = ProcessExpr::Choice(
                    branches
                        .into_iter()
                        .map(|(events, recurse)| chain(events, recurse, def_name))
                        .collect(),
                );
                for event in prefix_events.into_iter().rev() {
                    p = ProcessExpr::prefix(event, p);
                }
                p
            }),
    ]
    .boxed()
}

fn component_strategy(index: usize) -> BoxedStrategy<ComponentType> {
    (1..=PORT_NAMES.len())
        .prop_flat_map(move |n_ports| {
            let port_names: Vec<String> = PORT_NAMES[..n_ports]
                .iter()
                .map(|s| s.to_string())
                .collect();
            (
                proptest::collection::vec(raw_chain(), n_ports),
                body_strategy(port_names.clone(), "Computation"),
            )
                .prop_map(move |(chains, computation)| ComponentType {
                    name: COMPONENT_NAMES[index].to_string(),
                    ports: port_names
                        .iter()
                        .zip(chains)
                        .map(|(name, (raws, recurse))| InterfaceElement {
                            name: name.clone(),
                            behavior: chain(
                                raws.into_iter().map(|r| materialize(r, None)).collect(),
                                recurse,
                                name,
                            ),
                        })
                        .collect(),
                    computation,
                })
        })
        .boxed()
}

fn connector_strategy(index: usize) -> BoxedStrategy<ConnectorType> {
    (1..=ROLE_NAMES.len())
        .prop_flat_map(move |n_roles| {
            let role_names: Vec<String> = ROLE_NAMES[..n_roles]
                .iter()
                .map(|s| s.to_string())
                .collect();
            (
                proptest::collection::vec(raw_chain(), n_roles),
                body_strategy(role_names.clone(), "Glue"),
            )
                .prop_map(move |(chains, glue)| ConnectorType {
                    name: CONNECTOR_NAMES[index].to_string(),
                    roles: role_names
                        .iter()
                        .zip(chains)
                        .map(|(name, (raws, recurse))| InterfaceElement {
                            name: name.clone(),
                            behavior: chain(
                                raws.into_iter().map(|r| materialize(r, None)).collect(),
                                recurse,
                                name,
                            ),
                        })
                        .collect(),
                    glue,
                })
        })
        .boxed()
}

fn vec_of<T: Clone + std::fmt::Debug + 'static>(
    strategies: Vec<BoxedStrategy<T>>,
) -> BoxedStrategy<Vec<T>> {
    let mut acc: BoxedStrategy<Vec<T>> = Just(Vec::new()).boxed();
    for s in strategies {
        acc = (acc, s)
            .prop_map(|(mut v, x)| {
                v.push(x);
                v
            })
            .boxed();
    }
    acc
}

/// Generates a specification that validates cleanly: up to six types,
/// one or two instances per type, and attachments only on ports that
/// communicate.
pub fn spec_strategy() -> BoxedStrategy<Specification> {
    (1..=3usize, 0..=3usize)
        .prop_flat_map(|(n_components, n_connectors)| {
            let components = vec_of((0..n_components).map(component_strategy).collect());
            let connectors = vec_of((0..n_connectors).map(connector_strategy).collect());
            (components, connectors)
        })
        .prop_flat_map(|(components, connectors)| {
            let n_types = components.len() + connectors.len();
            (
                Just(components),
                Just(connectors),
                proptest::collection::vec(1..=2usize, n_types),
            )
        })
        .prop_flat_map(|(components, connectors, counts)| {
            let mut instances = Vec::new();
            let type_names = components
                .iter()
                .map(|c| c.name.clone())
                .chain(connectors.iter().map(|n| n.name.clone()));
            for (type_name, count) in type_names.zip(&counts) {
                for k in 0..*count {
                    instances.push(Instance {
                        name: format!("{}_{k}", type_name.to_lowercase()),
                        type_name: type_name.clone(),
                    });
                }
            }

            // Attachment candidates: every communicating port of every
            // component instance against every role of every connector
            // instance.
            let mut candidates = Vec::new();
            for instance in &instances {
                let Some(component) = components.iter().find(|c| c.name == instance.type_name)
                else {
                    continue;
                };
                for port in &component.ports {
                    let class = classify_element(TypeDef::Component(component), &port.name)
                        .expect("declared port");
                    if !class.communicates() {
                        continue;
                    }
                    for role_instance in &instances {
                        let Some(connector) = connectors
                            .iter()
                            .find(|n| n.name == role_instance.type_name)
                        else {
                            continue;
                        };
                        for role in &connector.roles {
                            candidates.push(Attachment {
                                port_side: AttachmentEnd {
                                    instance: instance.name.clone(),
                                    element: port.name.clone(),
                                },
                                role_side: AttachmentEnd {
                                    instance: role_instance.name.clone(),
                                    element: role.name.clone(),
                                },
                            });
                        }
                    }
                }
            }
            let max_attachments = candidates.len().min(10);
            (
                Just(components),
                Just(connectors),
                Just(instances),
                subsequence(candidates, 0..=max_attachments),
            )
        })
        .prop_map(
            |(components, connectors, instances, attachments)| Specification {
                name: "Generated".to_string(),
                components,
                connectors,
                configuration: Configuration {
                    instances,
                    attachments,
                },
            },
        )
        .boxed()
}

/// A specification plus a slicing case over it.
pub fn slice_case() -> BoxedStrategy<SliceCase> {
    spec_strategy()
        .prop_flat_map(|spec| {
            let n = spec.configuration.instances.len();
            (Just(spec), 0..n)
        })
        .prop_flat_map(|(spec, index)| {
            let instance = spec.configuration.instances[index].clone();
            let elements: Vec<String> = spec
                .type_def(&instance.type_name)
                .expect("instance type resolves")
                .elements()
                .iter()
                .map(|e| e.name.clone())
                .collect();
            let upper = elements.len();
            (
                Just(spec),
                Just(instance.name),
                subsequence(elements, 1..=upper),
            )
        })
        .prop_flat_map(|(spec, instance, e2)| {
            let upper = e2.len();
            (
                Just(spec),
                Just(instance),
                subsequence(e2.clone(), 1..=upper),
                Just(e2),
                any::<bool>(),
            )
        })
        .prop_map(|(spec, instance, e1, e2, backward)| SliceCase {
            spec,
            instance,
            e1: e1.into_iter().collect(),
            e2: e2.into_iter().collect(),
            direction: if backward {
                SliceDirection::Backward
            } else {
                SliceDirection::Forward
            },
        })
        .boxed()
}

// ---------------------------------------------------------------------
// Oracles

/// Root-to-leaf event sequences of one unfolding, built suffix-first.
/// The boolean is true when the path ends in recursion.
pub fn paths_oracle(p: &ProcessExpr) -> Vec<(Vec<Event>, bool)> {
    match p {
        ProcessExpr::Stop => vec![(Vec::new(), false)],
        ProcessExpr::Ref(_) => vec![(Vec::new(), true)],
        ProcessExpr::Prefix(event, rest) => paths_oracle(rest)
            .into_iter()
            .map(|(mut events, recurse)| {
                events.insert(0, event.clone());
                (events, recurse)
            })
            .collect(),
        ProcessExpr::Choice(branches) => branches.iter().flat_map(paths_oracle).collect(),
    }
}

/// The observed-before-initiated pairing rule applied to oracle paths.
pub fn flows_oracle(body: &ProcessExpr) -> BTreeSet<(String, String)> {
    let mut flows = BTreeSet::new();
    for (events, _) in paths_oracle(body) {
        for (i, from) in events.iter().enumerate() {
            if from.direction != EventDirection::Observed {
                continue;
            }
            for to in &events[i + 1..] {
                if to.direction != EventDirection::Initiated {
                    continue;
                }
                let source = from.qualifier.clone().expect("qualified body event");
                let target = to.qualifier.clone().expect("qualified body event");
                if source != target {
                    flows.insert((source, target));
                }
            }
        }
    }
    flows
}

/// Forward reachability (reflexive) for every vertex, by transitive
/// closure over the arc matrix.
pub fn closure_oracle(graph: &Aifg) -> BTreeMap<Vertex, BTreeSet<Vertex>> {
    let vertices: Vec<Vertex> = graph.vertices().cloned().collect();
    let index: BTreeMap<&Vertex, usize> =
        vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let n = vertices.len();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for arc in graph.arcs() {
        reach[index[&arc.from]][index[&arc.to]] = true;
    }
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut() {
            if row[k] {
                for (j, reachable) in via.iter().enumerate() {
                    if *reachable {
                        row[j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for (i, v) in vertices.iter().enumerate() {
        let set: BTreeSet<Vertex> = reach[i]
            .iter()
            .enumerate()
            .filter(|(_, reachable)| **reachable)
            .map(|(j, _)| vertices[j].clone())
            .collect();
        out.insert(v.clone(), set);
    }
    out
}

// ---------------------------------------------------------------------
// Property checks

fn graph_of(spec: &Specification) -> Result<Aifg, String> {
    Aifg::build(spec).map_err(|e| format!("graph build failed: {e}"))
}

fn vertices_for(
    spec: &Specification,
    graph: &Aifg,
    instance: &str,
    elements: &BTreeSet<String>,
) -> Result<BTreeSet<Vertex>, String> {
    let criterion = SlicingCriterion {
        instance: instance.to_string(),
        elements: elements.clone(),
    };
    resolve_criterion(spec, graph, &criterion).map_err(|e| format!("criterion failed: {e}"))
}

fn graph_slice(graph: &Aifg, vc: &BTreeSet<Vertex>, direction: SliceDirection) -> GraphSlice {
    match direction {
        SliceDirection::Backward => backward_slice_graph(graph, vc),
        SliceDirection::Forward => forward_slice_graph(graph, vc),
    }
}

/// Generated specifications must validate cleanly and round-trip
/// through the canonical text form.
pub fn check_generator_sanity(case: &SliceCase) -> Result<(), String> {
    let diagnostics = validate(&case.spec);
    if !diagnostics.is_empty() {
        return Err(format!("generated spec does not validate: {diagnostics:?}"));
    }
    let text = render(&case.spec);
    let reparsed = parse(&text).map_err(|e| format!("render does not re-parse: {e}"))?;
    if reparsed != case.spec {
        return Err("render/parse round trip changed the spec".into());
    }
    Ok(())
}

/// Criterion vertices always appear in the graph slice.
pub fn check_reflexivity(case: &SliceCase) -> Result<(), String> {
    let graph = graph_of(&case.spec)?;
    let vc = vertices_for(&case.spec, &graph, &case.instance, &case.e1)?;
    let slice = graph_slice(&graph, &vc, case.direction);
    if !vc.is_subset(&slice.vertices) {
        return Err(format!("criterion vertices missing from slice: {vc:?}"));
    }
    Ok(())
}

/// Re-slicing a slice's output with the same criterion and direction
/// yields a structurally equal specification.
pub fn check_idempotence(case: &SliceCase) -> Result<(), String> {
    let criterion = case.criterion();
    let once = slice(&case.spec, &criterion, case.direction).map_err(|e| e.to_string())?;
    let twice = slice(&once.spec, &criterion, case.direction).map_err(|e| e.to_string())?;
    if twice.spec != once.spec {
        return Err(format!(
            "slice is not idempotent:\nfirst:\n{}\nsecond:\n{}",
            render(&once.spec),
            render(&twice.spec)
        ));
    }
    Ok(())
}

/// Growing the element set never shrinks the slice.
pub fn check_monotonicity(case: &SliceCase) -> Result<(), String> {
    let graph = graph_of(&case.spec)?;
    let vc1 = vertices_for(&case.spec, &graph, &case.instance, &case.e1)?;
    let vc2 = vertices_for(&case.spec, &graph, &case.instance, &case.e2)?;
    let s1 = graph_slice(&graph, &vc1, case.direction);
    let s2 = graph_slice(&graph, &vc2, case.direction);
    if !s1.vertices.is_subset(&s2.vertices) {
        return Err("slice of a subset criterion is not a subset".into());
    }
    Ok(())
}

/// Slice output re-validates with zero diagnostics and re-parses after
/// rendering.
pub fn check_output_well_formed(case: &SliceCase) -> Result<(), String> {
    let reduced =
        slice(&case.spec, &case.criterion(), case.direction).map_err(|e| e.to_string())?;
    let diagnostics = validate(&reduced.spec);
    if !diagnostics.is_empty() {
        return Err(format!("slice output does not validate: {diagnostics:?}"));
    }
    let text = render(&reduced.spec);
    let reparsed = parse(&text).map_err(|e| format!("slice output does not re-parse: {e}"))?;
    if reparsed != reduced.spec {
        return Err("slice output round trip changed the spec".into());
    }
    Ok(())
}

fn is_subsequence<T: PartialEq>(shorter: &[T], longer: &[T]) -> bool {
    let mut it = longer.iter();
    shorter.iter().all(|x| it.any(|y| y == x))
}

/// Each surviving type is derivable from its original purely by element
/// removal: element lists are order-preserving sublists with identical
/// behaviors, and the reduced body's paths are exactly the original
/// paths filtered to surviving elements.
pub fn check_reduction_relation(case: &SliceCase) -> Result<(), String> {
    let reduced =
        slice(&case.spec, &case.criterion(), case.direction).map_err(|e| e.to_string())?;

    let original_components: Vec<&str> = case
        .spec
        .components
        .iter()
        .map(|c| c.name.as_str())
        .collect();
    let reduced_components: Vec<&str> = reduced
        .spec
        .components
        .iter()
        .map(|c| c.name.as_str())
        .collect();
    if !is_subsequence(&reduced_components, &original_components) {
        return Err("component order not preserved".into());
    }
    let original_connectors: Vec<&str> = case
        .spec
        .connectors
        .iter()
        .map(|n| n.name.as_str())
        .collect();
    let reduced_connectors: Vec<&str> = reduced
        .spec
        .connectors
        .iter()
        .map(|n| n.name.as_str())
        .collect();
    if !is_subsequence(&reduced_connectors, &original_connectors) {
        return Err("connector order not preserved".into());
    }
    if !is_subsequence(
        &reduced.spec.configuration.instances,
        &case.spec.configuration.instances,
    ) {
        return Err("instances are not an ordered sublist of the original".into());
    }
    if !is_subsequence(
        &reduced.spec.configuration.attachments,
        &case.spec.configuration.attachments,
    ) {
        return Err("attachments are not an ordered sublist of the original".into());
    }

    for component in &reduced.spec.components {
        let original = case
            .spec
            .component(&component.name)
            .ok_or("invented component")?;
        check_type_reduction(
            TypeDef::Component(original),
            &component.ports,
            &component.computation,
        )?;
    }
    for connector in &reduced.spec.connectors {
        let original = case
            .spec
            .connector(&connector.name)
            .ok_or("invented connector")?;
        check_type_reduction(
            TypeDef::Connector(original),
            &connector.roles,
            &connector.glue,
        )?;
    }

    // Every removal record refers to an element of the original, and
    // partitions it against what was kept.
    let original_types: BTreeSet<String> = case
        .spec
        .components
        .iter()
        .map(|c| c.name.clone())
        .chain(case.spec.connectors.iter().map(|n| n.name.clone()))
        .collect();
    let kept_types: BTreeSet<String> = reduced_components
        .iter()
        .chain(reduced_connectors.iter())
        .map(|n| n.to_string())
        .collect();
    if !reduced.removed.types.is_subset(&original_types) {
        return Err("removed types not drawn from the original".into());
    }
    if reduced
        .removed
        .types
        .intersection(&kept_types)
        .next()
        .is_some()
        || reduced.removed.types.len() + kept_types.len() != original_types.len()
    {
        return Err("removed and kept types do not partition the original".into());
    }
    let original_instances: BTreeSet<String> = case
        .spec
        .configuration
        .instances
        .iter()
        .map(|i| i.name.clone())
        .collect();
    if !reduced.removed.instances.is_subset(&original_instances) {
        return Err("removed instances not drawn from the original".into());
    }
    if reduced.removed.instances.len() + reduced.spec.configuration.instances.len()
        != original_instances.len()
    {
        return Err("removed and kept instances do not partition the original".into());
    }
    let original_attachments: BTreeSet<String> = case
        .spec
        .configuration
        .attachments
        .iter()
        .map(|a| a.to_string())
        .collect();
    if !reduced.removed.attachments.is_subset(&original_attachments) {
        return Err("removed attachments not drawn from the original".into());
    }
    for port in &reduced.removed.ports {
        let Some((type_name, port_name)) = port.split_once('.') else {
            return Err(format!("malformed removal record `{port}`"));
        };
        let Some(component) = case.spec.component(type_name) else {
            return Err(format!("removal record `{port}` names an unknown type"));
        };
        if !component.ports.iter().any(|p| p.name == port_name) {
            return Err(format!("removal record `{port}` names an unknown port"));
        }
    }
    Ok(())
}

fn check_type_reduction(
    original: TypeDef<'_>,
    reduced_elements: &[InterfaceElement],
    reduced_body: &ProcessExpr,
) -> Result<(), String> {
    let name = original.name();
    if !is_subsequence(reduced_elements, original.elements()) {
        return Err(format!(
            "`{name}`: elements are not an ordered sublist with equal protocols"
        ));
    }

    let survivors: BTreeSet<&str> = reduced_elements.iter().map(|e| e.name.as_str()).collect();
    let expected = reduced_paths_oracle(original.body(), &survivors);
    let got: Vec<(Vec<String>, bool)> = paths_oracle(reduced_body)
        .into_iter()
        .map(|(events, recurse)| (events.iter().map(|e| e.to_string()).collect(), recurse))
        .collect();
    if got != expected {
        return Err(format!(
            "`{name}`: reduced body paths {got:?} differ from the oracle's {expected:?}"
        ));
    }
    Ok(())
}

/// Predicts the paths of a reduced body directly from the original, by
/// the removal rules: events of removed elements disappear, a branch
/// whose events all disappear is dropped, a fully emptied choice keeps
/// its leftmost terminator, and a fully emptied body stops.
fn reduced_paths_oracle(
    body: &ProcessExpr,
    survivors: &BTreeSet<&str>,
) -> Vec<(Vec<String>, bool)> {
    fn walk(p: &ProcessExpr, survivors: &BTreeSet<&str>) -> Vec<(Vec<String>, bool)> {
        match p {
            ProcessExpr::Stop => vec![(Vec::new(), false)],
            ProcessExpr::Ref(_) => vec![(Vec::new(), true)],
            ProcessExpr::Prefix(event, rest) => {
                let keep = event
                    .qualifier
                    .as_deref()
                    .map(|q| survivors.contains(q))
                    .unwrap_or(true);
                walk(rest, survivors)
                    .into_iter()
                    .map(|(mut events, recurse)| {
                        if keep {
                            events.insert(0, event.to_string());
                        }
                        (events, recurse)
                    })
                    .collect()
            }
            ProcessExpr::Choice(branches) => {
                let per_branch: Vec<Vec<(Vec<String>, bool)>> =
                    branches.iter().map(|b| walk(b, survivors)).collect();
                let kept: Vec<&Vec<(Vec<String>, bool)>> = per_branch
                    .iter()
                    .filter(|paths| paths.iter().any(|(events, _)| !events.is_empty()))
                    .collect();
                if kept.is_empty() {
                    // Everything emptied: the choice collapses to the
                    // leftmost branch's terminator.
                    vec![per_branch[0][0].clone()]
                } else {
                    kept.into_iter().flatten().cloned().collect()
                }
            }
        }
    }
    let paths = walk(body, survivors);
    if paths.iter().all(|(events, _)| events.is_empty()) {
        vec![(Vec::new(), false)]
    } else {
        paths
    }
}

/// A port or role appears in the output iff one of its vertices is in
/// the graph slice.
pub fn check_graph_spec_agreement(case: &SliceCase) -> Result<(), String> {
    let graph = graph_of(&case.spec)?;
    let vc = vertices_for(&case.spec, &graph, &case.instance, &case.e1)?;
    let slice_vertices = graph_slice(&graph, &vc, case.direction).vertices;
    let reduced =
        slice(&case.spec, &case.criterion(), case.direction).map_err(|e| e.to_string())?;

    let defs = case
        .spec
        .components
        .iter()
        .map(TypeDef::Component)
        .chain(case.spec.connectors.iter().map(TypeDef::Connector));
    for td in defs {
        let kind = if td.is_component() {
            VertexKind::Port
        } else {
            VertexKind::Role
        };
        for element in td.elements() {
            let in_slice = case.spec.instances_of(td.name()).any(|instance| {
                slice_vertices.contains(&Vertex {
                    instance: instance.name.clone(),
                    element: element.name.clone(),
                    kind,
                })
            });
            let in_output = reduced
                .spec
                .type_def(td.name())
                .and_then(|rtd| rtd.element(&element.name))
                .is_some();
            if in_slice != in_output {
                return Err(format!(
                    "`{}.{}`: in_slice={in_slice} but in_output={in_output}",
                    td.name(),
                    element.name
                ));
            }
        }
    }
    Ok(())
}

/// `v ∈ backward({w})` iff `w ∈ forward({v})`, for every vertex pair,
/// and both agree with the closure oracle.
pub fn check_duality(case: &SliceCase) -> Result<(), String> {
    let graph = graph_of(&case.spec)?;
    let closure = closure_oracle(&graph);
    let vertices: Vec<Vertex> = graph.vertices().cloned().collect();
    for v in &vertices {
        let singleton = BTreeSet::from([v.clone()]);
        let backward = backward_slice_graph(&graph, &singleton).vertices;
        let forward = forward_slice_graph(&graph, &singleton).vertices;
        for u in &vertices {
            let reaches = closure[u].contains(v);
            if backward.contains(u) != reaches {
                return Err(format!("backward({v}) disagrees with oracle at {u}"));
            }
            if forward_contains(&closure, v, u) != forward.contains(u) {
                return Err(format!("forward({v}) disagrees with oracle at {u}"));
            }
            let dual = forward_slice_graph(&graph, &BTreeSet::from([u.clone()]))
                .vertices
                .contains(v);
            if backward.contains(u) != dual {
                return Err(format!("duality fails for ({u}, {v})"));
            }
        }
    }
    Ok(())
}

fn forward_contains(
    closure: &BTreeMap<Vertex, BTreeSet<Vertex>>,
    from: &Vertex,
    to: &Vertex,
) -> bool {
    closure[from].contains(to)
}

/// The library's flow analysis agrees with the suffix-built oracle on
/// every type of the case.
pub fn check_flow_oracle(case: &SliceCase) -> Result<(), String> {
    let defs = case
        .spec
        .components
        .iter()
        .map(TypeDef::Component)
        .chain(case.spec.connectors.iter().map(TypeDef::Connector));
    for td in defs {
        let lib_paths = archslice::flow::enumerate_paths(td.body()).map_err(|e| e.to_string())?;
        let oracle_paths = paths_oracle(td.body());
        let lib_view: Vec<(Vec<Event>, bool)> = lib_paths
            .iter()
            .map(|p| {
                (
                    p.events.clone(),
                    p.terminator == archslice::flow::PathTerminator::Recurse,
                )
            })
            .collect();
        if lib_view != oracle_paths {
            return Err(format!(
                "`{}`: path enumeration disagrees with oracle",
                td.name()
            ));
        }

        let lib_flows: BTreeSet<(String, String)> = archslice::flow::internal_flows(td)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|f| (f.source, f.target))
            .collect();
        if lib_flows != flows_oracle(td.body()) {
            return Err(format!(
                "`{}`: internal flows disagree with oracle",
                td.name()
            ));
        }

        // Direction classes are consistent with the flows.
        for (source, target) in &lib_flows {
            let from = classify_element(td, source).map_err(|e| e.to_string())?;
            let to = classify_element(td, target).map_err(|e| e.to_string())?;
            if !from.input_capable || !to.output_capable {
                return Err(format!(
                    "`{}`: flow {source} -> {target} contradicts direction classes",
                    td.name()
                ));
            }
        }
    }
    Ok(())
}

/// The graph slices agree with the transitive-closure oracle.
pub fn check_slice_against_closure(case: &SliceCase) -> Result<(), String> {
    let graph = graph_of(&case.spec)?;
    let vc = vertices_for(&case.spec, &graph, &case.instance, &case.e1)?;
    let closure = closure_oracle(&graph);
    let forward_expected: BTreeSet<Vertex> = graph
        .vertices()
        .filter(|v| vc.iter().any(|c| closure[c].contains(v)))
        .cloned()
        .collect();
    let backward_expected: BTreeSet<Vertex> = graph
        .vertices()
        .filter(|v| vc.iter().any(|c| closure[*v].contains(c)))
        .cloned()
        .collect();
    if forward_slice_graph(&graph, &vc).vertices != forward_expected {
        return Err("forward slice disagrees with closure oracle".into());
    }
    if backward_slice_graph(&graph, &vc).vertices != backward_expected {
        return Err("backward slice disagrees with closure oracle".into());
    }
    Ok(())
}

/// Every property of the suite, on one case.
pub fn check_all_properties(case: &SliceCase) -> Result<(), String> {
    check_generator_sanity(case)?;
    check_flow_oracle(case)?;
    check_reflexivity(case)?;
    check_idempotence(case)?;
    check_monotonicity(case)?;
    check_output_well_formed(case)?;
    check_reduction_relation(case)?;
    check_graph_spec_agreement(case)?;
    check_slice_against_closure(case)?;
    check_duality(case)?;
    Ok(())
}
