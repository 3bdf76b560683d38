//! Backward and forward slicing of architectural specifications.
//!
//! Slicing runs in two phases: a graph phase that collects the vertices
//! reachable from (or reaching) the criterion vertices in the information
//! flow graph, and a reduction phase that maps the vertex set back onto
//! the specification by removing ports, roles, events, types, instances,
//! and attachments that fall outside it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::aifg::{Aifg, BuildError, Vertex, VertexKind};
use crate::model::{
    ComponentType, Configuration, ConnectorType, InterfaceElement, ProcessExpr, Specification,
    TypeDef,
};

/// An instance of interest together with the ports or roles through
/// which its interactions are examined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlicingCriterion {
    pub instance: String,
    pub elements: BTreeSet<String>,
}

impl SlicingCriterion {
    pub fn new(
        instance: impl Into<String>,
        elements: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        SlicingCriterion {
            instance: instance.into(),
            elements: elements.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SliceDirection {
    Backward,
    Forward,
}

/// The graph phase's result: the criterion vertices and every vertex the
/// slice retains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSlice {
    pub direction: SliceDirection,
    pub criterion_vertices: BTreeSet<Vertex>,
    pub vertices: BTreeSet<Vertex>,
}

/// What a reduction removed, for tooling. Ports, roles, and events are
/// recorded only for types that survive; a removed type subsumes its
/// elements. Event positions index a preorder traversal of the original
/// computation or glue.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RemovalRecord {
    pub types: BTreeSet<String>,
    /// Removed ports of surviving component types, as `Type.port`.
    pub ports: BTreeSet<String>,
    /// Removed roles of surviving connector types, as `Type.role`.
    pub roles: BTreeSet<String>,
    pub instances: BTreeSet<String>,
    pub attachments: BTreeSet<String>,
    /// Removed computation and glue events, keyed by type name.
    pub events: BTreeMap<String, BTreeSet<EventRemoval>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct EventRemoval {
    pub position: usize,
    pub event: String,
}

/// A specification derived from another purely by removing elements,
/// together with the record of what was removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedSpecification {
    pub spec: Specification,
    pub removed: RemovalRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriterionError {
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("instance `{instance}` has no port or role named `{element}`")]
    UnknownElement { instance: String, element: String },
    #[error("criterion element set is empty")]
    EmptyElements,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SliceError {
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Maps a criterion onto the graph vertices it names.
pub fn resolve_criterion(
    spec: &Specification,
    graph: &Aifg,
    criterion: &SlicingCriterion,
) -> Result<BTreeSet<Vertex>, CriterionError> {
    if criterion.elements.is_empty() {
        return Err(CriterionError::EmptyElements);
    }
    let td = spec
        .instance_type(&criterion.instance)
        .ok_or_else(|| CriterionError::UnknownInstance(criterion.instance.clone()))?;
    let kind = if td.is_component() {
        VertexKind::Port
    } else {
        VertexKind::Role
    };
    let mut vertices = BTreeSet::new();
    for element in &criterion.elements {
        let vertex = Vertex {
            instance: criterion.instance.clone(),
            element: element.clone(),
            kind,
        };
        if td.element(element).is_none() || !graph.contains_vertex(&vertex) {
            return Err(CriterionError::UnknownElement {
                instance: criterion.instance.clone(),
                element: element.clone(),
            });
        }
        vertices.insert(vertex);
    }
    Ok(vertices)
}

/// Every vertex with a (possibly empty) path to a criterion vertex.
pub fn backward_slice_graph(graph: &Aifg, criterion_vertices: &BTreeSet<Vertex>) -> GraphSlice {
    GraphSlice {
        direction: SliceDirection::Backward,
        criterion_vertices: criterion_vertices.clone(),
        vertices: reach(graph, criterion_vertices, |g, v| g.predecessors(v)),
    }
}

/// Every vertex with a (possibly empty) path from a criterion vertex.
pub fn forward_slice_graph(graph: &Aifg, criterion_vertices: &BTreeSet<Vertex>) -> GraphSlice {
    GraphSlice {
        direction: SliceDirection::Forward,
        criterion_vertices: criterion_vertices.clone(),
        vertices: reach(graph, criterion_vertices, |g, v| g.successors(v)),
    }
}

fn reach<'g, I>(
    graph: &'g Aifg,
    start: &BTreeSet<Vertex>,
    step: impl Fn(&'g Aifg, &Vertex) -> I,
) -> BTreeSet<Vertex>
where
    I: Iterator<Item = &'g Vertex>,
{
    let mut seen = start.clone();
    let mut frontier: Vec<Vertex> = start.iter().cloned().collect();
    while let Some(v) = frontier.pop() {
        for next in step(graph, &v) {
            if seen.insert(next.clone()) {
                frontier.push(next.clone());
            }
        }
    }
    seen
}

/// Maps a graph slice back onto the specification.
///
/// A port or role survives in its type when some instance of the type
/// keeps its vertex; events of removed elements disappear from the
/// computation or glue; a type with no surviving elements is removed.
/// Instances survive when any of their vertices does, attachments when
/// both endpoints do. Everything keeps its original relative order.
pub fn reduce_specification(
    spec: &Specification,
    graph: &Aifg,
    slice_vertices: &BTreeSet<Vertex>,
) -> ReducedSpecification {
    debug_assert!(slice_vertices.iter().all(|v| graph.contains_vertex(v)));
    let mut removed = RemovalRecord::default();

    let mut components = Vec::new();
    for component in &spec.components {
        let td = TypeDef::Component(component);
        match reduce_type(spec, td, slice_vertices, &mut removed) {
            Some((ports, computation)) => {
                components.push(ComponentType {
                    name: component.name.clone(),
                    ports,
                    computation,
                });
            }
            None => {
                removed.types.insert(component.name.clone());
            }
        }
    }
    let mut connectors = Vec::new();
    for connector in &spec.connectors {
        let td = TypeDef::Connector(connector);
        match reduce_type(spec, td, slice_vertices, &mut removed) {
            Some((roles, glue)) => {
                connectors.push(ConnectorType {
                    name: connector.name.clone(),
                    roles,
                    glue,
                });
            }
            None => {
                removed.types.insert(connector.name.clone());
            }
        }
    }

    let mut instances = Vec::new();
    for instance in &spec.configuration.instances {
        let keeps_a_vertex = spec
            .type_def(&instance.type_name)
            .map(|td| {
                let kind = if td.is_component() {
                    VertexKind::Port
                } else {
                    VertexKind::Role
                };
                td.elements().iter().any(|e| {
                    slice_vertices.contains(&Vertex {
                        instance: instance.name.clone(),
                        element: e.name.clone(),
                        kind,
                    })
                })
            })
            .unwrap_or(false);
        if keeps_a_vertex {
            instances.push(instance.clone());
        } else {
            removed.instances.insert(instance.name.clone());
        }
    }

    let mut attachments = Vec::new();
    for attachment in &spec.configuration.attachments {
        let pv = Vertex::port(
            &attachment.port_side.instance,
            &attachment.port_side.element,
        );
        let rv = Vertex::role(
            &attachment.role_side.instance,
            &attachment.role_side.element,
        );
        if slice_vertices.contains(&pv) && slice_vertices.contains(&rv) {
            attachments.push(attachment.clone());
        } else {
            removed.attachments.insert(attachment.to_string());
        }
    }

    ReducedSpecification {
        spec: Specification {
            name: spec.name.clone(),
            components,
            connectors,
            configuration: Configuration {
                instances,
                attachments,
            },
        },
        removed,
    }
}

/// Reduces one type, or returns `None` when no element survives.
fn reduce_type(
    spec: &Specification,
    td: TypeDef<'_>,
    slice_vertices: &BTreeSet<Vertex>,
    removed: &mut RemovalRecord,
) -> Option<(Vec<InterfaceElement>, ProcessExpr)> {
    let kind = if td.is_component() {
        VertexKind::Port
    } else {
        VertexKind::Role
    };
    let survives = |element: &InterfaceElement| {
        spec.instances_of(td.name()).any(|instance| {
            slice_vertices.contains(&Vertex {
                instance: instance.name.clone(),
                element: element.name.clone(),
                kind,
            })
        })
    };

    let (kept, dropped): (Vec<_>, Vec<_>) = td.elements().iter().partition(|e| survives(e));
    if kept.is_empty() {
        return None;
    }

    let removed_names: BTreeSet<String> = dropped.iter().map(|e| e.name.clone()).collect();
    let record = if td.is_component() {
        &mut removed.ports
    } else {
        &mut removed.roles
    };
    for name in &removed_names {
        record.insert(format!("{}.{name}", td.name()));
    }
    let event_removals = removed_events(td.body(), &removed_names);
    if !event_removals.is_empty() {
        removed.events.insert(td.name().to_string(), event_removals);
    }

    let elements = kept.into_iter().cloned().collect();
    Some((elements, reduce_body(td.body(), &removed_names)))
}

/// Removes every event qualified by a removed element. A choice branch
/// left with no events is dropped; a choice whose branches are all
/// dropped collapses to the first branch's remainder; a body left with
/// no events at all becomes `STOP`.
fn reduce_body(body: &ProcessExpr, removed: &BTreeSet<String>) -> ProcessExpr {
    let stripped = strip_events(body, removed);
    if stripped.event_count() == 0 {
        ProcessExpr::Stop
    } else {
        stripped
    }
}

fn strip_events(p: &ProcessExpr, removed: &BTreeSet<String>) -> ProcessExpr {
    match p {
        ProcessExpr::Stop => ProcessExpr::Stop,
        ProcessExpr::Ref(name) => ProcessExpr::Ref(name.clone()),
        ProcessExpr::Prefix(event, rest) => {
            let rest = strip_events(rest, removed);
            let event_removed = event
                .qualifier
                .as_deref()
                .is_some_and(|q| removed.contains(q));
            if event_removed {
                rest
            } else {
                ProcessExpr::prefix(event.clone(), rest)
            }
        }
        ProcessExpr::Choice(branches) => {
            let stripped: Vec<ProcessExpr> =
                branches.iter().map(|b| strip_events(b, removed)).collect();
            let mut kept: Vec<ProcessExpr> = stripped
                .iter()
                .filter(|b| b.event_count() > 0)
                .cloned()
                .collect();
            match kept.len() {
                // Each emptied branch is a bare terminator; keep the first.
                0 => stripped.into_iter().next().expect("choice has branches"),
                1 => kept.pop().expect("one branch"),
                _ => ProcessExpr::Choice(kept),
            }
        }
    }
}

/// Removed events of a body, with their positions in a preorder walk.
fn removed_events(body: &ProcessExpr, removed: &BTreeSet<String>) -> BTreeSet<EventRemoval> {
    fn walk(
        p: &ProcessExpr,
        removed: &BTreeSet<String>,
        position: &mut usize,
        out: &mut BTreeSet<EventRemoval>,
    ) {
        match p {
            ProcessExpr::Prefix(event, rest) => {
                if event
                    .qualifier
                    .as_deref()
                    .is_some_and(|q| removed.contains(q))
                {
                    out.insert(EventRemoval {
                        position: *position,
                        event: event.to_string(),
                    });
                }
                *position += 1;
                walk(rest, removed, position, out);
            }
            ProcessExpr::Choice(branches) => {
                for b in branches {
                    walk(b, removed, position, out);
                }
            }
            ProcessExpr::Ref(_) | ProcessExpr::Stop => {}
        }
    }
    let mut out = BTreeSet::new();
    walk(body, removed, &mut 0, &mut out);
    out
}

/// The two-phase slice: build the graph, resolve the criterion, take the
/// directional graph slice, and reduce the specification to it. The
/// specification is expected to validate cleanly.
pub fn slice(
    spec: &Specification,
    criterion: &SlicingCriterion,
    direction: SliceDirection,
) -> Result<ReducedSpecification, SliceError> {
    let graph = Aifg::build(spec)?;
    let criterion_vertices = resolve_criterion(spec, &graph, criterion)?;
    let graph_slice = match direction {
        SliceDirection::Backward => backward_slice_graph(&graph, &criterion_vertices),
        SliceDirection::Forward => forward_slice_graph(&graph, &criterion_vertices),
    };
    Ok(reduce_specification(spec, &graph, &graph_slice.vertices))
}
