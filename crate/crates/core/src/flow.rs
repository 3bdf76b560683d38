//! Direction inference and internal information flows.
//!
//! A computation or glue names the ports or roles its events belong to,
//! so the direction in which information crosses each element can be read
//! off the process: an element with an initiated event is output-capable,
//! one with an observed event is input-capable. Within one unfolding of
//! the process body, data that arrives at an observed event may leave at
//! any later initiated event on the same path, which induces the internal
//! flows between elements. Flows never wrap around a recursion.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{Event, ProcessExpr, TypeDef};

/// Which way information may cross a port or role.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DirectionClass {
    pub input_capable: bool,
    pub output_capable: bool,
}

impl DirectionClass {
    pub fn communicates(&self) -> bool {
        self.input_capable || self.output_capable
    }
}

/// Where an element's direction class came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassOrigin {
    /// The element occurs in the computation or glue.
    Body,
    /// The element never occurs in the body; the class was read from its
    /// own protocol instead.
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementClass {
    pub class: DirectionClass,
    pub origin: ClassOrigin,
}

/// How a maximal path through a process body ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathTerminator {
    Recurse,
    Stop,
}

/// One root-to-leaf traversal of a process body with every choice
/// resolved to a single branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventPath {
    pub events: Vec<Event>,
    pub terminator: PathTerminator,
}

/// A directed flow between two distinct elements of one type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct InternalFlow {
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("unqualified event `{event}` in a computation or glue process")]
    UnqualifiedEvent { event: String },
    #[error("`{owner}` has no port or role named `{element}`")]
    UnknownElement { owner: String, element: String },
}

/// Enumerates the event paths of one unfolding of a computation or glue
/// process, one per leaf of its choice tree, in branch order.
pub fn enumerate_paths(p: &ProcessExpr) -> Result<Vec<EventPath>, FlowError> {
    let mut paths = Vec::new();
    let mut prefix = Vec::new();
    walk_paths(p, &mut prefix, &mut paths)?;
    Ok(paths)
}

fn walk_paths(
    p: &ProcessExpr,
    prefix: &mut Vec<Event>,
    paths: &mut Vec<EventPath>,
) -> Result<(), FlowError> {
    match p {
        ProcessExpr::Prefix(event, rest) => {
            if event.qualifier.is_none() {
                return Err(FlowError::UnqualifiedEvent {
                    event: event.to_string(),
                });
            }
            prefix.push(event.clone());
            walk_paths(rest, prefix, paths)?;
            prefix.pop();
            Ok(())
        }
        ProcessExpr::Choice(branches) => {
            for branch in branches {
                walk_paths(branch, prefix, paths)?;
            }
            Ok(())
        }
        ProcessExpr::Ref(_) => {
            paths.push(EventPath {
                events: prefix.clone(),
                terminator: PathTerminator::Recurse,
            });
            Ok(())
        }
        ProcessExpr::Stop => {
            paths.push(EventPath {
                events: prefix.clone(),
                terminator: PathTerminator::Stop,
            });
            Ok(())
        }
    }
}

/// Infers the direction class of every declared element of a type.
///
/// An element occurring in the body is classified by its occurrences
/// there. An element absent from the body falls back to its own protocol.
pub fn classify_elements(owner: TypeDef<'_>) -> BTreeMap<String, ElementClass> {
    let mut classes: BTreeMap<String, ElementClass> = owner
        .elements()
        .iter()
        .map(|e| {
            (
                e.name.clone(),
                ElementClass {
                    class: DirectionClass::default(),
                    origin: ClassOrigin::Body,
                },
            )
        })
        .collect();

    let mut saw_in_body: BTreeSet<&str> = BTreeSet::new();
    for event in owner.body().events() {
        if let Some(q) = &event.qualifier {
            if let Some(entry) = classes.get_mut(q) {
                saw_in_body.insert(q);
                if event.is_initiated() {
                    entry.class.output_capable = true;
                } else {
                    entry.class.input_capable = true;
                }
            }
        }
    }

    for element in owner.elements() {
        if saw_in_body.contains(element.name.as_str()) {
            continue;
        }
        let entry = classes.get_mut(&element.name).expect("declared element");
        entry.origin = ClassOrigin::Fallback;
        for event in element.behavior.events() {
            if event.is_initiated() {
                entry.class.output_capable = true;
            } else {
                entry.class.input_capable = true;
            }
        }
    }

    classes
}

/// Infers the direction class of one declared element.
pub fn classify_element(owner: TypeDef<'_>, element: &str) -> Result<DirectionClass, FlowError> {
    classify_elements(owner)
        .get(element)
        .map(|c| c.class)
        .ok_or_else(|| FlowError::UnknownElement {
            owner: owner.name().to_string(),
            element: element.to_string(),
        })
}

/// Computes the internal flows of a type: on every event path of its
/// body, an observed event followed by an initiated event on a different
/// element yields a flow from the first element to the second. Self-loops
/// are discarded.
pub fn internal_flows(owner: TypeDef<'_>) -> Result<BTreeSet<InternalFlow>, FlowError> {
    let mut flows = BTreeSet::new();
    for path in enumerate_paths(owner.body())? {
        for (i, from) in path.events.iter().enumerate() {
            if from.is_initiated() {
                continue;
            }
            for to in &path.events[i + 1..] {
                if !to.is_initiated() {
                    continue;
                }
                let source = from
                    .qualifier
                    .clone()
                    .expect("qualified by enumerate_paths");
                let target = to.qualifier.clone().expect("qualified by enumerate_paths");
                if source != target {
                    flows.insert(InternalFlow { source, target });
                }
            }
        }
    }
    Ok(flows)
}
