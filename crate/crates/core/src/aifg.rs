//! The architecture information flow graph: an arc-classified digraph
//! whose vertices are the ports and roles of the configuration's
//! instances and whose arcs are the possible information flows between
//! and within them.
//!
//! Arcs come in three classes: `Com` arcs carry information from a port
//! into a role, `Con` arcs from a role into a port, and `Int` arcs
//! between two elements of the same instance. Attachment arcs follow the
//! direction class of the port side; internal arcs instantiate the
//! owning type's internal flows per instance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{classify_elements, internal_flows, ClassOrigin, FlowError};
use crate::model::Specification;

/// Whether a vertex stands for a port of a component instance or a role
/// of a connector instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VertexKind {
    Port,
    Role,
}

/// A port or role of one specific instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Vertex {
    pub instance: String,
    pub element: String,
    pub kind: VertexKind,
}

impl Vertex {
    pub fn port(instance: impl Into<String>, element: impl Into<String>) -> Self {
        Vertex {
            instance: instance.into(),
            element: element.into(),
            kind: VertexKind::Port,
        }
    }

    pub fn role(instance: impl Into<String>, element: impl Into<String>) -> Self {
        Vertex {
            instance: instance.into(),
            element: element.into(),
            kind: VertexKind::Role,
        }
    }

    pub fn display_name(&self) -> String {
        format!("{}.{}", self.instance, self.element)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.instance, self.element)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ArcKind {
    /// Component-to-connector flow: port into role.
    Com,
    /// Connector-to-component flow: role into port.
    Con,
    /// Internal flow between two elements of one instance.
    Int,
}

impl fmt::Display for ArcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArcKind::Com => "Com",
            ArcKind::Con => "Con",
            ArcKind::Int => "Int",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Arc {
    pub from: Vertex,
    pub to: Vertex,
    pub kind: ArcKind,
}

/// The information flow graph. Vertices and arcs iterate in display-name
/// order, so equal graphs serialize to equal bytes.
#[derive(Debug, Clone)]
pub struct Aifg {
    vertices: BTreeSet<Vertex>,
    arcs: BTreeSet<Arc>,
    successors: BTreeMap<Vertex, BTreeSet<Vertex>>,
    predecessors: BTreeMap<Vertex, BTreeSet<Vertex>>,
    warnings: Vec<String>,
}

impl PartialEq for Aifg {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.arcs == other.arcs
    }
}

impl Eq for Aifg {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("attachment `{attachment}`: port `{port}` never communicates")]
    DeadPort { attachment: String, port: String },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("specification is inconsistent: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid graph JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unknown kind `{0}`")]
    BadKind(String),
    #[error("`{0}` is not an `instance.element` name")]
    BadName(String),
    #[error("arc endpoint `{0}` is not a vertex of the graph")]
    UnknownVertex(String),
}

impl Aifg {
    /// Builds the graph of a specification that validates cleanly.
    pub fn build(spec: &Specification) -> Result<Aifg, BuildError> {
        let mut classes = BTreeMap::new();
        let mut flows = BTreeMap::new();
        let mut warnings = Vec::new();
        let defs = spec
            .components
            .iter()
            .map(crate::model::TypeDef::Component)
            .chain(spec.connectors.iter().map(crate::model::TypeDef::Connector));
        for td in defs {
            let element_classes = classify_elements(td);
            for (element, ec) in &element_classes {
                if ec.origin == ClassOrigin::Fallback {
                    warnings.push(format!(
                        "`{}.{element}` never occurs in the {}; direction inferred from its own protocol",
                        td.name(),
                        td.body_label(),
                    ));
                }
                if !ec.class.communicates() {
                    warnings.push(format!("`{}.{element}` never communicates", td.name()));
                }
            }
            classes.insert(td.name().to_string(), element_classes);
            flows.insert(td.name().to_string(), internal_flows(td)?);
        }

        let mut vertices = BTreeSet::new();
        for instance in &spec.configuration.instances {
            let td = spec.type_def(&instance.type_name).ok_or_else(|| {
                BuildError::Inconsistent(format!(
                    "instance `{}` has undeclared type `{}`",
                    instance.name, instance.type_name
                ))
            })?;
            let kind = if td.is_component() {
                VertexKind::Port
            } else {
                VertexKind::Role
            };
            for element in td.elements() {
                vertices.insert(Vertex {
                    instance: instance.name.clone(),
                    element: element.name.clone(),
                    kind,
                });
            }
        }

        let mut arcs = BTreeSet::new();
        for attachment in &spec.configuration.attachments {
            let port_type = spec
                .instance_type(&attachment.port_side.instance)
                .ok_or_else(|| arc_lookup_error(attachment, &attachment.port_side.instance))?;
            let role_type = spec
                .instance_type(&attachment.role_side.instance)
                .ok_or_else(|| arc_lookup_error(attachment, &attachment.role_side.instance))?;
            let port_class = classes
                .get(port_type.name())
                .and_then(|m| m.get(&attachment.port_side.element))
                .ok_or_else(|| arc_lookup_error(attachment, &attachment.port_side.element))?
                .class;
            let role_class = classes
                .get(role_type.name())
                .and_then(|m| m.get(&attachment.role_side.element))
                .ok_or_else(|| arc_lookup_error(attachment, &attachment.role_side.element))?
                .class;

            if !port_class.communicates() {
                return Err(BuildError::DeadPort {
                    attachment: attachment.to_string(),
                    port: attachment.port_side.to_string(),
                });
            }
            let pv = Vertex::port(
                &attachment.port_side.instance,
                &attachment.port_side.element,
            );
            let rv = Vertex::role(
                &attachment.role_side.instance,
                &attachment.role_side.element,
            );
            if port_class.output_capable {
                if !role_class.input_capable {
                    warnings.push(format!(
                        "attachment `{attachment}`: role `{}` never observes what the port sends",
                        attachment.role_side,
                    ));
                }
                arcs.insert(Arc {
                    from: pv.clone(),
                    to: rv.clone(),
                    kind: ArcKind::Com,
                });
            }
            if port_class.input_capable {
                if !role_class.output_capable {
                    warnings.push(format!(
                        "attachment `{attachment}`: role `{}` never initiates what the port receives",
                        attachment.role_side,
                    ));
                }
                arcs.insert(Arc {
                    from: rv,
                    to: pv,
                    kind: ArcKind::Con,
                });
            }
        }

        for instance in &spec.configuration.instances {
            let type_name = &instance.type_name;
            let Some(td) = spec.type_def(type_name) else {
                continue;
            };
            let kind = if td.is_component() {
                VertexKind::Port
            } else {
                VertexKind::Role
            };
            for flow in &flows[type_name] {
                arcs.insert(Arc {
                    from: Vertex {
                        instance: instance.name.clone(),
                        element: flow.source.clone(),
                        kind,
                    },
                    to: Vertex {
                        instance: instance.name.clone(),
                        element: flow.target.clone(),
                        kind,
                    },
                    kind: ArcKind::Int,
                });
            }
        }

        Ok(Aifg::from_parts(vertices, arcs, warnings))
    }

    fn from_parts(vertices: BTreeSet<Vertex>, arcs: BTreeSet<Arc>, warnings: Vec<String>) -> Aifg {
        let mut successors: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
        let mut predecessors: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
        for arc in &arcs {
            successors
                .entry(arc.from.clone())
                .or_default()
                .insert(arc.to.clone());
            predecessors
                .entry(arc.to.clone())
                .or_default()
                .insert(arc.from.clone());
        }
        Aifg {
            vertices,
            arcs,
            successors,
            predecessors,
            warnings,
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains_vertex(&self, v: &Vertex) -> bool {
        self.vertices.contains(v)
    }

    pub fn arcs(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.iter()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn contains_arc(&self, from: &Vertex, to: &Vertex, kind: ArcKind) -> bool {
        self.arcs.contains(&Arc {
            from: from.clone(),
            to: to.clone(),
            kind,
        })
    }

    pub fn successors(&self, v: &Vertex) -> impl Iterator<Item = &Vertex> {
        self.successors.get(v).into_iter().flatten()
    }

    pub fn predecessors(&self, v: &Vertex) -> impl Iterator<Item = &Vertex> {
        self.predecessors.get(v).into_iter().flatten()
    }

    /// Advisory findings collected while building; never part of graph
    /// equality or serialization.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Renders the graph in DOT form: one cluster per instance, ports as
    /// boxes, roles as ellipses, and arc classes as solid (`Com`),
    /// dashed (`Con`), and dotted (`Int`) edges.
    pub fn to_dot(&self) -> String {
        let mut by_instance: BTreeMap<&str, Vec<&Vertex>> = BTreeMap::new();
        for v in &self.vertices {
            by_instance.entry(&v.instance).or_default().push(v);
        }
        let mut out = String::from("digraph aifg {\n  rankdir=LR;\n");
        for (i, (instance, vertices)) in by_instance.iter().enumerate() {
            let _ = writeln!(out, "  subgraph cluster_{i} {{");
            let _ = writeln!(out, "    label=\"{instance}\";");
            for v in vertices {
                let shape = match v.kind {
                    VertexKind::Port => "box",
                    VertexKind::Role => "ellipse",
                };
                let _ = writeln!(out, "    \"{v}\" [shape={shape}];");
            }
            out.push_str("  }\n");
        }
        for arc in &self.arcs {
            let style = match arc.kind {
                ArcKind::Com => "solid",
                ArcKind::Con => "dashed",
                ArcKind::Int => "dotted",
            };
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [style={style}];", arc.from, arc.to);
        }
        out.push_str("}\n");
        out
    }

    /// Serializes the graph losslessly as JSON with sorted keys and a
    /// deterministic byte representation.
    pub fn to_json(&self) -> String {
        let doc = JsonGraph {
            arcs: self
                .arcs
                .iter()
                .map(|a| JsonArc {
                    from: a.from.display_name(),
                    kind: a.kind.to_string(),
                    to: a.to.display_name(),
                })
                .collect(),
            vertices: self
                .vertices
                .iter()
                .map(|v| JsonVertex {
                    element: v.element.clone(),
                    instance: v.instance.clone(),
                    kind: match v.kind {
                        VertexKind::Port => "Port".into(),
                        VertexKind::Role => "Role".into(),
                    },
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("graph serializes")
    }

    /// Reconstructs a graph from its [`Aifg::to_json`] form.
    pub fn from_json(text: &str) -> Result<Aifg, JsonError> {
        let doc: JsonGraph = serde_json::from_str(text)?;
        let mut vertices = BTreeSet::new();
        let mut by_name: BTreeMap<String, Vertex> = BTreeMap::new();
        for jv in doc.vertices {
            let kind = match jv.kind.as_str() {
                "Port" => VertexKind::Port,
                "Role" => VertexKind::Role,
                other => return Err(JsonError::BadKind(other.to_string())),
            };
            let v = Vertex {
                instance: jv.instance,
                element: jv.element,
                kind,
            };
            by_name.insert(v.display_name(), v.clone());
            vertices.insert(v);
        }
        let mut arcs = BTreeSet::new();
        for ja in doc.arcs {
            let kind = match ja.kind.as_str() {
                "Com" => ArcKind::Com,
                "Con" => ArcKind::Con,
                "Int" => ArcKind::Int,
                other => return Err(JsonError::BadKind(other.to_string())),
            };
            let from = by_name
                .get(&ja.from)
                .ok_or_else(|| endpoint_error(&ja.from))?
                .clone();
            let to = by_name
                .get(&ja.to)
                .ok_or_else(|| endpoint_error(&ja.to))?
                .clone();
            arcs.insert(Arc { from, to, kind });
        }
        Ok(Aifg::from_parts(vertices, arcs, Vec::new()))
    }
}

fn endpoint_error(name: &str) -> JsonError {
    if name.split_once('.').is_none() {
        JsonError::BadName(name.to_string())
    } else {
        JsonError::UnknownVertex(name.to_string())
    }
}

fn arc_lookup_error(attachment: &crate::model::Attachment, name: &str) -> BuildError {
    BuildError::Inconsistent(format!("attachment `{attachment}` cannot resolve `{name}`"))
}

#[derive(Serialize, Deserialize)]
struct JsonVertex {
    element: String,
    instance: String,
    kind: String,
}

#[derive(Serialize, Deserialize)]
struct JsonArc {
    from: String,
    kind: String,
    to: String,
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    arcs: Vec<JsonArc>,
    vertices: Vec<JsonVertex>,
}
