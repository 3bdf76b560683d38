//! Parsing, information-flow analysis, and slicing of architectural
//! specifications written in a WRIGHT-style architecture description
//! language.
//!
//! A specification declares component and connector types whose behavior
//! is given by CSP-style processes, and a configuration of instances and
//! attachments. From the processes the library infers the direction in
//! which information crosses each port and role, builds an arc-classified
//! information flow graph over the configuration, and computes backward
//! and forward slices: reduced specifications containing only what might
//! affect, or be affected by, a chosen instance through chosen ports or
//! roles.

pub mod aifg;
pub mod cli;
pub mod flow;
pub mod model;
pub mod parser;
pub mod slicer;

pub use aifg::{Aifg, Arc, ArcKind, BuildError, Vertex, VertexKind};
pub use flow::{classify_element, enumerate_paths, internal_flows, DirectionClass, InternalFlow};
pub use model::{
    validate, ComponentType, Configuration, ConnectorType, Diagnostic, Event, EventDirection,
    Instance, InterfaceElement, ProcessExpr, Specification, TypeDef,
};
pub use parser::{parse, parse_with_spans, render, ParseError, SourceSpan};
pub use slicer::{
    backward_slice_graph, forward_slice_graph, reduce_specification, resolve_criterion, slice,
    GraphSlice, ReducedSpecification, SliceDirection, SliceError, SlicingCriterion,
};
