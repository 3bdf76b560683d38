//! In-memory model of an architectural specification: component and
//! connector types carrying CSP-style behavior processes, and the
//! configuration of instances and attachments that wires them together.
//!
//! All values are immutable after construction and safe to share across
//! threads.

use std::fmt;

use serde::Serialize;

/// Reserved words of the surface syntax. They may not be used as names.
pub const KEYWORDS: &[&str] = &[
    "Configuration",
    "Component",
    "Port",
    "Computation",
    "Connector",
    "Role",
    "Glue",
    "Instances",
    "Attachments",
    "End",
    "STOP",
];

/// Returns true if `s` can serve as a name in a specification: an ASCII
/// identifier that is not a reserved word.
pub fn is_valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    let leading_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    leading_ok && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&s)
}

/// Whether an event is produced by the process that mentions it or
/// received from its environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EventDirection {
    Initiated,
    Observed,
}

/// One event occurrence in a behavior process.
///
/// In port and role protocols events are unqualified; in a computation or
/// glue the qualifier names the port or role the event belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Event {
    pub name: String,
    pub direction: EventDirection,
    /// Name of the data variable the event carries, if any.
    pub data: Option<String>,
    pub qualifier: Option<String>,
}

impl Event {
    pub fn observed(name: impl Into<String>) -> Self {
        Event {
            name: name.into(),
            direction: EventDirection::Observed,
            data: None,
            qualifier: None,
        }
    }

    pub fn initiated(name: impl Into<String>) -> Self {
        Event {
            name: name.into(),
            direction: EventDirection::Initiated,
            data: None,
            qualifier: None,
        }
    }

    pub fn with_data(mut self, var: impl Into<String>) -> Self {
        self.data = Some(var.into());
        self
    }

    pub fn qualified(mut self, qualifier: impl Into<String>) -> Self {
        self.qualifier = Some(qualifier.into());
        self
    }

    pub fn is_initiated(&self) -> bool {
        self.direction == EventDirection::Initiated
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = &self.qualifier {
            write!(f, "{q}.")?;
        }
        write!(f, "{}", self.name)?;
        match (self.direction, &self.data) {
            (EventDirection::Initiated, Some(v)) => write!(f, "!{v}"),
            (EventDirection::Initiated, None) => write!(f, "!"),
            (EventDirection::Observed, Some(v)) => write!(f, "?{v}"),
            (EventDirection::Observed, None) => Ok(()),
        }
    }
}

/// A behavior process: event prefixing, choice between branches,
/// recursion back to the defining process, or stop.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum ProcessExpr {
    Prefix(Event, Box<ProcessExpr>),
    Choice(Vec<ProcessExpr>),
    Ref(String),
    Stop,
}

impl ProcessExpr {
    pub fn prefix(event: Event, rest: ProcessExpr) -> Self {
        ProcessExpr::Prefix(event, Box::new(rest))
    }

    /// All events of the process in preorder.
    pub fn events(&self) -> Vec<&Event> {
        let mut out = Vec::new();
        self.visit_events(&mut |e| out.push(e));
        out
    }

    pub fn event_count(&self) -> usize {
        let mut n = 0;
        self.visit_events(&mut |_| n += 1);
        n
    }

    fn visit_events<'a>(&'a self, f: &mut impl FnMut(&'a Event)) {
        match self {
            ProcessExpr::Prefix(event, rest) => {
                f(event);
                rest.visit_events(f);
            }
            ProcessExpr::Choice(branches) => {
                for b in branches {
                    b.visit_events(f);
                }
            }
            ProcessExpr::Ref(_) | ProcessExpr::Stop => {}
        }
    }
}

/// A named port or role together with its local protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterfaceElement {
    pub name: String,
    pub behavior: ProcessExpr,
}

/// A component type: a named computation unit with a port interface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentType {
    pub name: String,
    pub ports: Vec<InterfaceElement>,
    pub computation: ProcessExpr,
}

/// A connector type: a named interaction pattern with a role interface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectorType {
    pub name: String,
    pub roles: Vec<InterfaceElement>,
    pub glue: ProcessExpr,
}

/// Either kind of type definition, for analyses that treat ports and
/// roles uniformly.
#[derive(Debug, Clone, Copy)]
pub enum TypeDef<'a> {
    Component(&'a ComponentType),
    Connector(&'a ConnectorType),
}

impl<'a> TypeDef<'a> {
    pub fn name(&self) -> &'a str {
        match self {
            TypeDef::Component(c) => &c.name,
            TypeDef::Connector(n) => &n.name,
        }
    }

    /// The declared ports or roles, in declaration order.
    pub fn elements(&self) -> &'a [InterfaceElement] {
        match self {
            TypeDef::Component(c) => &c.ports,
            TypeDef::Connector(n) => &n.roles,
        }
    }

    /// The computation or glue process.
    pub fn body(&self) -> &'a ProcessExpr {
        match self {
            TypeDef::Component(c) => &c.computation,
            TypeDef::Connector(n) => &n.glue,
        }
    }

    pub fn element(&self, name: &str) -> Option<&'a InterfaceElement> {
        self.elements().iter().find(|e| e.name == name)
    }

    pub fn is_component(&self) -> bool {
        matches!(self, TypeDef::Component(_))
    }

    pub fn body_label(&self) -> &'static str {
        if self.is_component() {
            "Computation"
        } else {
            "Glue"
        }
    }

    pub fn element_label(&self) -> &'static str {
        if self.is_component() {
            "port"
        } else {
            "role"
        }
    }
}

/// A named instantiation of a component or connector type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub name: String,
    pub type_name: String,
}

/// One side of an attachment: an instance together with one of its
/// ports or roles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttachmentEnd {
    pub instance: String,
    pub element: String,
}

impl fmt::Display for AttachmentEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.instance, self.element)
    }
}

/// A binding of a component instance's port to a connector instance's
/// role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Attachment {
    pub port_side: AttachmentEnd,
    pub role_side: AttachmentEnd,
}

impl fmt::Display for Attachment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} as {}", self.port_side, self.role_side)
    }
}

/// The topology section of a specification.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Configuration {
    pub instances: Vec<Instance>,
    pub attachments: Vec<Attachment>,
}

/// A complete architectural specification: component types, connector
/// types, and a configuration, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Specification {
    pub name: String,
    pub components: Vec<ComponentType>,
    pub connectors: Vec<ConnectorType>,
    pub configuration: Configuration,
}

impl Specification {
    pub fn component(&self, name: &str) -> Option<&ComponentType> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn connector(&self, name: &str) -> Option<&ConnectorType> {
        self.connectors.iter().find(|n| n.name == name)
    }

    /// Looks up a type of either kind by name.
    pub fn type_def(&self, name: &str) -> Option<TypeDef<'_>> {
        self.component(name)
            .map(TypeDef::Component)
            .or_else(|| self.connector(name).map(TypeDef::Connector))
    }

    pub fn instance(&self, name: &str) -> Option<&Instance> {
        self.configuration.instances.iter().find(|i| i.name == name)
    }

    /// The type of a named instance, if both resolve.
    pub fn instance_type(&self, instance_name: &str) -> Option<TypeDef<'_>> {
        self.instance(instance_name)
            .and_then(|i| self.type_def(&i.type_name))
    }

    pub fn instances_of<'a>(&'a self, type_name: &'a str) -> impl Iterator<Item = &'a Instance> {
        self.configuration
            .instances
            .iter()
            .filter(move |i| i.type_name == type_name)
    }
}

/// Identifies the declaration a diagnostic is about. Indices point into
/// the specification's ordered lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SpanKey {
    SpecName,
    Component(usize),
    Port(usize, usize),
    Computation(usize),
    Connector(usize),
    Role(usize, usize),
    Glue(usize),
    Instance(usize),
    Attachment(usize),
}

/// A validation finding, tied to the declaration it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub key: SpanKey,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn diag(diags: &mut Vec<Diagnostic>, key: SpanKey, message: String) {
    diags.push(Diagnostic { key, message });
}

/// Checks every structural invariant of the model and returns one
/// diagnostic per violation, in declaration order. An empty result means
/// the specification is well formed.
pub fn validate(spec: &Specification) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    if !is_valid_identifier(&spec.name) {
        diag(
            &mut diags,
            SpanKey::SpecName,
            format!("`{}` is not a valid configuration name", spec.name),
        );
    }

    let mut type_names = Vec::new();
    for (i, component) in spec.components.iter().enumerate() {
        check_type_name(
            &mut diags,
            SpanKey::Component(i),
            &component.name,
            &mut type_names,
        );
        check_interface(
            &mut diags,
            TypeDef::Component(component),
            |j| SpanKey::Port(i, j),
            SpanKey::Computation(i),
        );
    }
    for (i, connector) in spec.connectors.iter().enumerate() {
        check_type_name(
            &mut diags,
            SpanKey::Connector(i),
            &connector.name,
            &mut type_names,
        );
        check_interface(
            &mut diags,
            TypeDef::Connector(connector),
            |j| SpanKey::Role(i, j),
            SpanKey::Glue(i),
        );
    }

    let mut instance_names = Vec::new();
    for (k, instance) in spec.configuration.instances.iter().enumerate() {
        let key = SpanKey::Instance(k);
        if !is_valid_identifier(&instance.name) {
            diag(
                &mut diags,
                key,
                format!("`{}` is not a valid instance name", instance.name),
            );
        }
        if instance_names.contains(&instance.name.as_str()) {
            diag(
                &mut diags,
                key,
                format!("duplicate instance name `{}`", instance.name),
            );
        } else {
            instance_names.push(&instance.name);
        }
        if spec.type_def(&instance.type_name).is_none() {
            diag(
                &mut diags,
                key,
                format!(
                    "instance `{}` refers to undeclared type `{}`",
                    instance.name, instance.type_name
                ),
            );
        }
    }

    for (k, attachment) in spec.configuration.attachments.iter().enumerate() {
        let key = SpanKey::Attachment(k);
        check_attachment_end(
            &mut diags,
            spec,
            key,
            attachment,
            &attachment.port_side,
            true,
        );
        check_attachment_end(
            &mut diags,
            spec,
            key,
            attachment,
            &attachment.role_side,
            false,
        );
    }

    diags
}

fn check_type_name<'a>(
    diags: &mut Vec<Diagnostic>,
    key: SpanKey,
    name: &'a str,
    seen: &mut Vec<&'a str>,
) {
    if !is_valid_identifier(name) {
        diag(diags, key, format!("`{name}` is not a valid type name"));
    }
    if seen.contains(&name) {
        diag(diags, key, format!("duplicate type name `{name}`"));
    } else {
        seen.push(name);
    }
}

fn check_interface(
    diags: &mut Vec<Diagnostic>,
    td: TypeDef<'_>,
    element_key: impl Fn(usize) -> SpanKey,
    body_key: SpanKey,
) {
    let owner = format!(
        "{} `{}`",
        if td.is_component() {
            "component"
        } else {
            "connector"
        },
        td.name()
    );
    let mut element_names = Vec::new();
    for (j, element) in td.elements().iter().enumerate() {
        let key = element_key(j);
        if !is_valid_identifier(&element.name) {
            diag(
                diags,
                key,
                format!(
                    "{owner}: `{}` is not a valid {} name",
                    element.name,
                    td.element_label()
                ),
            );
        }
        if element_names.contains(&element.name.as_str()) {
            diag(
                diags,
                key,
                format!(
                    "{owner}: duplicate {} name `{}`",
                    td.element_label(),
                    element.name
                ),
            );
        } else {
            element_names.push(&element.name);
        }
        let ctx = ProcessContext {
            owner: &owner,
            place: &format!("{} `{}`", td.element_label(), element.name),
            def_name: &element.name,
            declared: None,
        };
        check_process(diags, key, &element.behavior, &ctx);
    }

    let declared: Vec<&str> = td.elements().iter().map(|e| e.name.as_str()).collect();
    let ctx = ProcessContext {
        owner: &owner,
        place: td.body_label(),
        def_name: td.body_label(),
        declared: Some(&declared),
    };
    check_process(diags, body_key, td.body(), &ctx);
}

struct ProcessContext<'a> {
    owner: &'a str,
    place: &'a str,
    def_name: &'a str,
    /// `Some` for a computation or glue, holding the declared ports or
    /// roles qualifiers must resolve to; `None` for an element protocol,
    /// whose events must be unqualified.
    declared: Option<&'a [&'a str]>,
}

fn check_process(diags: &mut Vec<Diagnostic>, key: SpanKey, p: &ProcessExpr, ctx: &ProcessContext) {
    match p {
        ProcessExpr::Prefix(event, rest) => {
            check_event(diags, key, event, ctx);
            check_process(diags, key, rest, ctx);
        }
        ProcessExpr::Choice(branches) => {
            if branches.len() < 2 {
                diag(
                    diags,
                    key,
                    format!(
                        "{}, {}: choice must have at least two branches",
                        ctx.owner, ctx.place
                    ),
                );
            }
            for b in branches {
                check_process(diags, key, b, ctx);
            }
        }
        ProcessExpr::Ref(name) => {
            if name != ctx.def_name {
                diag(
                    diags,
                    key,
                    format!(
                        "{}, {}: recursion to `{name}` instead of the defining process `{}`",
                        ctx.owner, ctx.place, ctx.def_name
                    ),
                );
            }
        }
        ProcessExpr::Stop => {}
    }
}

fn check_event(diags: &mut Vec<Diagnostic>, key: SpanKey, event: &Event, ctx: &ProcessContext) {
    if !is_valid_identifier(&event.name) {
        diag(
            diags,
            key,
            format!(
                "{}, {}: `{}` is not a valid event name",
                ctx.owner, ctx.place, event.name
            ),
        );
    }
    if let Some(var) = &event.data {
        if !is_valid_identifier(var) {
            diag(
                diags,
                key,
                format!(
                    "{}, {}: `{var}` is not a valid variable name",
                    ctx.owner, ctx.place
                ),
            );
        }
    }
    match (ctx.declared, &event.qualifier) {
        (Some(declared), Some(q)) => {
            if !declared.contains(&q.as_str()) {
                diag(
                    diags,
                    key,
                    format!(
                        "{}, {}: event `{event}` is qualified by undeclared element `{q}`",
                        ctx.owner, ctx.place
                    ),
                );
            }
        }
        (Some(_), None) => {
            diag(
                diags,
                key,
                format!(
                    "{}, {}: event `{event}` must be qualified",
                    ctx.owner, ctx.place
                ),
            );
        }
        (None, Some(_)) => {
            diag(
                diags,
                key,
                format!(
                    "{}, {}: event `{event}` must not be qualified in an interface protocol",
                    ctx.owner, ctx.place
                ),
            );
        }
        (None, None) => {}
    }
}

fn check_attachment_end(
    diags: &mut Vec<Diagnostic>,
    spec: &Specification,
    key: SpanKey,
    attachment: &Attachment,
    end: &AttachmentEnd,
    port_side: bool,
) {
    let Some(instance) = spec.instance(&end.instance) else {
        diag(
            diags,
            key,
            format!(
                "attachment `{attachment}` refers to undeclared instance `{}`",
                end.instance
            ),
        );
        return;
    };
    // An unresolved instance type is already diagnosed at the instance.
    let Some(td) = spec.type_def(&instance.type_name) else {
        return;
    };
    let (expected, side) = if port_side {
        ("component", "port side")
    } else {
        ("connector", "role side")
    };
    if td.is_component() != port_side {
        diag(
            diags,
            key,
            format!("attachment `{attachment}`: {side} `{end}` must name a {expected} instance"),
        );
        return;
    }
    if td.element(&end.element).is_none() {
        diag(
            diags,
            key,
            format!(
                "attachment `{attachment}`: {} `{}` has no {} named `{}`",
                expected,
                end.instance,
                td.element_label(),
                end.element
            ),
        );
    }
}
