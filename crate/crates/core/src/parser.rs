//! Text form of architectural specifications.
//!
//! The grammar, whitespace-insensitive between tokens, with `--` starting
//! a comment that runs to the end of the line:
//!
//! ```text
//! spec       := "Configuration" IDENT typeDecl*
//!               ("Instances" instance*)? ("Attachments" attachment*)?
//!               "End" IDENT "."
//! typeDecl   := "Component" IDENT portDecl+ "Computation" "=" process
//!             | "Connector" IDENT roleDecl+ "Glue" "=" process
//! portDecl   := "Port" IDENT "=" process
//! roleDecl   := "Role" IDENT "=" process
//! process    := seq ("[]" seq)*
//! seq        := term ("->" term)*
//! term       := "(" process ")" | "STOP" | event | IDENT
//! event      := (IDENT ".")? IDENT ("!" IDENT? | "?" IDENT)?
//! instance   := IDENT ":" IDENT
//! attachment := IDENT "." IDENT "as" IDENT "." IDENT
//! ```
//!
//! An event is initiated when it carries `!` and observed when it carries
//! `?` or is a bare name. A bare IDENT in final position of a sequence
//! whose name equals the enclosing process definition is a recursion
//! reference; anywhere else it is an observed event without data.
//!
//! [`render`] produces the canonical text of a specification, and
//! `parse(render(s))` reconstructs `s` exactly.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::{
    Attachment, AttachmentEnd, ComponentType, Configuration, ConnectorType, Event, EventDirection,
    Instance, InterfaceElement, ProcessExpr, SpanKey, Specification,
};

/// A region of source text: 1-based line and column plus a length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Source locations of the declarations of a parsed specification,
/// keyed the same way validation diagnostics are.
pub type SpanMap = BTreeMap<SpanKey, SourceSpan>;

/// A lexical or syntactic failure; always the first one in document
/// order, with a deterministic message.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: expected {expected}, found {found}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Configuration,
    Component,
    Port,
    Computation,
    Connector,
    Role,
    Glue,
    Instances,
    Attachments,
    End,
    StopKw,
    Arrow,
    ChoiceOp,
    LParen,
    RParen,
    Dot,
    Bang,
    Question,
    Equals,
    Colon,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
    text: String,
}

fn keyword(word: &str) -> Option<Tok> {
    match word {
        "Configuration" => Some(Tok::Configuration),
        "Component" => Some(Tok::Component),
        "Port" => Some(Tok::Port),
        "Computation" => Some(Tok::Computation),
        "Connector" => Some(Tok::Connector),
        "Role" => Some(Tok::Role),
        "Glue" => Some(Tok::Glue),
        "Instances" => Some(Tok::Instances),
        "Attachments" => Some(Tok::Attachments),
        "End" => Some(Tok::End),
        "STOP" => Some(Tok::StopKw),
        _ => None,
    }
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line = 1usize;
    let mut column = 1usize;

    macro_rules! push {
        ($tok:expr, $text:expr, $len:expr, $col:expr) => {
            tokens.push(Token {
                tok: $tok,
                span: SourceSpan {
                    line,
                    column: $col,
                    length: $len,
                },
                text: $text,
            })
        };
    }

    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let start = column;
        match c {
            '-' => {
                chars.next();
                column += 1;
                match chars.peek() {
                    Some('>') => {
                        chars.next();
                        column += 1;
                        push!(Tok::Arrow, "->".into(), 2, start);
                    }
                    Some('-') => {
                        // Comment to end of line.
                        for c in chars.by_ref() {
                            column += 1;
                            if c == '\n' {
                                line += 1;
                                column = 1;
                                break;
                            }
                        }
                    }
                    other => {
                        return Err(ParseError {
                            span: SourceSpan {
                                line,
                                column: start,
                                length: 1,
                            },
                            expected: "`->` or `--`".into(),
                            found: match other {
                                Some(c) => format!("`-{c}`"),
                                None => "end of input".into(),
                            },
                        });
                    }
                }
            }
            '[' => {
                chars.next();
                column += 1;
                if chars.peek() == Some(&']') {
                    chars.next();
                    column += 1;
                    push!(Tok::ChoiceOp, "[]".into(), 2, start);
                } else {
                    return Err(ParseError {
                        span: SourceSpan {
                            line,
                            column: start,
                            length: 1,
                        },
                        expected: "`[]`".into(),
                        found: "`[`".into(),
                    });
                }
            }
            '(' | ')' | '.' | '!' | '?' | '=' | ':' => {
                chars.next();
                column += 1;
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '.' => Tok::Dot,
                    '!' => Tok::Bang,
                    '?' => Tok::Question,
                    '=' => Tok::Equals,
                    _ => Tok::Colon,
                };
                push!(tok, c.to_string(), 1, start);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                let len = word.len();
                let tok = keyword(&word).unwrap_or(Tok::Ident(word.clone()));
                push!(tok, word, len, start);
            }
            other => {
                return Err(ParseError {
                    span: SourceSpan {
                        line,
                        column: start,
                        length: other.len_utf8(),
                    },
                    expected: "a token".into(),
                    found: format!("`{other}`"),
                });
            }
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: SourceSpan {
            line,
            column,
            length: 1,
        },
        text: "end of input".into(),
    });
    Ok(tokens)
}

/// Parses a specification from source text.
pub fn parse(text: &str) -> Result<Specification, ParseError> {
    parse_with_spans(text).map(|(spec, _)| spec)
}

/// Parses a specification and records where each declaration was found,
/// for diagnostics that need source positions.
pub fn parse_with_spans(text: &str) -> Result<(Specification, SpanMap), ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        spans: SpanMap::new(),
    };
    let spec = parser.specification()?;
    Ok((spec, parser.spans))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    spans: SpanMap,
}

/// A parsed `term`, before sequence assembly decides what it means.
enum Term {
    Paren(ProcessExpr),
    Stop,
    /// `Computation` or `Glue` used as a recursion target.
    KwRef(&'static str),
    Event {
        event: Event,
        bare: bool,
    },
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError {
            span: t.span,
            expected: expected.into(),
            found: if t.tok == Tok::Eof {
                t.text.clone()
            } else {
                format!("`{}`", t.text)
            },
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.error(expected))
        }
    }

    fn expect_ident(&mut self, expected: &str) -> Result<(String, SourceSpan), ParseError> {
        match &self.peek().tok {
            Tok::Ident(name) => {
                let name = name.clone();
                let span = self.peek().span;
                self.bump();
                Ok((name, span))
            }
            _ => Err(self.error(expected)),
        }
    }

    fn specification(&mut self) -> Result<Specification, ParseError> {
        self.expect(Tok::Configuration, "keyword `Configuration`")?;
        let (name, name_span) = self.expect_ident("identifier")?;
        self.spans.insert(SpanKey::SpecName, name_span);

        let mut components = Vec::new();
        let mut connectors = Vec::new();
        loop {
            match self.peek().tok {
                Tok::Component => {
                    let c = self.component(components.len())?;
                    components.push(c);
                }
                Tok::Connector => {
                    let n = self.connector(connectors.len())?;
                    connectors.push(n);
                }
                _ => break,
            }
        }

        let mut instances = Vec::new();
        if self.peek().tok == Tok::Instances {
            self.bump();
            while let Tok::Ident(_) = self.peek().tok {
                let (iname, ispan) = self.expect_ident("identifier")?;
                self.spans.insert(SpanKey::Instance(instances.len()), ispan);
                self.expect(Tok::Colon, "`:`")?;
                let (tname, _) = self.expect_ident("type name")?;
                instances.push(Instance {
                    name: iname,
                    type_name: tname,
                });
            }
        }

        let mut attachments = Vec::new();
        if self.peek().tok == Tok::Attachments {
            self.bump();
            while let Tok::Ident(_) = self.peek().tok {
                let span = self.peek().span;
                self.spans
                    .insert(SpanKey::Attachment(attachments.len()), span);
                let port_side = self.attachment_end()?;
                let (as_word, as_span) = self.expect_ident("`as`")?;
                if as_word != "as" {
                    return Err(ParseError {
                        span: as_span,
                        expected: "`as`".into(),
                        found: format!("`{as_word}`"),
                    });
                }
                let role_side = self.attachment_end()?;
                attachments.push(Attachment {
                    port_side,
                    role_side,
                });
            }
        }

        self.expect(Tok::End, "keyword `End`")?;
        let (end_name, end_span) = self.expect_ident("identifier")?;
        if end_name != name {
            return Err(ParseError {
                span: end_span,
                expected: format!("configuration name `{name}`"),
                found: format!("`{end_name}`"),
            });
        }
        self.expect(Tok::Dot, "`.`")?;
        self.expect(Tok::Eof, "end of input")?;

        Ok(Specification {
            name,
            components,
            connectors,
            configuration: Configuration {
                instances,
                attachments,
            },
        })
    }

    fn attachment_end(&mut self) -> Result<AttachmentEnd, ParseError> {
        let (instance, _) = self.expect_ident("identifier")?;
        self.expect(Tok::Dot, "`.`")?;
        let (element, _) = self.expect_ident("identifier")?;
        Ok(AttachmentEnd { instance, element })
    }

    fn component(&mut self, index: usize) -> Result<ComponentType, ParseError> {
        self.expect(Tok::Component, "keyword `Component`")?;
        let (name, span) = self.expect_ident("identifier")?;
        self.spans.insert(SpanKey::Component(index), span);

        let mut ports = Vec::new();
        while self.peek().tok == Tok::Port {
            self.bump();
            let (pname, pspan) = self.expect_ident("identifier")?;
            self.spans.insert(SpanKey::Port(index, ports.len()), pspan);
            self.expect(Tok::Equals, "`=`")?;
            let behavior = self.process(&pname)?;
            ports.push(InterfaceElement {
                name: pname,
                behavior,
            });
        }
        if ports.is_empty() {
            return Err(self.error("keyword `Port`"));
        }

        let kw = self.expect(Tok::Computation, "keyword `Computation`")?;
        self.spans.insert(SpanKey::Computation(index), kw.span);
        self.expect(Tok::Equals, "`=`")?;
        let computation = self.process("Computation")?;
        Ok(ComponentType {
            name,
            ports,
            computation,
        })
    }

    fn connector(&mut self, index: usize) -> Result<ConnectorType, ParseError> {
        self.expect(Tok::Connector, "keyword `Connector`")?;
        let (name, span) = self.expect_ident("identifier")?;
        self.spans.insert(SpanKey::Connector(index), span);

        let mut roles = Vec::new();
        while self.peek().tok == Tok::Role {
            self.bump();
            let (rname, rspan) = self.expect_ident("identifier")?;
            self.spans.insert(SpanKey::Role(index, roles.len()), rspan);
            self.expect(Tok::Equals, "`=`")?;
            let behavior = self.process(&rname)?;
            roles.push(InterfaceElement {
                name: rname,
                behavior,
            });
        }
        if roles.is_empty() {
            return Err(self.error("keyword `Role`"));
        }

        let kw = self.expect(Tok::Glue, "keyword `Glue`")?;
        self.spans.insert(SpanKey::Glue(index), kw.span);
        self.expect(Tok::Equals, "`=`")?;
        let glue = self.process("Glue")?;
        Ok(ConnectorType { name, roles, glue })
    }

    /// Parses a process. `def_name` is the name of the enclosing
    /// definition, which a trailing bare identifier recurses to.
    fn process(&mut self, def_name: &str) -> Result<ProcessExpr, ParseError> {
        let mut branches = vec![self.sequence(def_name)?];
        while self.peek().tok == Tok::ChoiceOp {
            self.bump();
            branches.push(self.sequence(def_name)?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().expect("one branch")
        } else {
            ProcessExpr::Choice(branches)
        })
    }

    fn sequence(&mut self, def_name: &str) -> Result<ProcessExpr, ParseError> {
        let mut terms = vec![(self.term(def_name)?, self.prev_span())];
        while self.peek().tok == Tok::Arrow {
            self.bump();
            terms.push((self.term(def_name)?, self.prev_span()));
        }

        let (last, _) = terms.pop().expect("at least one term");
        let mut process = match last {
            Term::Paren(p) => p,
            Term::Stop => ProcessExpr::Stop,
            Term::KwRef(name) => ProcessExpr::Ref(name.into()),
            Term::Event { event, bare } => {
                if bare && event.name == def_name {
                    ProcessExpr::Ref(event.name)
                } else {
                    // A sequence ending in an event stops afterwards.
                    ProcessExpr::prefix(event, ProcessExpr::Stop)
                }
            }
        };
        for (term, span) in terms.into_iter().rev() {
            match term {
                Term::Event { event, .. } => process = ProcessExpr::prefix(event, process),
                Term::Paren(_) => {
                    return Err(ParseError {
                        span,
                        expected: "an event before `->`".into(),
                        found: "a parenthesized process".into(),
                    });
                }
                Term::Stop => {
                    return Err(ParseError {
                        span,
                        expected: "an event before `->`".into(),
                        found: "`STOP`".into(),
                    });
                }
                Term::KwRef(name) => {
                    return Err(ParseError {
                        span,
                        expected: "an event before `->`".into(),
                        found: format!("`{name}`"),
                    });
                }
            }
        }
        Ok(process)
    }

    /// Span of the most recently consumed token.
    fn prev_span(&self) -> SourceSpan {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn term(&mut self, def_name: &str) -> Result<Term, ParseError> {
        match &self.peek().tok {
            Tok::LParen => {
                self.bump();
                let p = self.process(def_name)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Term::Paren(p))
            }
            Tok::StopKw => {
                self.bump();
                Ok(Term::Stop)
            }
            Tok::Computation => {
                self.bump();
                Ok(Term::KwRef("Computation"))
            }
            Tok::Glue => {
                self.bump();
                Ok(Term::KwRef("Glue"))
            }
            Tok::Ident(_) => self.event_term(),
            _ => Err(self.error("a process term")),
        }
    }

    fn event_term(&mut self) -> Result<Term, ParseError> {
        let (first, _) = self.expect_ident("identifier")?;
        let (qualifier, name) = if self.peek().tok == Tok::Dot {
            self.bump();
            let (name, _) = self.expect_ident("identifier")?;
            (Some(first), name)
        } else {
            (None, first)
        };
        let (direction, data, suffixed) = match self.peek().tok {
            Tok::Bang => {
                self.bump();
                let data = if let Tok::Ident(_) = self.peek().tok {
                    Some(self.expect_ident("identifier")?.0)
                } else {
                    None
                };
                (EventDirection::Initiated, data, true)
            }
            Tok::Question => {
                self.bump();
                let (var, _) = self.expect_ident("variable name")?;
                (EventDirection::Observed, Some(var), true)
            }
            _ => (EventDirection::Observed, None, false),
        };
        let bare = qualifier.is_none() && !suffixed;
        Ok(Term::Event {
            event: Event {
                name,
                direction,
                data,
                qualifier,
            },
            bare,
        })
    }
}

/// Renders a specification in canonical form. The result re-parses to a
/// structurally equal specification; `spec` is expected to be valid.
pub fn render(spec: &Specification) -> String {
    let mut out = String::new();
    out.push_str(&format!("Configuration {}\n", spec.name));
    for component in &spec.components {
        out.push_str(&format!("  Component {}\n", component.name));
        for port in &component.ports {
            out.push_str(&format!(
                "    Port {} = {}\n",
                port.name,
                render_process(&port.behavior)
            ));
        }
        out.push_str(&format!(
            "    Computation = {}\n",
            render_process(&component.computation)
        ));
    }
    for connector in &spec.connectors {
        out.push_str(&format!("  Connector {}\n", connector.name));
        for role in &connector.roles {
            out.push_str(&format!(
                "    Role {} = {}\n",
                role.name,
                render_process(&role.behavior)
            ));
        }
        out.push_str(&format!("    Glue = {}\n", render_process(&connector.glue)));
    }
    out.push_str("  Instances\n");
    for instance in &spec.configuration.instances {
        out.push_str(&format!("    {}: {}\n", instance.name, instance.type_name));
    }
    out.push_str("  Attachments\n");
    for attachment in &spec.configuration.attachments {
        out.push_str(&format!("    {attachment}\n"));
    }
    out.push_str(&format!("End {}.\n", spec.name));
    out
}

/// Renders a process. Choice binds looser than `->`, so a choice nested
/// under a prefix or inside another choice is parenthesized.
pub fn render_process(p: &ProcessExpr) -> String {
    match p {
        ProcessExpr::Stop => "STOP".into(),
        ProcessExpr::Ref(name) => name.clone(),
        ProcessExpr::Prefix(event, rest) => {
            let rest_text = render_process(rest);
            if matches!(**rest, ProcessExpr::Choice(_)) {
                format!("{event} -> ({rest_text})")
            } else {
                format!("{event} -> {rest_text}")
            }
        }
        ProcessExpr::Choice(branches) => branches
            .iter()
            .map(|b| {
                let text = render_process(b);
                if matches!(b, ProcessExpr::Choice(_)) {
                    format!("({text})")
                } else {
                    text
                }
            })
            .collect::<Vec<_>>()
            .join(" [] "),
    }
}
