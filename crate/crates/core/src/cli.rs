//! Command-line front end: parse/validate a specification, export its
//! information flow graph, or slice it.
//!
//! Exit codes: 0 on success, 1 when the specification or criterion is at
//! fault (parse, validation, graph build, criterion errors), 2 on I/O
//! and usage errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use crate::aifg::Aifg;
use crate::model::validate;
use crate::parser::{parse_with_spans, render};
use crate::slicer::{slice, CriterionError, SliceDirection, SlicingCriterion};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliCommand {
    Parse,
    Graph,
    Slice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Dot,
}

/// Everything one invocation does, independent of how the arguments
/// were parsed.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub command: CliCommand,
    pub input_path: PathBuf,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
    pub direction: Option<SliceDirection>,
    pub instance: Option<String>,
    pub elements: Vec<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "archslice",
    version,
    about = "Parse, graph, and slice architectural specifications"
)]
pub struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a specification, then print it back out.
    Parse {
        /// Output format: canonical text or JSON.
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Write the result here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// The `.wrt` specification to read.
        input: PathBuf,
    },
    /// Export the information flow graph of a specification.
    Graph {
        /// Output format: DOT or JSON.
        #[arg(long, value_enum, default_value_t = OutputFormat::Dot)]
        format: OutputFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
        input: PathBuf,
    },
    /// Slice a specification on an instance and its ports or roles.
    #[command(group(ArgGroup::new("dir").required(true).args(["backward", "forward"])))]
    Slice {
        /// Keep what might affect the criterion.
        #[arg(long)]
        backward: bool,
        /// Keep what the criterion might affect.
        #[arg(long)]
        forward: bool,
        /// The instance of interest.
        #[arg(long)]
        instance: String,
        /// Comma-separated ports or roles of the instance; defaults to
        /// all of them.
        #[arg(long, value_delimiter = ',')]
        elements: Vec<String>,
        /// Output format: reduced specification text or JSON.
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
        input: PathBuf,
    },
}

impl CliArgs {
    pub fn into_config(self) -> CliConfig {
        match self.command {
            Command::Parse {
                format,
                output,
                input,
            } => CliConfig {
                command: CliCommand::Parse,
                input_path: input,
                output_path: output,
                format,
                direction: None,
                instance: None,
                elements: Vec::new(),
            },
            Command::Graph {
                format,
                output,
                input,
            } => CliConfig {
                command: CliCommand::Graph,
                input_path: input,
                output_path: output,
                format,
                direction: None,
                instance: None,
                elements: Vec::new(),
            },
            Command::Slice {
                backward,
                forward: _,
                instance,
                elements,
                format,
                output,
                input,
            } => CliConfig {
                command: CliCommand::Slice,
                input_path: input,
                output_path: output,
                format,
                direction: Some(if backward {
                    SliceDirection::Backward
                } else {
                    SliceDirection::Forward
                }),
                instance: Some(instance),
                elements,
            },
        }
    }
}

/// Runs one configured invocation, writing the artifact to `stdout` (or
/// the configured output path) and diagnostics to `stderr`. Returns the
/// process exit code.
pub fn run(config: &CliConfig, stdout: &mut impl Write, stderr: &mut impl Write) -> i32 {
    match execute(config, stdout, stderr) {
        Ok(()) => 0,
        Err(code) => code,
    }
}

fn execute(
    config: &CliConfig,
    stdout: &mut impl Write,
    stderr: &mut impl Write,
) -> Result<(), i32> {
    let path = config.input_path.display().to_string();
    let text = fs::read_to_string(&config.input_path).map_err(|e| {
        let _ = writeln!(stderr, "error: cannot read `{path}`: {e}");
        2
    })?;

    let (spec, spans) = parse_with_spans(&text).map_err(|e| {
        let _ = writeln!(
            stderr,
            "{path}:{}: error: expected {}, found {}",
            e.span, e.expected, e.found
        );
        1
    })?;

    let diagnostics = validate(&spec);
    if !diagnostics.is_empty() {
        for d in &diagnostics {
            let _ = match spans.get(&d.key) {
                Some(span) => writeln!(stderr, "{path}:{span}: error: {}", d.message),
                None => writeln!(stderr, "{path}: error: {}", d.message),
            };
        }
        return Err(1);
    }

    let artifact = match config.command {
        CliCommand::Parse => match config.format {
            OutputFormat::Text => render(&spec),
            OutputFormat::Json => to_pretty_json(&spec),
            OutputFormat::Dot => return Err(usage(stderr, "`parse` emits text or json, not dot")),
        },
        CliCommand::Graph => {
            let graph = Aifg::build(&spec).map_err(|e| {
                let _ = writeln!(stderr, "{path}: error: {e}");
                1
            })?;
            match config.format {
                OutputFormat::Dot => graph.to_dot(),
                OutputFormat::Json => {
                    let mut s = graph.to_json();
                    s.push('\n');
                    s
                }
                OutputFormat::Text => {
                    return Err(usage(stderr, "`graph` emits dot or json, not text"))
                }
            }
        }
        CliCommand::Slice => {
            let direction = config.direction.ok_or_else(|| {
                usage(
                    stderr,
                    "`slice` needs a direction (--backward or --forward)",
                )
            })?;
            let instance = config
                .instance
                .as_deref()
                .ok_or_else(|| usage(stderr, "`slice` needs --instance"))?;
            let elements = if config.elements.is_empty() {
                let Some(td) = spec.instance_type(instance) else {
                    let e = CriterionError::UnknownInstance(instance.to_string());
                    let _ = writeln!(stderr, "error: {e}");
                    return Err(1);
                };
                td.elements().iter().map(|e| e.name.clone()).collect()
            } else {
                config.elements.clone()
            };
            let criterion = SlicingCriterion::new(instance, elements);
            let reduced = slice(&spec, &criterion, direction).map_err(|e| {
                let _ = writeln!(stderr, "error: {e}");
                1
            })?;
            match config.format {
                OutputFormat::Text => render(&reduced.spec),
                OutputFormat::Json => to_pretty_json(&reduced),
                OutputFormat::Dot => {
                    return Err(usage(stderr, "`slice` emits text or json, not dot"))
                }
            }
        }
    };

    match &config.output_path {
        Some(out) => fs::write(out, artifact).map_err(|e| {
            let _ = writeln!(stderr, "error: cannot write `{}`: {e}", out.display());
            2
        }),
        None => stdout.write_all(artifact.as_bytes()).map_err(|e| {
            let _ = writeln!(stderr, "error: cannot write output: {e}");
            2
        }),
    }
}

fn usage(stderr: &mut impl Write, message: &str) -> i32 {
    let _ = writeln!(stderr, "usage error: {message}");
    2
}

fn to_pretty_json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("model serializes");
    s.push('\n');
    s
}
