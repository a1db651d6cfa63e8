//! Versioned JSON documents holding a routed circuit or an IODAG.

use std::collections::BTreeMap;
use std::path::Path;

use routed::circuit::CircuitRepr;
use routed::iodag::{Interpretation, InterpretationRepr, Iodag, IodagRepr};
use routed::RoutedCircuit;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const FORMAT_VERSION: &str = "1";

/// On-disk layout: exactly one of `circuit` or `iodag`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentRepr {
    pub format_version: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iodag: Option<IodagRepr>,
}

#[derive(Clone, Debug)]
pub enum Payload {
    Circuit(RoutedCircuit),
    Iodag {
        graph: Iodag,
        interpretation: Option<Interpretation>,
    },
}

#[derive(Clone, Debug)]
pub struct Document {
    pub metadata: BTreeMap<String, Value>,
    pub payload: Payload,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
    /// The payload is well-formed JSON of the right shape but breaks a
    /// library invariant; `kind` is the library error variant.
    #[error("{kind} at {location}: {message}")]
    Invalid {
        kind: &'static str,
        location: String,
        message: String,
    },
}

impl LoadError {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadError::Io { .. } => "IoError",
            LoadError::Parse { .. } => "ParseError",
            LoadError::Schema { .. } => "SchemaError",
            LoadError::Invalid { kind, .. } => kind,
        }
    }

    pub fn location(&self) -> Option<&str> {
        match self {
            LoadError::Io { .. } => None,
            LoadError::Parse { location, .. }
            | LoadError::Schema { location, .. }
            | LoadError::Invalid { location, .. } => Some(location),
        }
    }

    pub fn message(&self) -> String {
        match self {
            LoadError::Io { message, .. }
            | LoadError::Parse { message, .. }
            | LoadError::Schema { message, .. }
            | LoadError::Invalid { message, .. } => message.clone(),
        }
    }
}

fn invalid(prefix: &str, e: routed::Error) -> LoadError {
    let (loc, message) = e.location();
    LoadError::Invalid {
        kind: e.kind(),
        location: format!("{prefix}{}", loc.unwrap_or_default()),
        message,
    }
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => {
                out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1")))
            }
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Parses and fully validates a document.
pub fn parse(text: &str, tol: f64) -> Result<Document, LoadError> {
    if text.trim().is_empty() {
        return Err(LoadError::Schema {
            location: "/".into(),
            message: "empty document".into(),
        });
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let repr: DocumentRepr = serde_path_to_error::deserialize(de).map_err(|e| {
        let location = pointer(e.path());
        let inner = e.into_inner();
        if inner.is_data() {
            LoadError::Schema {
                location,
                message: strip_position(&inner.to_string()),
            }
        } else {
            LoadError::Parse {
                location: format!("line {}, column {}", inner.line(), inner.column()),
                message: strip_position(&inner.to_string()),
            }
        }
    })?;
    repr.validate(tol)
}

/// serde_json appends " at line L column C"; locations are reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn load(path: &Path, tol: f64) -> Result<Document, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse(&text, tol)
}

impl DocumentRepr {
    pub fn validate(&self, tol: f64) -> Result<Document, LoadError> {
        if self.format_version != FORMAT_VERSION {
            return Err(LoadError::Schema {
                location: "/format_version".into(),
                message: format!(
                    "unsupported format version `{}` (expected `{FORMAT_VERSION}`)",
                    self.format_version
                ),
            });
        }
        let payload = match (&self.circuit, &self.iodag) {
            (Some(c), None) => {
                Payload::Circuit(c.to_circuit(tol).map_err(|e| invalid("/circuit", e))?)
            }
            (None, Some(g)) => {
                let graph = g.to_iodag().map_err(|e| invalid("/iodag", e))?;
                let interpretation = g
                    .interpretation
                    .as_ref()
                    .map(|i| i.to_interpretation(&graph, tol))
                    .transpose()
                    .map_err(|e| invalid("/iodag", e))?;
                Payload::Iodag {
                    graph,
                    interpretation,
                }
            }
            _ => {
                return Err(LoadError::Schema {
                    location: "/".into(),
                    message: "a document holds exactly one of `circuit` or `iodag`".into(),
                })
            }
        };
        Ok(Document {
            metadata: self.metadata.clone(),
            payload,
        })
    }
}

impl Document {
    pub fn circuit(metadata: BTreeMap<String, Value>, c: RoutedCircuit) -> Self {
        Document {
            metadata,
            payload: Payload::Circuit(c),
        }
    }

    pub fn iodag(
        metadata: BTreeMap<String, Value>,
        graph: Iodag,
        interpretation: Option<Interpretation>,
    ) -> Self {
        Document {
            metadata,
            payload: Payload::Iodag {
                graph,
                interpretation,
            },
        }
    }

    pub fn to_repr(&self) -> DocumentRepr {
        let (circuit, iodag) = match &self.payload {
            Payload::Circuit(c) => (Some(CircuitRepr::from_circuit(c)), None),
            Payload::Iodag {
                graph,
                interpretation,
            } => {
                let mut g = IodagRepr::from_iodag(graph);
                g.interpretation = interpretation
                    .as_ref()
                    .map(InterpretationRepr::from_interpretation);
                (None, Some(g))
            }
        };
        DocumentRepr {
            format_version: FORMAT_VERSION.into(),
            metadata: self.metadata.clone(),
            circuit,
            iodag,
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_repr()).expect("documents serialize");
        s.push('\n');
        s
    }
}
