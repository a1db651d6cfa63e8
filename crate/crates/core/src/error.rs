use thiserror::Error;

use crate::label::Label;

/// Errors raised by the routed-map library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(Label),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("improper composition ({mode}): labels {escaping:?} escape {target}")]
    ImproperComposition {
        mode: &'static str,
        /// Labels reached by the gate relation but outside the required set.
        escaping: Vec<Label>,
        /// Which practical set was escaped (for example `S_second`).
        target: String,
    },

    #[error("route is not fully decoherent: entry {0} is off-diagonal")]
    NotFullDecoherence(String),

    #[error("map does not follow its route: {0}")]
    RouteViolation(String),

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("invalid slice: {0}")]
    InvalidSlice(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("incompatible restrictions on the shared boundary: {0}")]
    IncompatibleRestrictions(String),

    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("invalid IODAG: {0}")]
    InvalidIodag(String),

    #[error("lint failure: {0}")]
    LintFailure(String),

    #[error("not a practical isometry: {0}")]
    NotPracticalIsometry(String),
}

impl Error {
    /// The variant name, e.g. `RouteViolation`.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DomainMismatch(_) => "DomainMismatch",
            Error::UnknownLabel(_) => "UnknownLabel",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::ImproperComposition { .. } => "ImproperComposition",
            Error::NotFullDecoherence(_) => "NotFullDecoherence",
            Error::RouteViolation(_) => "RouteViolation",
            Error::TypeMismatch(_) => "TypeMismatch",
            Error::InvalidSlice(_) => "InvalidSlice",
            Error::InvalidCircuit(_) => "InvalidCircuit",
            Error::LengthMismatch(_) => "LengthMismatch",
            Error::IncompatibleRestrictions(_) => "IncompatibleRestrictions",
            Error::InterfaceMismatch(_) => "InterfaceMismatch",
            Error::UnknownNode(_) => "UnknownNode",
            Error::InvalidIodag(_) => "InvalidIodag",
            Error::LintFailure(_) => "LintFailure",
            Error::NotPracticalIsometry(_) => "NotPracticalIsometry",
        }
    }

    /// Splits a message prefixed by [`Error::at`] into its location and the rest.
    pub fn location(&self) -> (Option<String>, String) {
        let msg = match self {
            Error::UnknownLabel(l) => return (None, format!("unknown label `{l}`")),
            Error::ImproperComposition { .. } => return (None, self.to_string()),
            Error::DomainMismatch(m)
            | Error::ShapeMismatch(m)
            | Error::InvariantViolation(m)
            | Error::NotFullDecoherence(m)
            | Error::RouteViolation(m)
            | Error::TypeMismatch(m)
            | Error::InvalidSlice(m)
            | Error::InvalidCircuit(m)
            | Error::LengthMismatch(m)
            | Error::IncompatibleRestrictions(m)
            | Error::InterfaceMismatch(m)
            | Error::UnknownNode(m)
            | Error::InvalidIodag(m)
            | Error::LintFailure(m)
            | Error::NotPracticalIsometry(m) => m,
        };
        let mut loc = String::new();
        let mut rest = msg.as_str();
        while rest.starts_with('/') {
            let Some((head, tail)) = rest.split_once(": ") else {
                break;
            };
            loc.push_str(head);
            rest = tail;
        }
        ((!loc.is_empty()).then_some(loc), rest.to_string())
    }

    /// Prefixes the message with a JSON-pointer-style location such as `/boxes/2/map`.
    pub fn at(self, location: &str) -> Error {
        let wrap = |m: String| format!("{location}: {m}");
        match self {
            Error::DomainMismatch(m) => Error::DomainMismatch(wrap(m)),
            Error::ShapeMismatch(m) => Error::ShapeMismatch(wrap(m)),
            Error::InvariantViolation(m) => Error::InvariantViolation(wrap(m)),
            Error::NotFullDecoherence(m) => Error::NotFullDecoherence(wrap(m)),
            Error::RouteViolation(m) => Error::RouteViolation(wrap(m)),
            Error::TypeMismatch(m) => Error::TypeMismatch(wrap(m)),
            Error::InvalidSlice(m) => Error::InvalidSlice(wrap(m)),
            Error::InvalidCircuit(m) => Error::InvalidCircuit(wrap(m)),
            Error::LengthMismatch(m) => Error::LengthMismatch(wrap(m)),
            Error::IncompatibleRestrictions(m) => Error::IncompatibleRestrictions(wrap(m)),
            Error::InterfaceMismatch(m) => Error::InterfaceMismatch(wrap(m)),
            Error::InvalidIodag(m) => Error::InvalidIodag(wrap(m)),
            Error::LintFailure(m) => Error::LintFailure(wrap(m)),
            Error::NotPracticalIsometry(m) => Error::NotPracticalIsometry(wrap(m)),
            Error::UnknownLabel(l) => {
                Error::InvariantViolation(wrap(format!("unknown label `{l}`")))
            }
            Error::UnknownNode(n) => Error::UnknownNode(wrap(n)),
            other @ Error::ImproperComposition { .. } => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
