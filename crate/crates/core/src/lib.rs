//! Routed quantum circuits: boolean routes, routed linear and completely
//! positive maps over partitioned Hilbert spaces, accessible-space analysis of
//! circuit slices, and index-matching circuits (IODAGs) with well-indexedness
//! linting and interpretation.

pub mod circuit;
pub mod error;
pub mod iodag;
pub mod label;
pub mod linalg;
pub mod par;
pub mod relations;
pub mod routedcpm;
pub mod routedmap;
pub mod sample;
pub mod spaces;

pub use circuit::{CheckMode, Mode, RoutedCircuit};
pub use error::{Error, Result};
pub use label::{Atom, IndexSet, Label, Subset};
pub use relations::{CpRelation, Relation};
pub use routedcpm::RoutedCpm;
pub use routedmap::{GateMode, RoutedMap};
pub use spaces::PartitionedSpace;
