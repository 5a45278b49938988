//! Minimal Cantor systems as ordered Bratteli diagrams, with exact
//! dimension-group computations and explicit speedup constructions.

pub mod arith;
pub mod bv;
pub mod dimension;
pub mod error;
pub mod format;
pub mod groups;
pub mod speedup;
pub mod towers;

pub use bv::{
    Atom, ClopenSet, CylinderFunction, Direction, OrderedBratteliDiagram, PathEdge, PointPrefix, Successor, Tail,
    TailRule,
};
pub use dimension::GroupClass;
pub use error::{Error, Result};
pub use towers::{Column, KRPartition};
