//! Ordered Bratteli diagrams and their path spaces.

pub mod atom;
pub mod clopen;
pub mod diagram;
pub mod dynamics;
pub mod validate;

pub use atom::{Atom, PathEdge};
pub use clopen::{ClopenSet, CylinderFunction};
pub use diagram::{OrderedBratteliDiagram, TailRule};
pub use dynamics::{Direction, PointPrefix, Successor, Tail};
pub use validate::{prepare_diagram, primitivity_window, validate_diagram, CheckOutcome, ValidationReport};
