//! Exact arithmetic used throughout the crate.

pub mod field;
pub mod intmat;
pub mod poly;
pub mod quadratic;

pub use field::{FieldElem, NumberField};
pub use poly::{char_poly, q, q_frac, Poly, Q};
pub use quadratic::QuadReal;
