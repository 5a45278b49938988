//! The dimension group of a Bratteli-Vershik system.

pub mod class;
pub mod measure;
pub mod redistribute;

pub use class::{
    class_of, classes_equal, is_coboundary, is_positive, order_unit, verify_coboundary_witness, CoboundaryVerdict,
    GroupClass, NoCertificate, PositivityVerdict,
};
pub use measure::{ergodic_measures, integral, sign_mod_inf, MeasureData, MeasureKind, ModInfSign, Scalar};
pub use redistribute::{clopen_representative, redistribute, Mode};
