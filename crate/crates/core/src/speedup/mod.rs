//! Speedups of a minimal Cantor system: jump functions built from tower
//! partitions, and the stage-by-stage conjugacy construction.

mod build;
mod epimorphism;
mod hits;
mod mirror;
mod profile;
mod lemmas;
mod map;
mod verify;

pub use lemmas::{
    default_point, infinitesimal_speedup, partial_speedup, strong_speedup, InfinitesimalSpeedup, InfinitesimalStage,
    StageSide,
};
pub use map::{JumpRule, SpeedupEntry, SpeedupMap};
pub use verify::{verify_speedup, DesignatedReport, SpeedupReport};
pub use epimorphism::{class_function, CylinderEpimorphism};
pub use build::{
    build_speedup, stage_resolution, verify_build, BuildReport, BuildResult, BuildStage, ConjugacyCell, KRLikePartition,
    PartitionConjugacy, StageInvariants,
};
pub use mirror::{carve, mirror_partition, pin_point, MirrorDirection};
pub use profile::{ergodic_profile_compare, ProfileReport};
