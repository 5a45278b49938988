//! Command-line front end for cantorspeed.
//!
//! [`run`] executes one [`RunConfig`] and returns the exit status together
//! with a key/value [`Report`]. Exit status 0 means success, 1 a
//! mathematical refutation, 2 an input error.

mod commands;
pub mod dot;
mod examples;
pub mod report;

use std::path::{Path, PathBuf};

use cantorspeed::bv::validate_diagram;
use cantorspeed::{Error, OrderedBratteliDiagram};
use clap::{Args, Parser, Subcommand};

pub use report::{parse_structured, Format, Report, HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Parser)]
#[command(name = "cantorspeed", version, about = "Speedups of minimal Cantor systems given as ordered Bratteli diagrams")]
pub struct RunConfig {
    /// Report layout.
    #[arg(long, value_enum, default_value = "human", global = true)]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the standing assumptions on a system.
    Validate { system: PathBuf },
    /// Canonical Kakutani-Rokhlin towers at a level.
    Towers {
        system: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Dimension-group class of a cylinder function.
    Class {
        system: PathBuf,
        function: PathBuf,
        /// Push the class to this level.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Decide whether a function is a coboundary.
    Coboundary {
        system: PathBuf,
        /// Function file; omit with `--random`.
        function: Option<PathBuf>,
        /// Check this many random coboundaries instead.
        #[arg(long)]
        random: Option<usize>,
        /// Level of the random transfer functions.
        #[arg(long, default_value_t = 2)]
        level: usize,
    },
    /// Positivity and sign modulo infinitesimals.
    Positivity { system: PathBuf, function: PathBuf },
    /// Ergodic invariant measures, listed per vertex at a level.
    Measures {
        system: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Replay the ordered-group examples.
    GroupExamples,
    /// Construct a speedup.
    #[command(subcommand)]
    Speedup(SpeedupCommand),
    /// Re-verify saved artifacts.
    Verify(VerifyArgs),
    /// Compare ergodic measures across an atom pairing.
    ProfileCompare(ProfileArgs),
    /// Graphviz rendering of a diagram or its towers.
    ExportDot {
        system: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Render the canonical towers of this level instead.
        #[arg(long)]
        towers: Option<usize>,
        /// Write the graph here instead of into the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    pub system: PathBuf,
    pub a: PathBuf,
    pub b: PathBuf,
    /// Write the jump table here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum SpeedupCommand {
    /// Equal classes: a bounded speedup carrying A onto C.
    Strong(PairArgs),
    /// A strictly lighter than B in every ergodic measure.
    Partial(PairArgs),
    /// Difference infinitesimal: cover A up to a shrinking cylinder.
    Infinitesimal {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Stage-by-stage construction from an epimorphism file.
    Build {
        epimorphism: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        conjugacy_out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Jump table to check.
    pub jumps: PathBuf,
    /// System the table lives on.
    #[arg(long, required_unless_present = "epimorphism")]
    pub system: Option<PathBuf>,
    /// Expected image of the map.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Check a built map and its conjugacy against this epimorphism.
    #[arg(long, requires = "conjugacy")]
    pub epimorphism: Option<PathBuf>,
    #[arg(long)]
    pub conjugacy: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    pub source: PathBuf,
    pub target: PathBuf,
    /// Pairing given by a conjugacy file (x cells in the source).
    #[arg(long, conflicts_with = "level")]
    pub conjugacy: Option<PathBuf>,
    /// Pair the atoms of this level in enumeration order.
    #[arg(long)]
    pub level: Option<usize>,
}

/// Exit status and report of one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: i32,
    pub report: Report,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        let mut r = self.report.clone();
        r.push("exit", self.status);
        r.render(format)
    }
}

/// Stable identifier of an error kind.
pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::MalformedDiagram(_) => "malformed-diagram",
        Error::NotPrimitive(_) => "not-primitive",
        Error::NotProperlyOrdered(_) => "not-properly-ordered",
        Error::InvalidAtom(_) => "invalid-atom",
        Error::LevelBelowCurrent { .. } => "level-below-current",
        Error::EmptySet => "empty-set",
        Error::UnderspecifiedPoint => "underspecified-point",
        Error::DepthExceeded(_) => "depth-exceeded",
        Error::PinningImpossible(_) => "pinning-impossible",
        Error::ResolutionMismatch(_) => "resolution-mismatch",
        Error::PreconditionFailed(_) => "precondition-failed",
        Error::UnsupportedDiagram(_) => "unsupported-diagram",
        Error::UnsupportedCone(_) => "unsupported-cone",
        Error::NotCoboundary => "not-coboundary",
        Error::MeasureGapMissing(_) => "measure-gap-missing",
        Error::NotInfinitesimal(_) => "not-infinitesimal",
        Error::ExhaustivenessRequired => "exhaustiveness-required",
        Error::InvalidEpimorphism(_) => "invalid-epimorphism",
        Error::StageFailure { .. } => "stage-failure",
        Error::Parse(_) => "parse",
    }
}

/// Exit status for an error: refutations of a mathematical hypothesis are 1,
/// everything about malformed input is 2.
pub fn error_status(e: &Error) -> i32 {
    match e {
        Error::NotCoboundary
        | Error::MeasureGapMissing(_)
        | Error::NotInfinitesimal(_)
        | Error::ExhaustivenessRequired
        | Error::PinningImpossible(_)
        | Error::ResolutionMismatch(_)
        | Error::PreconditionFailed(_)
        | Error::StageFailure { .. } => EXIT_REFUTED,
        _ => EXIT_INPUT,
    }
}

/// Reads a system file and checks the standing assumptions.
pub fn parse_system_file(path: &Path) -> cantorspeed::Result<OrderedBratteliDiagram> {
    let d = cantorspeed::format::read_system(path)?;
    validate_diagram(&d).into_result()?;
    Ok(d)
}

pub fn run(config: &RunConfig) -> Outcome {
    let name = commands::name(&config.command);
    let mut report = Report::new(name);
    match commands::dispatch(config, &mut report) {
        Ok(status) => Outcome { status, report },
        Err(e) => {
            report.push("error.code", error_code(&e));
            report.push("error.message", &e);
            Outcome { status: error_status(&e), report }
        }
    }
}
