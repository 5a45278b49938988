//! Text formats for systems, sets, functions, epimorphisms and the
//! artifacts produced by the constructions. All are TOML.
//!
//! A system file gives one of
//! `odometer = k`, `stationary = [[...]]` (one root edge per vertex), or
//! `incidence = [[[...]], ...]` with `tail = "stationary" | "finite"` and an
//! optional `order`. Atoms are written `L<level>:<vertex>:<index>` or as
//! paths `[[target, position], ...]` from the root.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bv::{Atom, ClopenSet, CylinderFunction, OrderedBratteliDiagram, PathEdge, PointPrefix, Tail, TailRule};
use crate::dimension::Mode;
use crate::error::{Error, Result};
use crate::speedup::{ConjugacyCell, CylinderEpimorphism, JumpRule, PartitionConjugacy, SpeedupEntry, SpeedupMap};

fn parse_err(what: &str, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("field `{field}`: {msg}"))
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    name: Option<String>,
    odometer: Option<u64>,
    stationary: Option<Vec<Vec<u64>>>,
    incidence: Option<Vec<Vec<Vec<u64>>>>,
    tail: Option<TailRule>,
    order: Option<Vec<Vec<Vec<usize>>>>,
}

/// Parses a system description; structural problems name the offending field.
pub fn parse_system(text: &str) -> Result<OrderedBratteliDiagram> {
    let f: SystemFile = toml::from_str(text).map_err(|e| parse_err("system", e))?;
    let given = [f.odometer.is_some(), f.stationary.is_some(), f.incidence.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Error::Parse("exactly one of `odometer`, `stationary`, `incidence` must be given".into()));
    }
    if let Some(k) = f.odometer {
        if k < 2 {
            return Err(field_err("odometer", "needs at least 2 digits"));
        }
        return Ok(OrderedBratteliDiagram::odometer(k));
    }
    if let Some(m) = f.stationary {
        if m.is_empty() || m.iter().any(|r| r.len() != m.len()) {
            return Err(field_err("stationary", "matrix is not square"));
        }
        return OrderedBratteliDiagram::stationary(m).map_err(|e| field_err("stationary", e));
    }
    let inc = f.incidence.expect("one form is present");
    let tail = f.tail.unwrap_or(TailRule::Finite);
    OrderedBratteliDiagram::new(inc, f.order, tail).map_err(|e| field_err("incidence", e))
}

pub fn read_system(path: &Path) -> Result<OrderedBratteliDiagram> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(&path.display().to_string(), e))?;
    parse_system(&text).map_err(|e| Error::Parse(format!("{}: {}", path.display(), strip(e))))
}

fn strip(e: Error) -> String {
    match e {
        Error::Parse(m) => m,
        other => other.to_string(),
    }
}

pub fn parse_atom(s: &str) -> Result<Atom> {
    let bad = || Error::Parse(format!("atom `{s}` is not of the form L<level>:<vertex>:<index>"));
    let rest = s.trim().strip_prefix('L').ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok(Atom::new(
        parts[0].parse().map_err(|_| bad())?,
        parts[1].parse().map_err(|_| bad())?,
        parts[2].parse().map_err(|_| bad())?,
    ))
}

fn atoms_to_strings(s: &ClopenSet) -> Vec<String> {
    s.iter().map(|a| a.to_string()).collect()
}

fn set_from_strings(d: &OrderedBratteliDiagram, field: &str, atoms: &[String]) -> Result<ClopenSet> {
    let mut out = ClopenSet::empty(0);
    for s in atoms {
        let a = parse_atom(s)?;
        d.check_atom(a).map_err(|e| field_err(field, e))?;
        out = d.union(&out, &ClopenSet::from_atom(a));
    }
    Ok(d.canonical(&out))
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SetFile {
    #[serde(default)]
    atoms: Vec<String>,
    #[serde(default)]
    paths: Vec<Vec<[usize; 2]>>,
}

pub fn parse_set(d: &OrderedBratteliDiagram, text: &str) -> Result<ClopenSet> {
    let f: SetFile = toml::from_str(text).map_err(|e| parse_err("set", e))?;
    let mut out = set_from_strings(d, "atoms", &f.atoms)?;
    for p in &f.paths {
        let path: Vec<PathEdge> = p.iter().map(|e| PathEdge { target: e[0], position: e[1] }).collect();
        let a = d.atom_of_path(&path).map_err(|e| field_err("paths", e))?;
        out = d.union(&out, &ClopenSet::from_atom(a));
    }
    if out.is_empty() {
        return Err(Error::Parse("set lists no atoms".into()));
    }
    Ok(d.canonical(&out))
}

pub fn write_set(s: &ClopenSet) -> String {
    toml::to_string(&SetFile { atoms: atoms_to_strings(s), paths: Vec::new() }).expect("sets serialize")
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FunctionEntry {
    atom: String,
    value: i64,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FunctionFile {
    level: Option<usize>,
    values: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    entry: Vec<FunctionEntry>,
}

/// Either full columns `values` at `level`, or a sparse `[[entry]]` table of
/// atoms and integers (unlisted atoms are 0).
pub fn parse_function(d: &OrderedBratteliDiagram, text: &str) -> Result<CylinderFunction> {
    let f: FunctionFile = toml::from_str(text).map_err(|e| parse_err("function", e))?;
    if let Some(values) = f.values {
        let level = f.level.ok_or_else(|| field_err("level", "required with `values`"))?;
        return CylinderFunction::new(d, level, values).map_err(|e| field_err("values", e));
    }
    let mut entries = Vec::with_capacity(f.entry.len());
    for e in &f.entry {
        let a = parse_atom(&e.atom)?;
        d.check_atom(a).map_err(|err| field_err("entry", err))?;
        entries.push((a, e.value));
    }
    let level = entries.iter().map(|e| e.0.level).max().unwrap_or(0).max(f.level.unwrap_or(0));
    d.check_level(level).map_err(|e| field_err("level", e))?;
    Ok(CylinderFunction::from_fn(d, level, |x| {
        entries.iter().filter(|(a, _)| d.ancestor(x, a.level) == *a).map(|e| e.1).sum()
    }))
}

pub fn write_function(f: &CylinderFunction) -> String {
    toml::to_string(&FunctionFile { level: Some(f.level()), values: Some(f.values().to_vec()), entry: Vec::new() })
        .expect("functions serialize")
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct EpimorphismFile {
    source: PathBuf,
    target: PathBuf,
    matrix: Vec<Vec<i64>>,
    #[serde(default)]
    offset: usize,
    #[serde(default = "exact")]
    mode: String,
}

fn exact() -> String {
    "exact".into()
}

/// Reads an epimorphism; system paths are relative to the file.
pub fn read_epimorphism(path: &Path) -> Result<CylinderEpimorphism> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(&path.display().to_string(), e))?;
    let f: EpimorphismFile = toml::from_str(&text).map_err(|e| parse_err("epimorphism", e))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mode = match f.mode.as_str() {
        "exact" => Mode::Exact,
        "mod-inf" => Mode::ModInf,
        other => return Err(field_err("mode", format!("unknown mode `{other}`"))),
    };
    let source = read_system(&dir.join(&f.source))?;
    let target = read_system(&dir.join(&f.target))?;
    CylinderEpimorphism::new(source, target, f.matrix, f.offset, mode)
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PointFile {
    path: Vec<[usize; 2]>,
    tail: String,
    jump: u64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct JumpEntry {
    domain: String,
    rule: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    target: Vec<String>,
    jump: u64,
    image: Vec<String>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct JumpTable {
    format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    designated: Option<PointFile>,
    #[serde(default)]
    entry: Vec<JumpEntry>,
}

const JUMPS: &str = "cantorspeed-jumps/1";
const CONJUGACY: &str = "cantorspeed-conjugacy/1";

fn tail_name(t: Tail) -> &'static str {
    match t {
        Tail::Max => "max",
        Tail::Min => "min",
        Tail::Unspecified => "none",
    }
}

fn tail_of(s: &str) -> Result<Tail> {
    match s {
        "max" => Ok(Tail::Max),
        "min" => Ok(Tail::Min),
        "none" => Ok(Tail::Unspecified),
        other => Err(field_err("tail", format!("unknown tail `{other}`"))),
    }
}

fn point_edges(p: &PointPrefix) -> Vec<[usize; 2]> {
    p.path.iter().map(|e| [e.target, e.position]).collect()
}

fn point_of(edges: &[[usize; 2]], tail: &str) -> Result<PointPrefix> {
    Ok(PointPrefix { path: edges.iter().map(|e| PathEdge { target: e[0], position: e[1] }).collect(), tail: tail_of(tail)? })
}

/// A jump table: one entry per domain atom with its rule, value and image.
pub fn write_jump_table(map: &SpeedupMap) -> String {
    let entry = map
        .entries
        .iter()
        .map(|e| {
            let (rule, target) = match &e.rule {
                JumpRule::Power(_) => ("power", Vec::new()),
                JumpRule::FirstHit { target } => ("first-hit", atoms_to_strings(target)),
            };
            JumpEntry { domain: e.domain.to_string(), rule: rule.into(), target, jump: e.jump, image: atoms_to_strings(&e.image) }
        })
        .collect();
    let designated =
        map.designated_point.as_ref().map(|(p, k)| PointFile { path: point_edges(p), tail: tail_name(p.tail).into(), jump: *k });
    toml::to_string(&JumpTable { format: JUMPS.into(), designated, entry }).expect("jump tables serialize")
}

/// Reloads a jump table. Images are taken as written, so a later
/// verification detects any that are wrong.
pub fn parse_jump_table(d: &OrderedBratteliDiagram, text: &str) -> Result<SpeedupMap> {
    let t: JumpTable = toml::from_str(text).map_err(|e| parse_err("jump table", e))?;
    if t.format != JUMPS {
        return Err(field_err("format", format!("expected `{JUMPS}`")));
    }
    let mut entries = Vec::with_capacity(t.entry.len());
    for e in &t.entry {
        let domain = parse_atom(&e.domain)?;
        d.check_atom(domain).map_err(|err| field_err("domain", err))?;
        let rule = match e.rule.as_str() {
            "power" => JumpRule::Power(e.jump),
            "first-hit" => JumpRule::FirstHit { target: set_from_strings(d, "target", &e.target)? },
            other => return Err(field_err("rule", format!("unknown rule `{other}`"))),
        };
        entries.push(SpeedupEntry { domain, rule, jump: e.jump, image: set_from_strings(d, "image", &e.image)? });
    }
    let mut map = SpeedupMap::new(d, entries)?;
    if let Some(p) = &t.designated {
        map.designated_point = Some((point_of(&p.path, &p.tail)?, p.jump));
    }
    Ok(map)
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct CellFile {
    stage: usize,
    column: usize,
    level: usize,
    x: Vec<String>,
    y: Vec<String>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ConjugacyFile {
    format: String,
    depth: usize,
    x0: Vec<[usize; 2]>,
    x0_tail: String,
    y0: Vec<[usize; 2]>,
    y0_tail: String,
    #[serde(default)]
    cell: Vec<CellFile>,
}

/// An atom-pairing table for every stage.
pub fn write_conjugacy(c: &PartitionConjugacy) -> String {
    let cell = c
        .stages
        .iter()
        .enumerate()
        .flat_map(|(k, cells)| {
            cells.iter().map(move |x| CellFile {
                stage: k + 1,
                column: x.column,
                level: x.level,
                x: atoms_to_strings(&x.x),
                y: atoms_to_strings(&x.y),
            })
        })
        .collect();
    let f = ConjugacyFile {
        format: CONJUGACY.into(),
        depth: c.depth,
        x0: point_edges(&c.x0),
        x0_tail: tail_name(c.x0.tail).into(),
        y0: point_edges(&c.y0),
        y0_tail: tail_name(c.y0.tail).into(),
        cell,
    };
    toml::to_string(&f).expect("conjugacies serialize")
}

pub fn parse_conjugacy(dx: &OrderedBratteliDiagram, dy: &OrderedBratteliDiagram, text: &str) -> Result<PartitionConjugacy> {
    let f: ConjugacyFile = toml::from_str(text).map_err(|e| parse_err("conjugacy", e))?;
    if f.format != CONJUGACY {
        return Err(field_err("format", format!("expected `{CONJUGACY}`")));
    }
    let mut stages: Vec<Vec<ConjugacyCell>> = vec![Vec::new(); f.depth];
    for c in &f.cell {
        if c.stage == 0 || c.stage > f.depth {
            return Err(field_err("cell.stage", format!("stage {} outside 1..={}", c.stage, f.depth)));
        }
        stages[c.stage - 1].push(ConjugacyCell {
            column: c.column,
            level: c.level,
            x: set_from_strings(dx, "cell.x", &c.x)?,
            y: set_from_strings(dy, "cell.y", &c.y)?,
        });
    }
    Ok(PartitionConjugacy {
        depth: f.depth,
        stages,
        x0: point_of(&f.x0, &f.x0_tail)?,
        y0: point_of(&f.y0, &f.y0_tail)?,
    })
}
