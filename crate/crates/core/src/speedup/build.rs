//! The stage-by-stage construction of a speedup of `(X,T)` conjugate to
//! `(Y,S)` from an epimorphism `G(Y,S) → G(X,T)`.
//!
//! Stage `k` holds a Kakutani-Rokhlin partition `Q^k` of `Y` with columns
//! `S^j B_k(i)` and a KR-like partition `P^k` of `X` with levels `A_k(i,j)`,
//! paired level by level. The speedup built so far climbs every non-top
//! column of `P^k`. Column 0 carries `x0` and `y0` in its top, and
//! column 1 carries `T(x0)` and `S(y0)` in its base.

use std::fmt;

use super::epimorphism::CylinderEpimorphism;
use super::lemmas::strong_speedup;
use super::map::SpeedupMap;
use super::mirror::{mirror_partition, MirrorDirection};
use crate::bv::{ClopenSet, OrderedBratteliDiagram, PointPrefix};
use crate::dimension::Mode;
use crate::error::{Error, Result};
use crate::towers::{refine_kr_partition, Column, KRPartition};

/// A partition of `X` into columns of levels `A(i,j)` whose indicators
/// share one class per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRLikePartition {
    pub columns: Vec<Vec<ClopenSet>>,
}

impl KRLikePartition {
    pub fn height(&self, i: usize) -> usize {
        self.columns[i].len()
    }

    pub fn levels(&self) -> impl Iterator<Item = (usize, usize, &ClopenSet)> {
        self.columns.iter().enumerate().flat_map(|(i, c)| c.iter().enumerate().map(move |(j, l)| (i, j, l)))
    }

    pub fn base(&self, d: &OrderedBratteliDiagram) -> ClopenSet {
        self.columns.iter().fold(ClopenSet::empty(0), |acc, c| d.union(&acc, &c[0]))
    }

    pub fn top(&self, d: &OrderedBratteliDiagram) -> ClopenSet {
        self.columns.iter().fold(ClopenSet::empty(0), |acc, c| d.union(&acc, c.last().expect("nonempty column")))
    }
}

/// The seven properties every stage must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StageInvariants {
    /// `φ[1_{S^j B_k(i)}] = [1_{A_k(i,j)}]` for every level.
    pub classes_match: bool,
    /// Every `A_k(i,j)` lies in one atom of the stage resolution.
    pub x_levels_small: bool,
    /// Every `S^j B_k(i)` lies in one atom of the stage resolution.
    pub y_levels_small: bool,
    /// The union of bases of `P^k`, and the union of its tops, each lie in
    /// one atom of the previous resolution.
    pub x_ends_small: bool,
    pub y_ends_small: bool,
    /// `x0` in the top of column 0 and `T(x0)` in the base of column 1.
    pub x_pinned: bool,
    pub y_pinned: bool,
}

impl StageInvariants {
    pub fn as_array(&self) -> [(&'static str, bool); 7] {
        [
            ("classes_match", self.classes_match),
            ("x_levels_small", self.x_levels_small),
            ("y_levels_small", self.y_levels_small),
            ("x_ends_small", self.x_ends_small),
            ("y_ends_small", self.y_ends_small),
            ("x_pinned", self.x_pinned),
            ("y_pinned", self.y_pinned),
        ]
    }

    pub fn all(&self) -> bool {
        self.as_array().iter().all(|p| p.1)
    }
}

#[derive(Debug, Clone)]
pub struct BuildStage {
    pub index: usize,
    /// Atoms of this level bound the diameter of every partition element.
    pub resolution: usize,
    pub q: KRPartition,
    pub p: KRLikePartition,
    pub invariants: StageInvariants,
}

/// One paired level: `h(A_k(i,j)) = S^j B_k(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyCell {
    pub column: usize,
    pub level: usize,
    pub x: ClopenSet,
    pub y: ClopenSet,
}

/// The set map `A_k(i,j) ↦ S^j B_k(i)` for every stage up to `depth`.
#[derive(Debug, Clone)]
pub struct PartitionConjugacy {
    pub depth: usize,
    pub stages: Vec<Vec<ConjugacyCell>>,
    pub x0: PointPrefix,
    pub y0: PointPrefix,
}

impl PartitionConjugacy {
    pub fn cells(&self) -> &[ConjugacyCell] {
        self.stages.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Whether each cell sits, on both sides, inside one cell of the previous stage.
    pub fn respects_nesting(&self, dx: &OrderedBratteliDiagram, dy: &OrderedBratteliDiagram) -> bool {
        self.stages.windows(2).all(|w| {
            w[1].iter().all(|c| w[0].iter().any(|p| dx.is_subset(&c.x, &p.x) && dy.is_subset(&c.y, &p.y)))
        })
    }
}

impl fmt::Display for PartitionConjugacy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "depth={}", self.depth)?;
        for c in self.cells() {
            writeln!(f, "cell={},{} x={} y={}", c.column, c.level, super::map::fmt_atoms(&c.x), super::map::fmt_atoms(&c.y))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BuildResult {
    pub map: SpeedupMap,
    pub conjugacy: PartitionConjugacy,
    pub stages: Vec<BuildStage>,
}

/// Resolution of stage `k`.
pub fn stage_resolution(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        k
    }
}

fn failure(stage: usize, step: &str) -> impl FnOnce(Error) -> Error + '_ {
    move |e| Error::StageFailure { stage, step: step.to_string(), detail: e.to_string() }
}

fn column_from_base(d: &OrderedBratteliDiagram, base: ClopenSet, height: usize) -> Result<Column> {
    let mut levels = vec![d.canonical(&base)];
    for _ in 1..height {
        let next = d.image(levels.last().expect("nonempty"))?;
        levels.push(next);
    }
    Ok(Column { base: levels[0].clone(), height, levels })
}

fn invariants(
    phi: &CylinderEpimorphism,
    k: usize,
    q: &KRPartition,
    p: &KRLikePartition,
    x0: &PointPrefix,
    y0: &PointPrefix,
) -> Result<StageInvariants> {
    let (dx, dy) = (&phi.target, &phi.source);
    let (m, prev) = (stage_resolution(k), stage_resolution(k.saturating_sub(1)));
    let shapes_agree = q.len() == p.columns.len() && q.columns.iter().zip(&p.columns).all(|(c, a)| c.height == a.len());
    let classes_match = shapes_agree && q.levels().zip(p.levels()).all(|((_, _, b), (_, _, a))| phi.sets_match(b, a));
    let x_levels_small = p.levels().all(|(_, _, a)| dx.within_one_atom(a, m));
    let y_levels_small = q.levels().all(|(_, _, b)| dy.within_one_atom(b, m));
    let x_ends_small = dx.within_one_atom(&p.base(dx), prev) && dx.within_one_atom(&p.top(dx), prev);
    let y_ends_small = dy.within_one_atom(&q.base(dy), prev) && dy.within_one_atom(&q.top(dy), prev);
    let tx0 = dx.point_successor(x0)?;
    let sy0 = dy.point_successor(y0)?;
    let x_pinned = shapes_agree
        && p.columns.len() > 1
        && dx.point_in(x0, p.columns[0].last().expect("nonempty"))?
        && dx.point_in(&tx0, &p.columns[1][0])?;
    let y_pinned = shapes_agree
        && q.len() > 1
        && dy.point_in(y0, q.columns[0].top())?
        && dy.point_in(&sy0, &q.columns[1].base)?;
    Ok(StageInvariants { classes_match, x_levels_small, y_levels_small, x_ends_small, y_ends_small, x_pinned, y_pinned })
}

fn cells_of(q: &KRPartition, p: &KRLikePartition) -> Vec<ConjugacyCell> {
    q.levels()
        .zip(p.levels())
        .map(|((i, j, b), (_, _, a))| ConjugacyCell { column: i, level: j, x: a.clone(), y: b.clone() })
        .collect()
}

/// Height-one partitions separating `y0` from `S(y0)`.
fn initial_stage(phi: &CylinderEpimorphism, x0: &PointPrefix, y0: &PointPrefix) -> Result<(KRPartition, KRLikePartition)> {
    let (dx, dy) = (&phi.target, &phi.source);
    let sy0 = dy.point_successor(y0)?;
    let mut l = 1;
    let b0 = loop {
        let a = dy.point_atom(y0, l)?;
        if a != dy.point_atom(&sy0, l)? {
            break ClopenSet::from_atom(a);
        }
        l += 1;
        dy.check_level(l)?;
    };
    let b1 = dy.canonical(&dy.complement(&b0));
    let q = KRPartition {
        columns: vec![column_from_base(dy, b0.clone(), 1)?, column_from_base(dy, b1.clone(), 1)?],
        provenance: vec!["initial".into()],
    };
    let pins = [(x0.clone(), 0), (dx.point_successor(x0)?, 1)];
    let a = mirror_partition(phi, MirrorDirection::YtoX, &[b0, b1], &ClopenSet::whole(), &pins)?;
    let p = KRLikePartition { columns: a.into_iter().map(|s| vec![s]).collect() };
    Ok((q, p))
}

/// Step 2: cut each base of `P^n` along the levels of `q` inside the matching
/// base of `Q^n`, then carry the pieces up with the current speedup.
fn mirror_refinement(
    phi: &CylinderEpimorphism,
    stage: usize,
    qn: &KRPartition,
    pn: &KRLikePartition,
    q: &KRPartition,
    map: &SpeedupMap,
    x0: &PointPrefix,
) -> Result<KRLikePartition> {
    let (dx, dy) = (&phi.target, &phi.source);
    let tx0 = dx.point_successor(x0)?;
    let mut z0 = x0.clone();
    for _ in 1..pn.height(0) {
        z0 = map.point_preimage(dx, &z0).map_err(failure(stage, "pull back x0"))?;
    }
    let mut columns: Vec<Vec<Option<ClopenSet>>> = q.columns.iter().map(|c| vec![None; c.height]).collect();
    for (k, col) in qn.columns.iter().enumerate() {
        let inside: Vec<(usize, usize, ClopenSet)> =
            q.levels().filter(|(_, _, l)| dy.is_subset(l, &col.base)).map(|(i, j, l)| (i, j, l.clone())).collect();
        let mut pins = Vec::new();
        if k == 0 {
            let j = q.columns[0].height - qn.columns[0].height;
            let at = inside.iter().position(|c| c.0 == 0 && c.1 == j).ok_or_else(|| Error::StageFailure {
                stage,
                step: "clopenpartition2".into(),
                detail: "the top run of column 0 does not start in the first base".into(),
            })?;
            pins.push((z0.clone(), at));
        }
        if k == 1 {
            let at = inside.iter().position(|c| c.0 == 1 && c.1 == 0).ok_or_else(|| Error::StageFailure {
                stage,
                step: "clopenpartition2".into(),
                detail: "the base of column 1 is not in the second base".into(),
            })?;
            pins.push((tx0.clone(), at));
        }
        let sets: Vec<ClopenSet> = inside.iter().map(|c| c.2.clone()).collect();
        let pieces = mirror_partition(phi, MirrorDirection::YtoX, &sets, &pn.columns[k][0], &pins)
            .map_err(failure(stage, "clopenpartition2"))?;
        for ((i, j, _), piece) in inside.iter().zip(pieces) {
            let mut cur = piece;
            for l in 0..qn.columns[k].height {
                if l > 0 {
                    cur = map.image_of_set(dx, &cur).map_err(failure(stage, "transport"))?;
                }
                columns[*i][j + l] = Some(cur.clone());
            }
        }
    }
    let columns = columns
        .into_iter()
        .map(|c| c.into_iter().collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::StageFailure { stage, step: "transport".into(), detail: "a level was never reached".into() })?;
    Ok(KRLikePartition { columns })
}

/// Extends the speedup across every non-top level lying in `Top(P^n)`.
fn climb_tops(
    phi: &CylinderEpimorphism,
    stage: usize,
    p: &KRLikePartition,
    old_top: &ClopenSet,
    map: &mut SpeedupMap,
) -> Result<()> {
    let dx = &phi.target;
    for col in &p.columns {
        for j in 0..col.len() - 1 {
            if !dx.is_subset(&col[j], old_top) {
                continue;
            }
            let step = strong_speedup(dx, &col[j], &col[j + 1]).map_err(|e| Error::StageFailure {
                stage,
                step: match (phi.mode, &e) {
                    (Mode::ModInf, Error::NotCoboundary) => "strong speedup (mod-inf classes)".into(),
                    _ => "strong speedup".into(),
                },
                detail: e.to_string(),
            })?;
            map.extend(dx, step.entries).map_err(failure(stage, "strong speedup"))?;
        }
    }
    Ok(())
}

/// Step 3: split every column of `p` along atoms of its base until each
/// level lies in one atom at `m`. Returns the new columns and their parents,
/// with `x0` in column 0 and `T(x0)` in column 1.
fn refine_small(
    phi: &CylinderEpimorphism,
    stage: usize,
    p: &KRLikePartition,
    map: &SpeedupMap,
    m: usize,
    x0: &PointPrefix,
) -> Result<(KRLikePartition, Vec<usize>)> {
    let dx = &phi.target;
    let mut cols = Vec::new();
    for (i, col) in p.columns.iter().enumerate() {
        let base = dx.refine_clopen(&col[0], col[0].level().max(m))?;
        let mut stack: Vec<_> = base.iter().copied().collect();
        stack.reverse();
        while let Some(a) = stack.pop() {
            let mut levels = vec![ClopenSet::from_atom(a)];
            for _ in 1..col.len() {
                let next = map.image_of_set(dx, levels.last().expect("nonempty")).map_err(failure(stage, "refinemirror"))?;
                levels.push(dx.canonical(&next));
            }
            if levels.iter().all(|l| dx.within_one_atom(l, m)) {
                cols.push((i, levels));
            } else {
                dx.check_level(a.level + 1).map_err(failure(stage, "refinemirror"))?;
                stack.extend(dx.children(a).into_iter().rev());
            }
        }
    }
    let tx0 = dx.point_successor(x0)?;
    let top = cols.iter().position(|c| dx.point_in(x0, c.1.last().expect("nonempty")).unwrap_or(false));
    let top = top.ok_or_else(|| Error::StageFailure { stage, step: "refinemirror".into(), detail: "x0 left the tops".into() })?;
    let c = cols.remove(top);
    cols.insert(0, c);
    let base = cols.iter().position(|c| dx.point_in(&tx0, &c.1[0]).unwrap_or(false));
    let base = base.ok_or_else(|| Error::StageFailure { stage, step: "refinemirror".into(), detail: "T(x0) left the bases".into() })?;
    if base == 0 {
        return Err(Error::StageFailure { stage, step: "refinemirror".into(), detail: "x0 and T(x0) share a column".into() });
    }
    let c = cols.remove(base);
    cols.insert(1, c);
    let parents = cols.iter().map(|c| c.0).collect();
    Ok((KRLikePartition { columns: cols.into_iter().map(|c| c.1).collect() }, parents))
}

/// Step 4: cut each base of `q` to mirror the new columns of `X`.
fn mirror_back(
    phi: &CylinderEpimorphism,
    stage: usize,
    q: &KRPartition,
    p: &KRLikePartition,
    parents: &[usize],
    y0: &PointPrefix,
) -> Result<KRPartition> {
    let dy = &phi.source;
    let top_pin = dy.point_power(y0, -(q.columns[0].height as i64 - 1))?;
    let sy0 = dy.point_successor(y0)?;
    let mut bases: Vec<Option<ClopenSet>> = vec![None; p.columns.len()];
    for (i, col) in q.columns.iter().enumerate() {
        let kids: Vec<usize> = (0..parents.len()).filter(|&k| parents[k] == i).collect();
        let sets: Vec<ClopenSet> = kids.iter().map(|&k| p.columns[k][0].clone()).collect();
        let mut pins = Vec::new();
        for (k, pin) in [(0, &top_pin), (1, &sy0)] {
            if let Some(at) = kids.iter().position(|&c| c == k) {
                pins.push((pin.clone(), at));
            }
        }
        let pieces = mirror_partition(phi, MirrorDirection::XtoY, &sets, &col.base, &pins)
            .map_err(failure(stage, "clopenpartition"))?;
        for (&k, piece) in kids.iter().zip(pieces) {
            bases[k] = Some(piece);
        }
    }
    let columns = bases
        .into_iter()
        .zip(&p.columns)
        .map(|(b, c)| column_from_base(dy, b.expect("every column has a parent"), c.len()))
        .collect::<Result<Vec<_>>>()?;
    let mut provenance = q.provenance.clone();
    provenance.push(format!("mirrored at stage {stage}"));
    Ok(KRPartition { columns, provenance })
}

/// Runs the construction for `depth` stages, with `x0` and `y0` the
/// all-maximal points.
pub fn build_speedup(phi: &CylinderEpimorphism, depth: usize) -> Result<BuildResult> {
    if depth == 0 {
        return Err(Error::PreconditionFailed("depth must be at least 1".into()));
    }
    phi.validate()?;
    let (dx, dy) = (&phi.target, &phi.source);
    let (x0, y0) = (PointPrefix::all_max(), PointPrefix::all_max());
    let (mut qn, mut pn) = initial_stage(phi, &x0, &y0).map_err(failure(1, "initial step"))?;
    let mut map = SpeedupMap::empty();
    let mut stages = vec![BuildStage {
        index: 1,
        resolution: stage_resolution(1),
        invariants: invariants(phi, 1, &qn, &pn, &x0, &y0)?,
        q: qn.clone(),
        p: pn.clone(),
    }];
    for stage in 2..=depth {
        let m = stage_resolution(stage);
        let q = refine_kr_partition(dy, &qn, &y0, m).map_err(failure(stage, "refinetower"))?;
        let p = mirror_refinement(phi, stage, &qn, &pn, &q, &map, &x0)?;
        let old_top = pn.top(dx);
        climb_tops(phi, stage, &p, &old_top, &mut map)?;
        let (p_next, parents) = refine_small(phi, stage, &p, &map, m, &x0)?;
        let q_next = mirror_back(phi, stage, &q, &p_next, &parents, &y0)?;
        qn = q_next;
        pn = p_next;
        stages.push(BuildStage {
            index: stage,
            resolution: m,
            invariants: invariants(phi, stage, &qn, &pn, &x0, &y0)?,
            q: qn.clone(),
            p: pn.clone(),
        });
    }
    map.designated_point = Some((x0.clone(), 1));
    let conjugacy = PartitionConjugacy {
        depth,
        stages: stages.iter().map(|s| cells_of(&s.q, &s.p)).collect(),
        x0,
        y0,
    };
    Ok(BuildResult { map, conjugacy, stages })
}

/// Checks of a finished construction.
#[derive(Debug, Clone, Default)]
pub struct BuildReport {
    /// Non-top cells where `h∘T' = S∘h` was checked.
    pub conjugacy_cells: usize,
    pub conjugacy_failures: Vec<(usize, usize)>,
    pub nesting: bool,
    pub stage_failures: Vec<(usize, &'static str)>,
    pub speedup: super::verify::SpeedupReport,
}

impl BuildReport {
    pub fn passed(&self) -> bool {
        self.conjugacy_failures.is_empty() && self.nesting && self.stage_failures.is_empty() && self.speedup.passed()
    }
}

impl fmt::Display for BuildReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "conjugacy_cells={}", self.conjugacy_cells)?;
        for (i, j) in &self.conjugacy_failures {
            writeln!(f, "conjugacy_failure={i},{j}")?;
        }
        writeln!(f, "nesting={}", self.nesting)?;
        for (k, name) in &self.stage_failures {
            writeln!(f, "stage_failure={k}:{name}")?;
        }
        write!(f, "{}", self.speedup)
    }
}

/// Replays a construction: the conjugacy relation on every non-top cell of
/// the last stage, nesting of the stages, the stage properties, and the
/// speedup checks with every last-stage cell measured.
pub fn verify_build(phi: &CylinderEpimorphism, result: &BuildResult) -> BuildReport {
    let (dx, dy) = (&phi.target, &phi.source);
    let mut r = BuildReport { nesting: result.conjugacy.respects_nesting(dx, dy), ..Default::default() };
    for s in &result.stages {
        for (name, ok) in s.invariants.as_array() {
            if !ok {
                r.stage_failures.push((s.index, name));
            }
        }
    }
    let cells = result.conjugacy.cells();
    let mut measured = Vec::new();
    for c in cells {
        let Some(next) = cells.iter().find(|n| n.column == c.column && n.level == c.level + 1) else { continue };
        r.conjugacy_cells += 1;
        let x_ok = result.map.image_of_set(dx, &c.x).map(|img| dx.set_eq(&img, &next.x)).unwrap_or(false);
        let y_ok = dy.image(&c.y).map(|img| dy.set_eq(&img, &next.y)).unwrap_or(false);
        if !(x_ok && y_ok) {
            r.conjugacy_failures.push((c.column, c.level));
        }
        measured.push(c.x.clone());
    }
    let measures = crate::dimension::ergodic_measures(dx).unwrap_or_default();
    r.speedup = super::verify::verify_speedup(dx, &result.map, &measures, None, &measured);
    r
}
