use num_traits::Zero;

use super::hits::{atom_power, shift_in_column, ColumnHits};
use super::map::{disjoint_union, JumpRule, SpeedupEntry, SpeedupMap};
use crate::bv::{Atom, ClopenSet, CylinderFunction, Direction, OrderedBratteliDiagram, PointPrefix, Tail};
use crate::dimension::{class_of, is_coboundary, CoboundaryVerdict, MeasureData};
use crate::error::{Error, Result};

/// One piece of a column injection: `domain` travels `jump` steps in the
/// given direction and lands on `image`.
#[derive(Debug, Clone)]
pub(crate) struct Move {
    pub domain: Atom,
    pub jump: u64,
    pub image: ClopenSet,
    pub rule: JumpRule,
}

/// Pairs the levels of each canonical level-`n` column inside `a` with
/// those inside `b`, in traversal order, and realises each pair by a jump.
pub(crate) fn tower_moves(
    d: &OrderedBratteliDiagram,
    n: usize,
    a: &ClopenSet,
    b: &ClopenSet,
    dir: Direction,
) -> Result<Vec<Move>> {
    let ra = d.refine_clopen(a, n)?;
    let rb = d.refine_clopen(b, n)?;
    let mut hits = ColumnHits::new(d, n);
    let mut out = Vec::new();
    for v in 0..d.vertex_count(n) {
        let h = d.height(n, v);
        let mut la: Vec<u64> = (0..h).filter(|&i| ra.members().contains(&Atom::new(n, v, i))).collect();
        let mut lb: Vec<u64> = (0..h).filter(|&i| rb.members().contains(&Atom::new(n, v, i))).collect();
        if dir == Direction::Backward {
            la.reverse();
            lb.reverse();
        }
        if la.len() > lb.len() {
            return Err(Error::PreconditionFailed(format!("column {v} at level {n} has more source than target levels")));
        }
        for (&j, &g) in la.iter().zip(&lb) {
            let src = Atom::new(n, v, j);
            let tgt_atom = Atom::new(n, v, g);
            let tgt = ClopenSet::from_atom(tgt_atom);
            let ahead = match dir {
                Direction::Forward => g > j,
                Direction::Backward => g < j,
            };
            if ahead {
                let k = g.abs_diff(j);
                out.push(Move { domain: src, jump: k, image: tgt, rule: JumpRule::Power(k) });
            } else {
                for (piece, k) in hits.partition(src, tgt_atom, dir)? {
                    let signed = if dir == Direction::Forward { k as i64 } else { -(k as i64) };
                    let image = atom_power(d, piece, signed)?;
                    out.push(Move { domain: piece, jump: k, image, rule: JumpRule::FirstHit { target: tgt.clone() } });
                }
            }
        }
    }
    Ok(out)
}

fn forward_entries(moves: Vec<Move>) -> Vec<SpeedupEntry> {
    moves
        .into_iter()
        .map(|m| SpeedupEntry { domain: m.domain, rule: m.rule, jump: m.jump, image: m.image })
        .collect()
}

/// Turns backward moves `B ⊇ b ↦ T^{-q}(b)` into forward entries on the images.
fn inverted_entries(d: &OrderedBratteliDiagram, moves: Vec<Move>) -> Result<Vec<SpeedupEntry>> {
    let mut out = Vec::new();
    for m in moves {
        for &a in d.canonical(&m.image).iter() {
            let image = match shift_in_column(d, a, m.jump as i64) {
                Some(b) if d.atom_in(b, &ClopenSet::from_atom(m.domain)) => ClopenSet::from_atom(b),
                _ => d.power_image(&ClopenSet::from_atom(a), m.jump as i64)?,
            };
            out.push(SpeedupEntry { domain: a, rule: JumpRule::Power(m.jump), jump: m.jump, image });
        }
    }
    Ok(out)
}

fn check_pair(d: &OrderedBratteliDiagram, a: &ClopenSet, b: &ClopenSet) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    if !d.is_disjoint(a, b) {
        return Err(Error::PreconditionFailed("the two sets overlap".into()));
    }
    Ok(())
}

fn difference(d: &OrderedBratteliDiagram, b: &ClopenSet, a: &ClopenSet) -> CylinderFunction {
    CylinderFunction::indicator(d, b).sub(d, &CylinderFunction::indicator(d, a))
}

/// A homeomorphism `A → C` of the form `x ↦ T^{p(x)}(x)`, for disjoint
/// clopen sets whose indicators differ by a coboundary.
pub fn strong_speedup(d: &OrderedBratteliDiagram, a: &ClopenSet, c: &ClopenSet) -> Result<SpeedupMap> {
    check_pair(d, a, c)?;
    let f = difference(d, a, c);
    match is_coboundary(d, &f)? {
        CoboundaryVerdict::Yes { .. } => {}
        _ => return Err(Error::NotCoboundary),
    }
    let mut class = class_of(d, &f);
    while !class.is_zero() {
        d.check_level(class.level + 1)?;
        class = class.push(d);
    }
    let n = class.level.max(1);
    let moves = tower_moves(d, n, a, c, Direction::Forward)?;
    SpeedupMap::new(d, forward_entries(moves))
}

fn strictly_below(measures: &[MeasureData], a: &ClopenSet, b: &ClopenSet) -> bool {
    measures.iter().all(|mu| mu.set_measure(a) < mu.set_measure(b))
}

/// First level at which every canonical column meets `b` more often than `a`.
fn gap_level(d: &OrderedBratteliDiagram, a: &ClopenSet, b: &ClopenSet) -> Result<usize> {
    let f = difference(d, b, a);
    let mut class = class_of(d, &f);
    let limit = class.level + 64;
    loop {
        if class.level >= 1 && class.sums.iter().all(|s| s > &Zero::zero()) {
            return Ok(class.level);
        }
        if class.level >= limit || d.check_level(class.level + 1).is_err() {
            return Err(Error::MeasureGapMissing("column counts never separate".into()));
        }
        class = class.push(d);
    }
}

fn injection_moves(
    d: &OrderedBratteliDiagram,
    measures: &[MeasureData],
    a: &ClopenSet,
    b: &ClopenSet,
    dir: Direction,
) -> Result<Vec<Move>> {
    check_pair(d, a, b)?;
    if !strictly_below(measures, a, b) {
        return Err(Error::MeasureGapMissing("some ergodic measure does not give A less mass than B".into()));
    }
    let n = gap_level(d, a, b)?;
    tower_moves(d, n, a, b, dir)
}

/// An injection of `A` into `B` of the form `x ↦ T^{p(x)}(x)`, for disjoint
/// clopen sets with `μ(A) < μ(B)` for every ergodic `μ`.
pub fn partial_speedup(
    d: &OrderedBratteliDiagram,
    measures: &[MeasureData],
    a: &ClopenSet,
    b: &ClopenSet,
) -> Result<SpeedupMap> {
    let moves = injection_moves(d, measures, a, b, Direction::Forward)?;
    SpeedupMap::new(d, forward_entries(moves))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageSide {
    /// A cylinder is cut around `x0` and the rest of `A` is pushed forward.
    Source,
    /// A cylinder is cut around `y0` and the rest of `B` is pulled back.
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfinitesimalStage {
    pub side: StageSide,
    /// Cylinder kept around `x0`.
    pub c: ClopenSet,
    /// Cylinder kept around `y0`.
    pub d: ClopenSet,
    pub entries_added: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfinitesimalSpeedup {
    pub map: SpeedupMap,
    pub x0: PointPrefix,
    pub y0: PointPrefix,
    /// Part of `A` not yet covered; contains `x0`.
    pub remainder_a: ClopenSet,
    /// Part of `B` not yet reached; contains `y0`.
    pub remainder_b: ClopenSet,
    pub stages: Vec<InfinitesimalStage>,
}

/// Smallest atom around `x` at level `>= min_level` that is a proper subset
/// of `within` and satisfies `ok`.
fn shrink_around(
    d: &OrderedBratteliDiagram,
    x: &PointPrefix,
    within: &ClopenSet,
    min_level: usize,
    mut ok: impl FnMut(&ClopenSet) -> bool,
) -> Result<ClopenSet> {
    let mut m = min_level;
    loop {
        d.check_level(m)?;
        let u = ClopenSet::from_atom(d.point_atom(x, m)?);
        if d.is_subset(&u, within) && !d.set_eq(&u, within) && ok(&u) {
            return Ok(u);
        }
        m += 1;
        if m > min_level + 64 {
            return Err(Error::PinningImpossible("no small cylinder around the point".into()));
        }
    }
}

fn lighter(measures: &[MeasureData], small: &ClopenSet, big: &ClopenSet) -> bool {
    measures.iter().all(|mu| mu.set_measure(small) < mu.set_measure(big))
}

/// A point of `s`: the minimal continuation of its first atom.
pub fn default_point(d: &OrderedBratteliDiagram, s: &ClopenSet) -> Result<PointPrefix> {
    let s = d.canonical(s);
    let a = *s.iter().next().ok_or(Error::EmptySet)?;
    Ok(PointPrefix { path: d.atom_path(a), tail: Tail::Min })
}

/// A bijection `A → B` of the form `x ↦ T^{p(x)}(x)` for disjoint clopen
/// sets of equal measure under every ergodic measure, built to finite depth.
///
/// Stages alternate between cutting a cylinder around `x0` and pushing the
/// rest of `A` into `B`, and cutting a cylinder around `y0 = T^k(x0)` and
/// pulling the rest of `B` back into `A`. The last stage is always of the
/// first kind, so the uncovered part of `A` is one cylinder around `x0`.
pub fn infinitesimal_speedup(
    d: &OrderedBratteliDiagram,
    measures: &[MeasureData],
    a: &ClopenSet,
    b: &ClopenSet,
    x0: Option<PointPrefix>,
    depth: usize,
) -> Result<InfinitesimalSpeedup> {
    check_pair(d, a, b)?;
    if depth == 0 {
        return Err(Error::PreconditionFailed("depth must be at least 1".into()));
    }
    for mu in measures {
        if mu.set_measure(a) != mu.set_measure(b) {
            return Err(Error::NotInfinitesimal("A and B have different measures".into()));
        }
    }
    let x0 = match x0 {
        Some(p) => p,
        None => default_point(d, a)?,
    };
    if !d.point_in(&x0, a)? {
        return Err(Error::PinningImpossible("x0 is not in A".into()));
    }
    let bound = d.hit_bound(b.level());
    let mut y0 = x0.clone();
    let mut k = 0u64;
    loop {
        y0 = d.point_successor(&y0)?;
        k += 1;
        if d.point_in(&y0, b)? {
            break;
        }
        if k > bound {
            return Err(Error::PinningImpossible("the orbit of x0 misses B".into()));
        }
    }
    let mut map = SpeedupMap::empty();
    let mut ra = d.canonical(a);
    let mut rb = d.canonical(b);
    let mut stages = Vec::new();
    for s in 1..=depth {
        let target_level = s + 1;
        let source_side = (depth - s) % 2 == 0;
        let stage = if source_side {
            let c = shrink_around(d, &x0, &ra, target_level, |_| true)?;
            let dd = shrink_around(d, &y0, &rb, target_level, |u| lighter(measures, u, &c))?;
            let from = d.difference(&ra, &c);
            let into = d.difference(&rb, &dd);
            let moves = injection_moves(d, measures, &from, &into, Direction::Forward)?;
            let entries = forward_entries(moves);
            let n = entries.len();
            let reached = disjoint_union(d, entries.iter().map(|e| (e.domain, &e.image)))?.0;
            map.extend(d, entries)?;
            ra = c.clone();
            rb = d.difference(&rb, &reached);
            InfinitesimalStage { side: StageSide::Source, c, d: dd, entries_added: n }
        } else {
            let dd = shrink_around(d, &y0, &rb, target_level, |_| true)?;
            let c = shrink_around(d, &x0, &ra, target_level, |u| lighter(measures, u, &dd))?;
            let from = d.difference(&rb, &dd);
            let into = d.difference(&ra, &c);
            let moves = injection_moves(d, measures, &from, &into, Direction::Backward)?;
            let entries = inverted_entries(d, moves)?;
            let n = entries.len();
            let before = map.domain_cover.clone();
            map.extend(d, entries)?;
            ra = d.difference(&ra, &d.difference(&map.domain_cover, &before));
            rb = dd.clone();
            InfinitesimalStage { side: StageSide::Target, c, d: dd, entries_added: n }
        };
        stages.push(stage);
    }
    map.designated_point = Some((x0.clone(), k));
    Ok(InfinitesimalSpeedup { map, x0, y0, remainder_a: ra, remainder_b: rb, stages })
}
