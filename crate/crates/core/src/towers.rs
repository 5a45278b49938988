//! Kakutani-Rokhlin partitions: columns of clopen levels climbed by the map.

use std::collections::BTreeMap;
use std::fmt;

use crate::bv::{Atom, ClopenSet, CylinderFunction, Direction, OrderedBratteliDiagram, PointPrefix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub base: ClopenSet,
    pub height: usize,
    /// `levels[j]` is `T^j(base)`.
    pub levels: Vec<ClopenSet>,
}

impl Column {
    pub fn top(&self) -> &ClopenSet {
        self.levels.last().expect("columns are nonempty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRPartition {
    pub columns: Vec<Column>,
    pub provenance: Vec<String>,
}

impl KRPartition {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn levels(&self) -> impl Iterator<Item = (usize, usize, &ClopenSet)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.levels.iter().enumerate().map(move |(j, l)| (i, j, l)))
    }

    pub fn base(&self, d: &OrderedBratteliDiagram) -> ClopenSet {
        self.columns.iter().fold(ClopenSet::empty(0), |acc, c| d.union(&acc, &c.base))
    }

    pub fn top(&self, d: &OrderedBratteliDiagram) -> ClopenSet {
        self.columns.iter().fold(ClopenSet::empty(0), |acc, c| d.union(&acc, c.top()))
    }

    /// Deepest representation level among all levels.
    pub fn resolution(&self) -> usize {
        self.levels().map(|(_, _, l)| l.level()).max().unwrap_or(0)
    }

    /// Column and level containing a point.
    pub fn locate_point(&self, d: &OrderedBratteliDiagram, x: &PointPrefix) -> Result<Option<(usize, usize)>> {
        for (i, j, l) in self.levels() {
            if d.point_in(x, l)? {
                return Ok(Some((i, j)));
            }
        }
        Ok(None)
    }
}

impl fmt::Display for KRPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "columns={}", self.columns.len())?;
        for (i, c) in self.columns.iter().enumerate() {
            writeln!(f, "column.{i}.height={}", c.height)?;
            for (j, l) in c.levels.iter().enumerate() {
                let atoms: Vec<String> = l.iter().map(|a| format!("{}:{}", a.vertex, a.index)).collect();
                writeln!(f, "column.{i}.level.{j}=L{} {}", l.level(), atoms.join(","))?;
            }
        }
        for p in &self.provenance {
            writeln!(f, "provenance={p}")?;
        }
        Ok(())
    }
}

/// Minimum level-`n` column height, a lower bound for return times to any
/// set inside a single level-`n` atom.
pub fn min_return_bound(d: &OrderedBratteliDiagram, n: usize) -> u64 {
    d.heights(n).iter().copied().min().unwrap_or(1)
}

/// The partition whose columns are the level-`n` vertices and whose levels are atoms.
pub fn canonical_towers(d: &OrderedBratteliDiagram, n: usize) -> KRPartition {
    let columns = (0..d.vertex_count(n))
        .map(|v| {
            let h = d.height(n, v);
            Column {
                base: ClopenSet::from_atom(Atom::new(n, v, 0)),
                height: h as usize,
                levels: (0..h).map(|i| ClopenSet::from_atom(Atom::new(n, v, i))).collect(),
            }
        })
        .collect();
    KRPartition { columns, provenance: vec![format!("canonical level {n}")] }
}

/// Reorders columns so that `x0` lies in the top of column 0 and `T(x0)`
/// in the base of column 1 (when they lie in different columns).
pub fn pin_columns(d: &OrderedBratteliDiagram, p: &KRPartition, x0: &PointPrefix) -> Result<KRPartition> {
    let tx0 = d.point_successor(x0)?;
    let mut q = p.clone();
    let i = q
        .columns
        .iter()
        .position(|c| d.point_in(x0, c.top()).unwrap_or(false))
        .ok_or_else(|| Error::PinningImpossible("x0 is in no top".into()))?;
    let c = q.columns.remove(i);
    q.columns.insert(0, c);
    if let Some(j) = q.columns.iter().skip(1).position(|c| d.point_in(&tx0, &c.base).unwrap_or(false)) {
        let c = q.columns.remove(j + 1);
        q.columns.insert(1, c);
    }
    Ok(q)
}

/// Level-`n` atoms visited, in order, by the level-`big_n` column over `w`.
pub fn reading_sequence(d: &OrderedBratteliDiagram, n: usize, big_n: usize, w: usize) -> Vec<Atom> {
    (0..d.height(big_n, w)).map(|j| d.ancestor(Atom::new(big_n, w, j), n)).collect()
}

/// Finite clopen partitions and a resolution level used to split orbits.
#[derive(Debug, Clone, Default)]
pub struct Refinement<'a> {
    pub partitions: Vec<&'a [ClopenSet]>,
    pub resolution: Option<usize>,
}

impl Refinement<'_> {
    /// Identifies the cell containing `s`, or `None` when `s` straddles cells.
    fn cell(&self, d: &OrderedBratteliDiagram, s: &ClopenSet) -> Option<Vec<u64>> {
        let mut key = Vec::new();
        for part in &self.partitions {
            let k = part.iter().position(|p| d.is_subset(s, p))?;
            key.push(k as u64);
        }
        if let Some(m) = self.resolution {
            if !d.within_one_atom(s, m) {
                return None;
            }
            let a = d.ancestor(*s.iter().next()?, m);
            key.push(a.vertex as u64);
            key.push(a.index);
        }
        Some(key)
    }
}

/// Splits `a` (all of whose points return to the base after `r` steps) into
/// atoms with a common itinerary through the refinement cells.
fn split_itinerary(
    d: &OrderedBratteliDiagram,
    a: Atom,
    r: u64,
    refine: &Refinement<'_>,
    out: &mut Vec<(Atom, Vec<Vec<u64>>)>,
) -> Result<()> {
    let mut itinerary = Vec::with_capacity(r as usize);
    let mut cur = ClopenSet::from_atom(a);
    for j in 0..r {
        if j > 0 {
            cur = d.image(&cur)?;
        }
        match refine.cell(d, &cur) {
            Some(k) => itinerary.push(k),
            None => {
                for c in d.children(a) {
                    d.check_level(c.level)?;
                    split_itinerary(d, c, r, refine, out)?;
                }
                return Ok(());
            }
        }
    }
    out.push((a, itinerary));
    Ok(())
}

/// A partition with the given base whose levels refine every cell of `refine`.
pub fn build_kr_partition_with(
    d: &OrderedBratteliDiagram,
    base: &ClopenSet,
    refine: &Refinement<'_>,
) -> Result<KRPartition> {
    if base.is_empty() {
        return Err(Error::EmptySet);
    }
    let base = d.canonical(base);
    let returns = d.first_hit_partition_set(&base, &base, Direction::Forward)?;
    let mut pieces = Vec::new();
    for (a, r) in returns {
        let mut split = Vec::new();
        split_itinerary(d, a, r, refine, &mut split)?;
        pieces.extend(split.into_iter().map(|(b, it)| ((r, it), b)));
    }
    let mut groups: BTreeMap<(u64, Vec<Vec<u64>>), Vec<Atom>> = BTreeMap::new();
    for (key, b) in pieces {
        groups.entry(key).or_default().push(b);
    }
    let mut columns = Vec::new();
    for ((r, _), atoms) in groups {
        let lvl = atoms.iter().map(|a| a.level).max().unwrap();
        let mut members = Vec::new();
        for a in atoms {
            members.extend(d.descendants(a, lvl));
        }
        let cbase = d.canonical(&ClopenSet::from_atoms(lvl, members)?);
        let mut levels = vec![cbase.clone()];
        for _ in 1..r {
            let next = d.image(levels.last().unwrap())?;
            levels.push(next);
        }
        columns.push(Column { base: cbase, height: r as usize, levels });
    }
    Ok(KRPartition { columns, provenance: vec![format!("tower over base at level {}", base.level())] })
}

/// Tower partition over `base` refining the clopen partition `refine`.
pub fn build_kr_partition(d: &OrderedBratteliDiagram, base: &ClopenSet, refine: &[ClopenSet]) -> Result<KRPartition> {
    build_kr_partition_with(d, base, &Refinement { partitions: vec![refine], resolution: None })
}

fn sort_key(d: &OrderedBratteliDiagram, s: &ClopenSet, lvl: usize) -> Atom {
    *d.refine_clopen(s, lvl).expect("level within range").iter().next().expect("nonempty base")
}

/// Refines `p` so that every level lies in one level-`level_target` atom,
/// with `x0` in the top of column 0 and `T(x0)` in the base of column 1.
pub fn refine_kr_partition(
    d: &OrderedBratteliDiagram,
    p: &KRPartition,
    x0: &PointPrefix,
    level_target: usize,
) -> Result<KRPartition> {
    if p.is_empty() {
        return Err(Error::PinningImpossible("empty partition".into()));
    }
    let c2 = if p.len() > 1 { 1 } else { 0 };
    let tx0 = d.point_successor(x0)?;
    let top1 = p.columns[0].top().clone();
    let base2 = p.columns[c2].base.clone();
    if !d.point_in(x0, &top1)? {
        return Err(Error::PinningImpossible("x0 is not in the top of the first column".into()));
    }
    if !d.point_in(&tx0, &base2)? {
        return Err(Error::PinningImpossible("T(x0) is not in the base of the second column".into()));
    }
    let b = d.intersection(&base2, &d.image(&top1)?);
    let b = d.canonical(&b);
    let mut m = b.level();
    let (big_d, r) = loop {
        let atom = d.point_atom(&tx0, m)?;
        let cand = ClopenSet::from_atom(atom);
        if d.is_subset(&cand, &b) {
            let hits = d.first_hit_partition(atom, &b, Direction::Forward)?;
            let r = hits
                .iter()
                .find(|(a, _)| d.point_in(&tx0, &ClopenSet::from_atom(*a)).unwrap_or(false))
                .map(|(_, k)| *k)
                .expect("hit partition covers the atom");
            let moved = d.power_image(&cand, r as i64 - 1)?;
            if !d.point_in(x0, &moved)? {
                break (cand, r);
            }
        }
        m += 1;
        d.check_level(m + 1)?;
    };
    let levels_p: Vec<ClopenSet> = p.levels().map(|(_, _, l)| l.clone()).collect();
    let dd = vec![big_d.clone(), d.complement(&d.refine_clopen(&big_d, big_d.level())?)];
    let refine = Refinement { partitions: vec![&levels_p, &dd], resolution: Some(level_target) };
    let mut q = build_kr_partition_with(d, &b, &refine)?;
    let lvl = q.columns.iter().map(|c| c.base.level()).max().unwrap_or(0);
    q.columns.sort_by_key(|c| sort_key(d, &c.base, lvl));
    let top_col = q
        .columns
        .iter()
        .position(|c| d.point_in(x0, c.top()).unwrap_or(false))
        .ok_or_else(|| Error::PinningImpossible("x0 left the tops".into()))?;
    let col = q.columns.remove(top_col);
    q.columns.insert(0, col);
    let base_col = q
        .columns
        .iter()
        .position(|c| d.point_in(&tx0, &c.base).unwrap_or(false))
        .ok_or_else(|| Error::PinningImpossible("T(x0) left the bases".into()))?;
    if base_col == 0 {
        return Err(Error::PinningImpossible("x0 and T(x0) share a column".into()));
    }
    let col = q.columns.remove(base_col);
    q.columns.insert(1, col);
    q.provenance = p.provenance.clone();
    q.provenance.push(format!("refined to level {level_target} with first return {r}"));
    Ok(q)
}

/// Checks the partition and ladder properties; returns a description of the first failure.
pub fn check_kr_partition(d: &OrderedBratteliDiagram, p: &KRPartition) -> std::result::Result<(), String> {
    let lvl = p.resolution();
    let mut seen = std::collections::BTreeSet::new();
    for (i, j, l) in p.levels() {
        let r = d.refine_clopen(l, lvl).map_err(|e| e.to_string())?;
        for a in r.iter() {
            if !seen.insert(*a) {
                return Err(format!("column {i} level {j} overlaps another level at {a}"));
            }
        }
    }
    if seen.len() as u64 != d.atom_count(lvl) {
        return Err("levels do not cover the space".into());
    }
    for (i, c) in p.columns.iter().enumerate() {
        if c.levels.len() != c.height {
            return Err(format!("column {i} height mismatch"));
        }
        for j in 0..c.height - 1 {
            let img = d.image(&c.levels[j]).map_err(|e| e.to_string())?;
            if !d.set_eq(&img, &c.levels[j + 1]) {
                return Err(format!("column {i}: level {j} does not map onto level {}", j + 1));
            }
        }
    }
    let tops = d.image(&p.top(d)).map_err(|e| e.to_string())?;
    if !d.set_eq(&tops, &p.base(d)) {
        return Err("tops do not map onto bases".into());
    }
    Ok(())
}

/// Whether every level of `q` lies inside some level of `p`.
pub fn refines(d: &OrderedBratteliDiagram, q: &KRPartition, p: &KRPartition) -> bool {
    q.levels().all(|(_, _, l)| p.levels().any(|(_, _, m)| d.is_subset(l, m)))
}

/// Sum of `f` along each column; `f` must be constant on every level.
pub fn column_sums(d: &OrderedBratteliDiagram, f: &CylinderFunction, p: &KRPartition) -> Result<Vec<i64>> {
    let mut out = Vec::with_capacity(p.len());
    for (i, c) in p.columns.iter().enumerate() {
        let mut s = 0;
        for (j, l) in c.levels.iter().enumerate() {
            let lvl = l.level().max(f.level());
            let r = d.refine_clopen(l, lvl)?;
            let mut vals = r.iter().map(|&a| f.value(d, a));
            let v = vals.next().ok_or(Error::EmptySet)?;
            if vals.any(|w| w != v) {
                return Err(Error::ResolutionMismatch(format!("function is not constant on column {i} level {j}")));
            }
            s += v;
        }
        out.push(s);
    }
    Ok(out)
}
