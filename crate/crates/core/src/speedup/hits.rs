use std::collections::HashMap;

use crate::bv::{Atom, ClopenSet, Direction, OrderedBratteliDiagram};
use crate::error::Result;

/// `T^k(a)` when the orbit stays inside the column of `a`.
pub(crate) fn shift_in_column(d: &OrderedBratteliDiagram, a: Atom, k: i64) -> Option<Atom> {
    let i = a.index as i64 + k;
    (i >= 0 && (i as u64) < d.height(a.level, a.vertex)).then(|| Atom::new(a.level, a.vertex, i as u64))
}

/// `T^k(a)` as a set, by index arithmetic when possible.
pub(crate) fn atom_power(d: &OrderedBratteliDiagram, a: Atom, k: i64) -> Result<ClopenSet> {
    match shift_in_column(d, a, k) {
        Some(b) => Ok(ClopenSet::from_atom(b)),
        None => d.power_image(&ClopenSet::from_atom(a), k),
    }
}

/// First hitting times of a single atom, read off the column structure:
/// a column at a deeper level is a concatenation of columns at the level
/// of the target, so hits inside a column are found from segment offsets.
pub(crate) struct ColumnHits<'a> {
    d: &'a OrderedBratteliDiagram,
    n: usize,
    memo: HashMap<(usize, usize), Vec<(u64, usize)>>,
}

impl<'a> ColumnHits<'a> {
    pub fn new(d: &'a OrderedBratteliDiagram, n: usize) -> Self {
        ColumnHits { d, n, memo: HashMap::new() }
    }

    /// Start offsets and vertices of the level-`n` columns inside column `w` of level `m`.
    fn segments(&mut self, m: usize, w: usize) -> Vec<(u64, usize)> {
        if m == self.n {
            return vec![(0, w)];
        }
        if let Some(s) = self.memo.get(&(m, w)) {
            return s.clone();
        }
        let edges = self.d.in_edges(m - 1, w).to_vec();
        let mut out = Vec::new();
        for (k, &s) in edges.iter().enumerate() {
            let off = self.d.offset(m - 1, w, k);
            out.extend(self.segments(m - 1, s).into_iter().map(|(st, v)| (off + st, v)));
        }
        self.memo.insert((m, w), out.clone());
        out
    }

    /// Hits from `x` when its orbit leaves the column first: runs to the
    /// column end by index arithmetic, then steps exactly from there.
    fn via_column_end(&self, x: Atom, tgt: Atom, dir: Direction) -> Result<Vec<(Atom, u64)>> {
        let h = self.d.height(x.level, x.vertex);
        let (end, run) = match dir {
            Direction::Forward => (h - 1, h - 1 - x.index),
            Direction::Backward => (0, x.index),
        };
        let start = Atom::new(x.level, x.vertex, end);
        let tail = self.d.first_hit_partition(start, &ClopenSet::from_atom(tgt), dir)?;
        Ok(tail
            .into_iter()
            .map(|(p, k)| {
                let index = match dir {
                    Direction::Forward => p.index - run,
                    Direction::Backward => p.index + run,
                };
                (Atom::new(p.level, p.vertex, index), k + run)
            })
            .collect())
    }

    /// Splits `src` (at level `>= n`) by the time to first reach `tgt` (at level `n`).
    pub fn partition(&mut self, src: Atom, tgt: Atom, dir: Direction) -> Result<Vec<(Atom, u64)>> {
        debug_assert!(src.level >= self.n && tgt.level == self.n);
        let mut out = Vec::new();
        let mut stack = vec![src];
        while let Some(x) = stack.pop() {
            let segs = self.segments(x.level, x.vertex);
            let hits = segs.iter().filter(|s| s.1 == tgt.vertex).map(|s| s.0 + tgt.index);
            let found = match dir {
                Direction::Forward => hits.filter(|&p| p > x.index).min(),
                Direction::Backward => hits.filter(|&p| p < x.index).max(),
            };
            match found {
                Some(p) => out.push((x, p.abs_diff(x.index))),
                None if x.level < src.level + 2 => {
                    self.d.check_level(x.level + 1)?;
                    stack.extend(self.d.children(x));
                }
                None => out.extend(self.via_column_end(x, tgt, dir)?),
            }
        }
        Ok(coarsen(self.d, out, src.level))
    }
}

/// Merges full sets of siblings sharing a hitting time into their parent.
fn coarsen(d: &OrderedBratteliDiagram, parts: Vec<(Atom, u64)>, floor: usize) -> Vec<(Atom, u64)> {
    let mut cur: std::collections::BTreeMap<Atom, u64> = parts.into_iter().collect();
    let deepest = cur.keys().map(|a| a.level).max().unwrap_or(floor);
    for level in (floor + 1..=deepest).rev() {
        let mut groups: HashMap<Atom, Vec<(Atom, u64)>> = HashMap::new();
        for (&a, &k) in cur.iter().filter(|(a, _)| a.level == level) {
            groups.entry(d.ancestor(a, level - 1)).or_default().push((a, k));
        }
        for (parent, kids) in groups {
            let k = kids[0].1;
            if kids.len() == d.children(parent).len() && kids.iter().all(|c| c.1 == k) {
                for (c, _) in kids {
                    cur.remove(&c);
                }
                cur.insert(parent, k);
            }
        }
    }
    cur.into_iter().collect()
}
