//! The Vershik map on atoms, clopen sets and designated points.

use std::collections::BTreeSet;

use super::atom::{Atom, PathEdge};
use super::clopen::{ClopenSet, CylinderFunction};
use super::diagram::OrderedBratteliDiagram;
use super::validate::{default_window_bound, primitivity_window};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Successor {
    Atom(Atom),
    /// Sub-atoms one level deeper, each paired with the atom (at the
    /// original level) containing its image.
    Split(Vec<(Atom, Atom)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tail {
    Max,
    Min,
    Unspecified,
}

/// A point given by a finite path and a rule for extending it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointPrefix {
    pub path: Vec<PathEdge>,
    pub tail: Tail,
}

impl PointPrefix {
    pub fn all_max() -> Self {
        PointPrefix { path: Vec::new(), tail: Tail::Max }
    }

    pub fn all_min() -> Self {
        PointPrefix { path: Vec::new(), tail: Tail::Min }
    }
}

/// Edges read past a prefix when looking for one that is not extreme.
const TAIL_SEARCH: usize = 64;

impl OrderedBratteliDiagram {
    fn check_dynamic(&self, n: usize) -> Result<()> {
        if n > self.max_dynamic_level() {
            Err(Error::DepthExceeded(n + 1))
        } else {
            Ok(())
        }
    }

    /// Exact image of a top atom, as a set of atoms one level deeper.
    pub fn top_image(&self, a: Atom) -> Result<Vec<Atom>> {
        let n = a.level;
        self.check_dynamic(n)?;
        let vmax = self.max_vertex(n)?;
        let mut out = Vec::new();
        for w in 0..self.vertex_count(n + 1) {
            let srcs = self.in_edges(n, w);
            for k in 0..srcs.len() - 1 {
                if srcs[k] == a.vertex {
                    out.push(Atom::new(n + 1, w, self.offset(n, w, k + 1)));
                }
            }
        }
        if a.vertex == vmax {
            out.extend((0..self.vertex_count(n + 1)).map(|w| Atom::new(n + 1, w, 0)));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Exact preimage of a base atom, as a set of atoms one level deeper.
    pub fn base_preimage(&self, a: Atom) -> Result<Vec<Atom>> {
        let n = a.level;
        self.check_dynamic(n)?;
        let umin = self.min_vertex(n)?;
        let mut out = Vec::new();
        for w in 0..self.vertex_count(n + 1) {
            let srcs = self.in_edges(n, w);
            for k in 1..srcs.len() {
                if srcs[k] == a.vertex {
                    out.push(Atom::new(n + 1, w, self.offset(n, w, k) - 1));
                }
            }
        }
        if a.vertex == umin {
            out.extend((0..self.vertex_count(n + 1)).map(|w| Atom::new(n + 1, w, self.height(n + 1, w) - 1)));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn atom_successor(&self, a: Atom) -> Result<Successor> {
        self.check_atom(a)?;
        if !self.is_top(a) {
            return Ok(Successor::Atom(Atom::new(a.level, a.vertex, a.index + 1)));
        }
        let n = a.level;
        self.check_dynamic(n)?;
        let umin = self.min_vertex(n)?;
        let mut parts = Vec::new();
        for c in self.children(a) {
            let (k, _, _) = self.locate(n, c.vertex, c.index);
            let srcs = self.in_edges(n, c.vertex);
            let img = if k + 1 < srcs.len() {
                Atom::new(n, srcs[k + 1], 0)
            } else {
                Atom::new(n, umin, 0)
            };
            parts.push((c, img));
        }
        if parts.iter().all(|p| p.1 == parts[0].1) {
            return Ok(Successor::Atom(parts[0].1));
        }
        Ok(Successor::Split(parts))
    }

    /// Exact image (or preimage) of one atom.
    pub fn atom_step(&self, a: Atom, dir: Direction) -> Result<ClopenSet> {
        match dir {
            Direction::Forward if !self.is_top(a) => {
                Ok(ClopenSet::from_atom(Atom::new(a.level, a.vertex, a.index + 1)))
            }
            Direction::Backward if !self.is_base(a) => {
                Ok(ClopenSet::from_atom(Atom::new(a.level, a.vertex, a.index - 1)))
            }
            Direction::Forward => ClopenSet::from_atoms(a.level + 1, self.top_image(a)?),
            Direction::Backward => ClopenSet::from_atoms(a.level + 1, self.base_preimage(a)?),
        }
    }

    /// Exact image `T(s)` or preimage `T^{-1}(s)` of a clopen set, in canonical form.
    pub fn step(&self, s: &ClopenSet, dir: Direction) -> Result<ClopenSet> {
        let l = s.level();
        let mut deeper = false;
        let mut parts = Vec::with_capacity(s.len());
        for &a in s.iter() {
            let img = self.atom_step(a, dir)?;
            deeper |= img.level() > l;
            parts.push(img);
        }
        let target = if deeper { l + 1 } else { l };
        self.check_level(target)?;
        let mut members = BTreeSet::new();
        for p in parts {
            members.extend(self.refine_clopen(&p, target)?.members().iter().copied());
        }
        Ok(self.canonical(&ClopenSet::from_atoms(target, members)?))
    }

    pub fn image(&self, s: &ClopenSet) -> Result<ClopenSet> {
        self.step(s, Direction::Forward)
    }

    pub fn preimage(&self, s: &ClopenSet) -> Result<ClopenSet> {
        self.step(s, Direction::Backward)
    }

    /// `T^k(s)` for an integer `k` of either sign.
    pub fn power_image(&self, s: &ClopenSet, k: i64) -> Result<ClopenSet> {
        let dir = if k >= 0 { Direction::Forward } else { Direction::Backward };
        let mut cur = self.canonical(s);
        for _ in 0..k.unsigned_abs() {
            cur = self.step(&cur, dir)?;
        }
        Ok(cur)
    }

    /// Upper bound on first hitting times of a set resolved at `level`.
    pub fn hit_bound(&self, level: usize) -> u64 {
        let w = primitivity_window(self, default_window_bound(self)).unwrap_or(1);
        let m = (level + w + 1).min(self.max_level());
        2 * self.heights(m).iter().max().copied().unwrap_or(1)
    }

    /// Splits `a` into atoms on which the first hitting time of `target`
    /// (forward or backward) is constant; times are at least 1.
    pub fn first_hit_partition(&self, a: Atom, target: &ClopenSet, dir: Direction) -> Result<Vec<(Atom, u64)>> {
        if target.is_empty() {
            return Err(Error::EmptySet);
        }
        let bound = self.hit_bound(target.level().max(a.level));
        let mut out = Vec::new();
        let mut stack = vec![(a, 0u64, ClopenSet::from_atom(a))];
        while let Some((b, k, img)) = stack.pop() {
            if k >= 1 {
                if self.is_subset(&img, target) {
                    out.push((b, k));
                    continue;
                }
                if !self.is_disjoint(&img, target) {
                    for c in self.children(b) {
                        self.check_level(c.level)?;
                        let mut ci = ClopenSet::from_atom(c);
                        for _ in 0..k {
                            ci = self.step(&ci, dir)?;
                        }
                        stack.push((c, k, ci));
                    }
                    continue;
                }
            }
            if k >= bound {
                return Err(Error::PreconditionFailed(format!(
                    "no hit of the target from {b} within {bound} steps"
                )));
            }
            let next = self.step(&img, dir)?;
            stack.push((b, k + 1, next));
        }
        out.sort();
        Ok(out)
    }

    /// Partition of a clopen set by first hitting time of `target`.
    pub fn first_hit_partition_set(
        &self,
        s: &ClopenSet,
        target: &ClopenSet,
        dir: Direction,
    ) -> Result<Vec<(Atom, u64)>> {
        let mut out = Vec::new();
        for &a in s.iter() {
            out.extend(self.first_hit_partition(a, target, dir)?);
        }
        Ok(out)
    }

    fn min_path_to(&self, level: usize, v: usize) -> Vec<PathEdge> {
        let mut path = vec![PathEdge { target: 0, position: 0 }; level];
        let mut w = v;
        for n in (0..level).rev() {
            path[n] = PathEdge { target: w, position: 0 };
            w = self.in_edges(n, w)[0];
        }
        path
    }

    fn max_path_to(&self, level: usize, v: usize) -> Vec<PathEdge> {
        let mut path = vec![PathEdge { target: 0, position: 0 }; level];
        let mut w = v;
        for n in (0..level).rev() {
            let srcs = self.in_edges(n, w);
            path[n] = PathEdge { target: w, position: srcs.len() - 1 };
            w = srcs[srcs.len() - 1];
        }
        path
    }

    fn end_vertex(path: &[PathEdge]) -> usize {
        path.last().map_or(0, |e| e.target)
    }

    /// The first `m` edges of a point, extending through its tail if needed.
    pub fn point_prefix(&self, x: &PointPrefix, m: usize) -> Result<Vec<PathEdge>> {
        self.atom_of_path(&x.path)?;
        let mut path: Vec<PathEdge> = x.path.iter().take(m).copied().collect();
        while path.len() < m {
            let l = path.len();
            if l >= self.declared_steps() && !self.is_stationary() {
                return Err(Error::DepthExceeded(l + 1));
            }
            let v = Self::end_vertex(&path);
            match x.tail {
                Tail::Unspecified => return Err(Error::UnderspecifiedPoint),
                Tail::Max => {
                    if l > 0 && v != self.max_vertex(l)? {
                        return Err(Error::InvalidAtom("maximal tail from a non-maximal vertex".into()));
                    }
                    let w = self.max_vertex(l + 1)?;
                    path.push(PathEdge { target: w, position: self.in_edges(l, w).len() - 1 });
                }
                Tail::Min => {
                    if l > 0 && v != self.min_vertex(l)? {
                        return Err(Error::InvalidAtom("minimal tail from a non-minimal vertex".into()));
                    }
                    let w = self.min_vertex(l + 1)?;
                    path.push(PathEdge { target: w, position: 0 });
                }
            }
        }
        Ok(path)
    }

    /// Level-`m` atom containing the point.
    pub fn point_atom(&self, x: &PointPrefix, m: usize) -> Result<Atom> {
        self.atom_of_path(&self.point_prefix(x, m)?)
    }

    pub fn point_in(&self, x: &PointPrefix, s: &ClopenSet) -> Result<bool> {
        Ok(s.members().contains(&self.point_atom(x, s.level())?))
    }

    pub fn evaluate_function(&self, f: &CylinderFunction, x: &PointPrefix) -> Result<i64> {
        Ok(f.value(self, self.point_atom(x, f.level())?))
    }

    /// `T(x)` (forward) or `T^{-1}(x)` (backward).
    pub fn point_step(&self, x: &PointPrefix, dir: Direction) -> Result<PointPrefix> {
        let fwd = dir == Direction::Forward;
        let extreme = |e: &PathEdge, n: usize| {
            let len = self.in_edges(n, e.target).len();
            if fwd {
                e.position + 1 == len
            } else {
                e.position == 0
            }
        };
        let mut path = x.path.clone();
        let mut j = (0..path.len()).find(|&n| !extreme(&path[n], n));
        if j.is_none() {
            let (wrap, pass) = if fwd { (Tail::Max, Tail::Min) } else { (Tail::Min, Tail::Max) };
            if x.tail == wrap {
                let tail = pass;
                return Ok(PointPrefix { path: Vec::new(), tail });
            }
            if x.tail == Tail::Unspecified {
                return Err(Error::UnderspecifiedPoint);
            }
            let start = path.len();
            for m in start + 1..=start + TAIL_SEARCH {
                path = self.point_prefix(x, m)?;
                if !extreme(&path[m - 1], m - 1) {
                    j = Some(m - 1);
                    break;
                }
            }
            if j.is_none() {
                return Err(Error::NotProperlyOrdered("tail edges are both minimal and maximal".into()));
            }
        }
        let j = j.unwrap();
        let e = path[j];
        let pos = if fwd { e.position + 1 } else { e.position - 1 };
        let src = self.in_edges(j, e.target)[pos];
        let head = if fwd { self.min_path_to(j, src) } else { self.max_path_to(j, src) };
        let mut out = head;
        out.push(PathEdge { target: e.target, position: pos });
        out.extend_from_slice(&path[j + 1..]);
        Ok(PointPrefix { path: out, tail: x.tail })
    }

    pub fn point_successor(&self, x: &PointPrefix) -> Result<PointPrefix> {
        self.point_step(x, Direction::Forward)
    }

    pub fn point_predecessor(&self, x: &PointPrefix) -> Result<PointPrefix> {
        self.point_step(x, Direction::Backward)
    }

    pub fn point_power(&self, x: &PointPrefix, k: i64) -> Result<PointPrefix> {
        let dir = if k >= 0 { Direction::Forward } else { Direction::Backward };
        let mut cur = x.clone();
        for _ in 0..k.unsigned_abs() {
            cur = self.point_step(&cur, dir)?;
        }
        Ok(cur)
    }
}
