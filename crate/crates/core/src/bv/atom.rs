use std::fmt;

use serde::{Deserialize, Serialize};

use super::diagram::OrderedBratteliDiagram;
use crate::error::{Error, Result};

/// A cylinder set: all infinite paths through one finite path from the root.
///
/// The finite path is identified by its end vertex and its position in the
/// Vershik order of paths ending there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub level: usize,
    pub vertex: usize,
    pub index: u64,
}

impl Atom {
    pub const ROOT: Atom = Atom { level: 0, vertex: 0, index: 0 };

    pub fn new(level: usize, vertex: usize, index: u64) -> Self {
        Atom { level, vertex, index }
    }
}

/// One edge of a path: its target vertex and its position among the
/// target's incoming edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathEdge {
    pub target: usize,
    pub position: usize,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}:{}:{}", self.level, self.vertex, self.index)
    }
}

impl OrderedBratteliDiagram {
    pub fn check_atom(&self, a: Atom) -> Result<()> {
        self.check_level(a.level)?;
        if a.vertex >= self.vertex_count(a.level) || a.index >= self.height(a.level, a.vertex) {
            return Err(Error::InvalidAtom(a.to_string()));
        }
        Ok(())
    }

    /// Finite path of an atom as `(target vertex, edge position)` per step,
    /// first step first.
    pub fn atom_path(&self, a: Atom) -> Vec<PathEdge> {
        let mut path = vec![PathEdge { target: 0, position: 0 }; a.level];
        let (mut v, mut i) = (a.vertex, a.index);
        for n in (0..a.level).rev() {
            let (k, src, rest) = self.locate(n, v, i);
            path[n] = PathEdge { target: v, position: k };
            v = src;
            i = rest;
        }
        path
    }

    /// Splits the index of a level-`(n+1)` atom at `w` into the position of
    /// its last edge, the source of that edge and the index of the prefix.
    pub(crate) fn locate(&self, n: usize, w: usize, mut i: u64) -> (usize, usize, u64) {
        for (k, &s) in self.in_edges(n, w).iter().enumerate() {
            let h = self.height(n, s);
            if i < h {
                return (k, s, i);
            }
            i -= h;
        }
        unreachable!("index beyond column height")
    }

    pub fn atom_of_path(&self, path: &[PathEdge]) -> Result<Atom> {
        self.check_level(path.len())?;
        let mut a = Atom::ROOT;
        for (n, e) in path.iter().enumerate() {
            let srcs = self
                .step_sources(n)
                .get(e.target)
                .ok_or_else(|| Error::InvalidAtom(format!("no vertex {} at level {}", e.target, n + 1)))?;
            match srcs.get(e.position) {
                Some(&s) if s == a.vertex => {}
                _ => {
                    return Err(Error::InvalidAtom(format!(
                        "edge {}.{} of step {n} does not start at vertex {}",
                        e.target, e.position, a.vertex
                    )))
                }
            }
            a = Atom::new(n + 1, e.target, self.offset(n, e.target, e.position) + a.index);
        }
        Ok(a)
    }

    pub fn parent(&self, a: Atom) -> Atom {
        let (_, s, rest) = self.locate(a.level - 1, a.vertex, a.index);
        Atom::new(a.level - 1, s, rest)
    }

    /// Ancestor of `a` at level `m <= a.level`.
    pub fn ancestor(&self, a: Atom, m: usize) -> Atom {
        let mut b = a;
        while b.level > m {
            b = self.parent(b);
        }
        b
    }

    /// Level-`(n+1)` sub-atoms of `a`, ordered by target vertex then edge position.
    pub fn children(&self, a: Atom) -> Vec<Atom> {
        let n = a.level;
        let mut out = Vec::new();
        for w in 0..self.vertex_count(n + 1) {
            let mut off = 0;
            for &s in self.in_edges(n, w) {
                if s == a.vertex {
                    out.push(Atom::new(n + 1, w, off + a.index));
                }
                off += self.height(n, s);
            }
        }
        out
    }

    /// All sub-atoms of `a` at level `m >= a.level`.
    pub fn descendants(&self, a: Atom, m: usize) -> Vec<Atom> {
        let mut cur = vec![a];
        for _ in a.level..m {
            cur = cur.iter().flat_map(|&b| self.children(b)).collect();
        }
        cur
    }

    pub fn atoms(&self, n: usize) -> impl Iterator<Item = Atom> + '_ {
        (0..self.vertex_count(n))
            .flat_map(move |v| (0..self.height(n, v)).map(move |i| Atom::new(n, v, i)))
    }

    pub fn is_top(&self, a: Atom) -> bool {
        a.index + 1 == self.height(a.level, a.vertex)
    }

    pub fn is_base(&self, a: Atom) -> bool {
        a.index == 0
    }

    /// Whether `a` contains `b` (requires `a.level <= b.level`).
    pub fn atom_contains(&self, a: Atom, b: Atom) -> bool {
        a.level <= b.level && self.ancestor(b, a.level) == a
    }

    /// Number of leading steps shared by two finite paths, given as atoms.
    pub fn common_prefix(&self, a: Atom, b: Atom) -> usize {
        let mut m = a.level.min(b.level);
        let (mut x, mut y) = (self.ancestor(a, m), self.ancestor(b, m));
        while x != y {
            x = self.parent(x);
            y = self.parent(y);
            m -= 1;
        }
        m
    }
}
