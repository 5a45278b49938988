//! Ordered Bratteli diagrams.
//!
//! Step `n` goes from level `n` to level `n + 1`. Its incidence matrix has
//! one row per level-`(n+1)` vertex and one column per level-`n` vertex.
//! Incoming edges of every vertex are stored as the ordered list of their
//! sources, so an edge is identified by `(step, target, position)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Heights are cached until they would exceed this bound.
const HEIGHT_CAP: u64 = 1 << 48;
const LEVEL_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailRule {
    /// Matrix `incidence[1]` (with its edge order) repeats forever.
    Stationary,
    /// The diagram stops after the listed steps.
    Finite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedBratteliDiagram {
    incidence: Vec<Vec<Vec<u64>>>,
    sources: Vec<Vec<Vec<usize>>>,
    tail: TailRule,
    heights: Vec<Vec<u64>>,
}

/// Default enumeration of incoming edges of one vertex: by source index,
/// repeated according to multiplicity.
pub fn default_sources(row: &[u64]) -> Vec<usize> {
    row.iter().enumerate().flat_map(|(v, &m)| std::iter::repeat(v).take(m as usize)).collect()
}

impl OrderedBratteliDiagram {
    /// Builds a diagram. `edge_order[n][w]`, when given, is a permutation of
    /// the default enumeration of incoming edges of `w` at step `n`.
    pub fn new(
        incidence: Vec<Vec<Vec<u64>>>,
        edge_order: Option<Vec<Vec<Vec<usize>>>>,
        tail: TailRule,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::MalformedDiagram(m));
        if incidence.is_empty() {
            return bad("no incidence matrices".into());
        }
        let mut prev = 1usize;
        for (n, m) in incidence.iter().enumerate() {
            if m.is_empty() {
                return bad(format!("step {n} has no target vertices"));
            }
            for (w, row) in m.iter().enumerate() {
                if row.len() != prev {
                    return bad(format!(
                        "step {n} row {w} has {} entries, expected {prev}",
                        row.len()
                    ));
                }
                if row.iter().all(|&x| x == 0) {
                    return bad(format!("level-{} vertex {w} has no incoming edge", n + 1));
                }
            }
            for v in 0..prev {
                if m.iter().all(|row| row[v] == 0) {
                    return bad(format!("level-{n} vertex {v} has no outgoing edge"));
                }
            }
            prev = m.len();
        }
        if tail == TailRule::Stationary {
            if incidence.len() != 2 {
                return bad("stationary diagrams need a root matrix and one repeating matrix".into());
            }
            let m = &incidence[1];
            if m.len() != m[0].len() {
                return bad("stationary matrix is not square".into());
            }
            if incidence[0].len() != m.len() {
                return bad("root matrix size does not match the stationary matrix".into());
            }
        }
        let mut sources = Vec::with_capacity(incidence.len());
        for (n, m) in incidence.iter().enumerate() {
            let mut step = Vec::with_capacity(m.len());
            for (w, row) in m.iter().enumerate() {
                let def = default_sources(row);
                let ordered = match edge_order.as_ref().and_then(|o| o.get(n)).and_then(|s| s.get(w)) {
                    None => def,
                    Some(perm) => {
                        let mut seen = vec![false; def.len()];
                        if perm.len() != def.len() {
                            return bad(format!("edge order of step {n} vertex {w} has wrong length"));
                        }
                        for &p in perm {
                            if p >= def.len() || seen[p] {
                                return bad(format!("edge order of step {n} vertex {w} is not a permutation"));
                            }
                            seen[p] = true;
                        }
                        perm.iter().map(|&p| def[p]).collect()
                    }
                };
                step.push(ordered);
            }
            sources.push(step);
        }
        let mut d = OrderedBratteliDiagram { incidence, sources, tail, heights: vec![vec![1]] };
        d.fill_heights();
        Ok(d)
    }

    /// Builds a diagram directly from ordered source lists.
    pub fn from_sources(sources: Vec<Vec<Vec<usize>>>, tail: TailRule) -> Result<Self> {
        let mut prev = 1usize;
        let mut incidence = Vec::new();
        for step in &sources {
            let mut m = Vec::new();
            for list in step {
                let mut row = vec![0u64; prev];
                for &s in list {
                    if s >= prev {
                        return Err(Error::MalformedDiagram(format!("edge source {s} out of range")));
                    }
                    row[s] += 1;
                }
                m.push(row);
            }
            prev = step.len();
            incidence.push(m);
        }
        let d = OrderedBratteliDiagram::new(incidence, None, tail)?;
        let mut d = OrderedBratteliDiagram { sources, ..d };
        d.heights = vec![vec![1]];
        d.fill_heights();
        Ok(d)
    }

    fn fill_heights(&mut self) {
        let limit = match self.tail {
            TailRule::Finite => self.incidence.len(),
            TailRule::Stationary => LEVEL_CAP,
        };
        while self.heights.len() <= limit {
            let n = self.heights.len() - 1;
            let h = &self.heights[n];
            let m = self.matrix(n);
            let mut next = Vec::with_capacity(m.len());
            for row in m {
                let mut s: u64 = 0;
                for (a, b) in row.iter().zip(h) {
                    s = match a.checked_mul(*b).and_then(|p| s.checked_add(p)) {
                        Some(x) => x,
                        None => return,
                    };
                }
                next.push(s);
            }
            if next.iter().any(|&x| x > HEIGHT_CAP) {
                return;
            }
            self.heights.push(next);
        }
    }

    /// Alias for the dyadic odometer.
    pub fn odometer(k: u64) -> Self {
        OrderedBratteliDiagram::new(vec![vec![vec![k]], vec![vec![k]]], None, TailRule::Stationary)
            .expect("odometer is well formed")
    }

    /// Stationary diagram with block `m` and one edge from the root to each vertex.
    pub fn stationary(m: Vec<Vec<u64>>) -> Result<Self> {
        let root = vec![vec![1]; m.len()];
        OrderedBratteliDiagram::new(vec![root, m], None, TailRule::Stationary)
    }

    pub fn tail(&self) -> TailRule {
        self.tail
    }

    pub fn is_stationary(&self) -> bool {
        self.tail == TailRule::Stationary
    }

    /// Deepest level for which atoms can be enumerated.
    pub fn max_level(&self) -> usize {
        self.heights.len() - 1
    }

    /// Deepest level whose atoms have a computable Vershik image.
    pub fn max_dynamic_level(&self) -> usize {
        match self.tail {
            TailRule::Finite => self.max_level().saturating_sub(1),
            TailRule::Stationary => self.max_level() - 1,
        }
    }

    pub fn check_level(&self, n: usize) -> Result<()> {
        if n > self.max_level() {
            Err(Error::DepthExceeded(n))
        } else {
            Ok(())
        }
    }

    pub fn declared_steps(&self) -> usize {
        self.incidence.len()
    }

    pub fn raw_incidence(&self) -> &[Vec<Vec<u64>>] {
        &self.incidence
    }

    fn step_index(&self, n: usize) -> usize {
        match self.tail {
            TailRule::Stationary => n.min(1),
            TailRule::Finite => n,
        }
    }

    /// Incidence matrix of step `n`.
    pub fn matrix(&self, n: usize) -> &[Vec<u64>] {
        &self.incidence[self.step_index(n)]
    }

    /// Sources of incoming edges of level-`(n+1)` vertex `w`, in edge order.
    pub fn in_edges(&self, n: usize, w: usize) -> &[usize] {
        &self.sources[self.step_index(n)][w]
    }

    pub fn step_sources(&self, n: usize) -> &[Vec<usize>] {
        &self.sources[self.step_index(n)]
    }

    pub fn vertex_count(&self, n: usize) -> usize {
        if n == 0 {
            1
        } else {
            self.matrix(n - 1).len()
        }
    }

    pub fn heights(&self, n: usize) -> &[u64] {
        &self.heights[n]
    }

    pub fn height(&self, n: usize, v: usize) -> u64 {
        self.heights[n][v]
    }

    pub fn atom_count(&self, n: usize) -> u64 {
        self.heights[n].iter().sum()
    }

    /// Vershik offset of the `k`-th incoming edge of level-`(n+1)` vertex `w`.
    pub fn offset(&self, n: usize, w: usize, k: usize) -> u64 {
        self.in_edges(n, w)[..k].iter().map(|&s| self.heights[n][s]).sum()
    }

    /// Source of every maximal edge of step `n`, if it is the same for all targets.
    pub fn max_source(&self, n: usize) -> Option<usize> {
        constant(self.step_sources(n).iter().map(|l| *l.last().unwrap()))
    }

    /// Source of every minimal edge of step `n`, if it is the same for all targets.
    pub fn min_source(&self, n: usize) -> Option<usize> {
        constant(self.step_sources(n).iter().map(|l| l[0]))
    }

    /// Level-`n` vertex of the all-maximal path (for `n >= 1`).
    pub fn max_vertex(&self, n: usize) -> Result<usize> {
        if n == 0 {
            return Ok(0);
        }
        self.max_source(n).ok_or_else(|| {
            Error::NotProperlyOrdered(format!("maximal edges of step {n} have several sources"))
        })
    }

    /// Level-`n` vertex of the all-minimal path (for `n >= 1`).
    pub fn min_vertex(&self, n: usize) -> Result<usize> {
        if n == 0 {
            return Ok(0);
        }
        self.min_source(n).ok_or_else(|| {
            Error::NotProperlyOrdered(format!("minimal edges of step {n} have several sources"))
        })
    }

    /// Telescopes a stationary diagram so that the repeating block becomes
    /// `M^k`. Level `1 + j k` of `self` becomes level `1 + j` of the result.
    pub fn telescope(&self, k: usize) -> Result<Self> {
        if self.tail != TailRule::Stationary || k == 0 {
            return Err(Error::UnsupportedDiagram("telescoping needs a stationary diagram and k >= 1".into()));
        }
        let block = &self.sources[1];
        let mut comp: Vec<Vec<usize>> = (0..block.len()).map(|v| vec![v]).collect();
        for _ in 0..k {
            comp = block
                .iter()
                .map(|list| list.iter().flat_map(|&u| comp[u].iter().copied()).collect())
                .collect();
        }
        OrderedBratteliDiagram::from_sources(vec![self.sources[0].clone(), comp], TailRule::Stationary)
    }
}

fn constant(mut it: impl Iterator<Item = usize>) -> Option<usize> {
    let first = it.next()?;
    it.all(|x| x == first).then_some(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heights_and_offsets() {
        let d = OrderedBratteliDiagram::stationary(vec![vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(d.heights(1), &[1, 1]);
        assert_eq!(d.heights(2), &[3, 3]);
        assert_eq!(d.heights(3), &[9, 9]);
        assert_eq!(d.in_edges(1, 0), &[0, 0, 1]);
        assert_eq!(d.offset(1, 0, 2), 2);
        assert_eq!(d.max_source(1), Some(1));
        assert_eq!(d.min_source(1), Some(0));
    }

    #[test]
    fn malformed_inputs() {
        let e = OrderedBratteliDiagram::new(
            vec![vec![vec![1], vec![1]], vec![vec![1, 0], vec![0, 0]]],
            None,
            TailRule::Finite,
        );
        assert!(matches!(e, Err(Error::MalformedDiagram(_))));
        let e = OrderedBratteliDiagram::new(vec![vec![vec![1]], vec![vec![1, 1]]], None, TailRule::Finite);
        assert!(matches!(e, Err(Error::MalformedDiagram(_))));
    }

    #[test]
    fn telescoping_composes_blocks() {
        let d = OrderedBratteliDiagram::stationary(vec![vec![1, 1], vec![1, 0]]).unwrap();
        let t = d.telescope(2).unwrap();
        assert_eq!(t.matrix(1), &[vec![2, 1], vec![1, 1]]);
        assert_eq!(t.heights(2), d.heights(3));
    }
}
