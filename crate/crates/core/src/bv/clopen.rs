use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::One;

use super::atom::Atom;
use super::diagram::OrderedBratteliDiagram;
use crate::error::{Error, Result};

/// A clopen subset of the path space, stored as a set of atoms of one level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClopenSet {
    level: usize,
    members: BTreeSet<Atom>,
}

impl ClopenSet {
    pub fn empty(level: usize) -> Self {
        ClopenSet { level, members: BTreeSet::new() }
    }

    pub fn whole() -> Self {
        ClopenSet::from_atom(Atom::ROOT)
    }

    pub fn from_atom(a: Atom) -> Self {
        ClopenSet { level: a.level, members: [a].into_iter().collect() }
    }

    /// Set of the given atoms, all of which must lie at `level`.
    pub fn from_atoms(level: usize, atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let members: BTreeSet<Atom> = atoms.into_iter().collect();
        if let Some(a) = members.iter().find(|a| a.level != level) {
            return Err(Error::InvalidAtom(format!("{a} is not at level {level}")));
        }
        Ok(ClopenSet { level, members })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn members(&self) -> &BTreeSet<Atom> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.members.iter()
    }
}

impl OrderedBratteliDiagram {
    /// The same set represented at a deeper level.
    pub fn refine_clopen(&self, s: &ClopenSet, target_level: usize) -> Result<ClopenSet> {
        if target_level < s.level {
            return Err(Error::LevelBelowCurrent { current: s.level, target: target_level });
        }
        self.check_level(target_level)?;
        let members = s.members.iter().flat_map(|&a| self.descendants(a, target_level)).collect();
        Ok(ClopenSet { level: target_level, members })
    }

    /// Coarsest representation of the set.
    pub fn canonical(&self, s: &ClopenSet) -> ClopenSet {
        let mut cur = s.clone();
        while cur.level > 0 {
            let mut parents = BTreeSet::new();
            let mut ok = true;
            for &a in &cur.members {
                let p = self.parent(a);
                if parents.contains(&p) {
                    continue;
                }
                if self.children(p).iter().all(|c| cur.members.contains(c)) {
                    parents.insert(p);
                } else {
                    ok = false;
                    break;
                }
            }
            if !ok {
                break;
            }
            cur = ClopenSet { level: cur.level - 1, members: parents };
        }
        if cur.members.is_empty() {
            return ClopenSet::empty(0);
        }
        cur
    }

    fn common(&self, a: &ClopenSet, b: &ClopenSet) -> (ClopenSet, ClopenSet) {
        let l = a.level.max(b.level);
        (self.refine_clopen(a, l).unwrap(), self.refine_clopen(b, l).unwrap())
    }

    pub fn union(&self, a: &ClopenSet, b: &ClopenSet) -> ClopenSet {
        let (x, y) = self.common(a, b);
        ClopenSet { level: x.level, members: x.members.union(&y.members).copied().collect() }
    }

    pub fn intersection(&self, a: &ClopenSet, b: &ClopenSet) -> ClopenSet {
        let (x, y) = self.common(a, b);
        ClopenSet { level: x.level, members: x.members.intersection(&y.members).copied().collect() }
    }

    pub fn difference(&self, a: &ClopenSet, b: &ClopenSet) -> ClopenSet {
        let (x, y) = self.common(a, b);
        ClopenSet { level: x.level, members: x.members.difference(&y.members).copied().collect() }
    }

    pub fn complement(&self, a: &ClopenSet) -> ClopenSet {
        let members = self.atoms(a.level).filter(|x| !a.members.contains(x)).collect();
        ClopenSet { level: a.level, members }
    }

    pub fn set_eq(&self, a: &ClopenSet, b: &ClopenSet) -> bool {
        let (x, y) = self.common(a, b);
        x.members == y.members
    }

    pub fn is_subset(&self, a: &ClopenSet, b: &ClopenSet) -> bool {
        let (x, y) = self.common(a, b);
        x.members.is_subset(&y.members)
    }

    pub fn is_disjoint(&self, a: &ClopenSet, b: &ClopenSet) -> bool {
        let (x, y) = self.common(a, b);
        x.members.is_disjoint(&y.members)
    }

    /// Whether the atom `a` lies inside the set.
    pub fn atom_in(&self, a: Atom, s: &ClopenSet) -> bool {
        if a.level >= s.level {
            s.members.contains(&self.ancestor(a, s.level))
        } else {
            self.descendants(a, s.level).iter().all(|c| s.members.contains(c))
        }
    }

    /// Whether the atom `a` meets the set.
    pub fn atom_meets(&self, a: Atom, s: &ClopenSet) -> bool {
        if a.level >= s.level {
            s.members.contains(&self.ancestor(a, s.level))
        } else {
            self.descendants(a, s.level).iter().any(|c| s.members.contains(c))
        }
    }

    /// Diameter `2^-m` where `m` is the number of leading edges shared by all points.
    pub fn path_metric_diam(&self, s: &ClopenSet) -> Result<BigRational> {
        let first = *s.members.iter().next().ok_or(Error::EmptySet)?;
        let mut m = s.level;
        for &a in &s.members {
            m = m.min(self.common_prefix(first, a));
        }
        Ok(BigRational::one() / BigRational::from_integer(num_bigint::BigInt::from(2u32).pow(m as u32)))
    }

    /// Whether every member lies inside one atom of level `m`.
    pub fn within_one_atom(&self, s: &ClopenSet, m: usize) -> bool {
        if s.is_empty() {
            return true;
        }
        if m > s.level {
            return false;
        }
        let mut it = s.members.iter().map(|&a| self.ancestor(a, m));
        let first = it.next().unwrap();
        it.all(|a| a == first)
    }
}

/// An integer-valued function constant on the atoms of one level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CylinderFunction {
    level: usize,
    /// `values[v][i]` is the value on atom `(level, v, i)`.
    values: Vec<Vec<i64>>,
}

impl CylinderFunction {
    pub fn new(d: &OrderedBratteliDiagram, level: usize, values: Vec<Vec<i64>>) -> Result<Self> {
        d.check_level(level)?;
        if values.len() != d.vertex_count(level)
            || values.iter().enumerate().any(|(v, col)| col.len() as u64 != d.height(level, v))
        {
            return Err(Error::ResolutionMismatch(format!(
                "function table does not match level-{level} columns"
            )));
        }
        Ok(CylinderFunction { level, values })
    }

    pub fn constant(d: &OrderedBratteliDiagram, level: usize, c: i64) -> Self {
        let values = d.heights(level).iter().map(|&h| vec![c; h as usize]).collect();
        CylinderFunction { level, values }
    }

    pub fn zero(d: &OrderedBratteliDiagram, level: usize) -> Self {
        CylinderFunction::constant(d, level, 0)
    }

    pub fn indicator(d: &OrderedBratteliDiagram, s: &ClopenSet) -> Self {
        let mut f = CylinderFunction::zero(d, s.level());
        for a in s.iter() {
            f.values[a.vertex][a.index as usize] = 1;
        }
        f
    }

    pub fn from_fn(d: &OrderedBratteliDiagram, level: usize, mut g: impl FnMut(Atom) -> i64) -> Self {
        let values = (0..d.vertex_count(level))
            .map(|v| (0..d.height(level, v)).map(|i| g(Atom::new(level, v, i))).collect())
            .collect();
        CylinderFunction { level, values }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn values(&self) -> &[Vec<i64>] {
        &self.values
    }

    /// Value on an atom at this level or deeper.
    pub fn value(&self, d: &OrderedBratteliDiagram, a: Atom) -> i64 {
        let b = d.ancestor(a, self.level);
        self.values[b.vertex][b.index as usize]
    }

    pub fn refine(&self, d: &OrderedBratteliDiagram, level: usize) -> Result<Self> {
        if level < self.level {
            return Err(Error::LevelBelowCurrent { current: self.level, target: level });
        }
        d.check_level(level)?;
        Ok(CylinderFunction::from_fn(d, level, |a| self.value(d, a)))
    }

    fn zip(&self, d: &OrderedBratteliDiagram, o: &Self, op: impl Fn(i64, i64) -> i64) -> Self {
        let l = self.level.max(o.level);
        CylinderFunction::from_fn(d, l, |a| op(self.value(d, a), o.value(d, a)))
    }

    pub fn add(&self, d: &OrderedBratteliDiagram, o: &Self) -> Self {
        self.zip(d, o, |x, y| x + y)
    }

    pub fn sub(&self, d: &OrderedBratteliDiagram, o: &Self) -> Self {
        self.zip(d, o, |x, y| x - y)
    }

    pub fn scale(&self, c: i64) -> Self {
        CylinderFunction {
            level: self.level,
            values: self.values.iter().map(|col| col.iter().map(|x| x * c).collect()).collect(),
        }
    }

    pub fn max_abs(&self) -> i64 {
        self.values.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(|&x| x == 0)
    }

    pub fn min_value(&self) -> i64 {
        self.values.iter().flatten().copied().min().unwrap_or(0)
    }

    /// Pointwise `self <= o`.
    pub fn le(&self, d: &OrderedBratteliDiagram, o: &Self) -> bool {
        let l = self.level.max(o.level);
        d.atoms(l).all(|a| self.value(d, a) <= o.value(d, a))
    }
}
