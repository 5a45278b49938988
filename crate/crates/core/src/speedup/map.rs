use std::collections::HashMap;
use std::fmt;

use super::hits::atom_power;
use crate::bv::{Atom, ClopenSet, Direction, OrderedBratteliDiagram, PointPrefix};
use crate::error::{Error, Result};

/// How the jump on one domain atom was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JumpRule {
    /// A fixed power of the map.
    Power(u64),
    /// The first forward hitting time of `target`.
    FirstHit { target: ClopenSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeedupEntry {
    pub domain: Atom,
    pub rule: JumpRule,
    /// Value of the jump function on `domain`.
    pub jump: u64,
    /// `T^jump(domain)`.
    pub image: ClopenSet,
}

/// A jump function `p` known on finitely many atoms, together with the
/// induced map `x ↦ T^{p(x)}(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeedupMap {
    pub entries: Vec<SpeedupEntry>,
    pub designated_point: Option<(PointPrefix, u64)>,
    pub domain_cover: ClopenSet,
}

impl SpeedupEntry {
    pub fn power(d: &OrderedBratteliDiagram, domain: Atom, k: u64) -> Result<Self> {
        let image = atom_power(d, domain, k as i64)?;
        Ok(SpeedupEntry { domain, rule: JumpRule::Power(k), jump: k, image })
    }

    pub fn first_hit(d: &OrderedBratteliDiagram, domain: Atom, target: &ClopenSet, k: u64) -> Result<Self> {
        let image = atom_power(d, domain, k as i64)?;
        Ok(SpeedupEntry { domain, rule: JumpRule::FirstHit { target: target.clone() }, jump: k, image })
    }
}

impl SpeedupMap {
    pub fn empty() -> Self {
        SpeedupMap { entries: Vec::new(), designated_point: None, domain_cover: ClopenSet::empty(0) }
    }

    /// Collects entries, rejecting overlapping domains and zero jumps.
    pub fn new(d: &OrderedBratteliDiagram, entries: Vec<SpeedupEntry>) -> Result<Self> {
        let mut m = SpeedupMap::empty();
        m.extend(d, entries)?;
        Ok(m)
    }

    pub fn extend(&mut self, d: &OrderedBratteliDiagram, entries: Vec<SpeedupEntry>) -> Result<()> {
        if let Some(e) = entries.iter().find(|e| e.jump == 0) {
            return Err(Error::PreconditionFailed(format!("zero jump on {}", e.domain)));
        }
        let doms: Vec<(Atom, ClopenSet)> = entries.iter().map(|e| (e.domain, ClopenSet::from_atom(e.domain))).collect();
        let (added, clashes) = disjoint_union(d, doms.iter().map(|(a, s)| (*a, s)))?;
        if let Some((a, _)) = clashes.first() {
            return Err(Error::PreconditionFailed(format!("domain atom {a} overlaps another entry")));
        }
        if !d.is_disjoint(&added, &self.domain_cover) {
            return Err(Error::PreconditionFailed("new entries overlap the cover".into()));
        }
        self.domain_cover = d.union(&self.domain_cover, &added);
        self.entries.extend(entries);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn image_cover(&self, d: &OrderedBratteliDiagram) -> ClopenSet {
        disjoint_union(d, self.entries.iter().map(|e| (e.domain, &e.image))).map(|r| r.0).unwrap_or_else(|_| ClopenSet::empty(0))
    }

    pub fn max_jump(&self) -> Option<u64> {
        self.entries.iter().map(|e| e.jump).max()
    }

    /// Jump value at an atom lying inside one domain atom.
    pub fn jump_at(&self, d: &OrderedBratteliDiagram, a: Atom) -> Option<u64> {
        self.entries.iter().find(|e| d.atom_in(a, &ClopenSet::from_atom(e.domain))).map(|e| e.jump)
    }

    /// Image of a clopen subset of the covered domain.
    pub fn image_of_set(&self, d: &OrderedBratteliDiagram, s: &ClopenSet) -> Result<ClopenSet> {
        if !d.is_subset(s, &self.domain_cover) {
            return Err(Error::PreconditionFailed("set leaves the domain of the speedup".into()));
        }
        let mut out = ClopenSet::empty(0);
        for e in &self.entries {
            let piece = d.intersection(s, &ClopenSet::from_atom(e.domain));
            if piece.is_empty() {
                continue;
            }
            out = d.union(&out, &d.power_image(&piece, e.jump as i64)?);
        }
        Ok(out)
    }

    /// `T'^k(s)` for `k >= 0`, every intermediate set staying in the domain.
    pub fn iterate_set(&self, d: &OrderedBratteliDiagram, s: &ClopenSet, k: usize) -> Result<ClopenSet> {
        let mut cur = d.canonical(s);
        for _ in 0..k {
            cur = self.image_of_set(d, &cur)?;
        }
        Ok(cur)
    }

    fn entry_of_point(&self, d: &OrderedBratteliDiagram, x: &PointPrefix) -> Result<Option<&SpeedupEntry>> {
        for e in &self.entries {
            if d.point_in(x, &ClopenSet::from_atom(e.domain))? {
                return Ok(Some(e));
            }
        }
        Ok(None)
    }

    pub fn point_image(&self, d: &OrderedBratteliDiagram, x: &PointPrefix) -> Result<PointPrefix> {
        if let Some((p, k)) = &self.designated_point {
            if p == x {
                return d.point_power(x, *k as i64);
            }
        }
        let e = self
            .entry_of_point(d, x)?
            .ok_or_else(|| Error::PreconditionFailed("point outside the speedup domain".into()))?;
        d.point_power(x, e.jump as i64)
    }

    /// The unique covered point mapped to `y`.
    pub fn point_preimage(&self, d: &OrderedBratteliDiagram, y: &PointPrefix) -> Result<PointPrefix> {
        for e in &self.entries {
            if d.point_in(y, &e.image)? {
                let x = d.point_power(y, -(e.jump as i64))?;
                if d.point_in(&x, &ClopenSet::from_atom(e.domain))? {
                    return Ok(x);
                }
            }
        }
        Err(Error::PreconditionFailed("point outside the speedup image".into()))
    }

    /// Entries whose jump is realised by first hitting `target` from `domain`.
    pub fn entries_for_hit(d: &OrderedBratteliDiagram, domain: Atom, target: &ClopenSet) -> Result<Vec<SpeedupEntry>> {
        d.first_hit_partition(domain, target, Direction::Forward)?
            .into_iter()
            .map(|(a, k)| SpeedupEntry::first_hit(d, a, target, k))
            .collect()
    }
}

impl fmt::Display for SpeedupMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "entries={}", self.entries.len())?;
        for (i, e) in self.entries.iter().enumerate() {
            let rule = match &e.rule {
                JumpRule::Power(k) => format!("power {k}"),
                JumpRule::FirstHit { target } => format!("first-hit L{} {}", target.level(), fmt_atoms(target)),
            };
            writeln!(f, "entry.{i}.domain={}", e.domain)?;
            writeln!(f, "entry.{i}.rule={rule}")?;
            writeln!(f, "entry.{i}.jump={}", e.jump)?;
            writeln!(f, "entry.{i}.image=L{} {}", e.image.level(), fmt_atoms(&e.image))?;
        }
        if let Some((p, k)) = &self.designated_point {
            writeln!(f, "designated.tail={:?}", p.tail)?;
            writeln!(f, "designated.prefix_len={}", p.path.len())?;
            writeln!(f, "designated.jump={k}")?;
        }
        Ok(())
    }
}

pub(crate) fn fmt_atoms(s: &ClopenSet) -> String {
    let v: Vec<String> = s.iter().map(|a| format!("{}:{}", a.vertex, a.index)).collect();
    v.join(",")
}

/// Union of labelled sets at their deepest common level, with the pairs of
/// labels whose sets overlap.
pub(crate) fn disjoint_union<'s>(
    d: &OrderedBratteliDiagram,
    sets: impl Iterator<Item = (Atom, &'s ClopenSet)>,
) -> Result<(ClopenSet, Vec<(Atom, Atom)>)> {
    let sets: Vec<(Atom, &ClopenSet)> = sets.collect();
    let lvl = sets.iter().map(|(_, s)| s.level()).max().unwrap_or(0);
    let mut owner: HashMap<Atom, Atom> = HashMap::new();
    let mut clashes = Vec::new();
    for (key, s) in &sets {
        for a in d.refine_clopen(s, lvl)?.iter() {
            if let Some(prev) = owner.insert(*a, *key) {
                if prev != *key && clashes.last() != Some(&(prev, *key)) {
                    clashes.push((prev, *key));
                }
            }
        }
    }
    let out = ClopenSet::from_atoms(lvl, owner.into_keys())?;
    Ok((d.canonical(&out), clashes))
}
