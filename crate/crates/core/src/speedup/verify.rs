use std::fmt;

use super::hits::{atom_power, ColumnHits};
use super::map::{disjoint_union, JumpRule, SpeedupMap};
use crate::bv::{Atom, ClopenSet, Direction, OrderedBratteliDiagram};
use crate::dimension::MeasureData;

/// Behaviour of the jump function next to the designated point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignatedReport {
    pub jump: u64,
    /// Deepest level whose atom around the point still meets the covered domain.
    pub neighbour_level: Option<usize>,
    pub neighbour_jumps: Vec<u64>,
    /// Whether the covered atoms nearest the point carry a different jump.
    pub discontinuous: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpeedupReport {
    pub entries: usize,
    /// Entries whose stored image differs from `T^jump(domain)`.
    pub image_mismatches: Vec<Atom>,
    pub overlapping_images: Vec<(Atom, Atom)>,
    /// Whether the images cover exactly the expected set, when one is given.
    pub target_cover: Option<bool>,
    /// Atoms or partition cells `A` with `μ(T'A) ≠ μ(A)` for some ergodic `μ`.
    pub measure_failures: Vec<Atom>,
    pub jump_failures: Vec<Atom>,
    pub max_jump: Option<u64>,
    pub designated: Option<DesignatedReport>,
    pub errors: Vec<String>,
}

impl SpeedupReport {
    /// (a): the induced map is injective and hits the expected set.
    pub fn bijection_ok(&self) -> bool {
        self.image_mismatches.is_empty() && self.overlapping_images.is_empty() && self.target_cover != Some(false)
    }

    /// (b)
    pub fn measure_ok(&self) -> bool {
        self.measure_failures.is_empty()
    }

    /// (c)
    pub fn jumps_ok(&self) -> bool {
        self.jump_failures.is_empty()
    }

    /// (d): finitely many entries always give a bounded jump on the cover.
    pub fn bounded(&self) -> bool {
        self.max_jump.is_some()
    }

    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.bijection_ok() && self.measure_ok() && self.jumps_ok() && self.bounded()
    }
}

impl fmt::Display for SpeedupReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "entries={}", self.entries)?;
        writeln!(f, "bijection={}", self.bijection_ok())?;
        if let Some(c) = self.target_cover {
            writeln!(f, "target_cover={c}")?;
        }
        writeln!(f, "measure_preserved={}", self.measure_ok())?;
        for a in &self.measure_failures {
            writeln!(f, "measure_failure={a}")?;
        }
        writeln!(f, "jump_constant_per_atom={}", self.jumps_ok())?;
        match self.max_jump {
            Some(m) => writeln!(f, "max_jump={m}")?,
            None => writeln!(f, "max_jump=none")?,
        }
        writeln!(f, "bounded={}", self.bounded())?;
        if let Some(dp) = &self.designated {
            writeln!(f, "designated_jump={}", dp.jump)?;
            writeln!(f, "designated_discontinuous={}", dp.discontinuous)?;
        }
        for e in &self.errors {
            writeln!(f, "error={e}")?;
        }
        writeln!(f, "passed={}", self.passed())
    }
}

fn same_measure(measures: &[MeasureData], a: &ClopenSet, b: &ClopenSet) -> bool {
    measures.iter().all(|mu| mu.set_measure(a) == mu.set_measure(b))
}

/// Replays the checks on a speedup map: images and injectivity, exact
/// measure preservation on every entry and on every given cell, constancy
/// of the jump on each domain atom, and boundedness.
pub fn verify_speedup(
    d: &OrderedBratteliDiagram,
    map: &SpeedupMap,
    measures: &[MeasureData],
    expected_image: Option<&ClopenSet>,
    cells: &[ClopenSet],
) -> SpeedupReport {
    let mut r = SpeedupReport { entries: map.len(), max_jump: map.max_jump(), ..Default::default() };
    for e in &map.entries {
        let dom = ClopenSet::from_atom(e.domain);
        match atom_power(d, e.domain, e.jump as i64) {
            Ok(img) if d.set_eq(&img, &e.image) => {}
            Ok(_) => r.image_mismatches.push(e.domain),
            Err(err) => r.errors.push(format!("{}: {err}", e.domain)),
        }
        if !same_measure(measures, &dom, &e.image) {
            r.measure_failures.push(e.domain);
        }
        if let JumpRule::FirstHit { target } = &e.rule {
            let parts = match (target.len(), target.iter().next()) {
                (1, Some(&t)) if t.level <= e.domain.level => ColumnHits::new(d, t.level).partition(e.domain, t, Direction::Forward),
                _ => d.first_hit_partition(e.domain, target, Direction::Forward),
            };
            match parts {
                Ok(parts) if parts == vec![(e.domain, e.jump)] => {}
                Ok(_) => r.jump_failures.push(e.domain),
                Err(err) => r.errors.push(format!("{}: {err}", e.domain)),
            }
        }
    }
    match disjoint_union(d, map.entries.iter().map(|e| (e.domain, &e.image))) {
        Ok((cover, clashes)) => {
            r.overlapping_images = clashes;
            if let Some(t) = expected_image {
                r.target_cover = Some(d.set_eq(&cover, t));
            }
        }
        Err(err) => r.errors.push(err.to_string()),
    }
    for c in cells {
        match map.image_of_set(d, c) {
            Ok(img) => {
                if !same_measure(measures, c, &img) {
                    let rep = d.canonical(c).iter().next().copied();
                    r.measure_failures.extend(rep);
                }
            }
            Err(err) => r.errors.push(err.to_string()),
        }
    }
    if let Some((x0, k)) = &map.designated_point {
        r.designated = Some(designated_report(d, map, x0, *k));
    }
    r
}

fn designated_report(d: &OrderedBratteliDiagram, map: &SpeedupMap, x0: &crate::bv::PointPrefix, k: u64) -> DesignatedReport {
    let depth = map.entries.iter().map(|e| e.domain.level).max().unwrap_or(0);
    let mut best = None;
    for m in 0..=depth {
        let Ok(a) = d.point_atom(x0, m) else { break };
        let near: Vec<u64> = map
            .entries
            .iter()
            .filter(|e| d.atom_in(e.domain, &ClopenSet::from_atom(a)))
            .map(|e| e.jump)
            .collect();
        if near.is_empty() {
            break;
        }
        best = Some((m, near));
    }
    match best {
        Some((m, jumps)) => {
            let discontinuous = jumps.iter().any(|&j| j != k);
            DesignatedReport { jump: k, neighbour_level: Some(m), neighbour_jumps: jumps, discontinuous }
        }
        None => DesignatedReport { jump: k, neighbour_level: None, neighbour_jumps: Vec::new(), discontinuous: false },
    }
}
