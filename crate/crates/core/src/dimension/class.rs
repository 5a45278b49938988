//! Classes in the dimension group, represented by column sums over the
//! canonical towers of one level.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::measure::{ergodic_measures, integral, Scalar};
use crate::bv::{CylinderFunction, OrderedBratteliDiagram};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupClass {
    pub level: usize,
    pub sums: Vec<BigInt>,
}

impl GroupClass {
    pub fn is_zero(&self) -> bool {
        self.sums.iter().all(Zero::is_zero)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.sums.iter().all(Signed::is_positive)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.sums.iter().all(|x| !x.is_negative())
    }

    /// The class represented one level deeper.
    pub fn push(&self, d: &OrderedBratteliDiagram) -> GroupClass {
        let m = d.matrix(self.level);
        let sums = m
            .iter()
            .map(|row| row.iter().zip(&self.sums).fold(BigInt::zero(), |s, (a, b)| s + BigInt::from(*a) * b))
            .collect();
        GroupClass { level: self.level + 1, sums }
    }

    pub fn push_to(&self, d: &OrderedBratteliDiagram, level: usize) -> GroupClass {
        let mut c = self.clone();
        while c.level < level {
            c = c.push(d);
        }
        c
    }

    pub fn sub(&self, d: &OrderedBratteliDiagram, o: &GroupClass) -> GroupClass {
        let l = self.level.max(o.level);
        let (a, b) = (self.push_to(d, l), o.push_to(d, l));
        GroupClass { level: l, sums: a.sums.iter().zip(&b.sums).map(|(x, y)| x - y).collect() }
    }
}

impl fmt::Display for GroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.sums.iter().map(|x| x.to_string()).collect();
        write!(f, "L{} ({})", self.level, s.join(","))
    }
}

/// Column sums of `f` over the canonical towers of its own level.
pub fn class_of(d: &OrderedBratteliDiagram, f: &CylinderFunction) -> GroupClass {
    debug_assert_eq!(f.values().len(), d.vertex_count(f.level()));
    let sums = f.values().iter().map(|col| col.iter().map(|&x| BigInt::from(x)).sum()).collect();
    GroupClass { level: f.level(), sums }
}

/// The order unit at level `k`: the vector of column heights.
pub fn order_unit(d: &OrderedBratteliDiagram, k: usize) -> GroupClass {
    GroupClass { level: k, sums: d.heights(k).iter().map(|&h| BigInt::from(h)).collect() }
}

/// Level past which the class of `f` is zero if it ever is, or `None` for a
/// finite diagram whose depth ends first.
fn decisive_level(d: &OrderedBratteliDiagram, k: usize) -> Option<usize> {
    if d.is_stationary() {
        Some(k.max(1) + d.vertex_count(1))
    } else {
        None
    }
}

/// Whether two classes coincide, if decidable at the available depth.
pub fn classes_equal(d: &OrderedBratteliDiagram, a: &GroupClass, b: &GroupClass) -> Option<bool> {
    let diff = a.sub(d, b);
    match decisive_level(d, diff.level) {
        Some(l) => Some(diff.push_to(d, l).is_zero()),
        None => {
            let z = diff.push_to(d, d.max_level()).is_zero();
            z.then_some(true)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoCertificate {
    /// Some ergodic measure gives `f` a nonzero integral.
    NonzeroIntegral(Scalar),
    /// Some ergodic measure gives `f` an integral that is not strictly positive.
    NonpositiveIntegral(Scalar),
    /// The column sums stay nonzero past the point where kernels stabilize.
    KernelRefutation(GroupClass),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoboundaryVerdict {
    /// `f = g∘T − g` with `g` given at `level`.
    Yes { witness: CylinderFunction, level: usize },
    No(NoCertificate),
    Unknown { depth: usize },
}

/// Cumulative sums of `f` up each canonical column of level `n`.
pub fn cumulative_witness(d: &OrderedBratteliDiagram, f: &CylinderFunction, n: usize) -> Result<CylinderFunction> {
    let f = f.refine(d, n)?;
    let values = f
        .values()
        .iter()
        .map(|col| {
            let mut acc = 0;
            col.iter()
                .map(|&x| {
                    let g = acc;
                    acc += x;
                    g
                })
                .collect()
        })
        .collect();
    CylinderFunction::new(d, n, values)
}

/// Checks `f = g∘T − g` on every atom of level `level`.
pub fn verify_coboundary_witness(
    d: &OrderedBratteliDiagram,
    f: &CylinderFunction,
    g: &CylinderFunction,
    level: usize,
) -> Result<bool> {
    for a in d.atoms(level) {
        let img = d.atom_step(a, crate::bv::Direction::Forward)?;
        let mut vals = img.iter().map(|&b| g.value(d, b));
        let gt = vals.next().expect("images are nonempty");
        if vals.any(|v| v != gt) {
            return Ok(false);
        }
        if gt - g.value(d, a) != f.value(d, a) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_coboundary(d: &OrderedBratteliDiagram, f: &CylinderFunction) -> Result<CoboundaryVerdict> {
    let c = class_of(d, f);
    let last = decisive_level(d, c.level).unwrap_or(d.max_level());
    let mut cur = c.clone();
    loop {
        if cur.is_zero() {
            let witness = cumulative_witness(d, f, cur.level)?;
            return Ok(CoboundaryVerdict::Yes { witness, level: cur.level });
        }
        if cur.level >= last {
            break;
        }
        cur = cur.push(d);
    }
    if !d.is_stationary() {
        return Ok(CoboundaryVerdict::Unknown { depth: d.max_level() });
    }
    for mu in ergodic_measures(d)? {
        let v = integral(d, f, &mu);
        if !v.is_zero() {
            return Ok(CoboundaryVerdict::No(NoCertificate::NonzeroIntegral(v)));
        }
    }
    Ok(CoboundaryVerdict::No(NoCertificate::KernelRefutation(cur)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PositivityVerdict {
    Positive { level: usize },
    Zero,
    NotPositive(NoCertificate),
    Unknown { depth: usize },
}

/// First level at or above the class's own where its sums are strictly
/// positive, searching no deeper than `limit`.
pub fn positive_level(d: &OrderedBratteliDiagram, c: &GroupClass, limit: usize) -> Option<usize> {
    let mut cur = c.clone();
    loop {
        if cur.is_strictly_positive() {
            return Some(cur.level);
        }
        if cur.level >= limit {
            return None;
        }
        cur = cur.push(d);
    }
}

pub fn is_positive(d: &OrderedBratteliDiagram, f: &CylinderFunction) -> Result<PositivityVerdict> {
    let c = class_of(d, f);
    if let Some(l) = positive_level(d, &c, c.level) {
        return Ok(PositivityVerdict::Positive { level: l });
    }
    match is_coboundary(d, f)? {
        CoboundaryVerdict::Yes { .. } => return Ok(PositivityVerdict::Zero),
        CoboundaryVerdict::Unknown { depth } => {
            return Ok(match positive_level(d, &c, d.max_level()) {
                Some(l) => PositivityVerdict::Positive { level: l },
                None => PositivityVerdict::Unknown { depth },
            })
        }
        CoboundaryVerdict::No(_) => {}
    }
    let measures = ergodic_measures(d)?;
    let integrals: Vec<Scalar> = measures.iter().map(|mu| integral(d, f, mu)).collect();
    if let Some(bad) = integrals.iter().find(|v| !v.is_positive()) {
        return Ok(PositivityVerdict::NotPositive(NoCertificate::NonpositiveIntegral(bad.clone())));
    }
    // strictly positive integrals force eventual strict positivity under a primitive matrix
    let mut cur = c;
    loop {
        if cur.is_strictly_positive() {
            return Ok(PositivityVerdict::Positive { level: cur.level });
        }
        if cur.level >= d.max_level() {
            return Ok(PositivityVerdict::Unknown { depth: cur.level });
        }
        cur = cur.push(d);
    }
}
