//! Clopen partitions with prescribed classes, transferred across an
//! epimorphism, with chosen points forced into chosen pieces.

use super::epimorphism::{class_function, CylinderEpimorphism};
use crate::bv::{ClopenSet, CylinderFunction, OrderedBratteliDiagram, PointPrefix};
use crate::dimension::{class_of, clopen_representative, GroupClass};
use crate::error::{Error, Result};

/// Deepest extra level searched for a swap neighbourhood.
const SWAP_DEPTH: usize = 16;
/// Largest `|k|` tried when looking for a translate landing in the wanted piece.
const SWAP_REACH: i64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorDirection {
    /// From a partition of `Y` to one of `X`, along `φ`.
    YtoX,
    /// From a partition of `X` to one of `Y`, through lifts.
    XtoY,
}

/// Splits `whole` into consecutive pieces with the given classes, the last
/// piece taking whatever remains.
pub fn carve(
    d: &OrderedBratteliDiagram,
    whole: &ClopenSet,
    classes: &[GroupClass],
    mode: crate::dimension::Mode,
) -> Result<Vec<ClopenSet>> {
    let mut rest = d.canonical(whole);
    let mut out = Vec::with_capacity(classes.len());
    for (k, c) in classes.iter().enumerate() {
        if k + 1 == classes.len() {
            out.push(rest.clone());
            break;
        }
        let piece = clopen_representative(d, &class_function(d, c)?, &rest, mode)?;
        rest = d.canonical(&d.difference(&rest, &piece));
        out.push(piece);
    }
    Ok(out)
}

/// Moves `x` into `parts[want]` by exchanging a small neighbourhood `U` of
/// `x` with a translate `T^k U` lying in the wanted piece. Indicator classes
/// of all pieces are unchanged. Points in `keep` stay where they are.
pub fn pin_point(
    d: &OrderedBratteliDiagram,
    parts: &mut [ClopenSet],
    x: &PointPrefix,
    want: usize,
    keep: &[PointPrefix],
) -> Result<()> {
    let find = |parts: &[ClopenSet], p: &PointPrefix| -> Result<Option<usize>> {
        for (i, s) in parts.iter().enumerate() {
            if d.point_in(p, s)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    };
    let Some(have) = find(parts, x)? else {
        return Err(Error::PinningImpossible("point lies outside the partition".into()));
    };
    if have == want {
        return Ok(());
    }
    let base = parts.iter().map(|s| s.level()).max().unwrap_or(0) + 1;
    for step in 1..=SWAP_REACH {
        for k in [step, -step] {
            let y = d.point_power(x, k)?;
            if !d.point_in(&y, &parts[want])? {
                continue;
            }
            for m in base..base + SWAP_DEPTH {
                if d.check_level(m).is_err() {
                    break;
                }
                let u = ClopenSet::from_atom(d.point_atom(x, m)?);
                let v = d.power_image(&u, k)?;
                if !d.is_subset(&u, &parts[have]) || !d.is_subset(&v, &parts[want]) {
                    continue;
                }
                let mut clash = false;
                for p in keep {
                    clash |= d.point_in(p, &u)? || d.point_in(p, &v)?;
                }
                if clash {
                    continue;
                }
                parts[have] = d.canonical(&d.union(&d.difference(&parts[have], &u), &v));
                parts[want] = d.canonical(&d.union(&d.difference(&parts[want], &v), &u));
                return Ok(());
            }
        }
    }
    Err(Error::PinningImpossible(format!("no swap moves the point into piece {want}")))
}

fn indicator_class(d: &OrderedBratteliDiagram, s: &ClopenSet) -> GroupClass {
    class_of(d, &CylinderFunction::indicator(d, s))
}

/// A partition of `within` (in the other system) whose pieces correspond
/// to `parts` under `φ`, with each `(point, piece)` pin honoured.
///
/// `within` must have the class that corresponds to the union of `parts`.
pub fn mirror_partition(
    phi: &CylinderEpimorphism,
    dir: MirrorDirection,
    parts: &[ClopenSet],
    within: &ClopenSet,
    pins: &[(PointPrefix, usize)],
) -> Result<Vec<ClopenSet>> {
    if parts.is_empty() {
        return Err(Error::EmptySet);
    }
    if pins.len() > parts.len() {
        return Err(Error::PinningImpossible("more pins than pieces".into()));
    }
    let (from, to) = match dir {
        MirrorDirection::YtoX => (&phi.source, &phi.target),
        MirrorDirection::XtoY => (&phi.target, &phi.source),
    };
    let union = parts.iter().fold(ClopenSet::empty(0), |acc, s| from.union(&acc, s));
    let mut out = if phi.is_identity() && to.set_eq(&union, within) {
        parts.iter().map(|s| to.canonical(s)).collect()
    } else {
        let classes = match dir {
            MirrorDirection::YtoX => parts.iter().map(|s| phi.map_class(&indicator_class(from, s))).collect(),
            MirrorDirection::XtoY => parts
                .iter()
                .map(|s| phi.positive_lift(&indicator_class(from, s))?.ok_or(Error::ExhaustivenessRequired))
                .collect::<Result<Vec<_>>>()?,
        };
        carve(to, within, &classes, phi.mode)?
    };
    for (k, (p, want)) in pins.iter().enumerate() {
        let keep: Vec<PointPrefix> = pins.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, q)| q.0.clone()).collect();
        pin_point(to, &mut out, p, *want, &keep)?;
    }
    for (k, (p, want)) in pins.iter().enumerate() {
        if !to.point_in(p, &out[*want])? {
            return Err(Error::PinningImpossible(format!("pin {k} was displaced")));
        }
    }
    for (s, t) in parts.iter().zip(&out) {
        let ok = match dir {
            MirrorDirection::YtoX => phi.sets_match(s, t),
            MirrorDirection::XtoY => phi.sets_match(t, s),
        };
        if !ok || t.is_empty() {
            return Err(Error::PreconditionFailed("mirrored piece has the wrong class".into()));
        }
    }
    Ok(out)
}
