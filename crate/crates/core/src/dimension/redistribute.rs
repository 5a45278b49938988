use crate::bv::{ClopenSet, CylinderFunction, OrderedBratteliDiagram};
use crate::error::{Error, Result};

use super::class::{class_of, GroupClass};
use super::measure::{sign_mod_inf, ModInfSign};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    ModInf,
}

/// First level (up to the deepest available) at which both classes have
/// componentwise nonnegative sums.
fn nonnegative_level(d: &OrderedBratteliDiagram, a: &GroupClass, b: &GroupClass) -> Option<usize> {
    let l = a.level.max(b.level);
    let (mut x, mut y) = (a.push_to(d, l), b.push_to(d, l));
    let limit = (l + 24).min(d.max_level());
    loop {
        if x.is_nonnegative() && y.is_nonnegative() {
            return Some(x.level);
        }
        if x.level >= limit {
            return None;
        }
        x = x.push(d);
        y = y.push(d);
    }
}

/// Fills each canonical column from level 0 upward, capped by `g`, until
/// the column sum of `f` is reached.
fn greedy_fill(d: &OrderedBratteliDiagram, f: &CylinderFunction, g: &CylinderFunction, n: usize) -> Result<CylinderFunction> {
    let target = class_of(d, &f.refine(d, n)?);
    let g = g.refine(d, n)?;
    let mut values = Vec::with_capacity(target.sums.len());
    for (v, s) in target.sums.iter().enumerate() {
        let mut remaining: i64 = s.try_into().map_err(|_| Error::PreconditionFailed("column sum overflow".into()))?;
        let col: Vec<i64> = g.values()[v]
            .iter()
            .map(|&cap| {
                let put = remaining.min(cap.max(0));
                remaining -= put;
                put
            })
            .collect();
        if remaining != 0 {
            return Err(Error::PreconditionFailed(format!("column {v} cannot hold the required sum")));
        }
        values.push(col);
    }
    CylinderFunction::new(d, n, values)
}

/// A function `f'` with `0 <= f' <= g` pointwise and the class of `f`.
///
/// Exact mode needs `0 <= [f] <= [g]` in the dimension group; mod-inf mode
/// needs `[f]` and `[g - f]` strictly positive modulo infinitesimals.
pub fn redistribute(
    d: &OrderedBratteliDiagram,
    f: &CylinderFunction,
    g: &CylinderFunction,
    mode: Mode,
) -> Result<CylinderFunction> {
    if g.min_value() < 0 {
        return Err(Error::PreconditionFailed("cap function takes negative values".into()));
    }
    if mode == Mode::ModInf {
        for h in [f.clone(), g.sub(d, f)] {
            if !matches!(sign_mod_inf(d, &h)?, ModInfSign::Positive { .. }) {
                return Err(Error::PreconditionFailed("classes are not strictly ordered modulo infinitesimals".into()));
            }
        }
    }
    let cf = class_of(d, f);
    let cgf = class_of(d, &g.sub(d, f));
    let n = nonnegative_level(d, &cf, &cgf)
        .ok_or_else(|| Error::PreconditionFailed("0 <= [f] <= [g] fails at every available level".into()))?;
    greedy_fill(d, f, g, n)
}

/// A clopen `C ⊆ A` whose indicator has the class of `f` (or the same
/// integrals, in mod-inf mode). Requires `0 < [f] < [1_A]` strictly.
pub fn clopen_representative(
    d: &OrderedBratteliDiagram,
    f: &CylinderFunction,
    a: &ClopenSet,
    mode: Mode,
) -> Result<ClopenSet> {
    let ind = CylinderFunction::indicator(d, a);
    match mode {
        Mode::Exact => {
            use super::class::{is_positive, PositivityVerdict};
            for h in [f.clone(), ind.sub(d, f)] {
                if !matches!(is_positive(d, &h)?, PositivityVerdict::Positive { .. }) {
                    return Err(Error::PreconditionFailed("0 < [f] < [1_A] does not hold".into()));
                }
            }
        }
        Mode::ModInf => {}
    }
    let fp = redistribute(d, f, &ind, mode)?;
    let members = d.atoms(fp.level()).filter(|&x| fp.value(d, x) == 1);
    Ok(d.canonical(&ClopenSet::from_atoms(fp.level(), members)?))
}
