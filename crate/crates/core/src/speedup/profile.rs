use std::fmt;
use std::sync::Arc;

use super::build::ConjugacyCell;
use crate::arith::{FieldElem, NumberField};
use crate::bv::OrderedBratteliDiagram;
use crate::dimension::{ergodic_measures, Scalar};
use crate::error::{Error, Result};

/// Where the pushforwards of the source's ergodic measures land among the
/// target's ergodic measures.
#[derive(Debug, Clone)]
pub struct ProfileReport {
    pub source_measures: usize,
    pub target_measures: usize,
    /// `columns[s]`: coordinates of the pushforward of source measure `s`
    /// in the target basis, when it lies in the span.
    pub columns: Vec<Option<Vec<Scalar>>>,
    /// Source measures whose pushforward is not a probability combination
    /// of target measures.
    pub unmatched: Vec<usize>,
    /// Source measures sent into the interior of the simplex.
    pub interior: Vec<usize>,
    pub injective: bool,
    /// Decided when both systems have the same number of ergodic measures.
    pub bijection: Option<bool>,
}

impl ProfileReport {
    pub fn passed(&self) -> bool {
        self.unmatched.is_empty() && self.injective && self.bijection != Some(false)
    }
}

impl fmt::Display for ProfileReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "source_measures={}", self.source_measures)?;
        writeln!(f, "target_measures={}", self.target_measures)?;
        for (s, c) in self.columns.iter().enumerate() {
            match c {
                Some(v) => {
                    let v: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    writeln!(f, "pushforward={s}:{}", v.join(","))?
                }
                None => writeln!(f, "pushforward={s}:none")?,
            }
        }
        writeln!(f, "injective={}", self.injective)?;
        if let Some(b) = self.bijection {
            writeln!(f, "bijection={b}")?;
        }
        writeln!(f, "passed={}", self.passed())
    }
}

fn transfer(x: &FieldElem, ctx: &Arc<NumberField>) -> Option<FieldElem> {
    if x.ctx().same_generator(ctx) {
        return Some(FieldElem::from_poly(ctx, x.poly().clone()));
    }
    x.to_rational().map(|r| FieldElem::from_rational(ctx, r))
}

/// Solves `a c = b` exactly; `None` when inconsistent.
fn solve(mut a: Vec<Vec<Scalar>>, mut b: Vec<Scalar>, ctx: &Arc<NumberField>) -> Option<Vec<Scalar>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        b.swap(row, p);
        let inv = a[row][col].inv()?;
        for r in 0..a.len() {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..cols {
                let t = &f * &a[row][c];
                a[r][c] = &a[r][c] - &t;
            }
            let t = &f * &b[row];
            b[r] = &b[r] - &t;
        }
        pivots.push((row, col));
        row += 1;
    }
    if b[row..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut out = vec![FieldElem::zero(ctx); cols];
    for (r, c) in pivots {
        out[c] = b[r].div(&a[r][c])?;
    }
    Some(out)
}

/// Pushes every ergodic measure of `a` through the cell pairing `f` and
/// expresses the result in the ergodic basis of `b`.
pub fn ergodic_profile_compare(
    a: &OrderedBratteliDiagram,
    b: &OrderedBratteliDiagram,
    f: &[ConjugacyCell],
) -> Result<ProfileReport> {
    let ma = ergodic_measures(a)?;
    let mb = ergodic_measures(b)?;
    let ctx = mb.first().ok_or_else(|| Error::UnsupportedDiagram("no ergodic measure".into()))?.field().clone();
    let unsupported = || Error::UnsupportedDiagram("measures live in unrelated number fields".into());
    let basis: Vec<Vec<Scalar>> = f
        .iter()
        .map(|c| mb.iter().map(|nu| transfer(&nu.set_measure(&c.y), &ctx).ok_or_else(unsupported)).collect())
        .collect::<Result<_>>()?;
    let mut columns = Vec::with_capacity(ma.len());
    for mu in &ma {
        let rhs: Vec<Scalar> =
            f.iter().map(|c| transfer(&mu.set_measure(&c.x), &ctx).ok_or_else(unsupported)).collect::<Result<_>>()?;
        columns.push(solve(basis.clone(), rhs, &ctx));
    }
    let one = FieldElem::one(&ctx);
    let zero = FieldElem::zero(&ctx);
    let mut unmatched = Vec::new();
    let mut interior = Vec::new();
    for (s, c) in columns.iter().enumerate() {
        let Some(c) = c else {
            unmatched.push(s);
            continue;
        };
        let total = c.iter().fold(zero.clone(), |acc, x| &acc + x);
        if total != one || c.iter().any(|x| x.signum() < 0) {
            unmatched.push(s);
        } else if c.iter().filter(|x| !x.is_zero()).count() > 1 {
            interior.push(s);
        }
    }
    let rank = solve_rank(columns.iter().flatten().cloned().collect());
    let injective = unmatched.is_empty() && rank == ma.len();
    let bijection = (ma.len() == mb.len()).then(|| injective && interior.is_empty());
    Ok(ProfileReport {
        source_measures: ma.len(),
        target_measures: mb.len(),
        columns,
        unmatched,
        interior,
        injective,
        bijection,
    })
}

fn solve_rank(mut rows: Vec<Vec<Scalar>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let Some(inv) = rows[rank][col].inv() else { continue };
        for r in rank + 1..rows.len() {
            let f = &rows[r][col] * &inv;
            for c in col..cols {
                let t = &f * &rows[rank][c];
                rows[r][c] = &rows[r][c] - &t;
            }
        }
        rank += 1;
    }
    rank
}
