//! Invariant measures of stationary primitive diagrams, exact in `Q(λ)`.

use std::sync::Arc;

use crate::arith::{char_poly, FieldElem, NumberField, Q};
use crate::bv::{Atom, ClopenSet, CylinderFunction, OrderedBratteliDiagram};
use crate::error::{Error, Result};

use super::class::{class_of, is_coboundary, CoboundaryVerdict};

/// Exact scalars: elements of `Q` or of a real number field `Q(λ)`.
pub type Scalar = FieldElem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    ExactRational,
    NumberField,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Source {
    /// `μ(atom at level n, vertex v) = level1[v] · λ^{-(n-1)}`.
    Stationary { lambda: FieldElem, lambda_inv: FieldElem, level1: Vec<FieldElem> },
    /// Explicit per-level vertex weights.
    Table(Vec<Vec<FieldElem>>),
}

/// A `T`-invariant probability measure; atom weights depend only on the end vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureData {
    pub kind: MeasureKind,
    field: Arc<NumberField>,
    source: Source,
}

impl MeasureData {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// The Perron eigenvalue, for stationary measures.
    pub fn lambda(&self) -> Option<&FieldElem> {
        match &self.source {
            Source::Stationary { lambda, .. } => Some(lambda),
            Source::Table(_) => None,
        }
    }

    pub fn vertex_measure(&self, n: usize, v: usize) -> Scalar {
        if n == 0 {
            return FieldElem::one(&self.field);
        }
        match &self.source {
            Source::Stationary { lambda_inv, level1, .. } => &level1[v] * &lambda_inv.pow((n - 1) as u32),
            Source::Table(t) => t[n][v].clone(),
        }
    }

    pub fn atom_measure(&self, a: Atom) -> Scalar {
        self.vertex_measure(a.level, a.vertex)
    }

    pub fn set_measure(&self, s: &ClopenSet) -> Scalar {
        s.iter().fold(FieldElem::zero(&self.field), |acc, &a| &acc + &self.atom_measure(a))
    }

    /// Builds a measure from rational vertex weights for levels `0..table.len()`,
    /// checking normalization and consistency between consecutive levels.
    pub fn from_table(d: &OrderedBratteliDiagram, table: Vec<Vec<Q>>) -> Result<Self> {
        let field = NumberField::rational(Q::from_integer(1.into()));
        let t: Vec<Vec<FieldElem>> =
            table.into_iter().map(|row| row.into_iter().map(|x| FieldElem::from_rational(&field, x)).collect()).collect();
        let bad = |m: String| Err(Error::PreconditionFailed(m));
        if t.is_empty() || t[0].len() != 1 || !t[0][0].is_one_value() {
            return bad("level 0 must carry total mass 1".into());
        }
        for (n, row) in t.iter().enumerate() {
            if n > d.max_level() || row.len() != d.vertex_count(n) {
                return bad(format!("level {n} has the wrong number of weights"));
            }
            if row.iter().any(|x| x.signum() < 0) {
                return bad(format!("negative weight at level {n}"));
            }
            let total = row
                .iter()
                .enumerate()
                .fold(FieldElem::zero(&field), |acc, (v, x)| &acc + &(x * &FieldElem::from_int(&field, d.height(n, v) as i64)));
            if !total.is_one_value() {
                return bad(format!("level {n} weights do not sum to 1"));
            }
            if n + 1 < t.len() {
                let m = d.matrix(n);
                for (v, x) in row.iter().enumerate() {
                    let children = m.iter().enumerate().fold(FieldElem::zero(&field), |acc, (w, r)| {
                        &acc + &(&t[n + 1][w] * &FieldElem::from_int(&field, r[v] as i64))
                    });
                    if &children != x {
                        return bad(format!("weight of level-{n} vertex {v} differs from its children"));
                    }
                }
            }
        }
        Ok(MeasureData { kind: MeasureKind::ExactRational, field, source: Source::Table(t) })
    }

    pub fn depth(&self) -> Option<usize> {
        match &self.source {
            Source::Stationary { .. } => None,
            Source::Table(t) => Some(t.len() - 1),
        }
    }
}

trait IsOne {
    fn is_one_value(&self) -> bool;
}

impl IsOne for FieldElem {
    fn is_one_value(&self) -> bool {
        (self - &FieldElem::one(self.ctx())).is_zero()
    }
}

/// A nonzero vector in the kernel of a square matrix over a number field.
fn kernel_vector(mut m: Vec<Vec<FieldElem>>) -> Option<Vec<FieldElem>> {
    let n = m.len();
    let ctx = m[0][0].ctx().clone();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].inv()?;
        for c in 0..n {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..n {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..n {
                    let t = &m[row][c] * &f;
                    m[r][c] = &m[r][c] - &t;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free = (0..n).find(|c| !pivot_cols.contains(c))?;
    let mut x = vec![FieldElem::zero(&ctx); n];
    x[free] = FieldElem::one(&ctx);
    for (r, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = -&m[r][free];
    }
    Some(x)
}

/// The ergodic measures of a stationary primitive diagram: exactly one,
/// given by the Perron data of the repeating matrix.
pub fn ergodic_measures(d: &OrderedBratteliDiagram) -> Result<Vec<MeasureData>> {
    if !d.is_stationary() {
        return Err(Error::UnsupportedDiagram("measures of finite diagrams need certificates".into()));
    }
    let m = d.matrix(1);
    let k = m.len();
    let ints: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    let field = NumberField::largest_real_root(&char_poly(&ints))
        .ok_or_else(|| Error::UnsupportedDiagram("no real Perron root".into()))?;
    let lambda = field.generator();
    let mt: Vec<Vec<FieldElem>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let e = FieldElem::from_int(&field, ints[j][i]);
                    if i == j {
                        &e - &lambda
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let mut ell = kernel_vector(mt).ok_or_else(|| Error::UnsupportedDiagram("Perron eigenvector not found".into()))?;
    if ell.iter().any(|x| x.signum() < 0) {
        ell = ell.iter().map(|x| -x).collect();
    }
    if ell.iter().any(|x| !x.is_positive()) {
        return Err(Error::UnsupportedDiagram("Perron eigenvector is not strictly positive".into()));
    }
    let root = d.matrix(0);
    let z = root
        .iter()
        .zip(&ell)
        .fold(FieldElem::zero(&field), |acc, (r, x)| &acc + &(&FieldElem::from_int(&field, r[0] as i64) * x));
    let zinv = z.inv().expect("positive normalizer");
    let level1 = ell.iter().map(|x| x * &zinv).collect();
    let kind = if field.is_rational() { MeasureKind::ExactRational } else { MeasureKind::NumberField };
    let lambda_inv = lambda.inv().expect("Perron root is nonzero");
    Ok(vec![MeasureData { kind, field: field.clone(), source: Source::Stationary { lambda, lambda_inv, level1 } }])
}

/// `∫ f dμ`, exact.
pub fn integral(d: &OrderedBratteliDiagram, f: &CylinderFunction, mu: &MeasureData) -> Scalar {
    let c = class_of(d, f);
    let field = mu.field();
    c.sums.iter().enumerate().fold(FieldElem::zero(field), |acc, (v, s)| {
        let s = FieldElem::from_rational(field, Q::from_integer(s.clone()));
        &acc + &(&s * &mu.vertex_measure(c.level, v))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModInfSign {
    /// All ergodic integrals are at least `c > 0`.
    Positive { c: Scalar },
    Infinitesimal,
    Negative,
    Mixed,
    Zero,
}

pub fn sign_mod_inf(d: &OrderedBratteliDiagram, f: &CylinderFunction) -> Result<ModInfSign> {
    sign_with(d, f, &ergodic_measures(d)?)
}

/// Classification against an explicit list of ergodic measures.
pub fn sign_with(d: &OrderedBratteliDiagram, f: &CylinderFunction, measures: &[MeasureData]) -> Result<ModInfSign> {
    let ints: Vec<Scalar> = measures.iter().map(|mu| integral(d, f, mu)).collect();
    if ints.is_empty() {
        return Err(Error::UnsupportedDiagram("no ergodic measures".into()));
    }
    if ints.iter().all(|x| x.is_positive()) {
        let c = ints.iter().min_by(|a, b| a.cmp(b)).unwrap().clone();
        return Ok(ModInfSign::Positive { c });
    }
    if ints.iter().all(|x| x.signum() < 0) {
        return Ok(ModInfSign::Negative);
    }
    if ints.iter().all(|x| x.is_zero()) {
        return Ok(match is_coboundary(d, f)? {
            CoboundaryVerdict::Yes { .. } => ModInfSign::Zero,
            _ => ModInfSign::Infinitesimal,
        });
    }
    Ok(ModInfSign::Mixed)
}
