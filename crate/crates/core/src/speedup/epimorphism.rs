use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::intmat::{mat_vec, solve_integer};
use crate::bv::{ClopenSet, CylinderFunction, OrderedBratteliDiagram};
use crate::dimension::{class_of, classes_equal, ergodic_measures, integral, is_positive, order_unit, GroupClass, Mode, PositivityVerdict};
use crate::error::{Error, Result};

/// Levels checked when validating the intertwining relation and surjectivity.
const CHECK_LEVELS: usize = 4;

/// A unital group map `G(Y,S) → G(X,T)` given by one integer matrix between
/// stationary level truncations: the class with sums `v` at level `k` of `Y`
/// goes to the class with sums `phi·v` at level `k + offset` of `X`.
#[derive(Debug, Clone)]
pub struct CylinderEpimorphism {
    pub source: OrderedBratteliDiagram,
    pub target: OrderedBratteliDiagram,
    /// `|V_X| × |V_Y|`, nonnegative.
    pub phi: Vec<Vec<i64>>,
    pub offset: usize,
    pub mode: Mode,
}

impl CylinderEpimorphism {
    pub fn new(
        source: OrderedBratteliDiagram,
        target: OrderedBratteliDiagram,
        phi: Vec<Vec<i64>>,
        offset: usize,
        mode: Mode,
    ) -> Result<Self> {
        let e = CylinderEpimorphism { source, target, phi, offset, mode };
        e.validate()?;
        Ok(e)
    }

    pub fn identity(d: &OrderedBratteliDiagram) -> Result<Self> {
        let n = d.vertex_count(1);
        let phi = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        CylinderEpimorphism::new(d.clone(), d.clone(), phi, 0, Mode::Exact)
    }

    /// Whether this is the identity of one diagram.
    pub fn is_identity(&self) -> bool {
        self.offset == 0
            && self.source == self.target
            && self.phi.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)))
    }

    fn phi_big(&self) -> Vec<Vec<BigInt>> {
        self.phi.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidEpimorphism(m));
        if !self.source.is_stationary() || !self.target.is_stationary() {
            return Err(Error::UnsupportedDiagram("epimorphisms are supported between stationary diagrams".into()));
        }
        let (nx, ny) = (self.target.vertex_count(1), self.source.vertex_count(1));
        if self.phi.len() != nx || self.phi.iter().any(|r| r.len() != ny) {
            return bad(format!("matrix must be {nx}x{ny}"));
        }
        if self.phi.iter().flatten().any(|&x| x < 0) {
            return bad("matrix has negative entries".into());
        }
        for k in 1..=CHECK_LEVELS {
            let my = &self.source.matrix(k);
            let mx = &self.target.matrix(k + self.offset);
            for r in 0..nx {
                for c in 0..ny {
                    let lhs: i64 = (0..ny).map(|t| self.phi[r][t] * my[t][c] as i64).sum();
                    let rhs: i64 = (0..nx).map(|t| mx[r][t] as i64 * self.phi[t][c]).sum();
                    if lhs != rhs {
                        return bad(format!("matrix does not intertwine the level-{k} incidence"));
                    }
                }
            }
        }
        let u = self.map_class(&order_unit(&self.source, 1));
        if !self.target_classes_equal(&u, &order_unit(&self.target, 1 + self.offset)) {
            return bad("order unit is not preserved".into());
        }
        for v in 0..nx {
            let mut e = GroupClass { level: 1 + self.offset, sums: vec![BigInt::zero(); nx] };
            e.sums[v] = BigInt::one();
            if self.lift_class(&e).is_none() {
                return bad(format!("basis class of vertex {v} has no preimage"));
            }
        }
        Ok(())
    }

    /// `φ` on a class of `Y`.
    pub fn map_class(&self, c: &GroupClass) -> GroupClass {
        let c = c.push_to(&self.source, c.level.max(1));
        GroupClass { level: c.level + self.offset, sums: mat_vec(&self.phi_big(), &c.sums) }
    }

    /// Some class of `Y` mapped onto `c`, found by pushing `c` deeper.
    pub fn lift_class(&self, c: &GroupClass) -> Option<GroupClass> {
        let phi = self.phi_big();
        let ny = self.source.vertex_count(1);
        let mut cur = c.push_to(&self.target, c.level.max(1 + self.offset));
        for _ in 0..=CHECK_LEVELS + self.target.vertex_count(1) {
            if let Some(y) = solve_integer(&phi, ny, &cur.sums) {
                return Some(GroupClass { level: cur.level - self.offset, sums: y });
            }
            cur = cur.push(&self.target);
        }
        None
    }

    /// A positive lift of `c`, for the exhaustiveness witness.
    pub fn positive_lift(&self, c: &GroupClass) -> Result<Option<GroupClass>> {
        let Some(y) = self.lift_class(c) else { return Ok(None) };
        let f = class_function(&self.source, &y)?;
        Ok(matches!(is_positive(&self.source, &f)?, PositivityVerdict::Positive { .. }).then_some(y))
    }

    /// Equality in `G(X,T)`, or of all integrals in mod-inf mode.
    pub fn target_classes_equal(&self, a: &GroupClass, b: &GroupClass) -> bool {
        match self.mode {
            Mode::Exact => classes_equal(&self.target, a, b) == Some(true),
            Mode::ModInf => {
                let d = &self.target;
                let (Ok(fa), Ok(fb)) = (class_function(d, a), class_function(d, b)) else { return false };
                ergodic_measures(d)
                    .map(|ms| ms.iter().all(|mu| integral(d, &fa, mu) == integral(d, &fb, mu)))
                    .unwrap_or(false)
            }
        }
    }

    /// Whether `φ[1_b] = [1_a]` for `b ⊆ Y`, `a ⊆ X`.
    pub fn sets_match(&self, b: &ClopenSet, a: &ClopenSet) -> bool {
        let cb = class_of(&self.source, &CylinderFunction::indicator(&self.source, b));
        let ca = class_of(&self.target, &CylinderFunction::indicator(&self.target, a));
        self.target_classes_equal(&self.map_class(&cb), &ca)
    }
}

/// A function with the given column sums, placed on the base atoms.
pub fn class_function(d: &OrderedBratteliDiagram, c: &GroupClass) -> Result<CylinderFunction> {
    let values = (0..d.vertex_count(c.level))
        .map(|v| {
            let mut col = vec![0i64; d.height(c.level, v) as usize];
            col[0] = i64::try_from(&c.sums[v]).map_err(|_| Error::PreconditionFailed("class too large".into()))?;
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    CylinderFunction::new(d, c.level, values)
}
