//! Exact arithmetic in `Q(λ)` for a real algebraic number λ.
//!
//! λ is pinned by a squarefree defining polynomial together with a rational
//! isolating interval. The defining polynomial need not be irreducible: zero
//! tests go through `gcd(a, m)` and a sign-change check on the interval, and
//! inverses split the modulus when needed, so no factorisation over Q is
//! ever required.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::poly::{count_roots, q, Poly, Q};

#[derive(Debug, PartialEq, Eq)]
pub struct NumberField {
    modulus: Poly,
    lo: Q,
    hi: Q,
}

impl NumberField {
    /// The trivial extension `Q`, presented as `Q(r)` with modulus `x - r`.
    pub fn rational(r: Q) -> Arc<Self> {
        Arc::new(NumberField {
            modulus: Poly::new(vec![-r.clone(), Q::one()]),
            lo: r.clone(),
            hi: r,
        })
    }

    /// Field generated by the largest real root of `p`. Returns `None` when
    /// `p` has no real root.
    pub fn largest_real_root(p: &Poly) -> Option<Arc<Self>> {
        let sq = p.squarefree();
        sq.degree().filter(|&d| d >= 1)?;
        let sturm = sq.sturm();
        let b = sq.root_bound();
        let mut lo = -b.clone();
        let mut hi = b;
        if count_roots(&sturm, &lo, &hi) == 0 {
            return None;
        }
        // Keep exactly the largest root inside (lo, hi].
        while count_roots(&sturm, &lo, &hi) > 1 {
            let mid = (&lo + &hi) / q(2);
            if count_roots(&sturm, &mid, &hi) >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        loop {
            if sq.eval(&hi).is_zero() {
                return Some(NumberField::rational(hi));
            }
            if !sq.eval(&lo).is_zero() {
                break;
            }
            let mid = (&lo + &hi) / q(2);
            if sq.eval(&mid).is_zero() && count_roots(&sturm, &lo, &mid) == 1 {
                return Some(NumberField::rational(mid));
            }
            if count_roots(&sturm, &mid, &hi) == 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Integer roots are common (odometers, constant row sums); detect them
        // so that the field collapses to Q.
        let mut int_lo = lo.floor();
        while int_lo <= hi {
            if int_lo > lo && sq.eval(&int_lo).is_zero() {
                return Some(NumberField::rational(int_lo));
            }
            int_lo += Q::one();
        }
        Some(Arc::new(NumberField { modulus: sq, lo, hi }))
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap_or(0)
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn interval(&self) -> (&Q, &Q) {
        (&self.lo, &self.hi)
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    /// The generator λ as a field element.
    pub fn generator(self: &Arc<Self>) -> FieldElem {
        FieldElem::from_poly(self, Poly::x())
    }

    /// True when both contexts denote the same real number λ.
    pub fn same_generator(&self, other: &NumberField) -> bool {
        if self.is_rational() && other.is_rational() {
            return self.lo == other.lo;
        }
        if self.modulus != other.modulus {
            return false;
        }
        // Same squarefree polynomial; isolating intervals must overlap.
        !(self.hi < other.lo || other.hi < self.lo)
    }

    fn contains_root_of(&self, g: &Poly) -> bool {
        match g.degree() {
            None => true,
            Some(0) => false,
            Some(_) if self.is_rational() => g.eval(&self.lo).is_zero(),
            Some(_) => g.sign_at(&self.lo) * g.sign_at(&self.hi) < 0,
        }
    }

    /// Sign of `a(λ)`.
    fn sign_of(&self, a: &Poly) -> i32 {
        if self.is_rational() {
            return super::poly::sign(&a.eval(&self.lo));
        }
        let g = a.gcd(&self.modulus);
        if self.contains_root_of(&g) {
            return 0;
        }
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        let s_lo = self.modulus.sign_at(&lo);
        loop {
            let (mn, mx) = a.eval_interval(&lo, &hi);
            if mn.is_positive() {
                return 1;
            }
            if mx.is_negative() {
                return -1;
            }
            let mid = (&lo + &hi) / q(2);
            // λ is irrational here, so the modulus never vanishes at `mid`.
            if self.modulus.sign_at(&mid) == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    /// Rational lower and upper bounds on λ of width at most `width`.
    pub fn approximate(&self, width: &Q) -> (Q, Q) {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        if self.is_rational() {
            return (lo, hi);
        }
        let s_lo = self.modulus.sign_at(&lo);
        while &(&hi - &lo) > width {
            let mid = (&lo + &hi) / q(2);
            if self.modulus.sign_at(&mid) == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }
}

/// An element `a(λ)` of a number field, stored as a reduced polynomial.
#[derive(Clone)]
pub struct FieldElem {
    ctx: Arc<NumberField>,
    poly: Poly,
}

impl FieldElem {
    pub fn from_poly(ctx: &Arc<NumberField>, p: Poly) -> Self {
        let poly = p.rem(&ctx.modulus);
        FieldElem { ctx: Arc::clone(ctx), poly }
    }

    pub fn from_rational(ctx: &Arc<NumberField>, r: Q) -> Self {
        FieldElem::from_poly(ctx, Poly::constant(r))
    }

    pub fn from_int(ctx: &Arc<NumberField>, n: i64) -> Self {
        FieldElem::from_rational(ctx, q(n))
    }

    pub fn zero(ctx: &Arc<NumberField>) -> Self {
        FieldElem::from_poly(ctx, Poly::zero())
    }

    pub fn one(ctx: &Arc<NumberField>) -> Self {
        FieldElem::from_int(ctx, 1)
    }

    pub fn ctx(&self) -> &Arc<NumberField> {
        &self.ctx
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Coordinates against `1, λ, …, λ^{d-1}` of the defining polynomial.
    pub fn coordinates(&self) -> Vec<Q> {
        (0..self.ctx.degree()).map(|i| self.poly.coeff(i)).collect()
    }

    pub fn signum(&self) -> i32 {
        self.ctx.sign_of(&self.poly)
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    /// Rational value, when the element is provably rational.
    pub fn to_rational(&self) -> Option<Q> {
        if self.ctx.is_rational() {
            return Some(self.poly.eval(&self.ctx.lo));
        }
        match self.poly.degree() {
            None => Some(Q::zero()),
            Some(0) => Some(self.poly.coeff(0)),
            _ => None,
        }
    }

    pub fn pow(&self, e: u32) -> FieldElem {
        let mut acc = FieldElem::one(&self.ctx);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<FieldElem> {
        if self.is_zero() {
            return None;
        }
        let m = &self.ctx.modulus;
        let (g, s, _) = self.poly.ext_gcd(m);
        let s = if g.degree() == Some(0) {
            s
        } else {
            // a(λ) ≠ 0, so λ is a root of m/g, which is coprime to a.
            let m2 = m.div_rem(&g).0;
            let (_, s2, _) = self.poly.ext_gcd(&m2);
            s2
        };
        Some(FieldElem::from_poly(&self.ctx, s))
    }

    pub fn div(&self, other: &FieldElem) -> Option<FieldElem> {
        other.inv().map(|i| self * &i)
    }

    fn check(&self, other: &FieldElem) {
        debug_assert!(
            Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx.same_generator(&other.ctx),
            "mixing elements of different number fields"
        );
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.check(rhs);
        FieldElem { ctx: Arc::clone(&self.ctx), poly: self.poly.add(&rhs.poly) }
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self.check(rhs);
        FieldElem { ctx: Arc::clone(&self.ctx), poly: self.poly.sub(&rhs.poly) }
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.check(rhs);
        FieldElem::from_poly(&self.ctx, self.poly.mul(&rhs.poly))
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        &self + &rhs
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        &self - &rhs
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        &self * &rhs
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { ctx: Arc::clone(&self.ctx), poly: self.poly.neg() }
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl Eq for FieldElem {}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_rational() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (i, c) in self.poly.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})·λ")?,
                _ => write!(f, "({c})·λ^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::{char_poly, q_frac};

    #[test]
    fn integer_perron_root_collapses_to_q() {
        let f = NumberField::largest_real_root(&char_poly(&[vec![2, 1], vec![1, 2]])).unwrap();
        assert!(f.is_rational());
        assert_eq!(f.generator().to_rational(), Some(q(3)));
        let f = NumberField::largest_real_root(&char_poly(&[vec![1, 1], vec![1, 1]])).unwrap();
        assert_eq!(f.generator().to_rational(), Some(q(2)));
    }

    #[test]
    fn golden_ratio_field() {
        // x^2 - x - 1, λ = (1+√5)/2
        let f = NumberField::largest_real_root(&Poly::from_ints(&[-1, -1, 1])).unwrap();
        assert_eq!(f.degree(), 2);
        let l = f.generator();
        let l2 = &l * &l;
        assert_eq!(l2, &l + &FieldElem::one(&f));
        let inv = l.inv().unwrap();
        assert_eq!(inv, &l - &FieldElem::one(&f));
        assert!(l.is_positive());
        let d = &l - &FieldElem::from_rational(&f, q_frac(1618, 1000));
        assert!(d.is_positive());
        let d = &l - &FieldElem::from_rational(&f, q_frac(1619, 1000));
        assert!(!d.is_positive() && !d.is_zero());
    }

    #[test]
    fn reducible_modulus_still_decides_zero() {
        // (x - 1)(x^2 - 2): largest root √2 with the reducible cubic as modulus.
        let p = Poly::from_ints(&[-1, 1]).mul(&Poly::from_ints(&[-2, 0, 1]));
        let f = NumberField::largest_real_root(&p).unwrap();
        let l = f.generator();
        let two = FieldElem::from_int(&f, 2);
        assert_eq!(&l * &l, two);
        let lm1 = &l - &FieldElem::one(&f);
        assert!(!lm1.is_zero());
        let inv = lm1.inv().unwrap();
        assert_eq!(&inv * &lm1, FieldElem::one(&f));
    }
}
