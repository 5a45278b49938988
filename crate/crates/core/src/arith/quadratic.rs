//! Real numbers of the form `a + b√2 + c√3 + d√6` with rational coefficients.
//!
//! This is the biquadratic field `Q(√2, √3)`. `1, √2, √3, √6` are linearly
//! independent over Q, so an element is zero exactly when all four
//! coefficients vanish; signs of nonzero elements are found by bisecting
//! rational enclosures of the square roots.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::poly::{q, Q};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadReal {
    /// Coefficients of `1, √2, √3, √6`.
    c: [Q; 4],
}

impl QuadReal {
    pub fn new(a: Q, b: Q, c: Q, d: Q) -> Self {
        QuadReal { c: [a, b, c, d] }
    }

    pub fn rational(r: Q) -> Self {
        QuadReal::new(r, Q::zero(), Q::zero(), Q::zero())
    }

    pub fn int(n: i64) -> Self {
        QuadReal::rational(q(n))
    }

    pub fn sqrt2() -> Self {
        QuadReal::new(Q::zero(), Q::one(), Q::zero(), Q::zero())
    }

    pub fn sqrt3() -> Self {
        QuadReal::new(Q::zero(), Q::zero(), Q::one(), Q::zero())
    }

    pub fn coeffs(&self) -> &[Q; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.c[1..].iter().all(Zero::is_zero) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, r: &Q) -> Self {
        QuadReal { c: [&self.c[0] * r, &self.c[1] * r, &self.c[2] * r, &self.c[3] * r] }
    }

    /// Image under `√2 ↦ ±√2`, `√3 ↦ ±√3`.
    pub fn conjugate(&self, flip2: bool, flip3: bool) -> Self {
        let s2 = if flip2 { -Q::one() } else { Q::one() };
        let s3 = if flip3 { -Q::one() } else { Q::one() };
        let s6 = &s2 * &s3;
        QuadReal { c: [self.c[0].clone(), &self.c[1] * s2, &self.c[2] * s3, &self.c[3] * s6] }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let others = &(&self.conjugate(true, false) * &self.conjugate(false, true)) * &self.conjugate(true, true);
        let norm = (self * &others).as_rational().expect("the norm is rational");
        Some(others.scale(&(Q::one() / norm)))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self * &i)
    }

    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        // Enclosures of √2 and √3; all coefficient products are bounded by
        // interval arithmetic.
        let (mut l2, mut h2) = (q(1), q(2));
        let (mut l3, mut h3) = (q(1), q(2));
        loop {
            let (l6, h6) = (&l2 * &l3, &h2 * &h3);
            let mut lo = self.c[0].clone();
            let mut hi = self.c[0].clone();
            for (coef, (l, h)) in self.c[1..].iter().zip([(&l2, &h2), (&l3, &h3), (&l6, &h6)]) {
                let (a, b) = (coef * l, coef * h);
                if a <= b {
                    lo += a;
                    hi += b;
                } else {
                    lo += b;
                    hi += a;
                }
            }
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            let m2 = (&l2 + &h2) / q(2);
            if &m2 * &m2 < q(2) {
                l2 = m2;
            } else {
                h2 = m2;
            }
            let m3 = (&l3 + &h3) / q(2);
            if &m3 * &m3 < q(3) {
                l3 = m3;
            } else {
                h3 = m3;
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    /// Largest integer `n` with `n <= self`.
    pub fn floor(&self) -> Q {
        // Start from a coarse rational approximation, then correct exactly.
        let approx = self.c[0].clone()
            + &self.c[1] * crate::arith::poly::q_frac(14142, 10000)
            + &self.c[2] * crate::arith::poly::q_frac(17320, 10000)
            + &self.c[3] * crate::arith::poly::q_frac(24494, 10000);
        let mut n = approx.floor();
        while (self - &QuadReal::rational(n.clone())).signum() < 0 {
            n -= Q::one();
        }
        while (self - &QuadReal::rational(&n + Q::one())).signum() >= 0 {
            n += Q::one();
        }
        n
    }
}

impl<'a> Add<&'a QuadReal> for &'a QuadReal {
    type Output = QuadReal;
    fn add(self, o: &QuadReal) -> QuadReal {
        QuadReal {
            c: [&self.c[0] + &o.c[0], &self.c[1] + &o.c[1], &self.c[2] + &o.c[2], &self.c[3] + &o.c[3]],
        }
    }
}

impl<'a> Sub<&'a QuadReal> for &'a QuadReal {
    type Output = QuadReal;
    fn sub(self, o: &QuadReal) -> QuadReal {
        QuadReal {
            c: [&self.c[0] - &o.c[0], &self.c[1] - &o.c[1], &self.c[2] - &o.c[2], &self.c[3] - &o.c[3]],
        }
    }
}

impl<'a> Mul<&'a QuadReal> for &'a QuadReal {
    type Output = QuadReal;
    fn mul(self, o: &QuadReal) -> QuadReal {
        let [a, b, c, d] = &self.c;
        let [e, f, g, h] = &o.c;
        // √2√2 = 2, √3√3 = 3, √6√6 = 6, √2√3 = √6, √2√6 = 2√3, √3√6 = 3√2
        let one = a * e + q(2) * b * f + q(3) * c * g + q(6) * d * h;
        let s2 = a * f + b * e + q(3) * (c * h + d * g);
        let s3 = a * g + c * e + q(2) * (b * h + d * f);
        let s6 = a * h + d * e + b * g + c * f;
        QuadReal { c: [one, s2, s3, s6] }
    }
}

impl Neg for &QuadReal {
    type Output = QuadReal;
    fn neg(self) -> QuadReal {
        QuadReal { c: [-&self.c[0], -&self.c[1], -&self.c[2], -&self.c[3]] }
    }
}

impl PartialOrd for QuadReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadReal {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Debug for QuadReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "√2", "√3", "√6"];
        let mut first = true;
        for (c, n) in self.c.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if n.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{n}")?;
            } else {
                write!(f, "({c}){n}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs_and_products() {
        let s2 = QuadReal::sqrt2();
        let s3 = QuadReal::sqrt3();
        assert_eq!(&s2 * &s2, QuadReal::int(2));
        assert!((&s3 - &s2).is_positive());
        let x = &s3 - &QuadReal::int(1); // ≈ 0.732
        assert!(x.is_positive());
        assert!((&QuadReal::int(1) - &x).is_positive());
        assert_eq!(x.floor(), q(0));
        assert_eq!((-&s3).floor(), q(-2));
        let p = &s2 * &s3;
        assert_eq!(&p * &p, QuadReal::int(6));
        let y = &(&s2 + &s3) + &QuadReal::int(1);
        assert_eq!(&y * &y.inv().unwrap(), QuadReal::int(1));
    }
}
