//! Dense univariate polynomials over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Coefficients are stored lowest degree first and kept trimmed, so the zero
/// polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![Q::zero(), Q::one()])
    }

    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.lead();
        Poly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn scale(&self, c: &Q) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Euclidean division. Panics on division by zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lead = divisor.lead();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * d;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qt, r) = r0.div_rem(&r1);
            let s2 = s0.sub(&qt.mul(&s1));
            let t2 = t0.sub(&qt.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.lead();
        let inv = Q::one() / l;
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn squarefree(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Q) -> i32 {
        sign(&self.eval(x))
    }

    /// Range enclosure of the polynomial over `[lo, hi]`, by interval Horner.
    pub fn eval_interval(&self, lo: &Q, hi: &Q) -> (Q, Q) {
        let mut acc = (Q::zero(), Q::zero());
        for c in self.coeffs.iter().rev() {
            let cands = [&acc.0 * lo, &acc.0 * hi, &acc.1 * lo, &acc.1 * hi];
            let mut mn = cands[0].clone();
            let mut mx = cands[0].clone();
            for v in &cands[1..] {
                if *v < mn {
                    mn = v.clone();
                }
                if *v > mx {
                    mx = v.clone();
                }
            }
            acc = (mn + c, mx + c);
        }
        acc
    }

    /// Sturm sequence of a squarefree polynomial.
    pub fn sturm(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    /// Upper bound on the absolute value of every real root (Cauchy).
    pub fn root_bound(&self) -> Q {
        let l = self.lead().abs();
        let m = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| c.abs() / &l)
            .fold(Q::zero(), |a, b| if b > a { b } else { a });
        m + Q::one()
    }
}

pub fn sign(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn variations(seq: &[Poly], x: &Q) -> usize {
    let signs: Vec<i32> = seq.iter().map(|p| p.sign_at(x)).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots(sturm: &[Poly], a: &Q, b: &Q) -> usize {
    variations(sturm, a).saturating_sub(variations(sturm, b))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Characteristic polynomial `det(xI - A)` of a square integer matrix, via
/// Faddeev-LeVerrier.
pub fn char_poly(a: &[Vec<i64>]) -> Poly {
    let n = a.len();
    let am: Vec<Vec<Q>> = a.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut m: Vec<Vec<Q>> = vec![vec![Q::zero(); n]; n];
    let mut c_prev = Q::one();
    for k in 1..=n {
        // M_k = A * M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Q::zero();
                for t in 0..n {
                    s += &am[i][t] * &m[t][j];
                }
                if i == j {
                    s += &c_prev;
                }
                next[i][j] = s;
            }
        }
        m = next;
        // c_{n-k} = -tr(A M_k) / k
        let mut tr = Q::zero();
        for i in 0..n {
            for t in 0..n {
                tr += &am[i][t] * &m[t][i];
            }
        }
        let c = -tr / q(k as i64);
        coeffs[n - k] = c.clone();
        c_prev = c;
    }
    Poly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_poly_of_small_matrices() {
        assert_eq!(char_poly(&[vec![2, 1], vec![1, 2]]), Poly::from_ints(&[3, -4, 1]));
        assert_eq!(char_poly(&[vec![2]]), Poly::from_ints(&[-2, 1]));
        assert_eq!(char_poly(&[vec![1, 1], vec![1, 0]]), Poly::from_ints(&[-1, -1, 1]));
    }

    #[test]
    fn division_and_gcd() {
        let a = Poly::from_ints(&[-1, 0, 1]); // x^2 - 1
        let b = Poly::from_ints(&[1, 1]);
        let (qt, r) = a.div_rem(&b);
        assert_eq!(qt, Poly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&Poly::from_ints(&[-1, 1]).mul(&Poly::from_ints(&[2, 1]))), Poly::from_ints(&[-1, 1]));
        let (g, s, t) = a.ext_gcd(&Poly::from_ints(&[2, 1]));
        assert_eq!(g, Poly::one());
        assert_eq!(s.mul(&a).add(&t.mul(&Poly::from_ints(&[2, 1]))), Poly::one());
    }

    #[test]
    fn sturm_counts_roots() {
        let p = Poly::from_ints(&[3, -4, 1]); // roots 1, 3
        let s = p.sturm();
        assert_eq!(count_roots(&s, &q(-10), &q(10)), 2);
        assert_eq!(count_roots(&s, &q(2), &q(10)), 1);
        assert_eq!(count_roots(&s, &q(0), &q(1)), 1);
    }
}
