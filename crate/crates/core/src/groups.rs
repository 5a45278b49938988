//! Small ordered groups inside `R^d` and exhaustiveness of maps between them.
//!
//! Elements are vectors over `Q(√2, √3)`. A group is either all of `Q^d`
//! (divisible) or the lattice spanned by finitely many generators.
//!
//! Exhaustiveness is taken in the form: for every `g` in the positive cone
//! of the source and every `h` in the target with `0 < h < φ(g)` there is a
//! `g'` with `φ(g') = h` and `0 < g' < g`. The opposite placement of the
//! quantifiers (over `h` positive and `g` arbitrary) also circulates; the
//! two agree on every example handled here.

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::intmat::{integer_kernel, solve_integer};
use crate::arith::{QuadReal, Q};
use crate::error::{Error, Result};

pub type Vector = Vec<QuadReal>;
pub type Matrix = Vec<Vec<QuadReal>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cone {
    /// `{0} ∪ {x : every coordinate > 0}`.
    StrictOrthant,
    /// `{0} ∪ {(x, y) : y > 0}`.
    SecondCoordinate,
    /// `{x ≥ 0}` in dimension one.
    UsualOnR,
    /// `{x : every coordinate ≥ 0}`.
    IntOrthant,
}

impl Cone {
    /// Coordinates that must be positive, and whether the cone is open
    /// (`{0}` plus strict inequalities) or closed (weak inequalities).
    fn functionals(&self, dim: usize) -> (Vec<usize>, bool) {
        match self {
            Cone::StrictOrthant => ((0..dim).collect(), true),
            Cone::SecondCoordinate => (vec![1], true),
            Cone::UsualOnR => (vec![0], true),
            Cone::IntOrthant => ((0..dim).collect(), false),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedGroupQQ {
    pub dim: usize,
    pub cone: Cone,
    /// Lattice generators as columns; `None` means all of `Q^dim`.
    pub generators: Option<Vec<Vector>>,
}

impl OrderedGroupQQ {
    pub fn rational(dim: usize, cone: Cone) -> Result<Self> {
        let g = OrderedGroupQQ { dim, cone, generators: None };
        g.check()?;
        Ok(g)
    }

    pub fn lattice(dim: usize, cone: Cone, generators: Vec<Vector>) -> Result<Self> {
        let g = OrderedGroupQQ { dim, cone, generators: Some(generators) };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        let ok = match self.cone {
            Cone::SecondCoordinate => self.dim == 2,
            Cone::UsualOnR => self.dim == 1,
            Cone::StrictOrthant => (1..=3).contains(&self.dim),
            Cone::IntOrthant => self.dim >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedCone(format!("{:?} in dimension {}", self.cone, self.dim)))
        }
    }

    pub fn is_divisible(&self) -> bool {
        self.generators.is_none()
    }

    pub fn is_zero(x: &[QuadReal]) -> bool {
        x.iter().all(QuadReal::is_zero)
    }

    /// Membership in the positive cone.
    pub fn is_nonnegative(&self, x: &[QuadReal]) -> bool {
        let (coords, open) = self.cone.functionals(self.dim);
        if open {
            Self::is_zero(x) || coords.iter().all(|&i| x[i].is_positive())
        } else {
            coords.iter().all(|&i| x[i].signum() >= 0)
        }
    }

    /// `x > 0`: in the cone and nonzero.
    pub fn is_positive(&self, x: &[QuadReal]) -> bool {
        !Self::is_zero(x) && self.is_nonnegative(x)
    }

    /// An element in the interior of the cone.
    pub fn interior_unit(&self) -> Vector {
        let (coords, _) = self.cone.functionals(self.dim);
        (0..self.dim).map(|i| QuadReal::int(coords.contains(&i) as i64)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMap {
    pub source: OrderedGroupQQ,
    pub target: OrderedGroupQQ,
    /// `target.dim × source.dim`.
    pub matrix: Matrix,
}

pub fn apply(m: &Matrix, x: &[QuadReal]) -> Vector {
    m.iter().map(|row| row.iter().zip(x).fold(QuadReal::default(), |s, (a, b)| &s + &(a * b))).collect()
}

fn sub(x: &[QuadReal], y: &[QuadReal]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn add(x: &[QuadReal], y: &[QuadReal]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn scale(x: &[QuadReal], c: &QuadReal) -> Vector {
    x.iter().map(|a| a * c).collect()
}

/// Inverse of a square matrix, if it exists.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut a: Vec<Vec<QuadReal>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| QuadReal::int((i == j) as i64)));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        let inv = a[col][col].inv()?;
        a[col] = scale(&a[col], &inv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let t = scale(&a[col], &f);
                a[r] = sub(&a[r], &t);
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

impl GroupMap {
    pub fn new(source: OrderedGroupQQ, target: OrderedGroupQQ, matrix: Matrix) -> Result<Self> {
        if matrix.len() != target.dim || matrix.iter().any(|r| r.len() != source.dim) {
            return Err(Error::PreconditionFailed("matrix shape does not match the groups".into()));
        }
        Ok(GroupMap { source, target, matrix })
    }

    pub fn apply(&self, x: &[QuadReal]) -> Vector {
        apply(&self.matrix, x)
    }

    /// The inverse map when the map is a bijection of divisible groups.
    fn inverse_map(&self) -> Option<GroupMap> {
        if !(self.source.is_divisible() && self.target.is_divisible()) {
            return None;
        }
        let inv = inverse(&self.matrix)?;
        Some(GroupMap { source: self.target.clone(), target: self.source.clone(), matrix: inv })
    }

    /// Whether the positive cone of the source lands in that of the target.
    pub fn preserves_positivity(&self) -> Result<bool> {
        let (tc, t_open) = self.target.cone.functionals(self.target.dim);
        match &self.source.generators {
            Some(_) | None if self.source.cone == Cone::IntOrthant => {
                let cols = self.source_cone_generators();
                Ok(cols.iter().all(|c| self.target.is_nonnegative(&self.apply(c))))
            }
            None => {
                let (sc, _) = self.source.cone.functionals(self.source.dim);
                // a functional is positive on the open source cone iff it is a
                // nonzero nonnegative combination of the defining coordinates
                for &j in &tc {
                    let row = &self.matrix[j];
                    let zero_off = row.iter().enumerate().all(|(i, a)| sc.contains(&i) || a.is_zero());
                    let nonneg_on = sc.iter().all(|&i| row[i].signum() >= 0);
                    let nonzero = sc.iter().any(|&i| !row[i].is_zero());
                    let all_zero = self.matrix.iter().all(|r| r.iter().all(QuadReal::is_zero));
                    if !(zero_off && nonneg_on && (nonzero || !t_open || all_zero)) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Some(_) => Err(Error::UnsupportedCone("positivity of lattice maps with open cones".into())),
        }
    }

    fn source_cone_generators(&self) -> Vec<Vector> {
        match &self.source.generators {
            Some(g) => g.clone(),
            None => (0..self.source.dim)
                .map(|i| (0..self.source.dim).map(|j| QuadReal::int((i == j) as i64)).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeWitness {
    /// A positive target element with no positive preimage.
    pub element: Vector,
    pub preimage: Vector,
    /// An extreme ray of the closed target cone whose preimage leaves the source cone.
    pub boundary_ray: Option<(Vector, Vector)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeCheck {
    pub preserves: bool,
    pub image_proper: bool,
    pub witness: Option<ConeWitness>,
}

/// Candidate positive elements: the interior unit moved along coordinate directions.
fn candidates(g: &OrderedGroupQQ, bound: i64) -> Vec<Vector> {
    let u = g.interior_unit();
    let (coords, _) = g.cone.functionals(g.dim);
    let mut out = Vec::new();
    for t in 1..=bound {
        for i in 0..g.dim {
            let e: Vector = (0..g.dim).map(|j| QuadReal::int((i == j) as i64)).collect();
            let steps: &[i64] = if coords.contains(&i) { &[1] } else { &[-1, 1] };
            for &s in steps {
                out.push(add(&u, &scale(&e, &QuadReal::int(s * t))));
            }
        }
    }
    out.push(u);
    out
}

fn find_cone_witness(inv: &GroupMap, target: &OrderedGroupQQ) -> Option<ConeWitness> {
    let element = candidates(target, 8)
        .into_iter()
        .find(|h| target.is_positive(h) && !inv.target.is_nonnegative(&inv.apply(h)))?;
    let preimage = inv.apply(&element);
    let (coords, _) = target.cone.functionals(target.dim);
    let unit = |i: usize, s: i64| -> Vector { (0..target.dim).map(|j| QuadReal::int(s * (i == j) as i64)).collect() };
    let lineality = (0..target.dim).filter(|i| !coords.contains(i)).flat_map(|i| [unit(i, 1), unit(i, -1)]);
    let boundary_ray = lineality.chain(coords.iter().map(|&i| unit(i, 1))).find_map(|e| {
        let p = inv.apply(&e);
        (!inv.target.is_nonnegative(&p)).then_some((e, p))
    });
    Some(ConeWitness { element, preimage, boundary_ray })
}

/// Decides `φ(G_+) ⊆ H_+` and whether the inclusion is proper.
pub fn cone_check(m: &GroupMap) -> Result<ConeCheck> {
    let preserves = m.preserves_positivity()?;
    if !preserves {
        return Ok(ConeCheck { preserves, image_proper: false, witness: None });
    }
    if let Some(inv) = m.inverse_map() {
        if inv.preserves_positivity()? {
            return Ok(ConeCheck { preserves, image_proper: false, witness: None });
        }
        let witness = find_cone_witness(&inv, &m.target)
            .ok_or_else(|| Error::UnsupportedCone("no witness among candidate elements".into()))?;
        return Ok(ConeCheck { preserves, image_proper: true, witness: Some(witness) });
    }
    if m.target.dim == 1 && m.source.is_divisible() {
        // positive rescaling of any positive element reaches every positive rational
        let nonzero = m.matrix[0].iter().any(|a| !a.is_zero());
        return Ok(ConeCheck { preserves, image_proper: !nonzero, witness: None });
    }
    Err(Error::UnsupportedCone("image cone of a non-bijective map of this shape".into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExhaustiveCertificate {
    /// Bijection whose inverse is also positive: `g' = φ⁻¹(h)`.
    OrderIsomorphism,
    /// One-dimensional target and divisible source: `g' = (h / φ(g)) · g`.
    Scaling,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refutation {
    /// The unique preimage of `h` is not strictly between `0` and `g`.
    PreimageOutsideInterval { preimage: Vector },
    /// Integer coordinates of the fiber over `h` are `point + t · kernel`,
    /// and no integer `t` in `[lo, hi]` exists (`lo > hi`).
    EmptyFiberInterval { point: Vec<BigInt>, kernel: Vec<BigInt>, lo: Option<BigInt>, hi: Option<BigInt> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExhaustiveVerdict {
    Exhaustive(ExhaustiveCertificate),
    NotExhaustive { g: Vector, h: Vector, refutation: Refutation },
    Unknown,
}

pub fn exhaustive_check(m: &GroupMap, search_bound: i64) -> Result<ExhaustiveVerdict> {
    if !m.preserves_positivity_or_lattice()? {
        return Err(Error::PreconditionFailed("the map is not positive".into()));
    }
    if let Some(inv) = m.inverse_map() {
        if inv.preserves_positivity()? {
            return Ok(ExhaustiveVerdict::Exhaustive(ExhaustiveCertificate::OrderIsomorphism));
        }
        let w = find_cone_witness(&inv, &m.target)
            .ok_or_else(|| Error::UnsupportedCone("no witness among candidate elements".into()))?;
        let u = m.source.interior_unit();
        for n in 1..=search_bound.max(1) * 16 {
            let g = scale(&u, &QuadReal::int(n));
            if m.target.is_positive(&sub(&m.apply(&g), &w.element)) {
                let refutation = Refutation::PreimageOutsideInterval { preimage: w.preimage.clone() };
                return Ok(ExhaustiveVerdict::NotExhaustive { g, h: w.element, refutation });
            }
        }
        return Ok(ExhaustiveVerdict::Unknown);
    }
    if m.target.dim == 1 && m.source.is_divisible() {
        return Ok(ExhaustiveVerdict::Exhaustive(ExhaustiveCertificate::Scaling));
    }
    if m.source.generators.is_some() {
        return lattice_search(m, search_bound);
    }
    Ok(ExhaustiveVerdict::Unknown)
}

impl GroupMap {
    fn preserves_positivity_or_lattice(&self) -> Result<bool> {
        match self.preserves_positivity() {
            Err(Error::UnsupportedCone(_)) if self.source.generators.is_some() => Ok(true),
            other => other,
        }
    }

    /// The composite `Z^r → R^k` from lattice coordinates, written as an
    /// integer matrix over the coordinates `1, √2, √3, √6` of each output.
    fn coordinate_matrix(&self, gens: &[Vector]) -> (Vec<Vec<BigInt>>, BigInt) {
        let images: Vec<Vector> = gens.iter().map(|c| self.apply(c)).collect();
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for i in 0..self.target.dim {
            for k in 0..4 {
                rows.push(images.iter().map(|img| img[i].coeffs()[k].clone()).collect());
            }
        }
        let den = rows.iter().flatten().fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
        let ints = rows
            .into_iter()
            .map(|r| r.into_iter().map(|q| (q * Q::from_integer(den.clone())).to_integer()).collect())
            .collect();
        (ints, den)
    }
}

/// Integer vectors of length `r` with entries in `[-b, b]`, smallest first.
fn box_vectors(r: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..r {
        out = out.into_iter().flat_map(|v| (-b..=b).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i64>(), v.clone()));
    out
}

fn combine(gens: &[Vector], dim: usize, z: &[BigInt]) -> Vector {
    let mut x = vec![QuadReal::default(); dim];
    for (g, c) in gens.iter().zip(z) {
        let c = QuadReal::rational(Q::from_integer(c.clone()));
        x = add(&x, &scale(g, &c));
    }
    x
}

/// Decides whether some `g'` in the lattice has `φ(g') = h` and `0 < g' < g`.
pub fn exhaustive_check_pair(m: &GroupMap, g: &[QuadReal], h: &[QuadReal]) -> Result<Option<Refutation>> {
    let gens = m
        .source
        .generators
        .clone()
        .ok_or_else(|| Error::UnsupportedCone("pair checks need a lattice source".into()))?;
    let (coords, open) = m.source.cone.functionals(m.source.dim);
    if !open {
        return Err(Error::UnsupportedCone("pair checks need an open source cone".into()));
    }
    let (a, den) = m.coordinate_matrix(&gens);
    let r = gens.len();
    let rhs: Vec<BigInt> = h
        .iter()
        .flat_map(|x| x.coeffs().iter().map(|q| (q * Q::from_integer(den.clone())).to_integer()).collect::<Vec<_>>())
        .collect();
    let Some(point) = solve_integer(&a, r, &rhs) else {
        return Err(Error::PreconditionFailed("h is not in the image of the lattice".into()));
    };
    let kernel = integer_kernel(&a, r);
    if kernel.len() != 1 {
        return Err(Error::UnsupportedCone(format!("kernel of rank {} is not handled exactly", kernel.len())));
    }
    let kernel = kernel.into_iter().next().unwrap();
    let p = combine(&gens, m.source.dim, &point);
    let k = combine(&gens, m.source.dim, &kernel);
    // g' = p + t k must satisfy l(p) + t l(k) > 0 and l(g - p) - t l(k) > 0 for every coordinate l
    let mut lo: Option<BigInt> = None;
    let mut hi: Option<BigInt> = None;
    let mut infeasible = false;
    for &i in &coords {
        for (a0, b0) in [(p[i].clone(), k[i].clone()), (&g[i] - &p[i], -&k[i])] {
            match b0.signum() {
                0 => infeasible |= a0.signum() <= 0,
                s => {
                    let q = (-&a0).div(&b0).expect("nonzero");
                    let fl: BigInt = q.floor().to_integer();
                    if s > 0 {
                        let bound: BigInt = fl + 1;
                        lo = Some(lo.map_or(bound.clone(), |l: BigInt| l.max(bound)));
                    } else {
                        let exact = QuadReal::rational(Q::from_integer(fl.clone())) == q;
                        let bound: BigInt = if exact { fl - 1 } else { fl };
                        hi = Some(hi.map_or(bound.clone(), |u: BigInt| u.min(bound)));
                    }
                }
            }
        }
    }
    let empty = infeasible || matches!((&lo, &hi), (Some(l), Some(u)) if l > u);
    if empty {
        Ok(Some(Refutation::EmptyFiberInterval { point, kernel, lo, hi }))
    } else {
        Ok(None)
    }
}

fn lattice_search(m: &GroupMap, bound: i64) -> Result<ExhaustiveVerdict> {
    let gens = m.source.generators.clone().expect("lattice source");
    let r = gens.len();
    let vecs = box_vectors(r, bound);
    for zg in &vecs {
        let zg: Vec<BigInt> = zg.iter().map(|&x| BigInt::from(x)).collect();
        let g = combine(&gens, m.source.dim, &zg);
        if !m.source.is_positive(&g) {
            continue;
        }
        let pg = m.apply(&g);
        for zh in &vecs {
            let zh: Vec<BigInt> = zh.iter().map(|&x| BigInt::from(x)).collect();
            let h = m.apply(&combine(&gens, m.source.dim, &zh));
            if !(m.target.is_positive(&h) && m.target.is_positive(&sub(&pg, &h))) {
                continue;
            }
            if let Some(refutation) = exhaustive_check_pair(m, &g, &h)? {
                return Ok(ExhaustiveVerdict::NotExhaustive { g, h, refutation });
            }
        }
    }
    Ok(ExhaustiveVerdict::Unknown)
}

/// Replays a refutation: `h` and `φ(g) − h` are positive and no admissible `g'` exists.
pub fn verify_refutation(m: &GroupMap, g: &[QuadReal], h: &[QuadReal], r: &Refutation) -> Result<bool> {
    if !(m.source.is_positive(g) && m.target.is_positive(h) && m.target.is_positive(&sub(&m.apply(g), h))) {
        return Ok(false);
    }
    match r {
        Refutation::PreimageOutsideInterval { preimage } => {
            let inv = m.inverse_map().ok_or_else(|| Error::PreconditionFailed("not a bijection".into()))?;
            Ok(inv.apply(h) == *preimage
                && !(m.source.is_positive(preimage) && m.source.is_positive(&sub(g, preimage))))
        }
        Refutation::EmptyFiberInterval { .. } => Ok(exhaustive_check_pair(m, g, h)?.as_ref() == Some(r)),
    }
}

fn qr(n: i64) -> QuadReal {
    QuadReal::int(n)
}

fn qf(n: i64, d: i64) -> QuadReal {
    QuadReal::rational(crate::arith::q_frac(n, d))
}

/// `φ(x, y) = ((2x + y)/3, (x + 2y)/3)` on `Q²` with the usual order.
pub fn example_cone_image() -> GroupMap {
    let g = OrderedGroupQQ::rational(2, Cone::StrictOrthant).unwrap();
    GroupMap::new(g.clone(), g, vec![vec![qf(2, 3), qf(1, 3)], vec![qf(1, 3), qf(2, 3)]]).unwrap()
}

/// `φ(x, y) = (x − y, x + y)` from the usual order to the second-coordinate order.
pub fn example_second_coordinate() -> GroupMap {
    let s = OrderedGroupQQ::rational(2, Cone::StrictOrthant).unwrap();
    let t = OrderedGroupQQ::rational(2, Cone::SecondCoordinate).unwrap();
    GroupMap::new(s, t, vec![vec![qr(1), qr(-1)], vec![qr(1), qr(1)]]).unwrap()
}

/// `(x, y) ↦ x + y` from `Q²` with the usual order onto `Q`.
pub fn example_quotient_sum() -> GroupMap {
    let s = OrderedGroupQQ::rational(2, Cone::StrictOrthant).unwrap();
    let t = OrderedGroupQQ::rational(1, Cone::UsualOnR).unwrap();
    GroupMap::new(s, t, vec![vec![qr(1), qr(1)]]).unwrap()
}

/// Projection to the second coordinate on `{(aα + b, aα + cβ + d)}` with
/// `α = √2`, `β = √3`.
pub fn example_discrete_kernel() -> GroupMap {
    let (a, b) = (QuadReal::sqrt2(), QuadReal::sqrt3());
    let gens = vec![vec![a.clone(), a], vec![qr(1), qr(0)], vec![qr(0), b], vec![qr(0), qr(1)]];
    let s = OrderedGroupQQ::lattice(2, Cone::StrictOrthant, gens.clone()).unwrap();
    let images: Vec<Vector> = gens.iter().map(|v| vec![v[1].clone()]).collect();
    let t = OrderedGroupQQ::lattice(1, Cone::UsualOnR, images).unwrap();
    GroupMap::new(s, t, vec![vec![qr(0), qr(1)]]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_averaging_matrix() {
        let m = example_cone_image();
        let inv = inverse(&m.matrix).unwrap();
        assert_eq!(inv, vec![vec![qr(2), qr(-1)], vec![qr(-1), qr(2)]]);
    }

    #[test]
    fn box_vectors_start_small() {
        let v = box_vectors(2, 1);
        assert_eq!(v[0], vec![0, 0]);
        assert_eq!(v.len(), 9);
    }
}
