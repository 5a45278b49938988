//! Integer matrices: column echelon form with a unimodular transform, exact
//! integer solving and lattice kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |s, k| s + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|row| row.iter().zip(v).fold(BigInt::zero(), |s, (x, y)| s + x * y)).collect()
}

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Column echelon form: returns `(h, u, pivots)` with `a * u = h`, `u`
/// unimodular and `pivots[k] = (row, col)` the leading row of pivot column `k`.
/// Columns past `pivots.len()` are zero.
pub fn column_echelon(a: &[Vec<BigInt>], ncols: usize) -> (IntMatrix, IntMatrix, Vec<usize>) {
    let rows = a.len();
    let mut h: IntMatrix = a.to_vec();
    let mut u = identity(ncols);
    let mut pivots = Vec::new();
    let mut next = 0;
    let swap_cols = |m: &mut IntMatrix, i: usize, j: usize| {
        for r in m.iter_mut() {
            r.swap(i, j);
        }
    };
    // col_j -= f * col_i
    let axpy = |m: &mut IntMatrix, j: usize, i: usize, f: &BigInt| {
        for r in m.iter_mut() {
            let t = &r[i] * f;
            r[j] -= t;
        }
    };
    for r in 0..rows {
        if next >= ncols {
            break;
        }
        loop {
            // smallest nonzero absolute value in row r among columns >= next
            let best = (next..ncols)
                .filter(|&j| !h[r][j].is_zero())
                .min_by(|&x, &y| h[r][x].abs().cmp(&h[r][y].abs()));
            let Some(b) = best else { break };
            swap_cols(&mut h, next, b);
            swap_cols(&mut u, next, b);
            let mut done = true;
            for j in next + 1..ncols {
                if h[r][j].is_zero() {
                    continue;
                }
                let f = h[r][j].div_floor(&h[r][next]);
                axpy(&mut h, j, next, &f);
                axpy(&mut u, j, next, &f);
                if !h[r][j].is_zero() {
                    done = false;
                }
            }
            if done {
                if h[r][next].is_negative() {
                    for row in h.iter_mut() {
                        row[next] = -&row[next];
                    }
                    for row in u.iter_mut() {
                        row[next] = -&row[next];
                    }
                }
                pivots.push(r);
                next += 1;
                break;
            }
        }
    }
    (h, u, pivots)
}

/// Integer solution of `a x = b`, if one exists.
pub fn solve_integer(a: &[Vec<BigInt>], ncols: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let (h, u, pivots) = column_echelon(a, ncols);
    let mut y = vec![BigInt::zero(); ncols];
    let mut resid: Vec<BigInt> = b.to_vec();
    for (k, &r) in pivots.iter().enumerate() {
        let (quo, rem) = resid[r].div_rem(&h[r][k]);
        if !rem.is_zero() {
            return None;
        }
        for (row, res) in resid.iter_mut().enumerate() {
            *res -= &h[row][k] * &quo;
        }
        y[k] = quo;
    }
    if resid.iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(mat_vec(&u, &y))
}

/// A basis of the integer kernel `{x in Z^ncols : a x = 0}`.
pub fn integer_kernel(a: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let (_, u, pivots) = column_echelon(a, ncols);
    (pivots.len()..ncols).map(|j| u.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Whether `v` lies in the lattice spanned by the columns of `a`.
pub fn in_column_lattice(a: &[Vec<BigInt>], ncols: usize, v: &[BigInt]) -> bool {
    solve_integer(a, ncols, v).is_some()
}
