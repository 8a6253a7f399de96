//! Fraction-free (Bareiss) elimination over the integers.
//!
//! Every quotient taken during elimination is exact, so intermediate entries
//! stay bounded by minors of the input. A checked `i128` pass is tried first
//! and the `BigInt` pass takes over on overflow.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

trait Elim: Clone {
    fn is_zero(&self) -> bool;
    fn one() -> Self;
    /// `(a*d - b*c) / q`, exact; `None` on overflow.
    fn cross_div(a: &Self, d: &Self, b: &Self, c: &Self, q: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
}

impl Elim for i128 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn one() -> Self {
        1
    }
    fn cross_div(a: &Self, d: &Self, b: &Self, c: &Self, q: &Self) -> Option<Self> {
        let ad = a.checked_mul(*d)?;
        let bc = b.checked_mul(*c)?;
        let num = ad.checked_sub(bc)?;
        debug_assert_eq!(num % q, 0);
        Some(num / q)
    }
    fn neg(&self) -> Self {
        -*self
    }
}

impl Elim for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn one() -> Self {
        BigInt::from(1)
    }
    fn cross_div(a: &Self, d: &Self, b: &Self, c: &Self, q: &Self) -> Option<Self> {
        Some((a * d - b * c) / q)
    }
    fn neg(&self) -> Self {
        -self
    }
}

struct Outcome<T> {
    rank: usize,
    /// Determinant when the input is square, otherwise meaningless.
    det: T,
}

fn eliminate<T: Elim>(a: &mut [T], rows: usize, cols: usize) -> Option<Outcome<T>> {
    let mut prev = T::one();
    let mut rank = 0usize;
    let mut negate = false;
    let mut last_pivot = T::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r * cols + c].is_zero()) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
            negate = !negate;
        }
        let pivot = a[rank * cols + c].clone();
        for r in rank + 1..rows {
            let lead = a[r * cols + c].clone();
            for j in c + 1..cols {
                let v = T::cross_div(&pivot, &a[r * cols + j], &lead, &a[rank * cols + j], &prev)?;
                a[r * cols + j] = v;
            }
            a[r * cols + c] = T::cross_div(&pivot, &a[r * cols + c], &lead, &pivot, &prev)?;
        }
        prev = pivot.clone();
        last_pivot = pivot;
        rank += 1;
    }
    let det = if rows == cols && rank == rows {
        if negate {
            last_pivot.neg()
        } else {
            last_pivot
        }
    } else {
        T::one() // placeholder, callers check rank first
    };
    Some(Outcome { rank, det })
}

fn narrow(data: &[BigInt]) -> Option<Vec<i128>> {
    data.iter()
        .map(|x| x.to_i64().map(i128::from))
        .collect::<Option<Vec<_>>>()
}

/// Rank of a row-major integer matrix.
pub(crate) fn rank(rows: usize, cols: usize, data: &[BigInt]) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    if let Some(mut small) = narrow(data) {
        if let Some(out) = eliminate(&mut small, rows, cols) {
            return out.rank;
        }
    }
    let mut big = data.to_vec();
    eliminate(&mut big, rows, cols)
        .expect("bigint elimination cannot overflow")
        .rank
}

/// Determinant of a square row-major integer matrix (1 for the empty matrix).
pub(crate) fn determinant(size: usize, data: &[BigInt]) -> BigInt {
    if size == 0 {
        return BigInt::from(1);
    }
    if let Some(mut small) = narrow(data) {
        if let Some(out) = eliminate(&mut small, size, size) {
            return if out.rank < size {
                BigInt::zero()
            } else {
                BigInt::from(out.det)
            };
        }
    }
    let mut big = data.to_vec();
    let out = eliminate(&mut big, size, size).expect("bigint elimination cannot overflow");
    if out.rank < size {
        BigInt::zero()
    } else {
        out.det
    }
}

/// Largest absolute entry; used by tests to force the bigint path.
#[cfg(test)]
pub(crate) fn max_abs(data: &[BigInt]) -> BigInt {
    use num_traits::Signed;
    data.iter().map(|x| x.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    // cofactor expansion, independent of elimination
    fn det_expand(size: usize, m: &[BigInt]) -> BigInt {
        if size == 0 {
            return BigInt::from(1);
        }
        let mut total = BigInt::zero();
        for c in 0..size {
            let mut minor = Vec::new();
            for r in 1..size {
                for j in 0..size {
                    if j != c {
                        minor.push(m[r * size + j].clone());
                    }
                }
            }
            let term = &m[c] * det_expand(size - 1, &minor);
            if c % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank(2, 2, &ints(&[1, 0, 0, 1])), 2);
        assert_eq!(rank(4, 2, &ints(&[1, 1, 1, 2, 1, 3, 0, 0])), 2);
        assert_eq!(rank(2, 3, &ints(&[1, 2, 3, 2, 4, 6])), 1);
        assert_eq!(rank(3, 3, &ints(&[0, 0, 0, 0, 0, 0, 0, 0, 0])), 0);
        assert_eq!(rank(3, 3, &ints(&[0, 1, 2, 0, 0, 3, 0, 0, 0])), 2);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let cases: Vec<Vec<i64>> = vec![
            vec![2, -1, 0, 1, 3, 4, 0, 5, -2],
            vec![0, 1, 1, 0],
            vec![1, 2, 3, 4, 5, 6, 7, 8, 9],
            vec![3, 0, 0, 1, 0, 2, 0, 1, 0, 1, 1, 1, 1, 0, 2, 5],
        ];
        for c in cases {
            let size = (c.len() as f64).sqrt() as usize;
            let m = ints(&c);
            assert_eq!(determinant(size, &m), det_expand(size, &m), "{c:?}");
        }
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = 1i64 << 62;
        let m = ints(&[big, big - 1, 3, big - 7, big, 5, 11, 13, big - 3]);
        assert!(max_abs(&m) > BigInt::from(1u64 << 61));
        assert_eq!(determinant(3, &m), det_expand(3, &m));
        assert_eq!(rank(3, 3, &m), 3);
    }
}
