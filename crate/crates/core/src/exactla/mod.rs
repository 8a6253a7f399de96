//! Exact linear algebra over the rationals.
//!
//! All rank and dimension questions in this crate reduce to [`ExactMatrix::rank`],
//! which clears denominators row by row and runs fraction-free elimination.

mod bareiss;
mod index_set;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use index_set::{IndexSet, MAX_UNIVERSE};
pub(crate) use index_set::lex_masks;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("universe of size {0} exceeds the supported maximum of 64")]
    UniverseTooLarge(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("malformed rational literal {0:?}")]
    BadLiteral(String),
}

/// Parses `"3"`, `"-7/2"` and similar literals. Zero denominators are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, LinAlgError> {
    let bad = || LinAlgError::BadLiteral(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Canonical literal: `"3"` for integers, `"p/q"` otherwise.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rat(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format_rational(self.get(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self, LinAlgError> {
        if data.len() != rows * cols {
            return Err(LinAlgError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ExactMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self, LinAlgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinAlgError::Shape("ragged rows".into()));
        }
        Ok(ExactMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        })
    }

    /// Builds an `n_rows × columns.len()` matrix; every column must have `n_rows` entries.
    pub fn from_columns(n_rows: usize, columns: &[Vec<Rational>]) -> Result<Self, LinAlgError> {
        if let Some(bad) = columns.iter().position(|c| c.len() != n_rows) {
            return Err(LinAlgError::Shape(format!(
                "column {} has {} entries, expected {n_rows}",
                bad + 1,
                columns[bad].len()
            )));
        }
        let cols = columns.len();
        let mut m = Self::zeros(n_rows, cols);
        for (c, col) in columns.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                m.data[r * cols + c] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let r: Vec<Vec<Rational>> = rows.iter().map(|row| row.iter().map(|&v| rat(v)).collect()).collect();
        Self::from_rows(&r).expect("rectangular literal")
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &ExactMatrix) -> Result<Self, LinAlgError> {
        if self.rows != other.rows {
            return Err(LinAlgError::Shape(format!(
                "cannot concatenate {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let mut cols = self.columns();
        cols.extend(other.columns());
        Self::from_columns(self.rows, &cols)
    }

    /// Scales row `r` by `diag[r]`.
    pub fn scale_rows(&self, diag: &[Rational]) -> Result<Self, LinAlgError> {
        if diag.len() != self.rows {
            return Err(LinAlgError::Shape("diagonal length differs from row count".into()));
        }
        let mut m = self.clone();
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.data[r * self.cols + c] *= &diag[r];
            }
        }
        Ok(m)
    }

    /// `B_{X,Y}`: keeps rows in `x` and columns in `y`, preserving order.
    pub fn submatrix(&self, x: &IndexSet, y: &IndexSet) -> Result<Self, LinAlgError> {
        if x.universe() != self.rows {
            return Err(LinAlgError::Shape(format!(
                "row set over [{}] applied to {} rows",
                x.universe(),
                self.rows
            )));
        }
        if y.universe() != self.cols {
            return Err(LinAlgError::Shape(format!(
                "column set over [{}] applied to {} columns",
                y.universe(),
                self.cols
            )));
        }
        let rs = x.to_vec();
        let cs = y.to_vec();
        let mut data = Vec::with_capacity(rs.len() * cs.len());
        for &r in &rs {
            for &c in &cs {
                data.push(self.get(r, c).clone());
            }
        }
        Ok(ExactMatrix {
            rows: rs.len(),
            cols: cs.len(),
            data,
        })
    }

    /// `B_{*,Y}`.
    pub fn select_columns(&self, y: &IndexSet) -> Result<Self, LinAlgError> {
        self.submatrix(&IndexSet::full(self.rows), y)
    }

    /// Integer matrix with each row scaled by the lcm of its denominators.
    /// Row scaling by nonzero constants leaves the rank unchanged.
    fn integer_rows(&self) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(self.data.len());
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            out.extend(row.iter().map(|x| x.numer() * (&l / x.denom())));
        }
        out
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        bareiss::rank(self.rows, self.cols, &self.integer_rows())
    }

    pub fn has_full_column_rank(&self) -> bool {
        self.rank() == self.cols
    }

    /// Determinant of a square matrix.
    pub fn determinant(&self) -> Result<Rational, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::Shape(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        // Clearing row denominators multiplies det by the product of the row lcms.
        let mut scale = BigInt::one();
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            scale *= row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        }
        let d = bareiss::determinant(self.rows, &self.integer_rows());
        Ok(Rational::new(d, scale))
    }

    /// Reduced row echelon form plus pivot columns.
    fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, row * m.cols + j);
            }
            let inv = m.get(row, c).recip();
            for j in 0..m.cols {
                m.data[row * m.cols + j] *= &inv;
            }
            for r in 0..m.rows {
                if r != row && !m.get(r, c).is_zero() {
                    let f = m.get(r, c).clone();
                    for j in 0..m.cols {
                        let delta = &f * m.get(row, j);
                        m.data[r * m.cols + j] -= delta;
                    }
                }
            }
            pivots.push(c);
            row += 1;
        }
        (m, pivots)
    }

    /// Basis of `{x : Mx = 0}` as the columns of an `n_cols × (n_cols − rank)` matrix.
    pub fn nullspace_basis(&self) -> ExactMatrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = ExactMatrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, Rational::one());
            for (i, &p) in pivots.iter().enumerate() {
                basis.set(p, k, -r.get(i, f).clone());
            }
        }
        basis
    }

    /// `self · other`.
    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ExactMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * other.get(k, j);
                    out.data[i * other.cols + j] += v;
                }
            }
        }
        Ok(out)
    }

    /// Basis (as columns) of the column span: a maximal independent subset of the columns.
    pub fn column_basis(&self) -> ExactMatrix {
        let (_, pivots) = self.rref();
        let keep = IndexSet::from_zero_based(self.cols, pivots).expect("pivot columns in range");
        self.select_columns(&keep).expect("shape is consistent")
    }

    /// True when every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Support (nonzero rows) of column `c`.
    pub fn column_support(&self, c: usize) -> IndexSet {
        IndexSet::from_zero_based(self.rows, (0..self.rows).filter(|&r| !self.get(r, c).is_zero()))
            .expect("row index in range")
    }

    /// Basis of `S_J ∩ colspan(self)` as columns.
    pub fn sparse_subspace_basis(&self, j: &IndexSet) -> Result<ExactMatrix, LinAlgError> {
        let outside = self.submatrix(&j.complement(), &IndexSet::full(self.cols))?;
        let kernel = outside.nullspace_basis();
        let image = self.mul(&kernel)?;
        Ok(image.column_basis())
    }

    /// True when every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Largest absolute numerator.
    pub fn max_abs_numerator(&self) -> BigInt {
        self.data.iter().map(|x| x.numer().abs()).max().unwrap_or_default()
    }
}

/// `rank(M)`.
pub fn rank(m: &ExactMatrix) -> usize {
    m.rank()
}

/// Columns form a basis of the nullspace of `m`.
pub fn nullspace_basis(m: &ExactMatrix) -> ExactMatrix {
    m.nullspace_basis()
}

/// `B_{X,Y}`.
pub fn submatrix(m: &ExactMatrix, x: &IndexSet, y: &IndexSet) -> Result<ExactMatrix, LinAlgError> {
    m.submatrix(x, y)
}

/// `dim(S_J ∩ colspan(B)) = rank(B) − rank(B_{J^c,*})`.
pub fn sparse_dim(b: &ExactMatrix, j: &IndexSet) -> Result<usize, LinAlgError> {
    let rest = b.submatrix(&j.complement(), &IndexSet::full(b.n_cols()))?;
    Ok(b.rank() - rest.rank())
}

/// `dim(colspan(A) ∩ colspan(B)) = rank(A) + rank(B) − rank([A|B])`.
pub fn intersect_dim(a: &ExactMatrix, b: &ExactMatrix) -> Result<usize, LinAlgError> {
    let both = a.hcat(b)?;
    Ok(a.rank() + b.rank() - both.rank())
}

/// Basis of `colspan(A) ∩ colspan(B)` as columns.
pub fn intersection_basis(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix, LinAlgError> {
    let a = a.column_basis();
    let b = b.column_basis();
    let both = a.hcat(&b)?;
    let kernel = both.nullspace_basis();
    // [A|B][u;v] = 0  ⇒  A u = −B v lies in both spans
    let top = kernel.submatrix(
        &IndexSet::from_zero_based(kernel.n_rows(), 0..a.n_cols())?,
        &IndexSet::full(kernel.n_cols()),
    )?;
    Ok(a.mul(&top)?.column_basis())
}

/// Columns `e_j` for `j ∈ J`, spanning `S_J`.
pub fn sparse_subspace(n: usize, j: &IndexSet) -> ExactMatrix {
    let cols: Vec<Vec<Rational>> = j
        .iter()
        .map(|i| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::one();
            v
        })
        .collect();
    ExactMatrix::from_columns(n, &cols).expect("unit columns have n entries")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b1() -> ExactMatrix {
        ExactMatrix::from_i64_rows(&[&[1, 1], &[1, 2], &[1, 3], &[0, 0]])
    }

    fn set(n: usize, m: &[usize]) -> IndexSet {
        IndexSet::from_one_based(n, m.iter().copied()).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&ExactMatrix::identity(2)), 2);
        assert_eq!(rank(&b1()), 2);
        let dup = ExactMatrix::from_i64_rows(&[&[1, 1, 2], &[3, 3, 0], &[0, 0, 1]]);
        assert!(rank(&dup) < 3);
    }

    #[test]
    fn rank_with_fractions() {
        let m = ExactMatrix::from_rows(&[
            vec![parse_rational("1/2").unwrap(), parse_rational("1/3").unwrap()],
            vec![parse_rational("3").unwrap(), parse_rational("2").unwrap()],
        ])
        .unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(m.determinant().unwrap(), rat(0));
        let d = ExactMatrix::from_rows(&[
            vec![parse_rational("1/2").unwrap(), rat(0)],
            vec![rat(0), parse_rational("-2/3").unwrap()],
        ])
        .unwrap();
        assert_eq!(d.determinant().unwrap(), parse_rational("-1/3").unwrap());
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(nullspace_basis(&ExactMatrix::identity(3)).n_cols(), 0);

        let m = ExactMatrix::from_i64_rows(&[&[1, -1]]);
        let k = nullspace_basis(&m);
        assert_eq!(k.n_cols(), 1);
        assert_eq!(k.get(0, 0), k.get(1, 0));

        let m = ExactMatrix::from_i64_rows(&[&[1, 3], &[0, 0]]);
        let k = nullspace_basis(&m);
        assert_eq!(k.n_cols(), 1);
        // proportional to (3, -1)
        assert_eq!(k.get(0, 0) * rat(-1), k.get(1, 0) * rat(3));
        assert!(m.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn submatrix_examples() {
        let b = b1();
        assert_eq!(b.submatrix(&IndexSet::full(4), &IndexSet::full(2)).unwrap(), b);
        let row4 = b.submatrix(&set(4, &[4]), &set(2, &[1, 2])).unwrap();
        assert_eq!(row4.n_rows(), 1);
        assert!(row4.is_zero());
        let empty = b.submatrix(&IndexSet::empty(4), &IndexSet::full(2)).unwrap();
        assert_eq!((empty.n_rows(), empty.n_cols(), empty.rank()), (0, 2, 0));
        assert!(b.submatrix(&IndexSet::full(5), &IndexSet::full(2)).is_err());
    }

    #[test]
    fn sparse_dim_examples() {
        let b = b1();
        assert_eq!(sparse_dim(&b, &set(4, &[1, 2, 3])).unwrap(), 2);
        assert_eq!(sparse_dim(&b, &set(4, &[1, 2])).unwrap(), 1);
        assert_eq!(sparse_dim(&b, &IndexSet::full(4)).unwrap(), 2);
        assert_eq!(sparse_dim(&b, &IndexSet::empty(4)).unwrap(), 0);
    }

    #[test]
    fn intersect_dim_examples() {
        let b = b1();
        assert_eq!(intersect_dim(&b, &b).unwrap(), 2);
        let e1 = ExactMatrix::from_i64_rows(&[&[1], &[0]]);
        let e2 = ExactMatrix::from_i64_rows(&[&[0], &[1]]);
        assert_eq!(intersect_dim(&e1, &e2).unwrap(), 0);
        let s123 = sparse_subspace(4, &set(4, &[1, 2, 3]));
        assert_eq!(intersect_dim(&s123, &b).unwrap(), 2);
        assert_eq!(
            intersect_dim(&s123, &b).unwrap(),
            sparse_dim(&b, &set(4, &[1, 2, 3])).unwrap()
        );
        assert!(intersect_dim(&e1, &b).is_err());
    }

    #[test]
    fn intersection_basis_spans_common_part() {
        let a = ExactMatrix::from_i64_rows(&[&[1, 0], &[0, 1], &[0, 0]]);
        let b = ExactMatrix::from_i64_rows(&[&[1, 0], &[1, 0], &[0, 1]]);
        let w = intersection_basis(&a, &b).unwrap();
        assert_eq!(w.n_cols(), 1);
        assert_eq!(intersect_dim(&w, &a).unwrap(), 1);
        assert_eq!(intersect_dim(&w, &b).unwrap(), 1);
    }

    #[test]
    fn literals() {
        assert_eq!(parse_rational("3").unwrap(), rat(3));
        assert_eq!(format_rational(&parse_rational("-7/2").unwrap()), "-7/2");
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert_eq!(format_rational(&parse_rational("3/-6").unwrap()), "-1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn sparse_basis_lies_in_both() {
        let b = b1();
        let j = set(4, &[1, 2]);
        let basis = b.sparse_subspace_basis(&j).unwrap();
        assert_eq!(basis.n_cols(), 1);
        assert_eq!(basis.get(2, 0), &rat(0));
        assert_eq!(basis.get(3, 0), &rat(0));
        assert_eq!(intersect_dim(&basis, &b).unwrap(), 1);
    }
}
