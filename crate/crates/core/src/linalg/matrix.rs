use std::fmt;
use std::ops::Index;

use super::rational::dot;
use super::{LinalgError, Rational};

/// Non-empty column of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatVector {
    entries: Vec<Rational>,
}

impl RatVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::Empty);
        }
        Ok(Self { entries })
    }

    /// Embeds a byte column.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LinalgError> {
        Self::new(bytes.iter().map(|&b| Rational::from(b)).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    // A vector is never empty, but clippy wants the pair.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.entries.iter()
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.len() != other.len() {
            return Err(LinalgError::DimensionMismatch {
                left: (self.len(), 1),
                right: (other.len(), 1),
            });
        }
        Ok(Self {
            entries: self.iter().zip(other.iter()).map(|(a, b)| a + b).collect(),
        })
    }
}

impl Index<usize> for RatVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.entries[i]
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

/// Dense row-major matrix of rationals with at least one row and column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty);
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from nested rows, which must all have the same length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Ragged);
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Integer matrix convenience for tests and small literals.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| Rational::from(x)).collect())
                .collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        self.get(i, j)
    }
}

/// Exact product `m · v`.
pub fn mat_vec(m: &RatMatrix, v: &RatVector) -> Result<RatVector, LinalgError> {
    if m.cols != v.len() {
        return Err(LinalgError::DimensionMismatch {
            left: (m.rows, m.cols),
            right: (v.len(), 1),
        });
    }
    let entries = (0..m.rows).map(|i| dot(m.row(i), v.entries())).collect();
    Ok(RatVector { entries })
}

/// Exact product `a · b`.
pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix, LinalgError> {
    if a.cols != b.rows {
        return Err(LinalgError::DimensionMismatch {
            left: (a.rows, a.cols),
            right: (b.rows, b.cols),
        });
    }
    Ok(RatMatrix::from_fn(a.rows, b.cols, |i, j| {
        (0..a.cols).map(|k| a.get(i, k) * b.get(k, j)).sum()
    }))
}

/// Exact inverse by Gauss-Jordan elimination over the rationals.
///
/// The pivot is the first nonzero entry at or below the diagonal, which is
/// enough for exact arithmetic and keeps the elimination order deterministic.
pub fn gauss_inverse(m: &RatMatrix) -> Result<RatMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut a: Vec<Vec<Rational>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| RatMatrix::identity(n).row(i).to_vec())
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(LinalgError::Singular { column: col })?;
        a.swap(col, pivot);
        inv.swap(col, pivot);

        let p = a[col][col].clone();
        for x in a[col].iter_mut().chain(inv[col].iter_mut()) {
            *x = &*x / &p;
        }

        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let d = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &d;
                let d = &factor * &inv[col][c];
                inv[r][c] = &inv[r][c] - &d;
            }
        }
    }
    RatMatrix::from_rows(inv)
}
