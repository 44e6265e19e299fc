//! Hilbert matrices and their closed-form integer inverses.
//!
//! Indices are zero-based throughout: `H[i][j] = 1/(i+j+1)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::linalg::{RatMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("matrix order must be at least 1")]
    Zero,
    #[error("matrix order {0} is not prime")]
    NotPrime(usize),
}

/// Order `n` of a Hilbert matrix, always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HilbertOrder(usize);

impl HilbertOrder {
    pub fn new(n: usize) -> Result<Self, OrderError> {
        if n == 0 {
            return Err(OrderError::Zero);
        }
        Ok(Self(n))
    }

    /// Order suitable for a session key, which must be prime.
    pub fn prime(n: usize) -> Result<Self, OrderError> {
        let order = Self::new(n)?;
        if !is_prime(n as u64) {
            return Err(OrderError::NotPrime(n));
        }
        Ok(order)
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl fmt::Display for HilbertOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Deterministic primality for machine-sized integers (trial division).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// All primes in `lo..=hi`.
pub fn primes_in(lo: usize, hi: usize) -> Vec<usize> {
    (lo..=hi).filter(|&p| is_prime(p as u64)).collect()
}

/// Exact binomial coefficient, zero outside `0 <= b <= a`.
pub fn binomial(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::from(0);
    }
    let b = (b as u64).min(a - b as u64);
    // Each partial product c * (a-b+i) / i is itself a binomial, so the
    // division is exact.
    let mut c = BigInt::one();
    for i in 1..=b {
        c *= a - b + i;
        c /= i;
    }
    c
}

pub fn hilbert_matrix(order: HilbertOrder) -> RatMatrix {
    let n = order.get();
    RatMatrix::from_fn(n, n, |i, j| {
        Rational::new(1, (i + j + 1) as u64).expect("i+j+1 is positive")
    })
}

// Rows 0..rows of Pascal's triangle.
fn pascal_rows(rows: usize) -> Vec<Vec<BigInt>> {
    let mut out: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
    for a in 0..rows {
        let mut row = vec![BigInt::one(); a + 1];
        for b in 1..a {
            row[b] = &out[a - 1][b - 1] + &out[a - 1][b];
        }
        out.push(row);
    }
    out
}

/// Entry `(i, j)` of the inverse of the order-`n` Hilbert matrix:
/// `(-1)^(i+j) (i+j+1) C(n+i, n-j-1) C(n+j, n-i-1) C(i+j, i)^2`.
pub fn hilbert_inverse_entry(n: usize, i: usize, j: usize) -> BigInt {
    let (n64, i64_, j64) = (n as u64, i as u64, j as u64);
    let c = binomial(i64_ + j64, i as i64);
    let mut v = BigInt::from(i + j + 1)
        * binomial(n64 + i64_, n as i64 - j as i64 - 1)
        * binomial(n64 + j64, n as i64 - i as i64 - 1)
        * &c
        * &c;
    if (i + j) % 2 == 1 {
        v = -v;
    }
    v
}

/// Exact inverse of the Hilbert matrix of the given order; every entry is an
/// integer.
pub fn hilbert_inverse(order: HilbertOrder) -> RatMatrix {
    let n = order.get();
    let pascal = pascal_rows(2 * n);
    let c = |a: usize, b: usize| &pascal[a][b];
    // Symmetric, so only the upper triangle is computed.
    let mut upper = vec![BigInt::from(0); n * n];
    for i in 0..n {
        for j in i..n {
            let mid = c(i + j, i);
            let mut v =
                BigInt::from(i + j + 1) * c(n + i, n - j - 1) * c(n + j, n - i - 1) * mid * mid;
            if (i + j) % 2 == 1 {
                v = -v;
            }
            upper[i * n + j] = v;
        }
    }
    RatMatrix::from_fn(n, n, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        Rational::from_integer(upper[a * n + b].clone())
    })
}
