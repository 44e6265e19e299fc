//! Floating-point versus exact inversion of Hilbert matrices.
//!
//! This is the only module that touches `f64`.

use std::fmt;

use thiserror::Error;

use crate::hilbert::{hilbert_inverse, hilbert_matrix, HilbertOrder};
use crate::linalg::{mat_mul, RatMatrix, Rational};

pub const MAX_REPORT_ORDER: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("max order {0} outside 1..={MAX_REPORT_ORDER}")]
    OrderOutOfRange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FloatResidual {
    Value(f64),
    /// Elimination hit an exactly zero pivot.
    Singular,
}

impl FloatResidual {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Value(v) => Some(v),
            Self::Singular => None,
        }
    }
}

impl fmt::Display for FloatResidual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `Display` for f64 is the shortest string that round-trips.
            Self::Value(v) => write!(f, "{v}"),
            Self::Singular => write!(f, "singular"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRow {
    pub order: usize,
    /// `max |H·inv(H) - I|` with both the inverse and the product in `f64`.
    pub float_residual: FloatResidual,
    /// The same residual computed exactly with the closed-form inverse.
    pub exact_residual: Rational,
}

/// Gauss-Jordan inverse with partial pivoting in double precision.
pub fn float_inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("non-empty range");
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    Some(inv)
}

fn float_residual(h: &[Vec<f64>], inv: &[Vec<f64>]) -> f64 {
    let n = h.len();
    let mut worst = 0.0f64;
    for (i, row) in h.iter().enumerate() {
        for j in 0..n {
            let s: f64 = row.iter().zip(inv).map(|(a, r)| a * r[j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    worst
}

fn exact_residual(order: HilbertOrder) -> Rational {
    let n = order.get();
    let prod = mat_mul(&hilbert_matrix(order), &hilbert_inverse(order)).expect("square");
    let id = RatMatrix::identity(n);
    prod.entries()
        .iter()
        .zip(id.entries())
        .map(|(a, b)| (a - b).abs())
        .max()
        .unwrap_or_default()
}

pub fn stability_row(order: HilbertOrder) -> StabilityRow {
    let n = order.get();
    let h: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 1.0 / (i + j + 1) as f64).collect())
        .collect();
    let float_residual = match float_inverse(&h) {
        Some(inv) => FloatResidual::Value(float_residual(&h, &inv)),
        None => FloatResidual::Singular,
    };
    StabilityRow {
        order: n,
        float_residual,
        exact_residual: exact_residual(order),
    }
}

/// One row per order `1..=max_order`, computed sequentially.
pub fn stability_report(max_order: usize) -> Result<Vec<StabilityRow>, AnalysisError> {
    if !(1..=MAX_REPORT_ORDER).contains(&max_order) {
        return Err(AnalysisError::OrderOutOfRange(max_order));
    }
    Ok((1..=max_order)
        .map(|n| stability_row(HilbertOrder::new(n).expect("n >= 1")))
        .collect())
}

/// CSV with header `order,float_residual,exact_residual`.
pub fn report_csv(rows: &[StabilityRow]) -> String {
    let mut out = String::from("order,float_residual,exact_residual\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            r.order, r.float_residual, r.exact_residual
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(rows: &[StabilityRow], order: usize) -> f64 {
        rows[order - 1].float_residual.value().unwrap()
    }

    #[test]
    fn small_orders_are_accurate() {
        let rows = stability_report(5).unwrap();
        assert!(residual(&rows, 1) <= f64::EPSILON);
        assert!(residual(&rows, 3) <= 1e-12);
        assert!(rows.iter().all(|r| r.exact_residual.is_zero()));
    }

    #[test]
    fn order_13_degrades() {
        let rows = stability_report(13).unwrap();
        assert!(residual(&rows, 13) > 1e-4, "{}", residual(&rows, 13));
    }

    #[test]
    fn range_checked() {
        assert_eq!(stability_report(0), Err(AnalysisError::OrderOutOfRange(0)));
        assert_eq!(
            stability_report(21),
            Err(AnalysisError::OrderOutOfRange(21))
        );
        assert_eq!(stability_report(20).unwrap().len(), 20);
    }

    #[test]
    fn float_inverse_matches_known_case() {
        let inv = float_inverse(&[vec![1.0, 0.5], vec![0.5, 1.0 / 3.0]]).unwrap();
        let expect = [[4.0, -6.0], [-6.0, 12.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv[i][j] - expect[i][j]).abs() < 1e-12);
            }
        }
        assert!(float_inverse(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_none());
    }

    #[test]
    fn csv_format() {
        let csv = report_csv(&stability_report(2).unwrap());
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("order,float_residual,exact_residual"));
        let row1: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row1[0], "1");
        assert_eq!(row1[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row1[2], "0");
        assert_eq!(lines.count(), 1);
    }
}
