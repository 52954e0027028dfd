use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Responses plus a design matrix with column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    y: DVector<f64>,
    x: DMatrix<f64>,
    names: Vec<String>,
}

impl Dataset {
    pub fn new(y: DVector<f64>, x: DMatrix<f64>, names: Vec<String>) -> Result<Self> {
        let n = y.len();
        if n == 0 {
            return Err(Error::InvalidData("no observations".into()));
        }
        if x.ncols() == 0 {
            return Err(Error::InvalidData("design matrix has no columns".into()));
        }
        if x.nrows() != n {
            return Err(Error::DimensionMismatch {
                context: "design rows",
                expected: n,
                found: x.nrows(),
            });
        }
        if names.len() != x.ncols() {
            return Err(Error::DimensionMismatch {
                context: "column names",
                expected: x.ncols(),
                found: names.len(),
            });
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!("non-finite response at row {i}")));
        }
        if let Some(k) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite design entry at row {}, column {}",
                k % n,
                k / n
            )));
        }
        Ok(Self { y, x, names })
    }

    /// Builds a dataset with generated column names `x1..xp`.
    pub fn unnamed(y: DVector<f64>, x: DMatrix<f64>) -> Result<Self> {
        let names = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
        Self::new(y, x, names)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidData("empty column selection".into()));
        }
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.p()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                n: self.p(),
            });
        }
        let x = self.x.select_columns(columns);
        let names = columns.iter().map(|&c| self.names[c].clone()).collect();
        Ok(Self {
            y: self.y.clone(),
            x,
            names,
        })
    }

    /// Same design, different responses.
    pub fn with_response(&self, y: DVector<f64>) -> Result<Self> {
        Self::new(y, self.x.clone(), self.names.clone())
    }

    pub fn ensure_binary(&self) -> Result<()> {
        match self.y.iter().position(|&v| v != 0.0 && v != 1.0) {
            Some(row) => Err(Error::NonBinaryResponse {
                row,
                value: self.y[row],
            }),
            None => Ok(()),
        }
    }

    /// Reorders observations; used to check permutation invariance.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n() {
            return Err(Error::DimensionMismatch {
                context: "permutation",
                expected: self.n(),
                found: order.len(),
            });
        }
        let y = DVector::from_iterator(self.n(), order.iter().map(|&i| self.y[i]));
        let x = self.x.select_rows(order);
        Self::new(y, x, self.names.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::string::ToString;

    #[test]
    fn rejects_non_finite_entries() {
        let y = DVector::from_vec(vec![1.0, f64::NAN]);
        let x = DMatrix::from_element(2, 1, 1.0);
        assert!(matches!(Dataset::unnamed(y, x), Err(Error::InvalidData(_))));
    }

    #[test]
    fn rejects_row_mismatch() {
        let y = DVector::from_vec(vec![1.0, 2.0]);
        let x = DMatrix::from_element(3, 1, 1.0);
        assert!(matches!(
            Dataset::unnamed(y, x),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn select_columns_keeps_names() {
        let y = DVector::from_vec(vec![0.0, 1.0]);
        let x = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 1.0, 5.0, 6.0]);
        let d = Dataset::new(y, x, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let s = d.select_columns(&[2, 0]).unwrap();
        assert_eq!(s.names(), &["c".to_string(), "a".to_string()]);
        assert_eq!(s.x()[(1, 0)], 6.0);
    }

    #[test]
    fn binary_check_reports_row() {
        let y = DVector::from_vec(vec![0.0, 1.0, 0.5]);
        let d = Dataset::unnamed(y, DMatrix::from_element(3, 1, 1.0)).unwrap();
        assert_eq!(
            d.ensure_binary(),
            Err(Error::NonBinaryResponse { row: 2, value: 0.5 })
        );
    }
}
