//! Small dense helpers shared by the engines and the criteria.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen, LU};

use crate::error::{Error, Result};

/// Replaces `m` by `(m + m') / 2`.
pub fn symmetrize(m: &mut DMatrix<f64>) {
    let d = m.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub fn cholesky(m: &DMatrix<f64>, what: &'static str) -> Result<Cholesky<f64, Dyn>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite(what));
    }
    Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite(what))
}

/// `ln |m|` for a symmetric positive definite matrix.
pub fn log_det_spd(m: &DMatrix<f64>, what: &'static str) -> Result<f64> {
    let chol = cholesky(m, what)?;
    Ok(chol_log_det(&chol))
}

pub fn chol_log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|v| libm::log(*v)).sum::<f64>()
}

/// A triangular factorization kept around for repeated solves.
#[derive(Debug, Clone)]
pub enum Factor {
    Cholesky(Cholesky<f64, Dyn>),
    Lu(LU<f64, Dyn, Dyn>),
}

impl Factor {
    /// Cholesky when `m` is positive definite, pivoted LU otherwise.
    pub fn new(m: &DMatrix<f64>, what: &'static str) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular(what));
        }
        let tiny = |diag: &[f64]| {
            let max = diag.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
            let min = diag.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
            min <= max * f64::EPSILON * m.nrows() as f64
        };
        if let Some(chol) = Cholesky::new(m.clone()) {
            let d2: alloc::vec::Vec<f64> = chol.l_dirty().diagonal().iter().map(|v| v * v).collect();
            if tiny(&d2) {
                return Err(Error::Singular(what));
            }
            return Ok(Factor::Cholesky(chol));
        }
        let lu = LU::new(m.clone());
        if !lu.is_invertible() {
            return Err(Error::Singular(what));
        }
        if tiny(lu.u().diagonal().as_slice()) {
            return Err(Error::Singular(what));
        }
        Ok(Factor::Lu(lu))
    }

    pub fn dim(&self) -> usize {
        match self {
            Factor::Cholesky(c) => c.l_dirty().nrows(),
            Factor::Lu(lu) => lu.l().nrows(),
        }
    }

    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Factor::Cholesky(c) => c.solve(b),
            Factor::Lu(lu) => lu.solve(b).expect("factor checked invertible"),
        }
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> DVector<f64> {
        match self {
            Factor::Cholesky(c) => c.solve(b),
            Factor::Lu(lu) => lu.solve(b).expect("factor checked invertible"),
        }
    }

    /// `tr(F⁻¹ B)` without forming the inverse.
    pub fn trace_solve(&self, b: &DMatrix<f64>) -> f64 {
        self.solve(b).trace()
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut inv = self.solve(&DMatrix::identity(d, d));
        symmetrize(&mut inv);
        inv
    }
}

/// Reciprocal condition number of a symmetric matrix after Jacobi scaling
/// `D^{-1/2} m D^{-1/2}` with `D = |diag(m)|`. Returns 0 for a zero or
/// non-finite diagonal entry.
pub fn reciprocal_condition(m: &DMatrix<f64>) -> f64 {
    let d = m.nrows();
    if d == 0 {
        return 0.0;
    }
    let mut scale = DVector::zeros(d);
    for i in 0..d {
        let v = m[(i, i)].abs();
        if !(v.is_finite() && v > 0.0) {
            return 0.0;
        }
        scale[i] = 1.0 / libm::sqrt(v);
    }
    let mut scaled = m.clone();
    for i in 0..d {
        for j in 0..d {
            scaled[(i, j)] *= scale[i] * scale[j];
        }
    }
    symmetrize(&mut scaled);
    let eig = SymmetricEigen::new(scaled);
    let max = eig.eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    if max == 0.0 || !max.is_finite() {
        0.0
    } else {
        min / max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use alloc::vec;

    #[test]
    fn trace_solve_matches_dense_inverse() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let b = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0, 3.0, 0.0, 1.0]);
        let f = Factor::new(&a, "a").unwrap();
        let dense = (a.clone().try_inverse().unwrap() * &b).trace();
        assert_relative_eq!(f.trace_solve(&b), dense, max_relative = 1e-12);
    }

    #[test]
    fn indefinite_matrix_uses_lu() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let f = Factor::new(&a, "a").unwrap();
        assert!(matches!(f, Factor::Lu(_)));
        let x = f.solve_vec(&DVector::from_vec(vec![3.0, 3.0]));
        assert_relative_eq!(x[0], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(Factor::new(&a, "a").unwrap_err(), Error::Singular("a"));
    }

    #[test]
    fn log_det_of_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0, 0.5]));
        assert_relative_eq!(log_det_spd(&a, "a").unwrap(), libm::log(3.0), max_relative = 1e-14);
    }

    #[test]
    fn jacobi_scaling_removes_column_scale() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1e-9, 1.0, 1e6]));
        assert_relative_eq!(reciprocal_condition(&a), 1.0, max_relative = 1e-12);
    }
}
