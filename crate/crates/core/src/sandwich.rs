//! Sandwich ingredients evaluated at a parameter point:
//! `Ω̄ = (1/n) ∑ sₜsₜ'`, `H̄ = (1/n) ∑ hₜ`, its diagonal `H̄ᵈ`, and
//! `Ĉ = H̄⁻¹ Ω̄ H̄⁻¹`.
//!
//! `Ω̄` is the uncentered outer-product average.

use nalgebra::{DMatrix, DVector};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{reciprocal_condition, symmetrize, Factor};
use crate::model::{ModelKind, Params};

/// `H̄` with a Jacobi-scaled reciprocal condition number below this is
/// treated as singular and `Ĉ` is not formed.
pub const SINGULAR_RCOND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichSet {
    pub omega: DMatrix<f64>,
    pub h_bar: DMatrix<f64>,
    pub h_diag: DMatrix<f64>,
    c_hat: Option<DMatrix<f64>>,
    /// Reciprocal condition estimate of `H̄`.
    pub rcond: f64,
    pub at: DVector<f64>,
    pub n: usize,
}

/// Evaluates all four matrices at `params` in one pass over the data.
pub fn build_sandwich(kind: ModelKind, params: &Params, data: &Dataset) -> Result<SandwichSet> {
    let d = params.dim();
    let n = data.n();
    if n < d {
        return Err(Error::DimensionMismatch {
            context: "sandwich needs n >= d; observations",
            expected: d,
            found: n,
        });
    }
    let scores = kind.score_matrix(params, data)?;
    let omega = scores.tr_mul(&scores) / n as f64;
    let h_bar = kind.hessian_sum(params, data)? / n as f64;
    SandwichSet::from_parts(omega, h_bar, params.to_vector(), n)
}

impl SandwichSet {
    /// Assembles a set from precomputed `Ω̄` and `H̄`.
    pub fn from_parts(
        mut omega: DMatrix<f64>,
        mut h_bar: DMatrix<f64>,
        at: DVector<f64>,
        n: usize,
    ) -> Result<Self> {
        let d = omega.nrows();
        for (what, m) in [("omega", &omega), ("h_bar", &h_bar)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    context: what,
                    expected: d,
                    found: m.ncols().max(m.nrows()),
                });
            }
        }
        if at.len() != d {
            return Err(Error::DimensionMismatch {
                context: "parameter point",
                expected: d,
                found: at.len(),
            });
        }
        if omega.iter().chain(h_bar.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite sandwich entry".into()));
        }
        symmetrize(&mut omega);
        symmetrize(&mut h_bar);
        let h_diag = DMatrix::from_diagonal(&h_bar.diagonal());
        let rcond = reciprocal_condition(&h_bar);
        let c_hat = if rcond < SINGULAR_RCOND {
            None
        } else {
            Factor::new(&(-&h_bar), "H̄").ok().map(|f| {
                // (−H̄)⁻¹ Ω̄ (−H̄)⁻¹ = H̄⁻¹ Ω̄ H̄⁻¹
                let left = f.solve(&omega);
                let mut c = f.solve(&left.transpose());
                symmetrize(&mut c);
                c
            })
        };
        Ok(Self {
            omega,
            h_bar,
            h_diag,
            c_hat,
            rcond,
            at,
            n,
        })
    }

    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }

    pub fn is_singular(&self) -> bool {
        self.c_hat.is_none()
    }

    /// `Ĉ = H̄⁻¹ Ω̄ H̄⁻¹`; an error when `H̄` was flagged singular.
    pub fn c_hat(&self) -> Result<&DMatrix<f64>> {
        self.c_hat.as_ref().ok_or(Error::Singular("H̄"))
    }

    /// Factorization of `−H̄`.
    pub fn neg_h_factor(&self) -> Result<Factor> {
        if self.is_singular() {
            return Err(Error::Singular("H̄"));
        }
        Factor::new(&(-&self.h_bar), "H̄")
    }

    /// `tr[Ω̄ (−H̄)⁻¹]` via a factorized solve.
    pub fn trace_omega_neg_h_inv(&self) -> Result<f64> {
        Ok(self.neg_h_factor()?.trace_solve(&self.omega))
    }
}

/// Reusable pieces of the posterior-predictive penalty.
#[derive(Debug, Clone)]
pub struct PenaltyInputs {
    pub neg_h: DMatrix<f64>,
    pub neg_hd: DMatrix<f64>,
    /// `M = −H̄ + (−H̄ᵈ)`.
    pub m: DMatrix<f64>,
    m_factor: Factor,
}

impl PenaltyInputs {
    pub fn m_factor(&self) -> &Factor {
        &self.m_factor
    }
}

pub fn penalty_inputs(sw: &SandwichSet) -> Result<PenaltyInputs> {
    if sw.h_bar.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("non-finite H̄".into()));
    }
    let neg_h = -&sw.h_bar;
    let neg_hd = -&sw.h_diag;
    let m = &neg_h + &neg_hd;
    let m_factor = Factor::new(&m, "M = −H̄ + (−H̄ᵈ)")?;
    Ok(PenaltyInputs {
        neg_h,
        neg_hd,
        m,
        m_factor,
    })
}
