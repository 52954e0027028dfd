//! Mean-field CAVI for probit regression with latent-variable augmentation.
//!
//! With `zᵢ | β ~ N(xᵢ'β, 1)` and `yᵢ = 1{zᵢ ≥ 0}`, the optimal factors are a
//! Gaussian `q(β) = N(μ*, Σ)` with `Σ = (X'X + Ṽ⁻¹)⁻¹` fixed, and truncated
//! normals `q(zᵢ)` whose means shift `xᵢ'μ*` by an inverse Mills ratio.

use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{chol_log_det, cholesky, symmetrize};
use crate::special::{inv_mills, log_norm_cdf};
use crate::vb::CaviOptions;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbitPrior {
    pub mu_tilde: DVector<f64>,
    pub v_tilde: DMatrix<f64>,
}

impl ProbitPrior {
    pub fn new(mu_tilde: DVector<f64>, v_tilde: DMatrix<f64>) -> Result<Self> {
        let p = mu_tilde.len();
        if v_tilde.nrows() != p || v_tilde.ncols() != p {
            return Err(Error::DimensionMismatch {
                context: "prior covariance",
                expected: p,
                found: v_tilde.nrows(),
            });
        }
        cholesky(&v_tilde, "prior covariance")?;
        Ok(Self { mu_tilde, v_tilde })
    }

    pub fn isotropic(p: usize, scale: f64) -> Result<Self> {
        Self::new(DVector::zeros(p), DMatrix::identity(p, p) * scale)
    }

    pub fn dim(&self) -> usize {
        self.mu_tilde.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbitVbPosterior {
    pub mu_beta: DVector<f64>,
    pub sigma_beta: DMatrix<f64>,
    pub mu_z: DVector<f64>,
    pub elbo: f64,
    pub iterations: usize,
    /// Bound after each full sweep.
    pub elbo_trace: Vec<f64>,
}

struct Work {
    update: Cholesky<f64, Dyn>,
    v_inv: DMatrix<f64>,
    prior_shift: DVector<f64>,
    /// `½ ln det(Ṽ X'X + I)`.
    half_log_det: f64,
}

impl Work {
    fn new(data: &Dataset, prior: &ProbitPrior) -> Result<Self> {
        if prior.dim() != data.p() {
            return Err(Error::DimensionMismatch {
                context: "probit prior",
                expected: data.p(),
                found: prior.dim(),
            });
        }
        data.ensure_binary()?;
        let x = data.x();
        let v_chol = cholesky(&prior.v_tilde, "prior covariance")?;
        let mut v_inv = v_chol.inverse();
        symmetrize(&mut v_inv);
        let update = cholesky(&(x.tr_mul(x) + &v_inv), "probit CAVI update matrix")
            .map_err(|_| Error::Singular("probit CAVI update matrix"))?;
        // det(ṼX'X + I) = det(Ṽ) det(X'X + Ṽ⁻¹)
        let half_log_det = 0.5 * (chol_log_det(&v_chol) + chol_log_det(&update));
        Ok(Self {
            prior_shift: &v_inv * &prior.mu_tilde,
            update,
            v_inv,
            half_log_det,
        })
    }

    fn bound(&self, data: &Dataset, prior: &ProbitPrior, mu_beta: &DVector<f64>) -> f64 {
        let eta = data.x() * mu_beta;
        let fit: f64 = data
            .y()
            .iter()
            .zip(eta.iter())
            .map(|(&y, &e)| log_norm_cdf(if y > 0.5 { e } else { -e }))
            .sum();
        let dev = mu_beta - &prior.mu_tilde;
        fit - 0.5 * dev.dot(&(&self.v_inv * &dev)) - self.half_log_det
    }

    fn beta_update(&self, data: &Dataset, mu_z: &DVector<f64>) -> DVector<f64> {
        self.update.solve(&(data.x().tr_mul(mu_z) + &self.prior_shift))
    }
}

/// Means of the truncated-normal factors `q(zᵢ)` given `E_q[β]`.
pub fn probit_latent_means(data: &Dataset, mu_beta: &DVector<f64>) -> DVector<f64> {
    let eta = data.x() * mu_beta;
    DVector::from_iterator(
        data.n(),
        data.y().iter().zip(eta.iter()).map(|(&y, &e)| {
            if y > 0.5 {
                e + inv_mills(e)
            } else {
                e - inv_mills(-e)
            }
        }),
    )
}

/// Alternates the `q(z)` and `q(β)` updates from `μ*_β = 0` until the
/// coefficient means move by less than `opts.tol` in max norm.
pub fn cavi_probit(data: &Dataset, prior: &ProbitPrior, opts: &CaviOptions) -> Result<ProbitVbPosterior> {
    let work = Work::new(data, prior)?;
    let mut mu_beta = DVector::zeros(data.p());
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        if iterations == opts.max_iter {
            return Err(Error::NoConvergence {
                context: "probit CAVI",
                iterations,
                last: mu_beta.iter().copied().collect(),
            });
        }
        iterations += 1;
        let mu_z = probit_latent_means(data, &mu_beta);
        let next = work.beta_update(data, &mu_z);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence {
                context: "probit CAVI",
                iterations,
                last: mu_beta.iter().copied().collect(),
            });
        }
        let delta = (&next - &mu_beta).amax();
        mu_beta = next;
        trace.push(work.bound(data, prior, &mu_beta));
        if delta < opts.tol {
            break;
        }
    }
    let mut sigma_beta = work.update.inverse();
    symmetrize(&mut sigma_beta);
    Ok(ProbitVbPosterior {
        mu_z: probit_latent_means(data, &mu_beta),
        sigma_beta,
        elbo: *trace.last().expect("at least one sweep"),
        mu_beta,
        iterations,
        elbo_trace: trace,
    })
}

/// One full sweep (`q(z)` then `q(β)`) starting from `mu_beta`.
pub fn probit_sweep(data: &Dataset, prior: &ProbitPrior, mu_beta: &DVector<f64>) -> Result<DVector<f64>> {
    let work = Work::new(data, prior)?;
    Ok(work.beta_update(data, &probit_latent_means(data, mu_beta)))
}

/// Analytic bound at the posterior's `μ*_β`, with `q(z)` optimal for it.
pub fn elbo_probit(post: &ProbitVbPosterior, prior: &ProbitPrior, data: &Dataset) -> Result<f64> {
    elbo_probit_at(&post.mu_beta, prior, data)
}

pub fn elbo_probit_at(mu_beta: &DVector<f64>, prior: &ProbitPrior, data: &Dataset) -> Result<f64> {
    if mu_beta.len() != data.p() {
        return Err(Error::DimensionMismatch {
            context: "probit posterior mean",
            expected: data.p(),
            found: mu_beta.len(),
        });
    }
    let work = Work::new(data, prior)?;
    Ok(work.bound(data, prior, mu_beta))
}
