//! Variational engines and the shared posterior interface.

pub mod linear;
pub mod probit;

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::cholesky;
use crate::model::{LinearParams, ModelKind, Params, ProbitParams};

pub use self::linear::{cavi_linear, elbo_linear, linear_updates, LinearPrior, LinearVbPosterior};
pub use self::probit::{
    cavi_probit, elbo_probit, elbo_probit_at, probit_latent_means, probit_sweep, ProbitPrior,
    ProbitVbPosterior,
};

/// Prior scale used by the simulation studies: `Ṽ = 10⁵ I`.
pub const DEFAULT_PRIOR_SCALE: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaviOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl CaviOptions {
    /// Relative change of `b*` below `1e-8`.
    pub fn linear() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 500,
        }
    }

    /// Max-norm change of `μ*_β` below `1e-6`.
    pub fn probit() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 500,
        }
    }

    pub fn for_kind(kind: ModelKind) -> Self {
        match kind {
            ModelKind::LinearGaussian => Self::linear(),
            ModelKind::Probit => Self::probit(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    Linear(LinearPrior),
    Probit(ProbitPrior),
}

impl Prior {
    /// `μ̃ = 0`, `Ṽ = scale · I`, and `Gamma(a, b)` on the precision for the
    /// linear model.
    pub fn isotropic(kind: ModelKind, p: usize, scale: f64, a: f64, b: f64) -> Result<Self> {
        Ok(match kind {
            ModelKind::LinearGaussian => Prior::Linear(LinearPrior::isotropic(p, scale, a, b)?),
            ModelKind::Probit => Prior::Probit(ProbitPrior::isotropic(p, scale)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Prior::Linear(_) => ModelKind::LinearGaussian,
            Prior::Probit(_) => ModelKind::Probit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VbPosterior {
    Linear(LinearVbPosterior),
    Probit(ProbitVbPosterior),
}

/// Fits the variational posterior matching the prior's model.
pub fn fit_vb(data: &Dataset, prior: &Prior, opts: &CaviOptions) -> Result<VbPosterior> {
    Ok(match prior {
        Prior::Linear(p) => VbPosterior::Linear(cavi_linear(data, p, opts)?),
        Prior::Probit(p) => VbPosterior::Probit(cavi_probit(data, p, opts)?),
    })
}

impl VbPosterior {
    pub fn kind(&self) -> ModelKind {
        match self {
            VbPosterior::Linear(_) => ModelKind::LinearGaussian,
            VbPosterior::Probit(_) => ModelKind::Probit,
        }
    }

    pub fn elbo(&self) -> f64 {
        match self {
            VbPosterior::Linear(p) => p.elbo,
            VbPosterior::Probit(p) => p.elbo,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            VbPosterior::Linear(p) => p.iterations,
            VbPosterior::Probit(p) => p.iterations,
        }
    }

    /// Variational posterior mean `θ̄ᵛᴮ`.
    pub fn mean(&self) -> Params {
        vb_mean(self)
    }

    /// Covariance of `θ` under `q`; block diagonal across the factors.
    pub fn covariance(&self) -> DMatrix<f64> {
        match self {
            VbPosterior::Linear(p) => {
                let k = p.mu_beta.len();
                let mut cov = DMatrix::zeros(k + 1, k + 1);
                cov.view_mut((0, 0), (k, k)).copy_from(&p.v_beta);
                cov[(k, k)] = p.a_h / (p.b_h * p.b_h);
                cov
            }
            VbPosterior::Probit(p) => p.sigma_beta.clone(),
        }
    }
}

/// `θ̄ᵛᴮ`: `(μ*_β, a*/b*)` for the linear model, `μ*_β` for probit.
pub fn vb_mean(post: &VbPosterior) -> Params {
    match post {
        VbPosterior::Linear(p) => Params::Linear(LinearParams {
            beta: p.mu_beta.clone(),
            h: p.mean_precision(),
        }),
        VbPosterior::Probit(p) => Params::Probit(ProbitParams {
            beta: p.mu_beta.clone(),
        }),
    }
}

/// Independent draws from `q`, reproducible for a fixed seed.
pub fn sample_vb_posterior(post: &VbPosterior, count: usize, seed: u64) -> Result<Vec<Params>> {
    if count == 0 {
        return Err(Error::EmptyInput("posterior draw count"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mean, cov) = match post {
        VbPosterior::Linear(p) => (&p.mu_beta, &p.v_beta),
        VbPosterior::Probit(p) => (&p.mu_beta, &p.sigma_beta),
    };
    let chol = cholesky(cov, "variational covariance")?;
    let l = chol.l();
    let k = mean.len();
    let gamma = match post {
        VbPosterior::Linear(p) => Some(
            Gamma::new(p.a_h, 1.0 / p.b_h)
                .map_err(|_| Error::NonPositivePrecision(p.b_h))?,
        ),
        VbPosterior::Probit(_) => None,
    };
    let mut draws = Vec::with_capacity(count);
    for _ in 0..count {
        let z = DVector::from_fn(k, |_, _| StandardNormal.sample(&mut rng));
        let beta = mean + &l * z;
        draws.push(match &gamma {
            Some(g) => Params::Linear(LinearParams {
                beta,
                h: g.sample(&mut rng),
            }),
            None => Params::Probit(ProbitParams { beta }),
        });
    }
    Ok(draws)
}
